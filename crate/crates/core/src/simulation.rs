//! Monte Carlo arrival-flow simulation.
//!
//! Each draw picks a motorist class, samples its early penalty, computes the
//! cost-minimizing arrival minute under the schedule, perturbs it with
//! Gaussian noise rounded to whole minutes, clamps it to the schedule domain
//! and counts it in a fixed-width bin.

use std::thread;

use crate::csvfmt::comment_lines;
use crate::error::{ModelError, SimulationError};
use crate::model::{
    fast_path_applies, optimal_arrival, optimal_arrival_fast, CostParams, LatePenalty,
};
use crate::money::{Money, Rate};
use crate::rng::{DrawStream, DrawUniforms};
use crate::schedule::PriceSchedule;
use crate::time::TimeOfDay;
use crate::wtp::BDistribution;

pub const HISTOGRAM_HEADER: [&str; 2] = ["bin_start", "count"];

/// How a class's early-arrival penalty `b₁` is drawn.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum EarlyPenalty {
    Fixed(Rate),
    TruncatedGaussian(BDistribution),
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MotoristClass {
    pub weight: f64,
    pub early_penalty: EarlyPenalty,
    pub late_penalty: LatePenalty,
    pub preferred_time: TimeOfDay,
}

/// A weighted mixture of motorist classes.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    classes: Vec<MotoristClass>,
    cumulative: Vec<f64>,
}

impl Population {
    pub fn new(classes: Vec<MotoristClass>) -> Result<Self, SimulationError> {
        if classes.is_empty() {
            return Err(SimulationError::InvalidConfig(
                "population has no classes".into(),
            ));
        }
        if let Some(c) = classes
            .iter()
            .find(|c| !(c.weight.is_finite() && c.weight > 0.0))
        {
            return Err(SimulationError::InvalidConfig(format!(
                "class weights must be positive, got {}",
                c.weight
            )));
        }
        let total: f64 = classes.iter().map(|c| c.weight).sum();
        let mut acc = 0.0;
        let cumulative = classes
            .iter()
            .map(|c| {
                acc += c.weight;
                acc / total
            })
            .collect();
        Ok(Population {
            classes,
            cumulative,
        })
    }

    /// Early-preference motorists with `b₁` drawn from `dist`.
    pub fn early_preference(dist: BDistribution, preferred_time: TimeOfDay) -> Self {
        Population::new(vec![MotoristClass {
            weight: 1.0,
            early_penalty: EarlyPenalty::TruncatedGaussian(dist),
            late_penalty: LatePenalty::Prohibitive,
            preferred_time,
        }])
        .expect("single positive-weight class")
    }

    pub fn classes(&self) -> &[MotoristClass] {
        &self.classes
    }

    /// Normalized weight of each class.
    pub fn proportions(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    fn pick(&self, u: f64) -> usize {
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.classes.len() - 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub n_draws: u64,
    pub population: Population,
    pub schedule: PriceSchedule,
    pub noise_sigma_minutes: f64,
    pub seed: u64,
    /// Bin width; when it does not divide the domain the last bin is shorter.
    pub bin_minutes: u32,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), SimulationError> {
        if self.n_draws == 0 {
            return Err(SimulationError::InvalidConfig(
                "n_draws must be at least 1".into(),
            ));
        }
        if self.bin_minutes == 0 {
            return Err(SimulationError::InvalidConfig(
                "bin_minutes must be positive".into(),
            ));
        }
        if !(self.noise_sigma_minutes.is_finite() && self.noise_sigma_minutes >= 0.0) {
            return Err(SimulationError::InvalidConfig(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma_minutes
            )));
        }
        for class in &self.population.classes {
            // Surfaces an unreachable preferred time before any sampling.
            let probe = match class.early_penalty {
                EarlyPenalty::Fixed(r) => r,
                EarlyPenalty::TruncatedGaussian(_) => Rate::ZERO,
            };
            best_arrival(&self.schedule, probe, class)?;
        }
        Ok(())
    }
}

fn best_arrival(
    schedule: &PriceSchedule,
    early: Rate,
    class: &MotoristClass,
) -> Result<TimeOfDay, ModelError> {
    let params = CostParams {
        early_penalty: early,
        late_penalty: class.late_penalty,
        preferred_time: class.preferred_time,
        travel_cost: Money::ZERO,
    };
    if fast_path_applies(&params, schedule) {
        optimal_arrival_fast(&params, schedule)
    } else {
        optimal_arrival(&params, schedule)
    }
}

enum Resolver {
    Fixed(TimeOfDay),
    Sampled(BDistribution),
}

/// Simulated arrivals binned over the schedule domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowHistogram {
    bin_start_times: Vec<TimeOfDay>,
    counts: Vec<u64>,
    total: u64,
    bin_minutes: u32,
    domain_end: TimeOfDay,
}

impl FlowHistogram {
    fn empty(schedule: &PriceSchedule, bin_minutes: u32) -> Self {
        let bin_start_times: Vec<TimeOfDay> = schedule
            .domain_start()
            .through(schedule.domain_end())
            .step_by(bin_minutes as usize)
            .collect();
        let counts = vec![0; bin_start_times.len()];
        FlowHistogram {
            bin_start_times,
            counts,
            total: 0,
            bin_minutes,
            domain_end: schedule.domain_end(),
        }
    }

    pub fn bin_start_times(&self) -> &[TimeOfDay] {
        &self.bin_start_times
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bin_minutes(&self) -> u32 {
        self.bin_minutes
    }

    /// Index of the bin holding minute `t`, if `t` is inside the domain.
    pub fn bin_of(&self, t: TimeOfDay) -> Option<usize> {
        let first = *self.bin_start_times.first()?;
        if t < first || t > self.domain_end {
            return None;
        }
        Some((t - first).0 as usize / self.bin_minutes as usize)
    }

    pub fn count_at(&self, t: TimeOfDay) -> u64 {
        self.bin_of(t).map_or(0, |i| self.counts[i])
    }

    pub fn fraction_at(&self, t: TimeOfDay) -> f64 {
        self.count_at(t) as f64 / self.total as f64
    }

    /// Bins whose count is strictly above both neighbours, with runs of equal
    /// counts treated as one bin. Empty bins never qualify; outside the
    /// domain counts as zero. Returns the start time of the run's first bin.
    pub fn local_maxima(&self) -> Vec<TimeOfDay> {
        let mut runs: Vec<(usize, u64)> = Vec::new();
        for (i, &c) in self.counts.iter().enumerate() {
            if runs.last().is_none_or(|&(_, prev)| prev != c) {
                runs.push((i, c));
            }
        }
        let mut peaks = Vec::new();
        for (k, &(start, c)) in runs.iter().enumerate() {
            let left = if k == 0 { 0 } else { runs[k - 1].1 };
            let right = runs.get(k + 1).map_or(0, |r| r.1);
            if c > 0 && c > left && c > right {
                peaks.push(self.bin_start_times[start]);
            }
        }
        peaks
    }

    /// Bin with the largest count (earliest on ties).
    pub fn max_bin(&self) -> (TimeOfDay, u64) {
        let (i, &c) = self
            .counts
            .iter()
            .enumerate()
            .rev()
            .max_by_key(|(_, c)| **c)
            .expect("at least one bin");
        (self.bin_start_times[i], c)
    }

    /// Bin with the smallest count (earliest on ties).
    pub fn min_bin(&self) -> (TimeOfDay, u64) {
        let (i, &c) = self
            .counts
            .iter()
            .enumerate()
            .min_by_key(|(_, c)| **c)
            .expect("at least one bin");
        (self.bin_start_times[i], c)
    }

    /// `bin_start,count` rows, plus a `fraction` column when requested.
    pub fn to_csv(&self, with_fraction: bool, comments: &[String]) -> String {
        let mut out = String::new();
        comment_lines(&mut out, comments);
        out.push_str(&HISTOGRAM_HEADER.join(","));
        out.push_str(if with_fraction { ",fraction\n" } else { "\n" });
        for (t, &c) in self.bin_start_times.iter().zip(&self.counts) {
            if with_fraction {
                out.push_str(&format!("{t},{c},{}\n", c as f64 / self.total as f64));
            } else {
                out.push_str(&format!("{t},{c}\n"));
            }
        }
        out
    }
}

/// Runs `config.n_draws` draws split across `workers` threads.
///
/// Draw `i` always reads the same random words, so the histogram is
/// bit-identical for any `workers ≥ 1`.
pub fn run_simulation(
    config: &SimulationConfig,
    workers: usize,
) -> Result<FlowHistogram, SimulationError> {
    if workers == 0 {
        return Err(SimulationError::InvalidConfig(
            "workers must be at least 1".into(),
        ));
    }
    config.validate()?;

    let schedule = &config.schedule;
    let resolvers: Vec<Resolver> = config
        .population
        .classes
        .iter()
        .map(|class| match class.early_penalty {
            EarlyPenalty::Fixed(r) => best_arrival(schedule, r, class).map(Resolver::Fixed),
            EarlyPenalty::TruncatedGaussian(d) => Ok(Resolver::Sampled(d)),
        })
        .collect::<Result<_, _>>()?;

    let mut hist = FlowHistogram::empty(schedule, config.bin_minutes);
    let n = config.n_draws;
    let workers = (workers as u64).min(n).max(1);
    let chunk = n.div_ceil(workers);

    let partials: Vec<Result<Vec<u64>, SimulationError>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(n);
                let resolvers = &resolvers;
                let bins = hist.counts.len();
                scope.spawn(move || simulate_range(config, resolvers, lo, hi, bins))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });
    for part in partials {
        for (acc, c) in hist.counts.iter_mut().zip(part?) {
            *acc += c;
        }
    }
    hist.total = hist.counts.iter().sum();
    debug_assert_eq!(hist.total, n);
    Ok(hist)
}

fn simulate_range(
    config: &SimulationConfig,
    resolvers: &[Resolver],
    lo: u64,
    hi: u64,
    bins: usize,
) -> Result<Vec<u64>, SimulationError> {
    let schedule = &config.schedule;
    let start = schedule.domain_start().minutes_since_midnight();
    let end = schedule.domain_end().minutes_since_midnight();
    let bin = config.bin_minutes as i32;
    let mut counts = vec![0u64; bins];
    if lo >= hi {
        return Ok(counts);
    }
    let mut stream = DrawStream::at(config.seed, lo);
    for _ in lo..hi {
        let DrawUniforms { class, wtp, noise } = stream.next_draw();
        let k = config.population.pick(class);
        let t_star = match &resolvers[k] {
            Resolver::Fixed(t) => *t,
            Resolver::Sampled(dist) => {
                let b = dist
                    .sample_rate(wtp)
                    .map_err(|e| SimulationError::InvalidConfig(e.to_string()))?;
                best_arrival(schedule, b, &config.population.classes[k])?
            }
        };
        let offset = if config.noise_sigma_minutes > 0.0 {
            let shift = (config.noise_sigma_minutes * noise).round();
            shift.clamp(-(1 << 20) as f64, (1 << 20) as f64) as i32
        } else {
            0
        };
        let arrival = (t_star.minutes_since_midnight() + offset).clamp(start, end);
        counts[((arrival - start) / bin) as usize] += 1;
    }
    Ok(counts)
}

/// Canned population reproducing three flow peaks around a charging window:
/// just before it opens, at the preferred time, and just after it closes.
#[derive(Clone, Debug)]
pub struct ThreePeakScenario {
    pub config: SimulationConfig,
    /// Last free minute before the window, preferred time, first free minute after.
    pub expected_peaks: [TimeOfDay; 3],
}

impl ThreePeakScenario {
    /// Window 08:00–09:59 at $3, domain 07:00–11:00, preferred time 08:45.
    ///
    /// Classes, by weight: 40% with b₁ = 0.01 $/min (arrive 07:59), 35% with
    /// b₁ = 0.2 $/min (pay and arrive 08:45), 25% with b₁ = 0.2 and a
    /// tolerable late penalty b₂ = 0.01 $/min (wait until 10:00).
    pub fn canned(n_draws: u64, seed: u64) -> Self {
        let t = |h, m| TimeOfDay::hm(h, m).expect("valid time");
        let rate = |micros| Rate::from_micros(micros).expect("non-negative");
        let preferred = t(8, 45);
        let schedule = PriceSchedule::new(
            vec![t(7, 59), t(9, 59), t(11, 0)],
            vec![Money::ZERO, Money::dollars(3), Money::ZERO],
            t(7, 0),
            t(11, 0),
        )
        .expect("valid canned schedule");
        let class = |weight, early, late| MotoristClass {
            weight,
            early_penalty: EarlyPenalty::Fixed(rate(early)),
            late_penalty: late,
            preferred_time: preferred,
        };
        let population = Population::new(vec![
            class(0.40, 10_000, LatePenalty::Prohibitive),
            class(0.35, 200_000, LatePenalty::Prohibitive),
            class(0.25, 200_000, LatePenalty::PerMinute(rate(10_000))),
        ])
        .expect("valid canned population");
        ThreePeakScenario {
            config: SimulationConfig {
                n_draws,
                population,
                schedule,
                noise_sigma_minutes: 0.0,
                seed,
                bin_minutes: 1,
            },
            expected_peaks: [t(7, 59), preferred, t(10, 0)],
        }
    }

    /// Same population under a different schedule.
    pub fn with_schedule(mut self, schedule: PriceSchedule) -> Self {
        self.config.schedule = schedule;
        self
    }

    pub fn class_proportions(&self) -> Vec<f64> {
        self.config.population.proportions()
    }

    pub fn run(&self, workers: usize) -> Result<FlowHistogram, SimulationError> {
        run_simulation(&self.config, workers)
    }
}

/// Runs the canned three-peak scenario.
pub fn three_peak_scenario(
    n_draws: u64,
    seed: u64,
    workers: usize,
) -> Result<FlowHistogram, SimulationError> {
    ThreePeakScenario::canned(n_draws, seed).run(workers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TimeOfDay {
        s.parse().unwrap()
    }

    fn config(schedule: PriceSchedule, n: u64, noise: f64) -> SimulationConfig {
        let dist = BDistribution::new(0.051, 0.03).unwrap();
        SimulationConfig {
            n_draws: n,
            population: Population::early_preference(dist, t("08:45")),
            schedule,
            noise_sigma_minutes: noise,
            seed: 11,
            bin_minutes: 1,
        }
    }

    fn flat() -> PriceSchedule {
        PriceSchedule::constant(Money::ZERO, t("07:00"), t("11:00")).unwrap()
    }

    #[test]
    fn free_road_is_a_point_mass_at_preferred_time() {
        let h = run_simulation(&config(flat(), 5_000, 0.0), 2).unwrap();
        assert_eq!(h.total(), 5_000);
        assert_eq!(h.count_at(t("08:45")), 5_000);
        assert_eq!(h.local_maxima(), vec![t("08:45")]);
    }

    #[test]
    fn clamping_conserves_every_draw() {
        let s = PriceSchedule::constant(Money::ZERO, t("08:40"), t("08:50")).unwrap();
        let h = run_simulation(&config(s, 20_000, 30.0), 3).unwrap();
        assert_eq!(h.counts().iter().sum::<u64>(), 20_000);
        assert_eq!(h.total(), 20_000);
        let (first, last) = (h.counts()[0], *h.counts().last().unwrap());
        // Roughly 43% of N(0, 30) lands more than 5 minutes below and 5 above.
        assert!(first > 7_000 && last > 7_000, "{first} {last}");
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let cfg = config(flat(), 10_007, 2.0);
        let one = run_simulation(&cfg, 1).unwrap();
        for w in [2, 3, 8, 64] {
            assert_eq!(run_simulation(&cfg, w).unwrap(), one, "{w} workers");
        }
        let mut other = cfg.clone();
        other.seed = 12;
        assert_ne!(run_simulation(&other, 1).unwrap(), one);
    }

    #[test]
    fn last_bin_is_truncated() {
        let s = PriceSchedule::constant(Money::ZERO, t("07:00"), t("07:10")).unwrap();
        let mut cfg = config(s, 100, 0.0);
        cfg.population =
            Population::early_preference(BDistribution::new(0.05, 0.01).unwrap(), t("07:10"));
        cfg.bin_minutes = 4;
        let h = run_simulation(&cfg, 1).unwrap();
        assert_eq!(h.bin_start_times(), &[t("07:00"), t("07:04"), t("07:08")]);
        assert_eq!(h.counts(), &[0, 0, 100]);
        assert_eq!(h.bin_of(t("07:10")), Some(2));
        assert_eq!(h.bin_of(t("07:11")), None);
        assert_eq!(h.bin_of(t("06:59")), None);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let good = config(flat(), 10, 0.0);
        assert!(run_simulation(&good, 0).is_err());
        let mut c = good.clone();
        c.n_draws = 0;
        assert!(run_simulation(&c, 1).is_err());
        let mut c = good.clone();
        c.bin_minutes = 0;
        assert!(run_simulation(&c, 1).is_err());
        let mut c = good.clone();
        c.noise_sigma_minutes = -1.0;
        assert!(run_simulation(&c, 1).is_err());
        let mut c = good;
        // Preferred time before the domain leaves no admissible minute.
        c.population =
            Population::early_preference(BDistribution::new(0.05, 0.01).unwrap(), t("06:00"));
        assert!(run_simulation(&c, 1).is_err());
        assert!(Population::new(vec![]).is_err());
    }

    #[test]
    fn population_weights_are_normalized() {
        let class = |w| MotoristClass {
            weight: w,
            early_penalty: EarlyPenalty::Fixed(Rate::ZERO),
            late_penalty: LatePenalty::Prohibitive,
            preferred_time: t("08:00"),
        };
        let p = Population::new(vec![class(1.0), class(3.0)]).unwrap();
        assert_eq!(p.proportions(), vec![0.25, 0.75]);
        assert_eq!(p.pick(0.1), 0);
        assert_eq!(p.pick(0.25), 1);
        assert_eq!(p.pick(0.999_999), 1);
        assert!(Population::new(vec![class(0.0)]).is_err());
        assert!(Population::new(vec![class(f64::NAN)]).is_err());
    }

    #[test]
    fn local_maxima_compress_plateaus() {
        let h = FlowHistogram {
            bin_start_times: (0..8)
                .map(|m| TimeOfDay::from_minutes(m).unwrap())
                .collect(),
            counts: vec![3, 5, 5, 2, 0, 0, 1, 1],
            total: 17,
            bin_minutes: 1,
            domain_end: TimeOfDay::from_minutes(7).unwrap(),
        };
        let mins: Vec<i32> = h
            .local_maxima()
            .iter()
            .map(|t| t.minutes_since_midnight())
            .collect();
        assert_eq!(mins, vec![1, 6]);
        assert_eq!(h.max_bin().1, 5);
        assert_eq!(h.min_bin(), (TimeOfDay::from_minutes(4).unwrap(), 0));
    }

    #[test]
    fn histogram_csv_layout() {
        let h = run_simulation(&config(flat(), 4, 0.0), 1).unwrap();
        let plain = h.to_csv(false, &["seed 11".into()]);
        assert!(plain.starts_with("# seed 11\nbin_start,count\n07:00,0\n"));
        assert!(plain.contains("\n08:45,4\n"));
        let with = h.to_csv(true, &[]);
        assert!(with.starts_with("bin_start,count,fraction\n07:00,0,0\n"));
        assert!(with.contains("\n08:45,4,1\n"));
    }

    #[test]
    fn three_peak_scenario_has_three_peaks() {
        let sc = ThreePeakScenario::canned(20_000, 5);
        let h = sc.run(4).unwrap();
        assert_eq!(h.local_maxima(), sc.expected_peaks.to_vec());
        let n = 20_000.0;
        for (peak, p) in sc.expected_peaks.iter().zip(sc.class_proportions()) {
            let frac = h.fraction_at(*peak);
            assert!(
                (frac - p).abs() <= 4.0 * (p * (1.0 - p) / n).sqrt(),
                "{peak}: {frac}"
            );
        }
        let free = sc.with_schedule(flat());
        assert_eq!(free.run(1).unwrap().local_maxima(), vec![t("08:45")]);
    }
}
