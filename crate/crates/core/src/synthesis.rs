//! Arrival maps and the step prices that realize them.
//!
//! An [`ArrivalMap`] sends a willingness-to-pay `b` to slot `T_i` when
//! `B_i ≤ b < B_{i+1}` (and to `T_N` for `b ≥ B_N`). [`synthesize_prices`]
//! builds the step schedule that makes early-preference motorists choose
//! exactly that slot, [`induced_map`] goes the other way, and
//! [`verify_realization`] checks the pairwise no-defection inequalities
//! exactly.

use std::fmt;
use std::io::Read;

use crate::csvfmt::{comment_lines, CsvDocument};
use crate::error::{FormatError, ModelError, SynthesisError};
use crate::model::{optimal_arrival_fast, CostParams};
use crate::money::{Money, Rate};
use crate::schedule::PriceSchedule;
use crate::time::TimeOfDay;

pub const MAP_HEADER: [&str; 2] = ["threshold_dollars_per_min", "slot_time"];

/// Default resolution of the willingness-to-pay grid, 0.001 $/min.
pub const DEFAULT_GRID_STEP: Rate = Rate::from_micros_u32(1_000);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrivalMap {
    thresholds: Vec<Rate>,
    slot_times: Vec<TimeOfDay>,
    preferred_time: TimeOfDay,
}

impl ArrivalMap {
    pub fn new(
        thresholds: Vec<Rate>,
        slot_times: Vec<TimeOfDay>,
        preferred_time: TimeOfDay,
    ) -> Result<Self, SynthesisError> {
        let invalid = |msg: String| Err(SynthesisError::InvalidMap(msg));
        if thresholds.is_empty() {
            return invalid("a map needs at least one slot".into());
        }
        if thresholds.len() != slot_times.len() {
            return invalid(format!(
                "{} thresholds but {} slot times",
                thresholds.len(),
                slot_times.len()
            ));
        }
        if thresholds[0] != Rate::ZERO {
            return invalid(format!("first threshold must be 0, got {}", thresholds[0]));
        }
        if let Some(w) = thresholds.windows(2).find(|w| w[0] >= w[1]) {
            return invalid(format!(
                "thresholds must be strictly increasing ({} then {})",
                w[0], w[1]
            ));
        }
        if let Some(w) = slot_times.windows(2).find(|w| w[0] >= w[1]) {
            return invalid(format!(
                "slot times must be strictly increasing ({} then {})",
                w[0], w[1]
            ));
        }
        let last = slot_times[slot_times.len() - 1];
        if last != preferred_time {
            return invalid(format!(
                "last slot {last} must equal the preferred time {preferred_time}"
            ));
        }
        Ok(ArrivalMap {
            thresholds,
            slot_times,
            preferred_time,
        })
    }

    pub fn thresholds(&self) -> &[Rate] {
        &self.thresholds
    }

    pub fn slot_times(&self) -> &[TimeOfDay] {
        &self.slot_times
    }

    pub fn preferred_time(&self) -> TimeOfDay {
        self.preferred_time
    }

    pub fn len(&self) -> usize {
        self.slot_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slot_times.is_empty()
    }

    /// Index of the bucket containing `b`.
    pub fn bucket(&self, b: Rate) -> usize {
        self.thresholds.partition_point(|&lower| lower <= b) - 1
    }

    /// The slot the map assigns to willingness-to-pay `b`.
    pub fn lookup(&self, b: Rate) -> TimeOfDay {
        self.slot_times[self.bucket(b)]
    }

    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = format!("# preferred,{}\n", self.preferred_time);
        comment_lines(&mut out, comments);
        out.push_str(&MAP_HEADER.join(","));
        out.push('\n');
        for (b, t) in self.thresholds.iter().zip(&self.slot_times) {
            out.push_str(&format!("{b},{t}\n"));
        }
        out
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, FormatError> {
        let doc = CsvDocument::read(reader, &MAP_HEADER)?;
        let (line, preferred) = doc
            .directive("preferred")
            .ok_or_else(|| FormatError::Invalid("missing `# preferred,HH:MM` line".into()))?;
        if preferred.len() != 1 {
            return Err(FormatError::at(line, "preferred directive needs one time"));
        }
        let preferred: TimeOfDay = preferred[0].parse().map_err(|e| FormatError::at(line, e))?;
        let mut thresholds = Vec::with_capacity(doc.records.len());
        let mut slots = Vec::with_capacity(doc.records.len());
        for (line, rec) in &doc.records {
            thresholds.push(rec[0].parse().map_err(|e| FormatError::at(*line, e))?);
            slots.push(rec[1].parse().map_err(|e| FormatError::at(*line, e))?);
        }
        ArrivalMap::new(thresholds, slots, preferred)
            .map_err(|e| FormatError::Invalid(e.to_string()))
    }
}

/// Step prices realizing `map`:
/// `p_i = p_{i-1} + B_i·(T_i − T_{i-1})`, starting from `p1`.
///
/// The returned schedule's domain is `[T_1, T_N]`; widen it with
/// [`PriceSchedule::with_domain`] if needed.
pub fn synthesize_prices(map: &ArrivalMap, p1: Money) -> Result<PriceSchedule, SynthesisError> {
    if p1.is_negative() {
        return Err(ModelError::InvalidAmount(format!("p1 must be non-negative, got {p1}")).into());
    }
    let mut prices = Vec::with_capacity(map.len());
    prices.push(p1);
    for i in 1..map.len() {
        let step = map.thresholds[i].times(map.slot_times[i] - map.slot_times[i - 1])?;
        let next = prices[i - 1]
            .checked_add(step)
            .ok_or(ModelError::Overflow)?;
        prices.push(next);
    }
    let first = map.slot_times[0];
    Ok(PriceSchedule::new(
        map.slot_times.clone(),
        prices,
        first,
        map.preferred_time,
    )?)
}

/// `0, step, 2·step, …` up to and including `max`.
pub fn uniform_b_grid(step: Rate, max: Rate) -> Result<Vec<Rate>, SynthesisError> {
    if step == Rate::ZERO {
        return Err(SynthesisError::InvalidGrid(
            "grid step must be positive".into(),
        ));
    }
    let n = max.micros() / step.micros();
    if n > 50_000_000 {
        return Err(SynthesisError::InvalidGrid(format!(
            "{} points is too many",
            n + 1
        )));
    }
    (0..=n)
        .map(|k| Ok(Rate::from_micros(k * step.micros())?))
        .collect()
}

/// The map a schedule induces on early-preference motorists, sampled on
/// `b_grid`.
///
/// Each returned threshold is the first grid value at which its slot is
/// chosen, so it lies within one grid step above the exact breakpoint.
pub fn induced_map(
    schedule: &PriceSchedule,
    preferred_time: TimeOfDay,
    b_grid: &[Rate],
) -> Result<ArrivalMap, SynthesisError> {
    let Some(&first) = b_grid.first() else {
        return Err(SynthesisError::InvalidGrid("empty b grid".into()));
    };
    if first != Rate::ZERO {
        return Err(SynthesisError::InvalidGrid(format!(
            "b grid must start at 0, got {first}"
        )));
    }
    if let Some(w) = b_grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(SynthesisError::InvalidGrid(format!(
            "b grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }

    let mut thresholds: Vec<Rate> = Vec::new();
    let mut slots: Vec<TimeOfDay> = Vec::new();
    for &b in b_grid {
        let params = CostParams::early_preference(b, preferred_time);
        let t = optimal_arrival_fast(&params, schedule)?;
        match slots.last() {
            Some(&last) if last == t => {}
            Some(&last) if last > t => {
                // Cannot happen with latest-minimizer tie-breaking; guard anyway.
                return Err(SynthesisError::InvalidMap(format!(
                    "arrival time decreased from {last} to {t} at b = {b}"
                )));
            }
            _ => {
                thresholds.push(b);
                slots.push(t);
            }
        }
    }
    let last = *slots.last().expect("grid is non-empty");
    if last != preferred_time {
        return Err(SynthesisError::PreferredNotReached {
            last,
            preferred: preferred_time,
        });
    }
    ArrivalMap::new(thresholds, slots, preferred_time)
}

/// A violated no-defection inequality: at willingness-to-pay `b`, a motorist
/// assigned to `slot` strictly prefers `rival`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defection {
    /// 1-based slot index the map assigns.
    pub slot: usize,
    /// 1-based slot index the motorist would rather take.
    pub rival: usize,
    pub b: Rate,
    pub assigned_cost: Money,
    pub rival_cost: Money,
}

impl fmt::Display for Defection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at b = {} $/min slot {} costs {} but slot {} costs {}",
            self.b, self.slot, self.assigned_cost, self.rival, self.rival_cost
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerificationReport {
    Pass,
    Fail(Defection),
}

impl VerificationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, VerificationReport::Pass)
    }
}

/// Exact check that `schedule` realizes `map` for early-preference motorists.
///
/// For every bucket `i` and every rival slot `j` it checks
/// `p_i + b(T − T_i) ≤ p_j + b(T − T_j)`. Both sides are affine in `b`, so
/// testing the bucket's end points `B_i` and `B_{i+1} − 1µ` decides the whole
/// bucket. The last bucket is unbounded, but the slack there grows with `b`
/// (since `T − T_N = 0`), so `B_N` alone suffices.
pub fn verify_realization(
    map: &ArrivalMap,
    schedule: &PriceSchedule,
) -> Result<VerificationReport, SynthesisError> {
    if schedule.boundaries() != map.slot_times() {
        return Err(SynthesisError::BreakpointMismatch(format!(
            "schedule has {} breakpoints, map has {} slots",
            schedule.len(),
            map.len()
        )));
    }
    let preferred = i128::from(map.preferred_time.minutes_since_midnight());
    let lead: Vec<i128> = map
        .slot_times
        .iter()
        .map(|t| preferred - i128::from(t.minutes_since_midnight()))
        .collect();
    let prices = schedule.prices();
    let cost = |slot: usize, b: i128| i128::from(prices[slot].micros()) + b * lead[slot];

    let n = map.len();
    for i in 0..n {
        let mut probes = vec![map.thresholds[i]];
        if i + 1 < n {
            let top = Rate::from_micros(map.thresholds[i + 1].micros() - 1)?;
            if top != map.thresholds[i] {
                probes.push(top);
            }
        }
        for b in probes {
            let bm = i128::from(b.micros());
            let own = cost(i, bm);
            for j in (0..n).filter(|&j| j != i) {
                let other = cost(j, bm);
                if own > other {
                    let to_money = |v: i128| {
                        i64::try_from(v)
                            .map(Money::from_micros)
                            .map_err(|_| ModelError::Overflow)
                    };
                    return Ok(VerificationReport::Fail(Defection {
                        slot: i + 1,
                        rival: j + 1,
                        b,
                        assigned_cost: to_money(own)?,
                        rival_cost: to_money(other)?,
                    }));
                }
            }
        }
    }
    Ok(VerificationReport::Pass)
}
