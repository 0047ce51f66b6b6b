use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use log::info;
use peakspread_core::{
    calibrate_from_ratio, curve_to_csv, fast_path_applies, induced_map, peak_ratio, read_flow_csv,
    run_simulation, synthesize_prices, uniform_b_grid, verify_realization, ArrivalMap, CostParams,
    FlowHistogram, Money, PriceSchedule, Rate, TimeOfDay, VerificationReport,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::provenance::Provenance;
use crate::{Cli, Command, GlobalArgs};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Synthesize {
            map,
            p1,
            domain_start,
            domain_end,
        } => synthesize(g, &map, p1, domain_start, domain_end),
        Command::Verify { map, schedule } => verify(g, &map, &schedule),
        Command::Fpmap {
            schedule,
            preferred,
            b_step,
            b_max,
        } => fpmap(g, &schedule, preferred, b_step, b_max),
        Command::Calibrate {
            flow,
            schedule,
            preferred,
            sigma_grid,
            window,
        } => calibrate(g, &flow, &schedule, preferred, &sigma_grid, window),
        Command::Simulate { draws, fraction } => simulate(g, draws, fraction),
    }
}

/// Where the data file and the human-readable report go. The report shares
/// stdout only when the data is written to a file.
struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    fn new(out: Option<PathBuf>) -> Self {
        Sink { out }
    }

    fn data(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).map_err(|e| CliError::io(path, e))?;
                info!("wrote {}", path.display());
                Ok(())
            }
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e)),
        }
    }

    fn report(&self, text: &str) {
        if self.out.is_some() {
            print!("{text}");
        } else {
            eprint!("{text}");
        }
    }
}

fn read_input(path: &Path, prov: &mut Provenance) -> Result<Vec<u8>, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    prov.add(&path.display().to_string(), &bytes);
    Ok(bytes)
}

fn read_map(path: &Path, prov: &mut Provenance) -> Result<ArrivalMap, CliError> {
    let bytes = read_input(path, prov)?;
    ArrivalMap::read_csv(bytes.as_slice()).map_err(|e| CliError::format(path, e))
}

fn read_schedule(path: &Path, prov: &mut Provenance) -> Result<PriceSchedule, CliError> {
    let bytes = read_input(path, prov)?;
    PriceSchedule::read_csv(bytes.as_slice()).map_err(|e| CliError::format(path, e))
}

fn start(command: &str, g: &GlobalArgs) -> Result<Provenance, CliError> {
    let mut prov = Provenance::new(command);
    if let Some(path) = &g.config {
        read_input(path, &mut prov)?;
    }
    if let Some(seed) = g.seed {
        prov.set_seed(seed);
    }
    Ok(prov)
}

fn synthesize(
    g: &GlobalArgs,
    map_path: &Path,
    p1: Money,
    domain_start: Option<TimeOfDay>,
    domain_end: Option<TimeOfDay>,
) -> Result<(), CliError> {
    let mut prov = start("synthesize", g)?;
    let map = read_map(map_path, &mut prov)?;
    prov.param("p1", p1);
    let mut schedule = synthesize_prices(&map, p1)?;
    if domain_start.is_some() || domain_end.is_some() {
        prov.param("domain", format!("{domain_start:?}-{domain_end:?}"));
        schedule = schedule.with_domain(
            domain_start.unwrap_or(schedule.domain_start()),
            domain_end.unwrap_or(schedule.domain_end()),
        )?;
    }

    let sink = Sink::new(g.out.clone());
    sink.data(&schedule.to_csv(&[prov.header()]))?;
    let mut table = format!(
        "{:>4}  {:>10}  {:>5}  {:>10}\n",
        "slot", "threshold", "time", "price"
    );
    for (i, ((b, t), p)) in map
        .thresholds()
        .iter()
        .zip(map.slot_times())
        .zip(schedule.prices())
        .enumerate()
    {
        writeln!(
            table,
            "{:>4}  {:>10}  {:>5}  {:>10}",
            i + 1,
            b.to_string(),
            t.to_string(),
            p.to_string()
        )
        .expect("string write");
    }
    sink.report(&table);
    Ok(())
}

fn verify(g: &GlobalArgs, map_path: &Path, schedule_path: &Path) -> Result<(), CliError> {
    let mut prov = start("verify", g)?;
    let map = read_map(map_path, &mut prov)?;
    let schedule = read_schedule(schedule_path, &mut prov)?;
    let report = verify_realization(&map, &schedule)?;
    let verdict = match &report {
        VerificationReport::Pass => "PASS".to_string(),
        VerificationReport::Fail(d) => format!("FAIL {d}"),
    };
    let text = format!("# {}\n{verdict}\n", prov.header());
    match &g.out {
        Some(path) => fs::write(path, &text).map_err(|e| CliError::io(path, e))?,
        None => print!("{text}"),
    }
    match report {
        VerificationReport::Pass => Ok(()),
        VerificationReport::Fail(d) => Err(CliError::Infeasible(format!(
            "schedule does not realize the map: {d}"
        ))),
    }
}

/// Smallest rate at which arriving at `preferred` is optimal, assuming the
/// fast-path conditions hold.
fn rate_reaching_preferred(
    schedule: &PriceSchedule,
    preferred: TimeOfDay,
) -> Result<Rate, CliError> {
    let at_t = schedule.price_at(preferred.min(schedule.domain_end()))?;
    let mut needed = 0i64;
    for &t in schedule.boundaries().iter().filter(|&&t| t < preferred) {
        let gap = at_t.micros() - schedule.price_at(t)?.micros();
        let lead = i64::from((preferred - t).0);
        if gap > 0 {
            needed = needed.max((gap + lead - 1) / lead);
        }
    }
    Ok(Rate::from_micros(needed)?)
}

fn fpmap(
    g: &GlobalArgs,
    schedule_path: &Path,
    preferred: TimeOfDay,
    b_step: Rate,
    b_max: Option<Rate>,
) -> Result<(), CliError> {
    let mut prov = start("fpmap", g)?;
    let schedule = read_schedule(schedule_path, &mut prov)?;
    let params = CostParams::early_preference(Rate::ZERO, preferred);
    if !fast_path_applies(&params, &schedule) {
        return Err(CliError::Validation(format!(
            "preferred time {preferred} is before the schedule domain"
        )));
    }
    let b_max = match b_max {
        Some(b) => b,
        None => rate_reaching_preferred(&schedule, preferred)?
            .checked_add(b_step)
            .ok_or_else(|| CliError::Validation("b grid overflows".into()))?,
    };
    prov.param("preferred", preferred);
    prov.param("b_step", b_step);
    prov.param("b_max", b_max);
    let grid = uniform_b_grid(b_step, b_max)?;
    info!("evaluating {} grid points", grid.len());
    let map = induced_map(&schedule, preferred, &grid)?;

    let sink = Sink::new(g.out.clone());
    sink.data(&map.to_csv(&[prov.header()]))?;
    let mut table = String::new();
    for (b, t) in map.thresholds().iter().zip(map.slot_times()) {
        writeln!(table, "b >= {b:<10} -> {t}").expect("string write");
    }
    sink.report(&table);
    Ok(())
}

fn calibrate(
    g: &GlobalArgs,
    flow_path: &Path,
    schedule_path: &Path,
    preferred: TimeOfDay,
    sigma_grid: &[f64],
    window: u32,
) -> Result<(), CliError> {
    let mut prov = start("calibrate", g)?;
    let flow_bytes = read_input(flow_path, &mut prov)?;
    let flow = read_flow_csv(flow_bytes.as_slice()).map_err(|e| CliError::format(flow_path, e))?;
    let schedule = read_schedule(schedule_path, &mut prov)?;
    prov.param("preferred", preferred);
    prov.param("sigma_grid", format!("{sigma_grid:?}"));
    prov.param("window", window);

    // The current schedule must split early-preference motorists between one
    // pre-charge minute and the preferred time.
    let b_max = rate_reaching_preferred(&schedule, preferred)?
        .checked_add(Rate::UNIT)
        .ok_or_else(|| CliError::Validation("b grid overflows".into()))?;
    // A micro-dollar grid sees every bucket a sampled rate can fall in;
    // coarsen only for implausibly large ranges.
    let step = Rate::UNIT.max(Rate::from_micros(b_max.micros() / 1_000_000)?);
    let grid = uniform_b_grid(step, b_max)?;
    let map = induced_map(&schedule, preferred, &grid)?;
    if map.len() != 2 {
        return Err(CliError::Validation(format!(
            "calibration needs a schedule with one free minute before a single charge level; \
             this one induces {} arrival slots",
            map.len()
        )));
    }
    let t_pre = map.slot_times()[0];
    let gap = schedule.price_at(preferred)? - schedule.price_at(t_pre)?;
    let b_star = gap.to_f64() / f64::from((preferred - t_pre).0);
    let ratio = peak_ratio(&flow, t_pre, preferred, window)?;
    info!("t_pre {t_pre}, b* {b_star} $/min, ratio {ratio}");
    let curve = calibrate_from_ratio(ratio, b_star, sigma_grid)?;

    let sink = Sink::new(g.out.clone());
    sink.data(&curve_to_csv(&curve, &[prov.header()]))?;
    let mut text = format!(
        "pre-charge minute {t_pre}, preferred {preferred}, b* = {b_star:.6} $/min, \
         early/peak ratio = {ratio:.6}\n"
    );
    for d in &curve {
        writeln!(text, "sigma {:<8} mu {:.6}", d.sigma(), d.mu()).expect("string write");
    }
    sink.report(&text);
    Ok(())
}

/// Four binomial standard errors around `p` for `n` draws.
pub fn binomial_tolerance(p: f64, n: u64) -> f64 {
    4.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn simulate(g: &GlobalArgs, draws: Option<u64>, fraction_flag: bool) -> Result<(), CliError> {
    let config_path = g
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation("simulate requires --config".into()))?;
    let mut prov = start("simulate", g)?;
    let bytes = fs::read(config_path).map_err(|e| CliError::io(config_path, e))?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let mut resolved = RunConfig::parse(&bytes)?.resolve(base)?;
    for (path, bytes) in &resolved.inputs {
        prov.add(&path.display().to_string(), bytes);
    }
    let sim = &mut resolved.simulation;
    if let Some(n) = draws {
        prov.param("draws", n);
        sim.n_draws = n;
    }
    if let Some(seed) = g.seed {
        sim.seed = seed;
    }
    prov.set_seed(sim.seed);
    let fraction = fraction_flag || resolved.fraction;
    prov.param("fraction", fraction);

    let workers = g
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    info!("{} draws on {workers} workers", sim.n_draws);
    let hist = run_simulation(sim, workers)?;

    let sink = Sink::new(g.out.clone().or(resolved.histogram_path.clone()));
    sink.data(&hist.to_csv(fraction, &[prov.header()]))?;
    let sim = &resolved.simulation;
    // Each slot must sit in its own bin for per-slot shares to be readable.
    let separate_bins = resolved.equal_load_slots.as_ref().is_some_and(|slots| {
        slots
            .windows(2)
            .all(|w| hist.bin_of(w[0]) != hist.bin_of(w[1]))
    });
    let flatness_applies =
        resolved.default_population && sim.noise_sigma_minutes == 0.0 && separate_bins;
    sink.report(&summary(
        &hist,
        resolved.equal_load_slots.as_deref(),
        flatness_applies,
    ));
    Ok(())
}

fn summary(
    hist: &FlowHistogram,
    equal_load: Option<&[TimeOfDay]>,
    flatness_applies: bool,
) -> String {
    let n = hist.total();
    let mut s = format!("draws {n}\n");
    let (tmin, cmin) = hist.min_bin();
    let (tmax, cmax) = hist.max_bin();
    writeln!(s, "min bin {tmin} count {cmin}").expect("string write");
    writeln!(s, "max bin {tmax} count {cmax}").expect("string write");
    let maxima = hist.local_maxima();
    let peaks: Vec<String> = maxima.iter().map(|t| t.to_string()).collect();
    writeln!(s, "local maxima {}", peaks.join(" ")).expect("string write");
    for &t in &maxima {
        writeln!(s, "peak {t} fraction {:.6}", hist.fraction_at(t)).expect("string write");
    }

    if let Some(slots) = equal_load {
        for &t in slots {
            writeln!(s, "slot {t} fraction {:.6}", hist.fraction_at(t)).expect("string write");
        }
        if !flatness_applies {
            writeln!(
                s,
                "equal-load check skipped: needs zero noise and the default population"
            )
            .expect("string write");
            return s;
        }
        let p = 1.0 / slots.len() as f64;
        let tol = binomial_tolerance(p, n);
        let worst = slots
            .iter()
            .map(|&t| (hist.fraction_at(t) - p).abs())
            .fold(0.0, f64::max);
        let verdict = if worst <= tol { "PASS" } else { "FAIL" };
        writeln!(
            s,
            "equal-load {verdict}: max |fraction - {p:.6}| = {worst:.6}, tolerance {tol:.6}"
        )
        .expect("string write");
    }
    s
}
