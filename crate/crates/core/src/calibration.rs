//! Fitting the willingness-to-pay distribution and building equal-load maps.

use crate::csvfmt::comment_lines;
use crate::error::CalibrationError;
use crate::money::Rate;
use crate::synthesis::ArrivalMap;
use crate::time::TimeOfDay;
use crate::wtp::BDistribution;

pub const CURVE_HEADER: [&str; 2] = ["sigma", "mu"];

/// Bracket half-width above `b_star`, in units of sigma.
const UPPER_BRACKET_SIGMAS: f64 = 12.0;
const BISECTION_REL_TOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 400;

/// Indifference rate between arriving at `t_pre` and at the preferred time:
/// `Δp / (T − t_pre)` in dollars per minute.
pub fn indifference_threshold(
    price_gap_dollars: f64,
    t_pre: TimeOfDay,
    preferred: TimeOfDay,
) -> Result<f64, CalibrationError> {
    let lead = (preferred - t_pre).0;
    if lead <= 0 {
        return Err(CalibrationError::InvalidInput(format!(
            "{t_pre} is not before the preferred time {preferred}"
        )));
    }
    if !(price_gap_dollars.is_finite() && price_gap_dollars > 0.0) {
        return Err(CalibrationError::InvalidInput(format!(
            "price gap must be positive, got {price_gap_dollars}"
        )));
    }
    Ok(price_gap_dollars / f64::from(lead))
}

/// For each sigma, the location `mu` at which motorists below `b_star`
/// (early arrivals) and above it (peak arrivals) occur in the ratio
/// `ratio_pre_to_peak`.
///
/// Solves `cdf(b*) / (1 − cdf(b*)) = ratio` by bisection over
/// `mu ∈ [0, b* + 12σ]`; the truncated family is stochastically increasing in
/// `mu`, so the root is unique when it exists.
pub fn calibrate_from_ratio(
    ratio_pre_to_peak: f64,
    b_star: f64,
    sigma_grid: &[f64],
) -> Result<Vec<BDistribution>, CalibrationError> {
    if !(ratio_pre_to_peak.is_finite() && ratio_pre_to_peak > 0.0) {
        return Err(CalibrationError::InvalidInput(format!(
            "ratio must be positive, got {ratio_pre_to_peak}"
        )));
    }
    if !(b_star.is_finite() && b_star > 0.0) {
        return Err(CalibrationError::InvalidInput(format!(
            "b_star must be positive, got {b_star}"
        )));
    }
    if sigma_grid.is_empty() {
        return Err(CalibrationError::InvalidInput("empty sigma grid".into()));
    }
    // Compare on the early fraction; the odds form is equivalent.
    let target = ratio_pre_to_peak / (1.0 + ratio_pre_to_peak);
    sigma_grid
        .iter()
        .map(|&sigma| solve_location(target, b_star, sigma))
        .collect()
}

fn solve_location(target: f64, b_star: f64, sigma: f64) -> Result<BDistribution, CalibrationError> {
    let early_fraction = |mu: f64| -> Result<f64, CalibrationError> {
        Ok(BDistribution::new(mu, sigma)?.cdf(b_star))
    };
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(CalibrationError::Infeasible {
            sigma,
            reason: "sigma must be positive".into(),
        });
    }
    let mut lo = 0.0;
    let mut hi = b_star + UPPER_BRACKET_SIGMAS * sigma;
    let at_lo = early_fraction(lo)?;
    let at_hi = early_fraction(hi)?;
    if target > at_lo {
        return Err(CalibrationError::Infeasible {
            sigma,
            reason: format!(
                "the early/peak ratio exceeds {:.6}, the largest attainable with a non-negative location",
                at_lo / (1.0 - at_lo)
            ),
        });
    }
    if target < at_hi {
        return Err(CalibrationError::Infeasible {
            sigma,
            reason: format!(
                "the early/peak ratio is below {:e}, the smallest attainable within {UPPER_BRACKET_SIGMAS} sigma",
                at_hi / (1.0 - at_hi)
            ),
        });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if early_fraction(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_REL_TOL * mid.abs() || hi - lo <= f64::EPSILON * b_star {
            break;
        }
    }
    Ok(BDistribution::new(0.5 * (lo + hi), sigma)?)
}

/// Renders a calibration curve as `sigma,mu` CSV.
pub fn curve_to_csv(curve: &[BDistribution], comments: &[String]) -> String {
    let mut out = String::new();
    comment_lines(&mut out, comments);
    out.push_str(&CURVE_HEADER.join(","));
    out.push('\n');
    for d in curve {
        out.push_str(&format!("{},{}\n", d.sigma(), d.mu()));
    }
    out
}

/// The `(i−1)/N` quantiles for `i = 2..=N`, before rounding to rates.
pub fn equal_load_thresholds(dist: &BDistribution, n: usize) -> Result<Vec<f64>, CalibrationError> {
    if n == 0 {
        return Err(CalibrationError::InvalidInput(
            "need at least one slot".into(),
        ));
    }
    (1..n).map(|i| dist.quantile(i as f64 / n as f64)).collect()
}

/// A map whose buckets each hold probability `1/N` under `dist`.
///
/// Thresholds are rounded to the nearest micro-dollar per minute.
pub fn equal_load_map(
    dist: &BDistribution,
    slot_times: &[TimeOfDay],
    preferred_time: TimeOfDay,
) -> Result<ArrivalMap, CalibrationError> {
    let mut thresholds = vec![Rate::ZERO];
    for q in equal_load_thresholds(dist, slot_times.len())? {
        let rate = Rate::from_dollars_per_minute(q)?;
        if rate <= *thresholds.last().expect("non-empty") {
            return Err(CalibrationError::Numeric(format!(
                "quantile {q} $/min collapses onto the previous threshold at micro-dollar resolution"
            )));
        }
        thresholds.push(rate);
    }
    ArrivalMap::new(thresholds, slot_times.to_vec(), preferred_time)
        .map_err(|e| CalibrationError::InvalidInput(e.to_string()))
}
