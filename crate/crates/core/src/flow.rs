//! Observed traffic flow: ingestion and peak ratios.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::csvfmt::CsvDocument;
use crate::error::{CalibrationError, FormatError};
use crate::time::{Minutes, TimeOfDay};

pub const FLOW_HEADER: [&str; 2] = ["time", "count"];

/// Average vehicle count observed at one minute of the day.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FlowObservation {
    pub time: TimeOfDay,
    pub vehicle_count: f64,
}

/// Parses `time,count` rows. The result is sorted by time, with repeated
/// times averaged into one observation.
pub fn read_flow_csv<R: Read>(reader: R) -> Result<Vec<FlowObservation>, FormatError> {
    let doc = CsvDocument::read(reader, &FLOW_HEADER)?;
    let mut by_time: BTreeMap<TimeOfDay, (f64, u32)> = BTreeMap::new();
    for (line, rec) in &doc.records {
        let time: TimeOfDay = rec[0].parse().map_err(|e| FormatError::at(*line, e))?;
        let count: f64 = rec[1]
            .parse()
            .map_err(|_| FormatError::at(*line, format!("count {:?} is not a number", &rec[1])))?;
        if !(count.is_finite() && count >= 0.0) {
            return Err(FormatError::at(
                *line,
                format!("count must be a non-negative number, got {count}"),
            ));
        }
        let entry = by_time.entry(time).or_insert((0.0, 0));
        entry.0 += count;
        entry.1 += 1;
    }
    if by_time.is_empty() {
        return Err(FormatError::Invalid("flow file has no observations".into()));
    }
    Ok(by_time
        .into_iter()
        .map(|(time, (sum, n))| FlowObservation {
            time,
            vehicle_count: sum / f64::from(n),
        })
        .collect())
}

pub fn ingest_flow_csv(path: impl AsRef<Path>) -> Result<Vec<FlowObservation>, FormatError> {
    read_flow_csv(File::open(path)?)
}

fn window_mean(
    observations: &[FlowObservation],
    center: TimeOfDay,
    half_width: u32,
) -> Result<f64, CalibrationError> {
    let w = Minutes(half_width as i32);
    let lo = center
        .checked_add(Minutes(-w.0))
        .unwrap_or(TimeOfDay::MIDNIGHT);
    let hi = center
        .checked_add(w)
        .unwrap_or_else(|| TimeOfDay::from_minutes(1439).expect("valid minute"));
    let (sum, n) = observations
        .iter()
        .filter(|o| (lo..=hi).contains(&o.time))
        .fold((0.0, 0usize), |(s, n), o| (s + o.vehicle_count, n + 1));
    if n == 0 {
        return Err(CalibrationError::InvalidInput(format!(
            "no observations within {half_width} min of {center}"
        )));
    }
    Ok(sum / n as f64)
}

/// Mean count within `window_minutes` of `t_pre` over the mean count within
/// `window_minutes` of `t_peak`.
pub fn peak_ratio(
    observations: &[FlowObservation],
    t_pre: TimeOfDay,
    t_peak: TimeOfDay,
    window_minutes: u32,
) -> Result<f64, CalibrationError> {
    let pre = window_mean(observations, t_pre, window_minutes)?;
    let peak = window_mean(observations, t_peak, window_minutes)?;
    if peak <= 0.0 || pre <= 0.0 {
        return Err(CalibrationError::InvalidInput(format!(
            "window means must be positive (pre {pre}, peak {peak})"
        )));
    }
    Ok(pre / peak)
}
