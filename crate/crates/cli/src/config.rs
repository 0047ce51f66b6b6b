//! JSON run configuration for `simulate`.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use peakspread_core::{
    equal_load_map, synthesize_prices, BDistribution, EarlyPenalty, LatePenalty, Money,
    MotoristClass, Population, PriceSchedule, Rate, SimulationConfig, TimeOfDay,
};
use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::error::CliError;

/// A value written either as a JSON number or a string and parsed exactly
/// from its decimal text, so `0.2` becomes exactly 200000 micro-units.
#[derive(Debug, Clone, Copy)]
pub struct Exact<T>(pub T);

impl<'de, T> Deserialize<'de> for Exact<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s,
            other => return Err(de::Error::custom(format!("expected a number, got {other}"))),
        };
        text.parse().map(Exact).map_err(de::Error::custom)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub preferred_time: Exact<TimeOfDay>,
    #[serde(default)]
    pub b_distribution: Option<BConfig>,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub population: Option<Vec<ClassConfig>>,
    pub simulation: SimulationParams,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub start: Exact<TimeOfDay>,
    pub end: Exact<TimeOfDay>,
}

/// Location and scale of the parent Gaussian, in $/min.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BConfig {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    /// Synthesize the schedule from the equal-load map of `b_distribution`.
    EqualLoad {
        slots: Vec<Exact<TimeOfDay>>,
        #[serde(default)]
        p1: Option<Exact<Money>>,
    },
    /// A schedule CSV, relative to the config file.
    File(PathBuf),
    Steps(Vec<StepConfig>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    pub end: Exact<TimeOfDay>,
    pub price: Exact<Money>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub weight: f64,
    pub early_penalty: EarlyConfig,
    #[serde(default)]
    pub late_penalty: LateConfig,
    #[serde(default)]
    pub preferred_time: Option<Exact<TimeOfDay>>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EarlyConfig {
    /// Drawn from `b_distribution`.
    Distribution,
    Fixed(Exact<Rate>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LateConfig {
    #[default]
    Prohibitive,
    PerMinute(Exact<Rate>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationParams {
    pub n_draws: u64,
    #[serde(default)]
    pub noise_sigma_minutes: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub bin_minutes: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Histogram CSV path, relative to the config file.
    #[serde(default)]
    pub histogram: Option<PathBuf>,
    #[serde(default)]
    pub fraction: bool,
}

/// A config turned into engine inputs.
pub struct Resolved {
    pub simulation: SimulationConfig,
    /// Slot times when the schedule is an equal-load synthesis.
    pub equal_load_slots: Option<Vec<TimeOfDay>>,
    /// Whether every draw follows `b_distribution` with no late option, so
    /// that noise-free slot shares should all be `1/N`.
    pub default_population: bool,
    pub histogram_path: Option<PathBuf>,
    pub fraction: bool,
    /// Files the config pulled in, with their contents.
    pub inputs: Vec<(PathBuf, Vec<u8>)>,
}

impl RunConfig {
    pub fn parse(bytes: &[u8]) -> Result<Self, CliError> {
        serde_json::from_slice(bytes).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn resolve(self, base: &Path) -> Result<Resolved, CliError> {
        let preferred = self.preferred_time.0;
        let (start, end) = (self.domain.start.0, self.domain.end.0);
        let dist = self
            .b_distribution
            .as_ref()
            .map(|b| BDistribution::new(b.mu, b.sigma))
            .transpose()?;
        let need_dist = || {
            dist.ok_or_else(|| CliError::Validation("config: b_distribution is required".into()))
        };

        let mut inputs = Vec::new();
        let mut equal_load_slots = None;
        let schedule = match self.schedule {
            ScheduleConfig::EqualLoad { slots, p1 } => {
                let slots: Vec<TimeOfDay> = slots.into_iter().map(|s| s.0).collect();
                let map = equal_load_map(&need_dist()?, &slots, preferred)?;
                let s = synthesize_prices(&map, p1.map_or(Money::ZERO, |p| p.0))?;
                equal_load_slots = Some(slots);
                s.with_domain(start, end)?
            }
            ScheduleConfig::File(rel) => {
                let path = base.join(rel);
                let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
                let s = PriceSchedule::read_csv(bytes.as_slice())
                    .map_err(|e| CliError::format(&path, e))?;
                inputs.push((path, bytes));
                s.with_domain(start, end)?
            }
            ScheduleConfig::Steps(steps) => {
                let (ends, prices) = steps.into_iter().map(|s| (s.end.0, s.price.0)).unzip();
                PriceSchedule::new(ends, prices, start, end)?
            }
        };

        let default_population = self.population.is_none();
        let population = match self.population {
            None => Population::early_preference(need_dist()?, preferred),
            Some(classes) => Population::new(
                classes
                    .into_iter()
                    .map(|c| {
                        Ok(MotoristClass {
                            weight: c.weight,
                            early_penalty: match c.early_penalty {
                                EarlyConfig::Distribution => {
                                    EarlyPenalty::TruncatedGaussian(need_dist()?)
                                }
                                EarlyConfig::Fixed(r) => EarlyPenalty::Fixed(r.0),
                            },
                            late_penalty: match c.late_penalty {
                                LateConfig::Prohibitive => LatePenalty::Prohibitive,
                                LateConfig::PerMinute(r) => LatePenalty::PerMinute(r.0),
                            },
                            preferred_time: c.preferred_time.map_or(preferred, |t| t.0),
                        })
                    })
                    .collect::<Result<_, CliError>>()?,
            )?,
        };

        let sim = self.simulation;
        let simulation = SimulationConfig {
            n_draws: sim.n_draws,
            population,
            schedule,
            noise_sigma_minutes: sim.noise_sigma_minutes,
            seed: sim.seed,
            bin_minutes: sim.bin_minutes,
        };
        simulation.validate()?;
        Ok(Resolved {
            simulation,
            equal_load_slots,
            default_population,
            histogram_path: self.output.histogram.map(|p| base.join(p)),
            fraction: self.output.fraction,
            inputs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STEPS: &str = r#"{
        "domain": {"start": "07:00", "end": "11:00"},
        "preferred_time": "08:45",
        "b_distribution": {"mu": 0.051, "sigma": 0.03},
        "schedule": {"steps": [
            {"end": "07:59", "price": 0}, {"end": "09:59", "price": 3}, {"end": "11:00", "price": 0}
        ]},
        "simulation": {"n_draws": 10, "seed": 1}
    }"#;

    #[test]
    fn minimal_config_resolves() {
        let r = RunConfig::parse(STEPS.as_bytes())
            .unwrap()
            .resolve(Path::new("."))
            .unwrap();
        assert_eq!(r.simulation.schedule.prices()[1], Money::dollars(3));
        assert_eq!(r.simulation.bin_minutes, 1);
        assert_eq!(r.simulation.noise_sigma_minutes, 0.0);
        assert!(r.equal_load_slots.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let extra = STEPS.replacen("\"preferred_time\"", "\"colour\": 1, \"preferred_time\"", 1);
        assert!(RunConfig::parse(extra.as_bytes()).is_err());
        let nested = STEPS.replace("\"seed\": 1", "\"seed\": 1, \"workers\": 8");
        assert!(RunConfig::parse(nested.as_bytes()).is_err());
        let in_variant = STEPS.replace("\"price\": 3}", "\"price\": 3, \"x\": 0}");
        assert!(RunConfig::parse(in_variant.as_bytes()).is_err());
    }

    #[test]
    fn prices_are_parsed_exactly() {
        let text = STEPS.replace("\"price\": 3}", "\"price\": 0.1}");
        let r = RunConfig::parse(text.as_bytes())
            .unwrap()
            .resolve(Path::new("."))
            .unwrap();
        assert_eq!(r.simulation.schedule.prices()[1].micros(), 100_000);
    }

    #[test]
    fn missing_distribution_is_a_validation_error() {
        let text = STEPS.replace("\"b_distribution\": {\"mu\": 0.051, \"sigma\": 0.03},", "");
        let err = RunConfig::parse(text.as_bytes())
            .unwrap()
            .resolve(Path::new("."))
            .err()
            .unwrap();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn mixture_population() {
        let text = STEPS.replace(
            "\"simulation\"",
            r#""population": [
                {"weight": 1, "early_penalty": "distribution"},
                {"weight": 3, "early_penalty": {"fixed": 0.2}, "late_penalty": {"per_minute": 0.01}}
            ], "simulation""#,
        );
        let r = RunConfig::parse(text.as_bytes())
            .unwrap()
            .resolve(Path::new("."))
            .unwrap();
        let classes = r.simulation.population.classes();
        assert_eq!(classes.len(), 2);
        assert_eq!(
            classes[1].late_penalty,
            LatePenalty::PerMinute(Rate::from_micros(10_000).unwrap())
        );
        assert_eq!(r.simulation.population.proportions(), vec![0.25, 0.75]);
    }
}
