//! Inputs shared by the benchmarks.

use peakspread_core::{
    equal_load_map, synthesize_prices, ArrivalMap, BDistribution, Money, Population, PriceSchedule,
    Rate, SimulationConfig, TimeOfDay,
};

pub fn preferred() -> TimeOfDay {
    TimeOfDay::hm(8, 45).expect("valid time")
}

pub fn dist() -> BDistribution {
    BDistribution::new(0.051, 0.03).expect("valid distribution")
}

/// Equal-load map with `n` slots spaced `gap` minutes apart, ending at 08:45.
pub fn equal_load(n: usize, gap: i32) -> ArrivalMap {
    let end = preferred().minutes_since_midnight();
    let slots: Vec<TimeOfDay> = (0..n as i32)
        .map(|k| TimeOfDay::from_minutes(end - gap * (n as i32 - 1 - k)).expect("valid time"))
        .collect();
    equal_load_map(&dist(), &slots, preferred()).expect("representable map")
}

/// The synthesized schedule for [`equal_load`], over a 07:00–11:00 domain.
pub fn equal_load_schedule(n: usize, gap: i32) -> PriceSchedule {
    synthesize_prices(&equal_load(n, gap), Money::ZERO)
        .and_then(|s| {
            Ok(s.with_domain(
                TimeOfDay::hm(7, 0).expect("valid time"),
                TimeOfDay::hm(11, 0).expect("valid time"),
            )?)
        })
        .expect("valid schedule")
}

pub fn simulation(n_draws: u64, noise: f64) -> SimulationConfig {
    SimulationConfig {
        n_draws,
        population: Population::early_preference(dist(), preferred()),
        schedule: equal_load_schedule(6, 10),
        noise_sigma_minutes: noise,
        seed: 1,
        bin_minutes: 1,
    }
}

pub fn sample_rate() -> Rate {
    Rate::from_micros(51_000).expect("non-negative")
}
