//! Simulated arrival profiles against closed-form predictions.

use peakspread_core::{
    calibrate_from_ratio, equal_load_map, optimal_arrival_fast, peak_ratio, run_simulation,
    synthesize_prices, BDistribution, CostParams, EarlyPenalty, FlowHistogram, FlowObservation,
    LatePenalty, Money, MotoristClass, Population, PriceSchedule, Rate, SimulationConfig,
    TimeOfDay,
};

fn t(s: &str) -> TimeOfDay {
    s.parse().unwrap()
}

/// Four binomial standard errors.
fn tolerance(p: f64, n: u64) -> f64 {
    4.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn charge_window() -> PriceSchedule {
    PriceSchedule::new(
        vec![t("07:59"), t("09:59"), t("11:00")],
        vec![Money::ZERO, Money::dollars(3), Money::ZERO],
        t("07:00"),
        t("11:00"),
    )
    .unwrap()
}

fn early_config(
    dist: BDistribution,
    schedule: PriceSchedule,
    n: u64,
    seed: u64,
) -> SimulationConfig {
    SimulationConfig {
        n_draws: n,
        population: Population::early_preference(dist, t("08:45")),
        schedule,
        noise_sigma_minutes: 0.0,
        seed,
        bin_minutes: 1,
    }
}

#[test]
fn equal_load_schedule_flattens_arrivals() {
    let dist = BDistribution::new(0.051, 0.03).unwrap();
    let slots = ["07:55", "08:05", "08:15", "08:25", "08:35", "08:45"].map(t);
    let map = equal_load_map(&dist, &slots, t("08:45")).unwrap();
    let schedule = synthesize_prices(&map, Money::ZERO).unwrap();
    let n = 200_000;
    let h = run_simulation(&early_config(dist, schedule, n, 3), 8).unwrap();
    assert_eq!(h.total(), n);
    let occupied: u64 = slots.iter().map(|&s| h.count_at(s)).sum();
    assert_eq!(occupied, n);
    for s in slots {
        let f = h.fraction_at(s);
        assert!((f - 1.0 / 6.0).abs() <= tolerance(1.0 / 6.0, n), "{s}: {f}");
    }
}

#[test]
fn two_level_split_follows_the_indifference_rate() {
    let dist = BDistribution::new(0.051, 0.03).unwrap();
    let n = 200_000;
    let h = run_simulation(&early_config(dist, charge_window(), n, 9), 4).unwrap();
    assert_eq!(h.count_at(t("07:59")) + h.count_at(t("08:45")), n);
    // Samples are rounded to whole micro-dollars; ties at 3/46 go to 08:45.
    let early = dist.cdf(0.065_217_5);
    let f = h.fraction_at(t("07:59"));
    assert!((f - early).abs() <= tolerance(early, n), "{f} vs {early}");
    assert_eq!(h.local_maxima(), vec![t("07:59"), t("08:45")]);
}

#[test]
fn fixed_class_without_noise_is_a_point_mass() {
    let schedule = charge_window();
    for micros in [0, 30_000, 65_217, 65_218, 500_000] {
        let b = Rate::from_micros(micros).unwrap();
        let expected =
            optimal_arrival_fast(&CostParams::early_preference(b, t("08:45")), &schedule).unwrap();
        let cfg = SimulationConfig {
            population: Population::new(vec![MotoristClass {
                weight: 1.0,
                early_penalty: EarlyPenalty::Fixed(b),
                late_penalty: LatePenalty::Prohibitive,
                preferred_time: t("08:45"),
            }])
            .unwrap(),
            ..early_config(
                BDistribution::new(0.05, 0.01).unwrap(),
                schedule.clone(),
                1_000,
                1,
            )
        };
        let h = run_simulation(&cfg, 2).unwrap();
        assert_eq!(h.count_at(expected), 1_000, "b = {b}");
    }
}

fn as_observations(h: &FlowHistogram) -> Vec<FlowObservation> {
    h.bin_start_times()
        .iter()
        .zip(h.counts())
        .map(|(&time, &c)| FlowObservation {
            time,
            vehicle_count: c as f64,
        })
        .collect()
}

#[test]
fn simulated_flow_calibrates_back_to_the_planted_location() {
    let planted = BDistribution::new(0.051, 0.03).unwrap();
    let n = 400_000;
    let h = run_simulation(&early_config(planted, charge_window(), n, 21), 8).unwrap();
    let ratio = peak_ratio(&as_observations(&h), t("07:59"), t("08:45"), 0).unwrap();
    let curve = calibrate_from_ratio(ratio, 0.065_217_5, &[0.03]).unwrap();
    // Sampling error in the ratio moves mu by about sigma·se/pdf; 4 se here is ~0.0015.
    assert!((curve[0].mu() - 0.051).abs() < 0.0015, "{}", curve[0].mu());
}
