//! Synthesis, verification and induced maps against exhaustive oracles.

use peakspread_core::{
    induced_map, optimal_arrival, synthesize_prices, travel_cost, uniform_b_grid,
    verify_realization, ArrivalMap, CostParams, Money, PriceSchedule, Rate, TimeOfDay,
    VerificationReport, DEFAULT_GRID_STEP,
};
use proptest::prelude::*;

const STEP: i64 = 1_000;

/// Random valid map: up to 10 slots, gaps of 1..=30 minutes, thresholds on the
/// 0.001 $/min grid.
fn arb_map() -> impl Strategy<Value = ArrivalMap> {
    (1usize..=10).prop_flat_map(|n| {
        (
            360i32..600,
            prop::collection::vec(1i32..=30, n - 1),
            prop::collection::vec(1i64..=60, n - 1),
        )
            .prop_map(|(start, gaps, incs)| {
                let mut slots = vec![start];
                for g in gaps {
                    slots.push(slots.last().unwrap() + g);
                }
                let mut b = vec![0i64];
                for k in incs {
                    b.push(b.last().unwrap() + k * STEP);
                }
                let slots: Vec<TimeOfDay> = slots
                    .into_iter()
                    .map(|m| TimeOfDay::from_minutes(m).unwrap())
                    .collect();
                let thresholds = b
                    .into_iter()
                    .map(|m| Rate::from_micros(m).unwrap())
                    .collect();
                let preferred = *slots.last().unwrap();
                ArrivalMap::new(thresholds, slots, preferred).unwrap()
            })
    })
}

fn slot_cost(map: &ArrivalMap, schedule: &PriceSchedule, slot: usize, b: Rate) -> Money {
    let params = CostParams::early_preference(b, map.preferred_time());
    travel_cost(&params, schedule, map.slot_times()[slot]).unwrap()
}

/// Willingness-to-pay values covering every bucket's edges and interior.
fn probe_rates(map: &ArrivalMap, extra: &[i64]) -> Vec<Rate> {
    let mut out = Vec::new();
    for (i, &b) in map.thresholds().iter().enumerate() {
        out.push(b);
        if let Some(next) = map.thresholds().get(i + 1) {
            out.push(Rate::from_micros(next.micros() - 1).unwrap());
            out.push(Rate::from_micros((b.micros() + next.micros()) / 2).unwrap());
        } else {
            out.push(Rate::from_micros(b.micros() * 3 + 1).unwrap());
        }
    }
    out.extend(extra.iter().map(|&m| Rate::from_micros(m).unwrap()));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn synthesized_prices_realize_the_map(map in arb_map(), p1 in 0i64..5_000_000) {
        let schedule = synthesize_prices(&map, Money::from_micros(p1)).unwrap();
        prop_assert!(schedule.prices().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(verify_realization(&map, &schedule).unwrap(), VerificationReport::Pass);

        let top = map.thresholds().last().unwrap().micros() + 5 * STEP;
        let grid = uniform_b_grid(DEFAULT_GRID_STEP, Rate::from_micros(top).unwrap()).unwrap();
        let induced = induced_map(&schedule, map.preferred_time(), &grid).unwrap();
        prop_assert_eq!(induced.slot_times(), map.slot_times());
        for (got, want) in induced.thresholds().iter().zip(map.thresholds()) {
            prop_assert!(got >= want && got.micros() - want.micros() < STEP);
        }
    }

    #[test]
    fn synthesized_choice_matches_full_argmin(
        map in arb_map(),
        extra in prop::collection::vec(0i64..1_000_000, 8),
    ) {
        let schedule = synthesize_prices(&map, Money::ZERO).unwrap();
        for b in probe_rates(&map, &extra) {
            let params = CostParams::early_preference(b, map.preferred_time());
            prop_assert_eq!(optimal_arrival(&params, &schedule).unwrap(), map.lookup(b));
        }
    }

    /// Checking bucket end points is enough: a pass means the assigned slot
    /// is optimal for every probed rate, and a failure names a real defection.
    #[test]
    fn endpoint_checks_decide_every_rate(
        map in arb_map(),
        slot in 0usize..10,
        delta in -400_000i64..400_000,
        extra in prop::collection::vec(0i64..1_000_000, 16),
    ) {
        let base = synthesize_prices(&map, Money::from_micros(500_000)).unwrap();
        let mut prices = base.prices().to_vec();
        let k = slot % prices.len();
        prices[k] = Money::from_micros((prices[k].micros() + delta).max(0));
        let schedule = PriceSchedule::new(
            base.boundaries().to_vec(), prices, base.domain_start(), base.domain_end(),
        ).unwrap();

        match verify_realization(&map, &schedule).unwrap() {
            VerificationReport::Pass => {
                for b in probe_rates(&map, &extra) {
                    let own = slot_cost(&map, &schedule, map.bucket(b), b);
                    for j in 0..map.len() {
                        prop_assert!(own <= slot_cost(&map, &schedule, j, b));
                    }
                }
            }
            VerificationReport::Fail(d) => {
                prop_assert_eq!(map.bucket(d.b), d.slot - 1);
                prop_assert_eq!(d.assigned_cost, slot_cost(&map, &schedule, d.slot - 1, d.b));
                prop_assert_eq!(d.rival_cost, slot_cost(&map, &schedule, d.rival - 1, d.b));
                prop_assert!(d.assigned_cost > d.rival_cost);
            }
        }
    }
}
