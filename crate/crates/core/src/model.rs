//! Per-motorist travel cost and cost-minimizing arrival time.
//!
//! A motorist arriving at minute `t` pays the road price `p(t)`, an early or
//! late penalty proportional to the distance from the preferred time, and a
//! constant travel cost:
//!
//! ```text
//! J(t) = p(t) + b₁·(T − t) + D   if t ≤ T
//! J(t) = p(t) + b₂·(t − T) + D   if t > T
//! ```
//!
//! Among several minimizing minutes the latest one is chosen.

use crate::error::ModelError;
use crate::money::{Money, Rate};
use crate::schedule::PriceSchedule;
use crate::time::TimeOfDay;

/// Penalty per minute of late arrival.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LatePenalty {
    PerMinute(Rate),
    /// Arriving after the preferred time is never considered.
    Prohibitive,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct CostParams {
    pub early_penalty: Rate,
    pub late_penalty: LatePenalty,
    pub preferred_time: TimeOfDay,
    pub travel_cost: Money,
}

impl CostParams {
    pub fn new(
        early_penalty: Rate,
        late_penalty: LatePenalty,
        preferred_time: TimeOfDay,
        travel_cost: Money,
    ) -> Result<Self, ModelError> {
        if travel_cost.is_negative() {
            return Err(ModelError::InvalidParams(format!(
                "travel cost must be non-negative, got {travel_cost}"
            )));
        }
        Ok(CostParams {
            early_penalty,
            late_penalty,
            preferred_time,
            travel_cost,
        })
    }

    /// A motorist who only ever arrives on or before `preferred_time`.
    pub fn early_preference(early_penalty: Rate, preferred_time: TimeOfDay) -> Self {
        CostParams {
            early_penalty,
            late_penalty: LatePenalty::Prohibitive,
            preferred_time,
            travel_cost: Money::ZERO,
        }
    }
}

/// Travel cost of arriving at `t`.
///
/// Fails with [`ModelError::LateArrivalProhibited`] for `t` after the
/// preferred time when the late penalty is prohibitive.
pub fn travel_cost(
    params: &CostParams,
    schedule: &PriceSchedule,
    t: TimeOfDay,
) -> Result<Money, ModelError> {
    let price = schedule.price_at(t)?;
    let timing = if t <= params.preferred_time {
        params.early_penalty.times(params.preferred_time - t)?
    } else {
        match params.late_penalty {
            LatePenalty::PerMinute(rate) => rate.times(t - params.preferred_time)?,
            LatePenalty::Prohibitive => {
                return Err(ModelError::LateArrivalProhibited {
                    t,
                    preferred: params.preferred_time,
                })
            }
        }
    };
    price
        .checked_add(timing)
        .and_then(|c| c.checked_add(params.travel_cost))
        .ok_or(ModelError::Overflow)
}

/// Latest cost-minimizing whole minute over the entire schedule domain.
pub fn optimal_arrival(
    params: &CostParams,
    schedule: &PriceSchedule,
) -> Result<TimeOfDay, ModelError> {
    let mut best: Option<(Money, TimeOfDay)> = None;
    for t in schedule.domain_start().through(schedule.domain_end()) {
        let cost = match travel_cost(params, schedule, t) {
            Ok(c) => c,
            Err(ModelError::LateArrivalProhibited { .. }) => break,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|(c, _)| cost <= c) {
            best = Some((cost, t));
        }
    }
    best.map(|(_, t)| t).ok_or_else(|| {
        ModelError::Precondition(format!(
            "no admissible arrival minute: preferred time {} precedes the domain start {}",
            params.preferred_time,
            schedule.domain_start()
        ))
    })
}

/// Whether [`optimal_arrival_fast`] is exact for these inputs.
///
/// Late arrival must never win: either it is prohibitive, or `b₂ > b₁` and no
/// minute after the preferred time is cheaper than the preferred time itself.
/// The preferred time must not precede the domain.
pub fn fast_path_applies(params: &CostParams, schedule: &PriceSchedule) -> bool {
    fast_path_check(params, schedule).is_ok()
}

fn fast_path_check(params: &CostParams, schedule: &PriceSchedule) -> Result<(), ModelError> {
    let preferred = params.preferred_time;
    if preferred < schedule.domain_start() {
        return Err(ModelError::Precondition(format!(
            "preferred time {preferred} precedes the domain start {}",
            schedule.domain_start()
        )));
    }
    let LatePenalty::PerMinute(late) = params.late_penalty else {
        return Ok(());
    };
    if late <= params.early_penalty {
        return Err(ModelError::Precondition(format!(
            "late penalty {late} $/min does not exceed early penalty {} $/min",
            params.early_penalty
        )));
    }
    if preferred < schedule.domain_end() {
        let at_preferred = schedule.price_at(preferred)?;
        let first_late = schedule.step_index(preferred);
        if schedule.prices()[first_late..]
            .iter()
            .any(|p| *p < at_preferred)
        {
            return Err(ModelError::Precondition(format!(
                "the price drops after the preferred time {preferred}; late arrival may be optimal"
            )));
        }
    }
    Ok(())
}

/// Latest cost-minimizing minute for an early-preference motorist.
///
/// On each constant-price interval the early cost falls (or stays flat) as
/// `t` grows, so only interval right endpoints and the preferred time can be
/// the latest minimizer. Fails with [`ModelError::Precondition`] when
/// [`fast_path_applies`] is false.
pub fn optimal_arrival_fast(
    params: &CostParams,
    schedule: &PriceSchedule,
) -> Result<TimeOfDay, ModelError> {
    fast_path_check(params, schedule)?;
    let upper = params.preferred_time.min(schedule.domain_end());
    let early = params.early_penalty;
    let preferred = params.preferred_time;

    let mut best: Option<(Money, TimeOfDay)> = None;
    let mut consider = |t: TimeOfDay, price: Money| -> Result<(), ModelError> {
        let cost = price
            .checked_add(early.times(preferred - t)?)
            .ok_or(ModelError::Overflow)?;
        if best.is_none_or(|(c, _)| cost <= c) {
            best = Some((cost, t));
        }
        Ok(())
    };
    for (&t, &price) in schedule.boundaries().iter().zip(schedule.prices()) {
        if t >= upper {
            break;
        }
        consider(t, price)?;
    }
    consider(upper, schedule.price_at(upper)?)?;

    // The constant travel cost never moves the argmin.
    Ok(best.expect("upper is always a candidate").1)
}
