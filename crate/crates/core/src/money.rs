//! Fixed-point money and per-minute rates at 10⁻⁶ dollar resolution.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::ModelError;
use crate::time::Minutes;

/// Number of fixed-point units in one dollar.
pub const MICROS_PER_DOLLAR: i64 = 1_000_000;

/// Signed amount of money in micro-dollars.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Money(i64);

/// Non-negative rate in micro-dollars per minute.
///
/// Houses the early/late penalties of a motorist and the thresholds of an
/// arrival map.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Rate(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_micros(micros: i64) -> Self {
        Money(micros)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    /// Whole dollars; panics on overflow.
    pub fn dollars(d: i64) -> Self {
        Money(d.checked_mul(MICROS_PER_DOLLAR).expect("money overflow"))
    }

    pub fn checked_add(self, rhs: Money) -> Option<Money> {
        self.0.checked_add(rhs.0).map(Money)
    }

    pub fn checked_sub(self, rhs: Money) -> Option<Money> {
        self.0.checked_sub(rhs.0).map(Money)
    }

    pub fn checked_mul_int(self, k: i64) -> Option<Money> {
        self.0.checked_mul(k).map(Money)
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_DOLLAR as f64
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        self.checked_add(rhs).expect("money overflow")
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        self.checked_sub(rhs).expect("money overflow")
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(self.0.checked_neg().expect("money overflow"))
    }
}

impl std::iter::Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

impl Rate {
    pub const ZERO: Rate = Rate(0);
    /// The smallest positive rate, one micro-dollar per minute.
    pub const UNIT: Rate = Rate(1);

    pub fn from_micros(micros: i64) -> Result<Self, ModelError> {
        if micros < 0 {
            return Err(ModelError::InvalidAmount(format!(
                "rate must be non-negative, got {micros} micro-dollars/min"
            )));
        }
        Ok(Rate(micros))
    }

    pub const fn from_micros_u32(micros: u32) -> Self {
        Rate(micros as i64)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    /// Rounds a dollars-per-minute value to the nearest fixed-point unit.
    pub fn from_dollars_per_minute(x: f64) -> Result<Self, ModelError> {
        let scaled = (x * MICROS_PER_DOLLAR as f64).round();
        if !scaled.is_finite() || scaled < 0.0 || scaled > i64::MAX as f64 {
            return Err(ModelError::InvalidAmount(format!(
                "rate {x} $/min is not representable"
            )));
        }
        Ok(Rate(scaled as i64))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_DOLLAR as f64
    }

    /// Exact `rate × duration`.
    pub fn times(self, duration: Minutes) -> Result<Money, ModelError> {
        self.0
            .checked_mul(i64::from(duration.0))
            .map(Money)
            .ok_or(ModelError::Overflow)
    }

    pub fn checked_add(self, rhs: Rate) -> Option<Rate> {
        self.0.checked_add(rhs.0).map(Rate)
    }

    pub fn checked_sub(self, rhs: Rate) -> Option<Rate> {
        self.0.checked_sub(rhs.0).filter(|v| *v >= 0).map(Rate)
    }
}

fn format_micros(f: &mut fmt::Formatter<'_>, micros: i64) -> fmt::Result {
    let sign = if micros < 0 { "-" } else { "" };
    let abs = micros.unsigned_abs();
    let whole = abs / MICROS_PER_DOLLAR as u64;
    let frac = abs % MICROS_PER_DOLLAR as u64;
    if frac == 0 {
        write!(f, "{sign}{whole}")
    } else {
        let digits = format!("{frac:06}");
        write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
    }
}

fn parse_micros(s: &str) -> Result<i64, ModelError> {
    let bad = || ModelError::InvalidAmount(format!("expected a decimal amount, got {s:?}"));
    let s = s.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .bytes()
        .chain(frac.bytes())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    if frac.len() > 6 {
        return Err(ModelError::InvalidAmount(format!(
            "{s:?} has more than 6 fractional digits"
        )));
    }
    let whole: i64 = if whole.is_empty() {
        0
    } else {
        whole.parse().map_err(|_| bad())?
    };
    let frac_micros: i64 = if frac.is_empty() {
        0
    } else {
        format!("{frac:0<6}").parse().map_err(|_| bad())?
    };
    let magnitude = whole
        .checked_mul(MICROS_PER_DOLLAR)
        .and_then(|w| w.checked_add(frac_micros))
        .ok_or(ModelError::Overflow)?;
    Ok(if negative { -magnitude } else { magnitude })
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_micros(f, self.0)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_micros(f, self.0)
    }
}

impl FromStr for Money {
    type Err = ModelError;

    /// Decimal dollars with at most six fractional digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_micros(s).map(Money)
    }
}

impl FromStr for Rate {
    type Err = ModelError;

    /// Decimal dollars per minute with at most six fractional digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rate::from_micros(parse_micros(s)?)
    }
}
