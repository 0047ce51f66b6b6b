//! Whole-minute time of day.

use std::fmt;
use std::str::FromStr;

use crate::error::ModelError;

pub const MINUTES_PER_DAY: i32 = 1440;

/// A minute of the day in `[00:00, 23:59]`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TimeOfDay(u16);

/// Signed difference between two [`TimeOfDay`] values, in whole minutes.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Minutes(pub i32);

impl TimeOfDay {
    pub const MIDNIGHT: TimeOfDay = TimeOfDay(0);

    pub fn from_minutes(minutes: i32) -> Result<Self, ModelError> {
        if (0..MINUTES_PER_DAY).contains(&minutes) {
            Ok(TimeOfDay(minutes as u16))
        } else {
            Err(ModelError::InvalidTime(format!(
                "{minutes} minutes is outside [0, {MINUTES_PER_DAY})"
            )))
        }
    }

    pub fn hm(hour: u32, minute: u32) -> Result<Self, ModelError> {
        if hour >= 24 || minute >= 60 {
            return Err(ModelError::InvalidTime(format!("{hour:02}:{minute:02}")));
        }
        Self::from_minutes((hour * 60 + minute) as i32)
    }

    #[inline]
    pub fn minutes_since_midnight(self) -> i32 {
        i32::from(self.0)
    }

    /// `self + delta`, or `None` if the result leaves the day.
    pub fn checked_add(self, delta: Minutes) -> Option<Self> {
        Self::from_minutes(self.minutes_since_midnight().checked_add(delta.0)?).ok()
    }

    /// The next minute, if it is still within the day.
    pub fn succ(self) -> Option<Self> {
        self.checked_add(Minutes(1))
    }

    /// Inclusive iterator over every minute in `[self, end]`.
    pub fn through(self, end: TimeOfDay) -> impl Iterator<Item = TimeOfDay> {
        (self.0..=end.0).map(TimeOfDay)
    }
}

impl std::ops::Sub for TimeOfDay {
    type Output = Minutes;
    #[inline]
    fn sub(self, rhs: TimeOfDay) -> Minutes {
        Minutes(self.minutes_since_midnight() - rhs.minutes_since_midnight())
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 60, self.0 % 60)
    }
}

impl FromStr for TimeOfDay {
    type Err = ModelError;

    /// Parses `HH:MM` (a single-digit hour is accepted).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidTime(format!("expected HH:MM, got {s:?}"));
        let (h, m) = s.trim().split_once(':').ok_or_else(bad)?;
        if h.is_empty() || h.len() > 2 || m.len() != 2 {
            return Err(bad());
        }
        if !h.bytes().chain(m.bytes()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let hour: u32 = h.parse().map_err(|_| bad())?;
        let minute: u32 = m.parse().map_err(|_| bad())?;
        Self::hm(hour, minute)
    }
}

impl fmt::Display for Minutes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} min", self.0)
    }
}
