//! Step price schedules over the time of day.
//!
//! A schedule with boundaries `T₁ < … < T_N` and prices `p₁ … p_N` charges
//! `p₁` for `t ≤ T₁`, `p_i` for `T_{i-1} < t ≤ T_i`, and keeps charging `p_N`
//! after `T_N` up to the end of the domain. Intervals are left-open and
//! right-closed, so the boundary minute `T_i` itself is charged `p_i`.

use std::io::Read;

use crate::csvfmt::{comment_lines, CsvDocument};
use crate::error::{FormatError, ModelError};
use crate::money::Money;
use crate::time::TimeOfDay;

pub const SCHEDULE_HEADER: [&str; 2] = ["end_time", "price_dollars"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceSchedule {
    boundaries: Vec<TimeOfDay>,
    prices: Vec<Money>,
    domain_start: TimeOfDay,
    domain_end: TimeOfDay,
}

impl PriceSchedule {
    pub fn new(
        boundaries: Vec<TimeOfDay>,
        prices: Vec<Money>,
        domain_start: TimeOfDay,
        domain_end: TimeOfDay,
    ) -> Result<Self, ModelError> {
        let invalid = |msg: String| Err(ModelError::InvalidSchedule(msg));
        if boundaries.is_empty() {
            return invalid("a schedule needs at least one step".into());
        }
        if boundaries.len() != prices.len() {
            return invalid(format!(
                "{} boundaries but {} prices",
                boundaries.len(),
                prices.len()
            ));
        }
        if domain_start > domain_end {
            return invalid(format!(
                "domain start {domain_start} is after end {domain_end}"
            ));
        }
        if let Some(w) = boundaries.windows(2).find(|w| w[0] >= w[1]) {
            return invalid(format!(
                "boundaries must be strictly increasing ({} then {})",
                w[0], w[1]
            ));
        }
        if let Some(p) = prices.iter().find(|p| p.is_negative()) {
            return invalid(format!("negative price {p}"));
        }
        let (first, last) = (boundaries[0], boundaries[boundaries.len() - 1]);
        if first < domain_start || last > domain_end {
            return invalid(format!(
                "boundaries {first}..{last} must lie inside the domain [{domain_start}, {domain_end}]"
            ));
        }
        Ok(PriceSchedule {
            boundaries,
            prices,
            domain_start,
            domain_end,
        })
    }

    /// A single-step schedule charging `price` over the whole domain.
    pub fn constant(
        price: Money,
        domain_start: TimeOfDay,
        domain_end: TimeOfDay,
    ) -> Result<Self, ModelError> {
        Self::new(vec![domain_end], vec![price], domain_start, domain_end)
    }

    /// The same steps over a different (wider or narrower) domain.
    pub fn with_domain(&self, start: TimeOfDay, end: TimeOfDay) -> Result<Self, ModelError> {
        Self::new(self.boundaries.clone(), self.prices.clone(), start, end)
    }

    pub fn boundaries(&self) -> &[TimeOfDay] {
        &self.boundaries
    }

    pub fn prices(&self) -> &[Money] {
        &self.prices
    }

    pub fn domain_start(&self) -> TimeOfDay {
        self.domain_start
    }

    pub fn domain_end(&self) -> TimeOfDay {
        self.domain_end
    }

    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }

    pub fn contains(&self, t: TimeOfDay) -> bool {
        (self.domain_start..=self.domain_end).contains(&t)
    }

    /// Index of the step charging minute `t`; `t` need not be in the domain.
    pub fn step_index(&self, t: TimeOfDay) -> usize {
        self.boundaries
            .partition_point(|&b| b < t)
            .min(self.boundaries.len() - 1)
    }

    pub fn price_at(&self, t: TimeOfDay) -> Result<Money, ModelError> {
        if !self.contains(t) {
            return Err(ModelError::OutOfDomain {
                t,
                start: self.domain_start,
                end: self.domain_end,
            });
        }
        Ok(self.prices[self.step_index(t)])
    }

    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = format!("# domain,{},{}\n", self.domain_start, self.domain_end);
        comment_lines(&mut out, comments);
        out.push_str(&SCHEDULE_HEADER.join(","));
        out.push('\n');
        for (t, p) in self.boundaries.iter().zip(&self.prices) {
            out.push_str(&format!("{t},{p}\n"));
        }
        out
    }

    /// Parses the `end_time,price_dollars` format; the domain comes from the
    /// `# domain,HH:MM,HH:MM` directive.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, FormatError> {
        let doc = CsvDocument::read(reader, &SCHEDULE_HEADER)?;
        let (line, domain) = doc
            .directive("domain")
            .ok_or_else(|| FormatError::Invalid("missing `# domain,HH:MM,HH:MM` line".into()))?;
        if domain.len() != 2 {
            return Err(FormatError::at(
                line,
                "domain directive needs start and end",
            ));
        }
        let start: TimeOfDay = domain[0].parse().map_err(|e| FormatError::at(line, e))?;
        let end: TimeOfDay = domain[1].parse().map_err(|e| FormatError::at(line, e))?;

        let mut boundaries = Vec::with_capacity(doc.records.len());
        let mut prices = Vec::with_capacity(doc.records.len());
        for (line, rec) in &doc.records {
            boundaries.push(rec[0].parse().map_err(|e| FormatError::at(*line, e))?);
            prices.push(rec[1].parse().map_err(|e| FormatError::at(*line, e))?);
        }
        if boundaries.is_empty() {
            return Err(FormatError::Invalid("schedule has no rows".into()));
        }
        PriceSchedule::new(boundaries, prices, start, end)
            .map_err(|e| FormatError::Invalid(e.to_string()))
    }
}
