//! Age to cumulative-utterance conversion.
//!
//! Daily waking hours grow linearly inside each age range, so the waking hours
//! of a range are the trapezoid `(h1 + h2) / 2 * years * 365`. Utterances are
//! waking hours times a constant hourly rate.
//!
//! Rounding: the count reported for a single range rounds to nearest (ties
//! away from zero). Cumulative totals add per-range counts rounded half to
//! even, which keeps a tie like 2,044,182.5 from pushing every later total up
//! by one. A partial range is rounded up once at the end of the partial
//! segment, capped at its completed-range count.

use crate::error::{ensure, Error, Result};
use crate::num::Real;

const DAYS_PER_YEAR: f64 = 365.0;

/// One age range with the daily waking hours at both endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgeRange<T> {
    pub start_age: T,
    pub end_age: T,
    pub waking_start: T,
    pub waking_end: T,
}

impl<T: Real> AgeRange<T> {
    pub fn new(start_age: T, end_age: T, waking_start: T, waking_end: T) -> Result<Self> {
        ensure!(
            start_age <= end_age,
            Error::InvalidArgument(format!("age range {start_age}..{end_age} is reversed"))
        );
        let day = T::lit(24.0);
        for h in [waking_start, waking_end] {
            ensure!(
                h > T::zero() && h < day,
                Error::InvalidArgument(format!("waking hours {h} outside (0, 24)"))
            );
        }
        Ok(AgeRange {
            start_age,
            end_age,
            waking_start,
            waking_end,
        })
    }

    pub fn years(&self) -> T {
        self.end_age - self.start_age
    }

    /// Waking hours per day at `age`, interpolated linearly.
    pub fn waking_at(&self, age: T) -> T {
        let span = self.years();
        if span == T::zero() {
            return self.waking_start;
        }
        self.waking_start + (self.waking_end - self.waking_start) * (age - self.start_age) / span
    }

    /// Sub-range from `start_age` to `age`.
    fn truncated(&self, age: T) -> AgeRange<T> {
        AgeRange {
            start_age: self.start_age,
            end_age: age,
            waking_start: self.waking_start,
            waking_end: self.waking_at(age),
        }
    }
}

/// Total waking hours spent in `range`.
pub fn total_waking_hours<T: Real>(range: &AgeRange<T>) -> T {
    (range.waking_start + range.waking_end) / T::lit(2.0) * range.years() * T::lit(DAYS_PER_YEAR)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calendar<T> {
    ranges: Vec<AgeRange<T>>,
    rate: T,
    /// Cumulative utterances at the end of each range.
    cumulative: Vec<u64>,
}

impl<T: Real> Calendar<T> {
    /// Six ranges from birth to 5;0 at 487 utterances per waking hour.
    pub fn standard() -> Self {
        let table = [
            (0.0, 0.5, 8.5, 9.5),
            (0.5, 1.0, 9.5, 10.25),
            (1.0, 2.0, 10.25, 11.0),
            (2.0, 3.0, 11.0, 12.0),
            (3.0, 4.0, 12.0, 12.5),
            (4.0, 5.0, 12.5, 13.0),
        ];
        let ranges = table
            .iter()
            .map(|&(a, b, h1, h2)| AgeRange::new(T::lit(a), T::lit(b), T::lit(h1), T::lit(h2)))
            .collect::<Result<Vec<_>>>()
            .expect("standard table is valid");
        Calendar::new(ranges, T::lit(487.0)).expect("standard table is valid")
    }

    /// Ranges must start at age 0, be contiguous, and agree on waking hours
    /// at shared endpoints.
    pub fn new(ranges: Vec<AgeRange<T>>, rate: T) -> Result<Self> {
        ensure!(
            !ranges.is_empty(),
            Error::Config("calendar has no age ranges".into())
        );
        ensure!(
            rate > T::zero() && rate.is_finite(),
            Error::Config(format!("utterance rate {rate} must be positive"))
        );
        ensure!(
            ranges[0].start_age == T::zero(),
            Error::Config("calendar must start at age 0".into())
        );
        for pair in ranges.windows(2) {
            ensure!(
                pair[0].end_age == pair[1].start_age,
                Error::Config(format!(
                    "age ranges not contiguous at {} / {}",
                    pair[0].end_age, pair[1].start_age
                ))
            );
            ensure!(
                pair[0].waking_end == pair[1].waking_start,
                Error::Config(format!(
                    "waking hours disagree at age {}: {} vs {}",
                    pair[0].end_age, pair[0].waking_end, pair[1].waking_start
                ))
            );
        }
        let mut cumulative = Vec::with_capacity(ranges.len());
        let mut total = 0u64;
        for r in &ranges {
            total += cumulative_increment(r, rate);
            cumulative.push(total);
        }
        Ok(Calendar {
            ranges,
            rate,
            cumulative,
        })
    }

    /// Reads an override file: `rate = <utterances per hour>` and one
    /// `range = <start> <end> <waking_start> <waking_end>` line per age range.
    pub fn parse_override(text: &str) -> Result<Self> {
        let mut rate = T::lit(487.0);
        let mut ranges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key = value, got {line:?}")))?;
            let num = |s: &str| -> Result<T> {
                s.parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| parse_err(format!("invalid number {s:?}")))
            };
            match key.trim() {
                "rate" => rate = num(value.trim())?,
                "range" => {
                    let fields: Vec<&str> = value.split_whitespace().collect();
                    if fields.len() != 4 {
                        return Err(parse_err("range needs 4 numbers".into()));
                    }
                    ranges.push(AgeRange::new(
                        num(fields[0])?,
                        num(fields[1])?,
                        num(fields[2])?,
                        num(fields[3])?,
                    )?);
                }
                other => return Err(parse_err(format!("unknown key {other:?}"))),
            }
        }
        Calendar::new(ranges, rate)
    }

    pub fn ranges(&self) -> &[AgeRange<T>] {
        &self.ranges
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn max_age(&self) -> T {
        self.ranges.last().expect("non-empty").end_age
    }

    /// Cumulative utterances at the end of each range.
    pub fn cumulative_totals(&self) -> &[u64] {
        &self.cumulative
    }

    pub fn total_utterances(&self) -> u64 {
        *self.cumulative.last().expect("non-empty")
    }

    pub fn utterances_in_range(&self, range: &AgeRange<T>) -> u64 {
        utterances_for(range, self.rate)
    }

    fn before(&self, index: usize) -> u64 {
        if index == 0 {
            0
        } else {
            self.cumulative[index - 1]
        }
    }

    /// Utterances heard from birth to `age`.
    pub fn cumulative_utterances(&self, age: T) -> Result<u64> {
        ensure!(
            age >= T::zero() && age <= self.max_age(),
            Error::Range(format!("age {age} outside [0, {}]", self.max_age()))
        );
        if age == self.max_age() {
            return Ok(self.total_utterances());
        }
        let index = self
            .ranges
            .iter()
            .position(|r| age < r.end_age)
            .expect("age below max_age");
        let range = &self.ranges[index];
        let partial = (total_waking_hours(&range.truncated(age)) * self.rate)
            .ceil()
            .to_u64()
            .expect("non-negative finite utterance count");
        let full = self.cumulative[index] - self.before(index);
        Ok(self.before(index) + partial.min(full))
    }

    /// Age at which `utterances` have been heard. The partial range is
    /// inverted through the quadratic trapezoid area, aiming half an utterance
    /// below the target so that rounding up lands on it.
    pub fn age_at_utterance(&self, utterances: u64) -> Result<T> {
        let total = self.total_utterances();
        ensure!(
            utterances <= total,
            Error::Range(format!("utterance count {utterances} outside [0, {total}]"))
        );
        if utterances == total {
            return Ok(self.max_age());
        }
        let index = self
            .cumulative
            .iter()
            .position(|&c| utterances < c)
            .expect("below total");
        let range = &self.ranges[index];
        let within = utterances - self.before(index);
        if within == 0 {
            return Ok(range.start_age);
        }
        // hours(t) = 365 * (h1 * t + slope * t^2 / 2)
        let target = (within as f64 - 0.5) / (self.rate.as_f64() * DAYS_PER_YEAR);
        let h1 = range.waking_start.as_f64();
        let years = range.years().as_f64();
        let slope = (range.waking_end.as_f64() - h1) / years;
        let t = 2.0 * target / (h1 + (h1 * h1 + 2.0 * slope * target).sqrt());
        Ok(range.start_age + T::lit(t.clamp(0.0, years)))
    }
}

impl<T: Real> Default for Calendar<T> {
    fn default() -> Self {
        Self::standard()
    }
}

fn utterances_for<T: Real>(range: &AgeRange<T>, rate: T) -> u64 {
    (total_waking_hours(range) * rate)
        .round()
        .to_u64()
        .expect("non-negative finite utterance count")
}

fn cumulative_increment<T: Real>(range: &AgeRange<T>, rate: T) -> u64 {
    let exact = (total_waking_hours(range) * rate).as_f64();
    assert!(exact.is_finite() && exact >= 0.0, "utterance count {exact}");
    exact.round_ties_even() as u64
}
