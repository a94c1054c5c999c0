//! Half-year intervals, the time axis of the corpus.
//!
//! A year splits into `A` (January 1 through June 30) and `B` (July 1 through
//! December 31). Midpoints are fixed at March 31 and September 30.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

/// Earliest year with archive captures we accept.
pub const MIN_YEAR: i32 = 1996;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Half {
    A,
    B,
}

/// One six-month bucket, totally ordered by `(year, half)` with `A < B`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Interval {
    pub year: i32,
    pub half: Half,
}

impl Interval {
    pub fn new(year: i32, half: Half) -> Self {
        Interval { year, half }
    }

    /// Fixed midpoint date: March 31 for `A`, September 30 for `B`.
    pub fn midpoint(&self) -> NaiveDate {
        match self.half {
            Half::A => NaiveDate::from_ymd_opt(self.year, 3, 31).expect("valid date"),
            Half::B => NaiveDate::from_ymd_opt(self.year, 9, 30).expect("valid date"),
        }
    }

    /// Midpoint at 00:00:00, the reference point for snapshot distance.
    pub fn midpoint_datetime(&self) -> NaiveDateTime {
        self.midpoint().and_hms_opt(0, 0, 0).expect("valid time")
    }

    /// First instant of the interval.
    pub fn start(&self) -> NaiveDateTime {
        let (m, d) = match self.half {
            Half::A => (1, 1),
            Half::B => (7, 1),
        };
        NaiveDate::from_ymd_opt(self.year, m, d)
            .expect("valid date")
            .and_hms_opt(0, 0, 0)
            .expect("valid time")
    }

    /// First instant after the interval.
    pub fn end_exclusive(&self) -> NaiveDateTime {
        match self.half {
            Half::A => Interval::new(self.year, Half::B).start(),
            Half::B => Interval::new(self.year + 1, Half::A).start(),
        }
    }

    pub fn contains(&self, t: NaiveDateTime) -> bool {
        t >= self.start() && t < self.end_exclusive()
    }

    /// The immediately preceding interval.
    pub fn prev(&self) -> Interval {
        match self.half {
            Half::A => Interval::new(self.year - 1, Half::B),
            Half::B => Interval::new(self.year, Half::A),
        }
    }

    /// The immediately following interval.
    pub fn next(&self) -> Interval {
        match self.half {
            Half::A => Interval::new(self.year, Half::B),
            Half::B => Interval::new(self.year + 1, Half::A),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = match self.half {
            Half::A => 'A',
            Half::B => 'B',
        };
        write!(f, "{}{}", self.year, h)
    }
}

impl FromStr for Interval {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CorpusError::BadInterval(s.to_string());
        if s.len() < 2 {
            return Err(err());
        }
        let (year_part, half_part) = s.split_at(s.len() - 1);
        let year: i32 = year_part.parse().map_err(|_| err())?;
        let half = match half_part {
            "A" => Half::A,
            "B" => Half::B,
            _ => return Err(err()),
        };
        Ok(Interval { year, half })
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Map a timestamp to its containing interval.
///
/// Years before [`MIN_YEAR`] are rejected.
pub fn interval_of(t: NaiveDateTime) -> Result<Interval, CorpusError> {
    let year = t.year();
    if year < MIN_YEAR {
        return Err(CorpusError::YearOutOfRange(year));
    }
    let half = if t.month() <= 6 { Half::A } else { Half::B };
    Ok(Interval { year, half })
}

/// Parse a 14-digit archive timestamp (`YYYYMMDDhhmmss`) as a UTC datetime.
pub fn parse_timestamp14(ts: &str) -> Result<NaiveDateTime, CorpusError> {
    let err = || CorpusError::BadTimestamp(ts.to_string());
    if ts.len() != 14 || !ts.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    NaiveDateTime::parse_from_str(ts, "%Y%m%d%H%M%S").map_err(|_| err())
}

/// Interval of a 14-digit archive timestamp.
pub fn interval_of_timestamp14(ts: &str) -> Result<Interval, CorpusError> {
    interval_of(parse_timestamp14(ts)?)
}
