//! Half-open time intervals.

use crate::core::time::{nanos_to_secs, TimePoint};
use crate::error::{Error, Result};

/// A half-open interval `[onset, offset)` with strictly positive duration.
///
/// Half-open semantics make touching segments non-overlapping, so partitions
/// of the evaluated timeline are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeSpan {
    onset: TimePoint,
    offset: TimePoint,
}

impl TimeSpan {
    /// Build a span from decimal seconds, rejecting empty or negative spans.
    pub fn new(onset_secs: f64, offset_secs: f64) -> Result<TimeSpan> {
        let onset = TimePoint::from_secs(onset_secs);
        let offset = TimePoint::from_secs(offset_secs);
        if onset < TimePoint::ZERO || offset <= onset {
            return Err(Error::InvalidSpan {
                onset: onset_secs,
                offset: offset_secs,
            });
        }
        Ok(TimeSpan { onset, offset })
    }

    /// Build a span from already-validated time points.
    ///
    /// Callers must guarantee `0 <= onset < offset`.
    pub(crate) fn from_points(onset: TimePoint, offset: TimePoint) -> TimeSpan {
        debug_assert!(TimePoint::ZERO <= onset && onset < offset);
        TimeSpan { onset, offset }
    }

    pub fn onset(&self) -> TimePoint {
        self.onset
    }

    pub fn offset(&self) -> TimePoint {
        self.offset
    }

    pub fn onset_secs(&self) -> f64 {
        self.onset.as_secs()
    }

    pub fn offset_secs(&self) -> f64 {
        self.offset.as_secs()
    }

    /// Duration in nanoseconds; always positive.
    pub fn duration_nanos(&self) -> i64 {
        self.offset - self.onset
    }

    /// Duration in seconds.
    pub fn duration_secs(&self) -> f64 {
        nanos_to_secs(self.duration_nanos())
    }

    /// True if `point` lies inside the half-open interval.
    pub fn contains(&self, point: TimePoint) -> bool {
        self.onset <= point && point < self.offset
    }

    /// Intersection with another span, or `None` when they do not overlap.
    ///
    /// Touching spans (`a.offset == b.onset`) do not overlap.
    pub fn intersect(&self, other: &TimeSpan) -> Option<TimeSpan> {
        let onset = self.onset.max(other.onset);
        let offset = self.offset.min(other.offset);
        if onset < offset {
            Some(TimeSpan { onset, offset })
        } else {
            None
        }
    }
}

impl std::fmt::Display for TimeSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:.3}, {:.3})", self.onset_secs(), self.offset_secs())
    }
}
