//! Uniform frame geometry.
//!
//! Frame `i` covers `[start + i·step, start + (i+1)·step)`. Frame membership
//! decisions everywhere use the frame midpoint, computed in integer
//! nanoseconds so that all modules agree bit-for-bit.

use crate::core::span::TimeSpan;
use crate::core::time::{secs_to_nanos, TimePoint};
use crate::error::{Error, Result};

/// Geometry of a uniformly spaced frame sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGrid {
    step: f64,
    start: f64,
    count: usize,
}

impl FrameGrid {
    pub fn new(step: f64, start: f64, count: usize) -> Result<FrameGrid> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::GeometryMismatch(format!(
                "frame step must be positive and finite, got {step}"
            )));
        }
        if !start.is_finite() || start < 0.0 {
            return Err(Error::GeometryMismatch(format!(
                "frame start must be non-negative and finite, got {start}"
            )));
        }
        Ok(FrameGrid { step, start, count })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step_nanos(&self) -> i64 {
        secs_to_nanos(self.step)
    }

    pub fn start_nanos(&self) -> i64 {
        secs_to_nanos(self.start)
    }

    /// Time of frame `i`'s left edge, in nanoseconds.
    pub fn frame_onset_nanos(&self, i: usize) -> i64 {
        self.start_nanos() + i as i64 * self.step_nanos()
    }

    /// Frame midpoint in nanoseconds; the membership probe point.
    pub fn midpoint_nanos(&self, i: usize) -> i64 {
        self.frame_onset_nanos(i) + self.step_nanos() / 2
    }

    pub fn midpoint(&self, i: usize) -> TimePoint {
        TimePoint::from_nanos(self.midpoint_nanos(i))
    }

    /// The half-open interval covered by frame `i`.
    pub fn frame_span(&self, i: usize) -> TimeSpan {
        TimeSpan::from_points(
            TimePoint::from_nanos(self.frame_onset_nanos(i)),
            TimePoint::from_nanos(self.frame_onset_nanos(i + 1)),
        )
    }

    /// End of the covered range (`start + count·step`) in nanoseconds.
    pub fn end_nanos(&self) -> i64 {
        self.frame_onset_nanos(self.count)
    }

    /// Index range `[lo, hi)` of frames whose midpoints fall inside
    /// `[onset_nanos, offset_nanos)`, clamped to the grid.
    pub fn frames_with_midpoint_in(&self, onset_nanos: i64, offset_nanos: i64) -> (usize, usize) {
        let step = self.step_nanos();
        let half = step / 2;
        let base = self.start_nanos() + half;
        // Midpoint of frame i is base + i·step; ceil division keeps the
        // half-open semantics exact for boundaries between midpoints.
        let ceil_div = |a: i64, b: i64| (a + b - 1).div_euclid(b);
        let lo = ceil_div(onset_nanos - base, step).max(0);
        let hi = ceil_div(offset_nanos - base, step).max(0);
        let lo = (lo as usize).min(self.count);
        let hi = (hi as usize).min(self.count);
        (lo, hi.max(lo))
    }

    /// True when two grids describe the same frame sequence.
    pub fn matches(&self, other: &FrameGrid) -> bool {
        self.count == other.count
            && (self.step - other.step).abs() <= 1e-9
            && (self.start - other.start).abs() <= 1e-9
    }
}
