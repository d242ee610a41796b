//! Integer time base.
//!
//! All boundaries are stored as whole nanoseconds so that sorting, set
//! algebra, and the additive metric identities are exact. Conversion to and
//! from decimal seconds happens only at the I/O boundary.

/// Nanoseconds per second.
pub const NANOS_PER_SEC: i64 = 1_000_000_000;

/// A point on the recording timeline, in integer nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(i64);

impl TimePoint {
    pub const ZERO: TimePoint = TimePoint(0);

    /// Nearest-nanosecond conversion from decimal seconds.
    pub fn from_secs(secs: f64) -> TimePoint {
        TimePoint((secs * NANOS_PER_SEC as f64).round() as i64)
    }

    pub fn from_nanos(nanos: i64) -> TimePoint {
        TimePoint(nanos)
    }

    pub fn as_secs(self) -> f64 {
        self.0 as f64 / NANOS_PER_SEC as f64
    }

    pub fn as_nanos(self) -> i64 {
        self.0
    }
}

impl std::ops::Add<i64> for TimePoint {
    type Output = TimePoint;
    fn add(self, nanos: i64) -> TimePoint {
        TimePoint(self.0 + nanos)
    }
}

impl std::ops::Sub for TimePoint {
    type Output = i64;
    fn sub(self, other: TimePoint) -> i64 {
        self.0 - other.0
    }
}

/// Seconds → nanosecond count, rounded to nearest.
pub fn secs_to_nanos(secs: f64) -> i64 {
    (secs * NANOS_PER_SEC as f64).round() as i64
}

/// Nanosecond count → seconds.
pub fn nanos_to_secs(nanos: i64) -> f64 {
    nanos as f64 / NANOS_PER_SEC as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_round_trip_is_exact_at_nanosecond_grid() {
        for &s in &[0.0, 0.001, 0.5, 1.234_567_891, 3600.0, 360_000.25] {
            let t = TimePoint::from_secs(s);
            assert_eq!(TimePoint::from_secs(t.as_secs()), t);
        }
    }

    #[test]
    fn millisecond_values_map_to_exact_nanos() {
        assert_eq!(TimePoint::from_secs(0.25).as_nanos(), 250_000_000);
        assert_eq!(secs_to_nanos(0.001), 1_000_000);
    }
}
