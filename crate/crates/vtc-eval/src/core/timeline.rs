//! Ordered collections of spans and their set algebra.

use crate::core::span::TimeSpan;
use crate::core::time::TimePoint;

/// An ordered sequence of spans over one recording.
///
/// A timeline built through [`Timeline::support`] (or any of the set
/// operations, which all return support-normal results) is sorted by onset,
/// pairwise disjoint, and non-touching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Timeline {
    spans: Vec<TimeSpan>,
}

impl Timeline {
    pub fn new() -> Timeline {
        Timeline { spans: Vec::new() }
    }

    pub fn from_spans(spans: Vec<TimeSpan>) -> Timeline {
        Timeline { spans }
    }

    pub fn spans(&self) -> &[TimeSpan] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn push(&mut self, span: TimeSpan) {
        self.spans.push(span);
    }

    /// Total duration in nanoseconds, summed over the stored spans.
    pub fn duration_nanos(&self) -> i64 {
        self.spans.iter().map(TimeSpan::duration_nanos).sum()
    }

    pub fn duration_secs(&self) -> f64 {
        crate::core::time::nanos_to_secs(self.duration_nanos())
    }

    /// Merge overlapping and touching spans into support normal form.
    ///
    /// The union of points is preserved; the result is sorted, disjoint, and
    /// has strictly positive gaps between consecutive spans. Idempotent.
    pub fn support(&self) -> Timeline {
        let mut sorted = self.spans.clone();
        sorted.sort();
        let mut merged: Vec<TimeSpan> = Vec::with_capacity(sorted.len());
        for span in sorted {
            match merged.last_mut() {
                // Touching spans (gap == 0) merge as well.
                Some(last) if span.onset() <= last.offset() => {
                    if span.offset() > last.offset() {
                        *last = TimeSpan::from_points(last.onset(), span.offset());
                    }
                }
                _ => merged.push(span),
            }
        }
        Timeline { spans: merged }
    }

    /// True if `point` lies inside some span.
    pub fn contains(&self, point: TimePoint) -> bool {
        self.spans.iter().any(|s| s.contains(point))
    }

    /// Intersection of two support-normal timelines.
    pub fn intersection(&self, other: &Timeline) -> Timeline {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            if let Some(overlap) = self.spans[i].intersect(&other.spans[j]) {
                out.push(overlap);
            }
            if self.spans[i].offset() <= other.spans[j].offset() {
                i += 1;
            } else {
                j += 1;
            }
        }
        Timeline { spans: out }
    }

    /// Set difference `self \ other` of two support-normal timelines.
    pub fn subtract(&self, other: &Timeline) -> Timeline {
        let mut out = Vec::new();
        let mut j = 0;
        for span in &self.spans {
            let mut cursor = span.onset();
            while j < other.spans.len() && other.spans[j].offset() <= cursor {
                j += 1;
            }
            let mut k = j;
            while k < other.spans.len() && other.spans[k].onset() < span.offset() {
                let hole = &other.spans[k];
                if hole.onset() > cursor {
                    out.push(TimeSpan::from_points(cursor, hole.onset()));
                }
                cursor = cursor.max(hole.offset());
                if cursor >= span.offset() {
                    break;
                }
                k += 1;
            }
            if cursor < span.offset() {
                out.push(TimeSpan::from_points(cursor, span.offset()));
            }
        }
        Timeline { spans: out }
    }

    /// Clip one span against this support-normal timeline.
    pub fn crop_span(&self, span: &TimeSpan) -> impl Iterator<Item = TimeSpan> + '_ {
        let span = *span;
        self.spans.iter().filter_map(move |s| s.intersect(&span))
    }
}

impl FromIterator<TimeSpan> for Timeline {
    fn from_iter<I: IntoIterator<Item = TimeSpan>>(iter: I) -> Self {
        Timeline {
            spans: iter.into_iter().collect(),
        }
    }
}
