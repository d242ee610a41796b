//! Labeled annotations and the evaluation map.

use std::collections::BTreeMap;

use crate::core::label::VoiceType;
use crate::core::span::TimeSpan;
use crate::core::timeline::Timeline;
use crate::error::{Error, Result};

/// A multiset of labeled spans for one recording.
///
/// Overlapping entries are legal, including entries that share a label;
/// voice types are independent detection targets and several can be active
/// at once.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Annotation {
    recording_id: String,
    entries: Vec<(TimeSpan, VoiceType)>,
}

impl Annotation {
    pub fn new(recording_id: impl Into<String>) -> Annotation {
        Annotation {
            recording_id: recording_id.into(),
            entries: Vec::new(),
        }
    }

    pub fn recording_id(&self) -> &str {
        &self.recording_id
    }

    pub fn push(&mut self, span: TimeSpan, label: VoiceType) {
        self.entries.push((span, label));
    }

    pub fn entries(&self) -> &[(TimeSpan, VoiceType)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Sum of raw entry durations (overlaps counted once per entry).
    pub fn raw_duration_nanos(&self) -> i64 {
        self.entries.iter().map(|(s, _)| s.duration_nanos()).sum()
    }

    /// Timeline of entries carrying `label`, not merged.
    pub fn class_timeline(&self, label: VoiceType) -> Timeline {
        self.entries
            .iter()
            .filter(|(_, l)| *l == label)
            .map(|(s, _)| *s)
            .collect()
    }

    /// Support-normal timeline of entries carrying `label`.
    pub fn class_support(&self, label: VoiceType) -> Timeline {
        self.class_timeline(label).support()
    }

    /// Support-normal timeline of all entries, regardless of label.
    pub fn overall_support(&self) -> Timeline {
        self.entries
            .iter()
            .map(|(s, _)| *s)
            .collect::<Timeline>()
            .support()
    }

    /// Restrict every entry to `timeline`, splitting where needed and
    /// dropping entries that fall entirely outside.
    pub fn crop_to_timeline(&self, timeline: &Timeline) -> Annotation {
        let mut cropped = Annotation::new(self.recording_id.clone());
        for (span, label) in &self.entries {
            for piece in timeline.crop_span(span) {
                cropped.push(piece, *label);
            }
        }
        cropped
    }
}

/// All annotations of a corpus, keyed by recording id.
pub type AnnotationSet = BTreeMap<String, Annotation>;

/// The evaluated sub-regions of each recording.
///
/// Every metric in the crate is restricted to these regions; audio outside
/// them does not exist as far as scoring is concerned.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalMap {
    regions: BTreeMap<String, Timeline>,
}

impl EvalMap {
    pub fn new() -> EvalMap {
        EvalMap {
            regions: BTreeMap::new(),
        }
    }

    /// Add evaluated spans for a recording; regions are kept in support
    /// normal form.
    pub fn insert(&mut self, recording_id: impl Into<String>, timeline: Timeline) {
        let id = recording_id.into();
        let merged = match self.regions.remove(&id) {
            Some(existing) => {
                let mut all = existing.spans().to_vec();
                all.extend_from_slice(timeline.spans());
                Timeline::from_spans(all).support()
            }
            None => timeline.support(),
        };
        self.regions.insert(id, merged);
    }

    pub fn get(&self, recording_id: &str) -> Option<&Timeline> {
        self.regions.get(recording_id)
    }

    pub fn contains(&self, recording_id: &str) -> bool {
        self.regions.contains_key(recording_id)
    }

    pub fn recording_ids(&self) -> impl Iterator<Item = &str> {
        self.regions.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Timeline)> {
        self.regions.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

/// Restrict an annotation to the evaluated regions of its recording.
///
/// Entries are replaced by their intersections with the evaluated regions;
/// entries with empty intersection are dropped. Fails when the recording id
/// is not present in the map.
pub fn crop(annotation: &Annotation, eval_map: &EvalMap) -> Result<Annotation> {
    let timeline = eval_map
        .get(annotation.recording_id())
        .ok_or_else(|| Error::UnknownRecording(annotation.recording_id().to_string()))?;
    Ok(annotation.crop_to_timeline(timeline))
}
