//! The closed label vocabulary and small sets over it.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Number of voice types. The vocabulary is closed; no other label exists.
pub const NUM_CLASSES: usize = 4;

/// The four voice types of child-centered long-form audio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VoiceType {
    /// `KCHI`: vocalizations of the device-wearing key child.
    KeyChild,
    /// `OCH`: vocalizations of any other child.
    OtherChild,
    /// `MAL`: male adult speech.
    MaleAdult,
    /// `FEM`: female adult speech.
    FemaleAdult,
}

impl VoiceType {
    /// All classes in canonical column order (`KCHI, OCH, MAL, FEM`).
    pub const ALL: [VoiceType; NUM_CLASSES] = [
        VoiceType::KeyChild,
        VoiceType::OtherChild,
        VoiceType::MaleAdult,
        VoiceType::FemaleAdult,
    ];

    /// Column index in matrices and per-class arrays.
    pub fn index(self) -> usize {
        match self {
            VoiceType::KeyChild => 0,
            VoiceType::OtherChild => 1,
            VoiceType::MaleAdult => 2,
            VoiceType::FemaleAdult => 3,
        }
    }

    /// The on-disk label.
    pub fn as_str(self) -> &'static str {
        match self {
            VoiceType::KeyChild => "KCHI",
            VoiceType::OtherChild => "OCH",
            VoiceType::MaleAdult => "MAL",
            VoiceType::FemaleAdult => "FEM",
        }
    }
}

impl fmt::Display for VoiceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VoiceType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "KCHI" => Ok(VoiceType::KeyChild),
            "OCH" => Ok(VoiceType::OtherChild),
            "MAL" => Ok(VoiceType::MaleAdult),
            "FEM" => Ok(VoiceType::FemaleAdult),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown voice type label \"{other}\""),
            }),
        }
    }
}

/// A set of voice types, packed into a 4-bit mask.
///
/// Set algebra on regions reduces to bit operations, which keeps the
/// homogeneous-region metric kernel branch-free and exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct LabelSet(u8);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn singleton(label: VoiceType) -> LabelSet {
        LabelSet(1 << label.index())
    }

    pub fn insert(&mut self, label: VoiceType) {
        self.0 |= 1 << label.index();
    }

    pub fn remove(&mut self, label: VoiceType) {
        self.0 &= !(1 << label.index());
    }

    pub fn contains(self, label: VoiceType) -> bool {
        self.0 & (1 << label.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Cardinality of the set.
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn intersection(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & other.0)
    }

    pub fn difference(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & !other.0)
    }

    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = VoiceType> {
        VoiceType::ALL.into_iter().filter(move |c| self.contains(*c))
    }
}

impl FromIterator<VoiceType> for LabelSet {
    fn from_iter<I: IntoIterator<Item = VoiceType>>(iter: I) -> Self {
        let mut set = LabelSet::EMPTY;
        for label in iter {
            set.insert(label);
        }
        set
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for label in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{label}")?;
            first = false;
        }
        write!(f, "}}")
    }
}
