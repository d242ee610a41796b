//! Inter-annotator agreement, scored with the same machinery as systems.
//!
//! The second annotator is evaluated against the first as if it were a
//! model: per-class detection F over the recordings both annotators covered,
//! restricted to the evaluation map. There is no special-casing, so a
//! hypothesis produced by a human lands in exactly the same tables as one
//! produced by a classifier, and an annotator compared against themself
//! scores a perfect F on every class.

use std::collections::BTreeSet;

use crate::core::annotation::{AnnotationSet, EvalMap};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_corpus, CorpusEvaluation};

/// Agreement between two annotators over their shared recordings.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    /// The second annotator scored against the first.
    pub evaluation: CorpusEvaluation,
    /// Recordings annotated by both and covered by the evaluation map.
    pub shared_recordings: Vec<String>,
}

/// Score annotator `second` against annotator `first`.
///
/// Only recordings present in both annotation sets and in the evaluation map
/// participate; an empty share is an error, since agreement over nothing is
/// meaningless.
pub fn agreement(
    first: &AnnotationSet,
    second: &AnnotationSet,
    eval_map: &EvalMap,
) -> Result<AgreementReport> {
    let shared: Vec<String> = first
        .keys()
        .collect::<BTreeSet<_>>()
        .intersection(&second.keys().collect())
        .filter(|id| eval_map.contains(id.as_str()))
        .map(|id| (*id).clone())
        .collect();
    if shared.is_empty() {
        return Err(Error::DisjointAnnotators);
    }

    let mut references = AnnotationSet::new();
    let mut hypotheses = AnnotationSet::new();
    let mut eval_shared = EvalMap::new();
    for id in &shared {
        references.insert(id.clone(), first[id].clone());
        hypotheses.insert(id.clone(), second[id].clone());
        eval_shared.insert(id.clone(), eval_map.get(id).expect("filtered above").clone());
    }
    let evaluation = evaluate_corpus(&references, &hypotheses, &eval_shared)?;
    Ok(AgreementReport {
        evaluation,
        shared_recordings: shared,
    })
}
