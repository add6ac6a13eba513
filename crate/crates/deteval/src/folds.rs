//! Patient-grouped k-fold splitting with an explicit leakage check.
//!
//! Splits are by patient, never by frame: every frame of a patient lands
//! on the same side of each fold, so a model can never be scored on a
//! patient it trained on.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wardlens_core::domain::PatientId;

use crate::EvalError;

/// One fold: disjoint test and train patient sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSpec {
    index: usize,
    test: BTreeSet<PatientId>,
    train: BTreeSet<PatientId>,
}

impl FoldSpec {
    /// Builds a fold, rejecting any train/test overlap.
    pub fn new(
        index: usize,
        test: BTreeSet<PatientId>,
        train: BTreeSet<PatientId>,
    ) -> Result<Self, EvalError> {
        if let Some(patient_id) = test.intersection(&train).next() {
            return Err(EvalError::TrainTestOverlap {
                index,
                patient_id: patient_id.clone(),
            });
        }
        Ok(FoldSpec { index, test, train })
    }

    /// Position of the fold in its split.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Patients scored in this fold.
    pub fn test(&self) -> &BTreeSet<PatientId> {
        &self.test
    }

    /// Patients available for training in this fold.
    pub fn train(&self) -> &BTreeSet<PatientId> {
        &self.train
    }
}

/// Splits patients into `k` folds with near-equal test sets (sizes differ
/// by at most one) using a seeded shuffle: the same seed always produces
/// the same folds. Each fold's train set is the complement of its test
/// set, so test sets are pairwise disjoint and cover every patient.
pub fn grouped_kfold(
    patients: &BTreeSet<PatientId>,
    k: usize,
    seed: u64,
) -> Result<Vec<FoldSpec>, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroFolds);
    }
    if k > patients.len() {
        return Err(EvalError::FoldCountExceedsPatients {
            k,
            patients: patients.len(),
        });
    }
    let mut shuffled: Vec<&PatientId> = patients.iter().collect();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let base = patients.len() / k;
    let extra = patients.len() % k;
    let mut folds = Vec::with_capacity(k);
    let mut offset = 0;
    for index in 0..k {
        let size = base + usize::from(index < extra);
        let test: BTreeSet<PatientId> = shuffled[offset..offset + size]
            .iter()
            .map(|&p| p.clone())
            .collect();
        offset += size;
        let train: BTreeSet<PatientId> = patients.difference(&test).cloned().collect();
        folds.push(FoldSpec { index, test, train });
    }
    Ok(folds)
}

/// Checks a fold list for leakage: no patient may appear in more than one
/// test set. (Per-fold train/test disjointness is already enforced at
/// construction.)
pub fn validate_folds(folds: &[FoldSpec]) -> Result<(), EvalError> {
    let mut seen: BTreeSet<&PatientId> = BTreeSet::new();
    for fold in folds {
        for patient_id in &fold.test {
            if !seen.insert(patient_id) {
                return Err(EvalError::Leakage {
                    patient_id: patient_id.clone(),
                });
            }
        }
    }
    Ok(())
}
