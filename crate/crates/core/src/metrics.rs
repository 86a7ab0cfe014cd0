//! Agreement between two significance labelings.

use crate::error::{Error, Result};

/// 2x2 table of two boolean labelings; the first is treated as the
/// reference ("positive") and the second as the prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AgreementTable {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl AgreementTable {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }

    pub fn from_labels(reference: &[bool], prediction: &[bool]) -> Result<Self> {
        if reference.len() != prediction.len() {
            return Err(Error::DimensionMismatch(format!(
                "labelings have lengths {} and {}",
                reference.len(),
                prediction.len()
            )));
        }
        let mut t = Self::default();
        for (&a, &b) in reference.iter().zip(prediction) {
            match (a, b) {
                (true, true) => t.tp += 1,
                (false, true) => t.fp += 1,
                (true, false) => t.fn_ += 1,
                (false, false) => t.tn += 1,
            }
        }
        Ok(t)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Table with the roles of the two labelings exchanged.
    pub fn transpose(&self) -> Self {
        Self::new(self.tp, self.fn_, self.fp, self.tn)
    }

    /// Matthews correlation coefficient; 0 when any marginal is empty.
    pub fn mcc(&self) -> f64 {
        let (tp, fp, fn_, tn) = (
            self.tp as f64,
            self.fp as f64,
            self.fn_ as f64,
            self.tn as f64,
        );
        let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        if denom == 0.0 {
            return 0.0;
        }
        ((tp * tn - fp * fn_) / denom.sqrt()).clamp(-1.0, 1.0)
    }

    /// Fraction of regions on which the labelings agree.
    pub fn rand_index(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::InvalidArgument("Rand index of an empty table".into()));
        }
        Ok((self.tp + self.tn) as f64 / total as f64)
    }
}
