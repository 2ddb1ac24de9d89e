use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Precision and recall of directed `(head, tail)` pairs; roots appear as `(j, j)`.
/// An empty prediction has precision 0.
pub fn connectivity_pr(pred: &BTreeSet<(usize, usize)>, gt: &BTreeSet<(usize, usize)>) -> Result<(f64, f64)> {
    if gt.is_empty() {
        return Err(Error::Empty("ground-truth connectivity"));
    }
    let hits = pred.intersection(gt).count() as f64;
    let precision = if pred.is_empty() { 0.0 } else { hits / pred.len() as f64 };
    Ok((precision, hits / gt.len() as f64))
}
