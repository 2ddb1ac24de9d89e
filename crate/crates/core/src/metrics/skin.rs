use serde::Serialize;

use crate::error::{Error, Result};
use crate::skin::ROW_SUM_TOLERANCE;

/// A bone influences a vertex when its weight exceeds this.
pub const INFLUENCE_THRESHOLD: f64 = 0.05;

/// Predicted weights are clamped to at least this inside the logarithm.
pub const CE_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkinEval {
    pub ce: f64,
    pub cos: f64,
    pub mae: f64,
    pub precision: f64,
    pub recall: f64,
    pub influence_threshold: f64,
}

/// Compare dense `N x K` predicted and ground-truth weight matrices.
///
/// CE and MAE average over all `N * K` entries; cosine similarity averages
/// per-vertex cosines (a zero row scores 0). Precision and recall pool the
/// influential-bone sets of all vertices: matched / predicted and
/// matched / ground truth, 0 when the denominator is empty.
pub fn skin_metrics(pred: &[Vec<f64>], gt: &[Vec<f64>]) -> Result<SkinEval> {
    if pred.len() != gt.len() {
        return Err(Error::Dimension(format!("{} predicted rows vs {} ground-truth rows", pred.len(), gt.len())));
    }
    if gt.is_empty() {
        return Err(Error::Empty("skinning weights"));
    }
    let k = gt[0].len();
    if k == 0 {
        return Err(Error::Empty("skinning weights have no bones"));
    }
    for (i, (p, g)) in pred.iter().zip(gt).enumerate() {
        if p.len() != k || g.len() != k {
            return Err(Error::Dimension(format!("row {i}: expected {k} columns")));
        }
        let sum: f64 = g.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE || g.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidWeights(format!("ground-truth row {i} sums to {sum}")));
        }
    }
    let n = gt.len() as f64;
    let entries = n * k as f64;
    let (mut ce, mut mae, mut cos) = (0.0, 0.0, 0.0);
    let (mut matched, mut predicted, mut actual) = (0usize, 0usize, 0usize);
    for (p, g) in pred.iter().zip(gt) {
        let mut dot = 0.0;
        let (mut np, mut ng) = (0.0, 0.0);
        for (&pw, &gw) in p.iter().zip(g) {
            if gw != 0.0 {
                ce -= gw * pw.max(CE_CLAMP).ln();
            }
            mae += (pw - gw).abs();
            dot += pw * gw;
            np += pw * pw;
            ng += gw * gw;
            let (ip, ig) = (pw > INFLUENCE_THRESHOLD, gw > INFLUENCE_THRESHOLD);
            predicted += ip as usize;
            actual += ig as usize;
            matched += (ip && ig) as usize;
        }
        if np > 0.0 && ng > 0.0 {
            cos += dot / (np.sqrt() * ng.sqrt());
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(SkinEval {
        ce: ce / entries,
        cos: cos / n,
        mae: mae / entries,
        precision: ratio(matched, predicted),
        recall: ratio(matched, actual),
        influence_threshold: INFLUENCE_THRESHOLD,
    })
}
