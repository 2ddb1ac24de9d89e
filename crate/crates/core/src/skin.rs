//! Sparse per-vertex skinning weights.

use crate::error::{Error, Result};

/// Tolerance on row sums before renormalization.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Sparse `N x B` matrix of skinning weights.
///
/// Each row holds `(bone, weight)` pairs sorted by bone index with strictly
/// positive weights summing to one. Zero entries are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinMatrix {
    bone_count: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SkinMatrix {
    /// Build from sparse rows. Duplicate bone entries are summed, zeros dropped,
    /// and each row is renormalized if its sum is within [`ROW_SUM_TOLERANCE`] of one.
    pub fn from_rows(bone_count: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| normalize_row(i, bone_count, row))
            .collect::<Result<Vec<_>>>()?;
        Ok(SkinMatrix { bone_count, rows })
    }

    /// Build from `(vertex, bone, weight)` triples over `vertex_count` rows.
    pub fn from_triplets(
        vertex_count: usize,
        bone_count: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); vertex_count];
        for (v, b, w) in triplets {
            let row = rows.get_mut(v).ok_or_else(|| {
                Error::InvalidWeights(format!("vertex index {v} >= vertex count {vertex_count}"))
            })?;
            row.push((b, w));
        }
        Self::from_rows(bone_count, rows)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let bone_count = rows.first().map_or(0, Vec::len);
        let sparse = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if r.len() != bone_count {
                    return Err(Error::Dimension(format!(
                        "row {i} has {} columns, expected {bone_count}",
                        r.len()
                    )));
                }
                Ok(r.iter().copied().enumerate().filter(|&(_, w)| w != 0.0).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(bone_count, sparse)
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    pub fn bone_count(&self) -> usize {
        self.bone_count
    }

    pub fn row(&self, vertex: usize) -> &[(usize, f64)] {
        &self.rows[vertex]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn weight(&self, vertex: usize, bone: usize) -> f64 {
        let row = &self.rows[vertex];
        row.binary_search_by_key(&bone, |&(b, _)| b)
            .map_or(0.0, |k| row[k].1)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(v, r)| r.iter().map(move |&(b, w)| (v, b, w)))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut dense = vec![0.0; self.bone_count];
                for &(b, w) in r {
                    dense[b] = w;
                }
                dense
            })
            .collect()
    }

    /// Per-bone flag: does any vertex carry weight on this bone?
    pub fn used_bones(&self) -> Vec<bool> {
        let mut used = vec![false; self.bone_count];
        for &(b, _) in self.rows.iter().flatten() {
            used[b] = true;
        }
        used
    }

    /// Append `extra` empty columns.
    pub fn with_extra_bones(&self, extra: usize) -> Self {
        SkinMatrix {
            bone_count: self.bone_count + extra,
            rows: self.rows.clone(),
        }
    }

    /// Keep only the columns where `keep[b]` holds, renumbering them in order.
    /// Dropped columns must be empty.
    pub(crate) fn compact_columns(&self, keep: &[bool]) -> Self {
        let mut remap = vec![usize::MAX; self.bone_count];
        let mut next = 0;
        for (b, &k) in keep.iter().enumerate() {
            if k {
                remap[b] = next;
                next += 1;
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(b, w)| (remap[b], w)).collect())
            .collect();
        SkinMatrix {
            bone_count: next,
            rows,
        }
    }
}

fn normalize_row(index: usize, bone_count: usize, mut row: Vec<(usize, f64)>) -> Result<Vec<(usize, f64)>> {
    for &(b, w) in &row {
        if b >= bone_count {
            return Err(Error::InvalidWeights(format!(
                "vertex {index}: bone index {b} >= bone count {bone_count}"
            )));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeights(format!(
                "vertex {index}: weight {w} on bone {b} is negative or not finite"
            )));
        }
    }
    row.sort_by_key(|&(b, _)| b);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
    for (b, w) in row {
        match merged.last_mut() {
            Some(last) if last.0 == b => last.1 += w,
            _ => merged.push((b, w)),
        }
    }
    merged.retain(|&(_, w)| w > 0.0);
    let sum: f64 = merged.iter().map(|&(_, w)| w).sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::InvalidWeights(format!(
            "vertex {index}: weights sum to {sum}, expected 1"
        )));
    }
    if sum != 1.0 {
        for entry in &mut merged {
            entry.1 /= sum;
        }
    }
    Ok(merged)
}
