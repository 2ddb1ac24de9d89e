use super::{Bone, Skeleton, MIN_BONE_LENGTH};
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Square `K x K` matrix of parent probabilities.
///
/// Column `j` describes joint `j`: entry `(i, j)` is the probability that
/// joint `i` is the head of the bone ending at `j`, and `(j, j)` that `j` is a root.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl ConnectivityMatrix {
    pub fn zeros(size: usize) -> Self {
        ConnectivityMatrix {
            size,
            entries: vec![0.0; size * size],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut m = Self::zeros(size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Dimension(format!(
                    "connectivity row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v)?;
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "connectivity entry ({row}, {col}) = {value} outside [0, 1]"
            )));
        }
        self.entries[row * self.size + col] = value;
        Ok(())
    }

    /// Row index of the largest entry in `col`; lowest row wins ties.
    pub fn column_argmax(&self, col: usize) -> usize {
        let mut best = 0;
        for i in 1..self.size {
            if self.get(i, col) > self.get(best, col) {
                best = i;
            }
        }
        best
    }

    /// Binary with every column summing to 0 or 1.
    pub fn is_ground_truth_form(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0 || v == 1.0)
            && (0..self.size).all(|j| {
                let s: f64 = (0..self.size).map(|i| self.get(i, j)).sum();
                s == 0.0 || s == 1.0
            })
    }
}

/// Ground-truth matrix: `(head, tail) = 1` per bone and `(j, j) = 1` per root joint.
pub fn skeleton_to_connectivity(skeleton: &Skeleton) -> ConnectivityMatrix {
    let mut m = ConnectivityMatrix::zeros(skeleton.joint_count());
    for &(i, j) in &skeleton.connectivity_pairs() {
        m.entries[i * m.size + j] = 1.0;
    }
    m
}

/// Decode a skeleton by taking the argmax of each column.
///
/// A column whose argmax is its own diagonal marks a root joint; otherwise a
/// bone from the argmax row to the column joint is created. Parent links
/// follow shared joints. Cycles are broken by dropping the lowest-probability
/// edge in each (lowest column index on ties) and turning that column's joint
/// into a root. Edges between coincident joints are dropped the same way.
/// Bones are numbered in column order.
pub fn decode_connectivity(matrix: &ConnectivityMatrix, joints: &[Vec3]) -> Result<Skeleton> {
    let k = matrix.size();
    if k == 0 {
        return Err(Error::Empty("connectivity matrix"));
    }
    if joints.len() != k {
        return Err(Error::Dimension(format!(
            "{k}x{k} connectivity matrix for {} joints",
            joints.len()
        )));
    }
    let mut parent: Vec<usize> = (0..k).map(|j| matrix.column_argmax(j)).collect();
    for j in 0..k {
        if parent[j] != j && (joints[parent[j]] - joints[j]).norm() <= MIN_BONE_LENGTH {
            parent[j] = j;
        }
    }
    break_cycles(matrix, &mut parent);

    let mut bone_of_tail = vec![None; k];
    let mut bones = Vec::new();
    for j in 0..k {
        if parent[j] != j {
            bone_of_tail[j] = Some(bones.len());
            bones.push(Bone::new(parent[j], j, None));
        }
    }
    for bone in &mut bones {
        bone.parent = bone_of_tail[bone.head];
    }
    Ok(Skeleton {
        joints: joints.to_vec(),
        bones,
    })
}

fn break_cycles(matrix: &ConnectivityMatrix, parent: &mut [usize]) {
    let k = parent.len();
    // 0 = unvisited, 1 = on current walk, 2 = resolved
    let mut state = vec![0u8; k];
    for start in 0..k {
        let mut walk = Vec::new();
        let mut j = start;
        while state[j] == 0 {
            state[j] = 1;
            walk.push(j);
            if parent[j] == j {
                break;
            }
            j = parent[j];
        }
        if state[j] == 1 && parent[j] != j {
            let pos = walk.iter().position(|&x| x == j).unwrap();
            let cycle = &walk[pos..];
            let weakest = cycle
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    matrix
                        .get(parent[a], a)
                        .total_cmp(&matrix.get(parent[b], b))
                        .then(a.cmp(&b))
                })
                .unwrap();
            parent[weakest] = weakest;
        }
        for x in walk {
            state[x] = 2;
        }
    }
}
