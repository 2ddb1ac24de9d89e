use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::squared_distances;
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Optimal coupling between a predicted and a ground-truth point set.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `flow[i][j]`: mass moved from predicted point `i` to ground-truth point `j`.
    pub flow: Vec<Vec<f64>>,
    /// `(1 / K_pred) * sum d_ij f_ij` with squared Euclidean `d_ij`.
    pub cost: f64,
}

/// Earth mover's distance between `pred` and `gt`.
pub fn emd(pred: &[Vec3], gt: &[Vec3]) -> Result<f64> {
    Ok(transport(pred, gt)?.cost)
}

/// Solve the transportation problem with row mass `1 / K_pred` and column
/// mass `1 / K_gt`.
///
/// Masses are scaled to integers (each row supplies `K_gt` units, each column
/// absorbs `K_pred`), so successive shortest paths reach an exact optimum.
pub fn transport(pred: &[Vec3], gt: &[Vec3]) -> Result<TransportPlan> {
    if pred.is_empty() {
        return Err(Error::Empty("predicted joint set"));
    }
    if gt.is_empty() {
        return Err(Error::Empty("ground-truth joint set"));
    }
    if pred.iter().chain(gt).any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::InvalidArgument("non-finite joint coordinate".into()));
    }
    let cost = squared_distances(pred, gt);
    let (m, n) = (pred.len(), gt.len());
    let units = min_cost_flow(&cost, n as u64, m as u64);
    let total = (m * n) as f64;
    let flow: Vec<Vec<f64>> = units
        .iter()
        .map(|row| row.iter().map(|&u| u as f64 / total).collect())
        .collect();
    let mut sum = 0.0;
    for (i, row) in units.iter().enumerate() {
        for (j, &u) in row.iter().enumerate() {
            sum += cost[i][j] * u as f64;
        }
    }
    Ok(TransportPlan { flow, cost: sum / total / m as f64 })
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Balanced transportation: every row supplies `supply`, every column takes
/// `demand`, `rows * supply == cols * demand`. Returns integer flows.
fn min_cost_flow(cost: &[Vec<f64>], supply: u64, demand: u64) -> Vec<Vec<u64>> {
    let m = cost.len();
    let n = cost[0].len();
    // nodes: rows 0..m, columns m..m+n
    let nodes = m + n;
    let mut flow = vec![vec![0u64; n]; m];
    let mut left = vec![supply; m];
    let mut room = vec![demand; n];
    let mut potential = vec![0.0f64; nodes];
    let mut remaining: u64 = supply * m as u64;

    while remaining > 0 {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev = vec![usize::MAX; nodes];
        let mut done = vec![false; nodes];
        let mut heap = BinaryHeap::new();
        for i in 0..m {
            if left[i] > 0 {
                dist[i] = 0.0;
                heap.push(Entry(0.0, i));
            }
        }
        while let Some(Entry(d, u)) = heap.pop() {
            if done[u] || d > dist[u] {
                continue;
            }
            done[u] = true;
            let mut relax = |v: usize, c: f64, dist: &mut Vec<f64>, heap: &mut BinaryHeap<Entry>| {
                let reduced = (c + potential[u] - potential[v]).max(0.0);
                let nd = d + reduced;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = u;
                    heap.push(Entry(nd, v));
                }
            };
            if u < m {
                for j in 0..n {
                    relax(m + j, cost[u][j], &mut dist, &mut heap);
                }
            } else {
                let j = u - m;
                for i in 0..m {
                    if flow[i][j] > 0 {
                        relax(i, -cost[i][j], &mut dist, &mut heap);
                    }
                }
            }
        }
        let target = (0..n)
            .filter(|&j| room[j] > 0 && dist[m + j].is_finite())
            .min_by(|&a, &b| dist[m + a].total_cmp(&dist[m + b]).then(a.cmp(&b)))
            .expect("balanced transportation always has an augmenting path");
        let reach = dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
        for v in 0..nodes {
            potential[v] += if dist[v].is_finite() { dist[v] } else { reach };
        }

        // walk back to find the bottleneck
        let mut amount = room[target];
        let mut v = m + target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= m {
                amount = amount.min(flow[v][u - m]);
            }
            v = u;
        }
        amount = amount.min(left[v]).min(remaining);

        let origin = v;
        let mut v = m + target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < m {
                flow[u][v - m] += amount;
            } else {
                flow[v][u - m] -= amount;
            }
            v = u;
        }
        left[origin] -= amount;
        room[target] -= amount;
        remaining -= amount;
    }
    flow
}
