//! Kinematic data model: bones, joints, validation, rest pose, forward
//! kinematics and connectivity matrices.

mod connectivity;
mod kinematics;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Vec3;

pub use connectivity::{decode_connectivity, skeleton_to_connectivity, ConnectivityMatrix};
pub use kinematics::{blend_matrices, forward_kinematics, rest_pose, Pose, RestPose, WORLD_UP};

/// Bones shorter than this are treated as zero-length.
pub const MIN_BONE_LENGTH: f64 = 1e-12;

/// An oriented segment between two joints, with an optional parent bone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bone {
    pub head: usize,
    pub tail: usize,
    pub parent: Option<usize>,
}

impl Bone {
    pub fn new(head: usize, tail: usize, parent: Option<usize>) -> Self {
        Bone { head, tail, parent }
    }
}

/// Joints plus bones forming a kinematic forest.
///
/// Fields are public so raw (possibly inconsistent) data can be represented;
/// use [`validate_forest`] to check structure before relying on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    pub joints: Vec<Vec3>,
    pub bones: Vec<Bone>,
}

impl Skeleton {
    /// Construct and reject anything with fatal structural errors.
    pub fn new(joints: Vec<Vec3>, bones: Vec<Bone>) -> Result<Self> {
        let s = Skeleton { joints, bones };
        validate_forest(&s).into_result()?;
        Ok(s)
    }

    pub fn bone_count(&self) -> usize {
        self.bones.len()
    }

    pub fn joint_count(&self) -> usize {
        self.joints.len()
    }

    pub fn head(&self, bone: usize) -> Vec3 {
        self.joints[self.bones[bone].head]
    }

    pub fn tail(&self, bone: usize) -> Vec3 {
        self.joints[self.bones[bone].tail]
    }

    pub fn length(&self, bone: usize) -> f64 {
        (self.tail(bone) - self.head(bone)).norm()
    }

    /// Child bone lists, indexed by parent bone.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.bones.len()];
        for (b, bone) in self.bones.iter().enumerate() {
            if let Some(p) = bone.parent {
                if p < self.bones.len() {
                    children[p].push(b);
                }
            }
        }
        children
    }

    /// Bones ordered so that every parent precedes its children.
    /// Fails if the parent links contain a cycle or dangle.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.bones.len();
        let children = self.children();
        let mut order = Vec::with_capacity(n);
        for (b, bone) in self.bones.iter().enumerate() {
            match bone.parent {
                None => order.push(b),
                Some(p) if p >= n => {
                    return Err(Error::InvalidSkeleton(format!(
                        "bone {b} has parent {p} out of range"
                    )))
                }
                _ => {}
            }
        }
        let mut next = 0;
        while next < order.len() {
            let b = order[next];
            order.extend(children[b].iter().copied());
            next += 1;
        }
        if order.len() != n {
            return Err(Error::InvalidSkeleton("parent links contain a cycle".into()));
        }
        Ok(order)
    }

    /// Joints that are not the tail of any bone.
    pub fn root_joints(&self) -> Vec<usize> {
        let mut is_tail = vec![false; self.joints.len()];
        for bone in &self.bones {
            if let Some(t) = is_tail.get_mut(bone.tail) {
                *t = true;
            }
        }
        (0..self.joints.len()).filter(|&j| !is_tail[j]).collect()
    }

    /// Directed `(head, tail)` joint pairs plus `(j, j)` for every root joint.
    pub fn connectivity_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut pairs: BTreeSet<_> = self.bones.iter().map(|b| (b.head, b.tail)).collect();
        pairs.extend(self.root_joints().into_iter().map(|j| (j, j)));
        pairs
    }

    /// Drop joints no bone references and renumber the rest in order.
    pub fn compact_joints(&self) -> Skeleton {
        let mut used = vec![false; self.joints.len()];
        for b in &self.bones {
            used[b.head] = true;
            used[b.tail] = true;
        }
        let mut remap = vec![usize::MAX; self.joints.len()];
        let mut joints = Vec::new();
        for (j, &u) in used.iter().enumerate() {
            if u {
                remap[j] = joints.len();
                joints.push(self.joints[j]);
            }
        }
        let bones = self
            .bones
            .iter()
            .map(|b| Bone::new(remap[b.head], remap[b.tail], b.parent))
            .collect();
        Skeleton { joints, bones }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A single structural finding about a skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Issue {
    NonFiniteJoint { joint: usize },
    JointOutOfRange { bone: usize, joint: usize },
    ParentOutOfRange { bone: usize, parent: usize },
    Cycle { bones: Vec<usize> },
    ZeroLength { bone: usize },
    /// Head joint differs from the parent's tail joint.
    DetachedHead { bone: usize, parent: usize },
    /// More than one bone ends at the same joint.
    SharedTail { joint: usize, bones: Vec<usize> },
}

impl Issue {
    /// Detached heads and shared tails occur in raw artist rigs and are
    /// repaired by bone correction; everything else makes a skeleton unusable.
    pub fn severity(&self) -> Severity {
        match self {
            Issue::DetachedHead { .. } | Issue::SharedTail { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity() == Severity::Error)
    }

    /// No errors (warnings allowed).
    pub fn is_usable(&self) -> bool {
        self.errors().next().is_none()
    }

    /// No issues at all.
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_cycle(&self) -> bool {
        self.issues.iter().any(|i| matches!(i, Issue::Cycle { .. }))
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_usable() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.errors().map(|i| format!("{i:?}")).collect();
            Err(Error::InvalidSkeleton(msgs.join("; ")))
        }
    }
}

/// Check acyclicity, index ranges, head/parent-tail consistency and bone lengths.
pub fn validate_forest(skeleton: &Skeleton) -> ValidationReport {
    let mut issues = Vec::new();
    let nj = skeleton.joints.len();
    let nb = skeleton.bones.len();

    for (j, p) in skeleton.joints.iter().enumerate() {
        if !p.iter().all(|c| c.is_finite()) {
            issues.push(Issue::NonFiniteJoint { joint: j });
        }
    }

    let mut joints_ok = vec![true; nb];
    for (b, bone) in skeleton.bones.iter().enumerate() {
        for joint in [bone.head, bone.tail] {
            if joint >= nj {
                issues.push(Issue::JointOutOfRange { bone: b, joint });
                joints_ok[b] = false;
            }
        }
        if let Some(p) = bone.parent {
            if p >= nb {
                issues.push(Issue::ParentOutOfRange { bone: b, parent: p });
            }
        }
    }

    issues.extend(find_cycles(skeleton).into_iter().map(|bones| Issue::Cycle { bones }));

    for (b, bone) in skeleton.bones.iter().enumerate() {
        if !joints_ok[b] {
            continue;
        }
        if bone.head == bone.tail || skeleton.length(b) <= MIN_BONE_LENGTH {
            issues.push(Issue::ZeroLength { bone: b });
        }
        if let Some(p) = bone.parent.filter(|&p| p < nb && p != b) {
            if skeleton.bones[p].tail != bone.head {
                issues.push(Issue::DetachedHead { bone: b, parent: p });
            }
        }
    }

    let mut by_tail: Vec<Vec<usize>> = vec![Vec::new(); nj];
    for (b, bone) in skeleton.bones.iter().enumerate() {
        if bone.tail < nj {
            by_tail[bone.tail].push(b);
        }
    }
    for (joint, bones) in by_tail.into_iter().enumerate() {
        if bones.len() > 1 {
            issues.push(Issue::SharedTail { joint, bones });
        }
    }

    ValidationReport { issues }
}

/// Each cycle in the parent links, reported once as its bone list starting
/// at the lowest index.
fn find_cycles(skeleton: &Skeleton) -> Vec<Vec<usize>> {
    let n = skeleton.bones.len();
    // 0 = unvisited, 1 = on current walk, 2 = done
    let mut state = vec![0u8; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut cur = Some(start);
        while let Some(b) = cur {
            if b >= n || state[b] == 2 {
                break;
            }
            if state[b] == 1 {
                let pos = walk.iter().position(|&x| x == b).unwrap();
                let mut cycle = walk[pos..].to_vec();
                let min_pos = cycle.iter().enumerate().min_by_key(|e| e.1).unwrap().0;
                cycle.rotate_left(min_pos);
                cycles.push(cycle);
                break;
            }
            state[b] = 1;
            walk.push(b);
            cur = skeleton.bones[b].parent;
        }
        for b in walk {
            state[b] = 2;
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Skeleton {
        Skeleton {
            joints: vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, 2.0, 0.0),
                Vec3::new(0.0, 3.0, 0.0),
            ],
            bones: vec![
                Bone::new(0, 1, None),
                Bone::new(1, 2, Some(0)),
                Bone::new(2, 3, Some(1)),
            ],
        }
    }

    #[test]
    fn three_bone_chain_is_clean() {
        let report = validate_forest(&chain());
        assert!(report.is_clean(), "{report:?}");
        assert_eq!(chain().topological_order().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn mutual_parents_reported_as_cycle() {
        let mut s = chain();
        s.bones[0].parent = Some(1);
        s.bones[1].parent = Some(0);
        let report = validate_forest(&s);
        assert!(report.has_cycle());
        assert!(!report.is_usable());
        assert!(report.issues.contains(&Issue::Cycle { bones: vec![0, 1] }));
        assert!(s.topological_order().is_err());
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let mut s = chain();
        s.bones[2].parent = Some(2);
        assert!(validate_forest(&s)
            .issues
            .contains(&Issue::Cycle { bones: vec![2] }));
    }

    #[test]
    fn zero_length_bone_reported() {
        let mut s = chain();
        s.joints[3] = s.joints[2];
        let report = validate_forest(&s);
        assert!(report.issues.contains(&Issue::ZeroLength { bone: 2 }));
        assert!(!report.is_usable());
    }

    #[test]
    fn detached_head_is_a_warning() {
        let mut s = chain();
        s.joints.push(Vec3::new(0.1, 2.0, 0.0));
        s.bones[2].head = 4;
        let report = validate_forest(&s);
        assert_eq!(report.issues, vec![Issue::DetachedHead { bone: 2, parent: 1 }]);
        assert!(report.is_usable());
        assert!(!report.is_clean());
    }

    #[test]
    fn out_of_range_indices() {
        let mut s = chain();
        s.bones[0].tail = 10;
        s.bones[1].parent = Some(7);
        let report = validate_forest(&s);
        assert!(report
            .issues
            .contains(&Issue::JointOutOfRange { bone: 0, joint: 10 }));
        assert!(report
            .issues
            .contains(&Issue::ParentOutOfRange { bone: 1, parent: 7 }));
    }

    #[test]
    fn roots_and_pairs() {
        let s = chain();
        assert_eq!(s.root_joints(), vec![0]);
        let pairs: Vec<_> = s.connectivity_pairs().into_iter().collect();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 2), (2, 3)]);
    }
}
