use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::Vec3;
use crate::io::BoneRecord;
use crate::metrics::{connectivity_pr, evaluate_joints, skin_metrics, JOINT_THRESHOLD};
use crate::skeleton::{validate_forest, Bone, Skeleton};
use crate::skin::SkinMatrix;

const RIG_SUFFIX: &str = ".rig.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalKind {
    Joints,
    Conn,
    Skin,
}

impl EvalKind {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            EvalKind::Joints => &["CD", "EMD", "Precision", "Recall"],
            EvalKind::Conn => &["Precision", "Recall"],
            EvalKind::Skin => &["CE", "Cos", "MAE", "Precision", "Recall"],
        }
    }
}

impl FromStr for EvalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joints" => Ok(EvalKind::Joints),
            "conn" => Ok(EvalKind::Conn),
            "skin" => Ok(EvalKind::Skin),
            other => Err(Error::InvalidArgument(format!("unknown evaluation kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedFile {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalReport {
    pub kind: EvalKind,
    pub columns: Vec<String>,
    pub rows: Vec<EvalRow>,
    /// Column means over evaluated rows; absent when nothing was evaluated.
    pub mean: Option<Vec<f64>>,
    pub skipped: Vec<SkippedFile>,
    pub skipped_count: usize,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("asset");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        let mut line = |name: &str, values: &[f64]| {
            out.push_str(name);
            for v in values {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        };
        for row in &self.rows {
            line(&row.name, &row.values);
        }
        if let Some(mean) = &self.mean {
            line("mean", mean);
        }
        out
    }
}

/// Rig file with optional bones and weights, so joint-only predictions load too.
#[derive(Debug, Deserialize)]
struct LooseRig {
    joints: Vec<[f64; 3]>,
    #[serde(default)]
    bones: Vec<BoneRecord>,
    #[serde(default)]
    weights: Vec<(usize, usize, f64)>,
}

impl LooseRig {
    fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_slice(&bytes)?)
    }

    fn points(&self) -> Vec<Vec3> {
        self.joints.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()
    }

    fn skeleton(&self) -> Result<Skeleton> {
        let s = Skeleton {
            joints: self.points(),
            bones: self.bones.iter().map(|b| Bone::new(b.head, b.tail, b.parent)).collect(),
        };
        validate_forest(&s).into_result()?;
        Ok(s)
    }
}

fn rig_names(dir: &Path) -> Result<BTreeSet<String>> {
    let mut names = BTreeSet::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(RIG_SUFFIX) {
            names.insert(stem.to_string());
        }
    }
    Ok(names)
}

fn dense(rig: &LooseRig, rows: usize, bones: usize) -> Result<Vec<Vec<f64>>> {
    let mut m = vec![vec![0.0; bones]; rows];
    for &(v, b, w) in &rig.weights {
        if v >= rows || b >= bones {
            return Err(Error::Dimension(format!("weight entry ({v}, {b}) outside {rows} x {bones}")));
        }
        m[v][b] += w;
    }
    Ok(m)
}

fn evaluate_pair(kind: EvalKind, pred: &Path, gt: &Path) -> Result<Vec<f64>> {
    let (p, g) = (LooseRig::load(pred)?, LooseRig::load(gt)?);
    match kind {
        EvalKind::Joints => {
            let e = evaluate_joints(&p.points(), &g.points(), JOINT_THRESHOLD)?;
            Ok(vec![e.cd, e.emd, e.precision, e.recall])
        }
        EvalKind::Conn => {
            let (ps, gs) = (p.skeleton()?, g.skeleton()?);
            let (precision, recall) = connectivity_pr(&ps.connectivity_pairs(), &gs.connectivity_pairs())?;
            Ok(vec![precision, recall])
        }
        EvalKind::Skin => {
            let bones = g.bones.len();
            if p.bones.len() != bones {
                return Err(Error::Dimension(format!("{} predicted bones vs {bones}", p.bones.len())));
            }
            let rows = g.weights.iter().chain(&p.weights).map(|w| w.0 + 1).max().unwrap_or(0);
            // ground truth must be a valid skinning matrix
            SkinMatrix::from_triplets(rows, bones, g.weights.clone())?;
            let e = skin_metrics(&dense(&p, rows, bones)?, &dense(&g, rows, bones)?)?;
            Ok(vec![e.ce, e.cos, e.mae, e.precision, e.recall])
        }
    }
}

/// Evaluate every `<name>.rig.json` present in both directories.
///
/// Files present on one side only, or that fail to load or evaluate, are
/// reported under `skipped` with a reason.
pub fn evaluate_dirs(pred_dir: &Path, gt_dir: &Path, kind: EvalKind, exec: Execution) -> Result<EvalReport> {
    let pred_names = rig_names(pred_dir)?;
    let gt_names = rig_names(gt_dir)?;
    let mut skipped: Vec<SkippedFile> = Vec::new();
    for name in gt_names.difference(&pred_names) {
        skipped.push(SkippedFile { name: name.clone(), reason: "missing prediction".into() });
    }
    for name in pred_names.difference(&gt_names) {
        skipped.push(SkippedFile { name: name.clone(), reason: "missing ground truth".into() });
    }
    let matched: Vec<String> = gt_names.intersection(&pred_names).cloned().collect();
    let results = exec.map(&matched, |name| {
        let file = format!("{name}{RIG_SUFFIX}");
        evaluate_pair(kind, &pred_dir.join(&file), &gt_dir.join(&file))
    });
    let mut rows = Vec::new();
    for (name, result) in matched.into_iter().zip(results) {
        match result {
            Ok(values) => rows.push(EvalRow { name, values }),
            Err(e) => skipped.push(SkippedFile { name, reason: e.to_string() }),
        }
    }
    skipped.sort_by(|a, b| a.name.cmp(&b.name));
    let columns: Vec<String> = kind.columns().iter().map(|c| c.to_string()).collect();
    let mean = (!rows.is_empty()).then(|| {
        (0..columns.len())
            .map(|c| rows.iter().map(|r| r.values[c]).sum::<f64>() / rows.len() as f64)
            .collect()
    });
    Ok(EvalReport {
        kind,
        columns,
        rows,
        mean,
        skipped_count: skipped.len(),
        skipped,
    })
}
