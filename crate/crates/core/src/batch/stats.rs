use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{parse_mesh_obj, parse_rig_json};
use crate::pipeline::{MAX_BONES_EXCLUSIVE, MAX_VERTICES_EXCLUSIVE, MIN_BONES_EXCLUSIVE, MIN_VERTICES_EXCLUSIVE};

/// Counts in `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bin {
    pub lo: u64,
    pub hi: u64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusStats {
    pub asset_count: usize,
    pub vertex_histogram: Vec<Bin>,
    pub bone_histogram: Vec<Bin>,
    /// Assets whose vertex or bone count violates the filter bounds.
    pub out_of_bounds: usize,
    pub skipped: Vec<String>,
}

/// Power-of-two bins spanning the smallest to the largest observed value.
pub fn log2_histogram(values: &[usize]) -> Vec<Bin> {
    let bin = |v: usize| (v.max(1) as u64).ilog2();
    let (Some(lo), Some(hi)) = (values.iter().map(|&v| bin(v)).min(), values.iter().map(|&v| bin(v)).max()) else {
        return Vec::new();
    };
    (lo..=hi)
        .map(|k| Bin {
            lo: if k == 0 { 0 } else { 1 << k },
            hi: 1 << (k + 1),
            count: values.iter().filter(|&&v| bin(v) == k).count(),
        })
        .collect()
}

/// Histograms over every `<name>.obj` + `<name>.rig.json` pair in `dir`.
pub fn corpus_stats(dir: &Path) -> Result<CorpusStats> {
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(".rig.json") {
            names.push(stem.to_string());
        }
    }
    names.sort();
    let mut vertices = Vec::new();
    let mut bones = Vec::new();
    let mut skipped = Vec::new();
    for name in names {
        let load = || -> Result<(usize, usize)> {
            let mesh_path = dir.join(format!("{name}.obj"));
            let rig_path = dir.join(format!("{name}.rig.json"));
            let mesh = parse_mesh_obj(&std::fs::read(&mesh_path).map_err(|e| Error::io(&mesh_path, e))?)?;
            let (skeleton, _) = parse_rig_json(&std::fs::read(&rig_path).map_err(|e| Error::io(&rig_path, e))?)?;
            Ok((mesh.vertices.len(), skeleton.bone_count()))
        };
        match load() {
            Ok((v, b)) => {
                vertices.push(v);
                bones.push(b);
            }
            Err(_) => skipped.push(name),
        }
    }
    let out_of_bounds = vertices
        .iter()
        .zip(&bones)
        .filter(|&(&v, &b)| {
            !(MIN_VERTICES_EXCLUSIVE < v && v < MAX_VERTICES_EXCLUSIVE && MIN_BONES_EXCLUSIVE < b && b < MAX_BONES_EXCLUSIVE)
        })
        .count();
    Ok(CorpusStats {
        asset_count: vertices.len(),
        vertex_histogram: log2_histogram(&vertices),
        bone_histogram: log2_histogram(&bones),
        out_of_bounds,
        skipped,
    })
}
