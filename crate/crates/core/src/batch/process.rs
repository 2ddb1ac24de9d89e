use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::manifest::{parse_manifest, ManifestEntry};
use crate::asset::RigAsset;
use crate::error::{Error, Result};
use crate::exec::{with_threads, Execution};
use crate::io::{write_mesh_obj, write_rig_json};
use crate::pipeline::{
    correct_bones, dedup_key, filter_asset, is_duplicate, normalize_asset, remove_unused_bones, resample_surface,
    DedupKey, SampledCloud, DEFAULT_SAMPLE_COUNT,
};

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcessOptions {
    pub seed: u64,
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
    pub samples: usize,
}

impl Default for ProcessOptions {
    fn default() -> Self {
        ProcessOptions { seed: 0, threads: None, samples: DEFAULT_SAMPLE_COUNT }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AssetStatus {
    Kept,
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AssetRecord {
    pub index: usize,
    pub source: String,
    pub status: AssetStatus,
    pub reasons: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bone_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessReport {
    pub seed: u64,
    pub samples: usize,
    pub kept: usize,
    pub dropped: usize,
    /// Drop count per reason; an asset may contribute several reasons.
    pub reasons: BTreeMap<String, usize>,
    pub assets: Vec<AssetRecord>,
}

/// Serialized form of a [`SampledCloud`]; weights are sparse
/// `[point, bone, weight]` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CloudDocument {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<(usize, usize, f64)>,
    pub source_face: Vec<usize>,
    pub barycentric: Vec<[f64; 3]>,
}

impl From<&SampledCloud> for CloudDocument {
    fn from(c: &SampledCloud) -> Self {
        CloudDocument {
            points: c.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
            weights: c.weights.triplets().collect(),
            source_face: c.source_face.clone(),
            barycentric: c.barycentric.clone(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sampling seed for the asset at manifest position `index`.
pub fn asset_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(index as u64))
}

enum Stage {
    Ready(RigAsset),
    Dropped { reasons: Vec<String>, detail: Option<String>, counts: Option<(usize, usize)> },
}

fn prepare(entry: &ManifestEntry) -> Stage {
    let asset = match RigAsset::load(&entry.mesh, &entry.rig) {
        Ok(a) => a,
        Err(e) => {
            return Stage::Dropped { reasons: vec!["io-error".into()], detail: Some(e.to_string()), counts: None }
        }
    };
    let counts = Some((asset.mesh.vertices.len(), asset.skeleton.bone_count()));
    let report = filter_asset(&asset);
    if !report.keep() {
        return Stage::Dropped {
            reasons: report.reasons.iter().map(|r| r.rule.id().to_string()).collect(),
            detail: None,
            counts,
        };
    }
    let processed = remove_unused_bones(&asset)
        .and_then(|a| normalize_asset(&a))
        .and_then(|a| correct_bones(&a));
    match processed {
        Ok(a) => Stage::Ready(a),
        Err(e) => Stage::Dropped { reasons: vec!["processing-error".into()], detail: Some(e.to_string()), counts },
    }
}

struct Output {
    name: String,
    files: Vec<(String, Vec<u8>)>,
}

fn render(asset: &RigAsset, name: &str, seed: u64, samples: usize) -> Result<Vec<(String, Vec<u8>)>> {
    let cloud = resample_surface(asset, samples, seed)?;
    let mut cloud_json = serde_json::to_vec(&CloudDocument::from(&cloud))?;
    cloud_json.push(b'\n');
    Ok(vec![
        (format!("{name}.obj"), write_mesh_obj(&asset.mesh.vertices, &asset.mesh.faces).into_bytes()),
        (format!("{name}.rig.json"), write_rig_json(&asset.skeleton, &asset.skinning)?),
        (format!("{name}.cloud.json"), cloud_json),
    ])
}

/// Run the pipeline over `entries` and write outputs plus `report.json` to `out_dir`.
///
/// Per-asset stages run concurrently; deduplication walks assets in
/// manifest order, so the output tree depends only on inputs and seed.
pub fn process_entries(entries: &[ManifestEntry], out_dir: &Path, options: &ProcessOptions) -> Result<ProcessReport> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let exec = Execution::Parallel;
    let stages = with_threads(options.threads, || exec.map(entries, prepare))?;

    let mut records = Vec::with_capacity(entries.len());
    let mut keys: BTreeSet<DedupKey> = BTreeSet::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut jobs: Vec<(usize, String)> = Vec::new();
    for (index, (entry, stage)) in entries.iter().zip(&stages).enumerate() {
        let mut record = AssetRecord {
            index,
            source: entry.source.clone(),
            status: AssetStatus::Dropped,
            reasons: Vec::new(),
            detail: None,
            name: None,
            vertex_count: None,
            bone_count: None,
        };
        match stage {
            Stage::Dropped { reasons, detail, counts } => {
                record.reasons = reasons.clone();
                record.detail = detail.clone();
                record.vertex_count = counts.map(|c| c.0);
                record.bone_count = counts.map(|c| c.1);
            }
            Stage::Ready(asset) => {
                record.vertex_count = Some(asset.mesh.vertices.len());
                record.bone_count = Some(asset.skeleton.bone_count());
                let key = dedup_key(&asset.skeleton);
                let duplicate = keys.contains(&key)
                    || kept.iter().any(|&k| match &stages[k] {
                        Stage::Ready(other) => is_duplicate(&asset.skeleton, &other.skeleton),
                        Stage::Dropped { .. } => false,
                    });
                if duplicate {
                    record.reasons.push("duplicate".into());
                } else {
                    keys.insert(key);
                    kept.push(index);
                    let mut name = asset.name.clone();
                    if name.is_empty() || names.contains(&name) {
                        name = format!("{}_{index}", asset.name);
                    }
                    names.insert(name.clone());
                    record.status = AssetStatus::Kept;
                    record.name = Some(name.clone());
                    jobs.push((index, name));
                }
            }
        }
        records.push(record);
    }

    let rendered: Vec<Result<Output>> = with_threads(options.threads, || {
        exec.map(&jobs, |(index, name)| {
            let Stage::Ready(asset) = &stages[*index] else { unreachable!("only ready assets are rendered") };
            let files = render(asset, name, asset_seed(options.seed, *index), options.samples)?;
            Ok(Output { name: name.clone(), files })
        })
    })?;
    for ((index, _), result) in jobs.iter().zip(rendered) {
        let record = &mut records[*index];
        match result {
            Ok(output) => {
                for (file, bytes) in &output.files {
                    let path = out_dir.join(file);
                    std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
                }
                record.name = Some(output.name);
            }
            Err(e) => {
                record.status = AssetStatus::Dropped;
                record.name = None;
                record.reasons.push("processing-error".into());
                record.detail = Some(e.to_string());
            }
        }
    }

    let mut reasons = BTreeMap::new();
    for r in &records {
        for reason in &r.reasons {
            *reasons.entry(reason.clone()).or_insert(0) += 1;
        }
    }
    let kept = records.iter().filter(|r| r.status == AssetStatus::Kept).count();
    let report = ProcessReport {
        seed: options.seed,
        samples: options.samples,
        kept,
        dropped: records.len() - kept,
        reasons,
        assets: records,
    };
    let mut json = serde_json::to_vec_pretty(&report)?;
    json.push(b'\n');
    let path = out_dir.join(REPORT_FILE);
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(report)
}

/// Read a manifest file and process it; relative entries resolve against the manifest's directory.
pub fn process_manifest(manifest: &Path, out_dir: &Path, options: &ProcessOptions) -> Result<ProcessReport> {
    let text = std::fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&text, base)?;
    process_entries(&entries, out_dir, options)
}
