//! File-level workflows behind the command-line tool: manifest processing,
//! posing, evaluation, corpus statistics and validation.

mod eval;
mod manifest;
mod pose;
mod process;
mod stats;
mod validate;

pub use eval::{evaluate_dirs, EvalKind, EvalReport, EvalRow, SkippedFile};
pub use manifest::{parse_manifest, ManifestEntry};
pub use pose::{parse_pose_json, PoseEntry};
pub use process::{
    asset_seed, process_entries, process_manifest, AssetRecord, AssetStatus, CloudDocument, ProcessOptions,
    ProcessReport,
};
pub use stats::{corpus_stats, log2_histogram, Bin, CorpusStats};
pub use validate::{validate_files, ValidationSummary};
