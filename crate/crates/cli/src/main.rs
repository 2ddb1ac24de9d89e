//! `rigkit`: process rigged-asset corpora, pose and skin rigs, and score predictions.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rigkit::batch::{
    corpus_stats, evaluate_dirs, parse_manifest, parse_pose_json, process_entries, validate_files, EvalKind,
    ProcessOptions,
};
use rigkit::exec::with_threads;
use rigkit::geoskin::{skin_mesh, GeoSkinParams};
use rigkit::io::{write_mesh_obj, write_rig_json};
use rigkit::pipeline::DEFAULT_SAMPLE_COUNT;
use rigkit::{Execution, RigAsset};

#[derive(Parser)]
#[command(name = "rigkit", version, about = "Rigged-asset processing, skinning and evaluation")]
struct Cli {
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: one per core)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter, normalize, repair, deduplicate and resample a manifest of assets
    Process {
        manifest: PathBuf,
        /// Surface samples per asset
        #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
        samples: usize,
    },
    /// Deform a mesh with a pose file and write the posed OBJ
    Animate {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        rig: PathBuf,
        #[arg(long)]
        pose: PathBuf,
    },
    /// Replace a rig's skinning weights with geodesic voxel weights
    SkinGeo {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        rig: PathBuf,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value_t = 2.0)]
        falloff: f64,
    },
    /// Score predicted rigs against ground truth
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Vertex and bone count histograms of a processed directory
    Stats { dir: PathBuf },
    /// Check a rig (and optionally its mesh) for structural problems
    Validate {
        #[arg(long)]
        rig: PathBuf,
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Joints,
    Conn,
    Skin,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Joints => "joints",
            Kind::Conn => "conn",
            Kind::Skin => "skin",
        }
    }
}

impl From<Kind> for EvalKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Joints => EvalKind::Joints,
            Kind::Conn => EvalKind::Conn,
            Kind::Skin => EvalKind::Skin,
        }
    }
}

/// Exit status 1: the run itself failed. Exit status 2: the inputs broke the contract.
enum Failure {
    System(anyhow::Error),
    Input(anyhow::Error),
}

trait Classify<T> {
    fn input(self) -> Result<T, Failure>;
    fn system(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn system(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::System(e.into()))
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))
            .system()?;
    }
    std::fs::write(path, bytes)
        .with_context(|| format!("writing {}", path.display()))
        .system()
}

/// Write to `<out>/<name>` when an output directory is set, otherwise to stdout.
fn emit(out: Option<&Path>, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            let path = dir.join(name);
            write_file(&path, bytes)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).context("writing stdout").system()
        }
    }
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut out = serde_json::to_vec_pretty(value).system()?;
    out.push(b'\n');
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "asset".into())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Process { manifest, samples } => {
            let text = std::fs::read_to_string(&manifest)
                .with_context(|| format!("reading manifest {}", manifest.display()))
                .input()?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let entries = parse_manifest(&text, base).input()?;
            let out_dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("processed"));
            let options = ProcessOptions { seed: cli.seed, threads: cli.threads, samples };
            let report = process_entries(&entries, &out_dir, &options).system()?;
            eprintln!(
                "processed {} assets: kept {}, dropped {} -> {}",
                entries.len(),
                report.kept,
                report.dropped,
                out_dir.display()
            );
            Ok(())
        }
        Command::Animate { mesh, rig, pose } => {
            let asset = RigAsset::load(&mesh, &rig).input()?;
            let bytes = std::fs::read(&pose)
                .with_context(|| format!("reading pose {}", pose.display()))
                .input()?;
            let pose = parse_pose_json(&bytes, asset.skeleton.bone_count()).input()?;
            let posed = with_threads(cli.threads, || {
                rigkit::lbs::deform_with(&asset.mesh.vertices, &asset.skeleton, &asset.skinning, &pose, Execution::Parallel)
            })
            .system()?
            .input()?;
            let obj = write_mesh_obj(&posed, &asset.mesh.faces);
            emit(out, &format!("{}.posed.obj", asset.name), obj.as_bytes())
        }
        Command::SkinGeo { mesh, rig, resolution, falloff } => {
            let asset = RigAsset::load(&mesh, &rig).input()?;
            let params = GeoSkinParams { resolution, falloff, ..GeoSkinParams::default() };
            let skinned = with_threads(cli.threads, || {
                skin_mesh(&asset.mesh, &asset.skeleton, &params, Execution::Parallel)
            })
            .system()?
            .input()?;
            if !skinned.euclidean_fallback.is_empty() {
                eprintln!(
                    "{} vertices reached no bone through the volume; used straight-line distance",
                    skinned.euclidean_fallback.len()
                );
            }
            let bytes = write_rig_json(&asset.skeleton, &skinned.weights).input()?;
            emit(out, &format!("{}.rig.json", stem(&mesh)), &bytes)
        }
        Command::Eval { pred, gt, kind } => {
            let report = with_threads(cli.threads, || evaluate_dirs(&pred, &gt, kind.into(), Execution::Parallel))
                .system()?
                .input()?;
            if report.skipped_count > 0 {
                eprintln!("skipped {} unmatched or unreadable files", report.skipped_count);
            }
            let json = json_bytes(&report)?;
            if let Some(dir) = out {
                let name = format!("eval-{}", kind.name());
                write_file(&dir.join(format!("{name}.json")), &json)?;
                write_file(&dir.join(format!("{name}.csv")), report.to_csv().as_bytes())?;
            }
            emit(None, "", &json)
        }
        Command::Stats { dir } => {
            let stats = corpus_stats(&dir).input()?;
            emit(out, "stats.json", &json_bytes(&stats)?)
        }
        Command::Validate { rig, mesh } => {
            let summary = validate_files(&rig, mesh.as_deref()).input()?;
            emit(out, &format!("{}.validation.json", stem(&rig)), &json_bytes(&summary)?)?;
            if summary.usable {
                Ok(())
            } else {
                Err(Failure::Input(anyhow::anyhow!("{} is not a usable rig", rig.display())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::System(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
