//! Fixture generators shared by the integration tests.
#![allow(dead_code)]

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigkit::io::{write_mesh_obj, write_rig_json};
use rigkit::{Bone, Skeleton, SkinMatrix, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point<R: Rng>(rng: &mut R, extent: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-extent..extent),
        rng.random_range(-extent..extent),
        rng.random_range(-extent..extent),
    )
}

fn random_offset<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let d = random_point(rng, 0.5);
        if d.norm() > 0.05 {
            return d;
        }
    }
}

/// Random forest of `bones` bones: every bone's head is its parent's tail
/// joint, or a fresh root joint.
pub fn random_skeleton<R: Rng>(rng: &mut R, bones: usize) -> Skeleton {
    let mut joints = vec![random_point(rng, 1.0)];
    let mut list: Vec<Bone> = Vec::new();
    for b in 0..bones {
        let (head, parent) = if b == 0 || rng.random_bool(0.1) {
            if b > 0 {
                joints.push(random_point(rng, 1.0));
            }
            (joints.len() - 1, None)
        } else {
            let p = rng.random_range(0..b);
            (list[p].tail, Some(p))
        };
        let tail_pos = joints[head] + random_offset(rng);
        joints.push(tail_pos);
        list.push(Bone::new(head, joints.len() - 1, parent));
    }
    Skeleton::new(joints, list).expect("generated skeleton is a valid forest")
}

/// Random sparse weights with up to four influences per vertex.
pub fn random_skin<R: Rng>(rng: &mut R, vertices: usize, bones: usize) -> SkinMatrix {
    let rows = (0..vertices)
        .map(|_| {
            let mut row: Vec<(usize, f64)> = Vec::new();
            for _ in 0..rng.random_range(1..=4usize) {
                let b = rng.random_range(0..bones);
                if !row.iter().any(|e| e.0 == b) {
                    row.push((b, rng.random_range(0.1..1.0)));
                }
            }
            let sum: f64 = row.iter().map(|e| e.1).sum();
            row.iter_mut().for_each(|e| e.1 /= sum);
            row.sort_by_key(|e| e.0);
            row
        })
        .collect();
    SkinMatrix::from_rows(bones, rows).expect("rows are normalized")
}

/// Random tree over exactly `k` joints; some joints start new roots.
pub fn random_tree<R: Rng>(rng: &mut R, k: usize) -> Skeleton {
    let mut joints = vec![random_point(rng, 1.0)];
    let mut bones: Vec<Bone> = Vec::new();
    // bone ending at each joint, if any
    let mut incoming: Vec<Option<usize>> = vec![None];
    for _ in 1..k {
        let pos = random_point(rng, 1.0);
        if rng.random_bool(0.1) {
            joints.push(pos);
            incoming.push(None);
            continue;
        }
        let head = rng.random_range(0..joints.len());
        joints.push(pos);
        bones.push(Bone::new(head, joints.len() - 1, incoming[head]));
        incoming.push(Some(bones.len() - 1));
    }
    Skeleton::new(joints, bones).expect("generated tree is a valid forest")
}

/// Closed tube along x: `rings` rings of `segments` vertices plus two cap centers.
pub fn tube_mesh(length: f64, radius: f64, rings: usize, segments: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let mut v = Vec::new();
    for r in 0..rings {
        let x = -length / 2.0 + length * r as f64 / (rings - 1) as f64;
        for s in 0..segments {
            let a = std::f64::consts::TAU * s as f64 / segments as f64;
            v.push(Vec3::new(x, radius * a.cos(), radius * a.sin()));
        }
    }
    let start = v.len();
    v.push(Vec3::new(-length / 2.0, 0.0, 0.0));
    v.push(Vec3::new(length / 2.0, 0.0, 0.0));
    let at = |r: usize, s: usize| r * segments + s % segments;
    let mut f = Vec::new();
    for r in 0..rings - 1 {
        for s in 0..segments {
            f.push([at(r, s), at(r + 1, s), at(r + 1, s + 1)]);
            f.push([at(r, s), at(r + 1, s + 1), at(r, s + 1)]);
        }
    }
    for s in 0..segments {
        f.push([start, at(0, s + 1), at(0, s)]);
        f.push([start + 1, at(rings - 1, s), at(rings - 1, s + 1)]);
    }
    (v, f)
}

/// A 12-bone chain of uneven proportions inside a 242-vertex tube, with
/// tails jittered off the next head.
pub fn tube_creature(seed: u64) -> (Vec<Vec3>, Vec<[usize; 3]>, Skeleton, SkinMatrix) {
    let mut rng = rng(seed);
    let length = rng.random_range(1.5..2.5);
    let radius = rng.random_range(0.15..0.3);
    let (vertices, faces) = tube_mesh(length, radius, 20, 12);
    let bones = 12;
    let steps: Vec<f64> = (0..bones).map(|_| rng.random_range(0.6..1.4)).collect();
    let total: f64 = steps.iter().sum();
    let mut xs = vec![-0.45 * length];
    for s in &steps {
        xs.push(xs.last().unwrap() + 0.9 * length * s / total);
    }
    let lateral: Vec<f64> = (0..=bones).map(|_| rng.random_range(-0.3..0.3) * radius).collect();
    let at = |i: usize| Vec3::new(xs[i], lateral[i], 0.0);
    let noise = 0.01 * length;
    let mut joints = Vec::new();
    let mut list = Vec::new();
    for b in 0..bones {
        joints.push(at(b));
        joints.push(at(b + 1) + random_point(&mut rng, noise));
        list.push(Bone::new(2 * b, 2 * b + 1, b.checked_sub(1)));
    }
    let skeleton = Skeleton { joints, bones: list };
    let width = 0.9 * length / bones as f64;
    let rows = vertices
        .iter()
        .map(|p| {
            let raw: Vec<f64> = (0..bones)
                .map(|b| {
                    let mid = 0.5 * (xs[b] + xs[b + 1]);
                    (-((p.x - mid) / width).powi(2)).exp()
                })
                .collect();
            let sum: f64 = raw.iter().sum();
            let kept: Vec<(usize, f64)> = raw.iter().map(|w| w / sum).enumerate().filter(|e| e.1 > 0.01).collect();
            let mass: f64 = kept.iter().map(|e| e.1).sum();
            kept.into_iter().map(|(b, w)| (b, w / mass)).collect()
        })
        .collect();
    let skin = SkinMatrix::from_rows(bones, rows).expect("blend rows are normalized");
    (vertices, faces, skeleton, skin)
}

pub fn write_asset(dir: &Path, name: &str, vertices: &[Vec3], faces: &[[usize; 3]], skeleton: &Skeleton, skin: &SkinMatrix) {
    std::fs::write(dir.join(format!("{name}.obj")), write_mesh_obj(vertices, faces)).unwrap();
    std::fs::write(dir.join(format!("{name}.rig.json")), write_rig_json(skeleton, skin).unwrap()).unwrap();
}

/// 20 manifest lines: 18 distinct creatures, a repeated line and a corrupt rig.
pub fn write_corpus(dir: &Path) -> std::path::PathBuf {
    std::fs::create_dir_all(dir.join("assets")).unwrap();
    let mut manifest = String::new();
    for i in 0..18 {
        let (v, f, s, w) = tube_creature(1000 + i);
        let name = format!("creature{i:02}");
        write_asset(&dir.join("assets"), &name, &v, &f, &s, &w);
        manifest.push_str(&format!("assets/{name}\n"));
    }
    manifest.push_str("assets/creature03\n");
    std::fs::write(dir.join("assets/broken.obj"), "v 0 0 0\nf 1 2 3\n").unwrap();
    std::fs::write(dir.join("assets/broken.rig.json"), "{\"joints\": [").unwrap();
    manifest.push_str("assets/broken\n");
    let path = dir.join("manifest.txt");
    std::fs::write(&path, manifest).unwrap();
    path
}

/// Every file under `dir` with its bytes, sorted by relative path.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}
