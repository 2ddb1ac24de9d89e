use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::asset::RigAsset;
use crate::error::{Error, Result};
use crate::geom::{triangle_area, Vec3};
use crate::skin::SkinMatrix;

pub const DEFAULT_SAMPLE_COUNT: usize = 8192;

/// Points sampled on a mesh surface with skinning weights interpolated from
/// the source triangle's vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCloud {
    pub points: Vec<Vec3>,
    pub weights: SkinMatrix,
    pub source_face: Vec<usize>,
    pub barycentric: Vec<[f64; 3]>,
}

/// Barycentric blend of a face's three vertex weight rows.
pub fn interpolate_weights(skinning: &SkinMatrix, face: [usize; 3], bary: [f64; 3]) -> Vec<(usize, f64)> {
    let mut acc: Vec<(usize, f64)> = Vec::with_capacity(8);
    for (&v, &t) in face.iter().zip(&bary) {
        if t == 0.0 {
            continue;
        }
        for &(b, w) in skinning.row(v) {
            match acc.iter_mut().find(|e| e.0 == b) {
                Some(e) => e.1 += t * w,
                None => acc.push((b, t * w)),
            }
        }
    }
    acc.retain(|e| e.1 > 0.0);
    acc.sort_by_key(|e| e.0);
    acc
}

/// Draw `count` area-weighted surface samples.
///
/// Faces are picked from an alias table over triangle areas and points are
/// placed with the square-root barycentric map, all driven by a ChaCha8
/// generator seeded with `seed`, so equal seeds give identical clouds.
pub fn resample_surface(asset: &RigAsset, count: usize, seed: u64) -> Result<SampledCloud> {
    let mesh = &asset.mesh;
    let areas: Vec<f64> = (0..mesh.faces.len())
        .map(|f| {
            let [a, b, c] = mesh.triangle(f);
            triangle_area(&a, &b, &c)
        })
        .collect();
    if !areas.iter().any(|&a| a > 0.0) {
        return Err(Error::Degenerate("mesh has no face with positive area".into()));
    }
    let table = WeightedAliasIndex::new(areas).map_err(|e| Error::Degenerate(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut points = Vec::with_capacity(count);
    let mut source_face = Vec::with_capacity(count);
    let mut barycentric = Vec::with_capacity(count);
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let f = table.sample(&mut rng);
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let s = r1.sqrt();
        let bary = [1.0 - s, s * (1.0 - r2), s * r2];
        let [a, b, c] = mesh.triangle(f);
        points.push(a * bary[0] + b * bary[1] + c * bary[2]);
        rows.push(interpolate_weights(&asset.skinning, mesh.faces[f], bary));
        source_face.push(f);
        barycentric.push(bary);
    }
    Ok(SampledCloud {
        points,
        weights: SkinMatrix::from_rows(asset.skinning.bone_count(), rows)?,
        source_face,
        barycentric,
    })
}
