use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigkit::geoskin::{geodesic_weights, GeoSkinParams};
use rigkit::joints::gaussian_target_field_with;
use rigkit::lbs::deform_with;
use rigkit::voxel::{box_mesh, voxelize};
use rigkit::{Bone, Execution, Pose, Skeleton, SkinMatrix, Vec3};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn chain(bones: usize) -> Skeleton {
    let joints = (0..=bones)
        .map(|i| Vec3::new(-0.8 + 1.6 * i as f64 / bones as f64, 0.1 * (i as f64).sin(), 0.0))
        .collect();
    let list = (0..bones).map(|b| Bone::new(b, b + 1, b.checked_sub(1))).collect();
    Skeleton::new(joints, list).unwrap()
}

fn lbs(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bones = 32;
    let skeleton = chain(bones);
    let vertices: Vec<Vec3> = (0..50_000)
        .map(|_| Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)))
        .collect();
    let rows = vertices
        .iter()
        .map(|p| {
            let b = (((p.x + 0.8) / 1.6 * bones as f64) as usize).min(bones - 2);
            vec![(b, 0.7), (b + 1, 0.3)]
        })
        .collect();
    let skin = SkinMatrix::from_rows(bones, rows).unwrap();
    let mut pose = Pose::identity(bones);
    for b in 0..bones {
        pose.set(b, Pose::axis_angle(Vec3::x(), 0.05 * b as f64, Vec3::zeros()).unwrap()).unwrap();
    }
    let mut group = c.benchmark_group("lbs_deform_50k");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| deform_with(black_box(&vertices), &skeleton, &skin, &pose, exec).unwrap())
        });
    }
    group.finish();
}

fn gaussian_field(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let joints: Vec<Vec3> = (0..24)
        .map(|_| Vec3::new(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9)))
        .collect();
    let mut group = c.benchmark_group("gaussian_field_64");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| gaussian_target_field_with(black_box(&joints), 64, exec).unwrap()));
    }
    group.finish();
}

fn geodesic(c: &mut Criterion) {
    let mesh = box_mesh(Vec3::new(-0.9, -0.2, -0.2), Vec3::new(0.9, 0.2, 0.2));
    let skeleton = chain(16);
    let mut group = c.benchmark_group("geodesic_weights");
    group.sample_size(10);
    for resolution in [32, 64] {
        let grid = voxelize(&mesh, resolution).unwrap();
        let params = GeoSkinParams { resolution, ..GeoSkinParams::default() };
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, resolution), &grid, |b, grid| {
                b.iter(|| geodesic_weights(grid, &skeleton, &mesh.vertices, &params, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, lbs, gaussian_field, geodesic);
criterion_main!(benches);
