use std::f64::consts::PI;
use std::hint::black_box;

use cbeam_core::benchmarks::s_curve;
use cbeam_core::geometry::{Curve, ParamCurve};
use cbeam_core::Vec3;
use criterion::{criterion_group, criterion_main, Criterion};

fn geometry(c: &mut Criterion) {
    let helix = ParamCurve::Helix {
        center: Vec3::zeros(),
        radius: 1.0,
        pitch: 0.2,
        angle: [0.0, 6.0 * PI],
    };
    let spline = s_curve();
    c.bench_function("curve_new/helix", |b| b.iter(|| Curve::new(black_box(helix.clone())).unwrap()));
    c.bench_function("curve_new/s_curve", |b| b.iter(|| Curve::new(black_box(spline.clone())).unwrap()));

    let curve = Curve::new(spline).unwrap();
    let s = 0.37 * curve.length();
    c.bench_function("frame/s_curve", |b| b.iter(|| curve.frame(black_box(s)).unwrap()));
    let x = curve.position(s).unwrap() + Vec3::new(0.02, -0.01, 0.03);
    c.bench_function("closest_point/s_curve", |b| b.iter(|| curve.closest_point(black_box(&x)).unwrap()));
}

criterion_group!(benches, geometry);
criterion_main!(benches);
