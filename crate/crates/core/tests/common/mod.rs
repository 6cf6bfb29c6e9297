#![allow(dead_code)]

use multalg::kernels::{ClosedFormFunction, EuclideanPointSet, KernelExpr};
use multalg::{Complex, C64};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

/// Fixed-seed config; `PROPTEST_RNG_SEED` overrides the seed.
pub fn config(cases: u32) -> Config {
    let mut cfg = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    if matches!(cfg.rng_seed, RngSeed::Random) {
        cfg.rng_seed = RngSeed::Fixed(0);
    }
    cfg
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn disk_point(radius: f64) -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(u, t)| C64::from_polar(radius * u.sqrt(), t))
}

fn separated(points: &[C64], sep: f64) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, a)| points[i + 1..].iter().all(|b| (a - b).norm() >= sep))
}

/// Samples in the disk of radius `radius` with pairwise separation `sep`.
pub fn disk_sample(
    radius: f64,
    sep: f64,
    len: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = EuclideanPointSet<f64>> {
    prop::collection::vec(disk_point(radius), len)
        .prop_filter("points too close", move |p| separated(p, sep))
        .prop_map(|p| EuclideanPointSet::planar(p).unwrap())
}

pub fn moebius(max_modulus: f64) -> impl Strategy<Value = ClosedFormFunction<f64>> {
    disk_point(max_modulus).prop_map(|a| ClosedFormFunction::moebius(a).unwrap())
}

/// Symbols that are analytic on the disk with modest sup norm.
pub fn symbol() -> impl Strategy<Value = ClosedFormFunction<f64>> {
    let coeff = (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b));
    prop_oneof![
        moebius(0.9),
        prop::collection::vec(coeff.clone(), 1..=4).prop_map(ClosedFormFunction::polynomial),
        Just(ClosedFormFunction::coordinate(0)),
        (coeff, moebius(0.8)).prop_map(|(k, m)| ClosedFormFunction::scale(k, m)),
    ]
}

/// Kernels on the disk from the builder grammar.
pub fn disk_kernel() -> impl Strategy<Value = KernelExpr<f64>> {
    let leaf = prop_oneof![
        Just(KernelExpr::szego()),
        (0.0..2.0f64).prop_map(KernelExpr::constant),
        moebius(0.9).prop_map(KernelExpr::rank_one),
        Just(KernelExpr::geom(KernelExpr::scale(
            0.5,
            KernelExpr::rank_one(ClosedFormFunction::coordinate(0))
        ))),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| KernelExpr::sum(vec![a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| KernelExpr::hadamard(a, b)),
            (0.1..3.0f64, inner).prop_map(|(s, k)| KernelExpr::scale(s, k)),
        ]
    })
}
