mod common;

use common::{c, config, disk_kernel, disk_sample, moebius};
use multalg::kernels::{psd_check, schur_product_check, ClosedFormFunction, EuclideanPointSet, KernelExpr};
use multalg::linalg::CMatrix;
use multalg::{Complex, Error, C64};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Determinant by Laplace expansion along the first row.
fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

/// PSD verdict from all principal minors of a real symmetric matrix.
fn minors_psd(m: &[Vec<f64>], tol: f64) -> bool {
    let n = m.len();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j]).collect()).collect();
        det(&sub) >= -tol
    })
}

fn planar(points: &[C64]) -> EuclideanPointSet<f64> {
    EuclideanPointSet::planar(points.to_vec()).unwrap()
}

#[test]
fn szego_values() {
    let k = KernelExpr::szego();
    assert_eq!(k.eval(&[c(0.5, 0.0)], &[c(0.5, 0.0)]).unwrap(), c(4.0 / 3.0, 0.0));
    for w in [c(0.3, -0.4), c(-0.9, 0.0)] {
        assert_eq!(k.eval(&[C64::zero()], &[w]).unwrap(), C64::one());
    }
    assert!(matches!(
        k.eval(&[c(1.0, 0.0)], &[C64::zero()]),
        Err(Error::OutOfDomain(_))
    ));
}

#[test]
fn gram_examples() {
    let s = planar(&[c(0.0, 0.0), c(0.5, 0.0)]);
    let g = KernelExpr::szego().gram(&s).unwrap();
    assert_eq!(g.entries()[(0, 1)], C64::one());
    assert_eq!(g.entries()[(1, 1)], c(4.0 / 3.0, 0.0));
    let r = g.psd_check(1e-10).unwrap();
    assert!(r.is_psd);

    let three = planar(&[c(0.1, 0.2), c(-0.3, 0.0), c(0.0, 0.7)]);
    let ones = KernelExpr::constant(1.0).gram(&three).unwrap();
    assert_eq!(ones.entries(), &CMatrix::from_fn(3, 3, |_, _| C64::one()));
}

#[test]
fn psd_examples() {
    assert!(psd_check(&CMatrix::<f64>::identity(1), 1e-10).unwrap().is_psd);
    let swap = CMatrix::from_fn(2, 2, |i, j| if i == j { C64::zero() } else { C64::one() });
    let r = psd_check(&swap, 1e-10).unwrap();
    assert!(!r.is_psd);
    assert!((r.min_eigenvalue + 1.0).abs() < 1e-12);
    let skew = CMatrix::from_fn(2, 2, |i, j| if i < j { C64::one() } else { C64::zero() });
    assert!(matches!(psd_check(&skew, 1e-10), Err(Error::NotHermitian { .. })));
}

#[test]
fn geom_diverges_is_reported_with_pair() {
    let k = KernelExpr::geom(KernelExpr::constant(1.0));
    let s = planar(&[c(0.0, 0.0), c(0.2, 0.0)]);
    match k.gram(&s) {
        Err(Error::AtPair { source, .. }) => assert!(matches!(*source, Error::GeomDiverges { .. })),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn schur_with_constant_one_is_identity() {
    let s = planar(&[c(0.1, 0.2), c(-0.3, 0.4), c(0.5, -0.1), c(0.0, 0.0), c(-0.6, -0.2)]);
    let k = KernelExpr::szego();
    let one_k = KernelExpr::hadamard(KernelExpr::constant(1.0), k.clone());
    assert_eq!(one_k.gram(&s).unwrap(), k.gram(&s).unwrap());
    assert!(schur_product_check(&k, &k, &s, 1e-10).unwrap().is_psd);
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn cone_property(
        k in disk_kernel(),
        l in disk_kernel(),
        a in 0.01..5.0f64,
        b in 0.01..5.0f64,
        s in disk_sample(0.9, 0.0, 1..=12),
    ) {
        let sum = KernelExpr::sum(vec![KernelExpr::scale(a, k), KernelExpr::scale(b, l)]);
        let r = sum.gram(&s).unwrap().psd_check(1e-10).unwrap();
        prop_assert!(r.is_psd, "{:?}", r);
    }

    #[test]
    fn grams_are_exactly_hermitian(k in disk_kernel(), s in disk_sample(0.9, 0.0, 1..=10)) {
        let g = k.gram(&s).unwrap();
        prop_assert_eq!(g.entries().hermitian_violation(), None);
    }

    #[test]
    fn schur_products_of_kernels_pass(
        k in disk_kernel(),
        l in disk_kernel(),
        s in disk_sample(0.9, 0.0, 1..=10),
    ) {
        let gk = k.gram(&s).unwrap().psd_check(1e-10).unwrap();
        let gl = l.gram(&s).unwrap().psd_check(1e-10).unwrap();
        prop_assume!(gk.is_psd && gl.is_psd);
        prop_assert!(schur_product_check(&k, &l, &s, 1e-10).unwrap().is_psd);
    }

    #[test]
    fn geom_matches_partial_sums(
        k in disk_kernel(),
        s in disk_sample(0.9, 0.0, 1..=6),
    ) {
        let g = k.gram(&s).unwrap().into_entries();
        let top = g.max_abs();
        prop_assume!(top > 0.0);
        // Rescale so that |K| <= 0.9 on the sample.
        let scale = 0.9 / top;
        let scaled = KernelExpr::scale(scale, k);
        let closed = KernelExpr::geom(scaled.clone()).gram(&s).unwrap().into_entries();
        let base = scaled.gram(&s).unwrap().into_entries();
        // 0.9^(N+1) / 0.1 < 1e-10 for N = 240.
        let n = s.len();
        for i in 0..n {
            for j in 0..n {
                let q = base[(i, j)];
                let (mut sum, mut pw) = (C64::zero(), C64::one());
                for _ in 0..=240 {
                    sum += pw;
                    pw *= q;
                }
                prop_assert!((sum - closed[(i, j)]).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn rank_one_grams_have_rank_one(w in moebius(0.9), s in disk_sample(0.9, 0.05, 2..=8)) {
        let g = KernelExpr::rank_one(w).gram(&s).unwrap();
        let ev = multalg::linalg::hermitian_eigenvalues(g.entries()).unwrap();
        let top = ev[ev.len() - 1];
        prop_assert!(ev[..ev.len() - 1].iter().all(|v| v.abs() <= 1e-12 * top));
    }

    #[test]
    fn rank_one_products(w in moebius(0.9), v in moebius(0.9), s in disk_sample(0.9, 0.0, 1..=8)) {
        let prod = KernelExpr::hadamard(KernelExpr::rank_one(w.clone()), KernelExpr::rank_one(v.clone()));
        let joint = KernelExpr::rank_one(ClosedFormFunction::Product { factors: vec![w, v] });
        let (a, b) = (prod.gram(&s).unwrap().into_entries(), joint.gram(&s).unwrap().into_entries());
        for i in 0..s.len() {
            for j in 0..s.len() {
                prop_assert!((a[(i, j)] - b[(i, j)]).norm() <= 1e-13);
            }
        }
    }

    #[test]
    fn psd_agrees_with_minors(entries in prop::collection::vec(-1.0..1.0f64, 16), n in 1usize..=4) {
        // Real symmetric test matrix, pushed towards the PSD boundary half the time.
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                m[i][j] = entries[i * 4 + j];
                m[j][i] = m[i][j];
            }
        }
        if entries[15] > 0.0 {
            let a = m.clone();
            for i in 0..n {
                for j in 0..n {
                    m[i][j] = (0..n).map(|k| a[i][k] * a[j][k]).sum();
                }
            }
        }
        let cm = CMatrix::from_fn(n, n, |i, j| Complex::new(m[i][j], 0.0));
        let r = psd_check(&cm, 1e-10).unwrap();
        // Skip instances whose smallest eigenvalue sits inside the tolerance band,
        // where the two rules may legitimately disagree.
        prop_assume!(r.min_eigenvalue.abs() > 1e-6);
        prop_assert_eq!(r.is_psd, minors_psd(&m, 1e-10));
    }
}
