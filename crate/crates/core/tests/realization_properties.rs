mod common;

use common::config;
use multalg::geometry::MetricSpace;
use multalg::realization::{DenseSequence, ModelSpec, RealizationModel, WeightPolicy, DEFAULT_RANK_TOL};
use multalg::scalar::rational;
use multalg::{BigRational, Complex, Error};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::sample::subsequence;

type Q = BigRational;

/// Distinct grid points `k / 60` in `[0, 1]` with a random enumeration.
fn exact_sequence() -> impl Strategy<Value = DenseSequence<Q>> {
    subsequence((0..=60i64).collect::<Vec<_>>(), 3..=16)
        .prop_flat_map(|ks| {
            let n = ks.len();
            (Just(ks), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        })
        .prop_map(|(ks, order)| {
            let pts: Vec<Q> = ks.iter().map(|&k| rational(k, 60)).collect();
            DenseSequence::new(MetricSpace::from_line(&pts, 0).unwrap(), order).unwrap()
        })
}

fn exact_model() -> impl Strategy<Value = RealizationModel<Q>> {
    exact_sequence().prop_map(|d| {
        let depth = d.order().len() - 1;
        RealizationModel::build(d, depth, WeightPolicy::Default2n, 2.0).unwrap()
    })
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<Complex<Q>>> {
    prop::collection::vec((-500i64..=500, -500i64..=500), len).prop_map(|v| {
        v.into_iter()
            .map(|(a, b)| Complex::new(rational(a, 100), rational(b, 100)))
            .collect()
    })
}

fn quarter_grid() -> DenseSequence<f64> {
    let space = MetricSpace::from_line(&[0.0, 0.25, 0.5, 0.75, 1.0], 0).unwrap();
    DenseSequence::new(space, vec![2, 0, 4, 1, 3]).unwrap()
}

#[test]
fn quarter_grid_by_hand() {
    let m = RealizationModel::build(quarter_grid(), 3, WeightPolicy::Default2n, 2.0).unwrap();
    assert_eq!(m.g()[1].values, vec![0.5, 0.25, 0.0, 0.25, 0.5]);
    assert_eq!(m.b()[1], 1.0);
    assert!(m.very_independence_check().unwrap());
    // Prefix values g_m(y_{n+1}) for y = (1/2, 0, 1, 1/4): lower-triangular with nonzero diagonal.
    let ys = [2, 0, 4, 1];
    let table: Vec<Vec<f64>> = (0..=3)
        .map(|k| ys.iter().map(|&y| m.g()[k].values[y]).collect())
        .collect();
    assert_eq!(
        table,
        vec![
            vec![1.0, 1.0, 1.0, 1.0],
            vec![0.0, 0.5, 0.5, 0.25],
            vec![0.0, 0.0, 0.5, 0.25],
            vec![0.0, 0.0, 0.0, 0.25],
        ]
    );
    let f = m.point_functional(0);
    assert_eq!(&f[..2], &[1.0, 0.5]);
    assert_eq!(m.topology_probe(1, 0.4), Err(Error::PrefixTooShallow));
    let deep = RealizationModel::build(quarter_grid(), 4, WeightPolicy::Default2n, 2.0).unwrap();
    let probe = deep.topology_probe(1, 0.4).unwrap();
    assert_eq!((probe.n, probe.members.clone(), probe.pass), (4, vec![1], true));
    assert_eq!(m.topology_probe(2, 0.3).unwrap().n, 1);
}

#[test]
fn duplicate_enumeration_breaks_independence() {
    let space = MetricSpace::from_line(&[0.0, 0.25, 0.5, 0.75, 1.0], 0).unwrap();
    let bad = DenseSequence::new_unchecked(space.clone(), vec![2, 0, 0, 1, 3]);
    let m = RealizationModel::build(bad, 3, WeightPolicy::Default2n, 2.0).unwrap();
    assert!(!m.very_independence_check().unwrap());
    assert!(matches!(
        DenseSequence::new(space, vec![2, 0, 0, 1, 3]),
        Err(Error::InvalidSequence(_))
    ));
}

#[test]
fn rank_examples() {
    let m = RealizationModel::build(quarter_grid(), 4, WeightPolicy::Default2n, 2.0).unwrap();
    assert_eq!(m.point_eval_rank(&[3], 0, DEFAULT_RANK_TOL, false).unwrap(), 1);
    assert_eq!(m.point_eval_rank(&[0, 3, 4], 4, DEFAULT_RANK_TOL, false).unwrap(), 3);
    assert_eq!(m.point_eval_rank(&[1, 1, 4], 4, DEFAULT_RANK_TOL, true).unwrap(), 2);
    assert!(matches!(
        m.point_eval_rank(&[1, 1], 4, DEFAULT_RANK_TOL, false),
        Err(Error::DuplicatePoint(0, 1))
    ));
}

#[test]
fn depth_and_exhaustion_errors() {
    let err = RealizationModel::build(quarter_grid(), 6, WeightPolicy::Default2n, 2.0).unwrap_err();
    assert!(matches!(err, Error::DepthExceedsSequence { .. }));
    let m = RealizationModel::build(quarter_grid(), 2, WeightPolicy::Default2n, 2.0).unwrap();
    let too_long = vec![Complex::new(1.0, 0.0); 4];
    assert!(matches!(
        m.embed(&too_long),
        Err(Error::CoefficientOverflow { len: 4, max: 3 })
    ));
}

#[test]
fn float_roundtrip_on_small_model() {
    let m = RealizationModel::build(quarter_grid(), 4, WeightPolicy::Default2n, 2.0).unwrap();
    let f = vec![
        Complex::new(0.3, -1.0),
        Complex::new(2.0, 0.5),
        Complex::new(-0.7, 0.0),
        Complex::new(0.0, 1.5),
        Complex::new(1.1, -0.2),
    ];
    let back = m.coefficient_roundtrip(&f).unwrap();
    let scale = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let err = f.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-9 * scale, "{err}");
    let e0 = m.coefficient_roundtrip(&[Complex::new(1.0, 0.0)]).unwrap();
    assert_eq!(e0[0], Complex::new(1.0, 0.0));
    assert!(e0[1..].iter().all(|z| *z == Complex::new(0.0, 0.0)));
}

#[test]
fn model_spec_json() {
    let text = r#"{
        "space": {"labels": ["a", "b", "c"], "dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]], "base": 0},
        "order": [1, 0, 2],
        "depth": 2
    }"#;
    let spec: ModelSpec<f64> = serde_json::from_str(text).unwrap();
    assert_eq!((spec.p, &spec.policy), (2.0, &WeightPolicy::Default2n));
    let m = spec.clone().build().unwrap();
    assert_eq!(m.depth(), 2);
    assert!(m.very_independence_check().unwrap());
    // U_2 = B(a, 2) = {a, b} is already enumerated, so g_2 vanishes there.
    let balls = ModelSpec {
        policy: WeightPolicy::Balls { base: 0 },
        ..spec
    };
    assert_eq!(balls.build().unwrap_err(), Error::ExhaustedSpace(2));
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn g_is_monotone_and_vanishes_on_the_prefix(m in exact_model()) {
        let (zero, one) = (Q::zero(), Q::one());
        let order = m.dense().order();
        for (n, g) in m.g().iter().enumerate() {
            for (x, v) in g.values.iter().enumerate() {
                prop_assert!(*v >= zero && *v <= one);
                if n + 1 < m.g().len() {
                    prop_assert!(m.g()[n + 1].values[x] <= *v);
                }
                prop_assert_eq!(v.is_zero(), order[..n].contains(&x));
            }
            prop_assert!(m.space().dil(g).unwrap() <= one);
        }
    }

    #[test]
    fn weights_are_summable(m in exact_model()) {
        prop_assert!(m.weighted_sup_sum() <= Q::from_integer(2.into()));
        let mut pow = Q::one();
        for b in m.b() {
            prop_assert!(*b <= pow);
            pow *= Q::from_integer(2.into());
        }
    }

    #[test]
    fn embedding_is_linear_and_dual(m in exact_model(), f in coeffs(16), g in coeffs(16), x in 0usize..16) {
        let n = m.depth() + 1;
        let (f, g) = (&f[..n], &g[..n]);
        let sum: Vec<_> = f.iter().zip(g).map(|(a, b)| a + b).collect();
        let (jf, jg, js) = (m.embed(f).unwrap(), m.embed(g).unwrap(), m.embed(&sum).unwrap());
        for i in 0..m.space().len() {
            prop_assert_eq!(&js.values[i], &(&jf.values[i] + &jg.values[i]));
        }
        let x = x % m.space().len();
        prop_assert_eq!(&jf.values[x], &m.pair(f, &m.point_functional(x)));
    }

    #[test]
    fn truncation_tail_is_geometric(m in exact_model(), f in coeffs(16), cut in 0usize..15) {
        let n = m.depth() + 1;
        let f = &f[..n];
        let cut = cut % n;
        let full = m.embed(f).unwrap();
        let head = m.embed(&f[..=cut]).unwrap();
        let top = f.iter().fold(Q::zero(), |a, z| a.max(z.re.abs()).max(z.im.abs()));
        let bound = top * Q::new(2.into(), num_bigint::BigInt::from(2u32).pow(cut as u32));
        for (a, b) in full.values.iter().zip(&head.values) {
            prop_assert!((&a.re - &b.re).abs() <= bound && (&a.im - &b.im).abs() <= bound);
        }
    }

    #[test]
    fn coefficients_round_trip_exactly(m in exact_model(), f in coeffs(16)) {
        prop_assert!(m.very_independence_check().unwrap());
        let f = &f[..m.depth() + 1];
        prop_assert_eq!(m.coefficient_roundtrip(f).unwrap(), f.to_vec());
    }

    #[test]
    fn point_evaluations_are_independent(m in exact_model(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..=10)) {
        let n = m.space().len();
        let mut pts: Vec<usize> = picks.iter().map(|i| i.index(n)).collect();
        pts.sort_unstable();
        pts.dedup();
        prop_assert_eq!(m.point_eval_rank(&pts, m.depth(), DEFAULT_RANK_TOL, false).unwrap(), pts.len());
    }

    #[test]
    fn topology_probe_passes(m in exact_model(), x in 0usize..16, eps in 5i64..95) {
        let x = x % m.space().len();
        match m.topology_probe(x, rational(eps, 100)) {
            Ok(p) => prop_assert!(p.pass, "{:?}", p),
            Err(e) => prop_assert_eq!(e, Error::PrefixTooShallow),
        }
    }

    #[test]
    fn ball_policy_weights_are_smaller(d in exact_sequence()) {
        let depth = d.order().len() - 1;
        let base = d.space().base();
        let all = RealizationModel::build(d.clone(), depth, WeightPolicy::Default2n, 2.0).unwrap();
        match RealizationModel::build(d, depth, WeightPolicy::Balls { base }, 2.0) {
            Ok(balls) => {
                for (a, b) in balls.b().iter().zip(all.b()) {
                    prop_assert!(a <= b);
                }
            }
            Err(e) => prop_assert!(matches!(e, Error::ExhaustedSpace(_)), "{e}"),
        }
    }
}
