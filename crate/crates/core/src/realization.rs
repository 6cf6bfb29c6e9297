//! Realization of a sequence-space model as a space of Lipschitz functions
//! over a finite metric space.
//!
//! Given an enumeration `y_1, y_2, ...` of the points, the functions
//! `g_0 = 1` and `g_n = min(rho(., {y_1..y_n}), 1)` are decreasing,
//! 1-Lipschitz and satisfy the triangular pattern `g_m(y_{n+1}) = 0` for
//! `m > n` with `g_n(y_{n+1}) != 0`. The embedding `J f = sum f_n / b_n g_n`
//! is therefore injective and its coefficients can be recovered by forward
//! substitution from the values at the prefix.
//!
//! Everything here is generic over [`Field`], so the same code runs in `f64`
//! and in exact rational arithmetic.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{MetricSpace, SampledFunction};
use crate::linalg::singular_values;
use crate::scalar::Field;

/// Pivot magnitude below which coefficient recovery is refused.
pub const MIN_PIVOT: f64 = 1e-14;
/// Default relative threshold for the numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Enumeration of every point of a finite metric space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseSequence<T> {
    space: MetricSpace<T>,
    order: Vec<usize>,
}

impl<T: Field> DenseSequence<T> {
    /// `order` must list every point exactly once.
    pub fn new(space: MetricSpace<T>, order: Vec<usize>) -> Result<Self> {
        let n = space.len();
        if order.len() != n {
            return Err(Error::InvalidSequence(format!(
                "order has {} entries for {} points",
                order.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &i in &order {
            space.check_index(i)?;
            if seen[i] {
                return Err(Error::InvalidSequence(format!("point {i} repeated")));
            }
            seen[i] = true;
        }
        Ok(DenseSequence { space, order })
    }

    /// The natural order `0, 1, ..., n-1`.
    pub fn natural(space: MetricSpace<T>) -> Self {
        let order = (0..space.len()).collect();
        DenseSequence { space, order }
    }

    /// Accepts any index list, including repetitions. Only meant for probing
    /// how the verification routines react to corrupted enumerations.
    pub fn new_unchecked(space: MetricSpace<T>, order: Vec<usize>) -> Self {
        DenseSequence { space, order }
    }

    pub fn space(&self) -> &MetricSpace<T> {
        &self.space
    }

    /// Point indices `y_1, y_2, ...` (stored zero-based: `order[k-1] = y_k`).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Index of `y_k`, `k >= 1`.
    pub fn y(&self, k: usize) -> usize {
        self.order[k - 1]
    }
}

/// The functions `g_0 .. g_depth` on the space.
pub fn build_g<T: Field>(dense: &DenseSequence<T>, depth: usize) -> Result<Vec<SampledFunction<T>>> {
    if depth > dense.order.len() {
        return Err(Error::DepthExceedsSequence {
            depth,
            available: dense.order.len(),
        });
    }
    let space = &dense.space;
    let n = space.len();
    let mut out = Vec::with_capacity(depth + 1);
    out.push(SampledFunction::new(vec![T::one(); n]));
    for k in 1..=depth {
        let prefix = &dense.order[..k];
        let values = (0..n)
            .map(|x| Ok(space.set_distance(x, prefix)?.min_of(T::one())))
            .collect::<Result<Vec<T>>>()?;
        out.push(SampledFunction::new(values));
    }
    Ok(out)
}

/// How the sets `U_n` bounding `g_n` are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightPolicy {
    /// `U_n` is the whole space, so `b_n = 2^n sup |g_n|`.
    #[serde(rename = "default_2n")]
    Default2n,
    /// `U_n = B(base, max(n, 1))`, so `b_n = 2^n sup_{U_n} |g_n|`.
    Balls { base: usize },
}

/// Weights `b_n = 2^n ||g_n||_{U_n}` under the given policy.
pub fn choose_b<T: Field>(space: &MetricSpace<T>, g: &[SampledFunction<T>], policy: &WeightPolicy) -> Result<Vec<T>> {
    let two = T::one() + T::one();
    let mut pow = T::one();
    let mut out = Vec::with_capacity(g.len());
    for (n, gn) in g.iter().enumerate() {
        let sup = match policy {
            WeightPolicy::Default2n => gn.sup_abs(),
            WeightPolicy::Balls { base } => {
                space.check_index(*base)?;
                let radius = T::from_usize(n.max(1)).unwrap_or_else(T::one);
                (0..space.len())
                    .filter(|&x| space.dist(x, *base) < radius)
                    .fold(T::zero(), |m, x| m.max_of(gn.values[x].abs_val()))
            }
        };
        if sup == T::zero() {
            return Err(Error::ExhaustedSpace(n));
        }
        out.push(pow.clone() * sup);
        pow = pow * two.clone();
    }
    Ok(out)
}

/// JSON form: `{"space": <metric-space>, "order": [..], "depth": N,
/// "policy": "default_2n" | {"balls": {"base": i}}, "p": 2}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(bound(deserialize = "T: Field + Deserialize<'de>"))]
pub struct ModelSpec<T> {
    pub space: MetricSpace<T>,
    pub order: Vec<usize>,
    pub depth: usize,
    #[serde(default = "default_policy")]
    pub policy: WeightPolicy,
    #[serde(default = "default_p")]
    pub p: f64,
}

fn default_policy() -> WeightPolicy {
    WeightPolicy::Default2n
}

fn default_p() -> f64 {
    2.0
}

impl<T: Field> ModelSpec<T> {
    pub fn build(self) -> Result<RealizationModel<T>> {
        let dense = DenseSequence::new(self.space, self.order)?;
        RealizationModel::build(dense, self.depth, self.policy, self.p)
    }
}

/// The function system, weights and sequence-space exponent of a
/// realization. Coefficient functionals are the coordinate functionals of
/// the `l^p` model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationModel<T> {
    dense: DenseSequence<T>,
    depth: usize,
    g: Vec<SampledFunction<T>>,
    b: Vec<T>,
    policy: WeightPolicy,
    p: f64,
}

impl<T: Field> RealizationModel<T> {
    pub fn build(dense: DenseSequence<T>, depth: usize, policy: WeightPolicy, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidInput(
                "sequence-space exponent must lie in [1, inf)".into(),
            ));
        }
        let g = build_g(&dense, depth)?;
        let b = choose_b(&dense.space, &g, &policy)?;
        Ok(RealizationModel {
            dense,
            depth,
            g,
            b,
            policy,
            p,
        })
    }

    pub fn dense(&self) -> &DenseSequence<T> {
        &self.dense
    }

    pub fn space(&self) -> &MetricSpace<T> {
        &self.dense.space
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn g(&self) -> &[SampledFunction<T>] {
        &self.g
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `sum_n sup|g_n| / b_n`, at most 2 under the default policy.
    pub fn weighted_sup_sum(&self) -> T {
        self.g
            .iter()
            .zip(&self.b)
            .fold(T::zero(), |s, (gn, bn)| s + gn.sup_abs() / bn.clone())
    }

    /// `J f = sum_n f_n / b_n g_n`.
    pub fn embed(&self, coeffs: &[Complex<T>]) -> Result<SampledFunction<Complex<T>>> {
        if coeffs.len() > self.depth + 1 {
            return Err(Error::CoefficientOverflow {
                len: coeffs.len(),
                max: self.depth + 1,
            });
        }
        let n = self.space().len();
        let values = (0..n).map(|x| self.pair(coeffs, &self.point_functional(x))).collect();
        Ok(SampledFunction::new(values))
    }

    /// Coefficients `(g_n(x) / b_n)_{n <= depth}` of the point evaluation at
    /// `x` in the dual coordinate basis.
    pub fn point_functional(&self, x: usize) -> Vec<T> {
        self.g
            .iter()
            .zip(&self.b)
            .map(|(gn, bn)| gn.values[x].clone() / bn.clone())
            .collect()
    }

    /// Pairing `sum_n f_n c_n` of a coefficient list with a functional.
    pub fn pair(&self, coeffs: &[Complex<T>], functional: &[T]) -> Complex<T> {
        coeffs
            .iter()
            .zip(functional)
            .fold(Complex::zero(), |s, (f, c)| s + f.clone() * c.clone())
    }

    /// Checks the triangular pattern behind linear independence:
    /// `g_m(y_{n+1}) = 0` for `m > n` and `g_n(y_{n+1}) != 0`, for `n <= depth`.
    pub fn very_independence_check(&self) -> Result<bool> {
        let needed = self.depth + 1;
        if self.dense.order.len() < needed {
            return Err(Error::DepthExceedsSequence {
                depth: self.depth,
                available: self.dense.order.len(),
            });
        }
        for n in 0..=self.depth {
            let y = self.dense.y(n + 1);
            if self.g[n].values[y] == T::zero() {
                return Ok(false);
            }
            if (n + 1..=self.depth).any(|m| self.g[m].values[y] != T::zero()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Numerical rank of `[g_m(x_i)]_{m <= depth, i}`: singular values above
    /// `tol * sigma_max` count. Repeated points are an error unless
    /// `allow_duplicates` is set.
    pub fn point_eval_rank(&self, points: &[usize], depth: usize, tol: f64, allow_duplicates: bool) -> Result<usize> {
        if depth > self.depth {
            return Err(Error::DepthExceedsSequence {
                depth,
                available: self.depth,
            });
        }
        for &p in points {
            self.space().check_index(p)?;
        }
        if !allow_duplicates {
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    if points[i] == points[j] {
                        return Err(Error::DuplicatePoint(i, j));
                    }
                }
            }
        }
        if points.is_empty() {
            return Ok(0);
        }
        let rows = depth + 1;
        let cols = points.len();
        let mut a = Vec::with_capacity(rows * cols);
        for m in 0..rows {
            for &x in points {
                a.push(self.g[m].values[x].to_f64_lossy());
            }
        }
        let sv = singular_values(a, rows, cols)?;
        let top = sv.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return Ok(0);
        }
        Ok(sv.iter().filter(|&&s| s > tol * top).count())
    }

    /// Open set of the topology generated by the model around `x`:
    /// with `n` minimal such that `rho(x, y_n) < eps/2`,
    /// `U = {z : g_{n-1}(z) > g_n(z) < eps/2}`; passes iff `x in U` and
    /// `U` lies inside the ball `B(x, eps)`.
    pub fn topology_probe(&self, x: usize, eps: T) -> Result<TopologyProbe> {
        self.space().check_index(x)?;
        if !(eps > T::zero() && eps < T::one()) {
            return Err(Error::InvalidInput("eps must lie in (0, 1)".into()));
        }
        let half = eps.clone() / (T::one() + T::one());
        let space = self.space();
        let n = (1..=self.depth.min(self.dense.order.len()))
            .find(|&k| space.dist(x, self.dense.y(k)) < half)
            .ok_or(Error::PrefixTooShallow)?;
        let members: Vec<usize> = (0..space.len())
            .filter(|&z| {
                let (prev, cur) = (&self.g[n - 1].values[z], &self.g[n].values[z]);
                prev > cur && *cur < half
            })
            .collect();
        let pass = members.contains(&x) && members.iter().all(|&z| space.dist(x, z) < eps);
        Ok(TopologyProbe { n, members, pass })
    }

    /// Values `(J f)(y_1) .. (J f)(y_{depth+1})` used for recovery.
    pub fn prefix_values(&self, coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let jf = self.embed(coeffs)?;
        self.require_prefix()?;
        Ok((1..=self.depth + 1)
            .map(|k| jf.values[self.dense.y(k)].clone())
            .collect())
    }

    fn require_prefix(&self) -> Result<()> {
        if self.dense.order.len() < self.depth + 1 {
            return Err(Error::DepthExceedsSequence {
                depth: self.depth,
                available: self.dense.order.len(),
            });
        }
        Ok(())
    }

    /// Recovers coefficients from the values at `y_1 .. y_{depth+1}` by
    /// forward substitution through the triangular pattern.
    pub fn recover_coefficients(&self, values: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.require_prefix()?;
        if values.len() != self.depth + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.depth + 1,
                found: values.len(),
            });
        }
        let min_pivot = T::lit(MIN_PIVOT);
        let mut f: Vec<Complex<T>> = Vec::with_capacity(self.depth + 1);
        for n in 0..=self.depth {
            let y = self.dense.y(n + 1);
            let pivot = self.g[n].values[y].clone();
            if pivot.abs_val() < min_pivot {
                return Err(Error::IllConditionedPrefix(n));
            }
            let known = (0..n).fold(Complex::zero(), |s: Complex<T>, m| {
                s + f[m].clone() * (self.g[m].values[y].clone() / self.b[m].clone())
            });
            let scale = self.b[n].clone() / pivot;
            f.push((values[n].clone() - known) * scale);
        }
        Ok(f)
    }

    /// Embed, sample at the prefix, recover. Coefficient lists shorter than
    /// `depth + 1` are zero-padded in the result.
    pub fn coefficient_roundtrip(&self, coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let values = self.prefix_values(coeffs)?;
        self.recover_coefficients(&values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyProbe {
    /// Minimal `n` with `rho(x, y_n) < eps/2`.
    pub n: usize,
    /// Sample points of `U`.
    pub members: Vec<usize>,
    pub pass: bool,
}
