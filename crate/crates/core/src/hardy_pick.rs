//! Hardy-space machinery: Toeplitz multiplication matrices on Taylor
//! coefficients, detection of multiplication operators through their action
//! on kernel vectors, Pick interpolation, Carleson sequences and the
//! indicator-pattern probe behind non-separability, and the exact
//! multiplier test on `span{e^z, z, z^2, ...}`.

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{psd_check, EuclideanPointSet, KernelExpr, PsdReport};
use crate::linalg::CMatrix;
use crate::multipliers::{min_domination_scale, NormMethod};
use crate::scalar::{Field, Real};

/// Polynomial `sum_n a_n z^n` of degree at most `N`, as an element of the
/// monomial basis of `H^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyTruncation<S> {
    pub coeffs: Vec<S>,
}

impl<S: Clone + Num> PolyTruncation<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        PolyTruncation { coeffs }
    }

    /// Index of the last nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return PolyTruncation::new(Vec::new());
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        PolyTruncation::new(out)
    }
}

/// Matrix of `f -> w f` from polynomials of degree `<= n` to polynomials of
/// degree `<= n + deg w`, in monomial bases: entry `(i, j)` is `w_{i-j}`.
pub fn toeplitz_mo<S: Clone + Num>(w: &[S], n: usize) -> Vec<Vec<S>> {
    let deg = PolyTruncation::new(w.to_vec()).degree();
    let rows = n + 1 + deg;
    (0..rows)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    if i >= j && i - j <= deg && i - j < w.len() {
                        w[i - j].clone()
                    } else {
                        S::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Square compression of [`toeplitz_mo`] to degree `<= n`: the product is
/// truncated, dropping coefficients of degree above `n`.
pub fn compressed_toeplitz<T: Real>(w: &[Complex<T>], n: usize) -> CMatrix<T> {
    let full = toeplitz_mo(w, n);
    CMatrix::from_fn(n + 1, n + 1, |i, j| full[i][j])
}

/// Tests whether `T` acts as a multiplication operator on the degree `<= N`
/// truncation of `H^2`: for each sample point `x`, `T* k_x` must be parallel
/// to the kernel vector `k_x = (1, conj(x), ..., conj(x)^N)` up to relative
/// residual `tol`. Returns the recovered symbol values `w(x) = conj(mu_x)`,
/// or `None` as soon as some point fails.
pub fn detect_mo<T: Real>(t: &CMatrix<T>, s: &EuclideanPointSet<T>, tol: T) -> Result<Option<Vec<Complex<T>>>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if !t.is_square() {
        return Err(Error::DimensionMismatch {
            expected: t.rows(),
            found: t.cols(),
        });
    }
    if s.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: s.dim(),
        });
    }
    if s.len() < 2 {
        return Err(Error::InvalidInput("detection needs at least two sample points".into()));
    }
    let adj = t.adjoint();
    let n = t.rows();
    let mut symbol = Vec::with_capacity(s.len());
    for p in s.points() {
        let x = p[0];
        if !(x.norm() < T::one()) {
            return Err(Error::NotInDisk);
        }
        let mut k = Vec::with_capacity(n);
        let mut pw = Complex::<T>::one();
        for _ in 0..n {
            k.push(pw);
            pw = pw * x.conj();
        }
        let tk = adj.mul_vec(&k)?;
        let kk = k.iter().fold(T::zero(), |a, v| a + v.norm_sqr());
        let mu = k
            .iter()
            .zip(&tk)
            .fold(Complex::zero(), |a, (kv, tv)| a + kv.conj() * tv)
            / kk;
        let residual = tk
            .iter()
            .zip(&k)
            .fold(T::zero(), |a, (tv, kv)| a + (tv - mu * kv).norm_sqr())
            .sqrt();
        let scale = kk.sqrt().max(tk.iter().fold(T::zero(), |a, v| a + v.norm_sqr()).sqrt());
        if residual > tol * scale {
            return Ok(None);
        }
        symbol.push(mu.conj());
    }
    Ok(Some(symbol))
}

/// Interpolation data in the open disk with a norm bound `t`.
///
/// JSON form: `{"nodes": [[re, im], ...], "values": [[re, im], ...], "t": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPick<T>", bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct PickProblem<T> {
    nodes: Vec<Complex<T>>,
    values: Vec<Complex<T>>,
    t: T,
}

#[derive(Deserialize)]
struct RawPick<T> {
    nodes: Vec<Complex<T>>,
    values: Vec<Complex<T>>,
    t: Option<T>,
}

impl<T: Real> TryFrom<RawPick<T>> for PickProblem<T> {
    type Error = Error;
    fn try_from(raw: RawPick<T>) -> Result<Self> {
        PickProblem::new(raw.nodes, raw.values, raw.t.unwrap_or_else(T::one))
    }
}

impl<T: Real> PickProblem<T> {
    pub fn new(nodes: Vec<Complex<T>>, values: Vec<Complex<T>>, t: T) -> Result<Self> {
        validate_nodes(&nodes, &values)?;
        if !(t >= T::zero()) {
            return Err(Error::InvalidInput("bound t must be nonnegative".into()));
        }
        Ok(PickProblem { nodes, values, t })
    }

    pub fn nodes(&self) -> &[Complex<T>] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn with_bound(&self, t: T) -> Result<Self> {
        PickProblem::new(self.nodes.clone(), self.values.clone(), t)
    }

    /// `[(t^2 - w_i conj(w_j)) / (1 - y_i conj(y_j))]`.
    pub fn pick_matrix(&self) -> CMatrix<T> {
        let n = self.nodes.len();
        let t2 = Complex::new(self.t * self.t, T::zero());
        let m = CMatrix::from_fn(n, n, |i, j| {
            (t2 - self.values[i] * self.values[j].conj()) / (Complex::<T>::one() - self.nodes[i] * self.nodes[j].conj())
        });
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(m[(i, i)].re, T::zero())
            } else if i < j {
                m[(i, j)]
            } else {
                m[(j, i)].conj()
            }
        })
    }
}

fn validate_nodes<T: Real>(nodes: &[Complex<T>], values: &[Complex<T>]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::EmptySet);
    }
    if nodes.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            found: values.len(),
        });
    }
    if nodes.iter().any(|z| !(z.norm() < T::one())) {
        return Err(Error::NotInDisk);
    }
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i] == nodes[j] {
                return Err(Error::DuplicatePoint(i, j));
            }
        }
    }
    Ok(())
}

/// PSD verdict on the Pick matrix.
pub fn pick_feasible<T: Real>(p: &PickProblem<T>, tol: T) -> Result<PsdReport<T>> {
    psd_check(&p.pick_matrix(), tol)
}

/// Smallest `t` for which the Pick matrix is PSD, i.e. the least norm of a
/// bounded analytic interpolant, found by bisection from `max |w_i|`.
pub fn pick_min_norm<T: Real>(nodes: &[Complex<T>], values: &[Complex<T>], tol: T) -> Result<T> {
    validate_nodes(nodes, values)?;
    let s = EuclideanPointSet::planar(nodes.to_vec())?;
    let g = KernelExpr::szego().gram(&s)?.into_entries();
    let a = g.diag_congruence(values);
    let n = a.rows();
    let a = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(a[(i, i)].re, T::zero())
        } else if i < j {
            a[(i, j)]
        } else {
            a[(j, i)].conj()
        }
    });
    let lower = values.iter().fold(T::zero(), |m, w| m.max(w.norm()));
    Ok(min_domination_scale(&a, &g, NormMethod::Bisection, tol, lower)?.0)
}

/// Positive points with `1 - y_{k+1} = (1 - y_k) / 2`, starting after `start`.
pub fn carleson_seq<T: Field>(start: T, m: usize) -> Result<Vec<T>> {
    if !(start >= T::zero() && start < T::one()) {
        return Err(Error::NotInDisk);
    }
    if m == 0 {
        return Err(Error::InvalidInput("sequence length must be positive".into()));
    }
    let two = T::one() + T::one();
    let mut y = start;
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        y = T::one() - (T::one() - y) / two.clone();
        out.push(y.clone());
    }
    Ok(out)
}

pub const MAX_PATTERN_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternNorm<T> {
    /// Bit `k` set means the target at node `k` is 1.
    pub pattern: u32,
    pub min_norm: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparabilityReport<T> {
    pub nodes: Vec<T>,
    pub patterns: Vec<PatternNorm<T>>,
    /// Largest minimal interpolation norm over all indicator patterns.
    pub max_min_norm: T,
    /// Smallest sup-distance on the nodes between distinct patterns.
    pub min_pairwise_gap: T,
}

/// Interpolates every 0/1 pattern on the first `m` points of the Carleson
/// sequence and reports the uniform norm bound together with the mutual
/// separation of the targets.
pub fn separability_probe<T: Real>(m: usize, start: T, tol: T) -> Result<SeparabilityReport<T>> {
    if m > MAX_PATTERN_LEN {
        return Err(Error::PatternBudgetExceeded(m));
    }
    let nodes = carleson_seq(start, m)?;
    let cnodes: Vec<Complex<T>> = nodes.iter().map(|&y| Complex::new(y, T::zero())).collect();
    let targets = |pattern: u32| -> Vec<T> {
        (0..m)
            .map(|k| if pattern >> k & 1 == 1 { T::one() } else { T::zero() })
            .collect()
    };
    let mut patterns = Vec::with_capacity(1 << m);
    for pattern in 0..(1u32 << m) {
        let values: Vec<Complex<T>> = targets(pattern)
            .into_iter()
            .map(|v| Complex::new(v, T::zero()))
            .collect();
        let min_norm = pick_min_norm(&cnodes, &values, tol)?;
        patterns.push(PatternNorm { pattern, min_norm });
    }
    let max_min_norm = patterns.iter().fold(T::zero(), |a, p| a.max(p.min_norm));
    let all: Vec<Vec<T>> = (0..(1u32 << m)).map(targets).collect();
    let mut min_pairwise_gap = T::infinity();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let gap = all[i]
                .iter()
                .zip(&all[j])
                .fold(T::zero(), |a, (u, v)| a.max((*u - *v).abs()));
            min_pairwise_gap = min_pairwise_gap.min(gap);
        }
    }
    Ok(SeparabilityReport {
        nodes,
        patterns,
        max_min_norm,
        min_pairwise_gap,
    })
}

/// Element `c(z) e^z + r(z)` with polynomial `c` and `r`. Since `e^z` is not
/// rational the representation is unique, so membership in
/// `span{e^z, z, z^2, ...}` is decided exactly on coefficients: `c` must be
/// constant and `r(0)` must vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolySpan<S> {
    pub exp_coeff: PolyTruncation<S>,
    pub poly: PolyTruncation<S>,
}

impl<S: Clone + Num> ExpPolySpan<S> {
    /// `p_0 = e^z`.
    pub fn exp() -> Self {
        ExpPolySpan {
            exp_coeff: PolyTruncation::new(vec![S::one()]),
            poly: PolyTruncation::new(Vec::new()),
        }
    }

    /// `p_n = z^n`, `n >= 1`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![S::zero(); n + 1];
        c[n] = S::one();
        ExpPolySpan {
            exp_coeff: PolyTruncation::new(Vec::new()),
            poly: PolyTruncation::new(c),
        }
    }

    pub fn times_poly(&self, w: &PolyTruncation<S>) -> Self {
        ExpPolySpan {
            exp_coeff: self.exp_coeff.mul(w),
            poly: self.poly.mul(w),
        }
    }

    pub fn in_span(&self) -> bool {
        let exp_constant = self.exp_coeff.coeffs.iter().skip(1).all(Zero::is_zero);
        let no_constant_term = self.poly.coeffs.first().is_none_or(Zero::is_zero);
        exp_constant && no_constant_term
    }
}

/// Exact decision whether the polynomial `w` maps `z` and `e^z` back into
/// `span{e^z, z, z^2, ...}`; true exactly for constants.
pub fn ardy_multiplier_check<S: Clone + Num>(w: &[S]) -> bool {
    let w = PolyTruncation::new(w.to_vec());
    let on_p1 = ExpPolySpan::<S>::monomial(1).times_poly(&w).in_span();
    let on_p0 = ExpPolySpan::<S>::exp().times_poly(&w).in_span();
    on_p1 && on_p0
}
