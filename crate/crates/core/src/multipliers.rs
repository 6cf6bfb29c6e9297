//! Sampled multiplier norms.
//!
//! For kernels `K_F`, `K_E` and a symbol `w`, the multiplication operator
//! `M_w : H(K_F) -> H(K_E)` has norm at most `t` exactly when
//! `t^2 K_E - (w (x) conj(w)) K_F` is a kernel. Restricting that condition to
//! a finite sample gives a lower estimate of the true norm, which is what
//! every routine here computes.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{psd_check, ClosedFormFunction, EuclideanPointSet, KernelExpr, PsdReport};
use crate::linalg::{cholesky, forward_substitute, hermitian_eigenvalues, CMatrix};
use crate::scalar::Real;

/// Relative condition number beyond which a Gram matrix counts as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e12;
/// Bracket growth limit for the bisection method.
pub const MAX_BRACKET: f64 = 1e12;
/// Relative slack (in units of `t^2 lambda_min(G_E)`) granted to the PSD
/// predicate inside the bisection.
const BISECTION_SLACK: f64 = 1e-12;

pub const SAMPLED_SEMANTICS: &str = "finite-sample lower estimate";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// Largest eigenvalue of the pencil `(D G_F D*, G_E)` after Cholesky
    /// whitening of `G_E`.
    Pencil,
    /// Bracket-and-bisect on the PSD verdict of `t^2 G_E - D G_F D*`.
    Bisection,
}

impl std::str::FromStr for NormMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pencil" => Ok(NormMethod::Pencil),
            "bisection" => Ok(NormMethod::Bisection),
            other => Err(Error::InvalidInput(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultNormReport<T: Real> {
    pub sample: EuclideanPointSet<T>,
    pub symbol: ClosedFormFunction<T>,
    /// `max_S |w|`.
    pub lower_bound_sup: T,
    /// `max_S |w(x)| sqrt(K_F(x,x) / K_E(x,x))`.
    pub diagonal_bound: T,
    pub sampled_norm: T,
    /// Width of the final bracket; zero for the pencil method.
    pub bisection_interval_width: T,
    pub method: NormMethod,
    pub tolerance: T,
    pub semantics: &'static str,
}

/// Smallest `t >= 0` with `t^2 G - A` positive semidefinite, for Hermitian
/// `A` and positive definite `G`. Returns the estimate and the final bracket
/// width. `lower` must be a valid lower bound on the answer.
pub fn min_domination_scale<T: Real>(
    a: &CMatrix<T>,
    g: &CMatrix<T>,
    method: NormMethod,
    tol: T,
    lower: T,
) -> Result<(T, T)> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if a.rows() != g.rows() || !a.is_square() || !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            found: a.rows(),
        });
    }
    if g.rows() == 0 {
        return Ok((T::zero(), T::zero()));
    }
    let g_ev = hermitian_eigenvalues(g)?;
    let (g_min, g_max) = (g_ev[0], g_ev[g_ev.len() - 1]);
    if !(g_min > T::zero()) || g_max / g_min > T::lit(MAX_GRAM_CONDITION) {
        return Err(Error::DegenerateGram {
            condition: if g_min > T::zero() {
                (g_max / g_min).to_f64_lossy()
            } else {
                f64::INFINITY
            },
        });
    }
    match method {
        NormMethod::Pencil => {
            let l = cholesky(g).ok_or(Error::DegenerateGram {
                condition: f64::INFINITY,
            })?;
            // C = L^{-1} A L^{-*}, symmetrized to absorb rounding.
            let y = forward_substitute(&l, a);
            let c = forward_substitute(&l, &y.adjoint());
            let c = CMatrix::from_fn(c.rows(), c.cols(), |i, j| (c[(i, j)] + c[(j, i)].conj()) * T::lit(0.5));
            let ev = hermitian_eigenvalues(&c)?;
            let top = ev[ev.len() - 1].max(T::zero());
            Ok((top.sqrt(), T::zero()))
        }
        NormMethod::Bisection => {
            let feasible = |t: T| -> Result<bool> {
                let m = g.scale(t * t).sub(a)?;
                let m = CMatrix::from_fn(
                    m.rows(),
                    m.cols(),
                    |i, j| {
                        if i <= j {
                            m[(i, j)]
                        } else {
                            m[(j, i)].conj()
                        }
                    },
                );
                let ev = hermitian_eigenvalues(&m)?;
                Ok(ev[0] >= -T::lit(BISECTION_SLACK) * t * t * g_min)
            };
            let mut lo = lower.max(T::zero());
            if feasible(lo)? {
                return Ok((lo, T::zero()));
            }
            let mut hi = if lo > T::zero() { lo + lo } else { T::one() };
            while !feasible(hi)? {
                lo = hi;
                hi = hi + hi;
                if hi > T::lit(MAX_BRACKET) {
                    return Err(Error::Unbounded { limit: MAX_BRACKET });
                }
            }
            while hi - lo > tol {
                let mid = (lo + hi) * T::lit(0.5);
                if mid <= lo || mid >= hi {
                    break;
                }
                if feasible(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok((hi, hi - lo))
        }
    }
}

/// PSD verdict on `[(1 - w(x_i) conj(w(x_j))) K(x_i, x_j)]`, a necessary
/// condition for `||M_w|| <= 1` on `H(K)`.
pub fn contraction_check<T: Real>(
    k: &KernelExpr<T>,
    w: &ClosedFormFunction<T>,
    s: &EuclideanPointSet<T>,
    tol: T,
) -> Result<PsdReport<T>> {
    w.validate()?;
    let g = k.gram(s)?.into_entries();
    let vals = w.eval_on(s)?;
    let n = s.len();
    let m = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new((T::one() - vals[i].norm_sqr()) * g[(i, i)].re, T::zero())
        } else {
            (Complex::<T>::one() - vals[i] * vals[j].conj()) * g[(i, j)]
        }
    });
    // Restore exact Hermitian symmetry lost to independent rounding.
    let m = CMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)].conj() });
    psd_check(&m, tol)
}

/// Sampled norm of `M_w : H(K_F) -> H(K_E)` on `s`.
pub fn sampled_mult_norm<T: Real>(
    k_f: &KernelExpr<T>,
    k_e: &KernelExpr<T>,
    w: &ClosedFormFunction<T>,
    s: &EuclideanPointSet<T>,
    method: NormMethod,
    tol: T,
) -> Result<MultNormReport<T>> {
    w.validate()?;
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s.point(i) == s.point(j) {
                return Err(Error::DuplicatePoint(i, j));
            }
        }
    }
    let g_f = k_f.gram(s)?.into_entries();
    let g_e = k_e.gram(s)?.into_entries();
    let vals = w.eval_on(s)?;
    let a = g_f.diag_congruence(&vals);
    let a = CMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        if i == j {
            Complex::new(a[(i, i)].re, T::zero())
        } else if i < j {
            a[(i, j)]
        } else {
            a[(j, i)].conj()
        }
    });
    let lower_bound_sup = vals.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let mut diagonal_bound = T::zero();
    for (i, v) in vals.iter().enumerate() {
        let (f, e) = (g_f[(i, i)].re, g_e[(i, i)].re);
        if e > T::zero() {
            diagonal_bound = diagonal_bound.max(v.norm() * (f / e).sqrt());
        }
    }
    let (sampled_norm, width) = min_domination_scale(&a, &g_e, method, tol, diagonal_bound)?;
    Ok(MultNormReport {
        sample: s.clone(),
        symbol: w.clone(),
        lower_bound_sup,
        diagonal_bound,
        sampled_norm,
        bisection_interval_width: width,
        method,
        tolerance: tol,
        semantics: SAMPLED_SEMANTICS,
    })
}

/// Both sides of the embedding `Mult(H_K) -> Mult(H_{KL})` on a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KlReport<T> {
    pub on_k: PsdReport<T>,
    pub on_kl: PsdReport<T>,
    /// `on_k.is_psd` implies `on_kl.is_psd`.
    pub holds: bool,
}

pub fn kl_monotonicity_report<T: Real>(
    k: &KernelExpr<T>,
    l: &KernelExpr<T>,
    w: &ClosedFormFunction<T>,
    s: &EuclideanPointSet<T>,
    tol: T,
) -> Result<KlReport<T>> {
    let on_k = contraction_check(k, w, s, tol)?;
    let kl = KernelExpr::hadamard(k.clone(), l.clone());
    let on_kl = contraction_check(&kl, w, s, tol)?;
    Ok(KlReport {
        on_k,
        on_kl,
        holds: !on_k.is_psd || on_kl.is_psd,
    })
}

/// True iff a contraction on `H(K)` is also one on `H(KL)` over the sample.
pub fn kl_monotonicity_check<T: Real>(
    k: &KernelExpr<T>,
    l: &KernelExpr<T>,
    w: &ClosedFormFunction<T>,
    s: &EuclideanPointSet<T>,
    tol: T,
) -> Result<bool> {
    Ok(kl_monotonicity_report(k, l, w, s, tol)?.holds)
}

/// Upper bound for `sup_{|z| <= 1} |w(z)|` that holds with certainty, or
/// `None` when the symbol kind has no certificate.
///
/// Polynomials use `sum |a_k|` when that is at most one, otherwise the
/// maximum on `grid` equispaced circle points inflated by the Bernstein
/// margin `M_grid * (n pi / grid) / (1 - n pi / grid)`.
pub fn certified_sup_bound<T: Real>(w: &ClosedFormFunction<T>, grid: usize) -> Option<T> {
    match w {
        ClosedFormFunction::Moebius { a } if a.norm() < T::one() => Some(T::one()),
        ClosedFormFunction::Coordinate { index: 0 } => Some(T::one()),
        ClosedFormFunction::Polynomial { coeffs } => Some(polynomial_circle_bound(coeffs, grid)),
        ClosedFormFunction::Scale { c, arg } => certified_sup_bound(arg, grid).map(|b| b * c.norm()),
        ClosedFormFunction::Product { factors } => factors
            .iter()
            .try_fold(T::one(), |acc, f| certified_sup_bound(f, grid).map(|b| acc * b)),
        ClosedFormFunction::Compose { outer, inner } => match (outer.as_ref(), inner.as_ref()) {
            (ClosedFormFunction::Polynomial { coeffs }, inner)
                if certified_sup_bound(inner, grid).is_some_and(|b| b <= T::one()) =>
            {
                Some(polynomial_circle_bound(coeffs, grid))
            }
            (ClosedFormFunction::Moebius { a }, inner)
                if a.norm() < T::one() && certified_sup_bound(inner, grid).is_some_and(|b| b <= T::one()) =>
            {
                Some(T::one())
            }
            _ => None,
        },
        _ => None,
    }
}

/// Certified bound of `max_{|z|=1} |p(z)|` (equal to the closed-disk maximum).
pub fn polynomial_circle_bound<T: Real>(coeffs: &[Complex<T>], grid: usize) -> T {
    let l1 = coeffs.iter().fold(T::zero(), |s, c| s + c.norm());
    let (grid_max, margin) = polynomial_grid_max_and_margin(coeffs, grid);
    match margin {
        Some(m) => (grid_max + m).min(l1),
        None => l1,
    }
}

/// Grid maximum of `|p|` on the unit circle and the Bernstein margin, if the
/// grid is fine enough (`n pi / grid < 1`) for the margin to exist.
pub fn polynomial_grid_max_and_margin<T: Real>(coeffs: &[Complex<T>], grid: usize) -> (T, Option<T>) {
    let degree = coeffs.iter().rposition(|c| *c != Complex::zero()).unwrap_or(0);
    let grid = grid.max(1);
    let step = T::lit(2.0) * T::PI() / T::from_usize(grid).unwrap_or_else(T::one);
    let grid_max = (0..grid).fold(T::zero(), |m, k| {
        let theta = step * T::from_usize(k).unwrap_or_else(T::zero);
        let z = Complex::new(theta.cos(), theta.sin());
        m.max(crate::kernels::horner(coeffs, z).norm())
    });
    if degree == 0 {
        return (grid_max, Some(T::zero()));
    }
    let ratio = T::from_usize(degree).unwrap_or_else(T::one) * T::PI() / T::from_usize(grid).unwrap_or_else(T::one);
    if ratio < T::one() {
        (grid_max, Some(grid_max * ratio / (T::one() - ratio)))
    } else {
        (grid_max, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VonNeumannReport<T> {
    /// Sampled norm of `p o w` on the Hardy space.
    pub lhs: T,
    /// Certified bound of `sup_{|z|<=1} |p(z)|`.
    pub rhs: T,
    pub pass: bool,
}

/// Sampled von Neumann inequality `||p(M_w)|| <= sup_D |p|` for a symbol
/// `w` certified to map the disk into its closure, on the Hardy space.
pub fn von_neumann_check<T: Real>(
    w: &ClosedFormFunction<T>,
    p: &[Complex<T>],
    s: &EuclideanPointSet<T>,
    boundary_grid: usize,
    tol: T,
) -> Result<VonNeumannReport<T>> {
    w.validate()?;
    if boundary_grid == 0 {
        return Err(Error::InvalidInput("boundary grid must be positive".into()));
    }
    match certified_sup_bound(w, boundary_grid) {
        Some(b) if b <= T::one() => {}
        Some(b) => {
            return Err(Error::SymbolNotContractive(format!(
                "certified sup bound {} exceeds 1",
                b
            )))
        }
        None => {
            return Err(Error::SymbolNotContractive(
                "no sup-norm certificate for this symbol kind".into(),
            ))
        }
    }
    let composed = ClosedFormFunction::compose(ClosedFormFunction::polynomial(p.to_vec()), w.clone());
    let szego = KernelExpr::szego();
    let lhs = sampled_mult_norm(&szego, &szego, &composed, s, NormMethod::Pencil, tol)?.sampled_norm;
    let rhs = polynomial_circle_bound(p, boundary_grid);
    Ok(VonNeumannReport {
        lhs,
        rhs,
        pass: lhs <= rhs + tol,
    })
}
