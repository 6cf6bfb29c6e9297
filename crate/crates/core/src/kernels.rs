//! Kernel expressions, Gram matrices and positive-semidefiniteness tests.
//!
//! A [`KernelExpr`] can only be built from operations that preserve the
//! kernel property: nonnegative constants, rank-one kernels `w (x) conj(w)`,
//! sums, positive scalings, Schur (entrywise) products and the geometric
//! series `1 / (1 - K)` of a kernel bounded by one in modulus. Arbitrary
//! matrices are only ever judged by [`psd_check`].

use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::MetricSpace;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::scalar::{exact, exact_complex, Real};
use crate::BigRational;

/// Finite sample of points in `C^d`.
///
/// JSON form: `{"dim": 1, "points": [[[re, im]], ...], "labels": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet<T>", bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct EuclideanPointSet<T> {
    dim: usize,
    points: Vec<Vec<Complex<T>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawPointSet<T> {
    dim: usize,
    points: Vec<Vec<Complex<T>>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    require_distinct: bool,
}

impl<T: Real> TryFrom<RawPointSet<T>> for EuclideanPointSet<T> {
    type Error = Error;
    fn try_from(raw: RawPointSet<T>) -> Result<Self> {
        let set = EuclideanPointSet::new(raw.dim, raw.points, raw.require_distinct)?;
        match raw.labels {
            Some(l) => set.with_labels(l),
            None => Ok(set),
        }
    }
}

impl<T: Real> EuclideanPointSet<T> {
    pub fn new(dim: usize, points: Vec<Vec<Complex<T>>>, require_distinct: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if require_distinct {
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    if points[i] == points[j] {
                        return Err(Error::DuplicatePoint(i, j));
                    }
                }
            }
        }
        Ok(EuclideanPointSet {
            dim,
            points,
            labels: None,
        })
    }

    /// Distinct points of the complex plane.
    pub fn planar(points: Vec<Complex<T>>) -> Result<Self> {
        Self::new(1, points.into_iter().map(|z| vec![z]).collect(), true)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Complex<T>] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<Complex<T>>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Sub-sample on the given indices, in order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        EuclideanPointSet {
            dim: self.dim,
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| idx.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// Metric space with the induced Euclidean distance of `C^d`.
    pub fn metric_space(&self, base: usize) -> Result<MetricSpace<T>> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        if base >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: base,
                len: self.len(),
            });
        }
        let dist = self
            .points
            .iter()
            .map(|a| {
                self.points
                    .iter()
                    .map(|b| {
                        a.iter()
                            .zip(b)
                            .fold(T::zero(), |s, (u, v)| s + (u - v).norm_sqr())
                            .sqrt()
                    })
                    .collect()
            })
            .collect();
        let labels = match &self.labels {
            Some(l) => l.clone(),
            None => (0..self.len()).map(|i| i.to_string()).collect(),
        };
        Ok(MetricSpace::from_induced(labels, dist, base))
    }
}

/// Closed-form symbol evaluable at any point of `C^d`.
///
/// Univariate kinds (`polynomial`, `moebius`, `exp`, `szego_section`) act on
/// the first coordinate; `compose` feeds the value of `inner` to `outer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedFormFunction<T> {
    Coordinate {
        index: usize,
    },
    /// `sum_k coeffs[k] z^k`.
    Polynomial {
        coeffs: Vec<Complex<T>>,
    },
    /// Disk automorphism `(a - z) / (1 - conj(a) z)`, `|a| < 1`.
    Moebius {
        a: Complex<T>,
    },
    Exp,
    /// Kernel section `z -> 1 / (1 - z conj(w))` of the Szego kernel.
    SzegoSection {
        point: Complex<T>,
    },
    Compose {
        outer: Box<ClosedFormFunction<T>>,
        inner: Box<ClosedFormFunction<T>>,
    },
    Product {
        factors: Vec<ClosedFormFunction<T>>,
    },
    Sum {
        terms: Vec<ClosedFormFunction<T>>,
    },
    Scale {
        c: Complex<T>,
        arg: Box<ClosedFormFunction<T>>,
    },
}

impl<T: Real> ClosedFormFunction<T> {
    pub fn coordinate(index: usize) -> Self {
        ClosedFormFunction::Coordinate { index }
    }

    pub fn constant(c: Complex<T>) -> Self {
        ClosedFormFunction::Polynomial { coeffs: vec![c] }
    }

    pub fn polynomial(coeffs: Vec<Complex<T>>) -> Self {
        ClosedFormFunction::Polynomial { coeffs }
    }

    pub fn moebius(a: Complex<T>) -> Result<Self> {
        let f = ClosedFormFunction::Moebius { a };
        f.validate()?;
        Ok(f)
    }

    pub fn szego_section(point: Complex<T>) -> Result<Self> {
        let f = ClosedFormFunction::SzegoSection { point };
        f.validate()?;
        Ok(f)
    }

    pub fn compose(outer: Self, inner: Self) -> Self {
        ClosedFormFunction::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn scale(c: Complex<T>, arg: Self) -> Self {
        ClosedFormFunction::Scale { c, arg: Box::new(arg) }
    }

    /// Structural checks (parameters inside the disk), applied recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            ClosedFormFunction::Moebius { a } if !(a.norm() < T::one()) => {
                Err(Error::OutOfDomain("Moebius parameter must satisfy |a| < 1".into()))
            }
            ClosedFormFunction::SzegoSection { point } if !(point.norm() < T::one()) => Err(Error::OutOfDomain(
                "kernel section point must lie in the open disk".into(),
            )),
            ClosedFormFunction::Compose { outer, inner } => {
                outer.validate()?;
                inner.validate()
            }
            ClosedFormFunction::Product { factors: fs } | ClosedFormFunction::Sum { terms: fs } => {
                fs.iter().try_for_each(Self::validate)
            }
            ClosedFormFunction::Scale { arg, .. } => arg.validate(),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[Complex<T>]) -> Result<Complex<T>> {
        let first = || {
            x.first()
                .copied()
                .ok_or_else(|| Error::OutOfDomain("empty point".into()))
        };
        match self {
            ClosedFormFunction::Coordinate { index } => x
                .get(*index)
                .copied()
                .ok_or_else(|| Error::OutOfDomain(format!("coordinate {index} of a {}-dimensional point", x.len()))),
            ClosedFormFunction::Polynomial { coeffs } => Ok(horner(coeffs, first()?)),
            ClosedFormFunction::Moebius { a } => {
                let z = first()?;
                let den = Complex::<T>::one() - a.conj() * z;
                if den == Complex::zero() {
                    return Err(Error::OutOfDomain("pole of the Moebius map".into()));
                }
                Ok((a - z) / den)
            }
            ClosedFormFunction::Exp => Ok(first()?.exp()),
            ClosedFormFunction::SzegoSection { point } => {
                let den = Complex::<T>::one() - first()? * point.conj();
                if den == Complex::zero() {
                    return Err(Error::OutOfDomain("pole of the kernel section".into()));
                }
                Ok(den.inv())
            }
            ClosedFormFunction::Compose { outer, inner } => outer.eval(&[inner.eval(x)?]),
            ClosedFormFunction::Product { factors } => {
                factors.iter().try_fold(Complex::one(), |acc, f| Ok(acc * f.eval(x)?))
            }
            ClosedFormFunction::Sum { terms } => terms.iter().try_fold(Complex::zero(), |acc, f| Ok(acc + f.eval(x)?)),
            ClosedFormFunction::Scale { c, arg } => Ok(*c * arg.eval(x)?),
        }
    }

    /// Evaluation in exact rational arithmetic, with every float parameter
    /// taken at its exact binary value. `exp` has no such evaluation.
    pub fn eval_exact(&self, x: &[Complex<BigRational>]) -> Result<Complex<BigRational>> {
        let first = || {
            x.first()
                .cloned()
                .ok_or_else(|| Error::OutOfDomain("empty point".into()))
        };
        let one = Complex::<BigRational>::one();
        match self {
            ClosedFormFunction::Coordinate { index } => x
                .get(*index)
                .cloned()
                .ok_or_else(|| Error::OutOfDomain(format!("coordinate {index} of a {}-dimensional point", x.len()))),
            ClosedFormFunction::Polynomial { coeffs } => {
                let z = first()?;
                coeffs
                    .iter()
                    .rev()
                    .try_fold(Complex::zero(), |acc: Complex<BigRational>, c| {
                        Ok(acc * z.clone() + exact_complex(*c)?)
                    })
            }
            ClosedFormFunction::Moebius { a } => {
                let (a, z) = (exact_complex(*a)?, first()?);
                let den = one - a.conj() * z.clone();
                if den.is_zero() {
                    return Err(Error::OutOfDomain("pole of the Moebius map".into()));
                }
                Ok((a - z) / den)
            }
            ClosedFormFunction::Exp => Err(Error::OutOfDomain("exp has no exact rational value".into())),
            ClosedFormFunction::SzegoSection { point } => {
                let den = one - first()? * exact_complex(*point)?.conj();
                if den.is_zero() {
                    return Err(Error::OutOfDomain("pole of the kernel section".into()));
                }
                Ok(den.inv())
            }
            ClosedFormFunction::Compose { outer, inner } => outer.eval_exact(&[inner.eval_exact(x)?]),
            ClosedFormFunction::Product { factors } => {
                factors.iter().try_fold(one, |acc, f| Ok(acc * f.eval_exact(x)?))
            }
            ClosedFormFunction::Sum { terms } => terms
                .iter()
                .try_fold(Complex::zero(), |acc, f| Ok(acc + f.eval_exact(x)?)),
            ClosedFormFunction::Scale { c, arg } => Ok(exact_complex(*c)? * arg.eval_exact(x)?),
        }
    }

    /// Values on every point of a sample.
    pub fn eval_on(&self, s: &EuclideanPointSet<T>) -> Result<Vec<Complex<T>>> {
        s.points()
            .iter()
            .enumerate()
            .map(|(i, p)| self.eval(p).map_err(|e| Error::at_pair(i, i, e)))
            .collect()
    }
}

/// Horner evaluation of `sum_k c[k] z^k`.
pub fn horner<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    coeffs.iter().rev().fold(Complex::zero(), |acc, &c| acc * z + c)
}

/// Kernel expression tree.
///
/// JSON grammar, e.g.
/// `{"op":"geom","arg":{"op":"rank1","fn":{"kind":"coordinate","index":0}}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum KernelExpr<T> {
    /// `1 / (1 - z conj(w))` on the open unit disk.
    Szego,
    /// `1 / (1 - <x, y>)` on the open unit ball of `C^dim`.
    Ball {
        dim: usize,
    },
    Constant {
        c: T,
    },
    /// `w(x) conj(w(y))`.
    #[serde(rename = "rank1")]
    RankOne {
        #[serde(rename = "fn")]
        func: ClosedFormFunction<T>,
    },
    Sum {
        args: Vec<KernelExpr<T>>,
    },
    Scale {
        c: T,
        arg: Box<KernelExpr<T>>,
    },
    Hadamard {
        left: Box<KernelExpr<T>>,
        right: Box<KernelExpr<T>>,
    },
    /// `1 / (1 - K)`; requires `|K(x, y)| < 1` wherever it is evaluated.
    Geom {
        arg: Box<KernelExpr<T>>,
    },
}

impl<T: Real> KernelExpr<T> {
    pub fn szego() -> Self {
        KernelExpr::Szego
    }

    pub fn ball(dim: usize) -> Self {
        KernelExpr::Ball { dim }
    }

    pub fn constant(c: T) -> Self {
        KernelExpr::Constant { c }
    }

    pub fn rank_one(func: ClosedFormFunction<T>) -> Self {
        KernelExpr::RankOne { func }
    }

    pub fn sum(args: Vec<Self>) -> Self {
        KernelExpr::Sum { args }
    }

    pub fn scale(c: T, arg: Self) -> Self {
        KernelExpr::Scale { c, arg: Box::new(arg) }
    }

    pub fn hadamard(left: Self, right: Self) -> Self {
        KernelExpr::Hadamard {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn geom(arg: Self) -> Self {
        KernelExpr::Geom { arg: Box::new(arg) }
    }

    /// Rejects constructions outside the kernel cone: negative constants,
    /// nonpositive scalings, zero-dimensional balls, invalid symbols.
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelExpr::Szego => Ok(()),
            KernelExpr::Ball { dim } if *dim == 0 => Err(Error::InvalidInput("ball kernel needs dim >= 1".into())),
            KernelExpr::Ball { .. } => Ok(()),
            KernelExpr::Constant { c } if !(*c >= T::zero()) => {
                Err(Error::InvalidInput("constant kernel needs c >= 0".into()))
            }
            KernelExpr::Constant { .. } => Ok(()),
            KernelExpr::RankOne { func } => func.validate(),
            KernelExpr::Sum { args } => args.iter().try_for_each(Self::validate),
            KernelExpr::Scale { c, .. } if !(*c > T::zero()) => {
                Err(Error::InvalidInput("kernel scaling needs c > 0".into()))
            }
            KernelExpr::Scale { arg, .. } | KernelExpr::Geom { arg } => arg.validate(),
            KernelExpr::Hadamard { left, right } => {
                left.validate()?;
                right.validate()
            }
        }
    }

    pub fn eval(&self, x: &[Complex<T>], y: &[Complex<T>]) -> Result<Complex<T>> {
        match self {
            KernelExpr::Szego => {
                let (z, w) = match (x, y) {
                    ([z], [w]) => (*z, *w),
                    _ => {
                        return Err(Error::DimensionMismatch {
                            expected: 1,
                            found: x.len().max(y.len()),
                        })
                    }
                };
                if !(z.norm() < T::one()) || !(w.norm() < T::one()) {
                    return Err(Error::OutOfDomain("Szego kernel needs |z| < 1".into()));
                }
                Ok((Complex::<T>::one() - z * w.conj()).inv())
            }
            KernelExpr::Ball { dim } => {
                if x.len() != *dim || y.len() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        found: if x.len() != *dim { x.len() } else { y.len() },
                    });
                }
                let sq = |p: &[Complex<T>]| p.iter().fold(T::zero(), |s, c| s + c.norm_sqr());
                if !(sq(x) < T::one()) || !(sq(y) < T::one()) {
                    return Err(Error::OutOfDomain("ball kernel needs |x| < 1".into()));
                }
                let inner = x.iter().zip(y).fold(Complex::zero(), |s, (a, b)| s + a * b.conj());
                Ok((Complex::<T>::one() - inner).inv())
            }
            KernelExpr::Constant { c } => Ok(Complex::new(*c, T::zero())),
            KernelExpr::RankOne { func } => Ok(func.eval(x)? * func.eval(y)?.conj()),
            KernelExpr::Sum { args } => args.iter().try_fold(Complex::zero(), |acc, k| Ok(acc + k.eval(x, y)?)),
            KernelExpr::Scale { c, arg } => Ok(arg.eval(x, y)? * *c),
            KernelExpr::Hadamard { left, right } => Ok(left.eval(x, y)? * right.eval(x, y)?),
            KernelExpr::Geom { arg } => {
                let k = arg.eval(x, y)?;
                if !(k.norm() < T::one()) {
                    return Err(Error::GeomDiverges {
                        modulus: k.norm().to_f64_lossy(),
                    });
                }
                Ok((Complex::<T>::one() - k).inv())
            }
        }
    }

    /// [`eval`](Self::eval) in exact rational arithmetic, with the same domain
    /// checks. Fails on expressions that involve `exp`.
    pub fn eval_exact(&self, x: &[Complex<BigRational>], y: &[Complex<BigRational>]) -> Result<Complex<BigRational>> {
        let one = Complex::<BigRational>::one();
        let unit = BigRational::one();
        let sq = |p: &[Complex<BigRational>]| p.iter().fold(BigRational::zero(), |s, c| s + c.norm_sqr());
        match self {
            KernelExpr::Szego => match (x, y) {
                ([z], [w]) => {
                    if sq(x) >= unit || sq(y) >= unit {
                        return Err(Error::OutOfDomain("Szego kernel needs |z| < 1".into()));
                    }
                    Ok((one - z * w.conj()).inv())
                }
                _ => Err(Error::DimensionMismatch {
                    expected: 1,
                    found: x.len().max(y.len()),
                }),
            },
            KernelExpr::Ball { dim } => {
                if x.len() != *dim || y.len() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        found: if x.len() != *dim { x.len() } else { y.len() },
                    });
                }
                if sq(x) >= unit || sq(y) >= unit {
                    return Err(Error::OutOfDomain("ball kernel needs |x| < 1".into()));
                }
                let inner = x.iter().zip(y).fold(Complex::zero(), |s, (a, b)| s + a * b.conj());
                Ok((one - inner).inv())
            }
            KernelExpr::Constant { c } => Ok(Complex::new(exact(*c)?, BigRational::zero())),
            KernelExpr::RankOne { func } => Ok(func.eval_exact(x)? * func.eval_exact(y)?.conj()),
            KernelExpr::Sum { args } => args
                .iter()
                .try_fold(Complex::zero(), |acc, k| Ok(acc + k.eval_exact(x, y)?)),
            KernelExpr::Scale { c, arg } => Ok(arg.eval_exact(x, y)? * exact(*c)?),
            KernelExpr::Hadamard { left, right } => Ok(left.eval_exact(x, y)? * right.eval_exact(x, y)?),
            KernelExpr::Geom { arg } => {
                let k = arg.eval_exact(x, y)?;
                if k.norm_sqr() >= unit {
                    return Err(Error::GeomDiverges {
                        modulus: k.norm_sqr().to_f64().unwrap_or(f64::INFINITY).sqrt(),
                    });
                }
                Ok((one - k).inv())
            }
        }
    }

    /// Gram matrix on a sample. The upper triangle is evaluated and mirrored
    /// with conjugation, so the result is exactly Hermitian; diagonal entries
    /// are stored as their real parts.
    pub fn gram(&self, s: &EuclideanPointSet<T>) -> Result<GramMatrix<T>> {
        self.validate()?;
        let n = s.len();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.eval(s.point(i), s.point(j)).map_err(|e| Error::at_pair(i, j, e))?;
                if i == j {
                    m[(i, i)] = Complex::new(v.re, T::zero());
                } else {
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
        }
        Ok(GramMatrix {
            sample: Some(s.clone()),
            entries: m,
        })
    }
}

/// Hermitian matrix of kernel values, optionally carrying its sample.
///
/// JSON form: `{"sample": <pointset>, "re": [[...]], "im": [[...]]}`; the
/// sample may be omitted for user-supplied matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGram<T>", into = "RawGram<T>")]
pub struct GramMatrix<T: Real> {
    pub sample: Option<EuclideanPointSet<T>>,
    entries: CMatrix<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>", serialize = "T: Real + Serialize"))]
struct RawGram<T: Real> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sample: Option<EuclideanPointSet<T>>,
    re: Vec<Vec<T>>,
    #[serde(default)]
    im: Option<Vec<Vec<T>>>,
}

impl<T: Real> TryFrom<RawGram<T>> for GramMatrix<T> {
    type Error = Error;
    fn try_from(raw: RawGram<T>) -> Result<Self> {
        let im = raw
            .im
            .unwrap_or_else(|| raw.re.iter().map(|r| vec![T::zero(); r.len()]).collect());
        let entries = CMatrix::from_parts(&raw.re, &im)?;
        let g = GramMatrix::from_matrix(entries)?;
        if let Some(s) = &raw.sample {
            if s.len() != g.len() {
                return Err(Error::DimensionMismatch {
                    expected: g.len(),
                    found: s.len(),
                });
            }
        }
        Ok(GramMatrix {
            sample: raw.sample,
            ..g
        })
    }
}

impl<T: Real> From<GramMatrix<T>> for RawGram<T> {
    fn from(g: GramMatrix<T>) -> Self {
        RawGram {
            re: g.entries.re_parts(),
            im: Some(g.entries.im_parts()),
            sample: g.sample,
        }
    }
}

impl<T: Real> GramMatrix<T> {
    /// Wraps a user matrix after checking it is square and exactly Hermitian.
    pub fn from_matrix(entries: CMatrix<T>) -> Result<Self> {
        if let Some((i, j)) = entries.hermitian_violation() {
            return Err(Error::NotHermitian { i, j });
        }
        Ok(GramMatrix { sample: None, entries })
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix<T> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.rows() == 0
    }

    pub fn psd_check(&self, tol: T) -> Result<PsdReport<T>> {
        psd_check(&self.entries, tol)
    }
}

/// Verdict of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdReport<T> {
    pub is_psd: bool,
    pub min_eigenvalue: T,
    pub max_abs_eigenvalue: T,
    pub tolerance_used: T,
}

/// Decides positive semidefiniteness by the smallest eigenvalue with the
/// relative rule `lambda_min >= -tol * max(1, |lambda|_max)`.
pub fn psd_check<T: Real>(m: &CMatrix<T>, tol: T) -> Result<PsdReport<T>> {
    if !(tol >= T::zero()) {
        return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
    }
    if let Some((i, j)) = m.hermitian_violation() {
        return Err(Error::NotHermitian { i, j });
    }
    if m.rows() == 0 {
        return Ok(PsdReport {
            is_psd: true,
            min_eigenvalue: T::zero(),
            max_abs_eigenvalue: T::zero(),
            tolerance_used: tol,
        });
    }
    let ev = hermitian_eigenvalues(m)?;
    let min = ev[0];
    let max_abs = ev.iter().fold(T::zero(), |a, &l| a.max(l.abs()));
    Ok(PsdReport {
        is_psd: min >= -tol * T::one().max(max_abs),
        min_eigenvalue: min,
        max_abs_eigenvalue: max_abs,
        tolerance_used: tol,
    })
}

/// PSD verdict for the Gram matrix of the Schur product `K * L` on `s`.
pub fn schur_product_check<T: Real>(
    k: &KernelExpr<T>,
    l: &KernelExpr<T>,
    s: &EuclideanPointSet<T>,
    tol: T,
) -> Result<PsdReport<T>> {
    KernelExpr::hadamard(k.clone(), l.clone()).gram(s)?.psd_check(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn disk(points: &[(f64, f64)]) -> EuclideanPointSet<f64> {
        EuclideanPointSet::planar(points.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn szego_values() {
        let k = KernelExpr::<f64>::szego();
        let v = k.eval(&[c(0.5, 0.0)], &[c(0.5, 0.0)]).unwrap();
        assert!((v - c(4.0 / 3.0, 0.0)).norm() < 1e-15);
        assert_eq!(k.eval(&[c(0.0, 0.0)], &[c(0.3, -0.7)]).unwrap(), c(1.0, 0.0));
        assert!(matches!(
            k.eval(&[c(1.0, 0.0)], &[c(0.0, 0.0)]),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn geom_divergence_reported_with_pair() {
        let k = KernelExpr::geom(KernelExpr::constant(1.0));
        let s = disk(&[(0.0, 0.0), (0.1, 0.0)]);
        match k.gram(&s) {
            Err(Error::AtPair { i: 0, j: 0, source }) => {
                assert!(matches!(*source, Error::GeomDiverges { .. }))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gram_examples() {
        let s = disk(&[(0.0, 0.0), (0.5, 0.0), (-0.2, 0.3)]);
        let ones = KernelExpr::constant(1.0).gram(&s).unwrap();
        assert!((0..3).all(|i| (0..3).all(|j| ones.entries()[(i, j)] == c(1.0, 0.0))));

        let two = disk(&[(0.0, 0.0), (0.5, 0.0)]);
        let g = KernelExpr::szego().gram(&two).unwrap();
        assert_eq!(g.entries()[(0, 1)], c(1.0, 0.0));
        assert!((g.entries()[(1, 1)].re - 4.0 / 3.0).abs() < 1e-15);
        let r = g.psd_check(1e-10).unwrap();
        assert!(r.is_psd);
        // det = 4/3 - 1 = 1/3 equals the product of eigenvalues.
        let ev = hermitian_eigenvalues(g.entries()).unwrap();
        assert!((ev[0] * ev[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_gram_has_rank_one() {
        let s = disk(&[(0.1, 0.2), (0.5, -0.1), (-0.3, 0.3), (0.0, 0.7)]);
        let w = ClosedFormFunction::moebius(c(0.3, 0.1)).unwrap();
        let g = KernelExpr::rank_one(w).gram(&s).unwrap();
        let ev = hermitian_eigenvalues(g.entries()).unwrap();
        assert!(ev[..3].iter().all(|l| l.abs() < 1e-14));
        assert!(ev[3] > 0.1);
    }

    #[test]
    fn psd_examples() {
        let one = CMatrix::from_rows(vec![vec![c(1.0, 0.0)]]).unwrap();
        assert!(psd_check(&one, 1e-10).unwrap().is_psd);
        let swap = CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let r = psd_check(&swap, 1e-10).unwrap();
        assert!(!r.is_psd);
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-14);
        let skew = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(1.0, 0.0)]]).unwrap();
        assert_eq!(psd_check(&skew, 1e-10).unwrap_err(), Error::NotHermitian { i: 0, j: 1 });
    }

    #[test]
    fn hadamard_identities() {
        let s = disk(&[(0.1, 0.2), (0.5, -0.1), (-0.3, 0.3)]);
        let k = KernelExpr::szego();
        let with_one = KernelExpr::hadamard(KernelExpr::constant(1.0), k.clone())
            .gram(&s)
            .unwrap();
        assert_eq!(with_one.entries(), k.gram(&s).unwrap().entries());

        let w = ClosedFormFunction::moebius(c(0.2, 0.0)).unwrap();
        let e = ClosedFormFunction::Exp;
        let prod = KernelExpr::hadamard(KernelExpr::rank_one(w.clone()), KernelExpr::rank_one(e.clone()))
            .gram(&s)
            .unwrap();
        let direct = KernelExpr::rank_one(ClosedFormFunction::Product { factors: vec![w, e] })
            .gram(&s)
            .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((prod.entries()[(i, j)] - direct.entries()[(i, j)]).norm() < 1e-14);
            }
        }
        assert!(schur_product_check(&k, &k, &s, 1e-10).unwrap().is_psd);
    }

    #[test]
    fn ball_kernel_at_half_half() {
        let x = [c(0.5, 0.0), c(0.5, 0.0)];
        assert_eq!(KernelExpr::<f64>::ball(2).eval(&x, &x).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn invalid_constructions_rejected() {
        assert!(KernelExpr::constant(-1.0).validate().is_err());
        assert!(KernelExpr::scale(0.0, KernelExpr::szego()).validate().is_err());
        assert!(ClosedFormFunction::moebius(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn json_grammar() {
        let k: KernelExpr<f64> =
            serde_json::from_str(r#"{"op":"geom","arg":{"op":"rank1","fn":{"kind":"coordinate","index":0}}}"#).unwrap();
        assert_eq!(
            k,
            KernelExpr::geom(KernelExpr::rank_one(ClosedFormFunction::coordinate(0)))
        );
        let s: EuclideanPointSet<f64> = serde_json::from_str(r#"{"dim":1,"points":[[[0,0]],[[0.5,0]]]}"#).unwrap();
        let g = KernelExpr::szego().gram(&s).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        let back: GramMatrix<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        let bad = serde_json::from_str::<GramMatrix<f64>>(r#"{"re":[[1,2],[3,1]]}"#);
        assert!(bad.is_err());
    }
}
