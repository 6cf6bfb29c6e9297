//! Finite metric spaces, Lipschitz seminorms and the dual norms of point
//! evaluations on the Lipschitz space `Lip(X, rho)` normed by
//! `||f|| = dil f + |f(z)|`.

use std::ops::{Mul, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Modulus, Real};

/// Finite metric space with a distinguished base point `z`.
///
/// JSON form: `{"labels": [...], "dist": [[...]], "base": 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetricSpace<T>", bound(deserialize = "T: Field + Deserialize<'de>"))]
pub struct MetricSpace<T> {
    labels: Vec<String>,
    dist: Vec<Vec<T>>,
    base: usize,
}

#[derive(Deserialize)]
struct RawMetricSpace<T> {
    #[serde(default)]
    labels: Vec<String>,
    dist: Vec<Vec<T>>,
    #[serde(default)]
    base: usize,
}

impl<T: Field> TryFrom<RawMetricSpace<T>> for MetricSpace<T> {
    type Error = Error;
    fn try_from(raw: RawMetricSpace<T>) -> Result<Self> {
        MetricSpace::new(raw.labels, raw.dist, raw.base)
    }
}

impl<T: Field> MetricSpace<T> {
    /// Validates the distance matrix exactly: zero diagonal, positive
    /// symmetric off-diagonal entries and every triangle inequality.
    /// Empty `labels` are replaced by `"0", "1", ...`.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<T>>, base: usize) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if let Some(row) = dist.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        let labels = if labels.is_empty() {
            (0..n).map(|i| i.to_string()).collect()
        } else if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        } else {
            labels
        };
        if base >= n {
            return Err(Error::IndexOutOfRange { index: base, len: n });
        }
        let zero = T::zero();
        for i in 0..n {
            if dist[i][i] != zero {
                return Err(Error::InvalidMetric(format!("dist({i},{i}) is not zero")));
            }
            for j in 0..n {
                if i != j && !(dist[i][j] > zero) {
                    return Err(Error::InvalidMetric(format!("dist({i},{j}) is not positive")));
                }
                if dist[i][j] != dist[j][i] {
                    return Err(Error::InvalidMetric(format!("dist({i},{j}) is not symmetric")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j].clone() + dist[j][k].clone() {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(MetricSpace { labels, dist, base })
    }

    /// Metric induced by `|a - b|` on points of the real line. No triangle
    /// check is needed since the metric holds by construction.
    pub fn from_line(points: &[T], base: usize) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if base >= n {
            return Err(Error::IndexOutOfRange { index: base, len: n });
        }
        for i in 0..n {
            for j in i + 1..n {
                if points[i] == points[j] {
                    return Err(Error::DuplicatePoint(i, j));
                }
            }
        }
        let dist = points
            .iter()
            .map(|a| points.iter().map(|b| (a.clone() - b.clone()).abs_val()).collect())
            .collect();
        Ok(MetricSpace {
            labels: (0..n).map(|i| i.to_string()).collect(),
            dist,
            base,
        })
    }

    /// Wraps an induced metric (e.g. Euclidean) without re-validating it.
    pub(crate) fn from_induced(labels: Vec<String>, dist: Vec<Vec<T>>, base: usize) -> Self {
        MetricSpace { labels, dist, base }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> T {
        self.dist[i][j].clone()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }

    pub fn diameter(&self) -> T {
        self.dist.iter().flatten().cloned().fold(T::zero(), |m, d| m.max_of(d))
    }

    /// `rho(x, A) = min_{a in A} rho(x, a)`.
    pub fn set_distance(&self, x: usize, set: &[usize]) -> Result<T> {
        self.check_index(x)?;
        let mut best: Option<T> = None;
        for &a in set {
            self.check_index(a)?;
            let d = self.dist(x, a);
            best = Some(match best {
                Some(b) => b.min_of(d),
                None => d,
            });
        }
        best.ok_or(Error::EmptySet)
    }

    /// The function `rho(., y)` sampled on the space.
    pub fn distance_function(&self, y: usize) -> Result<SampledFunction<T>> {
        self.check_index(y)?;
        Ok(SampledFunction::new((0..self.len()).map(|i| self.dist(i, y)).collect()))
    }

    fn check_function<V>(&self, f: &SampledFunction<V>) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// `dil f = max_{x != y} |f(x) - f(y)| / rho(x, y)`.
    pub fn dil<V>(&self, f: &SampledFunction<V>) -> Result<T>
    where
        V: Modulus<Output = T> + Clone + Sub<Output = V>,
    {
        self.check_function(f)?;
        if self.len() < 2 {
            return Err(Error::DegenerateSpace);
        }
        let mut best = T::zero();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let q = (f.values[i].clone() - f.values[j].clone()).modulus() / self.dist(i, j);
                best = best.max_of(q);
            }
        }
        Ok(best)
    }

    /// `||f|| = dil f + |f(z)|`.
    pub fn lip_norm<V>(&self, f: &SampledFunction<V>) -> Result<T>
    where
        V: Modulus<Output = T> + Clone + Sub<Output = V>,
    {
        Ok(self.dil(f)? + f.values[self.base].modulus())
    }

    /// Norm of the functional `x_F - y_F` on `Lip(X, rho)`, which equals
    /// `rho(x, y)`, together with the extremal function
    /// `f* = rho(., y) - rho(z, y)`. `f*` has norm at most one (it vanishes at
    /// `z` and is 1-Lipschitz) and `f*(x) - f*(y) = rho(x, y)`.
    pub fn lip_dual_pair_norm(&self, x: usize, y: usize) -> Result<(T, SampledFunction<T>)> {
        self.check_index(x)?;
        self.check_index(y)?;
        if x == y {
            return Err(Error::SamePoint);
        }
        let offset = self.dist(self.base, y);
        let witness = SampledFunction::new((0..self.len()).map(|i| self.dist(i, y) - offset.clone()).collect());
        Ok((self.dist(x, y), witness))
    }

    /// Norm of the point evaluation `x_F`: `max{1, rho(x, z)}`.
    pub fn lip_point_norm(&self, x: usize) -> Result<T> {
        self.check_index(x)?;
        Ok(T::one().max_of(self.dist(x, self.base)))
    }
}

/// Outcome of the product-norm ratio test on the Lipschitz algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmultReport<T> {
    /// `max ||fg|| / (||f|| ||g||)` over all unordered pairs (with repetition).
    pub max_ratio: T,
    /// `2 max{1, diam} + 1`.
    pub bound: T,
    /// Indices of the maximizing pair.
    pub argmax: (usize, usize),
}

impl<T: Real> MetricSpace<T> {
    /// Largest product-norm ratio over pairs of `fs` against the a priori
    /// constant `2 max{1, diam} + 1`, which follows from
    /// `|f(x)| <= max{1, diam} ||f||` and the product rule for `dil`.
    pub fn submult_ratio(&self, fs: &[SampledFunction<Complex<T>>]) -> Result<SubmultReport<T>>
    where
        Complex<T>: Modulus<Output = T>,
    {
        if fs.is_empty() {
            return Err(Error::EmptySet);
        }
        let norms = fs
            .iter()
            .map(|f| {
                let n = self.lip_norm(f)?;
                if n == T::zero() {
                    Err(Error::ZeroFunction)
                } else {
                    Ok(n)
                }
            })
            .collect::<Result<Vec<T>>>()?;
        let mut max_ratio = T::zero();
        let mut argmax = (0, 0);
        for i in 0..fs.len() {
            for j in i..fs.len() {
                let prod = fs[i].pointwise_mul(&fs[j])?;
                let ratio = self.lip_norm(&prod)? / (norms[i] * norms[j]);
                if ratio > max_ratio {
                    max_ratio = ratio;
                    argmax = (i, j);
                }
            }
        }
        let two = T::lit(2.0);
        Ok(SubmultReport {
            max_ratio,
            bound: two * T::one().max(self.diameter()) + T::one(),
            argmax,
        })
    }
}

/// Values of a function on the points of a finite space, in point order.
///
/// JSON form for complex values: `{"values": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction<V> {
    pub values: Vec<V>,
}

impl<V> SampledFunction<V> {
    pub fn new(values: Vec<V>) -> Self {
        SampledFunction { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &V {
        &self.values[i]
    }
}

impl<V: Clone + Mul<Output = V>> SampledFunction<V> {
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(SampledFunction::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
        ))
    }
}

impl<T: Field> SampledFunction<T> {
    /// Real-valued function viewed as complex-valued.
    pub fn complexify(&self) -> SampledFunction<Complex<T>> {
        SampledFunction::new(self.values.iter().map(|v| Complex::new(v.clone(), T::zero())).collect())
    }

    pub fn sup_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max_of(v.abs_val()))
    }
}
