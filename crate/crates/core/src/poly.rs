//! Complex polynomials in ascending coefficient order.
//!
//! A [`ComplexPoly`] optionally carries an ambient degree `n`, the degree of
//! the class `P_n` it is considered a member of. The conjugate-inverse
//! `P*(z) = z^n conj(P(1/conj z))` depends on `n` rather than on the
//! effective degree, so `n` is tracked explicitly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};

/// Relative magnitude at or below which a coefficient counts as zero when
/// computing the effective degree.
pub const DEGREE_THRESHOLD: f64 = 1e-12;

/// A polynomial with complex coefficients, `coeffs[k]` multiplying `z^k`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
    ambient: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    coeffs: Vec<[f64; 2]>,
    #[serde(default)]
    n: Option<usize>,
}

impl TryFrom<PolyJson> for ComplexPoly {
    type Error = PolyError;

    fn try_from(raw: PolyJson) -> Result<Self> {
        let coeffs: Vec<Complex64> = raw
            .coeffs
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(PolyError::NonFiniteCoefficient(i));
        }
        let p = ComplexPoly::new(coeffs);
        match raw.n {
            Some(n) => p.with_ambient_degree(n),
            None => Ok(p),
        }
    }
}

impl From<ComplexPoly> for PolyJson {
    fn from(p: ComplexPoly) -> Self {
        PolyJson {
            coeffs: p.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            n: p.ambient,
        }
    }
}

impl fmt::Debug for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexPoly")
            .field("coeffs", &self.coeffs)
            .field("n", &self.ambient)
            .finish()
    }
}

impl ComplexPoly {
    /// Builds a polynomial from ascending coefficients. An empty vector is
    /// the zero polynomial.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        ComplexPoly {
            coeffs,
            ambient: None,
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `psi_n(z) = z^n` with ambient degree `n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        ComplexPoly {
            coeffs,
            ambient: Some(n),
        }
    }

    /// Attaches the ambient degree `n`. Fails when the effective degree is
    /// larger than `n`.
    pub fn with_ambient_degree(mut self, n: usize) -> Result<Self> {
        let degree = self.degree();
        if degree > n {
            return Err(PolyError::DegreeExceedsAmbient { degree, ambient: n });
        }
        self.ambient = Some(n);
        Ok(self)
    }

    pub fn without_ambient_degree(mut self) -> Self {
        self.ambient = None;
        self
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn ambient_degree(&self) -> Option<usize> {
        self.ambient
    }

    /// Coefficient of `z^k`, zero past the stored length.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `k` whose coefficient is not negligible relative to the largest
    /// coefficient magnitude.
    pub fn degree(&self) -> usize {
        let max = self.max_coeff_norm();
        let scale = if max > 0.0 { max } else { 1.0 };
        let cut = DEGREE_THRESHOLD * scale;
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > cut)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Coefficient at the effective degree.
    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    /// Checks that the effective degree is exactly `n`.
    pub fn require_degree(&self, n: usize) -> Result<()> {
        let found = self.degree();
        if found != n || (n == 0 && self.is_zero()) {
            return Err(PolyError::DegreeMismatch { expected: n, found });
        }
        Ok(())
    }

    /// Copy with negligible leading coefficients removed.
    pub fn trimmed(&self) -> Self {
        let d = self.degree();
        ComplexPoly {
            coeffs: self.coeffs[..=d].to_vec(),
            ambient: self.ambient,
        }
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// The `k`-th formal derivative. The ambient degree drops by `k`,
    /// floored at zero.
    pub fn derivative(&self, k: usize) -> Self {
        let ambient = self.ambient.map(|n| n.saturating_sub(k));
        if k == 0 {
            return self.clone();
        }
        if k >= self.coeffs.len() {
            return ComplexPoly {
                coeffs: vec![Complex64::new(0.0, 0.0)],
                ambient,
            };
        }
        let coeffs = (k..self.coeffs.len())
            .map(|j| {
                // j!/(j-k)!
                let falling: f64 = ((j - k + 1)..=j).map(|t| t as f64).product();
                self.coeffs[j] * falling
            })
            .collect();
        ComplexPoly { coeffs, ambient }
    }

    /// `P*(z) = z^n conj(P(1/conj z))`: coefficient `k` is `conj(coeffs[n-k])`.
    pub fn conj_inverse(&self) -> Result<Self> {
        let n = self.ambient.ok_or(PolyError::MissingAmbientDegree)?;
        let coeffs = (0..=n).map(|k| self.coeff(n - k).conj()).collect();
        Ok(ComplexPoly {
            coeffs,
            ambient: Some(n),
        })
    }

    /// True when `P = P*` within `tol` relative to the largest coefficient.
    /// The zero polynomial is self-inversive.
    pub fn is_self_inversive(&self, tol: f64) -> Result<bool> {
        let n = self.ambient.ok_or(PolyError::MissingAmbientDegree)?;
        let scale = self.max_coeff_norm();
        let worst = (0..=n)
            .map(|k| (self.coeff(k) - self.coeff(n - k).conj()).norm())
            .fold(0.0, f64::max);
        Ok(worst <= tol * scale)
    }

    /// `leading * prod (z - root)`, expanded one linear factor at a time.
    pub fn from_roots(roots: &[Complex64], leading: Complex64) -> Result<Self> {
        if leading.norm() == 0.0 {
            return Err(PolyError::ZeroLeadingCoefficient);
        }
        let mut coeffs = Vec::with_capacity(roots.len() + 1);
        coeffs.push(leading);
        for &root in roots {
            coeffs.push(Complex64::new(0.0, 0.0));
            for k in (1..coeffs.len()).rev() {
                coeffs[k] = coeffs[k - 1] - root * coeffs[k];
            }
            coeffs[0] = -root * coeffs[0];
        }
        Ok(Self::new(coeffs))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexPoly {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
            ambient: self.ambient,
        }
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        ComplexPoly {
            coeffs,
            ambient: self.ambient.map(|n| n + k),
        }
    }

    /// Largest relative coefficient gap, `max_k |a_k - b_k| / max(max|a|, max|b|)`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        let scale = self.max_coeff_norm().max(other.max_coeff_norm());
        let diff = (0..len)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

fn merge_ambient(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;

    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly {
            coeffs: (0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
            ambient: merge_ambient(self.ambient, rhs.ambient),
        }
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;

    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly {
            coeffs: (0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect(),
            ambient: merge_ambient(self.ambient, rhs.ambient),
        }
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;

    fn neg(self) -> ComplexPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;

    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let ambient = match (self.ambient, rhs.ambient) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        ComplexPoly { coeffs, ambient }
    }
}

impl Mul<Complex64> for &ComplexPoly {
    type Output = ComplexPoly;

    fn mul(self, rhs: Complex64) -> ComplexPoly {
        self.scale(rhs)
    }
}
