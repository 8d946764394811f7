//! The composite polynomial `h` and the Bernstein-type operator `N`.
//!
//! Given `lambda_0..lambda_m` and a shift `sigma`,
//!
//! ```text
//! h(z) = sum_{k=0}^{m} lambda_k f^(k)(z) (sigma z)^k / k!
//! ```
//!
//! The operator `N` is the same series with `sigma = n/2`. The coefficients
//! are tied to `g(z) = phi(z) = sum_k C(n,k) lambda_k z^k`, whose zeros decide
//! where the zeros of `h` may lie.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};
use crate::poly::ComplexPoly;
use crate::regions::ApolloniusRegion;
use crate::roots::find_roots_default;

/// Largest `n` for which every `C(n, k)` is computed exactly in `u64`.
pub const EXACT_BINOMIAL_MAX_N: usize = 62;

const SIGMA_TOL: f64 = 1e-12;

/// `C(n, k)`. Exact integer arithmetic up to `n = 62`, multiplicative
/// floating point beyond.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= EXACT_BINOMIAL_MAX_N {
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc as u64 as f64
    } else {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }
}

/// Ambient degree `n`, coefficients `lambda_0..lambda_m` and shift `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct OperatorSpec {
    n: usize,
    lambdas: Vec<Complex64>,
    sigma: Complex64,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    n: usize,
    m: usize,
    #[serde(with = "crate::json::complex_vec")]
    lambdas: Vec<Complex64>,
    #[serde(with = "crate::json::complex")]
    sigma: Complex64,
}

impl TryFrom<SpecJson> for OperatorSpec {
    type Error = PolyError;

    fn try_from(raw: SpecJson) -> Result<Self> {
        if raw.lambdas.len() != raw.m + 1 {
            return Err(PolyError::InvalidSpec(format!(
                "m = {} needs {} lambdas, got {}",
                raw.m,
                raw.m + 1,
                raw.lambdas.len()
            )));
        }
        OperatorSpec::new(raw.n, raw.lambdas, raw.sigma)
    }
}

impl From<OperatorSpec> for SpecJson {
    fn from(s: OperatorSpec) -> Self {
        SpecJson {
            n: s.n,
            m: s.m(),
            lambdas: s.lambdas,
            sigma: s.sigma,
        }
    }
}

impl OperatorSpec {
    /// `m` is `lambdas.len() - 1`.
    pub fn new(n: usize, lambdas: Vec<Complex64>, sigma: Complex64) -> Result<Self> {
        if n == 0 {
            return Err(PolyError::InvalidSpec("n must be positive".into()));
        }
        if lambdas.is_empty() {
            return Err(PolyError::InvalidSpec("at least one lambda is required".into()));
        }
        if lambdas.len() > n + 1 {
            return Err(PolyError::InvalidSpec(format!(
                "m = {} exceeds n = {n}",
                lambdas.len() - 1
            )));
        }
        if lambdas.iter().all(|l| l.norm() == 0.0) {
            return Err(PolyError::InvalidSpec("lambdas are all zero".into()));
        }
        if !lambdas.iter().all(|l| l.is_finite()) || !sigma.is_finite() {
            return Err(PolyError::InvalidSpec("non-finite parameter".into()));
        }
        Ok(OperatorSpec { n, lambdas, sigma })
    }

    /// Spec for the operator `N`, i.e. `sigma = n/2`.
    pub fn bernstein(n: usize, lambdas: Vec<Complex64>) -> Result<Self> {
        Self::new(n, lambdas, Complex64::new(n as f64 / 2.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn lambda0(&self) -> Complex64 {
        self.lambdas[0]
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }
}

/// `lambda_k = g_k / C(n, k)` for `k = 0..=deg g`.
pub fn lambdas_from_g(g: &ComplexPoly, n: usize) -> Result<Vec<Complex64>> {
    let m = g.degree();
    if m > n {
        return Err(PolyError::DegreeExceedsN { degree: m, n });
    }
    Ok((0..=m).map(|k| g.coeff(k) / binomial(n, k)).collect())
}

/// `g(z) = sum_k C(n, k) lambda_k z^k`.
pub fn g_from_lambdas(lambdas: &[Complex64], n: usize) -> Result<ComplexPoly> {
    if lambdas.len() > n + 1 {
        return Err(PolyError::DegreeExceedsN {
            degree: lambdas.len().saturating_sub(1),
            n,
        });
    }
    Ok(ComplexPoly::new(
        lambdas
            .iter()
            .enumerate()
            .map(|(k, &l)| l * binomial(n, k))
            .collect(),
    ))
}

/// The admissibility polynomial `phi(z) = sum_i C(n, i) lambda_i z^i`.
pub fn phi_of(spec: &OperatorSpec) -> ComplexPoly {
    g_from_lambdas(&spec.lambdas, spec.n).expect("spec invariant m <= n")
}

/// Degree requirement on the operand of [`compose_h_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeCheck {
    /// effective degree must equal `n`
    Exact,
    /// effective degree may be anything up to `n`
    AtMost,
}

/// `h(z) = sum_k lambda_k f^(k)(z) (sigma z)^k / k!` with `deg f = n` enforced.
pub fn compose_h(f: &ComplexPoly, spec: &OperatorSpec) -> Result<ComplexPoly> {
    compose_h_with(f, spec, DegreeCheck::Exact)
}

pub fn compose_h_with(f: &ComplexPoly, spec: &OperatorSpec, check: DegreeCheck) -> Result<ComplexPoly> {
    let n = spec.n;
    let degree = f.degree();
    match check {
        DegreeCheck::Exact => {
            if degree != n || f.is_zero() {
                return Err(PolyError::DegreeMismatch {
                    expected: n,
                    found: degree,
                });
            }
        }
        DegreeCheck::AtMost => {
            if degree > n {
                return Err(PolyError::DegreeExceedsN { degree, n });
            }
        }
    }

    let f = f.trimmed();
    let len = f.coeffs().len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    // taylor[j] holds the z^j coefficient of f^(k)/k!, i.e. C(j+k, k) a_{j+k}
    let mut taylor: Vec<Complex64> = f.coeffs().to_vec();
    let mut sigma_pow = Complex64::new(1.0, 0.0);
    for (k, &lambda) in spec.lambdas.iter().enumerate() {
        if k > 0 {
            if taylor.len() <= 1 {
                break;
            }
            let kf = k as f64;
            taylor = (1..taylor.len())
                .map(|j| taylor[j] * (j as f64 / kf))
                .collect();
            sigma_pow *= spec.sigma;
        }
        let weight = lambda * sigma_pow;
        if weight.norm() == 0.0 {
            continue;
        }
        // multiplying by z^k shifts the Taylor block back into place
        for (j, &t) in taylor.iter().enumerate() {
            out[j + k] += weight * t;
        }
    }
    ComplexPoly::new(out).with_ambient_degree(n)
}

/// `N[P](z) = sum_i lambda_i (n z / 2)^i P^(i)(z) / i!` for `P` of degree at most `n`.
pub fn apply_n(p: &ComplexPoly, spec: &OperatorSpec) -> Result<ComplexPoly> {
    let half = spec.n as f64 / 2.0;
    if (spec.sigma - half).norm() > SIGMA_TOL * half.max(1.0) {
        return Err(PolyError::SigmaMismatch {
            expected: half,
            found: format!("{}", spec.sigma),
        });
    }
    compose_h_with(p, spec, DegreeCheck::AtMost)
}

/// True when every zero of `phi` lies in the half-plane `|z| <= |z - n/2|`
/// within `tol`. A constant `phi` is admissible.
pub fn check_n_admissible(spec: &OperatorSpec, tol: f64) -> Result<bool> {
    let phi = phi_of(spec);
    if phi.degree() == 0 {
        return Ok(true);
    }
    let rs = find_roots_default(&phi)?;
    if !rs.all_converged() {
        return Err(PolyError::RootFindingFailed(
            "zeros of phi failed certification".into(),
        ));
    }
    let region = ApolloniusRegion::half_plane(spec.n);
    Ok(rs.roots.iter().all(|&w| region.contains(w, tol)))
}
