//! Aberth–Ehrlich simultaneous root finding with backward-error certification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};
use crate::poly::ComplexPoly;

/// A root is certified when its scaled residual
/// `|p(w)| / sum_k |a_k| max(1,|w|)^k` is at or below this value.
pub const CERTIFICATION_THRESHOLD: f64 = 1e-8;

pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_ITER: usize = 500;

const START_ANGLE: f64 = 0.4;
const START_RADIUS_FACTOR: f64 = 1.05;

/// Roots of a polynomial together with their certification data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    #[serde(with = "crate::json::complex_vec")]
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
    pub iterations: usize,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    fn require_converged(&self) -> Result<()> {
        let count = self.converged.iter().filter(|&&c| !c).count();
        if count > 0 {
            return Err(PolyError::Unconverged { count });
        }
        Ok(())
    }

    /// `max |root|`, only for fully certified root sets.
    pub fn max_root_modulus(&self) -> Result<f64> {
        self.require_converged()?;
        Ok(self.roots.iter().map(|w| w.norm()).fold(0.0, f64::max))
    }

    /// Returns `(inside, worst_margin)` with `worst_margin = max(|w| - r)`;
    /// `inside` holds when the margin is at most `tol * max(1, r)`.
    /// An empty root set has margin `-r`.
    pub fn contained_in_disk(&self, r: f64, tol: f64) -> Result<(bool, f64)> {
        self.require_converged()?;
        let worst = self
            .roots
            .iter()
            .map(|w| w.norm() - r)
            .fold(-r, f64::max);
        Ok((worst <= tol * r.max(1.0), worst))
    }
}

/// Scaled residual `|p(w)| / sum_k |a_k| max(1,|w|)^k`.
pub fn scaled_residual(p: &ComplexPoly, w: Complex64) -> f64 {
    let rho = w.norm().max(1.0);
    let scale = p
        .coeffs()
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * rho + c.norm());
    let value = p.evaluate(w).norm();
    if scale == 0.0 {
        value
    } else {
        value / scale
    }
}

/// Finds all `deg(p)` roots with default tolerance and iteration budget.
pub fn find_roots_default(p: &ComplexPoly) -> Result<RootSet> {
    find_roots(p, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Aberth–Ehrlich iteration. Stops once every correction is at most
/// `tol * max(1, |root|)` or after `max_iter` sweeps. Roots whose scaled
/// residual exceeds [`CERTIFICATION_THRESHOLD`] are flagged unconverged.
pub fn find_roots(p: &ComplexPoly, tol: f64, max_iter: usize) -> Result<RootSet> {
    if let Some(i) = p.coeffs().iter().position(|c| !c.is_finite()) {
        return Err(PolyError::NonFiniteCoefficient(i));
    }
    let p = p.trimmed().without_ambient_degree();
    let degree = p.degree();
    if degree == 0 {
        return Err(PolyError::DegreeZero);
    }

    // Exact zeros at the origin come off first.
    let zeros_at_origin = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let deflated = ComplexPoly::new(p.coeffs()[zeros_at_origin..].to_vec());
    let d = degree - zeros_at_origin;

    let mut roots = Vec::with_capacity(degree);
    let mut iterations = 0;
    if d > 0 {
        let lead = deflated.coeff(d);
        let monic = deflated.scale(lead.inv());
        let dmonic = monic.derivative(1);
        let radius = START_RADIUS_FACTOR * (monic.coeff(0).norm()).powf(1.0 / d as f64);
        let mut z: Vec<Complex64> = (0..d)
            .map(|k| {
                let theta = std::f64::consts::TAU * k as f64 / d as f64 + START_ANGLE;
                Complex64::from_polar(radius, theta)
            })
            .collect();

        while iterations < max_iter {
            iterations += 1;
            let mut done = true;
            for i in 0..d {
                let zi = z[i];
                let value = monic.evaluate(zi);
                if value.norm() == 0.0 {
                    continue;
                }
                let slope = dmonic.evaluate(zi);
                let repulsion: Complex64 = z
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &zj)| {
                        let gap = zi - zj;
                        if gap.norm() == 0.0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            gap.inv()
                        }
                    })
                    .sum();
                let denom = slope - value * repulsion;
                let step = if denom.norm() == 0.0 || !denom.is_finite() {
                    // nudge off a stationary point
                    Complex64::new(1e-8, 1e-8) * zi.norm().max(1.0)
                } else {
                    value / denom
                };
                if !step.is_finite() {
                    done = false;
                    continue;
                }
                z[i] = zi - step;
                if step.norm() > tol * z[i].norm().max(1.0) {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        roots.extend(z);
    }
    roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros_at_origin));

    let residuals: Vec<f64> = roots.iter().map(|&w| scaled_residual(&p, w)).collect();
    let converged = residuals
        .iter()
        .zip(&roots)
        .map(|(&r, w)| w.is_finite() && r <= CERTIFICATION_THRESHOLD)
        .collect();
    Ok(RootSet {
        roots,
        residuals,
        converged,
        iterations,
    })
}
