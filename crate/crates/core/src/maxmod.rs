//! Max-modulus estimates on circles and the pointwise inequality margins.
//!
//! Every margin is "bound side minus operator side" at a single point `z`,
//! so a nonnegative value means the inequality holds there.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};
use crate::operators::{apply_n, OperatorSpec};
use crate::poly::ComplexPoly;

pub const MIN_SAMPLES: usize = 16;
/// Golden-section stopping width in radians.
pub const ANGLE_TOL: f64 = 1e-12;
/// Number of sampled local maxima that get refined.
const REFINED_PEAKS: usize = 4;

/// `max(4096, 64 n)`.
pub fn default_samples(n: usize) -> usize {
    4096usize.max(64 * n)
}

/// An attained value of `|p|` on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMax {
    pub value: f64,
    pub arg_angle: f64,
    pub samples: usize,
    pub refined: bool,
}

/// Samples `|p(radius e^{i theta})|` on an equispaced grid, then refines the
/// best few local peaks by golden-section search. The result is always an
/// attained value, so it never overstates the true maximum.
pub fn max_on_circle(p: &ComplexPoly, radius: f64, samples: usize) -> CircleMax {
    let samples = samples.max(MIN_SAMPLES);
    let step = TAU / samples as f64;
    let modulus = |theta: f64| p.evaluate(Complex64::from_polar(radius, theta)).norm();
    let values: Vec<f64> = (0..samples).map(|k| modulus(k as f64 * step)).collect();

    let mut peaks: Vec<usize> = (0..samples)
        .filter(|&k| {
            let prev = values[(k + samples - 1) % samples];
            let next = values[(k + 1) % samples];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(REFINED_PEAKS);

    let best_k = peaks.first().copied().unwrap_or(0);
    let mut best = CircleMax {
        value: values[best_k],
        arg_angle: best_k as f64 * step,
        samples,
        refined: false,
    };
    for k in peaks {
        let centre = k as f64 * step;
        let (theta, value) = golden_section_max(&modulus, centre - step, centre + step);
        if value > best.value {
            best.value = value;
            best.arg_angle = theta.rem_euclid(TAU);
            best.refined = true;
        }
    }
    best
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
fn golden_section_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > ANGLE_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// A margin together with the magnitude of its bound side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub value: f64,
    pub bound: f64,
}

impl Margin {
    fn new(bound: f64, operator: f64) -> Self {
        Margin {
            value: bound - operator,
            bound,
        }
    }

    /// `1 + |bound|`, the scale all margin tolerances are relative to.
    pub fn scale(&self) -> f64 {
        1.0 + self.bound.abs()
    }

    pub fn normalized(&self) -> f64 {
        self.value / self.scale()
    }
}

/// Images under `N` of `P`, `P*` and `psi_n`, evaluated repeatedly by the
/// margin functions.
#[derive(Debug, Clone)]
pub struct OperatorImages {
    pub spec: OperatorSpec,
    pub np: ComplexPoly,
    pub np_star: ComplexPoly,
    pub npsi: ComplexPoly,
}

impl OperatorImages {
    pub fn new(p: &ComplexPoly, spec: &OperatorSpec) -> Result<Self> {
        let n = spec.n();
        let p = p.clone().with_ambient_degree(n)?;
        Ok(OperatorImages {
            spec: spec.clone(),
            np: apply_n(&p, spec)?,
            np_star: apply_n(&p.conj_inverse()?, spec)?,
            npsi: apply_n(&ComplexPoly::monomial(n), spec)?,
        })
    }

    fn half_sum_bound(&self, z: Complex64, m: f64) -> f64 {
        0.5 * (self.npsi.evaluate(z).norm() + self.spec.lambda0().norm()) * m
    }

    pub fn corollary1(&self, z: Complex64, m: f64) -> Margin {
        Margin::new(self.npsi.evaluate(z).norm() * m, self.np.evaluate(z).norm())
    }

    pub fn theorem3(&self, z: Complex64, m: f64) -> Margin {
        Margin::new(self.half_sum_bound(z, m), self.np.evaluate(z).norm())
    }

    pub fn lemma3(&self, z: Complex64) -> Margin {
        Margin::new(self.np_star.evaluate(z).norm(), self.np.evaluate(z).norm())
    }

    pub fn lemma4(&self, z: Complex64, m: f64) -> Margin {
        let bound = (self.npsi.evaluate(z).norm() + self.spec.lambda0().norm()) * m;
        Margin::new(bound, self.np.evaluate(z).norm() + self.np_star.evaluate(z).norm())
    }
}

/// `|N[f](z)| - |N[P](z)|`.
pub fn theorem2_margin(p: &ComplexPoly, f: &ComplexPoly, spec: &OperatorSpec, z: Complex64) -> Result<f64> {
    Ok(apply_n(f, spec)?.evaluate(z).norm() - apply_n(p, spec)?.evaluate(z).norm())
}

/// `|N[psi_n](z)| M - |N[P](z)|`.
pub fn corollary1_margin(p: &ComplexPoly, spec: &OperatorSpec, z: Complex64, m: f64) -> Result<f64> {
    Ok(OperatorImages::new(p, spec)?.corollary1(z, m).value)
}

/// `(|N[psi_n](z)| + |lambda_0|) M / 2 - |N[P](z)|`, for `P` without zeros in
/// the open unit disk.
pub fn theorem3_margin(p: &ComplexPoly, spec: &OperatorSpec, z: Complex64, m: f64) -> Result<f64> {
    Ok(OperatorImages::new(p, spec)?.theorem3(z, m).value)
}

/// Same bound as [`theorem3_margin`], for self-inversive `P`.
pub fn theorem4_margin(p: &ComplexPoly, spec: &OperatorSpec, z: Complex64, m: f64) -> Result<f64> {
    let p = p.clone().with_ambient_degree(spec.n())?;
    if !p.is_self_inversive(SELF_INVERSIVE_TOL)? {
        return Err(PolyError::NotSelfInversive);
    }
    Ok(OperatorImages::new(&p, spec)?.theorem3(z, m).value)
}

/// Relative coefficient tolerance used when a margin requires `P = P*`.
pub const SELF_INVERSIVE_TOL: f64 = 1e-10;

/// `|N[P*](z)| - |N[P](z)|`.
pub fn lemma3_margin(p: &ComplexPoly, spec: &OperatorSpec, z: Complex64) -> Result<f64> {
    Ok(OperatorImages::new(p, spec)?.lemma3(z).value)
}

/// `(|N[psi_n](z)| + |lambda_0|) M - |N[P](z)| - |N[P*](z)|`.
pub fn lemma4_margin(p: &ComplexPoly, spec: &OperatorSpec, z: Complex64, m: f64) -> Result<f64> {
    Ok(OperatorImages::new(p, spec)?.lemma4(z, m).value)
}

/// `n!/(n-m)! z^(n-m)`, the `m`-th derivative of `z^n`.
pub fn monomial_derivative_at(n: usize, m: usize, z: Complex64) -> Complex64 {
    if m > n {
        return Complex64::new(0.0, 0.0);
    }
    let falling: f64 = ((n - m + 1)..=n).map(|t| t as f64).product();
    z.powu((n - m) as u32) * falling
}

/// `factor |d^m/dz^m z^n| M - |P^(m)(z)|`. `factor` is 1 for the plain
/// derivative bound and 1/2 for zero-free or self-inversive `P`.
pub fn derivative_margin(p: &ComplexPoly, n: usize, order: usize, z: Complex64, m: f64, factor: f64) -> Margin {
    let bound = factor * monomial_derivative_at(n, order, z).norm() * m;
    Margin::new(bound, p.derivative(order).evaluate(z).norm())
}

/// `(|z|^n + 1) M / 2 - |P(z)|`.
pub fn growth_margin(p: &ComplexPoly, n: usize, z: Complex64, m: f64) -> Margin {
    let bound = 0.5 * (z.norm().powi(n as i32) + 1.0) * m;
    Margin::new(bound, p.evaluate(z).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: f64) -> Complex64 {
        c(v, 0.0)
    }

    fn z_pow_plus_one(n: usize) -> ComplexPoly {
        let mut coeffs = vec![real(0.0); n + 1];
        coeffs[0] = real(1.0);
        coeffs[n] = real(1.0);
        ComplexPoly::new(coeffs).with_ambient_degree(n).unwrap()
    }

    #[test]
    fn circle_max_examples() {
        for n in 1..6 {
            let cm = max_on_circle(&ComplexPoly::monomial(n), 1.0, 64);
            assert!((cm.value - 1.0).abs() < 1e-15);
            let cm = max_on_circle(&z_pow_plus_one(n), 1.0, default_samples(n));
            assert_eq!(cm.value, 2.0);
            assert!(cm.arg_angle.abs() < 1e-9 || (cm.arg_angle - TAU / n as f64 * (cm.arg_angle * n as f64 / TAU).round()).abs() < 1e-9);
        }
        let cm = max_on_circle(&ComplexPoly::from_real(&[1.0, 2.0]), 1.0, 4096);
        assert_eq!(cm.value, 3.0);
        assert_eq!(cm.arg_angle, 0.0);
    }

    #[test]
    fn circle_max_refines_off_grid_peak() {
        // |z - e^{i a}| peaks at the antipode of e^{ia}, between samples
        let a = 0.123_456;
        let p = ComplexPoly::new(vec![-Complex64::from_polar(1.0, a), real(1.0)]);
        let cm = max_on_circle(&p, 1.0, 16);
        assert!(cm.refined);
        assert!((cm.value - 2.0).abs() < 1e-12);
        assert!((cm.arg_angle - (a + PI)).abs() < 1e-6);
        let attained = p.evaluate(Complex64::from_polar(1.0, cm.arg_angle)).norm();
        assert_eq!(attained, cm.value);
    }

    #[test]
    fn circle_max_is_monotone_in_samples() {
        let p = ComplexPoly::new(vec![c(0.3, -1.0), c(2.0, 0.1), c(-0.7, 0.4), c(1.0, 1.0), c(0.2, 0.0)]);
        let mut last = 0.0;
        for samples in [16, 32, 64, 128, 256] {
            let v = max_on_circle(&p, 1.3, samples).value;
            assert!(v >= last - 1e-15 * v);
            last = v;
        }
    }

    #[test]
    fn theorem2_examples() {
        let f = ComplexPoly::from_roots(&[c(0.3, 0.2), c(-0.5, 0.1), c(0.0, -0.8)], c(1.2, 0.4))
            .unwrap()
            .with_ambient_degree(3)
            .unwrap();
        let spec = OperatorSpec::bernstein(3, vec![real(1.0), real(1.0)]).unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(1.0 + 0.3 * k as f64, 0.7 * k as f64);
            let rotated = f.scale(Complex64::from_polar(1.0, 2.1));
            assert!(theorem2_margin(&rotated, &f, &spec, z).unwrap().abs() < 1e-12 * (1.0 + apply_n(&f, &spec).unwrap().evaluate(z).norm()));
            let half = f.scale(real(0.5));
            let nf = apply_n(&f, &spec).unwrap().evaluate(z).norm();
            let m = theorem2_margin(&half, &f, &spec, z).unwrap();
            assert!((m - nf / 2.0).abs() <= 1e-12 * nf);
        }
    }

    #[test]
    fn theorem2_lower_power_against_monomial() {
        // f = z^n, P = z^(n-1), lambda = [1, 1, 1]
        let n = 4;
        let lambdas = vec![real(1.0); 3];
        let spec = OperatorSpec::bernstein(n, lambdas.clone()).unwrap();
        let f = ComplexPoly::monomial(n);
        let p = ComplexPoly::monomial(n - 1).with_ambient_degree(n).unwrap();
        let z = real(2.0);
        // direct sums: N[z^j](z) = sum_i lambda_i (n/2)^i C(j, i) z^j
        let series = |j: usize| -> f64 {
            (0..lambdas.len())
                .map(|i| (n as f64 / 2.0).powi(i as i32) * crate::operators::binomial(j, i))
                .sum::<f64>()
                * 2f64.powi(j as i32)
        };
        let expected = series(n) - series(n - 1);
        let got = theorem2_margin(&p, &f, &spec, z).unwrap();
        assert!((got - expected).abs() <= 1e-12 * series(n));
        assert!(got > 0.0);
    }

    #[test]
    fn corollary1_examples() {
        let n = 5;
        let spec = OperatorSpec::bernstein(n, vec![real(1.0), real(0.5)]).unwrap();
        let big_m = 1.7;
        let p = ComplexPoly::monomial(n).scale(Complex64::from_polar(big_m, 0.4));
        let measured = max_on_circle(&p, 1.0, default_samples(n)).value;
        for k in 0..10 {
            let z = Complex64::from_polar(1.0 + 0.5 * k as f64, 0.3 * k as f64);
            let m = corollary1_margin(&p, &spec, z, measured).unwrap();
            let scale = 1.0 + apply_n(&ComplexPoly::monomial(n), &spec).unwrap().evaluate(z).norm() * measured;
            assert!(m.abs() <= 1e-12 * scale);
        }

        let cst = real(-0.8);
        let p = ComplexPoly::constant(cst).with_ambient_degree(n).unwrap();
        let id = OperatorSpec::bernstein(n, vec![real(1.0)]).unwrap();
        let z = c(1.2, -0.3);
        let m = corollary1_margin(&p, &id, z, cst.norm()).unwrap();
        let expect = cst.norm() * (z.norm().powi(n as i32) - 1.0);
        assert!((m - expect).abs() < 1e-12);

        // n = 6, lambda = [1, 1, 1] on a fixed polynomial
        let p = ComplexPoly::new(vec![c(0.4, -0.2), c(-1.0, 0.3), c(0.0, 0.9), c(0.5, 0.5), c(-0.3, 0.0), c(0.1, 0.7), c(0.8, -0.1)]);
        let spec = OperatorSpec::bernstein(6, vec![real(1.0); 3]).unwrap();
        let big_m = max_on_circle(&p, 1.0, default_samples(6)).value;
        assert!(corollary1_margin(&p, &spec, real(1.5), big_m).unwrap() >= 0.0);
    }

    #[test]
    fn theorem3_examples() {
        let n = 5;
        let id = OperatorSpec::bernstein(n, vec![real(1.0)]).unwrap();
        // a z^n + b with |a| = |b| = 1 aligned on the positive axis
        let mut coeffs = vec![real(0.0); n + 1];
        coeffs[0] = Complex64::from_polar(1.0, 0.7);
        coeffs[n] = Complex64::from_polar(1.0, 0.7);
        let p = ComplexPoly::new(coeffs);
        let big_m = max_on_circle(&p, 1.0, default_samples(n)).value;
        assert!((big_m - 2.0).abs() < 1e-12);
        for x in [1.0, 1.5, 3.0] {
            let m = theorem3_margin(&p, &id, real(x), big_m).unwrap();
            assert!(m.abs() <= 1e-11 * x.powi(n as i32));
        }

        let cst = c(0.6, 0.8);
        let p = ComplexPoly::constant(cst);
        for x in [1.0, 1.3, 2.0] {
            let z = Complex64::from_polar(x, 0.4);
            let m = theorem3_margin(&p, &id, z, 1.0).unwrap();
            let expect = 0.5 * (x.powi(n as i32) + 1.0) - 1.0;
            assert!((m - expect).abs() < 1e-12);
        }

        let p = ComplexPoly::from_roots(&[real(2.0), c(0.0, 3.0), real(-2.0), real(-1.5)], real(1.0)).unwrap();
        let spec = OperatorSpec::bernstein(4, vec![real(1.0), real(0.0), real(1.0)]).unwrap();
        assert!(crate::operators::check_n_admissible(&spec, 1e-9).unwrap());
        let big_m = max_on_circle(&p, 1.0, default_samples(4)).value;
        assert!(theorem3_margin(&p, &spec, c(1.2, 0.1), big_m).unwrap() >= 0.0);
    }

    #[test]
    fn theorem4_examples() {
        for n in 1..8 {
            let p = z_pow_plus_one(n);
            let id = OperatorSpec::bernstein(n, vec![real(1.0)]).unwrap();
            let big_m = max_on_circle(&p, 1.0, default_samples(n)).value;
            assert!(theorem4_margin(&p, &id, real(1.0), big_m).unwrap().abs() <= 1e-15);
            let m3 = theorem4_margin(&p, &id, real(3.0), big_m).unwrap();
            assert!(m3.abs() <= 1e-15 * 3f64.powi(n as i32));
        }
        let id = OperatorSpec::bernstein(3, vec![real(1.0)]).unwrap();
        assert_eq!(
            theorem4_margin(&ComplexPoly::monomial(3), &id, real(1.0), 1.0),
            Err(PolyError::NotSelfInversive)
        );
    }

    #[test]
    fn lemma_examples() {
        // self-inversive with all zeros on the circle: P = P*
        let p = z_pow_plus_one(4);
        let spec = OperatorSpec::bernstein(4, vec![real(1.0), real(0.3)]).unwrap();
        assert!(lemma3_margin(&p, &spec, c(1.4, 0.2)).unwrap().abs() < 1e-12);

        // P = z + 2, n = 1: P* = 2z + 1; at z = 2, 5 - 4
        let p = ComplexPoly::from_real(&[2.0, 1.0]).with_ambient_degree(1).unwrap();
        let id1 = OperatorSpec::bernstein(1, vec![real(1.0)]).unwrap();
        assert_eq!(lemma3_margin(&p, &id1, real(2.0)).unwrap(), 1.0);

        let cst = c(-0.3, 0.4);
        let p = ComplexPoly::constant(cst).with_ambient_degree(3).unwrap();
        let id3 = OperatorSpec::bernstein(3, vec![real(1.0)]).unwrap();
        let z = c(1.1, 0.5);
        let expect = cst.norm() * (z.norm().powi(3) - 1.0);
        assert!((lemma3_margin(&p, &id3, z).unwrap() - expect).abs() < 1e-14);

        // psi_n and z^n + 1 at positive reals
        for x in [1.0, 1.7, 4.0] {
            let m = lemma4_margin(&ComplexPoly::monomial(5), &OperatorSpec::bernstein(5, vec![real(1.0)]).unwrap(), real(x), 1.0).unwrap();
            assert!(m.abs() <= 1e-14 * x.powi(5));
            let m = lemma4_margin(&z_pow_plus_one(5), &OperatorSpec::bernstein(5, vec![real(1.0)]).unwrap(), real(x), 2.0).unwrap();
            assert!(m.abs() <= 1e-14 * x.powi(5));
        }

        let p = ComplexPoly::new(vec![c(0.4, -0.2), c(-1.0, 0.3), c(0.0, 0.9), c(0.5, 0.5), c(-0.3, 0.0), c(0.1, 0.7)]);
        let spec = OperatorSpec::bernstein(5, vec![real(1.0), real(2.0), real(1.0)]).unwrap();
        assert!(crate::operators::check_n_admissible(&spec, 1e-9).unwrap());
        let big_m = max_on_circle(&p, 1.0, default_samples(5)).value;
        let m = lemma4_margin(&p, &spec, c(0.0, 1.7), big_m).unwrap();
        assert!(m >= 0.0);
    }

    #[test]
    fn derivative_and_growth_forms() {
        assert_eq!(monomial_derivative_at(4, 2, real(2.0)), real(48.0));
        assert_eq!(monomial_derivative_at(2, 3, real(2.0)), real(0.0));
        let p = z_pow_plus_one(3);
        let m = growth_margin(&p, 3, real(1.0), 2.0);
        assert_eq!(m.value, 0.0);
        let d = derivative_margin(&p, 3, 1, real(1.0), 2.0, 0.5);
        assert_eq!(d.value, 0.0);
        assert_eq!(d.bound, 3.0);
    }
}
