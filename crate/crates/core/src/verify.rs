//! Randomized verification of the containment theorem and the operator
//! inequalities.
//!
//! Each trial draws an instance from a per-trial RNG stream
//! (`ChaCha8Rng` seeded with the run seed, stream = trial index), evaluates
//! the relevant margin on the standard grid, and reduces to a
//! [`VerificationReport`]. Trials are independent, so serial and parallel
//! runs produce identical reports.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};
use crate::maxmod::{
    default_samples, derivative_margin, growth_margin, max_on_circle, Margin, OperatorImages,
};
use crate::operators::{check_n_admissible, compose_h, lambdas_from_g, phi_of, OperatorSpec};
use crate::poly::ComplexPoly;
use crate::regions::{min_s_for, MIN_S_FLOOR};
use crate::roots::find_roots_default;

/// Containment tolerance for the composite-polynomial theorem.
pub const CONTAINMENT_TOL: f64 = 1e-6;
/// Tolerance on normalized margins `value / (1 + |bound|)`.
pub const MARGIN_TOL: f64 = 1e-9;
/// Equality instances must stay within this of zero at every grid point.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Attained-bound instances must reach a grid minimum at or below this.
pub const ATTAINMENT_TOL: f64 = 1e-6;
/// Relative slack demanded when certifying `|P| <= |f|` on the unit circle.
pub const MAJORIZATION_SLACK: f64 = 1e-6;
pub const MAJORIZATION_SAMPLES: usize = 4096;
/// Extra attempts per trial after a numerical failure.
pub const RESAMPLE_BUDGET: usize = 3;
pub const MAX_DEGREE: usize = 64;

const GRID_RADII: [f64; 5] = [1.0, 1.1, 1.5, 2.0, 5.0];
const GRID_ANGLES: usize = 64;
const GRID_RANDOM_POINTS: usize = 100;
const GRID_MAX_RADIUS: f64 = 10.0;
const MAX_PHI_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// zeros of the composite `h` lie in `|z| <= r max(1, s)`
    T1,
    /// `|N[P]| <= |N[f]|` when `|P| <= |f|` on the circle
    T2,
    /// `|N[P]| <= |N[psi_n]| M`
    C1,
    /// zero-free bound `(|N[psi_n]| + |lambda_0|) M / 2`
    T3,
    /// self-inversive bound, same form as T3
    T4,
    /// `|N[P]| <= |N[P*]|` for zero-free `P`
    L3,
    /// `|N[P]| + |N[P*]| <= (|N[psi_n]| + |lambda_0|) M`
    L4,
    /// `|P^(m)| <= |(z^n)^(m)| M`
    R1,
    /// halved derivative bound and the growth bound for zero-free `P`
    R2,
    /// halved derivative bound for self-inversive `P`
    R3,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::T1,
        TheoremId::T2,
        TheoremId::C1,
        TheoremId::T3,
        TheoremId::T4,
        TheoremId::L3,
        TheoremId::L4,
        TheoremId::R1,
        TheoremId::R2,
        TheoremId::R3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T1 => "T1",
            TheoremId::T2 => "T2",
            TheoremId::C1 => "C1",
            TheoremId::T3 => "T3",
            TheoremId::T4 => "T4",
            TheoremId::L3 => "L3",
            TheoremId::L4 => "L4",
            TheoremId::R1 => "R1",
            TheoremId::R2 => "R2",
            TheoremId::R3 => "R3",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            TheoremId::T1 => CONTAINMENT_TOL,
            _ => MARGIN_TOL,
        }
    }

    fn sharpness_kind(self) -> Option<SharpnessKind> {
        match self {
            TheoremId::T2 | TheoremId::C1 | TheoremId::L4 => Some(SharpnessKind::Everywhere),
            TheoremId::T3 | TheoremId::T4 => Some(SharpnessKind::Attained),
            _ => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| PolyError::InvalidConfig(format!("unknown theorem id {s:?}")))
    }
}

/// Instance generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub degree_min: usize,
    pub degree_max: usize,
    /// multiplies every generated leading coefficient
    pub coefficient_scale: f64,
    /// disk radius for the majorant `f` of T2; at most 1
    pub zero_radius: f64,
    pub seed: u64,
    pub trials: usize,
    /// force `m = n` for `g` and `phi`
    #[serde(default)]
    pub full_order: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            degree_min: 1,
            degree_max: 12,
            coefficient_scale: 1.0,
            zero_radius: 1.0,
            seed: 0,
            trials: 100,
            full_order: false,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64, trials: usize) -> Self {
        GenConfig {
            seed,
            trials,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree_min < 1 || self.degree_max > MAX_DEGREE || self.degree_min > self.degree_max {
            return Err(PolyError::InvalidConfig(format!(
                "degree range {}..={} must lie within 1..={MAX_DEGREE}",
                self.degree_min, self.degree_max
            )));
        }
        if self.trials < 1 {
            return Err(PolyError::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.coefficient_scale > 0.0 && self.coefficient_scale.is_finite()) {
            return Err(PolyError::InvalidConfig("coefficient_scale must be positive".into()));
        }
        if !(self.zero_radius > 0.0 && self.zero_radius <= 1.0) {
            return Err(PolyError::InvalidConfig("zero_radius must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Run-level knobs that do not affect instance generation.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// overrides [`TheoremId::default_tol`]
    pub tol: Option<f64>,
    /// circle samples for `M`; defaults to `max(4096, 64 n)`
    pub samples: Option<usize>,
    pub jobs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: None,
            samples: None,
            jobs: 1,
        }
    }
}

/// RNG stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

// ---------------------------------------------------------------------------
// generators

fn unit_phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..TAU))
}

fn random_leading<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Complex64 {
    unit_phase(rng) * (rng.random_range(0.5..=2.0) * cfg.coefficient_scale)
}

fn uniform_in_disk<R: Rng>(centre: Complex64, radius: f64, rng: &mut R) -> Complex64 {
    loop {
        let x: f64 = rng.random_range(-1.0..=1.0);
        let y: f64 = rng.random_range(-1.0..=1.0);
        if x * x + y * y <= 1.0 {
            return centre + Complex64::new(x, y) * radius;
        }
    }
}

pub fn sample_degree<R: Rng>(cfg: &GenConfig, rng: &mut R) -> usize {
    rng.random_range(cfg.degree_min..=cfg.degree_max)
}

fn roots_in_disk<R: Rng>(n: usize, r: f64, rng: &mut R) -> Vec<Complex64> {
    (0..n)
        .map(|_| uniform_in_disk(Complex64::new(0.0, 0.0), r, rng))
        .collect()
}

/// Degree-`n` polynomial with zeros uniform in `|z| <= r`.
pub fn poly_zeros_in_disk<R: Rng>(n: usize, r: f64, cfg: &GenConfig, rng: &mut R) -> ComplexPoly {
    let roots = roots_in_disk(n, r, rng);
    let lead = random_leading(cfg, rng);
    from_roots_with_ambient(&roots, lead, n)
}

pub fn gen_poly_zeros_in_disk<R: Rng>(cfg: &GenConfig, r: f64, rng: &mut R) -> ComplexPoly {
    let n = sample_degree(cfg, rng);
    poly_zeros_in_disk(n, r, cfg, rng)
}

/// Degree-`n` polynomial whose zeros have modulus uniform in `[1, 4]`.
pub fn poly_zero_free_unit_disk<R: Rng>(n: usize, cfg: &GenConfig, rng: &mut R) -> ComplexPoly {
    let roots: Vec<Complex64> = (0..n)
        .map(|_| Complex64::from_polar(rng.random_range(1.0..=4.0), rng.random_range(0.0..TAU)))
        .collect();
    let lead = random_leading(cfg, rng);
    from_roots_with_ambient(&roots, lead, n)
}

pub fn gen_poly_zero_free_unit_disk<R: Rng>(cfg: &GenConfig, rng: &mut R) -> ComplexPoly {
    let n = sample_degree(cfg, rng);
    poly_zero_free_unit_disk(n, cfg, rng)
}

/// Self-inversive polynomial of degree `n` from inverse root pairs
/// `(b, 1/conj b)` plus one unimodular root when `n` is odd.
pub fn poly_self_inversive<R: Rng>(n: usize, cfg: &GenConfig, rng: &mut R) -> Result<ComplexPoly> {
    let mut roots = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let b = Complex64::from_polar(rng.random_range(1.1..=3.0), rng.random_range(0.0..TAU));
        roots.push(b);
        roots.push(b / b.norm_sqr());
    }
    if n % 2 == 1 {
        roots.push(unit_phase(rng));
    }
    let lead = random_leading(cfg, rng);
    self_inversive_from_roots(&roots, lead)
}

/// Expands `lead * prod (z - root)` for an inversion-symmetric root set and
/// rotates it so that `P = P*`.
pub fn self_inversive_from_roots(roots: &[Complex64], lead: Complex64) -> Result<ComplexPoly> {
    let n = roots.len();
    let p = ComplexPoly::from_roots(roots, lead)?;
    let trailing = p.coeff(0);
    if trailing.norm() < f64::MIN_POSITIVE {
        return Err(PolyError::DegenerateInstance("trailing coefficient underflow".into()));
    }
    // P* = kappa P with kappa = conj(a_0) / a_n; e^{i arg(kappa)/2} P is fixed by *
    let kappa = trailing.conj() / p.coeff(n);
    let rotated = p.scale(Complex64::from_polar(1.0, kappa.arg() / 2.0));
    let coeffs = (0..=n)
        .map(|k| 0.5 * (rotated.coeff(k) + rotated.coeff(n - k).conj()))
        .collect();
    ComplexPoly::new(coeffs).with_ambient_degree(n)
}

pub fn gen_self_inversive<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Result<ComplexPoly> {
    let n = sample_degree(cfg, rng);
    poly_self_inversive(n, cfg, rng)
}

/// Arbitrary member of `P_n`: Gaussian coefficients, degree `n` three times
/// in four, otherwise a uniformly drawn lower degree.
pub fn poly_any<R: Rng>(n: usize, cfg: &GenConfig, rng: &mut R) -> ComplexPoly {
    let degree = if rng.random_range(0..4) == 0 {
        rng.random_range(0..n)
    } else {
        n
    };
    let coeffs: Vec<Complex64> = (0..=degree)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * cfg.coefficient_scale
        })
        .collect();
    ComplexPoly::new(coeffs)
        .with_ambient_degree(n)
        .expect("degree <= n by construction")
}

/// Spec for `N` whose `phi` has every zero in `|z| <= |z - n/2|`.
pub fn gen_admissible_spec<R: Rng>(cfg: &GenConfig, n: usize, rng: &mut R) -> OperatorSpec {
    let m = if cfg.full_order {
        n
    } else {
        rng.random_range(0..=n.min(MAX_PHI_ORDER))
    };
    let half = n as f64 / 2.0;
    let centre = Complex64::new(-(n as f64) / 4.0, 0.0);
    let roots: Vec<Complex64> = (0..m)
        .map(|_| loop {
            let w = uniform_in_disk(centre, n as f64, rng);
            if w.norm() <= (w - half).norm() {
                break w;
            }
        })
        .collect();
    let lead = random_leading(cfg, rng);
    let phi = ComplexPoly::from_roots(&roots, lead).expect("nonzero leading coefficient");
    let lambdas = lambdas_from_g(&phi, n).expect("m <= n");
    OperatorSpec::bernstein(n, lambdas).expect("valid by construction")
}

/// Spec with a single nonzero `lambda_order`.
fn derivative_spec<R: Rng>(n: usize, order: usize, cfg: &GenConfig, rng: &mut R) -> OperatorSpec {
    let mut lambdas = vec![Complex64::new(0.0, 0.0); order + 1];
    lambdas[order] = random_leading(cfg, rng);
    OperatorSpec::bernstein(n, lambdas).expect("valid by construction")
}

fn from_roots_with_ambient(roots: &[Complex64], lead: Complex64, n: usize) -> ComplexPoly {
    ComplexPoly::from_roots(roots, lead)
        .and_then(|p| p.with_ambient_degree(n))
        .expect("degree n by construction")
}

/// `|z| = 1, 1.1, 1.5, 2, 5` at 64 angles each, then 100 random points with
/// `|z|` uniform in `[1, 10]`.
pub fn standard_grid<R: Rng>(rng: &mut R) -> Vec<Complex64> {
    let mut grid = Vec::with_capacity(GRID_RADII.len() * GRID_ANGLES + GRID_RANDOM_POINTS);
    for &radius in &GRID_RADII {
        for k in 0..GRID_ANGLES {
            grid.push(Complex64::from_polar(radius, TAU * k as f64 / GRID_ANGLES as f64));
        }
    }
    for _ in 0..GRID_RANDOM_POINTS {
        grid.push(Complex64::from_polar(
            rng.random_range(1.0..=GRID_MAX_RADIUS),
            rng.random_range(0.0..TAU),
        ));
    }
    grid
}

// ---------------------------------------------------------------------------
// instances

/// One generated input to a verifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub theorem: TheoremId,
    /// operand `P` (absent for T1)
    pub p: Option<ComplexPoly>,
    /// `f` of T1 and the majorant of T2
    pub f: Option<ComplexPoly>,
    pub spec: OperatorSpec,
    /// T1 disk radius
    pub r: Option<f64>,
    /// T1 region ratio
    pub s: Option<f64>,
}

impl Instance {
    fn operand(&self) -> Result<&ComplexPoly> {
        self.p
            .as_ref()
            .ok_or_else(|| PolyError::InvalidConfig(format!("{} instance needs p", self.theorem)))
    }

    fn majorant(&self) -> Result<&ComplexPoly> {
        self.f
            .as_ref()
            .ok_or_else(|| PolyError::InvalidConfig(format!("{} instance needs f", self.theorem)))
    }

    fn require_bernstein(&self) -> Result<()> {
        let half = self.spec.n() as f64 / 2.0;
        if (self.spec.sigma() - half).norm() > 1e-12 * half.max(1.0) {
            return Err(PolyError::SigmaMismatch {
                expected: half,
                found: format!("{}", self.spec.sigma()),
            });
        }
        Ok(())
    }

    /// Rejects instances whose hypotheses do not hold, so that no conclusion
    /// is claimed for them.
    pub fn check_hypotheses(&self) -> Result<()> {
        let n = self.spec.n();
        match self.theorem {
            TheoremId::T1 => {
                let f = self.majorant()?;
                f.require_degree(n)?;
                let r = self.r.ok_or_else(|| PolyError::InvalidConfig("T1 needs r".into()))?;
                if !crate::regions::zeros_in_disk(f, r, 1e-9)? {
                    return Err(PolyError::InvalidConfig("zeros of f leave |z| <= r".into()));
                }
                let s = self.s.ok_or_else(|| PolyError::InvalidConfig("T1 needs s".into()))?;
                let g = phi_of(&self.spec);
                if g.degree() > 0 {
                    let region = crate::regions::ApolloniusRegion::new(s, self.spec.sigma())?;
                    let rs = find_roots_default(&g)?;
                    if !rs.all_converged() {
                        return Err(PolyError::RootFindingFailed("zeros of g".into()));
                    }
                    if !rs.roots.iter().all(|&b| region.contains(b, 1e-9)) {
                        return Err(PolyError::InvalidConfig("zeros of g leave the region".into()));
                    }
                }
                Ok(())
            }
            _ => {
                self.require_bernstein()?;
                if !check_n_admissible(&self.spec, 1e-9)? {
                    return Err(PolyError::InvalidConfig("operator is not admissible".into()));
                }
                let p = self.operand()?;
                if p.degree() > n {
                    return Err(PolyError::DegreeExceedsN { degree: p.degree(), n });
                }
                match self.theorem {
                    TheoremId::T3 | TheoremId::L3 | TheoremId::R2 => {
                        if p.degree() > 0 && !zero_free_in_open_disk(p)? {
                            return Err(PolyError::InvalidConfig("P vanishes in |z| < 1".into()));
                        }
                    }
                    TheoremId::T4 | TheoremId::R3 => {
                        let p = p.clone().with_ambient_degree(n)?;
                        if !p.is_self_inversive(crate::maxmod::SELF_INVERSIVE_TOL)? {
                            return Err(PolyError::NotSelfInversive);
                        }
                    }
                    TheoremId::T2 => {
                        let f = self.majorant()?;
                        f.require_degree(n)?;
                        if !crate::regions::zeros_in_disk(f, 1.0, 1e-9)? {
                            return Err(PolyError::InvalidConfig("zeros of f leave |z| <= 1".into()));
                        }
                        certify_majorization(p, f, -MARGIN_TOL)?;
                    }
                    _ => {}
                }
                Ok(())
            }
        }
    }
}

fn zero_free_in_open_disk(p: &ComplexPoly) -> Result<bool> {
    let rs = find_roots_default(p)?;
    if !rs.all_converged() {
        return Err(PolyError::RootFindingFailed("zeros of P".into()));
    }
    Ok(rs.roots.iter().all(|w| w.norm() >= 1.0 - 1e-9))
}

/// Dense-sample check that `|f| - |P| > slack * max|f|` on the unit circle.
fn certify_majorization(p: &ComplexPoly, f: &ComplexPoly, slack: f64) -> Result<()> {
    let pts: Vec<Complex64> = (0..MAJORIZATION_SAMPLES)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / MAJORIZATION_SAMPLES as f64))
        .collect();
    let fv: Vec<f64> = pts.iter().map(|&z| f.evaluate(z).norm()).collect();
    let fmax = fv.iter().copied().fold(0.0, f64::max);
    let ok = pts
        .iter()
        .zip(&fv)
        .all(|(&z, &fz)| fz - p.evaluate(z).norm() > slack * fmax);
    if ok {
        Ok(())
    } else {
        Err(PolyError::DegenerateInstance("majorization not certified".into()))
    }
}

/// Draws the instance for `theorem` from `rng`.
pub fn generate_instance<R: Rng>(theorem: TheoremId, cfg: &GenConfig, rng: &mut R) -> Result<Instance> {
    let n = sample_degree(cfg, rng);
    let bare = |spec: OperatorSpec, p: ComplexPoly| Instance {
        theorem,
        p: Some(p),
        f: None,
        spec,
        r: None,
        s: None,
    };
    let inst = match theorem {
        TheoremId::T1 => {
            let r = rng.random_range(0.3..=2.0);
            let f = poly_zeros_in_disk(n, r, cfg, rng);
            let m = if cfg.full_order { n } else { rng.random_range(0..=n) };
            let g_roots: Vec<Complex64> = (0..m)
                .map(|_| uniform_in_disk(Complex64::new(0.0, 0.0), 3.0, rng))
                .collect();
            let g_lead = random_leading(cfg, rng);
            let sigma = Complex64::from_polar(rng.random_range(0.2..=2.0), rng.random_range(0.0..TAU));
            let s = if g_roots.is_empty() {
                MIN_S_FLOOR
            } else {
                min_s_for(&g_roots, sigma)?
                    .finite()
                    .ok_or_else(|| PolyError::DegenerateInstance("a zero of g sits at sigma".into()))?
            };
            let g = ComplexPoly::from_roots(&g_roots, g_lead)?;
            let spec = OperatorSpec::new(n, lambdas_from_g(&g, n)?, sigma)?;
            Instance {
                theorem,
                p: None,
                f: Some(f),
                spec,
                r: Some(r),
                s: Some(s),
            }
        }
        TheoremId::T2 => {
            let roots = roots_in_disk(n, cfg.zero_radius, rng);
            let lead = random_leading(cfg, rng);
            let f = from_roots_with_ambient(&roots, lead, n);
            let p = if rng.random_bool(0.5) {
                let c = unit_phase(rng) * rng.random_range(0.0..=1.0);
                f.scale(c)
            } else {
                // swap one linear factor of f for (z + u)/2, then rescale
                let i = rng.random_range(0..n);
                let others: Vec<Complex64> = roots
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &w)| w)
                    .collect();
                let u = uniform_in_disk(Complex64::new(0.0, 0.0), 1.0, rng);
                let q = ComplexPoly::from_roots(&others, lead)?;
                let factor = ComplexPoly::new(vec![u * 0.5, Complex64::new(0.5, 0.0)]);
                let raw = &factor * &q;
                let ratio = (0..MAJORIZATION_SAMPLES)
                    .map(|k| {
                        let z = Complex64::from_polar(1.0, TAU * k as f64 / MAJORIZATION_SAMPLES as f64);
                        raw.evaluate(z).norm() / f.evaluate(z).norm()
                    })
                    .fold(0.0, f64::max);
                if !(ratio.is_finite() && ratio > 0.0) {
                    return Err(PolyError::DegenerateInstance("f vanishes on the circle".into()));
                }
                let kappa = rng.random_range(0.5..=0.95);
                let p = raw.scale(unit_phase(rng) * (kappa / ratio));
                certify_majorization(&p, &f, MAJORIZATION_SLACK)?;
                p
            }
            .with_ambient_degree(n)?;
            let spec = gen_admissible_spec(cfg, n, rng);
            Instance {
                theorem,
                p: Some(p),
                f: Some(f),
                spec,
                r: None,
                s: None,
            }
        }
        TheoremId::C1 | TheoremId::L4 => {
            let p = poly_any(n, cfg, rng);
            bare(gen_admissible_spec(cfg, n, rng), p)
        }
        TheoremId::T3 | TheoremId::L3 => {
            let p = poly_zero_free_unit_disk(n, cfg, rng);
            bare(gen_admissible_spec(cfg, n, rng), p)
        }
        TheoremId::T4 => {
            let p = poly_self_inversive(n, cfg, rng)?;
            bare(gen_admissible_spec(cfg, n, rng), p)
        }
        TheoremId::R1 => {
            let p = poly_any(n, cfg, rng);
            let order = rng.random_range(1..=n);
            bare(derivative_spec(n, order, cfg, rng), p)
        }
        TheoremId::R2 => {
            let p = poly_zero_free_unit_disk(n, cfg, rng);
            // order 0 selects the growth bound
            let order = rng.random_range(0..=n);
            bare(derivative_spec(n, order, cfg, rng), p)
        }
        TheoremId::R3 => {
            let p = poly_self_inversive(n, cfg, rng)?;
            let order = rng.random_range(1..=n);
            bare(derivative_spec(n, order, cfg, rng), p)
        }
    };
    Ok(inst)
}

// ---------------------------------------------------------------------------
// evaluation

/// A signed margin, its normalization scale, and where it was taken.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    value: f64,
    scale: f64,
    z: Option<Complex64>,
}

impl Point {
    fn normalized(&self) -> f64 {
        self.value / self.scale
    }

    fn from_margin(m: Margin, z: Complex64) -> Self {
        Point {
            value: m.value,
            scale: m.scale(),
            z: Some(z),
        }
    }
}

/// Evaluates the margin of `inst` at `z` (or the root containment for T1,
/// which ignores `z`) given the circle maximum `m` of the operand.
fn margin_at(inst: &Instance, images: Option<&Images>, z: Complex64, m: f64) -> Result<Margin> {
    let n = inst.spec.n();
    let order = inst.spec.m();
    Ok(match inst.theorem {
        TheoremId::T1 => unreachable!("containment is not a pointwise margin"),
        TheoremId::T2 => {
            let im = images.expect("T2 images");
            let nf = im.nf.as_ref().expect("N[f]").evaluate(z).norm();
            Margin {
                value: nf - im.ops.np.evaluate(z).norm(),
                bound: nf,
            }
        }
        TheoremId::C1 => images.expect("images").ops.corollary1(z, m),
        TheoremId::T3 | TheoremId::T4 => images.expect("images").ops.theorem3(z, m),
        TheoremId::L3 => images.expect("images").ops.lemma3(z),
        TheoremId::L4 => images.expect("images").ops.lemma4(z, m),
        TheoremId::R1 => derivative_margin(inst.operand()?, n, order, z, m, 1.0),
        TheoremId::R2 if order == 0 => growth_margin(inst.operand()?, n, z, m),
        TheoremId::R2 | TheoremId::R3 => derivative_margin(inst.operand()?, n, order, z, m, 0.5),
    })
}

struct Images {
    ops: OperatorImages,
    nf: Option<ComplexPoly>,
}

fn images_for(inst: &Instance) -> Result<Option<Images>> {
    match inst.theorem {
        TheoremId::T1 | TheoremId::R1 | TheoremId::R2 | TheoremId::R3 => Ok(None),
        _ => {
            inst.require_bernstein()?;
            let ops = OperatorImages::new(inst.operand()?, &inst.spec)?;
            let nf = match inst.theorem {
                TheoremId::T2 => Some(crate::operators::apply_n(inst.majorant()?, &inst.spec)?),
                _ => None,
            };
            Ok(Some(Images { ops, nf }))
        }
    }
}

fn uses_circle_max(theorem: TheoremId) -> bool {
    !matches!(theorem, TheoremId::T1 | TheoremId::T2 | TheoremId::L3)
}

/// Root containment for T1: `value = r max(1, s) - max |w|`, scale `max(1, bound)`.
fn containment(inst: &Instance) -> Result<Point> {
    let f = inst.majorant()?;
    let r = inst.r.ok_or_else(|| PolyError::InvalidConfig("T1 needs r".into()))?;
    let s = inst.s.ok_or_else(|| PolyError::InvalidConfig("T1 needs s".into()))?;
    let h = compose_h(f, &inst.spec)?;
    let bound = r * s.max(1.0);
    let reach = if h.degree() == 0 {
        0.0
    } else {
        let rs = find_roots_default(&h)?;
        rs.max_root_modulus()
            .map_err(|e| PolyError::RootFindingFailed(e.to_string()))?
    };
    Ok(Point {
        value: bound - reach,
        scale: bound.max(1.0),
        z: None,
    })
}

fn circle_max_of(inst: &Instance, samples: Option<usize>) -> Result<Option<f64>> {
    if !uses_circle_max(inst.theorem) {
        return Ok(None);
    }
    let p = inst.operand()?;
    let samples = samples.unwrap_or_else(|| default_samples(inst.spec.n()));
    Ok(Some(max_on_circle(p, 1.0, samples).value))
}

/// Worst (smallest normalized) point over `points`, with ties going to the
/// earliest point.
fn worst_over(inst: &Instance, points: &[Complex64], m: Option<f64>) -> Result<Point> {
    if inst.theorem == TheoremId::T1 {
        return containment(inst);
    }
    let images = images_for(inst)?;
    let m = m.unwrap_or(0.0);
    let mut worst: Option<Point> = None;
    for &z in points {
        let pt = Point::from_margin(margin_at(inst, images.as_ref(), z, m)?, z);
        if !pt.value.is_finite() {
            return Err(PolyError::DegenerateInstance(format!("non-finite margin at {z}")));
        }
        if worst.is_none_or(|w| pt.normalized() < w.normalized()) {
            worst = Some(pt);
        }
    }
    worst.ok_or(PolyError::EmptyPointSet)
}

/// Equality instance used by the sharpness sub-check, plus any extra points
/// where the bound is attained.
fn equality_instance<R: Rng>(inst: &Instance, rng: &mut R) -> Option<(Instance, Vec<Complex64>)> {
    let n = inst.spec.n();
    let spec = inst.spec.clone();
    let with_p = |p: ComplexPoly, f: Option<ComplexPoly>| Instance {
        theorem: inst.theorem,
        p: Some(p),
        f,
        spec: spec.clone(),
        r: None,
        s: None,
    };
    let alpha = unit_phase(rng);
    match inst.theorem {
        TheoremId::T2 => {
            let f = inst.f.clone()?;
            Some((with_p(f.scale(alpha), Some(f)), Vec::new()))
        }
        TheoremId::C1 => {
            let big_m = rng.random_range(0.5..=2.0);
            Some((with_p(ComplexPoly::monomial(n).scale(alpha * big_m), None), Vec::new()))
        }
        TheoremId::L4 => Some((with_p(ComplexPoly::monomial(n), None), Vec::new())),
        TheoremId::T3 | TheoremId::T4 => {
            // a z^n + b with |a| = |b| = 1; T4 uses z^n + 1
            let (a, b) = if inst.theorem == TheoremId::T3 {
                (alpha, unit_phase(rng))
            } else {
                (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
            };
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
            coeffs[0] = b;
            coeffs[n] = a;
            let p = ComplexPoly::new(coeffs).with_ambient_degree(n).ok()?;
            let z = aligned_unit_point(&spec, a, b);
            Some((with_p(p, None), vec![z]))
        }
        _ => None,
    }
}

/// Point on `|z| = 1` where `a phi(n/2) z^n` and `b lambda_0` share a phase,
/// so `|N[a z^n + b](z)| = |a phi(n/2)| + |b lambda_0|`.
pub fn aligned_unit_point(spec: &OperatorSpec, a: Complex64, b: Complex64) -> Complex64 {
    let n = spec.n() as f64;
    let top = a * phi_of(spec).evaluate(Complex64::new(n / 2.0, 0.0));
    let bottom = b * spec.lambda0();
    if bottom.norm() == 0.0 || top.norm() == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, (bottom.arg() - top.arg()) / n)
}

/// Per-trial sharpness statistics: `(min normalized, max |normalized|)`.
fn sharpness_stats(eq: &Instance, points: &[Complex64], samples: Option<usize>) -> Result<(f64, f64)> {
    let images = images_for(eq)?;
    let m = circle_max_of(eq, samples)?.unwrap_or(0.0);
    let mut min = f64::INFINITY;
    let mut max_abs: f64 = 0.0;
    for &z in points {
        let v = Point::from_margin(margin_at(eq, images.as_ref(), z, m)?, z).normalized();
        min = min.min(v);
        max_abs = max_abs.max(v.abs());
    }
    Ok((min, max_abs))
}

// ---------------------------------------------------------------------------
// reports

/// The instance and point attaining a report's worst margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: u64,
    pub instance: Instance,
    #[serde(with = "crate::json::complex_opt")]
    pub z: Option<Complex64>,
    /// circle maximum `M` of the operand, when the bound uses it
    pub max_modulus: Option<f64>,
    /// raw margin (bound side minus operator side)
    pub margin: f64,
    pub scale: f64,
}

impl Witness {
    pub fn normalized(&self) -> f64 {
        self.margin / self.scale
    }
}

/// Recomputes the normalized margin recorded in a witness.
pub fn replay_witness(w: &Witness) -> Result<f64> {
    let inst = &w.instance;
    if inst.theorem == TheoremId::T1 {
        return Ok(containment(inst)?.normalized());
    }
    let z = w
        .z
        .ok_or_else(|| PolyError::InvalidConfig("witness is missing z".into()))?;
    Ok(worst_over(inst, &[z], w.max_modulus)?.normalized())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharpnessKind {
    /// equality instance: `|margin| <= EQUALITY_TOL` at every grid point
    Everywhere,
    /// extremal instance: grid minimum `<= ATTAINMENT_TOL`
    Attained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sharpness {
    pub kind: SharpnessKind,
    /// `max |normalized|` (everywhere) or the largest per-trial grid minimum (attained)
    pub worst: f64,
    /// smallest normalized margin seen on any equality instance
    pub min_margin: f64,
    pub threshold: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    /// attempts rejected for numerical reasons and resampled
    pub inconclusive: usize,
    /// trials that exhausted the resample budget
    pub skipped: usize,
    /// smallest normalized margin; negative beyond `tolerance` is a failure
    pub worst_margin: Option<f64>,
    pub tolerance: f64,
    pub witness: Option<Witness>,
    pub sharpness: Option<Sharpness>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub config: GenConfig,
}

impl VerificationReport {
    pub fn verdict(&self) -> Verdict {
        let sharp_ok = self.sharpness.as_ref().is_none_or(|s| s.holds);
        if self.failures > 0 || !sharp_ok {
            Verdict::Fail
        } else if self.skipped > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct TrialOutcome {
    inconclusive: usize,
    evaluated: Option<Evaluated>,
}

struct Evaluated {
    worst: Point,
    witness: Witness,
    sharp: Option<(f64, f64)>,
}

fn attempt<R: Rng>(
    theorem: TheoremId,
    cfg: &GenConfig,
    opts: &VerifyOptions,
    trial: u64,
    rng: &mut R,
) -> Result<Evaluated> {
    let inst = generate_instance(theorem, cfg, rng)?;
    evaluate(inst, opts, trial, rng)
}

fn evaluate<R: Rng>(inst: Instance, opts: &VerifyOptions, trial: u64, rng: &mut R) -> Result<Evaluated> {
    let grid = if inst.theorem == TheoremId::T1 {
        Vec::new()
    } else {
        standard_grid(rng)
    };
    let m = circle_max_of(&inst, opts.samples)?;
    let worst = worst_over(&inst, &grid, m)?;
    let sharp = match equality_instance(&inst, rng) {
        Some((eq, extra)) => {
            let mut pts = grid.clone();
            pts.extend(extra);
            Some(sharpness_stats(&eq, &pts, opts.samples)?)
        }
        None => None,
    };
    let witness = Witness {
        trial,
        instance: inst,
        z: worst.z,
        max_modulus: m,
        margin: worst.value,
        scale: worst.scale,
    };
    Ok(Evaluated {
        worst,
        witness,
        sharp,
    })
}

fn run_trial(theorem: TheoremId, cfg: &GenConfig, opts: &VerifyOptions, trial: u64) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut inconclusive = 0;
    for _ in 0..=RESAMPLE_BUDGET {
        match attempt(theorem, cfg, opts, trial, &mut rng) {
            Ok(ev) => {
                return TrialOutcome {
                    inconclusive,
                    evaluated: Some(ev),
                }
            }
            Err(_) => inconclusive += 1,
        }
    }
    TrialOutcome {
        inconclusive,
        evaluated: None,
    }
}

fn reduce(
    theorem: TheoremId,
    cfg: &GenConfig,
    opts: &VerifyOptions,
    outcomes: Vec<TrialOutcome>,
) -> VerificationReport {
    let tol = opts.tol.unwrap_or(theorem.default_tol());
    let mut report = VerificationReport {
        theorem,
        trials: outcomes.len(),
        passes: 0,
        failures: 0,
        inconclusive: 0,
        skipped: 0,
        worst_margin: None,
        tolerance: tol,
        witness: None,
        sharpness: None,
        seed: cfg.seed,
        samples: opts.samples,
        config: cfg.clone(),
    };
    let kind = theorem.sharpness_kind();
    let mut sharp_worst: f64 = f64::NEG_INFINITY;
    let mut sharp_min: f64 = f64::INFINITY;
    let mut sharp_seen = false;
    for outcome in outcomes {
        report.inconclusive += outcome.inconclusive;
        let Some(ev) = outcome.evaluated else {
            report.skipped += 1;
            continue;
        };
        let norm = ev.worst.normalized();
        if norm >= -tol {
            report.passes += 1;
        } else {
            report.failures += 1;
        }
        if report.worst_margin.is_none_or(|w| norm < w) {
            report.worst_margin = Some(norm);
            report.witness = Some(ev.witness);
        }
        if let (Some(kind), Some((min, max_abs))) = (kind, ev.sharp) {
            sharp_seen = true;
            sharp_min = sharp_min.min(min);
            sharp_worst = sharp_worst.max(match kind {
                SharpnessKind::Everywhere => max_abs,
                SharpnessKind::Attained => min,
            });
        }
    }
    if let (Some(kind), true) = (kind, sharp_seen) {
        let threshold = match kind {
            SharpnessKind::Everywhere => EQUALITY_TOL,
            SharpnessKind::Attained => ATTAINMENT_TOL,
        };
        report.sharpness = Some(Sharpness {
            kind,
            worst: sharp_worst,
            min_margin: sharp_min,
            threshold,
            holds: sharp_worst <= threshold && sharp_min >= -tol,
        });
    }
    report
}

/// Runs `cfg.trials` seeded trials of `theorem`.
pub fn verify(theorem: TheoremId, cfg: &GenConfig, opts: &VerifyOptions) -> Result<VerificationReport> {
    cfg.validate()?;
    if let Some(tol) = opts.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(PolyError::InvalidConfig("tol must be positive".into()));
        }
    }
    let trials = cfg.trials as u64;
    let outcomes: Vec<TrialOutcome> = if opts.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| PolyError::InvalidConfig(e.to_string()))?;
        pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| run_trial(theorem, cfg, opts, t))
                .collect()
        })
    } else {
        (0..trials).map(|t| run_trial(theorem, cfg, opts, t)).collect()
    };
    Ok(reduce(theorem, cfg, opts, outcomes))
}

/// Evaluates one supplied instance; random grid points come from `seed`.
/// Instances whose hypotheses fail are rejected rather than evaluated.
pub fn verify_instance(inst: &Instance, seed: u64, opts: &VerifyOptions) -> Result<VerificationReport> {
    inst.check_hypotheses()?;
    let cfg = GenConfig {
        seed,
        trials: 1,
        ..Default::default()
    };
    let mut rng = trial_rng(seed, 0);
    let outcome = match evaluate(inst.clone(), opts, 0, &mut rng) {
        Ok(ev) => TrialOutcome {
            inconclusive: 0,
            evaluated: Some(ev),
        },
        Err(_) => TrialOutcome {
            inconclusive: 1,
            evaluated: None,
        },
    };
    Ok(reduce(inst.theorem, &cfg, opts, vec![outcome]))
}

pub fn verify_theorem1(cfg: &GenConfig) -> Result<VerificationReport> {
    verify(TheoremId::T1, cfg, &VerifyOptions::default())
}

pub fn verify_theorem2(cfg: &GenConfig) -> Result<VerificationReport> {
    verify(TheoremId::T2, cfg, &VerifyOptions::default())
}

pub fn verify_corollary1(cfg: &GenConfig) -> Result<VerificationReport> {
    verify(TheoremId::C1, cfg, &VerifyOptions::default())
}

pub fn verify_theorem3(cfg: &GenConfig) -> Result<VerificationReport> {
    verify(TheoremId::T3, cfg, &VerifyOptions::default())
}

pub fn verify_theorem4(cfg: &GenConfig) -> Result<VerificationReport> {
    verify(TheoremId::T4, cfg, &VerifyOptions::default())
}

pub fn verify_lemma3(cfg: &GenConfig) -> Result<VerificationReport> {
    verify(TheoremId::L3, cfg, &VerifyOptions::default())
}

pub fn verify_lemma4(cfg: &GenConfig) -> Result<VerificationReport> {
    verify(TheoremId::L4, cfg, &VerifyOptions::default())
}

/// The three derivative/growth specializations, in order R1, R2, R3.
pub fn verify_remarks(cfg: &GenConfig) -> Result<Vec<VerificationReport>> {
    [TheoremId::R1, TheoremId::R2, TheoremId::R3]
        .into_iter()
        .map(|t| verify(t, cfg, &VerifyOptions::default()))
        .collect()
}

/// CSV header matching [`VerificationReport::csv_row`].
pub const CSV_HEADER: [&str; 5] = ["theorem_id", "trials", "passes", "worst_margin", "seed"];

impl VerificationReport {
    pub fn csv_row(&self) -> [String; 5] {
        [
            self.theorem.to_string(),
            self.trials.to_string(),
            self.passes.to_string(),
            self.worst_margin.map(|w| w.to_string()).unwrap_or_default(),
            self.seed.to_string(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64, trials: usize) -> GenConfig {
        GenConfig::with_seed(seed, trials)
    }

    #[test]
    fn theorem_ids_parse() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert_eq!("t3".parse::<TheoremId>().unwrap(), TheoremId::T3);
        assert!("T9".parse::<TheoremId>().is_err());
        assert_eq!(serde_json::to_string(&TheoremId::C1).unwrap(), "\"C1\"");
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::default().validate().is_ok());
        let bad = |f: fn(&mut GenConfig)| {
            let mut c = GenConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.degree_min = 0));
        assert!(bad(|c| c.degree_max = 65));
        assert!(bad(|c| c.degree_min = 5 + c.degree_max));
        assert!(bad(|c| c.trials = 0));
        assert!(bad(|c| c.coefficient_scale = 0.0));
        assert!(bad(|c| c.zero_radius = 1.5));
    }

    #[test]
    fn generators_are_deterministic() {
        let c = cfg(42, 1);
        let a = gen_poly_zeros_in_disk(&c, 1.0, &mut trial_rng(42, 0));
        let b = gen_poly_zeros_in_disk(&c, 1.0, &mut trial_rng(42, 0));
        assert_eq!(a, b);
        let d = gen_poly_zeros_in_disk(&c, 1.0, &mut trial_rng(42, 1));
        assert_ne!(a, d);
        let a = gen_self_inversive(&c, &mut trial_rng(3, 3)).unwrap();
        let b = gen_self_inversive(&c, &mut trial_rng(3, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn self_inversive_small_cases() {
        // degree 2 from the pair {2, 1/2}, with a rotated leading coefficient
        let p = self_inversive_from_roots(
            &[Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)],
            Complex64::from_polar(1.3, 0.9),
        )
        .unwrap();
        assert!(p.is_self_inversive(1e-14).unwrap());
        let rs = find_roots_default(&p).unwrap();
        let mut mods: Vec<f64> = rs.roots.iter().map(|w| w.norm()).collect();
        mods.sort_by(f64::total_cmp);
        assert!((mods[0] - 0.5).abs() < 1e-12 && (mods[1] - 2.0).abs() < 1e-12);

        // degree 1 with a single unimodular root
        let p = self_inversive_from_roots(&[Complex64::from_polar(1.0, 2.2)], Complex64::new(0.0, -3.0)).unwrap();
        let star = p.conj_inverse().unwrap();
        assert!(p.relative_distance(&star) < 1e-15);
        let root = -p.coeff(0) / p.coeff(1);
        assert!((root - Complex64::from_polar(1.0, 2.2)).norm() < 1e-14);
    }

    #[test]
    fn admissible_spec_examples() {
        // phi = z + 1/2 with n = 2 -> lambda = [1/2, 1/2]
        let phi = ComplexPoly::from_roots(&[Complex64::new(-0.5, 0.0)], Complex64::new(1.0, 0.0)).unwrap();
        let l = lambdas_from_g(&phi, 2).unwrap();
        assert_eq!(l, vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)]);

        let mut rng = trial_rng(1, 0);
        let c = GenConfig::default();
        let mut saw_constant = false;
        for _ in 0..200 {
            let n = sample_degree(&c, &mut rng);
            let spec = gen_admissible_spec(&c, n, &mut rng);
            assert_eq!(spec.sigma(), Complex64::new(n as f64 / 2.0, 0.0));
            assert!(spec.m() <= n.min(MAX_PHI_ORDER));
            saw_constant |= spec.m() == 0;
            assert!(check_n_admissible(&spec, 1e-9).unwrap());
        }
        assert!(saw_constant);
    }

    #[test]
    fn grid_shape() {
        let g = standard_grid(&mut trial_rng(0, 0));
        assert_eq!(g.len(), 5 * 64 + 100);
        assert_eq!(g[0], Complex64::new(1.0, 0.0));
        assert!(g.iter().all(|z| z.norm() >= 1.0 - 1e-15 && z.norm() <= 10.0 + 1e-12));
    }

    #[test]
    fn theorem1_hand_instance() {
        // f = z^2 - 1, lambda = [0, 1], sigma = 1 -> h = 2z^2
        let f = ComplexPoly::from_real(&[-1.0, 0.0, 1.0]).with_ambient_degree(2).unwrap();
        let spec = OperatorSpec::new(2, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], Complex64::new(1.0, 0.0)).unwrap();
        let s = min_s_for(&[Complex64::new(0.0, 0.0)], spec.sigma()).unwrap().finite().unwrap();
        let inst = Instance {
            theorem: TheoremId::T1,
            p: None,
            f: Some(f),
            spec,
            r: Some(1.0),
            s: Some(s),
        };
        inst.check_hypotheses().unwrap();
        let pt = containment(&inst).unwrap();
        assert_eq!(pt.value, 1.0);
        let report = verify_instance(&inst, 0, &VerifyOptions::default()).unwrap();
        assert_eq!(report.verdict(), Verdict::Pass);
        assert_eq!(report.worst_margin, Some(1.0));
    }

    #[test]
    fn theorem1_monomial_f() {
        // f = z^n keeps every zero of h at the origin
        let mut rng = trial_rng(77, 0);
        let c = GenConfig::default();
        for n in 1..8 {
            let spec = gen_admissible_spec(&c, n, &mut rng);
            let inst = Instance {
                theorem: TheoremId::T1,
                p: None,
                f: Some(ComplexPoly::monomial(n)),
                spec,
                r: Some(0.5),
                s: Some(1.0),
            };
            let pt = containment(&inst).unwrap();
            assert_eq!(pt.value, 0.5);
        }
    }

    #[test]
    fn theorem1_degenerate_sigma_zero() {
        // sigma = 0 with s >= 1: the region is all of C and h = lambda_0 f
        let mut rng = trial_rng(5, 0);
        let c = GenConfig::default();
        for _ in 0..20 {
            let n = sample_degree(&c, &mut rng);
            let r = 0.8;
            let f = poly_zeros_in_disk(n, r, &c, &mut rng);
            let lambdas: Vec<Complex64> = (0..=n).map(|_| random_leading(&c, &mut rng)).collect();
            let spec = OperatorSpec::new(n, lambdas, Complex64::new(0.0, 0.0)).unwrap();
            let inst = Instance {
                theorem: TheoremId::T1,
                p: None,
                f: Some(f.clone()),
                spec: spec.clone(),
                r: Some(r),
                s: Some(1.0),
            };
            let h = compose_h(&f, &spec).unwrap();
            assert!(h.relative_distance(&f.scale(spec.lambda0())) < 1e-15);
            assert!(containment(&inst).unwrap().normalized() >= -CONTAINMENT_TOL);
        }
    }

    #[test]
    fn small_runs_pass_for_every_theorem() {
        for t in TheoremId::ALL {
            let report = verify(t, &cfg(13, 20), &VerifyOptions::default()).unwrap();
            assert_eq!(report.verdict(), Verdict::Pass, "{t}: {}", report.to_json());
            assert_eq!(report.passes, 20);
        }
    }

    #[test]
    fn generated_instances_satisfy_hypotheses() {
        let c = cfg(99, 1);
        for t in TheoremId::ALL {
            for trial in 0..15 {
                let mut rng = trial_rng(99, trial);
                let inst = match generate_instance(t, &c, &mut rng) {
                    Ok(i) => i,
                    Err(PolyError::DegenerateInstance(_)) => continue,
                    Err(e) => panic!("{t}: {e}"),
                };
                inst.check_hypotheses().unwrap_or_else(|e| panic!("{t} trial {trial}: {e}"));
            }
        }
    }

    #[test]
    fn rejects_inadmissible_instance() {
        let p = ComplexPoly::from_real(&[1.0, 1.0]).with_ambient_degree(2).unwrap();
        let spec = OperatorSpec::bernstein(2, vec![Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let inst = Instance {
            theorem: TheoremId::C1,
            p: Some(p),
            f: None,
            spec,
            r: None,
            s: None,
        };
        assert!(verify_instance(&inst, 0, &VerifyOptions::default()).is_err());
    }

    #[test]
    fn witness_replays() {
        for t in TheoremId::ALL {
            let report = verify(t, &cfg(21, 10), &VerifyOptions::default()).unwrap();
            let w = report.witness.as_ref().unwrap();
            let json = serde_json::to_string(w).unwrap();
            let back: Witness = serde_json::from_str(&json).unwrap();
            let replayed = replay_witness(&back).unwrap();
            assert!((replayed - report.worst_margin.unwrap()).abs() <= 1e-12, "{t}");
        }
    }

    #[test]
    fn parallel_matches_serial() {
        for t in [TheoremId::T1, TheoremId::T3] {
            let serial = verify(t, &cfg(8, 24), &VerifyOptions::default()).unwrap();
            let parallel = verify(
                t,
                &cfg(8, 24),
                &VerifyOptions {
                    jobs: 4,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(serial.to_json(), parallel.to_json());
        }
    }

    #[test]
    fn aligned_point_attains_bound() {
        let mut rng = trial_rng(4, 4);
        let c = GenConfig::default();
        for _ in 0..20 {
            let n = sample_degree(&c, &mut rng);
            let spec = gen_admissible_spec(&c, n, &mut rng);
            let a = unit_phase(&mut rng);
            let b = unit_phase(&mut rng);
            let z = aligned_unit_point(&spec, a, b);
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
            coeffs[0] = b;
            coeffs[n] = a;
            let p = ComplexPoly::new(coeffs);
            let m = crate::maxmod::theorem3_margin(&p, &spec, z, 2.0).unwrap();
            let scale = 1.0 + phi_of(&spec).evaluate(Complex64::new(n as f64 / 2.0, 0.0)).norm();
            assert!(m.abs() <= 1e-12 * scale, "{m}");
        }
    }

    #[test]
    fn csv_row_layout() {
        let report = verify(TheoremId::L3, &cfg(1, 3), &VerifyOptions::default()).unwrap();
        let row = report.csv_row();
        assert_eq!(row[0], "L3");
        assert_eq!(row[1], "3");
        assert_eq!(row[4], "1");
    }
}
