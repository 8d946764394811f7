//! Closed circular regions: origin-centred disks and Apollonius regions
//! `|z| <= s |z - sigma|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};
use crate::poly::ComplexPoly;
use crate::roots::find_roots_default;

/// Smallest `s` reported by [`min_s_for`] when every point sits at the origin.
pub const MIN_S_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionJson", into = "RegionJson")]
pub struct ApolloniusRegion {
    s: f64,
    sigma: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RegionJson {
    s: f64,
    #[serde(with = "crate::json::complex")]
    sigma: Complex64,
}

impl TryFrom<RegionJson> for ApolloniusRegion {
    type Error = PolyError;

    fn try_from(raw: RegionJson) -> Result<Self> {
        ApolloniusRegion::new(raw.s, raw.sigma)
    }
}

impl From<ApolloniusRegion> for RegionJson {
    fn from(r: ApolloniusRegion) -> Self {
        RegionJson {
            s: r.s,
            sigma: r.sigma,
        }
    }
}

impl ApolloniusRegion {
    pub fn new(s: f64, sigma: Complex64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(PolyError::InvalidRegion(format!("s must be positive, got {s}")));
        }
        if !sigma.is_finite() {
            return Err(PolyError::InvalidRegion("sigma must be finite".into()));
        }
        Ok(ApolloniusRegion { s, sigma })
    }

    /// The half-plane `|z| <= |z - n/2|` that the zeros of `phi` must occupy.
    pub fn half_plane(n: usize) -> Self {
        ApolloniusRegion {
            s: 1.0,
            sigma: Complex64::new(n as f64 / 2.0, 0.0),
        }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    /// `|z| <= s |z - sigma| + tol * max(1, |z|, |sigma|)`.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        let scale = 1.0f64.max(z.norm()).max(self.sigma.norm());
        z.norm() <= self.s * (z - self.sigma).norm() + tol * scale
    }
}

/// Origin-centred closed disk `|z| <= r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub r: f64,
}

impl Disk {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(PolyError::InvalidRegion(format!("radius must be nonnegative, got {r}")));
        }
        Ok(Disk { r })
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        z.norm() <= self.r + tol * self.r.max(1.0)
    }
}

/// Result of [`min_s_for`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SBound {
    Finite(f64),
    /// A nonzero point coincides with sigma, so no finite `s` works.
    Unbounded,
}

impl SBound {
    pub fn finite(self) -> Option<f64> {
        match self {
            SBound::Finite(s) => Some(s),
            SBound::Unbounded => None,
        }
    }
}

/// Least `s` with `|b| <= s |b - sigma|` for every point `b`, floored at
/// [`MIN_S_FLOOR`].
pub fn min_s_for(points: &[Complex64], sigma: Complex64) -> Result<SBound> {
    if points.is_empty() {
        return Err(PolyError::EmptyPointSet);
    }
    let mut s: f64 = 0.0;
    for &b in points {
        let num = b.norm();
        if num == 0.0 {
            continue;
        }
        let den = (b - sigma).norm();
        if den == 0.0 {
            return Ok(SBound::Unbounded);
        }
        s = s.max(num / den);
    }
    Ok(SBound::Finite(s.max(MIN_S_FLOOR)))
}

/// True when every computed root of `p` lies in `|z| <= r + tol * max(1, r)`.
pub fn zeros_in_disk(p: &ComplexPoly, r: f64, tol: f64) -> Result<bool> {
    if p.is_zero() {
        return Err(PolyError::DegenerateInstance("zero polynomial".into()));
    }
    if p.degree() == 0 {
        return Ok(true);
    }
    let rs = find_roots_default(p)?;
    match rs.contained_in_disk(r, tol) {
        Ok((inside, _)) => Ok(inside),
        Err(e) => Err(PolyError::RootFindingFailed(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn membership_examples() {
        let region = ApolloniusRegion::new(0.3, c(1.0, -2.0)).unwrap();
        assert!(region.contains(c(0.0, 0.0), 0.0));
        for s in [0.1, 1.0, 10.0, 1e6] {
            let sigma = c(0.7, 0.2);
            let r = ApolloniusRegion::new(s, sigma).unwrap();
            assert!(!r.contains(sigma, 0.0));
        }
        let n = 4;
        let half = ApolloniusRegion::half_plane(n);
        for t in [-3.0, -0.1, 0.0, 2.5, 100.0] {
            assert!(half.contains(c(0.0, t), 0.0));
        }
        assert!(!half.contains(c(n as f64, 0.0), 0.0));
        // boundary Re z = n/4 is included
        assert!(half.contains(c(1.0, 5.0), 0.0));
    }

    #[test]
    fn invalid_regions() {
        assert!(ApolloniusRegion::new(0.0, c(1.0, 0.0)).is_err());
        assert!(ApolloniusRegion::new(-1.0, c(1.0, 0.0)).is_err());
        assert!(ApolloniusRegion::new(f64::NAN, c(1.0, 0.0)).is_err());
        assert!(Disk::new(-0.5).is_err());
        assert!(serde_json::from_str::<ApolloniusRegion>(r#"{"s":0,"sigma":[1,0]}"#).is_err());
    }

    #[test]
    fn min_s_examples() {
        assert_eq!(min_s_for(&[c(0.0, 0.0)], c(1.0, 0.0)).unwrap(), SBound::Finite(MIN_S_FLOOR));
        assert_eq!(min_s_for(&[c(1.0, 0.0)], c(2.0, 0.0)).unwrap(), SBound::Finite(1.0));
        assert_eq!(min_s_for(&[c(1.0, 0.0)], c(1.0, 0.0)).unwrap(), SBound::Unbounded);
        assert_eq!(min_s_for(&[], c(1.0, 0.0)), Err(PolyError::EmptyPointSet));
    }

    #[test]
    fn min_s_is_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let sigma = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let pts: Vec<Complex64> = (0..rng.random_range(1..6))
                .map(|_| c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
                .collect();
            let s = min_s_for(&pts, sigma).unwrap().finite().unwrap();
            let region = ApolloniusRegion::new(s, sigma).unwrap();
            // exact-boundary points may miss by an ulp
            assert!(pts.iter().all(|&b| region.contains(b, 1e-15)));
            let shrunk = ApolloniusRegion::new(s * (1.0 - 1e-9), sigma).unwrap();
            assert!(pts.iter().any(|&b| !shrunk.contains(b, 0.0)));
        }
    }

    #[test]
    fn scaling_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let sigma = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let s = rng.random_range(0.1..4.0);
            let k = Complex64::from_polar(rng.random_range(0.1..10.0), rng.random_range(0.0..6.3));
            let base = ApolloniusRegion::new(s, sigma).unwrap();
            let scaled = ApolloniusRegion::new(s, sigma * k).unwrap();
            let lhs = z.norm();
            let rhs = s * (z - sigma).norm();
            // skip points within rounding distance of the boundary
            if (lhs - rhs).abs() < 1e-9 * (1.0 + lhs) {
                continue;
            }
            assert_eq!(base.contains(z, 0.0), scaled.contains(z * k, 0.0));
        }
    }

    #[test]
    fn unit_ratio_matches_half_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let z = c(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let sigma = c(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let region = ApolloniusRegion::new(1.0, sigma).unwrap();
            let lhs = 2.0 * (z * sigma.conj()).re;
            let rhs = sigma.norm_sqr();
            if (lhs - rhs).abs() < 1e-9 * (1.0 + rhs) {
                continue;
            }
            assert_eq!(region.contains(z, 0.0), lhs <= rhs);
        }
    }

    #[test]
    fn zeros_in_disk_examples() {
        assert!(zeros_in_disk(&ComplexPoly::from_real(&[-1.0, 0.0, 1.0]), 1.0, 1e-9).unwrap());
        assert!(!zeros_in_disk(&ComplexPoly::from_real(&[-4.0, 0.0, 1.0]), 1.0, 1e-9).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let roots: Vec<Complex64> = (0..8)
            .map(|_| Complex64::from_polar(0.9 * rng.random::<f64>().sqrt(), rng.random_range(0.0..6.3)))
            .collect();
        let p = ComplexPoly::from_roots(&roots, c(1.3, -0.2)).unwrap();
        assert!(zeros_in_disk(&p, 0.9, 1e-9).unwrap());
    }
}
