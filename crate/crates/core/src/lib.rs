//! Zero localization for composite polynomials and Bernstein-type operators.
//!
//! The crate builds the composite polynomial
//! `h(z) = sum_k lambda_k f^(k)(z) (sigma z)^k / k!`, the operator
//! `N[P](z) = sum_i lambda_i (n z / 2)^i P^(i)(z) / i!`, and a harness that
//! checks the zero-containment and max-modulus inequalities they satisfy on
//! randomized polynomial families.

pub mod error;
pub mod json;
pub mod maxmod;
pub mod operators;
pub mod poly;
pub mod regions;
pub mod roots;
pub mod verify;

pub use error::{PolyError, Result};
pub use maxmod::{max_on_circle, CircleMax};
pub use num_complex::Complex64;
pub use operators::{apply_n, compose_h, OperatorSpec};
pub use poly::ComplexPoly;
pub use regions::{ApolloniusRegion, Disk, SBound};
pub use roots::{find_roots, RootSet};
pub use verify::{GenConfig, TheoremId, VerificationReport};
