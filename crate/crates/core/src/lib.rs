//! funk-lab: numerical toolkit for shifted Funk transforms on the unit sphere.
//!
//! The library evaluates Funk-type transforms `F_a` and parallel slice
//! transforms by quadrature over sphere cross-sections, classifies the
//! billiard-like dynamics generated by a pair of centers, decides injectivity
//! of paired and multiple transforms, and constructs verified common-kernel
//! witnesses in the non-injective cases.
//!
//! Modules:
//! - [`geometry`]: vectors, centers, affine planes, ball automorphisms `phi`.
//! - [`dynamics`]: point symmetries `tau`, weights `rho`, the V-map, induced
//!   Mobius matrices and their classification.
//! - [`transform`]: quadrature rules, transform evaluation, intertwiners and
//!   the evaluable [`transform::SphericalFunction`] expression tree.
//! - [`analyzer`]: injectivity verdicts for pairs, multi-center families and
//!   slice-transform families (Coxeter criterion).
//! - [`kernelgen`]: the W operators and constructive kernel witnesses.
//! - [`cli`]: command-line front end with JSON/CSV output.

pub mod analyzer;
pub mod cli;
pub mod dynamics;
pub mod geometry;
pub mod kernelgen;
pub mod transform;

use serde::{Deserialize, Serialize};

/// Centralized numerical tolerances used across the library.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// Membership of points on the unit sphere and orthonormality residuals.
    pub sphere: f64,
    /// Denominators considered degenerate (division guards).
    pub degeneracy: f64,
    /// Decision boundaries: center-on-sphere rejection, plane membership,
    /// parabolic band, `<a,b> = 1` detection.
    pub verdict: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sphere: 1e-12,
            degeneracy: 1e-14,
            verdict: 1e-9,
        }
    }
}

/// Settings shared by the decision procedures.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub tol: Tolerances,
    /// Largest denominator considered by rational rotation-number detection.
    pub qmax: u64,
    /// Acceptance width for a continued-fraction convergent.
    pub eps: f64,
    /// Random sphere points used by the numeric period confirmation stage.
    pub period_samples: usize,
    /// Residual bound for `T^q x = x` in the confirmation stage.
    pub period_residual: f64,
    /// Orbit-closure cap for the reflection-group finiteness test.
    pub closure_cap: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tol: Tolerances::default(),
            qmax: 64,
            eps: 1e-9,
            period_samples: 32,
            period_residual: 1e-8,
            closure_cap: 10_000,
        }
    }
}
