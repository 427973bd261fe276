//! Point symmetries of the sphere, the billiard-like V-map, induced Mobius
//! transformations of 2-D cross-sections, and their classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Center, GeometryError, SpherePoint, Vector};
use crate::{AnalysisConfig, Tolerances};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("symmetry center coincides with the sphere point")]
    CoincidentPoint,
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("the two centers coincide")]
    CoincidentCenters,
    #[error("base point lies in the singular set Z_ab")]
    SingularPoint,
    #[error("degenerate cross-section (determinant below tolerance)")]
    DegenerateSection,
    #[error(
        "period conflict: analytic period {analytic_q} not confirmed, residual {numeric_residual:e}"
    )]
    PeriodConflict { analytic_q: u32, numeric_residual: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The a-symmetry of the sphere: second intersection of the line through x
/// and a with S^{n-1}. Valid for any |a| != 1.
pub fn tau(a: &Vector, x: &SpherePoint) -> Result<SpherePoint, DynamicsError> {
    let xv = x.vector();
    let d = a.sub(xv);
    let d2 = d.norm_sq();
    if d2 < Tolerances::default().degeneracy {
        return Err(DynamicsError::CoincidentPoint);
    }
    let t = 2.0 * (1.0 - xv.dot(a)) / d2;
    SpherePoint::new(xv.axpy(t, &d)).map_err(DynamicsError::from)
}

/// The kernel weight rho_a(x) = (|1-|a|^2| / |x-a|^2)^{k-1}.
pub fn rho(a: &Vector, x: &SpherePoint, k: usize) -> Result<f64, DynamicsError> {
    assert!(k >= 1);
    let d2 = x.vector().sub(a).norm_sq();
    if d2 < Tolerances::default().degeneracy {
        return Err(DynamicsError::CoincidentPoint);
    }
    let base = (1.0 - a.norm_sq()).abs() / d2;
    Ok(base.powi(k as i32 - 1))
}

/// Reflection across the hyperplane orthogonal to b.
pub fn sigma(b: &Vector, x: &Vector) -> Result<Vector, DynamicsError> {
    let n2 = b.norm_sq();
    if n2 < 1e-300 {
        return Err(DynamicsError::ZeroVector);
    }
    Ok(x.axpy(-2.0 * x.dot(b) / n2, b))
}

/// One step of the V-map T = tau_b ∘ tau_a; infinite centers act by the
/// corresponding hyperplane reflection.
pub fn v_map(a: &Center, b: &Center, x: &SpherePoint) -> Result<SpherePoint, DynamicsError> {
    let mid = apply_symmetry(a, x)?;
    apply_symmetry(b, &mid)
}

/// The symmetry associated with a center: tau for finite, sigma for infinite.
pub fn apply_symmetry(c: &Center, x: &SpherePoint) -> Result<SpherePoint, DynamicsError> {
    match c {
        Center::Finite { v } => tau(v, x),
        Center::Infinite { dir } => {
            SpherePoint::new(sigma(dir, x.vector())?).map_err(DynamicsError::from)
        }
    }
}

/// The subsphere {<x,a> = <x,b> = 1, |x| = 1} of tangency fixed points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubsphereSpec {
    pub center: Vector,
    pub radius: f64,
    /// Orthonormal basis of the subspace the subsphere spans around its center.
    pub span: Vec<Vector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedPoints {
    /// Tangency set Z_ab, when it meets the closed ball.
    pub z_set: Option<SubsphereSpec>,
    /// Intersections of the line through a and b with the sphere (0, 1 or 2).
    pub line_points: Vec<SpherePoint>,
}

/// Fixed points of T: Z_ab together with L_ab ∩ S^{n-1}.
pub fn fixed_points(a: &Vector, b: &Vector) -> Result<FixedPoints, DynamicsError> {
    if a.distance(b) < Tolerances::default().degeneracy {
        return Err(DynamicsError::CoincidentCenters);
    }
    let n = a.dim();

    // Z_ab: solve <x,a> = <x,b> = 1 by a minimal-norm particular solution
    // x_p = alpha a + beta b (Gram system), then the free directions are the
    // orthogonal complement of span{a,b}.
    let gram = [[a.norm_sq(), a.dot(b)], [a.dot(b), b.norm_sq()]];
    let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
    let z_set = if det.abs() > 1e-12 {
        let alpha = (gram[1][1] - gram[0][1]) / det;
        let beta = (gram[0][0] - gram[1][0]) / det;
        let xp = a.scale(alpha).axpy(beta, b);
        let r2 = 1.0 - xp.norm_sq();
        if r2 >= -Tolerances::default().verdict {
            let span = orthogonal_complement(&[a.clone(), b.clone()], n);
            if span.is_empty() {
                // n = 2: the solution is the single point x_p, on the sphere
                // only when |x_p| = 1.
                if r2.abs() <= Tolerances::default().verdict {
                    Some(SubsphereSpec {
                        center: xp,
                        radius: 0.0,
                        span,
                    })
                } else {
                    None
                }
            } else {
                Some(SubsphereSpec {
                    center: xp,
                    radius: r2.max(0.0).sqrt(),
                    span,
                })
            }
        } else {
            None
        }
    } else {
        // a, b collinear: <x,a> = <x,b> = 1 is inconsistent for a != b.
        None
    };

    // Line points: |a + t(b-a)|^2 = 1.
    let d = b.sub(a);
    let qa = d.norm_sq();
    let qb = 2.0 * a.dot(&d);
    let qc = a.norm_sq() - 1.0;
    let disc = qb * qb - 4.0 * qa * qc;
    let mut line_points = Vec::new();
    if disc.abs() <= 1e-12 {
        line_points.push(SpherePoint::new(a.axpy(-qb / (2.0 * qa), &d))?);
    } else if disc > 0.0 {
        let s = disc.sqrt();
        for t in [(-qb + s) / (2.0 * qa), (-qb - s) / (2.0 * qa)] {
            line_points.push(SpherePoint::new(a.axpy(t, &d))?);
        }
    }
    Ok(FixedPoints { z_set, line_points })
}

/// Orthonormal basis of the orthogonal complement of the given vectors.
fn orthogonal_complement(vectors: &[Vector], n: usize) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            w = w.axpy(-w.dot(b), b);
        }
        let norm = w.norm();
        if norm > 1e-12 {
            basis.push(w.scale(1.0 / norm));
        }
    }
    let rank = basis.len();
    for i in 0..n {
        let mut w = Vector::unit(n, i);
        for _ in 0..2 {
            for b in &basis {
                w = w.axpy(-w.dot(b), b);
            }
        }
        let norm = w.norm();
        if norm > 1e-8 {
            basis.push(w.scale(1.0 / norm));
        }
    }
    basis.split_off(rank)
}

/// The trace-halving invariant Theta(a,b), real or purely imaginary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ThetaValue {
    Real { value: f64 },
    Imaginary { theta_squared: f64 },
}

impl ThetaValue {
    pub fn as_complex(&self) -> Complex64 {
        match *self {
            ThetaValue::Real { value } => Complex64::new(value, 0.0),
            ThetaValue::Imaginary { theta_squared } => {
                Complex64::new(0.0, (-theta_squared).sqrt())
            }
        }
    }
}

/// Theta(a,b) = (<a,b> - 1) / sqrt((1-|a|^2)(1-|b|^2)), principal branch.
pub fn theta(a: &Vector, b: &Vector) -> ThetaValue {
    let num = a.dot(b) - 1.0;
    let prod = (1.0 - a.norm_sq()) * (1.0 - b.norm_sq());
    if prod > 0.0 {
        ThetaValue::Real {
            value: num / prod.sqrt(),
        }
    } else if num.abs() <= Tolerances::default().verdict {
        // <a,b> = 1 with centers separated by the sphere: period-2 case.
        ThetaValue::Real { value: 0.0 }
    } else {
        ThetaValue::Imaginary {
            theta_squared: num * num / prod,
        }
    }
}

/// Classification of the V-map dynamics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum MobiusClass {
    Hyperbolic,
    Parabolic { near_boundary: bool },
    Loxodromic,
    Elliptic {
        kappa: f64,
        rational: Option<(u64, u64)>,
    },
}

impl MobiusClass {
    pub fn name(&self) -> &'static str {
        match self {
            MobiusClass::Hyperbolic => "hyperbolic",
            MobiusClass::Parabolic { .. } => "parabolic",
            MobiusClass::Loxodromic => "loxodromic",
            MobiusClass::Elliptic { .. } => "elliptic",
        }
    }
}

/// Classifies the pair by tr M(T) = 2 Theta(a,b).
pub fn classify(a: &Vector, b: &Vector, cfg: &AnalysisConfig) -> MobiusClass {
    match theta(a, b) {
        ThetaValue::Imaginary { .. } => MobiusClass::Loxodromic,
        ThetaValue::Real { value } => {
            let dist_to_one = (value.abs() - 1.0).abs();
            if dist_to_one <= cfg.tol.verdict {
                MobiusClass::Parabolic {
                    near_boundary: dist_to_one > 0.0,
                }
            } else if value.abs() > 1.0 {
                MobiusClass::Hyperbolic
            } else {
                // Exact shortcut for boundary-robust Theta values.
                let (kappa, rational) = if (value - 0.5).abs() <= 1e-12 {
                    (1.0 / 3.0, Some((1, 3)))
                } else if (value + 0.5).abs() <= 1e-12 {
                    (2.0 / 3.0, Some((2, 3)))
                } else if value.abs() <= 1e-12 {
                    (0.5, Some((1, 2)))
                } else {
                    let kappa = value.acos() / std::f64::consts::PI;
                    (kappa, detect_rational(kappa, cfg.qmax, cfg.eps))
                };
                MobiusClass::Elliptic { kappa, rational }
            }
        }
    }
}

/// Best continued-fraction convergent p/q of kappa with q <= qmax and
/// |kappa - p/q| <= eps, in lowest terms.
pub fn detect_rational(kappa: f64, qmax: u64, eps: f64) -> Option<(u64, u64)> {
    assert!(kappa > 0.0 && kappa < 1.0);
    let mut best: Option<(u64, u64)> = None;
    let mut err_best = f64::INFINITY;
    // Convergents h_i/k_i of the continued fraction expansion of kappa:
    // h_i = a_i h_{i-1} + h_{i-2}, with (h_{-1}, h_{-2}) = (1, 0) and
    // (k_{-1}, k_{-2}) = (0, 1).
    let (mut p0, mut q0): (u64, u64) = (1, 0);
    let (mut p1, mut q1): (u64, u64) = (0, 1);
    let mut x = kappa;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as u64;
        let p = ai.checked_mul(p0).and_then(|v| v.checked_add(p1));
        let q = ai.checked_mul(q0).and_then(|v| v.checked_add(q1));
        let (p, q) = match (p, q) {
            (Some(p), Some(q)) => (p, q),
            _ => break,
        };
        if q > qmax {
            break;
        }
        if q > 0 {
            let err = (kappa - p as f64 / q as f64).abs();
            if err <= eps && err < err_best {
                best = Some((p, q));
                err_best = err;
            }
        }
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    best
}

/// Two-stage period detection: analytic rotation number plus numeric
/// confirmation that T^q is the identity on random sphere samples.
pub fn detect_period(
    a: &Vector,
    b: &Vector,
    cfg: &AnalysisConfig,
    rng: &mut impl rand::Rng,
) -> Result<Option<u32>, DynamicsError> {
    let class = classify(a, b, cfg);
    let (_, q) = match class {
        MobiusClass::Elliptic {
            rational: Some(pq), ..
        } => pq,
        _ => return Ok(None),
    };
    let q = q as u32;
    let ca = Center::Finite { v: a.clone() };
    let cb = Center::Finite { v: b.clone() };
    let mut worst = 0.0f64;
    for _ in 0..cfg.period_samples {
        let x0 = random_sphere_point(a.dim(), rng);
        let mut x = x0.clone();
        for _ in 0..q {
            x = v_map(&ca, &cb, &x)?;
        }
        worst = worst.max(x.vector().distance(x0.vector()));
    }
    if worst <= cfg.period_residual {
        Ok(Some(q))
    } else {
        Err(DynamicsError::PeriodConflict {
            analytic_q: q,
            numeric_residual: worst,
        })
    }
}

/// Uniform random point of S^{n-1}.
pub fn random_sphere_point(n: usize, rng: &mut impl rand::Rng) -> SpherePoint {
    use rand_distr_normal::sample_standard_normal;
    loop {
        let v = Vector::new((0..n).map(|_| sample_standard_normal(rng)).collect());
        if let Ok(p) = SpherePoint::new(v) {
            return p;
        }
    }
}

// Box-Muller; avoids pulling in rand_distr for one sampler.
mod rand_distr_normal {
    pub fn sample_standard_normal(rng: &mut impl rand::Rng) -> f64 {
        loop {
            let u1: f64 = rng.gen::<f64>();
            let u2: f64 = rng.gen::<f64>();
            if u1 > 0.0 {
                return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            }
        }
    }
}

/// Complexified 2-D cross-section through x0, a and b.
#[derive(Clone, Debug)]
pub struct CrossSectionFrame {
    /// Disc center: foot of the perpendicular from the origin.
    pub c: Vector,
    pub e1: Vector,
    pub e2: Vector,
    pub z_a: Complex64,
    pub z_b: Complex64,
    scale: f64, // sqrt(1 - |c|^2)
}

impl CrossSectionFrame {
    /// The isomorphism zeta of the section plane with the complex plane.
    pub fn zeta(&self, x: &Vector) -> Complex64 {
        let rel = x.sub(&self.c);
        Complex64::new(rel.dot(&self.e1) / self.scale, rel.dot(&self.e2) / self.scale)
    }

    /// Inverse of zeta (lands on the section plane).
    pub fn zeta_inv(&self, z: Complex64) -> Vector {
        self.c
            .axpy(z.re * self.scale, &self.e1)
            .axpy(z.im * self.scale, &self.e2)
    }

    /// Distance from x to the section plane.
    pub fn plane_distance(&self, x: &Vector) -> f64 {
        let rel = x.sub(&self.c);
        let in_plane = self
            .e1
            .scale(rel.dot(&self.e1))
            .axpy(rel.dot(&self.e2), &self.e2);
        rel.sub(&in_plane).norm()
    }
}

/// Builds the complexified section frame through x0, a, b. A collinear
/// triple is completed with the lowest-index coordinate direction not
/// parallel to the line.
pub fn cross_section_frame(
    a: &Vector,
    b: &Vector,
    x0: &SpherePoint,
) -> Result<CrossSectionFrame, DynamicsError> {
    let n = a.dim();
    let tol = Tolerances::default().verdict;
    if (x0.vector().dot(a) - 1.0).abs() <= tol && (x0.vector().dot(b) - 1.0).abs() <= tol {
        return Err(DynamicsError::SingularPoint);
    }
    // Direction space of the plane through x0, a, b.
    let mut dirs: Vec<Vector> = Vec::with_capacity(2);
    for v in [a.sub(x0.vector()), b.sub(x0.vector())] {
        let mut w = v;
        for d in &dirs {
            w = w.axpy(-w.dot(d), d);
        }
        let norm = w.norm();
        if norm > 1e-10 {
            dirs.push(w.scale(1.0 / norm));
        }
        if dirs.len() == 2 {
            break;
        }
    }
    let mut i = 0;
    while dirs.len() < 2 {
        assert!(i < n, "cannot complete section frame");
        let mut w = Vector::unit(n, i);
        for d in &dirs {
            w = w.axpy(-w.dot(d), d);
        }
        let norm = w.norm();
        if norm > 1e-8 {
            dirs.push(w.scale(1.0 / norm));
        }
        i += 1;
    }
    let (e1, e2) = (dirs[0].clone(), dirs[1].clone());
    // Foot of the perpendicular from the origin onto {x0 + span(e1,e2)}.
    let c = x0
        .vector()
        .axpy(-x0.vector().dot(&e1), &e1)
        .axpy(-x0.vector().dot(&e2), &e2);
    let c2 = c.norm_sq();
    if c2 >= 1.0 - tol {
        return Err(DynamicsError::SingularPoint);
    }
    let scale = (1.0 - c2).sqrt();
    let mut frame = CrossSectionFrame {
        c,
        e1,
        e2,
        z_a: Complex64::new(0.0, 0.0),
        z_b: Complex64::new(0.0, 0.0),
        scale,
    };
    frame.z_a = frame.zeta(a);
    frame.z_b = frame.zeta(b);
    Ok(frame)
}

/// Unimodular matrix of the Mobius transformation induced on the section circle.
#[derive(Clone, Copy, Debug)]
pub struct MobiusMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl MobiusMatrix {
    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Fractional-linear action on the complex plane.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.m[0][0] * z + self.m[0][1]) / (self.m[1][0] * z + self.m[1][1])
    }
}

/// The normalized matrix M(T) of the induced Mobius transformation, with
/// det M = 1 after division by the principal square root of
/// D = (1-|z_a|^2)(1-|z_b|^2).
pub fn induced_mobius(frame: &CrossSectionFrame) -> Result<MobiusMatrix, DynamicsError> {
    let za = frame.z_a;
    let zb = frame.z_b;
    let d = (1.0 - za.norm_sqr()) * (1.0 - zb.norm_sqr());
    if d.abs() < Tolerances::default().degeneracy {
        return Err(DynamicsError::DegenerateSection);
    }
    let s = Complex64::new(d, 0.0).sqrt();
    Ok(MobiusMatrix {
        m: [
            [(za.conj() * zb - 1.0) / s, (za - zb) / s],
            [(za.conj() - zb.conj()) / s, (za * zb.conj() - 1.0) / s],
        ],
    })
}

/// Orbit [x0, Tx0, ...], stopping at max_iter or on return within 1e-10 of x0.
pub fn orbit(
    a: &Center,
    b: &Center,
    x0: &SpherePoint,
    max_iter: usize,
) -> Result<Vec<SpherePoint>, DynamicsError> {
    let mut points = vec![x0.clone()];
    let mut x = x0.clone();
    for _ in 0..max_iter {
        x = v_map(a, b, &x)?;
        if x.vector().distance(x0.vector()) <= 1e-10 {
            break;
        }
        points.push(x.clone());
    }
    Ok(points)
}
