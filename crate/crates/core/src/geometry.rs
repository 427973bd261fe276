//! Vectors, centers, affine k-planes and the ball automorphisms `phi_a`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Tolerances;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("center lies on the unit sphere (|v| = 1 within tolerance)")]
    OnSphere,
    #[error("degenerate denominator 1 - <x,a> in phi_a")]
    DegenerateDenominator,
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("points are affinely dependent")]
    RankDeficient,
    #[error("plane does not meet the open unit ball")]
    Disjoint,
}

/// A point of R^n with the dimension carried explicitly by its length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// Standard basis vector e_i in R^n.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(x, y)| x - y).collect())
    }

    /// self + s * other
    pub fn axpy(&self, s: f64, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| x + s * y)
                .collect(),
        )
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }

    pub fn normalized(&self) -> Result<Vector, GeometryError> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(GeometryError::ZeroVector);
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// A point of the unit sphere S^{n-1}; renormalized on construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpherePoint(Vector);

impl SpherePoint {
    pub fn new(v: Vector) -> Result<Self, GeometryError> {
        Ok(SpherePoint(v.normalized()?))
    }

    pub fn vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Geodesic (great-circle) distance to another sphere point.
    pub fn geodesic_distance(&self, other: &SpherePoint) -> f64 {
        self.0.dot(&other.0).clamp(-1.0, 1.0).acos()
    }
}

/// A transform center: a finite point off the unit sphere, or a direction
/// ("center at infinity") for the parallel slice transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Center {
    Finite { v: Vector },
    Infinite { dir: Vector },
}

impl Center {
    pub fn dim(&self) -> usize {
        match self {
            Center::Finite { v } => v.dim(),
            Center::Infinite { dir } => dir.dim(),
        }
    }
}

/// Builds a finite center, rejecting points on the unit sphere.
pub fn make_center(v: Vector) -> Result<Center, GeometryError> {
    if !v.is_finite() {
        return Err(GeometryError::ZeroVector);
    }
    let tol = Tolerances::default().verdict;
    if (v.norm() - 1.0).abs() <= tol {
        return Err(GeometryError::OnSphere);
    }
    Ok(Center::Finite { v })
}

/// Builds an infinite center from a direction (normalized).
pub fn make_infinite_center(dir: Vector) -> Result<Center, GeometryError> {
    Ok(Center::Infinite {
        dir: dir.normalized()?,
    })
}

/// The involutive ball automorphism phi_a applied to x, for |a| < 1.
///
/// phi_a(x) = (a - P_a x - sqrt(1-|a|^2) Q_a x) / (1 - <x,a>), phi_0 = -x.
pub fn phi(a: &Vector, x: &Vector) -> Result<Vector, GeometryError> {
    let a_norm_sq = a.norm_sq();
    assert!(a_norm_sq < 1.0, "phi_a requires |a| < 1");
    if a_norm_sq == 0.0 {
        return Ok(x.scale(-1.0));
    }
    let denom = 1.0 - x.dot(a);
    if denom.abs() < Tolerances::default().degeneracy {
        return Err(GeometryError::DegenerateDenominator);
    }
    let s = (1.0 - a_norm_sq).sqrt();
    let p = a.scale(a.dot(x) / a_norm_sq); // P_a x
    let q = x.sub(&p); // Q_a x
    Ok(a.sub(&p).axpy(-s, &q).scale(1.0 / denom))
}

/// Inversion b* = b / |b|^2 with respect to the unit sphere.
pub fn inversion_point(b: &Vector) -> Result<Vector, GeometryError> {
    let n2 = b.norm_sq();
    if n2 < 1e-300 {
        return Err(GeometryError::ZeroVector);
    }
    Ok(b.scale(1.0 / n2))
}

/// A k-dimensional affine plane in canonical form: orthonormal spanning
/// basis plus the foot of the perpendicular from the origin as offset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffinePlane {
    basis: Vec<Vector>,
    offset: Vector,
}

impl AffinePlane {
    /// Canonicalizes an arbitrary spanning set and base point.
    pub fn new(span: &[Vector], point: &Vector) -> Result<Self, GeometryError> {
        let basis = orthonormalize(span)?;
        if basis.len() != span.len() {
            return Err(GeometryError::RankDeficient);
        }
        let offset = project_out(point, &basis);
        Ok(AffinePlane { basis, offset })
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    /// Plane dimension k.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Ambient dimension n.
    pub fn ambient_dim(&self) -> usize {
        self.offset.dim()
    }

    /// Orthogonal projection of x onto the plane's direction space.
    pub fn project_span(&self, x: &Vector) -> Vector {
        let mut p = Vector::zeros(x.dim());
        for b in &self.basis {
            p = p.axpy(x.dot(b), b);
        }
        p
    }

    /// Distance from a point to the plane.
    pub fn distance_to(&self, x: &Vector) -> f64 {
        let rel = x.sub(&self.offset);
        rel.sub(&self.project_span(&rel)).norm()
    }

    /// Whether the plane meets the open unit ball.
    pub fn meets_ball(&self) -> bool {
        self.offset.norm() < 1.0 - Tolerances::default().sphere
    }

    /// Point of the plane with the given span coordinates.
    pub fn point_at(&self, coords: &[f64]) -> Vector {
        assert_eq!(coords.len(), self.dim());
        let mut p = self.offset.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            p = p.axpy(*c, b);
        }
        p
    }

    /// Plane equality: same span projector and same offset.
    pub fn approx_eq(&self, other: &AffinePlane, tol: f64) -> bool {
        if self.dim() != other.dim() || self.ambient_dim() != other.ambient_dim() {
            return false;
        }
        if self.offset.distance(&other.offset) > tol {
            return false;
        }
        // Compare projectors column by column.
        let n = self.ambient_dim();
        for i in 0..n {
            let e = Vector::unit(n, i);
            if self.project_span(&e).distance(&other.project_span(&e)) > tol {
                return false;
            }
        }
        true
    }
}

/// Gram-Schmidt; drops vectors whose orthogonal residual is below tolerance.
fn orthonormalize(vectors: &[Vector]) -> Result<Vec<Vector>, GeometryError> {
    let mut basis: Vec<Vector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if !v.is_finite() {
            return Err(GeometryError::ZeroVector);
        }
        let mut w = v.clone();
        // Two passes for numerical orthogonality.
        for _ in 0..2 {
            for b in &basis {
                w = w.axpy(-w.dot(b), b);
            }
        }
        let n = w.norm();
        if n > 1e-10 {
            basis.push(w.scale(1.0 / n));
        }
    }
    Ok(basis)
}

/// Component of x orthogonal to the given orthonormal basis.
fn project_out(x: &Vector, basis: &[Vector]) -> Vector {
    let mut w = x.clone();
    for _ in 0..2 {
        for b in basis {
            w = w.axpy(-w.dot(b), b);
        }
    }
    w
}

/// Canonical affine plane through k+1 affinely independent points.
pub fn plane_from_points(points: &[Vector]) -> Result<AffinePlane, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::RankDeficient);
    }
    let base = &points[0];
    let span: Vec<Vector> = points[1..].iter().map(|p| p.sub(base)).collect();
    AffinePlane::new(&span, base)
}

/// The (k-1)-sphere cut from S^{n-1} by a plane meeting the ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossSection {
    pub center_in_plane: Vector,
    pub radius: f64,
}

pub fn cross_section(plane: &AffinePlane) -> Result<CrossSection, GeometryError> {
    let d = plane.offset().norm();
    if d >= 1.0 - Tolerances::default().sphere {
        return Err(GeometryError::Disjoint);
    }
    Ok(CrossSection {
        center_in_plane: plane.offset().clone(),
        radius: (1.0 - d * d).sqrt(),
    })
}

/// Center and radius of phi_a(E0 ∩ S^{n-1}) for a linear plane E0, |a| < 1.
///
/// The image subsphere has center phi_a(Pr_{E0} a) and radius
/// sqrt((1-|a|^2)/(1-|a'|^2)) with a' = Pr_{E0} a.
pub fn image_subsphere(
    plane0: &AffinePlane,
    a: &Vector,
) -> Result<(Vector, f64), GeometryError> {
    assert!(
        plane0.offset().norm() < 1e-9,
        "image_subsphere requires a linear plane"
    );
    let a_proj = plane0.project_span(a);
    let center = phi(a, &a_proj)?;
    let radius = ((1.0 - a.norm_sq()) / (1.0 - a_proj.norm_sq())).sqrt();
    Ok((center, radius))
}

/// The plane E' with phi_a(E ∩ B^n) = E' ∩ B^n, by mapping k+1 affinely
/// independent interior points through phi and refitting.
pub fn plane_image_under_phi(
    a: &Vector,
    plane: &AffinePlane,
) -> Result<AffinePlane, GeometryError> {
    let section = cross_section(plane)?;
    let c = section.center_in_plane;
    // c and c + (r/2) b_j are interior: |c + t b_j|^2 = |c|^2 + t^2 < 1.
    let t = section.radius / 2.0;
    let mut points = vec![phi(a, &c)?];
    for b in plane.basis() {
        points.push(phi(a, &c.axpy(t, b))?);
    }
    plane_from_points(&points)
}
