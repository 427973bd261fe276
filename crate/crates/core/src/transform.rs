//! Quadrature evaluation of the shifted Funk transform and the parallel
//! slice transform, Jacobian weights, intertwining operators, and the
//! evaluable function representation they act on.

use std::sync::Arc;

use thiserror::Error;

use crate::dynamics::{rho, sigma, tau, DynamicsError};
use crate::geometry::{cross_section, phi, AffinePlane, GeometryError, SpherePoint, Vector};
use crate::Tolerances;

/// Default node count for circle (k = 2) section rules.
pub const DEFAULT_CIRCLE_ORDER: usize = 64;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("center is not on the integration plane (distance {0:e})")]
    CenterNotOnPlane(f64),
    #[error("direction does not lie in the plane's span (residual {0:e})")]
    NotParallel(f64),
    #[error("denominator 1 - <y,a> below tolerance")]
    DegenerateDenominator,
    #[error("infinite center where a finite one is required")]
    InfiniteCenter,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Surface area of the unit m-sphere S^m.
pub fn sphere_surface_area(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => sphere_surface_area(m - 2) * 2.0 * std::f64::consts::PI / (m - 1) as f64,
    }
}

// ---------------------------------------------------------------------------
// SphericalFunction: immutable expression tree over C(S^{n-1})
// ---------------------------------------------------------------------------

/// A continuous function on the unit sphere, built as an immutable
/// expression tree. Cloning is cheap (shared nodes); evaluation is pure and
/// re-entrant.
#[derive(Clone, Debug)]
pub struct SphericalFunction(Arc<Node>);

#[derive(Debug)]
enum Node {
    Constant(f64),
    /// Product of coordinate powers restricted to the sphere.
    Monomial { exponents: Vec<u32> },
    /// Real spherical harmonic Y_{l,m} on S^2 (n = 3 only).
    Harmonic { l: u32, m: i32 },
    /// Smooth geodesic cap bump: exp(1 - 1/(1 - (d/r)^2)) for d < r, else 0.
    CapBump { center: SpherePoint, radius: f64 },
    Scale { factor: f64, inner: SphericalFunction },
    Sum(Vec<SphericalFunction>),
    Product(Vec<SphericalFunction>),
    ComposeTau { a: Vector, inner: SphericalFunction },
    ComposeSigma { b: Vector, inner: SphericalFunction },
    ComposePhi { a: Vector, inner: SphericalFunction },
    /// Multiplication by the weight rho_a.
    WeightRho { a: Vector, k: usize, inner: SphericalFunction },
    /// The Jacobian J_a as a standalone factor.
    Jacobian { a: Vector, k: usize },
}

impl SphericalFunction {
    fn node(n: Node) -> Self {
        SphericalFunction(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Constant(c))
    }

    /// x ↦ Π x_i^{e_i}.
    pub fn monomial(exponents: Vec<u32>) -> Self {
        Self::node(Node::Monomial { exponents })
    }

    /// The coordinate function x ↦ x_i in ambient dimension n.
    pub fn coordinate(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut exponents = vec![0u32; n];
        exponents[i] = 1;
        Self::monomial(exponents)
    }

    /// Real spherical harmonic Y_{l,m}, |m| <= l, orthonormal on S^2.
    pub fn harmonic(l: u32, m: i32) -> Self {
        assert!(m.unsigned_abs() <= l, "harmonic requires |m| <= l");
        Self::node(Node::Harmonic { l, m })
    }

    /// Cap bump supported on the geodesic ball of the given radius; value 1
    /// at the center.
    pub fn cap_bump(center: SpherePoint, radius: f64) -> Self {
        assert!(radius > 0.0);
        Self::node(Node::CapBump { center, radius })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::node(Node::Scale {
            factor,
            inner: self.clone(),
        })
    }

    pub fn add(&self, other: &SphericalFunction) -> Self {
        Self::node(Node::Sum(vec![self.clone(), other.clone()]))
    }

    pub fn sub(&self, other: &SphericalFunction) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn sum(terms: Vec<SphericalFunction>) -> Self {
        Self::node(Node::Sum(terms))
    }

    pub fn mul(&self, other: &SphericalFunction) -> Self {
        Self::node(Node::Product(vec![self.clone(), other.clone()]))
    }

    pub fn product(factors: Vec<SphericalFunction>) -> Self {
        Self::node(Node::Product(factors))
    }

    /// x ↦ f(tau_a x).
    pub fn compose_tau(&self, a: Vector) -> Self {
        Self::node(Node::ComposeTau {
            a,
            inner: self.clone(),
        })
    }

    /// x ↦ f(sigma_b x).
    pub fn compose_sigma(&self, b: Vector) -> Self {
        Self::node(Node::ComposeSigma {
            b,
            inner: self.clone(),
        })
    }

    /// x ↦ f(phi_a x), |a| < 1.
    pub fn compose_phi(&self, a: Vector) -> Self {
        assert!(a.norm_sq() < 1.0);
        Self::node(Node::ComposePhi {
            a,
            inner: self.clone(),
        })
    }

    /// x ↦ rho_a(x) f(x).
    pub fn weight_rho(&self, a: Vector, k: usize) -> Self {
        Self::node(Node::WeightRho {
            a,
            k,
            inner: self.clone(),
        })
    }

    /// The Jacobian factor J_a(·) as a function, |a| < 1.
    pub fn jacobian_factor(a: Vector, k: usize) -> Self {
        assert!(a.norm_sq() < 1.0);
        Self::node(Node::Jacobian { a, k })
    }

    /// Evaluates at a sphere point. Deterministic; errors only at measure-zero
    /// degeneracies of the composed maps.
    pub fn eval(&self, x: &SpherePoint) -> Result<f64, TransformError> {
        match &*self.0 {
            Node::Constant(c) => Ok(*c),
            Node::Monomial { exponents } => {
                assert_eq!(exponents.len(), x.dim());
                let mut v = 1.0;
                for (xi, e) in x.vector().0.iter().zip(exponents) {
                    v *= xi.powi(*e as i32);
                }
                Ok(v)
            }
            Node::Harmonic { l, m } => Ok(real_spherical_harmonic(*l, *m, x)),
            Node::CapBump { center, radius } => {
                let d = x.geodesic_distance(center);
                if d >= *radius {
                    Ok(0.0)
                } else {
                    let u = d / radius;
                    Ok((1.0 - 1.0 / (1.0 - u * u)).exp())
                }
            }
            Node::Scale { factor, inner } => Ok(factor * inner.eval(x)?),
            Node::Sum(terms) => {
                let mut acc = KahanSum::new();
                for t in terms {
                    acc.add(t.eval(x)?);
                }
                Ok(acc.value())
            }
            Node::Product(factors) => {
                let mut v = 1.0;
                for f in factors {
                    v *= f.eval(x)?;
                }
                Ok(v)
            }
            Node::ComposeTau { a, inner } => inner.eval(&tau(a, x)?),
            Node::ComposeSigma { b, inner } => {
                inner.eval(&SpherePoint::new(sigma(b, x.vector())?).map_err(DynamicsError::from)?)
            }
            Node::ComposePhi { a, inner } => {
                inner.eval(&SpherePoint::new(phi(a, x.vector())?)?)
            }
            Node::WeightRho { a, k, inner } => Ok(rho(a, x, *k)? * inner.eval(x)?),
            Node::Jacobian { a, k } => jacobian(a, x, *k),
        }
    }
}

/// Real orthonormal spherical harmonic Y_{l,m} on S^2 ⊂ R^3, with
/// cos(mφ)/sin(|m|φ) convention for m > 0 / m < 0.
fn real_spherical_harmonic(l: u32, m: i32, x: &SpherePoint) -> f64 {
    assert_eq!(x.dim(), 3, "harmonics are defined for n = 3");
    let v = x.vector();
    let z = v.0[2].clamp(-1.0, 1.0);
    let phi_angle = v.0[1].atan2(v.0[0]);
    let ma = m.unsigned_abs();
    let p = associated_legendre(l, ma, z);
    // (l-|m|)! / (l+|m|)! computed as a running product.
    let mut ratio = 1.0;
    for j in (l - ma + 1)..=(l + ma) {
        ratio /= j as f64;
    }
    let norm = ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI) * ratio).sqrt();
    if m == 0 {
        norm * p
    } else if m > 0 {
        std::f64::consts::SQRT_2 * norm * p * (ma as f64 * phi_angle).cos()
    } else {
        std::f64::consts::SQRT_2 * norm * p * (ma as f64 * phi_angle).sin()
    }
}

/// Associated Legendre P_l^m with the Condon-Shortley phase.
fn associated_legendre(l: u32, m: u32, x: f64) -> f64 {
    // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
    let mut pmm = 1.0;
    if m > 0 {
        let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
        let mut fact = 1.0;
        for _ in 0..m {
            pmm *= -fact * s;
            fact += 2.0;
        }
    }
    if l == m {
        return pmm;
    }
    let mut pmm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmm1;
    }
    for ll in (m + 2)..=l {
        let p = (x * (2 * ll - 1) as f64 * pmm1 - (ll + m - 1) as f64 * pmm)
            / (ll - m) as f64;
        pmm = pmm1;
        pmm1 = p;
    }
    pmm1
}

/// Compensated (Kahan) accumulator; fixed order makes sums deterministic.
struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    fn new() -> Self {
        KahanSum { sum: 0.0, c: 0.0 }
    }

    fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P'_n(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Quadrature points and weights on the section subsphere E ∩ S^{n-1}.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn weight_sum(&self) -> f64 {
        let mut acc = KahanSum::new();
        for w in &self.weights {
            acc.add(*w);
        }
        acc.value()
    }

    /// Σ w_i f(x_i) with compensated summation in fixed node order.
    pub fn integrate(&self, f: &SphericalFunction) -> Result<f64, TransformError> {
        let mut acc = KahanSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f.eval(x)?);
        }
        Ok(acc.value())
    }
}

/// Product rule on the unit sphere S^{n-1} ⊂ R^n: `azimuth` uniform angles
/// at the base circle, `polar` Gauss-Legendre colatitude nodes per recursion
/// level. Weights sum to the surface area σ_{n-1}.
pub fn unit_sphere_rule(n: usize, polar: usize, azimuth: usize) -> Vec<(Vector, f64)> {
    assert!(n >= 1);
    match n {
        1 => vec![
            (Vector::new(vec![1.0]), 1.0),
            (Vector::new(vec![-1.0]), 1.0),
        ],
        2 => {
            let w = 2.0 * std::f64::consts::PI / azimuth as f64;
            (0..azimuth)
                .map(|j| {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / azimuth as f64;
                    (Vector::new(vec![t.cos(), t.sin()]), w)
                })
                .collect()
        }
        _ => {
            // Colatitude theta via Gauss-Legendre on [0, pi]: the weight
            // sin^{n-2}(theta) is analytic, so the rule is spectrally
            // accurate in every ambient dimension.
            let (ts, tw) = gauss_legendre(polar);
            let lower = unit_sphere_rule(n - 1, polar, azimuth);
            let mut out = Vec::with_capacity(ts.len() * lower.len());
            let half_pi = std::f64::consts::FRAC_PI_2;
            // x = (sin(theta) y, cos(theta)), dA = sin^{n-2} dtheta dA_{n-2}
            for (&u, &wu) in ts.iter().zip(&tw) {
                let theta = half_pi * (u + 1.0);
                let (s, t) = (theta.sin(), theta.cos());
                let w = wu * half_pi * s.powi(n as i32 - 2);
                for (y, wy) in &lower {
                    let mut coords = y.scale(s).0;
                    coords.push(t);
                    out.push((Vector::new(coords), w * wy));
                }
            }
            out
        }
    }
}

/// Full-sphere quadrature rule in ambient dimension n.
pub fn full_sphere_rule(n: usize, polar: usize, azimuth: usize) -> QuadratureRule {
    let raw = unit_sphere_rule(n, polar, azimuth);
    let mut nodes = Vec::with_capacity(raw.len());
    let mut weights = Vec::with_capacity(raw.len());
    for (v, w) in raw {
        nodes.push(SpherePoint::new(v).expect("unit rule point"));
        weights.push(w);
    }
    QuadratureRule { nodes, weights }
}

/// Quadrature rule for the (k-1)-subsphere E ∩ S^{n-1}.
///
/// k = 1: the 0-sphere with unit (counting) weights; k = 2: `order` uniform
/// angles on the section circle; k >= 3: product rule with `order` azimuths
/// and `order/2` colatitude nodes per level.
pub fn section_rule(plane: &AffinePlane, order: usize) -> Result<QuadratureRule, TransformError> {
    assert!(order >= 2);
    let k = plane.dim();
    assert!(k >= 1);
    let section = cross_section(plane)?;
    let c = &section.center_in_plane;
    let r = section.radius;
    let basis = plane.basis();
    let embed = |coords: &[f64]| -> SpherePoint {
        let mut p = c.clone();
        for (u, b) in coords.iter().zip(basis) {
            p = p.axpy(r * u, b);
        }
        SpherePoint::new(p).expect("section node on sphere")
    };
    match k {
        1 => Ok(QuadratureRule {
            nodes: vec![embed(&[1.0]), embed(&[-1.0])],
            weights: vec![1.0, 1.0],
        }),
        2 => {
            let w = 2.0 * std::f64::consts::PI * r / order as f64;
            let mut nodes = Vec::with_capacity(order);
            for j in 0..order {
                let t = 2.0 * std::f64::consts::PI * j as f64 / order as f64;
                nodes.push(embed(&[t.cos(), t.sin()]));
            }
            Ok(QuadratureRule {
                nodes,
                weights: vec![w; order],
            })
        }
        _ => {
            let scale = r.powi(k as i32 - 1);
            let raw = unit_sphere_rule(k, (order / 2).max(4), order);
            let mut nodes = Vec::with_capacity(raw.len());
            let mut weights = Vec::with_capacity(raw.len());
            for (u, w) in raw {
                nodes.push(embed(&u.0));
                weights.push(w * scale);
            }
            Ok(QuadratureRule { nodes, weights })
        }
    }
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// The shifted Funk transform value (F_a f)(E) for a finite center a on E.
pub fn funk(
    a: &Vector,
    f: &SphericalFunction,
    plane: &AffinePlane,
    order: usize,
) -> Result<f64, TransformError> {
    let d = plane.distance_to(a);
    if d > Tolerances::default().verdict {
        return Err(TransformError::CenterNotOnPlane(d));
    }
    section_rule(plane, order)?.integrate(f)
}

/// The parallel slice transform value (Π_dir f)(E) for a plane containing
/// the direction dir.
pub fn slice_transform(
    dir: &Vector,
    f: &SphericalFunction,
    plane: &AffinePlane,
    order: usize,
) -> Result<f64, TransformError> {
    let u = dir
        .normalized()
        .map_err(GeometryError::from)
        .map_err(TransformError::from)?;
    let residual = u.sub(&plane.project_span(&u)).norm();
    if residual > Tolerances::default().verdict {
        return Err(TransformError::NotParallel(residual));
    }
    section_rule(plane, order)?.integrate(f)
}

/// Jacobian J_a(y) = (sqrt(1-|a|^2) / (1 - <y,a>))^{k-1}, |a| < 1.
pub fn jacobian(a: &Vector, y: &SpherePoint, k: usize) -> Result<f64, TransformError> {
    assert!(a.norm_sq() < 1.0, "jacobian requires |a| < 1");
    assert!(k >= 1);
    if k == 1 {
        return Ok(1.0);
    }
    let denom = 1.0 - y.vector().dot(a);
    if denom.abs() < Tolerances::default().degeneracy {
        return Err(TransformError::DegenerateDenominator);
    }
    Ok(((1.0 - a.norm_sq()).sqrt() / denom).powi(k as i32 - 1))
}

/// Intertwiner to the central transform: M_a f = (f ∘ phi_a) · J_a, so that
/// (F_a f)(E) = (F_0 M_a f)(phi_a(E)).
pub fn intertwine_ma(a: &Vector, f: &SphericalFunction, k: usize) -> SphericalFunction {
    assert!(a.norm_sq() < 1.0);
    SphericalFunction::product(vec![
        f.compose_phi(a.clone()),
        SphericalFunction::jacobian_factor(a.clone(), k),
    ])
}

/// Intertwiner to the slice transform: M_{b*} with b* = b/|b|^2, so that
/// (F_b f)(E) = (Π_{b/|b|} M_{b*} f)(phi_{b*}(E)).
pub fn intertwine_mbstar(
    b: &Vector,
    f: &SphericalFunction,
    k: usize,
) -> Result<SphericalFunction, TransformError> {
    assert!(b.norm_sq() > 1.0, "exterior center required");
    let bstar = crate::geometry::inversion_point(b)?;
    Ok(intertwine_ma(&bstar, f, k))
}
