//! Randomized invariant checks for the geometric maps, the quadrature rules,
//! and the decision procedure.

use funk_lab::analyzer::decide_pair;
use funk_lab::dynamics::{detect_rational, rho, sigma, tau, theta, v_map, ThetaValue};
use funk_lab::geometry::{
    make_center, phi, plane_from_points, AffinePlane, Center, SpherePoint, Vector,
};
use funk_lab::kernelgen::{apply_wa, odd_part};
use funk_lab::transform::{section_rule, SphericalFunction};
use funk_lab::AnalysisConfig;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;

/// Unit vector built from raw coordinates, skipping near-zero inputs.
fn unit_from(raw: &[f64]) -> Option<Vector> {
    let v = Vector::new(raw.to_vec());
    if v.norm() < 1e-3 {
        return None;
    }
    v.normalized().ok()
}

/// Sphere point from raw coordinates.
fn sphere_from(raw: &[f64]) -> Option<SpherePoint> {
    unit_from(raw).and_then(|v| SpherePoint::new(v).ok())
}

/// Center vector scaled to the requested radius, avoiding the unit shell.
fn center_from(raw: &[f64], radius: f64) -> Option<Vector> {
    if (radius - 1.0).abs() < 0.05 {
        return None;
    }
    unit_from(raw).map(|v| v.scale(radius))
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // tau is an involution for interior and exterior centers alike.
    #[test]
    fn tau_involution(raw_a in coords(3), raw_x in coords(3), r in 0.1f64..3.0) {
        let (Some(a), Some(x)) = (center_from(&raw_a, r), sphere_from(&raw_x)) else { return Ok(()); };
        if a.distance(x.vector()) < 1e-3 { return Ok(()); }
        let y = tau(&a, &x).unwrap();
        if a.distance(y.vector()) < 1e-3 { return Ok(()); }
        let back = tau(&a, &y).unwrap();
        prop_assert!(back.vector().distance(x.vector()) < 1e-9);
    }

    // The density factor satisfies rho_a(tau_a x) * rho_a(x) = 1.
    #[test]
    fn rho_reciprocal(raw_a in coords(3), raw_x in coords(3), r in 0.1f64..3.0, k in 2usize..5) {
        let (Some(a), Some(x)) = (center_from(&raw_a, r), sphere_from(&raw_x)) else { return Ok(()); };
        if a.distance(x.vector()) < 1e-2 { return Ok(()); }
        let y = tau(&a, &x).unwrap();
        if a.distance(y.vector()) < 1e-2 { return Ok(()); }
        let prod = rho(&a, &x, k).unwrap() * rho(&a, &y, k).unwrap();
        prop_assert!((prod - 1.0).abs() < 1e-9, "product {prod}");
    }

    // The hyperplane reflection is an involutive isometry of the sphere.
    #[test]
    fn sigma_involution(raw_b in coords(3), raw_x in coords(3)) {
        let (Some(b), Some(x)) = (unit_from(&raw_b), sphere_from(&raw_x)) else { return Ok(()); };
        let y = sigma(&b, x.vector()).unwrap();
        prop_assert!((y.norm() - 1.0).abs() < 1e-12);
        let back = sigma(&b, &y).unwrap();
        prop_assert!(back.distance(x.vector()) < 1e-12);
    }

    // The ball automorphism phi_a is an involution preserving the sphere.
    #[test]
    fn phi_involution_and_sphere(raw_a in coords(3), raw_x in coords(3), r in 0.0f64..0.9) {
        let (Some(a), Some(x)) = (center_from(&raw_a, r), sphere_from(&raw_x)) else { return Ok(()); };
        let y = phi(&a, x.vector()).unwrap();
        prop_assert!((y.norm() - 1.0).abs() < 1e-10, "phi left the sphere: |y| = {}", y.norm());
        let back = phi(&a, &y).unwrap();
        prop_assert!(back.distance(x.vector()) < 1e-9);
    }

    // Composing the two-center map with its reversed-order counterpart is the
    // identity.
    #[test]
    fn v_map_inverse(raw_a in coords(3), raw_b in coords(3), raw_x in coords(3),
                     ra in 0.1f64..3.0, rb in 0.1f64..3.0) {
        let (Some(av), Some(bv), Some(x)) =
            (center_from(&raw_a, ra), center_from(&raw_b, rb), sphere_from(&raw_x)) else { return Ok(()); };
        let (Ok(a), Ok(b)) = (make_center(av), make_center(bv)) else { return Ok(()); };
        let Ok(y) = v_map(&a, &b, &x) else { return Ok(()); };
        let Ok(back) = v_map(&b, &a, &y) else { return Ok(()); };
        prop_assert!(back.vector().distance(x.vector()) < 1e-8);
    }

    // Theta is symmetric in its two arguments.
    #[test]
    fn theta_symmetric(raw_a in coords(3), raw_b in coords(3), ra in 0.1f64..3.0, rb in 0.1f64..3.0) {
        let (Some(a), Some(b)) = (center_from(&raw_a, ra), center_from(&raw_b, rb)) else { return Ok(()); };
        let t1 = theta(&a, &b);
        let t2 = theta(&b, &a);
        match (t1, t2) {
            (ThetaValue::Real { value: v1 }, ThetaValue::Real { value: v2 }) => {
                prop_assert!((v1 - v2).abs() < 1e-12);
            }
            (ThetaValue::Imaginary { theta_squared: s1 }, ThetaValue::Imaginary { theta_squared: s2 }) => {
                prop_assert!((s1 - s2).abs() < 1e-12);
            }
            (x, y) => prop_assert!(false, "kind mismatch: {x:?} vs {y:?}"),
        }
    }

    // The injectivity verdict does not depend on the order of the centers.
    #[test]
    fn verdict_symmetric(raw_a in coords(3), raw_b in coords(3),
                         ra in 0.1f64..3.0, rb in 0.1f64..3.0, seed in 0u64..1000) {
        let (Some(a), Some(b)) = (center_from(&raw_a, ra), center_from(&raw_b, rb)) else { return Ok(()); };
        if a.distance(&b) < 1e-2 { return Ok(()); }
        let cfg = AnalysisConfig::default();
        let mut rng1 = ChaCha8Rng::seed_from_u64(seed);
        let mut rng2 = ChaCha8Rng::seed_from_u64(seed);
        let (Ok(v1), Ok(v2)) = (decide_pair(&a, &b, &cfg, &mut rng1), decide_pair(&b, &a, &cfg, &mut rng2)) else { return Ok(()); };
        prop_assert_eq!(v1.label(), v2.label());
    }

    // Circle rules: nodes lie on the plane and the sphere, and the weights sum
    // to the circumference of the section circle.
    #[test]
    fn circle_rule_geometry(raw_u in coords(3), raw_v in coords(3), raw_c in coords(3),
                            off in 0.0f64..0.9, order in 8usize..128) {
        let (Some(u), Some(v), Some(c)) = (unit_from(&raw_u), unit_from(&raw_v), unit_from(&raw_c)) else { return Ok(()); };
        if u.dot(&v).abs() > 0.99 { return Ok(()); }
        let Ok(plane) = AffinePlane::new(&[u, v], &c.scale(off)) else { return Ok(()); };
        if plane.dim() != 2 || !plane.meets_ball() { return Ok(()); }
        let d = plane.offset().norm();
        if d > 0.95 { return Ok(()); }
        let radius = (1.0 - d * d).sqrt();
        let rule = section_rule(&plane, order).unwrap();
        prop_assert_eq!(rule.nodes.len(), order);
        prop_assert!((rule.weight_sum() - 2.0 * PI * radius).abs() < 1e-10);
        for x in &rule.nodes {
            prop_assert!((x.vector().norm() - 1.0).abs() < 1e-12);
            prop_assert!(plane.distance_to(x.vector()) < 1e-12);
        }
    }

    // The weighted pullback operator is an involution, and the odd projection
    // is a fixed point of "negate and pull back".
    #[test]
    fn weighted_pullback_involution(raw_a in coords(3), raw_e in coords(3),
                                    r in 0.1f64..3.0, raw_x in coords(3)) {
        let (Some(av), Some(e), Some(x)) =
            (center_from(&raw_a, r), sphere_from(&raw_e), sphere_from(&raw_x)) else { return Ok(()); };
        let Ok(a) = make_center(av.clone()) else { return Ok(()); };
        if av.distance(x.vector()) < 1e-2 { return Ok(()); }
        let f = SphericalFunction::cap_bump(e, 0.8);
        let wf = apply_wa(&a, &f, 2);
        let wwf = apply_wa(&a, &wf, 2);
        let (Ok(v0), Ok(v2)) = (f.eval(&x), wwf.eval(&x)) else { return Ok(()); };
        prop_assert!((v0 - v2).abs() < 1e-9);
        let g = odd_part(&a, &f, 2);
        let wg = apply_wa(&a, &g, 2);
        let (Ok(gv), Ok(wgv)) = (g.eval(&x), wg.eval(&x)) else { return Ok(()); };
        prop_assert!((gv + wgv).abs() < 1e-9);
    }

    // Rational rotation numbers are recovered exactly by the convergent scan.
    #[test]
    fn rational_round_trip(p in 1u64..63, q in 2u64..64) {
        if p >= q { return Ok(()); }
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        let kappa = p as f64 / q as f64;
        let got = detect_rational(kappa, 64, 1e-9);
        prop_assert_eq!(got, Some((p, q)));
    }

    // Planes fitted through sampled points reproduce the sampling plane.
    #[test]
    fn plane_fit_round_trip(raw_u in coords(3), raw_v in coords(3), raw_c in coords(3),
                            off in 0.0f64..0.8, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let (Some(u), Some(v), Some(c)) = (unit_from(&raw_u), unit_from(&raw_v), unit_from(&raw_c)) else { return Ok(()); };
        if u.dot(&v).abs() > 0.95 || s.abs() < 0.1 || t.abs() < 0.1 || (s - t).abs() < 0.1 { return Ok(()); }
        let Ok(plane) = AffinePlane::new(&[u, v], &c.scale(off)) else { return Ok(()); };
        if plane.dim() != 2 { return Ok(()); }
        let p0 = plane.point_at(&[s, t]);
        let p1 = plane.point_at(&[-t, s]);
        let p2 = plane.point_at(&[s + 1.0, t - 1.0]);
        let Ok(refit) = plane_from_points(&[p0, p1, p2]) else { return Ok(()); };
        prop_assert!(refit.approx_eq(&plane, 1e-8));
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Infinite centers act through the mirror reflection, which must also square
/// to the identity (checked outside proptest to exercise the Center enum).
#[test]
fn infinite_center_action_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let dir = funk_lab::dynamics::random_sphere_point(3, &mut rng).into_vector();
        let c = funk_lab::geometry::make_infinite_center(dir).unwrap();
        let x = funk_lab::dynamics::random_sphere_point(3, &mut rng);
        let y = funk_lab::dynamics::apply_symmetry(&c, &x).unwrap();
        let back = funk_lab::dynamics::apply_symmetry(&c, &y).unwrap();
        assert!(back.vector().distance(x.vector()) < 1e-12);
        match &c {
            Center::Infinite { dir } => {
                assert!(
                    (x.vector().dot(dir) + y.vector().dot(dir)).abs() < 1e-12,
                    "reflection must flip the normal component"
                );
            }
            Center::Finite { .. } => unreachable!(),
        }
    }
}
