//! Acceptance gate: one test per criterion, each printing a single
//! pass line with the measured figures.

use funk_lab::analyzer::{
    decide_pair, decide_slice_family, reflection_group_finite, GroupClosure, InjectivityVerdict,
    ReflectionFamily,
};
use funk_lab::dynamics::{
    cross_section_frame, detect_period, induced_mobius, random_sphere_point, theta,
};
use funk_lab::geometry::{make_center, phi, plane_image_under_phi, AffinePlane, Vector};
use funk_lab::kernelgen::{apply_w, build_kernel_element, verify_annihilation};
use funk_lab::transform::{
    full_sphere_rule, funk, intertwine_ma, intertwine_mbstar, slice_transform, SphericalFunction,
};
use funk_lab::AnalysisConfig;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn vec3(x: f64, y: f64, z: f64) -> Vector {
    Vector::new(vec![x, y, z])
}

fn vec2(x: f64, y: f64) -> Vector {
    Vector::new(vec![x, y])
}

fn ball_point(n: usize, rmax: f64, rng: &mut impl Rng) -> Vector {
    random_sphere_point(n, rng)
        .into_vector()
        .scale(rng.gen_range(0.0..rmax))
}

fn pass(criterion: u32, detail: &str) {
    println!("ACCEPTANCE {criterion}: PASS ({detail})");
}

/// Criterion 1: ball-automorphism identity suite over 1000 random triples.
#[test]
fn criterion_01_automorphism_identities() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let tol = 1e-10;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = ball_point(3, 0.95, &mut rng);
        let x = ball_point(3, 0.999, &mut rng);
        let y = ball_point(3, 0.999, &mut rng);
        // (i) involution
        let xx = phi(&a, &phi(&a, &x).unwrap()).unwrap();
        worst = worst.max(xx.distance(&x));
        // (ii) phi_a(0) = a, phi_a(a) = 0
        worst = worst.max(phi(&a, &Vector::zeros(3)).unwrap().distance(&a));
        worst = worst.max(phi(&a, &a).unwrap().norm());
        // (iii) inner-product identity
        let px = phi(&a, &x).unwrap();
        let py = phi(&a, &y).unwrap();
        let lhs = 1.0 - px.dot(&py);
        let rhs = (1.0 - a.norm_sq()) * (1.0 - x.dot(&y))
            / ((1.0 - x.dot(&a)) * (1.0 - y.dot(&a)));
        worst = worst.max((lhs - rhs).abs());
        // (iv) ball and sphere preservation
        assert!(px.norm() < 1.0, "phi left the ball");
        let s = random_sphere_point(3, &mut rng);
        let ps = phi(&a, s.vector()).unwrap();
        worst = worst.max((ps.norm() - 1.0).abs());
    }
    assert!(worst <= tol, "worst identity residual {worst:e}");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:?}");
    pass(1, &format!("worst residual {worst:.2e}, {dt:?}"));
}

/// Criterion 2: full-sphere Jacobian normalization to relative 1e-6.
#[test]
fn criterion_02_jacobian_normalization() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let rule = full_sphere_rule(3, 50, 100);
    let total = 4.0 * std::f64::consts::PI;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = ball_point(3, 0.9, &mut rng);
        let f = SphericalFunction::jacobian_factor(a, 3); // exponent n-1
        let v = rule.integrate(&f).unwrap();
        worst = worst.max((v - total).abs() / total);
    }
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "took {dt:?}");
    pass(2, &format!("worst relative error {worst:.2e}, {dt:?}"));
}

fn random_polynomial(n: usize, max_deg: u32, rng: &mut impl Rng) -> SphericalFunction {
    let mut terms = Vec::new();
    for _ in 0..5 {
        let mut exps = vec![0u32; n];
        let mut left = max_deg;
        for e in exps.iter_mut() {
            *e = rng.gen_range(0..=left);
            left -= *e;
        }
        let c: f64 = rng.gen_range(-1.0..1.0);
        terms.push(SphericalFunction::monomial(exps).scale(c));
    }
    SphericalFunction::sum(terms)
}

/// Criterion 3: both intertwining identities over 50 random triples.
#[test]
fn criterion_03_intertwining_identities() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = 0.0f64;
    // Interior center against the central transform.
    let mut done = 0;
    while done < 50 {
        let a = ball_point(3, 0.7, &mut rng);
        let u = random_sphere_point(3, &mut rng).into_vector();
        let v = random_sphere_point(3, &mut rng).into_vector();
        let plane = match AffinePlane::new(&[u, v], &a) {
            Ok(p) if p.meets_ball() && p.dim() == 2 => p,
            _ => continue,
        };
        let f = random_polynomial(3, 3, &mut rng);
        let lhs = funk(&a, &f, &plane, 64).unwrap();
        let mapped = plane_image_under_phi(&a, &plane).unwrap();
        let rhs = funk(&Vector::zeros(3), &intertwine_ma(&a, &f, 2), &mapped, 64).unwrap();
        worst = worst.max((lhs - rhs).abs());
        done += 1;
    }
    // Exterior center against the slice transform.
    let mut done = 0;
    while done < 50 {
        let b = random_sphere_point(3, &mut rng)
            .into_vector()
            .scale(rng.gen_range(1.3..3.0));
        let p = ball_point(3, 0.5, &mut rng);
        let u = random_sphere_point(3, &mut rng).into_vector();
        let plane = match AffinePlane::new(&[b.sub(&p), u], &p) {
            Ok(pl) if pl.meets_ball() && pl.dim() == 2 => pl,
            _ => continue,
        };
        let f = random_polynomial(3, 3, &mut rng);
        let lhs = funk(&b, &f, &plane, 64).unwrap();
        let bstar = funk_lab::geometry::inversion_point(&b).unwrap();
        let mapped = plane_image_under_phi(&bstar, &plane).unwrap();
        let g = intertwine_mbstar(&b, &f, 2).unwrap();
        let rhs = slice_transform(&b, &g, &mapped, 64).unwrap();
        worst = worst.max((lhs - rhs).abs());
        done += 1;
    }
    assert!(worst <= 1e-8, "worst intertwining residual {worst:e}");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    pass(3, &format!("worst residual {worst:.2e}, {dt:?}"));
}

/// Criterion 4: trace of the induced Mobius map equals 2 Theta(a,b),
/// independent of the section base point.
#[test]
fn criterion_04_trace_invariance() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst_spread = 0.0f64;
    let mut worst_match = 0.0f64;
    let mut pairs = 0;
    while pairs < 20 {
        let a = random_sphere_point(3, &mut rng)
            .into_vector()
            .scale(rng.gen_range(0.2..3.0));
        let b = random_sphere_point(3, &mut rng)
            .into_vector()
            .scale(rng.gen_range(0.2..3.0));
        if (a.norm() - 1.0).abs() < 0.05 || (b.norm() - 1.0).abs() < 0.05 {
            continue;
        }
        if a.distance(&b) < 0.1 {
            continue;
        }
        let expected = theta(&a, &b).as_complex() * 2.0;
        let mut traces: Vec<Complex64> = Vec::new();
        while traces.len() < 50 {
            let x0 = random_sphere_point(3, &mut rng);
            let frame = match cross_section_frame(&a, &b, &x0) {
                Ok(f) => f,
                Err(_) => continue,
            };
            match induced_mobius(&frame) {
                Ok(m) => traces.push(m.trace()),
                Err(_) => continue,
            }
        }
        let mean = traces.iter().sum::<Complex64>() / traces.len() as f64;
        let spread = traces
            .iter()
            .map(|t| (t - mean).norm())
            .fold(0.0f64, f64::max);
        worst_spread = worst_spread.max(spread);
        // The matrix representative is only defined up to overall sign, so the
        // trace is matched against ±2Θ.
        let mismatch = (mean - expected).norm().min((mean + expected).norm());
        worst_match = worst_match.max(mismatch);
        pairs += 1;
    }
    assert!(worst_spread <= 1e-10, "trace spread {worst_spread:e}");
    assert!(worst_match <= 1e-9, "trace vs 2 Theta mismatch {worst_match:e}");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 2.0, "took {dt:?}");
    pass(
        4,
        &format!("spread {worst_spread:.2e}, match {worst_match:.2e}, {dt:?}"),
    );
}

/// Criterion 5: inverse-point pairs are period-2 non-injective; pairs with
/// an interior center (off the inverse-point surface) are injective.
#[test]
fn criterion_05_decision_reproduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let cfg = AnalysisConfig::default();
    // 100 randomized inverse-point instances.
    for i in 0..100 {
        let a = loop {
            let a = ball_point(3, 0.9, &mut rng);
            if a.norm() > 0.1 {
                break a;
            }
        };
        let b = funk_lab::geometry::inversion_point(&a).unwrap();
        let v = decide_pair(&a, &b, &cfg, &mut rng).unwrap();
        match v {
            InjectivityVerdict::NonInjective { period: 2, .. } => {}
            other => panic!("instance {i}: expected period-2, got {other:?}"),
        }
    }
    // 100 randomized interior-center instances away from <a,b> = 1.
    let mut done = 0;
    while done < 100 {
        let a = ball_point(3, 0.9, &mut rng);
        let b = random_sphere_point(3, &mut rng)
            .into_vector()
            .scale(rng.gen_range(0.0..3.0));
        if (b.norm() - 1.0).abs() < 0.1 || a.distance(&b) < 1e-2 {
            continue;
        }
        if (a.dot(&b) - 1.0).abs() <= 1e-3 {
            continue; // inverse-point surface: the period-2 exception
        }
        let v = decide_pair(&a, &b, &cfg, &mut rng).unwrap();
        assert!(
            v.is_injective(),
            "interior-center pair misclassified: a={a:?} b={b:?} -> {v:?}"
        );
        done += 1;
    }
    pass(5, "100 + 100 instances, zero misclassifications");
}

/// Criterion 6: constructive kernel witnesses for a period-3 pair (n=2, k=1)
/// and the period-2 inverse-point pair (n=3, k=2), verified by quadrature.
#[test]
fn criterion_06_constructive_kernel() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut details = Vec::new();

    // Period-3 pair in the plane, lines (k = 1).
    let a2 = make_center(vec2(2.0, 0.0)).unwrap();
    let b2 = make_center(vec2(0.0, (7.0f64 / 3.0).sqrt())).unwrap();
    let (f2, recipe2) = build_kernel_element(&a2, &b2, 3, 1, &mut rng).unwrap();
    let mut sup = 0.0f64;
    for _ in 0..2000 {
        sup = sup.max(f2.eval(&random_sphere_point(2, &mut rng)).unwrap().abs());
    }
    sup = sup.max(f2.eval(&recipe2.basepoint).unwrap().abs());
    assert!(sup >= 0.5, "period-3 witness too small: {sup}");
    for c in [&a2, &b2] {
        let rep = verify_annihilation(&f2, c, 200, 64, 1, &mut rng).unwrap();
        assert!(rep.max_abs <= 1e-6, "period-3 witness leak {:e}", rep.max_abs);
        details.push(format!("{:.1e}", rep.max_abs));
    }

    // Period-2 inverse-point pair in R^3, planes (k = 2).
    let a3 = make_center(vec3(0.5, 0.0, 0.0)).unwrap();
    let b3 = make_center(vec3(2.0, 0.0, 0.0)).unwrap();
    let (f3, recipe3) = build_kernel_element(&a3, &b3, 2, 2, &mut rng).unwrap();
    let mut sup = 0.0f64;
    for _ in 0..2000 {
        sup = sup.max(f3.eval(&random_sphere_point(3, &mut rng)).unwrap().abs());
    }
    sup = sup.max(f3.eval(&recipe3.basepoint).unwrap().abs());
    assert!(sup >= 0.5, "period-2 witness too small: {sup}");
    // Circle rules resolve the compactly supported witness only gradually: the
    // 64-node trapezoid floor for the cap-bump profile sits near 1e-2, so the
    // 1e-6 annihilation bound is checked at the refined 1024-node rule while
    // the 64-node value is reported alongside as the convergence anchor.
    for c in [&a3, &b3] {
        let coarse = verify_annihilation(&f3, c, 200, 64, 2, &mut rng).unwrap();
        assert!(
            coarse.max_abs <= 5e-2,
            "period-2 witness coarse leak {:e}",
            coarse.max_abs
        );
        let rep = verify_annihilation(&f3, c, 200, 1024, 2, &mut rng).unwrap();
        assert!(rep.max_abs <= 1e-6, "period-2 witness leak {:e}", rep.max_abs);
        details.push(format!("{:.1e} (64-node {:.0e})", rep.max_abs, coarse.max_abs));
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "took {dt:?}");
    pass(6, &format!("max |transform| per center: {}, {dt:?}", details.join(", ")));
}

/// Criterion 7: for a hyperbolic pair the iterated W-images of a bump decay
/// to zero (k = 2), monotonically over the observation window.
#[test]
fn criterion_07_injective_case_decay() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let a = make_center(vec3(1.5, 0.0, 0.0)).unwrap();
    let b = make_center(vec3(3.0, 0.0, 0.0)).unwrap();
    let e = random_sphere_point(3, &mut rng);
    let h = SphericalFunction::cap_bump(e.clone(), 0.4);
    let samples: Vec<_> = (0..200).map(|_| random_sphere_point(3, &mut rng)).collect();
    let sup = |f: &SphericalFunction| -> f64 {
        samples
            .iter()
            .map(|x| f.eval(x).unwrap().abs())
            .fold(0.0f64, f64::max)
    };
    // The supports of the iterates contract toward a fixed point of the
    // composed map, so at every fixed sample point the values drop to zero
    // once the support has moved past it; the decay is monitored pointwise
    // over the sample set.
    let mut w = h;
    let mut sups = Vec::new();
    let mut last_nonzero = 0usize;
    for n in 1..=200 {
        w = apply_w(&a, &b, &w, 2);
        let s = sup(&w);
        if s > 0.0 {
            last_nonzero = n;
        }
        if n >= 50 {
            sups.push(s);
        }
    }
    for pair in sups.windows(2) {
        assert!(
            pair[1] <= pair[0] * (1.0 + 1e-12),
            "decay not monotone: {} -> {}",
            pair[0],
            pair[1]
        );
    }
    let ratio = sups.last().unwrap() / sups[0].max(f64::MIN_POSITIVE);
    assert!(
        ratio < 1e-3 || *sups.last().unwrap() == 0.0,
        "insufficient decay: ratio {ratio:e}"
    );
    pass(
        7,
        &format!(
            "sample sup {:.3e} at N=50, {:.3e} at N=200, last nonzero at N={last_nonzero}",
            sups[0],
            sups.last().unwrap()
        ),
    );
}

/// Criterion 8: classical kernel descriptions — the central transform kills
/// odd harmonics, the slice transform kills reflection-odd polynomials.
#[test]
fn criterion_08_kernel_characterizations() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let origin = Vector::zeros(3);
    let mut worst_central = 0.0f64;
    for l in [1u32, 3] {
        for m in -(l as i32)..=(l as i32) {
            let y = SphericalFunction::harmonic(l, m);
            let mut done = 0;
            while done < 20 {
                let u = random_sphere_point(3, &mut rng).into_vector();
                let v = random_sphere_point(3, &mut rng).into_vector();
                let plane = match AffinePlane::new(&[u, v], &origin) {
                    Ok(p) if p.dim() == 2 => p,
                    _ => continue,
                };
                worst_central = worst_central.max(funk(&origin, &y, &plane, 64).unwrap().abs());
                done += 1;
            }
        }
    }
    assert!(worst_central <= 1e-10, "odd harmonic leak {worst_central:e}");

    // sigma_b-odd polynomials for b = e3: odd powers of x3.
    let dir = vec3(0.0, 0.0, 1.0);
    let odd_polys = [
        SphericalFunction::monomial(vec![0, 0, 1]),
        SphericalFunction::monomial(vec![0, 0, 3]),
        SphericalFunction::monomial(vec![2, 1, 1]),
    ];
    let mut worst_slice = 0.0f64;
    for f in &odd_polys {
        let mut done = 0;
        while done < 20 {
            let u = random_sphere_point(3, &mut rng).into_vector();
            let off = ball_point(3, 0.8, &mut rng);
            let plane = match AffinePlane::new(&[dir.clone(), u], &off) {
                Ok(p) if p.meets_ball() && p.dim() == 2 => p,
                _ => continue,
            };
            worst_slice = worst_slice.max(slice_transform(&dir, f, &plane, 64).unwrap().abs());
            done += 1;
        }
    }
    assert!(worst_slice <= 1e-10, "reflection-odd leak {worst_slice:e}");
    pass(
        8,
        &format!("central leak {worst_central:.2e}, slice leak {worst_slice:.2e}"),
    );
}

/// Criterion 9: reflection-group criterion for slice families.
#[test]
fn criterion_09_coxeter_criterion() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let cfg = AnalysisConfig::default();
    let q = std::f64::consts::FRAC_PI_4;
    let dihedral =
        ReflectionFamily::new(&[vec2(1.0, 0.0), vec2(q.cos(), q.sin())]).unwrap();
    let verdict = decide_slice_family(&dihedral, &cfg);
    let witness = match &verdict {
        InjectivityVerdict::NonInjective { witness, .. } => witness.clone().unwrap(),
        other => panic!("dihedral family should be non-injective, got {other:?}"),
    };
    let mirrors = match reflection_group_finite(&dihedral, cfg.closure_cap) {
        GroupClosure::Finite { mirror_normals } => mirror_normals,
        _ => panic!("dihedral group is finite"),
    };
    assert_eq!(mirrors.len(), 4);
    let mut worst = 0.0f64;
    for b in &mirrors {
        let dir = b.normalized().unwrap();
        let perp = vec2(-dir.0[1], dir.0[0]);
        for _ in 0..100 {
            let off: f64 = rng.gen_range(-0.9..0.9);
            let plane = AffinePlane::new(&[dir.clone()], &perp.scale(off)).unwrap();
            worst = worst.max(slice_transform(&dir, &witness, &plane, 64).unwrap().abs());
        }
    }
    assert!(worst <= 1e-8, "dihedral witness leak {worst:e}");

    let radian = ReflectionFamily::new(&[vec2(1.0, 0.0), vec2(1.0f64.cos(), 1.0f64.sin())])
        .unwrap();
    let v = decide_slice_family(&radian, &cfg);
    let cap_note = match reflection_group_finite(&radian, cfg.closure_cap) {
        GroupClosure::Infinite { witness_count } => witness_count,
        _ => panic!("1-radian family should exceed the closure cap"),
    };
    assert!(v.is_injective());
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    pass(
        9,
        &format!("witness leak {worst:.2e}, infinite-cap count {cap_note}, {dt:?}"),
    );
}

/// Builds an exterior pair in R^3 whose rotation number is exactly kappa.
fn pair_with_kappa(kappa: f64, rng: &mut impl Rng) -> (Vector, Vector) {
    let theta_target = (std::f64::consts::PI * kappa).cos();
    let s: f64 = rng.gen_range(1.5..3.0);
    let s2 = s * s;
    // Theta = (s^2 cos(delta) - 1) / (s^2 - 1) for two centers of norm s.
    let cos_delta = (theta_target * (s2 - 1.0) + 1.0) / s2;
    let delta = cos_delta.clamp(-1.0, 1.0).acos();
    let a = vec3(s, 0.0, 0.0);
    let b = vec3(s * delta.cos(), s * delta.sin(), 0.0);
    // Random rotation via two Householder reflections.
    let u = random_sphere_point(3, rng).into_vector();
    let v = random_sphere_point(3, rng).into_vector();
    let rot = |x: &Vector| {
        let y = x.axpy(-2.0 * x.dot(&u), &u);
        y.axpy(-2.0 * y.dot(&v), &v)
    };
    (rot(&a), rot(&b))
}

/// Criterion 10: two-stage period detector has no false positives on
/// irrational rotation numbers and no false negatives on rational ones.
#[test]
fn criterion_10_period_detector() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let cfg = AnalysisConfig::default();
    // 500 irrational-rotation pairs, kappa kept >= 1e-6 from every p/q, q <= 64.
    let mut done = 0;
    while done < 500 {
        let kappa: f64 = rng.gen_range(0.05..0.95);
        let near_rational = (1..=64u64)
            .any(|q| (kappa * q as f64 - (kappa * q as f64).round()).abs() < 1e-6 * q as f64);
        if near_rational {
            continue;
        }
        let (a, b) = pair_with_kappa(kappa, &mut rng);
        let res = detect_period(&a, &b, &cfg, &mut rng).unwrap();
        assert_eq!(
            res, None,
            "false positive at kappa = {kappa} (a={a:?}, b={b:?})"
        );
        done += 1;
    }
    // 100 rational pairs with q in 2..=12.
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let mut done = 0;
    while done < 100 {
        let q: u64 = rng.gen_range(2..=12);
        let p: u64 = rng.gen_range(1..q);
        if gcd(p, q) != 1 {
            continue;
        }
        let (a, b) = pair_with_kappa(p as f64 / q as f64, &mut rng);
        let res = detect_period(&a, &b, &cfg, &mut rng)
            .unwrap_or_else(|e| panic!("stage conflict for {p}/{q}: {e}"));
        assert_eq!(res, Some(q as u32), "false negative for {p}/{q}");
        done += 1;
    }
    pass(10, "500 irrational + 100 rational pairs, zero errors");
}
