//! The weighted composition operators W_a and W = W_a W_b, odd projections,
//! and the constructive common-kernel witness for periodic center pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{apply_symmetry, random_sphere_point, v_map, DynamicsError};
use crate::geometry::{AffinePlane, Center, GeometryError, SpherePoint, Vector};
use crate::transform::{funk, slice_transform, SphericalFunction, TransformError};

/// Minimal separation margin required of a kernel basepoint.
pub const BASEPOINT_MARGIN: f64 = 0.05;

/// Candidates examined per search batch; the best margin in a batch wins.
const SEARCH_BATCH: usize = 512;

/// Total candidate budget before the search gives up.
const SEARCH_BUDGET: usize = 100_000;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("basepoint search failed after {trials} trials (best margin {best_margin:e})")]
    SearchFailed { trials: usize, best_margin: f64 },
    #[error("could not sample {got} of {want} admissible planes through the center")]
    PlaneSampling { want: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// W_a f = rho_a · (f ∘ tau_a) for a finite center; for an infinite center
/// the weight is 1 and the symmetry is the hyperplane reflection.
pub fn apply_wa(center: &Center, f: &SphericalFunction, k: usize) -> SphericalFunction {
    match center {
        Center::Finite { v } => f.compose_tau(v.clone()).weight_rho(v.clone(), k),
        Center::Infinite { dir } => f.compose_sigma(dir.clone()),
    }
}

/// W f = W_a W_b f, i.e. x ↦ rho_b(tau_a x) rho_a(x) f(T x).
pub fn apply_w(a: &Center, b: &Center, f: &SphericalFunction, k: usize) -> SphericalFunction {
    apply_wa(a, &apply_wa(b, f, k), k)
}

/// The a-odd projection (f - W_a f)/2; its image satisfies W_a g = -g.
pub fn odd_part(center: &Center, f: &SphericalFunction, k: usize) -> SphericalFunction {
    f.sub(&apply_wa(center, f, k)).scale(0.5)
}

/// A basepoint for the kernel construction together with its separation
/// margin: orbit points pairwise separated and disjoint from the
/// tau_a-image of the orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Basepoint {
    pub point: SpherePoint,
    pub margin: f64,
}

/// Margin of a candidate e: min over pairwise orbit distances and over
/// distances from e to tau_a(O_e). Returns 0 for degenerate candidates.
fn candidate_margin(
    a: &Center,
    b: &Center,
    q: u32,
    e: &SpherePoint,
) -> Result<f64, KernelError> {
    let mut orbit = Vec::with_capacity(q as usize);
    let mut x = e.clone();
    for _ in 0..q {
        orbit.push(x.clone());
        x = v_map(a, b, &x)?;
    }
    let mut margin = f64::INFINITY;
    for i in 0..orbit.len() {
        for j in (i + 1)..orbit.len() {
            margin = margin.min(orbit[i].vector().distance(orbit[j].vector()));
        }
    }
    for p in &orbit {
        let tp = apply_symmetry(a, p)?;
        margin = margin.min(e.vector().distance(tp.vector()));
    }
    Ok(margin)
}

/// Randomized search for a basepoint whose margin exceeds the required
/// separation; within each batch the candidate with the best margin wins,
/// which keeps the downstream cap bump well conditioned.
pub fn find_basepoint(
    a: &Center,
    b: &Center,
    q: u32,
    rng: &mut impl rand::Rng,
) -> Result<Basepoint, KernelError> {
    let n = a.dim();
    let mut best = 0.0f64;
    let mut best_point: Option<SpherePoint> = None;
    let mut trials = 0;
    while trials < SEARCH_BUDGET {
        for _ in 0..SEARCH_BATCH {
            trials += 1;
            let e = random_sphere_point(n, rng);
            let m = match candidate_margin(a, b, q, &e) {
                Ok(m) => m,
                Err(_) => continue, // orbit hit a degeneracy; skip candidate
            };
            if m > best {
                best = m;
                best_point = Some(e);
            }
        }
        if best > BASEPOINT_MARGIN {
            return Ok(Basepoint {
                point: best_point.expect("positive margin implies a candidate"),
                margin: best,
            });
        }
    }
    Err(KernelError::SearchFailed {
        trials,
        best_margin: best,
    })
}

/// Reconstruction recipe for a kernel witness; with the same seed the
/// construction is bit-identical.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelRecipe {
    pub a: Center,
    pub b: Center,
    pub period: u32,
    pub plane_dim: usize,
    pub basepoint: SpherePoint,
    pub margin: f64,
    pub cap_radius: f64,
}

/// Builds a nonzero common-kernel element for a period-q pair:
/// h = cap bump at a well-separated basepoint, g = Σ_{j<q} W^j h,
/// f = g - W_a g. Then f(e) = h(e) = 1 and W_a f = W_b f = -f.
pub fn build_kernel_element(
    a: &Center,
    b: &Center,
    q: u32,
    k: usize,
    rng: &mut impl rand::Rng,
) -> Result<(SphericalFunction, KernelRecipe), KernelError> {
    let base = find_basepoint(a, b, q, rng)?;
    let cap_radius = base.margin / 2.0;
    let h = SphericalFunction::cap_bump(base.point.clone(), cap_radius);
    let mut terms = Vec::with_capacity(q as usize);
    let mut wj = h;
    for _ in 0..q {
        terms.push(wj.clone());
        wj = apply_w(a, b, &wj, k);
    }
    let g = SphericalFunction::sum(terms);
    let f = g.sub(&apply_wa(a, &g, k));
    let recipe = KernelRecipe {
        a: a.clone(),
        b: b.clone(),
        period: q,
        plane_dim: k,
        basepoint: base.point,
        margin: base.margin,
        cap_radius,
    };
    Ok((f, recipe))
}

/// Rebuilds the witness from its recipe (no search, fully deterministic).
pub fn rebuild_kernel_element(recipe: &KernelRecipe) -> SphericalFunction {
    let h = SphericalFunction::cap_bump(recipe.basepoint.clone(), recipe.cap_radius);
    let mut terms = Vec::with_capacity(recipe.period as usize);
    let mut wj = h;
    for _ in 0..recipe.period {
        terms.push(wj.clone());
        wj = apply_w(&recipe.a, &recipe.b, &wj, recipe.plane_dim);
    }
    let g = SphericalFunction::sum(terms);
    g.sub(&apply_wa(&recipe.a, &g, recipe.plane_dim))
}

/// Worst transform value over randomly sampled admissible planes.
#[derive(Clone, Debug, Serialize)]
pub struct AnnihilationReport {
    pub max_abs: f64,
    pub planes_checked: usize,
    pub plane_of_max: AffinePlane,
}

/// Samples `num_planes` random k-planes through the center (finite case) or
/// parallel to the direction (infinite case), all meeting the open ball, and
/// reports the largest |transform value| of f.
pub fn verify_annihilation(
    f: &SphericalFunction,
    center: &Center,
    num_planes: usize,
    order: usize,
    k: usize,
    rng: &mut impl rand::Rng,
) -> Result<AnnihilationReport, KernelError> {
    let n = center.dim();
    assert!(k >= 1 && k < n, "plane dimension must satisfy 1 <= k < n");
    let mut max_abs = -1.0f64;
    let mut plane_of_max = None;
    let mut got = 0;
    let mut attempts = 0;
    let max_attempts = num_planes * 200;
    while got < num_planes && attempts < max_attempts {
        attempts += 1;
        let plane = match center {
            Center::Finite { v } => {
                let span: Vec<Vector> = (0..k)
                    .map(|_| random_sphere_point(n, rng).into_vector())
                    .collect();
                match AffinePlane::new(&span, v) {
                    Ok(p) => p,
                    Err(_) => continue,
                }
            }
            Center::Infinite { dir } => {
                let mut span = vec![dir.clone()];
                span.extend((1..k).map(|_| random_sphere_point(n, rng).into_vector()));
                let offset = random_sphere_point(n, rng)
                    .into_vector()
                    .scale(rng.gen_range(0.0..0.9));
                match AffinePlane::new(&span, &offset) {
                    Ok(p) => p,
                    Err(_) => continue,
                }
            }
        };
        if plane.dim() != k || !plane.meets_ball() {
            continue;
        }
        let value = match center {
            Center::Finite { v } => funk(v, f, &plane, order)?,
            Center::Infinite { dir } => slice_transform(dir, f, &plane, order)?,
        };
        if value.abs() > max_abs {
            max_abs = value.abs();
            plane_of_max = Some(plane);
        }
        got += 1;
    }
    if got < num_planes {
        return Err(KernelError::PlaneSampling {
            want: num_planes,
            got,
        });
    }
    Ok(AnnihilationReport {
        max_abs,
        planes_checked: got,
        plane_of_max: plane_of_max.expect("num_planes >= 1"),
    })
}
