//! Injectivity decisions for paired Funk transforms, multi-center families,
//! and families of parallel slice transforms (reflection-group criterion).

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{
    classify, detect_period, detect_rational, sigma, v_map, DynamicsError, MobiusClass,
};
use crate::geometry::{Center, GeometryError, Vector};
use crate::transform::SphericalFunction;
use crate::AnalysisConfig;

#[derive(Debug, Error)]
pub enum AnalyzerError {
    #[error("the two centers coincide")]
    CoincidentCenters,
    #[error("directions coincide (up to sign)")]
    CoincidentDirections,
    #[error("family of normals is empty")]
    EmptyFamily,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Outcome of an injectivity decision.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum InjectivityVerdict {
    Injective {
        class: Option<MobiusClass>,
        reason: String,
    },
    NonInjective {
        period: u32,
        rotation: (u64, u64),
        #[serde(skip)]
        witness: Option<SphericalFunction>,
    },
    Indeterminate {
        reason: String,
    },
}

impl InjectivityVerdict {
    pub fn is_injective(&self) -> bool {
        matches!(self, InjectivityVerdict::Injective { .. })
    }

    pub fn is_non_injective(&self) -> bool {
        matches!(self, InjectivityVerdict::NonInjective { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            InjectivityVerdict::Injective { .. } => "injective",
            InjectivityVerdict::NonInjective { .. } => "non-injective",
            InjectivityVerdict::Indeterminate { .. } => "indeterminate",
        }
    }
}

/// (⟨a,b⟩-1)² - (1-|a|²)(1-|b|²); nonnegative exactly when the line through
/// the centers meets the sphere.
pub fn discriminant(a: &Vector, b: &Vector) -> f64 {
    let num = a.dot(b) - 1.0;
    num * num - (1.0 - a.norm_sq()) * (1.0 - b.norm_sq())
}

/// Decides injectivity of the paired transform for two finite centers.
pub fn decide_pair(
    a: &Vector,
    b: &Vector,
    cfg: &AnalysisConfig,
    rng: &mut impl rand::Rng,
) -> Result<InjectivityVerdict, AnalyzerError> {
    if a.distance(b) < cfg.tol.verdict {
        return Err(AnalyzerError::CoincidentCenters);
    }
    // <a,b> = 1: period 2, regardless of the classification branch.
    if (a.dot(b) - 1.0).abs() <= cfg.tol.verdict {
        return Ok(InjectivityVerdict::NonInjective {
            period: 2,
            rotation: (1, 2),
            witness: None,
        });
    }
    let class = classify(a, b, cfg);
    match class {
        MobiusClass::Hyperbolic => Ok(InjectivityVerdict::Injective {
            reason: "hyperbolic dynamics: line through the centers crosses the sphere".into(),
            class: Some(class),
        }),
        MobiusClass::Parabolic { .. } => Ok(InjectivityVerdict::Injective {
            reason: "parabolic dynamics: line through the centers tangent to the sphere".into(),
            class: Some(class),
        }),
        MobiusClass::Loxodromic => Ok(InjectivityVerdict::Injective {
            reason: "loxodromic dynamics: centers separated by the sphere".into(),
            class: Some(class),
        }),
        MobiusClass::Elliptic { rational, .. } => match rational {
            None => Ok(InjectivityVerdict::Injective {
                reason: format!(
                    "no rational rotation number with denominator <= {}",
                    cfg.qmax
                ),
                class: Some(class),
            }),
            Some((p, q)) => match detect_period(a, b, cfg, rng) {
                Ok(Some(qc)) => Ok(InjectivityVerdict::NonInjective {
                    period: qc,
                    rotation: (p, q),
                    witness: None,
                }),
                Ok(None) => unreachable!("elliptic-rational pair lost its rotation number"),
                Err(DynamicsError::PeriodConflict {
                    analytic_q,
                    numeric_residual,
                }) => Ok(InjectivityVerdict::Indeterminate {
                    reason: format!(
                        "analytic period {analytic_q} not confirmed numerically \
                         (residual {numeric_residual:e})"
                    ),
                }),
                Err(e) => Err(e.into()),
            },
        },
    }
}

/// Decides injectivity for one finite center paired with a slice transform
/// in direction `dir`.
pub fn decide_finite_infinite(
    a: &Vector,
    dir: &Vector,
    cfg: &AnalysisConfig,
    rng: &mut impl rand::Rng,
) -> Result<InjectivityVerdict, AnalyzerError> {
    let u = dir.normalized()?;
    let a2 = a.norm_sq();
    if a2 < 1.0 {
        return Ok(InjectivityVerdict::Injective {
            class: None,
            reason: "interior finite center: the pairing condition is unsatisfiable".into(),
        });
    }
    let c = a.dot(&u);
    let rhs = a2 - 1.0;
    if c * c > rhs {
        return Ok(InjectivityVerdict::Injective {
            class: None,
            reason: "tangency condition fails: <a,dir>^2 > |a|^2 - 1".into(),
        });
    }
    let ratio = (c / rhs.sqrt()).clamp(-1.0, 1.0);
    let kappa = ratio.acos() / std::f64::consts::PI;
    if kappa <= cfg.eps || kappa >= 1.0 - cfg.eps {
        return Ok(InjectivityVerdict::Injective {
            class: None,
            reason: "degenerate tangency: rotation angle at the boundary".into(),
        });
    }
    match detect_rational(kappa, cfg.qmax, cfg.eps) {
        None => Ok(InjectivityVerdict::Injective {
            class: None,
            reason: format!(
                "no rational rotation number with denominator <= {}",
                cfg.qmax
            ),
        }),
        Some((p, q)) => {
            let ca = Center::Finite { v: a.clone() };
            let cb = Center::Infinite { dir: u };
            confirm_period(&ca, &cb, q as u32, (p, q), cfg, rng)
        }
    }
}

/// Decides injectivity of a pair of slice transforms with directions d1, d2.
pub fn decide_infinite_pair(
    d1: &Vector,
    d2: &Vector,
    cfg: &AnalysisConfig,
    rng: &mut impl rand::Rng,
) -> Result<InjectivityVerdict, AnalyzerError> {
    let u1 = d1.normalized()?;
    let u2 = d2.normalized()?;
    let c = u1.dot(&u2);
    if 1.0 - c.abs() < cfg.tol.verdict {
        return Err(AnalyzerError::CoincidentDirections);
    }
    let kappa = c.clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
    match detect_rational(kappa, cfg.qmax, cfg.eps) {
        None => Ok(InjectivityVerdict::Injective {
            class: None,
            reason: format!(
                "angle between directions is no rational multiple of pi \
                 with denominator <= {}",
                cfg.qmax
            ),
        }),
        Some((p, q)) => {
            let c1 = Center::Infinite { dir: u1 };
            let c2 = Center::Infinite { dir: u2 };
            confirm_period(&c1, &c2, q as u32, (p, q), cfg, rng)
        }
    }
}

/// Numeric confirmation stage shared by the mixed and infinite cases.
fn confirm_period(
    a: &Center,
    b: &Center,
    q: u32,
    rotation: (u64, u64),
    cfg: &AnalysisConfig,
    rng: &mut impl rand::Rng,
) -> Result<InjectivityVerdict, AnalyzerError> {
    let n = a.dim();
    let mut worst = 0.0f64;
    for _ in 0..cfg.period_samples {
        let x0 = crate::dynamics::random_sphere_point(n, rng);
        let mut x = x0.clone();
        for _ in 0..q {
            x = v_map(a, b, &x)?;
        }
        worst = worst.max(x.vector().distance(x0.vector()));
    }
    if worst <= cfg.period_residual {
        Ok(InjectivityVerdict::NonInjective {
            period: q,
            rotation,
            witness: None,
        })
    } else {
        Ok(InjectivityVerdict::Indeterminate {
            reason: format!(
                "analytic period {q} not confirmed numerically (residual {worst:e})"
            ),
        })
    }
}

/// Per-pair record inside a multi-center report.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub verdict: InjectivityVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiVerdict {
    #[serde(flatten)]
    pub overall: InjectivityVerdict,
    pub pairs: Vec<PairReport>,
}

/// Decides a family of s >= 2 centers (finite or infinite). Only the
/// sufficient direction is asserted: one injective pair settles the family;
/// an all-pairs-periodic family is an open question, reported as such.
pub fn decide_multi(
    centers: &[Center],
    cfg: &AnalysisConfig,
    rng: &mut impl rand::Rng,
) -> Result<MultiVerdict, AnalyzerError> {
    assert!(centers.len() >= 2);
    let mut pairs = Vec::new();
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let verdict = match (&centers[i], &centers[j]) {
                (Center::Finite { v: a }, Center::Finite { v: b }) => decide_pair(a, b, cfg, rng)?,
                (Center::Finite { v: a }, Center::Infinite { dir })
                | (Center::Infinite { dir }, Center::Finite { v: a }) => {
                    decide_finite_infinite(a, dir, cfg, rng)?
                }
                (Center::Infinite { dir: d1 }, Center::Infinite { dir: d2 }) => {
                    decide_infinite_pair(d1, d2, cfg, rng)?
                }
            };
            pairs.push(PairReport { i, j, verdict });
        }
    }
    if centers.len() == 2 {
        let overall = pairs[0].verdict.clone();
        return Ok(MultiVerdict { overall, pairs });
    }
    let overall = if let Some(p) = pairs.iter().find(|p| p.verdict.is_injective()) {
        InjectivityVerdict::Injective {
            class: None,
            reason: format!("pair ({}, {}) is injective, hence the family is", p.i, p.j),
        }
    } else if pairs.iter().all(|p| p.verdict.is_non_injective()) {
        InjectivityVerdict::Indeterminate {
            reason: "every pair is periodic; whether such a family has trivial common \
                     kernel is an open question"
                .into(),
        }
    } else {
        InjectivityVerdict::Indeterminate {
            reason: "no injective pair found and at least one pair is indeterminate".into(),
        }
    };
    Ok(MultiVerdict { overall, pairs })
}

/// A family of distinct unit normals defining hyperplane reflections.
#[derive(Clone, Debug, Serialize)]
pub struct ReflectionFamily {
    normals: Vec<Vector>,
}

impl ReflectionFamily {
    /// Normalizes and deduplicates modulo sign (tolerance 1e-10).
    pub fn new(normals: &[Vector]) -> Result<Self, AnalyzerError> {
        if normals.is_empty() {
            return Err(AnalyzerError::EmptyFamily);
        }
        let mut out: Vec<Vector> = Vec::new();
        for v in normals {
            let u = v.normalized()?;
            if !out.iter().any(|w| same_mirror(w, &u, 1e-10)) {
                out.push(u);
            }
        }
        Ok(ReflectionFamily { normals: out })
    }

    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }
}

fn same_mirror(u: &Vector, v: &Vector, tol: f64) -> bool {
    u.distance(v) <= tol || u.distance(&v.scale(-1.0)) <= tol
}

/// Result of the orbit-closure finiteness test.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "group", rename_all = "lowercase")]
pub enum GroupClosure {
    Finite { mirror_normals: Vec<Vector> },
    Infinite { witness_count: usize },
}

/// Closure of the mirror set under the family's reflections: finite when the
/// set stabilizes below `cap`, infinite when the cap is exceeded.
/// Grid-hash index over unit normals identified modulo sign, so membership
/// checks stay cheap even for closures with thousands of mirrors.
struct MirrorIndex {
    cell: f64,
    tol: f64,
    buckets: std::collections::HashMap<Vec<i64>, Vec<usize>>,
    items: Vec<Vector>,
}

impl MirrorIndex {
    fn new(tol: f64) -> Self {
        MirrorIndex {
            cell: 1e-6,
            tol,
            buckets: std::collections::HashMap::new(),
            items: Vec::new(),
        }
    }

    fn key(&self, v: &Vector) -> Vec<i64> {
        v.0.iter().map(|x| (x / self.cell).floor() as i64).collect()
    }

    fn contains(&self, w: &Vector) -> bool {
        let neg = w.scale(-1.0);
        for cand in [w, &neg] {
            let base = self.key(cand);
            let dims = base.len();
            // Probe the 3^dims neighborhood of the candidate's cell.
            let mut offsets = vec![-1i64; dims];
            loop {
                let key: Vec<i64> = base.iter().zip(&offsets).map(|(k, o)| k + o).collect();
                if let Some(bucket) = self.buckets.get(&key) {
                    if bucket.iter().any(|&i| same_mirror(&self.items[i], w, self.tol)) {
                        return true;
                    }
                }
                let mut carry = true;
                for o in offsets.iter_mut() {
                    if carry {
                        *o += 1;
                        if *o > 1 {
                            *o = -1;
                        } else {
                            carry = false;
                        }
                    }
                }
                if carry {
                    break;
                }
            }
        }
        false
    }

    fn insert(&mut self, w: Vector) {
        let key = self.key(&w);
        self.items.push(w);
        self.buckets.entry(key).or_default().push(self.items.len() - 1);
    }
}

pub fn reflection_group_finite(family: &ReflectionFamily, cap: usize) -> GroupClosure {
    let mut index = MirrorIndex::new(1e-9);
    for v in family.normals() {
        if !index.contains(v) {
            index.insert(v.clone());
        }
    }
    let mut processed = 0;
    while processed < index.items.len() {
        let v = index.items[processed].clone();
        processed += 1;
        for b in family.normals() {
            let w = sigma(b, &v).expect("unit normal").normalized().expect("unit image");
            if !index.contains(&w) {
                index.insert(w);
                if index.items.len() > cap {
                    return GroupClosure::Infinite {
                        witness_count: index.items.len(),
                    };
                }
            }
        }
    }
    GroupClosure::Finite {
        mirror_normals: index.items,
    }
}

/// Decides injectivity of the family of slice transforms with the given
/// normals: non-injective exactly when the reflection group is finite, with
/// the product of mirror functionals as the witness.
pub fn decide_slice_family(
    family: &ReflectionFamily,
    cfg: &AnalysisConfig,
) -> InjectivityVerdict {
    match reflection_group_finite(family, cfg.closure_cap) {
        GroupClosure::Infinite { witness_count } => InjectivityVerdict::Injective {
            class: None,
            reason: format!(
                "reflection group is infinite (mirror closure exceeded {} normals, \
                 reached {witness_count})",
                cfg.closure_cap
            ),
        },
        GroupClosure::Finite { mirror_normals } => {
            let witness = mirror_product(&mirror_normals);
            // Rotation order of the sharpest generator pair; a single mirror
            // is a period-2 reflection.
            let mut period = 2u32;
            let mut rotation = (1u64, 2u64);
            let normals = family.normals();
            for i in 0..normals.len() {
                for j in (i + 1)..normals.len() {
                    let c = normals[i].dot(&normals[j]).clamp(-1.0, 1.0);
                    let kappa = c.acos() / std::f64::consts::PI;
                    let kappa = kappa.min(1.0 - kappa); // mirrors, not signed normals
                    if kappa <= cfg.eps {
                        continue;
                    }
                    if let Some((p, q)) = detect_rational(kappa, cfg.qmax, cfg.eps) {
                        if q as u32 > period {
                            period = q as u32;
                            rotation = (p, q);
                        }
                    }
                }
            }
            InjectivityVerdict::NonInjective {
                period,
                rotation,
                witness: Some(witness),
            }
        }
    }
}

/// f(x) = Π_j <x, b_j> over the complete mirror list.
pub fn mirror_product(normals: &[Vector]) -> SphericalFunction {
    let factors = normals.iter().map(linear_functional).collect();
    SphericalFunction::product(factors)
}

fn linear_functional(b: &Vector) -> SphericalFunction {
    let n = b.dim();
    let terms = (0..n)
        .filter(|&i| b.0[i] != 0.0)
        .map(|i| SphericalFunction::coordinate(n, i).scale(b.0[i]))
        .collect();
    SphericalFunction::sum(terms)
}
