//! Command-line front end: parses centers, planes and function expressions,
//! runs the library analyses and emits JSON (or CSV orbit) documents.

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::analyzer::{
    decide_finite_infinite, decide_infinite_pair, decide_multi, decide_pair, decide_slice_family,
    discriminant, reflection_group_finite, GroupClosure, InjectivityVerdict, ReflectionFamily,
};
use crate::dynamics::{classify, orbit, theta, MobiusClass, ThetaValue};
use crate::geometry::{
    make_center, make_infinite_center, plane_from_points, AffinePlane, Center, SpherePoint, Vector,
};
use crate::kernelgen::{build_kernel_element, verify_annihilation};
use crate::transform::{funk, slice_transform, SphericalFunction, DEFAULT_CIRCLE_ORDER};
use crate::AnalysisConfig;

pub const SCHEMA: &str = "funk-lab/1";
pub const DEFAULT_SEED: u64 = 7;

#[derive(Parser, Debug)]
#[command(name = "funk-lab", version, about = "Shifted Funk transforms: analysis, dynamics, kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args, Debug)]
struct RunFlags {
    /// RNG seed (env FUNKLAB_SEED takes precedence).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest denominator for rational rotation-number detection.
    #[arg(long, global = true, default_value_t = 64)]
    qmax: u64,
    /// Acceptance width for rational detection.
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps: f64,
    /// Quadrature order.
    #[arg(long, global = true, default_value_t = DEFAULT_CIRCLE_ORDER)]
    order: usize,
    /// Output format: json, or csv (orbit only).
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Injectivity verdict for a pair or family of centers.
    Analyze {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        /// Slice direction paired with --a.
        #[arg(long)]
        dir: Option<String>,
        #[arg(long)]
        d1: Option<String>,
        #[arg(long)]
        d2: Option<String>,
        /// Semicolon-separated center list (prefix inf: for directions).
        #[arg(long)]
        centers: Option<String>,
    },
    /// Mobius classification of a finite center pair.
    Classify {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Orbit of the two-center map from a start point.
    Orbit {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
    },
    /// Evaluate the transform of a function over one plane.
    Transform {
        /// Finite center coordinates, or inf:dir for a slice transform.
        #[arg(long)]
        center: String,
        /// Function expression, e.g. "mono(2,0,1) + 0.5*harm(3,1)".
        #[arg(long)]
        function: String,
        /// Semicolon-separated points spanning the plane.
        #[arg(long)]
        plane_points: Option<String>,
        /// Semicolon-separated basis vectors (with --plane-offset).
        #[arg(long)]
        plane_basis: Option<String>,
        #[arg(long)]
        plane_offset: Option<String>,
    },
    /// Build and verify a common-kernel witness for a periodic pair.
    Kernel {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Plane dimension k (default n-1).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 200)]
        verify_planes: usize,
    },
    /// Reflection-group finiteness and the slice-family verdict.
    Coxeter {
        /// Semicolon-separated unit normals.
        #[arg(long)]
        normals: String,
    },
}

/// Validation failure carrying a machine-readable description.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::new("invalid-input", message)
}

// ---------------------------------------------------------------------------
// Wire-format parsers
// ---------------------------------------------------------------------------

/// "0.5,0,0" -> Vector.
pub fn parse_vector(s: &str) -> Result<Vector, CliError> {
    let coords: Result<Vec<f64>, _> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect();
    let coords = coords.map_err(|e| invalid(format!("bad vector '{s}': {e}")))?;
    if coords.is_empty() {
        return Err(invalid("empty vector"));
    }
    Ok(Vector::new(coords))
}

/// "0.5,0,0" (finite) or "inf:0,0,1" (direction) -> Center.
pub fn parse_center(s: &str) -> Result<Center, CliError> {
    if let Some(rest) = s.strip_prefix("inf:") {
        make_infinite_center(parse_vector(rest)?)
            .map_err(|e| invalid(format!("bad direction '{s}': {e}")))
    } else {
        make_center(parse_vector(s)?).map_err(|e| invalid(format!("bad center '{s}': {e}")))
    }
}

/// "p1;p2;p3" -> vector list.
pub fn parse_vector_list(s: &str) -> Result<Vec<Vector>, CliError> {
    s.split(';').map(parse_vector).collect()
}

fn parse_plane(
    points: &Option<String>,
    basis: &Option<String>,
    offset: &Option<String>,
) -> Result<AffinePlane, CliError> {
    match (points, basis, offset) {
        (Some(p), None, None) => {
            let pts = parse_vector_list(p)?;
            plane_from_points(&pts).map_err(|e| invalid(format!("bad plane points: {e}")))
        }
        (None, Some(b), Some(o)) => {
            let span = parse_vector_list(b)?;
            let off = parse_vector(o)?;
            AffinePlane::new(&span, &off).map_err(|e| invalid(format!("bad plane basis: {e}")))
        }
        _ => Err(invalid(
            "specify either --plane-points or --plane-basis with --plane-offset",
        )),
    }
}

/// Expression grammar over sphere functions:
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := number | 'const(c)' | 'mono(e1,...)' | 'harm(l,m)'
///           | 'bump(c1,...;r)' | 'x(i)' | '(' expr ')' | '-' factor
/// Coordinate indices are 1-based in x(i); mono exponents are per-coordinate.
pub fn parse_function(s: &str, dim: usize) -> Result<SphericalFunction, CliError> {
    let mut p = FnParser {
        src: s,
        pos: 0,
        dim,
    };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(invalid(format!(
            "unexpected trailing input at byte {} of '{s}'",
            p.pos
        )));
    }
    Ok(f)
}

struct FnParser<'a> {
    src: &'a str,
    pos: usize,
    dim: usize,
}

impl<'a> FnParser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CliError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(invalid(format!(
                "expected '{c}' at byte {} of '{}'",
                self.pos, self.src
            )))
        }
    }

    fn expr(&mut self) -> Result<SphericalFunction, CliError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SphericalFunction, CliError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SphericalFunction, CliError> {
        match self.peek() {
            Some('(') => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('-') => {
                self.expect('-')?;
                Ok(self.factor()?.scale(-1.0))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                Ok(SphericalFunction::constant(self.number()?))
            }
            Some(c) if c.is_ascii_alphabetic() => self.call(),
            _ => Err(invalid(format!(
                "expected a factor at byte {} of '{}'",
                self.pos, self.src
            ))),
        }
    }

    fn number(&mut self) -> Result<f64, CliError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        if self.pos < bytes.len() && (bytes[self.pos] == b'-' || bytes[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < bytes.len()
            && (bytes[self.pos].is_ascii_digit()
                || bytes[self.pos] == b'.'
                || bytes[self.pos] == b'e'
                || bytes[self.pos] == b'E'
                || ((bytes[self.pos] == b'-' || bytes[self.pos] == b'+')
                    && matches!(bytes[self.pos - 1], b'e' | b'E')))
        {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|e| invalid(format!("bad number at byte {start}: {e}")))
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        self.src[start..self.pos].to_string()
    }

    fn call(&mut self) -> Result<SphericalFunction, CliError> {
        let name = self.ident();
        self.expect('(')?;
        let f = match name.as_str() {
            "const" => SphericalFunction::constant(self.number()?),
            "x" => {
                let i = self.number()? as usize;
                if i < 1 || i > self.dim {
                    return Err(invalid(format!("coordinate index {i} out of 1..={}", self.dim)));
                }
                SphericalFunction::coordinate(self.dim, i - 1)
            }
            "mono" => {
                let mut exps = vec![self.number()? as u32];
                while self.eat(',') {
                    exps.push(self.number()? as u32);
                }
                if exps.len() != self.dim {
                    return Err(invalid(format!(
                        "mono needs {} exponents, got {}",
                        self.dim,
                        exps.len()
                    )));
                }
                SphericalFunction::monomial(exps)
            }
            "harm" => {
                if self.dim != 3 {
                    return Err(invalid("harm(l,m) is available in dimension 3 only"));
                }
                let l = self.number()? as u32;
                self.expect(',')?;
                let m = self.number()? as i64;
                if m.unsigned_abs() as u32 > l {
                    return Err(invalid("harm requires |m| <= l"));
                }
                SphericalFunction::harmonic(l, m as i32)
            }
            "bump" => {
                let mut coords = vec![self.number()?];
                while self.eat(',') {
                    coords.push(self.number()?);
                }
                self.expect(';')?;
                let r = self.number()?;
                if coords.len() != self.dim {
                    return Err(invalid(format!(
                        "bump center needs {} coordinates, got {}",
                        self.dim,
                        coords.len()
                    )));
                }
                if !(r > 0.0) {
                    return Err(invalid("bump radius must be positive"));
                }
                let c = SpherePoint::new(Vector::new(coords))
                    .map_err(|e| invalid(format!("bad bump center: {e}")))?;
                SphericalFunction::cap_bump(c, r)
            }
            other => return Err(invalid(format!("unknown function '{other}'"))),
        };
        self.expect(')')?;
        Ok(f)
    }
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

fn theta_json(t: &ThetaValue) -> Value {
    match t {
        ThetaValue::Real { value } => json!(value),
        ThetaValue::Imaginary { theta_squared } => json!({ "imaginary_squared": theta_squared }),
    }
}

fn class_json(c: &MobiusClass) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("name".into(), json!(c.name()));
    if let MobiusClass::Elliptic { kappa, rational } = c {
        obj.insert("kappa".into(), json!(kappa));
        obj.insert("rational".into(), json!(rational));
    }
    if let MobiusClass::Parabolic { near_boundary } = c {
        obj.insert("near_boundary".into(), json!(near_boundary));
    }
    Value::Object(obj)
}

fn verdict_json(v: &InjectivityVerdict) -> Value {
    match v {
        InjectivityVerdict::Injective { class, reason } => json!({
            "verdict": "injective",
            "class": class.as_ref().map(class_json),
            "period": null,
            "rotation": null,
            "notes": [reason],
        }),
        InjectivityVerdict::NonInjective {
            period, rotation, ..
        } => json!({
            "verdict": "non-injective",
            "class": null,
            "period": period,
            "rotation": [rotation.0, rotation.1],
            "notes": [],
        }),
        InjectivityVerdict::Indeterminate { reason } => json!({
            "verdict": "indeterminate",
            "class": null,
            "period": null,
            "rotation": null,
            "notes": [reason],
        }),
    }
}

fn pair_detail_json(a: &Vector, b: &Vector, cfg: &AnalysisConfig) -> Value {
    let t = theta(a, b);
    let kappa = match t {
        ThetaValue::Real { value } if value.abs() < 1.0 => {
            Some(value.acos() / std::f64::consts::PI)
        }
        _ => None,
    };
    json!({
        "theta": theta_json(&t),
        "kappa": kappa,
        "discriminant": discriminant(a, b),
        "class": class_json(&classify(a, b, cfg)),
    })
}

fn settings_json(cfg: &AnalysisConfig, seed: u64, order: usize) -> Value {
    json!({
        "seed": seed,
        "qmax": cfg.qmax,
        "eps": cfg.eps,
        "order": order,
        "tolerances": {
            "sphere": cfg.tol.sphere,
            "degeneracy": cfg.tol.degeneracy,
            "verdict": cfg.tol.verdict,
        },
        "period_samples": cfg.period_samples,
        "period_residual": cfg.period_residual,
        "closure_cap": cfg.closure_cap,
    })
}

fn document(command: &str, settings: Value, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "settings": settings,
        "result": result,
    })
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Runs the CLI; returns the process exit code. All output goes to `out`.
pub fn run_to<W: std::io::Write>(args: Vec<String>, out: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            // Help/version are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let doc = json!({
                "schema": SCHEMA,
                "error": { "kind": "usage", "message": e.to_string() },
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap());
            return 2;
        }
    };
    let seed = std::env::var("FUNKLAB_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .or(cli.run.seed)
        .unwrap_or(DEFAULT_SEED);
    let cfg = AnalysisConfig {
        qmax: cli.run.qmax,
        eps: cli.run.eps,
        ..AnalysisConfig::default()
    };
    match execute(&cli, &cfg, seed) {
        Ok(text) => match &cli.run.output {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => 0,
                Err(e) => {
                    let doc = json!({
                        "schema": SCHEMA,
                        "error": { "kind": "io", "message": e.to_string() },
                    });
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap());
                    2
                }
            },
            None => {
                let _ = out.write_all(text.as_bytes());
                0
            }
        },
        Err(err) => {
            let doc = json!({
                "schema": SCHEMA,
                "error": { "kind": err.kind, "message": err.message },
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap());
            2
        }
    }
}

/// Convenience wrapper writing to stdout.
pub fn run(args: Vec<String>) -> i32 {
    let mut stdout = std::io::stdout();
    run_to(args, &mut stdout)
}

fn execute(cli: &Cli, cfg: &AnalysisConfig, seed: u64) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = cli.run.order;
    let settings = settings_json(cfg, seed, order);
    let internal = |e: &dyn std::fmt::Display| CliError::new("analysis", e.to_string());

    let doc = match &cli.command {
        Command::Analyze {
            a,
            b,
            dir,
            d1,
            d2,
            centers,
        } => {
            let result = match (a, b, dir, d1, d2, centers) {
                (Some(a), Some(b), None, None, None, None) => {
                    let (av, bv) = (parse_finite(a)?, parse_finite(b)?);
                    let verdict = decide_pair(&av, &bv, cfg, &mut rng)
                        .map_err(|e| internal(&e))?;
                    let mut v = verdict_json(&verdict);
                    merge(&mut v, pair_detail_json(&av, &bv, cfg));
                    v
                }
                (Some(a), None, Some(dir), None, None, None) => {
                    let av = parse_finite(a)?;
                    let dv = parse_vector(dir)?;
                    let verdict = decide_finite_infinite(&av, &dv, cfg, &mut rng)
                        .map_err(|e| internal(&e))?;
                    verdict_json(&verdict)
                }
                (None, None, None, Some(d1), Some(d2), None) => {
                    let verdict = decide_infinite_pair(
                        &parse_vector(d1)?,
                        &parse_vector(d2)?,
                        cfg,
                        &mut rng,
                    )
                    .map_err(|e| internal(&e))?;
                    verdict_json(&verdict)
                }
                (None, None, None, None, None, Some(list)) => {
                    let centers: Result<Vec<Center>, _> =
                        list.split(';').map(parse_center).collect();
                    let centers = centers?;
                    if centers.len() < 2 {
                        return Err(invalid("need at least two centers"));
                    }
                    let multi =
                        decide_multi(&centers, cfg, &mut rng).map_err(|e| internal(&e))?;
                    let pairs: Vec<Value> = multi
                        .pairs
                        .iter()
                        .map(|p| {
                            json!({
                                "i": p.i,
                                "j": p.j,
                                "report": verdict_json(&p.verdict),
                            })
                        })
                        .collect();
                    let mut v = verdict_json(&multi.overall);
                    merge(&mut v, json!({ "pairs": pairs }));
                    v
                }
                _ => {
                    return Err(invalid(
                        "analyze needs --a/--b, --a/--dir, --d1/--d2, or --centers",
                    ))
                }
            };
            document("analyze", settings, result)
        }
        Command::Classify { a, b } => {
            let (av, bv) = (parse_finite(a)?, parse_finite(b)?);
            if av.distance(&bv) < cfg.tol.verdict {
                return Err(invalid("centers coincide"));
            }
            document("classify", settings, pair_detail_json(&av, &bv, cfg))
        }
        Command::Orbit { a, b, x0, max_iter } => {
            let ca = parse_center(a)?;
            let cb = parse_center(b)?;
            let x0 = SpherePoint::new(parse_vector(x0)?)
                .map_err(|e| invalid(format!("bad start point: {e}")))?;
            let points = orbit(&ca, &cb, &x0, *max_iter).map_err(|e| internal(&e))?;
            if cli.run.format == "csv" {
                return Ok(orbit_csv(&points, &x0));
            }
            let rows: Vec<Value> = points
                .iter()
                .map(|p| json!(p.vector().0))
                .collect();
            document(
                "orbit",
                settings,
                json!({
                    "length": points.len(),
                    "closed": points.len() <= *max_iter,
                    "points": rows,
                }),
            )
        }
        Command::Transform {
            center,
            function,
            plane_points,
            plane_basis,
            plane_offset,
        } => {
            let c = parse_center(center)?;
            let n = c.dim();
            let f = parse_function(function, n)?;
            let plane = parse_plane(plane_points, plane_basis, plane_offset)?;
            if plane.ambient_dim() != n {
                return Err(invalid("plane and center dimensions differ"));
            }
            let value = match &c {
                Center::Finite { v } => {
                    funk(v, &f, &plane, order).map_err(|e| internal(&e))?
                }
                Center::Infinite { dir } => {
                    slice_transform(dir, &f, &plane, order).map_err(|e| internal(&e))?
                }
            };
            document(
                "transform",
                settings,
                json!({ "value": value, "plane_dim": plane.dim() }),
            )
        }
        Command::Kernel {
            a,
            b,
            k,
            verify_planes,
        } => {
            let (av, bv) = (parse_finite(a)?, parse_finite(b)?);
            let n = av.dim();
            let k = k.unwrap_or(n - 1);
            if k < 1 || k >= n {
                return Err(invalid(format!("k must satisfy 1 <= k < {n}")));
            }
            let verdict = decide_pair(&av, &bv, cfg, &mut rng).map_err(|e| internal(&e))?;
            let result = match &verdict {
                InjectivityVerdict::NonInjective { period, .. } => {
                    let ca = make_center(av.clone()).map_err(|e| internal(&e))?;
                    let cb = make_center(bv.clone()).map_err(|e| internal(&e))?;
                    let (f, recipe) = build_kernel_element(&ca, &cb, *period, k, &mut rng)
                        .map_err(|e| internal(&e))?;
                    let ra = verify_annihilation(&f, &ca, *verify_planes, order, k, &mut rng)
                        .map_err(|e| internal(&e))?;
                    let rb = verify_annihilation(&f, &cb, *verify_planes, order, k, &mut rng)
                        .map_err(|e| internal(&e))?;
                    let mut v = verdict_json(&verdict);
                    merge(
                        &mut v,
                        json!({
                            "recipe": serde_json::to_value(&recipe).unwrap(),
                            "verification": {
                                "max_abs_a": ra.max_abs,
                                "max_abs_b": rb.max_abs,
                                "planes_per_center": verify_planes,
                            },
                        }),
                    );
                    v
                }
                _ => {
                    let mut v = verdict_json(&verdict);
                    merge(
                        &mut v,
                        json!({ "message": "pair admits no common-kernel witness" }),
                    );
                    v
                }
            };
            document("kernel", settings, result)
        }
        Command::Coxeter { normals } => {
            let vecs = parse_vector_list(normals)?;
            let family = ReflectionFamily::new(&vecs).map_err(|e| internal(&e))?;
            let closure = reflection_group_finite(&family, cfg.closure_cap);
            let verdict = decide_slice_family(&family, cfg);
            let closure_json = match &closure {
                GroupClosure::Finite { mirror_normals } => json!({
                    "group": "finite",
                    "mirror_count": mirror_normals.len(),
                    "mirror_normals": mirror_normals.iter().map(|v| json!(v.0)).collect::<Vec<_>>(),
                }),
                GroupClosure::Infinite { witness_count } => json!({
                    "group": "infinite",
                    "witness_count": witness_count,
                }),
            };
            let mut v = verdict_json(&verdict);
            merge(&mut v, json!({ "closure": closure_json }));
            document("coxeter", settings, v)
        }
    };
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
}

fn parse_finite(s: &str) -> Result<Vector, CliError> {
    match parse_center(s)? {
        Center::Finite { v } => Ok(v),
        Center::Infinite { .. } => Err(invalid(format!("'{s}' must be a finite center"))),
    }
}

fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        for (k, v) in e {
            t.insert(k, v);
        }
    }
}

fn orbit_csv(points: &[SpherePoint], x0: &SpherePoint) -> String {
    let n = x0.dim();
    let mut out = String::from("iteration");
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",distance_to_start\n");
    for (i, p) in points.iter().enumerate() {
        out.push_str(&i.to_string());
        for c in &p.vector().0 {
            out.push_str(&format!(",{c:.17}"));
        }
        out.push_str(&format!(",{:.17}\n", p.vector().distance(x0.vector())));
    }
    out
}
