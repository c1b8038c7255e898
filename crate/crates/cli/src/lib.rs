//! `tetra`: command-line front end for `tetra-core`.
//!
//! Every command prints one JSON report:
//!
//! ```text
//! { "schema": "tetra/1", "config": <RunConfig>, "exit_code": n, "result": {...},
//!   "timestamp_unix": t }
//! ```
//!
//! `timestamp_unix` is omitted under `--no-timestamp`; everything else is a function of
//! the arguments (and `--seed` / `TETRA_SEED`) alone.
//!
//! Exit codes: 0 success or certified, 1 not certified or failed check, 2 usage or input
//! error, 3 internal inconsistency.

mod parse;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use tetra_core::calculus::{eval_point, eval_triple, knese_check, sup_norm_be, tridisk_bound};
use tetra_core::counterexample::{certify_report, closed_form_gap};
use tetra_core::dilation::{
    build_extended, build_theorem_b, residual_report, v2star_v3_corner, ExtendedForm,
};
use tetra_core::domain::{
    inscribed_polydisk_radius, member, on_distinguished_boundary, polydisk_worst_point,
    sample_distinguished_boundary, TORUS_GRID,
};
use tetra_core::matrix::operator_norm;
use tetra_core::structure::{
    certify_nilpotent_family, certify_sampling, commutator, fundamental_operators,
    nilpotent_commutator_norm, SamplingParams,
};
use tetra_core::{
    CommutingTriple, ComplexMatrix, LambdaSource, Pipeline, PipelineConfig, TetraError, TetraPoint,
    TruncatedDilation, C64,
};

pub const SCHEMA: &str = "tetra/1";

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;
pub const DEFAULT_SLACK: f64 = 5e-2;
pub const DEFAULT_RADIUS_TOL: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "tetra",
    version,
    about = "Numerical toolkit for the tetrablock"
)]
struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, env = "TETRA_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

/// Effective configuration of one run; embedded in its report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    /// Parses `argv` (program name first) without running anything.
    pub fn from_args<I, T>(argv: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(argv)?;
        Ok(Self {
            tolerances: cli.command.tolerances(),
            command: cli.command,
            seed: cli.seed,
            output_path: cli.out,
        })
    }
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Tetrablock membership of a point.
    Member(MemberArgs),
    /// Seeded sample of the distinguished boundary.
    BoundarySample(BoundarySampleArgs),
    /// Radius of the largest polydisk centred at 0 inside the tetrablock.
    Radius(RadiusArgs),
    /// Evaluate a polynomial at a point or on a commuting triple.
    Eval(EvalArgs),
    /// Sampled sup norm of a polynomial over the distinguished boundary.
    Supnorm(SupnormArgs),
    /// Check the Knese gradient inequality for a polynomial on the tridisk.
    Knese(KneseArgs),
    /// Certify a triple as a tetrablock contraction.
    Certify(CertifyArgs),
    /// Fundamental operators of a triple.
    Fundamental(TripleArgs),
    /// Commutator of the fundamental operators.
    Commutator(TripleArgs),
    /// Build a truncated block Toeplitz dilation.
    Dilate(DilateArgs),
    /// Build a truncated dilation and report its residuals.
    VerifyDilation(VerifyArgs),
    /// Counterexample pipeline for the nilpotent family.
    Counterexample(CounterexampleArgs),
    /// Many seeded counterexample records.
    Batch(BatchArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Member(_) => "member",
            Command::BoundarySample(_) => "boundary-sample",
            Command::Radius(_) => "radius",
            Command::Eval(_) => "eval",
            Command::Supnorm(_) => "supnorm",
            Command::Knese(_) => "knese",
            Command::Certify(_) => "certify",
            Command::Fundamental(_) => "fundamental",
            Command::Commutator(_) => "commutator",
            Command::Dilate(_) => "dilate",
            Command::VerifyDilation(_) => "verify-dilation",
            Command::Counterexample(_) => "counterexample",
            Command::Batch(_) => "batch",
        }
    }

    fn tolerances(&self) -> BTreeMap<String, f64> {
        let list: Vec<(&str, f64)> = match self {
            Command::Member(a) => vec![("membership", a.tol)],
            Command::BoundarySample(_) => vec![("membership", DEFAULT_MEMBERSHIP_TOL)],
            Command::Radius(a) => vec![("radius", a.tol)],
            Command::Certify(a) => vec![("radius", a.radius_tol), ("slack", a.slack)],
            Command::VerifyDilation(a) => vec![("residual", a.residual_tol)],
            Command::Counterexample(a) => {
                vec![
                    ("margin", a.pipeline.margin),
                    ("radius", a.pipeline.radius_tol),
                ]
            }
            Command::Batch(a) => {
                vec![
                    ("margin", a.pipeline.margin),
                    ("radius", a.pipeline.radius_tol),
                ]
            }
            _ => Vec::new(),
        };
        list.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointArgs {
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub x1: C64,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub x2: C64,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
    pub x3: C64,
}

impl PointArgs {
    fn point(&self) -> TetraPoint {
        TetraPoint::new(self.x1, self.x2, self.x3)
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Width of the boundary band.
    #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_TOL)]
    pub tol: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySampleArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusArgs {
    /// Bisection tolerance, in (0, 1e-2).
    #[arg(long, default_value_t = DEFAULT_RADIUS_TOL)]
    pub tol: f64,
}

/// A commuting triple: the nilpotent family `T_j = [[0, l_j], [0, 0]]` or explicit
/// matrices.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleArgs {
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true,
          requires_all = ["l2", "l3"], conflicts_with = "triple")]
    pub l1: Option<C64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true, requires = "l1")]
    pub l2: Option<C64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true, requires = "l1")]
    pub l3: Option<C64>,
    /// JSON object {"t1": M, "t2": M, "t3": M} (matrices as rows of [re, im]), or a path
    /// to a file holding one.
    #[arg(long)]
    pub triple: Option<String>,
}

struct TripleInput {
    triple: CommutingTriple,
    lambda: Option<[C64; 3]>,
}

impl TripleArgs {
    fn lambda(&self) -> Option<[C64; 3]> {
        Some([self.l1?, self.l2?, self.l3?])
    }

    fn resolve(&self) -> Result<TripleInput, Failure> {
        if let Some(lambda) = self.lambda() {
            return Ok(TripleInput {
                triple: CommutingTriple::nilpotent_family(lambda),
                lambda: Some(lambda),
            });
        }
        let Some(text) = &self.triple else {
            return Err(Failure::Usage(
                "give either --l1 --l2 --l3 or --triple".into(),
            ));
        };
        let [t1, t2, t3] = parse::triple(text).map_err(Failure::Usage)?;
        Ok(TripleInput {
            triple: CommutingTriple::new(t1, t2, t3)?,
            lambda: None,
        })
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalArgs {
    /// Polynomial as "coef:i,j,k;..." (coef is "re+imi").
    #[arg(long)]
    pub poly: String,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true,
          requires_all = ["x2", "x3"])]
    pub x1: Option<C64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true, requires = "x1")]
    pub x2: Option<C64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true, requires = "x1")]
    pub x3: Option<C64>,
    #[command(flatten)]
    pub input: TripleArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupnormArgs {
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value_t = 2000)]
    pub nsamples: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KneseArgs {
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value_t = 10_000)]
    pub nsamples: usize,
    /// Certified bound on sup |g| over the tridisk; computed on a torus grid if absent.
    #[arg(long)]
    pub bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Deterministic certificate for the nilpotent family.
    Schwarz,
    /// Statistical von Neumann check with random polynomials.
    Sampling,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub input: TripleArgs,
    #[arg(long, value_enum, default_value_t = Method::Schwarz)]
    pub method: Method,
    /// Inscribed radius to use; computed if absent.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_RADIUS_TOL)]
    pub radius_tol: f64,
    #[arg(long, default_value_t = 200)]
    pub npolys: usize,
    #[arg(long, default_value_t = 4)]
    pub degree: u32,
    #[arg(long, default_value_t = 2000)]
    pub nsamples: usize,
    #[arg(long, default_value_t = DEFAULT_SLACK)]
    pub slack: f64,
    /// Extra polynomial checked by the sampling method; repeatable.
    #[arg(long)]
    pub probe: Vec<String>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilateArgs {
    #[command(flatten)]
    pub input: TripleArgs,
    /// Number of defect blocks kept.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Block of the column C3 holding D (1-based); only for power 1.
    #[arg(long, default_value_t = 1)]
    pub slot: usize,
    /// n in phi3 = z^n.
    #[arg(long, default_value_t = 1)]
    pub power: usize,
    /// Middle coefficient Xi as a matrix on H (rows of [re, im]) or a file path; zero if
    /// absent. Only for power >= 2.
    #[arg(long)]
    pub xi: Option<String>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub dilation: DilateArgs,
    #[arg(long, default_value_t = 3)]
    pub maxdeg: u32,
    /// Leading blocks on which adjoint identities are checked.
    #[arg(long, default_value_t = 5)]
    pub interior: usize,
    #[arg(long, default_value_t = DEFAULT_RESIDUAL_TOL)]
    pub residual_tol: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub margin: f64,
    #[arg(long, default_value_t = DEFAULT_RADIUS_TOL)]
    pub radius_tol: f64,
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, default_value_t = 5)]
    pub interior: usize,
}

impl PipelineArgs {
    fn pipeline(&self) -> Result<Pipeline, Failure> {
        Ok(Pipeline::new(PipelineConfig {
            margin: self.margin,
            radius_tol: self.radius_tol,
            dilation_depth: self.depth,
            interior_depth: self.interior,
        })?)
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleArgs {
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true,
          requires_all = ["l2", "l3"])]
    pub l1: Option<C64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true, requires = "l1")]
    pub l2: Option<C64>,
    #[arg(long, value_parser = parse::complex, allow_hyphen_values = true, requires = "l1")]
    pub l3: Option<C64>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchArgs {
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

enum Failure {
    Usage(String),
    Core(TetraError),
}

impl From<TetraError> for Failure {
    fn from(e: TetraError) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(e) => match e {
                TetraError::InternalInconsistency(_)
                | TetraError::InvariantViolation(_)
                | TetraError::NumericalDegeneracy(_) => EXIT_INCONSISTENT,
                _ => EXIT_USAGE,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

struct Outcome {
    result: Value,
    code: i32,
}

fn ok(result: Value) -> Result<Outcome, Failure> {
    Ok(Outcome {
        result,
        code: EXIT_OK,
    })
}

fn pass_fail(result: Value, passed: bool) -> Result<Outcome, Failure> {
    let code = if passed { EXIT_OK } else { EXIT_FAIL };
    Ok(Outcome { result, code })
}

fn poly(s: &str) -> Result<tetra_core::Poly3, Failure> {
    parse::polynomial(s).map_err(Failure::Usage)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn check_radius_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol < 1e-2 {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "radius tolerance must lie in (0, 1e-2), got {tol}"
        )))
    }
}

fn execute(cmd: &Command, seed: u64) -> Result<Outcome, Failure> {
    match cmd {
        Command::Member(a) => {
            let p = a.point.point();
            let v = member(&p, a.tol)?;
            let on_boundary = on_distinguished_boundary(&p, a.tol)?;
            ok(json!({
                "point": p,
                "status": v.status,
                "margin": v.margin,
                "scalar_slack": v.scalar_slack,
                "witness": v.witness,
                "on_distinguished_boundary": on_boundary,
            }))
        }
        Command::BoundarySample(a) => {
            let pts = sample_distinguished_boundary(a.n, seed);
            let mut all = true;
            for p in &pts {
                all &= on_distinguished_boundary(p, DEFAULT_MEMBERSHIP_TOL)?;
            }
            if !all {
                return Err(TetraError::InternalInconsistency(
                    "sampled point failed the distinguished-boundary test".into(),
                )
                .into());
            }
            ok(json!({ "points": pts, "all_on_distinguished_boundary": all }))
        }
        Command::Radius(a) => {
            check_radius_tol(a.tol)?;
            let r = inscribed_polydisk_radius(a.tol);
            let above = polydisk_worst_point(r + a.tol, TORUS_GRID);
            ok(json!({
                "radius": r,
                "tol": a.tol,
                "excess_at_radius": polydisk_worst_point(r, TORUS_GRID).excess,
                "worst_point_above": above,
            }))
        }
        Command::Eval(a) => {
            let f = poly(&a.poly)?;
            if let (Some(x1), Some(x2), Some(x3)) = (a.x1, a.x2, a.x3) {
                let p = TetraPoint::new(x1, x2, x3);
                return ok(json!({ "point": p, "value": eval_point(&f, &p) }));
            }
            let input = a.input.resolve()?;
            let m = eval_triple(&f, &input.triple);
            let norm = operator_norm(&m)?;
            ok(json!({ "matrix": m, "norm": norm }))
        }
        Command::Supnorm(a) => {
            if a.nsamples == 0 {
                return Err(Failure::Usage("--nsamples must be positive".into()));
            }
            let f = poly(&a.poly)?;
            ok(json!({ "sup_norm": sup_norm_be(&f, a.nsamples, seed), "nsamples": a.nsamples }))
        }
        Command::Knese(a) => {
            let g = poly(&a.poly)?;
            let (bound, source) = match a.bound {
                Some(b) => (b, "given"),
                None => (tridisk_bound(&g), "torus-grid"),
            };
            let report = knese_check(&g, bound, a.nsamples, seed);
            let violated = report.violated;
            pass_fail(
                json!({ "report": report, "bound_source": source }),
                !violated,
            )
        }
        Command::Certify(a) => certify(a, seed),
        Command::Fundamental(a) => {
            let input = a.resolve()?;
            let p = fundamental_operators(&input.triple)?;
            let mut out = json!({
                "f1": p.f1,
                "f2": p.f2,
                "defect": p.defect,
                "defect_dim": p.defect_dim(),
                "solve_residual": p.solve_residual,
            });
            if let Some(lambda) = input.lambda {
                out["closed_form_max_entry_gap"] = json!(closed_form_gap(lambda)?);
            }
            ok(out)
        }
        Command::Commutator(a) => {
            let input = a.resolve()?;
            let c = commutator(&fundamental_operators(&input.triple)?);
            let mut out = json!({ "matrix": c.matrix, "norm": c.norm });
            if let Some(lambda) = input.lambda {
                out["closed_form_norm"] = json!(nilpotent_commutator_norm(lambda));
            }
            ok(out)
        }
        Command::Dilate(a) => {
            let (_, d) = dilation(a)?;
            ok(to_json(&d))
        }
        Command::VerifyDilation(a) => verify(a),
        Command::Counterexample(a) => {
            let pipeline = a.pipeline.pipeline()?;
            let (source, name) = match (a.l1, a.l2, a.l3) {
                (Some(l1), Some(l2), Some(l3)) => {
                    (LambdaSource::Explicit([l1, l2, l3]), "explicit")
                }
                _ => (LambdaSource::Seeded(seed), "seeded"),
            };
            let rec = pipeline.generate(source)?;
            let report = certify_report(&rec)?;
            let mut out = to_json(&report);
            out["lambda_source"] = json!(name);
            out["margin"] = json!(a.pipeline.margin);
            ok(out)
        }
        Command::Batch(a) => {
            let pipeline = a.pipeline.pipeline()?;
            let mut items = Vec::with_capacity(a.count);
            for (i, rec) in pipeline
                .generate_batch(seed, a.count)
                .into_iter()
                .enumerate()
            {
                let report = certify_report(&rec?)?;
                items.push(json!({
                    "index": i,
                    "lambda": report.lambda,
                    "commutator_norm": report.commutator_norm,
                    "closed_form_commutator_norm": report.closed_form_commutator_norm,
                    "theorem_b_commutation_interior": report.theorem_b_commutation_interior,
                    "hypotheses": report.hypotheses,
                    "verdict": report.certificate.verdict,
                }));
            }
            let all_positive = items
                .iter()
                .all(|r| r["commutator_norm"].as_f64().is_some_and(|v| v > 0.0));
            ok(json!({
                "r_used": pipeline.radius(),
                "count": items.len(),
                "all_commutators_positive": all_positive,
                "records": items,
            }))
        }
    }
}

fn certify(a: &CertifyArgs, seed: u64) -> Result<Outcome, Failure> {
    let input = a.input.resolve()?;
    match a.method {
        Method::Schwarz => {
            let Some(lambda) = input.lambda else {
                return Err(Failure::Usage(
                    "schwarz certification applies to the nilpotent family; use --l1 --l2 --l3"
                        .into(),
                ));
            };
            let r = match a.r {
                Some(r) => r,
                None => {
                    check_radius_tol(a.radius_tol)?;
                    inscribed_polydisk_radius(a.radius_tol)
                }
            };
            let report = certify_nilpotent_family(lambda, r);
            let positive = report.is_positive();
            pass_fail(json!({ "report": report }), positive)
        }
        Method::Sampling => {
            if a.npolys == 0 && a.probe.is_empty() || a.nsamples == 0 {
                return Err(Failure::Usage(
                    "need polynomials and boundary samples".into(),
                ));
            }
            let probes = a
                .probe
                .iter()
                .map(|s| poly(s))
                .collect::<Result<Vec<_>, _>>()?;
            let params = SamplingParams {
                npolys: a.npolys,
                degree: a.degree,
                nsamples: a.nsamples,
                slack: a.slack,
                probes,
            };
            let outcome = certify_sampling(&input.triple, &params, seed)?;
            let positive = outcome.report.is_positive();
            pass_fail(to_json(&outcome), positive)
        }
    }
}

fn dilation(a: &DilateArgs) -> Result<(CommutingTriple, TruncatedDilation), Failure> {
    let input = a.input.resolve()?;
    let t = input.triple;
    let p = fundamental_operators(&t)?;
    let d = match a.power {
        0 => return Err(Failure::Usage("--power must be at least 1".into())),
        1 => {
            if a.xi.is_some() {
                return Err(Failure::Usage("--xi needs --power 2 or more".into()));
            }
            build_theorem_b(&t, &p, a.depth, a.slot)?
        }
        n => {
            if a.slot != 1 {
                return Err(Failure::Usage("--slot applies only to --power 1".into()));
            }
            let xi = match &a.xi {
                Some(s) => parse::matrix(s).map_err(Failure::Usage)?,
                None => ComplexMatrix::zeros(t.dim(), t.dim()),
            };
            let form = if n == 2 {
                ExtendedForm::Square
            } else {
                ExtendedForm::General { n }
            };
            build_extended(&t, &p, &xi, a.depth, form)?
        }
    };
    Ok((t, d))
}

fn verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let (t, d) = dilation(&a.dilation)?;
    let r = residual_report(&d, &t, a.maxdeg, a.interior)?;
    let tol = a.residual_tol;
    let checks: BTreeMap<&str, bool> = [
        ("coinvariance", r.coinvariance <= tol),
        ("compression", r.compression_maxdeg <= tol),
        ("isometry_interior", r.isometry_interior <= tol),
        ("commutation_interior", r.commutation_interior <= tol),
        (
            "v1_eq_v2star_v3_interior",
            r.v1_eq_v2star_v3_interior <= tol,
        ),
        ("v2_contractive", r.v2_norm <= 1.0 + tol),
    ]
    .into_iter()
    .collect();
    let passed = checks.values().all(|&b| b);
    let corner = operator_norm(&(&v2star_v3_corner(&d) - t.t1()))?;
    pass_fail(
        json!({
            "residuals": r,
            "checks": checks,
            "passed": passed,
            "depth": d.depth,
            "slot": d.slot,
            "power": d.power,
            "defect_dim": d.defect_dim,
            "v2star_v3_corner_minus_t1": corner,
            "unchecked_conditions": d.unchecked_conditions,
        }),
        passed,
    )
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    exit_code: i32,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_unix: Option<u64>,
}

/// Runs `tetra` with `argv` (program name first), writing the report to `out` (unless
/// `--out` is given) and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let config = RunConfig {
        tolerances: cli.command.tolerances(),
        command: cli.command,
        seed: cli.seed,
        output_path: cli.out,
    };
    let outcome = match execute(&config.command, config.seed) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(
                err,
                "tetra {}: error: {}",
                config.command.name(),
                f.message()
            );
            return f.exit_code();
        }
    };
    let timestamp_unix = (!cli.no_timestamp).then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    let report = Report {
        schema: SCHEMA,
        config: &config,
        exit_code: outcome.code,
        result: outcome.result,
        timestamp_unix,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    let written = match &config.output_path {
        Some(path) => std::fs::write(path, &text),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "tetra: cannot write report: {e}");
        return EXIT_USAGE;
    }
    outcome.code
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &str) -> RunConfig {
        RunConfig::from_args(std::iter::once("tetra").chain(args.split_whitespace())).unwrap()
    }

    #[test]
    fn defaults_are_filled_in() {
        let c = config("member --x1 0 --x2 0 --x3 0");
        assert_eq!(c.seed, 0);
        assert_eq!(c.tolerances["membership"], DEFAULT_MEMBERSHIP_TOL);
        let c = config("certify --l1 0.2 --l2 0.1 --l3 0.15 --method sampling");
        assert_eq!(c.tolerances["slack"], DEFAULT_SLACK);
        let c = config("verify-dilation --l1 0.1 --l2 0.1 --l3 0.15");
        assert_eq!(c.tolerances["residual"], DEFAULT_RESIDUAL_TOL);
    }

    #[test]
    fn config_round_trips() {
        for args in [
            "member --x1 0.1+0.2i --x2 -0.3 --x3 0.05-0.01i --tol 1e-7",
            "--seed 99 boundary-sample --n 3",
            "radius --tol 1e-4",
            "eval --poly 1:1,0,0;0.5i:0,1,1 --l1 0.2 --l2 0.1 --l3 0.15",
            "knese --poly 0.5:0,0,0 --nsamples 10 --bound 0.5",
            "certify --l1 0.2 --l2 0.1 --l3 0.15 --method sampling --npolys 3 --probe 1:1,0,0",
            "verify-dilation --l1 0.1 --l2 0.1 --l3 0.15 --depth 6 --power 2 --interior 3",
            "counterexample --l1 0.2 --l2 0.1 --l3 0.15 --margin 0.01 --out /tmp/x.json",
            "batch --count 4",
        ] {
            let c = config(args);
            let text = serde_json::to_string(&c).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, c, "{args}");
        }
    }

    #[test]
    fn usage_errors_exit_2() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(["tetra", "member", "--bogus"], &mut out, &mut err);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert!(String::from_utf8(err).unwrap().contains("Usage"));
        let code = run_with(["tetra", "fundamental"], &mut Vec::new(), &mut Vec::new());
        assert_eq!(code, EXIT_USAGE);
    }
}
