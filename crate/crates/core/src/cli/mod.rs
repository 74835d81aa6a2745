//! Command orchestration behind the `hjrelax` binary.

pub mod corpus;
pub mod output;
pub mod spec;

use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::godunov::{
    bln_check, dirichlet_relaxed, germ, godunov_flux, godunov_operator, godunov_witnesses,
    neumann_relaxed, BoundarySpec,
};
use crate::guerand::{characteristic_points, guerand_operator, limiter_points};
use crate::pl::PLFunction;
use crate::relaxation::{relax, EnvelopePolicy};
use crate::scalar::format_rational;
use crate::solver::{refinement_study, solve};

pub use spec::{parse_spec, ProblemSpec, SpecError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Relax,
    Guerand,
    GodunovApply,
    Charpoints,
    Limiters,
    Germ,
    Neumann,
    Dirichlet,
    Bln,
    Solve,
    Refine,
    VerifyCorpus,
    Plot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub out: PathBuf,
    pub cases: u64,
    pub seed: Option<u64>,
    pub policy: EnvelopePolicy,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            out: PathBuf::from("out"),
            cases: 200,
            seed: None,
            policy: EnvelopePolicy::Upgrade,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Validation(String),
    #[error("identity check failed: {0}")]
    Identity(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) | CliError::Validation(_) => 1,
            CliError::Identity(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InternalMismatch(_) | Error::RootNotFound(_) => {
                CliError::Identity(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// What a command produced: files written and a one-paragraph summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Sink<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Sink<'_> {
    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        output::write_atomic(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }
}

fn need<'a>(spec: &'a ProblemSpec, cmd: &str) -> Result<&'a BoundarySpec, CliError> {
    spec.boundary
        .as_ref()
        .ok_or_else(|| CliError::Validation(format!("`{cmd}` needs a \"boundary\" block")))
}

/// The boundary function a boundary condition stands for before relaxation:
/// `F0`, `G(h, .)` or the constant `g`.
fn boundary_function(h: &PLFunction, bc: &BoundarySpec) -> Result<PLFunction, CliError> {
    Ok(match bc {
        BoundarySpec::Dynamic(f0) => f0.clone(),
        BoundarySpec::Neumann(slope) => neumann_relaxed(h, slope)?,
        BoundarySpec::Dirichlet(g) => PLFunction::constant(g.clone()),
    })
}

fn dynamic_only<'a>(spec: &'a ProblemSpec, cmd: &str) -> Result<&'a PLFunction, CliError> {
    match need(spec, cmd)? {
        BoundarySpec::Dynamic(f0) => Ok(f0),
        _ => Err(CliError::Validation(format!(
            "`{cmd}` needs a dynamic boundary"
        ))),
    }
}

/// Runs `cmd`. `spec` may be `None` only for `verify-corpus`.
pub fn run_command(
    spec: Option<&ProblemSpec>,
    cmd: Command,
    opts: &Options,
) -> Result<Outcome, CliError> {
    let mut sink = Sink {
        dir: &opts.out,
        files: Vec::new(),
    };
    if cmd == Command::VerifyCorpus {
        let seed = opts.seed.or(spec.and_then(|s| s.seed)).unwrap_or(0);
        let report = corpus::verify_corpus(seed, opts.cases);
        let json = serde_json::to_vec_pretty(&report).expect("report serializes");
        sink.put("report.json", &json)?;
        let summary = format!(
            "{} cases (seed {seed}), {} with tangential contact, {:.1} s: {}",
            report.cases,
            report.tangential_cases,
            report.wall_time_s,
            if report.passed() {
                "all identities hold"
            } else {
                "FAILURE, replay bundle in report.json"
            }
        );
        return if report.passed() {
            Ok(Outcome {
                files: sink.files,
                summary,
            })
        } else {
            Err(CliError::Identity(summary))
        };
    }
    let spec = spec.ok_or_else(|| CliError::Validation("a --spec file is required".into()))?;
    let h = &spec.hamiltonian;
    let policy = opts.policy;
    let summary =
        match cmd {
            Command::Relax => {
                let f0 = boundary_function(h, need(spec, "relax")?)?;
                let r = relax(h, &f0)?;
                sink.put("function.csv", &output::function_csv(&r)?)?;
                format!("relaxed boundary function: {r}")
            }
            Command::Guerand => {
                let f0 = boundary_function(h, need(spec, "guerand")?)?;
                let g = guerand_operator(h, &f0, policy)?;
                sink.put("function.csv", &output::function_csv(&g)?)?;
                format!("plateau operator: {g}")
            }
            Command::GodunovApply => {
                let f0 = boundary_function(h, need(spec, "godunov-apply")?)?;
                let g = godunov_operator(h, &f0, policy)?;
                sink.put("function.csv", &output::function_csv(&g)?)?;
                let mut rows = Vec::new();
                for p in &spec.probes {
                    let w = godunov_witnesses(h, &f0, p, policy)?;
                    rows.push(vec![
                        format_rational(p),
                        format_rational(&g.eval(p)),
                        w.lo().to_string(),
                        w.hi().to_string(),
                    ]);
                }
                if !rows.is_empty() {
                    sink.put(
                        "godunov.csv",
                        &output::table_csv(&["p", "value", "witness_lo", "witness_hi"], rows)?,
                    )?;
                }
                format!("Godunov operator: {g}")
            }
            Command::Charpoints => {
                let f0 = boundary_function(h, need(spec, "charpoints")?)?;
                let r = relax(h, &f0)?;
                let pts = characteristic_points(h, &r)?;
                let rows = pts
                    .iter()
                    .map(|c| vec![format_rational(&c.location), c.sign.to_string()])
                    .collect();
                sink.put("charpoints.csv", &output::table_csv(&["p", "sign"], rows)?)?;
                format!("{} characteristic points of {r}", pts.len())
            }
            Command::Limiters => {
                let f0 = boundary_function(h, need(spec, "limiters")?)?;
                let lims = limiter_points(h, &f0, policy)?;
                let rows = lims
                    .iter()
                    .map(|l| {
                        vec![
                            format_rational(&l.p),
                            l.sign.to_string(),
                            l.interval.lo().to_string(),
                            l.interval.hi().to_string(),
                        ]
                    })
                    .collect();
                sink.put(
                    "limiters.csv",
                    &output::table_csv(&["p", "sign", "p_minus", "p_plus"], rows)?,
                )?;
                format!("{} limiter points", lims.len())
            }
            Command::Germ => {
                let f0 = boundary_function(h, need(spec, "germ")?)?;
                let g = germ(h, &f0)?;
                let rows = g
                    .components
                    .iter()
                    .map(|c| vec![c.lo().to_string(), c.hi().to_string()])
                    .collect();
                sink.put("germ.csv", &output::table_csv(&["lo", "hi"], rows)?)?;
                format!("germ: {g}")
            }
            Command::Neumann => {
                let BoundarySpec::Neumann(slope) = need(spec, "neumann")? else {
                    return Err(CliError::Validation(
                        "`neumann` needs a neumann boundary".into(),
                    ));
                };
                let n = neumann_relaxed(h, slope)?;
                sink.put("function.csv", &output::function_csv(&n)?)?;
                format!("relaxed Neumann condition: {n}")
            }
            Command::Dirichlet => {
                let BoundarySpec::Dirichlet(g) = need(spec, "dirichlet")? else {
                    return Err(CliError::Validation(
                        "`dirichlet` needs a dirichlet boundary".into(),
                    ));
                };
                let d = dirichlet_relaxed(h, g)?;
                sink.put("function.csv", &output::function_csv(&d)?)?;
                format!("relaxed Dirichlet condition: {d}")
            }
            Command::Bln => {
                let BoundarySpec::Neumann(slope) = need(spec, "bln")? else {
                    return Err(CliError::Validation(
                        "`bln` needs a neumann boundary".into(),
                    ));
                };
                let g = germ(h, &neumann_relaxed(h, slope)?)?;
                let mut probes = spec.probes.clone();
                if probes.is_empty() {
                    probes = crate::pl::sorted_unique(
                        h.abscissas()
                            .cloned()
                            .chain(g.endpoints())
                            .chain([slope.clone()]),
                    );
                }
                let mut rows = Vec::new();
                let mut disagreements = 0;
                for p in &probes {
                    let b = bln_check(h, slope, p)?;
                    let flux = h.eval(p) == godunov_flux(h, slope, p)?;
                    let member = g.contains(p);
                    if b != flux || b != member {
                        disagreements += 1;
                    }
                    rows.push(vec![
                        format_rational(p),
                        b.to_string(),
                        flux.to_string(),
                        member.to_string(),
                    ]);
                }
                sink.put(
                    "bln.csv",
                    &output::table_csv(&["p", "bln", "godunov_equal", "germ_member"], rows)?,
                )?;
                if disagreements > 0 {
                    return Err(CliError::Identity(format!(
                        "{disagreements} BLN disagreements, see bln.csv"
                    )));
                }
                format!("{} probes, all three routes agree", probes.len())
            }
            Command::Solve => {
                let bc = need(spec, "solve")?;
                let s = spec.solver.as_ref().ok_or_else(|| {
                    CliError::Validation("`solve` needs a \"solver\" block".into())
                })?;
                let u0 = s.initial.sample(&s.grid)?;
                let sol = solve(h, bc, s.mode, &u0, &s.grid)?;
                sink.put("solution.csv", &output::solution_csv(&sol)?)?;
                format!(
                    "{} steps of dt = {}, L_lip = {}, comparison region has {} nodes",
                    sol.frames.len() - 1,
                    sol.dt,
                    sol.lipschitz,
                    sol.comparison_nodes()
                )
            }
            Command::Refine => {
                let f0 = dynamic_only(spec, "refine")?;
                let s = spec.solver.as_ref().ok_or_else(|| {
                    CliError::Validation("`refine` needs a \"solver\" block".into())
                })?;
                if s.ladder.is_empty() {
                    return Err(CliError::Validation("`refine` needs solver.ladder".into()));
                }
                if s.initial.at(0.0).is_none() {
                    return Err(CliError::Validation(
                        "`refine` needs u0 given as a function".into(),
                    ));
                }
                let strong = BoundarySpec::Dynamic(relax(h, f0)?);
                let weak = BoundarySpec::Dynamic(f0.clone());
                let levels = refinement_study(
                    h,
                    &weak,
                    &strong,
                    |x| s.initial.at(x).expect("function data"),
                    &s.grid,
                    &s.ladder,
                )?;
                sink.put("refine.csv", &output::refine_csv(&levels)?)?;
                let diffs: Vec<String> = levels
                    .iter()
                    .map(|l| format!("{:.3e}", l.sup_diff))
                    .collect();
                format!("sup differences: {}", diffs.join(", "))
            }
            Command::Plot => {
                let bc = need(spec, "plot")?;
                let f0 = boundary_function(h, bc)?;
                let r = bc.relaxed(h)?;
                let svg = output::plot_svg(&[
                    output::Curve {
                        label: "H",
                        f: h,
                        color: "#000000",
                        width: 1.5,
                        dash: None,
                    },
                    output::Curve {
                        label: "F0",
                        f: &f0,
                        color: "#555555",
                        width: 1.5,
                        dash: Some("6 4"),
                    },
                    output::Curve {
                        label: "relaxed",
                        f: &r,
                        color: "#d62728",
                        width: 3.0,
                        dash: None,
                    },
                ]);
                sink.put("plot.svg", svg.as_bytes())?;
                format!("plotted H, F0 and {r}")
            }
            Command::VerifyCorpus => unreachable!("handled above"),
        };
    Ok(Outcome {
        files: sink.files,
        summary,
    })
}
