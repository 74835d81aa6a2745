//! JSON problem specifications.
//!
//! ```json
//! {
//!   "hamiltonian": {"breakpoints": [[-1, 0], [0, 1], [1, 0]], "slope_left": -2, "slope_right": 2},
//!   "boundary": {"type": "dynamic", "breakpoints": [[0, "1/2"]], "slope_left": -1, "slope_right": 0},
//!   "solver": {"L": 4, "dx": "1/50", "T": 1, "cfl": 0.9, "u0": {"type": "linear", "slope": "-1/4"}},
//!   "probes": [0, "-1/2"],
//!   "seed": 7
//! }
//! ```
//!
//! Rationals are JSON numbers (decimal literals are read exactly) or
//! `"n/d"` strings. Other boundary forms are `{"type": "neumann", "h": r}`
//! and `{"type": "dirichlet", "g": r}`; initial data may also be
//! `{"type": "piecewise_linear", ...}` (a function of `x`) or
//! `{"type": "values", "values": [...]}`.

use serde::{Deserialize, Deserializer};

use crate::godunov::BoundarySpec;
use crate::pl::PLFunction;
use crate::scalar::{parse_rational, to_f64, Rational};
use crate::solver::{BoundaryMode, GridConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub hamiltonian: PLFunction,
    pub boundary: Option<BoundarySpec>,
    pub solver: Option<SolverSpec>,
    pub probes: Vec<Rational>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub grid: GridConfig,
    pub initial: InitialData,
    pub mode: BoundaryMode,
    /// Mesh sizes for `refine`.
    pub ladder: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Linear {
        slope: Rational,
        intercept: Rational,
    },
    Piecewise(PLFunction),
    Values(Vec<f64>),
}

impl InitialData {
    /// Value at `x`, when the data is given as a function.
    pub fn at(&self, x: f64) -> Option<f64> {
        match self {
            InitialData::Linear { slope, intercept } => Some(to_f64(slope) * x + to_f64(intercept)),
            InitialData::Piecewise(f) => Some(crate::solver::FloatPL::from(f).eval(x)),
            InitialData::Values(_) => None,
        }
    }

    pub fn sample(&self, grid: &GridConfig) -> Result<Vec<f64>, SpecError> {
        let nodes = grid
            .nodes()
            .map_err(|e| SpecError::Validation(e.to_string()))?;
        match self {
            InitialData::Values(v) if v.len() == nodes => Ok(v.clone()),
            InitialData::Values(v) => Err(SpecError::Validation(format!(
                "u0 has {} values but the grid has {nodes} nodes",
                v.len()
            ))),
            InitialData::Piecewise(f) => {
                let f = crate::solver::FloatPL::from(f);
                Ok((0..nodes).map(|j| f.eval(grid.x(j))).collect())
            }
            InitialData::Linear { .. } => Ok((0..nodes)
                .map(|j| self.at(grid.x(j)).expect("function data"))
                .collect()),
        }
    }
}

/// A rational read from a JSON number or an `"n/d"` string.
#[derive(Debug, Clone)]
struct Rat(Rational);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let text = match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s,
            other => {
                return Err(D::Error::custom(format!(
                    "expected a rational, found {other}"
                )))
            }
        };
        parse_rational(&text).map(Rat).map_err(D::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlDoc {
    breakpoints: Vec<(Rat, Rat)>,
    slope_left: Rat,
    slope_right: Rat,
}

impl PlDoc {
    fn build(self, what: &str) -> Result<PLFunction, SpecError> {
        PLFunction::new(
            self.breakpoints
                .into_iter()
                .map(|(x, y)| (x.0, y.0))
                .collect(),
            self.slope_left.0,
            self.slope_right.0,
        )
        .map_err(|e| SpecError::Validation(format!("{what}: {e}")))
    }
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum BoundaryDoc {
    Dynamic {
        breakpoints: Vec<(Rat, Rat)>,
        slope_left: Rat,
        slope_right: Rat,
    },
    Neumann {
        h: Rat,
    },
    Dirichlet {
        g: Rat,
    },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum InitialDoc {
    Linear {
        slope: Rat,
        intercept: Option<Rat>,
    },
    PiecewiseLinear {
        breakpoints: Vec<(Rat, Rat)>,
        slope_left: Rat,
        slope_right: Rat,
    },
    Values {
        values: Vec<Rat>,
    },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeDoc {
    Relaxed,
    Raw,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverDoc {
    #[serde(rename = "L")]
    length: Rat,
    dx: Rat,
    #[serde(rename = "T")]
    t_final: Rat,
    cfl: Option<Rat>,
    u0: InitialDoc,
    mode: Option<ModeDoc>,
    ladder: Option<Vec<Rat>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    hamiltonian: PlDoc,
    boundary: Option<BoundaryDoc>,
    solver: Option<SolverDoc>,
    probes: Option<Vec<Rat>>,
    seed: Option<u64>,
}

fn invalid(msg: impl Into<String>) -> SpecError {
    SpecError::Validation(msg.into())
}

/// Parses and validates a specification.
pub fn parse_spec(text: &str) -> Result<ProblemSpec, SpecError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: Doc = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SpecError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| SpecError::Parse {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let hamiltonian = doc.hamiltonian.build("hamiltonian")?;
    if !hamiltonian.is_coercive() {
        return Err(invalid(
            "hamiltonian must be coercive (slope_left < 0 < slope_right)",
        ));
    }
    let boundary = match doc.boundary {
        None => None,
        Some(BoundaryDoc::Dynamic {
            breakpoints,
            slope_left,
            slope_right,
        }) => {
            let f0 = PlDoc {
                breakpoints,
                slope_left,
                slope_right,
            }
            .build("boundary")?;
            if !f0.is_nonincreasing() {
                return Err(invalid("boundary function must be non-increasing"));
            }
            Some(BoundarySpec::Dynamic(f0))
        }
        Some(BoundaryDoc::Neumann { h }) => Some(BoundarySpec::Neumann(h.0)),
        Some(BoundaryDoc::Dirichlet { g }) => Some(BoundarySpec::Dirichlet(g.0)),
    };
    let solver = doc.solver.map(validate_solver).transpose()?;
    Ok(ProblemSpec {
        hamiltonian,
        boundary,
        solver,
        probes: doc
            .probes
            .unwrap_or_default()
            .into_iter()
            .map(|r| r.0)
            .collect(),
        seed: doc.seed,
    })
}

fn validate_solver(doc: SolverDoc) -> Result<SolverSpec, SpecError> {
    let grid = GridConfig {
        length: to_f64(&doc.length.0),
        dx: to_f64(&doc.dx.0),
        cfl: doc.cfl.map_or(0.9, |c| to_f64(&c.0)),
        t_final: to_f64(&doc.t_final.0),
        lipschitz: None,
    };
    if !(grid.cfl > 0.0 && grid.cfl <= 1.0) {
        return Err(invalid(format!(
            "solver.cfl = {} must lie in (0, 1]",
            grid.cfl
        )));
    }
    grid.cells().map_err(|e| invalid(format!("solver: {e}")))?;
    let initial = match doc.u0 {
        InitialDoc::Linear { slope, intercept } => InitialData::Linear {
            slope: slope.0,
            intercept: intercept.map_or_else(|| Rational::from_integer(0.into()), |r| r.0),
        },
        InitialDoc::PiecewiseLinear {
            breakpoints,
            slope_left,
            slope_right,
        } => InitialData::Piecewise(
            PlDoc {
                breakpoints,
                slope_left,
                slope_right,
            }
            .build("solver.u0")?,
        ),
        InitialDoc::Values { values } => {
            InitialData::Values(values.iter().map(|r| to_f64(&r.0)).collect())
        }
    };
    let ladder: Vec<f64> = doc
        .ladder
        .unwrap_or_default()
        .iter()
        .map(|r| to_f64(&r.0))
        .collect();
    if ladder.iter().any(|dx| dx.is_nan() || *dx <= 0.0) {
        return Err(invalid("solver.ladder entries must be positive"));
    }
    let mode = match doc.mode {
        Some(ModeDoc::Raw) => BoundaryMode::Raw,
        _ => BoundaryMode::Relaxed,
    };
    Ok(SolverSpec {
        grid,
        initial,
        mode,
        ladder,
    })
}
