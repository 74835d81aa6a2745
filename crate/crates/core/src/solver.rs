//! Explicit monotone finite differences for `u_t + H(u_x) = 0` on `[0, L]`.
//!
//! Interior nodes use the Godunov numerical Hamiltonian `G(D-u, D+u)`. The
//! left node carries the boundary condition; the right node sees a linearly
//! extrapolated ghost value, so reported norms are restricted to nodes the
//! right end cannot influence by time `T`.
//!
//! The operator layer is exact; here everything is `f64`.

use crate::error::{Error, Result};
use crate::godunov::BoundarySpec;
use crate::pl::PLFunction;
use crate::relaxation::{check_boundary, check_hamiltonian, lower_envelope, relax};
use crate::scalar::{to_f64, Rational};

/// A PL function sampled into `f64` for fast evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPL {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slope_left: f64,
    slope_right: f64,
}

impl From<&PLFunction> for FloatPL {
    fn from(f: &PLFunction) -> Self {
        FloatPL {
            xs: f.breakpoints().iter().map(|(x, _)| to_f64(x)).collect(),
            ys: f.breakpoints().iter().map(|(_, y)| to_f64(y)).collect(),
            slope_left: to_f64(f.slope_left()),
            slope_right: to_f64(f.slope_right()),
        }
    }
}

impl FloatPL {
    pub fn eval(&self, p: f64) -> f64 {
        let n = self.xs.len();
        if p <= self.xs[0] {
            return self.ys[0] + self.slope_left * (p - self.xs[0]);
        }
        if p >= self.xs[n - 1] {
            return self.ys[n - 1] + self.slope_right * (p - self.xs[n - 1]);
        }
        let i = self.xs.partition_point(|x| *x <= p) - 1;
        let t = (p - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }

    fn interior<'a>(&'a self, a: f64, b: f64) -> impl Iterator<Item = f64> + 'a {
        self.xs
            .iter()
            .zip(&self.ys)
            .filter(move |(x, _)| **x > a && **x < b)
            .map(|(_, y)| *y)
    }

    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        self.interior(a, b)
            .fold(self.eval(a).max(self.eval(b)), f64::max)
    }

    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        self.interior(a, b)
            .fold(self.eval(a).min(self.eval(b)), f64::min)
    }

    /// `G(q, p)`.
    pub fn godunov(&self, q: f64, p: f64) -> f64 {
        if p <= q {
            self.max_on(p, q)
        } else {
            self.min_on(q, p)
        }
    }

    /// Largest `|slope|` among pieces meeting `[a, b]`.
    pub fn max_abs_slope_on(&self, a: f64, b: f64) -> f64 {
        let n = self.xs.len();
        let mut best: f64 = 0.0;
        if a < self.xs[0] {
            best = best.max(self.slope_left.abs());
        }
        if b > self.xs[n - 1] {
            best = best.max(self.slope_right.abs());
        }
        for i in 0..n - 1 {
            if self.xs[i + 1] > a && self.xs[i] < b {
                best =
                    best.max(((self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])).abs());
            }
        }
        best
    }
}

/// How the left boundary condition enters the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// Through its relaxed boundary function: `relax(F0)`, `G(h, .)`, `max(g, H_-)`.
    #[default]
    Relaxed,
    /// As written: `F0` itself, a ghost node with `D-u = h`, or the obstacle
    /// `min(g, .)` on the interior update with an extrapolated ghost.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// Domain `[0, length]`.
    pub length: f64,
    pub dx: f64,
    pub cfl: f64,
    pub t_final: f64,
    /// Overrides the Lipschitz bound used for the time step and the
    /// comparison region; useful to run two schemes with identical steps.
    pub lipschitz: Option<f64>,
}

impl GridConfig {
    pub fn new(length: f64, dx: f64, t_final: f64) -> Self {
        GridConfig {
            length,
            dx,
            cfl: 0.9,
            t_final,
            lipschitz: None,
        }
    }

    /// Number of cells, `length / dx`.
    pub fn cells(&self) -> Result<usize> {
        if !(self.length > 0.0 && self.dx > 0.0 && self.t_final > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length {}, dx {} and T {} must be positive",
                self.length, self.dx, self.t_final
            )));
        }
        let n = self.length / self.dx;
        let rounded = n.round();
        if rounded < 1.0 || (n - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "length / dx = {n} is not a positive integer"
            )));
        }
        Ok(rounded as usize)
    }

    pub fn nodes(&self) -> Result<usize> {
        Ok(self.cells()? + 1)
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub config: GridConfig,
    pub dt: f64,
    pub lipschitz: f64,
    /// `frames[n][j]` approximates `u(n dt, j dx)`.
    pub frames: Vec<Vec<f64>>,
}

impl GridSolution {
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn final_frame(&self) -> &[f64] {
        self.frames.last().expect("at least the initial frame")
    }

    /// Nodes with `x <= L - T L_lip`, out of reach of the right end.
    pub fn comparison_nodes(&self) -> usize {
        let limit = self.config.length - self.config.t_final * self.lipschitz;
        (0..self.frames[0].len())
            .take_while(|&j| self.config.x(j) <= limit + 1e-12)
            .count()
    }
}

/// The boundary update at `x = 0` as a function of `(u0, u1)`.
enum LeftBoundary {
    Flux(FloatPL),
    NeumannGhost(f64),
    Obstacle { g: f64, flux: FloatPL },
}

fn left_boundary(h: &PLFunction, bc: &BoundarySpec, mode: BoundaryMode) -> Result<LeftBoundary> {
    Ok(match (bc, mode) {
        (BoundarySpec::Dynamic(f0), BoundaryMode::Raw) => {
            check_boundary(f0)?;
            LeftBoundary::Flux(f0.into())
        }
        (BoundarySpec::Dynamic(f0), BoundaryMode::Relaxed) => {
            LeftBoundary::Flux((&relax(h, f0)?).into())
        }
        (BoundarySpec::Neumann(slope), BoundaryMode::Raw) => {
            LeftBoundary::NeumannGhost(to_f64(slope))
        }
        (spec @ BoundarySpec::Neumann(_), BoundaryMode::Relaxed) => {
            LeftBoundary::Flux((&spec.relaxed(h)?).into())
        }
        (BoundarySpec::Dirichlet(g), BoundaryMode::Raw) => LeftBoundary::Obstacle {
            g: to_f64(g),
            flux: h.into(),
        },
        (BoundarySpec::Dirichlet(g), BoundaryMode::Relaxed) => LeftBoundary::Obstacle {
            g: to_f64(g),
            flux: (&lower_envelope(h)?).into(),
        },
    })
}

impl LeftBoundary {
    fn update(&self, h: &FloatPL, u0: f64, u1: f64, dx: f64, dt: f64) -> f64 {
        let grad = (u1 - u0) / dx;
        match self {
            LeftBoundary::Flux(f) => u0 - dt * f.eval(grad),
            LeftBoundary::NeumannGhost(slope) => u0 - dt * h.godunov(*slope, grad),
            LeftBoundary::Obstacle { g, flux } => g.min(u0 - dt * flux.eval(grad)),
        }
    }

    fn max_abs_slope_on(&self, a: f64, b: f64) -> f64 {
        match self {
            LeftBoundary::Flux(f) | LeftBoundary::Obstacle { flux: f, .. } => {
                f.max_abs_slope_on(a, b)
            }
            LeftBoundary::NeumannGhost(_) => 0.0,
        }
    }
}

/// Lipschitz bound of `H` and of the boundary flux over the gradient range
/// of `u0` widened by one on each side.
fn lipschitz(h: &FloatPL, left: &LeftBoundary, u0: &[f64], dx: f64) -> f64 {
    let grads = u0.windows(2).map(|w| (w[1] - w[0]) / dx);
    let (lo, hi) = grads.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
        (lo.min(g), hi.max(g))
    });
    let (a, b) = (lo - 1.0, hi + 1.0);
    h.max_abs_slope_on(a, b).max(left.max_abs_slope_on(a, b))
}

/// Runs the scheme from nodal data `u0` to `cfg.t_final`.
pub fn solve(
    h: &PLFunction,
    bc: &BoundarySpec,
    mode: BoundaryMode,
    u0: &[f64],
    cfg: &GridConfig,
) -> Result<GridSolution> {
    check_hamiltonian(h)?;
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(Error::CflViolation { cfl: cfg.cfl });
    }
    let nodes = cfg.nodes()?;
    if u0.len() != nodes {
        return Err(Error::InvalidGrid(format!(
            "{} initial values for {nodes} nodes",
            u0.len()
        )));
    }
    let hf = FloatPL::from(h);
    let left = left_boundary(h, bc, mode)?;
    let lip = cfg
        .lipschitz
        .unwrap_or_else(|| lipschitz(&hf, &left, u0, cfg.dx));
    if !(lip > 0.0 && lip.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "Lipschitz bound {lip} must be positive and finite"
        )));
    }
    let reach = cfg.t_final * lip;
    if reach >= cfg.length {
        return Err(Error::DomainTooShort {
            reach,
            available: cfg.length,
        });
    }
    let steps = (cfg.t_final * lip / (cfg.cfl * cfg.dx)).ceil().max(1.0) as usize;
    let dt = cfg.t_final / steps as f64;
    let dx = cfg.dx;
    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(u0.to_vec());
    let last = nodes - 1;
    for _ in 0..steps {
        let u = frames.last().expect("initial frame");
        let mut next = vec![0.0; nodes];
        next[0] = left.update(&hf, u[0], u[1], dx, dt);
        for j in 1..last {
            let back = (u[j] - u[j - 1]) / dx;
            let fwd = (u[j + 1] - u[j]) / dx;
            next[j] = u[j] - dt * hf.godunov(back, fwd);
        }
        // Ghost u[last + 1] = 2 u[last] - u[last - 1].
        let back = (u[last] - u[last - 1]) / dx;
        next[last] = u[last] - dt * hf.eval(back);
        frames.push(next);
    }
    Ok(GridSolution {
        config: cfg.clone(),
        dt,
        lipschitz: lip,
        frames,
    })
}

/// One rung of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementLevel {
    pub dx: f64,
    pub sup_diff: f64,
}

/// Sup-norm gap at `T`, over the comparison region, between the `weak` run
/// (boundary taken as written) and the `strong` run (relaxed boundary), for
/// each `dx` in `ladder`.
pub fn refinement_study(
    h: &PLFunction,
    weak: &BoundarySpec,
    strong: &BoundarySpec,
    u0: impl Fn(f64) -> f64,
    base: &GridConfig,
    ladder: &[f64],
) -> Result<Vec<RefinementLevel>> {
    let hf = FloatPL::from(h);
    let weak_left = left_boundary(h, weak, BoundaryMode::Raw)?;
    let strong_left = left_boundary(h, strong, BoundaryMode::Relaxed)?;
    ladder
        .iter()
        .map(|&dx| {
            let mut cfg = GridConfig { dx, ..base.clone() };
            let data: Vec<f64> = (0..cfg.nodes()?).map(|j| u0(cfg.x(j))).collect();
            let lip = cfg.lipschitz.unwrap_or_else(|| {
                lipschitz(&hf, &weak_left, &data, dx).max(lipschitz(&hf, &strong_left, &data, dx))
            });
            cfg.lipschitz = Some(lip);
            let a = solve(h, weak, BoundaryMode::Raw, &data, &cfg)?;
            let b = solve(h, strong, BoundaryMode::Relaxed, &data, &cfg)?;
            let region = a.comparison_nodes();
            let sup_diff = a.final_frame()[..region]
                .iter()
                .zip(&b.final_frame()[..region])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            Ok(RefinementLevel { dx, sup_diff })
        })
        .collect()
}

/// Nodal samples of `x -> p x` for a rational slope.
pub fn linear_data(p: &Rational, cfg: &GridConfig) -> Result<Vec<f64>> {
    let slope = to_f64(p);
    Ok((0..cfg.nodes()?).map(|j| slope * cfg.x(j)).collect())
}
