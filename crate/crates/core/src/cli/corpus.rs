//! Seeded random inputs and the identity suite run over them.

use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::godunov::{
    apply_godunov, apply_lower_semiflux, apply_upper_semiflux, bln_check, germ, germ_membership,
    godunov_flux, godunov_operator, lower_semiflux_operator, lower_then_upper, neumann_relaxed,
    upper_semiflux_operator, upper_then_lower,
};
use crate::guerand::{
    characteristic_points, guerand_operator, limiter_points_by_definition, CharPoint, Sign,
};
use crate::pl::{sorted_unique, PLFunction};
use crate::relaxation::{lower_envelope, relax, sub_relax, super_relax, EnvelopePolicy};
use crate::scalar::{int, ratio, ExtendedRational, Rational};

use super::output::pl_json;

/// One corpus draw: a Hamiltonian, two boundary functions and a Neumann slope.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusCase {
    pub index: u64,
    pub h: PLFunction,
    pub f0: PLFunction,
    /// A second boundary function for the min/max commutation checks.
    pub f1: PLFunction,
    pub neumann_slope: Rational,
}

fn rng_for(seed: u64, index: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_mul(4).wrapping_add(stream));
    rng
}

fn half_steps(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    ratio(rng.gen_range(2 * lo..=2 * hi), 2)
}

fn pick(rng: &mut ChaCha8Rng, options: &[(i64, i64)]) -> Rational {
    let (n, d) = *options.choose(rng).expect("nonempty");
    ratio(n, d)
}

const DOWN: [(i64, i64); 5] = [(-1, 2), (-1, 1), (-3, 2), (-2, 1), (-3, 1)];
const UP: [(i64, i64); 5] = [(1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];

/// A coercive Hamiltonian with 3 to 9 breakpoints on the half-integers of
/// `[-5, 5]`, small half-integer values and frequent plateaus.
pub fn random_hamiltonian(rng: &mut ChaCha8Rng) -> PLFunction {
    loop {
        let h = draw_hamiltonian(rng);
        // Collinear draws collapse; keep the kink count in range.
        if h.breakpoints().len() >= 3 {
            return h;
        }
    }
}

fn draw_hamiltonian(rng: &mut ChaCha8Rng) -> PLFunction {
    let n = rng.gen_range(3..=9);
    let mut xs: Vec<i64> = (-10..=10).choose_multiple(rng, n);
    xs.sort_unstable();
    let mut y = half_steps(rng, -1, 2);
    let mut points = Vec::with_capacity(n);
    for x in xs {
        if !rng.gen_bool(0.3) {
            y = half_steps(rng, -2, 3);
        }
        points.push((ratio(x, 2), y.clone()));
    }
    PLFunction::new(points, pick(rng, &DOWN), pick(rng, &UP)).expect("sorted abscissas")
}

/// A non-increasing, semi-coercive function with 0 to 6 breakpoints.
fn random_decreasing(rng: &mut ChaCha8Rng) -> PLFunction {
    let n = rng.gen_range(0..=6);
    let slope_left = pick(rng, &DOWN);
    let start = half_steps(rng, -1, 4);
    if n == 0 {
        return PLFunction::linear(slope_left, start);
    }
    let mut xs: Vec<i64> = (-10..=10).choose_multiple(rng, n);
    xs.sort_unstable();
    let mut y = start;
    let mut points = Vec::with_capacity(n);
    for x in xs {
        points.push((ratio(x, 2), y.clone()));
        y -= ratio(rng.gen_range(0..=3), 2);
    }
    let slope_right = pick(rng, &[(0, 1), (0, 1), (-1, 2), (-1, 1)]);
    PLFunction::new(points, slope_left, slope_right).expect("sorted abscissas")
}

/// Breakpoints of `h` that are local maxima (possibly ending a plateau).
fn local_maxima(h: &PLFunction) -> Vec<Rational> {
    h.abscissas()
        .filter(|x| !h.slope_left_of(x).is_negative() && !h.slope_right_of(x).is_positive())
        .filter(|x| h.slope_left_of(x).is_positive() || h.slope_right_of(x).is_negative())
        .cloned()
        .collect()
}

/// The boundary function recipes, cycled by index.
fn random_boundary(rng: &mut ChaCha8Rng, h: &PLFunction, recipe: u64) -> PLFunction {
    match recipe % 5 {
        // Touches a local maximum of H from above.
        1 => match local_maxima(h).choose(rng) {
            Some(xm) => {
                let c = h.eval(xm);
                let s = pick(rng, &DOWN);
                PLFunction::new(vec![(xm.clone(), c)], s, int(0)).expect("one point")
            }
            None => random_decreasing(rng),
        },
        // Touches the global minimum of H from below.
        2 => {
            let (xm, c) = h
                .breakpoints()
                .iter()
                .min_by(|a, b| a.1.cmp(&b.1))
                .cloned()
                .expect("nonempty");
            let s = h.slope_left_of(&xm) / int(2);
            let s = if s.is_zero() { ratio(-1, 2) } else { s };
            PLFunction::new(vec![(xm, c)], s, int(0)).expect("one point")
        }
        // The totally degenerate case, already in envelope form.
        3 => {
            let c = half_steps(rng, -1, 3);
            let f = lower_envelope(h)
                .expect("coercive")
                .max(&PLFunction::constant(c));
            if f.breakpoints().len() <= 6 {
                f
            } else {
                random_decreasing(rng)
            }
        }
        // Crosses H at one of its kinks.
        4 => {
            let (xk, yk) = h.breakpoints().choose(rng).cloned().expect("nonempty");
            let s = pick(rng, &DOWN);
            let floor = &yk - half_steps(rng, 0, 2);
            let line = PLFunction::linear(s.clone(), &yk - &s * &xk);
            line.max(&PLFunction::constant(floor))
        }
        _ => random_decreasing(rng),
    }
}

/// Deterministic `(H, F0)` for `(seed, index)`.
pub fn random_pair(seed: u64, index: u64) -> (PLFunction, PLFunction) {
    let mut rng = rng_for(seed, index, 0);
    let h = random_hamiltonian(&mut rng);
    let f0 = random_boundary(&mut rng, &h, index);
    (h, f0)
}

/// Deterministic `(H, h)` for Neumann and germ checks.
pub fn random_neumann(seed: u64, index: u64) -> (PLFunction, Rational) {
    let mut rng = rng_for(seed, index, 1);
    let h = random_hamiltonian(&mut rng);
    let slope = if rng.gen_bool(0.5) {
        h.breakpoints()
            .choose(&mut rng)
            .expect("nonempty")
            .0
            .clone()
    } else {
        ratio(rng.gen_range(-48..=48), 8)
    };
    (h, slope)
}

pub fn random_case(seed: u64, index: u64) -> CorpusCase {
    let (h, f0) = random_pair(seed, index);
    let mut rng = rng_for(seed, index, 2);
    let recipe = index + 1 + rng.gen_range(0..4);
    let f1 = random_boundary(&mut rng, &h, recipe);
    let neumann_slope = ratio(rng.gen_range(-40..=40), 4);
    CorpusCase {
        index,
        h,
        f0,
        f1,
        neumann_slope,
    }
}

/// `n` rationals in `[-6, 6]` with denominators up to 12.
pub fn random_probes(seed: u64, index: u64, n: usize) -> Vec<Rational> {
    let mut rng = rng_for(seed, index, 3);
    (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=12);
            ratio(rng.gen_range(-6 * d..=6 * d), d)
        })
        .collect()
}

/// Whether `H` and `F` touch somewhere without crossing: an isolated zero
/// of `H - F` where it keeps its sign, or a whole interval of contact.
pub fn has_tangency(h: &PLFunction, f: &PLFunction) -> bool {
    let d = h.sub(f);
    d.zero_set().iter().any(|c| match c.lo().finite() {
        Some(x) if c.is_degenerate() => {
            let (l, r) = (d.slope_left_of(x), d.slope_right_of(x));
            !((l.is_positive() && r.is_positive()) || (l.is_negative() && r.is_negative()))
        }
        _ => true,
    })
}

/// Abscissas between which every function in `fs` is affine, plus the
/// midpoints and a point on each tail.
pub fn test_points(fs: &[&PLFunction]) -> Vec<Rational> {
    let mut xs: Vec<Rational> = fs.iter().flat_map(|f| f.abscissas().cloned()).collect();
    for (i, f) in fs.iter().enumerate() {
        for g in &fs[i + 1..] {
            xs.extend(f.sub(g).roots());
        }
    }
    let xs = sorted_unique(xs);
    let mut out = xs.clone();
    out.extend(xs.windows(2).map(|w| (&w[0] + &w[1]) / int(2)));
    out.push(&xs[0] - int(1));
    out.push(&xs[xs.len() - 1] + int(1));
    sorted_unique(out)
}

/// The named identities checked per case.
pub const IDENTITIES: [&str; 16] = [
    "sandwich",
    "idempotence",
    "contraction",
    "commutation",
    "envelope-invariance",
    "minimality",
    "ordering",
    "local-constancy",
    "coincidence",
    "limiter-coincidence",
    "plateau",
    "godunov-equivalence",
    "semiflux-identification",
    "composition",
    "germ-agreement",
    "bln-equivalence",
];

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq(what: &str, a: &PLFunction, b: &PLFunction) -> Check {
    ensure(a == b, || format!("{what}: {a} != {b}"))
}

fn op<T>(r: crate::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn abs_pl(f: &PLFunction) -> PLFunction {
    f.max(&f.neg())
}

struct Ctx<'a> {
    case: &'a CorpusCase,
    probes: Vec<Rational>,
}

impl Ctx<'_> {
    fn h(&self) -> &PLFunction {
        &self.case.h
    }
    fn f0(&self) -> &PLFunction {
        &self.case.f0
    }

    fn run(&self, name: &str) -> Check {
        let (h, f0) = (self.h(), self.f0());
        let r = op(relax(h, f0))?;
        let sub = op(sub_relax(h, f0))?;
        let sup = op(super_relax(h, f0))?;
        match name {
            "sandwich" => {
                let chain = [f0.min(h), sub.clone(), f0.clone(), sup.clone(), f0.max(h)];
                ensure(chain.windows(2).all(|w| w[0].le(&w[1])), || {
                    "min <= sub <= F0 <= super <= max fails".into()
                })
            }
            "idempotence" => {
                eq("sub o sub", &op(sub_relax(h, &sub))?, &sub)?;
                eq("super o super", &op(super_relax(h, &sup))?, &sup)?;
                eq("relax o relax", &op(relax(h, &r))?, &r)
            }
            "contraction" => ensure(abs_pl(&r.sub(h)).le(&abs_pl(&f0.sub(h))), || {
                "|relax - H| <= |F0 - H| fails".into()
            }),
            "commutation" => {
                let f1 = &self.case.f1;
                let r1 = op(relax(h, f1))?;
                eq("relax(min)", &op(relax(h, &f0.min(f1)))?, &r.min(&r1))?;
                eq("relax(max)", &op(relax(h, &f0.max(f1)))?, &r.max(&r1))
            }
            "envelope-invariance" => {
                let hm = op(lower_envelope(h))?;
                eq("relax(max(F0, H_-))", &op(relax(h, &f0.max(&hm)))?, &r)
            }
            "minimality" => ensure(op(lower_envelope(h))?.le(&r), || {
                "H_- <= relax fails".into()
            }),
            "ordering" => {
                for x in test_points(&[h, f0, &r]) {
                    let (hv, fv, rv) = (h.eval(&x), f0.eval(&x), r.eval(&x));
                    let ok =
                        (fv > hv || (fv <= rv && rv <= hv)) && (fv < hv || (fv >= rv && rv >= hv));
                    ensure(ok, || format!("ordering fails at {x}"))?;
                }
                Ok(())
            }
            "local-constancy" => {
                let xs = test_points(&[h, &r]);
                for w in xs.windows(2) {
                    let mid = (&w[0] + &w[1]) / int(2);
                    if r.eval(&mid) != h.eval(&mid) {
                        ensure(r.eval(&w[0]) == r.eval(&w[1]), || {
                            format!("relax not constant on ({}, {})", w[0], w[1])
                        })?;
                    }
                }
                let (lo, hi) = (&xs[0], &xs[xs.len() - 1]);
                ensure(r.eval(lo) == h.eval(lo) || r.slope_left().is_zero(), || {
                    "left tail not flat".into()
                })?;
                ensure(
                    r.eval(hi) == h.eval(hi) || r.slope_right().is_zero(),
                    || "right tail not flat".into(),
                )
            }
            "coincidence" => eq(
                "guerand",
                &op(guerand_operator(h, f0, EnvelopePolicy::Upgrade))?,
                &r,
            ),
            "limiter-coincidence" => self.limiters(&r),
            "plateau" => self.plateau(&r),
            "godunov-equivalence" => {
                eq(
                    "godunov operator",
                    &op(godunov_operator(h, f0, EnvelopePolicy::Upgrade))?,
                    &r,
                )?;
                for p in &self.probes {
                    let v = op(apply_godunov(h, f0, p, EnvelopePolicy::Upgrade))?;
                    ensure(v == r.eval(p), || format!("F0 G at {p}"))?;
                }
                Ok(())
            }
            "semiflux-identification" => {
                let lower = op(lower_semiflux_operator(h, f0))?;
                let upper = op(upper_semiflux_operator(h, f0))?;
                eq("F0 G_", &lower, &sub)?;
                eq("F0 G^", &upper, &sup)?;
                ensure(lower.is_semicoercive() && upper.is_semicoercive(), || {
                    "semi-flux image not semi-coercive".into()
                })?;
                for p in &self.probes {
                    ensure(op(apply_lower_semiflux(h, f0, p))? == sub.eval(p), || {
                        format!("F0 G_ at {p}")
                    })?;
                    ensure(op(apply_upper_semiflux(h, f0, p))? == sup.eval(p), || {
                        format!("F0 G^ at {p}")
                    })?;
                }
                Ok(())
            }
            "composition" => {
                let g = op(godunov_operator(h, f0, EnvelopePolicy::Upgrade))?;
                eq("(F0 G^) G_", &op(upper_then_lower(h, f0))?, &g)?;
                eq("(F0 G_) G^", &op(lower_then_upper(h, f0))?, &g)
            }
            "germ-agreement" => {
                let g = op(germ(h, f0))?;
                let mut pts = g.endpoints();
                pts.extend(self.probes.iter().cloned());
                let by_ineq = op(germ_membership(h, f0, &pts))?;
                for (p, m) in pts.iter().zip(by_ineq) {
                    ensure(m == g.contains(p) && m == (h.eval(p) == r.eval(p)), || {
                        format!("germ routes disagree at {p}")
                    })?;
                }
                Ok(())
            }
            "bln-equivalence" => {
                let slope = &self.case.neumann_slope;
                let n = op(neumann_relaxed(h, slope))?;
                eq("relax(N)", &op(relax(h, &n))?, &n)?;
                let g = op(germ(h, &n))?;
                let mut pts = g.endpoints();
                pts.extend(self.probes.iter().cloned());
                pts.push(slope.clone());
                for p in pts {
                    let b = op(bln_check(h, slope, &p))?;
                    let flux = h.eval(&p) == op(godunov_flux(h, slope, &p))?;
                    ensure(b == flux && b == g.contains(&p), || {
                        format!("BLN routes disagree at {p}")
                    })?;
                }
                Ok(())
            }
            other => Err(format!("unknown identity {other}")),
        }
    }

    fn limiters(&self, r: &PLFunction) -> Check {
        let (h, f0) = (self.h(), self.f0());
        let f0 = if f0.is_semicoercive() {
            f0.clone()
        } else {
            op(crate::relaxation::semicoercive_envelope(h, f0))?
        };
        let lims = op(limiter_points_by_definition(h, &f0))?;
        let from_lims: Vec<CharPoint> = lims.iter().map(|l| l.char_point()).collect();
        let chars = op(characteristic_points(h, r))?;
        ensure(from_lims == chars, || {
            format!("A = {from_lims:?}, chi = {chars:?}")
        })?;
        for (i, a) in lims.iter().enumerate() {
            // A point that limits on both sides carries one plateau, listed twice.
            for b in lims[i + 1..].iter().filter(|b| b.p != a.p) {
                ensure(!a.interval.interiors_meet(&b.interval), || {
                    format!(
                        "limiter intervals {} and {} overlap",
                        a.interval, b.interval
                    )
                })?;
            }
        }
        Ok(())
    }

    fn plateau(&self, r: &PLFunction) -> Check {
        let (h, f0) = (self.h(), self.f0());
        for c in op(characteristic_points(h, r))? {
            let p = &c.location;
            let level = h.eval(p);
            let pair = op(crate::guerand::upper_lower(h, p))?;
            let (lo, hi) = match c.sign {
                Sign::Negative => (pair.p_minus.clone(), p.clone()),
                Sign::Positive => match &pair.p_plus {
                    ExtendedRational::Finite(x) => (p.clone(), x.clone()),
                    _ => {
                        ensure(r.slope_right().is_zero(), || {
                            format!("relax not flat right of {p}")
                        })?;
                        let last = r.abscissas().last().cloned().unwrap_or_else(|| p.clone());
                        (p.clone(), last.max(p.clone()))
                    }
                },
            };
            let inside = r.abscissas().filter(|x| **x > lo && **x < hi).cloned();
            for x in [lo.clone(), hi.clone()].into_iter().chain(inside) {
                ensure(r.eval(&x) == level, || format!("relax != H({p}) at {x}"))?;
            }
            let ordered = match c.sign {
                Sign::Negative => r.eval(p) <= f0.eval(p),
                Sign::Positive => r.eval(p) >= f0.eval(p),
            };
            ensure(ordered, || {
                format!("value ordering fails at {} point {p}", c.sign)
            })?;
        }
        Ok(())
    }
}

/// Outcome of one identity on one case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityOutcome {
    pub identity: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

pub fn check_case(case: &CorpusCase, seed: u64) -> Vec<IdentityOutcome> {
    let ctx = Ctx {
        case,
        probes: random_probes(seed, case.index, 25),
    };
    IDENTITIES
        .iter()
        .map(|&identity| match ctx.run(identity) {
            Ok(()) => IdentityOutcome {
                identity,
                passed: true,
                message: None,
            },
            Err(m) => IdentityOutcome {
                identity,
                passed: false,
                message: Some(m),
            },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityTally {
    pub identity: &'static str,
    pub passed: usize,
    pub failed: usize,
}

/// Everything needed to rerun a failing case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replay {
    pub index: u64,
    pub failures: Vec<IdentityOutcome>,
    pub hamiltonian: serde_json::Value,
    pub boundary: serde_json::Value,
    pub second_boundary: serde_json::Value,
    pub neumann_slope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub seed: u64,
    pub cases: u64,
    pub tangential_cases: usize,
    pub identities: Vec<IdentityTally>,
    /// First failing case, if any.
    pub failure: Option<Replay>,
    /// Kept out of the serialized report so reports are reproducible.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Runs the identity suite on `cases` seeded cases, in parallel.
pub fn verify_corpus(seed: u64, cases: u64) -> CorpusReport {
    let start = Instant::now();
    let results: Vec<(CorpusCase, Vec<IdentityOutcome>)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let case = random_case(seed, i);
            let outcomes = check_case(&case, seed);
            (case, outcomes)
        })
        .collect();
    let identities = IDENTITIES
        .iter()
        .enumerate()
        .map(|(k, &identity)| {
            let passed = results.iter().filter(|(_, o)| o[k].passed).count();
            IdentityTally {
                identity,
                passed,
                failed: results.len() - passed,
            }
        })
        .collect();
    let failure = results
        .iter()
        .find(|(_, o)| o.iter().any(|x| !x.passed))
        .map(|(case, o)| Replay {
            index: case.index,
            failures: o.iter().filter(|x| !x.passed).cloned().collect(),
            hamiltonian: pl_json(&case.h),
            boundary: pl_json(&case.f0),
            second_boundary: pl_json(&case.f1),
            neumann_slope: crate::scalar::format_rational(&case.neumann_slope),
        });
    let tangential_cases = results
        .iter()
        .filter(|(c, _)| has_tangency(&c.h, &c.f0))
        .count();
    CorpusReport {
        seed,
        cases,
        tangential_cases,
        identities,
        failure,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}
