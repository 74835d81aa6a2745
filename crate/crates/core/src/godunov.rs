//! The Godunov flux, its semi-fluxes acting on boundary functions, the germ,
//! and the relaxed Neumann and Dirichlet conditions.
//!
//! `G(q, p)` is the max of `H` over `[p, q]` when `p <= q` and the min over
//! `[q, p]` when `p >= q`. For fixed `p`, `q -> G(q, p)` is the PL function
//! `cummax_from(p) + cummin_to(p) - H(p)`, non-decreasing in `q`, so every
//! equation `F0(q) = G(q, p)` is a monotone root problem on PL pieces.

use std::cell::RefCell;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pl::{sorted_unique, PLFunction};
use crate::relaxation::{
    check_boundary, check_hamiltonian, lower_envelope, prepare_boundary, relax, sub_relax,
    super_relax, EnvelopePolicy,
};
use crate::scalar::{ExtendedInterval, ExtendedRational, Rational};

/// Boundary condition at `x = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundarySpec {
    /// `u_t + F0(u_x) = 0`.
    Dynamic(PLFunction),
    /// `du/dn + h = 0`, i.e. `u_x = h` since the outward normal is `-1`.
    Neumann(Rational),
    /// `u = g`.
    Dirichlet(Rational),
}

impl BoundarySpec {
    /// The relaxed boundary function the condition is equivalent to.
    pub fn relaxed(&self, h: &PLFunction) -> Result<PLFunction> {
        match self {
            BoundarySpec::Dynamic(f0) => relax(h, f0),
            BoundarySpec::Neumann(slope) => neumann_relaxed(h, slope),
            BoundarySpec::Dirichlet(g) => dirichlet_relaxed(h, g),
        }
    }
}

/// The set `{H = relax(F0)}` as sorted disjoint closed components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Germ {
    pub components: Vec<ExtendedInterval>,
}

impl Germ {
    pub fn contains(&self, p: &Rational) -> bool {
        self.components.iter().any(|c| c.contains(p))
    }

    /// Finite component endpoints, sorted.
    pub fn endpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .components
            .iter()
            .flat_map(|c| [c.lo().finite().cloned(), c.hi().finite().cloned()])
            .flatten()
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl std::fmt::Display for Germ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.components.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" u "))
    }
}

pub fn godunov_flux(h: &PLFunction, q: &Rational, p: &Rational) -> Result<Rational> {
    check_hamiltonian(h)?;
    Ok(if p <= q {
        h.max_on(p, q)
    } else {
        h.min_on(q, p)
    })
}

/// `G_(q, p)`: `{-inf}` for `q < p`, `[-inf, H(p)]` for `q = p`, `{max of H on [p, q]}` for `q > p`.
pub fn lower_semiflux(h: &PLFunction, q: &Rational, p: &Rational) -> Result<ExtendedInterval> {
    use ExtendedRational::{Finite, NegInf};
    check_hamiltonian(h)?;
    Ok(match q.cmp(p) {
        std::cmp::Ordering::Less => ExtendedInterval::point(NegInf),
        std::cmp::Ordering::Equal => {
            ExtendedInterval::new(NegInf, Finite(h.eval(p))).expect("ordered")
        }
        std::cmp::Ordering::Greater => ExtendedInterval::point(Finite(h.max_on(p, q))),
    })
}

/// `G^(q, p)`: `{min of H on [q, p]}` for `q < p`, `[H(p), +inf]` for `q = p`, `{+inf}` for `q > p`.
pub fn upper_semiflux(h: &PLFunction, q: &Rational, p: &Rational) -> Result<ExtendedInterval> {
    use ExtendedRational::{Finite, PosInf};
    check_hamiltonian(h)?;
    Ok(match q.cmp(p) {
        std::cmp::Ordering::Less => ExtendedInterval::point(Finite(h.min_on(q, p))),
        std::cmp::Ordering::Equal => {
            ExtendedInterval::new(Finite(h.eval(p)), PosInf).expect("ordered")
        }
        std::cmp::Ordering::Greater => ExtendedInterval::point(PosInf),
    })
}

/// `q -> G(q, p)` for fixed `p`.
pub fn godunov_in_q(h: &PLFunction, p: &Rational) -> PLFunction {
    h.cumulative_max_from(p)
        .add(&h.cumulative_min_to(p))
        .add_constant(&-h.eval(p))
}

fn first_component(phi: &PLFunction, what: &str, p: &Rational) -> Result<ExtendedInterval> {
    phi.zero_set()
        .into_iter()
        .next()
        .ok_or_else(|| Error::RootNotFound(format!("{what} at p = {p}: {phi} has no zero")))
}

/// All `q` with `F0(q) = G(q, p)`, an interval because `F0 - G(., p)` is non-increasing.
pub fn godunov_witnesses(
    h: &PLFunction,
    f0: &PLFunction,
    p: &Rational,
    policy: EnvelopePolicy,
) -> Result<ExtendedInterval> {
    let f0 = prepare_boundary(h, f0, policy)?;
    godunov_witnesses_prepared(h, &f0, p)
}

fn godunov_witnesses_prepared(
    h: &PLFunction,
    f0: &PLFunction,
    p: &Rational,
) -> Result<ExtendedInterval> {
    first_component(&f0.sub(&godunov_in_q(h, p)), "F0 - G(., p)", p)
}

/// `(F0 G)(p)`: the common value `F0(q) = G(q, p)`.
///
/// Taken at the leftmost witness and checked against the rightmost one.
pub fn apply_godunov(
    h: &PLFunction,
    f0: &PLFunction,
    p: &Rational,
    policy: EnvelopePolicy,
) -> Result<Rational> {
    let f0 = prepare_boundary(h, f0, policy)?;
    apply_godunov_prepared(h, &f0, p)
}

fn apply_godunov_prepared(h: &PLFunction, f0: &PLFunction, p: &Rational) -> Result<Rational> {
    let w = godunov_witnesses_prepared(h, f0, p)?;
    let lo = w
        .lo()
        .finite()
        .ok_or_else(|| Error::RootNotFound(format!("witness set {w} unbounded below")))?;
    let value = f0.eval(lo);
    if let Some(hi) = w.hi().finite() {
        if f0.eval(hi) != value {
            return Err(Error::InternalMismatch(format!(
                "Godunov value not unique at p = {p}: F0({lo}) != F0({hi})"
            )));
        }
    }
    Ok(value)
}

fn require_semicoercive(h: &PLFunction, f0: &PLFunction) -> Result<()> {
    check_hamiltonian(h)?;
    check_boundary(f0)?;
    if f0.is_semicoercive() {
        Ok(())
    } else {
        Err(Error::NotSemiCoercive)
    }
}

/// `{q : F0(q) in G_(q, p)}`, contained in `[p, +inf)`.
pub fn lower_semiflux_witnesses(
    h: &PLFunction,
    f0: &PLFunction,
    p: &Rational,
) -> Result<ExtendedInterval> {
    require_semicoercive(h, f0)?;
    let here = ExtendedRational::Finite(p.clone());
    if f0.eval(p) < h.eval(p) {
        return Ok(ExtendedInterval::point(here));
    }
    let right = ExtendedInterval::new(here, ExtendedRational::PosInf).expect("ordered");
    let phi = f0.sub(&h.cumulative_max_from(p));
    phi.zero_set()
        .iter()
        .find_map(|c| c.intersection(&right))
        .ok_or_else(|| {
            Error::RootNotFound(format!(
                "lower semi-flux at p = {p}: {phi} has no zero right of p"
            ))
        })
}

/// `{q : F0(q) in G^(q, p)}`, contained in `(-inf, p]`.
pub fn upper_semiflux_witnesses(
    h: &PLFunction,
    f0: &PLFunction,
    p: &Rational,
) -> Result<ExtendedInterval> {
    require_semicoercive(h, f0)?;
    let here = ExtendedRational::Finite(p.clone());
    if f0.eval(p) > h.eval(p) {
        return Ok(ExtendedInterval::point(here));
    }
    let left = ExtendedInterval::new(ExtendedRational::NegInf, here).expect("ordered");
    let phi = f0.sub(&h.cumulative_min_to(p));
    phi.zero_set()
        .iter()
        .rev()
        .find_map(|c| c.intersection(&left))
        .ok_or_else(|| {
            Error::RootNotFound(format!(
                "upper semi-flux at p = {p}: {phi} has no zero left of p"
            ))
        })
}

/// `(F0 G_)(p)`, the value of `F0` on the lower witness set.
pub fn apply_lower_semiflux(h: &PLFunction, f0: &PLFunction, p: &Rational) -> Result<Rational> {
    let w = lower_semiflux_witnesses(h, f0, p)?;
    Ok(f0.eval(
        w.lo()
            .finite()
            .expect("lower witnesses start at p or right of it"),
    ))
}

/// `(F0 G^)(p)`, the value of `F0` on the upper witness set.
pub fn apply_upper_semiflux(h: &PLFunction, f0: &PLFunction, p: &Rational) -> Result<Rational> {
    let w = upper_semiflux_witnesses(h, f0, p)?;
    Ok(f0.eval(
        w.hi()
            .finite()
            .expect("upper witnesses end at p or left of it"),
    ))
}

/// Abscissas where any of the operators above may bend, as a function of `p`:
/// breakpoints and contact points of `H` and `F0`, plus every abscissa where
/// `H` or `F0` reaches a level taken by either of them at one of those points.
fn operator_candidates(h: &PLFunction, f0: &PLFunction) -> Vec<Rational> {
    let contacts = h.sub(f0).roots();
    let mut levels: Vec<Rational> = h
        .abscissas()
        .chain(contacts.iter())
        .map(|x| h.eval(x))
        .chain(f0.breakpoints().iter().map(|(_, y)| y.clone()))
        .collect();
    levels.sort();
    levels.dedup();
    let mut out: Vec<Rational> = h
        .abscissas()
        .chain(f0.abscissas())
        .cloned()
        .chain(contacts)
        .collect();
    for y in &levels {
        out.extend(h.level_points(y));
        out.extend(f0.level_points(y));
    }
    sorted_unique(out)
}

fn rebuild(
    candidates: Vec<Rational>,
    what: &str,
    f: impl Fn(&Rational) -> Result<Rational>,
) -> Result<PLFunction> {
    let failure = RefCell::new(None);
    let g = PLFunction::from_pointwise_verified(candidates, |x| {
        f(x).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            Rational::zero()
        })
    });
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    g.map_err(|probes| {
        Error::InternalMismatch(format!(
            "{what} is not PL on the candidate grid near {probes:?}"
        ))
    })
}

/// `p -> (F0 G)(p)` as a PL function.
pub fn godunov_operator(
    h: &PLFunction,
    f0: &PLFunction,
    policy: EnvelopePolicy,
) -> Result<PLFunction> {
    let f0 = prepare_boundary(h, f0, policy)?;
    rebuild(operator_candidates(h, &f0), "F0 G", |p| {
        apply_godunov_prepared(h, &f0, p)
    })
}

/// `p -> (F0 G_)(p)` as a PL function.
pub fn lower_semiflux_operator(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    require_semicoercive(h, f0)?;
    rebuild(operator_candidates(h, f0), "F0 G_", |p| {
        apply_lower_semiflux(h, f0, p)
    })
}

/// `p -> (F0 G^)(p)` as a PL function.
pub fn upper_semiflux_operator(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    require_semicoercive(h, f0)?;
    rebuild(operator_candidates(h, f0), "F0 G^", |p| {
        apply_upper_semiflux(h, f0, p)
    })
}

/// `(F0 G^) G_`.
pub fn upper_then_lower(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    lower_semiflux_operator(h, &upper_semiflux_operator(h, f0)?)
}

/// `(F0 G_) G^`.
pub fn lower_then_upper(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    upper_semiflux_operator(h, &lower_semiflux_operator(h, f0)?)
}

/// `{H = relax(F0)}` from the zero set of `H - relax(F0)`.
pub fn germ(h: &PLFunction, f0: &PLFunction) -> Result<Germ> {
    let r = relax(h, f0)?;
    Ok(Germ {
        components: h.sub(&r).zero_set(),
    })
}

/// Germ membership of each probe through `sub(F0)(p) <= H(p) <= super(F0)(p)`.
pub fn germ_membership(h: &PLFunction, f0: &PLFunction, probes: &[Rational]) -> Result<Vec<bool>> {
    let lower = sub_relax(h, f0)?;
    let upper = super_relax(h, f0)?;
    Ok(probes
        .iter()
        .map(|p| {
            let v = h.eval(p);
            lower.eval(p) <= v && v <= upper.eval(p)
        })
        .collect())
}

/// `(sign(p - k) - sign(h - k)) (H(p) - H(k)) <= 0` for every real `k`.
///
/// Only `k` between `p` and `h` contribute, and there the worst case is at
/// `p`, `h` or a breakpoint of `H`.
pub fn bln_check(h: &PLFunction, slope: &Rational, p: &Rational) -> Result<bool> {
    check_hamiltonian(h)?;
    let (a, b) = if p <= slope { (p, slope) } else { (slope, p) };
    let hp = h.eval(p);
    let ks = [p.clone(), slope.clone()]
        .into_iter()
        .chain(h.abscissas().filter(|x| *x > a && *x < b).cloned());
    Ok(ks.into_iter().all(|k| {
        let s = sign_of(&(p - &k)) - sign_of(&(slope - &k));
        let term = Rational::from_integer(s.into()) * (&hp - h.eval(&k));
        term <= Rational::zero()
    }))
}

fn sign_of(r: &Rational) -> i64 {
    i64::from(crate::scalar::signum(r))
}

/// `N(p) = G(h, p)`: the Neumann condition `u_x = h` in relaxed form.
///
/// With `n = -1` the branch `p.n + h >= 0` of the multi-dimensional formula
/// reads `p <= h`, where `N` is the max of `H` over `[p, h]`; for `p >= h` it
/// is the min over `[h, p]`.
pub fn neumann_relaxed(h: &PLFunction, slope: &Rational) -> Result<PLFunction> {
    check_hamiltonian(h)?;
    Ok(h.cumulative_max_to(slope)
        .add(&h.cumulative_min_from(slope))
        .add_constant(&-h.eval(slope)))
}

/// `max(g, H_-)`: the Dirichlet condition `u = g` in relaxed form.
pub fn dirichlet_relaxed(h: &PLFunction, g: &Rational) -> Result<PLFunction> {
    Ok(lower_envelope(h)?.max(&PLFunction::constant(g.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pl::fixtures::*;
    use crate::scalar::{int, ratio};
    use ExtendedRational::{Finite, NegInf, PosInf};

    fn grid() -> impl Iterator<Item = Rational> {
        (-96..=96).map(|k| ratio(k, 16))
    }

    fn w_fixture() -> PLFunction {
        lower_envelope(&w_shape())
            .unwrap()
            .max(&PLFunction::constant(half()))
    }

    /// Dense scan for a `q` with `F0(q) = G(q, p)` on the grid.
    fn grid_godunov(h: &PLFunction, f0: &PLFunction, p: &Rational) -> Option<Rational> {
        grid()
            .find(|q| f0.eval(q) == godunov_flux(h, q, p).unwrap())
            .map(|q| f0.eval(&q))
    }

    #[test]
    fn flux_examples() {
        let a = abs();
        assert_eq!(godunov_flux(&a, &int(2), &int(2)).unwrap(), int(2));
        assert_eq!(godunov_flux(&a, &int(1), &int(-1)).unwrap(), int(1));
        assert_eq!(godunov_flux(&a, &int(-1), &int(1)).unwrap(), int(0));
        let w = w_shape();
        for p in grid().step_by(7) {
            let g = godunov_in_q(&w, &p);
            for q in grid().step_by(5) {
                assert_eq!(g.eval(&q), godunov_flux(&w, &q, &p).unwrap());
            }
        }
    }

    #[test]
    fn semiflux_examples() {
        let a = abs();
        assert_eq!(
            lower_semiflux(&a, &int(0), &int(0)).unwrap(),
            ExtendedInterval::new(NegInf, Finite(int(0))).unwrap()
        );
        assert_eq!(
            lower_semiflux(&a, &int(2), &int(0)).unwrap(),
            ExtendedInterval::point(Finite(int(2)))
        );
        assert_eq!(
            lower_semiflux(&a, &int(-1), &int(0)).unwrap(),
            ExtendedInterval::point(NegInf)
        );
        assert_eq!(
            upper_semiflux(&a, &int(1), &int(0)).unwrap(),
            ExtendedInterval::point(PosInf)
        );
        assert_eq!(
            upper_semiflux(&a, &int(-1), &int(1)).unwrap(),
            ExtendedInterval::point(Finite(int(0)))
        );
    }

    #[test]
    fn apply_godunov_examples() {
        let zero = PLFunction::constant(int(0));
        assert_eq!(
            apply_godunov(&abs(), &zero, &int(-2), EnvelopePolicy::Upgrade).unwrap(),
            int(2)
        );
        assert!(matches!(
            apply_godunov(&abs(), &zero, &int(-2), EnvelopePolicy::Strict),
            Err(Error::NotSemiCoercive)
        ));
        let f0 = w_fixture();
        let w = w_shape();
        assert_eq!(
            apply_godunov(&w, &f0, &int(0), EnvelopePolicy::Strict).unwrap(),
            half()
        );
        assert_eq!(grid_godunov(&w, &f0, &int(0)), Some(half()));
        assert!(godunov_witnesses(&w, &f0, &int(0), EnvelopePolicy::Strict)
            .unwrap()
            .contains(&ratio(-1, 2)));
        // F0(p) = H(p): witness q = p.
        assert_eq!(
            apply_godunov(&w, &f0, &ratio(5, 4), EnvelopePolicy::Strict).unwrap(),
            half()
        );
    }

    #[test]
    fn semiflux_application() {
        let w = w_shape();
        let f0 = w_fixture();
        assert_eq!(apply_lower_semiflux(&w, &f0, &int(-2)).unwrap(), int(2));
        let below = PLFunction::linear(int(-1), int(-3));
        let h = abs();
        for p in grid().step_by(3) {
            assert_eq!(
                apply_lower_semiflux(&h, &below.max(&neg_part()), &p).unwrap(),
                sub_relax(&h, &below.max(&neg_part())).unwrap().eval(&p)
            );
        }
        for p in grid().step_by(3) {
            assert_eq!(
                apply_lower_semiflux(&w, &f0, &p).unwrap(),
                sub_relax(&w, &f0).unwrap().eval(&p)
            );
            assert_eq!(
                apply_upper_semiflux(&w, &f0, &p).unwrap(),
                super_relax(&w, &f0).unwrap().eval(&p)
            );
        }
        assert!(matches!(
            apply_upper_semiflux(&w, &PLFunction::constant(half()), &int(0)),
            Err(Error::NotSemiCoercive)
        ));
    }

    #[test]
    fn operators_and_compositions() {
        let w = w_shape();
        let f0 =
            PLFunction::new(vec![(int(-1), int(3)), (int(2), int(1))], int(-3), int(-1)).unwrap();
        let r = relax(&w, &f0).unwrap();
        assert_eq!(
            godunov_operator(&w, &f0, EnvelopePolicy::Strict).unwrap(),
            r
        );
        assert_eq!(
            lower_semiflux_operator(&w, &f0).unwrap(),
            sub_relax(&w, &f0).unwrap()
        );
        assert_eq!(
            upper_semiflux_operator(&w, &f0).unwrap(),
            super_relax(&w, &f0).unwrap()
        );
        assert_eq!(upper_then_lower(&w, &f0).unwrap(), r);
        assert_eq!(lower_then_upper(&w, &f0).unwrap(), r);
    }

    #[test]
    fn germ_examples() {
        let zero = PLFunction::constant(int(0));
        let g = germ(&abs(), &zero).unwrap();
        assert_eq!(
            g.components,
            vec![ExtendedInterval::new(NegInf, Finite(int(0))).unwrap()]
        );
        let g = germ(&w_shape(), &PLFunction::constant(half())).unwrap();
        assert_eq!(
            g.components,
            vec![
                ExtendedInterval::new(NegInf, Finite(ratio(-5, 4))).unwrap(),
                ExtendedInterval::point(Finite(ratio(-1, 2))),
                ExtendedInterval::point(Finite(half())),
                ExtendedInterval::point(Finite(ratio(5, 4))),
            ]
        );
        let r = relax(&w_shape(), &PLFunction::constant(half())).unwrap();
        let probes: Vec<Rational> = grid().collect();
        let by_ineq = germ_membership(&w_shape(), &PLFunction::constant(half()), &probes).unwrap();
        for (p, member) in probes.iter().zip(by_ineq) {
            assert_eq!(member, g.contains(p));
            assert_eq!(member, w_shape().eval(p) == r.eval(p));
        }
        // H_- is self-relaxed: its germ is where H equals its running min.
        let hm = lower_envelope(&w_shape()).unwrap();
        let g = germ(&w_shape(), &hm).unwrap();
        for p in grid() {
            assert_eq!(g.contains(&p), w_shape().eval(&p) == hm.eval(&p));
        }
    }

    /// Dense-k oracle for the sign condition.
    fn grid_bln(h: &PLFunction, slope: &Rational, p: &Rational) -> bool {
        grid().all(|k| {
            let s = sign_of(&(p - &k)) - sign_of(&(slope - &k));
            Rational::from_integer(s.into()) * (h.eval(p) - h.eval(&k)) <= Rational::zero()
        })
    }

    #[test]
    fn bln_examples() {
        let a = abs();
        assert!(bln_check(&a, &int(3), &int(3)).unwrap());
        assert!(bln_check(&a, &int(0), &int(-1)).unwrap());
        assert!(!bln_check(&a, &int(0), &int(1)).unwrap());
        let w = w_shape();
        for slope in [int(0), ratio(-1, 2), int(2)] {
            let n = neumann_relaxed(&w, &slope).unwrap();
            let g = germ(&w, &n).unwrap();
            for p in grid().step_by(3) {
                let b = bln_check(&w, &slope, &p).unwrap();
                assert_eq!(b, grid_bln(&w, &slope, &p), "h={slope} p={p}");
                assert_eq!(b, w.eval(&p) == godunov_flux(&w, &slope, &p).unwrap());
                assert_eq!(b, g.contains(&p));
            }
        }
    }

    #[test]
    fn neumann_examples() {
        assert_eq!(neumann_relaxed(&abs(), &int(0)).unwrap(), neg_part());
        let w = w_shape();
        for slope in [int(-2), ratio(-1, 2), int(0), ratio(3, 4)] {
            let n = neumann_relaxed(&w, &slope).unwrap();
            assert!(n.is_nonincreasing());
            assert_eq!(relax(&w, &n).unwrap(), n);
            for p in grid() {
                assert_eq!(n.eval(&p), godunov_flux(&w, &slope, &p).unwrap());
                assert!((w.eval(&p) - n.eval(&p)) * (&p - &slope) >= Rational::zero());
            }
        }
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_relaxed(&abs(), &int(0)).unwrap(), neg_part());
        let w = w_shape();
        let d = dirichlet_relaxed(&w, &half()).unwrap();
        assert_eq!(
            d,
            PLFunction::linear(int(-2), int(-2)).max(&PLFunction::constant(half()))
        );
        assert_eq!(d, relax(&w, &PLFunction::constant(half())).unwrap());
        assert_eq!(
            dirichlet_relaxed(&w, &int(-1)).unwrap(),
            lower_envelope(&w).unwrap()
        );
        assert_eq!(BoundarySpec::Dirichlet(half()).relaxed(&w).unwrap(), d);
    }
}
