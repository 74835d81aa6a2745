//! Sub-relaxation, super-relaxation and the relaxation operator.
//!
//! For a coercive Hamiltonian `H` and a non-increasing boundary function `F0`:
//!
//! ```text
//! sub(F0)(p)   = sup over q >= p of min(F0, H)(q)
//! super(F0)(p) = inf over q <= p of max(F0, H)(q)
//! relax(F0)    = sub(F0) on {F0 >= H},  super(F0) on {F0 <= H}
//! ```
//!
//! Semi-coercivity of `F0` is not required here: both formulas stay finite
//! as soon as `H` is coercive and `F0` non-increasing, which covers constant
//! (Dirichlet-type) boundary functions.

use crate::error::{Error, Result};
use crate::pl::PLFunction;

pub(crate) fn check_hamiltonian(h: &PLFunction) -> Result<()> {
    if h.is_coercive() {
        Ok(())
    } else {
        Err(Error::InvalidHamiltonian(format!(
            "{h} is not coercive (need slope_left < 0 < slope_right)"
        )))
    }
}

pub(crate) fn check_boundary(f0: &PLFunction) -> Result<()> {
    if f0.is_nonincreasing() {
        Ok(())
    } else {
        Err(Error::InvalidBoundary(format!(
            "{f0} is not non-increasing"
        )))
    }
}

fn check(h: &PLFunction, f0: &PLFunction) -> Result<()> {
    check_hamiltonian(h)?;
    check_boundary(f0)
}

/// `p -> sup over [p, +inf) of min(F0, H)`.
pub fn sub_relax(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    check(h, f0)?;
    f0.min(h).running_sup_right()
}

/// `p -> inf over (-inf, p] of max(F0, H)`.
pub fn super_relax(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    check(h, f0)?;
    f0.max(h).running_inf_left()
}

/// The relaxation operator, assembled piecewise on `{F0 >= H}` and `{F0 <= H}`.
///
/// Debug builds also compute `super(sub(F0))` and `sub(super(F0))` and fail
/// with [`Error::InternalMismatch`] if the three disagree.
pub fn relax(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    if cfg!(debug_assertions) {
        relax_checked(h, f0)
    } else {
        relax_piecewise(h, f0)
    }
}

/// Piecewise assembly only.
pub fn relax_piecewise(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    let lower = sub_relax(h, f0)?;
    let upper = super_relax(h, f0)?;
    // The selection only switches where F0 - H changes sign, and both
    // branches agree with F0 = H there.
    let candidates = lower
        .abscissas()
        .chain(upper.abscissas())
        .cloned()
        .chain(f0.sub(h).roots());
    Ok(PLFunction::from_pointwise(candidates, |p| {
        if f0.eval(p) >= h.eval(p) {
            lower.eval(p)
        } else {
            upper.eval(p)
        }
    }))
}

/// All three constructions, cross-checked.
pub fn relax_checked(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    let piecewise = relax_piecewise(h, f0)?;
    let super_of_sub = super_relax(h, &sub_relax(h, f0)?)?;
    let sub_of_super = sub_relax(h, &super_relax(h, f0)?)?;
    if piecewise != super_of_sub || piecewise != sub_of_super {
        return Err(Error::InternalMismatch(format!(
            "relax of {f0} under {h}: piecewise {piecewise}, super(sub) {super_of_sub}, sub(super) {sub_of_super}"
        )));
    }
    Ok(piecewise)
}

/// `H_-(p) = inf over (-inf, p] of H`, the minimal self-relaxed boundary function.
pub fn lower_envelope(h: &PLFunction) -> Result<PLFunction> {
    check_hamiltonian(h)?;
    h.running_inf_left()
}

/// `max(F0, H_-)`: same relaxation as `F0`, and always semi-coercive.
pub fn semicoercive_envelope(h: &PLFunction, f0: &PLFunction) -> Result<PLFunction> {
    Ok(f0.max(&lower_envelope(h)?))
}

/// What to do with a boundary function that is not semi-coercive before a
/// construction that needs semi-coercivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnvelopePolicy {
    /// Replace `F0` by `max(F0, H_-)`, which has the same relaxation.
    #[default]
    Upgrade,
    /// Fail with [`Error::NotSemiCoercive`].
    Strict,
}

/// Validates `(H, F0)` and returns the semi-coercive boundary function to use.
pub fn prepare_boundary(
    h: &PLFunction,
    f0: &PLFunction,
    policy: EnvelopePolicy,
) -> Result<PLFunction> {
    check(h, f0)?;
    if f0.is_semicoercive() {
        return Ok(f0.clone());
    }
    match policy {
        EnvelopePolicy::Upgrade => semicoercive_envelope(h, f0),
        EnvelopePolicy::Strict => Err(Error::NotSemiCoercive),
    }
}
