//! Real branches of the Lambert W function and a bisection search for the
//! flip point of a monotone predicate.
//!
//! The distance solver needs both real branches: `W₀` on `[-1/e, ∞)` and
//! `W₋₁` on `[-1/e, 0)`. Both are computed by refining an asymptotic or
//! branch-point initial guess with Halley's method applied to
//! `w - x·e^{-w}`, which stays finite for very small and very large `|x|`.

use std::f64::consts::E;

use thiserror::Error;

/// `1/e`, the magnitude of the branch point.
pub const INV_E: f64 = 0.367_879_441_171_442_33;

/// Arguments this far below `-1/e` are treated as the branch point itself.
pub const BRANCH_POINT_SNAP: f64 = 1e-15;

/// Residual bound `|w·e^w - x| ≤ RESIDUAL_TOL·max(1, |x|)`.
pub const RESIDUAL_TOL: f64 = 1e-12;

const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("lambert W {branch:?} branch is undefined at x = {x}")]
    Domain { x: f64, branch: Branch },
    #[error("invalid bracket [{lo}, {hi}]: {reason}")]
    Bracket { lo: f64, hi: f64, reason: &'static str },
}

/// Real branch of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `W₀`, defined on `[-1/e, ∞)` with values `≥ -1`.
    Principal,
    /// `W₋₁`, defined on `[-1/e, 0)` with values `≤ -1`.
    Secondary,
}

impl Branch {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Branch::Principal => x >= -INV_E && x.is_finite(),
            Branch::Secondary => (-INV_E..0.0).contains(&x),
        }
    }
}

/// Evaluates the Lambert W function on the requested real branch.
///
/// The returned `w` satisfies `w·e^w = x` to within
/// `RESIDUAL_TOL·max(1, |x|)`. Arguments within [`BRANCH_POINT_SNAP`] below
/// `-1/e` are snapped onto the branch point.
pub fn lambert_w(x: f64, branch: Branch) -> Result<f64, NumericsError> {
    if x.is_nan() {
        return Err(NumericsError::Domain { x, branch });
    }
    let x = if (-INV_E - BRANCH_POINT_SNAP..-INV_E).contains(&x) {
        -INV_E
    } else {
        x
    };
    if !branch.contains(x) {
        return Err(NumericsError::Domain { x, branch });
    }
    if x == -INV_E {
        return Ok(-1.0);
    }
    if x == 0.0 {
        // only reachable on the principal branch
        return Ok(0.0);
    }

    let w0 = initial_guess(x, branch);
    let w = halley(x, w0);
    Ok(match branch {
        Branch::Principal => w.max(-1.0),
        Branch::Secondary => w.min(-1.0),
    })
}

fn initial_guess(x: f64, branch: Branch) -> f64 {
    // branch-point expansion in p = sqrt(2(e·x + 1))
    let near_branch_point = x < -0.25;
    match branch {
        Branch::Principal if near_branch_point => {
            let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
            -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
        }
        Branch::Secondary if near_branch_point => {
            let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
            -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
        }
        Branch::Principal if x <= E => {
            let l = x.ln_1p();
            l * (1.0 - l.ln_1p() / (2.0 + l))
        }
        Branch::Principal => {
            let l1 = x.ln();
            let l2 = l1.ln();
            l1 - l2 + l2 / l1
        }
        Branch::Secondary => {
            let l1 = (-x).ln();
            let l2 = (-l1).ln();
            l1 - l2 + l2 / l1
        }
    }
}

/// Halley iteration on `f(w) = w - x·e^{-w}`.
fn halley(x: f64, mut w: f64) -> f64 {
    let ln_abs_x = x.abs().ln();
    let sign = x.signum();
    for _ in 0..MAX_ITERATIONS {
        // z = x·e^{-w}, formed in log space so neither factor overflows
        let z = sign * (ln_abs_x - w).exp();
        let f = w - z;
        let df = 1.0 + z;
        let d2f = -z;
        let denom = 2.0 * df * df - f * d2f;
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = 2.0 * f * df / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// `|w·e^w - x|`, the quantity bounded by the Lambert W contract.
pub fn lambert_residual(w: f64, x: f64) -> f64 {
    (w * w.exp() - x).abs()
}

/// Narrows `[lo, hi]` around the point where a monotone predicate flips
/// from `false` to `true`, returning the final bracket `(lo, hi)` with
/// `predicate(lo) == false`, `predicate(hi) == true` and `hi - lo <= tol`
/// (or the bracket can no longer be split in `f64`).
pub fn bisect_bracket<P>(mut predicate: P, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64), NumericsError>
where
    P: FnMut(f64) -> bool,
{
    if !(tol > 0.0) {
        return Err(NumericsError::Bracket {
            lo,
            hi,
            reason: "tolerance must be positive",
        });
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::Bracket {
            lo,
            hi,
            reason: "need finite lo < hi",
        });
    }
    if predicate(lo) {
        return Err(NumericsError::Bracket {
            lo,
            hi,
            reason: "predicate already true at lo",
        });
    }
    if !predicate(hi) {
        return Err(NumericsError::Bracket {
            lo,
            hi,
            reason: "predicate false at hi",
        });
    }
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if predicate(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Returns a point within `tol` of `inf{y : predicate(y)}` on `[lo, hi]`.
/// The returned point always satisfies the predicate.
pub fn bisect_threshold<P>(predicate: P, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    P: FnMut(f64) -> bool,
{
    bisect_bracket(predicate, lo, hi, tol).map(|(_, hi)| hi)
}
