//! Code-distance solving and physical resource estimates under a
//! scalability model.
//!
//! A workload is a logical-qubit count `k` and a space-time volume `V`
//! (logical qubits × tocks). Every unit of volume may fail with the logical
//! error rate, so a code is feasible when `p_L ≤ 1/V`. For the surface code
//! the physical error rate depends on the layout size `n = 2(d+1)²k`, which
//! makes `p_L` non-monotone in `d`; the scan therefore tests every distance
//! up to the cap and returns the smallest one that fits.
//!
//! Under the power law the equality `O·(p0·n^{1/s}/p_th)^{(d+1)/2} = 1/V`
//! rearranges to `b = (a·d')^{d'}` with `d' = d + 1`,
//! `a = sqrt(2k·(p0/p_th)^s)` and `b = (V·O)^{-s}`, whose roots are
//! `d' = ln b / W(a·ln b)`. The `W₋₁` branch gives the lower crossing (the
//! minimal distance), `W₀` the upper one where the growing device pushes the
//! rate back over budget.

use thiserror::Error;

use crate::codes::{ldpc_physical_qubits, select_ldpc_code, surface_physical_qubits, LdpcFamily, SurfaceCodeParams};
use crate::numerics::{self, bisect_threshold, Branch, NumericsError, BRANCH_POINT_SNAP, INV_E};
use crate::scalability::{HardwareArchetype, ModelKind, ScalabilityModel};

/// Relative slack on `ln(1/V)` in the feasibility test, so that workloads
/// sitting exactly on the budget (e.g. `0.1·0.01^{4.5} = 1e-10`) are not
/// rejected by round-off.
pub const FEASIBILITY_REL_TOL: f64 = 1e-12;

pub const DEFAULT_S_LO: f64 = 0.5;
pub const DEFAULT_S_HI: f64 = 1e4;
pub const DEFAULT_S_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("invalid workload: {0}")]
    InvalidResources(String),
    #[error("no real distance: a·ln(b) = {argument} lies below -1/e")]
    NoRealSolution { argument: f64 },
    #[error("degenerate volume: V·O = {product} must exceed 1")]
    DegenerateVolume { product: f64 },
    #[error("minimum scalability needs a finite-scalability model, got {0}")]
    InfiniteModel(ModelKind),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Logical workload: `k` logical qubits running for `V/k` tocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemResources {
    k: u64,
    volume: f64,
}

impl ProblemResources {
    pub fn new(k: u64, volume: f64) -> Result<Self, EstimateError> {
        if k == 0 {
            return Err(EstimateError::InvalidResources("k must be at least 1".into()));
        }
        if !(volume.is_finite() && volume >= k as f64) {
            return Err(EstimateError::InvalidResources(format!(
                "volume must be finite and at least k (V = {volume}, k = {k})"
            )));
        }
        Ok(Self { k, volume })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Logical time steps `t_L = V/k`.
    pub fn tocks(&self) -> f64 {
        self.volume / self.k as f64
    }

    /// Same volume redistributed over `k` logical qubits.
    pub fn with_k(&self, k: u64) -> Result<Self, EstimateError> {
        Self::new(k, self.volume)
    }
}

/// Whether a logical error rate (given as its logarithm) fits the `1/V` budget.
pub fn within_budget(ln_p_logical: f64, volume: f64) -> bool {
    let ln_budget = -volume.ln();
    ln_p_logical <= ln_budget + FEASIBILITY_REL_TOL * ln_budget.abs().max(1.0)
}

/// The error-correction scheme used for an estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum CodeChoice {
    Surface(SurfaceCodeParams),
    Ldpc(LdpcFamily),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Protection {
    Surface { distance: u32 },
    Ldpc { label: String, d_circ: u32 },
}

impl Protection {
    /// Error-correction rounds per logical time step.
    pub fn rounds_per_tock(&self) -> u32 {
        match self {
            Protection::Surface { distance } => *distance,
            Protection::Ldpc { d_circ, .. } => *d_circ,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceEstimate {
    pub protection: Protection,
    pub n_phys: u64,
    pub p_phys: f64,
    pub p_logical: f64,
    pub tocks: f64,
    pub cycles: f64,
    pub runtime_seconds: f64,
    pub spacetime_volume_phys: f64,
}

/// Surface-code operating point at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub distance: u32,
    pub n_phys: u64,
    pub p_phys: f64,
    pub ln_p_logical: f64,
}

/// Evaluates distance `d`; `None` if the device saturates at that size.
pub fn surface_point(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    model: &ScalabilityModel,
    sc: &SurfaceCodeParams,
    d: u32,
) -> Option<SurfacePoint> {
    let n_phys = surface_physical_qubits(d, res.k);
    let p_phys = arch.error_rate(model, n_phys).ok()?;
    Some(SurfacePoint {
        distance: d,
        n_phys,
        p_phys,
        ln_p_logical: sc.ln_logical_error_rate(p_phys, d),
    })
}

fn surface_feasible(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    model: &ScalabilityModel,
    sc: &SurfaceCodeParams,
    d: u32,
) -> Option<SurfacePoint> {
    surface_point(res, arch, model, sc, d).filter(|pt| within_budget(pt.ln_p_logical, res.volume))
}

/// Smallest surface-code distance in `[1, d_max]` meeting the `1/V` budget.
pub fn solve_distance_scan(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    model: &ScalabilityModel,
    sc: &SurfaceCodeParams,
) -> Option<u32> {
    (1..=sc.d_max()).find(|&d| surface_feasible(res, arch, model, sc, d).is_some())
}

/// `(ln a, ln b)` of the power-law distance equation.
fn closed_form_logs(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    s: f64,
    sc: &SurfaceCodeParams,
) -> Result<(f64, f64), EstimateError> {
    let vo = res.volume * sc.overhead();
    if !(vo > 1.0) {
        return Err(EstimateError::DegenerateVolume { product: vo });
    }
    if !(s > 0.0) {
        return Err(EstimateError::InvalidResources(format!(
            "scalability must be positive, got {s}"
        )));
    }
    let ln_a = 0.5 * ((2.0 * res.k as f64).ln() + s * (arch.p0() / sc.threshold()).ln());
    let ln_b = -s * vo.ln();
    Ok((ln_a, ln_b))
}

/// Root `d'` of `b = (a·d')^{d'}` given `ln a` and `ln b < 0`.
pub fn continuous_root(ln_a: f64, ln_b: f64, branch: Branch) -> Result<f64, EstimateError> {
    debug_assert!(ln_b < 0.0);
    // a·ln(b), formed from logs so that tiny `a` does not underflow early
    let argument = -(ln_a + (-ln_b).ln()).exp();
    if argument < -INV_E - BRANCH_POINT_SNAP {
        return Err(EstimateError::NoRealSolution { argument });
    }
    if argument == 0.0 {
        return Ok(match branch {
            Branch::Secondary => 0.0,
            Branch::Principal => f64::INFINITY,
        });
    }
    let w = numerics::lambert_w(argument, branch)?;
    Ok(ln_b / w)
}

/// Continuous distance `d' - 1` at the budget equality under the power law.
/// `Branch::Secondary` gives the minimal distance, `Branch::Principal` the
/// upper crossing.
pub fn solve_distance_closed_form(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    s: f64,
    sc: &SurfaceCodeParams,
    branch: Branch,
) -> Result<f64, EstimateError> {
    let (ln_a, ln_b) = closed_form_logs(res, arch, s, sc)?;
    Ok(continuous_root(ln_a, ln_b, branch)? - 1.0)
}

/// Integer distance from the closed form: `max(1, ⌈d'⌉ - 1)`, verified
/// against the budget and nudged by one in either direction.
/// `Ok(None)` means no distance in `[1, d_max]` fits.
pub fn distance_from_closed_form(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    s: f64,
    sc: &SurfaceCodeParams,
) -> Result<Option<u32>, EstimateError> {
    let d_prime = match solve_distance_closed_form(res, arch, s, sc, Branch::Secondary) {
        Ok(d) => d + 1.0,
        Err(EstimateError::NoRealSolution { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let candidate = (d_prime.ceil() - 1.0).max(1.0);
    if candidate > sc.d_max() as f64 + 1.0 {
        return Ok(None);
    }
    let model = ScalabilityModel::PowerLaw { s };
    let candidate = candidate as u32;
    Ok([candidate.saturating_sub(1), candidate, candidate + 1]
        .into_iter()
        .filter(|&d| d >= 1 && d <= sc.d_max())
        .find(|&d| surface_feasible(res, arch, &model, sc, d).is_some()))
}

fn finish(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    protection: Protection,
    n_phys: u64,
    p_phys: f64,
    p_logical: f64,
) -> ResourceEstimate {
    let tocks = res.tocks();
    let cycles = tocks * protection.rounds_per_tock() as f64;
    let runtime_seconds = arch.gate_time() * cycles;
    ResourceEstimate {
        protection,
        n_phys,
        p_phys,
        p_logical,
        tocks,
        cycles,
        runtime_seconds,
        spacetime_volume_phys: runtime_seconds * n_phys as f64,
    }
}

/// Full resource estimate, or `None` if no distance (or family member)
/// meets the budget.
pub fn estimate_resources(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    model: &ScalabilityModel,
    code: &CodeChoice,
) -> Option<ResourceEstimate> {
    match code {
        CodeChoice::Surface(sc) => {
            let d = solve_distance_scan(res, arch, model, sc)?;
            let pt = surface_point(res, arch, model, sc, d)?;
            Some(finish(
                res,
                arch,
                Protection::Surface { distance: d },
                pt.n_phys,
                pt.p_phys,
                pt.ln_p_logical.exp(),
            ))
        }
        CodeChoice::Ldpc(family) => {
            let sel = select_ldpc_code(family, 1.0 / res.volume, res.k, |n| arch.error_rate(model, n).ok())?;
            debug_assert_eq!(sel.n_phys, ldpc_physical_qubits(sel.code, res.k));
            Some(finish(
                res,
                arch,
                Protection::Ldpc {
                    label: sel.code.label.clone(),
                    d_circ: sel.code.d_circ,
                },
                sel.n_phys,
                sel.p_phys,
                sel.p_logical,
            ))
        }
    }
}

/// Smallest scalability at which the workload becomes feasible, found by
/// bisection on `[s_lo, s_hi]` to within `tol`. The returned value is
/// feasible.
pub fn min_scalability(
    res: &ProblemResources,
    arch: &HardwareArchetype,
    kind: ModelKind,
    code: &CodeChoice,
    s_lo: f64,
    s_hi: f64,
    tol: f64,
) -> Result<f64, EstimateError> {
    if kind == ModelKind::Infinite {
        return Err(EstimateError::InfiniteModel(kind));
    }
    let feasible = |s: f64| {
        kind.with_scalability(s)
            .map(|model| estimate_resources(res, arch, &model, code).is_some())
            .unwrap_or(false)
    };
    Ok(bisect_threshold(feasible, s_lo, s_hi, tol)?)
}

/// Physical space-time volume: runtime × physical qubits.
pub fn spacetime_volume_total(est: &ResourceEstimate) -> f64 {
    est.runtime_seconds * est.n_phys as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::LdpcCodeSpec;

    fn canonical() -> ProblemResources {
        ProblemResources::new(1000, 1e10).unwrap()
    }

    fn surface() -> CodeChoice {
        CodeChoice::Surface(SurfaceCodeParams::default())
    }

    #[test]
    fn workload_validation() {
        assert!(ProblemResources::new(0, 10.0).is_err());
        assert!(ProblemResources::new(10, 5.0).is_err());
        assert!(ProblemResources::new(10, f64::INFINITY).is_err());
        assert_eq!(canonical().tocks(), 1e7);
    }

    #[test]
    fn threshold_device_is_never_feasible() {
        let res = ProblemResources::new(1, 100.0).unwrap();
        let arch = HardwareArchetype::new("th", 0.01, 1e-6).unwrap();
        let sc = SurfaceCodeParams::default();
        assert_eq!(solve_distance_scan(&res, &arch, &ScalabilityModel::Infinite, &sc), None);
    }

    #[test]
    fn infinite_scalability_ladder() {
        // 0.1·(0.01)^{(d+1)/2} <= 1e-10 first holds at d = 8 (equality)
        let sc = SurfaceCodeParams::default();
        let d = solve_distance_scan(
            &canonical(),
            &HardwareArchetype::type_a(),
            &ScalabilityModel::Infinite,
            &sc,
        );
        assert_eq!(d, Some(8));
        // 0.1·(0.1)^{(d+1)/2} <= 1e-10 first holds at d = 17
        let d = solve_distance_scan(
            &canonical(),
            &HardwareArchetype::type_b(),
            &ScalabilityModel::Infinite,
            &sc,
        );
        assert_eq!(d, Some(17));
    }

    #[test]
    fn type_b_infinite_estimate() {
        let est = estimate_resources(
            &canonical(),
            &HardwareArchetype::type_b(),
            &ScalabilityModel::Infinite,
            &surface(),
        )
        .unwrap();
        assert_eq!(est.protection, Protection::Surface { distance: 17 });
        assert_eq!(est.n_phys, 648_000);
        assert!((est.runtime_seconds - 17.0).abs() < 1e-9);
        assert!((spacetime_volume_total(&est) - 1.1016e7).abs() < 1e-3);
        assert_eq!(est.tocks, 1e7);
        assert_eq!(est.cycles, 1.7e8);
    }

    #[test]
    fn type_a_infinite_estimate() {
        let est = estimate_resources(
            &canonical(),
            &HardwareArchetype::type_a(),
            &ScalabilityModel::Infinite,
            &surface(),
        )
        .unwrap();
        assert_eq!(est.protection, Protection::Surface { distance: 8 });
        assert!((est.runtime_seconds - 8000.0).abs() < 1e-9);
        assert!(est.p_logical <= 1e-10 * (1.0 + 1e-9));
    }

    #[test]
    fn doubling_k_at_fixed_distance() {
        let arch = HardwareArchetype::type_b();
        let one = estimate_resources(&canonical(), &arch, &ScalabilityModel::Infinite, &surface()).unwrap();
        let two = estimate_resources(
            &canonical().with_k(2000).unwrap(),
            &arch,
            &ScalabilityModel::Infinite,
            &surface(),
        )
        .unwrap();
        // infinite model: the distance does not depend on k
        assert_eq!(one.protection, two.protection);
        assert_eq!(two.n_phys, 2 * one.n_phys);
        assert_eq!(two.tocks, 0.5 * one.tocks);
        assert!((spacetime_volume_total(&two) / spacetime_volume_total(&one) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_at_branch_point() {
        // a·ln b = -1/e with ln b = -10 and a = 1/(10e)
        let ln_b = -10.0;
        let ln_a = -(10.0f64.ln() + 1.0);
        for branch in [Branch::Principal, Branch::Secondary] {
            let d = continuous_root(ln_a, ln_b, branch).unwrap();
            assert!((d - 10.0).abs() < 1e-6, "{d}");
        }
    }

    #[test]
    fn closed_form_errors() {
        assert!(matches!(
            continuous_root(0.0, -10.0, Branch::Secondary),
            Err(EstimateError::NoRealSolution { .. })
        ));
        let tiny = ProblemResources::new(1, 5.0).unwrap();
        assert!(matches!(
            solve_distance_closed_form(
                &tiny,
                &HardwareArchetype::type_a(),
                10.0,
                &SurfaceCodeParams::default(),
                Branch::Secondary
            ),
            Err(EstimateError::DegenerateVolume { .. })
        ));
    }

    #[test]
    fn closed_form_roots_bracket_scan() {
        let sc = SurfaceCodeParams::default();
        let arch = HardwareArchetype::type_a();
        let lo = solve_distance_closed_form(&canonical(), &arch, 10.0, &sc, Branch::Secondary).unwrap();
        let hi = solve_distance_closed_form(&canonical(), &arch, 10.0, &sc, Branch::Principal).unwrap();
        assert!(lo < hi);
        let scan = solve_distance_scan(&canonical(), &arch, &ScalabilityModel::PowerLaw { s: 10.0 }, &sc).unwrap();
        assert!((lo.ceil() as i64 - scan as i64).abs() <= 1, "{lo} vs {scan}");
        assert_eq!(
            distance_from_closed_form(&canonical(), &arch, 10.0, &sc).unwrap(),
            Some(scan)
        );
    }

    #[test]
    fn min_scalability_brackets_feasibility() {
        let arch = HardwareArchetype::type_a();
        let tol = DEFAULT_S_TOL;
        let s_min = min_scalability(
            &canonical(),
            &arch,
            ModelKind::PowerLaw,
            &surface(),
            DEFAULT_S_LO,
            DEFAULT_S_HI,
            tol,
        )
        .unwrap();
        let at = |s| estimate_resources(&canonical(), &arch, &ScalabilityModel::PowerLaw { s }, &surface());
        assert!(at(s_min - 10.0 * tol).is_none());
        assert!(at(s_min + 10.0 * tol).is_some());

        // just below the edge the scan reports infeasibility
        let sc = SurfaceCodeParams::default();
        let below = ScalabilityModel::PowerLaw { s: s_min - 2.0 * tol };
        assert_eq!(solve_distance_scan(&canonical(), &arch, &below, &sc), None);

        let s_min_b = min_scalability(
            &canonical(),
            &HardwareArchetype::type_b(),
            ModelKind::PowerLaw,
            &surface(),
            DEFAULT_S_LO,
            DEFAULT_S_HI,
            tol,
        )
        .unwrap();
        assert!(s_min_b > s_min);
    }

    #[test]
    fn min_scalability_bracket_errors() {
        let arch = HardwareArchetype::type_a();
        assert!(matches!(
            min_scalability(&canonical(), &arch, ModelKind::PowerLaw, &surface(), 50.0, 100.0, 1e-3),
            Err(EstimateError::Numerics(NumericsError::Bracket { .. }))
        ));
        assert!(matches!(
            min_scalability(&canonical(), &arch, ModelKind::Infinite, &surface(), 1.0, 100.0, 1e-3),
            Err(EstimateError::InfiniteModel(_))
        ));
    }

    #[test]
    fn ldpc_estimate_uses_d_circ() {
        let family = LdpcFamily::new(vec![
            LdpcCodeSpec {
                label: "weak".into(),
                n_data: 72,
                k_log: 12,
                d_circ: 3,
                c0: 0.0,
                c1: 0.0,
                c2: 0.0,
            },
            LdpcCodeSpec {
                label: "strong".into(),
                n_data: 144,
                k_log: 12,
                d_circ: 3,
                c0: -15.0,
                c1: 0.0,
                c2: 0.0,
            },
        ])
        .unwrap();
        let arch = HardwareArchetype::type_a();
        let est = estimate_resources(
            &canonical(),
            &arch,
            &ScalabilityModel::Infinite,
            &CodeChoice::Ldpc(family),
        )
        .unwrap();
        assert_eq!(
            est.protection,
            Protection::Ldpc {
                label: "strong".into(),
                d_circ: 3
            }
        );
        assert_eq!(est.n_phys, 2 * 144 * 84);
        assert!((est.runtime_seconds - 1e-4 * 3.0 * 1e7).abs() < 1e-6);
    }
}
