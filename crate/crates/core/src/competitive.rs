//! Runtime competitiveness of a slow high-fidelity device (type A) against a
//! fast low-fidelity one (type B) over a grid of scalabilities.
//!
//! Both devices run the same space-time volume `V`. Type A may spread it
//! over more logical qubits `k_A ≥ k_B`, cutting its tock count to `V/k_A`.
//! The runtime ratio is `T_A/T_B = (t_A/t_B)·(d_A/d_B)·(k_B/k_A)`, and a cell
//! is competitive when some `k_A` brings it to at most `band.hi`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::codes::{select_ldpc_code, LdpcFamily, SurfaceCodeParams};
use crate::estimator::{solve_distance_scan, ProblemResources};
use crate::scalability::{HardwareArchetype, ScalabilityModel};

/// Target window for `T_A/T_B`. Ratios below `lo` still count as
/// competitive; only `hi` gates the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPolicy {
    lo: f64,
    hi: f64,
}

impl Default for BandPolicy {
    fn default() -> Self {
        Self { lo: 1.0, hi: 10.0 }
    }
}

impl BandPolicy {
    pub fn new(lo: f64, hi: f64) -> Result<Self, String> {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(format!("band needs 0 < lo <= hi, got {lo}:{hi}"));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Evenly spaced scalability axis `lo, lo+step, …, ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self, String> {
        if !(lo > 0.0 && lo <= hi && step > 0.0 && hi.is_finite()) {
            return Err(format!("grid needs 0 < lo <= hi and step > 0, got {lo}:{hi}:{step}"));
        }
        Ok(Self { lo, hi, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            lo: 1.0,
            hi: 100.0,
            step: 1.0,
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:step, got `{s}`"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
        Grid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellStatus {
    Competitive,
    /// No type B distance up to the cap meets the budget.
    TypeBInfeasible,
    /// Type B works, but no `k_A ≤ k_max` reaches the band.
    TypeANotCompetitive,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Competitive => "Competitive",
            CellStatus::TypeBInfeasible => "TypeB_Infeasible",
            CellStatus::TypeANotCompetitive => "TypeA_NotCompetitive",
        }
    }
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompetitiveCell {
    pub s_a: f64,
    pub s_b: f64,
    pub status: CellStatus,
    pub k_a: Option<u64>,
    pub k_ratio: Option<f64>,
    pub time_ratio: Option<f64>,
    pub d_a: Option<u32>,
    pub d_b: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdpcCell {
    pub surface: CompetitiveCell,
    pub code: Option<String>,
    pub d_circ: Option<u32>,
    pub improvement: Option<f64>,
}

/// LDPC runtime gain for type A at a fixed logical-qubit count.
#[derive(Debug, Clone, PartialEq)]
pub struct LdpcImprovement {
    pub code: String,
    pub d_circ: u32,
    pub surface_distance: u32,
    pub n_phys: u64,
    pub improvement: f64,
}

/// Fixed inputs of a competitiveness study.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitiveSetup {
    pub type_a: HardwareArchetype,
    pub type_b: HardwareArchetype,
    pub surface: SurfaceCodeParams,
    pub volume: f64,
    pub k_b: u64,
    pub band: BandPolicy,
    pub k_max: u64,
}

impl CompetitiveSetup {
    /// Default archetypes and surface code with `k_max = 10⁶·k_B`.
    pub fn new(volume: f64, k_b: u64) -> Self {
        Self {
            type_a: HardwareArchetype::type_a(),
            type_b: HardwareArchetype::type_b(),
            surface: SurfaceCodeParams::default(),
            volume,
            k_b,
            band: BandPolicy::default(),
            k_max: k_b.saturating_mul(1_000_000),
        }
    }

    /// Surface distance for `k` logical qubits at power-law scalability `s`.
    pub fn distance(&self, arch: &HardwareArchetype, s: f64, k: u64) -> Option<u32> {
        let res = ProblemResources::new(k, self.volume).ok()?;
        let model = ScalabilityModel::power_law(s).ok()?;
        solve_distance_scan(&res, arch, &model, &self.surface)
    }

    /// `(t_A/t_B)·(d_A/d_B)·(k_B/k_A)`.
    pub fn ratio_from(&self, d_a: u32, d_b: u32, k_a: u64, k_b: u64) -> f64 {
        (self.type_a.gate_time() / self.type_b.gate_time()) * (d_a as f64 / d_b as f64) * (k_b as f64 / k_a as f64)
    }

    /// `T_A/T_B` with both distances solved; `None` if either is infeasible.
    pub fn time_ratio_surface(&self, s_a: f64, s_b: f64, k_a: u64, k_b: u64) -> Option<f64> {
        let d_a = self.distance(&self.type_a, s_a, k_a)?;
        let d_b = self.distance(&self.type_b, s_b, k_b)?;
        Some(self.ratio_from(d_a, d_b, k_a, k_b))
    }

    /// Smallest `k_A ∈ [k_B, k_max]` with `T_A/T_B ≤ band.hi`.
    pub fn find_min_ka(&self, s_a: f64, s_b: f64) -> Option<u64> {
        let d_b = self.distance(&self.type_b, s_b, self.k_b)?;
        self.min_ka_given(s_a, d_b).map(|(k, _)| k)
    }

    /// Search with `d_B` already known, returning `(k_A, d_A)`.
    ///
    /// `d_A(k)` is non-decreasing in `k`, so the ratio only falls while the
    /// distance holds. At distance `d` the smallest admissible `k` is
    /// `⌈(t_A/t_B)·d·k_B/(hi·d_B)⌉`; every `k` before it fails. Jump there and
    /// stop if the distance did not grow, otherwise repeat with the new
    /// distance. Each step either returns or raises `d`, so the loop ends
    /// after at most `d_max` probes.
    fn min_ka_given(&self, s_a: f64, d_b: u32) -> Option<(u64, u32)> {
        let hi = self.band.hi;
        let passes = |d: u32, k: u64| self.ratio_from(d, d_b, k, self.k_b) <= hi;
        let mut k = self.k_b;
        let mut d = self.distance(&self.type_a, s_a, k)?;
        loop {
            if passes(d, k) {
                return Some((k, d));
            }
            let gate_ratio = self.type_a.gate_time() / self.type_b.gate_time();
            let estimate = (gate_ratio * d as f64 * self.k_b as f64 / (hi * d_b as f64)).ceil();
            if !(estimate <= self.k_max as f64) {
                return None;
            }
            let mut next = (estimate as u64).max(k + 1);
            while next > k + 1 && passes(d, next - 1) {
                next -= 1;
            }
            while !passes(d, next) {
                next += 1;
            }
            if next > self.k_max {
                return None;
            }
            let d_next = self.distance(&self.type_a, s_a, next)?;
            if d_next == d {
                return Some((next, d));
            }
            k = next;
            d = d_next;
        }
    }

    fn cell(&self, s_a: f64, s_b: f64, d_b: Option<u32>) -> CompetitiveCell {
        let mut cell = CompetitiveCell {
            s_a,
            s_b,
            status: CellStatus::TypeBInfeasible,
            k_a: None,
            k_ratio: None,
            time_ratio: None,
            d_a: None,
            d_b,
        };
        let Some(d_b) = d_b else {
            return cell;
        };
        match self.min_ka_given(s_a, d_b) {
            None => cell.status = CellStatus::TypeANotCompetitive,
            Some((k_a, d_a)) => {
                cell.status = CellStatus::Competitive;
                cell.k_a = Some(k_a);
                cell.k_ratio = Some(k_a as f64 / self.k_b as f64);
                cell.time_ratio = Some(self.ratio_from(d_a, d_b, k_a, self.k_b));
                cell.d_a = Some(d_a);
            }
        }
        cell
    }

    /// Evaluates a single `(s_A, s_B)` pair.
    pub fn evaluate(&self, s_a: f64, s_b: f64) -> CompetitiveCell {
        let d_b = self.distance(&self.type_b, s_b, self.k_b);
        self.cell(s_a, s_b, d_b)
    }

    /// One cell per `(s_A, s_B)`, ordered by `s_A` then `s_B`.
    pub fn scan_surface(&self, grid_a: &[f64], grid_b: &[f64]) -> Vec<CompetitiveCell> {
        let d_b: Vec<Option<u32>> = grid_b
            .par_iter()
            .map(|&s_b| self.distance(&self.type_b, s_b, self.k_b))
            .collect();
        grid_a
            .par_iter()
            .flat_map_iter(|&s_a| grid_b.iter().zip(&d_b).map(move |(&s_b, &d_b)| (s_a, s_b, d_b)))
            .map(|(s_a, s_b, d_b)| self.cell(s_a, s_b, d_b))
            .collect()
    }

    /// `T_A^{surface}/T_A^{LDPC}` for type A at `held_ka` logical qubits.
    pub fn ldpc_improvement(&self, s_a: f64, held_ka: u64, family: &LdpcFamily) -> Option<LdpcImprovement> {
        let res = ProblemResources::new(held_ka, self.volume).ok()?;
        let model = ScalabilityModel::power_law(s_a).ok()?;
        let d_a = solve_distance_scan(&res, &self.type_a, &model, &self.surface)?;
        let sel = select_ldpc_code(family, 1.0 / self.volume, held_ka, |n| {
            self.type_a.error_rate(&model, n).ok()
        })?;
        // Both runtimes share the gate time and tock count, leaving d_A/d_circ.
        Some(LdpcImprovement {
            code: sel.code.label.clone(),
            d_circ: sel.code.d_circ,
            surface_distance: d_a,
            n_phys: sel.n_phys,
            improvement: d_a as f64 / sel.code.d_circ as f64,
        })
    }

    /// Surface scan followed by the LDPC evaluation at each cell's `k_A`.
    /// Cells without a surface-code `k_A` carry no improvement.
    pub fn scan_ldpc(&self, grid_a: &[f64], grid_b: &[f64], family: &LdpcFamily) -> Vec<LdpcCell> {
        self.scan_surface(grid_a, grid_b)
            .into_par_iter()
            .map(|surface| {
                let gain = surface.k_a.and_then(|k| self.ldpc_improvement(surface.s_a, k, family));
                LdpcCell {
                    code: gain.as_ref().map(|g| g.code.clone()),
                    d_circ: gain.as_ref().map(|g| g.d_circ),
                    improvement: gain.map(|g| g.improvement),
                    surface,
                }
            })
            .collect()
    }
}
