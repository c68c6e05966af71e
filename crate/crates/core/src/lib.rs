//! Fault-tolerant resource estimation under finite hardware scalability.
//!
//! Physical error rates grow with device size according to a scalability
//! law; this crate solves the resulting code distances, physical qubit
//! counts and runtimes, finds the minimum scalability a workload needs, and
//! maps where a slow high-fidelity device can match a fast low-fidelity one
//! in runtime under surface-code or LDPC protection.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod codes;
pub mod competitive;
pub mod estimator;
pub mod numerics;
pub mod scalability;

pub use catalog::{canonical_instance, load_catalog, InstanceRecord};
pub use codes::{LdpcCodeSpec, LdpcFamily, SurfaceCodeParams};
pub use competitive::{BandPolicy, CellStatus, CompetitiveCell, CompetitiveSetup, Grid};
pub use estimator::{
    estimate_resources, min_scalability, solve_distance_closed_form, solve_distance_scan, CodeChoice, ProblemResources,
    ResourceEstimate,
};
pub use numerics::{bisect_threshold, lambert_w, Branch};
pub use scalability::{HardwareArchetype, ModelKind, ScalabilityModel};
