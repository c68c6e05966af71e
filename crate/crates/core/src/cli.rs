//! Batch command-line front end. Every command writes one CSV table with a
//! single header row, either to `--out` or to stdout.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::catalog::{self, InstanceRecord};
use crate::codes::{LdpcFamily, SurfaceCodeParams};
use crate::competitive::{BandPolicy, CompetitiveSetup, Grid};
use crate::estimator::{estimate_resources, min_scalability, CodeChoice, EstimateError, Protection, DEFAULT_S_TOL};
use crate::numerics::NumericsError;
use crate::scalability::{HardwareArchetype, ModelKind};

/// Reference catalog shipped with the crate, used when `--catalog` is absent.
pub const BUILTIN_CATALOG: &str = include_str!("../data/catalog.toml");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{stage}: {message}")]
    Input { stage: &'static str, message: String },
    #[error("{stage}: numeric failure: {message}")]
    Numeric { stage: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input { .. } => 2,
            CliError::Numeric { .. } => 3,
        }
    }

    fn input(stage: &'static str, e: impl ToString) -> Self {
        CliError::Input {
            stage,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ftqc-scaling",
    version,
    about = "Fault-tolerant resource estimation under finite scalability"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resource estimate per (instance, archetype, model).
    Estimate(EstimateArgs),
    /// Minimum scalability per (instance, archetype, model).
    MinScalability(MinScalabilityArgs),
    /// Surface-code competitiveness heatmap over (s_A, s_B).
    ScanCompetitive(ScanArgs),
    /// LDPC improvement heatmap at the surface-code k_A of each cell.
    ScanLdpc(ScanArgs),
    /// Validate a catalog file and report each record.
    CatalogValidate(CatalogArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArchetypeArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    Custom,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Infinite,
    Power,
    Log,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Infinite => ModelKind::Infinite,
            ModelArg::Power => ModelKind::PowerLaw,
            ModelArg::Log => ModelKind::Logarithmic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeArg {
    Surface,
    Ldpc,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Instance id(s), comma separated, or `all`.
    #[arg(long, default_value = "14_in", value_delimiter = ',')]
    pub instance: Vec<String>,
    /// Catalog file; the built-in reference catalog when omitted.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeviceArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub archetype: ArchetypeArg,
    /// Base error rate (required for `custom`, overrides A or B).
    #[arg(long)]
    pub p0: Option<f64>,
    /// Gate time in seconds (required for `custom`, overrides A or B).
    #[arg(long)]
    pub gate_time: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long, value_enum, default_value = "surface")]
    pub code: CodeArg,
    #[arg(long)]
    pub ldpc_family: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    pub p_th: f64,
    #[arg(long, default_value_t = 0.1)]
    pub overhead: f64,
    #[arg(long, default_value_t = 100)]
    pub d_max: u32,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value = "infinite", value_delimiter = ',')]
    pub model: Vec<ModelArg>,
    /// Scalability value(s) for finite models, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MinScalabilityArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value = "power,log", value_delimiter = ',')]
    pub model: Vec<ModelArg>,
    /// Bisection bracket `lo:hi` for s.
    #[arg(long, default_value = "0.5:10000")]
    pub s_range: String,
    #[arg(long, default_value_t = DEFAULT_S_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Instance supplying the volume V (and k_B unless `--k-b` is given).
    #[arg(long, default_value = "14_in")]
    pub instance: String,
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Grid `lo:hi:step` for both axes.
    #[arg(long, default_value = "1:100:1")]
    pub grid: Grid,
    /// Grid for s_A, overriding `--grid`.
    #[arg(long)]
    pub grid_a: Option<Grid>,
    /// Grid for s_B, overriding `--grid`.
    #[arg(long)]
    pub grid_b: Option<Grid>,
    /// Target band `lo:hi` for T_A/T_B.
    #[arg(long, default_value = "1:10")]
    pub band: String,
    #[arg(long)]
    pub k_b: Option<u64>,
    /// Largest k_A tried; defaults to 10^6·k_B.
    #[arg(long)]
    pub k_max: Option<u64>,
    #[arg(long)]
    pub p0_a: Option<f64>,
    #[arg(long)]
    pub gate_time_a: Option<f64>,
    #[arg(long)]
    pub p0_b: Option<f64>,
    #[arg(long)]
    pub gate_time_b: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub p_th: f64,
    #[arg(long, default_value_t = 0.1)]
    pub overhead: f64,
    #[arg(long, default_value_t = 100)]
    pub d_max: u32,
    /// LDPC family for `scan-ldpc`.
    #[arg(long)]
    pub ldpc_family: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ftqc-scaling: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and writes its table.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let table = render(cli)?;
    let out = match &cli.command {
        Command::Estimate(a) => a.out.as_deref(),
        Command::MinScalability(a) => a.out.as_deref(),
        Command::ScanCompetitive(a) | Command::ScanLdpc(a) => a.out.as_deref(),
        Command::CatalogValidate(a) => a.out.as_deref(),
    };
    emit(out, &table.bytes)?;
    match table.rejected {
        0 => Ok(()),
        n => Err(CliError::Input {
            stage: "catalog-validate",
            message: format!("{n} record(s) rejected"),
        }),
    }
}

/// Rendered CSV plus the count of rejected catalog records, if any.
pub struct Table {
    pub bytes: Vec<u8>,
    pub rejected: usize,
}

pub fn render(cli: &Cli) -> Result<Table, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut rejected = 0;
    match &cli.command {
        Command::Estimate(a) => estimate_table(a, &mut w)?,
        Command::MinScalability(a) => min_scalability_table(a, &mut w)?,
        Command::ScanCompetitive(a) => scan_table(a, false, &mut w)?,
        Command::ScanLdpc(a) => scan_table(a, true, &mut w)?,
        Command::CatalogValidate(a) => rejected = catalog_table(a, &mut w)?,
    }
    let bytes = w.into_inner().map_err(|e| CliError::input("output", e.error()))?;
    Ok(Table { bytes, rejected })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let result = match out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(bytes)),
        None => io::stdout().lock().write_all(bytes),
    };
    result.map_err(|e| CliError::input("output", e))
}

type Csv = csv::Writer<Vec<u8>>;

fn row<I, S>(w: &mut Csv, fields: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(fields).map_err(|e| CliError::input("output", e))
}

/// Shortest round-trip form, in exponent notation for very small or large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("{what} must be lo:hi, got `{text}`")))?;
    let parse = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Usage(format!("{what} `{p}`: {e}")))
    };
    Ok((parse(a)?, parse(b)?))
}

fn load_records(path: Option<&Path>) -> Result<Vec<InstanceRecord>, CliError> {
    match path {
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::input("catalog", format!("{}: {e}", p.display())))?;
            catalog::load_catalog(f).map_err(|e| CliError::input("catalog", e))
        }
        None => catalog::load_catalog(BUILTIN_CATALOG.as_bytes()).map_err(|e| CliError::input("catalog", e)),
    }
}

fn select_instances(records: &[InstanceRecord], ids: &[String]) -> Result<Vec<InstanceRecord>, CliError> {
    if ids.iter().any(|i| i == "all") {
        return Ok(records.to_vec());
    }
    ids.iter()
        .map(|id| {
            records
                .iter()
                .find(|r| &r.instance_id == id)
                .cloned()
                .ok_or_else(|| CliError::input("instance", format!("unknown instance `{id}`")))
        })
        .collect()
}

fn archetypes(d: &DeviceArgs) -> Result<Vec<HardwareArchetype>, CliError> {
    let with = |base: HardwareArchetype| {
        HardwareArchetype::new(
            base.name.clone(),
            d.p0.unwrap_or(base.p0()),
            d.gate_time.unwrap_or(base.gate_time()),
        )
        .map_err(|e| CliError::input("archetype", e))
    };
    match d.archetype {
        ArchetypeArg::A => Ok(vec![with(HardwareArchetype::type_a())?]),
        ArchetypeArg::B => Ok(vec![with(HardwareArchetype::type_b())?]),
        ArchetypeArg::Custom => match (d.p0, d.gate_time) {
            (Some(p0), Some(t)) => Ok(vec![
                HardwareArchetype::new("custom", p0, t).map_err(|e| CliError::input("archetype", e))?
            ]),
            _ => Err(CliError::Usage("--archetype custom needs --p0 and --gate-time".into())),
        },
        ArchetypeArg::All => {
            if d.p0.is_some() || d.gate_time.is_some() {
                return Err(CliError::Usage(
                    "--p0/--gate-time need --archetype A, B or custom".into(),
                ));
            }
            Ok(vec![HardwareArchetype::type_a(), HardwareArchetype::type_b()])
        }
    }
}

fn surface_params(p_th: f64, overhead: f64, d_max: u32) -> Result<SurfaceCodeParams, CliError> {
    SurfaceCodeParams::new(p_th, overhead, d_max).map_err(|e| CliError::input("surface-code", e))
}

fn load_family(path: Option<&Path>) -> Result<LdpcFamily, CliError> {
    let path = path.ok_or_else(|| CliError::Usage("LDPC runs need --ldpc-family <path>".into()))?;
    LdpcFamily::load(path).map_err(|e| CliError::input("ldpc-family", format!("{}: {e}", path.display())))
}

fn code_choice(c: &CodeArgs) -> Result<CodeChoice, CliError> {
    match c.code {
        CodeArg::Surface => Ok(CodeChoice::Surface(surface_params(c.p_th, c.overhead, c.d_max)?)),
        CodeArg::Ldpc => Ok(CodeChoice::Ldpc(load_family(c.ldpc_family.as_deref())?)),
    }
}

fn code_name(c: &CodeChoice) -> &'static str {
    match c {
        CodeChoice::Surface(_) => "surface",
        CodeChoice::Ldpc(_) => "ldpc",
    }
}

fn estimate_table(a: &EstimateArgs, w: &mut Csv) -> Result<(), CliError> {
    let records = load_records(a.instance.catalog.as_deref())?;
    let instances = select_instances(&records, &a.instance.instance)?;
    let archs = archetypes(&a.device)?;
    let code = code_choice(&a.code)?;
    let needs_s = a.model.iter().any(|&m| m != ModelArg::Infinite);
    if needs_s && a.s.is_empty() {
        return Err(CliError::Usage("finite models need --s <value[,value...]>".into()));
    }

    row(
        w,
        [
            "instance",
            "archetype",
            "model",
            "s",
            "code",
            "status",
            "distance",
            "ldpc_code",
            "d_circ",
            "n_phys",
            "p_phys",
            "p_logical",
            "tocks",
            "cycles",
            "runtime_seconds",
            "spacetime_volume_phys",
        ],
    )?;
    for inst in &instances {
        let res = inst.resources();
        for arch in &archs {
            for &m in &a.model {
                let kind = ModelKind::from(m);
                let scalabilities: Vec<Option<f64>> = match kind {
                    ModelKind::Infinite => vec![None],
                    _ => a.s.iter().copied().map(Some).collect(),
                };
                for s in scalabilities {
                    let model = kind
                        .with_scalability(s.unwrap_or(f64::INFINITY))
                        .map_err(|e| CliError::input("model", e))?;
                    let est = estimate_resources(&res, arch, &model, &code);
                    let mut fields = vec![
                        inst.instance_id.clone(),
                        arch.name.clone(),
                        kind.to_string(),
                        opt(s),
                        code_name(&code).to_string(),
                    ];
                    match est {
                        None => {
                            fields.push("infeasible".into());
                            fields.extend(std::iter::repeat_n(String::new(), 10));
                        }
                        Some(e) => {
                            fields.push("feasible".into());
                            match &e.protection {
                                Protection::Surface { distance } => {
                                    fields.extend([distance.to_string(), String::new(), String::new()])
                                }
                                Protection::Ldpc { label, d_circ } => {
                                    fields.extend([String::new(), label.clone(), d_circ.to_string()])
                                }
                            }
                            fields.extend([
                                e.n_phys.to_string(),
                                num(e.p_phys),
                                num(e.p_logical),
                                num(e.tocks),
                                num(e.cycles),
                                num(e.runtime_seconds),
                                num(e.spacetime_volume_phys),
                            ]);
                        }
                    }
                    row(w, &fields)?;
                }
            }
        }
    }
    Ok(())
}

fn min_scalability_table(a: &MinScalabilityArgs, w: &mut Csv) -> Result<(), CliError> {
    let records = load_records(a.instance.catalog.as_deref())?;
    let instances = select_instances(&records, &a.instance.instance)?;
    let archs = archetypes(&a.device)?;
    let code = code_choice(&a.code)?;
    let (s_lo, s_hi) = parse_pair(&a.s_range, "--s-range")?;
    if !(s_lo > 0.0 && s_lo < s_hi && a.tol > 0.0) {
        return Err(CliError::Usage("--s-range needs 0 < lo < hi and --tol > 0".into()));
    }
    if a.model.contains(&ModelArg::Infinite) {
        return Err(CliError::Usage(
            "minimum scalability needs --model power and/or log".into(),
        ));
    }

    row(w, ["instance", "archetype", "model", "code", "s_min", "status"])?;
    for inst in &instances {
        let res = inst.resources();
        for arch in &archs {
            for &m in &a.model {
                let kind = ModelKind::from(m);
                let (s_min, status) = match min_scalability(&res, arch, kind, &code, s_lo, s_hi, a.tol) {
                    Ok(s) => (num(s), "ok"),
                    Err(EstimateError::Numerics(NumericsError::Bracket { reason, .. })) => {
                        let status = if reason.contains("true at lo") {
                            "feasible_at_s_lo"
                        } else {
                            "infeasible_at_s_hi"
                        };
                        (String::new(), status)
                    }
                    Err(e) => {
                        return Err(CliError::Numeric {
                            stage: "min-scalability",
                            message: e.to_string(),
                        });
                    }
                };
                row(
                    w,
                    [
                        inst.instance_id.as_str(),
                        arch.name.as_str(),
                        kind.name(),
                        code_name(&code),
                        s_min.as_str(),
                        status,
                    ],
                )?;
            }
        }
    }
    Ok(())
}

fn scan_setup(a: &ScanArgs) -> Result<CompetitiveSetup, CliError> {
    let records = load_records(a.catalog.as_deref())?;
    let inst = select_instances(&records, std::slice::from_ref(&a.instance))?.remove(0);
    let k_b = a.k_b.unwrap_or(inst.k);
    let mut setup = CompetitiveSetup::new(inst.volume, k_b);
    let device = |base: HardwareArchetype, p0: Option<f64>, t: Option<f64>| {
        HardwareArchetype::new(
            base.name.clone(),
            p0.unwrap_or(base.p0()),
            t.unwrap_or(base.gate_time()),
        )
        .map_err(|e| CliError::input("archetype", e))
    };
    setup.type_a = device(HardwareArchetype::type_a(), a.p0_a, a.gate_time_a)?;
    setup.type_b = device(HardwareArchetype::type_b(), a.p0_b, a.gate_time_b)?;
    setup.surface = surface_params(a.p_th, a.overhead, a.d_max)?;
    let (lo, hi) = parse_pair(&a.band, "--band")?;
    setup.band = BandPolicy::new(lo, hi).map_err(CliError::Usage)?;
    if k_b == 0 || (k_b as f64) > inst.volume {
        return Err(CliError::input("scan", format!("k_B = {k_b} must lie in [1, V]")));
    }
    if let Some(k_max) = a.k_max {
        if k_max < k_b {
            return Err(CliError::Usage(format!("--k-max {k_max} is below k_B = {k_b}")));
        }
        setup.k_max = k_max;
    }
    Ok(setup)
}

fn scan_table(a: &ScanArgs, ldpc: bool, w: &mut Csv) -> Result<(), CliError> {
    let setup = scan_setup(a)?;
    let grid_a = a.grid_a.unwrap_or(a.grid).values();
    let grid_b = a.grid_b.unwrap_or(a.grid).values();
    if !ldpc {
        row(
            w,
            ["s_a", "s_b", "status", "k_a", "k_ratio", "time_ratio", "d_a", "d_b"],
        )?;
        for c in setup.scan_surface(&grid_a, &grid_b) {
            row(
                w,
                [
                    num(c.s_a),
                    num(c.s_b),
                    c.status.to_string(),
                    opt(c.k_a),
                    opt(c.k_ratio),
                    opt(c.time_ratio),
                    opt(c.d_a),
                    opt(c.d_b),
                ],
            )?;
        }
        return Ok(());
    }
    let family = load_family(a.ldpc_family.as_deref())?;
    row(
        w,
        [
            "s_a",
            "s_b",
            "status",
            "k_a",
            "d_a",
            "ldpc_code",
            "d_circ",
            "improvement",
        ],
    )?;
    for c in setup.scan_ldpc(&grid_a, &grid_b, &family) {
        row(
            w,
            [
                num(c.surface.s_a),
                num(c.surface.s_b),
                c.surface.status.to_string(),
                opt(c.surface.k_a),
                opt(c.surface.d_a),
                c.code.unwrap_or_default(),
                opt(c.d_circ),
                opt(c.improvement),
            ],
        )?;
    }
    Ok(())
}

fn catalog_table(a: &CatalogArgs, w: &mut Csv) -> Result<usize, CliError> {
    let text = match &a.catalog {
        Some(p) => {
            std::fs::read_to_string(p).map_err(|e| CliError::input("catalog", format!("{}: {e}", p.display())))?
        }
        None => BUILTIN_CATALOG.to_string(),
    };
    let report = catalog::validate_catalog(text.as_bytes()).map_err(|e| CliError::input("catalog", e))?;
    row(w, ["instance_id", "status", "detail"])?;
    let mut rejected = 0;
    for (id, verdict) in report {
        match verdict {
            Ok(()) => row(w, [id.as_str(), "accepted", ""])?,
            Err(e) => {
                rejected += 1;
                row(w, [id, "rejected".into(), e.to_string()])?;
            }
        }
    }
    Ok(rejected)
}
