use std::path::PathBuf;
use std::process::{Command, Output};

use ftqc_scaling::catalog::{canonical_instance, catalog_to_toml, load_catalog, InstanceRecord, MrType, Spin};
use ftqc_scaling::cli::BUILTIN_CATALOG;
use ftqc_scaling::estimator::{estimate_resources, CodeChoice};
use ftqc_scaling::scalability::{HardwareArchetype, ScalabilityModel};
use ftqc_scaling::SurfaceCodeParams;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftqc-scaling"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn user_record(id: &str, k: u64, volume: f64) -> InstanceRecord {
    InstanceRecord {
        instance_id: id.into(),
        mr_type: MrType::SingleReference,
        charge_initial: 0,
        charge_oxidized: 1,
        spin_initial: Spin::from_halves(0),
        spin_oxidized: Spin::from_halves(1),
        n_electrons_initial: 2,
        n_electrons_oxidized: 1,
        n_orbitals: 2,
        k,
        volume,
    }
}

#[test]
fn estimate_reports_canonical_type_b_row() {
    let out = bin(&["estimate", "--archetype", "B"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance,archetype,model,s,code,status,distance,ldpc_code,d_circ,n_phys,p_phys,p_logical,tocks,cycles,\
         runtime_seconds,spacetime_volume_phys"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[6], "17");
    assert_eq!(row[9], "648000");
    assert_eq!(row[10], "0.001");
    let runtime: f64 = row[14].parse().unwrap();
    assert!((runtime - 17.0).abs() < 1e-9);
}

#[test]
fn estimate_grid_of_models() {
    let out = bin(&["estimate", "--archetype", "A", "--model", "power,log", "--s", "10,100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let keys: Vec<String> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(4).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(
        keys,
        [
            "14_in,A,power,10",
            "14_in,A,power,100",
            "14_in,A,log,10",
            "14_in,A,log,100"
        ]
    );
}

#[test]
fn infeasible_estimate_leaves_fields_empty() {
    let out = bin(&["estimate", "--archetype", "B", "--model", "power", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "14_in,B,power,2,surface,infeasible,,,,,,,,,,"
    );
}

#[test]
fn ldpc_estimate_uses_family() {
    let family = fixture("ldpc_family_illustrative.toml");
    let out = bin(&[
        "estimate",
        "--archetype",
        "A",
        "--code",
        "ldpc",
        "--ldpc-family",
        family.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[5], "feasible");
    assert_eq!(row[6], "");
    assert_eq!(row[8], "3");
}

#[test]
fn template_family_demands_coefficients() {
    let family = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/ldpc_family.toml");
    let out = bin(&["estimate", "--code", "ldpc", "--ldpc-family", family.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ldpc-family"));
}

#[test]
fn ldpc_without_family_is_usage_error() {
    assert_eq!(bin(&["estimate", "--code", "ldpc"]).status.code(), Some(1));
}

#[test]
fn catalog_validate_accepts_builtin() {
    let out = bin(&["catalog-validate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "instance_id,status,detail");
    assert_eq!(text.lines().count(), 31);
    assert!(text.lines().skip(1).all(|l| l.contains(",accepted,")));
}

#[test]
fn catalog_validate_reports_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let mut bad = user_record("bad", 10, 100.0);
    bad.n_electrons_oxidized = 2;
    std::fs::write(&path, catalog_to_toml(&[user_record("good", 10, 100.0), bad])).unwrap();
    let out = bin(&["catalog-validate", "--catalog", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("good,accepted,"));
    assert!(text.contains("bad,rejected,"));
}

#[test]
fn infeasible_scan_grid() {
    let out = bin(&["scan-competitive", "--grid", "1:3:1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("TypeB_Infeasible")));
}

#[test]
fn scan_ldpc_columns() {
    let family = fixture("ldpc_family_illustrative.toml");
    let out = bin(&[
        "scan-ldpc",
        "--grid-a",
        "20:20:1",
        "--grid-b",
        "60:60:1",
        "--ldpc-family",
        family.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "Competitive");
    let d_a: f64 = row[4].parse().unwrap();
    let improvement: f64 = row[7].parse().unwrap();
    assert_eq!(improvement, d_a / 3.0);
}

#[test]
fn scan_is_deterministic() {
    let args = ["scan-competitive", "--grid", "4:100:8"];
    assert_eq!(bin(&args).stdout, bin(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["scan-competitive", "--grid", "5:1:1"]).status.code(), Some(1));
    assert_eq!(bin(&["scan-competitive", "--band", "10:1"]).status.code(), Some(1));
    assert_eq!(
        bin(&["estimate", "--catalog", "/nonexistent/catalog.toml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin(&["estimate", "--instance", "nope"]).status.code(), Some(2));
}

#[test]
fn user_catalog_realizes_target_minimum_scalability() {
    // k = 3e4 at V = 1e13 puts type A's power-law minimum near 5.0.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("user.toml");
    std::fs::write(&path, catalog_to_toml(&[user_record("user", 30_000, 1e13)])).unwrap();
    let out = bin(&[
        "min-scalability",
        "--catalog",
        path.to_str().unwrap(),
        "--instance",
        "user",
        "--archetype",
        "A",
        "--model",
        "power",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let s_min: f64 = row[4].parse().unwrap();
    assert!((s_min - 5.0).abs() < 0.05, "{s_min}");
    assert_eq!(row[5], "ok");
}

#[test]
fn builtin_catalog_contents() {
    let records = load_catalog(BUILTIN_CATALOG.as_bytes()).unwrap();
    assert_eq!(records.len(), 30);
    assert_eq!(
        records.iter().find(|r| r.instance_id == "14_in").unwrap(),
        &canonical_instance()
    );
    // 14_in is the largest workload.
    let largest = records.iter().max_by(|a, b| a.volume.total_cmp(&b.volume)).unwrap();
    assert_eq!(largest.instance_id, "14_in");
}

#[test]
fn every_catalog_instance_saturates() {
    let code = CodeChoice::Surface(SurfaceCodeParams::default());
    for rec in load_catalog(BUILTIN_CATALOG.as_bytes()).unwrap() {
        let res = rec.resources();
        for arch in [HardwareArchetype::type_a(), HardwareArchetype::type_b()] {
            let vol = |m| {
                estimate_resources(&res, &arch, &m, &code)
                    .unwrap()
                    .spacetime_volume_phys
            };
            let at_100 = vol(ScalabilityModel::PowerLaw { s: 100.0 });
            let at_inf = vol(ScalabilityModel::Infinite);
            assert!(
                at_inf <= at_100 && at_100 <= 10.0 * at_inf,
                "{} {}",
                rec.instance_id,
                arch.name
            );
        }
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let args = ["min-scalability", "--archetype", "B"];
    let to_file = bin(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), bin(&args).stdout);
}
