//! End-to-end tests of the `dol` binary: artifact layout, structured
//! errors, manifest echo, and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use dol::specfit::FitModel;

fn dol() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dol"))
}

fn run(args: &[&str]) -> Output {
    dol().args(args).output().expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const BEAM_CONFIG: &str = r#"{
  "species": "rb85",
  "lattice": {
    "beam": { "intensity_per_beam": 5.2, "detuning_over_gamma": -12.0 },
    "theta_x_deg": 25.0
  },
  "drive": { "eps_p": 0.1, "delta": 12.0, "mode": "traveling_plus" }
}"#;

fn sim_config(seed: Option<u64>) -> String {
    let seed_field = seed.map(|s| format!("\"seed\": {s},")).unwrap_or_default();
    format!(
        r#"{{
  "species": "rb85",
  "lattice": {{ "targets": {{ "u0": 400.0, "gamma_s": 5.7 }}, "theta_x_deg": 25.0 }},
  "drive": {{ "eps_p": 0.1, "delta": 12.0, "mode": "traveling_plus" }},
  "sim": {{
    "n_traj": 64, "dt": 0.004, "burn_in": 12.0, "measure_time": 20.0,
    {seed_field} "sample_stride": 0
  }},
  "sweep": {{ "grid": [10.0, 12.0, 14.0] }}
}}"#
    )
}

#[test]
fn derive_reproduces_reference_well_depth_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write(&cfg, BEAM_CONFIG);

    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    for out in [&out1, &out2] {
        std::fs::create_dir(out).unwrap();
        let r = run(&[
            "derive",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }

    let derived = read_json(&out1.join("derived.json"));
    let u0 = derived["u0"].as_f64().unwrap();
    assert!((u0 - 276.0).abs() / 276.0 < 0.02, "U0 = {u0}");

    // Bit-identical artifact on identical inputs.
    assert_eq!(
        std::fs::read(out1.join("derived.json")).unwrap(),
        std::fs::read(out2.join("derived.json")).unwrap()
    );

    let manifest = read_json(&out1.join("manifest.json"));
    assert_eq!(manifest["command"], "derive");
    assert!(manifest["version"].as_str().is_some());
}

#[test]
fn missing_seed_is_a_structured_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write(&cfg, &sim_config(None));
    let r = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!r.status.success());
    let stderr = String::from_utf8_lossy(&r.stderr);
    let err: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert!(
        err["error"].as_str().unwrap().contains("/sim/seed"),
        "stderr: {stderr}"
    );
}

#[test]
fn seed_flag_overrides_config_and_is_echoed_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write(&cfg, &sim_config(Some(5)));
    let r = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "99",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["seed"], 99);
    let summary = read_json(&dir.path().join("summary.json"));
    assert!(summary["mean_velocity"].as_f64().unwrap().is_finite());
    assert_eq!(summary["n_traj"], 64);
}

#[test]
fn simulate_is_reproducible_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write(&cfg, &sim_config(Some(5)));
    let mut velocities = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        std::fs::create_dir(&out).unwrap();
        let r = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        let summary = read_json(&out.join("summary.json"));
        velocities.push(summary["mean_velocity"].as_f64().unwrap());
    }
    assert_eq!(velocities[0].to_bits(), velocities[1].to_bits());
}

#[test]
fn sweep_delta_writes_csv_and_echoes_config_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write(&cfg, &sim_config(Some(7)));
    let r = run(&[
        "sweep-delta",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));

    let csv = std::fs::read_to_string(dir.path().join("sweep_delta.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "axis_value,mean_velocity,stderr,mode11_magnitude,realized_jump_rate,status"
    );
    assert_eq!(lines.len(), 4);
    assert!(!csv.contains('\r'), "CSV must use LF line endings");
    for line in &lines[1..] {
        assert!(line.ends_with(",ok"), "row: {line}");
    }

    // Manifest round-trip: the echoed config reparses to the same values.
    let manifest = read_json(&dir.path().join("manifest.json"));
    let echoed = &manifest["config"];
    assert_eq!(echoed["sim"]["n_traj"], 64);
    assert_eq!(echoed["sim"]["seed"], 7);
    assert_eq!(echoed["drive"]["eps_p"], 0.1);
    assert_eq!(echoed["sweep"]["grid"], serde_json::json!([10.0, 12.0, 14.0]));
    let original: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert_eq!(
        echoed["lattice"]["targets"],
        original["lattice"]["targets"]
    );
    assert_eq!(
        echoed["lattice"]["theta_x_deg"],
        original["lattice"]["theta_x_deg"]
    );
}

#[test]
fn snapshot_writes_nine_phase_files_with_antisymmetric_population_shifts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write(&cfg, &sim_config(Some(5)));
    let r = run(&[
        "snapshot",
        "--config",
        cfg.to_str().unwrap(),
        "--points",
        "64",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));

    let index = read_json(&dir.path().join("snapshot_index.json"));
    assert_eq!(index["phases"].as_array().unwrap().len(), 9);
    assert!((index["amp_ratio"].as_f64().unwrap() - 0.4).abs() < 1e-12);

    for i in 0..=8 {
        let text =
            std::fs::read_to_string(dir.path().join(format!("snapshot_{i}_of_8.csv"))).unwrap();
        let mut rows = 0;
        for line in text.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols.len(), 5);
            assert!(
                (cols[3] + cols[4]).abs() < 1e-12,
                "dRho_plus + dRho_minus must vanish, got {line}"
            );
            rows += 1;
        }
        assert_eq!(rows, 64);
    }
}

#[test]
fn fit_recovers_synthetic_spectrum_via_derived_lattice_seeds() {
    let dir = tempfile::tempdir().unwrap();

    // Derive the lattice JSON used for the physics-based fit seeds.
    let cfg = dir.path().join("cfg.json");
    write(&cfg, BEAM_CONFIG);
    let r = run(&[
        "derive",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let derived = read_json(&dir.path().join("derived.json"));
    let omega_r_khz = 3.86;
    let omega_b = derived["omega_x"].as_f64().unwrap() * omega_r_khz;
    let omega_z = derived["omega_z"].as_f64().unwrap() * omega_r_khz;

    // Synthetic spectrum with features at the derived positions.
    let truth: FitModel<f64> = FitModel {
        a_z1: 1.0,
        omega_z1: omega_z,
        sigma_z1: 0.2 * omega_z,
        a_z2: -1.0,
        omega_z2: -omega_z,
        sigma_z2: 0.2 * omega_z,
        a_b1: 1.5,
        omega_b1: omega_b,
        sigma_b1: 0.15 * omega_b,
        a_b2: -1.3,
        omega_b2: -omega_b,
        sigma_b2: None,
        a1: 10.0,
        a2: 0.001,
        a3: 150.0,
        a4: 40.0,
        x0: 0.5,
        gamma_width: 8.0,
    };
    let mut csv = String::from("delta,transmission\n");
    let n = 401;
    for i in 0..n {
        let d = -260.0 + 520.0 * i as f64 / (n - 1) as f64;
        csv.push_str(&format!("{d},{}\n", truth.eval(d)));
    }
    let spec_path = dir.path().join("scan_a.csv");
    write(&spec_path, &csv);

    let r = run(&[
        "fit",
        spec_path.to_str().unwrap(),
        "--units",
        "khz",
        "--lattice",
        dir.path().join("derived.json").to_str().unwrap(),
        "--gamma-s",
        "5.7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));

    let fit = read_json(&dir.path().join("fit_scan_a.json"));
    assert_eq!(fit["converged"], true);
    let a = fit["A"].as_f64().unwrap();
    assert!((a - 1.5).abs() < 0.02, "A = {a}");
    let center = fit["params"]["omega_b1"].as_f64().unwrap();
    assert!((center - omega_b).abs() / omega_b < 0.01, "Ω_B = {center}");

    let agg = std::fs::read_to_string(dir.path().join("fit_aggregate.csv")).unwrap();
    let mut lines = agg.lines();
    assert_eq!(lines.next().unwrap(), "scan_id,Gamma_S,A");
    let row = lines.next().unwrap();
    assert!(row.starts_with("scan_a,5.7,"), "row: {row}");
}

#[test]
fn unknown_species_fails_with_structured_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    write(
        &cfg,
        r#"{ "species": "cs133", "lattice": { "targets": { "u0": 400.0, "gamma_s": 5.7 }, "theta_x_deg": 25.0 } }"#,
    );
    let r = run(&[
        "derive",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!r.status.success());
    let stderr = String::from_utf8_lossy(&r.stderr);
    let err: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("/species"));
}
