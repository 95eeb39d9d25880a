use std::path::Path;
use std::process::Command;

use choreo_cli::export::export_plot;
use choreo_cli::run::{EXIT_CONFIG, EXIT_DISCRIMINANT, EXIT_OK, EXIT_TRACKER};
use choreo_cli::{preset, run_scenario, ScenarioConfig, PRESET_NAMES, SCENARIO_SCHEMA};
use choreo_core::family::FamilySpec;
use serde_json::Value;

fn choreo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_choreo"))
}

fn write_config(dir: &Path, name: &str, cfg: &ScenarioConfig) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, cfg.to_json()).unwrap();
    p
}

fn run_config(path: &Path) -> (i32, Value) {
    let out = choreo().arg("run").arg("--config").arg(path).output().unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    (out.status.code().unwrap(), report)
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.json", &preset("sec7-2").unwrap());
    let mut bytes = Vec::new();
    for i in 0..2 {
        let (report, traj, plot) = (
            dir.path().join(format!("r{i}.json")),
            dir.path().join(format!("t{i}.csv")),
            dir.path().join(format!("p{i}.svg")),
        );
        let status = choreo()
            .arg("run")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&report)
            .arg("--traj")
            .arg(&traj)
            .arg("--plot")
            .arg(&plot)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(EXIT_OK));
        bytes.push([report, traj, plot].map(|p| std::fs::read(p).unwrap()));
    }
    assert_eq!(bytes[0], bytes[1]);
    let report: Value = serde_json::from_slice(&bytes[0][0]).unwrap();
    assert_eq!(report["c"], serde_json::json!({"0": 1, "1": 1}));
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
    assert!(report["tolerances"]["corrector"].is_number());
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();

    let (code, r) = run_config(&write_config(dir.path(), "ok.json", &preset("sec7-1").unwrap()));
    assert_eq!(code, EXIT_OK);
    assert!(r["error"].is_null());

    let (code, r) = run_config(&write_config(dir.path(), "disc.json", &preset("typeII-pencil").unwrap()));
    assert_eq!(code, EXIT_DISCRIMINANT);
    assert_eq!(r["error"]["kind"], "DiscriminantHit");
    assert!(r["error"]["t"].is_number());

    let mut coarse = preset("sec7-2").unwrap();
    coarse.tracker.steps = 3;
    coarse.tracker.max_retries = 0;
    let (code, r) = run_config(&write_config(dir.path(), "coarse.json", &coarse));
    assert_eq!(code, EXIT_TRACKER, "{r}");

    let mut off = preset("sec7-2").unwrap();
    off.family = FamilySpec::LinePencil { center: [0.3, 0.3], start_angle: 0.0, deflate_center: true };
    let (code, r) = run_config(&write_config(dir.path(), "off.json", &off));
    assert_eq!(code, EXIT_CONFIG);
    assert_eq!(r["error"]["kind"], "NotOnCurve");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let (code, r) = run_config(&bad);
    assert_eq!(code, EXIT_CONFIG);
    assert_eq!(r["error"]["kind"], "ConfigError");

    let (code, _) = run_config(&dir.path().join("missing.json"));
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn unknown_keys_are_rejected() {
    let mut v: Value = serde_json::from_str(&preset("sec7-2").unwrap().to_json()).unwrap();
    assert!(ScenarioConfig::from_json(&v.to_string()).is_ok());
    v["colour"] = Value::from("red");
    assert!(ScenarioConfig::from_json(&v.to_string()).is_err());

    let mut v: Value = serde_json::from_str(&preset("sec7-2").unwrap().to_json()).unwrap();
    v["family"]["radius"] = Value::from(1.0);
    assert!(ScenarioConfig::from_json(&v.to_string()).is_err());

    let mut v: Value = serde_json::from_str(&preset("sec7-2").unwrap().to_json()).unwrap();
    v["tracker"]["step"] = Value::from(10);
    assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
}

#[test]
fn schema_covers_config_keys() {
    let schema: Value = serde_json::from_str(SCENARIO_SCHEMA).unwrap();
    let props = schema["properties"].as_object().unwrap();
    assert_eq!(schema["additionalProperties"], Value::Bool(false));
    for name in PRESET_NAMES {
        let cfg: Value = serde_json::from_str(&preset(name).unwrap().to_json()).unwrap();
        for key in cfg.as_object().unwrap().keys() {
            assert!(props.contains_key(key), "{name}: {key} missing from schema");
        }
        let kind = cfg["family"]["kind"].as_str().unwrap();
        let variant = schema["$defs"]["family"]["oneOf"]
            .as_array()
            .unwrap()
            .iter()
            .find(|v| v["properties"]["kind"]["const"] == kind)
            .unwrap_or_else(|| panic!("{kind} missing from schema"));
        for key in cfg["family"].as_object().unwrap().keys() {
            assert!(variant["properties"].get(key).is_some(), "{kind}: {key} missing from schema");
        }
    }
    let out = choreo().arg("schema").output().unwrap();
    assert_eq!(out.stdout, SCENARIO_SCHEMA.as_bytes());
}

#[test]
fn presets_round_trip_and_unknown_names_fail() {
    for name in PRESET_NAMES {
        let cfg = preset(name).unwrap();
        assert_eq!(ScenarioConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let out = choreo().args(["preset", name, "--emit-config"]).output().unwrap();
        assert!(out.status.success());
        assert_eq!(ScenarioConfig::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap(), cfg);
    }
    assert!(preset("sec9-9").is_err());
    let out = choreo().args(["preset", "sec9-9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn pencil_centers_of_the_shipped_presets() {
    let cfg = preset("sec7-1").unwrap();
    let FamilySpec::LinePencil { center, .. } = cfg.family else { panic!("not a pencil") };
    let [x, y] = center;
    assert!((y * y - (x * x * x - x)).abs() < 1e-12);
    assert!((-1.0..=0.0).contains(&x));
    let FamilySpec::LinePencil { center, .. } = preset("sec7-2").unwrap().family else { panic!("not a pencil") };
    assert_eq!(center, [-0.5, 0.0]);
}

#[test]
fn seeded_perturbations_differ_by_seed_only() {
    let a = choreo_cli::preset_with_seed("thm3-null", 3).unwrap();
    let b = choreo_cli::preset_with_seed("thm3-null", 3).unwrap();
    let c = choreo_cli::preset_with_seed("thm3-null", 4).unwrap();
    assert_eq!(a.resolved_family().unwrap(), b.resolved_family().unwrap());
    assert_ne!(a.resolved_family().unwrap(), c.resolved_family().unwrap());
}

#[test]
fn plots_draw_the_curve_and_trajectories() {
    let outcome = run_scenario(&preset("sec7-2").unwrap());
    let topo = outcome.topology.as_ref().unwrap();
    let mut full = Vec::new();
    export_plot(outcome.path.as_ref(), topo, &mut full).unwrap();
    let mut bare = Vec::new();
    export_plot(None, topo, &mut bare).unwrap();
    let (full, bare) = (String::from_utf8(full).unwrap(), String::from_utf8(bare).unwrap());
    assert!(full.starts_with("<svg") && full.trim_end().ends_with("</svg>"));
    assert!(bare.matches("<polyline").count() >= 2);
    assert_eq!(bare.matches("<polygon").count(), 0);
    assert!(full.matches("<polygon").count() >= 3);
    // the start point on X1 is at infinity, outside the chart
    assert_eq!(full.matches("<circle").count(), 2);
}

#[test]
fn verify_all_passes() {
    let out = choreo().args(["verify-all", "--jobs", "4"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().count(), PRESET_NAMES.len());
}
