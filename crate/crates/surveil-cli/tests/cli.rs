//! End-to-end checks of the experiment harness: configuration fixtures,
//! byte-identical reproducibility, artifact schemas and the binary's exit
//! codes.

use std::path::{Path, PathBuf};
use std::process::Command;

use surveil_cli::config::{parse_config, A2aSettings, A2gSettings, AirspaceSettings, Scenario};
use surveil_cli::experiment::run_experiment;

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir()
        .join(format!("surveil-test-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// A transcription of the simulation parameter table; parsing it must land
/// exactly on the built-in defaults.
const TABLE_FIXTURE: &str = "\
scenario = a2a_power
seed = 1

[airspace]
layer_thickness_m = 4500
isolation_thickness_m = 1000
gs_height_m = 50

[a2g]
frequency_hz = 3.5e9
bandwidth_hz = 100e6
tx_power_w = 20
total_gain_dbi = 20
rel_permittivity = 15
conductivity_s_per_m = 5e3
noise_density_dbm_per_hz = -174
rice_factor = 3

[a2a]
bandwidth_hz = 100e6
noise_density_dbm_per_hz = -174
total_gain_dbi = 23
tx_power_w = 20
path_loss_exponent = 2
threshold_db = -14
density_count = 20
power_min_w = 1
power_max_w = 20
";

#[test]
fn table_fixture_parses_to_defaults() {
    let cfg = parse_config(TABLE_FIXTURE).unwrap();
    assert_eq!(cfg.scenario, Scenario::A2aPower);
    assert_eq!(cfg.airspace, AirspaceSettings::default());
    assert_eq!(cfg.a2g, A2gSettings::default());
    assert_eq!(cfg.a2a, A2aSettings::default());
}

fn small_power_config(out: &Path) -> String {
    format!(
        "scenario = a2a_power\nseed = 11\ntrials = 2000\nout_dir = {}\n\
         [a2a]\npower_steps = 2\ntheta_db_list = -14,-7\n",
        out.display()
    )
}

#[test]
fn identical_configs_reproduce_identical_bytes() {
    let out_a = temp_dir("repro-a");
    let out_b = temp_dir("repro-b");
    let cfg_a = parse_config(&small_power_config(&out_a)).unwrap();
    // Same config except the output directory.
    let mut cfg_b = parse_config(&small_power_config(&out_a)).unwrap();
    cfg_b.out_dir = out_b.clone();

    let arts_a = run_experiment(&cfg_a).unwrap();
    let arts_b = run_experiment(&cfg_b).unwrap();
    assert_eq!(arts_a.files.len(), arts_b.files.len());
    for (a, b) in arts_a.files.iter().zip(&arts_b.files) {
        assert_eq!(read(a), read(b), "{} differs", a.display());
    }
    // Sanity on the CSV schema: header plus 2 x 2 grid rows.
    let csv = read(&out_a.join("a2a_power.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p_s_watts,theta_db,coverage"));
    assert_eq!(lines.count(), 4);
    let manifest = read(&out_a.join("manifest.txt"));
    assert!(manifest.contains("config_hash = "));
    assert!(manifest.contains("a2a.total_gain_linear = 199.52623149688787"));
}

#[test]
fn a2g_sweep_writes_height_grid() {
    let out = temp_dir("a2g");
    let text = format!(
        "scenario = a2g_sweep\nseed = 3\nout_dir = {}\n\
         [a2g]\nheight_min_m = 500\nheight_max_m = 4500\nheight_step_m = 500\nfade_trials = 200\n",
        out.display()
    );
    let cfg = parse_config(&text).unwrap();
    run_experiment(&cfg).unwrap();
    let csv = read(&out.join("a2g_sweep.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("height_m,pl_db_nofade,pl_db_fade,snr_db"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9); // 500..4500 step 500
    assert!(rows[0].starts_with("500,"));
    assert!(rows[8].starts_with("4500,"));
    // The fade-averaged loss sits above the deterministic one.
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(cols[1] > 0.0 && cols[2] > cols[1], "row {row}");
    }
}

#[test]
fn deployment_export_stays_in_bounds() {
    let out = temp_dir("deploy");
    let text = format!(
        "scenario = a2a_density\nseed = 5\ntrials = 1000\nout_dir = {}\n\
         [airspace]\nexport_deployment = true\n\
         [a2a]\ndensity_min_count = 5\ndensity_max_count = 6\n",
        out.display()
    );
    let cfg = parse_config(&text).unwrap();
    run_experiment(&cfg).unwrap();
    let csv = read(&out.join("deployment.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("layer,x,y,z"));
    let mut saw = (false, false);
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let z: f64 = cols[3].parse().unwrap();
        match cols[0] {
            "low" => {
                saw.0 = true;
                assert!((0.0..=4500.0).contains(&z), "{line}");
            }
            "high" => {
                saw.1 = true;
                assert!((5500.0..=10_000.0).contains(&z), "{line}");
            }
            "central_low" | "central_high" => {}
            other => panic!("unexpected layer {other}"),
        }
    }
    assert!(saw.0 && saw.1);
    let density_csv = read(&out.join("a2a_density.csv"));
    assert!(density_csv.starts_with("density,mean_sinr_db\n"));
    assert_eq!(density_csv.lines().count(), 3);
}

fn sbs_line(seq: usize, lon: f64, lat: f64, alt: i32) -> String {
    format!(
        "MSG,3,1,1,4840D6,1,2024/05/01,10:{:02}:{:02}.000,2024/05/01,10:{:02}:{:02}.100,,{alt},,,{lat},{lon},,,0,0,0,0",
        seq / 60,
        seq % 60,
        seq / 60,
        seq % 60
    )
}

fn helix_sbs(count: usize) -> String {
    (0..count)
        .map(|i| {
            let t = i as f64 * 0.2;
            sbs_line(i, t.cos() * 0.5, t.sin() * 0.5, 5000 + (20.0 * t) as i32)
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

#[test]
fn trajectory_scenario_round_trips_and_counts() {
    let out = temp_dir("traj-scenario");
    let input = out.join("input.sbs");
    std::fs::write(&input, helix_sbs(40)).unwrap();
    let text = format!(
        "scenario = trajectory\nout_dir = {}\n[trajectory]\ninput_sbs = {}\n",
        out.display(),
        input.display()
    );
    let cfg = parse_config(&text).unwrap();
    run_experiment(&cfg).unwrap();
    let stats = read(&out.join("trajectory_stats.txt"));
    assert!(stats.contains("total.input_count = 40"), "{stats}");
    for line in read(&out.join("optimized.sbs")).lines() {
        surveil_core::sbs::decode_sbs(line).unwrap();
    }
}

fn surveil(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_surveil")).args(args).output().unwrap()
}

#[test]
fn binary_validate_and_exit_codes() {
    let dir = temp_dir("bin");
    let good = dir.join("good.conf");
    std::fs::write(&good, "scenario = a2a_power\nseed = 9\n").unwrap();
    let out = surveil(&["validate", good.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok:"));

    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "scenario = a2a_power\n").unwrap(); // no seed
    assert_eq!(surveil(&["validate", bad.to_str().unwrap()]).status.code(), Some(1));

    // Missing file is an I/O failure.
    assert_eq!(surveil(&["validate", "/nonexistent.conf"]).status.code(), Some(3));
    // Unknown command is a usage (configuration) failure.
    assert_eq!(surveil(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn binary_traj_processes_and_rejects_short_input() {
    let dir = temp_dir("bin-traj");
    let input = dir.join("flight.sbs");
    std::fs::write(&input, helix_sbs(30)).unwrap();
    let out_dir = dir.join("out");
    let out = surveil(&[
        "traj",
        input.to_str().unwrap(),
        "--n",
        "5",
        "--p",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("optimized.sbs").exists());
    assert!(read(&out_dir.join("trajectory_stats.txt")).contains("total.input_count = 30"));

    // Three points sit below the N + 2 minimum: configuration error.
    let short = dir.join("short.sbs");
    std::fs::write(&short, helix_sbs(3)).unwrap();
    let out = surveil(&["traj", short.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn binary_run_small_power_sweep() {
    let dir = temp_dir("bin-run");
    let conf = dir.join("run.conf");
    let out_dir = dir.join("artifacts");
    std::fs::write(
        &conf,
        "scenario = a2a_power\nseed = 2\ntrials = 1500\n[a2a]\nmethod = monte_carlo\n\
         power_steps = 2\ntheta_db_list = -10\n",
    )
    .unwrap();
    let out = surveil(&[
        "run",
        conf.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--trials",
        "1200",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&out_dir.join("a2a_power.csv"));
    assert_eq!(csv.lines().count(), 3);
    let manifest = read(&out_dir.join("manifest.txt"));
    assert!(manifest.contains("trials = 1200"), "flag override missing:\n{manifest}");
}
