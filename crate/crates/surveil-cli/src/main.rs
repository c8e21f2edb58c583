use std::path::PathBuf;
use std::process::ExitCode;

use surveil_cli::config::{load_config, Scenario};
use surveil_cli::{experiment, traj, CliError};

const USAGE: &str = "\
surveil - hierarchical UAV surveillance network toolkit

USAGE:
    surveil run <config-file> [--out DIR] [--seed N] [--trials N]
    surveil validate <config-file>
    surveil traj <sbs-file> [--n N] [--p P] [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 numerical error, 3 I/O error.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return Err(CliError::Config("no command given".to_string()));
    };
    match command.as_str() {
        "run" => run(&args[1..]),
        "validate" => validate(&args[1..]),
        "traj" => trajectory(&args[1..]),
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            Ok(())
        }
        other => Err(CliError::Config(format!("unknown command {other:?}; see --help"))),
    }
}

fn take_value<'a>(
    args: &'a [String],
    i: &mut usize,
    flag: &str,
) -> Result<&'a str, CliError> {
    *i += 1;
    args.get(*i)
        .map(|s| s.as_str())
        .ok_or_else(|| CliError::Config(format!("{flag} requires a value")))
}

fn run(args: &[String]) -> Result<(), CliError> {
    let mut config_path = None;
    let mut out = None;
    let mut seed = None;
    let mut trials = None;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--out" => out = Some(PathBuf::from(take_value(args, &mut i, "--out")?)),
            "--seed" => {
                seed = Some(parse_u64_flag(take_value(args, &mut i, "--seed")?, "--seed")?)
            }
            "--trials" => {
                trials = Some(parse_u64_flag(take_value(args, &mut i, "--trials")?, "--trials")?)
            }
            flag if flag.starts_with("--") => {
                return Err(CliError::Config(format!("unknown flag {flag:?}")))
            }
            path if config_path.is_none() => config_path = Some(PathBuf::from(path)),
            extra => return Err(CliError::Config(format!("unexpected argument {extra:?}"))),
        }
        i += 1;
    }
    let config_path =
        config_path.ok_or_else(|| CliError::Config("run requires a config file".to_string()))?;
    let mut config = load_config(&config_path)?;
    if let Some(out) = out {
        config.out_dir = out;
    }
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(trials) = trials {
        config.trials = trials;
    }
    let artifacts = experiment::run_experiment(&config)?;
    for file in artifacts.files {
        println!("{}", file.display());
    }
    Ok(())
}

fn validate(args: &[String]) -> Result<(), CliError> {
    let [path] = args else {
        return Err(CliError::Config("validate takes exactly one config file".to_string()));
    };
    let config = load_config(std::path::Path::new(path))?;
    if config.scenario == Scenario::Trajectory {
        let input = config.trajectory.input_sbs.as_ref().expect("validated at parse");
        if !input.exists() {
            return Err(CliError::Config(format!(
                "trajectory input {} does not exist",
                input.display()
            )));
        }
    }
    println!("ok: scenario {} (config hash {:016x})", config.scenario.name(), config.config_hash);
    Ok(())
}

fn trajectory(args: &[String]) -> Result<(), CliError> {
    let mut input = None;
    let mut window_n = 5usize;
    let mut order_p = 2.0f64;
    let mut out = PathBuf::from("out");
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--n" => {
                window_n = parse_u64_flag(take_value(args, &mut i, "--n")?, "--n")? as usize
            }
            "--p" => {
                let raw = take_value(args, &mut i, "--p")?;
                order_p = raw
                    .parse()
                    .map_err(|_| CliError::Config(format!("--p expects a number, got {raw:?}")))?;
            }
            "--out" => out = PathBuf::from(take_value(args, &mut i, "--out")?),
            flag if flag.starts_with("--") => {
                return Err(CliError::Config(format!("unknown flag {flag:?}")))
            }
            path if input.is_none() => input = Some(PathBuf::from(path)),
            extra => return Err(CliError::Config(format!("unexpected argument {extra:?}"))),
        }
        i += 1;
    }
    let input = input.ok_or_else(|| CliError::Config("traj requires an SBS file".to_string()))?;
    let (optimized, stats) = traj::process_sbs_file(&input, window_n, order_p, 1e-9)?;
    std::fs::create_dir_all(&out)
        .map_err(|e| CliError::io(&format!("creating {}", out.display()), e))?;
    let optimized_path = out.join("optimized.sbs");
    std::fs::write(&optimized_path, optimized)
        .map_err(|e| CliError::io(&format!("writing {}", optimized_path.display()), e))?;
    let stats_path = out.join("trajectory_stats.txt");
    std::fs::write(&stats_path, stats)
        .map_err(|e| CliError::io(&format!("writing {}", stats_path.display()), e))?;
    println!("{}", optimized_path.display());
    println!("{}", stats_path.display());
    Ok(())
}

fn parse_u64_flag(raw: &str, flag: &str) -> Result<u64, CliError> {
    raw.parse().map_err(|_| CliError::Config(format!("{flag} expects an integer, got {raw:?}")))
}
