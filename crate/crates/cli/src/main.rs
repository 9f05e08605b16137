//! Command-line experiment harness.
//!
//! Subcommands:
//! - `run --experiment <name> [--config <file>] [--set key=value]... [--out <dir>]`
//! - `sweep --seeds a..b [same flags as run]`
//! - `presets`
//!
//! The output directory defaults to `$QUGAL_OUT_DIR`, then `./runs`.
//! Exit codes: 0 success, 2 unknown experiment/usage, 3 bad configuration,
//! 4 unreadable state file, 5 dimension mismatch, 6 run failure, 7 I/O.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use qugal_core::experiment::{run_experiment, ExperimentConfig, ExperimentError, Preset};

const USAGE: &str = "\
usage:
  qugal run   --experiment <name> [--config <file>] [--set key=value]... [--out <dir>]
  qugal sweep --seeds <a>..<b> --experiment <name> [--config <file>] [--set key=value]... [--out <dir>]
  qugal presets

experiments: qmmw-approx, qmmw-enttest, qugan-enttest, regret-audit, sign-resolve
The config file holds one key=value per line; --set overrides file keys;
--experiment overrides any experiment key. Output directory defaults to
$QUGAL_OUT_DIR, then ./runs.";

struct CommonArgs {
    experiment: Option<String>,
    config_path: Option<PathBuf>,
    sets: Vec<(String, String)>,
    out_dir: Option<PathBuf>,
}

enum Command {
    Run(CommonArgs),
    Sweep { seeds: (u64, u64), args: CommonArgs },
    Presets,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n{USAGE}");
    ExitCode::from(2)
}

fn parse_set(arg: &str) -> Result<(String, String), String> {
    match arg.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("bad --set argument {arg:?}: expected key=value")),
    }
}

fn parse_seed_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("bad --seeds {s:?}: expected a..b"))?;
    let lo: u64 = a.parse().map_err(|_| format!("bad seed {a:?}"))?;
    let hi: u64 = b.parse().map_err(|_| format!("bad seed {b:?}"))?;
    if hi < lo {
        return Err(format!("empty seed range {s:?}"));
    }
    Ok((lo, hi))
}

fn parse_args(mut args: Vec<String>) -> Result<Command, String> {
    if args.is_empty() {
        return Err("missing subcommand".into());
    }
    let sub = args.remove(0);
    if sub == "presets" {
        return Ok(Command::Presets);
    }
    if sub != "run" && sub != "sweep" {
        return Err(format!("unknown subcommand {sub:?}"));
    }
    let mut common = CommonArgs {
        experiment: None,
        config_path: None,
        sets: Vec::new(),
        out_dir: None,
    };
    let mut seeds = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let mut need_value =
            |name: &str| it.next().ok_or_else(|| format!("{name} needs a value"));
        match arg.as_str() {
            "--experiment" => common.experiment = Some(need_value("--experiment")?),
            "--config" => common.config_path = Some(PathBuf::from(need_value("--config")?)),
            "--set" => common.sets.push(parse_set(&need_value("--set")?)?),
            "--out" => common.out_dir = Some(PathBuf::from(need_value("--out")?)),
            "--seeds" if sub == "sweep" => {
                seeds = Some(parse_seed_range(&need_value("--seeds")?)?)
            }
            other => return Err(format!("unknown argument {other:?}")),
        }
    }
    if sub == "sweep" {
        let seeds = seeds.ok_or("sweep needs --seeds a..b")?;
        Ok(Command::Sweep { seeds, args: common })
    } else {
        Ok(Command::Run(common))
    }
}

fn parse_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ExperimentError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    let mut map = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            _ => {
                return Err(ExperimentError::Config(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    ln + 1
                )))
            }
        }
    }
    Ok(map)
}

fn build_config(
    args: &CommonArgs,
    seed_override: Option<u64>,
) -> Result<ExperimentConfig, ExperimentError> {
    let mut map = match &args.config_path {
        Some(p) => parse_config_file(p)?,
        None => BTreeMap::new(),
    };
    if let Some(exp) = &args.experiment {
        map.insert("experiment".into(), exp.clone());
    }
    for (k, v) in &args.sets {
        map.insert(k.clone(), v.clone());
    }
    if let Some(seed) = seed_override {
        map.insert("seed".into(), seed.to_string());
    }
    ExperimentConfig::from_map(&map)
}

fn resolve_out_dir(args: &CommonArgs) -> PathBuf {
    args.out_dir
        .clone()
        .or_else(|| std::env::var_os("QUGAL_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn summary_line(summary: &serde_json::Value) -> String {
    let mut parts = Vec::new();
    for key in [
        "experiment",
        "target",
        "verdict",
        "final_loss",
        "final_fidelity",
        "post_burn_in_mean_loss",
        "terminal_gap",
    ] {
        if let Some(v) = summary.get(key) {
            if let Some(s) = v.as_str() {
                parts.push(format!("{key}={s}"));
            } else if let Some(x) = v.as_f64() {
                parts.push(format!("{key}={x:.4}"));
            }
        }
    }
    parts.join(" ")
}

fn cmd_run(args: CommonArgs) -> Result<(), ExperimentError> {
    let config = build_config(&args, None)?;
    let out_dir = resolve_out_dir(&args);
    let record = run_experiment(&config)?;
    let written = record.write_to(&out_dir, "")?;
    print!("{}", record.summary_text());
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_sweep(seeds: (u64, u64), args: CommonArgs) -> Result<(), ExperimentError> {
    // Validate once up front so bad configs fail before any thread spawns.
    build_config(&args, Some(seeds.0))?;
    let out_dir = resolve_out_dir(&args);
    std::fs::create_dir_all(&out_dir)?;

    let results: Vec<(u64, Result<serde_json::Value, ExperimentError>)> =
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for seed in seeds.0..=seeds.1 {
                let args = &args;
                let out_dir = out_dir.clone();
                handles.push((
                    seed,
                    scope.spawn(move || -> Result<serde_json::Value, ExperimentError> {
                        let config = build_config(args, Some(seed))?;
                        let record = run_experiment(&config)?;
                        record.write_to(&out_dir, &format!("_seed{seed}"))?;
                        Ok(record.summary)
                    }),
                ));
            }
            handles
                .into_iter()
                .map(|(seed, h)| (seed, h.join().expect("sweep worker panicked")))
                .collect()
        });

    let mut verdicts: BTreeMap<String, usize> = BTreeMap::new();
    let mut failed = false;
    for (seed, result) in &results {
        match result {
            Ok(summary) => {
                println!("seed {seed}: {}", summary_line(summary));
                if let Some(v) = summary.get("verdict").and_then(|v| v.as_str()) {
                    *verdicts.entry(v.to_string()).or_default() += 1;
                }
            }
            Err(e) => {
                eprintln!("seed {seed}: error: {e}");
                failed = true;
            }
        }
    }
    if !verdicts.is_empty() {
        let total: usize = verdicts.values().sum();
        let tally: Vec<String> =
            verdicts.iter().map(|(k, v)| format!("{k} {v}/{total}")).collect();
        println!("verdicts: {}", tally.join(", "));
    }
    eprintln!("wrote per-seed traces to {}", out_dir.display());
    if failed {
        return Err(ExperimentError::Config("one or more sweep seeds failed".into()));
    }
    Ok(())
}

fn cmd_presets() {
    for p in Preset::all() {
        println!("{:11} {}", p.name(), p.description());
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let command = match parse_args(args) {
        Ok(c) => c,
        Err(msg) => return usage_error(&msg),
    };
    let result = match command {
        Command::Presets => {
            cmd_presets();
            Ok(())
        }
        Command::Run(args) => cmd_run(args),
        Command::Sweep { seeds, args } => cmd_sweep(seeds, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
