use std::process::ExitCode;

use focuslab::config::{apply_flag, ScenarioConfig};
use focuslab::runner::run_command;
use focuslab::CliError;

const USAGE: &str = "\
focuslab - square-packet focusing experiments on lattices and the line

USAGE:
    focuslab <simulate|scan|wigner> [OPTIONS]

OPTIONS:
    --config PATH        key=value config file with [sections]
    --model M            automaton | tightbinding | continuum
    --N n                packet half-width (2N+1 sites)
    --delta d            automaton coupling
    --lambda l           tight-binding coupling (default 1)
    --n0 w               permanence window half-width
    --L x                continuum packet size
    --tmax T             time window (defaults to the focusing window)
    --samples S          time grid points (default 400)
    --taumax K           automaton steps (default 60)
    --nmin a --nmax b    scan range of packet sizes
    --deltas list        comma-separated couplings for automaton scans
    --count c            number of packets in an array
    --spacing s          site distance between packet centers
    --knodes q           quasi-momentum nodes (default 201)
    --wigner-times list  comma-separated evaluation times
    --shear BOOL         also emit the shear-approximation companion
    --xspan h            continuum half-span in units of L (default 2)
    --xsamples m         continuum spatial samples (default 401)
    --out DIR            output directory (default out)
    --format csv|json    data file format (default csv)
    --threads M          worker threads (default: all cores; FOCUSLAB_THREADS)

EXIT CODES:
    0 success, 1 config error, 2 runtime/numerical error, 3 I/O error
";

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("focuslab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn real_main() -> Result<(), CliError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        print!("{USAGE}");
        return Ok(());
    }
    let command = args[0].as_str();
    if !matches!(command, "simulate" | "scan" | "wigner") {
        return Err(CliError::Config(format!(
            "unknown command '{command}' (expected simulate|scan|wigner)"
        )));
    }

    // two passes: --config first so that flags override the file
    let mut config_path: Option<String> = None;
    let mut threads: Option<usize> = None;
    let mut flags: Vec<(String, String)> = Vec::new();
    let mut it = args[1..].iter();
    while let Some(flag) = it.next() {
        if flag == "--help" || flag == "-h" {
            print!("{USAGE}");
            return Ok(());
        }
        let value = it
            .next()
            .ok_or_else(|| CliError::Config(format!("flag '{flag}' needs a value")))?;
        match flag.as_str() {
            "--config" => config_path = Some(value.clone()),
            "--threads" => {
                threads = Some(value.parse::<usize>().map_err(|_| {
                    CliError::Config(format!("--threads: bad integer '{value}'"))
                })?)
            }
            _ => flags.push((flag.clone(), value.clone())),
        }
    }

    let mut cfg = ScenarioConfig::default();
    if let Some(path) = &config_path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config '{path}': {e}")))?;
        cfg.apply_file(&text, path)?;
    }
    for (flag, value) in &flags {
        apply_flag(&mut cfg, flag, value)?;
    }

    let threads = threads.or_else(|| {
        std::env::var("FOCUSLAB_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    });

    let summary = run_command(command, &cfg, threads.unwrap_or(0))?;
    for line in &summary.lines {
        println!("{line}");
    }
    println!(
        "{} file(s) + manifest.json in {}",
        summary.file_names.len(),
        cfg.out_dir.display()
    );
    Ok(())
}
