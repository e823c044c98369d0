//! Experiment execution: builds the requested grids with a worker pool of
//! pure library calls, then hands the rendered files to a single writer.

use std::collections::BTreeMap;
use std::time::Instant;

use focuslab_core::lattice::LatticeField;
use focuslab_core::{automaton, continuum, measures, tightbinding, wigner};
use rayon::prelude::*;

use crate::config::{format_f64, Model, ScenarioConfig};
use crate::manifest;
use crate::output::{OutputFile, Table};
use crate::CliError;

pub struct RunSummary {
    pub file_names: Vec<String>,
    pub lines: Vec<String>,
}

/// Validate, execute, write data files, then the manifest.
/// `threads` = 0 picks the default pool width; results are independent of
/// the pool width.
pub fn run_command(
    command: &str,
    cfg: &ScenarioConfig,
    threads: usize,
) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let (files, extra, lines) = pool.install(|| match command {
        "simulate" => cmd_simulate(cfg),
        "scan" => cmd_scan(cfg),
        "wigner" => cmd_wigner(cfg),
        other => Err(CliError::Config(format!("unknown command '{other}'"))),
    })?;
    manifest::write_outputs(
        &cfg.out_dir,
        cfg,
        command,
        &files,
        extra,
        start.elapsed().as_secs_f64(),
    )?;
    Ok(RunSummary {
        file_names: files.iter().map(|f| f.name.clone()).collect(),
        lines,
    })
}

type CmdOutput = (Vec<OutputFile>, BTreeMap<String, serde_json::Value>, Vec<String>);

// ---------------------------------------------------------------- simulate

fn cmd_simulate(cfg: &ScenarioConfig) -> Result<CmdOutput, CliError> {
    let table = match cfg.model {
        Model::Automaton => simulate_automaton(cfg),
        Model::Tightbinding => simulate_tightbinding(cfg)?,
        Model::Continuum => simulate_continuum(cfg)?,
    };
    let file = table.render(cfg.format, "grid");
    let lines = vec![format!("wrote {}", file.name)];
    Ok((vec![file], BTreeMap::new(), lines))
}

fn simulate_automaton(cfg: &ScenarioConfig) -> Table {
    let grid = automaton::evolve_square(cfg.n_half, cfg.delta, cfg.tau_max);
    Table {
        comment: format!(
            "focuslab simulate model=automaton n={} delta={} tau_max={}; rows=step, cols=site, values=|phi|^2",
            cfg.n_half,
            format_f64(cfg.delta),
            cfg.tau_max
        ),
        row_label: "tau".into(),
        col_labels: grid.sites().map(|s| format!("site_{s}")).collect(),
        row_values: (0..=cfg.tau_max).map(|t| t.to_string()).collect(),
        rows: grid.rows,
        footer: vec![],
    }
}

fn simulate_tightbinding(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let times = measures::uniform_grid(cfg.effective_t_max(), cfg.samples);
    let (initial, what) = match cfg.array_count {
        Some(count) => {
            let spacing = cfg
                .array_spacing
                .unwrap_or_else(|| tightbinding::PacketArraySpec::default_spacing(cfg.n_half));
            let spec = tightbinding::PacketArraySpec::new(count, cfg.n_half, spacing)?;
            (
                tightbinding::packet_array_field(&spec)?,
                format!("array count={count} n={} spacing={spacing}", cfg.n_half),
            )
        }
        None => (
            LatticeField::square_packet(cfg.n_half),
            format!("square n={}", cfg.n_half),
        ),
    };

    let t_last = times.last().copied().unwrap_or(0.0);
    let reach = tightbinding::kernel_reach(cfg.lambda, t_last) as i64;
    let (lo, hi) = initial.support();
    let offset = lo - reach;
    let width = (hi + reach - offset + 1) as usize;

    let rows: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| {
            let field = tightbinding::propagate(&initial, cfg.lambda, t);
            let mut row = vec![0.0f64; width];
            for (site, amp) in field.iter() {
                let idx = site - offset;
                if idx >= 0 && (idx as usize) < width {
                    row[idx as usize] = amp.norm_sqr();
                }
            }
            row
        })
        .collect();

    Ok(Table {
        comment: format!(
            "focuslab simulate model=tightbinding {what} lambda={}; rows=time, cols=site, values=|phi|^2",
            format_f64(cfg.lambda)
        ),
        row_label: "time".into(),
        col_labels: (0..width).map(|i| format!("site_{}", offset + i as i64)).collect(),
        row_values: times.iter().map(|t| format_f64(*t)).collect(),
        rows,
        footer: vec![],
    })
}

fn simulate_continuum(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let times = measures::uniform_grid(cfg.effective_t_max(), cfg.samples);
    let half = cfg.x_half_span * cfg.l;
    let xs: Vec<f64> = (0..cfg.x_samples)
        .map(|i| -half + 2.0 * half * i as f64 / (cfg.x_samples - 1) as f64)
        .collect();

    let rows: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| {
            xs.iter()
                .map(|&x| {
                    continuum::free_propagate_square(cfg.l, x, t)
                        .map(|v| v.norm_sqr())
                        .unwrap_or(f64::NAN)
                })
                .collect()
        })
        .collect();

    Ok(Table {
        comment: format!(
            "focuslab simulate model=continuum l={}; rows=time, cols=x, values=|phi|^2",
            format_f64(cfg.l)
        ),
        row_label: "time".into(),
        col_labels: xs.iter().map(|x| format!("x_{}", format_f64(*x))).collect(),
        row_values: times.iter().map(|t| format_f64(*t)).collect(),
        rows,
        footer: vec![],
    })
}

// -------------------------------------------------------------------- scan

fn cmd_scan(cfg: &ScenarioConfig) -> Result<CmdOutput, CliError> {
    let (table, lines) = match cfg.model {
        Model::Tightbinding => scan_tightbinding(cfg),
        Model::Automaton => scan_automaton(cfg)?,
        Model::Continuum => {
            return Err(CliError::Config(
                "scan supports the automaton and tightbinding models".into(),
            ))
        }
    };
    let file = table.render(cfg.format, "scan");
    let mut all_lines = vec![format!("wrote {}", file.name)];
    all_lines.extend(lines);
    Ok((vec![file], BTreeMap::new(), all_lines))
}

fn scan_tightbinding(cfg: &ScenarioConfig) -> (Table, Vec<String>) {
    let times = measures::uniform_grid(cfg.scan_t_max(), cfg.samples);
    let ns: Vec<u32> = (cfg.n_min..=cfg.n_max).collect();
    let entries: Vec<measures::ScanEntry> = ns
        .par_iter()
        .map(|&n| {
            let series = measures::measure_series(n, cfg.n0, cfg.lambda, &times);
            let v = measures::detect_focusing(&series).expect("grid has >= 3 samples");
            measures::ScanEntry {
                n_half: n,
                t_peak: v.t_peak,
                normalized_peak: v.normalized_peak,
                focusing: v.focusing,
            }
        })
        .collect();
    let (critical, reason) = measures::locate_transition(&entries);
    let summary = match critical {
        Some(n) => format!("critical_N = {n}"),
        None => format!("critical_N = inconclusive ({})", reason.unwrap_or("unknown")),
    };

    let table = Table {
        comment: format!(
            "focuslab scan model=tightbinding n0={} lambda={} t_max={} samples={}; rows=N, cols=(t_peak, normalized_peak, focusing)",
            cfg.n0,
            format_f64(cfg.lambda),
            format_f64(cfg.scan_t_max()),
            cfg.samples
        ),
        row_label: "N".into(),
        col_labels: vec!["t_peak".into(), "normalized_peak".into(), "focusing".into()],
        row_values: entries.iter().map(|e| e.n_half.to_string()).collect(),
        rows: entries
            .iter()
            .map(|e| {
                vec![
                    e.t_peak.unwrap_or(f64::NAN),
                    e.normalized_peak,
                    if e.focusing { 1.0 } else { 0.0 },
                ]
            })
            .collect(),
        footer: vec![summary.clone()],
    };
    (table, vec![summary])
}

fn scan_automaton(cfg: &ScenarioConfig) -> Result<(Table, Vec<String>), CliError> {
    let cases: Vec<(f64, u32)> = cfg
        .deltas
        .iter()
        .flat_map(|&d| (cfg.n_min..=cfg.n_max).map(move |n| (d, n)))
        .collect();
    let verdicts: Vec<measures::FocusingVerdict> = cases
        .par_iter()
        .map(|&(delta, n)| {
            measures::automaton_focusing(n, delta, cfg.tau_max, cfg.n0)
                .expect("tau_max >= 2 gives enough samples")
        })
        .collect();

    let mut lines = Vec::new();
    for (&(delta, n), v) in cases.iter().zip(&verdicts) {
        lines.push(format!(
            "delta={} N={n}: focusing={}",
            format_f64(delta),
            v.focusing
        ));
    }
    let table = Table {
        comment: format!(
            "focuslab scan model=automaton n0={} tau_max={}; rows=delta, cols=(N, tau_peak, normalized_peak, focusing)",
            cfg.n0, cfg.tau_max
        ),
        row_label: "delta".into(),
        col_labels: vec![
            "N".into(),
            "tau_peak".into(),
            "normalized_peak".into(),
            "focusing".into(),
        ],
        row_values: cases.iter().map(|(d, _)| format_f64(*d)).collect(),
        rows: cases
            .iter()
            .zip(&verdicts)
            .map(|(&(_, n), v)| {
                vec![
                    n as f64,
                    v.t_peak.unwrap_or(f64::NAN),
                    v.normalized_peak,
                    if v.focusing { 1.0 } else { 0.0 },
                ]
            })
            .collect(),
        footer: vec!["critical_N = n/a (automaton scan reports per-coupling verdicts)".into()],
    };
    Ok((table, lines))
}

// ------------------------------------------------------------------ wigner

fn cmd_wigner(cfg: &ScenarioConfig) -> Result<CmdOutput, CliError> {
    let times = match &cfg.wigner_times {
        Some(ts) => ts.clone(),
        None => {
            let t_focus = tb_focusing_time(cfg);
            vec![0.0, t_focus]
        }
    };
    let ks = wigner::k_strip(cfg.k_nodes);
    let initial = LatticeField::square_packet(cfg.n_half);

    struct PerTime {
        grid: wigner::WignerGrid,
        shear: Option<(wigner::WignerGrid, wigner::ShearComparison)>,
    }

    let per_time: Vec<Result<PerTime, CliError>> = times
        .par_iter()
        .map(|&t| {
            let field = tightbinding::propagate(&initial, cfg.lambda, t);
            let grid = wigner::discrete_wigner(&field, &ks)?;
            let shear = if cfg.shear {
                let n_lo = grid.n_offset;
                let n_hi = grid.n_offset + grid.n_rows() as i64 - 1;
                let approx = wigner::shear_grid(cfg.n_half, n_lo, n_hi, &ks, t);
                let stats = wigner::compare_shear(&grid, cfg.n_half, t, 0.1);
                Some((approx, stats))
            } else {
                None
            };
            Ok(PerTime { grid, shear })
        })
        .collect();

    let mut files = Vec::new();
    let mut lines = Vec::new();
    let mut shear_summary = Vec::new();
    for (i, result) in per_time.into_iter().enumerate() {
        let pt = result?;
        let t = times[i];
        files.push(wigner_table(cfg, &pt.grid, t, "wigner").render(cfg.format, &format!("wigner_t{i}")));
        if let Some((approx, stats)) = pt.shear {
            let mut table = wigner_table(cfg, &approx, t, "wigner shear approximation");
            table.footer = vec![format!(
                "shear vs transform: max_abs_diff = {}, scale_relative = {}",
                format_f64(stats.max_abs_diff),
                format_f64(stats.scale_relative)
            )];
            files.push(table.render(cfg.format, &format!("shear_t{i}")));
            lines.push(format!(
                "t={}: shear max_abs_diff={} scale_relative={}",
                format_f64(t),
                format_f64(stats.max_abs_diff),
                format_f64(stats.scale_relative)
            ));
            let mut entry = serde_json::Map::new();
            entry.insert("time".into(), json_f64(t));
            entry.insert("max_abs_diff".into(), json_f64(stats.max_abs_diff));
            entry.insert("scale_relative".into(), json_f64(stats.scale_relative));
            shear_summary.push(serde_json::Value::Object(entry));
        }
    }
    for f in &files {
        lines.insert(0, format!("wrote {}", f.name));
    }
    lines.reverse();

    let mut extra = BTreeMap::new();
    extra.insert(
        "wigner_times".to_string(),
        serde_json::Value::Array(times.iter().map(|&t| json_f64(t)).collect()),
    );
    if !shear_summary.is_empty() {
        extra.insert("shear_summary".to_string(), serde_json::Value::Array(shear_summary));
    }
    Ok((files, extra, lines))
}

fn wigner_table(cfg: &ScenarioConfig, grid: &wigner::WignerGrid, t: f64, what: &str) -> Table {
    Table {
        comment: format!(
            "focuslab {what} model=tightbinding n={} lambda={} t={}; rows=site, cols=k, values=W_n(k)",
            cfg.n_half,
            format_f64(cfg.lambda),
            format_f64(t)
        ),
        row_label: "n".into(),
        col_labels: grid
            .k_samples
            .iter()
            .map(|k| format!("k_{}", format_f64(*k)))
            .collect(),
        row_values: (0..grid.n_rows())
            .map(|r| (grid.n_offset + r as i64).to_string())
            .collect(),
        rows: grid.values.clone(),
        footer: vec![],
    }
}

/// The focusing time of the square packet in the tight-binding chain,
/// from the default measure grid; falls back to the continuum scaling
/// estimate when no interior peak exists.
pub fn tb_focusing_time(cfg: &ScenarioConfig) -> f64 {
    let times = measures::default_time_grid(cfg.n_half, cfg.lambda, 400);
    let series = measures::measure_series(cfg.n_half, cfg.n0, cfg.lambda, &times);
    match measures::detect_focusing(&series) {
        Ok(v) if v.focusing => v.t_peak.unwrap_or_else(|| fallback_focus(cfg)),
        _ => fallback_focus(cfg),
    }
}

fn fallback_focus(cfg: &ScenarioConfig) -> f64 {
    let width = (2 * cfg.n_half as u64 + 1) as f64;
    2.0 * 0.0272 * width * width / cfg.lambda.abs()
}

fn json_f64(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}
