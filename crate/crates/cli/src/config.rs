//! Scenario configuration: flat key=value files with sections, full CLI
//! flag overrides, precedence CLI > file > defaults. Unknown keys are
//! rejected with the offending line.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Automaton,
    Tightbinding,
    Continuum,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Automaton => "automaton",
            Model::Tightbinding => "tightbinding",
            Model::Continuum => "continuum",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "automaton" => Ok(Model::Automaton),
            "tightbinding" => Ok(Model::Tightbinding),
            "continuum" => Ok(Model::Continuum),
            other => Err(CliError::Config(format!(
                "unknown model '{other}' (expected automaton|tightbinding|continuum)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Config(format!(
                "unknown format '{other}' (expected csv|json)"
            ))),
        }
    }
}

/// One experiment's full parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: Model,
    pub n_half: u32,
    pub delta: f64,
    pub lambda: f64,
    pub n0: u32,
    pub l: f64,
    pub t_max: Option<f64>,
    pub samples: usize,
    pub tau_max: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub deltas: Vec<f64>,
    pub array_count: Option<u32>,
    pub array_spacing: Option<u32>,
    pub k_nodes: usize,
    pub wigner_times: Option<Vec<f64>>,
    pub shear: bool,
    pub x_half_span: f64,
    pub x_samples: usize,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            model: Model::Tightbinding,
            n_half: 7,
            delta: 0.05,
            lambda: 1.0,
            n0: 1,
            l: 1.0,
            t_max: None,
            samples: 400,
            tau_max: 60,
            n_min: 1,
            n_max: 10,
            deltas: vec![0.05],
            array_count: None,
            array_spacing: None,
            k_nodes: 201,
            wigner_times: None,
            shear: false,
            x_half_span: 2.0,
            x_samples: 401,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

impl ScenarioConfig {
    /// Default simulation window: the focus of a packet of 2N+1 cells is
    /// interior to [0, 3 * 1.2 * 0.026 (2N+1)^2 / |lambda|].
    pub fn effective_t_max(&self) -> f64 {
        if let Some(t) = self.t_max {
            return t;
        }
        match self.model {
            Model::Continuum => 0.1 * self.l * self.l,
            _ => {
                let width = (2 * self.n_half as u64 + 1) as f64;
                3.0 * 1.2 * 0.026 * width * width / self.lambda.abs()
            }
        }
    }

    /// Scan time window: sized for the largest packet in the range.
    pub fn scan_t_max(&self) -> f64 {
        if let Some(t) = self.t_max {
            return t;
        }
        let width = (2 * self.n_max as u64 + 1) as f64;
        3.0 * 1.2 * 0.026 * width * width / self.lambda.abs()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !self.delta.is_finite() {
            return Err(CliError::Config("delta must be finite".into()));
        }
        if self.lambda == 0.0 || !self.lambda.is_finite() {
            return Err(CliError::Config("lambda must be finite and non-zero".into()));
        }
        if self.l <= 0.0 || !self.l.is_finite() {
            return Err(CliError::Config("L must be positive".into()));
        }
        if self.samples < 3 {
            return Err(CliError::Config("samples must be at least 3".into()));
        }
        if self.n_min > self.n_max {
            return Err(CliError::Config("n_min must not exceed n_max".into()));
        }
        if self.n_min == 0 {
            return Err(CliError::Config("scan sizes must be positive".into()));
        }
        if let Some(t) = self.t_max {
            if t <= 0.0 || !t.is_finite() {
                return Err(CliError::Config("t_max must be positive".into()));
            }
        }
        if self.k_nodes < 2 {
            return Err(CliError::Config("k_nodes must be at least 2".into()));
        }
        if self.x_samples < 3 {
            return Err(CliError::Config("x_samples must be at least 3".into()));
        }
        if self.deltas.is_empty() {
            return Err(CliError::Config("deltas must not be empty".into()));
        }
        if let (Some(count), spacing) = (self.array_count, self.array_spacing) {
            let spacing =
                spacing.unwrap_or_else(|| focuslab_core::tightbinding::PacketArraySpec::default_spacing(self.n_half));
            focuslab_core::tightbinding::PacketArraySpec::new(count, self.n_half, spacing)
                .map_err(CliError::from)?;
        }
        if let Some(times) = &self.wigner_times {
            if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
                return Err(CliError::Config(
                    "wigner times must be non-negative and finite".into(),
                ));
            }
        }
        Ok(())
    }

    /// The effective configuration as a flat dotted-key map. Re-parsing
    /// the map yields an equivalent configuration.
    pub fn to_echo_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("scenario.model".into(), self.model.as_str().into());
        m.insert("scenario.n".into(), self.n_half.to_string());
        m.insert("scenario.delta".into(), format_f64(self.delta));
        m.insert("scenario.lambda".into(), format_f64(self.lambda));
        m.insert("scenario.n0".into(), self.n0.to_string());
        m.insert("scenario.l".into(), format_f64(self.l));
        if let Some(t) = self.t_max {
            m.insert("time.t_max".into(), format_f64(t));
        }
        m.insert("time.samples".into(), self.samples.to_string());
        m.insert("time.tau_max".into(), self.tau_max.to_string());
        m.insert("scan.n_min".into(), self.n_min.to_string());
        m.insert("scan.n_max".into(), self.n_max.to_string());
        m.insert(
            "scan.deltas".into(),
            self.deltas.iter().map(|d| format_f64(*d)).collect::<Vec<_>>().join(","),
        );
        if let Some(c) = self.array_count {
            m.insert("array.count".into(), c.to_string());
        }
        if let Some(s) = self.array_spacing {
            m.insert("array.spacing".into(), s.to_string());
        }
        m.insert("wigner.k_nodes".into(), self.k_nodes.to_string());
        if let Some(times) = &self.wigner_times {
            m.insert(
                "wigner.times".into(),
                times.iter().map(|t| format_f64(*t)).collect::<Vec<_>>().join(","),
            );
        }
        m.insert("wigner.shear".into(), self.shear.to_string());
        m.insert("continuum.x_half_span".into(), format_f64(self.x_half_span));
        m.insert("continuum.x_samples".into(), self.x_samples.to_string());
        m.insert("output.dir".into(), self.out_dir.display().to_string());
        m.insert("output.format".into(), self.format.as_str().into());
        m
    }

    /// Rebuild a configuration from a dotted-key map (the manifest echo).
    pub fn from_echo_map(map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut cfg = ScenarioConfig::default();
        for (key, value) in map {
            apply_key(&mut cfg, key, value)
                .map_err(|e| CliError::Config(format!("echo key '{key}': {e}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse a key=value file with [section] headers. Keys outside any
    /// section belong to [scenario].
    pub fn apply_file(&mut self, text: &str, path: &str) -> Result<(), CliError> {
        let mut section = "scenario".to_string();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_string();
                const SECTIONS: [&str; 7] =
                    ["scenario", "time", "scan", "array", "wigner", "continuum", "output"];
                if !SECTIONS.contains(&section.as_str()) {
                    return Err(CliError::Config(format!(
                        "{path}:{}: unknown section [{section}]",
                        lineno + 1
                    )));
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{path}:{}: expected key = value, got '{line}'",
                    lineno + 1
                )));
            };
            let dotted = format!("{section}.{}", key.trim());
            apply_key(self, &dotted, value.trim()).map_err(|e| {
                CliError::Config(format!("{path}:{}: {e}", lineno + 1))
            })?;
        }
        Ok(())
    }
}

/// Shortest round-trip representation of a double.
pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

fn apply_key(cfg: &mut ScenarioConfig, dotted: &str, value: &str) -> Result<(), String> {
    let parse_f64 = |v: &str| v.parse::<f64>().map_err(|_| format!("bad number '{v}'"));
    let parse_u32 = |v: &str| v.parse::<u32>().map_err(|_| format!("bad integer '{v}'"));
    let parse_usize = |v: &str| v.parse::<usize>().map_err(|_| format!("bad integer '{v}'"));
    let parse_list = |v: &str| -> Result<Vec<f64>, String> {
        v.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number '{p}'")))
            .collect()
    };
    match dotted {
        "scenario.model" => cfg.model = Model::parse(value).map_err(|e| e.to_string())?,
        "scenario.n" => cfg.n_half = parse_u32(value)?,
        "scenario.delta" => cfg.delta = parse_f64(value)?,
        "scenario.lambda" => cfg.lambda = parse_f64(value)?,
        "scenario.n0" => cfg.n0 = parse_u32(value)?,
        "scenario.l" => cfg.l = parse_f64(value)?,
        "time.t_max" => cfg.t_max = Some(parse_f64(value)?),
        "time.samples" => cfg.samples = parse_usize(value)?,
        "time.tau_max" => cfg.tau_max = parse_u32(value)?,
        "scan.n_min" => cfg.n_min = parse_u32(value)?,
        "scan.n_max" => cfg.n_max = parse_u32(value)?,
        "scan.deltas" => cfg.deltas = parse_list(value)?,
        "array.count" => cfg.array_count = Some(parse_u32(value)?),
        "array.spacing" => cfg.array_spacing = Some(parse_u32(value)?),
        "wigner.k_nodes" => cfg.k_nodes = parse_usize(value)?,
        "wigner.times" => cfg.wigner_times = Some(parse_list(value)?),
        "wigner.shear" => {
            cfg.shear = value
                .parse::<bool>()
                .map_err(|_| format!("bad boolean '{value}'"))?
        }
        "continuum.x_half_span" => cfg.x_half_span = parse_f64(value)?,
        "continuum.x_samples" => cfg.x_samples = parse_usize(value)?,
        "output.dir" => cfg.out_dir = PathBuf::from(value),
        "output.format" => cfg.format = OutputFormat::parse(value).map_err(|e| e.to_string())?,
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}

/// Command-line flag overrides, applied after any config file.
pub fn apply_flag(cfg: &mut ScenarioConfig, flag: &str, value: &str) -> Result<(), CliError> {
    let dotted = match flag {
        "--model" => "scenario.model",
        "--N" => "scenario.n",
        "--delta" => "scenario.delta",
        "--lambda" => "scenario.lambda",
        "--n0" => "scenario.n0",
        "--L" => "scenario.l",
        "--tmax" => "time.t_max",
        "--samples" => "time.samples",
        "--taumax" => "time.tau_max",
        "--nmin" => "scan.n_min",
        "--nmax" => "scan.n_max",
        "--deltas" => "scan.deltas",
        "--count" => "array.count",
        "--spacing" => "array.spacing",
        "--knodes" => "wigner.k_nodes",
        "--wigner-times" => "wigner.times",
        "--shear" => "wigner.shear",
        "--xspan" => "continuum.x_half_span",
        "--xsamples" => "continuum.x_samples",
        "--out" => "output.dir",
        "--format" => "output.format",
        other => return Err(CliError::Config(format!("unknown flag '{other}'"))),
    };
    apply_key(cfg, dotted, value).map_err(|e| CliError::Config(format!("{flag}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn file_sections_and_overrides() {
        let mut cfg = ScenarioConfig::default();
        cfg.apply_file(
            "model = automaton\nn = 5\n[time]\ntau_max = 40\n[output]\nformat = json\n",
            "test.conf",
        )
        .unwrap();
        assert_eq!(cfg.model, Model::Automaton);
        assert_eq!(cfg.n_half, 5);
        assert_eq!(cfg.tau_max, 40);
        assert_eq!(cfg.format, OutputFormat::Json);
        apply_flag(&mut cfg, "--N", "9").unwrap();
        assert_eq!(cfg.n_half, 9);
    }

    #[test]
    fn unknown_key_is_line_precise() {
        let mut cfg = ScenarioConfig::default();
        let err = cfg
            .apply_file("n = 5\nbogus = 1\n", "my.conf")
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("my.conf:2"), "{msg}");
        assert!(msg.contains("bogus"), "{msg}");
    }

    #[test]
    fn echo_round_trip() {
        let mut cfg = ScenarioConfig::default();
        cfg.model = Model::Automaton;
        cfg.n_half = 3;
        cfg.t_max = Some(12.5);
        cfg.deltas = vec![0.05, 0.07];
        cfg.wigner_times = Some(vec![0.0, 11.8015]);
        cfg.array_count = Some(9);
        cfg.array_spacing = Some(7);
        cfg.shear = true;
        let echo = cfg.to_echo_map();
        let back = ScenarioConfig::from_echo_map(&echo).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn bad_values_rejected() {
        let mut cfg = ScenarioConfig::default();
        assert!(apply_flag(&mut cfg, "--model", "quantum").is_err());
        assert!(apply_flag(&mut cfg, "--N", "-3").is_err());
        assert!(apply_flag(&mut cfg, "--whatever", "1").is_err());
        cfg.lambda = 0.0;
        assert!(cfg.validate().is_err());
    }
}
