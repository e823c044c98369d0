//! Run manifest: config echo, library version, wall-clock duration, and
//! per-output checksums. Written only after every data file is on disk,
//! so a manifest's presence certifies a complete run. Timestamps live
//! here and only here.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::output::OutputFile;
use crate::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

/// Write all data files, then the manifest.
pub fn write_outputs(
    dir: &Path,
    config: &ScenarioConfig,
    command: &str,
    files: &[OutputFile],
    extra: BTreeMap<String, serde_json::Value>,
    duration_seconds: f64,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for f in files {
        let path = dir.join(&f.name);
        let mut handle = std::fs::File::create(&path)?;
        handle.write_all(&f.bytes)?;
    }

    let mut outputs = Vec::new();
    for f in files {
        let mut entry = serde_json::Map::new();
        entry.insert("file".into(), f.name.clone().into());
        entry.insert("sha256".into(), hex_digest(&f.bytes).into());
        entry.insert("bytes".into(), serde_json::Value::from(f.bytes.len() as u64));
        outputs.push(serde_json::Value::Object(entry));
    }

    let echo: serde_json::Map<String, serde_json::Value> = config
        .to_echo_map()
        .into_iter()
        .map(|(k, v)| (k, serde_json::Value::String(v)))
        .collect();

    let mut root = serde_json::Map::new();
    root.insert("tool".into(), "focuslab".into());
    root.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    root.insert("command".into(), command.into());
    root.insert("config".into(), serde_json::Value::Object(echo));
    root.insert(
        "duration_seconds".into(),
        serde_json::Number::from_f64(duration_seconds)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null),
    );
    root.insert(
        "created_unix_seconds".into(),
        serde_json::Value::from(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        ),
    );
    root.insert("outputs".into(), serde_json::Value::Array(outputs));
    for (k, v) in extra {
        root.insert(k, v);
    }

    let mut bytes = serde_json::to_vec_pretty(&serde_json::Value::Object(root))
        .expect("manifest serializes");
    bytes.push(b'\n');
    let mut handle = std::fs::File::create(dir.join(MANIFEST_NAME))?;
    handle.write_all(&bytes)?;
    Ok(())
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}
