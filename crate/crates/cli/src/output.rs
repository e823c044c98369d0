//! Deterministic CSV and JSON emission: UTF-8, comma separator, `\n` line
//! endings, 17-significant-digit floats (round-trip exact for doubles),
//! no timestamps.

use crate::config::OutputFormat;

/// 17 significant digits; parses back to the identical double.
pub fn cell(v: f64) -> String {
    format!("{v:.16e}")
}

/// A named in-memory output file.
#[derive(Debug, Clone)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// A labeled matrix: `row_label` heads the first column, one named column
/// per matrix column, one row label value per row.
pub struct Table {
    pub comment: String,
    pub row_label: String,
    pub col_labels: Vec<String>,
    pub row_values: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Trailing `#` comment lines (summaries).
    pub footer: Vec<String>,
}

impl Table {
    pub fn render(&self, format: OutputFormat, name_stem: &str) -> OutputFile {
        match format {
            OutputFormat::Csv => self.render_csv(name_stem),
            OutputFormat::Json => self.render_json(name_stem),
        }
    }

    fn render_csv(&self, name_stem: &str) -> OutputFile {
        let mut s = String::new();
        s.push_str("# ");
        s.push_str(&self.comment);
        s.push('\n');
        s.push_str(&self.row_label);
        for label in &self.col_labels {
            s.push(',');
            s.push_str(label);
        }
        s.push('\n');
        for (value, row) in self.row_values.iter().zip(&self.rows) {
            s.push_str(value);
            for v in row {
                s.push(',');
                s.push_str(&cell(*v));
            }
            s.push('\n');
        }
        for line in &self.footer {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        OutputFile { name: format!("{name_stem}.csv"), bytes: s.into_bytes() }
    }

    fn render_json(&self, name_stem: &str) -> OutputFile {
        let mut root = serde_json::Map::new();
        root.insert("comment".into(), self.comment.clone().into());
        root.insert("row_label".into(), self.row_label.clone().into());
        root.insert(
            "columns".into(),
            serde_json::Value::Array(
                self.col_labels.iter().map(|l| l.clone().into()).collect(),
            ),
        );
        root.insert(
            "row_values".into(),
            serde_json::Value::Array(
                self.row_values.iter().map(|v| v.clone().into()).collect(),
            ),
        );
        root.insert(
            "rows".into(),
            serde_json::Value::Array(
                self.rows
                    .iter()
                    .map(|row| {
                        serde_json::Value::Array(
                            row.iter().map(|v| json_number(*v)).collect(),
                        )
                    })
                    .collect(),
            ),
        );
        if !self.footer.is_empty() {
            root.insert(
                "summary".into(),
                serde_json::Value::Array(self.footer.iter().map(|l| l.clone().into()).collect()),
            );
        }
        let mut bytes = serde_json::to_vec_pretty(&serde_json::Value::Object(root))
            .expect("static structure serializes");
        bytes.push(b'\n');
        OutputFile { name: format!("{name_stem}.json"), bytes }
    }
}

fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_round_trips() {
        for &v in &[0.0, 1.0 / 3.0, -2.5e-17, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = cell(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let t = Table {
            comment: "demo".into(),
            row_label: "time".into(),
            col_labels: vec!["a".into(), "b".into()],
            row_values: vec!["0".into(), "1".into()],
            rows: vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            footer: vec!["critical_N = 7".into()],
        };
        let f = t.render(OutputFormat::Csv, "grid");
        let s = String::from_utf8(f.bytes).unwrap();
        assert!(s.starts_with("# demo\ntime,a,b\n0,"));
        assert!(s.ends_with("# critical_N = 7\n"));
        assert_eq!(f.name, "grid.csv");
    }
}
