use std::fmt::Write as _;

use super::benchmark::{BenchmarkReport, FeatureCell, MethodRow, RunMetadata};
use crate::error::{Error, Result};
use crate::forest::ForestSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

pub fn emit_report(r: &BenchmarkReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => r.to_csv(),
        ReportFormat::Markdown => r.to_markdown(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn pct(v: Option<f64>) -> String {
    v.map(|v| format!("{:.2}", 100.0 * v)).unwrap_or_else(|| "n/a".into())
}

impl BenchmarkReport {
    /// Flat form: `method,feature,score,rank,selected,train_auc,validation_auc`,
    /// one line per method and feature. Floats are written in shortest
    /// round-trip form.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,feature,score,rank,selected,train_auc,validation_auc\n");
        for row in &self.rows {
            for c in &row.cells {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    row.method,
                    c.feature,
                    opt(c.score),
                    opt(c.rank),
                    c.selected,
                    opt(row.train_auc),
                    opt(row.validation_auc)
                );
            }
        }
        s
    }

    /// Features as rows and methods as columns, selected cells in bold, then
    /// an AUC table with one line per method including the baseline.
    pub fn to_markdown(&self) -> String {
        let methods: Vec<&MethodRow> = self.rows.iter().skip(1).collect();
        let mut s = String::new();
        let _ = writeln!(s, "# Feature selection benchmark\n");
        let _ = writeln!(s, "Dataset fingerprint: `{}`  ", self.metadata.dataset_fingerprint);
        let _ = writeln!(
            s,
            "Rows: {} train, {} validation. Forest: {} trees, seed {}. Method seed: {}.\n",
            self.metadata.n_train,
            self.metadata.n_validation,
            self.metadata.forest.n_trees,
            self.metadata.forest.seed,
            self.metadata.method_seed
        );
        let _ = write!(s, "| Feature |");
        for m in &methods {
            let _ = write!(s, " {} |", m.method);
        }
        let _ = write!(s, "\n|---|");
        for _ in &methods {
            let _ = write!(s, "---|");
        }
        s.push('\n');
        for (j, name) in self.feature_names().iter().enumerate() {
            let _ = write!(s, "| {name} |");
            for m in &methods {
                let c = &m.cells[j];
                let text = match (c.score, c.rank) {
                    (Some(v), Some(r)) => format!("{v:.4} ({r})"),
                    (None, Some(r)) => format!("- ({r})"),
                    _ => "-".into(),
                };
                if c.selected {
                    let _ = write!(s, " **{text}** |");
                } else {
                    let _ = write!(s, " {text} |");
                }
            }
            s.push('\n');
        }
        let _ = writeln!(s, "\nSelected features are in bold.\n");
        let _ = writeln!(s, "| Method | Selected | Train AUC (%) | Validation AUC (%) |");
        let _ = writeln!(s, "|---|---|---|---|");
        for row in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} |",
                row.method,
                row.selected().len(),
                pct(row.train_auc),
                pct(row.validation_auc)
            );
        }
        s
    }

    /// Parse the CSV form. Metadata is not part of it and comes back empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let mut rows: Vec<MethodRow> = Vec::new();
        for (k, rec) in reader.records().enumerate() {
            let row_no = k + 2;
            let rec = rec.map_err(|e| Error::Parse {
                row: row_no,
                column: String::new(),
                message: e.to_string(),
            })?;
            if rec.len() != 7 {
                return Err(Error::Parse {
                    row: row_no,
                    column: String::new(),
                    message: format!("expected 7 fields, found {}", rec.len()),
                });
            }
            let bad = |column: &str, v: &str| Error::Parse {
                row: row_no,
                column: column.into(),
                message: format!("cannot parse {v:?}"),
            };
            let float = |i: usize, name: &str| -> Result<Option<f64>> {
                let v = &rec[i];
                if v.is_empty() {
                    Ok(None)
                } else {
                    v.parse().map(Some).map_err(|_| bad(name, v))
                }
            };
            let rank = if rec[3].is_empty() {
                None
            } else {
                Some(rec[3].parse().map_err(|_| bad("rank", &rec[3]))?)
            };
            let selected: bool = rec[4].parse().map_err(|_| bad("selected", &rec[4]))?;
            let cell = FeatureCell {
                feature: rec[1].to_string(),
                score: float(2, "score")?,
                rank,
                selected,
            };
            let (train_auc, validation_auc) = (float(5, "train_auc")?, float(6, "validation_auc")?);
            match rows.last_mut() {
                Some(r) if r.method == rec[0] => r.cells.push(cell),
                _ => rows.push(MethodRow {
                    method: rec[0].to_string(),
                    cells: vec![cell],
                    train_auc,
                    validation_auc,
                }),
            }
        }
        if rows.is_empty() {
            return Err(Error::invalid("empty report"));
        }
        Ok(Self {
            rows,
            metadata: RunMetadata {
                dataset_fingerprint: String::new(),
                forest: ForestSpec::default(),
                method_seed: 0,
                n_train: 0,
                n_validation: 0,
            },
        })
    }
}
