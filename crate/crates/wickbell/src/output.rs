//! CSV tables, summaries and manifests.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so a value read
//! back parses to the same `f64` and reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::RunError;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), RunError> {
        let csv_err = |source| RunError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush().map_err(|source| RunError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Scalar results of one run, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary(pub Vec<(String, String)>);

impl Summary {
    pub fn num(&mut self, key: &str, v: f64) {
        self.0.push((key.to_string(), fmt_f64(v)));
    }

    pub fn int(&mut self, key: &str, v: usize) {
        self.0.push((key.to_string(), v.to_string()));
    }

    pub fn flag(&mut self, key: &str, v: bool) {
        self.0.push((key.to_string(), v.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn table(&self) -> Table {
        let mut t = Table::new(&["metric", "value"]);
        for (k, v) in &self.0 {
            t.push(vec![k.clone(), v.clone()]);
        }
        t
    }
}

/// Everything an experiment produced before it is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub data: Table,
    pub summary: Summary,
    /// Lines for standard output.
    pub headline: Vec<String>,
}

/// Files written for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub data: PathBuf,
    pub summary: PathBuf,
    pub manifest: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `<name>.csv`, `<name>.summary.csv` and `<name>.manifest` into
/// `dir`. The manifest is itself a valid config file for the same run.
pub fn write_report(report: &Report, config: &Config, dir: &Path) -> Result<Written, RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let name = config.experiment().name();
    let written = Written {
        data: dir.join(format!("{name}.csv")),
        summary: dir.join(format!("{name}.summary.csv")),
        manifest: dir.join(format!("{name}.manifest")),
    };
    report.data.write(&written.data)?;
    report.summary.table().write(&written.summary)?;

    let file_name = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut m = String::new();
    m.push_str(&format!("# wickbell {}\n", wickbell_core::VERSION));
    m.push_str(&format!(
        "# outputs: {}, {}\n",
        file_name(&written.data),
        file_name(&written.summary)
    ));
    m.push_str(&format!("experiment = {name}\n"));
    for (k, v) in config.echo() {
        m.push_str(&format!("{k} = {v}\n"));
    }
    fs::write(&written.manifest, m).map_err(io_err(&written.manifest))?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for x in [0.1, -1.0 / 3.0, 2f64.sqrt() * 2.0, 1e-300, 6.02e23] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }
}
