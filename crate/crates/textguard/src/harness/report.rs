//! Machine-readable report emission: delimiter-separated metric tables and
//! plot-data files. Every cell is a pure fold over stored records.

use super::analysis::ScatterPoint;
use crate::core::ExperimentRecord;
use std::io::Write;
use std::path::Path;

/// One named table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn write_tsv(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut file = std::fs::File::create(dir.join(format!("{}.tsv", self.name)))?;
        writeln!(file, "{}", self.header.join("\t"))?;
        for row in &self.rows {
            writeln!(file, "{}", row.join("\t"))?;
        }
        Ok(())
    }
}

/// Tables plus plot-data series for one experiment suite.
#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    pub tables: Vec<Table>,
    pub learning_curves: Vec<(String, Vec<(usize, f64)>)>,
    pub histograms: Vec<(String, Vec<u64>)>,
    pub scatters: Vec<(String, Vec<ScatterPoint>)>,
}

impl ReportBundle {
    /// Standard metric row for a record.
    pub fn metrics_row(label: &str, record: &ExperimentRecord) -> Vec<String> {
        vec![
            label.to_string(),
            record.seed.to_string(),
            format!("{:.4}", record.metrics.original_accuracy),
            format!("{:.4}", record.metrics.after_attack_accuracy),
            format!("{:.4}", record.metrics.attack_success_rate),
            format!("{:.1}", record.metrics.avg_queries),
        ]
    }

    pub fn metrics_table(name: &str, rows: &[(String, &ExperimentRecord)]) -> Table {
        let mut table = Table::new(
            name,
            &[
                "run",
                "seed",
                "original_accuracy",
                "after_attack_accuracy",
                "attack_success_rate",
                "avg_queries",
            ],
        );
        for (label, record) in rows {
            table.push_row(Self::metrics_row(label, record));
        }
        table
    }

    /// Write every table and plot series under `dir`.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for table in &self.tables {
            table.write_tsv(dir)?;
        }
        for (name, points) in &self.learning_curves {
            let mut file = std::fs::File::create(dir.join(format!("curve-{name}.tsv")))?;
            writeln!(file, "n\taccuracy")?;
            for (n, acc) in points {
                writeln!(file, "{n}\t{acc:.4}")?;
            }
        }
        for (name, counts) in &self.histograms {
            let mut file = std::fs::File::create(dir.join(format!("histogram-{name}.tsv")))?;
            writeln!(file, "bin\tcount")?;
            for (i, c) in counts.iter().enumerate() {
                writeln!(file, "{i}\t{c}")?;
            }
        }
        for (name, points) in &self.scatters {
            let mut file = std::fs::File::create(dir.join(format!("scatter-{name}.tsv")))?;
            writeln!(file, "x\ty\tclass")?;
            for p in points {
                writeln!(
                    file,
                    "{:.6}\t{:.6}\t{}",
                    p.x,
                    p.y,
                    if p.adversarial { "adversarial" } else { "clean" }
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::recompute_metrics;

    #[test]
    fn table_round_trip_through_tsv() {
        let dir = tempfile::tempdir().unwrap();
        let mut table = Table::new("demo", &["a", "b"]);
        table.push_row(["1".to_string(), "2".to_string()]);
        table.write_tsv(dir.path()).unwrap();
        let content = std::fs::read_to_string(dir.path().join("demo.tsv")).unwrap();
        assert_eq!(content, "a\tb\n1\t2\n");
    }

    #[test]
    fn metric_rows_are_pure_folds_of_records() {
        let record = ExperimentRecord::from_outcomes("d", 1, vec![]);
        let row = ReportBundle::metrics_row("x", &record);
        let refolded = recompute_metrics(&record.per_example);
        assert_eq!(row[2], format!("{:.4}", refolded.original_accuracy));
    }
}
