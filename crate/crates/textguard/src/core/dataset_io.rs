//! Dataset loading.
//!
//! TSV: `text<TAB>label` or `premise<TAB>hypothesis<TAB>label`, UTF-8, one
//! example per line. JSONL: one object per line with `text`, `label`, and
//! optional `premise` / `id` fields. The label set is inferred from the data
//! in first-appearance order unless declared by the caller.

use super::{CoreError, Dataset, Result, Split, TextExample};
use serde::Deserialize;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

/// On-disk dataset formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Tsv,
    Jsonl,
}

#[derive(Deserialize)]
struct JsonlRow {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    premise: Option<String>,
    text: String,
    label: String,
}

/// Load a dataset file. `declared_labels`, when given, fixes the label set
/// and rows with labels outside it are rejected; otherwise the label set is
/// inferred in first-appearance order.
pub fn load_dataset(
    path: &Path,
    format: DatasetFormat,
    name: &str,
    split: Split,
    declared_labels: Option<Vec<String>>,
) -> Result<Dataset> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);

    let mut label_set: Vec<String> = declared_labels.clone().unwrap_or_default();
    let declared = declared_labels.is_some();
    let mut examples = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (premise, text, label) = match format {
            DatasetFormat::Tsv => parse_tsv_row(&line, line_no)?,
            DatasetFormat::Jsonl => {
                let row: JsonlRow =
                    serde_json::from_str(&line).map_err(|e| CoreError::MalformedRow {
                        line: line_no,
                        reason: e.to_string(),
                    })?;
                (row.premise, row.text, row.label)
            }
        };
        if text.trim().is_empty() {
            return Err(CoreError::MalformedRow {
                line: line_no,
                reason: "empty text field".into(),
            });
        }
        if !label_set.contains(&label) {
            if declared {
                return Err(CoreError::UnknownLabel {
                    line: line_no,
                    label,
                    label_set: label_set.clone(),
                });
            }
            label_set.push(label.clone());
        }
        let id = match format {
            DatasetFormat::Jsonl => {
                // reparse for the optional id without cloning the whole row
                serde_json::from_str::<JsonlRow>(&line)
                    .ok()
                    .and_then(|r| r.id)
                    .unwrap_or_else(|| format!("{name}-{line_no}"))
            }
            DatasetFormat::Tsv => format!("{name}-{line_no}"),
        };
        let mut ex = TextExample::new(id, text, label);
        ex.premise = premise;
        examples.push(ex);
    }

    Dataset::new(name, split, label_set, examples)
}

fn parse_tsv_row(line: &str, line_no: usize) -> Result<(Option<String>, String, String)> {
    let fields: Vec<&str> = line.split('\t').collect();
    match fields.as_slice() {
        [text, label] => Ok((None, text.to_string(), label.to_string())),
        [premise, hypothesis, label] => Ok((
            Some(premise.to_string()),
            hypothesis.to_string(),
            label.to_string(),
        )),
        _ => Err(CoreError::MalformedRow {
            line: line_no,
            reason: format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_two_line_tsv() {
        let f = write_temp("great movie\tpos\nbad movie\tneg\n");
        let ds = load_dataset(f.path(), DatasetFormat::Tsv, "toy", Split::Train, None).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.label_set, vec!["pos", "neg"]);
        assert_eq!(ds.examples[0].text, "great movie");
    }

    #[test]
    fn loads_premise_hypothesis_rows() {
        let f = write_temp("a man walks\ta person moves\tentailment\n");
        let ds = load_dataset(f.path(), DatasetFormat::Tsv, "nli", Split::Test, None).unwrap();
        assert_eq!(ds.examples[0].premise.as_deref(), Some("a man walks"));
        assert_eq!(ds.examples[0].text, "a person moves");
    }

    #[test]
    fn large_file_preserves_row_count_and_split() {
        let rows: String = (0..9000)
            .map(|i| {
                if i % 2 == 0 {
                    format!("fine film number {i}\tpos\n")
                } else {
                    format!("dull film number {i}\tneg\n")
                }
            })
            .collect();
        let f = write_temp(&rows);
        let ds = load_dataset(f.path(), DatasetFormat::Tsv, "mr", Split::Train, None).unwrap();
        assert_eq!(ds.split, Split::Train);
        assert_eq!(ds.len(), 9000);
    }

    #[test]
    fn missing_label_column_errors_with_line() {
        let f = write_temp("great movie\tpos\njust a text with no label\n");
        let err = load_dataset(f.path(), DatasetFormat::Tsv, "toy", Split::Train, None);
        match err {
            Err(CoreError::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn declared_label_set_rejects_unknown() {
        let f = write_temp("great movie\tpos\nodd movie\tmaybe\n");
        let err = load_dataset(
            f.path(),
            DatasetFormat::Tsv,
            "toy",
            Split::Train,
            Some(vec!["pos".into(), "neg".into()]),
        );
        match err {
            Err(CoreError::UnknownLabel { line, label, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(label, "maybe");
            }
            other => panic!("expected UnknownLabel, got {other:?}"),
        }
    }

    #[test]
    fn jsonl_rows_round_trip() {
        let f = write_temp(
            "{\"id\":\"x1\",\"text\":\"solid film\",\"label\":\"pos\"}\n{\"text\":\"weak film\",\"label\":\"neg\"}\n",
        );
        let ds = load_dataset(f.path(), DatasetFormat::Jsonl, "toy", Split::Test, None).unwrap();
        assert_eq!(ds.examples[0].id, "x1");
        assert_eq!(ds.examples[1].id, "toy-2");
    }
}
