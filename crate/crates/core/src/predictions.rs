//! Prediction files: `id<TAB>label<TAB>p_0<TAB>p_1[<TAB>p_2]`, no header.
//!
//! The task is implied by the number of probability columns.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::corpus::Task;
use crate::error::{Error, Result};

/// Row sums may drift from 1 by this much after decimal round-trips.
const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub id: String,
    pub label: usize,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub task: Task,
    pub rows: Vec<PredictionRow>,
}

fn task_for_width(width: usize) -> Option<Task> {
    [Task::Binary, Task::Ternary]
        .into_iter()
        .find(|t| t.num_classes() == width)
}

pub fn parse_predictions(input: &str) -> Result<Predictions> {
    let mut task = None;
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let row_task = (cols.len() >= 2)
            .then(|| task_for_width(cols.len() - 2))
            .flatten()
            .ok_or_else(|| {
                Error::parse(
                    line_no,
                    format!("expected 4 or 5 tab-separated columns, found {}", cols.len()),
                )
            })?;
        if *task.get_or_insert(row_task) != row_task {
            return Err(Error::parse(line_no, "rows disagree on the number of classes"));
        }
        let id = cols[0];
        if id.is_empty() {
            return Err(Error::parse(line_no, "empty id"));
        }
        let label = row_task
            .class_from_token(cols[1])
            .ok_or_else(|| Error::parse(line_no, format!("unknown label {:?} for {} task", cols[1], row_task)))?;
        let probs = cols[2..]
            .iter()
            .map(|c| match c.parse::<f64>() {
                Ok(p) if p.is_finite() && (0.0..=1.0).contains(&p) => Ok(p),
                _ => Err(Error::parse(line_no, format!("invalid probability {c:?}"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::parse(line_no, format!("probabilities sum to {sum}")));
        }
        if !seen.insert(id.to_owned()) {
            return Err(Error::parse(line_no, format!("duplicate id {id:?}")));
        }
        rows.push(PredictionRow {
            id: id.to_owned(),
            label,
            probs,
        });
    }
    let task = task.ok_or_else(|| Error::Data("prediction file is empty".into()))?;
    Ok(Predictions { task, rows })
}

pub fn format_predictions(task: Task, rows: &[PredictionRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let _ = write!(out, "{}\t{}", row.id, task.class_token(row.label));
        for p in &row.probs {
            let _ = write!(out, "\t{p}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rows = vec![
            PredictionRow {
                id: "a".into(),
                label: 2,
                probs: vec![0.1, 0.2, 0.7],
            },
            PredictionRow {
                id: "b".into(),
                label: 0,
                probs: vec![0.5, 0.25, 0.25],
            },
        ];
        let text = format_predictions(Task::Ternary, &rows);
        assert!(text.starts_with("a\tnon_conspiracy\t0.1\t0.2\t0.7\n"));
        let parsed = parse_predictions(&text).unwrap();
        assert_eq!(parsed.task, Task::Ternary);
        assert_eq!(parsed.rows, rows);
    }

    #[test]
    fn binary_width_and_tokens() {
        let p = parse_predictions("x\t5g_corona_conspiracy\t0.9\t0.1\ny\tnot_5g\t0.2\t0.8\n").unwrap();
        assert_eq!(p.task, Task::Binary);
        assert_eq!(p.rows[1].label, 1);
    }

    #[test]
    fn rejects_bad_rows() {
        for bad in [
            "x\t5g_corona_conspiracy\t0.9\n",
            "x\tnot_5g\t0.9\t0.2\n",
            "x\tnon_conspiracy\t0.5\t0.5\n",
            "x\tnot_5g\tNaN\t0.5\n",
            "x\tnot_5g\t0.5\t0.5\nx\tnot_5g\t0.5\t0.5\n",
            "x\tnot_5g\t0.5\t0.5\ny\tnon_conspiracy\t0.2\t0.3\t0.5\n",
            "",
        ] {
            assert!(parse_predictions(bad).is_err(), "{bad:?}");
        }
    }
}
