//! Classification metrics: per-class and macro F1, rank-based AUC-ROC,
//! macro one-vs-rest AUC and confusion matrices.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Scores {
    pub per_class: Vec<f64>,
    pub macro_f1: f64,
    /// Classes with precision + recall = 0 (scored 0 by convention).
    pub undefined: Vec<usize>,
}

pub fn confusion_matrix(truth: &[usize], predicted: &[usize], num_classes: usize) -> Result<Vec<Vec<u64>>> {
    if truth.len() != predicted.len() {
        return Err(Error::Shape(format!(
            "{} truth labels for {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    let mut m = vec![vec![0u64; num_classes]; num_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        if t >= num_classes || p >= num_classes {
            return Err(Error::Data(format!("label out of range for {num_classes} classes")));
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// Per-class F1 `2PR/(P+R)` (0 when P+R = 0) and their unweighted mean.
pub fn f1_scores(truth: &[usize], predicted: &[usize], num_classes: usize) -> Result<F1Scores> {
    if truth.is_empty() {
        return Err(Error::Data("cannot score an empty prediction set".into()));
    }
    let cm = confusion_matrix(truth, predicted, num_classes)?;
    let mut per_class = Vec::with_capacity(num_classes);
    let mut undefined = Vec::new();
    for (c, row) in cm.iter().enumerate() {
        let tp = row[c] as f64;
        let predicted_c: u64 = cm.iter().map(|r| r[c]).sum();
        let actual_c: u64 = row.iter().sum();
        let precision = if predicted_c > 0 { tp / predicted_c as f64 } else { 0.0 };
        let recall = if actual_c > 0 { tp / actual_c as f64 } else { 0.0 };
        if precision + recall == 0.0 {
            if predicted_c == 0 && actual_c == 0 {
                undefined.push(c);
            }
            per_class.push(0.0);
        } else {
            per_class.push(2.0 * precision * recall / (precision + recall));
        }
    }
    let macro_f1 = per_class.iter().sum::<f64>() / num_classes as f64;
    Ok(F1Scores {
        per_class,
        macro_f1,
        undefined,
    })
}

/// Probability that a random positive outscores a random negative, ties
/// counted as one half. Computed from midranks in O(n log n).
pub fn auc_roc(truth: &[bool], scores: &[f64]) -> Result<f64> {
    if truth.len() != scores.len() {
        return Err(Error::Shape(format!(
            "{} labels for {} scores",
            truth.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Data("NaN score".into()));
    }
    let n_pos = truth.iter().filter(|&&t| t).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Data("AUC needs both positive and negative samples".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1..=j+1 share their mean
        let midrank = (i + j + 2) as f64 / 2.0;
        rank_sum_pos += midrank * order[i..=j].iter().filter(|&&k| truth[k]).count() as f64;
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvrAuc {
    pub macro_auc: f64,
    /// One-vs-rest AUC per class; `None` when the class is absent from the truth.
    pub per_class: Vec<Option<f64>>,
    pub skipped: Vec<usize>,
}

/// Mean one-vs-rest AUC over the classes present in `truth`.
/// `probs[i][c]` is the score of sample `i` for class `c`.
pub fn macro_ovr_auc(truth: &[usize], probs: &[Vec<f64>], num_classes: usize) -> Result<OvrAuc> {
    if truth.len() != probs.len() {
        return Err(Error::Shape(format!(
            "{} labels for {} score rows",
            truth.len(),
            probs.len()
        )));
    }
    if probs.iter().any(|row| row.len() != num_classes) {
        return Err(Error::Shape(format!("score rows must have {num_classes} columns")));
    }
    if truth.iter().any(|&t| t >= num_classes) {
        return Err(Error::Data(format!("label out of range for {num_classes} classes")));
    }
    let mut present = vec![false; num_classes];
    for &t in truth {
        present[t] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::Data("macro AUC needs at least two classes present".into()));
    }
    let mut per_class = Vec::with_capacity(num_classes);
    let mut skipped = Vec::new();
    for c in 0..num_classes {
        if !present[c] {
            skipped.push(c);
            per_class.push(None);
            continue;
        }
        let is_c: Vec<bool> = truth.iter().map(|&t| t == c).collect();
        let col: Vec<f64> = probs.iter().map(|row| row[c]).collect();
        per_class.push(Some(auc_roc(&is_c, &col)?));
    }
    let scored: Vec<f64> = per_class.iter().flatten().copied().collect();
    Ok(OvrAuc {
        macro_auc: scored.iter().sum::<f64>() / scored.len() as f64,
        per_class,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub n: usize,
    pub macro_f1: f64,
    pub per_class_f1: Vec<f64>,
    pub undefined_f1_classes: Vec<usize>,
    /// Binary: AUC of the 5G-class probability. Ternary: macro one-vs-rest AUC.
    /// `None` when fewer than two classes are present in the truth.
    pub auc: Option<f64>,
    pub skipped_auc_classes: Vec<usize>,
    pub confusion: Vec<Vec<u64>>,
}

/// Score hard predictions and class probabilities against the truth.
pub fn evaluate(task: Task, truth: &[usize], predicted: &[usize], probs: &[Vec<f64>]) -> Result<EvalReport> {
    let k = task.num_classes();
    let f1 = f1_scores(truth, predicted, k)?;
    let confusion = confusion_matrix(truth, predicted, k)?;
    let (auc, skipped) = match macro_ovr_auc(truth, probs, k) {
        Ok(ovr) => {
            let auc = if task == Task::Binary {
                let pos: Vec<bool> = truth.iter().map(|&t| t == 0).collect();
                let col: Vec<f64> = probs.iter().map(|r| r[0]).collect();
                auc_roc(&pos, &col)?
            } else {
                ovr.macro_auc
            };
            (Some(auc), ovr.skipped)
        }
        Err(Error::Data(_)) => (None, (0..k).filter(|c| !truth.contains(c)).collect()),
        Err(e) => return Err(e),
    };
    Ok(EvalReport {
        task,
        n: truth.len(),
        macro_f1: f1.macro_f1,
        per_class_f1: f1.per_class,
        undefined_f1_classes: f1.undefined,
        auc,
        skipped_auc_classes: skipped,
        confusion,
    })
}

/// Fixed-width results table: run id, dev metric, test metric.
pub fn format_table(rows: &[(String, Option<f64>, Option<f64>)], dev_header: &str, test_header: &str) -> String {
    let cell = |v: &Option<f64>| v.map_or_else(|| "-".to_owned(), |x| format!("{x:.4}"));
    let mut out = String::new();
    let _ = writeln!(out, "| {:<8} | {:>18} | {:>18} |", "Run", dev_header, test_header);
    let _ = writeln!(out, "|{:-<10}|{:-<20}|{:-<20}|", "", "", "");
    for (name, dev, test) in rows {
        let _ = writeln!(out, "| {:<8} | {:>18} | {:>18} |", name, cell(dev), cell(test));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_f1() {
        let f = f1_scores(&[0, 1, 2, 1], &[0, 1, 2, 1], 3).unwrap();
        assert_eq!(f.per_class, vec![1.0; 3]);
        assert_eq!(f.macro_f1, 1.0);
    }

    #[test]
    fn hand_computed_f1() {
        let f = f1_scores(&[0, 0, 1, 1], &[0, 1, 1, 1], 2).unwrap();
        assert!((f.per_class[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((f.per_class[1] - 0.8).abs() < 1e-15);
        assert!((f.macro_f1 - (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-15);
        assert!((f.macro_f1 - 0.7333).abs() < 1e-4);
    }

    #[test]
    fn absent_class_scores_zero() {
        let f = f1_scores(&[0, 1], &[0, 1], 3).unwrap();
        assert_eq!(f.per_class[2], 0.0);
        assert_eq!(f.undefined, vec![2]);
        assert!(f1_scores(&[], &[], 2).is_err());
    }

    #[test]
    fn worked_auc() {
        let auc = auc_roc(&[false, false, true, true], &[0.1, 0.4, 0.35, 0.8]).unwrap();
        assert_eq!(auc, 0.75);
        assert_eq!(auc_roc(&[false, true], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(auc_roc(&[false, true, true, false], &[0.3; 4]).unwrap(), 0.5);
        assert!(auc_roc(&[true, true], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn ovr_edge_cases() {
        let truth = [0, 1, 2, 0];
        let perfect: Vec<Vec<f64>> = truth
            .iter()
            .map(|&t| (0..3).map(|c| if c == t { 1.0 } else { 0.0 }).collect())
            .collect();
        assert_eq!(macro_ovr_auc(&truth, &perfect, 3).unwrap().macro_auc, 1.0);
        let uniform = vec![vec![1.0 / 3.0; 3]; 4];
        assert_eq!(macro_ovr_auc(&truth, &uniform, 3).unwrap().macro_auc, 0.5);
        let partial = macro_ovr_auc(&[0, 1], &[vec![0.9, 0.1, 0.0], vec![0.2, 0.8, 0.0]], 3).unwrap();
        assert_eq!(partial.skipped, vec![2]);
        assert_eq!(partial.macro_auc, 1.0);
        assert!(macro_ovr_auc(&[1, 1], &[vec![0.5; 3], vec![0.5; 3]], 3).is_err());
    }

    #[test]
    fn report_for_binary_uses_positive_column() {
        let r = evaluate(
            Task::Binary,
            &[0, 1, 1, 0],
            &[0, 1, 0, 0],
            &[vec![0.9, 0.1], vec![0.2, 0.8], vec![0.6, 0.4], vec![0.7, 0.3]],
        )
        .unwrap();
        assert_eq!(r.auc, Some(1.0));
        assert_eq!(r.confusion, vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(r.confusion.iter().flatten().sum::<u64>(), 4);
    }

    #[test]
    fn table_layout() {
        let t = format_table(&[("run1".into(), Some(0.6066), None)], "Dev (F1)", "Test (ROC)");
        assert!(
            t.contains("| run1     |             0.6066 |                  - |"),
            "{t}"
        );
    }
}
