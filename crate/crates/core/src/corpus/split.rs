use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{LabeledTweet, Task};
use crate::error::{Error, Result};
use crate::rng;

/// Train/valid/test fractions plus the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub valid_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            valid_fraction: 0.1,
            test_fraction: 0.1,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn with_seed(seed: u64) -> Self {
        SplitSpec {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fractions = [self.train_fraction, self.valid_fraction, self.test_fraction];
        if fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
            return Err(Error::Validation(format!(
                "split fractions must lie in (0,1), got {fractions:?}"
            )));
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("split fractions sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Part sizes for `n` items: valid and test are floored, the remainder goes to train.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let part = |f: f64| ((n as f64) * f + 1e-9).floor() as usize;
        let valid = part(self.valid_fraction);
        let test = part(self.test_fraction);
        (n - valid - test, valid, test)
    }
}

/// Deterministically shuffle and cut into (train, valid, test).
pub fn split_dataset<T: Clone>(items: &[T], spec: &SplitSpec) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    spec.validate()?;
    if items.is_empty() {
        return Err(Error::Data("cannot split an empty dataset".into()));
    }
    let (n_train, n_valid, n_test) = spec.sizes(items.len());
    if n_valid == 0 || n_test == 0 {
        return Err(Error::Data(format!(
            "{} items give an empty valid or test part under {spec:?}",
            items.len()
        )));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut rng::seeded(spec.seed));
    let pick = |idx: &[usize]| idx.iter().map(|&i| items[i].clone()).collect::<Vec<_>>();
    Ok((
        pick(&order[..n_train]),
        pick(&order[n_train..n_train + n_valid]),
        pick(&order[n_train + n_valid..]),
    ))
}

/// Index-level majority-class partitioning.
///
/// `classes[i]` is the class of sample `i`. Returns `n_parts` index lists:
/// list `k` holds the `k`-th slice of the shuffled majority class followed by
/// every non-majority index, all in ascending order.
pub fn partition_indices(classes: &[usize], num_classes: usize, n_parts: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if n_parts < 2 {
        return Err(Error::Validation(format!("n_parts must be >= 2, got {n_parts}")));
    }
    if classes.is_empty() {
        return Err(Error::Data("cannot partition an empty dataset".into()));
    }
    let mut counts = vec![0usize; num_classes];
    for &c in classes {
        if c >= num_classes {
            return Err(Error::Data(format!("class {c} out of range")));
        }
        counts[c] += 1;
    }
    // ties go to the lower class index
    let majority = (0..num_classes)
        .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
        .expect("num_classes > 0");
    let mut major: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] == majority).collect();
    if major.len() < n_parts {
        return Err(Error::Data(format!(
            "majority class has {} samples, fewer than {n_parts} parts",
            major.len()
        )));
    }
    major.shuffle(&mut rng::seeded(seed));
    let minority: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] != majority).collect();

    let base = major.len() / n_parts;
    let extra = major.len() % n_parts;
    let mut parts = Vec::with_capacity(n_parts);
    let mut start = 0;
    for k in 0..n_parts {
        let len = base + usize::from(k < extra);
        let mut part: Vec<usize> = major[start..start + len].to_vec();
        start += len;
        part.extend_from_slice(&minority);
        part.sort_unstable();
        parts.push(part);
    }
    Ok(parts)
}

/// Split the majority class (under `task`'s label mapping) into `n_parts`
/// near-equal slices and pair each slice with all remaining samples.
pub fn partition_majority(
    items: &[LabeledTweet],
    task: Task,
    n_parts: usize,
    seed: u64,
) -> Result<Vec<Vec<LabeledTweet>>> {
    let classes: Vec<usize> = items.iter().map(|t| task.class_of(t.label)).collect();
    let parts = partition_indices(&classes, task.num_classes(), n_parts, seed)?;
    Ok(parts
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| items[i].clone()).collect())
        .collect())
}
