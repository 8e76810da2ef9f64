//! Majority-class resampling ensembles and their late-fusion rules.
//!
//! The majority class is cut into `n` slices; member `i` is trained on
//! slice `i` plus every minority sample. At prediction time the members'
//! posteriors are combined by plurality vote (ties resolved by summed
//! posteriors) or by posterior summation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{partition_majority, LabeledTweet, StopWords, Task, TokenDoc};
use crate::error::{Error, Result};
use crate::features::{vectorize, EmbeddingTable, Vocabulary};
use crate::text_models::{
    argmax, lr_posterior, lr_train, nb_posterior, nb_train, LogisticRegressionModel, LrConfig, NaiveBayesModel,
    PosteriorVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FusionRule {
    #[serde(rename = "vote")]
    MajorityVote,
    #[serde(rename = "sum")]
    ScoreSum,
}

impl FromStr for FusionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vote" => Ok(FusionRule::MajorityVote),
            "sum" => Ok(FusionRule::ScoreSum),
            _ => Err(Error::Validation(format!("unknown fusion rule {s:?}"))),
        }
    }
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionRule::MajorityVote => "vote",
            FusionRule::ScoreSum => "sum",
        })
    }
}

/// Base learner of an ensemble, with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseConfig {
    Nb { alpha: f64, min_df: usize },
    Lr(LrConfig),
}

impl BaseConfig {
    pub fn nb_default() -> Self {
        BaseConfig::Nb { alpha: 1.0, min_df: 2 }
    }

    pub fn lr_default() -> Self {
        BaseConfig::Lr(LrConfig::default())
    }
}

/// One trained member.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierModel {
    NaiveBayes {
        vocabulary: Vocabulary,
        model: NaiveBayesModel,
    },
    Logistic(LogisticRegressionModel),
}

/// Inputs a member may need for one sample.
#[derive(Debug, Clone, Copy)]
pub struct TextSample<'a> {
    pub doc: &'a TokenDoc,
    pub embedding: Option<&'a [f64]>,
}

impl ClassifierModel {
    pub fn posterior(&self, sample: TextSample<'_>) -> Result<PosteriorVector> {
        match self {
            ClassifierModel::NaiveBayes { vocabulary, model } => {
                Ok(nb_posterior(model, &vectorize(sample.doc, vocabulary)))
            }
            ClassifierModel::Logistic(model) => {
                let emb = sample
                    .embedding
                    .ok_or_else(|| Error::MissingId(sample.doc.id.clone()))?;
                lr_posterior(model, emb)
            }
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            ClassifierModel::NaiveBayes { model, .. } => model.num_classes,
            ClassifierModel::Logistic(m) => m.num_classes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    pub members: Vec<ClassifierModel>,
    pub rule: FusionRule,
    pub task: Task,
    pub partition_seed: u64,
}

/// Fused decision for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Fused {
    pub label: usize,
    /// Normalized posterior sum, reported under either rule.
    pub probs: PosteriorVector,
}

fn check_members(posteriors: &[PosteriorVector]) -> Result<usize> {
    let first = posteriors
        .first()
        .ok_or_else(|| Error::Data("no member posteriors to fuse".into()))?;
    let k = first.num_classes();
    if posteriors.iter().any(|p| p.num_classes() != k) {
        return Err(Error::Shape("members disagree on the number of classes".into()));
    }
    Ok(k)
}

/// Per-class posterior sums. Each class adds its values in ascending order so
/// the result, and every tie it decides, does not depend on member order.
fn summed(posteriors: &[PosteriorVector], k: usize) -> Vec<f64> {
    (0..k)
        .map(|c| {
            let mut column: Vec<f64> = posteriors.iter().map(|p| p.probs()[c]).collect();
            column.sort_by(f64::total_cmp);
            column.iter().sum()
        })
        .collect()
}

fn normalized(sums: &[f64]) -> PosteriorVector {
    let total: f64 = sums.iter().sum();
    PosteriorVector::new(sums.iter().map(|s| s / total).collect()).expect("sum of posteriors normalizes")
}

/// Plurality vote over member argmaxes; a plurality tie is settled by the
/// summed posteriors of the tied classes.
pub fn fuse_vote(posteriors: &[PosteriorVector]) -> Result<Fused> {
    let k = check_members(posteriors)?;
    let mut votes = vec![0usize; k];
    for p in posteriors {
        votes[p.argmax()] += 1;
    }
    let top = *votes.iter().max().expect("k > 0");
    let tied: Vec<usize> = (0..k).filter(|&c| votes[c] == top).collect();
    let sums = summed(posteriors, k);
    let mut label = tied[0];
    for &c in &tied[1..] {
        if sums[c] > sums[label] {
            label = c;
        }
    }
    Ok(Fused {
        label,
        probs: normalized(&sums),
    })
}

/// Argmax of the summed posteriors (ties to the lower class).
pub fn fuse_sum(posteriors: &[PosteriorVector]) -> Result<Fused> {
    let k = check_members(posteriors)?;
    let sums = summed(posteriors, k);
    Ok(Fused {
        label: argmax(&sums),
        probs: normalized(&sums),
    })
}

pub fn fuse(rule: FusionRule, posteriors: &[PosteriorVector]) -> Result<Fused> {
    match rule {
        FusionRule::MajorityVote => fuse_vote(posteriors),
        FusionRule::ScoreSum => fuse_sum(posteriors),
    }
}

impl EnsembleModel {
    pub fn base_kind(&self) -> &'static str {
        match self.members.first() {
            Some(ClassifierModel::Logistic(_)) => "lr",
            _ => "nb",
        }
    }

    pub fn member_posteriors(&self, sample: TextSample<'_>) -> Result<Vec<PosteriorVector>> {
        self.members.iter().map(|m| m.posterior(sample)).collect()
    }

    pub fn predict(&self, sample: TextSample<'_>) -> Result<Fused> {
        fuse(self.rule, &self.member_posteriors(sample)?)
    }
}

fn train_member(
    index: usize,
    part: &[LabeledTweet],
    task: Task,
    base: &BaseConfig,
    stopwords: &StopWords,
    embeddings: Option<&EmbeddingTable>,
) -> Result<ClassifierModel> {
    let labels: Vec<usize> = part.iter().map(|t| task.class_of(t.label)).collect();
    match *base {
        BaseConfig::Nb { alpha, min_df } => {
            let docs: Vec<TokenDoc> = part.iter().map(|t| TokenDoc::from_tweet(t, stopwords)).collect();
            let vocabulary = Vocabulary::build(&docs, min_df)?;
            let vectors: Vec<_> = docs.iter().map(|d| vectorize(d, &vocabulary)).collect();
            let model = nb_train(&vectors, &labels, task.num_classes(), vocabulary.len(), alpha)?;
            Ok(ClassifierModel::NaiveBayes { vocabulary, model })
        }
        BaseConfig::Lr(cfg) => {
            let table = embeddings
                .ok_or_else(|| Error::Validation("logistic regression members need an embedding table".into()))?;
            let ids: Vec<String> = part.iter().map(|t| t.id.clone()).collect();
            let cfg = LrConfig {
                seed: cfg.seed.wrapping_add(index as u64),
                ..cfg
            };
            Ok(ClassifierModel::Logistic(
                lr_train(table, &ids, &labels, task.num_classes(), &cfg)?.model,
            ))
        }
    }
}

/// Training options for [`train_ensemble`].
#[derive(Debug, Clone, Copy)]
pub struct EnsembleSpec {
    pub task: Task,
    pub base: BaseConfig,
    pub rule: FusionRule,
    pub members: usize,
    pub seed: u64,
    pub jobs: usize,
}

/// Partition the majority class and train one member per sub-dataset.
pub fn train_ensemble(
    tweets: &[LabeledTweet],
    spec: &EnsembleSpec,
    stopwords: &StopWords,
    embeddings: Option<&EmbeddingTable>,
) -> Result<EnsembleModel> {
    if spec.members < 2 {
        return Err(Error::Validation(format!(
            "an ensemble needs at least 2 members, got {}",
            spec.members
        )));
    }
    if let BaseConfig::Lr(cfg) = &spec.base {
        cfg.validate()?;
    }
    let parts = partition_majority(tweets, spec.task, spec.members, spec.seed)?;
    let train = |(i, part): (usize, &Vec<LabeledTweet>)| {
        train_member(i, part, spec.task, &spec.base, stopwords, embeddings).map_err(|e| Error::Member {
            index: i,
            source: Box::new(e),
        })
    };
    let members: Vec<ClassifierModel> = if spec.jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| Error::Validation(e.to_string()))?;
        pool.install(|| parts.par_iter().enumerate().map(train).collect::<Result<_>>())?
    } else {
        parts.iter().enumerate().map(train).collect::<Result<_>>()?
    };
    Ok(EnsembleModel {
        members,
        rule: spec.rule,
        task: spec.task,
        partition_seed: spec.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TernaryLabel;

    fn pv(p: &[f64]) -> PosteriorVector {
        PosteriorVector::new(p.to_vec()).unwrap()
    }

    fn onehot(c: usize, k: usize) -> PosteriorVector {
        let mut v = vec![0.05 / (k as f64 - 1.0); k];
        v[c] = 0.95;
        PosteriorVector::new(v).unwrap()
    }

    #[test]
    fn plurality_without_tie() {
        let members: Vec<_> = [0, 0, 2, 1].iter().map(|&c| onehot(c, 3)).collect();
        assert_eq!(fuse_vote(&members).unwrap().label, 0);
    }

    #[test]
    fn tie_falls_back_to_sums() {
        let members = [
            pv(&[0.6, 0.1, 0.3]),
            pv(&[0.55, 0.2, 0.25]),
            pv(&[0.1, 0.2, 0.7]),
            pv(&[0.2, 0.15, 0.65]),
        ];
        let fused = fuse_vote(&members).unwrap();
        assert_eq!(fused.label, 2);
        let expect = [1.45 / 4.0, 0.65 / 4.0, 1.90 / 4.0];
        for (a, b) in fused.probs.probs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn plurality_beats_sums() {
        let members = [pv(&[0.4, 0.3, 0.3]), pv(&[0.4, 0.3, 0.3]), pv(&[0.0, 0.0, 1.0])];
        assert_eq!(fuse_vote(&members).unwrap().label, 0);
        assert_eq!(fuse_sum(&members).unwrap().label, 2);
        let unanimous = [pv(&[0.51, 0.49]), pv(&[0.6, 0.4]), pv(&[0.51, 0.49])];
        assert_eq!(fuse_vote(&unanimous).unwrap().label, 0);
    }

    #[test]
    fn sum_rule() {
        let fused = fuse_sum(&[pv(&[0.9, 0.1]), pv(&[0.2, 0.8])]).unwrap();
        assert_eq!(fused.label, 0);
        assert!((fused.probs.probs()[0] - 0.55).abs() < 1e-15);
        let swapped = fuse_sum(&[pv(&[0.2, 0.8]), pv(&[0.9, 0.1])]).unwrap();
        assert_eq!(swapped, fused);
        let uniform = fuse_sum(&[pv(&[0.5, 0.5]), pv(&[0.5, 0.5])]).unwrap();
        assert_eq!(uniform.label, 0);
        assert_eq!(uniform.probs.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn inconsistent_members() {
        assert!(fuse_sum(&[pv(&[0.5, 0.5]), pv(&[0.2, 0.3, 0.5])]).is_err());
        assert!(fuse_vote(&[]).is_err());
    }

    fn toy_tweets(counts: [usize; 3]) -> Vec<LabeledTweet> {
        let words = ["tower radiation", "vaccine chip", "weather today"];
        let mut out = Vec::new();
        for (label, &n) in TernaryLabel::ALL.iter().zip(&counts) {
            for i in 0..n {
                out.push(LabeledTweet {
                    id: format!("{}-{i}", label.code()),
                    text: words[label.code()].into(),
                    label: *label,
                });
            }
        }
        out
    }

    #[test]
    fn binary_toy_partition_sizes() {
        // 10 negatives, 2 positives, n=2: each member sees 5 + 2
        let tweets = toy_tweets([2, 4, 6]);
        let spec = EnsembleSpec {
            task: Task::Binary,
            base: BaseConfig::Nb { alpha: 1.0, min_df: 1 },
            rule: FusionRule::MajorityVote,
            members: 2,
            seed: 1,
            jobs: 1,
        };
        let parts = partition_majority(&tweets, Task::Binary, 2, 1).unwrap();
        assert!(parts.iter().all(|p| p.len() == 7));
        let model = train_ensemble(&tweets, &spec, &StopWords::empty(), None).unwrap();
        assert_eq!(model.members.len(), 2);
        let doc = TokenDoc {
            id: "q".into(),
            tokens: vec!["tower".into(), "radiation".into()],
            label: TernaryLabel::FiveG,
        };
        let fused = model
            .predict(TextSample {
                doc: &doc,
                embedding: None,
            })
            .unwrap();
        assert_eq!(fused.label, 0);
    }

    #[test]
    fn too_many_members() {
        let tweets = toy_tweets([1, 1, 3]);
        let spec = EnsembleSpec {
            task: Task::Ternary,
            base: BaseConfig::nb_default(),
            rule: FusionRule::ScoreSum,
            members: 4,
            seed: 0,
            jobs: 1,
        };
        assert!(train_ensemble(&tweets, &spec, &StopWords::empty(), None).is_err());
    }

    #[test]
    fn member_errors_carry_index() {
        let tweets = toy_tweets([2, 2, 4]);
        let spec = EnsembleSpec {
            task: Task::Ternary,
            base: BaseConfig::Nb { alpha: 1.0, min_df: 50 },
            rule: FusionRule::ScoreSum,
            members: 2,
            seed: 0,
            jobs: 1,
        };
        let err = train_ensemble(&tweets, &spec, &StopWords::empty(), None).unwrap_err();
        assert!(matches!(err, Error::Member { index: 0, .. }), "{err}");
    }

    #[test]
    fn parallel_matches_sequential() {
        let tweets = toy_tweets([6, 4, 20]);
        let mut table = EmbeddingTable::new(2).unwrap();
        for t in &tweets {
            let c = t.label.code() as f64;
            table.insert(t.id.clone(), vec![c, 1.0 - c]).unwrap();
        }
        let mut spec = EnsembleSpec {
            task: Task::Ternary,
            base: BaseConfig::Lr(LrConfig {
                epochs: 5,
                ..LrConfig::default()
            }),
            rule: FusionRule::ScoreSum,
            members: 4,
            seed: 9,
            jobs: 1,
        };
        let seq = train_ensemble(&tweets, &spec, &StopWords::empty(), Some(&table)).unwrap();
        spec.jobs = 4;
        let par = train_ensemble(&tweets, &spec, &StopWords::empty(), Some(&table)).unwrap();
        assert_eq!(seq, par);
    }
}
