//! On-disk formats for trained models.
//!
//! Every model file is a JSON envelope `{"kind", "task", ..., "params"}`.
//! Naive Bayes envelopes carry the SHA-256 of their vocabulary file so a
//! model can never be paired with the wrong vocabulary. An ensemble is a
//! directory holding `ensemble.json`, the stop-word list used for
//! tokenization, and one model (plus vocabulary) file per member.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{StopWords, Task};
use crate::ensemble::{ClassifierModel, EnsembleModel, FusionRule};
use crate::error::{Error, Result};
use crate::features::Vocabulary;
use crate::gnn::GnnModel;
use crate::text_models::{LogisticRegressionModel, NaiveBayesModel};

pub const ENSEMBLE_MANIFEST: &str = "ensemble.json";
pub const STOPWORDS_FILE: &str = "stopwords.txt";
pub const GNN_MODEL_FILE: &str = "model.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nb,
    Lr,
    Gnn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEnvelope {
    pub kind: ModelKind,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding_dim: Option<usize>,
    pub params: serde_json::Value,
}

impl ModelEnvelope {
    pub fn from_json(input: &str) -> Result<Self> {
        Ok(serde_json::from_str(input)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }

    pub fn for_member(member: &ClassifierModel, task: Task) -> Result<Self> {
        Ok(match member {
            ClassifierModel::NaiveBayes { vocabulary, model } => ModelEnvelope {
                kind: ModelKind::Nb,
                task,
                vocabulary_hash: Some(vocabulary.content_hash()),
                embedding_dim: None,
                params: serde_json::to_value(model)?,
            },
            ClassifierModel::Logistic(model) => ModelEnvelope {
                kind: ModelKind::Lr,
                task,
                vocabulary_hash: None,
                embedding_dim: Some(model.dim()),
                params: serde_json::to_value(model)?,
            },
        })
    }

    pub fn for_gnn(model: &GnnModel) -> Result<Self> {
        Ok(ModelEnvelope {
            kind: ModelKind::Gnn,
            task: Task::Ternary,
            vocabulary_hash: None,
            embedding_dim: None,
            params: serde_json::to_value(model)?,
        })
    }

    /// Decode a member, checking it against its vocabulary (NB only).
    pub fn into_member(self, vocabulary: Option<Vocabulary>) -> Result<ClassifierModel> {
        let k = self.task.num_classes();
        match self.kind {
            ModelKind::Nb => {
                let vocabulary =
                    vocabulary.ok_or_else(|| Error::Data("naive bayes model without a vocabulary".into()))?;
                let expected = self.vocabulary_hash.as_deref().unwrap_or("");
                if vocabulary.content_hash() != expected {
                    return Err(Error::Data(format!(
                        "vocabulary/model mismatch: model expects vocabulary {expected}, found {}",
                        vocabulary.content_hash()
                    )));
                }
                let model: NaiveBayesModel = serde_json::from_value(self.params)?;
                model.validate()?;
                if model.num_classes != k || model.vocab_size() != vocabulary.len() {
                    return Err(Error::Data("naive bayes tables do not match task or vocabulary".into()));
                }
                Ok(ClassifierModel::NaiveBayes { vocabulary, model })
            }
            ModelKind::Lr => {
                let model: LogisticRegressionModel = serde_json::from_value(self.params)?;
                model.affine.validate()?;
                if model.num_classes() != k || self.embedding_dim.is_some_and(|d| d != model.dim()) {
                    return Err(Error::Data(
                        "logistic regression weights do not match task or embedding dimension".into(),
                    ));
                }
                Ok(ClassifierModel::Logistic(model))
            }
            ModelKind::Gnn => Err(Error::Data("expected a text model, found a graph model".into())),
        }
    }

    pub fn into_gnn(self) -> Result<GnnModel> {
        if self.kind != ModelKind::Gnn {
            return Err(Error::Data("expected a graph model".into()));
        }
        let model: GnnModel = serde_json::from_value(self.params)?;
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberEntry {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleManifest {
    pub task: Task,
    pub base: ModelKind,
    pub rule: FusionRule,
    pub partition_seed: u64,
    pub stopwords: String,
    pub members: Vec<MemberEntry>,
}

impl EnsembleManifest {
    pub fn from_json(input: &str) -> Result<Self> {
        let manifest: EnsembleManifest = serde_json::from_str(input)?;
        if manifest.members.len() < 2 {
            return Err(Error::Data("ensemble manifest lists fewer than 2 members".into()));
        }
        for name in manifest
            .members
            .iter()
            .flat_map(|m| std::iter::once(&m.model).chain(m.vocabulary.as_ref()))
            .chain(std::iter::once(&manifest.stopwords))
        {
            check_file_name(name)?;
        }
        Ok(manifest)
    }
}

/// Member files must be plain names inside the ensemble directory.
fn check_file_name(name: &str) -> Result<()> {
    let ok = !name.is_empty() && name != "." && name != ".." && !name.contains(['/', '\\']) && !name.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(Error::Data(format!("invalid file name {name:?} in manifest")))
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Write an ensemble into `dir` (created if needed).
pub fn save_ensemble(dir: &Path, model: &EnsembleModel, stopwords: &StopWords) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut members = Vec::with_capacity(model.members.len());
    for (i, member) in model.members.iter().enumerate() {
        let model_name = format!("member_{i}.json");
        let vocabulary = match member {
            ClassifierModel::NaiveBayes { vocabulary, .. } => {
                let name = format!("vocab_{i}.json");
                vocabulary.save(dir.join(&name))?;
                Some(name)
            }
            ClassifierModel::Logistic(_) => None,
        };
        write(
            &dir.join(&model_name),
            &ModelEnvelope::for_member(member, model.task)?.to_json(),
        )?;
        members.push(MemberEntry {
            model: model_name,
            vocabulary,
        });
    }
    write(&dir.join(STOPWORDS_FILE), &stopwords.to_file_string())?;
    let manifest = EnsembleManifest {
        task: model.task,
        base: if model.base_kind() == "lr" {
            ModelKind::Lr
        } else {
            ModelKind::Nb
        },
        rule: model.rule,
        partition_seed: model.partition_seed,
        stopwords: STOPWORDS_FILE.into(),
        members,
    };
    write(&dir.join(ENSEMBLE_MANIFEST), &serde_json::to_string_pretty(&manifest)?)
}

pub fn load_ensemble(dir: &Path) -> Result<(EnsembleModel, StopWords)> {
    let manifest = EnsembleManifest::from_json(&read(&dir.join(ENSEMBLE_MANIFEST))?)?;
    let stopwords = StopWords::parse(&read(&dir.join(&manifest.stopwords))?);
    let mut members = Vec::with_capacity(manifest.members.len());
    for entry in &manifest.members {
        let envelope = ModelEnvelope::from_json(&read(&dir.join(&entry.model))?)?;
        if envelope.task != manifest.task || envelope.kind != manifest.base {
            return Err(Error::Data(format!(
                "member {} does not match the ensemble's task or base",
                entry.model
            )));
        }
        let vocabulary = entry
            .vocabulary
            .as_ref()
            .map(|v| Vocabulary::load(dir.join(v)))
            .transpose()?;
        members.push(envelope.into_member(vocabulary)?);
    }
    Ok((
        EnsembleModel {
            members,
            rule: manifest.rule,
            task: manifest.task,
            partition_seed: manifest.partition_seed,
        },
        stopwords,
    ))
}

pub fn save_gnn(path: &Path, model: &GnnModel) -> Result<()> {
    write(path, &ModelEnvelope::for_gnn(model)?.to_json())
}

pub fn load_gnn(path: &Path) -> Result<GnnModel> {
    ModelEnvelope::from_json(&read(path)?)?.into_gnn()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabeledTweet, TernaryLabel, TokenDoc};
    use crate::ensemble::{train_ensemble, BaseConfig, EnsembleSpec, TextSample};
    use crate::gnn::GnnConfig;

    fn tweets() -> Vec<LabeledTweet> {
        let texts = [
            "5g towers spread virus",
            "vaccine microchip plot",
            "stay home wash hands",
        ];
        (0..30)
            .map(|i| {
                let label = if i < 6 {
                    TernaryLabel::FiveG
                } else if i < 10 {
                    TernaryLabel::OtherConspiracy
                } else {
                    TernaryLabel::NonConspiracy
                };
                LabeledTweet {
                    id: format!("t{i}"),
                    text: format!("{} number{}", texts[label.code()], i % 3),
                    label,
                }
            })
            .collect()
    }

    fn nb_ensemble() -> EnsembleModel {
        let spec = EnsembleSpec {
            task: Task::Ternary,
            base: BaseConfig::Nb { alpha: 1.0, min_df: 1 },
            rule: FusionRule::MajorityVote,
            members: 4,
            seed: 5,
            jobs: 1,
        };
        train_ensemble(&tweets(), &spec, &StopWords::english(), None).unwrap()
    }

    #[test]
    fn ensemble_round_trip_predicts_identically() {
        let dir = tempfile::tempdir().unwrap();
        let model = nb_ensemble();
        save_ensemble(dir.path(), &model, &StopWords::english()).unwrap();
        let (loaded, stop) = load_ensemble(dir.path()).unwrap();
        assert_eq!(stop, StopWords::english());
        assert_eq!(loaded, model);
        let doc = TokenDoc::from_tweet(&tweets()[0], &stop);
        let sample = TextSample {
            doc: &doc,
            embedding: None,
        };
        assert_eq!(loaded.predict(sample).unwrap(), model.predict(sample).unwrap());
    }

    #[test]
    fn swapped_vocabulary_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        save_ensemble(dir.path(), &nb_ensemble(), &StopWords::english()).unwrap();
        let other = Vocabulary::from_json(r#"{"min_df":1,"tokens":["zzz"]}"#).unwrap();
        other.save(dir.path().join("vocab_0.json")).unwrap();
        let err = load_ensemble(dir.path()).unwrap_err();
        assert!(err.to_string().contains("vocabulary/model mismatch"), "{err}");
    }

    #[test]
    fn manifest_rejects_path_escape() {
        let bad = r#"{"task":"binary","base":"nb","rule":"sum","partition_seed":0,"stopwords":"stopwords.txt",
            "members":[{"model":"../x.json"},{"model":"m.json"}]}"#;
        assert!(EnsembleManifest::from_json(bad).is_err());
    }

    #[test]
    fn gnn_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let model = GnnModel::init(GnnConfig {
            hidden_dim: 4,
            num_layers: 2,
            degree_cap: 3,
            ..GnnConfig::default()
        })
        .unwrap();
        let path = dir.path().join("model.json");
        save_gnn(&path, &model).unwrap();
        assert_eq!(load_gnn(&path).unwrap(), model);
        let envelope = ModelEnvelope::from_json(&read(&path).unwrap()).unwrap();
        assert!(envelope.into_member(None).is_err());
    }
}
