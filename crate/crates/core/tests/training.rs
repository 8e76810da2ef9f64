//! Determinism and save/load fidelity of the trainers.

use fakenews_core::corpus::{SplitSpec, StopWords, Task, TokenDoc};
use fakenews_core::ensemble::{train_ensemble, BaseConfig, EnsembleSpec, FusionRule, TextSample};
use fakenews_core::gnn::{gnn_train, predict_proba, GnnConfig};
use fakenews_core::persist::{load_ensemble, load_gnn, save_ensemble, save_gnn};
use fakenews_core::synth::{synth_graphs, synth_text};
use fakenews_core::text_models::LrConfig;

fn small_gnn() -> GnnConfig {
    GnnConfig {
        hidden_dim: 16,
        num_layers: 2,
        epochs: 5,
        degree_cap: 16,
        seed: 3,
        ..GnnConfig::default()
    }
}

#[test]
fn gnn_training_is_bit_reproducible_and_survives_disk() {
    let graphs = synth_graphs(60, 1).unwrap();
    let a = gnn_train(&graphs, &small_gnn(), &SplitSpec::with_seed(3)).unwrap();
    let b = gnn_train(&graphs, &small_gnn(), &SplitSpec::with_seed(3)).unwrap();
    assert_eq!(a.fit.model, b.fit.model);
    assert_eq!(a.fit.log, b.fit.log);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    save_gnn(&path, &a.fit.model).unwrap();
    let loaded = load_gnn(&path).unwrap();
    assert_eq!(
        predict_proba(&loaded, &graphs).unwrap(),
        predict_proba(&a.fit.model, &graphs).unwrap()
    );
}

#[test]
fn lr_ensemble_round_trips_exactly() {
    let data = synth_text(300, 0.2, 6, 4).unwrap();
    let spec = EnsembleSpec {
        task: Task::Binary,
        base: BaseConfig::Lr(LrConfig {
            epochs: 20,
            ..LrConfig::default()
        }),
        rule: FusionRule::ScoreSum,
        members: 3,
        seed: 4,
        jobs: 2,
    };
    let stop = StopWords::english();
    let model = train_ensemble(&data.train, &spec, &stop, Some(&data.embeddings)).unwrap();
    let serial = train_ensemble(
        &data.train,
        &EnsembleSpec { jobs: 1, ..spec },
        &stop,
        Some(&data.embeddings),
    )
    .unwrap();
    assert_eq!(model, serial);

    let dir = tempfile::tempdir().unwrap();
    save_ensemble(dir.path(), &model, &stop).unwrap();
    let (loaded, loaded_stop) = load_ensemble(dir.path()).unwrap();
    for tweet in &data.dev {
        let doc = TokenDoc::from_tweet(tweet, &loaded_stop);
        let sample = TextSample {
            doc: &doc,
            embedding: data.embeddings.get(&tweet.id),
        };
        assert_eq!(loaded.predict(sample).unwrap(), model.predict(sample).unwrap());
    }
}
