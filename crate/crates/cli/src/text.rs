use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use fakenews_core::corpus::{load_tweets, LabeledTweet, StopWords, TokenDoc};
use fakenews_core::ensemble::{train_ensemble, BaseConfig, EnsembleModel, EnsembleSpec, TextSample};
use fakenews_core::features::EmbeddingTable;
use fakenews_core::metrics::{evaluate, format_table, EvalReport};
use fakenews_core::persist::save_ensemble;
use fakenews_core::text_models::LrConfig;
use fakenews_core::Error;

use crate::error::{CliError, CliResult};
use crate::output::Staged;
use crate::presets::{Base, RunSpec};
use crate::Global;

#[derive(Debug, Args)]
pub struct TrainTextArgs {
    /// Run preset: run1..run6.
    #[arg(long)]
    pub run: RunSpec,
    /// Training tweets (`id<TAB>label<TAB>text`).
    #[arg(long)]
    pub train: PathBuf,
    /// Held-out tweets scored after training.
    #[arg(long)]
    pub dev: PathBuf,
    /// Embedding file (`N D` header, then `id v1 .. vD`); required by run3 and run6.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Stop-word list, one word per line [default: bundled English list].
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Number of ensemble members (majority-class parts).
    #[arg(long)]
    pub members: Option<usize>,
    /// Laplace smoothing for naive Bayes members.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Minimum document frequency for vocabulary tokens.
    #[arg(long)]
    pub min_df: Option<usize>,
}

/// Contents of `--config` for `train-text`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TextSettings {
    pub members: usize,
    pub alpha: f64,
    pub min_df: usize,
    pub lr: LrConfig,
    pub seed: u64,
}

impl Default for TextSettings {
    fn default() -> Self {
        let BaseConfig::Nb { alpha, min_df } = BaseConfig::nb_default() else {
            unreachable!()
        };
        TextSettings {
            members: 4,
            alpha,
            min_df,
            lr: LrConfig::default(),
            seed: 0,
        }
    }
}

pub fn load_stopwords(path: Option<&PathBuf>) -> CliResult<StopWords> {
    Ok(match path {
        Some(p) => StopWords::load(p)?,
        None => StopWords::english(),
    })
}

fn require_embeddings(table: &EmbeddingTable, tweets: &[LabeledTweet], file: &str) -> CliResult<()> {
    match tweets.iter().find(|t| table.get(&t.id).is_none()) {
        Some(t) => Err(CliError::Core(Error::Data(format!(
            "no embedding for tweet id {:?} from the {file} file",
            t.id
        )))),
        None => Ok(()),
    }
}

/// Fused predictions for `tweets`, as (class, probabilities) rows.
pub fn predict_tweets(
    model: &EnsembleModel,
    tweets: &[LabeledTweet],
    stopwords: &StopWords,
    embeddings: Option<&EmbeddingTable>,
) -> CliResult<Vec<(usize, Vec<f64>)>> {
    tweets
        .iter()
        .map(|t| {
            let doc = TokenDoc::from_tweet(t, stopwords);
            let embedding = match embeddings {
                Some(table) => Some(table.require(&t.id)?),
                None => None,
            };
            let fused = model.predict(TextSample { doc: &doc, embedding })?;
            Ok((fused.label, fused.probs.probs().to_vec()))
        })
        .collect()
}

pub fn score(model: &EnsembleModel, tweets: &[LabeledTweet], rows: &[(usize, Vec<f64>)]) -> CliResult<EvalReport> {
    let truth: Vec<usize> = tweets.iter().map(|t| model.task.class_of(t.label)).collect();
    let predicted: Vec<usize> = rows.iter().map(|r| r.0).collect();
    let probs: Vec<Vec<f64>> = rows.iter().map(|r| r.1.clone()).collect();
    Ok(evaluate(model.task, &truth, &predicted, &probs)?)
}

pub fn train_text(g: &Global, args: &TrainTextArgs) -> CliResult<()> {
    let mut settings: TextSettings = g.settings()?;
    settings.seed = g.seed.unwrap_or(settings.seed);
    settings.members = args.members.unwrap_or(settings.members);
    settings.alpha = args.alpha.unwrap_or(settings.alpha);
    settings.min_df = args.min_df.unwrap_or(settings.min_df);
    settings.lr.seed = settings.seed;
    let out = g.out()?;
    let jobs = g.jobs()?;

    if settings.members < 2 {
        return Err(CliError::Usage("--members must be at least 2".into()));
    }
    if !(settings.alpha.is_finite() && settings.alpha > 0.0) {
        return Err(CliError::Usage(format!(
            "--alpha must be positive, got {}",
            settings.alpha
        )));
    }
    if settings.min_df == 0 {
        return Err(CliError::Usage("--min-df must be at least 1".into()));
    }
    let base = match args.run.base {
        Base::BowNb => BaseConfig::Nb {
            alpha: settings.alpha,
            min_df: settings.min_df,
        },
        Base::EmbedLr => {
            settings.lr.validate()?;
            BaseConfig::Lr(settings.lr)
        }
    };

    let stopwords = load_stopwords(args.stopwords.as_ref())?;
    let train = load_tweets(&args.train)?;
    let dev = load_tweets(&args.dev)?;
    let embeddings = match (args.run.base, &args.embeddings) {
        (Base::EmbedLr, None) => {
            return Err(CliError::Usage(format!("{} needs --embeddings", args.run.name)));
        }
        (Base::EmbedLr, Some(path)) => {
            let table = EmbeddingTable::load(path)?;
            require_embeddings(&table, &train, "train")?;
            require_embeddings(&table, &dev, "dev")?;
            Some(table)
        }
        (Base::BowNb, _) => None,
    };

    let mut inputs = vec![args.train.as_path(), args.dev.as_path()];
    inputs.extend(args.embeddings.as_deref());
    inputs.extend(args.stopwords.as_deref());
    inputs.extend(g.config.as_deref());
    let staged = Staged::create(out, &inputs)?;
    let spec = EnsembleSpec {
        task: args.run.task,
        base,
        rule: args.run.fusion,
        members: settings.members,
        seed: settings.seed,
        jobs,
    };
    let model = train_ensemble(&train, &spec, &stopwords, embeddings.as_ref())?;
    save_ensemble(&staged.path("model"), &model, &stopwords)?;

    let rows = predict_tweets(&model, &dev, &stopwords, embeddings.as_ref())?;
    let report = score(&model, &dev, &rows)?;
    staged.write("report.json", &serde_json::to_string_pretty(&report)?)?;
    let table = format_table(
        &[(args.run.name.to_owned(), Some(report.macro_f1), report.auc)],
        "Dev F1 (macro)",
        "Dev ROC AUC",
    );
    staged.write("summary.txt", &format!("{}\n{table}", args.run))?;
    staged.commit(
        "train-text",
        json!({
            "run": args.run.name,
            "task": args.run.task,
            "fusion": args.run.fusion,
            "base": spec.base,
            "members": settings.members,
            "seed": settings.seed,
        }),
    )?;
    println!("{}", args.run);
    print!("{table}");
    Ok(())
}
