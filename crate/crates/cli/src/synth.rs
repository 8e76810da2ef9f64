use clap::Args;
use serde_json::json;

use fakenews_core::corpus::{format_graphs, format_tweets};
use fakenews_core::synth::{synth_graphs, synth_text};

use crate::error::{CliError, CliResult};
use crate::output::Staged;
use crate::Global;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of tweets across train and dev.
    #[arg(long, default_value_t = 2000)]
    pub tweets: usize,
    /// Fraction of tweets written to dev.tsv.
    #[arg(long, default_value_t = 0.2)]
    pub dev_fraction: f64,
    /// Embedding dimension.
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    /// Number of propagation graphs.
    #[arg(long, default_value_t = 300)]
    pub graphs: usize,
}

pub fn synth(g: &Global, args: &SynthArgs) -> CliResult<()> {
    if !(args.dev_fraction > 0.0 && args.dev_fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--dev-fraction must lie in (0,1), got {}",
            args.dev_fraction
        )));
    }
    if args.tweets < 10 || args.graphs < 3 || args.dim == 0 {
        return Err(CliError::Usage(
            "need at least 10 tweets, 3 graphs and a positive --dim".into(),
        ));
    }
    let seed = g.seed.unwrap_or(0);
    let out = g.out()?;
    let text = synth_text(args.tweets, args.dev_fraction, args.dim, seed)?;
    let graphs = synth_graphs(args.graphs, seed)?;

    let staged = Staged::create(out, &[])?;
    staged.write("train.tsv", &format_tweets(&text.train))?;
    staged.write("dev.tsv", &format_tweets(&text.dev))?;
    staged.write("embeddings.txt", &text.embeddings.format())?;
    staged.write("graphs.jsonl", &format_graphs(&graphs))?;
    staged.commit(
        "synth",
        json!({"tweets": args.tweets, "dev_fraction": args.dev_fraction, "dim": args.dim, "graphs": args.graphs, "seed": seed}),
    )?;
    println!(
        "{} train / {} dev tweets, {} graphs written to {}",
        text.train.len(),
        text.dev.len(),
        graphs.len(),
        out.display()
    );
    Ok(())
}
