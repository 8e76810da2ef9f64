//! Synthetic corpora with known, planted structure.
//!
//! Text: each tweet carries filler words shared by every class plus two
//! keywords drawn from a class-specific list, and occasionally one keyword
//! leaked from another class. Embeddings are class centroids plus Gaussian
//! noise. Graphs: star-burst cascades for `5g_corona_conspiracy`, deep chains for
//! `other_conspiracy`, uniformly random recursive trees for
//! `non_conspiracy`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::corpus::{LabeledTweet, PropagationGraph, TernaryLabel};
use crate::error::Result;
use crate::features::EmbeddingTable;
use crate::rng::{self, Rng};

const FILLER: &[&str] = &[
    "news",
    "people",
    "today",
    "report",
    "city",
    "phone",
    "government",
    "world",
    "watch",
    "read",
    "video",
    "share",
    "week",
    "health",
    "local",
    "update",
    "story",
    "online",
    "thread",
    "friends",
    "morning",
    "country",
];

const FIVE_G: &[&str] = &[
    "5g",
    "towers",
    "radiation",
    "antenna",
    "wavelength",
    "emf",
    "mast",
    "frequency",
];
const OTHER: &[&str] = &[
    "bioweapon",
    "labmade",
    "plandemic",
    "microchip",
    "depopulation",
    "hoax",
    "cabal",
    "billgates",
];
const NON: &[&str] = &[
    "lockdown",
    "masks",
    "handwashing",
    "vaccine",
    "hospital",
    "cases",
    "doctors",
    "testing",
];

fn keywords(label: TernaryLabel) -> &'static [&'static str] {
    match label {
        TernaryLabel::FiveG => FIVE_G,
        TernaryLabel::OtherConspiracy => OTHER,
        TernaryLabel::NonConspiracy => NON,
    }
}

#[derive(Debug, Clone)]
pub struct SynthText {
    pub train: Vec<LabeledTweet>,
    pub dev: Vec<LabeledTweet>,
    pub embeddings: EmbeddingTable,
}

/// Class counts for a 70/20/10 non-conspiracy/5G/other skew.
fn skewed_labels(n: usize) -> Vec<TernaryLabel> {
    let five_g = n * 2 / 10;
    let other = n / 10;
    let mut labels = vec![TernaryLabel::FiveG; five_g];
    labels.extend(std::iter::repeat_n(TernaryLabel::OtherConspiracy, other));
    labels.extend(std::iter::repeat_n(TernaryLabel::NonConspiracy, n - five_g - other));
    labels
}

fn synth_tweet(id: String, label: TernaryLabel, rng: &mut Rng) -> LabeledTweet {
    let mut words: Vec<&str> = (0..rng.gen_range(4..=9))
        .map(|_| *FILLER.choose(rng).unwrap())
        .collect();
    let own = keywords(label);
    words.extend((0..2).map(|_| *own.choose(rng).unwrap()));
    if rng.gen_bool(0.1) {
        let other = *TernaryLabel::ALL
            .iter()
            .filter(|&&l| l != label)
            .collect::<Vec<_>>()
            .choose(rng)
            .unwrap();
        words.push(keywords(*other).choose(rng).unwrap());
    }
    words.shuffle(rng);
    let mut text = words.join(" ");
    if rng.gen_bool(0.2) {
        text.push_str(" https://t.co/x");
        text.push_str(&rng.gen_range(100..999).to_string());
    }
    if rng.gen_bool(0.3) {
        text = text.to_uppercase();
    }
    LabeledTweet { id, text, label }
}

/// `n` tweets with the skewed class mix, split into train and dev at
/// `dev_fraction`, plus `dim`-wide embeddings covering every id.
pub fn synth_text(n: usize, dev_fraction: f64, dim: usize, seed: u64) -> Result<SynthText> {
    let mut rng = rng::seeded(seed);
    let mut labels = skewed_labels(n);
    labels.shuffle(&mut rng);
    let tweets: Vec<LabeledTweet> = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| synth_tweet(format!("tw{i:05}"), label, &mut rng))
        .collect();

    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let centroids: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..dim).map(|_| 2.0 * noise.sample(&mut rng)).collect())
        .collect();
    let mut embeddings = EmbeddingTable::new(dim)?;
    for t in &tweets {
        let c = &centroids[t.label.code()];
        embeddings.insert(t.id.clone(), c.iter().map(|m| m + noise.sample(&mut rng)).collect())?;
    }

    let n_dev = (n as f64 * dev_fraction + 1e-9).floor() as usize;
    let mut train = tweets;
    let dev = train.split_off(n - n_dev);
    Ok(SynthText { train, dev, embeddings })
}

fn star_burst(n: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    // most nodes reply to the root; the rest hang off a first-level reply
    let direct = (n - 1) * 3 / 4;
    let mut edges: Vec<(usize, usize)> = (1..=direct).map(|v| (0, v)).collect();
    edges.extend((direct + 1..n).map(|v| (rng.gen_range(1..=direct), v)));
    edges
}

fn deep_chain(n: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    (1..n)
        .map(|v| {
            if rng.gen_bool(0.85) {
                (v - 1, v)
            } else {
                (rng.gen_range(0..v), v)
            }
        })
        .collect()
}

fn random_tree(n: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    (1..n).map(|v| (rng.gen_range(0..v), v)).collect()
}

/// `n` labelled trees of 15 to 60 nodes, classes assigned round-robin and
/// then shuffled.
pub fn synth_graphs(n: usize, seed: u64) -> Result<Vec<PropagationGraph>> {
    let mut rng = rng::seeded(seed);
    let mut labels: Vec<TernaryLabel> = (0..n).map(|i| TernaryLabel::ALL[i % 3]).collect();
    labels.shuffle(&mut rng);
    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let nodes = rng.gen_range(15..=60);
            let edges = match label {
                TernaryLabel::FiveG => star_burst(nodes, &mut rng),
                TernaryLabel::OtherConspiracy => deep_chain(nodes, &mut rng),
                TernaryLabel::NonConspiracy => random_tree(nodes, &mut rng),
            };
            PropagationGraph::new(format!("g{i:04}"), nodes, edges, Some(label))
        })
        .collect()
}
