//! Every decoder must reject bad input with an error, never a panic, and
//! anything it accepts must survive a write/read cycle. Inputs are the
//! checked-in fuzz seeds under random character edits.

use proptest::prelude::*;

use fakenews_core::corpus::{clean_text, format_graphs, format_tweets, parse_graphs, parse_tweets, StopWords};
use fakenews_core::features::{EmbeddingTable, Vocabulary};
use fakenews_core::persist::{EnsembleManifest, ModelEnvelope};
use fakenews_core::predictions::{format_predictions, parse_predictions};

macro_rules! seeds {
    ($($file:literal),* $(,)?) => {
        &[$(include_str!(concat!("../../../fuzz/corpus/", $file))),*]
    };
}

const TWEETS: &[&str] = seeds!("tweets_tsv/synthetic", "tweets_tsv/crlf_urls", "tweets_tsv/empty_text");
const GRAPHS: &[&str] = seeds!(
    "graphs_jsonl/synthetic",
    "graphs_jsonl/duplicates_loops_empty",
    "graphs_jsonl/out_of_range"
);
const EMBEDDINGS: &[&str] = seeds!("embeddings/synthetic", "embeddings/short_row");
const STOPWORDS: &[&str] = seeds!("stopwords/english_head", "stopwords/case_and_blanks");
const VOCABS: &[&str] = seeds!("vocabulary_json/synthetic", "vocabulary_json/unsorted");
const ENVELOPES: &[&str] = seeds!("model_envelope/nb", "model_envelope/lr", "model_envelope/gnn");
const MANIFESTS: &[&str] = seeds!("ensemble_manifest/nb", "ensemble_manifest/lr");
const PREDICTIONS: &[&str] = seeds!("predictions_tsv/ternary", "predictions_tsv/binary");

/// Characters that tend to matter to the text formats.
const ALPHABET: &[char] = &[
    '\t', '\n', '\r', ' ', '"', ',', '[', ']', '{', '}', ':', '-', '.', '0', '1', '9', 'e', 'a', '#', '/', '\u{a0}',
    'É',
];

#[derive(Debug, Clone)]
enum Edit {
    Insert(usize, char),
    Delete(usize),
    Replace(usize, char),
}

fn edit() -> impl Strategy<Value = Edit> {
    let ch = prop::sample::select(ALPHABET);
    prop_oneof![
        (any::<usize>(), ch.clone()).prop_map(|(i, c)| Edit::Insert(i, c)),
        any::<usize>().prop_map(Edit::Delete),
        (any::<usize>(), ch).prop_map(|(i, c)| Edit::Replace(i, c)),
    ]
}

fn mutated(seeds: &'static [&'static str]) -> impl Strategy<Value = String> {
    (prop::sample::select(seeds), prop::collection::vec(edit(), 0..6)).prop_map(|(seed, edits)| {
        let mut chars: Vec<char> = seed.chars().collect();
        for e in edits {
            let n = chars.len();
            match e {
                Edit::Insert(i, c) => chars.insert(i % (n + 1), c),
                Edit::Delete(i) if n > 0 => {
                    chars.remove(i % n);
                }
                Edit::Replace(i, c) if n > 0 => chars[i % n] = c,
                _ => {}
            }
        }
        chars.into_iter().collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn tweets(input in mutated(TWEETS)) {
        if let Ok(tweets) = parse_tweets(&input) {
            prop_assert_eq!(parse_tweets(&format_tweets(&tweets)).unwrap(), tweets);
        }
    }

    #[test]
    fn graphs(input in mutated(GRAPHS)) {
        if let Ok(graphs) = parse_graphs(&input) {
            prop_assert_eq!(parse_graphs(&format_graphs(&graphs)).unwrap(), graphs);
        }
    }

    #[test]
    fn embeddings(input in mutated(EMBEDDINGS)) {
        if let Ok(table) = EmbeddingTable::parse(&input) {
            prop_assert_eq!(EmbeddingTable::parse(&table.format()).unwrap(), table);
        }
    }

    #[test]
    fn stopwords(input in mutated(STOPWORDS)) {
        let words = StopWords::parse(&input);
        prop_assert_eq!(&StopWords::parse(&words.to_file_string()), &words);
        let tokens = clean_text(&input, &words);
        prop_assert_eq!(clean_text(&tokens.join(" "), &words), tokens);
    }

    #[test]
    fn vocabulary(input in mutated(VOCABS)) {
        if let Ok(v) = Vocabulary::from_json(&input) {
            prop_assert_eq!(Vocabulary::from_json(&v.to_json()).unwrap(), v);
        }
    }

    #[test]
    fn envelopes(input in mutated(ENVELOPES)) {
        if let Ok(envelope) = ModelEnvelope::from_json(&input) {
            let _ = envelope.clone().into_gnn();
            let _ = envelope.into_member(None);
        }
    }

    #[test]
    fn manifests(input in mutated(MANIFESTS)) {
        if let Ok(m) = EnsembleManifest::from_json(&input) {
            prop_assert!(m.members.iter().all(|e| !e.model.contains('/') && !e.model.starts_with('.')));
        }
    }

    #[test]
    fn predictions(input in mutated(PREDICTIONS)) {
        if let Ok(p) = parse_predictions(&input) {
            prop_assert_eq!(parse_predictions(&format_predictions(p.task, &p.rows)).unwrap(), p);
        }
    }
}

#[test]
fn seeds_decode_as_intended() {
    assert!(parse_tweets(TWEETS[0]).is_ok() && parse_tweets(TWEETS[1]).is_ok() && parse_tweets(TWEETS[2]).is_err());
    assert!(parse_graphs(GRAPHS[1]).is_ok() && parse_graphs(GRAPHS[2]).is_err());
    assert!(EmbeddingTable::parse(EMBEDDINGS[0]).is_ok() && EmbeddingTable::parse(EMBEDDINGS[1]).is_err());
    assert!(Vocabulary::from_json(VOCABS[0]).is_ok() && Vocabulary::from_json(VOCABS[1]).is_err());
    for e in ENVELOPES {
        ModelEnvelope::from_json(e).unwrap();
    }
    for m in MANIFESTS {
        EnsembleManifest::from_json(m).unwrap();
    }
    for p in PREDICTIONS {
        parse_predictions(p).unwrap();
    }
}
