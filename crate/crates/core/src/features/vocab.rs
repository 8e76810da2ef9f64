use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::TokenDoc;
use crate::error::{Error, Result};

/// BoW vocabulary. Indices follow lexicographic token order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    min_df: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VocabularyFile {
    min_df: usize,
    tokens: Vec<String>,
}

impl Vocabulary {
    /// Keep every token that appears in at least `min_df` documents.
    pub fn build(docs: &[TokenDoc], min_df: usize) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::Data("cannot build a vocabulary from zero documents".into()));
        }
        if min_df == 0 {
            return Err(Error::Validation("min_df must be >= 1".into()));
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let unique: HashSet<&str> = doc.tokens.iter().map(String::as_str).collect();
            for tok in unique {
                *df.entry(tok).or_default() += 1;
            }
        }
        let tokens: Vec<String> = df
            .into_iter()
            .filter(|&(_, n)| n >= min_df)
            .map(|(t, _)| t.to_owned())
            .collect();
        if tokens.is_empty() {
            return Err(Error::Data(format!("no token reaches min_df={min_df}")));
        }
        Ok(Self::from_sorted(tokens, min_df))
    }

    fn from_sorted(tokens: Vec<String>, min_df: usize) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { tokens, index, min_df }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&VocabularyFile {
            min_df: self.min_df,
            tokens: self.tokens.clone(),
        })
        .expect("vocabulary serializes")
    }

    pub fn from_json(input: &str) -> Result<Self> {
        let file: VocabularyFile = serde_json::from_str(input)?;
        if file.min_df == 0 {
            return Err(Error::Data("vocabulary min_df must be >= 1".into()));
        }
        if file.tokens.is_empty() {
            return Err(Error::Data("vocabulary has no tokens".into()));
        }
        if file.tokens.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Data("vocabulary tokens must be strictly sorted".into()));
        }
        Ok(Self::from_sorted(file.tokens, file.min_df))
    }

    /// Hex SHA-256 of the persisted JSON form.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Sparse term-count vector with strictly increasing indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SparseVector {
    entries: Vec<(usize, u32)>,
}

impl SparseVector {
    pub fn new(entries: Vec<(usize, u32)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Shape("sparse indices must be strictly increasing".into()));
        }
        if entries.iter().any(|&(_, c)| c == 0) {
            return Err(Error::Shape("sparse counts must be positive".into()));
        }
        Ok(SparseVector { entries })
    }

    /// Canonicalize arbitrary (index, count) pairs: merge duplicates, drop zeros, sort.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for (i, c) in pairs {
            *acc.entry(i).or_default() += c;
        }
        SparseVector {
            entries: acc.into_iter().filter(|&(_, c)| c > 0).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| u64::from(c)).sum()
    }
}

/// Term-frequency vector of `doc` over `vocab`; out-of-vocabulary tokens are dropped.
pub fn vectorize(doc: &TokenDoc, vocab: &Vocabulary) -> SparseVector {
    SparseVector::from_pairs(doc.tokens.iter().filter_map(|t| vocab.index_of(t)).map(|i| (i, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TernaryLabel;
    use proptest::prelude::*;

    fn doc(tokens: &[&str]) -> TokenDoc {
        TokenDoc {
            id: "d".into(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            label: TernaryLabel::NonConspiracy,
        }
    }

    #[test]
    fn build_with_min_df() {
        let docs = [doc(&["a", "b"]), doc(&["a"])];
        let v = Vocabulary::build(&docs, 1).unwrap();
        assert_eq!(v.index_of("a"), Some(0));
        assert_eq!(v.index_of("b"), Some(1));
        let v = Vocabulary::build(&docs, 2).unwrap();
        assert_eq!(v.tokens(), ["a"]);
        assert!(Vocabulary::build(&[doc(&["x"])], 2).is_err());
    }

    #[test]
    fn document_frequency_not_term_frequency() {
        let v = Vocabulary::build(&[doc(&["a", "a"]), doc(&["b"])], 2);
        assert!(v.is_err());
    }

    #[test]
    fn vectorize_counts() {
        let v = Vocabulary::build(&[doc(&["a", "b"])], 1).unwrap();
        assert_eq!(vectorize(&doc(&["a", "a", "z"]), &v).entries(), &[(0, 2)]);
        assert!(vectorize(&doc(&[]), &v).is_empty());
        assert_eq!(vectorize(&doc(&["b", "a"]), &v).entries(), &[(0, 1), (1, 1)]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let v = Vocabulary::build(&[doc(&["b", "a", "c"])], 1).unwrap();
        let json = v.to_json();
        assert_eq!(json, r#"{"min_df":1,"tokens":["a","b","c"]}"#);
        assert_eq!(Vocabulary::from_json(&json).unwrap(), v);
        assert!(Vocabulary::from_json(r#"{"min_df":1,"tokens":["b","a"]}"#).is_err());
        assert!(Vocabulary::from_json(r#"{"min_df":1,"tokens":[]}"#).is_err());
        assert_eq!(v.content_hash().len(), 64);
    }

    #[test]
    fn sparse_vector_invariants() {
        assert!(SparseVector::new(vec![(1, 1), (1, 2)]).is_err());
        assert!(SparseVector::new(vec![(0, 0)]).is_err());
        assert_eq!(
            SparseVector::from_pairs([(3, 1), (1, 2), (3, 1)]).entries(),
            &[(1, 2), (3, 2)]
        );
    }

    proptest! {
        #[test]
        fn counts_sum_to_in_vocab_tokens(
            corpus in prop::collection::vec(prop::collection::vec("[a-e]", 0..6), 1..6),
            probe in prop::collection::vec("[a-g]", 0..10),
        ) {
            let docs: Vec<TokenDoc> = corpus.iter()
                .map(|d| doc(&d.iter().map(String::as_str).collect::<Vec<_>>())).collect();
            let Ok(v) = Vocabulary::build(&docs, 1) else { return Ok(()); };
            let p = doc(&probe.iter().map(String::as_str).collect::<Vec<_>>());
            let in_vocab = probe.iter().filter(|t| v.index_of(t).is_some()).count() as u64;
            prop_assert_eq!(vectorize(&p, &v).total(), in_vocab);
        }

        #[test]
        fn build_is_order_invariant(
            corpus in prop::collection::vec(prop::collection::vec("[a-e]", 0..6), 1..8),
            min_df in 1usize..3,
        ) {
            let docs: Vec<TokenDoc> = corpus.iter()
                .map(|d| doc(&d.iter().map(String::as_str).collect::<Vec<_>>())).collect();
            let mut reversed = docs.clone();
            reversed.reverse();
            let a = Vocabulary::build(&docs, min_df).ok();
            let b = Vocabulary::build(&reversed, min_df).ok();
            prop_assert_eq!(a, b);
        }
    }
}
