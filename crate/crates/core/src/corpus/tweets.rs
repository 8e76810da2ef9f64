use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TernaryLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledTweet {
    pub id: String,
    pub text: String,
    pub label: TernaryLabel,
}

/// Parse the tweet TSV format: `id<TAB>label<TAB>text`, no header.
///
/// Blank lines are skipped. Line numbers in errors are 1-based.
pub fn parse_tweets(input: &str) -> Result<Vec<LabeledTweet>> {
    let mut tweets = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 tab-separated columns, found {}", cols.len()),
            ));
        }
        let (id, label, text) = (cols[0], cols[1], cols[2]);
        if id.is_empty() {
            return Err(Error::parse(line_no, "empty id"));
        }
        let label =
            TernaryLabel::from_token(label).ok_or_else(|| Error::parse(line_no, format!("unknown label {label:?}")))?;
        if text.trim().is_empty() {
            return Err(Error::parse(line_no, "empty text"));
        }
        if !seen.insert(id.to_owned()) {
            return Err(Error::parse(line_no, format!("duplicate id {id:?}")));
        }
        tweets.push(LabeledTweet {
            id: id.to_owned(),
            text: text.to_owned(),
            label,
        });
    }
    Ok(tweets)
}

pub fn load_tweets(path: impl AsRef<Path>) -> Result<Vec<LabeledTweet>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tweets(&text)
}

pub fn format_tweets(tweets: &[LabeledTweet]) -> String {
    let mut out = String::new();
    for t in tweets {
        let _ = writeln!(out, "{}\t{}\t{}", t.id, t.label.token(), t.text);
    }
    out
}

pub fn save_tweets(path: impl AsRef<Path>, tweets: &[LabeledTweet]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_tweets(tweets)).map_err(|e| Error::io(path, e))
}
