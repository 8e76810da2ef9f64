use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{LabeledTweet, TernaryLabel};
use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../../resources/stopwords_en.txt");

/// A set of lowercase words dropped during cleaning.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    /// The bundled 170-word English list.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// One word per line; `#` comment lines and blank lines are skipped.
    pub fn parse(input: &str) -> Self {
        let words = input
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        StopWords(words)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    /// Sorted, one word per line; parses back to the same set.
    pub fn to_file_string(&self) -> String {
        let mut words: Vec<&str> = self.0.iter().map(String::as_str).collect();
        words.sort_unstable();
        words.iter().map(|w| format!("{w}\n")).collect()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for StopWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StopWords(iter.into_iter().map(Into::into).collect())
    }
}

fn url_pattern() -> &'static Regex {
    static URL: OnceLock<Regex> = OnceLock::new();
    URL.get_or_init(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").expect("valid url regex"))
}

/// Clean and tokenize one tweet.
///
/// Steps run in a fixed order: URLs are removed, the text is lowercased,
/// everything outside `[a-z0-9]` and whitespace is stripped (punctuation,
/// emojis, `#`/`@` sigils), the rest is split on whitespace and stop words
/// are dropped.
pub fn clean_text(text: &str, stopwords: &StopWords) -> Vec<String> {
    let without_urls = url_pattern().replace_all(text, " ");
    let lowered = without_urls.to_lowercase();
    let kept: String = lowered
        .chars()
        .filter(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c.is_whitespace())
        .collect();
    kept.split_whitespace()
        .filter(|t| !stopwords.contains(t))
        .map(str::to_owned)
        .collect()
}

/// A cleaned, tokenized tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenDoc {
    pub id: String,
    pub tokens: Vec<String>,
    pub label: TernaryLabel,
}

impl TokenDoc {
    pub fn from_tweet(tweet: &LabeledTweet, stopwords: &StopWords) -> Self {
        TokenDoc {
            id: tweet.id.clone(),
            tokens: clean_text(&tweet.text, stopwords),
            label: tweet.label,
        }
    }
}

pub fn tokenize_all(tweets: &[LabeledTweet], stopwords: &StopWords) -> Vec<TokenDoc> {
    tweets.iter().map(|t| TokenDoc::from_tweet(t, stopwords)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sw(words: &[&str]) -> StopWords {
        words.iter().copied().collect()
    }

    #[test]
    fn strips_urls_emoji_and_sigils() {
        assert_eq!(
            clean_text("Check this!! https://t.co/xyz 😱 #5G", &sw(&["this"])),
            vec!["check", "5g"]
        );
    }

    #[test]
    fn empty_input() {
        assert!(clean_text("", &StopWords::empty()).is_empty());
    }

    #[test]
    fn lowercases_and_drops_stopwords() {
        assert_eq!(
            clean_text("The 5G towers CAUSED it", &sw(&["the", "it"])),
            vec!["5g", "towers", "caused"]
        );
    }

    #[test]
    fn www_and_mentions() {
        assert_eq!(
            clean_text("@User see www.example.com/a?b=c now", &StopWords::empty()),
            vec!["user", "see", "now"]
        );
        assert_eq!(clean_text("HTTP://X.Y", &StopWords::empty()), Vec::<String>::new());
    }

    #[test]
    fn default_list_has_170_words() {
        let words = StopWords::english();
        assert_eq!(words.len(), 170);
        assert!(words.contains("the"));
        assert!(!words.contains("5g"));
    }

    #[test]
    fn stopword_file_comments() {
        let words = StopWords::parse("# header\nfoo\n\n  Bar \n#baz\n");
        assert_eq!(words.len(), 2);
        assert!(words.contains("bar"));
        assert!(!words.contains("baz"));
    }

    proptest! {
        #[test]
        fn idempotent_on_own_output(text in "\\PC{0,80}") {
            let stop = sw(&["the", "a", "of"]);
            let once = clean_text(&text, &stop);
            let twice = clean_text(&once.join(" "), &stop);
            prop_assert_eq!(&once, &twice);
            for tok in &once {
                prop_assert!(!tok.is_empty());
                prop_assert!(tok.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit()));
            }
        }
    }
}
