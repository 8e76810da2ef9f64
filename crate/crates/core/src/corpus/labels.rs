use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Ternary ground-truth label. The integer codes are persisted and must not change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TernaryLabel {
    FiveG = 0,
    OtherConspiracy = 1,
    NonConspiracy = 2,
}

impl TernaryLabel {
    pub const ALL: [TernaryLabel; 3] = [
        TernaryLabel::FiveG,
        TernaryLabel::OtherConspiracy,
        TernaryLabel::NonConspiracy,
    ];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Self> {
        Self::ALL.get(code).copied()
    }

    pub fn token(self) -> &'static str {
        match self {
            TernaryLabel::FiveG => "5g_corona_conspiracy",
            TernaryLabel::OtherConspiracy => "other_conspiracy",
            TernaryLabel::NonConspiracy => "non_conspiracy",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.token() == token)
    }

    pub fn to_binary(self) -> BinaryLabel {
        match self {
            TernaryLabel::FiveG => BinaryLabel::FiveG,
            TernaryLabel::OtherConspiracy | TernaryLabel::NonConspiracy => BinaryLabel::Rest,
        }
    }
}

impl fmt::Display for TernaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for TernaryLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_token(s).ok_or_else(|| Error::Data(format!("unknown label {s:?}")))
    }
}

impl Serialize for TernaryLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for TernaryLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::from_token(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown label {s:?}")))
    }
}

/// Binary view of the label space: 5G conspiracy against everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryLabel {
    FiveG = 0,
    Rest = 1,
}

impl BinaryLabel {
    pub fn is_positive(self) -> bool {
        self == BinaryLabel::FiveG
    }

    pub fn token(self) -> &'static str {
        match self {
            BinaryLabel::FiveG => "5g_corona_conspiracy",
            BinaryLabel::Rest => "not_5g",
        }
    }
}

/// Classification task. Class indices are `0..num_classes()`; index 0 is
/// always the 5G conspiracy class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Binary,
    Ternary,
}

impl Task {
    pub fn num_classes(self) -> usize {
        match self {
            Task::Binary => 2,
            Task::Ternary => 3,
        }
    }

    pub fn class_of(self, label: TernaryLabel) -> usize {
        match self {
            Task::Binary => label.to_binary() as usize,
            Task::Ternary => label.code(),
        }
    }

    /// Token written to prediction files for a class index.
    pub fn class_token(self, class: usize) -> &'static str {
        match self {
            Task::Binary => {
                if class == 0 {
                    BinaryLabel::FiveG.token()
                } else {
                    BinaryLabel::Rest.token()
                }
            }
            Task::Ternary => TernaryLabel::ALL[class].token(),
        }
    }

    pub fn class_from_token(self, token: &str) -> Option<usize> {
        (0..self.num_classes()).find(|&c| self.class_token(c) == token)
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Binary => "binary",
            Task::Ternary => "ternary",
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(Task::Binary),
            "ternary" => Ok(Task::Ternary),
            _ => Err(Error::Validation(format!("unknown task {s:?}"))),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_stable() {
        assert_eq!(TernaryLabel::FiveG.code(), 0);
        assert_eq!(TernaryLabel::OtherConspiracy.code(), 1);
        assert_eq!(TernaryLabel::NonConspiracy.code(), 2);
        for l in TernaryLabel::ALL {
            assert_eq!(TernaryLabel::from_token(l.token()), Some(l));
            assert_eq!(TernaryLabel::from_code(l.code()), Some(l));
        }
    }

    #[test]
    fn binary_mapping() {
        assert_eq!(Task::Binary.class_of(TernaryLabel::FiveG), 0);
        assert_eq!(Task::Binary.class_of(TernaryLabel::OtherConspiracy), 1);
        assert_eq!(Task::Binary.class_of(TernaryLabel::NonConspiracy), 1);
        assert_eq!(Task::Binary.class_from_token("not_5g"), Some(1));
        assert_eq!(Task::Ternary.class_from_token("not_5g"), None);
    }
}
