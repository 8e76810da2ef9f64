use std::fmt;
use std::str::FromStr;

use fakenews_core::corpus::Task;
use fakenews_core::ensemble::FusionRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    BowNb,
    EmbedLr,
}

/// One of the six named text runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSpec {
    pub name: &'static str,
    pub task: Task,
    pub base: Base,
    pub fusion: FusionRule,
}

pub const RUNS: [RunSpec; 6] = [
    RunSpec {
        name: "run1",
        task: Task::Ternary,
        base: Base::BowNb,
        fusion: FusionRule::MajorityVote,
    },
    RunSpec {
        name: "run2",
        task: Task::Ternary,
        base: Base::BowNb,
        fusion: FusionRule::ScoreSum,
    },
    RunSpec {
        name: "run3",
        task: Task::Ternary,
        base: Base::EmbedLr,
        fusion: FusionRule::ScoreSum,
    },
    RunSpec {
        name: "run4",
        task: Task::Binary,
        base: Base::BowNb,
        fusion: FusionRule::MajorityVote,
    },
    RunSpec {
        name: "run5",
        task: Task::Binary,
        base: Base::BowNb,
        fusion: FusionRule::ScoreSum,
    },
    RunSpec {
        name: "run6",
        task: Task::Binary,
        base: Base::EmbedLr,
        fusion: FusionRule::ScoreSum,
    },
];

impl FromStr for RunSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase();
        RUNS.iter()
            .find(|r| r.name == key)
            .copied()
            .ok_or_else(|| format!("unknown run {s:?}; expected one of run1..run6"))
    }
}

impl fmt::Display for RunSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base {
            Base::BowNb => "bow-nb",
            Base::EmbedLr => "embed-lr",
        };
        write!(f, "{} ({}, {base}, {})", self.name, self.task, self.fusion)
    }
}
