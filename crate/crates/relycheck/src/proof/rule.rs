//! Rule names.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    Consequence,
    Pre,
    Access,
    Skip,
    Assignment,
    Block,
    Sequential,
    If,
    While,
    Parallel,
    ParallelGeneral,
    Await,
    Elimination,
    Effect,
    Global,
    Auxiliary,
    Introduction,
    LspsWhile,
    LspsAwait,
}

impl RuleName {
    pub const ALL: [RuleName; 19] = [
        RuleName::Consequence,
        RuleName::Pre,
        RuleName::Access,
        RuleName::Skip,
        RuleName::Assignment,
        RuleName::Block,
        RuleName::Sequential,
        RuleName::If,
        RuleName::While,
        RuleName::Parallel,
        RuleName::ParallelGeneral,
        RuleName::Await,
        RuleName::Elimination,
        RuleName::Effect,
        RuleName::Global,
        RuleName::Auxiliary,
        RuleName::Introduction,
        RuleName::LspsWhile,
        RuleName::LspsAwait,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleName::Consequence => "consequence",
            RuleName::Pre => "pre",
            RuleName::Access => "access",
            RuleName::Skip => "skip",
            RuleName::Assignment => "assignment",
            RuleName::Block => "block",
            RuleName::Sequential => "sequential",
            RuleName::If => "if",
            RuleName::While => "while",
            RuleName::Parallel => "parallel",
            RuleName::ParallelGeneral => "parallel-general",
            RuleName::Await => "await",
            RuleName::Elimination => "elimination",
            RuleName::Effect => "effect",
            RuleName::Global => "global",
            RuleName::Auxiliary => "auxiliary",
            RuleName::Introduction => "introduction",
            RuleName::LspsWhile => "lsps-while",
            RuleName::LspsAwait => "lsps-await",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleName> {
        RuleName::ALL.into_iter().find(|r| r.name() == s)
    }

    /// Rules outside the basic set.
    pub fn is_removal_rule(self) -> bool {
        self == RuleName::Introduction
    }
}

impl std::fmt::Display for RuleName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
