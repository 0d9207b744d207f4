//! Deliberate defects that can be switched on to confirm the law suites
//! notice them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Relation composition returns the outer span without factorising it.
    SkipFactorisation,
    /// The matrix dagger returns its argument instead of the transpose.
    IdentityDaggerMat,
    /// The multivalued-function sampler stops covering missed codomain points.
    DropSurjectivityRepair,
    /// The conditional product divides by `Pr_C(c)²` instead of `Pr_C(c)`.
    WrongConditionalDenominator,
    /// Matrix rank is estimated without pivoting, at a threshold 10³ times
    /// too coarse.
    UnpivotedRankEstimate,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::SkipFactorisation,
        Mutation::IdentityDaggerMat,
        Mutation::DropSurjectivityRepair,
        Mutation::WrongConditionalDenominator,
        Mutation::UnpivotedRankEstimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::SkipFactorisation => "skip-factorisation",
            Mutation::IdentityDaggerMat => "identity-dagger-mat",
            Mutation::DropSurjectivityRepair => "drop-surjectivity-repair",
            Mutation::WrongConditionalDenominator => "wrong-conditional-denominator",
            Mutation::UnpivotedRankEstimate => "unpivoted-rank-estimate",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutation '{s}'"))
    }
}

/// `true` when `m` is the active mutation.
pub fn active(current: Option<Mutation>, m: Mutation) -> bool {
    current == Some(m)
}
