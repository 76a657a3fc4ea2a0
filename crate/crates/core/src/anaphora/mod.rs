//! Resolution of @-operators by witness search over the left context.
//!
//! Each @-operator `@_i c : T` raises a felicity goal `Π c: γ. T` where `γ`
//! is the type of the context it is applied to. Witnesses are built from
//! antecedents found in `γ` following three templates: replace-combinator
//! terms for verb phrases, entity projections for pronouns, and coerced
//! event projections for propositional anaphora.

mod discourse;
mod goal;
mod harvest;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::replace_inhabitant;
use crate::signature::{GlobalSignature, ReplaceKind, Telescope};
use crate::term::Term;
use crate::typecheck::{infer_type, TypeError};

pub use discourse::{
    propositionalize, resolve_discourse, resolve_discourse_traced, GoalTrace, Resolution, ResolutionTrace,
    INITIAL_CONTEXT,
};
pub use goal::{goal_shape, resolve_goal, Candidate, FelicityGoal, GoalShape, ResolutionHints, Voice};
pub use harvest::{
    abstract_property, harvest_antecedents, AccessPath, Antecedent, Participant, Proj, Role, DEFAULT_DEPTH,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadingLabel {
    Strict,
    Sloppy,
    AgentReplaced,
    PatientReplaced,
    Pronominal,
    Propositional,
    /// A discourse without anaphora.
    Direct,
}

impl ReadingLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ReadingLabel::Strict => "strict",
            ReadingLabel::Sloppy => "sloppy",
            ReadingLabel::AgentReplaced => "agent-replaced",
            ReadingLabel::PatientReplaced => "patient-replaced",
            ReadingLabel::Pronominal => "pronominal",
            ReadingLabel::Propositional => "propositional",
            ReadingLabel::Direct => "direct",
        }
    }
}

impl fmt::Display for ReadingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReadingLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use ReadingLabel::*;
        [Strict, Sloppy, AgentReplaced, PatientReplaced, Pronominal, Propositional, Direct]
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown reading label `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ResolveError {
    #[error("no resolution for @_{index}: nothing in the context inhabits {goal}")]
    NoResolution { index: usize, goal: Term },
    #[error("{role}({entity}) does not occur in the antecedent")]
    OccurrenceNotFound { role: Role, entity: Term },
    #[error("ill-typed replace application: {0}")]
    IllTypedApplication(Box<TypeError>),
    #[error("@_{index} has an ascription outside the supported goal shapes: {goal}")]
    UnsupportedGoal { index: usize, goal: Term },
    #[error("@_{0} is not applied to a context")]
    UnappliedAnaphor(usize),
    #[error(transparent)]
    Type(Box<TypeError>),
}

impl From<TypeError> for ResolveError {
    fn from(e: TypeError) -> Self {
        ResolveError::Type(Box::new(e))
    }
}

impl ResolveError {
    /// The @-index a resolution failure refers to.
    pub fn index(&self) -> Option<usize> {
        match self {
            ResolveError::NoResolution { index, .. }
            | ResolveError::UnsupportedGoal { index, .. }
            | ResolveError::UnappliedAnaphor(index) => Some(*index),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolveOptions {
    pub depth: usize,
    pub max_candidates: usize,
    pub max_readings: usize,
    pub trace: bool,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { depth: DEFAULT_DEPTH, max_candidates: 64, max_readings: 64, trace: false }
    }
}

/// Unfolds a fully applied replace combinator to the pair of its Skolem
/// event and proof, after checking that the application is well typed.
/// Partial applications and other terms come back unchanged.
pub fn delta_replace(sig: &GlobalSignature, tel: &Telescope, application: &Term) -> Result<Term, ResolveError> {
    let (head, args) = application.spine();
    let Some(kind) = head.head_const().and_then(ReplaceKind::from_constant) else {
        return Ok(application.clone());
    };
    if args.len() != kind.arity() {
        return Ok(application.clone());
    }
    infer_type(sig, tel, application).map_err(|e| ResolveError::IllTypedApplication(Box::new(e)))?;
    Ok(replace_inhabitant(kind, args.into_iter().cloned()))
}
