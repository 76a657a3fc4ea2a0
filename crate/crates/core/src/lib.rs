//! Dependent type semantics with a neo-Davidsonian event type.
//!
//! The crate covers the term calculus ([`term`], [`normalize`]), a
//! bidirectional type checker ([`typecheck`]) with coercive event subtyping
//! ([`subtype`]), template-directed anaphora resolution ([`anaphora`]), a
//! controlled English fragment ([`fragment`]) and first-order export
//! ([`fol`], [`report`]).

// Type errors carry both sides of a mismatch and only occur on the failure
// path.
#![allow(clippy::result_large_err)]

pub mod anaphora;
pub mod fol;
pub mod fragment;
pub mod normalize;
pub mod report;
pub mod sexpr;
pub mod signature;
pub mod subtype;
pub mod term;
pub mod typecheck;

pub use fol::{to_fol, FolFormula};
pub use normalize::{normalize, NormalizeError};
pub use signature::{GlobalSignature, Telescope};
pub use subtype::{is_subtype, to_chain, Coercion, PropertyChain};
pub use term::{alpha_eq, free_vars, substitute, Sort, Term};
pub use typecheck::{check_type, infer_sort, infer_type, CheckOptions, TypeError};
