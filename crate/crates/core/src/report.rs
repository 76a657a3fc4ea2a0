//! End-to-end runs over discourse files and their reports.
//!
//! The structured report is JSON with this schema (terms are strings in
//! the s-expression format, formulas are tagged trees):
//!
//! ```text
//! {
//!   "source": "hat.txt",
//!   "sentences": [{"line": 1, "text": "John likes his hat."}, ...],
//!   "dynamic": "(lambda (c) ...)",
//!   "goals": [{"index": 1, "ascription": "...", "hints": {...}}],
//!   "readings": [{
//!     "label": "strict",
//!     "labels": {"1": "strict"},
//!     "witnesses": {"1": "(lambda (c x) ...)"},
//!     "interpretation": "(sigma ...)",
//!     "fol": {...},
//!     "fol_text": "∃x. hat(x) ∧ ..."
//!   }],
//!   "trace": [...]            // only with tracing enabled
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anaphora::{resolve_discourse_traced, ReadingLabel, ResolutionHints, ResolveError, ResolveOptions};
use crate::fol::{to_fol, FolError, FolFormula};
use crate::fragment::{interpret_discourse, FragmentError, Lexicon};
use crate::sexpr::print;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentenceSummary {
    pub line: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalSummary {
    pub index: usize,
    pub ascription: Term,
    pub hints: ResolutionHints,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reading {
    pub label: ReadingLabel,
    pub labels: BTreeMap<usize, ReadingLabel>,
    pub witnesses: BTreeMap<usize, Term>,
    pub interpretation: Term,
    pub fol: FolFormula,
    pub fol_text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    pub context_type: Term,
    pub goal_type: Term,
    pub antecedents: Vec<(String, Term)>,
    pub candidates: Vec<(ReadingLabel, Term)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub source: String,
    pub sentences: Vec<SentenceSummary>,
    pub dynamic: Term,
    pub goals: Vec<GoalSummary>,
    pub readings: Vec<Reading>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{source_name}: {error}")]
    Fragment { source_name: String, error: FragmentError },
    #[error("{source_name}: {error}")]
    Resolve { source_name: String, error: ResolveError, trace: Option<Vec<TraceEntry>> },
    #[error("{source_name}: {error}")]
    Fol { source_name: String, error: FolError },
}

impl RunError {
    /// 2 for a failed felicity condition, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Resolve { error: ResolveError::Type(_) | ResolveError::IllTypedApplication(_), .. } => 1,
            RunError::Resolve { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub resolve: ResolveOptions,
}

/// Interprets, resolves and exports one discourse given as text.
pub fn run_discourse(lex: &Lexicon, source_name: &str, text: &str, opts: &RunOptions) -> Result<RunReport, RunError> {
    let disc = interpret_discourse(lex, text)
        .map_err(|error| RunError::Fragment { source_name: source_name.to_string(), error })?;
    let sig = lex.signature();
    let (result, trace) = resolve_discourse_traced(&sig, &disc.prop.term, &Term::Unit, &disc.prop.hints, &opts.resolve);
    let trace = opts.resolve.trace.then(|| {
        trace
            .goals
            .into_iter()
            .map(|g| TraceEntry {
                index: g.index,
                context_type: g.context_type,
                goal_type: g.goal_type,
                antecedents: g.antecedents,
                candidates: g.candidates,
                error: g.error,
            })
            .collect::<Vec<_>>()
    });
    let resolutions = result.map_err(|error| RunError::Resolve {
        source_name: source_name.to_string(),
        error,
        trace: trace.clone(),
    })?;
    let mut readings = Vec::new();
    for r in resolutions {
        let fol = to_fol(&r.interpretation)
            .map_err(|error| RunError::Fol { source_name: source_name.to_string(), error })?;
        readings.push(Reading {
            label: r.label,
            labels: r.labels,
            witnesses: r.assignments,
            interpretation: r.interpretation,
            fol_text: fol.to_string(),
            fol,
        });
    }
    let mut goals = Vec::new();
    disc.prop.term.visit(&mut |t| {
        if let Term::AtOp(i, asc) = t {
            goals.push(GoalSummary {
                index: *i,
                ascription: asc.as_ref().clone(),
                hints: disc.prop.hints.get(i).cloned().unwrap_or_default(),
            });
        }
    });
    goals.sort_by_key(|g| g.index);
    Ok(RunReport {
        source: source_name.to_string(),
        sentences: disc.sentences.iter().map(|s| SentenceSummary { line: s.line, text: s.text.clone() }).collect(),
        dynamic: disc.prop.term,
        goals,
        readings,
        trace,
    })
}

/// Reads and runs one discourse file.
pub fn run_file(lex: &Lexicon, path: &Path, opts: &RunOptions) -> Result<RunReport, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    run_discourse(lex, &path.display().to_string(), &text, opts)
}

/// Runs several files in parallel. Results come back in input order.
pub fn run_files(lex: &Lexicon, paths: &[PathBuf], opts: &RunOptions) -> Vec<Result<RunReport, RunError>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = paths.iter().map(|p| s.spawn(move || run_file(lex, p, opts))).collect();
        handles.into_iter().map(|h| h.join().expect("discourse worker panicked")).collect()
    })
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(src: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(src)
    }

    /// Human-readable rendering. With `fol_only`, each reading is a single
    /// line `label: formula`.
    pub fn to_text(&self, fol_only: bool) -> String {
        let mut out = String::new();
        if fol_only {
            for r in &self.readings {
                let _ = writeln!(out, "{}: {}", r.label, r.fol_text);
            }
            return out;
        }
        let _ = writeln!(out, "discourse: {}", self.source);
        for s in &self.sentences {
            let _ = writeln!(out, "  {:>3}  {}", s.line, s.text);
        }
        if let Some(trace) = &self.trace {
            out.push_str(&render_trace(trace));
        }
        let _ = writeln!(out, "readings: {}", self.readings.len());
        for (n, r) in self.readings.iter().enumerate() {
            let _ = writeln!(out, "[{}] {}", n + 1, r.label);
            for (i, w) in &r.witnesses {
                let _ = writeln!(out, "  @{i} := {}", print(w));
            }
            let _ = writeln!(out, "  type: {}", print(&r.interpretation));
            let _ = writeln!(out, "  fol:  {}", r.fol_text);
        }
        out
    }
}

pub fn render_trace(trace: &[TraceEntry]) -> String {
    let mut out = String::new();
    for g in trace {
        let _ = writeln!(out, "goal @{} : {}", g.index, print(&g.goal_type));
        let _ = writeln!(out, "  context : {}", print(&g.context_type));
        for (path, ty) in &g.antecedents {
            let _ = writeln!(out, "  antecedent {path} : {}", print(ty));
        }
        for (label, w) in &g.candidates {
            let _ = writeln!(out, "  witness [{label}] {}", print(w));
        }
        if let Some(e) = &g.error {
            let _ = writeln!(out, "  failed: {e}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mary_did_too() {
        let lex = Lexicon::default_lexicon();
        let r = run_discourse(&lex, "t", "John left. Mary did too.", &RunOptions::default()).unwrap();
        assert_eq!(r.readings.len(), 1);
        assert_eq!(r.goals.len(), 1);
        assert_eq!(r.readings[0].fol_text, "∃e. left(e) ∧ agent(e, j) ∧ ∃e''. left(e'') ∧ agent(e'', m)");
    }

    #[test]
    fn json_round_trip() {
        let lex = Lexicon::default_lexicon();
        let mut opts = RunOptions::default();
        opts.resolve.trace = true;
        let r = run_discourse(&lex, "t", "John likes his hat. Fred does too.", &opts).unwrap();
        let back = RunReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn infelicitous_exit_code() {
        let lex = Lexicon::default_lexicon();
        let e = run_discourse(&lex, "t", "Mary did too.", &RunOptions::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(matches!(e, RunError::Resolve { error: ResolveError::NoResolution { index: 1, .. }, .. }));
    }
}
