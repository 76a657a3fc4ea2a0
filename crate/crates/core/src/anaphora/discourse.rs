//! Enumeration of readings for a whole discourse.

use std::collections::BTreeMap;

use crate::normalize::normalize;
use crate::signature::{GlobalSignature, Telescope};
use crate::term::{fresh_name, Sort, Term};
use crate::typecheck::{infer_sort, infer_type};

use super::goal::{resolve_goal, FelicityGoal, ResolutionHints};
use super::harvest::harvest_antecedents;
use super::{ReadingLabel, ResolveError, ResolveOptions};

/// Name of the initial context variable in interpretations.
pub const INITIAL_CONTEXT: &str = "c0";

#[derive(Clone, Debug, PartialEq)]
pub struct Resolution {
    /// Witness chosen for each @-index.
    pub assignments: BTreeMap<usize, Term>,
    pub labels: BTreeMap<usize, ReadingLabel>,
    /// Label of the last resolved @-operator, or `direct`.
    pub label: ReadingLabel,
    /// Normalized type of the discourse applied to the initial context.
    pub interpretation: Term,
}

/// One visit of an @-operator during the search. An operator is visited once
/// per reading of the discourse before it.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalTrace {
    pub index: usize,
    pub context_type: Term,
    pub goal_type: Term,
    /// `path : type` for each harvested antecedent.
    pub antecedents: Vec<(String, Term)>,
    pub candidates: Vec<(ReadingLabel, Term)>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResolutionTrace {
    pub goals: Vec<GoalTrace>,
}

struct Site {
    index: usize,
    ascription: Term,
    ctx: Term,
    telescope: Telescope,
}

/// Resolves every @-operator of `dyn_prop` applied to a context of type
/// `initial`, left to right, and returns the distinct readings in search
/// order. A branch whose later operator has no witness is dropped; when
/// every branch fails, the first failure is returned.
pub fn resolve_discourse(
    sig: &GlobalSignature,
    dyn_prop: &Term,
    initial: &Term,
    hints: &BTreeMap<usize, ResolutionHints>,
    opts: &ResolveOptions,
) -> Result<Vec<Resolution>, ResolveError> {
    resolve_discourse_traced(sig, dyn_prop, initial, hints, opts).0
}

pub fn resolve_discourse_traced(
    sig: &GlobalSignature,
    dyn_prop: &Term,
    initial: &Term,
    hints: &BTreeMap<usize, ResolutionHints>,
    opts: &ResolveOptions,
) -> (Result<Vec<Resolution>, ResolveError>, ResolutionTrace) {
    let mut search = Search {
        sig,
        hints,
        opts,
        tel: Telescope::new().extended(INITIAL_CONTEXT, initial.clone()),
        results: Vec::new(),
        first_error: None,
        trace: ResolutionTrace::default(),
    };
    let out = search.run(dyn_prop);
    (out, search.trace)
}

struct Search<'a> {
    sig: &'a GlobalSignature,
    hints: &'a BTreeMap<usize, ResolutionHints>,
    opts: &'a ResolveOptions,
    tel: Telescope,
    results: Vec<Resolution>,
    first_error: Option<ResolveError>,
    trace: ResolutionTrace,
}

#[derive(Clone)]
struct State {
    term: Term,
    assignments: BTreeMap<usize, Term>,
    labels: BTreeMap<usize, ReadingLabel>,
}

impl Search<'_> {
    fn run(&mut self, dyn_prop: &Term) -> Result<Vec<Resolution>, ResolveError> {
        let applied = Term::app(dyn_prop.clone(), Term::var(INITIAL_CONTEXT));
        let body = normalize(self.sig, &applied).map_err(|e| ResolveError::from(budget_error(e)))?;
        let mut tel = self.tel.clone();
        let body = propositionalize(self.sig, &mut tel, &body)?;
        self.explore(State { term: body, assignments: BTreeMap::new(), labels: BTreeMap::new() });
        if self.results.is_empty() {
            if let Some(e) = self.first_error.take() {
                return Err(e);
            }
        }
        Ok(std::mem::take(&mut self.results))
    }

    fn fail(&mut self, e: ResolveError) {
        if self.first_error.is_none() {
            self.first_error = Some(e);
        }
    }

    fn explore(&mut self, state: State) {
        if self.results.len() >= self.opts.max_readings {
            return;
        }
        let mut tel = self.tel.clone();
        let mut found = Vec::new();
        let expanded = {
            let mut on_site = |site: &Site| self.candidates(site, &mut found);
            expand_first(&state.term, &mut tel, &mut on_site)
        };
        let terms = match expanded {
            None => return self.finish(state),
            Some(Err(e)) => return self.fail(e),
            Some(Ok(terms)) => terms,
        };
        for (term, (index, witness, label)) in terms.into_iter().zip(found) {
            let next = normalize(self.sig, &term)
                .map_err(|e| ResolveError::from(budget_error(e)))
                .and_then(|t| propositionalize(self.sig, &mut self.tel.clone(), &t));
            match next {
                Ok(term) => {
                    let mut s = State { term, assignments: state.assignments.clone(), labels: state.labels.clone() };
                    s.assignments.insert(index, witness);
                    s.labels.insert(index, label);
                    self.explore(s);
                }
                Err(e) => self.fail(e),
            }
        }
    }

    fn candidates(
        &mut self,
        site: &Site,
        found: &mut Vec<(usize, Term, ReadingLabel)>,
    ) -> Result<Vec<Term>, ResolveError> {
        let ctx_ty = infer_type(self.sig, &site.telescope, &site.ctx)?;
        let goal = FelicityGoal::new(site.index, site.telescope.clone(), ctx_ty, site.ascription.clone());
        let hints = self.hints.get(&site.index).cloned().unwrap_or_default();
        let result = resolve_goal(self.sig, &goal, &hints, self.opts);
        if self.opts.trace {
            let ants = harvest_antecedents(self.sig, &Term::var("c"), &goal.context_type, self.opts.depth);
            self.trace.goals.push(GoalTrace {
                index: site.index,
                context_type: goal.context_type.clone(),
                goal_type: goal.goal_type.clone(),
                antecedents: ants.into_iter().map(|a| (a.path.to_string(), a.ty)).collect(),
                candidates: result
                    .as_ref()
                    .map(|cs| cs.iter().map(|c| (c.label, c.witness.clone())).collect())
                    .unwrap_or_default(),
                error: result.as_ref().err().map(|e| e.to_string()),
            });
        }
        let cands = result?;
        found.extend(cands.iter().map(|c| (site.index, c.witness.clone(), c.label)));
        Ok(cands.into_iter().map(|c| c.witness).collect())
    }

    fn finish(&mut self, state: State) {
        let interpretation = state.term;
        match infer_sort(self.sig, &self.tel, &interpretation) {
            Ok(Sort::Type) => {}
            Ok(s) => {
                return self.fail(ResolveError::from(crate::typecheck::TypeError {
                    kind: crate::typecheck::TypeErrorKind::SortMismatch,
                    location: Vec::new(),
                    expected: Some(Term::ty()),
                    found: Some(Term::Sort(s)),
                }))
            }
            Err(e) => return self.fail(e.into()),
        }
        if self.results.iter().any(|r| r.interpretation == interpretation) {
            return;
        }
        let label = state.labels.values().next_back().copied().unwrap_or(ReadingLabel::Direct);
        self.results.push(Resolution { assignments: state.assignments, labels: state.labels, label, interpretation });
    }
}

fn budget_error(e: crate::normalize::NormalizeError) -> crate::typecheck::TypeError {
    let crate::normalize::NormalizeError::DepthExceeded(n) = e;
    crate::typecheck::TypeError {
        kind: crate::typecheck::TypeErrorKind::Budget(n),
        location: Vec::new(),
        expected: None,
        found: None,
    }
}

type Expansion = Option<Result<Vec<Term>, ResolveError>>;

/// Finds the leftmost applied @-operator, asks `f` for replacements of the
/// operator, and rebuilds the term around each. Binders on the way are
/// opened with fresh variables typed in `tel`, so `f` sees the site's local
/// telescope.
fn expand_first(
    t: &Term,
    tel: &mut Telescope,
    f: &mut dyn FnMut(&Site) -> Result<Vec<Term>, ResolveError>,
) -> Expansion {
    if !t.contains_at_op() {
        return None;
    }
    let map = |r: Expansion, g: &dyn Fn(Term) -> Term| r.map(|r| r.map(|v| v.into_iter().map(g).collect()));
    match t {
        Term::App(fun, arg) => {
            if let Term::AtOp(i, asc) = fun.as_ref() {
                let site = Site {
                    index: *i,
                    ascription: asc.as_ref().clone(),
                    ctx: arg.as_ref().clone(),
                    telescope: tel.clone(),
                };
                return Some(f(&site).map(|ws| ws.into_iter().map(|w| Term::app(w, arg.as_ref().clone())).collect()));
            }
            if let Some(r) = expand_first(fun, tel, f) {
                return map(Some(r), &|x| Term::app(x, arg.as_ref().clone()));
            }
            let r = expand_first(arg, tel, f);
            map(r, &|x| Term::app(fun.as_ref().clone(), x))
        }
        Term::AtOp(i, _) => Some(Err(ResolveError::UnappliedAnaphor(*i))),
        Term::Pi(x, a, b) | Term::Sigma(x, a, b) => {
            let is_pi = matches!(t, Term::Pi(..));
            let build = move |x: &crate::term::Binder, a: Term, b: Term| {
                if is_pi {
                    Term::Pi(x.clone(), a.into(), b.into())
                } else {
                    Term::Sigma(x.clone(), a.into(), b.into())
                }
            };
            if let Some(r) = expand_first(a, tel, f) {
                return map(Some(r), &|a2| build(x, a2, b.as_ref().clone()));
            }
            let v = fresh_name(x.name());
            tel.push(v.clone(), a.as_ref().clone());
            let r = expand_first(&b.open(&Term::var(&v)), tel, f);
            tel.pop();
            map(r, &|b2| build(x, a.as_ref().clone(), b2.close(&v)))
        }
        Term::Lam(x, b) => {
            let v = fresh_name(x.name());
            let r = expand_first(&b.open(&Term::var(&v)), tel, f);
            map(r, &|b2| Term::Lam(x.clone(), b2.close(&v).into()))
        }
        Term::Pair(a, b) => {
            if let Some(r) = expand_first(a, tel, f) {
                return map(Some(r), &|a2| Term::pair(a2, b.as_ref().clone()));
            }
            let r = expand_first(b, tel, f);
            map(r, &|b2| Term::pair(a.as_ref().clone(), b2))
        }
        Term::Fst(p) => map(expand_first(p, tel, f), &Term::fst),
        Term::Snd(p) => map(expand_first(p, tel, f), &Term::snd),
        _ => None,
    }
}

/// Replaces each term standing in a type position (the whole, or a Σ/Π
/// component) by its normalized type. Resolved verb-phrase anaphors are
/// such terms: their type is the proposition they contribute. Parts still
/// containing @-operators are left for later.
pub fn propositionalize(sig: &GlobalSignature, tel: &mut Telescope, t: &Term) -> Result<Term, ResolveError> {
    match t {
        Term::Pi(x, a, b) | Term::Sigma(x, a, b) => {
            let a2 = propositionalize(sig, tel, a)?;
            if a2.contains_at_op() {
                // The body cannot be typed until the domain is resolved.
                let rebuilt = if matches!(t, Term::Pi(..)) { Term::Pi } else { Term::Sigma };
                return Ok(rebuilt(x.clone(), a2.into(), b.clone()));
            }
            let v = fresh_name(x.name());
            tel.push(v.clone(), a2.clone());
            let b2 = propositionalize(sig, tel, &b.open(&Term::var(&v)));
            tel.pop();
            let b2 = b2?.close(&v);
            Ok(if matches!(t, Term::Pi(..)) {
                Term::Pi(x.clone(), a2.into(), b2.into())
            } else {
                Term::Sigma(x.clone(), a2.into(), b2.into())
            })
        }
        Term::Unit => Ok(Term::Unit),
        _ if t.contains_at_op() => Ok(t.clone()),
        _ => {
            let ty = infer_type(sig, tel, t)?;
            if ty.is_sort() {
                Ok(t.clone())
            } else {
                propositionalize(sig, tel, &ty)
            }
        }
    }
}
