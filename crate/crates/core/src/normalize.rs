//! Normal-order reduction with a step budget.
//!
//! Redexes are beta `(λx.M) N`, projections `π1 (M, N)` / `π2 (M, N)`, and
//! the delta rules registered in the signature. A replace combinator reduces
//! only when its event argument is a canonical pair; applied to a neutral
//! context projection it stays stuck, which keeps resolved templates readable.

use thiserror::Error;

use crate::signature::{DeltaRule, GlobalSignature, ReplaceKind};
use crate::term::{fresh_name, Term};

pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("reduction exceeded {0} steps")]
    DepthExceeded(usize),
}

pub fn normalize(sig: &GlobalSignature, t: &Term) -> Result<Term, NormalizeError> {
    normalize_with_budget(sig, t, DEFAULT_BUDGET)
}

pub fn normalize_with_budget(sig: &GlobalSignature, t: &Term, budget: usize) -> Result<Term, NormalizeError> {
    Reducer { sig, steps: 0, budget }.nf(t)
}

/// Weak head normal form.
pub fn whnf(sig: &GlobalSignature, t: &Term) -> Result<Term, NormalizeError> {
    Reducer { sig, steps: 0, budget: DEFAULT_BUDGET }.whnf(t)
}

struct Reducer<'a> {
    sig: &'a GlobalSignature,
    steps: usize,
    budget: usize,
}

impl Reducer<'_> {
    fn tick(&mut self) -> Result<(), NormalizeError> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(NormalizeError::DepthExceeded(self.budget))
        } else {
            Ok(())
        }
    }

    fn whnf(&mut self, t: &Term) -> Result<Term, NormalizeError> {
        let mut cur = t.clone();
        loop {
            let next = match &cur {
                Term::App(f, a) => {
                    let f = self.whnf(f)?;
                    match f {
                        Term::Lam(_, body) => {
                            self.tick()?;
                            Some(body.open(a))
                        }
                        f => {
                            let app = Term::app(f, a.as_ref().clone());
                            match self.delta(&app)? {
                                Some(r) => Some(r),
                                None => return Ok(app),
                            }
                        }
                    }
                }
                Term::Fst(p) => match self.whnf(p)? {
                    Term::Pair(a, _) => {
                        self.tick()?;
                        Some(a.as_ref().clone())
                    }
                    p => return Ok(Term::fst(p)),
                },
                Term::Snd(p) => match self.whnf(p)? {
                    Term::Pair(_, b) => {
                        self.tick()?;
                        Some(b.as_ref().clone())
                    }
                    p => return Ok(Term::snd(p)),
                },
                _ => None,
            };
            match next {
                Some(n) => cur = n,
                None => return Ok(cur),
            }
        }
    }

    fn delta(&mut self, app: &Term) -> Result<Option<Term>, NormalizeError> {
        let (head, args) = app.spine();
        let Term::Const(name) = head else { return Ok(None) };
        let Some(DeltaRule::Replace(kind)) = self.sig.delta(name) else { return Ok(None) };
        if args.len() != kind.arity() {
            return Ok(None);
        }
        let event_arg = self.whnf(args[args.len() - 1])?;
        if !matches!(event_arg, Term::Pair(..)) {
            return Ok(None);
        }
        self.tick()?;
        Ok(Some(replace_inhabitant(kind, args.into_iter().cloned())))
    }

    fn nf(&mut self, t: &Term) -> Result<Term, NormalizeError> {
        let t = self.whnf(t)?;
        Ok(match &t {
            Term::Pi(x, a, b) => {
                let a = self.nf(a)?;
                let b = self.nf_under(x.name(), b)?;
                Term::Pi(x.clone(), a.into(), b.into())
            }
            Term::Sigma(x, a, b) => {
                let a = self.nf(a)?;
                let b = self.nf_under(x.name(), b)?;
                Term::Sigma(x.clone(), a.into(), b.into())
            }
            Term::Lam(x, b) => Term::Lam(x.clone(), self.nf_under(x.name(), b)?.into()),
            Term::App(f, a) => Term::app(self.nf(f)?, self.nf(a)?),
            Term::Pair(a, b) => Term::pair(self.nf(a)?, self.nf(b)?),
            Term::Fst(p) => Term::fst(self.nf(p)?),
            Term::Snd(p) => Term::snd(self.nf(p)?),
            Term::AtOp(i, a) => Term::at_op(*i, self.nf(a)?),
            _ => t.clone(),
        })
    }

    fn nf_under(&mut self, hint: &str, body: &Term) -> Result<Term, NormalizeError> {
        let v = fresh_name(hint);
        let opened = body.open(&Term::var(&v));
        Ok(self.nf(&opened)?.close(&v))
    }
}

/// The symbolic inhabitant `(k-event args, k-proof args)` of the result type
/// of a replace combinator applied to `args`.
pub fn replace_inhabitant(kind: ReplaceKind, args: impl IntoIterator<Item = Term> + Clone) -> Term {
    let event = Term::apps(Term::cnst(kind.event_constant()), args.clone());
    let proof = Term::apps(Term::cnst(kind.proof_constant()), args);
    Term::pair(event, proof)
}
