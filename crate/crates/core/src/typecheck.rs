//! Bidirectional type checking for dependent functions and pairs.
//!
//! Variables, constants, applications and projections are inferred;
//! lambdas are checked against a `Pi`. Pairs are checked against a `Sigma`;
//! in inference mode a pair gets the non-dependent product of its
//! components' types. Definitional equality is alpha-equivalence of normal
//! forms. When enabled, checking falls back to coercive event subtyping and
//! records every coercion it inserts.

use std::fmt;

use thiserror::Error;

use crate::normalize::{normalize_with_budget, whnf, NormalizeError, DEFAULT_BUDGET};
use crate::signature::{GlobalSignature, Telescope};
use crate::subtype::{is_subtype, Coercion};
use crate::term::{fresh_name, Sort, Step, Term};

/// Which type former is being formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Former {
    Pi,
    Sigma,
}

/// The sort pairs `(s1, s2)` admitted by formation: all four for `Pi`,
/// everything except `(kind, type)` for `Sigma`.
pub fn sort_pair_allowed(former: Former, domain: Sort, codomain: Sort) -> bool {
    match former {
        Former::Pi => true,
        Former::Sigma => !(domain == Sort::Kind && codomain == Sort::Type),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundVariable(String),
    SortMismatch,
    NotAFunction,
    NotAPair,
    Mismatch,
    IllegalSortPair { former: Former, domain: Sort, codomain: Sort },
    /// The term has no principal type without an expected type (bare
    /// lambdas and @-operators).
    CannotInfer,
    Budget(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// Path from the judged term to the offending subterm.
    pub location: Vec<Step>,
    pub expected: Option<Term>,
    pub found: Option<Term>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TypeErrorKind::UnboundVariable(x) => write!(f, "unbound variable {x}")?,
            TypeErrorKind::SortMismatch => f.write_str("expected a type or kind")?,
            TypeErrorKind::NotAFunction => f.write_str("not a function")?,
            TypeErrorKind::NotAPair => f.write_str("not a pair")?,
            TypeErrorKind::Mismatch => f.write_str("type mismatch")?,
            TypeErrorKind::IllegalSortPair { former, domain, codomain } => {
                write!(f, "{former:?}-formation over ({domain}, {codomain}) is not allowed")?
            }
            TypeErrorKind::CannotInfer => f.write_str("cannot infer a type; an expected type is needed")?,
            TypeErrorKind::Budget(n) => write!(f, "reduction exceeded {n} steps")?,
        }
        if self.location.is_empty() {
            f.write_str(" at <root>")?;
        } else {
            let path: Vec<String> = self.location.iter().map(|s| s.to_string()).collect();
            write!(f, " at {}", path.join("."))?;
        }
        if let Some(e) = &self.expected {
            write!(f, "; expected {e}")?;
        }
        if let Some(t) = &self.found {
            write!(f, "; found {t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub subtyping: bool,
    pub budget: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { subtyping: true, budget: DEFAULT_BUDGET }
    }
}

impl CheckOptions {
    pub fn without_subtyping() -> Self {
        CheckOptions { subtyping: false, ..Self::default() }
    }
}

/// Result of a successful check: the term with coercions applied at the
/// points where they were needed, plus the coercions themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct Checked {
    pub term: Term,
    pub coercions: Vec<Coercion>,
}

/// `signature; telescope ⊢ subject : classifier`.
#[derive(Clone, Debug, PartialEq)]
pub struct Judgement {
    pub signature: GlobalSignature,
    pub telescope: Telescope,
    pub subject: Term,
    pub classifier: Term,
}

impl Judgement {
    /// Builds the judgement by inferring the subject's classifier.
    pub fn infer(sig: &GlobalSignature, tel: &Telescope, subject: Term) -> Result<Judgement, TypeError> {
        let classifier = infer_type(sig, tel, &subject)?;
        Ok(Judgement { signature: sig.clone(), telescope: tel.clone(), subject, classifier })
    }

    /// Re-derives the judgement by checking.
    pub fn verify(&self) -> Result<Checked, TypeError> {
        check_type(&self.signature, &self.telescope, &self.subject, &self.classifier)
    }
}

pub fn infer_sort(sig: &GlobalSignature, tel: &Telescope, ty: &Term) -> Result<Sort, TypeError> {
    let mut tel = tel.clone();
    Checker::new(sig, CheckOptions::default()).sort_of(&mut tel, ty)
}

/// Infers the principal type of `t`, in normal form.
pub fn infer_type(sig: &GlobalSignature, tel: &Telescope, t: &Term) -> Result<Term, TypeError> {
    let mut tel = tel.clone();
    let mut ck = Checker::new(sig, CheckOptions::default());
    let ty = ck.infer(&mut tel, t)?;
    ck.nf(&ty)
}

pub fn check_type(sig: &GlobalSignature, tel: &Telescope, t: &Term, expected: &Term) -> Result<Checked, TypeError> {
    check_type_with(sig, tel, t, expected, CheckOptions::default())
}

pub fn check_type_with(
    sig: &GlobalSignature,
    tel: &Telescope,
    t: &Term,
    expected: &Term,
    opts: CheckOptions,
) -> Result<Checked, TypeError> {
    let mut tel = tel.clone();
    let mut ck = Checker::new(sig, opts);
    let term = ck.check(&mut tel, t, expected)?;
    Ok(Checked { term, coercions: ck.coercions })
}

/// Definitional equality: alpha-equivalence of normal forms.
pub fn conv(sig: &GlobalSignature, a: &Term, b: &Term) -> Result<bool, NormalizeError> {
    let a = normalize_with_budget(sig, a, DEFAULT_BUDGET)?;
    let b = normalize_with_budget(sig, b, DEFAULT_BUDGET)?;
    Ok(a == b)
}

struct Checker<'a> {
    sig: &'a GlobalSignature,
    opts: CheckOptions,
    path: Vec<Step>,
    coercions: Vec<Coercion>,
}

impl<'a> Checker<'a> {
    fn new(sig: &'a GlobalSignature, opts: CheckOptions) -> Self {
        Checker { sig, opts, path: Vec::new(), coercions: Vec::new() }
    }

    fn error(&self, kind: TypeErrorKind, expected: Option<Term>, found: Option<Term>) -> TypeError {
        TypeError { kind, location: self.path.clone(), expected, found }
    }

    fn budget_error(&self, e: NormalizeError) -> TypeError {
        let NormalizeError::DepthExceeded(n) = e;
        self.error(TypeErrorKind::Budget(n), None, None)
    }

    fn nf(&self, t: &Term) -> Result<Term, TypeError> {
        normalize_with_budget(self.sig, t, self.opts.budget).map_err(|e| self.budget_error(e))
    }

    fn whnf(&self, t: &Term) -> Result<Term, TypeError> {
        whnf(self.sig, t).map_err(|e| self.budget_error(e))
    }

    fn at<R>(&mut self, step: Step, f: impl FnOnce(&mut Self) -> Result<R, TypeError>) -> Result<R, TypeError> {
        self.path.push(step);
        let r = f(self);
        self.path.pop();
        r
    }

    fn sort_of(&mut self, tel: &mut Telescope, ty: &Term) -> Result<Sort, TypeError> {
        let k = self.infer(tel, ty)?;
        match self.whnf(&k)? {
            Term::Sort(s) => Ok(s),
            other => {
                let found = self.nf(&other)?;
                Err(self.error(TypeErrorKind::SortMismatch, None, Some(found)))
            }
        }
    }

    fn infer(&mut self, tel: &mut Telescope, t: &Term) -> Result<Term, TypeError> {
        match t {
            Term::Var(x) => match tel.lookup(x) {
                Some(ty) => Ok(ty.clone()),
                None => Err(self.error(TypeErrorKind::UnboundVariable(x.clone()), None, None)),
            },
            Term::Bound(i) => Err(self.error(TypeErrorKind::UnboundVariable(format!("#{i}")), None, None)),
            Term::Const(c) => match self.sig.lookup(c) {
                Some(ty) => Ok(ty.clone()),
                None => Err(self.error(TypeErrorKind::UnboundVariable(c.clone()), None, None)),
            },
            Term::Sort(Sort::Type) => Ok(Term::kind()),
            Term::Sort(Sort::Kind) => Err(self.error(TypeErrorKind::SortMismatch, None, Some(Term::kind()))),
            Term::Unit => Ok(Term::ty()),
            Term::Star => Ok(Term::Unit),
            Term::Pi(x, a, b) | Term::Sigma(x, a, b) => {
                let former = if matches!(t, Term::Pi(..)) { Former::Pi } else { Former::Sigma };
                let s1 = self.at(Step::Domain, |ck| ck.sort_of(tel, a))?;
                let v = fresh_name(x.name());
                tel.push(v.clone(), a.as_ref().clone());
                let s2 = self.at(Step::Codomain, |ck| ck.sort_of(tel, &b.open(&Term::var(&v))));
                tel.pop();
                let s2 = s2?;
                if !sort_pair_allowed(former, s1, s2) {
                    return Err(self.error(
                        TypeErrorKind::IllegalSortPair { former, domain: s1, codomain: s2 },
                        None,
                        None,
                    ));
                }
                Ok(Term::Sort(s2))
            }
            Term::Lam(..) | Term::AtOp(..) => Err(self.error(TypeErrorKind::CannotInfer, None, None)),
            // a redex is typed like a let whose definition is visible in
            // the body, so dependencies on the argument survive
            Term::App(..) if head_redex(t).is_some() => {
                let (arg, contractum) = head_redex(t).expect("guarded");
                self.at(Step::Arg, |ck| ck.infer(tel, arg))?;
                self.at(Step::Fun, |ck| ck.infer(tel, &contractum))
            }
            Term::App(f, a) => match f.as_ref() {
                Term::AtOp(_, ascription) => {
                    self.at(Step::Arg, |ck| ck.infer(tel, a))?;
                    self.at(Step::Fun, |ck| ck.at(Step::Ascription, |ck| ck.sort_of(tel, ascription)))?;
                    Ok(ascription.as_ref().clone())
                }
                _ => {
                    let fty = self.at(Step::Fun, |ck| ck.infer(tel, f))?;
                    match self.whnf(&fty)? {
                        Term::Pi(_, dom, cod) => {
                            let arg = self.at(Step::Arg, |ck| ck.check(tel, a, &dom))?;
                            Ok(cod.open(&arg))
                        }
                        other => {
                            let found = self.nf(&other)?;
                            Err(self.at(Step::Fun, |ck| {
                                Ok(ck.error(TypeErrorKind::NotAFunction, None, Some(found)))
                            })?)
                        }
                    }
                }
            },
            Term::Pair(a, b) => {
                let ta = self.at(Step::Left, |ck| ck.infer(tel, a))?;
                let tb = self.at(Step::Right, |ck| ck.infer(tel, b))?;
                Ok(Term::times(ta, tb))
            }
            Term::Fst(p) | Term::Snd(p) => {
                let pty = self.at(Step::Proj, |ck| ck.infer(tel, p))?;
                match self.whnf(&pty)? {
                    Term::Sigma(_, a, b) => {
                        if matches!(t, Term::Fst(_)) {
                            Ok(a.as_ref().clone())
                        } else {
                            Ok(b.open(&Term::fst(p.as_ref().clone())))
                        }
                    }
                    other => {
                        let found = self.nf(&other)?;
                        Err(self.at(Step::Proj, |ck| Ok(ck.error(TypeErrorKind::NotAPair, None, Some(found))))?)
                    }
                }
            }
        }
    }

    fn check(&mut self, tel: &mut Telescope, t: &Term, expected: &Term) -> Result<Term, TypeError> {
        let exp = self.whnf(expected)?;
        if let Some((arg, contractum)) = head_redex(t) {
            self.at(Step::Arg, |ck| ck.infer(tel, arg))?;
            return self.at(Step::Fun, |ck| ck.check(tel, &contractum, &exp));
        }
        // projection redexes check through the component they select
        if let Term::Fst(p) | Term::Snd(p) = t {
            if let Term::Pair(l, r) = p.as_ref() {
                let (kept, dropped, step) = match t {
                    Term::Fst(_) => (l, r, Step::Left),
                    _ => (r, l, Step::Right),
                };
                let other = if step == Step::Left { Step::Right } else { Step::Left };
                self.at(Step::Proj, |ck| ck.at(other, |ck| ck.infer(tel, dropped)))?;
                return self.at(Step::Proj, |ck| ck.at(step, |ck| ck.check(tel, kept, &exp)));
            }
        }
        match (t, &exp) {
            (Term::Lam(x, body), Term::Pi(_, dom, cod)) => {
                let v = fresh_name(x.name());
                tel.push(v.clone(), dom.as_ref().clone());
                let r = self.at(Step::Body, |ck| {
                    ck.check(tel, &body.open(&Term::var(&v)), &cod.open(&Term::var(&v)))
                });
                tel.pop();
                Ok(Term::Lam(x.clone(), r?.close(&v).into()))
            }
            (Term::Lam(..), _) => {
                let expected = self.nf(&exp)?;
                Err(self.error(TypeErrorKind::Mismatch, Some(expected), None))
            }
            (Term::Pair(a, b), Term::Sigma(_, dom, cod)) => {
                let a2 = self.at(Step::Left, |ck| ck.check(tel, a, dom))?;
                let b2 = self.at(Step::Right, |ck| ck.check(tel, b, &cod.open(&a2)))?;
                Ok(Term::pair(a2, b2))
            }
            // accommodation: `Σ u: A. M` proves the expected type when `M`
            // does under the assumption `u : A`; the assumption becomes part
            // of what the term asserts
            (Term::Sigma(x, dom, body), exp) if !exp.is_sort() => {
                let s = self.at(Step::Domain, |ck| ck.sort_of(tel, dom))?;
                if s != Sort::Type {
                    return Err(self.at(Step::Domain, |ck| {
                        Ok(ck.error(TypeErrorKind::SortMismatch, Some(Term::ty()), Some(Term::Sort(s))))
                    })?);
                }
                let v = fresh_name(x.name());
                tel.push(v.clone(), dom.as_ref().clone());
                let r = self.at(Step::Codomain, |ck| ck.check(tel, &body.open(&Term::var(&v)), exp));
                tel.pop();
                Ok(Term::Sigma(x.clone(), dom.clone(), r?.close(&v).into()))
            }
            _ => {
                let found = self.infer(tel, t)?;
                if found == exp || &found == expected {
                    return Ok(t.clone());
                }
                let found = self.nf(&found)?;
                let want = self.nf(&exp)?;
                if found == want {
                    return Ok(t.clone());
                }
                if self.opts.subtyping {
                    if let Some(c) = is_subtype(self.sig, tel, &found, &want) {
                        let coerced = Term::app(c.witness.clone(), t.clone());
                        self.coercions.push(c);
                        return Ok(coerced);
                    }
                }
                Err(self.error(TypeErrorKind::Mismatch, Some(want), Some(found)))
            }
        }
    }
}

/// For an application whose spine starts with a lambda, the argument of
/// the innermost redex and the term with that redex contracted.
fn head_redex(t: &Term) -> Option<(&Term, Term)> {
    let Term::App(f, a) = t else { return None };
    match f.as_ref() {
        Term::Lam(_, body) => Some((a.as_ref(), body.open(a))),
        Term::App(..) => head_redex(f).map(|(arg, g)| (arg, Term::app(g, a.as_ref().clone()))),
        _ => None,
    }
}
