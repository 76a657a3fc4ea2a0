//! Terms of the dependent lambda calculus.
//!
//! Terms use a locally nameless representation: variables bound by a
//! `Pi`, `Sigma` or `Lam` are de Bruijn indices (`Bound`), free variables are
//! names (`Var`). Binders keep their source name only as a printing hint, so
//! two alpha-equivalent terms are structurally equal and `==` is alpha
//! equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// The two sorts. `type` classifies propositions and individuals' types,
/// `kind` classifies type families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Type,
    Kind,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Type => f.write_str("type"),
            Sort::Kind => f.write_str("kind"),
        }
    }
}

/// Display hint for a bound variable. Ignored by equality.
#[derive(Clone, Debug, Default)]
pub struct Binder(pub String);

impl Binder {
    pub fn new(name: impl Into<String>) -> Self {
        Binder(name.into())
    }

    pub fn anonymous() -> Self {
        Binder("_".to_string())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    /// Free variable.
    Var(String),
    /// Bound variable as a de Bruijn index.
    Bound(usize),
    Const(String),
    Sort(Sort),
    Pi(Binder, Arc<Term>, Arc<Term>),
    Sigma(Binder, Arc<Term>, Arc<Term>),
    Lam(Binder, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Pair(Arc<Term>, Arc<Term>),
    Fst(Arc<Term>),
    Snd(Arc<Term>),
    /// `@_index` carrying the ascription of `@_index c`.
    AtOp(usize, Arc<Term>),
    /// The trivial type `()`.
    Unit,
    /// The sole inhabitant of `Unit`.
    Star,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        use Term::*;
        match (self, other) {
            (Var(a), Var(b)) | (Const(a), Const(b)) => a == b,
            (Bound(a), Bound(b)) => a == b,
            (Sort(a), Sort(b)) => a == b,
            (Pi(_, a1, b1), Pi(_, a2, b2)) | (Sigma(_, a1, b1), Sigma(_, a2, b2)) => {
                a1 == a2 && b1 == b2
            }
            (Lam(_, a), Lam(_, b)) => a == b,
            (App(f1, a1), App(f2, a2)) | (Pair(f1, a1), Pair(f2, a2)) => f1 == f2 && a1 == a2,
            (Fst(a), Fst(b)) | (Snd(a), Snd(b)) => a == b,
            (AtOp(i, a), AtOp(j, b)) => i == j && a == b,
            (Unit, Unit) | (Star, Star) => true,
            _ => false,
        }
    }
}

impl Eq for Term {}

static FRESH: AtomicU64 = AtomicU64::new(0);

/// A variable name that cannot clash with user names: `%` never appears in
/// names produced by the lexicon, and the counter is process-wide.
pub fn fresh_name(hint: &str) -> String {
    let base = hint.split('%').next().unwrap_or("x");
    let base = if base.is_empty() || base == "_" { "x" } else { base };
    format!("{}%{}", base, FRESH.fetch_add(1, Ordering::Relaxed))
}

/// One step of a path into a term, used to locate errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Domain,
    Codomain,
    Body,
    Fun,
    Arg,
    Left,
    Right,
    Proj,
    Ascription,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Step::Domain => "domain",
            Step::Codomain => "codomain",
            Step::Body => "body",
            Step::Fun => "fun",
            Step::Arg => "arg",
            Step::Left => "left",
            Step::Right => "right",
            Step::Proj => "proj",
            Step::Ascription => "ascription",
        };
        f.write_str(s)
    }
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn cnst(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn ty() -> Term {
        Term::Sort(Sort::Type)
    }

    pub fn kind() -> Term {
        Term::Sort(Sort::Kind)
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    /// `f a1 a2 ...`, left-nested.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    /// Applies the constant `name` to `args`, e.g. `pred("agent", [e, x])`.
    pub fn pred(name: &str, args: impl IntoIterator<Item = Term>) -> Term {
        Term::apps(Term::cnst(name), args)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn fst(t: Term) -> Term {
        Term::Fst(Arc::new(t))
    }

    pub fn snd(t: Term) -> Term {
        Term::Snd(Arc::new(t))
    }

    pub fn at_op(index: usize, ascription: Term) -> Term {
        Term::AtOp(index, Arc::new(ascription))
    }

    /// `(x: dom) -> body`, where `body` refers to the binder as `Var(x)`.
    pub fn pi(x: &str, dom: Term, body: Term) -> Term {
        Term::Pi(Binder::new(x), Arc::new(dom), Arc::new(body.close(x)))
    }

    /// `(x: dom) × body`, where `body` refers to the binder as `Var(x)`.
    pub fn sigma(x: &str, dom: Term, body: Term) -> Term {
        Term::Sigma(Binder::new(x), Arc::new(dom), Arc::new(body.close(x)))
    }

    /// `λx. body`, where `body` refers to the binder as `Var(x)`.
    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(Binder::new(x), Arc::new(body.close(x)))
    }

    /// Nested lambdas `λx1 ... xn. body`.
    pub fn lams<'a>(xs: impl IntoIterator<Item = &'a str>, body: Term) -> Term {
        let xs: Vec<&str> = xs.into_iter().collect();
        xs.into_iter().rev().fold(body, |acc, x| Term::lam(x, acc))
    }

    /// Non-dependent function type `a -> b`.
    pub fn arrow(a: Term, b: Term) -> Term {
        Term::Pi(Binder::anonymous(), Arc::new(a), Arc::new(b))
    }

    /// Non-dependent pair type `a × b`.
    pub fn times(a: Term, b: Term) -> Term {
        Term::Sigma(Binder::anonymous(), Arc::new(a), Arc::new(b))
    }

    /// Right-nested product of `parts`; the empty product is `Unit`.
    pub fn product(parts: impl IntoIterator<Item = Term>) -> Term {
        let parts: Vec<Term> = parts.into_iter().collect();
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Term::Unit,
            Some(last) => it.fold(last, |acc, p| Term::times(p, acc)),
        }
    }

    /// Right-nested pairs of `parts`; the empty tuple is `Star`.
    pub fn tuple(parts: impl IntoIterator<Item = Term>) -> Term {
        let parts: Vec<Term> = parts.into_iter().collect();
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Term::Star,
            Some(last) => it.fold(last, |acc, p| Term::pair(p, acc)),
        }
    }

    pub fn is_sort(&self) -> bool {
        matches!(self, Term::Sort(_))
    }

    /// Replaces the variable bound at the outermost level of a binder body
    /// with `arg`. `self` is the body of a binder; `arg` must be locally closed.
    pub fn open(&self, arg: &Term) -> Term {
        self.open_at(0, arg)
    }

    fn open_at(&self, depth: usize, arg: &Term) -> Term {
        self.map_scoped(depth, &mut |t, d| match t {
            Term::Bound(i) if *i == d => Some(arg.clone()),
            _ => None,
        })
    }

    /// Abstracts the free variable `name`, producing a binder body.
    pub fn close(&self, name: &str) -> Term {
        self.map_scoped(0, &mut |t, d| match t {
            Term::Var(x) if x == name => Some(Term::Bound(d)),
            _ => None,
        })
    }

    /// Whether a binder body mentions its own bound variable.
    pub fn uses_bound(&self) -> bool {
        fn go(t: &Term, d: usize) -> bool {
            match t {
                Term::Bound(i) => *i == d,
                Term::Pi(_, a, b) | Term::Sigma(_, a, b) => go(a, d) || go(b, d + 1),
                Term::Lam(_, b) => go(b, d + 1),
                Term::App(a, b) | Term::Pair(a, b) => go(a, d) || go(b, d),
                Term::Fst(a) | Term::Snd(a) | Term::AtOp(_, a) => go(a, d),
                _ => false,
            }
        }
        go(self, 0)
    }

    /// Opens a binder body whose variable is unused.
    pub fn unshifted(&self) -> Term {
        self.open(&Term::Unit)
    }

    /// Capture-avoiding substitution of `replacement` for the free variable
    /// `var`. Bound variables cannot be captured in the locally nameless
    /// representation, so this is a plain traversal.
    pub fn substitute(&self, var: &str, replacement: &Term) -> Term {
        self.map_scoped(0, &mut |t, _| match t {
            Term::Var(x) if x == var => Some(replacement.clone()),
            _ => None,
        })
    }

    /// Generic bottom-up rewrite: `f` is tried on every node (with the
    /// current binder depth) before descending; `Some` replaces the node.
    /// Subterms left unchanged are shared with `self`.
    pub fn map_scoped(&self, depth: usize, f: &mut dyn FnMut(&Term, usize) -> Option<Term>) -> Term {
        self.rewrite(depth, f).unwrap_or_else(|| self.clone())
    }

    /// `None` when nothing below `self` changed.
    fn rewrite(&self, depth: usize, f: &mut dyn FnMut(&Term, usize) -> Option<Term>) -> Option<Term> {
        if let Some(t) = f(self, depth) {
            return Some(t);
        }
        fn child(t: &Arc<Term>, depth: usize, f: &mut dyn FnMut(&Term, usize) -> Option<Term>) -> Option<Arc<Term>> {
            t.rewrite(depth, f).map(Arc::new)
        }
        fn both(
            a: &Arc<Term>,
            b: &Arc<Term>,
            da: usize,
            db: usize,
            f: &mut dyn FnMut(&Term, usize) -> Option<Term>,
        ) -> Option<(Arc<Term>, Arc<Term>)> {
            match (child(a, da, f), child(b, db, f)) {
                (None, None) => None,
                (a2, b2) => Some((a2.unwrap_or_else(|| a.clone()), b2.unwrap_or_else(|| b.clone()))),
            }
        }
        match self {
            Term::Pi(x, a, b) => both(a, b, depth, depth + 1, f).map(|(a, b)| Term::Pi(x.clone(), a, b)),
            Term::Sigma(x, a, b) => both(a, b, depth, depth + 1, f).map(|(a, b)| Term::Sigma(x.clone(), a, b)),
            Term::Lam(x, b) => child(b, depth + 1, f).map(|b| Term::Lam(x.clone(), b)),
            Term::App(a, b) => both(a, b, depth, depth, f).map(|(a, b)| Term::App(a, b)),
            Term::Pair(a, b) => both(a, b, depth, depth, f).map(|(a, b)| Term::Pair(a, b)),
            Term::Fst(a) => child(a, depth, f).map(Term::Fst),
            Term::Snd(a) => child(a, depth, f).map(Term::Snd),
            Term::AtOp(i, a) => child(a, depth, f).map(|a| Term::AtOp(*i, a)),
            _ => None,
        }
    }

    /// Visits every node in pre-order.
    pub fn visit(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        match self {
            Term::Pi(_, a, b) | Term::Sigma(_, a, b) | Term::App(a, b) | Term::Pair(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Lam(_, b) | Term::Fst(b) | Term::Snd(b) | Term::AtOp(_, b) => b.visit(f),
            _ => {}
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Var(x) = t {
                out.insert(x.clone());
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Const(x) = t {
                out.insert(x.clone());
            }
        });
        out
    }

    pub fn has_free_var(&self, var: &str) -> bool {
        let mut found = false;
        self.visit(&mut |t| {
            if matches!(t, Term::Var(x) if x == var) {
                found = true;
            }
        });
        found
    }

    pub fn contains_at_op(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| {
            if matches!(t, Term::AtOp(..)) {
                found = true;
            }
        });
        found
    }

    /// Whether `needle` (a locally closed term) occurs in `self`.
    pub fn contains(&self, needle: &Term) -> bool {
        let mut found = false;
        self.visit(&mut |t| {
            if t == needle {
                found = true;
            }
        });
        found
    }

    /// Replaces every occurrence of the locally closed subterm `needle`.
    pub fn replace(&self, needle: &Term, with: &Term) -> Term {
        self.map_scoped(0, &mut |t, _| (t == needle).then(|| with.clone()))
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(a.as_ref());
            head = f.as_ref();
        }
        args.reverse();
        (head, args)
    }

    /// Name of the head constant of an application spine, if any.
    pub fn head_const(&self) -> Option<&str> {
        match self.spine().0 {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    /// The subterm addressed by `path`, if the path is valid.
    pub fn subterm_at(&self, path: &[Step]) -> Option<&Term> {
        let mut cur = self;
        for step in path {
            cur = match (cur, step) {
                (Term::Pi(_, a, _) | Term::Sigma(_, a, _), Step::Domain) => a,
                (Term::Pi(_, _, b) | Term::Sigma(_, _, b), Step::Codomain) => b,
                (Term::Lam(_, b), Step::Body) => b,
                (Term::App(f, _), Step::Fun) => f,
                (Term::App(_, a), Step::Arg) => a,
                (Term::Pair(a, _), Step::Left) => a,
                (Term::Pair(_, b), Step::Right) => b,
                (Term::Fst(a) | Term::Snd(a), Step::Proj) => a,
                (Term::AtOp(_, a), Step::Ascription) => a,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Renames binder hints with `rename`; the result is alpha-equivalent.
    pub fn rename_binders(&self, rename: &mut dyn FnMut(&str) -> String) -> Term {
        match self {
            Term::Pi(x, a, b) => Term::Pi(
                Binder(rename(x.name())),
                Arc::new(a.rename_binders(rename)),
                Arc::new(b.rename_binders(rename)),
            ),
            Term::Sigma(x, a, b) => Term::Sigma(
                Binder(rename(x.name())),
                Arc::new(a.rename_binders(rename)),
                Arc::new(b.rename_binders(rename)),
            ),
            Term::Lam(x, b) => Term::Lam(Binder(rename(x.name())), Arc::new(b.rename_binders(rename))),
            Term::App(a, b) => Term::App(Arc::new(a.rename_binders(rename)), Arc::new(b.rename_binders(rename))),
            Term::Pair(a, b) => {
                Term::Pair(Arc::new(a.rename_binders(rename)), Arc::new(b.rename_binders(rename)))
            }
            Term::Fst(a) => Term::Fst(Arc::new(a.rename_binders(rename))),
            Term::Snd(a) => Term::Snd(Arc::new(a.rename_binders(rename))),
            Term::AtOp(i, a) => Term::AtOp(*i, Arc::new(a.rename_binders(rename))),
            leaf => leaf.clone(),
        }
    }
}

/// Free variables of `t`.
pub fn free_vars(t: &Term) -> BTreeSet<String> {
    t.free_vars()
}

/// Alpha equivalence. Binder names are hints only, so this is `==`.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a == b
}

/// `body[replacement/var]`.
pub fn substitute(body: &Term, var: &str, replacement: &Term) -> Term {
    body.substitute(var, replacement)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::sexpr::print(self))
    }
}
