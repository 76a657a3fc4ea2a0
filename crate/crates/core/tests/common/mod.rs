//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

pub mod props;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use dts_core::sexpr::parse;
use dts_core::signature::{GlobalSignature, Telescope};
use dts_core::term::{fresh_name, Term};
use dts_core::typecheck::infer_type;

/// Base signature plus a few entities, predicates and axioms that make
/// every predicate inhabited.
pub fn signature() -> GlobalSignature {
    let mut sig = GlobalSignature::base();
    let decls = [
        ("j", "entity"),
        ("m", "entity"),
        ("f", "entity"),
        ("ln", "entity"),
        ("ev0", "event"),
        ("man", "(-> entity type)"),
        ("hat", "(-> entity type)"),
        ("left", "(-> event type)"),
        ("quietly", "(-> event type)"),
        ("at", "(-> event entity type)"),
        ("man-all", "(pi (x entity) (man x))"),
        ("hat-all", "(pi (x entity) (hat x))"),
        ("left-all", "(pi (e event) (left e))"),
        ("quietly-all", "(pi (e event) (quietly e))"),
        ("agent-all", "(pi (e event) (pi (x entity) (agent e x)))"),
        ("patient-all", "(pi (e event) (pi (x entity) (patient e x)))"),
        ("at-all", "(pi (e event) (pi (x entity) (at e x)))"),
    ];
    for (name, ty) in decls {
        sig.declare(name, parse(ty).unwrap());
    }
    sig
}

const ENTITIES: &[&str] = &["j", "m", "f", "ln"];
const ENTITY_PREDS: &[&str] = &["man", "hat"];
const EVENT_PREDS: &[&str] = &["left", "quietly"];
const RELATIONS: &[&str] = &["agent", "patient", "at"];

pub struct Gen {
    pub rng: StdRng,
    pub sig: GlobalSignature,
    /// Local variables with their types, innermost last.
    pub scope: Vec<(String, Term)>,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: StdRng::seed_from_u64(seed), sig: signature(), scope: Vec::new() }
    }

    pub fn telescope(&self) -> Telescope {
        self.scope.iter().fold(Telescope::new(), |t, (x, a)| t.extended(x.clone(), a.clone()))
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn ty_of(&self, t: &Term) -> Option<Term> {
        infer_type(&self.sig, &self.telescope(), t).ok()
    }

    /// Variables in scope and their projections whose type is `ty`.
    fn in_scope(&mut self, ty: &Term) -> Option<Term> {
        let mut found = Vec::new();
        for (x, _) in &self.scope {
            let v = Term::var(x);
            let mut frontier = vec![v];
            for _ in 0..3 {
                let mut next = Vec::new();
                for t in frontier {
                    if let Some(tt) = self.ty_of(&t) {
                        if &tt == ty {
                            found.push(t.clone());
                        }
                        if matches!(tt, Term::Sigma(..)) {
                            next.push(Term::fst(t.clone()));
                            next.push(Term::snd(t));
                        }
                    }
                }
                frontier = next;
            }
        }
        found.choose(&mut self.rng).cloned()
    }

    pub fn entity(&mut self) -> Term {
        if self.chance(0.5) {
            if let Some(t) = self.in_scope(&Term::cnst("entity")) {
                return t;
            }
        }
        Term::cnst(*ENTITIES.choose(&mut self.rng).unwrap())
    }

    pub fn event(&mut self) -> Term {
        if self.chance(0.7) {
            if let Some(t) = self.in_scope(&Term::cnst("event")) {
                return t;
            }
        }
        Term::cnst("ev0")
    }

    pub fn atom(&mut self) -> Term {
        match self.rng.gen_range(0..6) {
            0 => Term::cnst("entity"),
            1 => Term::cnst("event"),
            2 => Term::Unit,
            3 => {
                let p = *ENTITY_PREDS.choose(&mut self.rng).unwrap();
                Term::pred(p, [self.entity()])
            }
            4 => {
                let p = *EVENT_PREDS.choose(&mut self.rng).unwrap();
                Term::pred(p, [self.event()])
            }
            _ => {
                let r = *RELATIONS.choose(&mut self.rng).unwrap();
                let e = self.event();
                Term::pred(r, [e, self.entity()])
            }
        }
    }

    /// A type of sort `type` over the current scope.
    pub fn ty(&mut self, depth: usize) -> Term {
        if depth == 0 || self.chance(0.35) {
            return self.atom();
        }
        let dependent = self.chance(0.6);
        let a = if dependent {
            if self.chance(0.5) {
                Term::cnst("event")
            } else {
                Term::cnst("entity")
            }
        } else {
            self.ty(depth - 1)
        };
        let x = fresh_name(if a == Term::cnst("event") { "e" } else { "x" });
        self.scope.push((x.clone(), a.clone()));
        let b = self.ty(depth - 1);
        self.scope.pop();
        if self.chance(0.7) {
            Term::sigma(&x, a, b)
        } else {
            Term::pi(&x, a, b)
        }
    }

    /// A term checking against `ty`, which is normalized and of sort type.
    pub fn term(&mut self, ty: &Term, depth: usize) -> Option<Term> {
        // Redex arguments and projected pairs must be inferable: the checker
        // is bidirectional and unannotated lambdas have no principal type.
        if depth > 0 {
            match self.rng.gen_range(0..10) {
                0 => {
                    let a = self.ty(1);
                    let arg = self.term(&a, depth - 1)?;
                    if self.ty_of(&arg).is_some() {
                        let x = fresh_name("r");
                        self.scope.push((x.clone(), a));
                        let body = self.term(ty, depth - 1);
                        self.scope.pop();
                        return Some(Term::app(Term::lam(&x, body?), arg));
                    }
                }
                1 => {
                    let junk_ty = self.ty(1);
                    let junk = self.term(&junk_ty, depth - 1)?;
                    let t = self.term(ty, depth - 1)?;
                    if self.ty_of(&junk).is_some() && self.ty_of(&t).is_some() {
                        return Some(if self.chance(0.5) {
                            Term::fst(Term::pair(t, junk))
                        } else {
                            Term::snd(Term::pair(junk, t))
                        });
                    }
                }
                2 | 3 => {
                    if let Some(t) = self.in_scope(ty) {
                        return Some(t);
                    }
                }
                _ => {}
            }
        }
        let d = depth.saturating_sub(1);
        match ty {
            Term::Const(c) if c == "entity" => Some(self.entity()),
            Term::Const(c) if c == "event" => Some(self.event()),
            Term::Unit => Some(Term::Star),
            Term::Sigma(_, a, b) => {
                let first = self.term(a, d)?;
                let b = normalize_ty(&self.sig, &b.open(&first));
                let second = self.term(&b, d)?;
                Some(Term::pair(first, second))
            }
            Term::Pi(x, a, b) => {
                let v = fresh_name(x.name());
                self.scope.push((v.clone(), a.as_ref().clone()));
                let body = self.term(&b.open(&Term::var(&v)), d);
                self.scope.pop();
                Some(Term::lam(&v, body?))
            }
            Term::App(..) => {
                let (head, args) = ty.spine();
                let name = head.head_const()?;
                Some(Term::apps(Term::cnst(format!("{name}-all")), args.into_iter().cloned()))
            }
            _ => self.in_scope(ty),
        }
    }

    /// A closed type together with a term checking against it.
    pub fn typed_term(&mut self, depth: usize) -> Option<(Term, Term)> {
        let ty = self.ty(depth);
        let ty = normalize_ty(&self.sig, &ty);
        let t = self.term(&ty, depth)?;
        Some((t, ty))
    }

    /// Syntax without any typing discipline, possibly divergent.
    pub fn raw(&mut self, depth: usize) -> Term {
        let names: Vec<String> = self.scope.iter().map(|(x, _)| x.clone()).collect();
        if depth == 0 || self.chance(0.25) {
            return match self.rng.gen_range(0..6) {
                0 if !names.is_empty() => Term::var(names.choose(&mut self.rng).unwrap()),
                1 => Term::Unit,
                2 => Term::Star,
                3 => Term::ty(),
                _ => Term::cnst(*["j", "m", "left", "agent", "entity", "event"].choose(&mut self.rng).unwrap()),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 | 1 => {
                let f = self.raw(d);
                Term::app(f, self.raw(d))
            }
            2 => {
                let a = self.raw(d);
                Term::pair(a, self.raw(d))
            }
            3 => Term::fst(self.raw(d)),
            4 => Term::snd(self.raw(d)),
            5 => Term::at_op(self.rng.gen_range(1..4), self.raw(d)),
            _ => {
                let x = fresh_name(["x", "y", "e", "u"].choose(&mut self.rng).unwrap());
                let a = self.raw(d);
                self.scope.push((x.clone(), Term::Unit));
                let b = self.raw(d);
                self.scope.pop();
                match self.rng.gen_range(0..3) {
                    0 => Term::lam(&x, b),
                    1 => Term::pi(&x, a, b),
                    _ => Term::sigma(&x, a, b),
                }
            }
        }
    }

    /// An event-headed chain type over the given properties of `e`.
    pub fn chain(props: &[Term]) -> Term {
        Term::sigma("e", Term::cnst("event"), Term::product(props.iter().cloned()))
    }

    /// A pool of properties of the free variable `e`.
    pub fn property(&mut self) -> Term {
        let e = Term::var("e");
        match self.rng.gen_range(0..4) {
            0 => Term::pred(EVENT_PREDS.choose(&mut self.rng).unwrap(), [e]),
            1 => {
                let r = *RELATIONS.choose(&mut self.rng).unwrap();
                Term::pred(r, [e, Term::cnst(*ENTITIES.choose(&mut self.rng).unwrap())])
            }
            2 => Term::pred(ENTITY_PREDS.choose(&mut self.rng).unwrap(), [Term::cnst(*ENTITIES.choose(&mut self.rng).unwrap())]),
            _ => Term::pred("agent", [e, Term::cnst("j")]),
        }
    }

    pub fn properties(&mut self, max: usize) -> Vec<Term> {
        let n = self.rng.gen_range(0..=max);
        (0..n).map(|_| self.property()).collect()
    }

    /// A random sub-multiset of `props` in random order.
    pub fn sub_multiset(&mut self, props: &[Term]) -> Vec<Term> {
        let mut out: Vec<Term> = props.iter().filter(|_| self.rng.gen_bool(0.6)).cloned().collect();
        out.shuffle(&mut self.rng);
        out
    }
}

pub fn normalize_ty(sig: &GlobalSignature, t: &Term) -> Term {
    dts_core::normalize(sig, t).unwrap_or_else(|_| t.clone())
}

/// Sentences of the fragment used to build random discourses.
pub const SENTENCES: &[&str] = &[
    "John left.",
    "Mary did too.",
    "John likes his hat.",
    "Fred does too.",
    "Mary is loved by John.",
    "So is Ann.",
    "John loves Mary.",
    "So does Bob.",
    "Mary loves herself.",
    "John loved Mary.",
    "Mary believed this.",
    "Canberra was hit by a flood on Sunday.",
    "The fair was held in London.",
    "What happened in Canberra is surprising.",
    "John quietly ate the cake last night.",
    "John ate pasta.",
    "Mary ate too.",
    "Bob left before Ann did.",
];
