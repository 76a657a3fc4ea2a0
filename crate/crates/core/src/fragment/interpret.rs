//! Sentence meanings as dynamic propositions, and dynamic conjunction.

use std::collections::BTreeMap;

use crate::anaphora::{ResolutionHints, Voice};
use crate::normalize::normalize;
use crate::signature::{GlobalSignature, AGENT, ENTITY, EVENT, PATIENT};
use crate::term::{fresh_name, Binder, Term};

use super::lexicon::Lexicon;
use super::parse::{AnaphorFilter, EntityRef, Modifier, Predicate, SentenceTree};
use super::FragmentError;

/// `λc. T` together with the hints for its @-operators.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicProp {
    pub term: Term,
    pub hints: BTreeMap<usize, ResolutionHints>,
}

impl DynamicProp {
    /// @-indices in left-to-right order of occurrence.
    pub fn anaphor_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.term.visit(&mut |t| {
            if let Term::AtOp(i, _) = t {
                if !out.contains(i) {
                    out.push(*i);
                }
            }
        });
        out
    }

    /// Renames @-indices through `map`, carrying the hints along.
    pub fn renumbered(&self, map: &BTreeMap<usize, usize>) -> DynamicProp {
        let term = self.term.map_scoped(0, &mut |t, _| match t {
            Term::AtOp(i, asc) => map.get(i).map(|j| Term::AtOp(*j, asc.clone())),
            _ => None,
        });
        let hints = self.hints.iter().map(|(i, h)| (map.get(i).copied().unwrap_or(*i), h.clone())).collect();
        DynamicProp { term, hints }
    }
}

/// Interprets one sentence. @-operators are numbered from 1; sequencing
/// renumbers them for the whole discourse.
pub fn interpret_sentence(_lex: &Lexicon, tree: &SentenceTree) -> Result<DynamicProp, FragmentError> {
    let c = fresh_name("c");
    let mut b = Builder { ctx: Term::var(&c), next: 1, hints: BTreeMap::new() };
    let body = b.sentence(tree)?;
    Ok(DynamicProp { term: Term::lam(&c, body), hints: b.hints })
}

struct Builder {
    ctx: Term,
    next: usize,
    hints: BTreeMap<usize, ResolutionHints>,
}

fn entity() -> Term {
    Term::cnst(ENTITY)
}

fn event() -> Term {
    Term::cnst(EVENT)
}

impl Builder {
    fn anaphor(&mut self, ascription: Term, ctx: Term, hints: ResolutionHints) -> Term {
        let i = self.next;
        self.next += 1;
        self.hints.insert(i, hints);
        Term::app(Term::at_op(i, ascription), ctx)
    }

    fn sentence(&mut self, tree: &SentenceTree) -> Result<Term, FragmentError> {
        match &tree.predicate {
            Predicate::Anaphor => {
                let subject = constant_of(&tree.subject)?;
                let filter = match &tree.anaphor_filter {
                    Some(AnaphorFilter::Verb { constant }) => Some(constant.as_str()),
                    _ => None,
                };
                let ctx = self.ctx.clone();
                Ok(self.vp_anaphor(ctx, subject, tree.voice, filter))
            }
            Predicate::Adjective { constant } => {
                let Some(AnaphorFilter::Place { constant: place }) = &tree.anaphor_filter else {
                    return Err(FragmentError::UnsupportedConstruction("adjective without an event".into()));
                };
                let e = fresh_name("e");
                let goal = Term::sigma(&e, event(), Term::pred("in", [Term::var(&e), Term::cnst(place)]));
                let ctx = self.ctx.clone();
                let at = self.anaphor(goal, ctx, ResolutionHints::default());
                Ok(Term::pred(constant, [Term::fst(at)]))
            }
            Predicate::Verb { .. } => {
                let (main, depth) = self.event_sentence(tree)?;
                let Some(other) = &tree.before else { return Ok(main) };
                // Σ u: main. Σ w: (@ (c, u) : ...) other. before(event of u, π1 w)
                let who = constant_of(other)?;
                let u = fresh_name("u");
                let w = fresh_name("w");
                let ctx = Term::pair(self.ctx.clone(), Term::var(&u));
                let anaphor = self.vp_anaphor(ctx, who, Voice::Active, None);
                let mut first = Term::var(&u);
                for _ in 0..depth {
                    first = Term::snd(first);
                }
                let rel = Term::pred("before", [Term::fst(first), Term::fst(Term::var(&w))]);
                Ok(Term::sigma(&u, main, Term::sigma(&w, anaphor, rel)))
            }
        }
    }

    /// `(@_i ctx : Π x: entity. Σ e: event. [filter(e) ×] role(e, x)) subject`
    fn vp_anaphor(&mut self, ctx: Term, subject: Term, voice: Voice, filter: Option<&str>) -> Term {
        let x = fresh_name("x");
        let e = fresh_name("e");
        let ev = Term::var(&e);
        let role = match voice {
            Voice::Active => AGENT,
            Voice::Passive => PATIENT,
        };
        let mut props: Vec<Term> = filter.map(|f| Term::pred(f, [ev.clone()])).into_iter().collect();
        props.push(Term::pred(role, [ev, Term::var(&x)]));
        let ascription = Term::pi(&x, entity(), Term::sigma(&e, event(), Term::product(props)));
        let hints = ResolutionHints { voice, ..Default::default() };
        Term::app(self.anaphor(ascription, ctx, hints), subject)
    }

    /// The event type of a plain sentence, and how many possessive Σs wrap
    /// the event.
    fn event_sentence(&mut self, tree: &SentenceTree) -> Result<(Term, usize), FragmentError> {
        let Predicate::Verb { constant, .. } = &tree.predicate else { unreachable!() };
        let e = fresh_name("e");
        let ev = Term::var(&e);
        let mut outer: Vec<(String, Term)> = Vec::new();
        let owner = match &tree.subject {
            EntityRef::Constant { constant, .. } => Some(Term::cnst(constant)),
            _ => None,
        };
        let mut props = vec![Term::pred(constant, [ev.clone()])];
        if !matches!(tree.subject, EntityRef::Unexpressed) {
            props.push(self.participant(AGENT, &tree.subject, &ev, owner.as_ref(), &mut outer)?);
        }
        if let Some(obj) = &tree.object {
            match obj {
                EntityRef::Demonstrative => {
                    let d = fresh_name("e");
                    let goal = Term::sigma(&d, event(), Term::Unit);
                    let ctx = self.ctx.clone();
                    let at = self.anaphor(goal, ctx, ResolutionHints::default());
                    props.push(Term::pred("about", [ev.clone(), Term::fst(at)]));
                }
                _ => {
                    props.push(self.participant(PATIENT, obj, &ev, owner.as_ref(), &mut outer)?);
                    // an event whose patient is a place happens in it
                    if let EntityRef::Constant { constant, place: true, .. } = obj {
                        props.push(Term::pred("in", [ev.clone(), Term::cnst(constant)]));
                    }
                }
            }
        }
        for m in &tree.modifiers {
            props.push(match m {
                Modifier::Adverb { constant } => Term::pred(constant, [ev.clone()]),
                Modifier::Relation { relation, argument } => {
                    self.participant(relation, argument, &ev, owner.as_ref(), &mut outer)?
                }
            });
        }
        let mut t = Term::sigma(&e, event(), Term::product(props));
        let depth = outer.len();
        for (v, dom) in outer.into_iter().rev() {
            t = Term::sigma(&v, dom, t);
        }
        Ok((t, depth))
    }

    /// `rel(e, x)` for the referent `x` of `who`.
    fn participant(
        &mut self,
        rel: &str,
        who: &EntityRef,
        ev: &Term,
        owner: Option<&Term>,
        outer: &mut Vec<(String, Term)>,
    ) -> Result<Term, FragmentError> {
        let with = |x: Term| Term::pred(rel, [ev.clone(), x]);
        Ok(match who {
            EntityRef::Constant { constant, .. } => with(Term::cnst(constant)),
            EntityRef::Indefinite { noun } => {
                let k = fresh_name("k");
                let kv = Term::var(&k);
                Term::sigma(&k, entity(), Term::times(Term::pred(noun, [kv.clone()]), with(kv)))
            }
            EntityRef::Possessive { noun } => {
                let owner = owner.ok_or_else(|| {
                    FragmentError::UnsupportedConstruction("possessive needs a named subject".into())
                })?;
                let x = fresh_name("x");
                let xv = Term::var(&x);
                let thing = Term::sigma(
                    &x,
                    entity(),
                    Term::times(Term::pred(noun, [xv.clone()]), Term::pred("owner", [xv, owner.clone()])),
                );
                let v = fresh_name("v");
                outer.push((v.clone(), thing));
                with(Term::fst(Term::var(&v)))
            }
            EntityRef::Reflexive { gender } | EntityRef::Pronoun { gender } => {
                let reflexive = matches!(who, EntityRef::Reflexive { .. });
                let hints = ResolutionHints {
                    local_entities: if reflexive { owner.cloned().into_iter().collect() } else { Vec::new() },
                    reflexive,
                    ..Default::default()
                };
                let ctx = self.ctx.clone();
                match gender {
                    Some(g) => {
                        let x = fresh_name("x");
                        let goal = Term::sigma(&x, entity(), Term::pred(g, [Term::var(&x)]));
                        with(Term::fst(self.anaphor(goal, ctx, hints)))
                    }
                    None => with(self.anaphor(entity(), ctx, hints)),
                }
            }
            EntityRef::Demonstrative | EntityRef::Event | EntityRef::Unexpressed => {
                return Err(FragmentError::UnsupportedConstruction(format!("{who:?} as a participant")))
            }
        })
    }
}

fn constant_of(r: &EntityRef) -> Result<Term, FragmentError> {
    match r {
        EntityRef::Constant { constant, .. } => Ok(Term::cnst(constant)),
        other => Err(FragmentError::UnsupportedConstruction(format!("{other:?} as the subject of an elided verb phrase"))),
    }
}

/// `merge(d1, d2) = λc. Σ u: d1 c. d2 (c, u)`.
pub fn merge(d1: &Term, d2: &Term) -> Term {
    let c = fresh_name("c");
    let u = fresh_name("u");
    let cv = Term::var(&c);
    Term::lam(
        &c,
        Term::sigma(
            &u,
            Term::app(d1.clone(), cv.clone()),
            Term::app(d2.clone(), Term::pair(cv, Term::var(&u))),
        ),
    )
}

/// Dynamic conjunction of the sentences, left to right, in beta-normal
/// form. @-operators are renumbered 1, 2, ... in order of occurrence.
pub fn sequence_discourse(props: &[DynamicProp]) -> Result<DynamicProp, FragmentError> {
    let Some((first, rest)) = props.split_first() else { return Err(FragmentError::EmptyDiscourse) };
    let mut next = 1;
    let mut renumber = |p: &DynamicProp| {
        let map: BTreeMap<usize, usize> = p
            .anaphor_indices()
            .into_iter()
            .map(|i| {
                next += 1;
                (i, next - 1)
            })
            .collect();
        p.renumbered(&map)
    };
    let mut acc = renumber(first);
    for p in rest {
        let p = renumber(p);
        acc.term = merge(&acc.term, &p.term);
        acc.hints.extend(p.hints);
    }
    let sig = GlobalSignature::empty();
    acc.term = normalize(&sig, &acc.term).unwrap_or(acc.term);
    Ok(acc)
}

/// Flattens `Σ w: (Σ u: A. B). C` to `Σ u: A. Σ v: B. C[(u, v)/w]`
/// everywhere, then normalizes. Normalizing can expose new nested
/// domains, so the two alternate until nothing changes.
pub fn reassociate(sig: &GlobalSignature, t: &Term) -> Term {
    let mut cur = normalize(sig, t).unwrap_or_else(|_| t.clone());
    loop {
        let next = flatten(&cur);
        let next = normalize(sig, &next).unwrap_or(next);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn flatten(t: &Term) -> Term {
    match t {
        Term::Sigma(x, a, c) => {
            let w = fresh_name(x.name());
            let body = flatten(&c.open(&Term::var(&w)));
            nest(x.name(), a, &w, body)
        }
        Term::Pi(x, a, b) => {
            let w = fresh_name(x.name());
            let body = flatten(&b.open(&Term::var(&w))).close(&w);
            Term::Pi(x.clone(), flatten(a).into(), body.into())
        }
        Term::Lam(x, b) => {
            let w = fresh_name(x.name());
            Term::Lam(x.clone(), flatten(&b.open(&Term::var(&w))).close(&w).into())
        }
        other => other.clone(),
    }
}

/// `Σ w: dom. body` where `body` is flat and mentions `w` free. The
/// domain is split in its original shape, since that is the shape the
/// projections of `w` in `body` refer to.
fn nest(hint: &str, dom: &Term, w: &str, body: Term) -> Term {
    match dom {
        Term::Sigma(y, a1, b1) => {
            let u = fresh_name(y.name());
            let v = fresh_name(hint);
            let rest = body.substitute(w, &Term::pair(Term::var(&u), Term::var(&v)));
            let tail = nest(hint, &b1.open(&Term::var(&u)), &v, rest);
            nest(y.name(), a1, &u, tail)
        }
        dom => Term::Sigma(Binder::new(hint), flatten(dom).into(), body.close(w).into()),
    }
}
