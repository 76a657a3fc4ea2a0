//! Coercive width subtyping over property chains.
//!
//! A property chain is a type `Σ e: H. P1 × ... × Pn` with an atomic head
//! `H` (`event` or `entity`). One chain is a subtype of another with the
//! same head when its properties include the other's. The coercion keeps the
//! head and re-pairs the retained proofs.

use thiserror::Error;

use crate::normalize::normalize;
use crate::signature::{GlobalSignature, Telescope, ENTITY, EVENT};
use crate::term::{fresh_name, Binder, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("not a property chain: {0}")]
pub struct NotAChain(pub Term);

/// A right-nested Σ type split into its head and properties. The properties
/// mention the head as the free variable `head_var`.
#[derive(Clone, Debug)]
pub struct PropertyChain {
    pub binder: Binder,
    pub head_var: String,
    pub head_type: Term,
    pub properties: Vec<Term>,
}

/// Chains are equal when they re-nest to alpha-equivalent types.
impl PartialEq for PropertyChain {
    fn eq(&self, other: &Self) -> bool {
        self.to_type() == other.to_type()
    }
}

impl PropertyChain {
    /// Re-nests the chain as a Σ type.
    pub fn to_type(&self) -> Term {
        let body = Term::product(self.properties.iter().cloned()).close(&self.head_var);
        Term::Sigma(self.binder.clone(), self.head_type.clone().into(), body.into())
    }

    /// Properties with the head replaced by `head`.
    pub fn properties_at(&self, head: &Term) -> Vec<Term> {
        self.properties.iter().map(|p| p.substitute(&self.head_var, head)).collect()
    }

    pub fn is_event(&self) -> bool {
        self.head_type == Term::cnst(EVENT)
    }

    pub fn is_entity(&self) -> bool {
        self.head_type == Term::cnst(ENTITY)
    }
}

pub fn is_atomic_head(t: &Term) -> bool {
    matches!(t, Term::Const(c) if c == EVENT || c == ENTITY)
}

/// Splits `Σ e: H. P1 × ... × Pn`. Only non-dependent Σs separate
/// properties; a dependent inner Σ is a single property. `Σ e: H. ()` has
/// no properties.
pub fn to_chain(ty: &Term) -> Result<PropertyChain, NotAChain> {
    let Term::Sigma(binder, head, body) = ty else { return Err(NotAChain(ty.clone())) };
    if !is_atomic_head(head) {
        return Err(NotAChain(ty.clone()));
    }
    let head_var = fresh_name(binder.name());
    let mut rest = body.open(&Term::var(&head_var));
    let mut properties = Vec::new();
    if rest != Term::Unit {
        loop {
            match &rest {
                Term::Sigma(_, a, b) if !b.uses_bound() => {
                    properties.push(a.as_ref().clone());
                    rest = b.unshifted();
                }
                _ => {
                    properties.push(rest);
                    break;
                }
            }
        }
    }
    Ok(PropertyChain { binder: binder.clone(), head_var, head_type: head.as_ref().clone(), properties })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Coercion {
    pub source: Term,
    pub target: Term,
    /// A closed function of type `source -> target`.
    pub witness: Term,
}

impl Coercion {
    pub fn identity(ty: &Term) -> Coercion {
        Coercion { source: ty.clone(), target: ty.clone(), witness: Term::lam("z", Term::var("z")) }
    }

    pub fn witness_type(&self) -> Term {
        Term::arrow(self.source.clone(), self.target.clone())
    }
}

/// `π1 (π2^i t)` for a non-final component of an `n`-tuple, `π2^i t` for
/// the last one.
pub fn tuple_projection(t: Term, i: usize, n: usize) -> Term {
    let mut cur = t;
    for _ in 0..i {
        cur = Term::snd(cur);
    }
    if i + 1 < n {
        Term::fst(cur)
    } else {
        cur
    }
}

/// A coercion from `sub` to `sup` when one exists. The telescope is not
/// consulted: chains are compared syntactically after normalization.
pub fn is_subtype(sig: &GlobalSignature, _tel: &Telescope, sub: &Term, sup: &Term) -> Option<Coercion> {
    let sub = normalize(sig, &expand_aliases(sub)).ok()?;
    let sup = normalize(sig, &expand_aliases(sup)).ok()?;
    if sub == sup {
        return Some(Coercion::identity(&sub));
    }
    let a = to_chain(&sub).ok()?;
    let b = to_chain(&sup).ok()?;
    if a.head_type != b.head_type {
        return None;
    }
    let v = Term::var(fresh_name("e"));
    let have = a.properties_at(&v);
    let want = b.properties_at(&v);
    let mut used = vec![false; have.len()];
    let mut picks = Vec::with_capacity(want.len());
    for w in &want {
        let i = (0..have.len()).find(|&i| !used[i] && have[i] == *w)?;
        used[i] = true;
        picks.push(i);
    }
    let z = Term::var("z");
    let proofs = picks.iter().map(|&i| tuple_projection(Term::snd(z.clone()), i, have.len()));
    let witness = Term::lam("z", Term::pair(Term::fst(z.clone()), Term::tuple(proofs)));
    Some(Coercion { source: sub, target: sup, witness })
}

/// `normalize(witness t)`.
pub fn apply_coercion(sig: &GlobalSignature, c: &Coercion, t: &Term) -> Term {
    let applied = Term::app(c.witness.clone(), t.clone());
    normalize(sig, &applied).unwrap_or(applied)
}

/// Expands the record-style event type names into property chains:
///
/// | name | expansion |
/// |---|---|
/// | `Event` | `Σ e: event. ()` |
/// | `Evt_A a`, `Event_A a` | `Σ e: event. agent(e, a)` |
/// | `Evt_P p`, `Event_P p` | `Σ e: event. patient(e, p)` |
/// | `Evt_AP a p`, `Event_AP a p` | `Σ e: event. agent(e, a) × patient(e, p)` |
/// | `Event_DA d a`, `Event_NA d a` | `Σ e: event. d(e) × agent(e, a)` |
///
/// Applications with the wrong number of arguments are left alone.
pub fn expand_aliases(t: &Term) -> Term {
    t.map_scoped(0, &mut |node, _| {
        let (head, args) = node.spine();
        let Term::Const(name) = head else { return None };
        let arity = alias_arity(name)?;
        if args.len() != arity {
            return None;
        }
        let args: Vec<Term> = args.into_iter().map(expand_aliases).collect();
        let e = Term::var("e");
        let role = |r: &str, x: &Term| Term::pred(r, [e.clone(), x.clone()]);
        let props = match name.as_str() {
            "Event" => vec![],
            "Evt_A" | "Event_A" => vec![role("agent", &args[0])],
            "Evt_P" | "Event_P" => vec![role("patient", &args[0])],
            "Evt_AP" | "Event_AP" => vec![role("agent", &args[0]), role("patient", &args[1])],
            _ => vec![Term::app(args[0].clone(), e.clone()), role("agent", &args[1])],
        };
        Some(Term::sigma("e", Term::cnst(EVENT), Term::product(props)))
    })
}

fn alias_arity(name: &str) -> Option<usize> {
    match name {
        "Event" => Some(0),
        "Evt_A" | "Event_A" | "Evt_P" | "Event_P" => Some(1),
        "Evt_AP" | "Event_AP" | "Event_DA" | "Event_NA" => Some(2),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::{parse, parse_with_vars};
    use crate::typecheck::{check_type_with, CheckOptions};

    fn sig() -> GlobalSignature {
        let mut sig = GlobalSignature::base();
        sig.declare("left", parse("(-> event type)").unwrap());
        for n in ["a", "p", "x", "j"] {
            sig.declare(n, Term::cnst("entity"));
        }
        sig
    }

    #[test]
    fn chain_of_left_agent() {
        let ty = parse("(sigma (e event) (times (left e) (agent e x)))").unwrap();
        let ch = to_chain(&ty).unwrap();
        assert!(ch.is_event());
        let e = Term::var(&ch.head_var);
        assert_eq!(ch.properties, vec![Term::pred("left", [e.clone()]), Term::pred("agent", [e, Term::cnst("x")])]);
        assert_eq!(ch.to_type(), ty);
    }

    #[test]
    fn unit_chain_is_empty() {
        let ty = parse("(sigma (e event) unit)").unwrap();
        let ch = to_chain(&ty).unwrap();
        assert!(ch.properties.is_empty());
        assert_eq!(ch.to_type(), ty);
    }

    #[test]
    fn entity_is_not_a_chain() {
        assert!(to_chain(&Term::cnst("entity")).is_err());
    }

    #[test]
    fn dependent_property_stays_whole() {
        let ty = parse("(sigma (e event) (times (left e) (sigma (k entity) (agent e k))))").unwrap();
        let ch = to_chain(&ty).unwrap();
        assert_eq!(ch.properties.len(), 2);
        assert_eq!(ch.to_type(), ty);
    }

    #[test]
    fn width_subtyping_examples() {
        let s = sig();
        let t = Telescope::new();
        let ap = parse("(sigma (e event) (times (agent e a) (patient e p)))").unwrap();
        let a = parse("(sigma (e event) (agent e a))").unwrap();
        assert!(is_subtype(&s, &t, &ap, &a).is_some());
        assert!(is_subtype(&s, &t, &a, &ap).is_none());
        let da = parse("(sigma (e event) (times (left e) (agent e x)))").unwrap();
        let ax = parse("(sigma (e event) (agent e x))").unwrap();
        let c = is_subtype(&s, &t, &da, &ax).unwrap();
        let ok = check_type_with(&s, &t, &c.witness, &c.witness_type(), CheckOptions::without_subtyping());
        assert!(ok.is_ok(), "{ok:?}");
    }

    #[test]
    fn coercion_keeps_selected_proofs() {
        let s = sig();
        let da = parse("(sigma (e event) (times (left e) (agent e x)))").unwrap();
        let ax = parse("(sigma (e event) (agent e x))").unwrap();
        let c = is_subtype(&s, &Telescope::new(), &da, &ax).unwrap();
        let v = parse_with_vars("(pair e0 (pair pl pa))", &["e0", "pl", "pa"]).unwrap();
        assert_eq!(apply_coercion(&s, &c, &v), parse_with_vars("(pair e0 pa)", &["e0", "pa"]).unwrap());
        let top = parse("(sigma (e event) unit)").unwrap();
        let c = is_subtype(&s, &Telescope::new(), &da, &top).unwrap();
        assert_eq!(apply_coercion(&s, &c, &v), parse_with_vars("(pair e0 tt)", &["e0"]).unwrap());
    }

    #[test]
    fn identity_coercion() {
        let s = sig();
        let c = is_subtype(&s, &Telescope::new(), &Term::cnst("entity"), &Term::cnst("entity")).unwrap();
        assert_eq!(apply_coercion(&s, &c, &Term::cnst("j")), Term::cnst("j"));
    }

    #[test]
    fn heads_must_agree() {
        let s = sig();
        let ev = parse("(sigma (e event) (agent e a))").unwrap();
        let en = parse("(sigma (e entity) unit)").unwrap();
        assert!(is_subtype(&s, &Telescope::new(), &ev, &en).is_none());
    }

    #[test]
    fn aliases_expand_to_chains() {
        assert_eq!(expand_aliases(&parse("Event").unwrap()), parse("(sigma (e event) unit)").unwrap());
        assert_eq!(
            expand_aliases(&parse("(Evt_AP a p)").unwrap()),
            parse("(sigma (e event) (times (agent e a) (patient e p)))").unwrap()
        );
        assert_eq!(
            expand_aliases(&parse("(Event_DA left x)").unwrap()),
            parse("(sigma (e event) (times (left e) (agent e x)))").unwrap()
        );
        let s = sig();
        let t = Telescope::new();
        let chain = ["(Evt_AP a p)", "(Evt_A a)", "Event"].map(|x| parse(x).unwrap());
        assert!(is_subtype(&s, &t, &chain[0], &chain[1]).is_some());
        assert!(is_subtype(&s, &t, &chain[1], &chain[2]).is_some());
        assert!(is_subtype(&s, &t, &chain[2], &chain[1]).is_none());
    }
}
