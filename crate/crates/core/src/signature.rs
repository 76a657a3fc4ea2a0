//! Global signature and typing contexts.

use std::collections::BTreeMap;

use crate::term::Term;

/// Which participant a replace combinator swaps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReplaceKind {
    Agent,
    Patient,
    AgentPatient,
}

impl ReplaceKind {
    pub const ALL: [ReplaceKind; 3] = [ReplaceKind::Agent, ReplaceKind::Patient, ReplaceKind::AgentPatient];

    pub fn constant(self) -> &'static str {
        match self {
            ReplaceKind::Agent => "replaceA",
            ReplaceKind::Patient => "replaceP",
            ReplaceKind::AgentPatient => "replaceAP",
        }
    }

    /// Skolem function naming the new event built by the combinator.
    pub fn event_constant(self) -> &'static str {
        match self {
            ReplaceKind::Agent => "replaceA-event",
            ReplaceKind::Patient => "replaceP-event",
            ReplaceKind::AgentPatient => "replaceAP-event",
        }
    }

    /// Skolem function naming the proof that the new event has the property.
    pub fn proof_constant(self) -> &'static str {
        match self {
            ReplaceKind::Agent => "replaceA-proof",
            ReplaceKind::Patient => "replaceP-proof",
            ReplaceKind::AgentPatient => "replaceAP-proof",
        }
    }

    /// Number of arguments of a full application.
    pub fn arity(self) -> usize {
        match self {
            ReplaceKind::Agent | ReplaceKind::Patient => 4,
            ReplaceKind::AgentPatient => 6,
        }
    }

    pub fn from_constant(name: &str) -> Option<ReplaceKind> {
        ReplaceKind::ALL.into_iter().find(|k| k.constant() == name)
    }
}

/// Reduction behaviour attached to a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaRule {
    Replace(ReplaceKind),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GlobalSignature {
    constants: BTreeMap<String, Term>,
    deltas: BTreeMap<String, DeltaRule>,
}

pub const ENTITY: &str = "entity";
pub const EVENT: &str = "event";
pub const AGENT: &str = "agent";
pub const PATIENT: &str = "patient";

impl GlobalSignature {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The base signature: atomic types, thematic roles, possession, the
    /// event relations `before`/`about`, and the replace combinators.
    pub fn base() -> Self {
        let mut sig = Self::empty();
        let entity = Term::cnst(ENTITY);
        let event = Term::cnst(EVENT);
        sig.declare(ENTITY, Term::ty());
        sig.declare(EVENT, Term::ty());
        let role = Term::arrow(event.clone(), Term::arrow(entity.clone(), Term::ty()));
        sig.declare(AGENT, role.clone());
        sig.declare(PATIENT, role);
        sig.declare("owner", Term::arrow(entity.clone(), Term::arrow(entity.clone(), Term::ty())));
        let ev_rel = Term::arrow(event.clone(), Term::arrow(event, Term::ty()));
        sig.declare("before", ev_rel.clone());
        sig.declare("about", ev_rel);
        for kind in ReplaceKind::ALL {
            sig.declare_replace(kind);
        }
        sig
    }

    /// Declares a constant, replacing any earlier declaration.
    pub fn declare(&mut self, name: impl Into<String>, ty: Term) {
        self.constants.insert(name.into(), ty);
    }

    pub fn lookup(&self, name: &str) -> Option<&Term> {
        self.constants.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.constants.contains_key(name)
    }

    pub fn delta(&self, name: &str) -> Option<DeltaRule> {
        self.deltas.get(name).copied()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.constants.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// A constant whose declared type is exactly `ty`, if any.
    pub fn inhabitant_of(&self, ty: &Term) -> Option<&str> {
        self.constants.iter().find(|(_, t)| *t == ty).map(|(k, _)| k.as_str())
    }

    fn declare_replace(&mut self, kind: ReplaceKind) {
        let entity = Term::cnst(ENTITY);
        let event = Term::cnst(EVENT);
        let pred_ty = match kind {
            ReplaceKind::AgentPatient => {
                Term::arrow(entity.clone(), Term::arrow(entity.clone(), Term::arrow(event.clone(), Term::ty())))
            }
            _ => Term::arrow(entity.clone(), Term::arrow(event.clone(), Term::ty())),
        };
        let p = Term::var("p");
        let (params, old_args, new_args): (Vec<&str>, Vec<Term>, Vec<Term>) = match kind {
            ReplaceKind::AgentPatient => (
                vec!["oagent", "nagent", "opatient", "npatient"],
                vec![Term::var("oagent"), Term::var("opatient")],
                vec![Term::var("nagent"), Term::var("npatient")],
            ),
            _ => (vec!["original", "new"], vec![Term::var("original")], vec![Term::var("new")]),
        };
        let with_event = |args: &[Term], e: &str| {
            Term::apps(p.clone(), args.iter().cloned().chain([Term::var(e)]))
        };
        let old_ty = Term::sigma("e'", event.clone(), with_event(&old_args, "e'"));
        let new_ty = Term::sigma("e''", event.clone(), with_event(&new_args, "e''"));

        // (p: ..) -> (params: entity) -> (u: Σ e'. p old e') -> R
        let wrap = |result: Term| {
            let mut t = Term::pi("u", old_ty.clone(), result);
            for name in params.iter().rev() {
                t = Term::pi(name, entity.clone(), t);
            }
            Term::pi("p", pred_ty.clone(), t)
        };
        let applied = Term::apps(
            Term::cnst(kind.event_constant()),
            std::iter::once(p.clone())
                .chain(params.iter().map(|n| Term::var(*n)))
                .chain([Term::var("u")]),
        );
        self.declare(kind.constant(), wrap(new_ty));
        self.declare(kind.event_constant(), wrap(event.clone()));
        let proof_ty = Term::apps(p.clone(), new_args.iter().cloned().chain([applied]));
        self.declare(kind.proof_constant(), wrap(proof_ty));
        self.deltas.insert(kind.constant().to_string(), DeltaRule::Replace(kind));
    }
}

/// Ordered typing context of `(variable, type)` bindings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Telescope {
    bindings: Vec<(String, Term)>,
}

impl Telescope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = (String, Term)>) -> Self {
        Telescope { bindings: bindings.into_iter().collect() }
    }

    /// Returns a new telescope with `name: ty` appended.
    pub fn extended(&self, name: impl Into<String>, ty: Term) -> Telescope {
        let mut t = self.clone();
        t.push(name, ty);
        t
    }

    pub fn push(&mut self, name: impl Into<String>, ty: Term) {
        self.bindings.push((name.into(), ty));
    }

    pub fn pop(&mut self) {
        self.bindings.pop();
    }

    /// The type of the most recent binding of `name`.
    pub fn lookup(&self, name: &str) -> Option<&Term> {
        self.bindings.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn bindings(&self) -> &[(String, Term)] {
        &self.bindings
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.iter().map(|(n, _)| n.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr;

    #[test]
    fn replace_a_has_the_combinator_type() {
        let sig = GlobalSignature::base();
        let expected = sexpr::parse(
            "(pi (p (-> entity event type)) (pi (original entity) (pi (new entity) \
             (pi (u (sigma (e' event) (p original e'))) (sigma (e'' event) (p new e''))))))",
        )
        .unwrap();
        assert_eq!(sig.lookup("replaceA"), Some(&expected));
        // identical types for replaceA and replaceP; only intended use differs
        assert_eq!(sig.lookup("replaceA"), sig.lookup("replaceP"));
    }

    #[test]
    fn replace_ap_takes_both_participants() {
        let sig = GlobalSignature::base();
        let expected = sexpr::parse(
            "(pi (p (-> entity entity event type)) (pi (oagent entity) (pi (nagent entity) \
             (pi (opatient entity) (pi (npatient entity) \
             (pi (u (sigma (e' event) (p oagent opatient e'))) \
             (sigma (e'' event) (p nagent npatient e''))))))))",
        )
        .unwrap();
        assert_eq!(sig.lookup("replaceAP"), Some(&expected));
        assert_eq!(sig.delta("replaceAP"), Some(DeltaRule::Replace(ReplaceKind::AgentPatient)));
        assert_eq!(sig.delta("agent"), None);
    }

    #[test]
    fn telescope_lookup_prefers_latest() {
        let mut tel = Telescope::new();
        tel.push("x", Term::cnst(ENTITY));
        tel.push("x", Term::cnst(EVENT));
        assert_eq!(tel.lookup("x"), Some(&Term::cnst(EVENT)));
        tel.pop();
        assert_eq!(tel.lookup("x"), Some(&Term::cnst(ENTITY)));
        assert_eq!(tel.lookup("y"), None);
    }
}
