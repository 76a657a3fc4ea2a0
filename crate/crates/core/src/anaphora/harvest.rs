//! Antecedent harvesting and property abstraction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::normalize::normalize;
use crate::signature::{GlobalSignature, AGENT, PATIENT};
use crate::subtype::{is_atomic_head, to_chain, tuple_projection, PropertyChain};
use crate::term::{fresh_name, Term};

use super::ResolveError;

/// Default bound on the length of projection paths into a context.
pub const DEFAULT_DEPTH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Agent,
    Patient,
}

impl Role {
    pub fn predicate(self) -> &'static str {
        match self {
            Role::Agent => AGENT,
            Role::Patient => PATIENT,
        }
    }

    pub fn other(self) -> Role {
        match self {
            Role::Agent => Role::Patient,
            Role::Patient => Role::Agent,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.predicate())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Proj {
    Fst,
    Snd,
}

/// A sequence of projections, innermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AccessPath(pub Vec<Proj>);

impl AccessPath {
    pub fn apply(&self, t: &Term) -> Term {
        self.0.iter().fold(t.clone(), |acc, p| match p {
            Proj::Fst => Term::fst(acc),
            Proj::Snd => Term::snd(acc),
        })
    }

    fn then(&self, p: Proj) -> AccessPath {
        let mut v = self.0.clone();
        v.push(p);
        AccessPath(v)
    }
}

/// Written outermost projection first, `π1π2(c)`.
impl fmt::Display for AccessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.0.iter().rev() {
            f.write_str(match p {
                Proj::Fst => "π1",
                Proj::Snd => "π2",
            })?;
        }
        f.write_str("(c)")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Participant {
    pub entity: Term,
    /// Projection out of the antecedent yielding the role proof.
    pub proof: Term,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Antecedent {
    pub path: AccessPath,
    /// `path` applied to the context variable.
    pub access: Term,
    /// Normalized type of `access`.
    pub ty: Term,
    pub chain: PropertyChain,
    pub agent: Option<Participant>,
    pub patient: Option<Participant>,
}

impl Antecedent {
    pub fn participant(&self, role: Role) -> Option<&Participant> {
        match role {
            Role::Agent => self.agent.as_ref(),
            Role::Patient => self.patient.as_ref(),
        }
    }
}

/// Every chain-typed component reachable from `ctx : ctx_ty` through at most
/// `depth` projections, most recent (rightmost) first. Σs whose first
/// component is not atomic are descended; chains are not.
pub fn harvest_antecedents(sig: &GlobalSignature, ctx: &Term, ctx_ty: &Term, depth: usize) -> Vec<Antecedent> {
    let mut out = Vec::new();
    let ty = normalize(sig, ctx_ty).unwrap_or_else(|_| ctx_ty.clone());
    walk(sig, ctx, AccessPath::default(), &ty, depth, &mut out);
    out
}

fn walk(sig: &GlobalSignature, ctx: &Term, path: AccessPath, ty: &Term, depth: usize, out: &mut Vec<Antecedent>) {
    let Term::Sigma(_, first, second) = ty else { return };
    let access = path.apply(ctx);
    if is_atomic_head(first) {
        if let Ok(chain) = to_chain(ty) {
            out.push(antecedent(path, access, ty.clone(), chain));
        }
        return;
    }
    if depth == 0 {
        return;
    }
    let snd_ty = second.open(&Term::fst(access));
    let snd_ty = normalize(sig, &snd_ty).unwrap_or(snd_ty);
    walk(sig, ctx, path.then(Proj::Snd), &snd_ty, depth - 1, out);
    walk(sig, ctx, path.then(Proj::Fst), first, depth - 1, out);
}

fn antecedent(path: AccessPath, access: Term, ty: Term, chain: PropertyChain) -> Antecedent {
    let head = Term::var(&chain.head_var);
    let n = chain.properties.len();
    let find = |role: Role| {
        chain.properties.iter().enumerate().find_map(|(i, p)| {
            let entity = role_argument(p, role, &head)?;
            if entity.has_free_var(&chain.head_var) {
                return None;
            }
            Some(Participant { entity: entity.clone(), proof: tuple_projection(Term::snd(access.clone()), i, n) })
        })
    };
    let agent = find(Role::Agent);
    let patient = find(Role::Patient);
    Antecedent { path, access, ty, chain, agent, patient }
}

/// `x` when `p` is `role(head, x)`.
fn role_argument<'t>(p: &'t Term, role: Role, head: &Term) -> Option<&'t Term> {
    let (h, args) = p.spine();
    match (h, args.as_slice()) {
        (Term::Const(c), [e, x]) if c == role.predicate() && *e == head => Some(x),
        _ => None,
    }
}

/// Abstracts the designated role occurrences of a chain:
/// `λy1 ... yk. λe. P1 × ... × Pn` where the property `role_i(e, entity_i)`
/// becomes `role_i(e, y_i)`. Other occurrences of the entities are kept.
pub fn abstract_property(chain: &PropertyChain, over: &[(Role, Term)]) -> Result<Term, ResolveError> {
    let head = Term::var(&chain.head_var);
    let mut props = chain.properties.clone();
    let names = ["y", "z"];
    let mut vars = Vec::new();
    for (k, (role, entity)) in over.iter().enumerate() {
        let v = fresh_name(names.get(k).copied().unwrap_or("y"));
        let slot = props
            .iter()
            .position(|p| role_argument(p, *role, &head) == Some(entity))
            .ok_or_else(|| ResolveError::OccurrenceNotFound { role: *role, entity: entity.clone() })?;
        props[slot] = Term::pred(role.predicate(), [head.clone(), Term::var(&v)]);
        vars.push(v);
    }
    let ev = fresh_name("e");
    let body = Term::product(props).substitute(&chain.head_var, &Term::var(&ev));
    vars.push(ev);
    Ok(Term::lams(vars.iter().map(String::as_str), body))
}
