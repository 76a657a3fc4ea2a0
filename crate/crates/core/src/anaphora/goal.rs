//! Felicity goals and template-directed witness search.

use serde::{Deserialize, Serialize};

use crate::normalize::normalize;
use crate::signature::{GlobalSignature, ReplaceKind, Telescope, ENTITY, EVENT};
use crate::subtype::{is_subtype, to_chain};
use crate::term::{fresh_name, Term};
use crate::typecheck::check_type;

use super::harvest::{abstract_property, harvest_antecedents, Antecedent, Role};
use super::{ReadingLabel, ResolveError, ResolveOptions};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Voice {
    #[default]
    Active,
    Passive,
}

/// Information from the sentence that contains an anaphor.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResolutionHints {
    pub voice: Voice,
    /// Entities mentioned earlier in the same clause, nearest first.
    pub local_entities: Vec<Term>,
    /// Only local entities may resolve the anaphor.
    pub reflexive: bool,
}

/// `K, tel ⊢ @_index : Π c: context_type. body`.
#[derive(Clone, Debug, PartialEq)]
pub struct FelicityGoal {
    pub index: usize,
    pub telescope: Telescope,
    pub context_type: Term,
    pub goal_type: Term,
}

impl FelicityGoal {
    pub fn new(index: usize, telescope: Telescope, context_type: Term, body: Term) -> FelicityGoal {
        let c = fresh_name("c");
        let goal_type = Term::pi(&c, context_type.clone(), body);
        FelicityGoal { index, telescope, context_type, goal_type }
    }

    /// The ascribed type without the context binder.
    pub fn body(&self) -> Term {
        match &self.goal_type {
            Term::Pi(_, _, b) => b.unshifted(),
            other => other.clone(),
        }
    }
}

/// The three goal shapes the search understands.
#[derive(Clone, Debug, PartialEq)]
pub enum GoalShape {
    /// `entity` or `Σ x: entity. P`.
    Pronominal { property: Option<Term> },
    /// `Π x: entity. Σ e: event. ... × role(e, x)`.
    VerbPhrase,
    /// `Σ e: event. P`.
    Propositional,
}

pub fn goal_shape(sig: &GlobalSignature, body: &Term) -> Option<GoalShape> {
    let body = normalize(sig, body).ok()?;
    let entity = Term::cnst(ENTITY);
    let event = Term::cnst(EVENT);
    match &body {
        t if *t == entity => Some(GoalShape::Pronominal { property: None }),
        Term::Sigma(_, h, _) if **h == entity => Some(GoalShape::Pronominal { property: Some(body.clone()) }),
        Term::Sigma(_, h, _) if **h == event => Some(GoalShape::Propositional),
        Term::Pi(_, d, cod) if **d == entity => match cod.as_ref() {
            Term::Sigma(_, h, _) if **h == event => Some(GoalShape::VerbPhrase),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub witness: Term,
    pub label: ReadingLabel,
    /// The antecedent the witness draws on, as an access path.
    pub antecedent: Option<String>,
}

/// Builds, type-checks and returns every witness for `goal`, most recent
/// antecedent first.
pub fn resolve_goal(
    sig: &GlobalSignature,
    goal: &FelicityGoal,
    hints: &ResolutionHints,
    opts: &ResolveOptions,
) -> Result<Vec<Candidate>, ResolveError> {
    let body = goal.body();
    let shape = goal_shape(sig, &body)
        .ok_or_else(|| ResolveError::UnsupportedGoal { index: goal.index, goal: goal.goal_type.clone() })?;
    let c = fresh_name("c");
    let ants = harvest_antecedents(sig, &Term::var(&c), &goal.context_type, opts.depth);
    let raw = match shape {
        GoalShape::VerbPhrase => verb_phrase(&c, &ants, hints)?,
        GoalShape::Pronominal { property } => pronominal(sig, &c, &ants, hints, property.as_ref()),
        GoalShape::Propositional => propositional(sig, &c, &ants, &body),
    };
    let mut out: Vec<Candidate> = Vec::new();
    for cand in raw {
        if out.len() >= opts.max_candidates {
            break;
        }
        if out.iter().any(|o| o.witness == cand.witness) {
            continue;
        }
        if check_type(sig, &goal.telescope, &cand.witness, &goal.goal_type).is_ok() {
            out.push(cand);
        }
    }
    if out.is_empty() {
        return Err(ResolveError::NoResolution { index: goal.index, goal: goal.goal_type.clone() });
    }
    Ok(out)
}

fn verb_phrase(c: &str, ants: &[Antecedent], hints: &ResolutionHints) -> Result<Vec<Candidate>, ResolveError> {
    let role = match hints.voice {
        Voice::Active => Role::Agent,
        Voice::Passive => Role::Patient,
    };
    let x = fresh_name("x");
    let xv = Term::var(&x);
    let mut out = Vec::new();
    for ant in ants.iter().filter(|a| a.chain.is_event()) {
        let Some(original) = ant.participant(role).map(|p| p.entity.clone()) else { continue };
        let p = abstract_property(&ant.chain, &[(role, original.clone())])?;
        let kind = match role {
            Role::Agent => ReplaceKind::Agent,
            Role::Patient => ReplaceKind::Patient,
        };
        let strict = Term::pred(kind.constant(), [p, original.clone(), xv.clone(), ant.access.clone()]);
        let sloppy = sloppy_candidate(ant, ants, role, &original, &xv)?;
        let (strict_label, sloppy_label) = match (&sloppy, role) {
            (Some(_), _) => (ReadingLabel::Strict, ReadingLabel::Sloppy),
            (None, Role::Agent) => (ReadingLabel::AgentReplaced, ReadingLabel::Sloppy),
            (None, Role::Patient) => (ReadingLabel::PatientReplaced, ReadingLabel::Sloppy),
        };
        out.push(Candidate {
            witness: Term::lam(c, Term::lam(&x, strict)),
            label: strict_label,
            antecedent: Some(ant.path.to_string()),
        });
        if let Some(body) = sloppy {
            out.push(Candidate {
                witness: Term::lam(c, Term::lam(&x, body)),
                label: sloppy_label,
                antecedent: Some(ant.path.to_string()),
            });
        }
    }
    Ok(out)
}

/// When the other participant `q` of `ant` is the head of an entity
/// antecedent whose properties mention `original`, the replaced
/// participant gets its own such entity:
/// `Σ h: (Σ y: entity. Q[y, new]). replaceAP p ... q (π1 h) ... u`.
fn sloppy_candidate(
    ant: &Antecedent,
    ants: &[Antecedent],
    role: Role,
    original: &Term,
    new: &Term,
) -> Result<Option<Term>, ResolveError> {
    let other = role.other();
    let Some(q) = ant.participant(other).map(|p| p.entity.clone()) else { return Ok(None) };
    let owner = ants.iter().filter(|a| a.chain.is_entity()).find(|a| {
        Term::fst(a.access.clone()) == q && a.chain.properties.iter().any(|p| p.contains(original))
    });
    let Some(owner) = owner else { return Ok(None) };
    let y = fresh_name("y");
    let props = owner.chain.properties_at(&Term::var(&y)).into_iter().map(|p| p.replace(original, new));
    let h_ty = Term::sigma(&y, Term::cnst(ENTITY), Term::product(props));
    let h = fresh_name("u");
    let fresh_entity = Term::fst(Term::var(&h));
    let (over, args) = match role {
        Role::Agent => (
            [(Role::Agent, original.clone()), (Role::Patient, q.clone())],
            [original.clone(), new.clone(), q, fresh_entity],
        ),
        Role::Patient => (
            [(Role::Agent, q.clone()), (Role::Patient, original.clone())],
            [q, fresh_entity, original.clone(), new.clone()],
        ),
    };
    let p = abstract_property(&ant.chain, &over)?;
    let app = Term::pred(
        ReplaceKind::AgentPatient.constant(),
        std::iter::once(p).chain(args).chain([ant.access.clone()]),
    );
    Ok(Some(Term::sigma(&h, h_ty, app)))
}

fn pronominal(
    sig: &GlobalSignature,
    c: &str,
    ants: &[Antecedent],
    hints: &ResolutionHints,
    property: Option<&Term>,
) -> Vec<Candidate> {
    let mut named: Vec<Term> = hints.local_entities.clone();
    if !hints.reflexive {
        for ant in ants.iter().filter(|a| a.chain.is_event()) {
            for p in [&ant.agent, &ant.patient].into_iter().flatten() {
                if matches!(p.entity, Term::Const(_)) && !named.contains(&p.entity) {
                    named.push(p.entity.clone());
                }
            }
        }
    }
    let mut out = Vec::new();
    for n in &named {
        if let Some(w) = named_witness(sig, n, property) {
            out.push(Candidate { witness: Term::lam(c, w), label: ReadingLabel::Pronominal, antecedent: None });
        }
    }
    if hints.reflexive {
        return out;
    }
    for ant in ants.iter().filter(|a| a.chain.is_entity()) {
        let w = match property {
            None => Some(Term::fst(ant.access.clone())),
            Some(ty) => is_subtype(sig, &Telescope::new(), &ant.ty, ty).map(|co| {
                let applied = Term::app(co.witness, ant.access.clone());
                normalize(sig, &applied).unwrap_or(applied)
            }),
        };
        if let Some(w) = w {
            out.push(Candidate {
                witness: Term::lam(c, w),
                label: ReadingLabel::Pronominal,
                antecedent: Some(ant.path.to_string()),
            });
        }
    }
    out
}

/// `n`, or `(n, proofs)` when every property of `Σ x: entity. P` holds of
/// `n` by a constant of the signature.
fn named_witness(sig: &GlobalSignature, n: &Term, property: Option<&Term>) -> Option<Term> {
    let Some(ty) = property else { return Some(n.clone()) };
    let chain = to_chain(ty).ok()?;
    let proofs = chain
        .properties_at(n)
        .iter()
        .map(|p| sig.inhabitant_of(p).map(Term::cnst))
        .collect::<Option<Vec<_>>>()?;
    Some(Term::pair(n.clone(), Term::tuple(proofs)))
}

fn propositional(sig: &GlobalSignature, c: &str, ants: &[Antecedent], goal: &Term) -> Vec<Candidate> {
    ants.iter()
        .filter(|a| a.chain.is_event())
        .filter_map(|ant| {
            let co = is_subtype(sig, &Telescope::new(), &ant.ty, goal)?;
            let applied = Term::app(co.witness, ant.access.clone());
            let w = normalize(sig, &applied).unwrap_or(applied);
            Some(Candidate {
                witness: Term::lam(c, w),
                label: ReadingLabel::Propositional,
                antecedent: Some(ant.path.to_string()),
            })
        })
        .collect()
}
