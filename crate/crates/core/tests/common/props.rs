//! Property bodies, each driven by a single seed.

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{normalize_ty, Gen, SENTENCES};
use dts_core::anaphora::{resolve_discourse, ResolveError, ResolveOptions};
use dts_core::fol::to_fol;
use dts_core::fragment::{parse_sentence, interpret_sentence, reassociate, sequence_discourse, DynamicProp, Lexicon};
use dts_core::normalize::{normalize, NormalizeError};
use dts_core::sexpr::{parse, print};
use dts_core::subtype::{apply_coercion, is_subtype};
use dts_core::term::{fresh_name, Term};
use dts_core::typecheck::{check_type, check_type_with, infer_type, CheckOptions};

pub fn normalization_is_idempotent_on_typed_terms(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    if let Some((t, _)) = g.typed_term(3) {
        let once = normalize(&g.sig, &t).unwrap();
        prop_assert_eq!(normalize(&g.sig, &once).unwrap(), once);
    }
    Ok(())
}

pub fn normalization_is_idempotent_on_raw_terms(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let t = g.raw(5);
    match normalize(&g.sig, &t) {
        Ok(once) => prop_assert_eq!(normalize(&g.sig, &once).unwrap(), once),
        Err(NormalizeError::DepthExceeded(_)) => {}
    }
    Ok(())
}

pub fn generated_terms_check(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    if let Some((t, ty)) = g.typed_term(3) {
        prop_assert!(check_type(&g.sig, &g.telescope(), &t, &ty).is_ok(), "{} : {}", t, ty);
    }
    Ok(())
}

pub fn inferred_types_check(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let candidates = [g.typed_term(3).map(|p| p.0), Some(g.ty(3)), Some(g.raw(4))];
    let tel = g.telescope();
    for t in candidates.into_iter().flatten() {
        if let Ok(ty) = infer_type(&g.sig, &tel, &t) {
            let checked = check_type_with(&g.sig, &tel, &t, &ty, CheckOptions::without_subtyping());
            prop_assert!(checked.is_ok(), "{} : {}", t, ty);
        }
    }
    Ok(())
}

pub fn substitution_preserves_typing(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let a = g.ty(2);
    let a = normalize_ty(&g.sig, &a);
    let x = fresh_name("s");
    g.scope.push((x.clone(), a.clone()));
    let b = g.ty(2);
    let b = normalize_ty(&g.sig, &b);
    let m = g.term(&b, 3);
    let tel_x = g.telescope();
    g.scope.pop();
    let n = g.term(&a, 2);
    let (Some(m), Some(n)) = (m, n) else { return Ok(()) };
    let tel = g.telescope();
    // Variables are inferable, so only inferable terms may stand in for
    // one: a lambda substituted under a projection has no type to offer.
    if infer_type(&g.sig, &tel, &n).is_err() {
        return Ok(());
    }
    prop_assert!(check_type(&g.sig, &tel_x, &m, &b).is_ok());
    prop_assert!(check_type(&g.sig, &tel, &n, &a).is_ok());
    let m2 = m.substitute(&x, &n);
    let b2 = b.substitute(&x, &n);
    prop_assert!(check_type(&g.sig, &tel, &m2, &b2).is_ok(), "{} : {}", m2, b2);
    Ok(())
}

pub fn subject_reduction(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let Some((t, _)) = g.typed_term(3) else { return Ok(()) };
    let tel = g.telescope();
    let Ok(before) = infer_type(&g.sig, &tel, &t) else { return Ok(()) };
    let nf = normalize(&g.sig, &t).unwrap();
    let after = infer_type(&g.sig, &tel, &nf);
    prop_assert!(after.is_ok(), "normal form {} lost its type", nf);
    let after = after.unwrap();
    prop_assert!(
        after == before || is_subtype(&g.sig, &tel, &after, &before).is_some(),
        "{} : {} but {} : {}", t, before, nf, after
    );
    Ok(())
}

pub fn print_parse_round_trip(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let t = if seed.is_multiple_of(2) { g.raw(5) } else { g.typed_term(3).map(|p| p.0).unwrap_or(Term::Star) };
    let back = parse(&print(&t));
    prop_assert_eq!(back, Ok(t));
    Ok(())
}

pub fn subtyping_is_reflexive(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let props = g.properties(5);
    let a = Gen::chain(&props);
    let c = is_subtype(&g.sig, &g.telescope(), &a, &a);
    prop_assert!(c.is_some());
    let c = c.unwrap();
    let checked = check_type_with(&g.sig, &g.telescope(), &c.witness, &c.witness_type(), CheckOptions::without_subtyping());
    prop_assert!(checked.is_ok());
    Ok(())
}

pub fn subtyping_is_transitive(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let pa = g.properties(6);
    let pb = g.sub_multiset(&pa);
    let pc = g.sub_multiset(&pb);
    let (a, b, c) = (Gen::chain(&pa), Gen::chain(&pb), Gen::chain(&pc));
    let tel = g.telescope();
    let ab = is_subtype(&g.sig, &tel, &a, &b);
    let bc = is_subtype(&g.sig, &tel, &b, &c);
    let ac = is_subtype(&g.sig, &tel, &a, &c);
    prop_assert!(ab.is_some() && bc.is_some() && ac.is_some());
    let (ab, bc, ac) = (ab.unwrap(), bc.unwrap(), ac.unwrap());
    for w in [&ab, &bc, &ac] {
        let checked = check_type_with(&g.sig, &tel, &w.witness, &w.witness_type(), CheckOptions::without_subtyping());
        prop_assert!(checked.is_ok(), "{}", w.witness);
    }
    let composite = Term::lam("z", Term::app(bc.witness.clone(), Term::app(ab.witness.clone(), Term::var("z"))));
    let composite_ty = Term::arrow(a.clone(), c.clone());
    prop_assert!(check_type_with(&g.sig, &tel, &composite, &composite_ty, CheckOptions::without_subtyping()).is_ok());
    // Compare on an inhabitant built from distinct proof variables.
    let e0 = Term::var("e0");
    let mut inhabitant_tel = tel.extended("e0", Term::cnst("event"));
    let proofs: Vec<Term> = pa.iter().enumerate().map(|(i, p)| {
        let v = format!("p{i}");
        inhabitant_tel.push(v.clone(), p.replace(&Term::var("e"), &e0));
        Term::var(v)
    }).collect();
    let inhabitant = Term::pair(e0, Term::tuple(proofs));
    prop_assert!(check_type(&g.sig, &inhabitant_tel, &inhabitant, &a).is_ok());
    let via_b = apply_coercion(&g.sig, &bc, &apply_coercion(&g.sig, &ab, &inhabitant));
    let direct = apply_coercion(&g.sig, &ac, &inhabitant);
    prop_assert_eq!(via_b, direct);
    Ok(())
}

pub fn non_submultisets_are_absent(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let pa = g.properties(4);
    let mut pb = g.sub_multiset(&pa);
    let extra = g.property();
    let count = |v: &[Term], t: &Term| v.iter().filter(|p| *p == t).count();
    pb.push(extra.clone());
    prop_assume!(count(&pb, &extra) > count(&pa, &extra));
    prop_assert!(is_subtype(&g.sig, &g.telescope(), &Gen::chain(&pa), &Gen::chain(&pb)).is_none());
    Ok(())
}

pub fn exists_count_matches_atomic_sigmas(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let ty = g.ty(4);
    let ty = normalize_ty(&g.sig, &ty);
    if let Ok(f) = to_fol(&ty) {
        let mut atomic_sigmas = 0;
        ty.visit(&mut |t| {
            if let Term::Sigma(_, a, _) = t {
                if matches!(a.as_ref(), Term::Const(c) if c == "entity" || c == "event") {
                    atomic_sigmas += 1;
                }
            }
        });
        prop_assert_eq!(f.exists_count(), atomic_sigmas);
        prop_assert!(f.free_vars().is_empty(), "{}", f);
    }
    Ok(())
}

pub fn sequencing_is_associative(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let lex = Lexicon::default_lexicon();
    let sig = lex.signature();
    // Each of the three operands is itself a sequence of one or two
    // sentences.
    let pick = |g: &mut Gen| -> DynamicProp {
        let n = g.rng.gen_range(1..=2);
        let ps: Vec<DynamicProp> = (0..n)
            .map(|_| {
                let s = SENTENCES.choose(&mut g.rng).unwrap();
                interpret_sentence(&lex, &parse_sentence(&lex, s).unwrap()).unwrap()
            })
            .collect();
        sequence_discourse(&ps).unwrap()
    };
    let (d1, d2, d3) = (pick(&mut g), pick(&mut g), pick(&mut g));
    let seq = |ps: &[DynamicProp]| sequence_discourse(ps).unwrap();
    let left = seq(&[seq(&[d1.clone(), d2.clone()]), d3.clone()]);
    let right = seq(&[d1.clone(), seq(&[d2.clone(), d3.clone()])]);
    let flat = seq(&[d1, d2, d3]);
    prop_assert_eq!(&flat.term, &left.term);
    prop_assert_eq!(&flat.hints, &left.hints);
    prop_assert_eq!(&left.hints, &right.hints);

    if !left.term.contains_at_op() {
        let apply = |d: &DynamicProp| reassociate(&sig, &Term::app(d.term.clone(), Term::var("c0")));
        prop_assert_eq!(apply(&left), apply(&right));
    }
    let opts = ResolveOptions::default();
    let readings = |d: &DynamicProp| -> Result<Vec<Term>, ResolveError> {
        let rs = resolve_discourse(&sig, &d.term, &Term::Unit, &d.hints, &opts)?;
        Ok(rs.into_iter().map(|r| reassociate(&sig, &r.interpretation)).collect())
    };
    match (readings(&left), readings(&right)) {
        (Ok(l), Ok(r)) => prop_assert_eq!(l, r),
        (Err(l), Err(r)) => prop_assert_eq!(l.index(), r.index()),
        (l, r) => prop_assert!(false, "left {:?} right {:?}", l.map(|v| v.len()), r.map(|v| v.len())),
    }
    Ok(())
}

pub fn resolution_is_deterministic_and_sound(seed: u64) -> Result<(), TestCaseError> {
    let mut g = Gen::new(seed);
    let lex = Lexicon::default_lexicon();
    let n = g.rng.gen_range(1..=4);
    let text: Vec<&str> = (0..n).map(|_| *SENTENCES.choose(&mut g.rng).unwrap()).collect();
    let disc = dts_core::fragment::interpret_discourse(&lex, &text.join(" ")).unwrap();
    let sig = lex.signature();
    let opts = ResolveOptions::default();
    let first = resolve_discourse(&sig, &disc.prop.term, &Term::Unit, &disc.prop.hints, &opts);
    let second = resolve_discourse(&sig, &disc.prop.term, &Term::Unit, &disc.prop.hints, &opts);
    prop_assert_eq!(&first, &second);
    if let Ok(rs) = first {
        let tel = dts_core::signature::Telescope::new().extended("c0", Term::Unit);
        let mut seen = BTreeMap::new();
        for r in &rs {
            let s = dts_core::typecheck::infer_sort(&sig, &tel, &r.interpretation);
            prop_assert_eq!(s, Ok(dts_core::term::Sort::Type));
            prop_assert!(seen.insert(print(&r.interpretation), ()).is_none(), "duplicate reading");
            prop_assert!(to_fol(&r.interpretation).is_ok());
        }
    }
    Ok(())
}
