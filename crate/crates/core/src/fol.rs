//! First-order event-semantics formulas and the translation from
//! interpretation types.
//!
//! A Σ over `entity` or `event` becomes an existential; a Σ over a
//! proposition becomes a conjunction whose left quantifiers scope over the
//! right. Π over an individual sort is universal, Π over a proposition is
//! rendered as `¬(A ∧ ¬B)`. Projections in predicate arguments are resolved
//! through the shape of the bound proof object.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signature::{ENTITY, EVENT};
use crate::term::{fresh_name, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FolSort {
    Event,
    Entity,
}

impl FolSort {
    fn of_domain(t: &Term) -> Option<FolSort> {
        match t {
            Term::Const(c) if c == EVENT => Some(FolSort::Event),
            Term::Const(c) if c == ENTITY => Some(FolSort::Entity),
            _ => None,
        }
    }

    fn default_name(self) -> &'static str {
        match self {
            FolSort::Event => "e",
            FolSort::Entity => "x",
        }
    }
}

impl fmt::Display for FolSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FolSort::Event => EVENT,
            FolSort::Entity => ENTITY,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "lowercase")]
pub enum FolTerm {
    Var(String),
    Const(String),
}

impl FolTerm {
    fn name(&self) -> &str {
        match self {
            FolTerm::Var(n) | FolTerm::Const(n) => n,
        }
    }
}

impl fmt::Display for FolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FolFormula {
    Top,
    Pred(String, Vec<FolTerm>),
    And(Box<FolFormula>, Box<FolFormula>),
    Not(Box<FolFormula>),
    Exists(String, FolSort, Box<FolFormula>),
    Forall(String, FolSort, Box<FolFormula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FolError {
    #[error("no first-order rendering for {0}")]
    Untranslatable(Term),
    #[error("cannot parse formula at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// What an inhabitant of a translated type looks like.
#[derive(Clone, Debug)]
enum Shape {
    Individual(FolTerm),
    Proof,
    Pair(Box<Shape>, Box<Shape>),
}

enum Item {
    Quant(String, FolSort),
    Conj(FolFormula),
}

/// Translates a closed interpretation type.
pub fn to_fol(interpretation: &Term) -> Result<FolFormula, FolError> {
    let mut tr = Translator { env: BTreeMap::new(), used: BTreeSet::new() };
    let (items, _) = tr.items(interpretation)?;
    Ok(assemble(items))
}

struct Translator {
    env: BTreeMap<String, Shape>,
    used: BTreeSet<String>,
}

impl Translator {
    fn fresh(&mut self, hint: &str, sort: FolSort) -> String {
        let base = hint.split('%').next().unwrap_or("");
        let mut name = if base.is_empty() || base == "_" { sort.default_name().to_string() } else { base.to_string() };
        while self.used.contains(&name) {
            name.push('\'');
        }
        self.used.insert(name.clone());
        name
    }

    fn open(&mut self, x: &str, body: &Term, shape: Shape) -> (String, Term) {
        let v = fresh_name(x);
        self.env.insert(v.clone(), shape);
        let opened = body.open(&Term::var(&v));
        (v, opened)
    }

    fn items(&mut self, t: &Term) -> Result<(Vec<Item>, Shape), FolError> {
        match t {
            Term::Unit => Ok((Vec::new(), Shape::Proof)),
            Term::Sigma(x, a, b) => {
                if let Some(sort) = FolSort::of_domain(a) {
                    let name = self.fresh(x.name(), sort);
                    let ind = Shape::Individual(FolTerm::Var(name.clone()));
                    let (v, body) = self.open(x.name(), b, ind.clone());
                    let (mut rest, sb) = self.items(&body)?;
                    self.env.remove(&v);
                    rest.insert(0, Item::Quant(name, sort));
                    Ok((rest, Shape::Pair(ind.into(), sb.into())))
                } else {
                    let (mut left, sa) = self.items(a)?;
                    let (v, body) = self.open(x.name(), b, sa.clone());
                    let (right, sb) = self.items(&body)?;
                    self.env.remove(&v);
                    left.extend(right);
                    Ok((left, Shape::Pair(sa.into(), sb.into())))
                }
            }
            Term::Pi(x, a, b) => {
                let f = if let Some(sort) = FolSort::of_domain(a) {
                    let name = self.fresh(x.name(), sort);
                    let (v, body) = self.open(x.name(), b, Shape::Individual(FolTerm::Var(name.clone())));
                    let (items, _) = self.items(&body)?;
                    self.env.remove(&v);
                    FolFormula::Forall(name, sort, assemble(items).into())
                } else {
                    let (mut left, sa) = self.items(a)?;
                    let (v, body) = self.open(x.name(), b, sa);
                    let (right, _) = self.items(&body)?;
                    self.env.remove(&v);
                    left.push(Item::Conj(FolFormula::Not(assemble(right).into())));
                    FolFormula::Not(assemble(left).into())
                };
                Ok((vec![Item::Conj(f)], Shape::Proof))
            }
            _ => {
                let (head, args) = t.spine();
                let Some(name) = head.head_const() else {
                    return Err(FolError::Untranslatable(t.clone()));
                };
                let args = args.iter().map(|a| self.argument(a)).collect::<Result<Vec<_>, _>>()?;
                Ok((vec![Item::Conj(FolFormula::Pred(name.to_string(), args))], Shape::Proof))
            }
        }
    }

    fn argument(&self, t: &Term) -> Result<FolTerm, FolError> {
        match self.shape_of(t) {
            Some(Shape::Individual(x)) => Ok(x),
            _ => Err(FolError::Untranslatable(t.clone())),
        }
    }

    fn shape_of(&self, t: &Term) -> Option<Shape> {
        match t {
            Term::Const(c) => Some(Shape::Individual(FolTerm::Const(c.clone()))),
            Term::Var(v) => {
                Some(self.env.get(v).cloned().unwrap_or_else(|| Shape::Individual(FolTerm::Var(v.clone()))))
            }
            Term::Fst(p) => match self.shape_of(p)? {
                Shape::Pair(a, _) => Some(*a),
                _ => None,
            },
            Term::Snd(p) => match self.shape_of(p)? {
                Shape::Pair(_, b) => Some(*b),
                _ => None,
            },
            _ => None,
        }
    }
}

fn assemble(items: Vec<Item>) -> FolFormula {
    items.into_iter().rev().fold(None, |acc, item| {
        Some(match (item, acc) {
            (Item::Quant(x, s), acc) => FolFormula::Exists(x, s, acc.unwrap_or(FolFormula::Top).into()),
            (Item::Conj(c), None) => c,
            (Item::Conj(c), Some(rest)) => FolFormula::And(c.into(), rest.into()),
        })
    })
    .unwrap_or(FolFormula::Top)
}

impl FolFormula {
    pub fn and(l: FolFormula, r: FolFormula) -> FolFormula {
        FolFormula::And(l.into(), r.into())
    }

    pub fn pred<const N: usize>(name: &str, args: [FolTerm; N]) -> FolFormula {
        FolFormula::Pred(name.to_string(), args.to_vec())
    }

    /// Number of existential quantifiers.
    pub fn exists_count(&self) -> usize {
        match self {
            FolFormula::Top | FolFormula::Pred(..) => 0,
            FolFormula::And(l, r) => l.exists_count() + r.exists_count(),
            FolFormula::Not(b) | FolFormula::Forall(_, _, b) => b.exists_count(),
            FolFormula::Exists(_, _, b) => 1 + b.exists_count(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            FolFormula::Top => {}
            FolFormula::Pred(_, args) => {
                for a in args {
                    if let FolTerm::Var(v) = a {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            FolFormula::And(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            FolFormula::Not(b) => b.collect_free(bound, out),
            FolFormula::Exists(x, _, b) | FolFormula::Forall(x, _, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Bound variable names in order of binding.
    pub fn bound_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_binders(&mut |x| out.push(x.to_string()));
        out
    }

    fn visit_binders(&self, f: &mut dyn FnMut(&str)) {
        match self {
            FolFormula::Top | FolFormula::Pred(..) => {}
            FolFormula::And(l, r) => {
                l.visit_binders(f);
                r.visit_binders(f);
            }
            FolFormula::Not(b) => b.visit_binders(f),
            FolFormula::Exists(x, _, b) | FolFormula::Forall(x, _, b) => {
                f(x);
                b.visit_binders(f);
            }
        }
    }

    /// Renames free occurrences according to `map`.
    fn rename(&self, map: &BTreeMap<String, String>) -> FolFormula {
        match self {
            FolFormula::Top => FolFormula::Top,
            FolFormula::Pred(p, args) => FolFormula::Pred(
                p.clone(),
                args.iter()
                    .map(|a| match a {
                        FolTerm::Var(v) => FolTerm::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                        c => c.clone(),
                    })
                    .collect(),
            ),
            FolFormula::And(l, r) => FolFormula::and(l.rename(map), r.rename(map)),
            FolFormula::Not(b) => FolFormula::Not(b.rename(map).into()),
            FolFormula::Exists(x, s, b) | FolFormula::Forall(x, s, b) => {
                let mut inner = map.clone();
                inner.remove(x);
                let b = b.rename(&inner).into();
                if matches!(self, FolFormula::Exists(..)) {
                    FolFormula::Exists(x.clone(), *s, b)
                } else {
                    FolFormula::Forall(x.clone(), *s, b)
                }
            }
        }
    }

    /// Splits an ∃/∧ block into its quantifiers and its other conjuncts.
    /// Assumes bound names are distinct, which holds for translated and
    /// parsed formulas.
    fn block(&self) -> (Vec<(String, FolSort)>, Vec<FolFormula>) {
        let mut quants = Vec::new();
        let mut conjuncts = Vec::new();
        fn go(f: &FolFormula, q: &mut Vec<(String, FolSort)>, c: &mut Vec<FolFormula>) {
            match f {
                FolFormula::Top => {}
                FolFormula::And(l, r) => {
                    go(l, q, c);
                    go(r, q, c);
                }
                FolFormula::Exists(x, s, b) => {
                    q.push((x.clone(), *s));
                    go(b, q, c);
                }
                other => c.push(other.clone()),
            }
        }
        go(self, &mut quants, &mut conjuncts);
        (quants, conjuncts)
    }

    /// Prenex form of each ∃/∧ block with bound variables renamed to
    /// `e1, e2, … / x1, x2, …` and conjuncts sorted by predicate name and
    /// arguments. Bound variables are numbered by their first occurrence in
    /// the conjuncts ordered with bound names masked.
    pub fn canonical(&self) -> FolFormula {
        let mut counter = BTreeMap::new();
        self.canonical_with(&mut counter)
    }

    fn canonical_with(&self, counter: &mut BTreeMap<FolSort, usize>) -> FolFormula {
        let (quants, conjuncts) = self.block();
        let bound: BTreeMap<&str, FolSort> = quants.iter().map(|(x, s)| (x.as_str(), *s)).collect();
        let masked = |c: &FolFormula| {
            let map = bound.keys().map(|x| (x.to_string(), "?".to_string())).collect();
            c.rename(&map)
        };
        let mut ordered: Vec<&FolFormula> = conjuncts.iter().collect();
        ordered.sort_by_key(|c| masked(c));
        let mut renaming = BTreeMap::new();
        let mut order = Vec::new();
        let mut assign = |x: &str, renaming: &mut BTreeMap<String, String>, order: &mut Vec<(String, FolSort)>| {
            if let Some(&s) = bound.get(x) {
                if !renaming.contains_key(x) {
                    let n = counter.entry(s).or_insert(0);
                    *n += 1;
                    let name = format!("{}{}", s.default_name(), n);
                    renaming.insert(x.to_string(), name.clone());
                    order.push((name, s));
                }
            }
        };
        for c in &ordered {
            let mut vars = Vec::new();
            c.visit_vars(&mut |v| vars.push(v.to_string()));
            for v in vars {
                assign(&v, &mut renaming, &mut order);
            }
        }
        for (x, _) in &quants {
            assign(x, &mut renaming, &mut order);
        }
        let mut body: Vec<FolFormula> =
            conjuncts.iter().map(|c| c.rename(&renaming).canonical_inner(counter)).collect();
        body.sort();
        let conj = body.into_iter().rev().fold(None, |acc: Option<FolFormula>, c| {
            Some(match acc {
                None => c,
                Some(rest) => FolFormula::and(c, rest),
            })
        });
        order.into_iter().rev().fold(conj.unwrap_or(FolFormula::Top), |acc, (x, s)| FolFormula::Exists(x, s, acc.into()))
    }

    fn canonical_inner(&self, counter: &mut BTreeMap<FolSort, usize>) -> FolFormula {
        match self {
            FolFormula::Not(b) => FolFormula::Not(b.canonical_with(counter).into()),
            FolFormula::Forall(x, s, b) => {
                let n = counter.entry(*s).or_insert(0);
                *n += 1;
                let name = format!("{}{}", s.default_name(), n);
                let b = b.rename(&BTreeMap::from([(x.clone(), name.clone())]));
                FolFormula::Forall(name, *s, b.canonical_with(counter).into())
            }
            other => other.clone(),
        }
    }

    fn visit_vars(&self, f: &mut dyn FnMut(&str)) {
        match self {
            FolFormula::Top => {}
            FolFormula::Pred(_, args) => {
                for a in args {
                    if let FolTerm::Var(v) = a {
                        f(v);
                    }
                }
            }
            FolFormula::And(l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            FolFormula::Not(b) | FolFormula::Exists(_, _, b) | FolFormula::Forall(_, _, b) => b.visit_vars(f),
        }
    }

    /// Equality up to renaming of bound variables and reordering of
    /// conjuncts within a block, with quantifiers floated to the front of
    /// their block.
    pub fn equivalent(&self, other: &FolFormula) -> bool {
        block_equivalent(self, other, &BTreeMap::new())
    }
}

/// Compares two ∃/∧ blocks under a partial map from bound names of `a` to
/// bound names of `b`, searching bijections for the block's quantifiers.
fn block_equivalent(a: &FolFormula, b: &FolFormula, outer: &BTreeMap<String, String>) -> bool {
    let (qa, ca) = a.block();
    let (qb, cb) = b.block();
    if qa.len() != qb.len() || ca.len() != cb.len() {
        return false;
    }
    let mut sa: Vec<FolSort> = qa.iter().map(|q| q.1).collect();
    let mut sb: Vec<FolSort> = qb.iter().map(|q| q.1).collect();
    sa.sort();
    sb.sort();
    if sa != sb {
        return false;
    }
    let mut map = outer.clone();
    let mut taken = vec![false; qb.len()];
    assign_bound(&qa, &qb, 0, &mut map, &mut taken, &ca, &cb)
}

fn assign_bound(
    qa: &[(String, FolSort)],
    qb: &[(String, FolSort)],
    i: usize,
    map: &mut BTreeMap<String, String>,
    taken: &mut [bool],
    ca: &[FolFormula],
    cb: &[FolFormula],
) -> bool {
    if i == qa.len() {
        return conjuncts_match(ca, cb, map);
    }
    for j in 0..qb.len() {
        if taken[j] || qb[j].1 != qa[i].1 {
            continue;
        }
        taken[j] = true;
        map.insert(qa[i].0.clone(), qb[j].0.clone());
        if assign_bound(qa, qb, i + 1, map, taken, ca, cb) {
            return true;
        }
        map.remove(&qa[i].0);
        taken[j] = false;
    }
    false
}

fn conjuncts_match(ca: &[FolFormula], cb: &[FolFormula], map: &BTreeMap<String, String>) -> bool {
    let mut used = vec![false; cb.len()];
    'outer: for c in ca {
        for (j, d) in cb.iter().enumerate() {
            if !used[j] && atom_equivalent(c, d, map) {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn atom_equivalent(a: &FolFormula, b: &FolFormula, map: &BTreeMap<String, String>) -> bool {
    match (a, b) {
        (FolFormula::Pred(p, xs), FolFormula::Pred(q, ys)) => {
            p == q
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| match (x, y) {
                    (FolTerm::Var(x), FolTerm::Var(y)) => map.get(x).unwrap_or(x) == y,
                    (FolTerm::Const(x), FolTerm::Const(y)) => x == y,
                    _ => false,
                })
        }
        (FolFormula::Not(x), FolFormula::Not(y)) => block_equivalent(x, y, map),
        (FolFormula::Forall(x, s, bx), FolFormula::Forall(y, t, by)) if s == t => {
            let mut inner = map.clone();
            inner.insert(x.clone(), y.clone());
            block_equivalent(bx, by, &inner)
        }
        _ => false,
    }
}

impl fmt::Display for FolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atomic(f: &FolFormula) -> bool {
            matches!(f, FolFormula::Top | FolFormula::Pred(..) | FolFormula::Not(_))
        }
        match self {
            FolFormula::Top => f.write_str("true"),
            FolFormula::Pred(p, args) => {
                write!(f, "{p}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            FolFormula::And(l, r) => {
                if atomic(l) || matches!(**l, FolFormula::And(..)) {
                    write!(f, "{l} ∧ {r}")
                } else {
                    write!(f, "({l}) ∧ {r}")
                }
            }
            FolFormula::Not(b) => {
                if atomic(b) {
                    write!(f, "¬{b}")
                } else {
                    write!(f, "¬({b})")
                }
            }
            FolFormula::Exists(x, _, b) if **b == FolFormula::Top => write!(f, "∃{x}"),
            FolFormula::Exists(x, _, b) => write!(f, "∃{x}. {b}"),
            FolFormula::Forall(x, _, b) => write!(f, "∀{x}. {b}"),
        }
    }
}

/// Parses the printed notation: `∃x. A`, `∀x. A`, `A ∧ B`, `¬A`, `p(a, b)`,
/// `true` and parentheses. `exists`, `forall`, `&` and `~` are accepted as
/// ASCII spellings. A binder may carry a sort as `∃x:entity.`; without one,
/// names starting with `e` are events and all others entities. In predicate
/// arguments, names bound by an enclosing quantifier are variables and all
/// others constants.
pub fn parse_fol(src: &str) -> Result<FolFormula, FolError> {
    let mut p = FolParser { src, pos: 0, bound: Vec::new() };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

struct FolParser<'a> {
    src: &'a str,
    pos: usize,
    bound: Vec<String>,
}

impl FolParser<'_> {
    fn error(&self, message: &str) -> FolError {
        FolError::Parse { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, tokens: &[&str]) -> bool {
        self.skip_ws();
        for t in tokens {
            if self.src[self.pos..].starts_with(t) {
                self.pos += t.len();
                return true;
            }
        }
        false
    }

    fn ident(&mut self) -> Result<String, FolError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_alphanumeric() || matches!(c, '_' | '\'' | '-')))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.error("expected a name"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn formula(&mut self) -> Result<FolFormula, FolError> {
        let left = self.unary()?;
        if self.eat(&["∧", "&"]) {
            let right = self.formula()?;
            return Ok(FolFormula::and(left, right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<FolFormula, FolError> {
        if self.eat(&["¬", "~"]) {
            return Ok(FolFormula::Not(self.unary()?.into()));
        }
        let exists = self.eat(&["∃", "exists "]);
        if exists || self.eat(&["∀", "forall "]) {
            let x = self.ident()?;
            let sort = if self.eat(&[":"]) {
                match self.ident()?.as_str() {
                    EVENT => FolSort::Event,
                    ENTITY => FolSort::Entity,
                    _ => return Err(self.error("unknown sort")),
                }
            } else if x.starts_with('e') {
                FolSort::Event
            } else {
                FolSort::Entity
            };
            self.bound.push(x.clone());
            let body = if self.eat(&["."]) { self.formula()? } else { FolFormula::Top };
            self.bound.pop();
            return Ok(if exists {
                FolFormula::Exists(x, sort, body.into())
            } else {
                FolFormula::Forall(x, sort, body.into())
            });
        }
        if self.eat(&["("]) {
            let f = self.formula()?;
            if !self.eat(&[")"]) {
                return Err(self.error("expected `)`"));
            }
            return Ok(f);
        }
        let name = self.ident()?;
        if name == "true" {
            return Ok(FolFormula::Top);
        }
        let mut args = Vec::new();
        if self.eat(&["("]) {
            loop {
                let a = self.ident()?;
                args.push(if self.bound.contains(&a) { FolTerm::Var(a) } else { FolTerm::Const(a) });
                if self.eat(&[")"]) {
                    break;
                }
                if !self.eat(&[","]) {
                    return Err(self.error("expected `,` or `)`"));
                }
            }
        }
        Ok(FolFormula::Pred(name, args))
    }
}
