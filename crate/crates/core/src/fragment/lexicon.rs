//! Plain-text lexicon tables.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::signature::{GlobalSignature, ENTITY, EVENT};
use crate::term::Term;

use super::FragmentError;

const DEFAULT: &str = include_str!("../../lexicon/default.lex");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    Name,
    Definite,
    Noun,
    Verb,
    Adverb,
    Preposition,
    Temporal,
    Adjective,
}

impl FromStr for Category {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "name" => Category::Name,
            "definite" => Category::Definite,
            "noun" => Category::Noun,
            "verb" => Category::Verb,
            "adverb" => Category::Adverb,
            "preposition" => Category::Preposition,
            "temporal" => Category::Temporal,
            "adjective" => Category::Adjective,
            _ => return Err(()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub category: Category,
    pub constant: String,
    pub attribute: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Entry>,
    /// Longest multiword surface, in words.
    max_words: usize,
}

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn default_lexicon() -> Lexicon {
        Lexicon::parse(DEFAULT).expect("bundled lexicon is valid")
    }

    pub fn parse(src: &str) -> Result<Lexicon, FragmentError> {
        let mut lex = Lexicon::default();
        for (n, line) in src.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| FragmentError::Lexicon { line: n + 1, message: msg.to_string() };
            if !(3..=4).contains(&fields.len()) {
                return Err(bad("expected SURFACE CATEGORY CONSTANT [ATTRIBUTE]"));
            }
            let category: Category =
                fields[1].parse().map_err(|_| bad(&format!("unknown category `{}`", fields[1])))?;
            if crate::sexpr::is_reserved(fields[2]) {
                return Err(bad(&format!("`{}` is reserved in the term format", fields[2])));
            }
            let attribute = fields.get(3).map(|s| s.to_string());
            match (category, attribute.as_deref()) {
                (Category::Verb, Some("intrans" | "trans") | None)
                | (Category::Name, Some("male" | "female" | "place") | None)
                | (Category::Temporal, Some(_)) => {}
                (Category::Temporal, None) => return Err(bad("temporal entries need a relation")),
                (Category::Verb | Category::Name, Some(a)) => return Err(bad(&format!("bad attribute `{a}`"))),
                (_, Some(a)) => return Err(bad(&format!("unexpected attribute `{a}`"))),
                (_, None) => {}
            }
            lex.insert(fields[0], Entry { category, constant: fields[2].to_string(), attribute });
        }
        Ok(lex)
    }

    pub fn insert(&mut self, surface: &str, entry: Entry) {
        let surface = surface.to_lowercase();
        self.max_words = self.max_words.max(surface.split('_').count());
        self.entries.insert(surface, entry);
    }

    pub fn get(&self, surface: &str) -> Option<&Entry> {
        self.entries.get(surface)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn max_words(&self) -> usize {
        self.max_words.max(1)
    }

    /// The base signature extended with every constant of the lexicon, the
    /// gender predicates, and a proof constant `gender-n : gender(n)` for
    /// each gendered name `n`. Place names bring the relation `in`.
    pub fn signature(&self) -> GlobalSignature {
        let mut sig = GlobalSignature::base();
        let entity = Term::cnst(ENTITY);
        let event = Term::cnst(EVENT);
        let ev_prop = Term::arrow(event.clone(), Term::ty());
        let ent_prop = Term::arrow(entity.clone(), Term::ty());
        let relation = Term::arrow(event, Term::arrow(entity.clone(), Term::ty()));
        for entry in self.entries.values() {
            let c = entry.constant.as_str();
            match entry.category {
                Category::Name | Category::Definite => {
                    sig.declare(c, entity.clone());
                    match entry.attribute.as_deref() {
                        Some(g @ ("male" | "female")) => {
                            sig.declare(g, ent_prop.clone());
                            sig.declare(gender_proof(g, c), Term::pred(g, [Term::cnst(c)]));
                        }
                        Some("place") => sig.declare("in", relation.clone()),
                        _ => {}
                    }
                }
                Category::Noun => sig.declare(c, ent_prop.clone()),
                Category::Verb | Category::Adverb | Category::Adjective => sig.declare(c, ev_prop.clone()),
                Category::Preposition => sig.declare(c, relation.clone()),
                Category::Temporal => {
                    sig.declare(c, entity.clone());
                    if let Some(rel) = &entry.attribute {
                        sig.declare(rel.as_str(), relation.clone());
                    }
                }
            }
        }
        sig.declare("female", ent_prop.clone());
        sig.declare("male", ent_prop);
        sig
    }
}

/// Name of the signature constant proving `gender(name)`.
pub fn gender_proof(gender: &str, name: &str) -> String {
    format!("{gender}-{name}")
}
