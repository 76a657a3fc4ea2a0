//! Parser for the controlled fragment.
//!
//! Input is lowercased, punctuation is dropped, and word sequences listed in
//! the lexicon with `_` are merged into one token. The grammar:
//!
//! ```text
//! S       := "but"? CLAUSE
//! CLAUSE  := "so" ("does" | "did") NP                   anaphor, active
//!          | "so" ("is" | "was") NP                     anaphor, passive
//!          | "what" "happened" "in" NP ("is" | "was") ADJ
//!          | NP ("did" | "does") "too"                  anaphor, active
//!          | NP VERB "too"                              anaphor filtered by VERB
//!          | NP ("is" | "was") VERB ("by" NP)? MOD*     passive
//!          | NP ADV* VERB OBJ? MOD* ("before" NP ("did" | "does"))?
//! NP      := NAME | DEFINITE | ("a" | "an") NOUN | PRONOUN
//! OBJ     := NP | REFLEXIVE | ("his" | "her" | "its") NOUN | "this"
//! MOD     := ADV | PREP NP | TEMPORAL
//! ```
//!
//! Negation ("did not") is rejected as unsupported.

use serde::{Deserialize, Serialize};

use crate::anaphora::Voice;

use super::lexicon::{Category, Lexicon};
use super::FragmentError;

/// A noun phrase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntityRef {
    /// A proper name or definite description.
    Constant { constant: String, gender: Option<String>, place: bool },
    Indefinite { noun: String },
    /// "his hat": owned by the subject of the clause.
    Possessive { noun: String },
    Reflexive { gender: Option<String> },
    Pronoun { gender: Option<String> },
    /// "this": an earlier event.
    Demonstrative,
    /// The subject of "what happened in X".
    Event,
    /// The missing agent of an agentless passive.
    Unexpressed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Modifier {
    Adverb { constant: String },
    /// `relation(e, argument)`, from a prepositional or temporal phrase.
    Relation { relation: String, argument: EntityRef },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Predicate {
    Verb { constant: String, transitive: bool },
    /// An elided verb phrase.
    Anaphor,
    Adjective { constant: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnaphorFilter {
    /// "Mary ate too": the antecedent must be an event of this kind.
    Verb { constant: String },
    /// "What happened in X": the antecedent must be located in X.
    Place { constant: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceTree {
    pub subject: EntityRef,
    pub predicate: Predicate,
    pub object: Option<EntityRef>,
    /// Pre-verbal adverbs first, then post-verbal modifiers in order.
    pub modifiers: Vec<Modifier>,
    pub voice: Voice,
    pub anaphoric: bool,
    pub anaphor_filter: Option<AnaphorFilter>,
    /// Subject of a trailing "before X did".
    pub before: Option<EntityRef>,
}

impl SentenceTree {
    fn anaphor(subject: EntityRef, voice: Voice, filter: Option<AnaphorFilter>) -> SentenceTree {
        SentenceTree {
            subject,
            predicate: Predicate::Anaphor,
            object: None,
            modifiers: Vec::new(),
            voice,
            anaphoric: true,
            anaphor_filter: filter,
            before: None,
        }
    }
}

/// Lowercases, strips punctuation and merges multiword lexicon entries.
pub fn tokenize(lex: &Lexicon, text: &str) -> Vec<String> {
    let cleaned: String = text
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '\'' || c == '-' || c == '_' { c } else { ' ' })
        .collect();
    let words: Vec<&str> = cleaned.split_whitespace().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let longest = (2..=lex.max_words().min(words.len() - i))
            .rev()
            .map(|k| (k, words[i..i + k].join("_")))
            .find(|(_, w)| lex.get(w).is_some());
        match longest {
            Some((k, w)) => {
                out.push(w);
                i += k;
            }
            None => {
                out.push(words[i].to_string());
                i += 1;
            }
        }
    }
    out
}

pub fn parse_sentence(lex: &Lexicon, text: &str) -> Result<SentenceTree, FragmentError> {
    let mut tokens = tokenize(lex, text);
    if tokens.first().map(String::as_str) == Some("but") {
        tokens.remove(0);
    }
    if tokens.is_empty() {
        return Err(FragmentError::Empty);
    }
    Parser { lex, tokens, pos: 0 }.sentence()
}

struct Parser<'a> {
    lex: &'a Lexicon,
    tokens: Vec<String>,
    pos: usize,
}

fn unsupported(what: &str) -> FragmentError {
    FragmentError::UnsupportedConstruction(what.to_string())
}

fn pronoun_gender(word: &str) -> Option<Option<String>> {
    match word {
        "he" | "him" | "himself" | "his" => Some(Some("male".into())),
        "she" | "her" | "herself" => Some(Some("female".into())),
        "it" | "itself" | "its" => Some(None),
        _ => None,
    }
}

impl Parser<'_> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn peek_at(&self, k: usize) -> Option<&str> {
        self.tokens.get(self.pos + k).map(String::as_str)
    }

    fn next(&mut self) -> Option<String> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, words: &[&str]) -> bool {
        match self.peek() {
            Some(w) if words.contains(&w) => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn expect(&mut self, words: &[&str]) -> Result<(), FragmentError> {
        if self.eat(words) {
            Ok(())
        } else {
            Err(self.unexpected(&words.join("|")))
        }
    }

    fn unexpected(&self, wanted: &str) -> FragmentError {
        match self.peek() {
            Some(w) if self.lex.get(w).is_none() && !is_function_word(w) => FragmentError::UnknownWord(w.to_string()),
            Some(w) => unsupported(&format!("expected {wanted}, found `{w}`")),
            None => unsupported(&format!("expected {wanted} at end of sentence")),
        }
    }

    fn category(&self, k: usize) -> Option<Category> {
        self.peek_at(k).and_then(|w| self.lex.get(w)).map(|e| e.category)
    }

    fn finish(&self) -> Result<(), FragmentError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of sentence")),
        }
    }

    fn sentence(&mut self) -> Result<SentenceTree, FragmentError> {
        if self.eat(&["so"]) {
            let voice = match self.next().as_deref() {
                Some("does" | "did" | "do") => Voice::Active,
                Some("is" | "was") => Voice::Passive,
                _ => return Err(unsupported("`so` must be followed by does/did/is/was")),
            };
            let subject = self.noun_phrase()?;
            self.finish()?;
            return Ok(SentenceTree::anaphor(subject, voice, None));
        }
        if self.peek() == Some("what") {
            self.pos += 1;
            self.expect(&["happened"])?;
            self.expect(&["in"])?;
            let place = match self.noun_phrase()? {
                EntityRef::Constant { constant, .. } => constant,
                _ => return Err(unsupported("`what happened in` needs a name")),
            };
            self.expect(&["is", "was"])?;
            let adj = self.word_of(Category::Adjective)?;
            self.finish()?;
            let mut tree = SentenceTree::anaphor(
                EntityRef::Event,
                Voice::Active,
                Some(AnaphorFilter::Place { constant: place }),
            );
            tree.predicate = Predicate::Adjective { constant: adj };
            return Ok(tree);
        }

        let subject = self.noun_phrase()?;
        if matches!(self.peek(), Some("did" | "does" | "do")) {
            self.pos += 1;
            if self.eat(&["not"]) {
                return Err(unsupported("negation"));
            }
            self.expect(&["too"])?;
            self.finish()?;
            return Ok(SentenceTree::anaphor(subject, Voice::Active, None));
        }
        if matches!(self.peek(), Some("is" | "was")) {
            self.pos += 1;
            if self.eat(&["not"]) {
                return Err(unsupported("negation"));
            }
            let verb = self.word_of(Category::Verb)?;
            let agent = if self.eat(&["by"]) { Some(self.noun_phrase()?) } else { None };
            let modifiers = self.modifiers()?;
            self.finish()?;
            return Ok(SentenceTree {
                subject: agent.unwrap_or(EntityRef::Unexpressed),
                predicate: Predicate::Verb { constant: verb, transitive: true },
                object: Some(subject),
                modifiers,
                voice: Voice::Passive,
                anaphoric: false,
                anaphor_filter: None,
                before: None,
            });
        }

        let mut modifiers = Vec::new();
        while self.category(0) == Some(Category::Adverb) {
            let constant = self.next().and_then(|w| self.lex.get(&w).map(|e| e.constant.clone())).unwrap();
            modifiers.push(Modifier::Adverb { constant });
        }
        let surface = self.peek().map(str::to_string);
        let verb = self.word_of(Category::Verb)?;
        let transitive = surface.as_deref().and_then(|w| self.lex.get(w)).and_then(|e| e.attribute.as_deref())
            != Some("intrans");
        if self.peek() == Some("too") && modifiers.is_empty() {
            self.pos += 1;
            self.finish()?;
            return Ok(SentenceTree::anaphor(
                subject,
                Voice::Active,
                Some(AnaphorFilter::Verb { constant: verb }),
            ));
        }
        let object = if transitive && self.starts_object() { Some(self.object()?) } else { None };
        modifiers.extend(self.modifiers()?);
        let before = if self.eat(&["before"]) {
            let who = self.noun_phrase()?;
            self.expect(&["did", "does"])?;
            Some(who)
        } else {
            None
        };
        self.finish()?;
        Ok(SentenceTree {
            subject,
            predicate: Predicate::Verb { constant: verb, transitive },
            object,
            modifiers,
            voice: Voice::Active,
            anaphoric: false,
            anaphor_filter: None,
            before,
        })
    }

    fn word_of(&mut self, cat: Category) -> Result<String, FragmentError> {
        match self.peek().and_then(|w| self.lex.get(w)) {
            Some(e) if e.category == cat => {
                let c = e.constant.clone();
                self.pos += 1;
                Ok(c)
            }
            _ => Err(self.unexpected(&format!("{cat:?}").to_lowercase())),
        }
    }

    fn starts_object(&self) -> bool {
        match self.peek() {
            Some("a" | "an" | "this" | "himself" | "herself" | "itself" | "his" | "her" | "its" | "him" | "it") => true,
            Some(_) => matches!(self.category(0), Some(Category::Name | Category::Definite)),
            None => false,
        }
    }

    fn noun_phrase(&mut self) -> Result<EntityRef, FragmentError> {
        let Some(word) = self.peek().map(str::to_string) else {
            return Err(self.unexpected("a noun phrase"));
        };
        if word == "a" || word == "an" {
            self.pos += 1;
            let noun = self.word_of(Category::Noun)?;
            return Ok(EntityRef::Indefinite { noun });
        }
        if matches!(word.as_str(), "he" | "she" | "him" | "her" | "it") {
            self.pos += 1;
            return Ok(EntityRef::Pronoun { gender: pronoun_gender(&word).flatten() });
        }
        match self.lex.get(&word) {
            Some(e) if matches!(e.category, Category::Name | Category::Definite) => {
                self.pos += 1;
                let attr = e.attribute.as_deref();
                Ok(EntityRef::Constant {
                    constant: e.constant.clone(),
                    gender: attr.filter(|a| *a == "male" || *a == "female").map(str::to_string),
                    place: attr == Some("place"),
                })
            }
            _ => Err(self.unexpected("a noun phrase")),
        }
    }

    fn object(&mut self) -> Result<EntityRef, FragmentError> {
        let word = self.peek().unwrap_or_default().to_string();
        match word.as_str() {
            "this" => {
                self.pos += 1;
                Ok(EntityRef::Demonstrative)
            }
            "himself" | "herself" | "itself" => {
                self.pos += 1;
                Ok(EntityRef::Reflexive { gender: pronoun_gender(&word).flatten() })
            }
            "his" | "her" | "its" if self.category(1) == Some(Category::Noun) => {
                self.pos += 1;
                let noun = self.word_of(Category::Noun)?;
                Ok(EntityRef::Possessive { noun })
            }
            _ => self.noun_phrase(),
        }
    }

    fn modifiers(&mut self) -> Result<Vec<Modifier>, FragmentError> {
        let mut out = Vec::new();
        while let Some(entry) = self.peek().and_then(|w| self.lex.get(w)).cloned() {
            match entry.category {
                Category::Adverb => {
                    self.pos += 1;
                    out.push(Modifier::Adverb { constant: entry.constant });
                }
                Category::Preposition => {
                    self.pos += 1;
                    let argument = self.noun_phrase()?;
                    out.push(Modifier::Relation { relation: entry.constant, argument });
                }
                Category::Temporal => {
                    self.pos += 1;
                    out.push(Modifier::Relation {
                        relation: entry.attribute.unwrap_or_default(),
                        argument: EntityRef::Constant { constant: entry.constant, gender: None, place: false },
                    });
                }
                _ => break,
            }
        }
        Ok(out)
    }
}

fn is_function_word(w: &str) -> bool {
    matches!(
        w,
        "so" | "does"
            | "did"
            | "do"
            | "is"
            | "was"
            | "too"
            | "what"
            | "happened"
            | "a"
            | "an"
            | "by"
            | "before"
            | "not"
            | "this"
            | "but"
    ) || pronoun_gender(w).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> SentenceTree {
        parse_sentence(&Lexicon::default_lexicon(), s).unwrap()
    }

    fn name(c: &str) -> EntityRef {
        let lex = Lexicon::default_lexicon();
        let (_, e) = lex.entries().find(|(_, e)| e.constant == c).unwrap();
        let attr = e.attribute.as_deref();
        EntityRef::Constant {
            constant: c.into(),
            gender: attr.filter(|a| *a == "male" || *a == "female").map(str::to_string),
            place: attr == Some("place"),
        }
    }

    #[test]
    fn john_left() {
        let t = parse("John left.");
        assert_eq!(t.subject, name("j"));
        assert_eq!(t.predicate, Predicate::Verb { constant: "left".into(), transitive: false });
        assert_eq!(t.voice, Voice::Active);
        assert!(!t.anaphoric);
    }

    #[test]
    fn did_too_and_so_does_agree() {
        let a = parse("Mary did too.");
        assert!(a.anaphoric);
        assert_eq!(a.subject, name("m"));
        assert_eq!(a, parse("So does Mary."));
        assert_eq!(parse("Mary does too."), a);
    }

    #[test]
    fn so_is_is_passive() {
        let t = parse("So is Ann.");
        assert!(t.anaphoric);
        assert_eq!(t.subject, name("a"));
        assert_eq!(t.voice, Voice::Passive);
    }

    #[test]
    fn passive_with_agent() {
        let t = parse("Mary is loved by John.");
        assert_eq!(t.subject, name("j"));
        assert_eq!(t.object, Some(name("m")));
        assert_eq!(t.voice, Voice::Passive);
    }

    #[test]
    fn modifiers_in_order() {
        let t = parse("John quietly ate the cake last night.");
        assert_eq!(t.object, Some(name("c")));
        assert_eq!(
            t.modifiers,
            vec![
                Modifier::Adverb { constant: "quietly".into() },
                Modifier::Relation { relation: "at".into(), argument: name("ln") }
            ]
        );
    }

    #[test]
    fn errors() {
        let lex = Lexicon::default_lexicon();
        assert_eq!(parse_sentence(&lex, "Zork left."), Err(FragmentError::UnknownWord("zork".into())));
        assert!(matches!(
            parse_sentence(&lex, "But Mary did not believe this."),
            Err(FragmentError::UnsupportedConstruction(_))
        ));
        assert_eq!(parse_sentence(&lex, " . "), Err(FragmentError::Empty));
    }

    #[test]
    fn deterministic() {
        let s = "John likes his hat.";
        assert_eq!(parse(s), parse(s));
        assert_eq!(parse(s).object, Some(EntityRef::Possessive { noun: "hat".into() }));
    }
}
