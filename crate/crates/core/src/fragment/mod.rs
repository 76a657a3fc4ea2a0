//! A controlled English fragment and its interpretation.
//!
//! Discourse files are UTF-8 text with one sentence per line; `#` starts a
//! comment. Several sentences on one line are also accepted when each ends
//! with `.`, `!` or `?`.

mod interpret;
mod lexicon;
mod parse;

use thiserror::Error;

pub use interpret::{interpret_sentence, merge, reassociate, sequence_discourse, DynamicProp};
pub use lexicon::{gender_proof, Category, Entry, Lexicon};
pub use parse::{parse_sentence, tokenize, AnaphorFilter, EntityRef, Modifier, Predicate, SentenceTree};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("unsupported construction: {0}")]
    UnsupportedConstruction(String),
    #[error("empty sentence")]
    Empty,
    #[error("discourse has no sentences")]
    EmptyDiscourse,
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("line {line}: {error}")]
    AtLine { line: usize, error: Box<FragmentError> },
}

/// One sentence of a discourse with its source line.
#[derive(Clone, Debug, PartialEq)]
pub struct Sentence {
    pub line: usize,
    pub text: String,
    pub tree: SentenceTree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Discourse {
    pub sentences: Vec<Sentence>,
    pub prop: DynamicProp,
}

/// Splits discourse text into `(line, sentence)` pairs.
pub fn split_sentences(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut cur = String::new();
        for ch in line.chars() {
            cur.push(ch);
            if matches!(ch, '.' | '!' | '?') {
                if !cur.trim().trim_end_matches(['.', '!', '?']).trim().is_empty() {
                    out.push((n + 1, cur.trim().to_string()));
                }
                cur.clear();
            }
        }
        if !cur.trim().is_empty() {
            out.push((n + 1, cur.trim().to_string()));
        }
    }
    out
}

/// Parses, interprets and sequences a whole discourse.
pub fn interpret_discourse(lex: &Lexicon, text: &str) -> Result<Discourse, FragmentError> {
    let mut sentences = Vec::new();
    let mut props = Vec::new();
    for (line, s) in split_sentences(text) {
        let at = |error| FragmentError::AtLine { line, error: Box::new(error) };
        let tree = parse_sentence(lex, &s).map_err(at)?;
        props.push(interpret_sentence(lex, &tree).map_err(at)?);
        sentences.push(Sentence { line, text: s, tree });
    }
    let prop = sequence_discourse(&props)?;
    Ok(Discourse { sentences, prop })
}
