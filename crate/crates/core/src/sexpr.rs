//! Textual term format.
//!
//! ```text
//! term ::= IDENT                      bound variable or constant
//!        | ?IDENT                     free variable
//!        | type | kind | unit | tt
//!        | (pi (IDENT term) term)     dependent function
//!        | (sigma (IDENT term) term)  dependent pair type
//!        | (-> term term ...)         non-dependent function, right-nested
//!        | (times term term ...)      non-dependent pair type, right-nested
//!        | (lambda (IDENT ...) term)
//!        | (pair term term)
//!        | (fst term) | (snd term)
//!        | (@ NAT term)               @-operator with its ascription
//!        | (term term ...)            application, left-nested
//! ```
//!
//! `;` starts a comment running to the end of the line. An identifier that is
//! not bound by an enclosing binder is a constant. `print` then `parse` gives
//! back an alpha-equivalent term.

use std::sync::Arc;

use thiserror::Error;

use crate::term::{Binder, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "pi", "sigma", "->", "times", "lambda", "pair", "fst", "snd", "@", "type", "kind", "unit", "tt",
];

/// Whether `name` cannot be written as a constant in the textual format.
pub fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name) || name == "_" || name.is_empty() || !name.chars().all(is_ident_char)
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '.' | '%' | '@' | '>' | '*' | '+' | '<' | '=' | '/' | '!')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' | '[' => {
                chars.next();
                col += 1;
                out.push(Spanned { tok: Tok::Open, line: l, column: k });
            }
            ')' | ']' => {
                chars.next();
                col += 1;
                out.push(Spanned { tok: Tok::Close, line: l, column: k });
            }
            c if c == '?' || is_ident_char(c) => {
                let mut s = String::new();
                s.push(c);
                chars.next();
                col += 1;
                while let Some(&c) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                out.push(Spanned { tok: Tok::Atom(s), line: l, column: k });
            }
            other => {
                return Err(ParseError { line: l, column: k, message: format!("unexpected character {other:?}") })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    scope: Vec<String>,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self
            .toks
            .get(self.pos)
            .or(self.toks.last())
            .map(|s| (s.line, s.column))
            .unwrap_or((1, 1));
        Err(ParseError { line, column, message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_open(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Tok::Open) => Ok(()),
            _ => {
                self.pos -= 1;
                self.err("expected '('")
            }
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Tok::Close) => Ok(()),
            _ => {
                self.pos -= 1;
                self.err("expected ')'")
            }
        }
    }

    fn binder_name(&mut self) -> Result<String, ParseError> {
        match self.next() {
            Some(Tok::Atom(a)) if !a.starts_with('?') && !KEYWORDS.contains(&a.as_str()) => Ok(a),
            _ => {
                self.pos -= 1;
                self.err("expected a binder name")
            }
        }
    }

    fn atom(&mut self, a: &str) -> Result<Term, ParseError> {
        Ok(match a {
            "type" => Term::Sort(Sort::Type),
            "kind" => Term::Sort(Sort::Kind),
            "unit" => Term::Unit,
            "tt" => Term::Star,
            "_" => return self.err("'_' cannot be referenced"),
            _ if KEYWORDS.contains(&a) => return self.err(format!("keyword '{a}' used as a term")),
            _ if a.starts_with('?') => {
                if a.len() == 1 {
                    return self.err("empty free variable name");
                }
                Term::Var(a[1..].to_string())
            }
            _ => match self.scope.iter().rev().position(|n| n == a) {
                Some(i) => Term::Bound(i),
                None => Term::Const(a.to_string()),
            },
        })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Atom(a)) => {
                self.pos -= 1;
                let r = self.atom(&a);
                self.pos += 1;
                r
            }
            Some(Tok::Open) => {
                let head = match self.peek() {
                    Some(Tok::Atom(a)) => Some(a.clone()),
                    _ => None,
                };
                let t = match head.as_deref() {
                    Some("pi") | Some("sigma") => {
                        let is_pi = head.as_deref() == Some("pi");
                        self.pos += 1;
                        self.expect_open()?;
                        let x = self.binder_name()?;
                        let dom = self.term()?;
                        self.expect_close()?;
                        self.scope.push(x.clone());
                        let body = self.term();
                        self.scope.pop();
                        let body = body?;
                        if is_pi {
                            Term::Pi(Binder(x), Arc::new(dom), Arc::new(body))
                        } else {
                            Term::Sigma(Binder(x), Arc::new(dom), Arc::new(body))
                        }
                    }
                    Some("->") | Some("times") => {
                        let is_arrow = head.as_deref() == Some("->");
                        self.pos += 1;
                        // each operand sits under the anonymous binders of the ones before it
                        let mut parts = Vec::new();
                        let depth = self.scope.len();
                        let mut failed = None;
                        while !matches!(self.peek(), Some(Tok::Close) | None) {
                            if !parts.is_empty() {
                                self.scope.push("_".to_string());
                            }
                            match self.term() {
                                Ok(t) => parts.push(t),
                                Err(e) => {
                                    failed = Some(e);
                                    break;
                                }
                            }
                        }
                        self.scope.truncate(depth);
                        if let Some(e) = failed {
                            return Err(e);
                        }
                        if parts.is_empty() {
                            if is_arrow {
                                return self.err("'->' needs at least one operand");
                            }
                            Term::Unit
                        } else {
                            let mut it = parts.into_iter().rev();
                            let last = it.next().expect("non-empty");
                            it.fold(last, |acc, p| {
                                if is_arrow {
                                    Term::Pi(Binder::anonymous(), Arc::new(p), Arc::new(acc))
                                } else {
                                    Term::Sigma(Binder::anonymous(), Arc::new(p), Arc::new(acc))
                                }
                            })
                        }
                    }
                    Some("lambda") => {
                        self.pos += 1;
                        self.expect_open()?;
                        let mut names = Vec::new();
                        while let Some(Tok::Atom(_)) = self.peek() {
                            names.push(self.binder_name()?);
                        }
                        self.expect_close()?;
                        if names.is_empty() {
                            return self.err("lambda needs at least one binder");
                        }
                        let n = names.len();
                        self.scope.extend(names.iter().cloned());
                        let body = self.term();
                        self.scope.truncate(self.scope.len() - n);
                        let body = body?;
                        names
                            .into_iter()
                            .rev()
                            .fold(body, |acc, x| Term::Lam(Binder(x), Arc::new(acc)))
                    }
                    Some("pair") => {
                        self.pos += 1;
                        let a = self.term()?;
                        let b = self.term()?;
                        Term::pair(a, b)
                    }
                    Some("fst") => {
                        self.pos += 1;
                        Term::fst(self.term()?)
                    }
                    Some("snd") => {
                        self.pos += 1;
                        Term::snd(self.term()?)
                    }
                    Some("@") => {
                        self.pos += 1;
                        let index = match self.next() {
                            Some(Tok::Atom(a)) => match a.parse::<usize>() {
                                Ok(i) => i,
                                Err(_) => {
                                    self.pos -= 1;
                                    return self.err("expected an @-operator index");
                                }
                            },
                            _ => {
                                self.pos -= 1;
                                return self.err("expected an @-operator index");
                            }
                        };
                        Term::at_op(index, self.term()?)
                    }
                    _ => {
                        let parts = self.terms_until_close()?;
                        let mut it = parts.into_iter();
                        let Some(f) = it.next() else {
                            return self.err("empty application");
                        };
                        let t = Term::apps(f, it);
                        return Ok(t);
                    }
                };
                self.expect_close()?;
                Ok(t)
            }
            Some(Tok::Close) => {
                self.pos -= 1;
                self.err("unexpected ')'")
            }
            None => self.err("unexpected end of input"),
        }
    }

    /// Parses terms up to and including the closing parenthesis.
    fn terms_until_close(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut parts = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Close) => {
                    self.pos += 1;
                    return Ok(parts);
                }
                None => return self.err("unclosed '('"),
                _ => parts.push(self.term()?),
            }
        }
    }
}

/// Parses a single term.
pub fn parse(src: &str) -> Result<Term, ParseError> {
    let mut all = parse_many(src)?;
    match all.len() {
        1 => Ok(all.pop().expect("one term")),
        0 => Err(ParseError { line: 1, column: 1, message: "empty input".into() }),
        _ => Err(ParseError { line: 1, column: 1, message: "expected exactly one term".into() }),
    }
}

/// Parses a sequence of top-level terms.
pub fn parse_many(src: &str) -> Result<Vec<Term>, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, scope: Vec::new() };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.term()?);
    }
    Ok(out)
}

/// Parses a term, treating the listed names as free variables rather than
/// constants. Convenient for writing open terms without `?`.
pub fn parse_with_vars(src: &str, vars: &[&str]) -> Result<Term, ParseError> {
    let t = parse(src)?;
    Ok(vars.iter().fold(t, |t, v| t.replace(&Term::cnst(*v), &Term::var(*v))))
}

/// Prints a term in the textual format.
pub fn print(t: &Term) -> String {
    let mut out = String::new();
    let mut scope = Vec::new();
    write_term(t, &mut scope, &mut out);
    out
}

/// Terms serialize as their printed form.
impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&print(self))
    }
}

impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Term, D::Error> {
        let src = String::deserialize(d)?;
        parse(&src).map_err(serde::de::Error::custom)
    }
}

fn base_hint(hint: &str) -> &str {
    let base = hint.split('%').next().unwrap_or("");
    if base.is_empty() || base == "_" || KEYWORDS.contains(&base) || base.starts_with('?') {
        "x"
    } else {
        base
    }
}

/// Picks a name for a binder whose body is `body`, avoiding names in scope
/// and constants occurring in the body.
fn pick_name(hint: &str, body: &Term, scope: &[String]) -> String {
    let consts = body.constants();
    let mut name = base_hint(hint).to_string();
    while scope.contains(&name) || consts.contains(&name) {
        name.push('\'');
    }
    name
}

fn write_term(t: &Term, scope: &mut Vec<String>, out: &mut String) {
    match t {
        Term::Var(x) => {
            out.push('?');
            out.push_str(x);
        }
        Term::Bound(i) => match scope.len().checked_sub(i + 1).and_then(|k| scope.get(k)) {
            Some(name) => out.push_str(name),
            None => out.push_str(&format!("#{i}")),
        },
        Term::Const(c) => out.push_str(c),
        Term::Sort(s) => out.push_str(&s.to_string()),
        Term::Unit => out.push_str("unit"),
        Term::Star => out.push_str("tt"),
        Term::Pi(x, a, b) | Term::Sigma(x, a, b) => {
            let is_pi = matches!(t, Term::Pi(..));
            if !b.uses_bound() {
                out.push_str(if is_pi { "(-> " } else { "(times " });
                write_term(a, scope, out);
                // flatten the right spine of non-dependent binders of the same kind
                let mut rest: &Term = b;
                let mut pushed = 0;
                scope.push("_".into());
                pushed += 1;
                loop {
                    match (rest, is_pi) {
                        (Term::Pi(_, a2, b2), true) | (Term::Sigma(_, a2, b2), false) if !b2.uses_bound() => {
                            out.push(' ');
                            write_term(a2, scope, out);
                            scope.push("_".into());
                            pushed += 1;
                            rest = b2;
                        }
                        _ => break,
                    }
                }
                out.push(' ');
                write_term(rest, scope, out);
                scope.truncate(scope.len() - pushed);
                out.push(')');
            } else {
                out.push_str(if is_pi { "(pi (" } else { "(sigma (" });
                let name = pick_name(x.name(), b, scope);
                out.push_str(&name);
                out.push(' ');
                write_term(a, scope, out);
                out.push_str(") ");
                scope.push(name);
                write_term(b, scope, out);
                scope.pop();
                out.push(')');
            }
        }
        Term::Lam(..) => {
            let mut names = Vec::new();
            let mut cur = t;
            while let Term::Lam(x, b) = cur {
                let name = if b.uses_bound() { pick_name(x.name(), b, scope) } else { "_".to_string() };
                scope.push(name.clone());
                names.push(name);
                cur = b;
            }
            out.push_str("(lambda (");
            out.push_str(&names.join(" "));
            out.push_str(") ");
            write_term(cur, scope, out);
            scope.truncate(scope.len() - names.len());
            out.push(')');
        }
        Term::App(..) => {
            let (head, args) = t.spine();
            out.push('(');
            write_term(head, scope, out);
            for a in args {
                out.push(' ');
                write_term(a, scope, out);
            }
            out.push(')');
        }
        Term::Pair(a, b) => {
            out.push_str("(pair ");
            write_term(a, scope, out);
            out.push(' ');
            write_term(b, scope, out);
            out.push(')');
        }
        Term::Fst(a) => {
            out.push_str("(fst ");
            write_term(a, scope, out);
            out.push(')');
        }
        Term::Snd(a) => {
            out.push_str("(snd ");
            write_term(a, scope, out);
            out.push(')');
        }
        Term::AtOp(i, a) => {
            out.push_str(&format!("(@ {i} "));
            write_term(a, scope, out);
            out.push(')');
        }
    }
}
