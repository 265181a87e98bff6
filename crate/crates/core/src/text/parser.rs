use std::collections::HashMap;

use super::lexer::{tokenize, Token, TokenKind};
use super::{ParseError, Position};
use crate::term::{Term, Var};

/// Parses exactly one term. A trailing `.` is allowed.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens, text);
    let term = p.term()?;
    if p.peek().is_some_and(|t| t.is_punct('.')) {
        p.idx += 1;
    }
    if let Some(t) = p.peek() {
        return Err(ParseError::new("unexpected trailing input", t.pos, t.text.clone()));
    }
    Ok(term)
}

/// Parses a sequence of `.`-terminated clauses.
pub fn parse_program(text: &str) -> Result<Vec<Term>, ParseError> {
    Ok(parse_clauses(text)?.into_iter().map(|(t, _)| t).collect())
}

/// Like [`parse_program`], also returning where each clause starts.
pub fn parse_clauses(text: &str) -> Result<Vec<(Term, Position)>, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens, text);
    let mut out = Vec::new();
    while let Some(first) = p.peek() {
        let start = first.pos;
        // variable ids are scoped to their clause
        p.vars.clear();
        p.next_id = 0;
        let term = p.term()?;
        p.expect('.')?;
        out.push((term, start));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    idx: usize,
    vars: HashMap<String, u64>,
    next_id: u64,
    eof: Position,
}

impl<'a> Parser<'a> {
    fn new(tokens: &'a [Token], text: &str) -> Self {
        Parser {
            tokens,
            idx: 0,
            vars: HashMap::new(),
            next_id: 0,
            eof: eof_position(text),
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.idx)
    }

    fn next(&mut self, expected: &str) -> Result<&'a Token, ParseError> {
        match self.tokens.get(self.idx) {
            Some(t) => {
                self.idx += 1;
                Ok(t)
            }
            None => Err(ParseError::new(
                format!("unexpected end of input, expected {expected}"),
                self.eof,
                "end of input",
            )),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next(&format!("`{c}`"))?;
        if t.is_punct(c) {
            Ok(())
        } else {
            Err(ParseError::new(format!("expected `{c}`"), t.pos, t.text.clone()))
        }
    }

    fn fresh_var(&mut self, name: &str) -> Var {
        if name == "_" {
            let id = self.next_id;
            self.next_id += 1;
            return Var::new(name, id);
        }
        let next_id = &mut self.next_id;
        let id = *self.vars.entry(name.to_string()).or_insert_with(|| {
            let id = *next_id;
            *next_id += 1;
            id
        });
        Var::new(name, id)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let tok = self.next("a term")?;
        match tok.kind {
            TokenKind::Variable => Ok(Term::Var(self.fresh_var(&tok.text))),
            TokenKind::Integer => tok
                .text
                .parse()
                .map(Term::Int)
                .map_err(|_| ParseError::new("integer overflow", tok.pos, tok.text.clone())),
            TokenKind::Float => tok
                .text
                .parse()
                .ok()
                .and_then(Term::float)
                .ok_or_else(|| ParseError::new("float out of range", tok.pos, tok.text.clone())),
            TokenKind::Atom | TokenKind::QuotedAtom => {
                if self.peek().is_some_and(|t| t.is_punct('(')) {
                    self.idx += 1;
                    let args = self.args(')')?;
                    Ok(Term::compound(tok.text.clone(), args))
                } else {
                    Ok(Term::Atom(tok.text.clone()))
                }
            }
            TokenKind::Punct if tok.is_punct('[') => self.list(),
            TokenKind::Punct => Err(ParseError::new("expected a term", tok.pos, tok.text.clone())),
        }
    }

    /// Comma-separated terms up to (and consuming) `close`.
    fn args(&mut self, close: char) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        loop {
            let t = self.next(&format!("`,` or `{close}`"))?;
            if t.is_punct(',') {
                args.push(self.term()?);
            } else if t.is_punct(close) {
                return Ok(args);
            } else {
                return Err(ParseError::new(
                    format!("expected `,` or `{close}`"),
                    t.pos,
                    t.text.clone(),
                ));
            }
        }
    }

    fn list(&mut self) -> Result<Term, ParseError> {
        if self.peek().is_some_and(|t| t.is_punct(']')) {
            self.idx += 1;
            return Ok(Term::list(Vec::new()));
        }
        let mut items = vec![self.term()?];
        loop {
            let t = self.next("`,`, `|` or `]`")?;
            if t.is_punct(',') {
                items.push(self.term()?);
            } else if t.is_punct(']') {
                return Ok(Term::List(items, None));
            } else if t.is_punct('|') {
                let tail_tok = self.peek();
                let tail = self.term()?;
                self.expect(']')?;
                return match tail {
                    Term::Var(v) => Ok(Term::List(items, Some(v))),
                    Term::List(rest, tail) => {
                        items.extend(rest);
                        Ok(Term::List(items, tail))
                    }
                    _ => {
                        let tok = tail_tok.expect("tail term was parsed from a token");
                        Err(ParseError::new(
                            "list tail must be a variable or a list",
                            tok.pos,
                            tok.text.clone(),
                        ))
                    }
                };
            } else {
                return Err(ParseError::new("expected `,`, `|` or `]`", t.pos, t.text.clone()));
            }
        }
    }
}

/// Position of the last character, or 1:1 for empty input.
fn eof_position(text: &str) -> Position {
    let mut pos = Position { line: 1, column: 1 };
    let mut last = pos;
    for c in text.chars() {
        last = pos;
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    last
}
