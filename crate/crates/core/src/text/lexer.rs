use super::{ParseError, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Atom,
    QuotedAtom,
    Variable,
    Integer,
    Float,
    Punct,
}

/// A lexical token. For quoted atoms `text` holds the unescaped atom text.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub pos: Position,
}

impl Token {
    pub fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punct && self.text.len() == 1 && self.text.starts_with(c)
    }
}

pub fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(input).run()
}

struct Lexer {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn new(input: &str) -> Self {
        Lexer {
            chars: input.chars().collect(),
            idx: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.idx + off).copied()
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, buf: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek().filter(|&c| pred(c)) {
            buf.push(c);
            self.bump();
        }
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let pos = self.pos();
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '%' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                'a'..='z' => {
                    let mut text = String::new();
                    self.take_while(&mut text, is_alnum);
                    out.push(Token {
                        kind: TokenKind::Atom,
                        text,
                        pos,
                    });
                }
                'A'..='Z' | '_' => {
                    let mut text = String::new();
                    self.take_while(&mut text, is_alnum);
                    out.push(Token {
                        kind: TokenKind::Variable,
                        text,
                        pos,
                    });
                }
                '0'..='9' => out.push(self.number(pos)?),
                '-' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => out.push(self.number(pos)?),
                '\'' => out.push(self.quoted(pos)?),
                '.' => {
                    self.bump();
                    // an end token must be followed by layout, a comment or EOF
                    if let Some(next) = self.peek().filter(|&n| !n.is_whitespace() && n != '%') {
                        return Err(ParseError::new(
                            "end `.` must be followed by whitespace or end of input",
                            self.pos(),
                            next.to_string(),
                        ));
                    }
                    out.push(Token {
                        kind: TokenKind::Punct,
                        text: ".".into(),
                        pos,
                    });
                }
                '(' | ')' | '[' | ']' | ',' | '|' => {
                    self.bump();
                    out.push(Token {
                        kind: TokenKind::Punct,
                        text: c.to_string(),
                        pos,
                    });
                }
                other => {
                    return Err(ParseError::new("illegal character", pos, other.to_string()));
                }
            }
        }
        Ok(out)
    }

    fn number(&mut self, pos: Position) -> Result<Token, ParseError> {
        let mut text = String::new();
        if self.peek() == Some('-') {
            text.push('-');
            self.bump();
        }
        self.take_while(&mut text, |c| c.is_ascii_digit());
        let is_float = self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit());
        if !is_float {
            return match text.parse::<i64>() {
                Ok(_) => Ok(Token {
                    kind: TokenKind::Integer,
                    text,
                    pos,
                }),
                Err(_) => Err(ParseError::new("integer overflow", pos, text)),
            };
        }
        text.push('.');
        self.bump();
        self.take_while(&mut text, |c| c.is_ascii_digit());
        if matches!(self.peek(), Some('e' | 'E')) {
            let signed = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if signed { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..digit_at {
                    text.push(self.bump().unwrap_or_default());
                }
                self.take_while(&mut text, |c| c.is_ascii_digit());
            }
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Token {
                kind: TokenKind::Float,
                text,
                pos,
            }),
            _ => Err(ParseError::new("float out of range", pos, text)),
        }
    }

    fn quoted(&mut self, pos: Position) -> Result<Token, ParseError> {
        self.bump();
        let mut text = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(ParseError::new("unterminated quoted atom", pos, "'"));
            };
            match c {
                '\'' if self.peek() == Some('\'') => {
                    self.bump();
                    text.push('\'');
                }
                '\'' => break,
                '\\' => {
                    let esc_pos = Position {
                        line: self.line,
                        column: self.col - 1,
                    };
                    let Some(e) = self.bump() else {
                        return Err(ParseError::new("unterminated quoted atom", pos, "'"));
                    };
                    match e {
                        '\\' => text.push('\\'),
                        '\'' => text.push('\''),
                        'n' => text.push('\n'),
                        't' => text.push('\t'),
                        other => {
                            return Err(ParseError::new(
                                "unsupported escape sequence",
                                esc_pos,
                                format!("\\{other}"),
                            ))
                        }
                    }
                }
                c => text.push(c),
            }
        }
        if text.is_empty() {
            return Err(ParseError::new("empty atom", pos, "''"));
        }
        Ok(Token {
            kind: TokenKind::QuotedAtom,
            text,
            pos,
        })
    }
}

pub(crate) fn is_alnum(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}
