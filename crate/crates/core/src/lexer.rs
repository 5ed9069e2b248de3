//! Shared tokenizer for the test and choice grammars.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(String),
    KwIf,
    KwThen,
    KwElse,
    KwMix,
    Bang,
    Amp,
    Pipe,
    Arrow,   // =>
    DArrow,  // <=>
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Colon,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {s:?}"),
            Tok::Int(s) => write!(f, "integer {s}"),
            Tok::KwIf => write!(f, "'if'"),
            Tok::KwThen => write!(f, "'then'"),
            Tok::KwElse => write!(f, "'else'"),
            Tok::KwMix => write!(f, "'mix'"),
            Tok::Bang => write!(f, "'!'"),
            Tok::Amp => write!(f, "'&'"),
            Tok::Pipe => write!(f, "'|'"),
            Tok::Arrow => write!(f, "'=>'"),
            Tok::DArrow => write!(f, "'<=>'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::Semi => write!(f, "';'"),
            Tok::Colon => write!(f, "':'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '!' => {
                toks.push(Spanned { tok: Tok::Bang, offset: start });
                i += 1;
            }
            '&' => {
                toks.push(Spanned { tok: Tok::Amp, offset: start });
                i += 1;
            }
            '|' => {
                toks.push(Spanned { tok: Tok::Pipe, offset: start });
                i += 1;
            }
            '(' => {
                toks.push(Spanned { tok: Tok::LParen, offset: start });
                i += 1;
            }
            ')' => {
                toks.push(Spanned { tok: Tok::RParen, offset: start });
                i += 1;
            }
            '{' => {
                toks.push(Spanned { tok: Tok::LBrace, offset: start });
                i += 1;
            }
            '}' => {
                toks.push(Spanned { tok: Tok::RBrace, offset: start });
                i += 1;
            }
            ';' => {
                toks.push(Spanned { tok: Tok::Semi, offset: start });
                i += 1;
            }
            ':' => {
                toks.push(Spanned { tok: Tok::Colon, offset: start });
                i += 1;
            }
            '/' => {
                toks.push(Spanned { tok: Tok::Slash, offset: start });
                i += 1;
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push(Spanned { tok: Tok::Arrow, offset: start });
                    i += 2;
                } else {
                    return Err(SyntaxError {
                        offset: start,
                        message: "expected '=>' after '='".into(),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push(Spanned { tok: Tok::DArrow, offset: start });
                    i += 3;
                } else {
                    return Err(SyntaxError {
                        offset: start,
                        message: "expected '<=>' after '<'".into(),
                    });
                }
            }
            'A'..='Z' | 'a'..='z' | '_' => {
                let mut j = i + 1;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let word = &text[i..j];
                let tok = match word {
                    "if" => Tok::KwIf,
                    "then" => Tok::KwThen,
                    "else" => Tok::KwElse,
                    "mix" => Tok::KwMix,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push(Spanned { tok, offset: start });
                i = j;
            }
            '0'..='9' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                toks.push(Spanned {
                    tok: Tok::Int(text[i..j].to_string()),
                    offset: start,
                });
                i = j;
            }
            other => {
                return Err(SyntaxError {
                    offset: start,
                    message: format!("unexpected character {other:?}"),
                });
            }
        }
    }
    toks.push(Spanned { tok: Tok::Eof, offset: text.len() });
    Ok(toks)
}

/// Cursor over a token stream with one-token lookahead.
pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Spanned>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    pub fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, want: &Tok) -> Result<Spanned, SyntaxError> {
        if &self.toks[self.pos].tok == want {
            Ok(self.bump())
        } else {
            Err(self.error_here(&format!(
                "expected {}, found {}",
                want,
                self.toks[self.pos].tok
            )))
        }
    }

    pub fn error_here(&self, message: &str) -> SyntaxError {
        SyntaxError {
            offset: self.toks[self.pos].offset,
            message: message.to_string(),
        }
    }

    pub fn at_eof(&self) -> bool {
        self.toks[self.pos].tok == Tok::Eof
    }
}
