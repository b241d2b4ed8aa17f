use num::BigInt;

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    Eq,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Assign,
    Semi,
    Question,
    ChoiceOp,
    Prime,
    Comma,
    Dot,
    Forall,
    Exists,
    Squiggle,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Less => "<",
            Tok::LessEq => "<=",
            Tok::Greater => ">",
            Tok::GreaterEq => ">=",
            Tok::Eq => "=",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::Assign => ":=",
            Tok::Semi => ";",
            Tok::Question => "?",
            Tok::ChoiceOp => "++",
            Tok::Prime => "'",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Forall => "\\forall",
            Tok::Exists => "\\exists",
            Tok::Squiggle => "~>",
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) const RESERVED: &[&str] = &["true", "false", "while", "if", "else"];

pub(crate) fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let rest = &input[i..];
        let tok = if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(input[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Num(input[start..i].parse().expect("digits"))
        } else if let Some(kw) = ["\\forall", "\\exists"]
            .iter()
            .find(|k| rest.starts_with(**k))
        {
            i += kw.len();
            if *kw == "\\forall" {
                Tok::Forall
            } else {
                Tok::Exists
            }
        } else {
            const MULTI: &[(&str, Tok)] = &[
                ("<->", Tok::DArrow),
                ("<=", Tok::LessEq),
                (">=", Tok::GreaterEq),
                ("->", Tok::Arrow),
                (":=", Tok::Assign),
                ("++", Tok::ChoiceOp),
                ("~>", Tok::Squiggle),
            ];
            if let Some((s, t)) = MULTI.iter().find(|(s, _)| rest.starts_with(s)) {
                i += s.len();
                t.clone()
            } else {
                i += 1;
                match c {
                    b'+' => Tok::Plus,
                    b'-' => Tok::Minus,
                    b'*' => Tok::Star,
                    b'^' => Tok::Caret,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b'<' => Tok::Less,
                    b'>' => Tok::Greater,
                    b'=' => Tok::Eq,
                    b'!' => Tok::Bang,
                    b'&' => Tok::Amp,
                    b'|' => Tok::Pipe,
                    b';' => Tok::Semi,
                    b'?' => Tok::Question,
                    b'\'' => Tok::Prime,
                    b',' => Tok::Comma,
                    b'.' => Tok::Dot,
                    _ => {
                        let ch = rest.chars().next().unwrap_or('?');
                        return Err(ParseError {
                            span: SourceSpan::new(start, start + ch.len_utf8()),
                            message: format!("unexpected character `{ch}`"),
                        });
                    }
                }
            }
        };
        out.push(Token {
            tok,
            span: SourceSpan::new(start, i),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(input.len(), input.len()),
    });
    Ok(out)
}
