//! Minimal s-expression reader and printer shared by the text formats.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SexprError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected `)` at byte {0}")]
    UnexpectedClose(usize),
    #[error("trailing input at byte {0}")]
    Trailing(usize),
}

impl Sexpr {
    pub fn parse(src: &str) -> Result<Sexpr, SexprError> {
        let tokens = tokenize(src);
        let mut pos = 0;
        let e = read(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(SexprError::Trailing(tokens[pos].0));
        }
        Ok(e)
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) => Some(a),
            Sexpr::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(l) => Some(l),
            Sexpr::Atom(_) => None,
        }
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => f.write_str(a),
            Sexpr::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn tokenize(src: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in src.char_indices() {
        match ch {
            '(' | ')' => {
                if let Some(s) = start.take() {
                    out.push((s, &src[s..i]));
                }
                out.push((i, &src[i..i + 1]));
            }
            c if c.is_whitespace() => {
                if let Some(s) = start.take() {
                    out.push((s, &src[s..i]));
                }
            }
            _ => {
                if start.is_none() {
                    start = Some(i);
                }
            }
        }
    }
    if let Some(s) = start {
        out.push((s, &src[s..]));
    }
    out
}

fn read(tokens: &[(usize, &str)], pos: &mut usize) -> Result<Sexpr, SexprError> {
    let (at, tok) = *tokens.get(*pos).ok_or(SexprError::Eof)?;
    *pos += 1;
    match tok {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(SexprError::Eof),
                    Some((_, ")")) => {
                        *pos += 1;
                        return Ok(Sexpr::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                }
            }
        }
        ")" => Err(SexprError::UnexpectedClose(at)),
        a => Ok(Sexpr::Atom(a.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let e = Sexpr::parse("(app (const k)\n (var x))").unwrap();
        assert_eq!(e.to_string(), "(app (const k) (var x))");
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(Sexpr::parse("(a b"), Err(SexprError::Eof));
        assert_eq!(Sexpr::parse(")"), Err(SexprError::UnexpectedClose(0)));
        assert_eq!(Sexpr::parse("a b"), Err(SexprError::Trailing(2)));
    }
}
