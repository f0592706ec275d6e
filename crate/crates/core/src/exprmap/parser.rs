//! Recursive descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 'u' | 'v' | ident '(' expr ')' | '(' expr ')'
//! ```

use super::ast::{BinOp, Expr, Func, Var};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::SyntaxError { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::UnknownVariable { offset, .. } => *offset,
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.syntax("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::SyntaxError { offset: self.pos, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::neg(self.factor()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.factor()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_close()?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        if self.peek() == Some(b')') {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax("expected `)`"))
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        if i < s.len() && s[i] == b'.' {
            i += 1;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).expect("ascii");
        match text.parse::<f64>() {
            Ok(x) => {
                self.pos = i;
                Ok(Expr::Num(x))
            }
            Err(_) => Err(ParseError::SyntaxError {
                offset: start,
                message: format!("malformed number `{text}`"),
            }),
        }
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if self.peek() == Some(b'(') {
            let func = Func::from_name(name).ok_or_else(|| ParseError::UnknownFunction {
                name: name.to_string(),
                offset: start,
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            self.expect_close()?;
            return Ok(Expr::call(func, arg));
        }
        match name {
            "u" => Ok(Expr::Var(Var::U)),
            "v" => Ok(Expr::Var(Var::V)),
            _ => Err(ParseError::UnknownVariable { name: name.to_string(), offset: start }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("u*v^2").unwrap(),
            Expr::mul(Expr::u(), Expr::pow(Expr::v(), Expr::Num(2.0)))
        );
        assert_eq!(
            parse("u^v^2").unwrap(),
            Expr::pow(Expr::u(), Expr::pow(Expr::v(), Expr::Num(2.0)))
        );
        assert_eq!(
            parse("-u^2").unwrap(),
            Expr::neg(Expr::pow(Expr::u(), Expr::Num(2.0)))
        );
        assert_eq!(
            parse("u-v-1").unwrap(),
            Expr::sub(Expr::sub(Expr::u(), Expr::v()), Expr::Num(1.0))
        );
        assert_eq!(
            parse("u/v*2").unwrap(),
            Expr::mul(Expr::div(Expr::u(), Expr::v()), Expr::Num(2.0))
        );
        assert_eq!(
            parse("2^-u").unwrap(),
            Expr::pow(Expr::Num(2.0), Expr::neg(Expr::u()))
        );
    }

    #[test]
    fn swallowtail_first_coordinate() {
        let e = parse("3*u^4 + u^2*v").unwrap();
        let want = Expr::add(
            Expr::mul(Expr::Num(3.0), Expr::pow(Expr::u(), Expr::Num(4.0))),
            Expr::mul(Expr::pow(Expr::u(), Expr::Num(2.0)), Expr::v()),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse("sin(").unwrap_err().offset(), 4);
        assert!(matches!(parse("sin(").unwrap_err(), ParseError::SyntaxError { .. }));
        assert!(matches!(
            parse("u + foo(v)").unwrap_err(),
            ParseError::UnknownFunction { offset: 4, .. }
        ));
        assert!(matches!(
            parse("2*w").unwrap_err(),
            ParseError::UnknownVariable { offset: 2, .. }
        ));
        assert!(matches!(parse("").unwrap_err(), ParseError::SyntaxError { offset: 0, .. }));
        assert!(matches!(parse("u v").unwrap_err(), ParseError::SyntaxError { offset: 2, .. }));
        assert!(matches!(parse("(u").unwrap_err(), ParseError::SyntaxError { offset: 2, .. }));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse(".25").unwrap(), Expr::Num(0.25));
        assert_eq!(parse("2E2").unwrap(), Expr::Num(200.0));
    }
}
