//! Text syntax for operators.
//!
//! ```text
//! expr     := ('+'|'-')? term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := atom ('^' exponent)?
//! atom     := 'Dt' | 'D'idx | 't' | 'x'idx | 'r' | number | '(' expr ')'
//! exponent := '-'? integer | '(' '-'? integer '/' '2' ')'
//! ```
//!
//! Juxtaposition by `*` is composition, so `Dt*t` is `t∂t + 1`. The right
//! side of `/` must be a coefficient. Half-integer exponents apply to `t`.

use crate::coeff::Coeff;
use crate::diffop::DiffOp;
use crate::poly::Q;
use crate::{OpalgError, Result};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(Q),
    Int(i64),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let (l0, c0) = (line, col);
        let tok = if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            parse_number(&s).ok_or(OpalgError::Parse {
                line: l0,
                col: c0,
                expected: vec!["number".into()],
                found: s.clone(),
            })?
        } else if "+-*/^()".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(OpalgError::Parse {
                line,
                col,
                expected: vec!["operator, identifier or number".into()],
                found: c.to_string(),
            });
        };
        col += i - start;
        out.push(Token {
            tok,
            text: chars[start..i].iter().collect(),
            line: l0,
            col: c0,
        });
    }
    out.push(Token {
        tok: Tok::End,
        text: "end of input".into(),
        line,
        col,
    });
    Ok(out)
}

fn parse_number(s: &str) -> Option<Tok> {
    match s.split_once('.') {
        None => s.parse::<i64>().ok().map(Tok::Int),
        Some((a, b)) => {
            if b.contains('.') || (a.is_empty() && b.is_empty()) {
                return None;
            }
            let digits = format!("{a}{b}");
            let num: BigInt = digits.parse().ok()?;
            let den = BigInt::from(10u32).pow(b.len() as u32);
            Some(Tok::Num(Q::new(num, den)))
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> OpalgError {
        let t = self.peek();
        OpalgError::Parse {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.text.clone(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("'{c}'")]))
        }
    }

    fn expr(&mut self) -> Result<DiffOp> {
        let mut sign_neg = false;
        if let Tok::Sym(c @ ('+' | '-')) = self.peek().tok {
            sign_neg = c == '-';
            self.bump();
        }
        let mut acc = self.term()?;
        if sign_neg {
            acc = acc.neg();
        }
        while let Tok::Sym(c @ ('+' | '-')) = self.peek().tok {
            self.bump();
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<DiffOp> {
        let mut acc = self.factor()?;
        while let Tok::Sym(c @ ('*' | '/')) = self.peek().tok {
            let at = self.bump();
            let rhs = self.factor()?;
            if c == '*' {
                acc = acc.compose(&rhs);
            } else {
                let d = rhs
                    .as_coeff()
                    .filter(|d| !d.is_zero())
                    .ok_or(OpalgError::NonCoefficientDivision {
                        line: at.line,
                        col: at.col,
                    })?;
                acc = acc.compose(&DiffOp::coeff(d.inv()));
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DiffOp> {
        let is_t = matches!(&self.peek().tok, Tok::Ident(s) if s == "t");
        let base = self.atom()?;
        if self.peek().tok != Tok::Sym('^') {
            return Ok(base);
        }
        let caret = self.bump();
        let bad = |reason: &str| OpalgError::Exponent {
            line: caret.line,
            col: caret.col,
            reason: reason.into(),
        };
        let (num, half) = if self.peek().tok == Tok::Sym('(') {
            self.bump();
            let k = self.signed_int()?;
            self.expect_sym('/')?;
            let den_tok = self.bump();
            match den_tok.tok {
                Tok::Int(2) => {}
                _ => return Err(bad(&format!("fractional exponent {k}/{} is not k/2", den_tok.text))),
            }
            self.expect_sym(')')?;
            (k, true)
        } else {
            (self.signed_int()?, false)
        };
        let n = self.n;
        if half {
            if !is_t {
                return Err(bad("half-integer exponents apply only to t"));
            }
            return Ok(DiffOp::coeff(Coeff::t_half_pow(n, num)));
        }
        match base.as_coeff() {
            Some(c) => {
                if num < 0 && c.is_zero() {
                    return Err(bad("negative power of zero"));
                }
                Ok(DiffOp::coeff(c.pow(num)))
            }
            None => {
                if num < 0 {
                    return Err(bad("negative power of an operator"));
                }
                Ok(base.pow(num as u32))
            }
        }
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = if self.peek().tok == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().tok {
            Tok::Int(k) => {
                self.bump();
                Ok(if neg { -k } else { k })
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn index(&self, tok: &Token, digits: &str) -> Result<usize> {
        let unknown = || OpalgError::UnknownIdentifier {
            name: tok.text.clone(),
            line: tok.line,
            col: tok.col,
        };
        let i: usize = digits.parse().map_err(|_| unknown())?;
        if i == 0 || i > self.n || digits.starts_with('0') {
            return Err(unknown());
        }
        Ok(i)
    }

    fn atom(&mut self) -> Result<DiffOp> {
        let n = self.n;
        let tok = self.peek().clone();
        match &tok.tok {
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Int(k) => {
                self.bump();
                Ok(DiffOp::coeff(Coeff::int(n, *k)))
            }
            Tok::Num(v) => {
                self.bump();
                Ok(DiffOp::coeff(Coeff::constant(n, v.clone())))
            }
            Tok::Ident(name) => {
                self.bump();
                let op = match name.as_str() {
                    "Dt" => DiffOp::dt(n),
                    "t" => DiffOp::coeff(Coeff::t_pow(n, 1)),
                    "r" => DiffOp::coeff(Coeff::r(n)),
                    s if s.starts_with('D') && s.len() > 1 => DiffOp::dx(n, self.index(&tok, &s[1..])?),
                    s if s.starts_with('x') && s.len() > 1 => {
                        DiffOp::coeff(Coeff::x(n, self.index(&tok, &s[1..])?))
                    }
                    _ => {
                        return Err(OpalgError::UnknownIdentifier {
                            name: name.clone(),
                            line: tok.line,
                            col: tok.col,
                        })
                    }
                };
                Ok(op)
            }
            _ => Err(self.error(&["'('", "number", "Dt", "Di", "t", "xi", "r"])),
        }
    }
}

/// Parse an operator in `n` space dimensions.
pub fn parse(src: &str, n: usize) -> Result<DiffOp> {
    if n == 0 {
        return Err(OpalgError::Parameter("dimension must be at least 1".into()));
    }
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        n,
    };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.error(&["'+'", "'-'", "'*'", "'/'", "end of input"]));
    }
    Ok(e)
}

/// Parse a coefficient (an operator without derivatives).
pub fn parse_coeff(src: &str, n: usize) -> Result<Coeff> {
    let op = parse(src, n)?;
    op.as_coeff()
        .ok_or(OpalgError::NonCoefficientDivision { line: 1, col: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    #[test]
    fn builds_wave_operator() {
        let a = parse("Dt^2 - t^3 * (D1^2 + D2^2)", 2).unwrap();
        let lap = DiffOp::dx(2, 1).pow(2).add(&DiffOp::dx(2, 2).pow(2));
        let want = DiffOp::dt(2).pow(2).sub(&lap.left_mul(&Coeff::t_pow(2, 3)));
        assert_eq!(a, want);
    }

    #[test]
    fn rotation_and_dilation() {
        let l = parse("x1*D2 - x2*D1", 2).unwrap();
        assert_eq!(l.len(), 2);
        let v = parse("2*t*Dt + 3*(x1*D1 + x2*D2)", 2).unwrap();
        assert_eq!(v.coefficient(&[1, 0, 0]), Coeff::t_pow(2, 1).scale(&q(2)));
        assert_eq!(v.coefficient(&[0, 1, 0]), Coeff::x(2, 1).scale(&q(3)));
        assert_eq!(parse("Dt*t", 1).unwrap(), parse("t*Dt + 1", 1).unwrap());
    }

    #[test]
    fn half_powers_and_decimals() {
        let a = parse("t^(3/2)*t^(-1/2)", 1).unwrap();
        assert_eq!(a, parse("t", 1).unwrap());
        assert_eq!(parse("0.25", 1).unwrap(), parse("1/4", 1).unwrap());
        assert_eq!(parse("t^-2", 1).unwrap(), parse("1/t^2", 1).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        match parse("Dt +\n  * x1", 1) {
            Err(OpalgError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x3", 2), Err(OpalgError::UnknownIdentifier { .. })));
        assert!(matches!(parse("D0", 2), Err(OpalgError::UnknownIdentifier { .. })));
        assert!(matches!(parse("y", 2), Err(OpalgError::UnknownIdentifier { .. })));
        assert!(matches!(parse("t^(1/3)", 2), Err(OpalgError::Exponent { .. })));
        assert!(matches!(parse("x1^(1/2)", 2), Err(OpalgError::Exponent { .. })));
        assert!(matches!(parse("Dt^-1", 2), Err(OpalgError::Exponent { .. })));
        assert!(matches!(parse("t/Dt", 2), Err(OpalgError::NonCoefficientDivision { .. })));
        assert!(matches!(parse("(t", 2), Err(OpalgError::Parse { .. })));
    }

    #[test]
    fn print_round_trip() {
        let a = parse("(x1 - 2*t^(5/2))/(9*r^2 - 4*t^3) * Dt*D1 + r/x2*D2^2 - 7/3", 2).unwrap();
        let back = parse(&a.to_string(), 2).unwrap();
        assert_eq!(a, back, "{a}");
    }
}
