//! Mini-language for sequence terms: expressions over the free variable `n`
//! with integer literals, `+ - * /`, integer exponents and parentheses.
//!
//! Precedence: `^` > unary minus > `* /` > `+ -`. The binary operators are
//! left-associative, `^` is right-associative and its right operand must
//! evaluate to an integer. All arithmetic is exact rational arithmetic.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on the bit size a single term may reach during evaluation.
pub const DEFAULT_TERM_BIT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// Integer literal (rationals are formed with `/`).
    Lit(BigInt),
    /// The free variable `n`.
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigUint),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                break;
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'0'..=b'9' => {
                    while lx.pos < lx.src.len() && lx.src[lx.pos].is_ascii_digit() {
                        lx.pos += 1;
                    }
                    let text = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap();
                    Tok::Int(text.parse().unwrap())
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while lx.pos < lx.src.len()
                        && (lx.src[lx.pos].is_ascii_alphanumeric() || lx.src[lx.pos] == b'_')
                    {
                        lx.pos += 1;
                    }
                    let text = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap();
                    Tok::Ident(text.to_string())
                }
                other => {
                    return Err(Error::Syntax {
                        offset: start,
                        message: format!("unexpected byte `{}`", other as char),
                    })
                }
            };
            out.push((tok, start));
        }
        Ok(out)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.idx).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.idx += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.idx += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.idx += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.idx += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.idx += 1;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.idx += 1;
            // right-associative; allow a signed exponent
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Int(u)) => Ok(Expr::Lit(BigInt::from(u))),
            Some(Tok::Ident(name)) => {
                if name == "n" {
                    Ok(Expr::Var)
                } else {
                    Err(Error::UnknownIdentifier { offset: off, name })
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(Error::Syntax {
                offset: off,
                message: "expected a number, `n` or `(`".to_string(),
            }),
        }
    }
}

/// Parses the expression mini-language.
pub fn parse_expr(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::EmptyExpression);
    }
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.idx != p.toks.len() {
        return Err(Error::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".to_string(),
        });
    }
    Ok(e)
}

impl Expr {
    /// Exact value at index `n` (n >= 1), guarded by a bit-size budget so a
    /// rule like `2^(2^n*n)` fails loudly instead of eating all memory.
    pub fn eval(&self, n: u64, budget: u64) -> Result<BigRational> {
        if n == 0 {
            return Err(Error::InvalidIndex { n });
        }
        self.eval_inner(n, budget)
    }

    fn eval_inner(&self, n: u64, budget: u64) -> Result<BigRational> {
        match self {
            Expr::Lit(i) => Ok(BigRational::from(i.clone())),
            Expr::Var => Ok(BigRational::from(BigInt::from(n))),
            Expr::Neg(e) => Ok(-e.eval_inner(n, budget)?),
            Expr::Add(a, b) => Ok(a.eval_inner(n, budget)? + b.eval_inner(n, budget)?),
            Expr::Sub(a, b) => Ok(a.eval_inner(n, budget)? - b.eval_inner(n, budget)?),
            Expr::Mul(a, b) => {
                let va = a.eval_inner(n, budget)?;
                let vb = b.eval_inner(n, budget)?;
                check_budget(n, bits_of(&va) + bits_of(&vb), budget)?;
                Ok(va * vb)
            }
            Expr::Div(a, b) => {
                let vb = b.eval_inner(n, budget)?;
                if vb.is_zero() {
                    return Err(Error::DivisionByZero { n });
                }
                Ok(a.eval_inner(n, budget)? / vb)
            }
            Expr::Pow(base, exp) => {
                let ve = exp.eval_inner(n, budget)?;
                if !ve.is_integer() {
                    return Err(Error::NonIntegerExponent {
                        n,
                        value: ve.to_string(),
                    });
                }
                let e = ve.to_integer();
                let vb = base.eval_inner(n, budget)?;
                let k = e.magnitude().to_u64().ok_or(Error::TermBudgetExceeded {
                    n,
                    bits: u64::MAX,
                    budget,
                })?;
                // bits(x^k) is within k of k*(bits(numer)-1) + k*(bits(denom)-1)
                let nb = vb.numer().bits().saturating_sub(1);
                let db = vb.denom().bits().saturating_sub(1);
                let projected = (nb + db).saturating_mul(k.max(1)).saturating_add(k);
                check_budget(n, projected, budget)?;
                if vb.is_zero() {
                    if e.is_negative() {
                        return Err(Error::DivisionByZero { n });
                    }
                    if e.is_zero() {
                        return Ok(BigRational::one()); // 0^0 = 1 by convention
                    }
                    return Ok(BigRational::zero());
                }
                if e.is_zero() {
                    return Ok(BigRational::one());
                }
                let k32: u32 = k.try_into().map_err(|_| Error::TermBudgetExceeded {
                    n,
                    bits: projected,
                    budget,
                })?;
                // p/q reduced implies p^k/q^k reduced; skip the gcd pass.
                let powed = BigRational::new_raw(vb.numer().pow(k32), vb.denom().pow(k32));
                Ok(if e.is_negative() {
                    powed.recip()
                } else {
                    powed
                })
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Lit(_) | Expr::Var => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let me = self.precedence();
        let parens = me < min || matches!(self, Expr::Lit(i) if i.is_negative());
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Lit(i) => write!(f, "{i}")?,
            Expr::Var => write!(f, "n")?,
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_prec(f, 3)?;
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Pow(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^")?;
                // right operand of ^ may be a unary chain
                if b.precedence() >= 3 {
                    b.fmt_prec(f, 3)?;
                } else {
                    write!(f, "(")?;
                    b.fmt_prec(f, 1)?;
                    write!(f, ")")?;
                }
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn bits_of(q: &BigRational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

fn check_budget(n: u64, bits: u64, budget: u64) -> Result<()> {
    if bits > budget {
        return Err(Error::TermBudgetExceeded { n, bits, budget });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(text: &str, n: u64) -> BigRational {
        parse_expr(text).unwrap().eval(n, DEFAULT_TERM_BIT_BUDGET).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn identity_rule() {
        assert_eq!(ev("n", 3), rat(3, 1));
    }

    #[test]
    fn exponent_semantics() {
        assert_eq!(ev("2^n", 3), rat(8, 1));
        assert_eq!(ev("2^3^2", 1), rat(512, 1)); // right-assoc
        assert_eq!(ev("2^-2", 1), rat(1, 4));
        assert_eq!(ev("-2^2", 1), rat(-4, 1)); // ^ binds tighter than unary -
    }

    #[test]
    fn exact_rational_constant() {
        assert_eq!(ev("1/2", 7), rat(1, 2));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2+3*4", 1), rat(14, 1));
        assert_eq!(ev("2-3-4", 1), rat(-5, 1));
        assert_eq!(ev("24/4/2", 1), rat(3, 1));
        assert_eq!(ev("n*(n+1)", 4), rat(20, 1));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let e = parse_expr("1/(n-2)").unwrap();
        assert!(matches!(
            e.eval(2, DEFAULT_TERM_BIT_BUDGET),
            Err(Error::DivisionByZero { n: 2 })
        ));
    }

    #[test]
    fn index_zero_rejected() {
        let e = parse_expr("1/n").unwrap();
        assert!(matches!(
            e.eval(0, DEFAULT_TERM_BIT_BUDGET),
            Err(Error::InvalidIndex { n: 0 })
        ));
    }

    #[test]
    fn non_integer_exponent_rejected() {
        let e = parse_expr("2^(1/2)").unwrap();
        assert!(matches!(
            e.eval(1, DEFAULT_TERM_BIT_BUDGET),
            Err(Error::NonIntegerExponent { .. })
        ));
    }

    #[test]
    fn syntax_error_carries_byte_offset() {
        match parse_expr("1 + $") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse_expr("2*m") {
            Err(Error::UnknownIdentifier { offset, name }) => {
                assert_eq!((offset, name.as_str()), (2, "m"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("   "), Err(Error::EmptyExpression)));
    }

    #[test]
    fn budget_guard_trips_on_huge_powers() {
        let e = parse_expr("2^(2^n*n)").unwrap();
        assert!(e.eval(10, DEFAULT_TERM_BIT_BUDGET).is_ok());
        assert!(matches!(
            e.eval(40, DEFAULT_TERM_BIT_BUDGET),
            Err(Error::TermBudgetExceeded { .. })
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "n",
            "2^n",
            "1/2",
            "n*(n+1)",
            "-(n+1)",
            "2^(2^n*n)",
            "(2^3)^2",
            "2^-2",
            "1 - (2 - 3)",
            "n/(n+1)/2",
        ] {
            let e = parse_expr(text).unwrap();
            let printed = e.to_string();
            let back = parse_expr(&printed).unwrap();
            assert_eq!(e, back, "`{text}` printed as `{printed}`");
        }
    }
}
