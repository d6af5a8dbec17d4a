//! Sequence rules: closed-form expressions or explicit term lists.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::expr::{parse_expr, Expr};
use crate::error::{Error, Result};
use crate::real::parse_decimal_rational;

/// Continuation of an explicit list past its last item.
#[derive(Debug, Clone, PartialEq)]
pub enum Continuation {
    /// No rule: indices past the list are an error.
    None,
    /// Cycle through the list periodically.
    Repeat,
    /// Evaluate an expression at the original index n.
    Expr(Expr),
}

/// A rule producing term n (n >= 1) of a sequence as an exact rational.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceRule {
    Expr(Expr),
    List {
        items: Vec<BigRational>,
        then: Continuation,
    },
}

/// Parses the expression mini-language into a rule.
pub fn parse_sequence_expr(text: &str) -> Result<SequenceRule> {
    Ok(SequenceRule::Expr(parse_expr(text)?))
}

/// Parses "p/q", integer or decimal notation into an exact rational.
pub fn parse_rational_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad rational `{s}`")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad rational `{s}`")))?;
        if d.is_zero() {
            return Err(Error::InvalidSpec(format!("zero denominator in `{s}`")));
        }
        Ok(BigRational::new(n, d))
    } else {
        parse_decimal_rational(s)
    }
}

impl SequenceRule {
    pub fn constant(q: BigRational) -> SequenceRule {
        if q.is_integer() {
            SequenceRule::Expr(Expr::Lit(q.to_integer()))
        } else {
            SequenceRule::List {
                items: vec![q],
                then: Continuation::Repeat,
            }
        }
    }

    pub fn constant_u64(v: u64) -> SequenceRule {
        SequenceRule::Expr(Expr::Lit(BigInt::from(v)))
    }

    /// Exact term at index n (n >= 1); pure and deterministic.
    pub fn term(&self, n: u64, budget: u64) -> Result<BigRational> {
        if n == 0 {
            return Err(Error::InvalidIndex { n });
        }
        match self {
            SequenceRule::Expr(e) => e.eval(n, budget),
            SequenceRule::List { items, then } => {
                let len = items.len() as u64;
                if n <= len {
                    return Ok(items[(n - 1) as usize].clone());
                }
                match then {
                    Continuation::None => Err(Error::ListExhausted {
                        n,
                        len: items.len(),
                    }),
                    Continuation::Repeat => Ok(items[((n - 1) % len) as usize].clone()),
                    Continuation::Expr(e) => e.eval(n, budget),
                }
            }
        }
    }

    /// Exact base-2 logarithm of term n when the rule's structure exposes it
    /// (products, quotients and powers of powers of two, and of `n` itself).
    /// Lets diagnostics reason about terms like 2^(2^n*n) that are far too
    /// large to materialize.
    pub fn log2_exact(&self, n: u64, budget: u64) -> Option<BigRational> {
        match self {
            SequenceRule::Expr(e) => log2_expr(e, n, budget),
            SequenceRule::List { items, then } => {
                let len = items.len() as u64;
                if n >= 1 && n <= len {
                    return log2_rational(&items[(n - 1) as usize]);
                }
                match then {
                    Continuation::Repeat if n >= 1 => {
                        log2_rational(&items[((n - 1) % len) as usize])
                    }
                    Continuation::Expr(e) => log2_expr(e, n, budget),
                    _ => None,
                }
            }
        }
    }
}

fn is_pow2(u: &BigUint) -> bool {
    !u.is_zero() && (u & (u - 1u8)).is_zero()
}

/// log2 of a positive rational that is an exact power of two.
pub fn log2_rational(q: &BigRational) -> Option<BigRational> {
    if !q.is_positive() {
        return None;
    }
    let (n, d) = (q.numer().magnitude(), q.denom().magnitude());
    if is_pow2(n) && is_pow2(d) {
        let ln = n.trailing_zeros().unwrap_or(0) as i64;
        let ld = d.trailing_zeros().unwrap_or(0) as i64;
        Some(BigRational::from(BigInt::from(ln - ld)))
    } else {
        None
    }
}

fn log2_expr(e: &Expr, n: u64, budget: u64) -> Option<BigRational> {
    match e {
        Expr::Lit(i) => {
            if i.is_positive() {
                log2_rational(&BigRational::from(i.clone()))
            } else {
                None
            }
        }
        Expr::Var => log2_rational(&BigRational::from(BigInt::from(n))),
        Expr::Mul(a, b) => Some(log2_expr(a, n, budget)? + log2_expr(b, n, budget)?),
        Expr::Div(a, b) => Some(log2_expr(a, n, budget)? - log2_expr(b, n, budget)?),
        Expr::Pow(base, exp) => {
            let lb = log2_expr(base, n, budget)?;
            let ve = exp.eval(n, budget).ok()?;
            if !ve.is_integer() {
                return None;
            }
            Some(lb * ve)
        }
        _ => None,
    }
}

impl fmt::Display for SequenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceRule::Expr(e) => write!(f, "{e}"),
            SequenceRule::List { items, then } => {
                write!(f, "[")?;
                for (i, q) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{q}")?;
                }
                write!(f, "]")?;
                match then {
                    Continuation::None => Ok(()),
                    Continuation::Repeat => write!(f, " then repeat"),
                    Continuation::Expr(e) => write!(f, " then {e}"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspec::expr::DEFAULT_TERM_BIT_BUDGET as B;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn expr_rule_terms() {
        let r = parse_sequence_expr("n*(n+1)").unwrap();
        assert_eq!(r.term(4, B).unwrap(), rat(20, 1));
        let c = parse_sequence_expr("3").unwrap();
        assert_eq!(c.term(100, B).unwrap(), rat(3, 1));
    }

    #[test]
    fn list_rule_with_continuations() {
        let items = vec![rat(1, 1), rat(0, 1), rat(3, 2)];
        let none = SequenceRule::List {
            items: items.clone(),
            then: Continuation::None,
        };
        assert_eq!(none.term(3, B).unwrap(), rat(3, 2));
        assert!(matches!(none.term(4, B), Err(Error::ListExhausted { .. })));

        let rep = SequenceRule::List {
            items: items.clone(),
            then: Continuation::Repeat,
        };
        assert_eq!(rep.term(5, B).unwrap(), rat(0, 1));

        let ext = SequenceRule::List {
            items,
            then: Continuation::Expr(parse_expr("n").unwrap()),
        };
        assert_eq!(ext.term(7, B).unwrap(), rat(7, 1));
    }

    #[test]
    fn rational_string_forms() {
        assert_eq!(parse_rational_str("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational_str("-7").unwrap(), rat(-7, 1));
        assert_eq!(parse_rational_str("0.25").unwrap(), rat(1, 4));
    }

    #[test]
    fn exact_log2_structure() {
        let r = parse_sequence_expr("2^(2^n*n)").unwrap();
        // log2 a_40 = 2^40 * 40, far beyond anything we could materialize
        let l = r.log2_exact(40, B).unwrap();
        assert_eq!(
            l,
            BigRational::from(BigInt::from(40u64) * BigInt::from(2u64).pow(40))
        );
        let s = parse_sequence_expr("3^n").unwrap();
        assert!(s.log2_exact(2, B).is_none());
        let h = parse_sequence_expr("8/2^n").unwrap();
        assert_eq!(h.log2_exact(5, B).unwrap(), rat(-2, 1));
    }
}
