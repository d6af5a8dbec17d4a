//! Working-precision real numbers.
//!
//! Thin wrapper around `astro_float::BigFloat` that pins the conventions the
//! rest of the crate relies on:
//!
//! * every value carries its working precision in bits;
//! * roots and rational powers go through one `exp(ln(x) * p)` path computed
//!   with guard bits and rounded once to the working precision, so the same
//!   exponent always produces the same bits regardless of which API asked;
//! * non-finite results are surfaced as errors, never as NaN/Inf values.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Smallest accepted working precision.
pub const MIN_PRECISION_BITS: usize = 32;
/// Default working precision.
pub const DEFAULT_PRECISION_BITS: usize = 128;
/// Extra bits used inside composite operations before the final rounding.
const GUARD_BITS: usize = 32;
/// Exact decimal rendering shifts big integers around; beyond this binary
/// exponent magnitude we switch to a logarithm-based rendering.
const EXACT_RENDER_EXP_LIMIT: i64 = 1 << 22;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// An arbitrary-precision real value tagged with its working precision.
#[derive(Clone, Debug)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

pub fn check_precision(bits: usize) -> Result<()> {
    if bits < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow {
            bits,
            min: MIN_PRECISION_BITS,
        });
    }
    Ok(())
}

fn biguint_to_bigfloat(u: &BigUint) -> Result<BigFloat> {
    if u.is_zero() {
        return Ok(BigFloat::from_u8(0, WORD_BIT_SIZE));
    }
    let bytes = u.to_bytes_le();
    let word_bytes = WORD_BIT_SIZE / 8;
    let nwords = bytes.len().div_ceil(word_bytes);
    let mut words: Vec<Word> = Vec::with_capacity(nwords);
    for chunk in bytes.chunks(word_bytes) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        words.push(Word::from_le_bytes(buf));
    }
    let e = (nwords * WORD_BIT_SIZE) as i64;
    if e > i32::MAX as i64 {
        return Err(Error::ExponentOverflow {
            context: "converting an integer wider than the exponent range".into(),
        });
    }
    // from_words() interprets the words as value * 2^(e - bits), so e = bits
    // reproduces the integer exactly.
    let f = BigFloat::from_words(&words, Sign::Pos, e as i32);
    if f.is_nan() {
        return Err(Error::Internal("integer to float conversion failed".into()));
    }
    Ok(f)
}

impl Real {
    fn wrap(v: BigFloat, prec: usize, context: &str) -> Result<Real> {
        if v.is_nan() || v.is_inf() {
            return Err(Error::ExponentOverflow {
                context: context.to_string(),
            });
        }
        Ok(Real { v, prec })
    }

    pub fn zero(prec: usize) -> Real {
        Real {
            v: BigFloat::from_u8(0, prec),
            prec,
        }
    }

    pub fn one(prec: usize) -> Real {
        Real {
            v: BigFloat::from_u8(1, prec),
            prec,
        }
    }

    pub fn from_u64(u: u64, prec: usize) -> Real {
        Real {
            v: BigFloat::from_u64(u, prec),
            prec,
        }
    }

    pub fn from_f64(x: f64, prec: usize) -> Real {
        Real {
            v: BigFloat::from_f64(x, prec),
            prec,
        }
    }

    /// 2^k as an exact value.
    pub fn from_pow2(k: i64, prec: usize) -> Result<Real> {
        let e = k + 1;
        if e > i32::MAX as i64 || e < (i32::MIN as i64) + 1 {
            return Err(Error::ExponentOverflow {
                context: format!("constructing 2^{k}"),
            });
        }
        let mut v = BigFloat::from_u8(1, prec);
        v.set_exponent(e as i32);
        Ok(Real { v, prec })
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_rational(q: &BigRational, prec: usize) -> Result<Real> {
        let num = biguint_to_bigfloat(q.numer().magnitude())?;
        let den = biguint_to_bigfloat(q.denom().magnitude())?;
        let mut v = num.div(&den, prec, RM);
        if q.is_negative() {
            v.inv_sign();
        }
        Real::wrap(v, prec, "rational to real conversion")
    }

    pub fn from_bigint(i: &BigInt, prec: usize) -> Result<Real> {
        let mut v = biguint_to_bigfloat(i.magnitude())?;
        if i.is_negative() {
            v.inv_sign();
        }
        let mut v2 = v;
        v2.set_precision(prec.max(WORD_BIT_SIZE), RM)
            .map_err(|_| Error::Internal("set_precision failed".into()))?;
        Real::wrap(v2, prec, "integer to real conversion")
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.v
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.v.is_positive() && !self.v.is_zero()
    }

    /// Binary exponent: value magnitude is in [2^(e-1), 2^e). Zero reports i64::MIN.
    pub fn exponent2(&self) -> i64 {
        if self.v.is_zero() {
            return i64::MIN;
        }
        self.v.exponent().map(|e| e as i64).unwrap_or(i64::MIN)
    }

    /// Rounds (a copy of) the value to `prec` bits.
    pub fn with_precision(&self, prec: usize) -> Result<Real> {
        let mut v = self.v.clone();
        v.set_precision(prec, RM)
            .map_err(|_| Error::Internal("set_precision failed".into()))?;
        Real::wrap(v, prec, "rounding to target precision")
    }

    fn join(&self, o: &Real) -> usize {
        self.prec.max(o.prec)
    }

    pub fn add(&self, o: &Real) -> Real {
        let p = self.join(o);
        Real {
            v: self.v.add(&o.v, p, RM),
            prec: p,
        }
    }

    pub fn sub(&self, o: &Real) -> Real {
        let p = self.join(o);
        Real {
            v: self.v.sub(&o.v, p, RM),
            prec: p,
        }
    }

    pub fn mul(&self, o: &Real) -> Result<Real> {
        let p = self.join(o);
        Real::wrap(self.v.mul(&o.v, p, RM), p, "multiplication")
    }

    pub fn div(&self, o: &Real) -> Result<Real> {
        if o.is_zero() {
            return Err(Error::Internal("division by zero real".into()));
        }
        let p = self.join(o);
        Real::wrap(self.v.div(&o.v, p, RM), p, "division")
    }

    pub fn neg(&self) -> Real {
        Real {
            v: self.v.neg(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Real {
        let mut v = self.v.clone();
        v.set_sign(Sign::Pos);
        if self.v.is_zero() {
            return self.clone();
        }
        Real { v, prec: self.prec }
    }

    /// Integer power by squaring (exponent >= 0).
    pub fn powi(&self, k: u64) -> Result<Real> {
        if k == 0 {
            return Ok(Real::one(self.prec));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        Real::wrap(self.v.powi(k as usize, self.prec, RM), self.prec, "powi")
    }

    pub fn ln(&self) -> Result<Real> {
        if !self.is_positive() {
            return Err(Error::Internal("ln of a non-positive value".into()));
        }
        let v = with_consts(|cc| self.v.ln(self.prec, RM, cc));
        Real::wrap(v, self.prec, "ln")
    }

    pub fn exp(&self) -> Result<Real> {
        let v = with_consts(|cc| self.v.exp(self.prec, RM, cc));
        Real::wrap(v, self.prec, "exp")
    }

    pub fn sqrt(&self) -> Result<Real> {
        if self.is_negative() {
            return Err(Error::Internal("sqrt of a negative value".into()));
        }
        Real::wrap(self.v.sqrt(self.prec, RM), self.prec, "sqrt")
    }

    /// x^(num/den) for x > 0, through exp(ln(x) * num / den) at guard
    /// precision with one final rounding. Fast paths: p = 0, 1, 1/2 and
    /// integer p. The num = 1 case performs exactly the same operation
    /// sequence as an integer root, so p = 1/r and root r agree bit for bit.
    pub fn pow_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Real> {
        if den.is_zero() {
            return Err(Error::Internal("rational exponent with zero denominator".into()));
        }
        let mut num = num.clone();
        let mut den = den.clone();
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if num.is_zero() {
            return Ok(Real::one(self.prec));
        }
        if self.is_zero() {
            if num.is_negative() {
                return Err(Error::Internal("zero raised to a negative power".into()));
            }
            return Ok(Real::zero(self.prec));
        }
        if self.is_negative() {
            return Err(Error::Internal("rational power of a negative value".into()));
        }
        if num == den {
            return Ok(self.clone());
        }
        // p = 1/2 -> native square root (correctly rounded, and the anchor
        // for the r = 2 integer-root case).
        if den == BigInt::from(2u8) && num.is_one() {
            return self.sqrt();
        }
        if den.is_one() {
            if let Some(k) = num.to_i64() {
                if (0..=(1i64 << 31)).contains(&k) {
                    return self.powi(k as u64);
                }
                if (-(1i64 << 31)..0).contains(&k) {
                    let r = self.powi((-k) as u64)?;
                    return Real::one(self.prec).div(&r);
                }
            }
        }
        let w = self.prec + GUARD_BITS;
        // small exponents over dyadic (optionally x3) denominators go through
        // sqrt/cbrt chains, which are several times cheaper than exp/ln
        if let (Some(nk), Some(dk)) = (num.to_i64(), den.to_u64()) {
            let twos = dk.trailing_zeros();
            let odd = dk >> twos;
            if nk.unsigned_abs() <= 64 && twos <= 6 && (odd == 1 || odd == 3) {
                let mut y = self.with_precision(w)?.powi(nk.unsigned_abs())?;
                if odd == 3 {
                    y = Real::wrap(y.v.cbrt(w, RM), w, "cbrt")?;
                }
                for _ in 0..twos {
                    y = y.sqrt()?;
                }
                if nk < 0 {
                    y = Real::one(w).div(&y)?;
                }
                return y.with_precision(self.prec);
            }
        }
        let l = with_consts(|cc| self.v.ln(w, RM, cc));
        if l.is_nan() {
            return Err(Error::Internal("ln failed in pow".into()));
        }
        let numf = {
            let mut f = biguint_to_bigfloat(num.magnitude())?;
            if num.is_negative() {
                f.inv_sign();
            }
            f
        };
        let denf = biguint_to_bigfloat(den.magnitude())?;
        let scaled = l.mul(&numf, w, RM).div(&denf, w, RM);
        let v = with_consts(|cc| scaled.exp(w, RM, cc));
        let mut v = v;
        if v.is_nan() || v.is_inf() {
            return Err(Error::ExponentOverflow {
                context: "rational power".into(),
            });
        }
        v.set_precision(self.prec, RM)
            .map_err(|_| Error::Internal("set_precision failed".into()))?;
        Real::wrap(v, self.prec, "rational power")
    }

    pub fn pow_rational(&self, p: &BigRational) -> Result<Real> {
        self.pow_ratio(p.numer(), p.denom())
    }

    /// r-th root for integer r >= 1.
    pub fn nth_root(&self, r: u64) -> Result<Real> {
        if r == 0 {
            return Err(Error::Internal("0th root".into()));
        }
        self.pow_ratio(&BigInt::one(), &BigInt::from(r))
    }

    /// 2^q for rational q; exact (shift) when q is an integer.
    pub fn exp2_rational(q: &BigRational, prec: usize) -> Result<Real> {
        if q.is_integer() {
            if let Some(k) = q.to_integer().to_i64() {
                return Real::from_pow2(k, prec);
            }
            return Err(Error::ExponentOverflow {
                context: "2^q with huge integer q".into(),
            });
        }
        Real::from_u64(2, prec + GUARD_BITS).pow_rational(q)?.with_precision(prec)
    }

    pub fn try_cmp(&self, o: &Real) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|s| s.cmp(&0))
    }

    /// Total order; panics only on NaN, which constructors never let escape.
    pub fn cmp(&self, o: &Real) -> Ordering {
        self.try_cmp(o).expect("comparison of finite reals")
    }

    pub fn lt(&self, o: &Real) -> bool {
        self.cmp(o) == Ordering::Less
    }

    pub fn le(&self, o: &Real) -> bool {
        self.cmp(o) != Ordering::Greater
    }

    pub fn max_of(&self, o: &Real) -> Real {
        if self.cmp(o) == Ordering::Less {
            o.clone()
        } else {
            self.clone()
        }
    }

    /// One unit in the last place at this value's working precision.
    pub fn ulp(&self) -> Real {
        let e = if self.v.is_zero() {
            -(self.prec as i64)
        } else {
            self.exponent2() - self.prec as i64
        };
        Real::from_pow2(e, MIN_PRECISION_BITS).unwrap_or_else(|_| Real::zero(MIN_PRECISION_BITS))
    }

    /// |self - o| measured in ulps of the wider-magnitude operand.
    pub fn diff_ulps(&self, o: &Real) -> f64 {
        let d = self.sub(o).abs();
        if d.is_zero() {
            return 0.0;
        }
        let u = self.ulp().max_of(&o.ulp());
        d.div(&u).map(|r| r.to_f64()).unwrap_or(f64::INFINITY)
    }

    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, e, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        let n = words.len();
        let mut m = 0.0f64;
        if n >= 1 {
            m += words[n - 1] as f64 / 2f64.powi(WORD_BIT_SIZE as i32);
        }
        if n >= 2 {
            m += words[n - 2] as f64 / 2f64.powi(2 * WORD_BIT_SIZE as i32);
        }
        let e = e as i64;
        let mag = if e > 1040 {
            f64::INFINITY
        } else if e < -1080 {
            0.0
        } else {
            let half = (e / 2) as i32;
            let rest = (e - half as i64) as i32;
            m * 2f64.powi(half) * 2f64.powi(rest)
        };
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    fn mantissa_biguint(&self) -> Option<(BigUint, i64)> {
        let (words, _, _, e, _) = self.v.as_raw_parts()?;
        let word_bytes = WORD_BIT_SIZE / 8;
        let mut bytes = Vec::with_capacity(words.len() * word_bytes);
        for w in words {
            bytes.extend_from_slice(&w.to_le_bytes()[..word_bytes]);
        }
        let m = BigUint::from_bytes_le(&bytes);
        let shift = (words.len() * WORD_BIT_SIZE) as i64;
        Some((m, e as i64 - shift))
    }

    /// Number of significant decimal digits that round-trip at `prec` bits.
    pub fn decimal_digits_for(prec: usize) -> usize {
        (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
    }

    /// Deterministic scientific-notation decimal string with exactly enough
    /// digits to round-trip at the working precision.
    pub fn to_decimal_string(&self) -> String {
        if self.v.is_zero() {
            return "0".to_string();
        }
        // the stored mantissa is padded up to a word multiple; size the
        // digit count for what is actually stored so parsing recovers the
        // exact value
        let stored_bits = self.v.precision().unwrap_or(self.prec).max(self.prec);
        let digits = Self::decimal_digits_for(stored_bits);
        let neg = self.is_negative();
        let Some((m, e)) = self.mantissa_biguint() else {
            return "NaN".to_string();
        };
        if e.abs() <= EXACT_RENDER_EXP_LIMIT {
            render_exact(&m, e, digits, neg)
        } else {
            self.render_via_log(digits, neg)
        }
    }

    fn render_via_log(&self, digits: usize, neg: bool) -> String {
        // Magnitude is too extreme for exact integer scaling; recover the
        // decimal exponent through logarithms at modest precision.
        let p = 96;
        let x = self.abs().with_precision(p).unwrap_or_else(|_| Real::one(p));
        let l10 = match (|| -> Result<Real> {
            let ln10 = Real::from_u64(10, p).ln()?;
            x.ln()?.div(&ln10)
        })() {
            Ok(v) => v,
            Err(_) => return "NaN".to_string(),
        };
        let k = l10.to_f64().floor();
        let frac = l10.sub(&Real::from_f64(k, p));
        let mant = (|| -> Result<Real> {
            let ln10 = Real::from_u64(10, p).ln()?;
            frac.mul(&ln10)?.exp()
        })();
        let mant = match mant {
            Ok(v) => v,
            Err(_) => return "NaN".to_string(),
        };
        let (mm, me) = match mant.mantissa_biguint() {
            Some(t) => t,
            None => return "NaN".to_string(),
        };
        let digits = digits.min(24);
        let body = render_exact(&mm, me, digits, neg);
        // body is "d.ddd...e+0"-ish; splice in the true exponent.
        let mantissa_part = body.split('e').next().unwrap_or(&body).to_string();
        format!("{mantissa_part}e{}{}", if k >= 0.0 { "+" } else { "" }, k as i64)
    }

    /// Parses a decimal string produced by `to_decimal_string`.
    pub fn from_decimal_str(s: &str, prec: usize) -> Result<Real> {
        let q = parse_decimal_rational(s)?;
        Real::from_rational(&q, prec)
    }
}

fn pow10(t: u64) -> BigUint {
    BigUint::from(10u8).pow(t as u32)
}

/// Compare m * 2^e with 10^t (t may be negative).
fn cmp_pow10(m: &BigUint, e: i64, t: i64) -> Ordering {
    let mut lhs = m.clone();
    let mut rhs = if t >= 0 {
        pow10(t as u64)
    } else {
        lhs *= pow10((-t) as u64);
        BigUint::one()
    };
    if e >= 0 {
        lhs <<= e as u64;
    } else {
        rhs <<= (-e) as u64;
    }
    lhs.cmp(&rhs)
}

fn render_exact(m: &BigUint, e: i64, digits: usize, neg: bool) -> String {
    // decimal exponent k with 10^k <= m*2^e < 10^(k+1)
    let approx_bits = m.bits() as i64 + e;
    let mut k = ((approx_bits as f64) * std::f64::consts::LOG10_2).floor() as i64 - 1;
    while cmp_pow10(m, e, k + 1) != Ordering::Less {
        k += 1;
    }
    while cmp_pow10(m, e, k) == Ordering::Less {
        k -= 1;
    }
    // I = round(m * 2^e * 10^(digits-1-k)), round half to even
    let s = digits as i64 - 1 - k;
    let mut num = m.clone();
    let mut den = BigUint::one();
    if s >= 0 {
        num *= pow10(s as u64);
    } else {
        den *= pow10((-s) as u64);
    }
    if e >= 0 {
        num <<= e as u64;
    } else {
        den <<= (-e) as u64;
    }
    let (mut q, r) = num_integer::Integer::div_rem(&num, &den);
    let twice = &r * 2u8;
    match twice.cmp(&den) {
        Ordering::Greater => q += 1u8,
        Ordering::Equal => {
            if num_integer::Integer::is_odd(&q) {
                q += 1u8;
            }
        }
        Ordering::Less => {}
    }
    let mut ds = q.to_string();
    if ds.len() > digits {
        // rounding carried into a new leading digit (e.g. 9999 -> 10000)
        ds.truncate(digits);
        k += 1;
    }
    debug_assert_eq!(ds.len(), digits);
    let (head, tail) = ds.split_at(1);
    let sign = if neg { "-" } else { "" };
    let esign = if k >= 0 { "+" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{esign}{k}")
    } else {
        format!("{sign}{head}.{tail}e{esign}{k}")
    }
}

/// "±d.ddd...e±k" or plain integers/decimals into an exact rational.
pub fn parse_decimal_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::EmptyExpression);
    }
    let (s, neg) = match s.strip_prefix('-') {
        Some(rest) => (rest, true),
        None => (s.strip_prefix('+').unwrap_or(s), false),
    };
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad exponent in decimal `{s}`")))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::InvalidSpec(format!("bad decimal `{s}`")));
    }
    let digits: String = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::InvalidSpec(format!("bad decimal `{s}`")));
    }
    let num: BigInt = digits
        .parse()
        .map_err(|_| Error::InvalidSpec(format!("bad decimal `{s}`")))?;
    let scale = frac_part.len() as i64 - exp;
    let q = if scale >= 0 {
        BigRational::new(num, BigInt::from(10u8).pow(scale as u32))
    } else {
        BigRational::from(num * BigInt::from(10u8).pow((-scale) as u32))
    };
    Ok(if neg { -q } else { q })
}
