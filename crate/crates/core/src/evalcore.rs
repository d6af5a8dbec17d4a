//! Tail-first evaluation of approximants.
//!
//! Right radicals have no head recurrence: the depth-n approximant is
//! computed from the innermost term outward, t_{1,n} = a_n^{1/r_n},
//! t_{i,n} = (a_{n+1-i} + t_{i-1,n})^{1/r_{n+1-i}} (weights multiply the
//! freshly extracted root, power forms exponentiate instead of extracting).
//! Internally each sweep runs with guard bits and rounds once per stored
//! value, so stored approximants are correctly rounded to within an ulp.

use crate::bounds::{tail_bound, TailBound, TailStrategy};
use crate::error::{Error, Result};
use crate::real::{check_precision, Real};
use crate::seqspec::{NormalizedSpec, RadicalKind, RadicalSpec, SpecKind};

/// Guard bits carried through a tail sweep before the final rounding.
const SWEEP_GUARD_BITS: usize = 32;

/// A depth-n approximant with a certified bound on accumulated rounding.
#[derive(Debug, Clone)]
pub struct Approximant {
    pub n: u64,
    pub value: Real,
    pub precision_bits: usize,
    /// Absolute bound on accumulated rounding error: |value| * n * 2^(3-P).
    pub rounding_bound: Real,
}

/// One full row of the triangular tail array for a depth-n approximant:
/// values[i-1] = t_{i,n}, and values[n-1] is the approximant itself.
#[derive(Debug, Clone)]
pub struct TailTable {
    pub n: u64,
    pub values: Vec<Real>,
    pub precision_bits: usize,
    pub kind: SpecKind,
}

impl TailTable {
    /// t_{i,n}, 1-based.
    pub fn tail(&self, i: u64) -> Result<&Real> {
        if i == 0 || i > self.n {
            return Err(Error::InvalidIndex { n: i });
        }
        Ok(&self.values[(i - 1) as usize])
    }

    /// The depth-n approximant t_{n,n}.
    pub fn approximant_value(&self) -> &Real {
        &self.values[(self.n - 1) as usize]
    }
}

pub fn rounding_bound_for(value: &Real, n: u64, precision_bits: usize) -> Real {
    let scale = Real::from_pow2(3 - precision_bits as i64, 64)
        .unwrap_or_else(|_| Real::zero(64));
    value
        .abs()
        .with_precision(64)
        .and_then(|v| v.mul(&Real::from_u64(n.max(1), 64)))
        .and_then(|v| v.mul(&scale))
        .unwrap_or_else(|_| Real::zero(64))
}

fn sweep(
    spec: &NormalizedSpec,
    n: u64,
    precision_bits: usize,
    keep_rows: bool,
) -> Result<(Real, Option<Vec<Real>>)> {
    check_precision(precision_bits)?;
    if n == 0 {
        return Err(Error::InvalidIndex { n });
    }
    let w = precision_bits + SWEEP_GUARD_BITS;
    let mut rows: Option<Vec<Real>> = keep_rows.then(|| Vec::with_capacity(n as usize));

    let mut t = seed_term(spec, n, w)?;
    if let Some(rows) = rows.as_mut() {
        rows.push(t.with_precision(precision_bits)?);
    }
    for idx in (1..n).rev() {
        t = layer(spec, idx, &t, w)?;
        if let Some(rows) = rows.as_mut() {
            rows.push(t.with_precision(precision_bits)?);
        }
    }
    Ok((t.with_precision(precision_bits)?, rows))
}

fn seed_term(spec: &NormalizedSpec, idx: u64, w: usize) -> Result<Real> {
    let a = spec.radicand_real(idx, w)?;
    let rooted = match spec.kind() {
        SpecKind::Power => a.pow_rational(&spec.power(idx)?)?,
        _ => a.nth_root(spec.root(idx)?)?,
    };
    apply_weight(spec, idx, rooted, w)
}

fn layer(spec: &NormalizedSpec, idx: u64, inner: &Real, w: usize) -> Result<Real> {
    let a = spec.radicand_real(idx, w)?;
    let sum = a.add(inner);
    let rooted = match spec.kind() {
        SpecKind::Power => sum.pow_rational(&spec.power(idx)?)?,
        _ => sum.nth_root(spec.root(idx)?)?,
    };
    apply_weight(spec, idx, rooted, w)
}

fn apply_weight(spec: &NormalizedSpec, idx: u64, rooted: Real, w: usize) -> Result<Real> {
    if spec.has_weights() {
        spec.weight_real(idx, w)?.mul(&rooted)
    } else {
        Ok(rooted)
    }
}

/// Depth-n approximant of a normalized spec.
pub fn approximant(spec: &NormalizedSpec, n: u64, precision_bits: usize) -> Result<Approximant> {
    let (value, _) = sweep(spec, n, precision_bits, false)?;
    Ok(Approximant {
        n,
        rounding_bound: rounding_bound_for(&value, n, precision_bits),
        value,
        precision_bits,
    })
}

/// Depth-n approximant retaining every intermediate tail t_{i,n}.
pub fn tail_table(spec: &NormalizedSpec, n: u64, precision_bits: usize) -> Result<TailTable> {
    let (_, rows) = sweep(spec, n, precision_bits, true)?;
    Ok(TailTable {
        n,
        values: rows.expect("rows were requested"),
        precision_bits,
        kind: spec.kind(),
    })
}

/// Depth-n approximant of a power form (kind check included).
pub fn power_form_approximant(
    spec: &NormalizedSpec,
    n: u64,
    precision_bits: usize,
) -> Result<Approximant> {
    if spec.kind() != SpecKind::Power {
        return Err(Error::NotApplicable {
            reason: format!("power_form_approximant on a {} spec", spec.kind()),
        });
    }
    approximant(spec, n, precision_bits)
}

/// Evaluates an un-normalized spec directly. Zero radicands are allowed here
/// (0^(1/r) = 0); this is the reference route used to check that
/// normalization preserves values.
pub fn approximant_raw(
    spec: &RadicalSpec,
    n: u64,
    precision_bits: usize,
    term_budget: u64,
) -> Result<Approximant> {
    check_precision(precision_bits)?;
    if n == 0 {
        return Err(Error::InvalidIndex { n });
    }
    let w = precision_bits + SWEEP_GUARD_BITS;
    let mut t = Real::zero(w);
    for idx in (1..=n).rev() {
        let a = Real::from_rational(&spec.a_term(idx, term_budget)?, w)?;
        let sum = a.add(&t);
        let rooted = match spec.kind {
            RadicalKind::PowerForm => {
                let p = spec.p_term(idx, term_budget)?;
                sum.pow_rational(&p)?
            }
            RadicalKind::IntegerRoot => sum.nth_root(spec.r_term(idx, term_budget)?)?,
        };
        let b = spec.b_term(idx, term_budget)?;
        t = if b == num_rational::BigRational::from(num_bigint::BigInt::from(1)) {
            rooted
        } else {
            Real::from_rational(&b, w)?.mul(&rooted)?
        };
    }
    let value = t.with_precision(precision_bits)?;
    Ok(Approximant {
        n,
        rounding_bound: rounding_bound_for(&value, n, precision_bits),
        value,
        precision_bits,
    })
}

/// Options for `limit_estimate`.
#[derive(Debug, Clone)]
pub struct LimitOptions {
    pub strategy: TailStrategy,
    /// Gap-bound window used per certification attempt.
    pub window: u64,
    pub start_n: u64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            strategy: TailStrategy::GeometricMajorization,
            window: 24,
            start_n: 2,
        }
    }
}

/// Result of a limit estimation run. `certified = false` is a result state,
/// not an error.
#[derive(Debug, Clone)]
pub struct LimitEstimate {
    pub value: Real,
    pub n_used: u64,
    pub certified: bool,
    pub tail_bound: Option<TailBound>,
    pub precision_bits: usize,
}

/// Increases depth (and precision, so rounding stays below tol/10) until the
/// bounds engine certifies the truncation tail below `tol`, or `n_max` is hit.
pub fn limit_estimate(
    spec: &NormalizedSpec,
    tol: f64,
    n_max: u64,
    precision_bits: usize,
    opts: &LimitOptions,
) -> Result<LimitEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidSpec("tolerance must be positive".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidIndex { n: 0 });
    }
    check_precision(precision_bits)?;
    let tol_real = Real::from_f64(tol, 64);
    let tol_tenth = Real::from_f64(tol / 10.0, 64);

    let mut prec = precision_bits;
    let mut n = opts.start_n.clamp(1, n_max);
    let mut last: Option<(Approximant, Option<TailBound>)> = None;
    loop {
        // refine precision until the rounding bound is below tol/10
        let appr = loop {
            let appr = approximant(spec, n, prec)?;
            if appr.rounding_bound.le(&tol_tenth) {
                break appr;
            }
            if prec >= 1 << 20 {
                return Err(Error::ExponentOverflow {
                    context: "precision escalation exceeded 2^20 bits".into(),
                });
            }
            prec *= 2;
        };
        match tail_bound(spec, n, opts.strategy, prec, opts.window) {
            Ok(tb) => {
                let done = tb.certified && tb.value.le(&tol_real);
                if done {
                    return Ok(LimitEstimate {
                        value: appr.value,
                        n_used: n,
                        certified: true,
                        tail_bound: Some(tb),
                        precision_bits: prec,
                    });
                }
                last = Some((appr, Some(tb)));
            }
            Err(
                Error::TermBudgetExceeded { .. }
                | Error::ExponentOverflow { .. }
                | Error::HorizonExhausted { .. },
            ) => {
                // terms grew past what we can even represent; no certificate
                let (appr_last, tb_last) = match last.take() {
                    Some(v) => v,
                    None => (appr, None),
                };
                return Ok(LimitEstimate {
                    value: appr_last.value,
                    n_used: appr_last.n,
                    certified: false,
                    tail_bound: tb_last,
                    precision_bits: prec,
                });
            }
            Err(e) => return Err(e),
        }
        if n >= n_max {
            let (appr_last, tb_last) = last.expect("at least one attempt recorded");
            return Ok(LimitEstimate {
                value: appr_last.value,
                n_used: appr_last.n,
                certified: false,
                tail_bound: tb_last,
                precision_bits: prec,
            });
        }
        n = (n * 2).min(n_max);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspec::{parse_sequence_expr, DEFAULT_TERM_BIT_BUDGET as B};

    fn plain(a: &str, r: &str, horizon: u64) -> NormalizedSpec {
        let spec = RadicalSpec::integer_root(
            parse_sequence_expr(a).unwrap(),
            None,
            parse_sequence_expr(r).unwrap(),
        );
        NormalizedSpec::validate_plain(&spec, horizon, B).unwrap()
    }

    fn weighted(a: &str, b: &str, r: &str, horizon: u64) -> NormalizedSpec {
        let spec = RadicalSpec::integer_root(
            parse_sequence_expr(a).unwrap(),
            Some(parse_sequence_expr(b).unwrap()),
            parse_sequence_expr(r).unwrap(),
        );
        NormalizedSpec::validate_weighted(&spec, horizon, B).unwrap()
    }

    fn dec(s: &str, p: usize) -> Real {
        Real::from_decimal_str(s, p).unwrap()
    }

    #[test]
    fn sqrt_one_plus_sqrt_one() {
        // a = (1,1), r = (2,2): v_2 = sqrt(1 + sqrt 1) = sqrt 2
        let spec = plain("1", "2", 2);
        let v = approximant(&spec, 2, 128).unwrap();
        let want = dec("1.41421356237309504880168872420969807856967188", 128);
        assert!(v.value.diff_ulps(&want) <= 1.0);
    }

    #[test]
    fn ramanujan_depth_3_is_sqrt5() {
        let spec = weighted("1", "n", "2", 3);
        let v = approximant(&spec, 3, 128).unwrap();
        let want = dec("2.23606797749978969640917366873127623544061836", 128);
        assert!(v.value.diff_ulps(&want) <= 1.0, "{}", v.value.to_decimal_string());
    }

    #[test]
    fn nested_n_depth_1_is_one() {
        // a_n = r_n = n: v_1 = 1^(1/1) = 1
        let spec = plain("n", "n", 1);
        let v = approximant(&spec, 1, 64).unwrap();
        assert_eq!(v.value.cmp(&Real::one(64)), std::cmp::Ordering::Equal);
    }

    #[test]
    fn tail_table_values_and_diagonal() {
        // a = (1,1,1), r = 2, n = 3 -> [1, sqrt2, sqrt(1+sqrt2)]
        let spec = plain("1", "2", 3);
        let t = tail_table(&spec, 3, 128).unwrap();
        assert_eq!(t.values.len(), 3);
        assert_eq!(t.tail(1).unwrap().cmp(&Real::one(128)), std::cmp::Ordering::Equal);
        let sqrt2 = dec("1.41421356237309504880168872420969807856967188", 128);
        let outer = dec("1.5537739740300373073441589530631469481645835", 128);
        assert!(t.tail(2).unwrap().diff_ulps(&sqrt2) <= 1.0);
        assert!(t.tail(3).unwrap().diff_ulps(&outer) <= 1.0);
        assert_eq!(
            t.approximant_value().cmp(t.tail(3).unwrap()),
            std::cmp::Ordering::Equal
        );

        let single = plain("2", "2", 1);
        let t1 = tail_table(&single, 1, 96).unwrap();
        assert!(t1.tail(1).unwrap().diff_ulps(&dec("1.41421356237309504880168872420969807856967188", 96)) <= 1.0);
    }

    #[test]
    fn golden_tail_reaches_phi() {
        let spec = plain("1", "2", 25);
        let t = tail_table(&spec, 25, 128).unwrap();
        let phi = dec("1.61803398874989484820458683436563811772030918", 128);
        let err = phi.sub(t.approximant_value()).abs();
        assert!(err.le(&Real::from_f64(1e-7, 64)));
    }

    #[test]
    fn power_form_reduces_to_plain_bit_for_bit() {
        // p_i = 1/2 vs r_i = 2 on the same radicands
        let p_spec = RadicalSpec::power_form(
            parse_sequence_expr("n+1").unwrap(),
            parse_sequence_expr("1/2").unwrap(),
        );
        let p_norm = NormalizedSpec::validate_power(&p_spec, 10, B).unwrap();
        let r_norm = plain("n+1", "2", 10);
        for n in [1u64, 3, 7, 10] {
            let a = power_form_approximant(&p_norm, n, 160).unwrap();
            let b = approximant(&r_norm, n, 160).unwrap();
            assert_eq!(a.value.cmp(&b.value), std::cmp::Ordering::Equal, "n = {n}");
        }
    }

    #[test]
    fn power_form_with_unit_exponents_is_a_partial_sum() {
        // p = 1, a_n = 2^-n, n = 4: 15/16
        let p_spec = RadicalSpec::power_form(
            parse_sequence_expr("1/2^n").unwrap(),
            parse_sequence_expr("1").unwrap(),
        );
        let norm = NormalizedSpec::validate_power(&p_spec, 4, B).unwrap();
        let v = power_form_approximant(&norm, 4, 96).unwrap();
        let want = Real::from_rational(
            &num_rational::BigRational::new(15.into(), 16.into()),
            96,
        )
        .unwrap();
        assert_eq!(v.value.cmp(&want), std::cmp::Ordering::Equal);
    }

    #[test]
    fn power_form_nested_closed_form() {
        // a_n = n, p_n = 1/n, n = 3: 1 + sqrt(2 + 3^(1/3))
        let p_spec = RadicalSpec::power_form(
            parse_sequence_expr("n").unwrap(),
            parse_sequence_expr("1/n").unwrap(),
        );
        let norm = NormalizedSpec::validate_power(&p_spec, 3, B).unwrap();
        let v = power_form_approximant(&norm, 3, 128).unwrap();
        let want = dec("2.85533004349830124296470905097070526629922044", 128);
        assert!(v.value.diff_ulps(&want) <= 2.0);
    }

    #[test]
    fn raw_evaluation_tolerates_zero_radicands() {
        let spec = RadicalSpec::integer_root(
            parse_sequence_expr("n-1").unwrap(), // a_1 = 0
            None,
            parse_sequence_expr("2").unwrap(),
        );
        let v = approximant_raw(&spec, 3, 96, B).unwrap();
        // sqrt(0 + sqrt(1 + sqrt 2))
        assert!(v.value.is_positive());
    }

    #[test]
    fn precision_floor_enforced() {
        let spec = plain("1", "2", 2);
        assert!(matches!(
            approximant(&spec, 2, 16),
            Err(Error::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn monotone_in_depth() {
        let spec = weighted("1", "n", "2", 12);
        let mut prev: Option<Approximant> = None;
        for n in 1..=12 {
            let cur = approximant(&spec, n, 128).unwrap();
            if let Some(p) = prev {
                let margin = p.rounding_bound.add(&cur.rounding_bound);
                assert!(
                    cur.value.add(&margin).cmp(&p.value) != std::cmp::Ordering::Less,
                    "approximants must be nondecreasing"
                );
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn refinement_shrinks_rounding_bound() {
        let spec = plain("n", "n", 20);
        let lo = approximant(&spec, 20, 64).unwrap();
        let hi = approximant(&spec, 20, 128).unwrap();
        assert!(hi.rounding_bound.lt(&lo.rounding_bound));
        let diff = lo.value.sub(&hi.value).abs();
        assert!(diff.le(&lo.rounding_bound), "refinement stays within the bound");
    }
}
