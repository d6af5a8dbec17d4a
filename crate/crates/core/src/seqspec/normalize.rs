//! Normalization transforms: zero elimination and weight folding.
//!
//! Both transforms are computed termwise up to a caller-supplied horizon;
//! the results are materialized so later evaluation is pure table lookup.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{RadicalKind, RadicalSpec};
use crate::error::{Error, Result};
use crate::real::Real;

/// Shape of a normalized spec as seen by the evaluation engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecKind {
    /// Plain nested integer roots, all radicands > 0.
    Plain,
    /// Weighted nested integer roots evaluated directly.
    Weighted,
    /// Nested positive exponents.
    Power,
}

impl std::fmt::Display for SpecKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpecKind::Plain => "plain",
            SpecKind::Weighted => "weighted",
            SpecKind::Power => "power",
        })
    }
}

/// A materialized term: exact while it fits the digit budget, then a
/// high-precision approximation.
#[derive(Debug, Clone)]
pub enum TermValue {
    Exact(BigRational),
    Approx(Real),
}

/// Records whether and how weights were folded.
#[derive(Debug, Clone, Default)]
pub struct FoldLog {
    pub folded: bool,
    /// First 1-based index whose folded radicand is approximate, if any.
    pub approx_from: Option<u64>,
    /// Precision at which approximate folded terms were computed.
    pub approx_precision_bits: Option<usize>,
}

/// Options for `fold_weights`.
#[derive(Debug, Clone)]
pub struct FoldOptions {
    /// Max size of an exact folded radicand in decimal digits.
    pub digit_budget: usize,
    /// Working precision of approximate folded radicands.
    pub approx_precision_bits: usize,
    /// Bit budget for evaluating source-sequence terms.
    pub term_bit_budget: u64,
}

impl Default for FoldOptions {
    fn default() -> Self {
        FoldOptions {
            digit_budget: 100_000,
            approx_precision_bits: 1024,
            term_bit_budget: super::DEFAULT_TERM_BIT_BUDGET,
        }
    }
}

/// A spec in evaluation-ready form: positivity certified, zeros eliminated
/// and/or weights folded where requested, with the index correspondence and
/// fold provenance attached.
#[derive(Debug, Clone)]
pub struct NormalizedSpec {
    kind: SpecKind,
    source: RadicalSpec,
    /// Materialized radicands (zero elimination or folding); `None` means
    /// terms come from the source rules.
    terms: Option<Vec<TermValue>>,
    /// Materialized merged roots, parallel to `terms`.
    roots: Option<Vec<u64>>,
    /// 1-based original index of each normalized index.
    index_map: Option<Vec<u64>>,
    pub fold_log: FoldLog,
    term_budget: u64,
}

impl NormalizedSpec {
    pub fn kind(&self) -> SpecKind {
        self.kind
    }

    pub fn source(&self) -> &RadicalSpec {
        &self.source
    }

    pub fn label(&self) -> Option<&str> {
        self.source.label.as_deref()
    }

    pub fn term_budget(&self) -> u64 {
        self.term_budget
    }

    /// Number of materialized indices, if the spec is materialized.
    pub fn materialized_len(&self) -> Option<u64> {
        self.terms.as_ref().map(|t| t.len() as u64)
    }

    pub fn index_map(&self) -> Option<&[u64]> {
        self.index_map.as_deref()
    }

    fn check_materialized(&self, i: u64) -> Result<()> {
        if let Some(len) = self.materialized_len() {
            if i > len {
                return Err(Error::HorizonExhausted {
                    horizon: len,
                    reason: format!("normalized index {i} was not materialized"),
                });
            }
        }
        Ok(())
    }

    /// Radicand as an exact rational; `None` if this index was folded
    /// approximately.
    pub fn radicand_rational(&self, i: u64) -> Result<Option<BigRational>> {
        if i == 0 {
            return Err(Error::InvalidIndex { n: i });
        }
        self.check_materialized(i)?;
        match &self.terms {
            Some(terms) => match &terms[(i - 1) as usize] {
                TermValue::Exact(q) => Ok(Some(q.clone())),
                TermValue::Approx(_) => Ok(None),
            },
            None => {
                let q = self.source.a_term(i, self.term_budget)?;
                if q.is_zero() {
                    return Err(Error::ZeroRadicand { n: i });
                }
                Ok(Some(q))
            }
        }
    }

    /// Radicand at working precision.
    pub fn radicand_real(&self, i: u64, prec: usize) -> Result<Real> {
        match self.radicand_rational(i) {
            Ok(Some(q)) => Real::from_rational(&q, prec),
            Ok(None) => {
                let terms = self.terms.as_ref().expect("approx implies materialized");
                let TermValue::Approx(v) = &terms[(i - 1) as usize] else {
                    unreachable!()
                };
                if prec + 32 > v.prec() {
                    return Err(Error::NotApplicable {
                        reason: format!(
                            "folded radicand {i} is stored at {} bits, too coarse for a {} bit evaluation",
                            v.prec(),
                            prec
                        ),
                    });
                }
                v.with_precision(prec)
            }
            Err(e) => Err(e),
        }
    }

    pub fn weight_rational(&self, i: u64) -> Result<BigRational> {
        match self.kind {
            SpecKind::Weighted => self.source.b_term(i, self.term_budget),
            _ => Ok(BigRational::one()),
        }
    }

    pub fn weight_real(&self, i: u64, prec: usize) -> Result<Real> {
        Real::from_rational(&self.weight_rational(i)?, prec)
    }

    pub fn has_weights(&self) -> bool {
        self.kind == SpecKind::Weighted
    }

    /// Root index r_i (Plain/Weighted kinds).
    pub fn root(&self, i: u64) -> Result<u64> {
        if i == 0 {
            return Err(Error::InvalidIndex { n: i });
        }
        if let Some(roots) = &self.roots {
            self.check_materialized(i)?;
            return Ok(roots[(i - 1) as usize]);
        }
        match self.kind {
            SpecKind::Power => Err(Error::NotApplicable {
                reason: "power-form spec has exponents, not integer roots".into(),
            }),
            _ => self.source.r_term(i, self.term_budget),
        }
    }

    /// Exponent p_i (Power kind).
    pub fn power(&self, i: u64) -> Result<BigRational> {
        match self.kind {
            SpecKind::Power => self.source.p_term(i, self.term_budget),
            _ => Err(Error::NotApplicable {
                reason: "integer-root spec has roots, not exponents".into(),
            }),
        }
    }

    /// Validation-only normalization for a plain spec (no weights, no zeros).
    pub fn validate_plain(spec: &RadicalSpec, horizon: u64, budget: u64) -> Result<NormalizedSpec> {
        if spec.kind != RadicalKind::IntegerRoot {
            return Err(Error::NotApplicable {
                reason: "plain validation requires an integer-root spec".into(),
            });
        }
        if spec.has_weights() {
            return Err(Error::NotApplicable {
                reason: "spec has weights; validate as weighted or fold first".into(),
            });
        }
        let out = NormalizedSpec {
            kind: SpecKind::Plain,
            source: spec.clone(),
            terms: None,
            roots: None,
            index_map: None,
            fold_log: FoldLog::default(),
            term_budget: budget,
        };
        for i in 1..=horizon {
            match out.radicand_rational(i) {
                Err(Error::TermBudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
                Ok(_) => {}
            }
            out.root(i)?;
        }
        Ok(out)
    }

    /// Validation-only normalization for a weighted spec.
    pub fn validate_weighted(
        spec: &RadicalSpec,
        horizon: u64,
        budget: u64,
    ) -> Result<NormalizedSpec> {
        if spec.kind != RadicalKind::IntegerRoot {
            return Err(Error::NotApplicable {
                reason: "weighted validation requires an integer-root spec".into(),
            });
        }
        let out = NormalizedSpec {
            kind: SpecKind::Weighted,
            source: spec.clone(),
            terms: None,
            roots: None,
            index_map: None,
            fold_log: FoldLog::default(),
            term_budget: budget,
        };
        for i in 1..=horizon {
            match out.radicand_rational(i) {
                Err(Error::TermBudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
                Ok(_) => {}
            }
            out.weight_rational(i)?;
            out.root(i)?;
        }
        Ok(out)
    }

    /// Validation-only normalization for a power form.
    pub fn validate_power(spec: &RadicalSpec, horizon: u64, budget: u64) -> Result<NormalizedSpec> {
        if spec.kind != RadicalKind::PowerForm {
            return Err(Error::NotApplicable {
                reason: "power validation requires a power-form spec".into(),
            });
        }
        let out = NormalizedSpec {
            kind: SpecKind::Power,
            source: spec.clone(),
            terms: None,
            roots: None,
            index_map: None,
            fold_log: FoldLog::default(),
            term_budget: budget,
        };
        for i in 1..=horizon {
            match out.radicand_rational(i) {
                Err(Error::TermBudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
                Ok(_) => {}
            }
            out.power(i)?;
        }
        Ok(out)
    }

    /// Dispatching normalization: zero-eliminates plain specs that need it,
    /// otherwise validates in place.
    pub fn normalize(spec: &RadicalSpec, horizon: u64, budget: u64) -> Result<NormalizedSpec> {
        match spec.kind {
            RadicalKind::PowerForm => NormalizedSpec::validate_power(spec, horizon, budget),
            RadicalKind::IntegerRoot if spec.has_weights() => {
                NormalizedSpec::validate_weighted(spec, horizon, budget)
            }
            RadicalKind::IntegerRoot => {
                let mut has_zero = false;
                for i in 1..=horizon {
                    match spec.a_term(i, budget) {
                        Ok(a) => {
                            if a.is_zero() {
                                has_zero = true;
                                break;
                            }
                        }
                        // terms beyond the budget cannot be zero-scanned;
                        // evaluation reaching them reports the same error
                        Err(Error::TermBudgetExceeded { .. }) => break,
                        Err(e) => return Err(e),
                    }
                }
                if has_zero {
                    eliminate_zeros(spec, horizon, budget)
                } else {
                    NormalizedSpec::validate_plain(spec, horizon, budget)
                }
            }
        }
    }
}

/// Drops zero radicands by merging their root indices into the next layer:
/// a zero at index k turns `r_k, r_{k+1}` into the single root `r_k * r_{k+1}`
/// around the next positive radicand. The index map records, for each
/// produced index, the original index it came from.
pub fn eliminate_zeros(spec: &RadicalSpec, horizon: u64, budget: u64) -> Result<NormalizedSpec> {
    if spec.kind != RadicalKind::IntegerRoot {
        return Err(Error::NotApplicable {
            reason: "zero elimination applies to integer-root specs".into(),
        });
    }
    if spec.has_weights() {
        return Err(Error::NotApplicable {
            reason: "zero elimination of weighted specs is not supported; the transform is defined for plain radicals".into(),
        });
    }
    if horizon == 0 {
        return Err(Error::InvalidIndex { n: 0 });
    }
    let mut terms: Vec<TermValue> = Vec::new();
    let mut roots: Vec<u64> = Vec::new();
    let mut index_map: Vec<u64> = Vec::new();
    let mut pending: u64 = 1; // product of merged roots from preceding zeros
    for i in 1..=horizon {
        let a = spec.a_term(i, budget)?;
        let r = spec.r_term(i, budget)?;
        let merged = pending
            .checked_mul(r)
            .ok_or(Error::RootProductOverflow { n: i })?;
        if a.is_zero() {
            pending = merged;
        } else {
            terms.push(TermValue::Exact(a));
            roots.push(merged);
            index_map.push(i);
            pending = 1;
        }
    }
    if terms.is_empty() || pending != 1 {
        return Err(Error::HorizonExhausted {
            horizon,
            reason: "trailing zero radicands: cannot certify a next positive term".into(),
        });
    }
    Ok(NormalizedSpec {
        kind: SpecKind::Plain,
        source: spec.clone(),
        terms: Some(terms),
        roots: Some(roots),
        index_map: Some(index_map),
        fold_log: FoldLog::default(),
        term_budget: budget,
    })
}

/// Brings the weights inside, replacing radicands by the fold values
/// c_i = a_i * (c_{i-1} * b_i / a_{i-1})^{r_i} with a_0 = b_0 = c_0 = 1.
/// Exact rational arithmetic is used until a fold value exceeds the digit
/// budget, after which values continue as high-precision reals and the spec
/// is flagged approximately folded.
pub fn fold_weights(spec: &RadicalSpec, horizon: u64, opts: &FoldOptions) -> Result<NormalizedSpec> {
    if spec.kind != RadicalKind::IntegerRoot {
        return Err(Error::NotApplicable {
            reason: "weight folding applies to integer-root specs".into(),
        });
    }
    if horizon == 0 {
        return Err(Error::InvalidIndex { n: 0 });
    }
    let budget = opts.term_bit_budget;
    let bit_budget = (opts.digit_budget as f64 * std::f64::consts::LOG2_10) as u64;
    let ap = opts.approx_precision_bits;

    let mut terms: Vec<TermValue> = Vec::with_capacity(horizon as usize);
    let mut roots: Vec<u64> = Vec::with_capacity(horizon as usize);
    let mut index_map: Vec<u64> = Vec::with_capacity(horizon as usize);
    let mut approx_from: Option<u64> = None;

    let mut prev_a = BigRational::one();
    let mut exact_c: Option<BigRational> = Some(BigRational::one());
    let mut approx_c: Option<Real> = None;

    for i in 1..=horizon {
        let a = spec.a_term(i, budget)?;
        if a.is_zero() {
            return Err(Error::ZeroRadicand { n: i });
        }
        let b = spec.b_term(i, budget)?;
        let r = spec.r_term(i, budget)?;
        let r_usize: usize = r.try_into().map_err(|_| Error::RootProductOverflow { n: i })?;
        if r_usize > (1 << 31) {
            return Err(Error::RootProductOverflow { n: i });
        }

        if let Some(c_prev) = &exact_c {
            // projected size check before the exact power
            let base = c_prev * &b / &prev_a;
            let base_bits = base.numer().bits() + base.denom().bits();
            if base_bits.saturating_mul(r) <= bit_budget {
                let powed = BigRational::new_raw(
                    base.numer().pow(r as u32),
                    base.denom().pow(r as u32),
                );
                let c = &a * powed;
                terms.push(TermValue::Exact(c.clone()));
                roots.push(r);
                index_map.push(i);
                exact_c = Some(c);
                prev_a = a;
                continue;
            }
            // switch to the approximate track
            approx_c = Some(Real::from_rational(c_prev, ap)?);
            exact_c = None;
            approx_from = Some(i);
        }

        let c_prev = approx_c.as_ref().expect("approx track active");
        let b_real = Real::from_rational(&b, ap)?;
        let prev_a_real = Real::from_rational(&prev_a, ap)?;
        let a_real = Real::from_rational(&a, ap)?;
        let base = c_prev.mul(&b_real)?.div(&prev_a_real)?;
        let powed = base.powi(r).map_err(|_| Error::ExponentOverflow {
            context: format!("folded radicand c_{i} exceeds the precision budget"),
        })?;
        let c = a_real.mul(&powed)?;
        terms.push(TermValue::Approx(c.clone()));
        roots.push(r);
        index_map.push(i);
        approx_c = Some(c);
        prev_a = a;
    }

    Ok(NormalizedSpec {
        kind: SpecKind::Plain,
        source: spec.clone(),
        terms: Some(terms),
        roots: Some(roots),
        index_map: Some(index_map),
        fold_log: FoldLog {
            folded: true,
            approx_from,
            approx_precision_bits: approx_from.map(|_| ap),
        },
        term_budget: budget,
    })
}
