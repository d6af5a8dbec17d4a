//! Finite-horizon convergence diagnostics.
//!
//! These implement the classical limsup-style criteria as *heuristics*: a
//! limsup cannot be decided from finitely many terms, so every report carries
//! a caveat and the verdicts are indicative. Certified convergence statements
//! come from the bounds module's tail certificates, not from here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bounds::gap_bound_herschfeld_with_row;
use crate::error::{Error, Result};
use crate::evalcore::tail_table;
use crate::real::{check_precision, Real};
use crate::seqspec::{rule::log2_rational, NormalizedSpec, SpecKind};

/// Fixed caveat attached to every report.
pub const FINITE_HORIZON_CAVEAT: &str = "finite-horizon heuristic: limsup criteria cannot be \
decided from finitely many terms; verdicts are indicative, certified statements come from \
gap/tail bounds";

/// Indicator values past this log2 magnitude are clamped; anything that big
/// settles the verdict anyway.
const INDICATOR_LOG2_CAP: i64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    LooksConvergent,
    LooksDivergent,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::LooksConvergent => "looks_convergent",
            Verdict::LooksDivergent => "looks_divergent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// log log a_n / n with the convention that a_n <= 1 maps to -infinity.
#[derive(Debug, Clone)]
pub enum AlphaValue {
    NegInfinity,
    Value(Real),
}

impl AlphaValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            AlphaValue::NegInfinity => f64::NEG_INFINITY,
            AlphaValue::Value(v) => v.to_f64(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiagnosticsOptions {
    /// Relative flatness threshold for stabilization checks.
    pub flatness_threshold: f64,
    /// Fraction of the horizon treated as the stabilization window.
    pub window_frac: f64,
    pub precision_bits: usize,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        DiagnosticsOptions {
            flatness_threshold: 1e-3,
            window_frac: 0.25,
            precision_bits: 128,
        }
    }
}

/// Finite-horizon diagnostics. Fields not populated by a given criterion are
/// left empty.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub horizon: u64,
    /// a_n^(e_n) with e_n = 2^-n (square roots) or p_1...p_n (power forms).
    pub herschfeld_indicator: Vec<Real>,
    /// Whether the matching indicator entry was computed without rounding.
    pub indicator_exact: Vec<bool>,
    pub running_sup: Option<Real>,
    pub alpha_sequence: Vec<AlphaValue>,
    pub alpha_limsup_estimate: Option<AlphaValue>,
    /// Partial sums of sum 2^-n a_n (a_1...a_n)^(-1/2).
    pub ps_series_partial: Vec<Real>,
    /// A series term left the representable range (the series is exploding).
    pub ps_series_overflowed: bool,
    /// Partial sums of sum p_1...p_i (power case).
    pub exponent_series_partial: Vec<Real>,
    pub verdict: Verdict,
    pub caveat: &'static str,
}

impl ConvergenceReport {
    fn empty(horizon: u64) -> ConvergenceReport {
        ConvergenceReport {
            horizon,
            herschfeld_indicator: Vec::new(),
            indicator_exact: Vec::new(),
            running_sup: None,
            alpha_sequence: Vec::new(),
            alpha_limsup_estimate: None,
            ps_series_partial: Vec::new(),
            ps_series_overflowed: false,
            exponent_series_partial: Vec::new(),
            verdict: Verdict::Inconclusive,
            caveat: FINITE_HORIZON_CAVEAT,
        }
    }
}

/// Access to a positive sequence the diagnostics can reason about, including
/// sequences whose terms are far too large to materialize.
pub trait SequenceSource {
    /// a_n <= 1 (drives the -infinity convention).
    fn le_one(&self, n: u64) -> Result<bool>;
    /// Exact rational log2(a_n) when the structure exposes it.
    fn log2_exact(&self, n: u64) -> Option<BigRational>;
    /// ln(a_n) at working precision.
    fn ln_term(&self, n: u64, prec: usize) -> Result<Real>;
    /// Exact rational ln(ln(a_n)) when known (e.g. doubly exponential test
    /// sequences); lets alpha come out exact.
    fn lnln_exact(&self, _n: u64) -> Option<BigRational> {
        None
    }
}

/// Radicands of a normalized spec as a diagnostics sequence.
pub struct SpecRadicands<'a> {
    spec: &'a NormalizedSpec,
}

impl<'a> SpecRadicands<'a> {
    pub fn new(spec: &'a NormalizedSpec) -> Self {
        SpecRadicands { spec }
    }
}

impl SequenceSource for SpecRadicands<'_> {
    fn le_one(&self, n: u64) -> Result<bool> {
        if let Some(l2) = self.log2_exact(n) {
            return Ok(!l2.is_positive());
        }
        match self.spec.radicand_rational(n)? {
            Some(q) => Ok(q <= BigRational::one()),
            None => {
                let v = self.spec.radicand_real(n, 96)?;
                Ok(v.le(&Real::one(96)))
            }
        }
    }

    fn log2_exact(&self, n: u64) -> Option<BigRational> {
        if self.spec.materialized_len().is_none() {
            // structural analysis handles rules whose terms would not fit
            return self
                .spec
                .source()
                .a
                .log2_exact(n, self.spec.term_budget());
        }
        match self.spec.radicand_rational(n) {
            Ok(Some(q)) => log2_rational(&q),
            _ => None,
        }
    }

    fn ln_term(&self, n: u64, prec: usize) -> Result<Real> {
        if let Some(l2) = self.log2_exact(n) {
            let ln2 = Real::from_u64(2, prec).ln()?;
            return Real::from_rational(&l2, prec)?.mul(&ln2);
        }
        self.spec.radicand_real(n, prec)?.ln()
    }
}

fn window_len(horizon: u64, frac: f64) -> u64 {
    ((horizon as f64 * frac).round() as u64).clamp(1, horizon.saturating_sub(1).max(1))
}

fn relative_growth(early: &Real, all: &Real) -> f64 {
    if early.is_zero() {
        return if all.is_zero() { 0.0 } else { f64::INFINITY };
    }
    all.sub(early).div(&early.abs()).map(|r| r.to_f64()).unwrap_or(f64::INFINITY)
}

struct IndicatorScan {
    values: Vec<Real>,
    exact: Vec<bool>,
    sup_all: Real,
    sup_early: Real,
    last_is_sup: bool,
}

/// Computes a_n^(e_n) for n = 1..=N given the exponent sequence e_n.
fn indicator_scan(
    src: &dyn SequenceSource,
    exponents: &[BigRational],
    horizon: u64,
    opts: &DiagnosticsOptions,
) -> Result<IndicatorScan> {
    let prec = opts.precision_bits;
    let mut values = Vec::with_capacity(horizon as usize);
    let mut exact = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        let e_n = &exponents[(n - 1) as usize];
        let (val, is_exact) = match src.log2_exact(n) {
            Some(l2) => {
                let ind_log2 = e_n * &l2;
                if ind_log2.abs() > BigRational::from(BigInt::from(INDICATOR_LOG2_CAP)) {
                    (clamp_indicator(&ind_log2, prec), false)
                } else if ind_log2.is_integer() {
                    let k = ind_log2.to_integer().to_i64().ok_or_else(|| {
                        Error::ExponentOverflow {
                            context: "indicator exponent".into(),
                        }
                    })?;
                    (Real::from_pow2(k, prec)?, true)
                } else {
                    (Real::exp2_rational(&ind_log2, prec)?, false)
                }
            }
            None => {
                let ln_a = src.ln_term(n, prec)?;
                let scaled = Real::from_rational(e_n, prec)?.mul(&ln_a)?;
                match scaled.exp() {
                    Ok(v) => (v, false),
                    Err(Error::ExponentOverflow { .. }) => {
                        (Real::from_pow2(INDICATOR_LOG2_CAP, prec)?, false)
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        values.push(val);
        exact.push(is_exact);
    }
    let w = window_len(horizon, opts.window_frac);
    let early_end = (horizon - w) as usize;
    let mut sup_early = values[0].clone();
    let mut sup_all = values[0].clone();
    for (i, v) in values.iter().enumerate() {
        if i < early_end.max(1) {
            sup_early = sup_early.max_of(v);
        }
        sup_all = sup_all.max_of(v);
    }
    let last_is_sup = values[values.len() - 1].cmp(&sup_all) == std::cmp::Ordering::Equal;
    Ok(IndicatorScan {
        values,
        exact,
        sup_all,
        sup_early,
        last_is_sup,
    })
}

fn clamp_indicator(ind_log2: &BigRational, prec: usize) -> Real {
    let k = if ind_log2.is_positive() {
        INDICATOR_LOG2_CAP
    } else {
        -INDICATOR_LOG2_CAP
    };
    Real::from_pow2(k, prec).expect("clamped indicator")
}

/// Herschfeld-style diagnostic on a square-root sequence (e_n = 2^-n),
/// driven directly by a sequence source.
pub fn herschfeld_sqrt_diagnostic_source(
    src: &dyn SequenceSource,
    horizon: u64,
    opts: &DiagnosticsOptions,
) -> Result<ConvergenceReport> {
    check_horizon(horizon)?;
    check_precision(opts.precision_bits)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut exponents = Vec::with_capacity(horizon as usize);
    let mut e = half.clone();
    for _ in 1..=horizon {
        exponents.push(e.clone());
        e *= &half;
    }
    let scan = indicator_scan(src, &exponents, horizon, opts)?;
    let growth = relative_growth(&scan.sup_early, &scan.sup_all);
    let verdict = if growth <= opts.flatness_threshold {
        Verdict::LooksConvergent
    } else if scan.last_is_sup {
        Verdict::LooksDivergent
    } else {
        Verdict::Inconclusive
    };
    let mut rep = ConvergenceReport::empty(horizon);
    rep.herschfeld_indicator = scan.values;
    rep.indicator_exact = scan.exact;
    rep.running_sup = Some(scan.sup_all);
    rep.verdict = verdict;
    Ok(rep)
}

/// Herschfeld diagnostic for a normalized spec: plain specs with r = 2
/// throughout, or power forms with p_i in (0,1].
pub fn herschfeld_diagnostic(
    spec: &NormalizedSpec,
    horizon: u64,
    opts: &DiagnosticsOptions,
) -> Result<ConvergenceReport> {
    check_horizon(horizon)?;
    check_precision(opts.precision_bits)?;
    match spec.kind() {
        SpecKind::Plain => {
            for i in 1..=horizon {
                if spec.root(i)? != 2 {
                    return Err(Error::NotApplicable {
                        reason: format!(
                            "Herschfeld criterion needs r = 2 throughout; r_{i} = {}",
                            spec.root(i)?
                        ),
                    });
                }
            }
            herschfeld_sqrt_diagnostic_source(&SpecRadicands::new(spec), horizon, opts)
        }
        SpecKind::Power => {
            let one = BigRational::one();
            let mut exponents = Vec::with_capacity(horizon as usize);
            let mut prod = BigRational::one();
            let mut exp_partials = Vec::with_capacity(horizon as usize);
            let mut exp_sum = BigRational::zero();
            for i in 1..=horizon {
                let p = spec.power(i)?;
                if p > one {
                    return Err(Error::NotApplicable {
                        reason: format!(
                            "power-form Herschfeld criterion needs p_i in (0,1]; p_{i} = {p}"
                        ),
                    });
                }
                prod *= &p;
                exponents.push(prod.clone());
                exp_sum += &prod;
                exp_partials.push(Real::from_rational(&exp_sum, opts.precision_bits)?);
            }
            let src = SpecRadicands::new(spec);
            let scan = indicator_scan(&src, &exponents, horizon, opts)?;
            let growth = relative_growth(&scan.sup_early, &scan.sup_all);
            // the criterion also requires the exponent series to converge
            let w = window_len(horizon, opts.window_frac) as usize;
            let early = &exp_partials[exp_partials.len() - 1 - w.min(exp_partials.len() - 1)];
            let exp_flat = relative_growth(early, &exp_partials[exp_partials.len() - 1])
                <= opts.flatness_threshold;
            let verdict = if growth <= opts.flatness_threshold && exp_flat {
                Verdict::LooksConvergent
            } else if scan.last_is_sup && growth > opts.flatness_threshold {
                Verdict::LooksDivergent
            } else {
                Verdict::Inconclusive
            };
            let mut rep = ConvergenceReport::empty(horizon);
            rep.herschfeld_indicator = scan.values;
            rep.indicator_exact = scan.exact;
            rep.running_sup = Some(scan.sup_all);
            rep.exponent_series_partial = exp_partials;
            rep.verdict = verdict;
            Ok(rep)
        }
        SpecKind::Weighted => Err(Error::NotApplicable {
            reason: "no Herschfeld criterion for weighted specs; fold the weights first".into(),
        }),
    }
}

/// Pólya–Szegő style diagnostic on a square-root sequence: alpha sequence
/// plus the sufficient-condition series partial sums.
pub fn polya_szego_diagnostic_source(
    src: &dyn SequenceSource,
    horizon: u64,
    opts: &DiagnosticsOptions,
) -> Result<ConvergenceReport> {
    check_horizon(horizon)?;
    check_precision(opts.precision_bits)?;
    let prec = opts.precision_bits;
    let ln2 = Real::from_u64(2, prec).ln()?;

    let mut alphas: Vec<AlphaValue> = Vec::with_capacity(horizon as usize);
    let mut partials: Vec<Real> = Vec::with_capacity(horizon as usize);
    let mut overflowed = false;
    let mut ln_sum = Real::zero(prec);
    let mut acc = Real::zero(prec);

    for n in 1..=horizon {
        let le1 = src.le_one(n)?;
        let n_real = Real::from_u64(n, prec);

        // alpha_n = ln(ln a_n) / n, -inf when a_n <= 1
        if le1 {
            alphas.push(AlphaValue::NegInfinity);
        } else if let Some(q) = src.lnln_exact(n) {
            let v = Real::from_rational(&q, prec)?.div(&n_real)?;
            alphas.push(AlphaValue::Value(v));
        } else {
            let ln_a = src.ln_term(n, prec)?;
            // a_n > 1 so ln a_n > 0
            let v = ln_a.ln()?.div(&n_real)?;
            alphas.push(AlphaValue::Value(v));
        }

        // series term: exp(-n ln2 + ln a_n - (1/2) sum_{k<=n} ln a_k)
        if !overflowed {
            let ln_a = src.ln_term(n, prec)?;
            ln_sum = ln_sum.add(&ln_a);
            let half_sum = ln_sum.div(&Real::from_u64(2, prec))?;
            let t_ln = ln_a.sub(&n_real.mul(&ln2)?).sub(&half_sum);
            if t_ln.to_f64() > 1e8 {
                overflowed = true;
            } else {
                match t_ln.exp() {
                    Ok(t) => acc = acc.add(&t),
                    Err(Error::ExponentOverflow { .. }) => overflowed = true,
                    Err(e) => return Err(e),
                }
            }
        }
        partials.push(acc.clone());
    }

    let w = window_len(horizon, opts.window_frac) as usize;
    let series_flat = !overflowed && {
        let early = &partials[partials.len() - 1 - w.min(partials.len() - 1)];
        relative_growth(early, &partials[partials.len() - 1]) <= opts.flatness_threshold
    };

    // limsup estimate: max alpha over the tail window
    let tail = &alphas[alphas.len() - w.min(alphas.len())..];
    let mut est = AlphaValue::NegInfinity;
    for a in tail {
        if let AlphaValue::Value(v) = a {
            est = match est {
                AlphaValue::NegInfinity => AlphaValue::Value(v.clone()),
                AlphaValue::Value(cur) => AlphaValue::Value(cur.max_of(v)),
            };
        }
    }

    let two = Real::from_u64(2, 64);
    let verdict = if series_flat {
        Verdict::LooksConvergent
    } else {
        match &est {
            AlphaValue::Value(a) if a.cmp(&two) == std::cmp::Ordering::Greater => {
                Verdict::LooksConvergent
            }
            AlphaValue::Value(a) if a.lt(&two) => Verdict::LooksDivergent,
            _ => Verdict::Inconclusive,
        }
    };

    let mut rep = ConvergenceReport::empty(horizon);
    rep.alpha_sequence = alphas;
    rep.alpha_limsup_estimate = Some(est);
    rep.ps_series_partial = partials;
    rep.ps_series_overflowed = overflowed;
    rep.verdict = verdict;
    Ok(rep)
}

/// Pólya–Szegő diagnostic for a plain r = 2 spec.
pub fn polya_szego_diagnostic(
    spec: &NormalizedSpec,
    horizon: u64,
    opts: &DiagnosticsOptions,
) -> Result<ConvergenceReport> {
    check_horizon(horizon)?;
    if spec.kind() != SpecKind::Plain {
        return Err(Error::NotApplicable {
            reason: format!("Pólya–Szegő criteria apply to plain r = 2 specs, got {}", spec.kind()),
        });
    }
    for i in 1..=horizon {
        if spec.root(i)? != 2 {
            return Err(Error::NotApplicable {
                reason: format!("Pólya–Szegő criteria need r = 2 throughout; r_{i} = {}", spec.root(i)?),
            });
        }
    }
    polya_szego_diagnostic_source(&SpecRadicands::new(spec), horizon, opts)
}

/// Partial sums of the sufficient-condition series whose terms are the sharp
/// general gap bounds. Shared with the series_S tail strategy.
pub fn series_s_partial(
    spec: &NormalizedSpec,
    horizon: u64,
    precision_bits: usize,
) -> Result<Vec<Real>> {
    check_precision(precision_bits)?;
    if spec.kind() != SpecKind::Plain {
        return Err(Error::NotApplicable {
            reason: "the series applies to plain integer-root specs".into(),
        });
    }
    let mut out = Vec::with_capacity(horizon as usize);
    let mut acc = Real::zero(precision_bits);
    for k in 1..=horizon {
        let row = tail_table(spec, k, precision_bits)?;
        let g = gap_bound_herschfeld_with_row(spec, k, &row)?;
        acc = acc.add(&g.value);
        out.push(acc.clone());
    }
    Ok(out)
}

fn check_horizon(horizon: u64) -> Result<()> {
    if horizon < 8 {
        return Err(Error::InvalidSpec(format!(
            "diagnostics need a horizon of at least 8, got {horizon}"
        )));
    }
    Ok(())
}
