//! Gap and tail bounds for continued radicals and power forms.
//!
//! The exact gap identity and every inequality are evaluated from stored
//! tail rows (the numerically stable route), never by forward denesting.
//! Each result is tagged with the method that produced it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::denest::denest_from_tail;
use crate::error::{Error, Result};
use crate::evalcore::{rounding_bound_for, tail_table, TailTable};
use crate::real::{check_precision, Real};
use crate::seqspec::{NormalizedSpec, SpecKind};

/// Inner sums of the gap identity are accumulated term by term; a zero-merged
/// root beyond this size would make that loop unreasonable.
const IDENTITY_ROOT_CAP: u64 = 1 << 20;

/// Bound formulas run with guard bits and round once, so two algebraically
/// equal routes land within an ulp or two of each other.
const BOUND_GUARD_BITS: usize = 32;

/// Which theorem produced a gap bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMethod {
    /// Exact identity for the gap (an equality, not just a bound).
    Identity,
    /// Sharp general bound using tail values.
    HerschfeldGeneral,
    /// Weaker bound from sequence terms only.
    PolyaSzego,
    /// Weighted sharp bound.
    WeightedGeneral,
    /// Weighted sequence-terms-only bound.
    WeightedPs,
    /// Power-form bound using tail values (rows n and possibly n+1).
    PowerForm,
    /// Power-form sequence-terms-only bound (exponents in (0,1]).
    PowerFormPs,
}

impl GapMethod {
    pub fn name(&self) -> &'static str {
        match self {
            GapMethod::Identity => "identity",
            GapMethod::HerschfeldGeneral => "herschfeld_general",
            GapMethod::PolyaSzego => "polya_szego",
            GapMethod::WeightedGeneral => "weighted_general",
            GapMethod::WeightedPs => "weighted_ps",
            GapMethod::PowerForm => "power_form",
            GapMethod::PowerFormPs => "power_form_ps",
        }
    }

    pub fn from_name(s: &str) -> Option<GapMethod> {
        Some(match s {
            "identity" => GapMethod::Identity,
            "herschfeld_general" | "herschfeld" => GapMethod::HerschfeldGeneral,
            "polya_szego" | "polya-szego" | "ps" => GapMethod::PolyaSzego,
            "weighted_general" | "weighted" => GapMethod::WeightedGeneral,
            "weighted_ps" | "weighted-ps" => GapMethod::WeightedPs,
            "power_form" | "power" => GapMethod::PowerForm,
            "power_form_ps" | "power-ps" => GapMethod::PowerFormPs,
            _ => return None,
        })
    }
}

impl std::fmt::Display for GapMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Validity/cancellation annotations on a bound.
#[derive(Debug, Clone, Default)]
pub struct GapNotes {
    /// Power-form bound consulted the depth-(n+1) row (some p_i > 1); the
    /// value is still a sound upper bound but not an a-priori one.
    pub advisory_next_row: bool,
    /// Identity residual against the directly computed gap exceeded the
    /// rounding budget; raise the precision.
    pub precision_insufficient: bool,
}

/// A bound on v_{n+1} - v_n tagged with its producing method.
#[derive(Debug, Clone)]
pub struct GapBound {
    pub n: u64,
    pub value: Real,
    pub method: GapMethod,
    pub inputs_precision_bits: usize,
    /// Operation count used for crude rounding margins.
    pub ops: u64,
    pub notes: GapNotes,
}

impl GapBound {
    /// Crude certified margin for comparing this bound against others.
    pub fn rounding_margin(&self) -> Real {
        rounding_bound_for(&self.value, self.ops, self.inputs_precision_bits)
    }
}

/// S_r(x, y) = sum_{j=0}^{r-1} x^j y^(r-1-j), accumulated without repeated
/// large powers.
fn geometric_symmetric_sum(x: &Real, y: &Real, r: u64) -> Result<Real> {
    let mut s = Real::one(x.prec().max(y.prec()));
    let mut ypow = s.clone();
    for _ in 2..=r {
        ypow = ypow.mul(y)?;
        s = s.mul(x)?.add(&ypow);
    }
    Ok(s)
}

/// Exact gap identity: v_{n+1} - v_n as a quotient of the tail seed of row
/// n+1 by the product of the symmetric sums over both rows. Equality holds up
/// to rounding, and the residual against the direct difference is checked.
pub fn gap_identity(spec: &NormalizedSpec, n: u64, precision_bits: usize) -> Result<GapBound> {
    require_kind(spec, SpecKind::Plain, "gap_identity")?;
    let row_n = tail_table(spec, n, precision_bits)?;
    let row_n1 = tail_table(spec, n + 1, precision_bits)?;
    gap_identity_with_rows(spec, n, &row_n, &row_n1)
}

/// `gap_identity` against caller-supplied tail rows (row reuse across n).
pub fn gap_identity_with_rows(
    spec: &NormalizedSpec,
    n: u64,
    row_n: &TailTable,
    row_n1: &TailTable,
) -> Result<GapBound> {
    let precision_bits = row_n.precision_bits;
    let w = precision_bits + BOUND_GUARD_BITS;
    let numerator = denest_from_tail(row_n1, n)?.with_precision(w)?; // t_{1,n+1}
    let mut den = Real::one(w);
    let mut ops: u64 = n + 2;
    for i in 1..=n {
        let r = spec.root(i)?;
        if r > IDENTITY_ROOT_CAP {
            return Err(Error::NotApplicable {
                reason: format!("identity inner sum with r_{i} = {r} exceeds the cap"),
            });
        }
        let x = denest_from_tail(row_n1, i - 1)?.with_precision(w)?; // f_{i-1}(v_{n+1})
        let y = denest_from_tail(row_n, i - 1)?.with_precision(w)?; // f_{i-1}(v_n)
        let s = geometric_symmetric_sum(&x, &y, r)?;
        den = den.mul(&s)?;
        ops += 2 * r + 1;
    }
    let value = numerator.div(&den)?.with_precision(precision_bits)?;

    // flag precision insufficiency against the direct difference; the direct
    // route carries absolute error at the approximants' own ulp scale
    let direct = row_n1.approximant_value().sub(row_n.approximant_value());
    let residual = value.sub(&direct).abs();
    let budget = rounding_bound_for(&value, 4 * ops, precision_bits)
        .add(&rounding_bound_for(row_n.approximant_value(), 4 * n, precision_bits))
        .add(&rounding_bound_for(row_n1.approximant_value(), 4 * (n + 1), precision_bits));
    let precision_insufficient = residual.cmp(&budget) == std::cmp::Ordering::Greater;

    Ok(GapBound {
        n,
        value,
        method: GapMethod::Identity,
        inputs_precision_bits: precision_bits,
        ops,
        notes: GapNotes {
            precision_insufficient,
            ..GapNotes::default()
        },
    })
}

/// a_{n+1}^(1/r_{n+1}) at working precision.
fn plain_root_numerator(spec: &NormalizedSpec, n: u64, prec: usize) -> Result<Real> {
    let a = spec.radicand_real(n + 1, prec)?;
    a.nth_root(spec.root(n + 1)?)
}

/// Sharp general bound: a_{n+1}^(1/r_{n+1}) / prod_i r_i f_{i-1}(v_n)^(r_i-1).
pub fn gap_bound_herschfeld_general(
    spec: &NormalizedSpec,
    n: u64,
    precision_bits: usize,
) -> Result<GapBound> {
    require_kind(spec, SpecKind::Plain, "gap_bound_herschfeld_general")?;
    let row_n = tail_table(spec, n, precision_bits)?;
    gap_bound_herschfeld_with_row(spec, n, &row_n)
}

/// `gap_bound_herschfeld_general` against a caller-supplied row.
pub fn gap_bound_herschfeld_with_row(
    spec: &NormalizedSpec,
    n: u64,
    row_n: &TailTable,
) -> Result<GapBound> {
    let prec = row_n.precision_bits;
    let w = prec + BOUND_GUARD_BITS;
    let numerator = plain_root_numerator(spec, n, w)?;
    let mut den = Real::one(w);
    let mut ops: u64 = n + 4;
    for i in 1..=n {
        let r = spec.root(i)?;
        let f = denest_from_tail(row_n, i - 1)?.with_precision(w)?;
        den = den.mul(&Real::from_u64(r, w))?.mul(&f.powi(r - 1)?)?;
        ops += 3;
    }
    Ok(GapBound {
        n,
        value: numerator.div(&den)?.with_precision(prec)?,
        method: GapMethod::HerschfeldGeneral,
        inputs_precision_bits: prec,
        ops,
        notes: GapNotes::default(),
    })
}

/// Weaker bound from sequence terms only:
/// a_{n+1}^(1/r_{n+1}) / prod_i r_i a_i^((r_i-1)/r_i).
pub fn gap_bound_polya_szego(
    spec: &NormalizedSpec,
    n: u64,
    precision_bits: usize,
) -> Result<GapBound> {
    require_kind(spec, SpecKind::Plain, "gap_bound_polya_szego")?;
    check_precision(precision_bits)?;
    let w = precision_bits + BOUND_GUARD_BITS;
    let numerator = plain_root_numerator(spec, n, w)?;
    let mut den = Real::one(w);
    let mut ops: u64 = n + 4;
    for i in 1..=n {
        let r = spec.root(i)?;
        let a = spec.radicand_real(i, w)?;
        let powed = a.pow_ratio(&BigInt::from(r - 1), &BigInt::from(r))?;
        den = den.mul(&Real::from_u64(r, w))?.mul(&powed)?;
        ops += 3;
    }
    Ok(GapBound {
        n,
        value: numerator.div(&den)?.with_precision(precision_bits)?,
        method: GapMethod::PolyaSzego,
        inputs_precision_bits: precision_bits,
        ops,
        notes: GapNotes::default(),
    })
}

/// Weighted numerator b_{n+1} a_{n+1}^(1/r_{n+1}).
fn weighted_root_numerator(spec: &NormalizedSpec, n: u64, prec: usize) -> Result<Real> {
    let a = spec.radicand_real(n + 1, prec)?;
    let rooted = a.nth_root(spec.root(n + 1)?)?;
    spec.weight_real(n + 1, prec)?.mul(&rooted)
}

/// Weighted sharp bound:
/// b_{n+1} a_{n+1}^(1/r_{n+1}) prod_i b_i^{r_i} / prod_i r_i f_{i-1}(w_n)^(r_i-1).
pub fn gap_bound_weighted(
    spec: &NormalizedSpec,
    n: u64,
    precision_bits: usize,
) -> Result<GapBound> {
    require_kind(spec, SpecKind::Weighted, "gap_bound_weighted")?;
    let row_n = tail_table(spec, n, precision_bits)?;
    gap_bound_weighted_with_row(spec, n, &row_n)
}

/// `gap_bound_weighted` against a caller-supplied row.
pub fn gap_bound_weighted_with_row(
    spec: &NormalizedSpec,
    n: u64,
    row_n: &TailTable,
) -> Result<GapBound> {
    let prec = row_n.precision_bits;
    let w = prec + BOUND_GUARD_BITS;
    let mut numerator = weighted_root_numerator(spec, n, w)?;
    let mut den = Real::one(w);
    let mut ops: u64 = n + 6;
    for i in 1..=n {
        let r = spec.root(i)?;
        let b = spec.weight_real(i, w)?;
        numerator = numerator.mul(&b.powi(r)?)?;
        let f = denest_from_tail(row_n, i - 1)?.with_precision(w)?;
        den = den.mul(&Real::from_u64(r, w))?.mul(&f.powi(r - 1)?)?;
        ops += 5;
    }
    Ok(GapBound {
        n,
        value: numerator.div(&den)?.with_precision(prec)?,
        method: GapMethod::WeightedGeneral,
        inputs_precision_bits: prec,
        ops,
        notes: GapNotes::default(),
    })
}

/// Weighted terms-only bound:
/// b_{n+1} a_{n+1}^(1/r_{n+1}) prod_i b_i / prod_i r_i a_i^((r_i-1)/r_i).
pub fn gap_bound_weighted_ps(
    spec: &NormalizedSpec,
    n: u64,
    precision_bits: usize,
) -> Result<GapBound> {
    require_kind(spec, SpecKind::Weighted, "gap_bound_weighted_ps")?;
    check_precision(precision_bits)?;
    let w = precision_bits + BOUND_GUARD_BITS;
    let mut numerator = weighted_root_numerator(spec, n, w)?;
    let mut den = Real::one(w);
    let mut ops: u64 = n + 6;
    for i in 1..=n {
        let r = spec.root(i)?;
        numerator = numerator.mul(&spec.weight_real(i, w)?)?;
        let a = spec.radicand_real(i, w)?;
        let powed = a.pow_ratio(&BigInt::from(r - 1), &BigInt::from(r))?;
        den = den.mul(&Real::from_u64(r, w))?.mul(&powed)?;
        ops += 4;
    }
    Ok(GapBound {
        n,
        value: numerator.div(&den)?.with_precision(precision_bits)?,
        method: GapMethod::WeightedPs,
        inputs_precision_bits: precision_bits,
        ops,
        notes: GapNotes::default(),
    })
}

/// Terms-only bounds for every n in 1..=n_max, sharing the running
/// denominator product (one root extraction per index instead of O(n)).
pub fn gap_bound_polya_szego_sweep(
    spec: &NormalizedSpec,
    n_max: u64,
    precision_bits: usize,
) -> Result<Vec<GapBound>> {
    require_kind(spec, SpecKind::Plain, "gap_bound_polya_szego_sweep")?;
    check_precision(precision_bits)?;
    let w = precision_bits + BOUND_GUARD_BITS;
    let mut den = Real::one(w);
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let r = spec.root(n)?;
        let a = spec.radicand_real(n, w)?;
        let powed = a.pow_ratio(&BigInt::from(r - 1), &BigInt::from(r))?;
        den = den.mul(&Real::from_u64(r, w))?.mul(&powed)?;
        let numerator = plain_root_numerator(spec, n, w)?;
        out.push(GapBound {
            n,
            value: numerator.div(&den)?.with_precision(precision_bits)?,
            method: GapMethod::PolyaSzego,
            inputs_precision_bits: precision_bits,
            ops: 3 * n + 4,
            notes: GapNotes::default(),
        });
    }
    Ok(out)
}

/// Weighted terms-only bounds for every n in 1..=n_max with shared running
/// products.
pub fn gap_bound_weighted_ps_sweep(
    spec: &NormalizedSpec,
    n_max: u64,
    precision_bits: usize,
) -> Result<Vec<GapBound>> {
    require_kind(spec, SpecKind::Weighted, "gap_bound_weighted_ps_sweep")?;
    check_precision(precision_bits)?;
    let w = precision_bits + BOUND_GUARD_BITS;
    let mut den = Real::one(w);
    let mut bprod = Real::one(w);
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let r = spec.root(n)?;
        let a = spec.radicand_real(n, w)?;
        let powed = a.pow_ratio(&BigInt::from(r - 1), &BigInt::from(r))?;
        den = den.mul(&Real::from_u64(r, w))?.mul(&powed)?;
        bprod = bprod.mul(&spec.weight_real(n, w)?)?;
        let numerator = weighted_root_numerator(spec, n, w)?.mul(&bprod)?;
        out.push(GapBound {
            n,
            value: numerator.div(&den)?.with_precision(precision_bits)?,
            method: GapMethod::WeightedPs,
            inputs_precision_bits: precision_bits,
            ops: 4 * n + 6,
            notes: GapNotes::default(),
        });
    }
    Ok(out)
}

/// Power-form bound: a_{n+1}^{p_{n+1}} times p_i f_{i-1}(t_n)^((p_i-1)/p_i)
/// over p_i <= 1 and p_i f_{i-1}(t_{n+1})^((p_i-1)/p_i) over p_i > 1.
pub fn gap_bound_powerform(
    spec: &NormalizedSpec,
    n: u64,
    precision_bits: usize,
) -> Result<GapBound> {
    require_kind(spec, SpecKind::Power, "gap_bound_powerform")?;
    let row_n = tail_table(spec, n, precision_bits)?;
    // only materialize the next row if some exponent needs it
    let needs_next = (1..=n).try_fold(false, |acc, i| -> Result<bool> {
        Ok(acc || spec.power(i)? > BigRational::one())
    })?;
    let row_n1 = if needs_next {
        Some(tail_table(spec, n + 1, precision_bits)?)
    } else {
        None
    };
    gap_bound_powerform_with_rows(spec, n, &row_n, row_n1.as_ref())
}

/// `gap_bound_powerform` against caller-supplied rows.
pub fn gap_bound_powerform_with_rows(
    spec: &NormalizedSpec,
    n: u64,
    row_n: &TailTable,
    row_n1: Option<&TailTable>,
) -> Result<GapBound> {
    let prec = row_n.precision_bits;
    let w = prec + BOUND_GUARD_BITS;
    let a_next = spec.radicand_real(n + 1, w)?;
    let mut value = a_next.pow_rational(&spec.power(n + 1)?)?;
    let mut ops: u64 = n + 4;
    let mut advisory = false;
    let one = BigRational::one();
    for i in 1..=n {
        let p = spec.power(i)?;
        let f = if p <= one {
            denest_from_tail(row_n, i - 1)?
        } else {
            advisory = true;
            let row = row_n1.ok_or_else(|| Error::Internal(
                "power bound with p_i > 1 requires the depth-(n+1) row".into(),
            ))?;
            denest_from_tail(row, i - 1)?
        }
        .with_precision(w)?;
        // exponent (p-1)/p; negative for p < 1
        let expo = (&p - &one) / &p;
        let factor = Real::from_rational(&p, w)?.mul(&f.pow_rational(&expo)?)?;
        value = value.mul(&factor)?;
        ops += 4;
    }
    Ok(GapBound {
        n,
        value: value.with_precision(prec)?,
        method: GapMethod::PowerForm,
        inputs_precision_bits: prec,
        ops,
        notes: GapNotes {
            advisory_next_row: advisory,
            ..GapNotes::default()
        },
    })
}

/// Power-form terms-only bound for p_i in (0,1]:
/// a_{n+1}^{p_{n+1}} prod_i p_i a_i^{p_i - 1}.
pub fn gap_bound_powerform_ps(
    spec: &NormalizedSpec,
    n: u64,
    precision_bits: usize,
) -> Result<GapBound> {
    require_kind(spec, SpecKind::Power, "gap_bound_powerform_ps")?;
    check_precision(precision_bits)?;
    let w = precision_bits + BOUND_GUARD_BITS;
    let one = BigRational::one();
    let a_next = spec.radicand_real(n + 1, w)?;
    let mut value = a_next.pow_rational(&spec.power(n + 1)?)?;
    let mut ops: u64 = n + 4;
    for i in 1..=n {
        let p = spec.power(i)?;
        if p > one {
            return Err(Error::NotApplicable {
                reason: format!("terms-only power bound requires p_i <= 1, got p_{i} = {p}"),
            });
        }
        let a = spec.radicand_real(i, w)?;
        let factor = Real::from_rational(&p, w)?.mul(&a.pow_rational(&(&p - &one))?)?;
        value = value.mul(&factor)?;
        ops += 4;
    }
    Ok(GapBound {
        n,
        value: value.with_precision(precision_bits)?,
        method: GapMethod::PowerFormPs,
        inputs_precision_bits: precision_bits,
        ops,
        notes: GapNotes::default(),
    })
}

/// Dispatch by method name (CLI tables).
pub fn gap_bound(
    spec: &NormalizedSpec,
    method: GapMethod,
    n: u64,
    precision_bits: usize,
) -> Result<GapBound> {
    match method {
        GapMethod::Identity => gap_identity(spec, n, precision_bits),
        GapMethod::HerschfeldGeneral => gap_bound_herschfeld_general(spec, n, precision_bits),
        GapMethod::PolyaSzego => gap_bound_polya_szego(spec, n, precision_bits),
        GapMethod::WeightedGeneral => gap_bound_weighted(spec, n, precision_bits),
        GapMethod::WeightedPs => gap_bound_weighted_ps(spec, n, precision_bits),
        GapMethod::PowerForm => gap_bound_powerform(spec, n, precision_bits),
        GapMethod::PowerFormPs => gap_bound_powerform_ps(spec, n, precision_bits),
    }
}

/// Methods that apply to a spec of the given kind, sharpest first.
pub fn applicable_methods(kind: SpecKind) -> &'static [GapMethod] {
    match kind {
        SpecKind::Plain => &[
            GapMethod::Identity,
            GapMethod::HerschfeldGeneral,
            GapMethod::PolyaSzego,
        ],
        SpecKind::Weighted => &[GapMethod::WeightedGeneral, GapMethod::WeightedPs],
        SpecKind::Power => &[GapMethod::PowerForm, GapMethod::PowerFormPs],
    }
}

fn require_kind(spec: &NormalizedSpec, want: SpecKind, what: &str) -> Result<()> {
    if spec.kind() != want {
        return Err(Error::NotApplicable {
            reason: format!("{what} requires a {want} spec, got {}", spec.kind()),
        });
    }
    Ok(())
}

/// Tail-bound strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailStrategy {
    /// Sum a window of gap bounds, certify a geometric ratio witness s < 1,
    /// and majorize the remainder by g_last * s / (1 - s).
    GeometricMajorization,
    /// Partial sums of the gap-bound series with the same geometric
    /// majorization of its remainder (plain specs).
    SeriesS,
    /// Plain partial sum of the window; explicitly non-certified.
    SummedPartial,
}

impl TailStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            TailStrategy::GeometricMajorization => "geometric_majorization",
            TailStrategy::SeriesS => "series_S",
            TailStrategy::SummedPartial => "summed_partial",
        }
    }

    pub fn from_name(s: &str) -> Option<TailStrategy> {
        Some(match s {
            "geometric_majorization" | "geometric" => TailStrategy::GeometricMajorization,
            "series_S" | "series-s" | "series_s" => TailStrategy::SeriesS,
            "summed_partial" | "summed" => TailStrategy::SummedPartial,
            _ => return None,
        })
    }
}

/// An upper bound on (limit - v_{from_n}).
#[derive(Debug, Clone)]
pub struct TailBound {
    pub from_n: u64,
    pub value: Real,
    pub strategy: TailStrategy,
    /// Observed worst successive gap-bound ratio when < 1.
    pub ratio_witness: Option<Real>,
    pub certified: bool,
    /// Gap method used for the window terms.
    pub gaps_method: GapMethod,
    /// Some gap in the window was advisory (power form with p_i > 1).
    pub advisory: bool,
}

/// Gap bounds for k = from_n ..= from_n+window, reusing tail rows.
fn gap_window(
    spec: &NormalizedSpec,
    from_n: u64,
    window: u64,
    precision_bits: usize,
) -> Result<Vec<GapBound>> {
    let mut out = Vec::with_capacity(window as usize + 1);
    match spec.kind() {
        SpecKind::Plain => {
            for k in from_n..=from_n + window {
                let row = tail_table(spec, k, precision_bits)?;
                out.push(gap_bound_herschfeld_with_row(spec, k, &row)?);
            }
        }
        SpecKind::Weighted => {
            for k in from_n..=from_n + window {
                let row = tail_table(spec, k, precision_bits)?;
                out.push(gap_bound_weighted_with_row(spec, k, &row)?);
            }
        }
        SpecKind::Power => {
            let mut row_k = tail_table(spec, from_n, precision_bits)?;
            for k in from_n..=from_n + window {
                let row_next = tail_table(spec, k + 1, precision_bits)?;
                out.push(gap_bound_powerform_with_rows(
                    spec,
                    k,
                    &row_k,
                    Some(&row_next),
                )?);
                row_k = row_next;
            }
        }
    }
    Ok(out)
}

/// Bounds the distance from v_{from_n} to the limit.
pub fn tail_bound(
    spec: &NormalizedSpec,
    from_n: u64,
    strategy: TailStrategy,
    precision_bits: usize,
    window: u64,
) -> Result<TailBound> {
    check_precision(precision_bits)?;
    if from_n == 0 {
        return Err(Error::InvalidIndex { n: 0 });
    }
    if window < 2 {
        return Err(Error::InvalidSpec("tail-bound window must be >= 2".into()));
    }
    if strategy == TailStrategy::SeriesS && spec.kind() != SpecKind::Plain {
        return Err(Error::NotApplicable {
            reason: "series_S applies to plain integer-root specs".into(),
        });
    }
    let gaps = gap_window(spec, from_n, window, precision_bits)?;
    let advisory = gaps.iter().any(|g| g.notes.advisory_next_row);
    let method = gaps[0].method;

    // partial sum over k = from_n .. from_n+window-1; the last gap value only
    // feeds the ratio test
    let mut sum = Real::zero(precision_bits);
    for g in &gaps[..gaps.len() - 1] {
        sum = sum.add(&g.value);
    }

    if strategy == TailStrategy::SummedPartial {
        let mut total = sum;
        total = total.add(&gaps[gaps.len() - 1].value);
        return Ok(TailBound {
            from_n,
            value: total,
            strategy,
            ratio_witness: None,
            certified: false,
            gaps_method: method,
            advisory,
        });
    }

    // worst successive ratio over the window
    let mut s: Option<Real> = None;
    for pair in gaps.windows(2) {
        if pair[0].value.is_zero() {
            return Err(Error::Internal("zero gap bound in ratio test".into()));
        }
        let ratio = pair[1].value.div(&pair[0].value)?;
        s = Some(match s {
            None => ratio,
            Some(cur) => cur.max_of(&ratio),
        });
    }
    let s = s.expect("window >= 2");
    let one = Real::one(precision_bits);
    if s.lt(&one) {
        let g_last = &gaps[gaps.len() - 2].value;
        let remainder = g_last.mul(&s)?.div(&one.sub(&s))?;
        Ok(TailBound {
            from_n,
            value: sum.add(&remainder),
            strategy,
            ratio_witness: Some(s),
            certified: true,
            gaps_method: method,
            advisory,
        })
    } else {
        let mut total = sum;
        total = total.add(&gaps[gaps.len() - 1].value);
        Ok(TailBound {
            from_n,
            value: total,
            strategy,
            ratio_witness: None,
            certified: false,
            gaps_method: method,
            advisory,
        })
    }
}
