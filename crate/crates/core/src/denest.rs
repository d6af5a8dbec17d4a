//! Denesting functions f_k.
//!
//! f_0(y) = y and each step peels one radical layer:
//! plain     f_k(y) = f_{k-1}(y)^{r_k} - a_k
//! weighted  f_k(y) = (f_{k-1}(y) / b_k)^{r_k} - a_k
//! power     f_k(y) = f_{k-1}(y)^{1/p_k} - a_k
//!
//! Applied to an approximant they walk the tail row: f_j(t_{n,n}) = t_{n-j,n}.
//! The forward recursion squares values and then subtracts, so it loses
//! precision fast; every consumer that has a tail table should read the value
//! from the table instead (`denest_from_tail`). Forward denesting stays for
//! the identity checks and tracks its own error bound honestly.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::evalcore::TailTable;
use crate::real::{check_precision, Real};
use crate::seqspec::{NormalizedSpec, SpecKind};

/// The denesting family attached to a normalized spec.
#[derive(Debug, Clone, Copy)]
pub struct DenestFamily<'a> {
    spec: &'a NormalizedSpec,
}

/// A forward-denested value with a tracked absolute error bound.
#[derive(Debug, Clone)]
pub struct DenestValue {
    pub value: Real,
    /// Absolute error bound propagated through the recursion, assuming the
    /// input y itself is correct to one ulp.
    pub tracked_error: Real,
    /// Set when cancellation has consumed more than half the working
    /// precision across the peeled layers.
    pub cancellation_warning: bool,
    /// Total bits lost to cancellation.
    pub cancelled_bits: u64,
}

impl<'a> DenestFamily<'a> {
    pub fn new(spec: &'a NormalizedSpec) -> DenestFamily<'a> {
        DenestFamily { spec }
    }

    pub fn kind(&self) -> SpecKind {
        self.spec.kind()
    }

    pub fn spec(&self) -> &NormalizedSpec {
        self.spec
    }
}

/// Evaluates f_k(y) by the direct recursion, k >= 0.
pub fn denest_forward(
    fam: &DenestFamily<'_>,
    k: u64,
    y: &Real,
    precision_bits: usize,
) -> Result<DenestValue> {
    check_precision(precision_bits)?;
    let mut f = y.with_precision(precision_bits)?;
    let mut err = f.ulp();
    let mut cancelled: u64 = 0;
    for j in 1..=k {
        if !f.is_positive() {
            // positivity is required before we can raise to a power
            return Err(Error::DenestDomain { k: j as usize - 1 });
        }
        let a = fam.spec.radicand_real(j, precision_bits)?;
        let (powed, deriv) = match fam.spec.kind() {
            SpecKind::Plain => {
                let r = fam.spec.root(j)?;
                let powed = f.powi(r)?;
                // d/df f^r = r f^(r-1)
                let deriv = Real::from_u64(r, 64).mul(&f.powi(r - 1)?.with_precision(64)?)?;
                (powed, deriv)
            }
            SpecKind::Weighted => {
                let r = fam.spec.root(j)?;
                let b = fam.spec.weight_real(j, precision_bits)?;
                let scaled = f.div(&b)?;
                let powed = scaled.powi(r)?;
                // d/df (f/b)^r = (r/b) (f/b)^(r-1)
                let deriv = Real::from_u64(r, 64)
                    .mul(&scaled.powi(r - 1)?.with_precision(64)?)?
                    .div(&b.with_precision(64)?)?;
                (powed, deriv)
            }
            SpecKind::Power => {
                let p = fam.spec.power(j)?;
                let inv = p.recip();
                let powed = f.pow_rational(&inv)?;
                // d/df f^(1/p) = (1/p) f^(1/p - 1)
                let inv64 = Real::from_rational(&inv, 64)?;
                let fm1 = powed.div(&f)?.with_precision(64)?; // f^(1/p)/f = f^(1/p-1)
                let deriv = inv64.mul(&fm1)?;
                (powed, deriv)
            }
        };
        let next = powed.sub(&a);
        let lost = powed
            .exponent2()
            .saturating_sub(if next.is_zero() {
                powed.exponent2() - precision_bits as i64
            } else {
                next.exponent2()
            })
            .max(0);
        cancelled += lost.to_u64().unwrap_or(0);
        // error propagation: derivative amplifies the carried error, plus
        // one ulp each for the power and the subtraction
        err = deriv
            .mul(&err)?
            .add(&powed.ulp())
            .add(&if next.is_zero() { powed.ulp() } else { next.ulp() });
        f = next;
    }
    Ok(DenestValue {
        cancellation_warning: cancelled > (precision_bits as u64) / 2,
        cancelled_bits: cancelled,
        value: f,
        tracked_error: err,
    })
}

/// f_j(t_{n,n}) read directly from the stored tail row: t_{n-j,n}.
/// This is the numerically stable route; bound computations use it
/// exclusively.
pub fn denest_from_tail(table: &TailTable, j: u64) -> Result<Real> {
    if j >= table.n {
        return Err(Error::DenestIndex { j, n: table.n });
    }
    Ok(table.values[(table.n - j - 1) as usize].clone())
}
