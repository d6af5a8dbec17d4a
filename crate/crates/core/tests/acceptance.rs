//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers (run with `--nocapture` to see them).

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use radix_core::{
    approximant, builtin, gap_bound_herschfeld_with_row, gap_bound_polya_szego,
    gap_bound_polya_szego_sweep, gap_bound_powerform_ps, gap_bound_powerform_with_rows,
    gap_bound_weighted_ps, gap_bound_weighted_ps_sweep,
    gap_bound_weighted_with_row, gap_identity_with_rows, herschfeld_diagnostic,
    herschfeld_sqrt_diagnostic_source, limit_estimate, polya_szego_diagnostic,
    polya_szego_diagnostic_source, rounding_bound_for, tail_table, AlphaValue, Continuation,
    DiagnosticsOptions, LimitOptions, NormalizedSpec, RadicalSpec, Real, SequenceRule,
    SequenceSource, TailStrategy, Verdict, DEFAULT_TERM_BIT_BUDGET,
};

const BUDGET: u64 = DEFAULT_TERM_BIT_BUDGET;

/// The runtime-capped criteria need the whole machine; run the suite's tests
/// one at a time regardless of harness parallelism.
static SERIAL: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|p| p.into_inner())
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Uniform rational in (0, hi] with resolution 1/1000.
fn rand_rat(rng: &mut ChaCha20Rng, hi: u64) -> BigRational {
    let k = rng.gen_range(1..=hi * 1000);
    rat(k as i64, 1000)
}

fn list_rule(items: Vec<BigRational>) -> SequenceRule {
    SequenceRule::List {
        items,
        then: Continuation::None,
    }
}

struct PlainCase {
    norm: NormalizedSpec,
}

fn random_plain_specs(count: usize, terms: usize, seed: u64) -> Vec<PlainCase> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: Vec<BigRational> = (0..terms).map(|_| rand_rat(&mut rng, 10)).collect();
            let r: Vec<BigRational> =
                (0..terms).map(|_| rat(rng.gen_range(1..=5), 1)).collect();
            let spec = RadicalSpec::integer_root(list_rule(a), None, list_rule(r));
            PlainCase {
                norm: NormalizedSpec::validate_plain(&spec, terms as u64, BUDGET).unwrap(),
            }
        })
        .collect()
}

fn random_weighted_specs(count: usize, terms: usize, seed: u64) -> Vec<NormalizedSpec> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: Vec<BigRational> = (0..terms).map(|_| rand_rat(&mut rng, 10)).collect();
            let b: Vec<BigRational> = (0..terms).map(|_| rand_rat(&mut rng, 5)).collect();
            let r: Vec<BigRational> =
                (0..terms).map(|_| rat(rng.gen_range(1..=5), 1)).collect();
            let spec =
                RadicalSpec::integer_root(list_rule(a), Some(list_rule(b)), list_rule(r));
            NormalizedSpec::validate_weighted(&spec, terms as u64, BUDGET).unwrap()
        })
        .collect()
}

/// Criterion 1: the gap identity matches the directly computed gap within
/// 4x the combined rounding bounds, on 1000 random plain specs, n <= 25,
/// 256-bit precision, in under 60 s.
#[test]
fn criterion_1_identity_exactness() {
    let _gate = serial();
    let t0 = Instant::now();
    let specs = random_plain_specs(1000, 27, 0xC0FFEE01);
    let prec = 256usize;
    let worst = specs
        .par_iter()
        .map(|case| {
            let mut worst: f64 = 0.0;
            let mut row_prev = tail_table(&case.norm, 1, prec).unwrap();
            for n in 1..=25u64 {
                let row_next = tail_table(&case.norm, n + 1, prec).unwrap();
                let g = gap_identity_with_rows(&case.norm, n, &row_prev, &row_next).unwrap();
                assert!(
                    !g.notes.precision_insufficient,
                    "identity flagged precision insufficiency at n = {n}"
                );
                let direct = row_next
                    .approximant_value()
                    .sub(row_prev.approximant_value());
                let residual = g.value.sub(&direct).abs();
                let combined = g
                    .rounding_margin()
                    .add(&rounding_bound_for(row_prev.approximant_value(), n, prec))
                    .add(&rounding_bound_for(
                        row_next.approximant_value(),
                        n + 1,
                        prec,
                    ));
                let limit = combined.mul(&Real::from_u64(4, 64)).unwrap();
                assert!(
                    residual.le(&limit),
                    "identity residual {} exceeds 4x combined bound {} at n = {n}",
                    residual.to_decimal_string(),
                    limit.to_decimal_string()
                );
                if !limit.is_zero() {
                    worst = worst.max(residual.div(&limit).unwrap().to_f64());
                }
                row_prev = row_next;
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "criterion 1 took {dt:?} (limit 60 s)");
    println!(
        "[criterion 1] PASS identity exactness on 1000 specs, n<=25 @256 bits; worst residual/limit = {worst:.3e}; {dt:?}"
    );
}

/// Criterion 2: dominance true_gap <= herschfeld_general <= polya_szego
/// within rounding margins, plus the weighted analogue, in under 60 s.
#[test]
fn criterion_2_dominance_chain() {
    let _gate = serial();
    let t0 = Instant::now();
    let prec = 256usize;
    let four = Real::from_u64(4, 64);

    let specs = random_plain_specs(1000, 27, 0xC0FFEE02);
    specs.par_iter().for_each(|case| {
        let ps_all = gap_bound_polya_szego_sweep(&case.norm, 25, prec).unwrap();
        let mut row_prev = tail_table(&case.norm, 1, prec).unwrap();
        for n in 1..=25u64 {
            let row_next = tail_table(&case.norm, n + 1, prec).unwrap();
            let true_gap = row_next
                .approximant_value()
                .sub(row_prev.approximant_value());
            let h = gap_bound_herschfeld_with_row(&case.norm, n, &row_prev).unwrap();
            let ps = &ps_all[(n - 1) as usize];
            let m1 = h.rounding_margin().mul(&four).unwrap();
            let m2 = ps.rounding_margin().mul(&four).unwrap();
            assert!(
                true_gap.le(&h.value.add(&m1)),
                "true gap exceeds the sharp bound at n = {n}"
            );
            assert!(
                h.value.le(&ps.value.add(&m1).add(&m2)),
                "sharp bound exceeds the terms-only bound at n = {n}"
            );
            row_prev = row_next;
        }
    });

    let weighted = random_weighted_specs(1000, 27, 0xC0FFEE03);
    weighted.par_iter().for_each(|norm| {
        let wps_all = gap_bound_weighted_ps_sweep(norm, 25, prec).unwrap();
        let mut row_prev = tail_table(norm, 1, prec).unwrap();
        for n in 1..=25u64 {
            let row_next = tail_table(norm, n + 1, prec).unwrap();
            let true_gap = row_next
                .approximant_value()
                .sub(row_prev.approximant_value());
            let w = gap_bound_weighted_with_row(norm, n, &row_prev).unwrap();
            let wps = &wps_all[(n - 1) as usize];
            let m1 = w.rounding_margin().mul(&four).unwrap();
            let m2 = wps.rounding_margin().mul(&four).unwrap();
            assert!(
                true_gap.le(&w.value.add(&m1)),
                "weighted true gap exceeds the sharp bound at n = {n}"
            );
            assert!(
                w.value.le(&wps.value.add(&m1).add(&m2)),
                "weighted sharp bound exceeds the terms-only bound at n = {n}"
            );
            row_prev = row_next;
        }
    });

    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "criterion 2 took {dt:?} (limit 60 s)");
    println!(
        "[criterion 2] PASS dominance chains on 2x1000 specs, n<=25 @256 bits; {dt:?}"
    );
}

/// Criterion 3: degenerate collapses are exact (r = 1), bit-for-bit (b = 1)
/// and within 2 ulps (p = 1/r).
#[test]
fn criterion_3_degenerate_collapse() {
    let _gate = serial();
    let mut rng = ChaCha20Rng::seed_from_u64(0xC0FFEE04);
    let prec = 192usize;
    let terms = 14usize;

    // r = 1: the terms-only bound is a_{n+1} on the exact rational path
    for _ in 0..50 {
        let a: Vec<BigRational> = (0..terms).map(|_| rand_rat(&mut rng, 10)).collect();
        let spec = RadicalSpec::integer_root(
            list_rule(a.clone()),
            None,
            SequenceRule::constant_u64(1),
        );
        let norm = NormalizedSpec::validate_plain(&spec, terms as u64, BUDGET).unwrap();
        for n in [1u64, 5, 12] {
            let g = gap_bound_polya_szego(&norm, n, prec).unwrap();
            let exact = Real::from_rational(&a[n as usize], prec).unwrap();
            assert_eq!(
                g.value.cmp(&exact),
                std::cmp::Ordering::Equal,
                "r = 1 collapse must be exact"
            );
        }
    }

    // b = 1: weighted bounds equal plain bounds bit for bit
    for _ in 0..50 {
        let a: Vec<BigRational> = (0..terms).map(|_| rand_rat(&mut rng, 10)).collect();
        let r: Vec<BigRational> = (0..terms).map(|_| rat(rng.gen_range(1..=5), 1)).collect();
        let wspec = RadicalSpec::integer_root(
            list_rule(a.clone()),
            Some(SequenceRule::constant_u64(1)),
            list_rule(r.clone()),
        );
        let pspec = RadicalSpec::integer_root(list_rule(a), None, list_rule(r));
        let wnorm = NormalizedSpec::validate_weighted(&wspec, terms as u64, BUDGET).unwrap();
        let pnorm = NormalizedSpec::validate_plain(&pspec, terms as u64, BUDGET).unwrap();
        for n in [2u64, 7, 12] {
            let w = radix_core::gap_bound_weighted(&wnorm, n, prec).unwrap();
            let h = radix_core::gap_bound_herschfeld_general(&pnorm, n, prec).unwrap();
            assert_eq!(w.value.cmp(&h.value), std::cmp::Ordering::Equal);
            let wps = gap_bound_weighted_ps(&wnorm, n, prec).unwrap();
            let ps = gap_bound_polya_szego(&pnorm, n, prec).unwrap();
            assert_eq!(wps.value.cmp(&ps.value), std::cmp::Ordering::Equal);
        }
    }

    // p = 1/r: the power bound equals the plain bound within 2 ulps
    for _ in 0..50 {
        let a: Vec<BigRational> = (0..terms).map(|_| rand_rat(&mut rng, 10)).collect();
        let r: Vec<u64> = (0..terms).map(|_| rng.gen_range(1..=5)).collect();
        let p: Vec<BigRational> = r.iter().map(|&ri| rat(1, ri as i64)).collect();
        let rspec = RadicalSpec::integer_root(
            list_rule(a.clone()),
            None,
            list_rule(r.iter().map(|&ri| rat(ri as i64, 1)).collect()),
        );
        let pspec = RadicalSpec::power_form(list_rule(a), list_rule(p));
        let rnorm = NormalizedSpec::validate_plain(&rspec, terms as u64, BUDGET).unwrap();
        let pnorm = NormalizedSpec::validate_power(&pspec, terms as u64, BUDGET).unwrap();
        for n in [2u64, 7, 12] {
            let row = tail_table(&pnorm, n, prec).unwrap();
            let gp = gap_bound_powerform_with_rows(&pnorm, n, &row, None).unwrap();
            let gh = radix_core::gap_bound_herschfeld_general(&rnorm, n, prec).unwrap();
            let d = gp.value.diff_ulps(&gh.value);
            assert!(d <= 2.0, "p = 1/r collapse drifted {d} ulps at n = {n}");
        }
    }
    println!("[criterion 3] PASS degenerate collapses (r=1 exact, b=1 bitwise, p=1/r within 2 ulps)");
}

/// Criterion 4: Ramanujan value |3 - w_50| < 1e-9 and the rate
/// |3 - w_n| <= 2 n^3 / 2^(n-1) for 4 <= n <= 40, in under 5 s.
#[test]
fn criterion_4_ramanujan_value_and_rate() {
    let _gate = serial();
    let t0 = Instant::now();
    let spec = builtin("ramanujan").unwrap();
    let norm = NormalizedSpec::validate_weighted(&spec, 52, BUDGET).unwrap();
    let three = Real::from_u64(3, 512);

    let w50 = approximant(&norm, 50, 512).unwrap();
    let err50 = three.sub(&w50.value).abs();
    assert!(
        err50.le(&Real::from_f64(1e-9, 64)),
        "|3 - w_50| = {} is not below 1e-9",
        err50.to_decimal_string()
    );

    for n in 4..=40u64 {
        let w = approximant(&norm, n, 256).unwrap();
        let err = three.sub(&w.value);
        assert!(!err.is_negative(), "w_{n} exceeded the limit");
        // 2 n^3 / 2^(n-1)
        let bound = Real::from_u64(2 * n * n * n, 64)
            .mul(&Real::from_pow2(1 - n as i64, 64).unwrap())
            .unwrap();
        assert!(
            err.le(&bound),
            "|3 - w_{n}| = {} exceeds 2 n^3/2^(n-1) = {}",
            err.to_decimal_string(),
            bound.to_decimal_string()
        );
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "criterion 4 took {dt:?} (limit 5 s)");
    println!(
        "[criterion 4] PASS ramanujan |3-w_50| = {} and rate bound for n in 4..=40; {dt:?}",
        err50.to_decimal_string()
    );
}

/// Criterion 5: golden-ratio geometric rate |phi - w_n| <= s^n/(1-s) with
/// s = 1/2 for n <= 40, and the constant(2,1,2) radical certifies limit 2
/// within 1e-12.
#[test]
fn criterion_5_geometric_rate() {
    let _gate = serial();
    let spec = builtin("golden").unwrap();
    let norm = NormalizedSpec::validate_plain(&spec, 42, BUDGET).unwrap();
    // phi in closed form at 512 bits
    let phi = Real::from_u64(5, 512)
        .sqrt()
        .unwrap()
        .add(&Real::one(512))
        .div(&Real::from_u64(2, 512))
        .unwrap();
    for n in 1..=40u64 {
        let v = approximant(&norm, n, 256).unwrap();
        let err = phi.sub(&v.value);
        assert!(!err.is_negative());
        // c s^n/(1-s) with c = 1, s = 1/2 is 2^(1-n)
        let bound = Real::from_pow2(1 - n as i64, 64).unwrap();
        assert!(
            err.le(&bound),
            "|phi - v_{n}| = {} exceeds 2^(1-n)",
            err.to_decimal_string()
        );
    }

    let spec2 = builtin("constant(2,1,2)").unwrap();
    let norm2 = NormalizedSpec::validate_weighted(&spec2, 80, BUDGET).unwrap();
    let est = limit_estimate(&norm2, 1e-12, 64, 128, &LimitOptions::default()).unwrap();
    assert!(est.certified, "sqrt(2 + sqrt(2 + ...)) must certify");
    let err = Real::from_u64(2, est.precision_bits.max(128))
        .sub(&est.value)
        .abs();
    assert!(
        err.le(&Real::from_f64(1e-12, 64)),
        "certified limit differs from 2 by {}",
        err.to_decimal_string()
    );
    println!("[criterion 5] PASS golden rate n<=40 and constant(2,1,2) limit = 2 within 1e-12");
}

/// Criterion 6: factorial-rate example a_n = r_n = n against the oracle
/// limit (depth 60 at 512 bits), plus its weighted variant.
#[test]
fn criterion_6_factorial_rate() {
    let _gate = serial();
    let spec = builtin("ex-nested-n").unwrap();
    let norm = NormalizedSpec::validate_plain(&spec, 62, BUDGET).unwrap();
    let v = approximant(&norm, 60, 512).unwrap().value;
    let c = Real::from_u64(3, 256).nth_root(3).unwrap(); // 3^(1/3)
    let mut fact = BigInt::from(1); // (n-1)!
    for n in 2..=20u64 {
        fact *= BigInt::from(n - 1);
        let vn = approximant(&norm, n, 256).unwrap().value;
        let err = v.sub(&vn);
        assert!(!err.is_negative(), "v_{n} exceeded the oracle limit");
        let den = Real::from_bigint(&(&fact * BigInt::from(n - 1)), 256).unwrap();
        let bound = c.div(&den).unwrap();
        assert!(
            err.le(&bound),
            "v - v_{n} = {} exceeds 3^(1/3)/((n-1)(n-1)!) = {}",
            err.to_decimal_string(),
            bound.to_decimal_string()
        );
    }

    let wspec = builtin("ex-weighted-n").unwrap();
    let wnorm = NormalizedSpec::validate_weighted(&wspec, 62, BUDGET).unwrap();
    let w = approximant(&wnorm, 60, 512).unwrap().value;
    // s = 3^(1/3)/2; bound = 2 s^(n+1) (1 + n(1-s)) / (1-s)^2
    let s = c.div(&Real::from_u64(2, 256)).unwrap();
    let one = Real::one(256);
    let one_minus_s = one.sub(&s);
    for n in 4..=20u64 {
        let wn = approximant(&wnorm, n, 256).unwrap().value;
        let err = w.sub(&wn);
        assert!(!err.is_negative(), "w_{n} exceeded the oracle limit");
        let bound = Real::from_u64(2, 256)
            .mul(&s.powi(n + 1).unwrap())
            .unwrap()
            .mul(&one.add(&Real::from_u64(n, 256).mul(&one_minus_s).unwrap()))
            .unwrap()
            .div(&one_minus_s.powi(2).unwrap())
            .unwrap();
        assert!(
            err.le(&bound),
            "w - w_{n} = {} exceeds the geometric envelope {}",
            err.to_decimal_string(),
            bound.to_decimal_string()
        );
    }
    println!("[criterion 6] PASS factorial-rate bounds for both depth-n examples, n<=20");
}

/// Criterion 7: terms-only power-form bound dominates the true gap on 500
/// random power specs with p_i in (0,1], n <= 20.
#[test]
fn criterion_7_power_form_bound() {
    let _gate = serial();
    let mut rng = ChaCha20Rng::seed_from_u64(0xC0FFEE07);
    let prec = 256usize;
    let terms = 22usize;
    let specs: Vec<NormalizedSpec> = (0..500)
        .map(|_| {
            let a: Vec<BigRational> = (0..terms).map(|_| rand_rat(&mut rng, 10)).collect();
            let p: Vec<BigRational> = (0..terms)
                .map(|_| rat(rng.gen_range(1..=256), 256))
                .collect();
            let spec = RadicalSpec::power_form(list_rule(a), list_rule(p));
            NormalizedSpec::validate_power(&spec, terms as u64, BUDGET).unwrap()
        })
        .collect();
    specs.par_iter().for_each(|norm| {
        let four = Real::from_u64(4, 64);
        let mut prev = approximant(norm, 1, prec).unwrap().value;
        for n in 1..=20u64 {
            let next = approximant(norm, n + 1, prec).unwrap().value;
            let true_gap = next.sub(&prev);
            let g = gap_bound_powerform_ps(norm, n, prec).unwrap();
            let margin = g.rounding_margin().mul(&four).unwrap();
            assert!(
                true_gap.le(&g.value.add(&margin)),
                "power true gap exceeds the terms-only bound at n = {n}"
            );
            prev = next;
        }
    });
    println!("[criterion 7] PASS power-form terms-only bound on 500 specs, n<=20 @256 bits");
}

/// Test-only sequence a_n = e^(e^(c n)): ln a_n = e^(cn), ln ln a_n = c n.
struct DoubleExp {
    c: u64,
}

impl SequenceSource for DoubleExp {
    fn le_one(&self, _n: u64) -> radix_core::Result<bool> {
        Ok(false)
    }
    fn log2_exact(&self, _n: u64) -> Option<BigRational> {
        None
    }
    fn ln_term(&self, n: u64, prec: usize) -> radix_core::Result<Real> {
        Real::from_u64(self.c * n, prec).exp()
    }
    fn lnln_exact(&self, n: u64) -> Option<BigRational> {
        Some(rat((self.c * n) as i64, 1))
    }
}

/// Criterion 8: diagnostics on the four stated sequences.
#[test]
fn criterion_8_diagnostics() {
    let _gate = serial();
    let opts = DiagnosticsOptions::default();

    // a_n = 3^(2^n): indicator constant 3, looks convergent
    let spec = RadicalSpec::integer_root(
        radix_core::parse_sequence_expr("3^(2^n)").unwrap(),
        None,
        SequenceRule::constant_u64(2),
    );
    let norm = NormalizedSpec::validate_plain(&spec, 16, BUDGET).unwrap();
    let rep = herschfeld_diagnostic(&norm, 16, &opts).unwrap();
    assert_eq!(rep.verdict, Verdict::LooksConvergent);
    let three = Real::from_u64(3, 256);
    for ind in &rep.herschfeld_indicator {
        assert!(
            ind.diff_ulps(&three) <= 256.0,
            "indicator {} drifted from 3",
            ind.to_decimal_string()
        );
    }

    // a_n = 2^(2^n n): indicator 2^n unbounded, looks divergent
    let spec = RadicalSpec::integer_root(
        radix_core::parse_sequence_expr("2^(2^n*n)").unwrap(),
        None,
        SequenceRule::constant_u64(2),
    );
    let norm = NormalizedSpec::validate_plain(&spec, 16, BUDGET).unwrap();
    let rep = herschfeld_diagnostic(&norm, 16, &opts).unwrap();
    assert_eq!(rep.verdict, Verdict::LooksDivergent);
    assert!(rep.indicator_exact.iter().all(|&e| e));

    // a_n = e^(e^(3n)): alpha = 3 exactly, looks convergent
    let rep = polya_szego_diagnostic_source(&DoubleExp { c: 3 }, 16, &opts).unwrap();
    assert_eq!(rep.verdict, Verdict::LooksConvergent);
    match rep.alpha_limsup_estimate.as_ref().unwrap() {
        AlphaValue::Value(v) => {
            assert_eq!(
                v.cmp(&Real::from_u64(3, 64)),
                std::cmp::Ordering::Equal,
                "alpha must be exactly 3"
            );
        }
        AlphaValue::NegInfinity => panic!("alpha must be finite"),
    }

    // a_n = e^(e^n): alpha = 1 < 2, looks divergent
    let rep = polya_szego_diagnostic_source(&DoubleExp { c: 1 }, 16, &opts).unwrap();
    assert_eq!(rep.verdict, Verdict::LooksDivergent);

    // a_n <= 1 produces -infinity markers
    let spec = RadicalSpec::integer_root(
        radix_core::parse_sequence_expr("1/2").unwrap(),
        None,
        SequenceRule::constant_u64(2),
    );
    let norm = NormalizedSpec::validate_plain(&spec, 16, BUDGET).unwrap();
    let rep = polya_szego_diagnostic(&norm, 16, &opts).unwrap();
    assert!(rep
        .alpha_sequence
        .iter()
        .all(|a| matches!(a, AlphaValue::NegInfinity)));
    assert!(matches!(
        rep.alpha_limsup_estimate,
        Some(AlphaValue::NegInfinity)
    ));

    let _ = herschfeld_sqrt_diagnostic_source(&DoubleExp { c: 1 }, 16, &opts);
    println!("[criterion 8] PASS diagnostics: constant indicator, exact divergence, alpha = 3, -inf markers");
}

/// Criterion 9: forward denesting agrees with the stored tail rows within
/// the forward route's tracked error, on 200 random specs, n <= 20, all j.
#[test]
fn criterion_9_denesting_identity() {
    let _gate = serial();
    let specs = random_plain_specs(200, 21, 0xC0FFEE09);
    let prec = 256usize;
    specs.par_iter().for_each(|case| {
        let fam = radix_core::DenestFamily::new(&case.norm);
        for n in [5u64, 12, 20] {
            let table = tail_table(&case.norm, n, prec).unwrap();
            let y = table.approximant_value();
            for j in 0..n {
                let fwd = radix_core::denest_forward(&fam, j, y, prec).unwrap();
                let from_table = radix_core::denest_from_tail(&table, j).unwrap();
                let diff = fwd.value.sub(&from_table).abs();
                let margin = fwd.tracked_error.add(&from_table.ulp());
                assert!(
                    diff.le(&margin),
                    "forward/table disagreement {} beyond tracked error {} (n={n}, j={j})",
                    diff.to_decimal_string(),
                    margin.to_decimal_string()
                );
            }
        }
    });
    println!("[criterion 9] PASS forward-vs-table denesting identity on 200 specs, n<=20, all j");
}
