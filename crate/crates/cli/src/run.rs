//! Command implementations.

use radix_core::BigRational;
use radix_core::{
    applicable_methods, approximant, gap_bound, herschfeld_diagnostic, limit_estimate,
    polya_szego_diagnostic, ConvergenceReport, DiagnosticsOptions, Error, FoldOptions, GapMethod,
    LimitOptions, NormalizedSpec, RadicalSpec, Real, SpecKind, TailStrategy,
    DEFAULT_PRECISION_BITS, DEFAULT_TERM_BIT_BUDGET,
};

use crate::output::{self, GapsRow};
use crate::{CliError, OutArgs, SpecArgs, EXIT_NOT_CERTIFIED};

fn resolve_spec(args: &SpecArgs) -> Result<RadicalSpec, CliError> {
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
        return Ok(RadicalSpec::from_json_str(&text)?);
    }
    if let Some(name) = &args.builtin {
        return Ok(radix_core::builtin(name)?);
    }
    let Some(a) = &args.a else {
        return Err(CliError::parse(
            "no spec given: use --spec <file>, --builtin <name> or --a <expr>",
        ));
    };
    let a = radix_core::parse_sequence_expr(a)?;
    if let Some(p) = &args.p {
        if args.b.is_some() {
            return Err(CliError::parse("power forms do not take weights (--b)"));
        }
        return Ok(RadicalSpec::power_form(a, radix_core::parse_sequence_expr(p)?));
    }
    let r = match &args.r {
        Some(r) => radix_core::parse_sequence_expr(r)?,
        None => radix_core::parse_sequence_expr("2")?,
    };
    let b = args
        .b
        .as_ref()
        .map(|b| radix_core::parse_sequence_expr(b))
        .transpose()?;
    Ok(RadicalSpec::integer_root(a, b, r))
}

fn precision_of(out: &OutArgs) -> Result<usize, CliError> {
    if let Some(p) = out.precision {
        return Ok(p);
    }
    match std::env::var("RADIX_PRECISION_BITS") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::parse(format!("bad RADIX_PRECISION_BITS value `{s}`"))),
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
    }
}

fn offset_of(out: &OutArgs) -> Result<Option<BigRational>, CliError> {
    out.offset
        .as_deref()
        .map(|s| radix_core::parse_rational_str(s).map_err(CliError::from))
        .transpose()
}

fn normalize(spec: &RadicalSpec, depth_needed: u64) -> Result<NormalizedSpec, CliError> {
    // zero-eliminated specs emit at most one normalized index per original
    // index, so scan far enough ahead
    let horizon = depth_needed.saturating_mul(2).saturating_add(16);
    Ok(NormalizedSpec::normalize(spec, horizon, DEFAULT_TERM_BIT_BUDGET)?)
}

fn apply_offset(value: &Real, offset: &Option<BigRational>) -> Result<Real, CliError> {
    match offset {
        None => Ok(value.clone()),
        Some(q) => {
            let o = Real::from_rational(q, value.prec())?;
            Ok(value.add(&o))
        }
    }
}

pub fn cmd_eval(spec_args: &SpecArgs, n: u64, out: &OutArgs) -> Result<(), CliError> {
    let spec = resolve_spec(spec_args)?;
    let prec = precision_of(out)?;
    let offset = offset_of(out)?;
    let norm = normalize(&spec, n + 1)?;
    let appr = approximant(&norm, n, prec)?;
    let shown = apply_offset(&appr.value, &offset)?;
    output::render_eval(out.format, n, &shown, prec, &appr.rounding_bound);
    Ok(())
}

/// v_{n+1} - v_n with enough extra precision that the cancelled leading bits
/// do not hollow out the difference.
fn true_gap(norm: &NormalizedSpec, n: u64, prec: usize) -> Result<Real, CliError> {
    let mut p = prec;
    for _ in 0..4 {
        let hi = approximant(norm, n + 1, p)?.value;
        let lo = approximant(norm, n, p)?.value;
        let diff = hi.sub(&lo);
        if diff.is_zero() {
            p *= 2;
            continue;
        }
        let lost = hi.exponent2().saturating_sub(diff.exponent2()).max(0) as usize;
        if lost + prec <= p {
            return Ok(diff.with_precision(prec.min(p - lost.min(p)))?);
        }
        p = p + lost + 64;
    }
    Ok(approximant(norm, n + 1, p)?
        .value
        .sub(&approximant(norm, n, p)?.value))
}

fn parse_methods(list: Option<&str>, kind: SpecKind) -> Result<Vec<GapMethod>, CliError> {
    let applicable = applicable_methods(kind);
    match list {
        None => Ok(applicable.to_vec()),
        Some(s) => {
            let mut out = Vec::new();
            for name in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let m = GapMethod::from_name(name)
                    .ok_or_else(|| CliError::parse(format!("unknown method `{name}`")))?;
                if !applicable.contains(&m) {
                    return Err(CliError::parse(format!(
                        "method `{name}` does not apply to a {kind} spec"
                    )));
                }
                out.push(m);
            }
            if out.is_empty() {
                return Err(CliError::parse("empty --methods list"));
            }
            Ok(out)
        }
    }
}

pub fn cmd_gaps(
    spec_args: &SpecArgs,
    n_max: u64,
    methods: Option<&str>,
    out: &OutArgs,
) -> Result<(), CliError> {
    if n_max == 0 {
        return Err(CliError::parse("--n-max must be >= 1"));
    }
    let spec = resolve_spec(spec_args)?;
    let prec = precision_of(out)?;
    let offset = offset_of(out)?;
    let norm = normalize(&spec, n_max + 2)?;
    let methods = parse_methods(methods, norm.kind())?;

    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let appr = approximant(&norm, n, prec)?;
        let shown = apply_offset(&appr.value, &offset)?;
        let gap = true_gap(&norm, n, prec)?;
        let mut bounds = Vec::with_capacity(methods.len());
        for m in &methods {
            let b = gap_bound(&norm, *m, n, prec)?;
            let ratio = if gap.is_zero() {
                None
            } else {
                Some(b.value.with_precision(64)?.div(&gap.with_precision(64)?)?)
            };
            bounds.push((b, ratio));
        }
        rows.push(GapsRow {
            n,
            approximant: shown,
            true_gap: gap,
            bounds,
        });
    }
    output::render_gaps(out.format, &methods, &rows, prec);
    Ok(())
}

pub fn cmd_limit(
    spec_args: &SpecArgs,
    tol: f64,
    n_max: u64,
    strategy: &str,
    window: u64,
    require_certified: bool,
    out: &OutArgs,
) -> Result<(), CliError> {
    let strategy = TailStrategy::from_name(strategy)
        .ok_or_else(|| CliError::parse(format!("unknown strategy `{strategy}`")))?;
    let spec = resolve_spec(spec_args)?;
    let prec = precision_of(out)?;
    let offset = offset_of(out)?;
    let norm = normalize(&spec, n_max + window + 2)?;
    let est = limit_estimate(
        &norm,
        tol,
        n_max,
        prec,
        &LimitOptions {
            strategy,
            window,
            start_n: 2,
        },
    )?;
    let shown = apply_offset(&est.value, &offset)?;
    output::render_limit(out.format, &est, &shown, tol);
    if require_certified && !est.certified {
        return Err(CliError {
            code: EXIT_NOT_CERTIFIED,
            message: format!(
                "no certified tail bound below {tol} within n_max = {n_max}"
            ),
        });
    }
    Ok(())
}

pub fn cmd_diagnose(
    spec_args: &SpecArgs,
    horizon: u64,
    criterion: &str,
    flatness_threshold: f64,
    window_frac: f64,
    out: &OutArgs,
) -> Result<(), CliError> {
    let spec = resolve_spec(spec_args)?;
    let prec = precision_of(out)?;
    let opts = DiagnosticsOptions {
        flatness_threshold,
        window_frac,
        precision_bits: prec,
    };
    let norm = normalize(&spec, horizon + 1)?;

    // weighted specs are diagnosed through their weight-folded plain form;
    // only the Herschfeld indicator survives that transform (folding inflates
    // the radicands doubly exponentially, which distorts the alpha scale)
    let (subject, folded, note): (NormalizedSpec, bool, Option<&str>) =
        if norm.kind() == SpecKind::Weighted {
            let folded = radix_core::fold_weights(
                &spec,
                horizon + 1,
                &FoldOptions {
                    approx_precision_bits: prec.max(256) * 2,
                    ..FoldOptions::default()
                },
            )?;
            (
                folded,
                true,
                Some("diagnostics computed on the weight-folded form"),
            )
        } else {
            (norm, false, None)
        };

    let mut reports: Vec<(&'static str, ConvergenceReport)> = Vec::new();
    let mut errors: Vec<String> = Vec::new();
    let want_h = matches!(criterion, "auto" | "herschfeld");
    let want_ps = matches!(criterion, "auto" | "polya-szego" | "polya_szego");
    if !want_h && !want_ps {
        return Err(CliError::parse(format!("unknown criterion `{criterion}`")));
    }
    if want_h {
        match herschfeld_diagnostic(&subject, horizon, &opts) {
            Ok(rep) => reports.push(("herschfeld", rep)),
            Err(Error::NotApplicable { reason }) => errors.push(reason),
            Err(e) => return Err(e.into()),
        }
    }
    if want_ps {
        if folded {
            errors.push(
                "the Pólya–Szegő criteria are not applied to weight-folded forms".to_string(),
            );
        } else {
            match polya_szego_diagnostic(&subject, horizon, &opts) {
                Ok(rep) => reports.push(("polya_szego", rep)),
                Err(Error::NotApplicable { reason }) => errors.push(reason),
                Err(e) => return Err(e.into()),
            }
        }
    }
    if reports.is_empty() {
        return Err(CliError::from(Error::NotApplicable {
            reason: errors.join("; "),
        }));
    }
    output::render_diagnose(out.format, &reports, note, horizon);
    Ok(())
}
