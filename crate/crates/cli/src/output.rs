//! Rendering for plain, csv and json formats. A real renders as its
//! round-trip-exact decimal string; json mode tags each value with the
//! precision bits it carries.

use radix_core::{
    AlphaValue, ConvergenceReport, GapBound, GapMethod, LimitEstimate, Real, Verdict,
};
use serde_json::{json, Value};

use crate::Format;

fn real_json(r: &Real) -> Value {
    json!({ "dec": r.to_decimal_string(), "bits": r.prec() })
}

fn opt_real_csv(r: &Option<Real>) -> String {
    r.as_ref().map(|v| v.to_decimal_string()).unwrap_or_default()
}

pub fn render_eval(format: Format, n: u64, value: &Real, prec: usize, rounding_bound: &Real) {
    match format {
        Format::Plain => {
            println!("n               {n}");
            println!("value           {}", value.to_decimal_string());
            println!("precision_bits  {prec}");
            println!("rounding_bound  {}", rounding_bound.to_decimal_string());
        }
        Format::Csv => {
            println!("n,value,precision_bits,rounding_bound");
            println!(
                "{n},{},{prec},{}",
                value.to_decimal_string(),
                rounding_bound.to_decimal_string()
            );
        }
        Format::Json => {
            let v = json!({
                "n": n,
                "value": real_json(value),
                "precision_bits": prec,
                "rounding_bound": real_json(rounding_bound),
            });
            println!("{v}");
        }
    }
}

pub struct GapsRow {
    pub n: u64,
    pub approximant: Real,
    pub true_gap: Real,
    /// One (bound, bound/true_gap) pair per requested method.
    pub bounds: Vec<(GapBound, Option<Real>)>,
}

pub fn render_gaps(format: Format, methods: &[GapMethod], rows: &[GapsRow], prec: usize) {
    match format {
        Format::Plain | Format::Csv => {
            let mut header = String::from("n,approximant,true_gap");
            for m in methods {
                header.push(',');
                header.push_str(m.name());
            }
            for m in methods {
                header.push_str(",ratio_");
                header.push_str(m.name());
            }
            println!("{header}");
            for row in rows {
                let mut line = format!(
                    "{},{},{}",
                    row.n,
                    row.approximant.to_decimal_string(),
                    row.true_gap.to_decimal_string()
                );
                for (b, _) in &row.bounds {
                    line.push(',');
                    line.push_str(&b.value.to_decimal_string());
                }
                for (_, ratio) in &row.bounds {
                    line.push(',');
                    line.push_str(&opt_real_csv(ratio));
                }
                println!("{line}");
            }
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let bounds: Vec<Value> = row
                        .bounds
                        .iter()
                        .map(|(b, ratio)| {
                            json!({
                                "method": b.method.name(),
                                "value": real_json(&b.value),
                                "ratio_to_true_gap": ratio.as_ref().map(real_json),
                                "advisory_next_row": b.notes.advisory_next_row,
                            })
                        })
                        .collect();
                    json!({
                        "n": row.n,
                        "approximant": real_json(&row.approximant),
                        "true_gap": real_json(&row.true_gap),
                        "bounds": bounds,
                    })
                })
                .collect();
            let v = json!({
                "precision_bits": prec,
                "methods": methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "rows": rows,
            });
            println!("{v}");
        }
    }
}

pub fn render_limit(format: Format, est: &LimitEstimate, shown: &Real, tol: f64) {
    let witness = est
        .tail_bound
        .as_ref()
        .and_then(|tb| tb.ratio_witness.clone());
    match format {
        Format::Plain => {
            println!("value           {}", shown.to_decimal_string());
            println!("n_used          {}", est.n_used);
            println!("precision_bits  {}", est.precision_bits);
            println!("tolerance       {tol:e}");
            match &est.tail_bound {
                Some(tb) => {
                    println!("tail_bound      {}", tb.value.to_decimal_string());
                    println!("strategy        {}", tb.strategy.name());
                }
                None => println!("tail_bound      (none)"),
            }
            println!(
                "ratio_witness   {}",
                witness
                    .as_ref()
                    .map(|s| s.to_decimal_string())
                    .unwrap_or_else(|| "(none)".into())
            );
            println!("certified       {}", est.certified);
        }
        Format::Csv => {
            println!("value,n_used,precision_bits,tolerance,tail_bound,strategy,ratio_witness,certified");
            println!(
                "{},{},{},{tol:e},{},{},{},{}",
                shown.to_decimal_string(),
                est.n_used,
                est.precision_bits,
                est.tail_bound
                    .as_ref()
                    .map(|tb| tb.value.to_decimal_string())
                    .unwrap_or_default(),
                est.tail_bound
                    .as_ref()
                    .map(|tb| tb.strategy.name().to_string())
                    .unwrap_or_default(),
                opt_real_csv(&witness),
                est.certified
            );
        }
        Format::Json => {
            let v = json!({
                "value": real_json(shown),
                "n_used": est.n_used,
                "precision_bits": est.precision_bits,
                "tolerance": tol,
                "tail_bound": est.tail_bound.as_ref().map(|tb| json!({
                    "value": real_json(&tb.value),
                    "from_n": tb.from_n,
                    "strategy": tb.strategy.name(),
                    "ratio_witness": tb.ratio_witness.as_ref().map(real_json),
                    "gaps_method": tb.gaps_method.name(),
                    "advisory": tb.advisory,
                })),
                "certified": est.certified,
            });
            println!("{v}");
        }
    }
}

fn alpha_csv(a: &AlphaValue) -> String {
    match a {
        AlphaValue::NegInfinity => "-inf".to_string(),
        AlphaValue::Value(v) => v.to_decimal_string(),
    }
}

fn verdict_str(v: Verdict) -> String {
    v.to_string()
}

pub fn render_diagnose(
    format: Format,
    reports: &[(&'static str, ConvergenceReport)],
    note: Option<&str>,
    horizon: u64,
) {
    match format {
        Format::Plain | Format::Csv => {
            println!(
                "criterion,n,indicator,indicator_exact,alpha,ps_series_partial,exponent_series_partial"
            );
            for (name, rep) in reports {
                for i in 0..horizon as usize {
                    let ind = rep
                        .herschfeld_indicator
                        .get(i)
                        .map(|v| v.to_decimal_string())
                        .unwrap_or_default();
                    let ind_exact = rep
                        .indicator_exact
                        .get(i)
                        .map(|b| b.to_string())
                        .unwrap_or_default();
                    let alpha = rep.alpha_sequence.get(i).map(alpha_csv).unwrap_or_default();
                    let ps = rep
                        .ps_series_partial
                        .get(i)
                        .map(|v| v.to_decimal_string())
                        .unwrap_or_default();
                    let ex = rep
                        .exponent_series_partial
                        .get(i)
                        .map(|v| v.to_decimal_string())
                        .unwrap_or_default();
                    println!("{name},{},{ind},{ind_exact},{alpha},{ps},{ex}", i + 1);
                }
            }
            for (name, rep) in reports {
                println!("# {name}: verdict={}", verdict_str(rep.verdict));
                if let Some(sup) = &rep.running_sup {
                    println!("# {name}: running_sup={}", sup.to_decimal_string());
                }
                if let Some(est) = &rep.alpha_limsup_estimate {
                    println!("# {name}: alpha_limsup_estimate={}", alpha_csv(est));
                }
                if rep.ps_series_overflowed {
                    println!("# {name}: ps_series_overflowed=true");
                }
                println!("# {name}: caveat={}", rep.caveat);
            }
            if let Some(note) = note {
                println!("# note: {note}");
            }
        }
        Format::Json => {
            let reports: Vec<Value> = reports
                .iter()
                .map(|(name, rep)| {
                    json!({
                        "criterion": name,
                        "horizon": rep.horizon,
                        "verdict": verdict_str(rep.verdict),
                        "caveat": rep.caveat,
                        "indicator": rep.herschfeld_indicator.iter().map(real_json).collect::<Vec<_>>(),
                        "indicator_exact": rep.indicator_exact,
                        "running_sup": rep.running_sup.as_ref().map(real_json),
                        "alpha": rep.alpha_sequence.iter().map(|a| match a {
                            AlphaValue::NegInfinity => json!("-inf"),
                            AlphaValue::Value(v) => real_json(v),
                        }).collect::<Vec<_>>(),
                        "alpha_limsup_estimate": rep.alpha_limsup_estimate.as_ref().map(|a| match a {
                            AlphaValue::NegInfinity => json!("-inf"),
                            AlphaValue::Value(v) => real_json(v),
                        }),
                        "ps_series_partial": rep.ps_series_partial.iter().map(real_json).collect::<Vec<_>>(),
                        "ps_series_overflowed": rep.ps_series_overflowed,
                        "exponent_series_partial": rep.exponent_series_partial.iter().map(real_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let v = json!({ "note": note, "reports": reports });
            println!("{v}");
        }
    }
}
