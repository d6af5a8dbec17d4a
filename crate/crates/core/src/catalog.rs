//! Built-in named specs.

use crate::error::{Error, Result};
use crate::seqspec::{parse_rational_str, RadicalSpec, SequenceRule};

/// Names understood by `builtin`. `constant(a,b,r)` is parameterized.
pub const BUILTIN_NAMES: &[&str] = &[
    "golden",
    "sqrt2plus",
    "constant(a,b,r)",
    "ex-nested-n",
    "ex-weighted-n",
    "ramanujan",
];

fn expr(s: &str) -> SequenceRule {
    crate::seqspec::parse_sequence_expr(s).expect("builtin expression")
}

/// Resolves a builtin name to its spec.
///
/// * `golden`        sqrt(1 + sqrt(1 + ...)) = phi
/// * `sqrt2plus`     sqrt(2 + sqrt(2 + ...)) = 2
/// * `constant(a,b,r)` b * (a + b * (a + ...)^(1/r))^(1/r)
/// * `ex-nested-n`   1 + sqrt(2 + cbrt(3 + ...)), a_n = r_n = n
/// * `ex-weighted-n` 1 + 2 sqrt(2 + 3 cbrt(3 + ...)), a_n = b_n = r_n = n
/// * `ramanujan`     sqrt(1 + 2 sqrt(1 + 3 sqrt(1 + ...))) = 3
pub fn builtin(name: &str) -> Result<RadicalSpec> {
    let name = name.trim();
    if let Some(args) = name.strip_prefix("constant(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidSpec(format!(
                "constant(a,b,r) takes three arguments, got `{name}`"
            )));
        }
        let a = parse_rational_str(parts[0])?;
        let b = parse_rational_str(parts[1])?;
        let r = parse_rational_str(parts[2])?;
        return Ok(RadicalSpec::integer_root(
            SequenceRule::constant(a),
            Some(SequenceRule::constant(b)),
            SequenceRule::constant(r),
        )
        .with_label(name));
    }
    match name {
        "golden" => Ok(RadicalSpec::integer_root(expr("1"), None, expr("2")).with_label("golden")),
        "sqrt2plus" => {
            Ok(RadicalSpec::integer_root(expr("2"), None, expr("2")).with_label("sqrt2plus"))
        }
        "ex-nested-n" => {
            Ok(RadicalSpec::integer_root(expr("n"), None, expr("n")).with_label("ex-nested-n"))
        }
        "ex-weighted-n" => Ok(RadicalSpec::integer_root(
            expr("n"),
            Some(expr("n")),
            expr("n"),
        )
        .with_label("ex-weighted-n")),
        "ramanujan" => Ok(RadicalSpec::integer_root(
            expr("1"),
            Some(expr("n")),
            expr("2"),
        )
        .with_label("ramanujan")),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalcore::approximant;
    use crate::real::DEFAULT_PRECISION_BITS;
    use crate::seqspec::{NormalizedSpec, DEFAULT_TERM_BIT_BUDGET};

    #[test]
    fn every_entry_normalizes_and_evaluates_to_depth_40() {
        for name in ["golden", "sqrt2plus", "constant(2,1,2)", "ex-nested-n", "ex-weighted-n", "ramanujan"] {
            let spec = builtin(name).unwrap();
            let norm = NormalizedSpec::normalize(&spec, 40, DEFAULT_TERM_BIT_BUDGET).unwrap();
            let v = approximant(&norm, 40, DEFAULT_PRECISION_BITS).unwrap();
            assert!(v.value.is_positive(), "{name}");
        }
    }

    #[test]
    fn constant_builtin_parses_rationals() {
        let spec = builtin("constant(3/2, 1, 2)").unwrap();
        assert_eq!(
            spec.a_term(7, DEFAULT_TERM_BIT_BUDGET).unwrap().to_string(),
            "3/2"
        );
    }

    #[test]
    fn unknown_name_errors() {
        assert!(matches!(builtin("nope"), Err(Error::UnknownBuiltin(_))));
    }
}
