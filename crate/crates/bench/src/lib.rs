//! Shared fixtures for the criterion benchmarks.

use radix_core::{builtin, NormalizedSpec, RadicalSpec, DEFAULT_TERM_BIT_BUDGET};

pub fn golden(horizon: u64) -> NormalizedSpec {
    NormalizedSpec::normalize(&builtin("golden").unwrap(), horizon, DEFAULT_TERM_BIT_BUDGET)
        .unwrap()
}

pub fn ramanujan(horizon: u64) -> NormalizedSpec {
    NormalizedSpec::normalize(&builtin("ramanujan").unwrap(), horizon, DEFAULT_TERM_BIT_BUDGET)
        .unwrap()
}

pub fn nested_n(horizon: u64) -> NormalizedSpec {
    NormalizedSpec::normalize(
        &builtin("ex-nested-n").unwrap(),
        horizon,
        DEFAULT_TERM_BIT_BUDGET,
    )
    .unwrap()
}

pub fn power_recip(horizon: u64) -> NormalizedSpec {
    let spec = RadicalSpec::power_form(
        radix_core::parse_sequence_expr("n").unwrap(),
        radix_core::parse_sequence_expr("1/n").unwrap(),
    );
    NormalizedSpec::validate_power(&spec, horizon, DEFAULT_TERM_BIT_BUDGET).unwrap()
}
