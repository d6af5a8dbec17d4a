//! Evaluation of right continued radicals and continued power forms to
//! arbitrary precision, with certified truncation-error bounds and
//! finite-horizon convergence diagnostics.
//!
//! The building blocks:
//!
//! * [`seqspec`] — sequence rules (a small exact-rational expression
//!   language), radical/power-form specs, JSON ingestion, and the
//!   normalization transforms (zero elimination, weight folding);
//! * [`evalcore`] — tail-first evaluation of approximants at controlled
//!   precision, exposing full tail rows;
//! * [`denest`] — the denesting functions that peel radical layers;
//! * [`bounds`] — the exact gap identity, the gap inequalities, and
//!   certified tail bounds with geometric ratio witnesses;
//! * [`convergence`] — heuristic limsup-style diagnostics with honest
//!   caveats;
//! * [`catalog`] — built-in named radicals.
//!
//! ```
//! use radix_core::{builtin, NormalizedSpec, approximant, DEFAULT_TERM_BIT_BUDGET};
//!
//! let spec = builtin("ramanujan").unwrap();
//! let norm = NormalizedSpec::normalize(&spec, 16, DEFAULT_TERM_BIT_BUDGET).unwrap();
//! let w3 = approximant(&norm, 3, 128).unwrap();
//! // sqrt(1 + 2 sqrt(1 + 3 sqrt(1))) = sqrt 5
//! assert!(w3.value.to_decimal_string().starts_with("2.23606797"));
//! ```

pub mod bounds;
pub mod catalog;
pub mod convergence;
pub mod denest;
pub mod error;
pub mod evalcore;
pub mod real;
pub mod seqspec;

pub use bounds::{
    applicable_methods, gap_bound, gap_bound_herschfeld_general, gap_bound_herschfeld_with_row,
    gap_bound_polya_szego, gap_bound_polya_szego_sweep, gap_bound_powerform, gap_bound_powerform_ps,
    gap_bound_powerform_with_rows, gap_bound_weighted, gap_bound_weighted_ps,
    gap_bound_weighted_ps_sweep,
    gap_bound_weighted_with_row, gap_identity, gap_identity_with_rows, tail_bound, GapBound,
    GapMethod, GapNotes, TailBound, TailStrategy,
};
pub use catalog::{builtin, BUILTIN_NAMES};
pub use convergence::{
    herschfeld_diagnostic, herschfeld_sqrt_diagnostic_source, polya_szego_diagnostic,
    polya_szego_diagnostic_source, series_s_partial, AlphaValue, ConvergenceReport,
    DiagnosticsOptions, SequenceSource, SpecRadicands, Verdict, FINITE_HORIZON_CAVEAT,
};
pub use denest::{denest_forward, denest_from_tail, DenestFamily, DenestValue};
pub use error::{Error, Result};
pub use evalcore::{
    approximant, approximant_raw, limit_estimate, power_form_approximant, rounding_bound_for,
    tail_table, Approximant, LimitEstimate, LimitOptions, TailTable,
};
pub use real::{Real, DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};

// re-exported for downstream crates working with exact terms
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use seqspec::{
    eliminate_zeros, fold_weights, parse_expr, parse_rational_str, parse_sequence_expr,
    Continuation, Expr,
    FoldLog, FoldOptions, NormalizedSpec, RadicalKind, RadicalSpec, SequenceRule, SpecKind,
    TermValue, DEFAULT_TERM_BIT_BUDGET,
};
