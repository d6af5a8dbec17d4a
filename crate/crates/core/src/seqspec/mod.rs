//! Radical/power-form spec model: sequence rules, user specs, JSON format,
//! and the normalization transforms (zero elimination, weight folding).

pub mod expr;
pub mod normalize;
pub mod rule;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

pub use expr::{parse_expr, Expr, DEFAULT_TERM_BIT_BUDGET};
pub use normalize::{
    eliminate_zeros, fold_weights, FoldLog, FoldOptions, NormalizedSpec, SpecKind, TermValue,
};
pub use rule::{parse_rational_str, parse_sequence_expr, Continuation, SequenceRule};

use crate::error::{Error, Result};

/// Which family of nested forms a spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadicalKind {
    /// Nested integer roots (optionally weighted).
    IntegerRoot,
    /// Nested positive real exponents.
    PowerForm,
}

/// Full description of a continued radical or continued power form.
#[derive(Debug, Clone)]
pub struct RadicalSpec {
    pub kind: RadicalKind,
    /// Radicands a_n >= 0.
    pub a: SequenceRule,
    /// Weights b_n > 0; `None` means constant 1.
    pub b: Option<SequenceRule>,
    /// Integer roots r_n >= 1 (kind = IntegerRoot).
    pub r: Option<SequenceRule>,
    /// Positive exponents p_n (kind = PowerForm).
    pub p: Option<SequenceRule>,
    pub label: Option<String>,
}

impl RadicalSpec {
    pub fn integer_root(a: SequenceRule, b: Option<SequenceRule>, r: SequenceRule) -> RadicalSpec {
        RadicalSpec {
            kind: RadicalKind::IntegerRoot,
            a,
            b,
            r: Some(r),
            p: None,
            label: None,
        }
    }

    pub fn power_form(a: SequenceRule, p: SequenceRule) -> RadicalSpec {
        RadicalSpec {
            kind: RadicalKind::PowerForm,
            a,
            b: None,
            r: None,
            p: Some(p),
            label: None,
        }
    }

    pub fn with_label(mut self, label: &str) -> RadicalSpec {
        self.label = Some(label.to_string());
        self
    }

    pub fn has_weights(&self) -> bool {
        self.b.is_some()
    }

    /// Radicand a_n, checked non-negative.
    pub fn a_term(&self, n: u64, budget: u64) -> Result<BigRational> {
        let v = self.a.term(n, budget)?;
        if v.is_negative() {
            return Err(Error::NegativeRadicand {
                n,
                value: v.to_string(),
            });
        }
        Ok(v)
    }

    /// Weight b_n, checked strictly positive (1 when absent).
    pub fn b_term(&self, n: u64, budget: u64) -> Result<BigRational> {
        match &self.b {
            None => Ok(BigRational::from(BigInt::from(1))),
            Some(rule) => {
                let v = rule.term(n, budget)?;
                if !v.is_positive() {
                    return Err(Error::InvalidWeight {
                        n,
                        value: v.to_string(),
                    });
                }
                Ok(v)
            }
        }
    }

    /// Root index r_n, checked to be an integer >= 1.
    pub fn r_term(&self, n: u64, budget: u64) -> Result<u64> {
        let rule = self.r.as_ref().ok_or_else(|| {
            Error::InvalidSpec("integer-root spec is missing the r sequence".into())
        })?;
        let v = rule.term(n, budget)?;
        if !v.is_integer() {
            return Err(Error::InvalidRoot {
                n,
                value: v.to_string(),
            });
        }
        let i = v.to_integer();
        match i.to_u64() {
            Some(r) if r >= 1 => Ok(r),
            _ => Err(Error::InvalidRoot {
                n,
                value: v.to_string(),
            }),
        }
    }

    /// Exponent p_n, checked strictly positive.
    pub fn p_term(&self, n: u64, budget: u64) -> Result<BigRational> {
        let rule = self
            .p
            .as_ref()
            .ok_or_else(|| Error::InvalidSpec("power-form spec is missing the p sequence".into()))?;
        let v = rule.term(n, budget)?;
        if !v.is_positive() {
            return Err(Error::InvalidPowerExponent {
                n,
                value: v.to_string(),
            });
        }
        Ok(v)
    }

    pub fn from_json_str(text: &str) -> Result<RadicalSpec> {
        let j: SpecJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        j.try_into()
    }

    pub fn to_json_string(&self) -> String {
        let j: SpecJson = self.into();
        serde_json::to_string_pretty(&j).expect("spec serialization")
    }
}

/// JSON wire form of a rule: an expression string or an explicit list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RuleJson {
    Expr(String),
    List {
        list: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        then: Option<String>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpecJson {
    kind: String,
    a: RuleJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<RuleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<RuleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<RuleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl TryFrom<RuleJson> for SequenceRule {
    type Error = Error;

    fn try_from(j: RuleJson) -> Result<SequenceRule> {
        match j {
            RuleJson::Expr(s) => parse_sequence_expr(&s),
            RuleJson::List { list, then } => {
                if list.is_empty() {
                    return Err(Error::InvalidSpec("empty explicit list".into()));
                }
                let items = list
                    .iter()
                    .map(|s| parse_rational_str(s))
                    .collect::<Result<Vec<_>>>()?;
                let then = match then.as_deref() {
                    None => Continuation::None,
                    Some("repeat") => Continuation::Repeat,
                    Some(expr) => Continuation::Expr(parse_expr(expr)?),
                };
                Ok(SequenceRule::List { items, then })
            }
        }
    }
}

impl From<&SequenceRule> for RuleJson {
    fn from(r: &SequenceRule) -> RuleJson {
        match r {
            SequenceRule::Expr(e) => RuleJson::Expr(e.to_string()),
            SequenceRule::List { items, then } => RuleJson::List {
                list: items.iter().map(|q| q.to_string()).collect(),
                then: match then {
                    Continuation::None => None,
                    Continuation::Repeat => Some("repeat".to_string()),
                    Continuation::Expr(e) => Some(e.to_string()),
                },
            },
        }
    }
}

impl TryFrom<SpecJson> for RadicalSpec {
    type Error = Error;

    fn try_from(j: SpecJson) -> Result<RadicalSpec> {
        let kind = match j.kind.as_str() {
            "radical" => RadicalKind::IntegerRoot,
            "power" => RadicalKind::PowerForm,
            other => {
                return Err(Error::InvalidSpec(format!(
                    "kind must be \"radical\" or \"power\", got \"{other}\""
                )))
            }
        };
        match kind {
            RadicalKind::IntegerRoot => {
                if j.p.is_some() {
                    return Err(Error::InvalidSpec(
                        "kind \"radical\" must not set p".into(),
                    ));
                }
            }
            RadicalKind::PowerForm => {
                if j.r.is_some() || j.b.is_some() {
                    return Err(Error::InvalidSpec(
                        "kind \"power\" must not set r or b".into(),
                    ));
                }
                if j.p.is_none() {
                    return Err(Error::InvalidSpec("kind \"power\" requires p".into()));
                }
            }
        }
        let a = j.a.try_into()?;
        let b = j.b.map(SequenceRule::try_from).transpose()?;
        let r = match (kind, j.r) {
            (RadicalKind::IntegerRoot, Some(r)) => Some(r.try_into()?),
            (RadicalKind::IntegerRoot, None) => Some(SequenceRule::constant_u64(2)),
            _ => None,
        };
        let p = j.p.map(SequenceRule::try_from).transpose()?;
        Ok(RadicalSpec {
            kind,
            a,
            b,
            r,
            p,
            label: j.label,
        })
    }
}

impl From<&RadicalSpec> for SpecJson {
    fn from(s: &RadicalSpec) -> SpecJson {
        SpecJson {
            kind: match s.kind {
                RadicalKind::IntegerRoot => "radical",
                RadicalKind::PowerForm => "power",
            }
            .to_string(),
            a: (&s.a).into(),
            b: s.b.as_ref().map(Into::into),
            r: s.r.as_ref().map(Into::into),
            p: s.p.as_ref().map(Into::into),
            label: s.label.clone(),
        }
    }
}
