//! Named verification scenarios. Each case recomputes a worked example from
//! stored constants and reports every comparison exactly.

use std::fmt::Display;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::diffop::{DiffOperator, Operator};
use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::rational::Q;
use crate::series::Series;

mod avoiding;
mod gallery;
mod hadamard;
mod heun;
mod landen;
mod modular;

/// Version tag of the report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Registered case names, in execution order.
pub const CASES: [&str; 6] = [
    "modular-j",
    "landen-chi2",
    "avoiding-permutations",
    "heun-premodular",
    "hadamard-cy",
    "sym-power-gallery",
];

/// One comparison inside a case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub description: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

impl Check {
    /// Exact equality of two displayable values.
    pub fn equal<T: PartialEq + Display>(description: impl Into<String>, expected: &T, computed: &T) -> Check {
        Check {
            description: description.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            pass: expected == computed,
        }
    }

    /// A residual series known and zero through `x^order`.
    pub fn zero_series(description: impl Into<String>, residual: &Series, order: i64) -> Check {
        let known = residual.order() >= order;
        let zero = residual.is_zero_to(order);
        let computed = if !known {
            format!("known only through x^{}", residual.order())
        } else if zero {
            format!("0 + O(x^{})", order + 1)
        } else {
            let k = (residual.val().unwrap()..=order)
                .find(|&k| !residual.coeff(k).is_zero())
                .unwrap();
            format!("{}·x^{k} + …", crate::rational::fmt_q(&residual.coeff(k)))
        };
        Check {
            description: description.into(),
            expected: format!("0 + O(x^{})", order + 1),
            computed,
            pass: known && zero,
        }
    }

    /// A yes/no property with a free-form account of what was found.
    pub fn holds(description: impl Into<String>, pass: bool, computed: impl Into<String>) -> Check {
        Check {
            description: description.into(),
            expected: "holds".into(),
            computed: computed.into(),
            pass,
        }
    }
}

/// Report of one case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub schema_version: u32,
    pub case_name: String,
    /// Equation blocks the stored constants come from.
    pub sources: Vec<String>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl CaseReport {
    fn new(case_name: &str, sources: Vec<String>, checks: Vec<Check>) -> CaseReport {
        CaseReport {
            schema_version: SCHEMA_VERSION,
            case_name: case_name.into(),
            sources,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Run a registered case.
pub fn run_case(name: &str) -> Result<CaseReport> {
    let (sources, checks) = match name {
        "modular-j" => modular::run()?,
        "landen-chi2" => landen::run()?,
        "avoiding-permutations" => avoiding::run()?,
        "heun-premodular" => heun::run()?,
        "hadamard-cy" => hadamard::run()?,
        "sym-power-gallery" => gallery::run()?,
        _ => return Err(Error::UnknownCase(name.into())),
    };
    Ok(CaseReport::new(name, sources, checks))
}

/// Parse a bundled data file.
fn load<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("data file {name}: {e}")))
}

/// Every data block carries a `source` label.
#[derive(Deserialize)]
struct Labelled {
    source: String,
}

fn sources(name: &str, text: &str) -> Result<Vec<String>> {
    let v: serde_json::Value = load(name, text)?;
    let blocks = v
        .get("blocks")
        .and_then(|b| b.as_object())
        .ok_or_else(|| Error::Invalid(format!("data file {name}: no blocks")))?;
    blocks
        .values()
        .map(|b| {
            serde_json::from_value::<Labelled>(b.clone())
                .map(|l| l.source)
                .map_err(|e| Error::Invalid(format!("data file {name}: {e}")))
        })
        .collect()
}

fn ser(f: &RatFunc, k: i64) -> Series {
    Series::from_ratfunc(f, k)
}

/// `f^e` as a series, for `f(0) = 1`.
fn pw(f: &RatFunc, e: &Q, k: i64) -> Result<Series> {
    ser(f, k).pow(e)
}

fn op(coeffs: &[RatFunc]) -> DiffOperator {
    Operator::new(coeffs.to_vec())
}

/// Whether a series difference vanishes through its known order.
fn vanishes(d: &Series) -> bool {
    d.is_zero_to(d.order())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_case_is_an_error() {
        assert_eq!(run_case("nope"), Err(Error::UnknownCase("nope".into())));
    }

    #[test]
    fn zero_series_check_reports_first_term() {
        let s = Series::from_coeffs(0, vec![crate::rational::q(0), crate::rational::q(3)], 5);
        let c = Check::zero_series("r", &s, 4);
        assert!(!c.pass);
        assert_eq!(c.computed, "3·x^1 + …");
        let c = Check::zero_series("r", &Series::zero(3), 4);
        assert!(!c.pass);
        assert!(Check::zero_series("r", &Series::zero(4), 4).pass);
    }
}
