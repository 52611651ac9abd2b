//! Machine-readable reports. Exact values serialize as rational strings so
//! nothing is lost on the way out; floating values are plain numbers
//! rendered as strings for a uniform schema.

use serde::Serialize;

use gsaw_core::model::{Positivity, ValidationReport};
use gsaw_core::scalar::{RealScalar, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    pub detail: String,
}

impl Item {
    pub fn pass(id: &str, lhs: String, rhs: String, detail: impl Into<String>) -> Self {
        Item {
            id: id.to_string(),
            status: Status::Pass,
            lhs: Some(lhs),
            rhs: Some(rhs),
            detail: detail.into(),
        }
    }

    pub fn fail(id: &str, lhs: String, rhs: String, detail: impl Into<String>) -> Self {
        Item {
            id: id.to_string(),
            status: Status::Fail,
            lhs: Some(lhs),
            rhs: Some(rhs),
            detail: detail.into(),
        }
    }

    pub fn skip(id: &str, reason: impl Into<String>) -> Self {
        Item {
            id: id.to_string(),
            status: Status::Skip,
            lhs: None,
            rhs: None,
            detail: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

pub fn summarize(items: &[Item]) -> Summary {
    Summary {
        pass: items.iter().filter(|i| i.status == Status::Pass).count(),
        fail: items.iter().filter(|i| i.status == Status::Fail).count(),
        skip: items.iter().filter(|i| i.status == Status::Skip).count(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Hypotheses {
    pub zero_diag_j: bool,
    pub diag_nonzero: bool,
    pub diagonally_dominant: bool,
    pub rho: Option<String>,
    pub hermitian_part_positive: String,
    pub markov_positive: bool,
}

pub fn hypotheses_of<R: RealScalar>(report: &ValidationReport<R>) -> Hypotheses {
    Hypotheses {
        zero_diag_j: report.zero_diag_j,
        diag_nonzero: report.diag_nonzero,
        diagonally_dominant: report.diagonally_dominant,
        rho: report.rho.as_ref().map(|r| format!("{r}")),
        hermitian_part_positive: match report.hermitian_part_positive {
            Positivity::Positive => "positive".into(),
            Positivity::NotPositive => "not-positive".into(),
            Positivity::Indeterminate => "indeterminate".into(),
        },
        markov_positive: report.markov_positive,
    }
}

pub fn render<S: Scalar>(v: &S) -> String {
    v.render()
}

/// Writes a report to the output path or stdout.
pub fn emit<T: Serialize>(report: &T, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}
