//! Two-point function table: every representation computed by every
//! applicable method, with per-cell precondition failures rendered as
//! n/a(reason).

use serde::Serialize;

use gsaw_core::gaussian::{bosonic_loop_integral, mixed_expectation, saw_mixed_integrand};
use gsaw_core::linalg::Matrix;
use gsaw_core::markov::{estimate_dynkin, estimate_wsaw, wsaw_walk_sum, CtmcParams};
use gsaw_core::model::{covariance, CouplingModel};
use gsaw_core::scalar::{RealScalar, Scalar};
use gsaw_core::walks::{loop_two_point, saw_two_point, srw_two_point_series};

use crate::report::render;

const ENUM_MAX_SITES: usize = 7;

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub representation: String,
    pub method: String,
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Cell {
    fn value(rep: &str, method: &str, value: String, error: Option<f64>) -> Self {
        Cell {
            representation: rep.into(),
            method: method.into(),
            value: Some(value),
            error,
            note: None,
        }
    }

    fn na(rep: &str, method: &str, reason: String) -> Self {
        Cell {
            representation: rep.into(),
            method: method.into(),
            value: None,
            error: None,
            note: Some(format!("n/a({reason})")),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TwoPointReport {
    pub command: String,
    pub model: String,
    pub a: usize,
    pub b: usize,
    pub g: f64,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
    pub maxlen: usize,
    pub samples: u64,
    pub seed: u64,
    pub cells: Vec<Cell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<Enumeration>,
}

/// Raw enumerator output for inspection: walks as 1-based vertex arrays,
/// loop configurations as arrays of directed cycles.
#[derive(Debug, Serialize)]
pub struct Enumeration {
    pub saws: Vec<Vec<usize>>,
    pub loop_configs: Vec<Vec<Vec<usize>>>,
}

fn enumeration_listing<S: Scalar>(model: &CouplingModel<S>, a: usize, b: usize) -> Enumeration {
    use std::collections::BTreeSet;
    let m = model.size();
    let interior: BTreeSet<usize> = (0..m).filter(|&x| x != a && x != b).collect();
    let saws = gsaw_core::walks::enumerate_saws(a, b, &interior)
        .iter()
        .map(|s| s.walk().vertices().iter().map(|&v| v + 1).collect())
        .collect();
    let loop_configs = gsaw_core::walks::enumerate_loop_configs(&interior)
        .iter()
        .map(|cfg| {
            cfg.loops()
                .map(|l| l.vertices().iter().map(|&v| v + 1).collect())
                .collect()
        })
        .collect();
    Enumeration { saws, loop_configs }
}

#[allow(clippy::too_many_arguments)]
pub fn run<S: Scalar>(
    model: &CouplingModel<S>,
    model_name: &str,
    a: usize,
    b: usize,
    g: f64,
    lambda: f64,
    v: Option<&[f64]>,
    maxlen: usize,
    samples: u64,
    seed: u64,
    list_enumerations: bool,
) -> TwoPointReport {
    let m = model.size();
    let mut cells = Vec::new();

    let cov = covariance(&model.quadratic_form());

    match &cov {
        Ok(c) => cells.push(Cell::value("srw", "matrix-inverse", render(c.get(a, b)), Some(0.0))),
        Err(e) => cells.push(Cell::na("srw", "matrix-inverse", e.to_string())),
    }

    match srw_two_point_series(model, a, b, maxlen) {
        Ok((partial, tail)) => cells.push(Cell::value(
            "srw",
            "walk-series",
            render(&partial),
            Some(tail.to_f64()),
        )),
        Err(e) => cells.push(Cell::na("srw", "walk-series", e.to_string())),
    }

    if let Ok(c) = &cov {
        if m <= ENUM_MAX_SITES {
            for (rep, wick) in [("loop", false), ("loop-wick-ordered", true)] {
                cells.push(Cell::value(rep, "enumeration", render(&loop_two_point(c, a, b, wick)), Some(0.0)));
                match bosonic_loop_integral(c, a, b, wick) {
                    Ok(v) => cells.push(Cell::value(rep, "bosonic-integral", render(&v), Some(0.0))),
                    Err(e) => cells.push(Cell::na(rep, "bosonic-integral", e.to_string())),
                }
            }
            cells.push(Cell::value("saw", "enumeration", render(&saw_two_point(c, a, b)), Some(0.0)));
            match mixed_expectation(c, &saw_mixed_integrand(m, a, b)) {
                Ok(v) => cells.push(Cell::value("saw", "grassmann-integral", render(&v), Some(0.0))),
                Err(e) => cells.push(Cell::na("saw", "grassmann-integral", e.to_string())),
            }
        } else {
            let reason = format!("enumeration capped at {ENUM_MAX_SITES} sites");
            cells.push(Cell::na("loop", "enumeration", reason.clone()));
            cells.push(Cell::na("saw", "enumeration", reason));
        }
    }

    // potential-shifted walk row: exact resolvent and the killed-chain
    // estimator weighted by e^{-v.L}
    if let Some(v) = v {
        let shifted = potential_model(model, v);
        match shifted
            .as_ref()
            .map_err(|e| e.clone())
            .and_then(|sm| covariance(&sm.quadratic_form_with_potential()).map_err(|e| e.to_string()))
        {
            Ok(c) => cells.push(Cell::value(
                "srw-potential",
                "matrix-inverse",
                render(c.get(a, b)),
                Some(0.0),
            )),
            Err(e) => cells.push(Cell::na("srw-potential", "matrix-inverse", e)),
        }
        match CtmcParams::killed(model)
            .and_then(|p| estimate_dynkin(&p, a, b, v, samples, seed))
        {
            Ok(est) => cells.push(Cell::value(
                "srw-potential",
                "monte-carlo",
                format!("{}", est.mean),
                Some(est.stderr),
            )),
            Err(e) => cells.push(Cell::na("srw-potential", "monte-carlo", e.to_string())),
        }
    }

    match wsaw_walk_sum(model, a, b, g, lambda, maxlen) {
        Ok((partial, tail)) => cells.push(Cell::value(
            "wsaw",
            "walk-sum",
            format!("{partial}"),
            Some(tail),
        )),
        Err(e) => cells.push(Cell::na("wsaw", "walk-sum", e.to_string())),
    }

    match CtmcParams::killed(model).and_then(|p| estimate_wsaw(&p, a, b, g, lambda, samples, seed))
    {
        Ok(est) => cells.push(Cell::value(
            "wsaw",
            "monte-carlo",
            format!("{}", est.mean),
            Some(est.stderr),
        )),
        Err(e) => cells.push(Cell::na("wsaw", "monte-carlo", e.to_string())),
    }

    let enumeration = (list_enumerations && m <= ENUM_MAX_SITES)
        .then(|| enumeration_listing(model, a, b));

    TwoPointReport {
        command: "twopoint".into(),
        model: model_name.into(),
        a: a + 1,
        b: b + 1,
        g,
        lambda,
        v: v.map(<[f64]>::to_vec),
        maxlen,
        samples,
        seed,
        cells,
        enumeration,
    }
}

/// Rebuilds the model with the runtime potential vector (doubles embed
/// exactly in rational mode).
fn potential_model<S: Scalar>(
    model: &CouplingModel<S>,
    v: &[f64],
) -> Result<CouplingModel<S>, String> {
    if v.len() != model.size() {
        return Err(format!(
            "potential needs {} entries, got {}",
            model.size(),
            v.len()
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("potential entries must be finite".into());
    }
    let m = model.size();
    let diag: Vec<S> = (0..m).map(|x| model.d(x).clone()).collect();
    let offdiag = Matrix::from_fn(m, m, |x, y| model.j(x, y).clone());
    let potential: Vec<S> = v.iter().map(|&x| S::from_f64(x)).collect();
    CouplingModel::new(diag, offdiag, Some(potential)).map_err(|e| e.to_string())
}

/// CSV flattening of the table.
pub fn to_csv(report: &TwoPointReport) -> String {
    let mut out = String::from("representation,method,value,error,note\n");
    for c in &report.cells {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.representation,
            c.method,
            c.value.clone().unwrap_or_default(),
            c.error.map(|e| e.to_string()).unwrap_or_default(),
            c.note.clone().unwrap_or_default(),
        ));
    }
    out
}
