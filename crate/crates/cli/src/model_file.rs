//! Model file schema: a JSON document with keys `size`, `diag`, `offdiag`,
//! `potential`, and `arithmetic`. Complex numbers are two-element arrays
//! [re, im]; each part is either a JSON number or a rational string "p/q".

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use gsaw_core::linalg::Matrix;
use gsaw_core::model::CouplingModel;
use gsaw_core::scalar::{C64, CRat, Scalar};
use gsaw_core::BigRational;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumRepr {
    Num(f64),
    Ratio(String),
}

pub type ComplexRepr = [NumRepr; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub size: usize,
    pub diag: Vec<ComplexRepr>,
    pub offdiag: Vec<Vec<ComplexRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<ComplexRepr>>,
    pub arithmetic: String,
}

/// A loaded model in whichever arithmetic the file (or the --mode override)
/// selects.
pub enum AnyModel {
    Exact(CouplingModel<CRat>),
    Float(CouplingModel<C64>),
}

impl AnyModel {
    pub fn size(&self) -> usize {
        match self {
            AnyModel::Exact(m) => m.size(),
            AnyModel::Float(m) => m.size(),
        }
    }

    pub fn arithmetic_name(&self) -> &'static str {
        match self {
            AnyModel::Exact(_) => "exact-rational-complex",
            AnyModel::Float(_) => "floating-complex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float,
}

pub fn parse_arithmetic(s: &str) -> Result<Arithmetic> {
    match s {
        "exact" | "exact-rational-complex" => Ok(Arithmetic::Exact),
        "float" | "floating-complex" => Ok(Arithmetic::Float),
        other => bail!("unknown arithmetic mode {other:?} (use exact|float)"),
    }
}

fn rational_part(n: &NumRepr) -> Result<BigRational> {
    match n {
        NumRepr::Num(f) => BigRational::from_float(*f)
            .with_context(|| format!("{f} is not a finite number")),
        NumRepr::Ratio(s) => s
            .parse::<BigRational>()
            .with_context(|| format!("cannot parse rational {s:?}")),
    }
}

fn float_part(n: &NumRepr) -> Result<f64> {
    match n {
        NumRepr::Num(f) => Ok(*f),
        NumRepr::Ratio(s) => {
            let r = s
                .parse::<BigRational>()
                .with_context(|| format!("cannot parse rational {s:?}"))?;
            Ok(gsaw_core::RealScalar::to_f64(&r))
        }
    }
}

fn exact_scalar(c: &ComplexRepr) -> Result<CRat> {
    Ok(CRat::new_complex(rational_part(&c[0])?, rational_part(&c[1])?))
}

fn float_scalar(c: &ComplexRepr) -> Result<C64> {
    Ok(C64::new_complex(float_part(&c[0])?, float_part(&c[1])?))
}

fn build_model<S: Scalar>(
    file: &ModelFile,
    scalar: impl Fn(&ComplexRepr) -> Result<S>,
) -> Result<CouplingModel<S>> {
    let m = file.size;
    if file.diag.len() != m {
        bail!("diag has {} entries, expected {m}", file.diag.len());
    }
    if file.offdiag.len() != m || file.offdiag.iter().any(|r| r.len() != m) {
        bail!("offdiag must be a {m}x{m} matrix");
    }
    let diag = file.diag.iter().map(&scalar).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(m);
    for row in &file.offdiag {
        rows.push(row.iter().map(&scalar).collect::<Result<Vec<_>>>()?);
    }
    let potential = match &file.potential {
        None => None,
        Some(v) => {
            if v.len() != m {
                bail!("potential has {} entries, expected {m}", v.len());
            }
            Some(v.iter().map(&scalar).collect::<Result<Vec<_>>>()?)
        }
    };
    Ok(CouplingModel::new(diag, Matrix::from_rows(rows), potential)?)
}

/// Loads a model file, honoring the optional --mode override.
pub fn load_model(path: &Path, mode_override: Option<Arithmetic>) -> Result<AnyModel> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read model file {}", path.display()))?;
    let file: ModelFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed model file {}", path.display()))?;
    let mode = match mode_override {
        Some(m) => m,
        None => parse_arithmetic(&file.arithmetic)?,
    };
    Ok(match mode {
        Arithmetic::Exact => AnyModel::Exact(build_model(&file, exact_scalar)?),
        Arithmetic::Float => AnyModel::Float(build_model(&file, float_scalar)?),
    })
}
