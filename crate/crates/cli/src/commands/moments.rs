//! Exposes the local-time moment oracle: exact iterated-covariance values
//! for a requested power multiset.

use serde::Serialize;

use gsaw_core::gaussian::{local_time_moment_oracle, tau_weighted_two_point, MomentRequest};
use gsaw_core::model::{covariance, CouplingModel};
use gsaw_core::algebra::Polynomial;
use gsaw_core::scalar::Scalar;

use crate::report::render;

#[derive(Debug, Serialize)]
pub struct MomentsReport {
    pub command: String,
    pub model: String,
    pub a: usize,
    pub b: usize,
    pub powers: Vec<u32>,
    /// (d_b pi_b)^{-1} E_a[prod_x L_x^{k_x}; X ends at b], exact.
    pub moment: String,
    pub moment_float: f64,
    /// The same number through the weighted Gaussian expectation.
    pub tau_side: String,
    pub agree: bool,
}

pub fn run<S: Scalar>(
    model: &CouplingModel<S>,
    model_name: &str,
    a: usize,
    b: usize,
    powers: Vec<u32>,
) -> anyhow::Result<MomentsReport> {
    let cov = covariance(&model.quadratic_form())?;
    let req = MomentRequest::new(a, b, powers.clone())?;
    let moment = local_time_moment_oracle(&cov, &req)?;

    let mut f: Polynomial<S> = Polynomial::one();
    for (x, &k) in powers.iter().enumerate() {
        f = f.mul(&Polynomial::var(x as u32).pow(k));
    }
    let tau_side = tau_weighted_two_point(&cov, &f, a, b)?;
    let agree = moment.approx_eq(&tau_side, gsaw_core::scalar::FLOAT_TOL);

    Ok(MomentsReport {
        command: "moments".into(),
        model: model_name.into(),
        a: a + 1,
        b: b + 1,
        powers,
        moment_float: moment.to_c64().re,
        moment: render(&moment),
        tau_side: render(&tau_side),
        agree,
    })
}
