//! One-dimensional adaptive quadrature for the Gamma-weighted site factors.

use crate::error::{Error, Result};

/// Integral of t^{n-1}/(n-1)! * exp(-g t^2 - beta t) over [0, inf) for
/// n >= 1, and 1 for n = 0 (the point mass at the origin).
///
/// For g = 0 the Gamma integral is beta^{-n} in closed form (requires
/// beta > 0). For g > 0 an adaptive Simpson rule with absolute tolerance
/// 1e-10 runs up to an analytic tail cutoff.
pub fn gamma_weight_integral(n: u32, g: f64, beta: f64) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    if g < 0.0 {
        return Err(Error::Hypothesis("g must be nonnegative".into()));
    }
    if g == 0.0 {
        if beta <= 0.0 {
            return Err(Error::Hypothesis(
                "g = 0 requires beta > 0 for convergence".into(),
            ));
        }
        return Ok(beta.powi(-(n as i32)));
    }

    let log_fact: f64 = (1..n).map(|k| f64::from(k).ln()).sum();
    let integrand = |t: f64| -> f64 {
        if t <= 0.0 {
            return if n == 1 { (-g * t * t - beta * t).exp() } else { 0.0 };
        }
        let log_val = f64::from(n - 1) * t.ln() - log_fact - g * t * t - beta * t;
        log_val.exp()
    };

    // Tail cutoff: past the integrand's mode, its local log-slope is
    // r(t) = 2 g t + beta - (n-1)/t, and the remainder beyond T is at most
    // h(T)/r(T). Double T until that analytic bound is negligible.
    let mut upper = 1.0f64;
    loop {
        let slope = 2.0 * g * upper + beta - f64::from(n - 1) / upper;
        if slope > 0.0 && integrand(upper) / slope < 1e-12 {
            break;
        }
        upper *= 2.0;
        if upper > 1e9 {
            return Err(Error::Hypothesis(
                "tail cutoff failed; parameters out of range".into(),
            ));
        }
    }
    Ok(adaptive_simpson(&integrand, 0.0, upper, 1e-10, 40))
}

/// Adaptive Simpson with absolute tolerance splitting.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let c = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fc = f(c);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_rec(f, a, b, fa, fb, fc, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let fd = f(d);
    let fe = f(e);
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, c, fa, fc, fd, left, tol / 2.0, depth - 1)
        + simpson_rec(f, c, b, fc, fb, fe, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_zero_is_point_mass() {
        assert_eq!(gamma_weight_integral(0, 0.5, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn closed_form_exponential_integrals() {
        assert_eq!(gamma_weight_integral(1, 0.0, 2.0).unwrap(), 0.5);
        assert_eq!(gamma_weight_integral(2, 0.0, 2.0).unwrap(), 0.25);
    }

    #[test]
    fn divergent_parameters_rejected() {
        assert!(gamma_weight_integral(1, 0.0, 0.0).is_err());
        assert!(gamma_weight_integral(1, -1.0, 1.0).is_err());
    }

    #[test]
    fn quadrature_against_fine_trapezoid() {
        // independent oracle: composite trapezoid on a fine fixed grid
        for (n, g, beta) in [(1u32, 0.5f64, 2.0f64), (2, 1.0, 1.0), (3, 0.5, 0.0)] {
            let val = gamma_weight_integral(n, g, beta).unwrap();
            let log_fact: f64 = (1..n).map(|k| f64::from(k).ln()).sum();
            let f = |t: f64| -> f64 {
                if t == 0.0 && n > 1 {
                    return 0.0;
                }
                (f64::from(n - 1) * t.max(1e-300).ln() - log_fact - g * t * t - beta * t).exp()
            };
            let (hi, steps) = (30.0, 3_000_000);
            let h = hi / steps as f64;
            let mut acc = 0.5 * (f(0.0) + f(hi));
            for i in 1..steps {
                acc += f(i as f64 * h);
            }
            acc *= h;
            assert!(
                (val - acc).abs() < 1e-8,
                "n={n} g={g} beta={beta}: {val} vs {acc}"
            );
        }
    }

    #[test]
    fn quadrature_continuity_toward_closed_form() {
        // small g should approach the g = 0 closed form from below
        let near = gamma_weight_integral(2, 1e-8, 2.0).unwrap();
        assert!((near - 0.25).abs() < 1e-6);
    }
}
