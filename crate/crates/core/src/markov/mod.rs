//! Continuous-time Markov chains and Monte Carlo estimators for the
//! probabilistic representations, plus the Gamma-weighted walk-sum for the
//! weakly self-avoiding walk.
//!
//! Two chain variants share one step routine:
//!
//! - killed: holding rate d_x, jump probabilities J_{x,y}/d_x, remaining mass
//!   to an absorbing cemetery; diagonal dominance makes the death time finite
//!   almost surely;
//! - unkilled: holding rate dbar_x = sum_y J_{x,y}, jump probabilities
//!   J_{x,y}/dbar_x, no cemetery. A site with dbar_x = 0 simply never jumps.
//!
//! Sampling is embarrassingly parallel: sample index i draws from the
//! deterministic substream (seed, i), and accumulation merges fixed chunks in
//! index order, so an [`Estimate`] never depends on the thread count.

pub mod quad;

pub use quad::{adaptive_simpson, gamma_weight_integral};

use crate::error::{Error, Result};
use crate::exec;
use crate::gaussian::{local_time_moment_oracle, MomentRequest};
use crate::model::{covariance, CouplingModel};
use crate::rng::SubRng;
use crate::scalar::{factorial, Scalar};

const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainVariant {
    Killed,
    Unkilled,
}

/// Simulation parameters of the continuous-time chain, in double precision.
///
/// Rows of (jump probabilities, kill probability) sum to one by
/// construction; the builder re-checks to 1e-12 after conversion.
#[derive(Debug, Clone)]
pub struct CtmcParams {
    variant: ChainVariant,
    m: usize,
    /// Holding rates: d_x (killed) or dbar_x (unkilled).
    rates: Vec<f64>,
    /// Jump probabilities out of each site (row x sums to 1 - kill[x]).
    jump: Vec<Vec<f64>>,
    /// Kill probabilities pi_{x,cemetery}; all zero for the unkilled chain.
    kill: Vec<f64>,
    /// Original diagonal d_x.
    d: Vec<f64>,
    /// Row sums dbar_x of J.
    d_bar: Vec<f64>,
}

impl CtmcParams {
    /// Killed chain: requires d_x > 0, J >= 0 real, and diagonal dominance.
    pub fn killed<S: Scalar>(model: &CouplingModel<S>) -> Result<Self> {
        let report = model.validate();
        if !report.markov_ready() {
            return Err(Error::Hypothesis(format!(
                "killed chain needs d > 0, J >= 0, and diagonal dominance: {report:?}"
            )));
        }
        Self::build(model, ChainVariant::Killed)
    }

    /// Unkilled chain with rates dbar_x; sites with dbar_x = 0 are absorbing.
    pub fn unkilled<S: Scalar>(model: &CouplingModel<S>) -> Result<Self> {
        let report = model.validate();
        if !(report.zero_diag_j && report.markov_positive) {
            return Err(Error::Hypothesis(
                "unkilled chain needs d > 0 and J >= 0".into(),
            ));
        }
        Self::build(model, ChainVariant::Unkilled)
    }

    fn build<S: Scalar>(model: &CouplingModel<S>, variant: ChainVariant) -> Result<Self> {
        let m = model.size();
        let d: Vec<f64> = (0..m).map(|x| model.d(x).to_c64().re).collect();
        let j: Vec<Vec<f64>> = (0..m)
            .map(|x| (0..m).map(|y| model.j(x, y).to_c64().re).collect())
            .collect();
        let d_bar: Vec<f64> = j.iter().map(|row| row.iter().sum()).collect();

        let (rates, jump, kill) = match variant {
            ChainVariant::Killed => {
                let mut jump = Vec::with_capacity(m);
                let mut kill = Vec::with_capacity(m);
                for x in 0..m {
                    let row: Vec<f64> = (0..m).map(|y| j[x][y] / d[x]).collect();
                    let total: f64 = row.iter().sum();
                    if total > 1.0 + 1e-12 {
                        return Err(Error::Hypothesis(format!(
                            "jump row {x} exceeds unit mass: {total}"
                        )));
                    }
                    jump.push(row);
                    kill.push((1.0 - total).max(0.0));
                }
                (d.clone(), jump, kill)
            }
            ChainVariant::Unkilled => {
                let mut jump = Vec::with_capacity(m);
                for x in 0..m {
                    if d_bar[x] == 0.0 {
                        jump.push(vec![0.0; m]);
                    } else {
                        jump.push((0..m).map(|y| j[x][y] / d_bar[x]).collect());
                    }
                }
                (d_bar.clone(), jump, vec![0.0; m])
            }
        };
        Ok(CtmcParams {
            variant,
            m,
            rates,
            jump,
            kill,
            d,
            d_bar,
        })
    }

    pub fn variant(&self) -> ChainVariant {
        self.variant
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn rate(&self, x: usize) -> f64 {
        self.rates[x]
    }

    pub fn d(&self, x: usize) -> f64 {
        self.d[x]
    }

    pub fn d_bar(&self, x: usize) -> f64 {
        self.d_bar[x]
    }

    pub fn kill_prob(&self, x: usize) -> f64 {
        self.kill[x]
    }

    /// One transition: exponential holding time, then either a jump target
    /// or None for the cemetery. Absorbing states hold forever.
    fn step(&self, x: usize, rng: &mut SubRng) -> (f64, Option<usize>) {
        let rate = self.rates[x];
        if rate == 0.0 {
            return (f64::INFINITY, Some(x));
        }
        let hold = rng.exponential(rate);
        let u = rng.next_f64();
        let mut acc = 0.0;
        for y in 0..self.m {
            acc += self.jump[x][y];
            if u < acc {
                return (hold, Some(y));
            }
        }
        match self.variant {
            ChainVariant::Killed => (hold, None),
            // guard against accumulated rounding at the row edge
            ChainVariant::Unkilled => (hold, Some(self.m - 1)),
        }
    }
}

/// One chain realization: jump skeleton, holding times, death time (killed
/// variant), last site, and the per-site local-time vector. Local times sum
/// to the death time (killed) or to the horizon (unkilled).
#[derive(Debug, Clone)]
pub struct PathSample {
    pub skeleton: Vec<usize>,
    pub holds: Vec<f64>,
    pub zeta: Option<f64>,
    pub last_site: usize,
    pub local_times: Vec<f64>,
}

/// Simulates one path. The killed variant takes no horizon and runs to the
/// cemetery; the unkilled variant runs to the horizon T (its final holding
/// time is truncated there).
pub fn simulate_path(
    params: &CtmcParams,
    start: usize,
    horizon: Option<f64>,
    rng: &mut SubRng,
) -> PathSample {
    let mut local = vec![0.0; params.m];
    let mut skeleton = vec![start];
    let mut holds = Vec::new();
    match (params.variant, horizon) {
        (ChainVariant::Killed, None) => {
            let mut x = start;
            let mut t = 0.0;
            loop {
                let (hold, next) = params.step(x, rng);
                local[x] += hold;
                holds.push(hold);
                t += hold;
                match next {
                    None => {
                        return PathSample {
                            skeleton,
                            holds,
                            zeta: Some(t),
                            last_site: x,
                            local_times: local,
                        }
                    }
                    Some(y) => {
                        skeleton.push(y);
                        x = y;
                    }
                }
            }
        }
        (ChainVariant::Unkilled, Some(t_max)) => {
            let mut x = start;
            let mut t = 0.0;
            loop {
                let (hold, next) = params.step(x, rng);
                if t + hold >= t_max {
                    let used = t_max - t;
                    local[x] += used;
                    holds.push(used);
                    return PathSample {
                        skeleton,
                        holds,
                        zeta: None,
                        last_site: x,
                        local_times: local,
                    };
                }
                local[x] += hold;
                holds.push(hold);
                t += hold;
                let y = next.expect("unkilled chain has no cemetery");
                skeleton.push(y);
                x = y;
            }
        }
        (ChainVariant::Killed, Some(_)) => {
            panic!("killed chain takes no horizon")
        }
        (ChainVariant::Unkilled, None) => {
            panic!("unkilled chain requires a horizon")
        }
    }
}

/// A Monte Carlo result with seed provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl Estimate {
    /// |mean - target| <= k * stderr.
    pub fn within_sigma(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

/// Chunked mean/stderr driver: sample index i draws from substream (seed, i);
/// chunks are merged in index order.
fn monte_carlo<F>(n: u64, seed: u64, sample_value: F) -> Estimate
where
    F: Fn(u64, &mut SubRng) -> f64 + Sync,
{
    let n_chunks = exec::chunk_count(n as usize, MC_CHUNK);
    let partials = exec::map_collect(n_chunks, |c| {
        let lo = c as u64 * MC_CHUNK as u64;
        let hi = ((c as u64 + 1) * MC_CHUNK as u64).min(n);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in lo..hi {
            let mut rng = SubRng::substream(seed, i);
            let v = sample_value(i, &mut rng);
            sum += v;
            sum_sq += v * v;
        }
        (sum, sum_sq)
    });
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for (s, s2) in partials {
        sum += s;
        sum_sq += s2;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate {
        mean,
        stderr: (var / nf).sqrt(),
        n_samples: n,
        seed,
    }
}

/// Killed-chain local-time loop without skeleton bookkeeping; returns the
/// last site. Used by the estimators.
fn run_killed(params: &CtmcParams, start: usize, local: &mut [f64], rng: &mut SubRng) -> usize {
    local.fill(0.0);
    let mut x = start;
    loop {
        let (hold, next) = params.step(x, rng);
        local[x] += hold;
        match next {
            None => return x,
            Some(y) => x = y,
        }
    }
}

/// Unkilled-chain local-time loop to the horizon; returns X(T).
fn run_unkilled(
    params: &CtmcParams,
    start: usize,
    t_max: f64,
    local: &mut [f64],
    rng: &mut SubRng,
) -> usize {
    local.fill(0.0);
    let mut x = start;
    let mut t = 0.0;
    loop {
        let (hold, next) = params.step(x, rng);
        if t + hold >= t_max {
            local[x] += t_max - t;
            return x;
        }
        local[x] += hold;
        t += hold;
        x = next.expect("no cemetery");
    }
}

fn check_killed_weight_hypothesis(params: &CtmcParams, v: &[f64]) -> Result<()> {
    if params.variant != ChainVariant::Killed {
        return Err(Error::Hypothesis("estimator needs the killed chain".into()));
    }
    if v.len() != params.m {
        return Err(Error::Dimension("potential length mismatch".into()));
    }
    for x in 0..params.m {
        if !(params.d_bar[x] < params.d[x] + v[x]) {
            return Err(Error::Hypothesis(format!(
                "need dbar_x < d_x + v_x at site {x}: {} !< {}",
                params.d_bar[x],
                params.d[x] + v[x]
            )));
        }
    }
    Ok(())
}

/// Monte Carlo for the killed-chain local-time representation:
/// mean of e^{-v . L} 1[X(zeta-) = b] / (d_b pi_{b,cemetery}).
pub fn estimate_dynkin(
    params: &CtmcParams,
    a: usize,
    b: usize,
    v: &[f64],
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    check_killed_weight_hypothesis(params, v)?;
    let v = v.to_vec();
    estimate_killed_functional(params, a, b, n, seed, move |local| {
        let mut dot = 0.0;
        for (x, l) in local.iter().enumerate() {
            dot += v[x] * l;
        }
        (-dot).exp()
    })
}

/// General-functional variant of the killed-chain estimator:
/// mean of F(L) 1[X(zeta-) = b] / (d_b pi_{b,cemetery}).
pub fn estimate_killed_functional<F>(
    params: &CtmcParams,
    a: usize,
    b: usize,
    n: u64,
    seed: u64,
    f: F,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if params.variant != ChainVariant::Killed {
        return Err(Error::Hypothesis("estimator needs the killed chain".into()));
    }
    let norm = params.d[b] * params.kill[b];
    if norm <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "site {b} has zero kill probability"
        )));
    }
    let m = params.m;
    Ok(monte_carlo(n, seed, move |_, rng| {
        let mut local = vec![0.0; m];
        let last = run_killed(params, a, &mut local, rng);
        if last == b {
            f(&local) / norm
        } else {
            0.0
        }
    }))
}

/// Monte Carlo for the finite-horizon representation, with the horizon
/// integral importance-sampled by T ~ Exp(t_rate): mean of
/// F(L_T) e^{-(v + d - dbar) . L_T} 1[X(T) = b] e^{t_rate T} / t_rate.
///
/// The integrand decays like e^{-mu T} with mu = min_x (v_x + d_x -
/// dbar_x), which must be positive; `t_rate` defaults to mu/2 and must stay
/// below mu for finite variance.
pub fn estimate_horizon_functional<F>(
    params: &CtmcParams,
    a: usize,
    b: usize,
    extra_potential: &[f64],
    n: u64,
    seed: u64,
    t_rate: Option<f64>,
    f: F,
) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if params.variant != ChainVariant::Unkilled {
        return Err(Error::Hypothesis(
            "estimator needs the unkilled chain".into(),
        ));
    }
    if extra_potential.len() != params.m {
        return Err(Error::Dimension("potential length mismatch".into()));
    }
    let weights: Vec<f64> = (0..params.m)
        .map(|x| extra_potential[x] + params.d[x] - params.d_bar[x])
        .collect();
    let decay = weights.iter().copied().fold(f64::INFINITY, f64::min);
    if !(decay > 0.0) {
        return Err(Error::Hypothesis(format!(
            "need v_x + d_x - dbar_x > 0 everywhere, min = {decay}"
        )));
    }
    let rate = t_rate.unwrap_or(decay / 2.0);
    if !(rate > 0.0 && rate < decay) {
        return Err(Error::Hypothesis(format!(
            "importance rate {rate} must lie in (0, {decay})"
        )));
    }
    let m = params.m;
    Ok(monte_carlo(n, seed, move |_, rng| {
        let t_horizon = rng.exponential(rate);
        let mut local = vec![0.0; m];
        let end = run_unkilled(params, a, t_horizon, &mut local, rng);
        if end != b {
            return 0.0;
        }
        let mut dot = 0.0;
        for (x, l) in local.iter().enumerate() {
            dot += weights[x] * l;
        }
        f(&local) * (-dot + rate * t_horizon).exp() / rate
    }))
}

/// Monte Carlo for the Feynman-Kac-style horizon representation with
/// exponential weight e^{-v . L_T}.
pub fn estimate_fk(
    params: &CtmcParams,
    a: usize,
    b: usize,
    v: &[f64],
    n: u64,
    seed: u64,
    t_rate: Option<f64>,
) -> Result<Estimate> {
    estimate_horizon_functional(params, a, b, v, n, seed, t_rate, |_| 1.0)
}

/// Monte Carlo for the weakly self-avoiding walk two-point function:
/// mean of e^{-g sum_x L_x^2 - lambda zeta} 1[X(zeta-) = b] / (d_b pi_b).
///
/// The killing time equals the total local time, so the lambda weight is
/// e^{-lambda sum_x L_x}; lambda must exceed -min_x (d_x - dbar_x) for the
/// weight to stay integrable.
pub fn estimate_wsaw(
    params: &CtmcParams,
    a: usize,
    b: usize,
    g: f64,
    lambda: f64,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    if g < 0.0 {
        return Err(Error::Hypothesis("g must be nonnegative".into()));
    }
    let guard = (0..params.m)
        .map(|x| params.d[x] - params.d_bar[x])
        .fold(f64::INFINITY, f64::min);
    if !(lambda > -guard) {
        return Err(Error::Hypothesis(format!(
            "lambda = {lambda} violates the integrability guard > {}",
            -guard
        )));
    }
    estimate_killed_functional(params, a, b, n, seed, move |local| {
        let mut sq = 0.0;
        let mut tot = 0.0;
        for &l in local {
            sq += l * l;
            tot += l;
        }
        (-g * sq - lambda * tot).exp()
    })
}

/// Partial sum of the Gamma-weighted walk sum
/// sum_w J^w prod_x integral of t^{n_x(w)-1}/(n_x-1)! e^{-g t^2 - (lambda+d) t}
/// over walks with |w| <= maxlen, for homogeneous d. Returns the partial sum
/// and a geometric tail bound (site factors are dominated by the g = 0
/// case, whose tail is the shifted walk series).
pub fn wsaw_walk_sum<S: Scalar>(
    model: &CouplingModel<S>,
    a: usize,
    b: usize,
    g: f64,
    lambda: f64,
    maxlen: usize,
) -> Result<(f64, f64)> {
    let m = model.size();
    let d0 = model.d(0).clone();
    if (1..m).any(|x| model.d(x) != &d0) {
        return Err(Error::Hypothesis(
            "walk sum requires homogeneous diagonal d".into(),
        ));
    }
    let report = model.validate();
    if !report.markov_positive || !report.zero_diag_j {
        return Err(Error::Hypothesis("walk sum needs d > 0 and J >= 0".into()));
    }
    let d = d0.to_c64().re;
    let beta = lambda + d;
    let j: Vec<Vec<f64>> = (0..m)
        .map(|x| (0..m).map(|y| model.j(x, y).to_c64().re).collect())
        .collect();
    let max_row: f64 = j
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .fold(0.0, f64::max);
    if !(beta > max_row) {
        return Err(Error::Hypothesis(format!(
            "lambda + d = {beta} must exceed the largest coupling row sum {max_row}"
        )));
    }

    // site factors, memoized through the largest possible visit count
    let mut fac = Vec::with_capacity(maxlen + 2);
    for n in 0..=(maxlen as u32 + 1) {
        fac.push(gamma_weight_integral(n, g, beta)?);
    }

    let mut visits = vec![0u32; m];
    visits[a] = 1;
    let mut partial = 0.0;
    let weight0 = fac[1]; // all other sites contribute fac[0] = 1
    dfs_walk_sum(
        &j, b, maxlen, &fac, &mut visits, a, 0, weight0, &mut partial,
    );

    let rho = max_row / beta;
    let tail = (1.0 / beta) * rho.powi(maxlen as i32 + 1) / (1.0 - rho);
    Ok((partial, tail))
}

#[allow(clippy::too_many_arguments)]
fn dfs_walk_sum(
    j: &[Vec<f64>],
    b: usize,
    maxlen: usize,
    fac: &[f64],
    visits: &mut [u32],
    x: usize,
    len: usize,
    weight: f64,
    acc: &mut f64,
) {
    if x == b {
        *acc += weight;
    }
    if len == maxlen {
        return;
    }
    for y in 0..j.len() {
        let coupling = j[x][y];
        if coupling == 0.0 {
            continue;
        }
        let n_y = visits[y] as usize;
        let ratio = fac[n_y + 1] / fac[n_y];
        visits[y] += 1;
        dfs_walk_sum(j, b, maxlen, fac, visits, y, len + 1, weight * coupling * ratio, acc);
        visits[y] -= 1;
    }
}

/// Exact Taylor coefficients in g of the weakly self-avoiding walk two-point
/// function at g = 0, from local-time moments under the lambda-shifted model:
/// coefficient k is (-1)^k/k! sum over k-tuples of sites of the moment with
/// two insertions per chosen site.
pub fn wsaw_g_taylor<S: Scalar>(
    model: &CouplingModel<S>,
    a: usize,
    b: usize,
    lambda: &S,
    k_max: u32,
) -> Result<Vec<S>> {
    if k_max > 3 {
        return Err(Error::SizeLimit("Taylor cap is k <= 3".into()));
    }
    let shifted = model.shifted_diag(lambda);
    let report = shifted.validate();
    if !report.series_ready() {
        return Err(Error::Hypothesis(
            "shifted model loses diagonal dominance".into(),
        ));
    }
    let cov = covariance(&shifted.quadratic_form())?;
    let m = model.size();
    let mut coeffs = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let mut total = S::zero();
        let mut tuple = vec![0usize; k as usize];
        loop {
            let mut powers = vec![0u32; m];
            for &x in &tuple {
                powers[x] += 2;
            }
            let req = MomentRequest::new(a, b, powers)?;
            total = total + local_time_moment_oracle(&cov, &req)?;
            if !advance_tuple(&mut tuple, m) {
                break;
            }
        }
        let mut c = total * factorial::<S>(k).try_inv().expect("k! != 0");
        if k % 2 == 1 {
            c = -c;
        }
        coeffs.push(c);
    }
    Ok(coeffs)
}

/// The same Taylor coefficients through the Grassmann route: coefficient k is
/// (-1)^k/k! times the mixed expectation of phibar_a phi_b (sum_x tau_x^2)^k
/// under the lambda-shifted action.
pub fn wsaw_g_taylor_grassmann<S: Scalar>(
    model: &CouplingModel<S>,
    a: usize,
    b: usize,
    lambda: &S,
    k_max: u32,
) -> Result<Vec<S>> {
    use crate::algebra::Polynomial;
    use crate::gaussian::tau_weighted_two_point;

    if k_max > 3 {
        return Err(Error::SizeLimit("Taylor cap is k <= 3".into()));
    }
    let shifted = model.shifted_diag(lambda);
    let cov = covariance(&shifted.quadratic_form())?;
    let m = model.size();
    let mut sum_tau_sq: Polynomial<S> = Polynomial::zero();
    for x in 0..m {
        sum_tau_sq = sum_tau_sq.add(&Polynomial::var(x as u32).pow(2));
    }
    let mut coeffs = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let f = sum_tau_sq.pow(k);
        let mut c = tau_weighted_two_point(&cov, &f, a, b)?
            * factorial::<S>(k).try_inv().expect("k! != 0");
        if k % 2 == 1 {
            c = -c;
        }
        coeffs.push(c);
    }
    Ok(coeffs)
}

fn advance_tuple(tuple: &mut [usize], m: usize) -> bool {
    for slot in tuple.iter_mut() {
        *slot += 1;
        if *slot < m {
            return true;
        }
        *slot = 0;
    }
    false
}
