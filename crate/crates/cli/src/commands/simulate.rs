//! Raw killed-chain sampling: local-time statistics and kill-site
//! frequencies against their exact targets.

use serde::Serialize;

use gsaw_core::exec;
use gsaw_core::markov::{simulate_path, CtmcParams};
use gsaw_core::model::{covariance, CouplingModel};
use gsaw_core::rng::SubRng;
use gsaw_core::scalar::Scalar;

#[derive(Debug, Serialize)]
pub struct SiteStats {
    pub site: usize,
    pub local_time_mean: f64,
    pub local_time_variance: f64,
    /// Exact target C_{a,x} when the covariance exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_time_mean_target: Option<f64>,
    pub kill_frequency: f64,
    /// Exact target d_b pi_b C_{a,b}.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kill_frequency_target: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub command: String,
    pub model: String,
    pub start: usize,
    pub samples: u64,
    pub seed: u64,
    pub mean_death_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_death_time_target: Option<f64>,
    pub mean_jumps: f64,
    pub sites: Vec<SiteStats>,
}

pub fn run<S: Scalar>(
    model: &CouplingModel<S>,
    model_name: &str,
    start: usize,
    samples: u64,
    seed: u64,
) -> anyhow::Result<SimulateReport> {
    let params = CtmcParams::killed(model)?;
    let m = model.size();

    // per-chunk accumulators merged in index order
    let chunk = 8192usize;
    let n_chunks = exec::chunk_count(samples as usize, chunk);
    let partials = exec::map_collect(n_chunks, |c| {
        let lo = c as u64 * chunk as u64;
        let hi = ((c as u64 + 1) * chunk as u64).min(samples);
        let mut lt_sum = vec![0.0; m];
        let mut lt_sq = vec![0.0; m];
        let mut kills = vec![0u64; m];
        let mut zeta_sum = 0.0;
        let mut jumps = 0u64;
        for i in lo..hi {
            let mut rng = SubRng::substream(seed, i);
            let path = simulate_path(&params, start, None, &mut rng);
            for x in 0..m {
                lt_sum[x] += path.local_times[x];
                lt_sq[x] += path.local_times[x] * path.local_times[x];
            }
            kills[path.last_site] += 1;
            zeta_sum += path.zeta.expect("killed path");
            jumps += (path.skeleton.len() - 1) as u64;
        }
        (lt_sum, lt_sq, kills, zeta_sum, jumps)
    });

    let mut lt_sum = vec![0.0; m];
    let mut lt_sq = vec![0.0; m];
    let mut kills = vec![0u64; m];
    let mut zeta_sum = 0.0;
    let mut jumps = 0u64;
    for (s, s2, k, z, j) in partials {
        for x in 0..m {
            lt_sum[x] += s[x];
            lt_sq[x] += s2[x];
            kills[x] += k[x];
        }
        zeta_sum += z;
        jumps += j;
    }

    let cov = covariance(&model.quadratic_form()).ok();
    let nf = samples as f64;
    let sites = (0..m)
        .map(|x| {
            let mean = lt_sum[x] / nf;
            SiteStats {
                site: x + 1,
                local_time_mean: mean,
                local_time_variance: (lt_sq[x] / nf - mean * mean).max(0.0),
                local_time_mean_target: cov.as_ref().map(|c| c.get(start, x).to_c64().re),
                kill_frequency: kills[x] as f64 / nf,
                kill_frequency_target: cov.as_ref().map(|c| {
                    params.d(x) * params.kill_prob(x) * c.get(start, x).to_c64().re
                }),
            }
        })
        .collect();

    Ok(SimulateReport {
        command: "simulate".into(),
        model: model_name.into(),
        start: start + 1,
        samples,
        seed,
        mean_death_time: zeta_sum / nf,
        mean_death_time_target: cov
            .as_ref()
            .map(|c| (0..m).map(|x| c.get(start, x).to_c64().re).sum()),
        mean_jumps: jumps as f64 / nf,
        sites,
    })
}
