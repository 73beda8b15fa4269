//! Secure on-off transmission, the single-phase benchmark without AN.
//!
//! Alice transmits at full power only in blocks where Bob's direct SNR
//! `P_a g_ab / sigma2_b` clears a threshold. Eve's SNR is `P_a g_ae / sigma2_e`.
//! Outage probabilities are conditioned on transmission, and throughput is
//! `P(transmit) (1 - P_co | transmit) r_s` with no one-half: there is no
//! AN phase.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::binomial_se;
use crate::analytic::exp2_m1;
use crate::channel::{draw_unchecked, SystemParams};
use crate::design::{logspace, within_cap, OutageConstraints, RateGrid};
use crate::error::{Error, Result};
use crate::sim::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffDesign {
    pub r_b: f64,
    pub r_s: f64,
    /// Linear SNR Bob must reach for Alice to transmit.
    pub threshold: f64,
}

impl OnOffDesign {
    pub fn new(r_b: f64, r_s: f64, threshold: f64) -> Result<Self> {
        let d = OnOffDesign { r_b, r_s, threshold };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_s > 0.0 && self.r_b >= self.r_s && self.r_b.is_finite()) {
            return Err(Error::invalid(format!(
                "need r_b >= r_s > 0, got r_b={}, r_s={}",
                self.r_b, self.r_s
            )));
        }
        if !(self.threshold >= 0.0) {
            return Err(Error::invalid(format!("threshold must be >= 0, got {}", self.threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffReport {
    pub p_tx: f64,
    /// Secrecy outage among transmitting blocks.
    pub p_so: f64,
    /// Connection outage among transmitting blocks.
    pub p_co: f64,
    pub eta: f64,
    /// Standard errors; zero for analytic reports.
    pub se_so: f64,
    pub se_co: f64,
    pub n_blocks: u64,
    pub n_tx: u64,
}

/// Closed-form on-off metrics.
pub fn onoff_analytic(params: &SystemParams, design: &OnOffDesign) -> Result<OnOffReport> {
    params.validate()?;
    design.validate()?;
    let k_b = params.sigma2_b / (params.p_a * params.gbar_ab);
    let p_tx = (-design.threshold * k_b).exp();
    let success = (-design.threshold.max(exp2_m1(design.r_b)) * k_b).exp();
    let p_so = (-exp2_m1(design.r_b - design.r_s) * params.sigma2_e / (params.p_a * params.gbar_ae)).exp();
    let p_co = if p_tx > 0.0 { 1.0 - success / p_tx } else { 1.0 };
    Ok(OnOffReport {
        p_tx,
        p_so,
        p_co,
        eta: success * design.r_s,
        se_so: 0.0,
        se_co: 0.0,
        n_blocks: 0,
        n_tx: 0,
    })
}

/// Monte Carlo estimate of the on-off metrics.
pub fn simulate_benchmark_onoff(
    params: &SystemParams,
    design: &OnOffDesign,
    sim: &SimConfig,
) -> Result<OnOffReport> {
    params.validate()?;
    design.validate()?;
    sim.validate()?;
    let bob_threshold = exp2_m1(design.r_b);
    let eve_threshold = exp2_m1(design.r_b - design.r_s);

    let counts: Vec<[u64; 3]> = sim
        .rng
        .partition(sim.n_blocks)
        .into_par_iter()
        .enumerate()
        .map(|(stream, range)| {
            let mut rng = sim.rng.stream(stream as u32);
            let mut c = [0u64; 3];
            for _ in range {
                let d = draw_unchecked(params, &mut rng);
                let snr_b = params.p_a * d.g_ab / params.sigma2_b;
                if snr_b < design.threshold {
                    continue;
                }
                c[0] += 1;
                let snr_e = if params.sigma2_e == 0.0 {
                    f64::INFINITY
                } else {
                    params.p_a * d.g_ae / params.sigma2_e
                };
                c[1] += u64::from(snr_e > eve_threshold);
                c[2] += u64::from(snr_b < bob_threshold);
            }
            c
        })
        .collect();
    let [n_tx, so, co] = counts
        .iter()
        .fold([0u64; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);

    let n = sim.n_blocks;
    let ratio = |k: u64| if n_tx == 0 { f64::NAN } else { k as f64 / n_tx as f64 };
    let (p_so, p_co) = (ratio(so), ratio(co));
    Ok(OnOffReport {
        p_tx: n_tx as f64 / n as f64,
        p_so,
        p_co,
        eta: (n_tx - co) as f64 / n as f64 * design.r_s,
        se_so: binomial_se(p_so, n_tx),
        se_co: binomial_se(p_co, n_tx),
        n_blocks: n,
        n_tx,
    })
}

/// Candidate rates and thresholds for the benchmark's grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSearch {
    pub rates: RateGrid,
    /// Fixed threshold candidates (linear SNR). The SNR `2^r_b - 1` needed to
    /// decode is always added for each `r_b`.
    pub thresholds: Vec<f64>,
}

impl Default for BenchmarkSearch {
    fn default() -> Self {
        let mut thresholds = vec![0.0];
        thresholds.extend(logspace(1e-2, 1e3, 16));
        BenchmarkSearch {
            // Small secrecy caps need rate gaps near 10 bits.
            rates: RateGrid::uniform(16.0, 0.02),
            thresholds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffSolution {
    pub design: Option<OnOffDesign>,
    pub report: Option<OnOffReport>,
    pub eta: f64,
    pub feasible: bool,
}

/// Throughput-maximizing on-off design subject to the outage caps.
pub fn optimize_benchmark(
    params: &SystemParams,
    constraints: &OutageConstraints,
    search: &BenchmarkSearch,
) -> Result<OnOffSolution> {
    params.validate()?;
    constraints.validate()?;
    let OutageConstraints { epsilon, delta } = *constraints;
    let rates = &search.rates;
    let none = OnOffSolution {
        design: None,
        report: None,
        eta: 0.0,
        feasible: false,
    };
    // Without AN, Eve's capacity exceeds any finite rate gap with positive
    // probability, so perfect secrecy is out of reach. (For huge gaps the
    // closed form underflows to 0.0, which must not be read as success.)
    if epsilon == 0.0 {
        return Ok(none);
    }

    let best = rates
        .r_b
        .par_iter()
        .enumerate()
        .filter_map(|(i, &r_b)| {
            let mut local: Option<(f64, usize, usize, f64)> = None;
            let decode = exp2_m1(r_b);
            for (j, &r_s) in rates.r_s.iter().enumerate() {
                if !(r_s > 0.0 && r_s <= r_b) {
                    continue;
                }
                // Secrecy outage does not depend on the threshold.
                let probe = OnOffDesign { r_b, r_s, threshold: 0.0 };
                match onoff_analytic(params, &probe) {
                    Ok(rep) if within_cap(rep.p_so, epsilon) => {}
                    _ => continue,
                }
                let candidates = search.thresholds.iter().copied().chain(std::iter::once(decode));
                for threshold in candidates {
                    let d = OnOffDesign { r_b, r_s, threshold };
                    let Ok(rep) = onoff_analytic(params, &d) else { continue };
                    if !within_cap(rep.p_co, delta) {
                        continue;
                    }
                    if local.is_none_or(|b| rep.eta > b.0) {
                        local = Some((rep.eta, i, j, threshold));
                    }
                }
            }
            local
        })
        .reduce_with(|a, b| {
            if a.0 > b.0 || (a.0 == b.0 && (a.1, a.2) <= (b.1, b.2)) {
                a
            } else {
                b
            }
        });

    Ok(match best {
        None => none,
        Some((eta, i, j, threshold)) => {
            let d = OnOffDesign {
                r_b: rates.r_b[i],
                r_s: rates.r_s[j],
                threshold,
            };
            OnOffSolution {
                design: Some(d),
                report: Some(onoff_analytic(params, &d)?),
                eta,
                feasible: true,
            }
        }
    })
}
