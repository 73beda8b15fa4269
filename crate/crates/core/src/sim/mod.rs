//! Monte Carlo estimation of the outage probabilities and throughput.
//!
//! Blocks are split into contiguous ranges, one per RNG substream, and the
//! ranges are simulated in parallel. Counts are integers reduced in stream
//! order, so a run is bit-for-bit reproducible from its [`SimConfig`] no
//! matter how many worker threads rayon uses.

mod onoff;
mod symbol;

pub use onoff::{
    onoff_analytic, optimize_benchmark, simulate_benchmark_onoff, BenchmarkSearch, OnOffDesign,
    OnOffReport, OnOffSolution,
};
pub use symbol::{measure_block, simulate_symbol_level, BlockMeasurement, Normalization, SymbolLevelReport};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{exp2_m1, snr_bob_unchecked, snr_eve_unchecked, two_phase_throughput, TxDesign};
use crate::channel::{draw_unchecked, RngSpec, SystemParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    /// One pair of power gains per block; SNRs from the closed-form maps.
    FadingLevel,
    /// Full complex signal chain with explicit AN cancellation at Bob.
    SymbolLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_blocks: u64,
    pub rng: RngSpec,
    pub mode: SimMode,
    pub symbols_per_block: u32,
}

impl SimConfig {
    pub fn fading(n_blocks: u64, rng: RngSpec) -> Result<Self> {
        let c = SimConfig {
            n_blocks,
            rng,
            mode: SimMode::FadingLevel,
            symbols_per_block: 1,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn symbol_level(n_blocks: u64, symbols_per_block: u32, rng: RngSpec) -> Result<Self> {
        let c = SimConfig {
            n_blocks,
            rng,
            mode: SimMode::SymbolLevel,
            symbols_per_block,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_blocks == 0 {
            return Err(Error::invalid("n_blocks must be at least 1"));
        }
        if self.symbols_per_block == 0 {
            return Err(Error::invalid("symbols_per_block must be at least 1"));
        }
        if self.rng.stream_count == 0 {
            return Err(Error::invalid("stream_count must be positive"));
        }
        Ok(())
    }
}

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_se(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub p_so_hat: f64,
    pub p_co_hat: f64,
    pub se_so: f64,
    pub se_co: f64,
    pub eta_hat: f64,
    pub n_blocks: u64,
    pub so_count: u64,
    pub co_count: u64,
}

impl EmpiricalReport {
    pub fn from_counts(so_count: u64, co_count: u64, n_blocks: u64, r_s: f64) -> Self {
        let n = n_blocks as f64;
        let p_so_hat = so_count as f64 / n;
        let p_co_hat = co_count as f64 / n;
        EmpiricalReport {
            p_so_hat,
            p_co_hat,
            se_so: binomial_se(p_so_hat, n_blocks),
            se_co: binomial_se(p_co_hat, n_blocks),
            eta_hat: two_phase_throughput(p_co_hat, r_s),
            n_blocks,
            so_count,
            co_count,
        }
    }

    /// True when a standard error carries no information: fewer than two
    /// blocks, or an estimate of exactly 0 or 1.
    pub fn se_degenerate(&self) -> bool {
        self.n_blocks < 2 || self.se_so == 0.0 || self.se_co == 0.0
    }
}

/// Secrecy and connection outage frequencies over `sim.n_blocks` fading
/// blocks.
///
/// Outage is decided in the SNR domain: secrecy outage iff
/// `gamma_e > 2^(r_b - r_s) - 1`, connection outage iff `gamma_b < 2^r_b - 1`.
/// This is the same event as comparing capacities but avoids a logarithm per
/// block.
pub fn simulate_outage(params: &SystemParams, design: &TxDesign, sim: &SimConfig) -> Result<EmpiricalReport> {
    params.validate()?;
    design.validate()?;
    sim.validate()?;
    let eve_threshold = exp2_m1(design.r_b - design.r_s);
    let bob_threshold = exp2_m1(design.r_b);

    let counts: Vec<(u64, u64)> = sim
        .rng
        .partition(sim.n_blocks)
        .into_par_iter()
        .enumerate()
        .map(|(stream, range)| {
            let mut rng = sim.rng.stream(stream as u32);
            let (mut so, mut co) = (0u64, 0u64);
            for _ in range {
                let d = draw_unchecked(params, &mut rng);
                if snr_eve_unchecked(d.g_ae, params, design.alpha) > eve_threshold {
                    so += 1;
                }
                if snr_bob_unchecked(d.g_ab, params, design.alpha) < bob_threshold {
                    co += 1;
                }
            }
            (so, co)
        })
        .collect();
    let (so, co) = counts
        .iter()
        .fold((0, 0), |(a, b), &(s, c)| (a + s, b + c));
    Ok(EmpiricalReport::from_counts(so, co, sim.n_blocks, design.r_s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;

    fn fig2() -> SystemParams {
        SystemParams::new(10.0, 10.0, 0.1, 0.1, 0.1)
    }

    #[test]
    fn perfect_secrecy_region_never_leaks() {
        let sim = SimConfig::fading(200_000, RngSpec::new(3, 8).unwrap()).unwrap();
        for alpha in [0.2, 0.5] {
            let d = TxDesign::new(alpha, 2.0, 1.0).unwrap();
            let r = simulate_outage(&fig2(), &d, &sim).unwrap();
            assert_eq!(r.so_count, 0);
            assert_eq!(r.p_so_hat, 0.0);
        }
    }

    #[test]
    fn matches_closed_form() {
        let sim = SimConfig::fading(400_000, RngSpec::new(11, 16).unwrap()).unwrap();
        let d = TxDesign::new(0.8, 2.0, 1.0).unwrap();
        let r = simulate_outage(&fig2(), &d, &sim).unwrap();
        let a = analytic::evaluate(&fig2(), &d).unwrap();
        assert!((r.p_so_hat - a.p_so).abs() < 3.0 * r.se_so);
        assert!((r.p_co_hat - a.p_co).abs() < 3.0 * r.se_co);
        assert_eq!(r.eta_hat, 0.5 * (1.0 - r.p_co_hat));
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let sim = SimConfig::fading(50_000, RngSpec::new(5, 12).unwrap()).unwrap();
        let d = TxDesign::new(0.7, 2.0, 1.0).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_outage(&fig2(), &d, &sim).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn single_block_is_degenerate() {
        let sim = SimConfig::fading(1, RngSpec::default()).unwrap();
        let d = TxDesign::new(0.7, 2.0, 1.0).unwrap();
        let r = simulate_outage(&fig2(), &d, &sim).unwrap();
        assert_eq!(r.n_blocks, 1);
        assert!(r.p_so_hat == 0.0 || r.p_so_hat == 1.0);
        assert!(r.se_degenerate());
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::fading(0, RngSpec::default()).is_err());
        assert!(SimConfig::symbol_level(10, 0, RngSpec::default()).is_err());
    }
}
