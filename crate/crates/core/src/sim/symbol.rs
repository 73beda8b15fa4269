//! Symbol-level simulation of the two-phase signal chain.
//!
//! Phase 1: Bob sends Gaussian AN `z`; Alice hears `sqrt(P_b) h z + n_a`.
//! Phase 2: Alice sends `sqrt(P_a) (sqrt(a) s + sqrt(1-a) y_a1 / N)`, where
//! `N` is either `|y_a1|` per symbol or its RMS value `sqrt(P_b g + sigma2_a)`.
//! Bob knows `z` and the reciprocal channel but not Alice's noise, so he
//! subtracts `sqrt(P_a (1-a) P_b) h^2 z / N_bob` with `N_bob` his estimate of
//! `N`: the same RMS value, or `sqrt(P_b g |z|^2 + sigma2_a)` per symbol.
//! The closed-form SNRs assume the RMS normalization; per-symbol
//! normalization is here to measure the gap.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EmpiricalReport, SimConfig, SimMode};
use crate::analytic::{exp2_m1, snr_bob_unchecked, snr_eve_unchecked, TxDesign};
use crate::channel::{cn_variate, sample_draw_complex, ChannelCoeffs, SystemParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Divide by `|y_a1|` for every symbol.
    PerSymbol,
    /// Divide by `sqrt(P_b g + sigma2_a)`.
    ExpectedPower,
}

/// What one block of symbols looked like to Bob and Eve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockMeasurement {
    pub g_ab: f64,
    pub g_ae: f64,
    /// Mean interference-plus-noise power left at Bob after cancellation.
    pub residual_bob: f64,
    pub snr_bob: f64,
    pub snr_bob_predicted: f64,
    /// Mean interference-plus-noise power at Eve.
    pub residual_eve: f64,
    pub snr_eve: f64,
    pub snr_eve_predicted: f64,
    /// `|<r, z>| / (|r| |z|)` for Bob's residual `r`.
    pub z_correlation: f64,
    /// Symbols redrawn because `|y_a1|` was exactly zero.
    pub resampled: u64,
}

fn qpsk<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re = if rng.random::<bool>() { h } else { -h };
    let im = if rng.random::<bool>() { h } else { -h };
    Complex64::new(re, im)
}

/// Run `symbols` symbols through the chain for fixed channel coefficients.
pub fn measure_block<R: Rng + ?Sized>(
    params: &SystemParams,
    design: &TxDesign,
    coeffs: &ChannelCoeffs,
    symbols: u32,
    norm: Normalization,
    rng: &mut R,
) -> BlockMeasurement {
    let alpha = design.alpha;
    let h_ab = coeffs.h_ab;
    let h_ae = coeffs.h_ae;
    let g_ab = h_ab.norm_sqr();
    let g_ae = h_ae.norm_sqr();
    let sqrt_pa = params.p_a.sqrt();
    let sqrt_pb = params.p_b.sqrt();
    let (sa, sn) = (alpha.sqrt(), (1.0 - alpha).sqrt());
    let rms = (params.p_b * g_ab + params.sigma2_a).sqrt();
    // Bob's reconstruction of the AN he will receive is cancel_gain * z / N_bob.
    let cancel_gain = sqrt_pa * sn * sqrt_pb * h_ab * h_ab;

    let mut pow_b = 0.0;
    let mut pow_e = 0.0;
    let mut pow_z = 0.0;
    let mut cross = Complex64::new(0.0, 0.0);
    let mut resampled = 0;
    for _ in 0..symbols {
        let (z, y_a1) = loop {
            let z = cn_variate(1.0, rng);
            let y = sqrt_pb * h_ab * z + cn_variate(params.sigma2_a, rng);
            if norm == Normalization::PerSymbol && y.norm_sqr() == 0.0 {
                resampled += 1;
                continue;
            }
            break (z, y);
        };
        let (n, n_bob) = match norm {
            Normalization::PerSymbol => (
                y_a1.norm(),
                (params.p_b * g_ab * z.norm_sqr() + params.sigma2_a).sqrt(),
            ),
            Normalization::ExpectedPower => (rms, rms),
        };
        let s = qpsk(rng);
        let an = sn * y_a1 / n;
        let x_a = sa * s + an;
        let y_b = sqrt_pa * h_ab * x_a + cn_variate(params.sigma2_b, rng);
        let y_e = sqrt_pa * h_ae * x_a + cn_variate(params.sigma2_e, rng);
        let r_b = y_b - sqrt_pa * sa * h_ab * s - cancel_gain * z / n_bob;
        let r_e = y_e - sqrt_pa * sa * h_ae * s;
        pow_b += r_b.norm_sqr();
        pow_e += r_e.norm_sqr();
        pow_z += z.norm_sqr();
        cross += r_b * z.conj();
    }
    let k = symbols as f64;
    let residual_bob = pow_b / k;
    let residual_eve = pow_e / k;
    let signal = alpha * params.p_a;
    BlockMeasurement {
        g_ab,
        g_ae,
        residual_bob,
        snr_bob: signal * g_ab / residual_bob,
        snr_bob_predicted: snr_bob_unchecked(g_ab, params, alpha),
        residual_eve,
        snr_eve: signal * g_ae / residual_eve,
        snr_eve_predicted: snr_eve_unchecked(g_ae, params, alpha),
        z_correlation: cross.norm() / (pow_b * pow_z).sqrt(),
        resampled,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolLevelReport {
    /// Outage frequencies with the measured SNRs in place of the closed forms.
    pub outage: EmpiricalReport,
    pub normalization: Normalization,
    /// Mean of measured over predicted SNR, across blocks.
    pub snr_ratio_bob: f64,
    pub snr_ratio_eve: f64,
    pub mean_z_correlation: f64,
    pub max_z_correlation: f64,
    pub resampled: u64,
}

#[derive(Default, Clone, Copy)]
struct Accum {
    so: u64,
    co: u64,
    ratio_b: f64,
    n_b: u64,
    ratio_e: f64,
    n_e: u64,
    corr_sum: f64,
    corr_max: f64,
    resampled: u64,
}

/// Monte Carlo over fading blocks with `sim.symbols_per_block` symbols each.
pub fn simulate_symbol_level(
    params: &SystemParams,
    design: &TxDesign,
    sim: &SimConfig,
    norm: Normalization,
) -> Result<SymbolLevelReport> {
    params.validate()?;
    design.validate()?;
    sim.validate()?;
    if sim.mode != SimMode::SymbolLevel {
        return Err(Error::invalid("simulate_symbol_level needs a symbol-level SimConfig"));
    }
    let eve_threshold = exp2_m1(design.r_b - design.r_s);
    let bob_threshold = exp2_m1(design.r_b);

    let parts: Vec<Result<Accum>> = sim
        .rng
        .partition(sim.n_blocks)
        .into_par_iter()
        .enumerate()
        .map(|(stream, range)| {
            let mut rng = sim.rng.stream(stream as u32);
            let mut acc = Accum::default();
            for _ in range {
                let draw = sample_draw_complex(params, &mut rng)?;
                let coeffs = draw.coeffs.expect("complex draw carries coefficients");
                let m = measure_block(params, design, &coeffs, sim.symbols_per_block, norm, &mut rng);
                acc.so += u64::from(m.snr_eve > eve_threshold);
                acc.co += u64::from(m.snr_bob < bob_threshold);
                let rb = m.snr_bob / m.snr_bob_predicted;
                if rb.is_finite() {
                    acc.ratio_b += rb;
                    acc.n_b += 1;
                }
                let re = m.snr_eve / m.snr_eve_predicted;
                if re.is_finite() {
                    acc.ratio_e += re;
                    acc.n_e += 1;
                }
                acc.corr_sum += m.z_correlation;
                acc.corr_max = acc.corr_max.max(m.z_correlation);
                acc.resampled += m.resampled;
            }
            Ok(acc)
        })
        .collect();

    let mut t = Accum::default();
    for p in parts {
        let p = p?;
        t.so += p.so;
        t.co += p.co;
        t.ratio_b += p.ratio_b;
        t.n_b += p.n_b;
        t.ratio_e += p.ratio_e;
        t.n_e += p.n_e;
        t.corr_sum += p.corr_sum;
        t.corr_max = t.corr_max.max(p.corr_max);
        t.resampled += p.resampled;
    }
    let mean = |s: f64, n: u64| if n == 0 { f64::NAN } else { s / n as f64 };
    Ok(SymbolLevelReport {
        outage: EmpiricalReport::from_counts(t.so, t.co, sim.n_blocks, design.r_s),
        normalization: norm,
        snr_ratio_bob: mean(t.ratio_b, t.n_b),
        snr_ratio_eve: mean(t.ratio_e, t.n_e),
        mean_z_correlation: t.corr_sum / sim.n_blocks as f64,
        max_z_correlation: t.corr_max,
        resampled: t.resampled,
    })
}
