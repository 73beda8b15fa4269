//! Quasi-static Rayleigh fading.
//!
//! Every link power gain is exponentially distributed with the link's average
//! gain as its mean. Gains are drawn by inverse-CDF transform so the sampled
//! distribution is exact and easy to audit. Reproducible parallel sampling is
//! provided by [`RngSpec`], which hands out ChaCha8 streams keyed by a stream
//! index: the draw sequence depends only on `(seed, stream, draw index)`,
//! never on how many worker threads consume the streams.

use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The physical scenario: power budgets, receiver noise and average link gains.
///
/// All quantities are linear (watts or dimensionless). Bob's receiver noise
/// must be positive; Alice's and Eve's may be zero, which models the
/// asymptotic regime and the worst-case eavesdropper respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub p_a: f64,
    pub p_b: f64,
    pub sigma2_a: f64,
    pub sigma2_b: f64,
    pub sigma2_e: f64,
    pub gbar_ab: f64,
    pub gbar_ae: f64,
    /// Average Bob-to-Eve gain. Only the symbol-level simulator uses it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gbar_be: Option<f64>,
}

impl SystemParams {
    /// Unit average gains with the given powers and noise variances.
    pub fn new(p_a: f64, p_b: f64, sigma2_a: f64, sigma2_b: f64, sigma2_e: f64) -> Self {
        SystemParams {
            p_a,
            p_b,
            sigma2_a,
            sigma2_b,
            sigma2_e,
            gbar_ab: 1.0,
            gbar_ae: 1.0,
            gbar_be: None,
        }
    }

    pub fn with_gains(mut self, gbar_ab: f64, gbar_ae: f64) -> Self {
        self.gbar_ab = gbar_ab;
        self.gbar_ae = gbar_ae;
        self
    }

    /// Copy of `self` with Alice's receiver noise set to zero.
    pub fn asymptotic(mut self) -> Self {
        self.sigma2_a = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p_a", self.p_a),
            ("p_b", self.p_b),
            ("sigma2_b", self.sigma2_b),
            ("gbar_ab", self.gbar_ab),
            ("gbar_ae", self.gbar_ae),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("sigma2_a", self.sigma2_a), ("sigma2_e", self.sigma2_e)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be non-negative and finite, got {v}")));
            }
        }
        if let Some(g) = self.gbar_be {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::invalid(format!("gbar_be must be positive and finite, got {g}")));
            }
        }
        Ok(())
    }
}

/// Complex channel coefficients for symbol-level simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCoeffs {
    pub h_ab: Complex64,
    pub h_ae: Complex64,
    pub h_be: Option<Complex64>,
}

/// One block's fading realization.
///
/// Only the Alice-Bob gain is stored; reciprocity makes the Bob-Alice gain
/// the same number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub g_ab: f64,
    pub g_ae: f64,
    pub coeffs: Option<ChannelCoeffs>,
}

impl ChannelDraw {
    pub fn g_ba(&self) -> f64 {
        self.g_ab
    }
}

/// Seed and substream layout for reproducible Monte Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_count: u32,
}

impl Default for RngSpec {
    fn default() -> Self {
        RngSpec {
            seed: 0x5eed_a11c_eb0b,
            stream_count: 64,
        }
    }
}

impl RngSpec {
    pub fn new(seed: u64, stream_count: u32) -> Result<Self> {
        if stream_count == 0 {
            return Err(Error::invalid("stream_count must be positive"));
        }
        Ok(RngSpec { seed, stream_count })
    }

    /// Independent generator for substream `index`.
    pub fn stream(&self, index: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Contiguous block ranges, one per stream, covering `0..n` in order.
    pub fn partition(&self, n: u64) -> Vec<Range<u64>> {
        let s = self.stream_count.max(1) as u64;
        let base = n / s;
        let extra = n % s;
        let mut start = 0;
        (0..s)
            .map(|i| {
                let len = base + u64::from(i < extra);
                let r = start..start + len;
                start += len;
                r
            })
            .collect()
    }
}

/// Exponential power gain with mean `gbar`, by inverse CDF.
pub fn sample_gain<R: Rng + ?Sized>(gbar: f64, rng: &mut R) -> Result<f64> {
    if !(gbar > 0.0 && gbar.is_finite()) {
        return Err(Error::invalid(format!("average gain must be positive, got {gbar}")));
    }
    Ok(exp_variate(gbar, rng))
}

#[inline]
pub(crate) fn exp_variate<R: Rng + ?Sized>(gbar: f64, rng: &mut R) -> f64 {
    // random() is on [0, 1); flip it so ln never sees zero.
    let u: f64 = 1.0 - rng.random::<f64>();
    -gbar * u.ln()
}

/// Circularly symmetric complex Gaussian with variance `var`.
#[inline]
pub(crate) fn cn_variate<R: Rng + ?Sized>(var: f64, rng: &mut R) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Independent Alice-Bob and Alice-Eve gains for one block.
pub fn sample_draw<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Result<ChannelDraw> {
    params.validate()?;
    Ok(draw_unchecked(params, rng))
}

#[inline]
pub(crate) fn draw_unchecked<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelDraw {
    let g_ab = exp_variate(params.gbar_ab, rng);
    let g_ae = exp_variate(params.gbar_ae, rng);
    ChannelDraw {
        g_ab,
        g_ae,
        coeffs: None,
    }
}

/// Like [`sample_draw`] but with complex coefficients; the gains are their
/// squared magnitudes.
pub fn sample_draw_complex<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Result<ChannelDraw> {
    params.validate()?;
    let h_ab = cn_variate(params.gbar_ab, rng);
    let h_ae = cn_variate(params.gbar_ae, rng);
    let h_be = params.gbar_be.map(|g| cn_variate(g, rng));
    Ok(ChannelDraw {
        g_ab: h_ab.norm_sqr(),
        g_ae: h_ae.norm_sqr(),
        coeffs: Some(ChannelCoeffs { h_ab, h_ae, h_be }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SystemParams {
        SystemParams::new(10.0, 10.0, 0.1, 0.1, 0.1)
    }

    #[test]
    fn mean_of_unit_exponential() {
        let mut rng = RngSpec::new(1, 1).unwrap().stream(0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_gain(1.0, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn cdf_at_mean_for_gbar_two() {
        let mut rng = RngSpec::new(2, 1).unwrap().stream(0);
        let n = 1_000_000;
        let below = (0..n)
            .filter(|_| sample_gain(2.0, &mut rng).unwrap() < 2.0)
            .count();
        let p = below as f64 / n as f64;
        assert!((p - (1.0 - (-1.0f64).exp())).abs() < 0.002, "p {p}");
    }

    #[test]
    fn same_seed_same_sequence() {
        let spec = RngSpec::new(42, 4).unwrap();
        let a: Vec<f64> = {
            let mut r = spec.stream(3);
            (0..100).map(|_| sample_gain(1.5, &mut r).unwrap()).collect()
        };
        let b: Vec<f64> = {
            let mut r = spec.stream(3);
            (0..100).map(|_| sample_gain(1.5, &mut r).unwrap()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn non_positive_gain_rejected() {
        let mut rng = RngSpec::default().stream(0);
        assert!(matches!(sample_gain(0.0, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(matches!(sample_gain(-1.0, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(sample_gain(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn draws_are_uncorrelated() {
        let mut rng = RngSpec::new(7, 1).unwrap().stream(0);
        let n = 1_000_000;
        let draws: Vec<_> = (0..n).map(|_| sample_draw(&params(), &mut rng).unwrap()).collect();
        let (ma, me) = draws.iter().fold((0.0, 0.0), |(a, e), d| (a + d.g_ab, e + d.g_ae));
        let (ma, me) = (ma / n as f64, me / n as f64);
        assert!((ma - 1.0).abs() < 0.005);
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut see = 0.0;
        for d in &draws {
            sab += (d.g_ab - ma) * (d.g_ae - me);
            saa += (d.g_ab - ma).powi(2);
            see += (d.g_ae - me).powi(2);
        }
        let r = sab / (saa * see).sqrt();
        assert!(r.abs() < 0.005, "corr {r}");
    }

    #[test]
    fn complex_mode_second_moment() {
        let mut p = params().with_gains(2.0, 0.5);
        p.gbar_be = Some(1.0);
        let mut rng = RngSpec::new(9, 1).unwrap().stream(0);
        let n = 1_000_000;
        let mut s = 0.0;
        for _ in 0..n {
            let d = sample_draw_complex(&p, &mut rng).unwrap();
            let c = d.coeffs.unwrap();
            assert_eq!(d.g_ab, c.h_ab.norm_sqr());
            assert!(c.h_be.is_some());
            s += d.g_ab;
        }
        let m = s / n as f64;
        assert!((m / 2.0 - 1.0).abs() < 0.005, "mean |h_ab|^2 {m}");
    }

    #[test]
    fn partition_covers_range_in_order() {
        let spec = RngSpec::new(0, 7).unwrap();
        let parts = spec.partition(100);
        assert_eq!(parts.len(), 7);
        assert_eq!(parts[0].start, 0);
        assert_eq!(parts.last().unwrap().end, 100);
        for w in parts.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        assert!(RngSpec::new(0, 0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(params().validate().is_ok());
        assert!(params().asymptotic().validate().is_ok());
        let mut p = params();
        p.sigma2_b = 0.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.sigma2_e = -0.1;
        assert!(p.validate().is_err());
        let mut p = params();
        p.gbar_ae = 0.0;
        assert!(p.validate().is_err());
    }
}
