//! Closed-form performance of the two-phase artificial-noise scheme.
//!
//! Bob's post-cancellation SNR is
//!
//! ```text
//! gamma_b = a Pa g / ( (1-a) Pa g sa2 / (Pb g + sa2) + sb2 )
//! ```
//!
//! where the first denominator term is Alice's own receiver noise, forwarded
//! together with the noise Bob injected in the first phase. Eve sees the
//! forwarded noise as interference:
//!
//! ```text
//! gamma_e = a Pa g / ( (1-a) Pa g + se2 )
//! ```
//!
//! which is capped by `a/(1-a)` no matter how strong her channel is. That cap
//! is what makes zero secrecy outage reachable: once `a <= 1 - 2^(Rs-Rb)`,
//! Eve can never reach the rate `Rb - Rs`.
//!
//! Both maps are monotone in the channel gain, so every outage probability is
//! an exponential tail evaluated at an inverted SNR threshold.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// Operating point: power split and the two wiretap-code rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TxDesign {
    /// Fraction of Alice's power spent on the information signal.
    pub alpha: f64,
    /// Codeword rate, bits per channel use.
    pub r_b: f64,
    /// Confidential information rate, bits per channel use.
    pub r_s: f64,
}

impl TxDesign {
    pub fn new(alpha: f64, r_b: f64, r_s: f64) -> Result<Self> {
        let d = TxDesign { alpha, r_b, r_s };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.r_s > 0.0 && self.r_s.is_finite()) {
            return Err(Error::invalid(format!("r_s must be positive, got {}", self.r_s)));
        }
        if !(self.r_b >= self.r_s && self.r_b.is_finite()) {
            return Err(Error::invalid(format!(
                "r_b must be at least r_s ({}), got {}",
                self.r_s, self.r_b
            )));
        }
        Ok(())
    }
}

/// How a [`PerformanceReport`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AnalyticGeneral,
    AnalyticAsymptotic,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::AnalyticGeneral => "analytic-general",
            Method::AnalyticAsymptotic => "analytic-asymptotic",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub p_so: f64,
    pub p_co: f64,
    pub eta: f64,
    pub method: Method,
}

impl PerformanceReport {
    /// Builds a report, deriving throughput from the connection outage.
    pub fn new(p_so: f64, p_co: f64, r_s: f64, method: Method) -> Self {
        PerformanceReport {
            p_so,
            p_co,
            eta: two_phase_throughput(p_co, r_s),
            method,
        }
    }
}

/// Intermediate terms of the inverse of Bob's SNR map at a given SNR.
///
/// `omega1` and `omega2` are the coefficients of the quadratic
/// `a Pa Pb g^2 - omega1 g - gamma sa2 sb2 = 0` solved by [`inv_snr_bob`];
/// `omega3` is the numerator that appears in its derivative, and satisfies
/// `omega3 = omega1 * d(omega1)/d(gamma) + 2 a omega2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaTerms {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
}

impl OmegaTerms {
    pub fn at(gamma_b: f64, params: &SystemParams, design: &TxDesign) -> Self {
        let a = design.alpha;
        let SystemParams {
            p_a,
            p_b,
            sigma2_a: sa2,
            sigma2_b: sb2,
            ..
        } = *params;
        let omega1 = ((1.0 - a) * gamma_b - a) * p_a * sa2 + p_b * gamma_b * sb2;
        let omega2 = p_a * p_b * sa2 * sb2;
        let omega3 = (a + 2.0 * (1.0 - a) * gamma_b) * omega2
            + (1.0 - a) * ((1.0 - a) * gamma_b - a) * p_a * p_a * sa2 * sa2
            + p_b * p_b * gamma_b * sb2 * sb2;
        OmegaTerms { omega1, omega2, omega3 }
    }

    /// Derivative of `omega1` with respect to the SNR.
    pub fn omega1_slope(params: &SystemParams, design: &TxDesign) -> f64 {
        (1.0 - design.alpha) * params.p_a * params.sigma2_a + params.p_b * params.sigma2_b
    }
}

/// `2^x - 1` without cancellation for small `x`.
#[inline]
pub fn exp2_m1(x: f64) -> f64 {
    (x * LN_2).exp_m1()
}

/// `1 - 2^(-d)`: the smallest `alpha` for which Eve can exceed a rate gap `d`.
#[inline]
pub fn one_minus_exp2_neg(d: f64) -> f64 {
    if d >= 1.0 {
        // exact for integer gaps
        1.0 - (-d).exp2()
    } else {
        -(-d * LN_2).exp_m1()
    }
}

/// `1 - 2^(r_s - r_b)`. Any `alpha` at or below this gives zero secrecy outage.
pub fn perfect_secrecy_alpha(r_b: f64, r_s: f64) -> f64 {
    one_minus_exp2_neg(r_b - r_s)
}

/// Supremum of Eve's SNR over all channel gains, `alpha / (1 - alpha)`.
pub fn eve_snr_ceiling(alpha: f64) -> f64 {
    if alpha >= 1.0 {
        f64::INFINITY
    } else {
        alpha / (1.0 - alpha)
    }
}

#[inline]
pub(crate) fn two_phase_throughput(p_co: f64, r_s: f64) -> f64 {
    0.5 * (1.0 - p_co) * r_s
}

fn check_gain(g: f64, name: &str) -> Result<()> {
    if !(g >= 0.0) {
        return Err(Error::invalid(format!("{name} must be non-negative, got {g}")));
    }
    Ok(())
}

fn check_inputs(params: &SystemParams, design: &TxDesign) -> Result<()> {
    params.validate()?;
    design.validate()
}

#[inline]
pub(crate) fn snr_bob_unchecked(g_ab: f64, params: &SystemParams, alpha: f64) -> f64 {
    let sa2 = params.sigma2_a;
    let residual_an = if sa2 == 0.0 {
        0.0
    } else {
        (1.0 - alpha) * params.p_a * g_ab * sa2 / (params.p_b * g_ab + sa2)
    };
    alpha * params.p_a * g_ab / (residual_an + params.sigma2_b)
}

#[inline]
pub(crate) fn snr_eve_unchecked(g_ae: f64, params: &SystemParams, alpha: f64) -> f64 {
    if g_ae == 0.0 {
        return 0.0;
    }
    let denom = (1.0 - alpha) * params.p_a * g_ae + params.sigma2_e;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        alpha * params.p_a * g_ae / denom
    }
}

/// Bob's SNR after removing the artificial noise, for Alice-Bob gain `g_ab`.
pub fn snr_bob(g_ab: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    check_gain(g_ab, "g_ab")?;
    Ok(snr_bob_unchecked(g_ab, params, design.alpha))
}

/// Eve's SNR for Alice-Eve gain `g_ae`.
///
/// Returns `f64::INFINITY` when `alpha = 1`, `sigma2_e = 0` and `g_ae > 0`,
/// since nothing then limits Eve's SNR.
pub fn snr_eve(g_ae: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    check_gain(g_ae, "g_ae")?;
    Ok(snr_eve_unchecked(g_ae, params, design.alpha))
}

#[inline]
pub(crate) fn inv_snr_bob_unchecked(gamma_b: f64, params: &SystemParams, alpha: f64) -> f64 {
    let (p_a, p_b, sa2, sb2) = (params.p_a, params.p_b, params.sigma2_a, params.sigma2_b);
    if sa2 == 0.0 {
        return gamma_b * sb2 / (alpha * p_a);
    }
    let omega1 = ((1.0 - alpha) * gamma_b - alpha) * p_a * sa2 + p_b * gamma_b * sb2;
    let c = gamma_b * sa2 * sb2;
    let lead = alpha * p_a * p_b;
    let root_disc = (omega1 * omega1 + 4.0 * lead * c).sqrt();
    if omega1 >= 0.0 {
        (omega1 + root_disc) / (2.0 * lead)
    } else {
        // Same root, written without the cancellation in omega1 + sqrt(..).
        2.0 * c / (root_disc - omega1)
    }
}

/// Inverse of Bob's SNR map: the Alice-Bob gain that yields `gamma_b`.
pub fn inv_snr_bob(gamma_b: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    if !(gamma_b >= 0.0) {
        return Err(Error::invalid(format!("gamma_b must be non-negative, got {gamma_b}")));
    }
    Ok(inv_snr_bob_unchecked(gamma_b, params, design.alpha))
}

/// Inverse of Eve's SNR map on its support `[0, alpha/(1-alpha))`.
/// Returns infinity at or beyond the ceiling.
pub fn inv_snr_eve(gamma_e: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    if !(gamma_e >= 0.0) {
        return Err(Error::invalid(format!("gamma_e must be non-negative, got {gamma_e}")));
    }
    let a = design.alpha;
    let margin = a - (1.0 - a) * gamma_e;
    if margin <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(gamma_e * params.sigma2_e / (params.p_a * margin))
}

#[inline]
pub(crate) fn pdf_snr_bob_unchecked(gamma_b: f64, params: &SystemParams, design: &TxDesign) -> f64 {
    if gamma_b < 0.0 {
        return 0.0;
    }
    let a = design.alpha;
    let gbar = params.gbar_ab;
    if params.sigma2_a == 0.0 {
        let scale = params.sigma2_b / (a * params.p_a * gbar);
        return scale * (-scale * gamma_b).exp();
    }
    let w = OmegaTerms::at(gamma_b, params, design);
    let lead = 2.0 * a * params.p_a * params.p_b;
    let root_disc = (w.omega1 * w.omega1 + 4.0 * a * w.omega2 * gamma_b).sqrt();
    let slope = (w.omega3 / root_disc + OmegaTerms::omega1_slope(params, design)) / lead;
    let g = inv_snr_bob_unchecked(gamma_b, params, a);
    slope * (-g / gbar).exp() / gbar
}

/// Density of Bob's SNR.
pub fn pdf_snr_bob(gamma_b: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    Ok(pdf_snr_bob_unchecked(gamma_b, params, design))
}

/// Closed-form CDF of Bob's SNR, `1 - exp(-inv_snr_bob(gamma)/gbar_ab)`.
pub fn cdf_snr_bob(gamma_b: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    if gamma_b <= 0.0 {
        return Ok(0.0);
    }
    let g = inv_snr_bob_unchecked(gamma_b, params, design.alpha);
    Ok(-(-g / params.gbar_ab).exp_m1())
}

#[inline]
pub(crate) fn pdf_snr_eve_unchecked(gamma_e: f64, params: &SystemParams, alpha: f64) -> f64 {
    if gamma_e < 0.0 || params.sigma2_e == 0.0 {
        // With a noiseless Eve the SNR is a point mass at the ceiling.
        return 0.0;
    }
    let margin = alpha - (1.0 - alpha) * gamma_e;
    if margin <= 0.0 {
        return 0.0;
    }
    let scale = params.p_a * params.gbar_ae;
    alpha * params.sigma2_e / (scale * margin * margin)
        * (-gamma_e * params.sigma2_e / (scale * margin)).exp()
}

/// Density of Eve's SNR; zero outside `[0, alpha/(1-alpha))`.
pub fn pdf_snr_eve(gamma_e: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    Ok(pdf_snr_eve_unchecked(gamma_e, params, design.alpha))
}

/// Closed-form CDF of Eve's SNR.
pub fn cdf_snr_eve(gamma_e: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    let g = inv_snr_eve(gamma_e, params, design)?;
    if g.is_infinite() {
        return Ok(1.0);
    }
    Ok(-(-g / params.gbar_ae).exp_m1())
}

#[inline]
pub(crate) fn secrecy_outage_unchecked(params: &SystemParams, design: &TxDesign) -> f64 {
    let floor = perfect_secrecy_alpha(design.r_b, design.r_s);
    let gap = design.alpha - floor;
    if gap <= 0.0 {
        return 0.0;
    }
    if params.sigma2_e == 0.0 {
        return 1.0;
    }
    // (2^Rb - 2^Rs) / (2^Rs + (a-1) 2^Rb) with 2^Rb divided out.
    (-floor * params.sigma2_e / (gap * params.gbar_ae * params.p_a)).exp()
}

/// Probability that Eve's capacity exceeds `r_b - r_s`.
///
/// Exactly zero whenever `alpha <= 1 - 2^(r_s - r_b)` (equality included),
/// and one for a noiseless Eve above that threshold.
pub fn secrecy_outage(params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    Ok(secrecy_outage_unchecked(params, design))
}

#[inline]
pub(crate) fn connection_outage_unchecked(params: &SystemParams, design: &TxDesign) -> f64 {
    let threshold = exp2_m1(design.r_b);
    let g = inv_snr_bob_unchecked(threshold, params, design.alpha);
    -(-g / params.gbar_ab).exp_m1()
}

/// Probability that Bob's capacity falls below `r_b`.
///
/// Evaluated by inverting the monotone SNR map at `2^r_b - 1`. See
/// [`connection_outage_quadrature`] for the density-integral route and
/// [`connection_outage_verified`] for both at once.
pub fn connection_outage(params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    Ok(connection_outage_unchecked(params, design))
}

/// Connection outage by adaptive quadrature of Bob's SNR density over
/// `[0, 2^r_b - 1]`.
pub fn connection_outage_quadrature(
    params: &SystemParams,
    design: &TxDesign,
    opts: &QuadOptions,
) -> Result<f64> {
    check_inputs(params, design)?;
    let threshold = exp2_m1(design.r_b);
    // When the density is concentrated far below the threshold every
    // Kronrod node can land where it has underflowed, so split the range
    // at the SNRs of a range of gains and at the SNR ceiling (finite when
    // Alice's noise is forwarded).
    let a = design.alpha;
    let ceiling = if params.sigma2_a > 0.0 && a < 1.0 {
        a * params.p_b / ((1.0 - a) * params.sigma2_a)
    } else {
        f64::INFINITY
    };
    let mut edges = vec![0.0];
    let gains = [1e-4, 1e-2, 0.1, 1.0, 4.0, 10.0, 20.0, 40.0, 80.0];
    let points = gains.iter().map(|k| snr_bob_unchecked(k * params.gbar_ab, params, a));
    for b in points.chain(std::iter::once(ceiling)) {
        if b > *edges.last().unwrap() && b < threshold {
            edges.push(b);
        }
    }
    edges.push(threshold);
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += quad::integrate(|g| pdf_snr_bob_unchecked(g, params, design), w[0], w[1], opts)?.value;
    }
    Ok(total)
}

/// Runs both connection-outage routes and fails if they differ by more than
/// `tol`. Returns the closed-form value.
pub fn connection_outage_verified(params: &SystemParams, design: &TxDesign, tol: f64) -> Result<f64> {
    let closed = connection_outage(params, design)?;
    let integral = connection_outage_quadrature(params, design, &QuadOptions::default())?;
    let diff = (closed - integral).abs();
    if diff > tol {
        return Err(Error::NumericalFailure {
            routine: "connection_outage",
            detail: format!("closed form {closed} and quadrature {integral} disagree"),
            achieved: diff,
        });
    }
    Ok(closed)
}

/// Average confidential bits per channel use, `(1 - P_co) r_s / 2`; the half
/// accounts for the two phases.
pub fn throughput(params: &SystemParams, design: &TxDesign) -> Result<f64> {
    let p_co = connection_outage(params, design)?;
    Ok(two_phase_throughput(p_co, design.r_s))
}

/// Secrecy outage, connection outage and throughput via the general formulas.
pub fn evaluate(params: &SystemParams, design: &TxDesign) -> Result<PerformanceReport> {
    check_inputs(params, design)?;
    Ok(PerformanceReport::new(
        secrecy_outage_unchecked(params, design),
        connection_outage_unchecked(params, design),
        design.r_s,
        Method::AnalyticGeneral,
    ))
}

/// Bob's SNR when Alice's receiver noise is negligible: `a Pa g / sb2`.
pub fn snr_bob_asym(g_ab: f64, params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    check_gain(g_ab, "g_ab")?;
    Ok(design.alpha * params.p_a * g_ab / params.sigma2_b)
}

#[inline]
pub(crate) fn pco_asym_unchecked(params: &SystemParams, alpha: f64, r_b: f64) -> f64 {
    -(-asym_exponent(params, alpha, r_b)).exp_m1()
}

#[inline]
fn asym_exponent(params: &SystemParams, alpha: f64, r_b: f64) -> f64 {
    params.sigma2_b * exp2_m1(r_b) / (alpha * params.p_a * params.gbar_ab)
}

/// Connection outage with Alice's receiver noise neglected (any `sigma2_a`
/// in `params` is ignored).
pub fn pco_asym(params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    Ok(pco_asym_unchecked(params, design.alpha, design.r_b))
}

/// Throughput with Alice's receiver noise neglected.
pub fn eta_asym(params: &SystemParams, design: &TxDesign) -> Result<f64> {
    check_inputs(params, design)?;
    Ok(0.5 * (-asym_exponent(params, design.alpha, design.r_b)).exp() * design.r_s)
}

/// All three metrics with Alice's receiver noise neglected.
pub fn evaluate_asymptotic(params: &SystemParams, design: &TxDesign) -> Result<PerformanceReport> {
    check_inputs(params, design)?;
    Ok(PerformanceReport::new(
        secrecy_outage_unchecked(params, design),
        pco_asym_unchecked(params, design.alpha, design.r_b),
        design.r_s,
        Method::AnalyticAsymptotic,
    ))
}
