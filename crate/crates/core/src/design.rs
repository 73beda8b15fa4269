//! Throughput-optimal transmission design under outage constraints.
//!
//! For fixed rates the throughput grows with `alpha` while the secrecy
//! outage grows too, so the best power split is the largest one meeting the
//! secrecy cap ([`optimal_alpha`]).
//!
//! With Alice's receiver noise neglected, the rates can be optimized in
//! closed form as well. Substituting the optimal split, the connection
//! outage for a given `r_s` is smallest at
//! `r_b = log2(2^r_s + sqrt(4^r_s - 2^r_s))`; along that curve the throughput
//! is concave in `r_s` and peaks at the root `psi` of a scalar equation
//! ([`solve_psi`]). The reliability cap truncates the curve at `log2(phi2)`.
//! [`joint_design`] implements that solution and [`grid_oracle`] is the
//! brute-force search it is certified against (and the only route when
//! Alice's noise is not negligible).

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    self, connection_outage_unchecked, exp2_m1, one_minus_exp2_neg, perfect_secrecy_alpha,
    secrecy_outage_unchecked, two_phase_throughput, TxDesign,
};
use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::root::bisect;

/// Slack used when checking a design against its constraints.
pub const CONSTRAINT_SLACK: f64 = 1e-12;
/// Slack used when reporting a constraint as active.
pub const BINDING_SLACK: f64 = 1e-6;

/// Whether an outage probability meets its cap. A zero cap demands exactly
/// zero outage; the slack only absorbs rounding on positive caps.
pub fn within_cap(p: f64, cap: f64) -> bool {
    if cap == 0.0 {
        p == 0.0
    } else {
        p <= cap + CONSTRAINT_SLACK
    }
}

/// Caps on secrecy outage (`epsilon`) and connection outage (`delta`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageConstraints {
    pub epsilon: f64,
    pub delta: f64,
}

impl OutageConstraints {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let c = OutageConstraints { epsilon, delta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Which constraints hold with (near) equality at a solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub secrecy: bool,
    pub reliability: bool,
    pub power: bool,
}

impl Binding {
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.secrecy {
            parts.push("secrecy");
        }
        if self.reliability {
            parts.push("reliability");
        }
        if self.power {
            parts.push("power");
        }
        if parts.is_empty() {
            "none".to_string()
        } else {
            parts.join("+")
        }
    }
}

/// Branch of the closed-form joint design that produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JointBranch {
    /// `r_s = psi`, `r_b` on the minimum-outage curve.
    Interior,
    /// `r_s = log2(phi2)`, `r_b = log2(phi1)`: the reliability cap binds.
    ReliabilityBound,
    /// The split formula exceeds one, so `alpha = 1` and the rates are
    /// optimized along the edge of the admissible region.
    PowerCapped,
}

impl JointBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            JointBranch::Interior => "interior",
            JointBranch::ReliabilityBound => "reliability-bound",
            JointBranch::PowerCapped => "power-capped",
        }
    }
}

/// Auxiliary quantities of the closed-form joint design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointAux {
    pub phi1: f64,
    pub phi2: f64,
    pub psi: f64,
    pub branch: JointBranch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    pub design: Option<TxDesign>,
    pub eta: f64,
    pub p_so: f64,
    pub p_co: f64,
    pub feasible: bool,
    pub binding: Binding,
    pub aux: Option<JointAux>,
    /// Final grid step when the solution came from a grid search.
    pub grid_step: Option<f64>,
}

impl DesignSolution {
    pub fn infeasible() -> Self {
        DesignSolution {
            design: None,
            eta: 0.0,
            p_so: f64::NAN,
            p_co: f64::NAN,
            feasible: false,
            binding: Binding::default(),
            aux: None,
            grid_step: None,
        }
    }

    fn from_design(design: TxDesign, p_so: f64, p_co: f64, c: &OutageConstraints) -> Self {
        DesignSolution {
            design: Some(design),
            eta: two_phase_throughput(p_co, design.r_s),
            p_so,
            p_co,
            feasible: true,
            binding: Binding {
                secrecy: p_so >= c.epsilon - BINDING_SLACK,
                reliability: p_co >= c.delta - BINDING_SLACK,
                power: design.alpha >= 1.0 - BINDING_SLACK,
            },
            aux: None,
            grid_step: None,
        }
    }
}

/// Lower edge of the achievable connection-outage caps for a secrecy cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRegion {
    pub epsilon: f64,
    pub delta_l: f64,
}

impl FeasibleRegion {
    /// Positive throughput is achievable iff `delta > delta_l`.
    pub fn admits(&self, delta: f64) -> bool {
        delta > self.delta_l
    }
}

/// `1 - sigma2_e / (P_a gbar_ae ln eps)`, the factor by which the secrecy
/// cap lets `alpha` exceed the perfect-secrecy split.
///
/// Equals 1 for `eps = 0` or a noiseless Eve and is infinite for `eps = 1`,
/// where the secrecy cap is vacuous.
pub fn secrecy_factor(params: &SystemParams, epsilon: f64) -> f64 {
    if epsilon >= 1.0 {
        f64::INFINITY
    } else if epsilon <= 0.0 || params.sigma2_e == 0.0 {
        1.0
    } else {
        1.0 - params.sigma2_e / (params.p_a * params.gbar_ae * epsilon.ln())
    }
}

/// Largest power split meeting `P_so <= epsilon` for fixed rates.
///
/// Returns 0 when no positive split qualifies, which only happens for
/// `r_b == r_s` with `epsilon < 1` and a noisy Eve.
pub fn optimal_alpha(params: &SystemParams, r_b: f64, r_s: f64, epsilon: f64) -> Result<f64> {
    params.validate()?;
    if !(r_s > 0.0 && r_b >= r_s) {
        return Err(Error::invalid(format!("need r_b >= r_s > 0, got r_b={r_b}, r_s={r_s}")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    Ok(optimal_alpha_unchecked(params, r_b, r_s, epsilon))
}

#[inline]
fn optimal_alpha_unchecked(params: &SystemParams, r_b: f64, r_s: f64, epsilon: f64) -> f64 {
    let factor = secrecy_factor(params, epsilon);
    if factor.is_infinite() {
        return 1.0;
    }
    (perfect_secrecy_alpha(r_b, r_s) * factor).min(1.0)
}

/// Lower boundary `delta_l(epsilon)` of the feasible constraint region,
/// with Alice's receiver noise neglected.
pub fn feasibility(params: &SystemParams, epsilon: f64) -> Result<FeasibleRegion> {
    params.validate()?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    let k = min_outage_exponent(params, epsilon);
    Ok(FeasibleRegion {
        epsilon,
        delta_l: -(-k).exp_m1(),
    })
}

// sigma_b^2 / (P_a gbar_ab F): the connection-outage exponent per unit of
// the rate cost along the minimum-outage curve.
fn min_outage_exponent(params: &SystemParams, epsilon: f64) -> f64 {
    params.sigma2_b / (params.p_a * params.gbar_ab * secrecy_factor(params, epsilon))
}

/// Left side of the equation defining `psi`:
/// `sqrt(4^x - 2^x) / (x 2^x (2^(x+1) + 2 sqrt(4^x - 2^x) - 1))`,
/// rearranged to avoid overflow and cancellation.
pub fn psi_lhs(x: f64) -> f64 {
    let t = (-x).exp2();
    let root = one_minus_exp2_neg(x).sqrt();
    root / (x * x.exp2() * (2.0 + 2.0 * root - t))
}

/// Right side of the equation defining `psi`:
/// `sigma_b^2 gbar_ae ln2 ln eps / (gbar_ab (P_a gbar_ae ln eps - sigma_e^2))`.
pub fn psi_rhs(params: &SystemParams, epsilon: f64) -> f64 {
    LN_2 * min_outage_exponent(params, epsilon)
}

/// Unique positive root `psi` of `psi_lhs(x) = psi_rhs(params, epsilon)`.
///
/// The left side falls from infinity to zero; the root is bracketed by
/// growing `[1e-6, 1]` geometrically, checked for uniqueness on a scan of
/// the bracket, and refined by bisection.
pub fn solve_psi(params: &SystemParams, epsilon: f64) -> Result<f64> {
    params.validate()?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::invalid(format!(
            "psi needs epsilon in [0, 1) so the right side is positive, got {epsilon}"
        )));
    }
    let rhs = psi_rhs(params, epsilon);
    if !(rhs > 0.0 && rhs.is_finite()) {
        return Err(Error::NumericalFailure {
            routine: "solve_psi",
            detail: format!("right side {rhs} is not positive and finite"),
            achieved: f64::NAN,
        });
    }
    let f = |x: f64| psi_lhs(x) - rhs;

    let (mut lo, mut hi) = (1e-6, 1.0);
    while f(lo) <= 0.0 {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(bracket_failure(lo, hi, rhs));
        }
    }
    while f(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 4096.0 {
            return Err(bracket_failure(lo, hi, rhs));
        }
    }

    let scan = 512;
    let ratio = (hi / lo).powf(1.0 / scan as f64);
    let mut prev_x = lo;
    let mut prev = psi_lhs(lo);
    let mut sign_changes = 0;
    for i in 1..=scan {
        let x = if i == scan { hi } else { lo * ratio.powi(i) };
        let v = psi_lhs(x);
        if v > prev {
            return Err(Error::NumericalFailure {
                routine: "solve_psi",
                detail: format!("left side not decreasing between {prev_x} and {x}"),
                achieved: v - prev,
            });
        }
        if (prev - rhs).signum() != (v - rhs).signum() {
            sign_changes += 1;
        }
        prev = v;
        prev_x = x;
    }
    if sign_changes != 1 {
        return Err(Error::NumericalFailure {
            routine: "solve_psi",
            detail: format!("{sign_changes} sign changes on [{lo}, {hi}]"),
            achieved: f64::NAN,
        });
    }

    let x_tol = 1e-12 * lo.min(1.0);
    let psi = bisect(f, lo, hi, x_tol, 4000)?;
    let residual = f(psi).abs();
    if residual > 1e-10 * rhs.max(1.0) {
        return Err(Error::NumericalFailure {
            routine: "solve_psi",
            detail: format!("residual too large at x = {psi}"),
            achieved: residual,
        });
    }
    Ok(psi)
}

fn bracket_failure(lo: f64, hi: f64, rhs: f64) -> Error {
    Error::NumericalFailure {
        routine: "solve_psi",
        detail: format!("could not bracket root: lo={lo}, hi={hi}, rhs={rhs}"),
        achieved: f64::NAN,
    }
}

/// `log2(2^r_s + sqrt(4^r_s - 2^r_s))`: the codeword rate minimizing the
/// connection outage for a given information rate.
pub fn min_outage_codeword_rate(r_s: f64) -> f64 {
    r_s + (1.0 + one_minus_exp2_neg(r_s).sqrt()).log2()
}

// Connection-outage exponent factor along the minimum-outage curve:
// 2^(x+1) + 2 sqrt(4^x - 2^x) - 1.
fn curve_cost(x: f64) -> f64 {
    let v = x.exp2();
    2.0 * v * (1.0 + one_minus_exp2_neg(x).sqrt()) - 1.0
}

/// Closed-form joint rate and power design with Alice's receiver noise
/// neglected. Any `sigma2_a` in `params` is ignored.
pub fn joint_design(params: &SystemParams, constraints: &OutageConstraints) -> Result<DesignSolution> {
    params.validate()?;
    constraints.validate()?;
    let params = params.asymptotic();
    let OutageConstraints { epsilon, delta } = *constraints;

    let region = feasibility(&params, epsilon)?;
    if !region.admits(delta) {
        return Ok(DesignSolution::infeasible());
    }

    let k_line = params.sigma2_b / (params.p_a * params.gbar_ab);
    let factor = secrecy_factor(&params, epsilon);
    let k_curve = k_line / factor;
    let budget = -(-delta).ln_1p();
    // Cap on the curve cost; exceeds one exactly when delta > delta_l.
    let level = budget / k_curve;
    let phi1 = 0.5 * (1.0 + level);
    let phi2 = 1.0 + (level - 1.0).powi(2) / (4.0 * level);
    let rs_cap = if level.is_finite() {
        ((level - 1.0).powi(2) / (4.0 * level)).ln_1p() / LN_2
    } else {
        f64::INFINITY
    };

    let psi = if factor.is_finite() {
        solve_psi(&params, epsilon)?
    } else {
        f64::INFINITY
    };

    let mut chosen: Option<(f64, f64, JointBranch)> = None;
    if factor.is_finite() {
        let (r_s, r_b, branch) = if psi < rs_cap {
            (psi, min_outage_codeword_rate(psi), JointBranch::Interior)
        } else {
            (rs_cap, phi1.log2(), JointBranch::ReliabilityBound)
        };
        let alpha = perfect_secrecy_alpha(r_b, r_s) * factor;
        if alpha <= 1.0 + 1e-12 {
            chosen = Some((r_b, r_s, branch));
        }
    }
    let (r_b, r_s, branch) = match chosen {
        Some(c) => c,
        None => power_capped_rates(factor, k_line, k_curve, budget, psi, rs_cap)?,
    };

    let alpha = optimal_alpha_unchecked(&params, r_b, r_s, epsilon);
    let design = TxDesign::new(alpha, r_b, r_s)?;
    let report = analytic::evaluate_asymptotic(&params, &design)?;
    if report.p_so > epsilon + CONSTRAINT_SLACK || report.p_co > delta + 1e-9 {
        return Err(Error::NumericalFailure {
            routine: "joint_design",
            detail: format!(
                "design {design:?} violates constraints: p_so={}, p_co={}",
                report.p_so, report.p_co
            ),
            achieved: (report.p_so - epsilon).max(report.p_co - delta),
        });
    }
    let mut sol = DesignSolution::from_design(design, report.p_so, report.p_co, constraints);
    sol.aux = Some(JointAux {
        phi1,
        phi2,
        psi,
        branch,
    });
    Ok(sol)
}

// When the split formula would exceed one, the admissible region
// alpha <= 1 cuts the minimum-outage curve. Beyond the cut the best codeword
// rate sits on the edge r_b = r_s + log2(c), c = F/(F-1), with alpha = 1.
// The throughput profile is then concave on each piece, so the optimum is
// the better of the two piecewise maximizers.
fn power_capped_rates(
    factor: f64,
    k_line: f64,
    k_curve: f64,
    budget: f64,
    psi: f64,
    rs_cap: f64,
) -> Result<(f64, f64, JointBranch)> {
    let c = if factor.is_infinite() {
        1.0
    } else {
        factor / (factor - 1.0)
    };
    let offset = c.log2();
    // Curve stays inside the region for x <= x_cut.
    let x_cut = if c >= 2.0 {
        f64::INFINITY
    } else {
        -(1.0 - (c - 1.0).powi(2)).log2()
    };

    let eta_curve = |x: f64| 0.5 * x * (-k_curve * curve_cost(x)).exp();
    let eta_line = |x: f64| 0.5 * x * (-k_line * (c * x.exp2() - 1.0)).exp();

    let mut best: Option<(f64, f64, f64, JointBranch)> = None;
    let mut consider = |eta: f64, r_b: f64, r_s: f64, branch: JointBranch| {
        if r_s > 0.0 && best.is_none_or(|b| eta > b.0) {
            best = Some((eta, r_b, r_s, branch));
        }
    };

    if x_cut > 0.0 {
        let x = psi.min(x_cut).min(rs_cap);
        let branch = if x == rs_cap {
            JointBranch::ReliabilityBound
        } else {
            JointBranch::Interior
        };
        consider(eta_curve(x), min_outage_codeword_rate(x), x, branch);
    }

    // Largest x on the edge meeting the reliability cap.
    let x_rel = ((1.0 + budget / k_line) / c).log2();
    let lo = if x_cut.is_finite() { x_cut } else { f64::INFINITY };
    if lo <= x_rel {
        let g = |x: f64| 1.0 / x - k_line * c * LN_2 * x.exp2();
        let mut hi = 1.0;
        while g(hi) > 0.0 {
            hi *= 2.0;
        }
        let x_free = bisect(g, 1e-300, hi, 1e-14, 4000)?;
        let x = x_free.clamp(lo, x_rel);
        consider(eta_line(x), x + offset, x, JointBranch::PowerCapped);
    }

    best.map(|(_, r_b, r_s, branch)| (r_b, r_s, branch))
        .ok_or_else(|| Error::NumericalFailure {
            routine: "joint_design",
            detail: "power-capped profile has no admissible point".into(),
            achieved: f64::NAN,
        })
}

/// Candidate rates for a brute-force search; every pair with
/// `0 < r_s <= r_b` is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct RateGrid {
    pub r_b: Vec<f64>,
    pub r_s: Vec<f64>,
}

impl RateGrid {
    /// Both axes `step, 2 step, ...` up to `r_max`.
    pub fn uniform(r_max: f64, step: f64) -> Self {
        let axis = lattice(step, r_max, step);
        RateGrid {
            r_b: axis.clone(),
            r_s: axis,
        }
    }

    /// Both axes log-spaced.
    pub fn log_spaced(r_b: (f64, f64, usize), r_s: (f64, f64, usize)) -> Self {
        RateGrid {
            r_b: logspace(r_b.0, r_b.1, r_b.2),
            r_s: logspace(r_s.0, r_s.1, r_s.2),
        }
    }

    pub fn len(&self) -> usize {
        self.r_b.len() * self.r_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_b.is_empty() || self.r_s.is_empty()
    }
}

/// Multiples of `step` in `[lo, hi]`, excluding zero.
fn lattice(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step).ceil().max(1.0) as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

pub(crate) fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Exhaustive search over `grid` with the optimal split at every point and
/// the general (finite `sigma2_a`) outage formulas.
pub fn grid_oracle(
    params: &SystemParams,
    constraints: &OutageConstraints,
    grid: &RateGrid,
) -> Result<DesignSolution> {
    params.validate()?;
    constraints.validate()?;
    let OutageConstraints { epsilon, delta } = *constraints;

    // (eta, r_b index, r_s index); ties resolve to the lowest indices so the
    // result does not depend on how rayon splits the work.
    let best = grid
        .r_b
        .par_iter()
        .enumerate()
        .filter_map(|(i, &r_b)| {
            let mut local: Option<(f64, usize, usize)> = None;
            for (j, &r_s) in grid.r_s.iter().enumerate() {
                if !(r_s > 0.0 && r_s <= r_b) {
                    continue;
                }
                let alpha = optimal_alpha_unchecked(params, r_b, r_s, epsilon);
                if alpha <= 0.0 {
                    continue;
                }
                let design = TxDesign { alpha, r_b, r_s };
                if !within_cap(secrecy_outage_unchecked(params, &design), epsilon) {
                    continue;
                }
                let p_co = connection_outage_unchecked(params, &design);
                if !within_cap(p_co, delta) {
                    continue;
                }
                let eta = two_phase_throughput(p_co, r_s);
                if local.is_none_or(|(e, _, _)| eta > e) {
                    local = Some((eta, i, j));
                }
            }
            local
        })
        .reduce_with(|a, b| match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if (a.1, a.2) <= (b.1, b.2) {
                    a
                } else {
                    b
                }
            }
        });

    let Some((_, i, j)) = best else {
        return Ok(DesignSolution::infeasible());
    };
    let (r_b, r_s) = (grid.r_b[i], grid.r_s[j]);
    let alpha = optimal_alpha_unchecked(params, r_b, r_s, epsilon);
    let design = TxDesign { alpha, r_b, r_s };
    let p_so = secrecy_outage_unchecked(params, &design);
    let p_co = connection_outage_unchecked(params, &design);
    Ok(DesignSolution::from_design(design, p_so, p_co, constraints))
}

/// Two-pass grid search: a coarse grid, then a fine lattice in a window
/// around the coarse optimum.
///
/// The coarse axes are uniform plus `log_points` log-spaced rates on
/// `[log_floor, coarse_step)`, because near the feasibility boundary every
/// admissible design has rates far below any practical uniform step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRefinement {
    pub r_max: f64,
    pub coarse_step: f64,
    pub fine_step: f64,
    /// Half-width of the fine window, in coarse steps.
    pub window: f64,
    pub log_points: usize,
    pub log_floor: f64,
}

impl Default for GridRefinement {
    fn default() -> Self {
        GridRefinement {
            r_max: 12.0,
            coarse_step: 0.05,
            fine_step: 1e-3,
            window: 3.0,
            log_points: 24,
            log_floor: 1e-6,
        }
    }
}

impl GridRefinement {
    fn coarse_axis(&self) -> Vec<f64> {
        let mut axis = Vec::new();
        if self.log_points > 0 && self.log_floor < self.coarse_step {
            // stop one point short so the uniform part supplies coarse_step
            let n = self.log_points + 1;
            axis.extend(logspace(self.log_floor, self.coarse_step, n).into_iter().take(n - 1));
        }
        axis.extend(lattice(self.coarse_step, self.r_max, self.coarse_step));
        axis
    }
}

/// `center + k step` for integer `k`, kept inside `(0, r_max]` and within
/// `half_width` of the center.
fn centered_lattice(center: f64, half_width: f64, step: f64, r_max: f64) -> Vec<f64> {
    let k = (half_width / step).floor() as i64;
    (-k..=k)
        .map(|i| center + i as f64 * step)
        .filter(|&x| x > 0.0 && x <= r_max)
        .collect()
}

pub fn grid_oracle_refined(
    params: &SystemParams,
    constraints: &OutageConstraints,
    refine: &GridRefinement,
) -> Result<DesignSolution> {
    if !(refine.coarse_step > 0.0 && refine.fine_step > 0.0 && refine.r_max > 0.0) {
        return Err(Error::invalid("grid steps and r_max must be positive"));
    }
    let axis = refine.coarse_axis();
    let coarse = grid_oracle(
        params,
        constraints,
        &RateGrid {
            r_b: axis.clone(),
            r_s: axis,
        },
    )?;
    let Some(center) = coarse.design else {
        let mut sol = coarse;
        sol.grid_step = Some(refine.coarse_step);
        return Ok(sol);
    };
    let w = refine.window * refine.coarse_step;
    let fine = RateGrid {
        r_b: centered_lattice(center.r_b, w, refine.fine_step, refine.r_max),
        r_s: centered_lattice(center.r_s, w, refine.fine_step, refine.r_max),
    };
    let fine_sol = grid_oracle(params, constraints, &fine)?;
    let mut best = if fine_sol.feasible && fine_sol.eta >= coarse.eta {
        fine_sol
    } else {
        coarse
    };
    best.grid_step = Some(refine.fine_step);
    Ok(best)
}

/// Joint design in whichever regime applies: closed form when Alice's
/// receiver noise is zero, refined grid search otherwise.
pub fn optimize(
    params: &SystemParams,
    constraints: &OutageConstraints,
    refine: &GridRefinement,
) -> Result<DesignSolution> {
    if params.sigma2_a == 0.0 {
        joint_design(params, constraints)
    } else {
        grid_oracle_refined(params, constraints, refine)
    }
}

/// Asymptotic throughput for given rates with the optimal split; zero when
/// the split is not admissible.
pub fn eta_with_optimal_alpha(params: &SystemParams, r_b: f64, r_s: f64, epsilon: f64) -> f64 {
    let alpha = optimal_alpha_unchecked(params, r_b, r_s, epsilon);
    if alpha <= 0.0 {
        return 0.0;
    }
    0.5 * r_s * (-params.sigma2_b * exp2_m1(r_b) / (alpha * params.p_a * params.gbar_ab)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::secrecy_outage;

    fn fig3(sigma2_e: f64) -> SystemParams {
        SystemParams::new(10.0, 10.0, 0.0, 0.1, sigma2_e)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn optimal_alpha_value_and_back_substitution() {
        let p = fig3(0.1);
        let a = optimal_alpha(&p, 2.0, 1.0, 0.1).unwrap();
        let expected = 0.5 * (1.0 + 0.1 / (10.0 * 10f64.ln()));
        assert!(close(a, expected, 1e-15));
        assert!(close(a, 0.502172, 1e-6));
        let d = TxDesign::new(a, 2.0, 1.0).unwrap();
        assert!(close(secrecy_outage(&p, &d).unwrap(), 0.1, 1e-12));
    }

    #[test]
    fn optimal_alpha_limits() {
        assert_eq!(optimal_alpha(&fig3(0.0), 2.0, 1.0, 0.1).unwrap(), 0.5);
        assert_eq!(optimal_alpha(&fig3(0.1), 2.0, 1.0, 0.0).unwrap(), 0.5);
        assert_eq!(optimal_alpha(&fig3(0.1), 2.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(optimal_alpha(&fig3(0.0), 2.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(optimal_alpha(&fig3(50.0), 2.0, 1.0, 0.5).unwrap(), 1.0);
        assert_eq!(optimal_alpha(&fig3(0.1), 1.0, 1.0, 0.5).unwrap(), 0.0);
        assert!(optimal_alpha(&fig3(0.1), 1.0, 2.0, 0.5).is_err());
        assert!(optimal_alpha(&fig3(0.1), 2.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn delta_lower_bound_value() {
        let r = feasibility(&fig3(0.1), 0.1).unwrap();
        let f = 1.0 + 0.1 / (10.0 * 10f64.ln());
        assert!(close(r.delta_l, -(-0.01 / f).exp_m1(), 1e-15));
        assert!(close(r.delta_l, 0.0099074, 1e-7));
    }

    #[test]
    fn delta_lower_bound_limits() {
        let base = -(-0.01f64).exp_m1();
        for eps in [0.0, 1e-6, 0.3, 0.99] {
            assert!(close(feasibility(&fig3(0.0), eps).unwrap().delta_l, base, 1e-16));
        }
        assert!(close(feasibility(&fig3(0.2), 0.0).unwrap().delta_l, base, 1e-16));
        assert_eq!(feasibility(&fig3(0.2), 1.0).unwrap().delta_l, 0.0);
        let r = feasibility(&fig3(0.1), 0.1).unwrap();
        assert!(r.admits(r.delta_l + 0.01));
        assert!(!r.admits(r.delta_l * 0.5));
    }

    #[test]
    fn psi_rhs_matches_literal_expression() {
        let p = SystemParams::new(7.0, 1.0, 0.0, 0.3, 0.2).with_gains(1.3, 0.8);
        let eps: f64 = 0.05;
        let le = eps.ln();
        let literal = p.sigma2_b * p.gbar_ae * LN_2 * le / (p.gbar_ab * (p.p_a * p.gbar_ae * le - p.sigma2_e));
        assert!(close(psi_rhs(&p, eps), literal, 1e-15));
    }

    #[test]
    fn psi_lhs_matches_literal_expression() {
        for x in [0.01f64, 0.5, 1.0, 3.7, 10.0] {
            let v = x.exp2();
            let s = (4f64.powf(x) - v).sqrt();
            let literal = s / (x * v * (2.0 * v + 2.0 * s - 1.0));
            assert!(close(psi_lhs(x), literal, 1e-13 * literal));
        }
    }

    #[test]
    fn psi_residual() {
        let p = fig3(0.1);
        let psi = solve_psi(&p, 0.1).unwrap();
        let rhs = psi_rhs(&p, 0.1);
        assert!((psi_lhs(psi) - rhs).abs() < 1e-10);
        assert!(((psi_lhs(psi) - rhs) / rhs).abs() < 1e-10);
    }

    #[test]
    fn psi_against_fine_scan() {
        let p = fig3(0.1);
        let psi = solve_psi(&p, 0.1).unwrap();
        let rhs = psi_rhs(&p, 0.1);
        // first crossing on a 1e-6 scan starting at 3.0
        let mut x = 3.0;
        assert!(psi_lhs(x) > rhs);
        while psi_lhs(x) > rhs {
            x += 1e-6;
        }
        assert!(close(psi, x, 1e-6), "psi {psi} vs scan {x}");
    }

    #[test]
    fn psi_large_root_for_tiny_rhs() {
        // sigma_b^2 small enough that the right side is ~1e-8
        let mut p = fig3(0.1);
        p.sigma2_b = 1e-8 / LN_2 * 10.0 * secrecy_factor(&p, 0.1);
        let rhs = psi_rhs(&p, 0.1);
        assert!(close(rhs, 1e-8, 1e-20));
        let psi = solve_psi(&p, 0.1).unwrap();
        assert!(psi > 15.0);
        assert!(((psi_lhs(psi) - rhs) / rhs).abs() < 1e-10);
    }

    #[test]
    fn psi_rejects_vacuous_secrecy() {
        assert!(solve_psi(&fig3(0.1), 1.0).is_err());
        assert!(solve_psi(&fig3(0.1), 0.0).is_ok());
    }

    #[test]
    fn min_outage_rate_value() {
        assert!(close(min_outage_codeword_rate(1.0), (2.0 + 2f64.sqrt()).log2(), 1e-15));
        assert!(close(min_outage_codeword_rate(1.0), 1.77155, 1e-5));
    }

    #[test]
    fn joint_design_headline_case() {
        let p = fig3(0.1);
        let c = OutageConstraints::new(0.1, 0.1).unwrap();
        let sol = joint_design(&p, &c).unwrap();
        assert!(sol.feasible);
        let d = sol.design.unwrap();
        assert!(sol.p_so <= 0.1 + 1e-12 && sol.p_co <= 0.1 + 1e-9);
        let aux = sol.aux.unwrap();
        assert_eq!(aux.branch, JointBranch::ReliabilityBound);
        assert!(close(d.r_b, aux.phi1.log2(), 1e-12));
        assert!(close(d.r_s, aux.phi2.log2(), 1e-12));
        assert!(sol.binding.reliability && sol.binding.secrecy);
    }

    #[test]
    fn joint_design_interior_case() {
        let p = fig3(0.1);
        let c = OutageConstraints::new(0.1, 0.6).unwrap();
        let sol = joint_design(&p, &c).unwrap();
        let aux = sol.aux.unwrap();
        assert_eq!(aux.branch, JointBranch::Interior);
        let d = sol.design.unwrap();
        assert!(close(d.r_s, aux.psi, 1e-15));
        assert!(close(d.r_b, min_outage_codeword_rate(d.r_s), 1e-12));
        assert!(!sol.binding.reliability);
    }

    #[test]
    fn joint_design_infeasible_below_boundary() {
        let p = fig3(0.1);
        let dl = feasibility(&p, 0.1).unwrap().delta_l;
        let sol = joint_design(&p, &OutageConstraints::new(0.1, dl * 0.5).unwrap()).unwrap();
        assert!(!sol.feasible && sol.design.is_none() && sol.eta == 0.0);
        let sol = joint_design(&p, &OutageConstraints::new(0.1, dl + 0.01).unwrap()).unwrap();
        assert!(sol.feasible && sol.eta > 0.0);
    }

    #[test]
    fn joint_design_perfect_secrecy_worst_case_eve() {
        let sol = joint_design(&fig3(0.0), &OutageConstraints::new(0.0, 0.1).unwrap()).unwrap();
        assert!(sol.feasible && sol.eta > 0.0);
        assert_eq!(sol.p_so, 0.0);
    }

    #[test]
    fn joint_design_power_capped_near_vacuous_secrecy() {
        for eps in [0.999, 1.0] {
            let p = fig3(0.2);
            let c = OutageConstraints::new(eps, 0.1).unwrap();
            let sol = joint_design(&p, &c).unwrap();
            let d = sol.design.unwrap();
            assert!(d.alpha <= 1.0 && sol.p_so <= eps + 1e-12 && sol.p_co <= 0.1 + 1e-9);
            assert_eq!(sol.aux.unwrap().branch, JointBranch::PowerCapped);
            // brute force on a grid around the optimum
            let mut best: f64 = 0.0;
            for i in 1..=600 {
                let r_s = i as f64 * 0.01;
                for k in 0..=400 {
                    let r_b = r_s + k as f64 * 0.005;
                    let a = optimal_alpha_unchecked(&p, r_b, r_s, eps);
                    if a <= 0.0 {
                        continue;
                    }
                    let design = TxDesign { alpha: a, r_b, r_s };
                    let r = analytic::evaluate_asymptotic(&p, &design).unwrap();
                    if r.p_so <= eps + 1e-12 && r.p_co <= 0.1 + 1e-12 {
                        best = best.max(r.eta);
                    }
                }
            }
            assert!(sol.eta >= best - 1e-9, "eps {eps}: closed {} < grid {best}", sol.eta);
            assert!(sol.eta - best < 5e-3, "eps {eps}: closed {} vs grid {best}", sol.eta);
        }
    }

    #[test]
    fn grid_single_point() {
        let p = SystemParams::new(10.0, 10.0, 0.1, 0.1, 0.1);
        let c = OutageConstraints::new(0.1, 0.5).unwrap();
        let g = RateGrid {
            r_b: vec![2.0],
            r_s: vec![1.0],
        };
        let sol = grid_oracle(&p, &c, &g).unwrap();
        let d = sol.design.unwrap();
        assert_eq!((d.r_b, d.r_s), (2.0, 1.0));
        assert_eq!(d.alpha, optimal_alpha(&p, 2.0, 1.0, 0.1).unwrap());
        let r = analytic::evaluate(&p, &d).unwrap();
        assert_eq!(sol.eta, r.eta);
        assert_eq!(sol.p_co, r.p_co);
    }

    #[test]
    fn grid_empty_feasible_set() {
        let p = SystemParams::new(10.0, 10.0, 0.1, 0.1, 0.1);
        let c = OutageConstraints::new(0.1, 1e-6).unwrap();
        let sol = grid_oracle(&p, &c, &RateGrid::uniform(4.0, 0.1)).unwrap();
        assert!(!sol.feasible);
    }

    #[test]
    fn grid_general_regime_is_self_consistent() {
        let p = SystemParams::new(10.0, 10.0, 0.1, 0.1, 0.1);
        let c = OutageConstraints::new(0.1, 0.1).unwrap();
        let sol = grid_oracle_refined(&p, &c, &GridRefinement::default()).unwrap();
        assert!(sol.feasible);
        let r = analytic::evaluate(&p, &sol.design.unwrap()).unwrap();
        assert!(r.p_so <= 0.1 + 1e-12 && r.p_co <= 0.1 + 1e-12);
        assert!(close(r.eta, sol.eta, 1e-15));
        assert_eq!(sol.grid_step, Some(1e-3));
    }

    #[test]
    fn grid_agrees_with_closed_form_in_asymptotic_regime() {
        let p = fig3(0.1);
        let c = OutageConstraints::new(0.05, 0.4).unwrap();
        let closed = joint_design(&p, &c).unwrap();
        let grid = grid_oracle_refined(&p, &c, &GridRefinement::default()).unwrap();
        assert!(grid.eta <= closed.eta + 1e-12);
        assert!(closed.eta - grid.eta < 1e-3, "{} vs {}", closed.eta, grid.eta);
    }
}
