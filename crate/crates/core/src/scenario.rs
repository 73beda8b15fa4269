//! Scenario files: TOML documents describing a system, a design or
//! constraints, simulation settings and an optional one-dimensional sweep.
//!
//! ```toml
//! [system]
//! p_a = { db = 10.0 }
//! p_b = { db = 10.0 }
//! sigma2_a = { linear = 0.1 }
//! sigma2_b = { linear = 0.1 }
//! sigma2_e = { linear = 0.1 }
//! gbar_ab = 1.0            # optional, default 1
//! gbar_ae = 1.0            # optional, default 1
//!
//! [design]                 # analytic / simulate
//! alpha = 0.8              # may be omitted when alpha is swept
//! r_b = 2.0
//! r_s = 1.0
//!
//! [constraints]            # optimize
//! epsilon = 0.1
//! delta = 0.1
//!
//! [sim]                    # simulate; every field optional
//! blocks = 1000000
//! seed = 7
//! streams = 64
//! mode = "fading-level"    # or "symbol-level"
//! symbols_per_block = 1000
//! normalization = "expected-power"   # or "per-symbol"
//!
//! [sweep]                  # optional
//! variable = "alpha"       # alpha r_b r_s epsilon delta p_a p_b sigma2_a sigma2_b sigma2_e
//! start = 0.001
//! stop = 1.0
//! count = 101
//! spacing = "linear"       # or "log"
//! include_zero = false     # prepend an exact 0 (e.g. epsilon = 0)
//! unit = "linear"          # or "db"; only for power-like variables
//!
//! [grid]                   # optimize with sigma2_a > 0; every field optional
//! r_max = 12.0
//! coarse_step = 0.05
//! fine_step = 0.001
//! ```
//!
//! Every power-like field carries exactly one unit tag. Values are stored as
//! written so a file re-serializes to itself; [`ScenarioFile::normalized`]
//! converts all tags to linear.

use serde::{Deserialize, Serialize};

use crate::analytic::TxDesign;
use crate::channel::{RngSpec, SystemParams};
use crate::design::{GridRefinement, OutageConstraints};
use crate::error::{Error, Result};
use crate::sim::{Normalization, SimConfig, SimMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Power {
    Db(f64),
    Linear(f64),
}

impl Power {
    pub fn linear(&self) -> f64 {
        match *self {
            Power::Db(db) => 10f64.powf(db / 10.0),
            Power::Linear(v) => v,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Power::Db(db) => format!("{db} dB -> {} linear", self.linear()),
            Power::Linear(v) => format!("{v} linear"),
        }
    }
}

fn unit_gain() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub p_a: Power,
    pub p_b: Power,
    pub sigma2_a: Power,
    pub sigma2_b: Power,
    pub sigma2_e: Power,
    #[serde(default = "unit_gain")]
    pub gbar_ab: f64,
    #[serde(default = "unit_gain")]
    pub gbar_ae: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gbar_be: Option<f64>,
}

impl SystemSection {
    pub fn params(&self) -> SystemParams {
        SystemParams {
            p_a: self.p_a.linear(),
            p_b: self.p_b.linear(),
            sigma2_a: self.sigma2_a.linear(),
            sigma2_b: self.sigma2_b.linear(),
            sigma2_e: self.sigma2_e.linear(),
            gbar_ab: self.gbar_ab,
            gbar_ae: self.gbar_ae,
            gbar_be: self.gbar_be,
        }
    }

    fn powers(&self) -> [(&'static str, &Power); 5] {
        [
            ("p_a", &self.p_a),
            ("p_b", &self.p_b),
            ("sigma2_a", &self.sigma2_a),
            ("sigma2_b", &self.sigma2_b),
            ("sigma2_e", &self.sigma2_e),
        ]
    }

    fn powers_mut(&mut self) -> [&mut Power; 5] {
        [
            &mut self.p_a,
            &mut self.p_b,
            &mut self.sigma2_a,
            &mut self.sigma2_b,
            &mut self.sigma2_e,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub r_b: f64,
    pub r_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "SimSection::default_blocks")]
    pub blocks: u64,
    #[serde(default = "SimSection::default_seed")]
    pub seed: u64,
    #[serde(default = "SimSection::default_streams")]
    pub streams: u32,
    #[serde(default = "SimSection::default_mode")]
    pub mode: SimMode,
    #[serde(default = "SimSection::default_symbols")]
    pub symbols_per_block: u32,
    #[serde(default = "SimSection::default_normalization")]
    pub normalization: Normalization,
}

impl SimSection {
    fn default_blocks() -> u64 {
        1_000_000
    }
    fn default_seed() -> u64 {
        RngSpec::default().seed
    }
    fn default_streams() -> u32 {
        RngSpec::default().stream_count
    }
    fn default_mode() -> SimMode {
        SimMode::FadingLevel
    }
    fn default_symbols() -> u32 {
        1
    }
    fn default_normalization() -> Normalization {
        Normalization::ExpectedPower
    }

    pub fn config(&self) -> Result<SimConfig> {
        let rng = RngSpec::new(self.seed, self.streams)?;
        let c = SimConfig {
            n_blocks: self.blocks,
            rng,
            mode: self.mode,
            symbols_per_block: self.symbols_per_block,
        };
        c.validate()?;
        Ok(c)
    }
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            blocks: Self::default_blocks(),
            seed: Self::default_seed(),
            streams: Self::default_streams(),
            mode: Self::default_mode(),
            symbols_per_block: Self::default_symbols(),
            normalization: Self::default_normalization(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    Alpha,
    RB,
    RS,
    Epsilon,
    Delta,
    PA,
    PB,
    Sigma2A,
    Sigma2B,
    Sigma2E,
}

impl SweepVar {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::Alpha => "alpha",
            SweepVar::RB => "r_b",
            SweepVar::RS => "r_s",
            SweepVar::Epsilon => "epsilon",
            SweepVar::Delta => "delta",
            SweepVar::PA => "p_a",
            SweepVar::PB => "p_b",
            SweepVar::Sigma2A => "sigma2_a",
            SweepVar::Sigma2B => "sigma2_b",
            SweepVar::Sigma2E => "sigma2_e",
        }
    }

    fn is_power(&self) -> bool {
        matches!(
            self,
            SweepVar::PA | SweepVar::PB | SweepVar::Sigma2A | SweepVar::Sigma2B | SweepVar::Sigma2E
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Linear,
    Db,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "SweepSection::default_spacing")]
    pub spacing: Spacing,
    #[serde(default)]
    pub include_zero: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Unit>,
}

impl SweepSection {
    fn default_spacing() -> Spacing {
        Spacing::Linear
    }

    /// Sweep values as written (before any dB conversion).
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(scenario_err("sweep.count", "must be at least 1"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(scenario_err("sweep", "start and stop must be finite"));
        }
        let n = self.count;
        let mut v = Vec::with_capacity(n + 1);
        if self.include_zero {
            v.push(0.0);
        }
        let at = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        match self.spacing {
            Spacing::Linear => v.extend((0..n).map(|i| self.start + (self.stop - self.start) * at(i))),
            Spacing::Log => {
                if !(self.start > 0.0 && self.stop > 0.0) {
                    return Err(scenario_err("sweep", "log spacing needs positive start and stop"));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                v.extend((0..n).map(|i| {
                    if i == n - 1 && n > 1 {
                        self.stop
                    } else {
                        (a + (b - a) * at(i)).exp()
                    }
                }));
            }
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub system: SystemSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<OutageConstraints>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
}

fn scenario_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Scenario {
        location: location.into(),
        message: message.into(),
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// One evaluation point of a scenario after applying the sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub sweep_value: Option<f64>,
    pub params: SystemParams,
    pub design: Option<TxDesign>,
    pub constraints: Option<OutageConstraints>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let s: ScenarioFile = toml::from_str(text).map_err(|e| {
            let location = match e.span() {
                Some(span) => {
                    let (l, c) = line_col(text, span.start);
                    format!("line {l}, column {c}")
                }
                None => "document".to_string(),
            };
            scenario_err(location, e.message().to_string())
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Io(format!("cannot serialize scenario: {e}")))
    }

    /// Same scenario with every unit tag converted to linear.
    pub fn normalized(&self) -> Self {
        let mut s = self.clone();
        for p in s.system.powers_mut() {
            *p = Power::Linear(p.linear());
        }
        if let Some(sw) = &mut s.sweep {
            if sw.unit == Some(Unit::Db) {
                sw.start = 10f64.powf(sw.start / 10.0);
                sw.stop = 10f64.powf(sw.stop / 10.0);
                sw.unit = Some(Unit::Linear);
            }
        }
        s
    }

    pub fn params(&self) -> SystemParams {
        self.system.params()
    }

    /// `(field, description)` for every power field, e.g. `10 dB -> 10 linear`.
    pub fn unit_conversions(&self) -> Vec<(String, String)> {
        self.system
            .powers()
            .iter()
            .map(|(name, p)| (name.to_string(), p.describe()))
            .collect()
    }

    pub fn sim_section(&self) -> SimSection {
        self.sim.clone().unwrap_or_default()
    }

    pub fn grid_refinement(&self) -> GridRefinement {
        let mut g = GridRefinement::default();
        if let Some(s) = &self.grid {
            g.r_max = s.r_max.unwrap_or(g.r_max);
            g.coarse_step = s.coarse_step.unwrap_or(g.coarse_step);
            g.fine_step = s.fine_step.unwrap_or(g.fine_step);
        }
        g
    }

    fn validate(&self) -> Result<()> {
        self.params()
            .validate()
            .map_err(|e| scenario_err("system", e.to_string()))?;
        if let Some(sw) = &self.sweep {
            if sw.unit.is_some() && !sw.variable.is_power() {
                return Err(scenario_err(
                    "sweep.unit",
                    format!("unit only applies to power-like variables, not {}", sw.variable.name()),
                ));
            }
            sw.values()?;
            let needs_design = matches!(sw.variable, SweepVar::Alpha | SweepVar::RB | SweepVar::RS);
            if needs_design && self.design.is_none() {
                return Err(scenario_err("sweep.variable", "sweeping a design field needs a [design] section"));
            }
            let needs_constraints = matches!(sw.variable, SweepVar::Epsilon | SweepVar::Delta);
            if needs_constraints && self.constraints.is_none() {
                return Err(scenario_err(
                    "sweep.variable",
                    "sweeping a constraint needs a [constraints] section",
                ));
            }
        }
        if let Some(c) = &self.constraints {
            c.validate().map_err(|e| scenario_err("constraints", e.to_string()))?;
        }
        // Without alpha only the rates are known; commands that need a full
        // design check again per point.
        if let Some(d) = &self.design {
            if let Some(a) = d.alpha {
                TxDesign::new(a, d.r_b, d.r_s).map_err(|e| scenario_err("design", e.to_string()))?;
            }
        }
        if let Some(s) = &self.sim {
            s.config().map_err(|e| scenario_err("sim", e.to_string()))?;
        }
        Ok(())
    }

    /// Evaluation points: one per sweep value, or a single point.
    pub fn points(&self) -> Result<Vec<Point>> {
        let base = Point {
            sweep_value: None,
            params: self.params(),
            design: None,
            constraints: self.constraints,
        };
        let make_design = |alpha: Option<f64>, r_b: f64, r_s: f64| -> Result<Option<TxDesign>> {
            match alpha {
                Some(a) => Ok(Some(TxDesign::new(a, r_b, r_s)?)),
                None => Ok(None),
            }
        };
        let Some(sw) = &self.sweep else {
            let design = match &self.design {
                Some(d) => make_design(d.alpha, d.r_b, d.r_s)?,
                None => None,
            };
            return Ok(vec![Point { design, ..base }]);
        };
        sw.values()?
            .into_iter()
            .map(|v| {
                let mut p = base.clone();
                p.sweep_value = Some(v);
                let (mut alpha, mut r_b, mut r_s) = match &self.design {
                    Some(d) => (d.alpha, d.r_b, d.r_s),
                    None => (None, 0.0, 0.0),
                };
                let lin = if sw.unit == Some(Unit::Db) {
                    10f64.powf(v / 10.0)
                } else {
                    v
                };
                match sw.variable {
                    SweepVar::Alpha => alpha = Some(v),
                    SweepVar::RB => r_b = v,
                    SweepVar::RS => r_s = v,
                    SweepVar::Epsilon => p.constraints.as_mut().expect("validated").epsilon = v,
                    SweepVar::Delta => p.constraints.as_mut().expect("validated").delta = v,
                    SweepVar::PA => p.params.p_a = lin,
                    SweepVar::PB => p.params.p_b = lin,
                    SweepVar::Sigma2A => p.params.sigma2_a = lin,
                    SweepVar::Sigma2B => p.params.sigma2_b = lin,
                    SweepVar::Sigma2E => p.params.sigma2_e = lin,
                }
                p.params.validate()?;
                if let Some(c) = &p.constraints {
                    c.validate()?;
                }
                if self.design.is_some() {
                    p.design = make_design(alpha, r_b, r_s)?;
                }
                Ok(p)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"
[system]
p_a = { db = 10.0 }
p_b = { db = 10.0 }
sigma2_a = { linear = 0.1 }
sigma2_b = { linear = 0.1 }
sigma2_e = { linear = 0.1 }

[design]
r_b = 2.0
r_s = 1.0

[sweep]
variable = "alpha"
start = 0.001
stop = 1.0
count = 101
"#;

    #[test]
    fn parses_and_converts_db() {
        let s = ScenarioFile::parse(FIG2).unwrap();
        assert_eq!(s.params().p_a, 10.0);
        let pts = s.points().unwrap();
        assert_eq!(pts.len(), 101);
        assert_eq!(pts[0].design.unwrap().alpha, 0.001);
        assert_eq!(pts[100].design.unwrap().alpha, 1.0);
        assert!(s.unit_conversions()[0].1.contains("10 dB -> 10 linear"));
    }

    #[test]
    fn round_trip() {
        let s = ScenarioFile::parse(FIG2).unwrap();
        let again = ScenarioFile::parse(&s.to_toml().unwrap()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.normalized(), again.normalized());
    }

    #[test]
    fn two_unit_tags_rejected() {
        let bad = FIG2.replace("p_a = { db = 10.0 }", "p_a = { db = 10.0, linear = 10.0 }");
        assert!(matches!(ScenarioFile::parse(&bad), Err(Error::Scenario { .. })));
    }

    #[test]
    fn unknown_sweep_variable_has_location() {
        let bad = FIG2.replace("variable = \"alpha\"", "variable = \"beta\"");
        match ScenarioFile::parse(&bad) {
            Err(Error::Scenario { location, .. }) => assert!(location.starts_with("line 14"), "{location}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_field_reported() {
        let bad = FIG2.replace("r_s = 1.0\n", "");
        assert!(matches!(ScenarioFile::parse(&bad), Err(Error::Scenario { .. })));
    }

    #[test]
    fn log_sweep_with_zero_endpoint() {
        let sw = SweepSection {
            variable: SweepVar::Epsilon,
            start: 1e-4,
            stop: 1.0,
            count: 50,
            spacing: Spacing::Log,
            include_zero: true,
            unit: None,
        };
        let v = sw.values().unwrap();
        assert_eq!(v.len(), 51);
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 1e-4).abs() < 1e-18);
        assert_eq!(v[50], 1.0);
    }
}
