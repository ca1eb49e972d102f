//! Scenario documents: a strict, versioned JSON description of one run.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "system": { "family": "l2", "sigma": 10, "rayleigh": 28, "b": 2.6666666666666665 },
//!   "initial_state": [0.5, 0.1, 0.5],
//!   "time": { "t1": 20 },
//!   "outputs": [ { "kind": "csv", "path": "run.csv" } ]
//! }
//! ```
//!
//! `system` keys: `family` (`standard`, `l2`, `l1`, `ln`), `n` (required for
//! `ln`), standard parameters `sigma`, `rayleigh`, `b`, normalized parameters
//! `mu`, `beta`, `gamma`, and `normalize`. The normalized families take either
//! `mu`/`beta`/`gamma` (all three) or standard parameters that are normalized
//! (`normalize` defaults to true); omitted standard parameters default to
//! `(10, 28, 8/3)`.
//!
//! `time` keys: `t0` (0), `t1` (required), `mode` (`adaptive`), `step` (1e-3),
//! `rel_tol` (1e-9), `abs_tol` (1e-12), `max_step` (0.1), `min_step` (1e-12),
//! `sample_interval` (0.01).
//!
//! `outputs` entries: `kind` (`csv` or `svg`), `path`, `projection` (`x,z`),
//! `color_by` (`none` or `sector`). Unknown keys anywhere are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use zlorenz_core::dynamics::SystemSpec;
use zlorenz_core::integrate::{IntegratorConfig, Mode};
use zlorenz_core::params::{NormalizedParams, StandardParams};
use zlorenz_core::state::CartesianState;

use crate::svg::Projection;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{key}: {constraint}")]
    Semantic { key: String, constraint: String },
}

fn semantic(key: &str, constraint: impl Into<String>) -> ScenarioError {
    ScenarioError::Semantic { key: key.to_string(), constraint: constraint.into() }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rayleigh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalize: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    pub kind: String,
    pub path: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color_by: Option<String>,
}

/// A scenario document as written, before defaults and validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub system: SystemDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<[f64; 3]>,
    #[serde(default)]
    pub time: TimeDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputDoc>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($f:ident),+) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )+
    };
}

impl ScenarioDoc {
    /// Fields set in `top` replace those in `self`; outputs are replaced
    /// wholesale when `top` lists any.
    pub fn overlay(mut self, top: &ScenarioDoc) -> ScenarioDoc {
        overlay!(self, top, schema_version, initial_state);
        overlay!(self.system, top.system, family, n, sigma, rayleigh, b, mu, beta, gamma, normalize);
        overlay!(self.time, top.time, t0, t1, mode, step, rel_tol, abs_tol, max_step, min_step, sample_interval);
        if !top.outputs.is_empty() {
            self.outputs = top.outputs.clone();
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorBy {
    None,
    /// Angular sector of the member's own symmetry order.
    Sector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub kind: OutputKind,
    pub path: PathBuf,
    pub projection: Projection,
    pub color_by: ColorBy,
}

/// A fully validated scenario with every default applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub system: SystemSpec,
    pub initial_state: CartesianState,
    pub t0: f64,
    pub t1: f64,
    pub integrator: IntegratorConfig,
    pub outputs: Vec<OutputSpec>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    parse_document(text)?.resolve()
}

pub fn parse_document(text: &str) -> Result<ScenarioDoc, ScenarioError> {
    serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        ScenarioError::Syntax { line: e.line(), column: e.column(), message }
    })
}

fn finite(key: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(semantic(key, "must be a finite number"))
    }
}

impl SystemDoc {
    pub fn resolve(&self) -> Result<SystemSpec, ScenarioError> {
        let family =
            self.family.as_deref().ok_or_else(|| semantic("system.family", "is required (standard, l2, l1 or ln)"))?;
        let any_standard = self.sigma.is_some() || self.rayleigh.is_some() || self.b.is_some();
        let any_normalized = self.mu.is_some() || self.beta.is_some() || self.gamma.is_some();
        let c = StandardParams::CANONICAL;
        let standard = || -> Result<StandardParams, ScenarioError> {
            let sigma = finite("system.sigma", self.sigma.unwrap_or(c.sigma))?;
            let rayleigh = finite("system.rayleigh", self.rayleigh.unwrap_or(c.rayleigh))?;
            let b = finite("system.b", self.b.unwrap_or(c.b))?;
            StandardParams::new(sigma, rayleigh, b).map_err(|e| semantic("system", e.to_string()))
        };
        if self.n.is_some() && family != "ln" {
            return Err(semantic("system.n", format!("only applies to family ln (family is {family})")));
        }
        let normalized = || -> Result<NormalizedParams, ScenarioError> {
            if any_normalized {
                if any_standard || self.normalize == Some(true) {
                    return Err(semantic(
                        "system",
                        "give either mu/beta/gamma or sigma/rayleigh/b with normalize, not both",
                    ));
                }
                let get = |k: &str, v: Option<f64>| {
                    v.ok_or_else(|| semantic(&format!("system.{k}"), "is required when any of mu/beta/gamma is given"))
                };
                let mu = finite("system.mu", get("mu", self.mu)?)?;
                let beta = finite("system.beta", get("beta", self.beta)?)?;
                let gamma = finite("system.gamma", get("gamma", self.gamma)?)?;
                return NormalizedParams::new(mu, beta, gamma).map_err(|e| semantic("system", e.to_string()));
            }
            if self.normalize == Some(false) {
                return Err(semantic("system.normalize", "false requires explicit mu, beta and gamma"));
            }
            let p = standard()?;
            p.normalize().map_err(|e| {
                semantic("system.rayleigh", format!("{e}; the normalizing transform is only defined for r > 1"))
            })
        };
        let spec = match family {
            "standard" => {
                if any_normalized {
                    return Err(semantic("system", "mu/beta/gamma do not apply to the standard family"));
                }
                if self.normalize == Some(true) {
                    return Err(semantic("system.normalize", "only applies to families l2, l1 and ln"));
                }
                SystemSpec::Standard { params: standard()? }
            }
            "l2" => SystemSpec::L2 { params: normalized()? },
            "l1" => SystemSpec::L1 { params: normalized()? },
            "ln" => {
                let n = self.n.ok_or_else(|| semantic("system.n", "is required for family ln (n >= 1)"))?;
                if n < 1 || n > i64::from(u32::MAX) {
                    return Err(semantic("system.n", format!("must satisfy n >= 1 (got {n})")));
                }
                SystemSpec::Ln { params: normalized()?, n: n as u32 }
            }
            other => {
                return Err(semantic(
                    "system.family",
                    format!("unknown family {other:?}; expected standard, l2, l1 or ln"),
                ))
            }
        };
        Ok(spec)
    }
}

impl TimeDoc {
    pub fn integrator(&self) -> Result<IntegratorConfig, ScenarioError> {
        let d = IntegratorConfig::default();
        let mode = match self.mode.as_deref() {
            None | Some("adaptive") => Mode::Adaptive,
            Some("fixed") => Mode::Fixed,
            Some(other) => {
                return Err(semantic("time.mode", format!("unknown mode {other:?}; expected fixed or adaptive")))
            }
        };
        let cfg = IntegratorConfig {
            mode,
            step: self.step.unwrap_or(d.step),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_step: self.max_step.unwrap_or(d.max_step),
            min_step: self.min_step.unwrap_or(d.min_step),
            sample_interval: self.sample_interval.unwrap_or(d.sample_interval),
        };
        cfg.validate().map_err(|e| {
            let key = match &e {
                zlorenz_core::integrate::ConfigError::NotPositive { key, .. } => format!("time.{key}"),
                zlorenz_core::integrate::ConfigError::StepBounds { .. } => "time.min_step".into(),
                zlorenz_core::integrate::ConfigError::SampleInterval { .. } => "time.sample_interval".into(),
            };
            semantic(&key, e.to_string())
        })?;
        Ok(cfg)
    }

    pub fn span(&self) -> Result<(f64, f64), ScenarioError> {
        let t0 = finite("time.t0", self.t0.unwrap_or(0.0))?;
        let t1 = finite("time.t1", self.t1.ok_or_else(|| semantic("time.t1", "is required"))?)?;
        if t1 <= t0 {
            return Err(semantic("time.t1", format!("must exceed t0 ({t0})")));
        }
        Ok((t0, t1))
    }
}

impl OutputDoc {
    fn resolve(&self, index: usize) -> Result<OutputSpec, ScenarioError> {
        let key = |k: &str| format!("outputs[{index}].{k}");
        let kind = match self.kind.as_str() {
            "csv" => OutputKind::Csv,
            "svg" => OutputKind::Svg,
            other => return Err(semantic(&key("kind"), format!("unknown output kind {other:?}; expected csv or svg"))),
        };
        let projection = self
            .projection
            .as_deref()
            .unwrap_or("x,z")
            .parse::<Projection>()
            .map_err(|e| semantic(&key("projection"), e))?;
        let color_by = match self.color_by.as_deref() {
            None | Some("none") => ColorBy::None,
            Some("sector") => ColorBy::Sector,
            Some(other) => {
                return Err(semantic(&key("color_by"), format!("unknown value {other:?}; expected none or sector")))
            }
        };
        if self.path.as_os_str().is_empty() {
            return Err(semantic(&key("path"), "must not be empty"));
        }
        Ok(OutputSpec { kind, path: self.path.clone(), projection, color_by })
    }
}

impl ScenarioDoc {
    pub fn resolve(&self) -> Result<Scenario, ScenarioError> {
        match self.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(semantic(
                    "schema_version",
                    format!("unsupported version {v}; this build reads {SCHEMA_VERSION}"),
                ))
            }
            None => return Err(semantic("schema_version", format!("is required (current version {SCHEMA_VERSION})"))),
        }
        let system = self.system.resolve()?;
        let initial_state = match self.initial_state {
            Some(s) => {
                let c = CartesianState::from_array(s);
                if !c.is_finite() {
                    return Err(semantic("initial_state", "must be three finite numbers"));
                }
                c
            }
            None => system.default_initial_state(),
        };
        let (t0, t1) = self.time.span()?;
        let integrator = self.time.integrator()?;
        if self.outputs.is_empty() {
            return Err(semantic("outputs", "at least one output is required"));
        }
        let outputs = self.outputs.iter().enumerate().map(|(i, o)| o.resolve(i)).collect::<Result<_, _>>()?;
        Ok(Scenario { system, initial_state, t0, t1, integrator, outputs })
    }
}

impl Scenario {
    /// The scenario with every default written out.
    pub fn to_document(&self) -> ScenarioDoc {
        let mut system = SystemDoc { family: Some(self.system.name().to_string()), ..SystemDoc::default() };
        match self.system {
            SystemSpec::Standard { params } => {
                system.sigma = Some(params.sigma);
                system.rayleigh = Some(params.rayleigh);
                system.b = Some(params.b);
            }
            SystemSpec::L2 { params } | SystemSpec::L1 { params } | SystemSpec::Ln { params, .. } => {
                system.mu = Some(params.mu);
                system.beta = Some(params.beta);
                system.gamma = Some(params.gamma);
                system.normalize = Some(false);
            }
        }
        if let SystemSpec::Ln { n, .. } = self.system {
            system.n = Some(i64::from(n));
        }
        let c = &self.integrator;
        ScenarioDoc {
            schema_version: Some(SCHEMA_VERSION),
            system,
            initial_state: Some(self.initial_state.to_array()),
            time: TimeDoc {
                t0: Some(self.t0),
                t1: Some(self.t1),
                mode: Some(match c.mode {
                    Mode::Fixed => "fixed".into(),
                    Mode::Adaptive => "adaptive".into(),
                }),
                step: Some(c.step),
                rel_tol: Some(c.rel_tol),
                abs_tol: Some(c.abs_tol),
                max_step: Some(c.max_step),
                min_step: Some(c.min_step),
                sample_interval: Some(c.sample_interval),
            },
            outputs: self
                .outputs
                .iter()
                .map(|o| OutputDoc {
                    kind: match o.kind {
                        OutputKind::Csv => "csv".into(),
                        OutputKind::Svg => "svg".into(),
                    },
                    path: o.path.clone(),
                    projection: Some(o.projection.to_string()),
                    color_by: Some(match o.color_by {
                        ColorBy::None => "none".into(),
                        ColorBy::Sector => "sector".into(),
                    }),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("scenario documents serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "system": { "family": "l2" },
        "time": { "t1": 20 },
        "outputs": [ { "kind": "csv", "path": "a.csv" } ]
    }"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.system, SystemSpec::l2());
        assert_eq!(s.t0, 0.0);
        assert_eq!(s.t1, 20.0);
        assert_eq!(s.integrator, IntegratorConfig::default());
        assert_eq!(s.outputs[0].color_by, ColorBy::None);
        assert_eq!(s.initial_state, SystemSpec::l2().default_initial_state());
    }

    #[test]
    fn expanded_document_reparses_to_the_same_scenario() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(parse_scenario(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn unknown_key_is_named() {
        let doc = MINIMAL.replace(r#""kind": "csv""#, r#""kind": "svg", "colour": "none""#);
        let err = parse_scenario(&doc).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        assert!(matches!(err, ScenarioError::Syntax { line: 5, .. }), "{err:?}");
    }

    #[test]
    fn subcritical_rayleigh_cites_constraint() {
        let doc = MINIMAL.replace(r#""family": "l2""#, r#""family": "l2", "rayleigh": 0.5, "normalize": true"#);
        let err = parse_scenario(&doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("system.rayleigh") && msg.contains("r > 1"), "{msg}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_scenario("{\n  \"schema_version\": 1,\n  oops\n}").unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn semantic_checks() {
        let cases = [
            (MINIMAL.replace(r#""family": "l2""#, r#""family": "ln""#), "system.n"),
            (MINIMAL.replace(r#""family": "l2""#, r#""family": "ln", "n": 0"#), "n >= 1"),
            (MINIMAL.replace(r#""family": "l2""#, r#""family": "l5""#), "system.family"),
            (MINIMAL.replace(r#""family": "l2""#, r#""family": "l2", "mu": 1.0"#), "system.beta"),
            (
                MINIMAL
                    .replace(r#""family": "l2""#, r#""family": "l2", "mu": 1, "beta": 0.1, "gamma": 0.5, "sigma": 3"#),
                "not both",
            ),
            (MINIMAL.replace(r#""family": "l2""#, r#""family": "l2", "normalize": false"#), "system.normalize"),
            (MINIMAL.replace(r#""family": "l2""#, r#""family": "standard", "sigma": -1"#), "sigma must be positive"),
            (MINIMAL.replace(r#""t1": 20"#, r#""t1": 20, "t0": 30"#), "time.t1"),
            (MINIMAL.replace(r#""t1": 20"#, r#""t1": 20, "rel_tol": 0"#), "time.rel_tol"),
            (MINIMAL.replace(r#""t1": 20"#, r#""t1": 20, "mode": "euler""#), "time.mode"),
            (MINIMAL.replace(r#""schema_version": 1"#, r#""schema_version": 7"#), "schema_version"),
            (MINIMAL.replace(r#"{ "kind": "csv", "path": "a.csv" }"#, ""), "outputs"),
            (MINIMAL.replace(r#""kind": "csv""#, r#""kind": "png""#), "outputs[0].kind"),
            (MINIMAL.replace(r#""kind": "csv""#, r#""kind": "svg", "projection": "q,z""#), "outputs[0].projection"),
        ];
        for (doc, needle) in cases {
            let err = parse_scenario(&doc).unwrap_err().to_string();
            assert!(err.contains(needle), "{needle}: {err}");
        }
    }

    #[test]
    fn overlay_prefers_top() {
        let base = parse_document(MINIMAL).unwrap();
        let top = ScenarioDoc {
            system: SystemDoc { family: Some("ln".into()), n: Some(3), ..SystemDoc::default() },
            time: TimeDoc { t1: Some(5.0), ..TimeDoc::default() },
            ..ScenarioDoc::default()
        };
        let s = base.overlay(&top).resolve().unwrap();
        assert_eq!(s.system, SystemSpec::ln(3));
        assert_eq!(s.t1, 5.0);
        assert_eq!(s.outputs.len(), 1);
    }
}
