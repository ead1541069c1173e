//! Scene configuration (JSON) and the built-in presets.
//!
//! A scene names the generators of `S = <f_1, ..., f_n>`, the plane window
//! and the truncation budgets. Presets are ordinary scene files compiled into
//! the binary; every parameter the underlying families leave free is fixed
//! there.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{build_shifted_iterate, parse_expression, verify_periodicity, Generator};
use crate::field::{Rectangle, SampleGrid};
use crate::orbit::{word_count, OrbitParams, DEFAULT_DEPTH, DEFAULT_ESCAPE_RADIUS, DEFAULT_MAX_ITER, DEFAULT_WORD_CAP};

pub const DEFAULT_SIZE: usize = 512;
pub const DEFAULT_N_MAX: usize = 3;
pub const PERIOD_SAMPLES: usize = 100;

/// `g = f^k + shift` built from an earlier generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftedIterateSpec {
    /// Name of an earlier generator.
    pub of: String,
    pub k: u32,
    /// Constant expression, e.g. `"2*pi*i/0.3"`.
    #[serde(default)]
    pub shift: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifted_iterate: Option<ShiftedIterateSpec>,
    #[serde(default)]
    pub bounded_type: bool,
    /// Claimed period as a constant expression; verified on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub containment: f64,
    pub forward_invariance: f64,
    pub backward_invariance: f64,
    pub equal_escaping_jaccard: f64,
    pub emptiness: f64,
    pub tower_containment: f64,
    pub tower_jaccard: f64,
    pub thinness_ceiling: f64,
    pub period_tolerance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            containment: 0.0,
            forward_invariance: 0.01,
            backward_invariance: 0.01,
            equal_escaping_jaccard: 0.85,
            emptiness: 0.01,
            tower_containment: 0.01,
            tower_jaccard: 0.9,
            thinness_ceiling: 0.5,
            period_tolerance: 1e-9,
        }
    }
}

/// Which statements `verify` treats as claims (pass/fail) for this scene.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Claims {
    /// The semigroup is abelian: backward invariance becomes pass/fail.
    pub abelian: bool,
    /// `I(S)` is empty.
    pub empty: bool,
    /// Two generators with equal escaping sets, by index.
    pub equal_escaping: Option<[usize; 2]>,
    /// Report the tower relations `E ⊆ F` and `F = I(S)` as claims.
    pub towers: bool,
    /// Escaping pixels should have no fat interior (bounded type).
    pub thin: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub generators: Vec<GeneratorSpec>,
    pub region: Rectangle<f64>,
    #[serde(default = "default_size")]
    pub width: usize,
    #[serde(default = "default_size")]
    pub height: usize,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_radius")]
    pub escape_radius: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: u32,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub claims: Claims,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_size() -> usize {
    DEFAULT_SIZE
}
fn default_depth() -> usize {
    DEFAULT_DEPTH
}
fn default_radius() -> f64 {
    DEFAULT_ESCAPE_RADIUS
}
fn default_max_iter() -> u32 {
    DEFAULT_MAX_ITER
}
fn default_n_max() -> usize {
    DEFAULT_N_MAX
}
fn default_output_dir() -> String {
    "out".into()
}

fn parse_constant(text: &str, field: &str) -> Result<Complex<f64>> {
    let e = parse_expression::<f64>(text).map_err(|e| Error::validation(field, e.to_string()))?;
    e.as_const()
        .ok_or_else(|| Error::validation(field, format!("`{text}` is not a constant expression")))
}

/// A validated scene with its generators built.
#[derive(Clone, Debug)]
pub struct Scene {
    pub config: SceneConfig,
    pub generators: Vec<Generator<f64>>,
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SceneConfig = serde_json::from_str(text).map_err(|e| Error::ConfigParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    pub fn grid(&self) -> Result<SampleGrid<f64>> {
        let region = Rectangle::new(self.region.x_min, self.region.x_max, self.region.y_min, self.region.y_max)
            .map_err(|e| Error::validation("region", e.to_string()))?;
        SampleGrid::new(region, self.width, self.height)
            .map_err(|e| Error::validation("width/height", e.to_string()))
    }

    pub fn orbit_params(&self) -> Result<OrbitParams<f64>> {
        OrbitParams::new(self.escape_radius, self.max_iter)
            .map_err(|e| Error::validation("escape_radius/max_iter", e.to_string()))
    }

    /// Validates every field and builds the generators; claimed periods must
    /// pass the periodicity test.
    pub fn build(&self) -> Result<Scene> {
        if self.generators.is_empty() {
            return Err(Error::validation("generators", "at least one generator is required"));
        }
        self.grid()?;
        self.orbit_params()?;
        if self.depth == 0 {
            return Err(Error::validation("depth", "must be at least 1"));
        }
        let words = word_count(self.generators.len(), self.depth);
        if words > DEFAULT_WORD_CAP as u128 {
            return Err(Error::validation(
                "depth",
                format!("{words} words exceed the cap of {DEFAULT_WORD_CAP}"),
            ));
        }
        let mut gens: Vec<Generator<f64>> = Vec::with_capacity(self.generators.len());
        for (n, spec) in self.generators.iter().enumerate() {
            let field = |f: &str| format!("generators[{n}].{f}");
            if gens.iter().any(|g| g.name == spec.name) {
                return Err(Error::validation(field("name"), format!("duplicate name `{}`", spec.name)));
            }
            let g = match (&spec.expr, &spec.shifted_iterate) {
                (Some(text), None) => Generator::parse(spec.name.clone(), text)
                    .map_err(|e| Error::validation(field("expr"), e.to_string()))?,
                (None, Some(si)) => {
                    let base = gens.iter().find(|g| g.name == si.of).ok_or_else(|| {
                        Error::validation(field("shifted_iterate.of"), format!("no earlier generator `{}`", si.of))
                    })?;
                    let shift = match &si.shift {
                        Some(t) => parse_constant(t, &field("shifted_iterate.shift"))?,
                        None => Complex::new(0.0, 0.0),
                    };
                    let mut g = build_shifted_iterate(base, si.k, shift)
                        .map_err(|e| Error::validation(field("shifted_iterate.k"), e.to_string()))?;
                    g.name = spec.name.clone();
                    g
                }
                _ => {
                    return Err(Error::validation(
                        field("expr"),
                        "exactly one of `expr` and `shifted_iterate` is required",
                    ))
                }
            };
            let period = match &spec.period {
                Some(t) => {
                    let p = parse_constant(t, &field("period"))?;
                    let report = verify_periodicity(&g, p, PERIOD_SAMPLES, self.thresholds.period_tolerance)
                        .map_err(|e| Error::validation(field("period"), e.to_string()))?;
                    if !report.passed {
                        return Err(Error::validation(
                            field("period"),
                            format!("`{t}` is not a period (max deviation {:e})", report.max_deviation),
                        ));
                    }
                    Some(p)
                }
                None => None,
            };
            gens.push(g.with_bounded_type(spec.bounded_type).with_period(period));
        }
        if let Some([a, b]) = self.claims.equal_escaping {
            if a >= gens.len() || b >= gens.len() {
                return Err(Error::validation("claims.equal_escaping", "generator index out of range"));
            }
        }
        Ok(Scene { config: self.clone(), generators: gens })
    }
}

pub fn load_config(path: &Path) -> Result<SceneConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SceneConfig::from_json(&text)
}

const PRESETS: &[(&str, &str)] = &[
    ("exp-single", include_str!("../presets/exp-single.json")),
    ("exp-shift-pair", include_str!("../presets/exp-shift-pair.json")),
    ("sine-shift-pair", include_str!("../presets/sine-shift-pair.json")),
    ("abelian-sine", include_str!("../presets/abelian-sine.json")),
    ("empty-pair", include_str!("../presets/empty-pair.json")),
    ("kumar-empty-family", include_str!("../presets/kumar-empty-family.json")),
    ("exp-hairs", include_str!("../presets/exp-hairs.json")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset(name: &str) -> Result<SceneConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    SceneConfig::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = SceneConfig::from_json(
            r#"{"name": "m", "generators": [{"name": "f", "expr": "exp(z)"}],
                "region": {"x_min": -1, "x_max": 1, "y_min": -1, "y_max": 1}}"#,
        )
        .unwrap();
        assert_eq!((cfg.width, cfg.height, cfg.depth, cfg.n_max), (512, 512, 4, 3));
        assert_eq!((cfg.escape_radius, cfg.max_iter), (1e10, 100));
        assert_eq!(cfg.thresholds, Thresholds::default());
        assert!(!cfg.generators[0].bounded_type);
    }

    #[test]
    fn bad_expression_names_the_field() {
        let err = SceneConfig::from_json(
            r#"{"name": "m", "generators": [{"name": "f", "expr": "exp(z"}],
                "region": {"x_min": -1, "x_max": 1, "y_min": -1, "y_max": 1}}"#,
        )
        .unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "generators[0].expr"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_errors_have_locations() {
        let err = SceneConfig::from_json("{\n  \"name\": 3\n}").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn false_period_is_rejected() {
        let err = SceneConfig::from_json(
            r#"{"name": "m", "generators": [{"name": "f", "expr": "exp(z)", "period": "1"}],
                "region": {"x_min": -1, "x_max": 1, "y_min": -1, "y_max": 1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "generators[0].period"));
    }

    #[test]
    fn other_validation_failures() {
        let base = |extra: &str| {
            format!(
                r#"{{"name": "m", "generators": [{{"name": "f", "expr": "exp(z)"}}],
                "region": {{"x_min": -1, "x_max": 1, "y_min": -1, "y_max": 1}} {extra}}}"#
            )
        };
        assert!(SceneConfig::from_json(&base(r#", "depth": 0"#)).is_err());
        assert!(SceneConfig::from_json(&base(r#", "width": 0"#)).is_err());
        assert!(SceneConfig::from_json(&base(r#", "escape_radius": 0.5"#)).is_err());
        assert!(SceneConfig::from_json(&base(r#", "depth": 20000"#)).is_err());
        assert!(SceneConfig::from_json(&base(r#", "bogus": 1"#)).is_err());
        assert!(SceneConfig::from_json(&base(r#", "claims": {"equal_escaping": [0, 3]}"#)).is_err());
    }

    #[test]
    fn all_presets_load() {
        for name in preset_names() {
            let cfg = preset(name).unwrap();
            assert_eq!(cfg.name, name);
            cfg.build().unwrap();
        }
        assert!(matches!(preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn empty_pair_is_exp_and_its_reflection() {
        let scene = preset("empty-pair").unwrap().build().unwrap();
        let exprs: Vec<String> = scene.generators.iter().map(|g| g.expr.to_string()).collect();
        assert_eq!(exprs, ["exp(z)", "exp((-z))"]);
    }

    #[test]
    fn shifted_iterate_generators_are_built() {
        let scene = preset("exp-shift-pair").unwrap().build().unwrap();
        let f = &scene.generators[0];
        let g = &scene.generators[1];
        let p = f.period.unwrap();
        assert!((p.im - 2.0 * std::f64::consts::PI / 0.3).abs() < 1e-12);
        let z = Complex::new(0.3, 0.9);
        let ff = f.eval(f.eval(z).unwrap().finite().unwrap()).unwrap().finite().unwrap();
        assert_eq!(g.eval(z).unwrap().finite().unwrap(), ff + p);
    }
}
