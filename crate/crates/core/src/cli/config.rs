//! JSON analysis configuration.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::symbol::SymbolSpec;
use crate::tuple::TranslationTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Classify,
    Duals,
    Kernel,
    Spectrum,
    VerifyAll,
}

impl Analysis {
    pub const ALL: [Analysis; 5] = [Analysis::Classify, Analysis::Duals, Analysis::Kernel, Analysis::Spectrum, Analysis::VerifyAll];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Classify => "classify",
            Analysis::Duals => "duals",
            Analysis::Kernel => "kernel",
            Analysis::Spectrum => "spectrum",
            Analysis::VerifyAll => "verify-all",
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
}

fn default_h() -> f64 {
    0.25
}

fn default_x_max() -> f64 {
    64.0
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { h: default_h(), x_max: default_x_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub symbols: Vec<SymbolSpec>,
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    /// Highest defect / difference order.
    #[serde(rename = "maxOrder", default = "d_max_order")]
    pub max_order: usize,
    /// Truncation bound `N` of the kernel series.
    #[serde(rename = "latticeN", default = "d_lattice_n")]
    pub lattice_n: usize,
    #[serde(default = "d_kmax")]
    pub kmax: usize,
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_psd_samples")]
    pub psd_samples: usize,
    #[serde(default = "d_theta_list")]
    pub theta_list: Vec<f64>,
    /// Lattice radius of the orthogonality and analyticity checks.
    #[serde(rename = "latticeRadius", default = "d_lattice_radius")]
    pub lattice_radius: usize,
    /// Lattice radius of the intertwining and diagonal checks.
    #[serde(rename = "modelRadius", default = "d_model_radius")]
    pub model_radius: usize,
    /// Componentwise bound of `alpha` in the kernel and spherical conditions.
    #[serde(rename = "alphaMax", default = "d_alpha_max")]
    pub alpha_max: usize,
    /// Real points `z = lambda = (rho, ..., rho)` of the kernel table.
    #[serde(default = "d_kernel_rho")]
    pub kernel_rho: Vec<f64>,
    /// Random samples lie in `D_{fraction r}`.
    #[serde(default = "d_psd_fraction")]
    pub psd_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

fn d_max_order() -> usize {
    8
}
fn d_lattice_n() -> usize {
    16
}
fn d_kmax() -> usize {
    32
}
fn d_tol() -> f64 {
    1e-10
}
fn d_psd_samples() -> usize {
    8
}
fn d_theta_list() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, std::f64::consts::PI, 2.5]
}
fn d_lattice_radius() -> usize {
    3
}
fn d_model_radius() -> usize {
    4
}
fn d_alpha_max() -> usize {
    3
}
fn d_kernel_rho() -> Vec<f64> {
    vec![0.0, 0.25, 0.5]
}
fn d_psd_fraction() -> f64 {
    0.9
}

impl Default for Parameters {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all parameters have defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<TupleConfig>,
    /// Several tuples sharing the grid and parameters.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tuples: Vec<TupleConfig>,
    /// Absent means every analysis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyses: Option<Vec<Analysis>>,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub output: OutputConfig,
}

fn validation(field: impl Into<String>, message: impl fmt::Display) -> Error {
    Error::Validation { field: field.into(), message: message.to_string() }
}

/// Syntax errors become [`Error::Parse`] with their position; schema and
/// value errors become [`Error::Validation`].
pub fn parse_config(text: &str) -> Result<AnalysisConfig> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let config: AnalysisConfig = serde_json::from_value(value).map_err(|e| validation("config", e))?;
    config.validate()?;
    Ok(config)
}

impl AnalysisConfig {
    pub fn grid_spec(&self) -> Result<GridSpec> {
        let GridConfig { h, x_max } = self.grid;
        if !(h.is_finite() && h > 0.0) {
            return Err(validation("grid.h", format!("must be positive, got {h}")));
        }
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(validation("grid.x_max", format!("must be positive, got {x_max}")));
        }
        GridSpec::from_extent(h, x_max).map_err(|e| validation("grid.x_max", e))
    }

    /// `tuple` followed by `tuples`.
    pub fn all_tuples(&self) -> Vec<&TupleConfig> {
        self.tuple.iter().chain(&self.tuples).collect()
    }

    pub fn analyses(&self) -> Vec<Analysis> {
        self.analyses.clone().unwrap_or_else(|| Analysis::ALL.to_vec())
    }

    /// Display name of the `i`-th tuple.
    pub fn tuple_name(&self, i: usize) -> String {
        let tc = self.all_tuples()[i];
        tc.name.clone().unwrap_or_else(|| {
            let labels: Vec<String> = tc.symbols.iter().map(SymbolSpec::label).collect();
            format!("{i}: {}", labels.join(" | "))
        })
    }

    pub fn build_tuple(&self, i: usize) -> Result<TranslationTuple> {
        let grid = self.grid_spec()?;
        let tc = self.all_tuples()[i];
        let field = if self.tuple.is_some() && i == 0 { "tuple".to_string() } else { format!("tuples[{}]", i - usize::from(self.tuple.is_some())) };
        if tc.symbols.is_empty() || tc.symbols.len() != tc.t.len() {
            return Err(validation(
                field,
                format!("need one translation per symbol, got {} symbols and {} translations", tc.symbols.len(), tc.t.len()),
            ));
        }
        for (j, &t) in tc.t.iter().enumerate() {
            grid.steps(t).map_err(|e| validation(format!("{field}.t[{j}]"), e))?;
        }
        TranslationTuple::new(tc.symbols.clone(), tc.t.clone(), grid).map_err(|e| validation(field, e))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid_spec()?;
        let p = &self.parameters;
        if p.max_order == 0 {
            return Err(validation("parameters.maxOrder", "must be at least 1"));
        }
        if p.kmax < 4 {
            return Err(validation("parameters.kmax", "must be at least 4"));
        }
        if !(p.tol.is_finite() && p.tol > 0.0) {
            return Err(validation("parameters.tol", format!("must be positive, got {}", p.tol)));
        }
        if !(p.psd_fraction > 0.0 && p.psd_fraction < 1.0) {
            return Err(validation("parameters.psd_fraction", "must lie in (0, 1)"));
        }
        if p.model_radius == 0 {
            return Err(validation("parameters.modelRadius", "must be at least 1"));
        }
        if p.theta_list.iter().chain(&p.kernel_rho).any(|v| !v.is_finite()) {
            return Err(validation("parameters", "theta_list and kernel_rho must be finite"));
        }
        if self.all_tuples().is_empty() && !self.analyses().is_empty() {
            return Err(validation("tuple", "analyses were requested but no tuple is given"));
        }
        for i in 0..self.all_tuples().len() {
            self.build_tuple(i)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = parse_config(r#"{"grid":{"h":0.5,"x_max":64},"tuple":{"symbols":[{"kind":"constant","c":1}],"t":[1.0]}}"#)
            .unwrap();
        assert_eq!(c.grid_spec().unwrap().n(), 128);
        assert_eq!(c.parameters, Parameters::default());
        assert_eq!(c.analyses().len(), 5);
    }

    #[test]
    fn non_grid_translation() {
        let e = parse_config(r#"{"grid":{"h":0.5,"x_max":64},"tuple":{"symbols":[{"kind":"constant","c":1}],"t":[0.3]}}"#)
            .unwrap_err();
        match e {
            Error::Validation { field, message } => {
                assert_eq!(field, "tuple.t[0]");
                assert!(message.contains("multiple"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pair_round_trip() {
        let text = r#"{"tuple":{"symbols":[{"kind":"moebius","lambda":0.5},{"kind":"log-shift"}],"t":[1.0,0.5]},
                      "analyses":["classify","verify-all"],"parameters":{"maxOrder":4}}"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.build_tuple(0).unwrap().d(), 2);
        let again = parse_config(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn errors_are_classified() {
        match parse_config("{\n  \"grid\": {\"h\": 0.25,}\n}").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let unknown = parse_config(r#"{"tuple":{"symbols":[{"kind":"gamma"}],"t":[1.0]}}"#).unwrap_err();
        assert!(matches!(unknown, Error::Validation { .. }));
        let h = parse_config(r#"{"grid":{"h":-1,"x_max":64}}"#).unwrap_err();
        assert!(matches!(h, Error::Validation { ref field, .. } if field == "grid.h"));
        let missing = parse_config(r#"{"analyses":["classify"]}"#).unwrap_err();
        assert!(matches!(missing, Error::Validation { .. }));
        assert!(parse_config(r#"{"analyses":[]}"#).is_ok());
    }
}
