//! Symbols of weighted translation semigroups and their finite-difference
//! classification.
//!
//! A symbol is a positive function on the half-line. Complete monotonicity
//! and complete alternation quantify over every difference step and order,
//! so [`classify_symbol`] tests a finite set of both and records that scope in
//! the verdict.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integral_ratio, GridSpec};

pub const DEFAULT_MAX_ORDER: usize = 8;
/// Relative to `max |phi|` over the tested window.
pub const DEFAULT_SYMBOL_TOL: f64 = 1e-9;
/// Difference steps as multiples of the grid step.
pub const DEFAULT_STEP_MULTIPLES: [usize; 4] = [1, 2, 4, 8];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymbolKind {
    /// `c`
    Constant { c: f64 },
    /// `a x + b`
    Affine { a: f64, b: f64 },
    /// `1 / (x + 1)`
    ReciprocalAffine,
    /// `(x + lambda) / (x + 1)`
    Moebius { lambda: f64 },
    /// `log(x + 2)`
    LogShift,
    /// `exp(beta x)`
    Exp { beta: f64 },
    /// `2 - exp(-x)`
    TwoMinusExp,
    /// `sqrt(x + 1)`
    SqrtAffine,
    /// Samples `samples[j] = phi(j h)`.
    Tabulated { h: f64, samples: Vec<f64> },
}

fn default_floor() -> f64 {
    f64::MIN_POSITIVE
}

fn is_default_floor(v: &f64) -> bool {
    *v == f64::MIN_POSITIVE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    #[serde(flatten)]
    pub kind: SymbolKind,
    /// Values at or below the floor are rejected.
    #[serde(default = "default_floor", skip_serializing_if = "is_default_floor")]
    pub floor: f64,
}

impl From<SymbolKind> for SymbolSpec {
    fn from(kind: SymbolKind) -> Self {
        SymbolSpec { kind, floor: default_floor() }
    }
}

impl SymbolSpec {
    pub fn constant(c: f64) -> Self {
        SymbolKind::Constant { c }.into()
    }
    pub fn affine(a: f64, b: f64) -> Self {
        SymbolKind::Affine { a, b }.into()
    }
    pub fn reciprocal_affine() -> Self {
        SymbolKind::ReciprocalAffine.into()
    }
    pub fn moebius(lambda: f64) -> Self {
        SymbolKind::Moebius { lambda }.into()
    }
    pub fn log_shift() -> Self {
        SymbolKind::LogShift.into()
    }
    pub fn exp(beta: f64) -> Self {
        SymbolKind::Exp { beta }.into()
    }
    pub fn two_minus_exp() -> Self {
        SymbolKind::TwoMinusExp.into()
    }
    pub fn sqrt_affine() -> Self {
        SymbolKind::SqrtAffine.into()
    }
    pub fn tabulated(grid: &GridSpec, samples: Vec<f64>) -> Self {
        SymbolKind::Tabulated { h: grid.h(), samples }.into()
    }

    /// Short human-readable formula.
    pub fn label(&self) -> String {
        match &self.kind {
            SymbolKind::Constant { c } => format!("{c}"),
            SymbolKind::Affine { a, b } => format!("{a}x+{b}"),
            SymbolKind::ReciprocalAffine => "1/(x+1)".into(),
            SymbolKind::Moebius { lambda } => format!("(x+{lambda})/(x+1)"),
            SymbolKind::LogShift => "log(x+2)".into(),
            SymbolKind::Exp { beta } => format!("exp({beta}x)"),
            SymbolKind::TwoMinusExp => "2-exp(-x)".into(),
            SymbolKind::SqrtAffine => "sqrt(x+1)".into(),
            SymbolKind::Tabulated { samples, .. } => format!("tabulated[{}]", samples.len()),
        }
    }

    /// `phi(x)`; exact for the closed-form kinds.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::OutOfDomain { x });
        }
        let value = match &self.kind {
            SymbolKind::Constant { c } => *c,
            SymbolKind::Affine { a, b } => a * x + b,
            SymbolKind::ReciprocalAffine => 1.0 / (x + 1.0),
            SymbolKind::Moebius { lambda } => (x + lambda) / (x + 1.0),
            SymbolKind::LogShift => (x + 2.0).ln(),
            SymbolKind::Exp { beta } => (beta * x).exp(),
            SymbolKind::TwoMinusExp => 2.0 - (-x).exp(),
            SymbolKind::SqrtAffine => (x + 1.0).sqrt(),
            SymbolKind::Tabulated { h, samples } => {
                let j = integral_ratio(x, *h).filter(|&j| j < samples.len());
                *j.map(|j| &samples[j]).ok_or(Error::OutOfDomain { x })?
            }
        };
        self.check_value(x, value)
    }

    fn check_value(&self, x: f64, value: f64) -> Result<f64> {
        if value.is_finite() && value > self.floor {
            Ok(value)
        } else {
            Err(Error::NonPositiveSymbol { x, value, floor: self.floor })
        }
    }

    /// `phi(x_j)` for every grid point. Tabulated symbols must be sampled on
    /// exactly this grid.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        if let SymbolKind::Tabulated { h, samples } = &self.kind {
            if (h - grid.h()).abs() > 1e-12 * grid.h() || samples.len() != grid.n() {
                return Err(Error::GridMismatch(format!(
                    "tabulated symbol has {} samples at h = {h}, grid has {} at h = {}",
                    samples.len(),
                    grid.n(),
                    grid.h()
                )));
            }
        }
        grid.points().map(|x| self.eval(x)).collect()
    }

    /// Whether the symbol is constant by construction (not by sampling).
    pub fn is_constant_kind(&self) -> bool {
        match &self.kind {
            SymbolKind::Constant { .. } => true,
            SymbolKind::Affine { a, .. } => *a == 0.0,
            SymbolKind::Moebius { lambda } => *lambda == 1.0,
            SymbolKind::Exp { beta } => *beta == 0.0,
            _ => false,
        }
    }

    /// Exact `sqrt(phi(x) / phi(x - t))` when it does not depend on `x`.
    pub fn constant_weight(&self, t: f64) -> Option<f64> {
        if self.is_constant_kind() {
            return Some(1.0);
        }
        match &self.kind {
            SymbolKind::Exp { beta } => Some((beta * t / 2.0).exp()),
            _ => None,
        }
    }
}

/// The reference symbols, with readable names.
pub fn catalog() -> Vec<(&'static str, SymbolSpec)> {
    vec![
        ("constant", SymbolSpec::constant(2.0)),
        ("x+1", SymbolSpec::affine(1.0, 1.0)),
        ("1/(x+1)", SymbolSpec::reciprocal_affine()),
        ("(x+0.5)/(x+1)", SymbolSpec::moebius(0.5)),
        ("(x+2)/(x+1)", SymbolSpec::moebius(2.0)),
        ("log(x+2)", SymbolSpec::log_shift()),
        ("exp(-x)", SymbolSpec::exp(-1.0)),
        ("exp(x)", SymbolSpec::exp(1.0)),
        ("2-exp(-x)", SymbolSpec::two_minus_exp()),
        ("sqrt(x+1)", SymbolSpec::sqrt_affine()),
    ]
}

/// Iterated forward differences `Δ_s^n φ` on the grid points where all
/// orders up to `max_order` are available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceProfile {
    pub step: f64,
    pub step_points: usize,
    pub max_order: usize,
    /// `table[n][j] = Δ_s^n φ(x_j)` for `j` in the window.
    pub table: Vec<Vec<f64>>,
}

impl DifferenceProfile {
    pub fn from_samples(samples: &[f64], h: f64, step_points: usize, max_order: usize) -> Result<Self> {
        if step_points == 0 {
            return Err(Error::InvalidArgument("difference step must be positive".into()));
        }
        let reach = step_points * max_order;
        if reach >= samples.len() {
            return Err(Error::WindowTooSmall(format!(
                "order {max_order} at step {step_points} needs more than {reach} points, have {}",
                samples.len()
            )));
        }
        let window = samples.len() - reach;
        let mut table = Vec::with_capacity(max_order + 1);
        let mut row = samples.to_vec();
        for _ in 0..=max_order {
            table.push(row[..window].to_vec());
            row = (0..row.len().saturating_sub(step_points))
                .map(|j| row[j + step_points] - row[j])
                .collect();
        }
        Ok(DifferenceProfile { step: step_points as f64 * h, step_points, max_order, table })
    }

    pub fn window_len(&self) -> usize {
        self.table[0].len()
    }

    pub fn order(&self, n: usize) -> &[f64] {
        &self.table[n]
    }
}

pub fn difference_profile(spec: &SymbolSpec, grid: &GridSpec, step: f64, max_order: usize) -> Result<DifferenceProfile> {
    let k = integral_ratio(step, grid.h())
        .filter(|&k| k >= 1)
        .ok_or(Error::NonGridTranslation { t: step, h: grid.h() })?;
    DifferenceProfile::from_samples(&spec.sample(grid)?, grid.h(), k, max_order)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolClassVerdict {
    pub completely_monotone: bool,
    pub completely_alternating: bool,
    pub concave: bool,
    pub constant: bool,
    /// `min (-1)^n Δ^n φ` over tested orders `0..=max_order`, steps and points.
    pub monotone_margin: f64,
    /// `min (-1)^(n-1) Δ^n φ` over orders `1..=max_order`.
    pub alternating_margin: f64,
    /// `max Δ^2 φ`.
    pub max_second_difference: f64,
    pub max_order: usize,
    pub steps: Vec<f64>,
    pub tol: f64,
    pub abs_tol: f64,
}

/// Finite-difference verdicts: completely monotone needs
/// `(-1)^n Δ_s^n φ >= -tol`, completely alternating needs
/// `(-1)^(n-1) Δ_s^n φ >= -tol` for `n >= 1`, concave needs
/// `Δ_s^2 φ <= tol`. `tol` is taken relative to `max |φ|` on the window.
pub fn classify_symbol(
    spec: &SymbolSpec,
    grid: &GridSpec,
    max_order: usize,
    steps: &[f64],
    tol: f64,
) -> Result<SymbolClassVerdict> {
    if steps.is_empty() {
        return Err(Error::InvalidArgument("step set must be nonempty".into()));
    }
    let max_order = max_order.max(2);
    let profiles = steps
        .iter()
        .map(|&s| difference_profile(spec, grid, s, max_order))
        .collect::<Result<Vec<_>>>()?;
    let scale = profiles
        .iter()
        .flat_map(|p| p.order(0).iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let abs_tol = tol * scale;

    let mut monotone_margin = f64::INFINITY;
    let mut alternating_margin = f64::INFINITY;
    let mut max_second = f64::NEG_INFINITY;
    let mut max_first_abs = 0.0f64;
    for p in &profiles {
        for n in 0..=max_order {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for &v in p.order(n) {
                monotone_margin = monotone_margin.min(sign * v);
                if n >= 1 {
                    alternating_margin = alternating_margin.min(-sign * v);
                }
                if n == 1 {
                    max_first_abs = max_first_abs.max(v.abs());
                }
                if n == 2 {
                    max_second = max_second.max(v);
                }
            }
        }
    }
    Ok(SymbolClassVerdict {
        completely_monotone: monotone_margin >= -abs_tol,
        completely_alternating: alternating_margin >= -abs_tol,
        concave: max_second <= abs_tol,
        constant: max_first_abs <= abs_tol,
        monotone_margin,
        alternating_margin,
        max_second_difference: max_second,
        max_order,
        steps: steps.to_vec(),
        tol,
        abs_tol,
    })
}

/// Default steps `{h, 2h, 4h, 8h}`.
pub fn default_steps(grid: &GridSpec) -> Vec<f64> {
    DEFAULT_STEP_MULTIPLES.iter().map(|&k| k as f64 * grid.h()).collect()
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> GridSpec {
        GridSpec::from_extent(0.25, 16.0).unwrap()
    }

    fn kind() -> impl Strategy<Value = SymbolSpec> {
        prop_oneof![
            (0.1..10.0f64).prop_map(SymbolSpec::constant),
            (0.0..3.0f64, 0.1..3.0f64).prop_map(|(a, b)| SymbolSpec::affine(a, b)),
            (0.05..5.0f64).prop_map(SymbolSpec::moebius),
            (-1.0..1.0f64).prop_map(SymbolSpec::exp),
            Just(SymbolSpec::reciprocal_affine()),
            Just(SymbolSpec::log_shift()),
            Just(SymbolSpec::two_minus_exp()),
            Just(SymbolSpec::sqrt_affine()),
        ]
    }

    proptest! {
        #[test]
        fn serde_round_trip(s in kind()) {
            let text = serde_json::to_string(&s).unwrap();
            prop_assert_eq!(serde_json::from_str::<SymbolSpec>(&text).unwrap(), s);
        }

        #[test]
        fn exp_differences_closed_form(beta in -1.0..1.0f64, k in 1usize..5, order in 1usize..5) {
            let g = grid();
            let p = difference_profile(&SymbolSpec::exp(beta), &g, k as f64 * g.h(), order).unwrap();
            let r = (beta * k as f64 * g.h()).exp() - 1.0;
            for (j, &v) in p.order(order).iter().enumerate() {
                let expect = (beta * g.x(j)).exp() * r.powi(order as i32);
                prop_assert!((v - expect).abs() <= 1e-12 * (beta * g.x(j)).exp().max(1.0));
            }
        }

        #[test]
        fn positive_mixtures_stay_completely_monotone(a in 0.0..3.0f64, b in 0.0..3.0f64, beta in 0.05..2.0f64) {
            let g = grid();
            let samples: Vec<f64> = g.points().map(|x| 0.1 + a * (-beta * x).exp() + b / (x + 1.0)).collect();
            let v = classify_symbol(&SymbolSpec::tabulated(&g, samples), &g, 6, &default_steps(&g), DEFAULT_SYMBOL_TOL).unwrap();
            prop_assert!(v.completely_monotone);
        }

        #[test]
        fn moebius_side_of_one(lambda in 0.05..4.0f64) {
            prop_assume!((lambda - 1.0).abs() > 0.05);
            let g = grid();
            let v = classify_symbol(&SymbolSpec::moebius(lambda), &g, 6, &default_steps(&g), DEFAULT_SYMBOL_TOL).unwrap();
            prop_assert_eq!(v.completely_monotone, lambda > 1.0);
            prop_assert_eq!(v.completely_alternating, lambda < 1.0);
        }
    }
}
