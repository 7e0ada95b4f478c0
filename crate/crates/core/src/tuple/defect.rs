//! Defect functions `B_n(Q_t)(I)` and `B_p(Q_s)(I)`.
//!
//! `Q_i(X) = S_i^* X S_i` maps multiplication by `m` to multiplication by
//! `w_i(x + t_i)^2 m(x + t_i)`, so every defect is a multiplication operator
//! computed in `O(n)` per factor. Each factor reads `t_i` further right, which
//! shrinks the window on which the result is free of boundary truncation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TranslationTuple;
use crate::error::{Error, Result};
use crate::grid::{OperatorExpr, SafeWindow};
use crate::lattice::{budget_lattice, MultiIndex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectOrder {
    Toral(MultiIndex),
    Spherical(usize),
}

/// Multiplier of a defect operator on its safe window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectFunction {
    pub order: DefectOrder,
    pub values: Vec<f64>,
    /// Same binomial sum with every sign positive; the scale for tolerances.
    pub mass: Vec<f64>,
    pub window: SafeWindow,
}

impl DefectFunction {
    /// `(min, max)` of `values / mass` over the window.
    pub fn relative_range(&self) -> (f64, f64) {
        self.values.iter().zip(&self.mass).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, m)| {
            let r = v / m.max(f64::MIN_POSITIVE);
            (lo.min(r), hi.max(r))
        })
    }
}

/// Applies `(I - Q_i)` (`sign = -1`) or `(I + Q_i)` (`sign = 1`) to the
/// first `len` values of `m`; returns the new valid length.
fn apply_factor(m: &mut Vec<f64>, len: usize, w: &[f64], k: usize, sign: f64) -> usize {
    let new_len = len.saturating_sub(k);
    for j in 0..new_len {
        m[j] += sign * w[j + k] * w[j + k] * m[j + k];
    }
    m.truncate(new_len);
    new_len
}

fn check_window(len: usize, what: &str) -> Result<()> {
    if len == 0 {
        Err(Error::WindowTooSmall(format!("{what} leaves no untruncated grid points")))
    } else {
        Ok(())
    }
}

/// `B_n(Q_t)(I) = prod_i (I - Q_i)^{n_i} (I)` as a multiplier.
pub fn toral_defect(tuple: &TranslationTuple, n: &MultiIndex) -> Result<DefectFunction> {
    tuple.require_commuting()?;
    if n.dim() != tuple.d() {
        return Err(Error::InvalidArgument(format!("order {n} has wrong dimension for d = {}", tuple.d())));
    }
    let size = tuple.grid().n();
    let (mut values, mut mass) = (vec![1.0; size], vec![1.0; size]);
    let mut len = size;
    for (i, &ni) in n.components().iter().enumerate() {
        let (w, k) = (&tuple.weights()[i], tuple.steps()[i]);
        for _ in 0..ni {
            apply_factor(&mut values, len, w, k, -1.0);
            len = apply_factor(&mut mass, len, w, k, 1.0);
        }
    }
    check_window(len, &format!("toral order {n}"))?;
    Ok(DefectFunction {
        order: DefectOrder::Toral(n.clone()),
        values,
        mass,
        window: SafeWindow::new(tuple.grid(), len),
    })
}

/// `B_p(Q_s)(I) = (I - Q_s)^p (I)` with `Q_s = sum_i Q_i`.
pub fn spherical_defect(tuple: &TranslationTuple, p: usize) -> Result<DefectFunction> {
    tuple.require_commuting()?;
    let size = tuple.grid().n();
    let reach = tuple.max_steps();
    let (mut values, mut mass) = (vec![1.0; size], vec![1.0; size]);
    let mut len = size;
    for _ in 0..p {
        let new_len = len.saturating_sub(reach);
        let q = |m: &[f64], j: usize| -> f64 {
            tuple.weights().iter().zip(tuple.steps()).map(|(w, &k)| w[j + k] * w[j + k] * m[j + k]).sum()
        };
        values = (0..new_len).map(|j| values[j] - q(&values, j)).collect();
        mass = (0..new_len).map(|j| mass[j] + q(&mass, j)).collect();
        len = new_len;
    }
    check_window(len, &format!("spherical order {p}"))?;
    Ok(DefectFunction {
        order: DefectOrder::Spherical(p),
        values,
        mass,
        window: SafeWindow::new(tuple.grid(), len),
    })
}

/// `X -> S^* X S` in the shift algebra.
fn q_map(tuple: &TranslationTuple, i: usize, x: &OperatorExpr) -> Result<OperatorExpr> {
    tuple.adjoint(i).compose(x)?.compose(tuple.op(i))
}

/// `B_n(Q_t)(I)` built by operator composition (no multiplier shortcut).
pub fn toral_defect_operator(tuple: &TranslationTuple, n: &MultiIndex) -> Result<OperatorExpr> {
    let mut acc = OperatorExpr::identity(*tuple.grid());
    for (i, &ni) in n.components().iter().enumerate() {
        for _ in 0..ni {
            acc = acc.sub(&q_map(tuple, i, &acc)?)?;
        }
    }
    Ok(acc)
}

/// `B_p(Q_s)(I)` by operator composition.
pub fn spherical_defect_operator(tuple: &TranslationTuple, p: usize) -> Result<OperatorExpr> {
    let grid = *tuple.grid();
    let mut acc = OperatorExpr::identity(grid);
    for _ in 0..p {
        let mut qs = OperatorExpr::zero(grid);
        for i in 0..tuple.d() {
            qs = qs.add(&q_map(tuple, i, &acc)?)?;
        }
        acc = acc.sub(&qs)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Toral,
    Spherical,
}

/// Sign information for all defects of total order `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub p: usize,
    /// Number of defect functions tested (multi-indices with `|n| = p` in toral mode).
    pub tested: usize,
    /// Extremes of `B / mass` over the tested functions and their windows.
    pub min_relative: f64,
    pub max_relative: f64,
    /// Extremes of `B` itself.
    pub min_value: f64,
    pub max_value: f64,
    /// Smallest safe window among the tested functions.
    pub window: SafeWindow,
    pub isometry: bool,
    pub expansion: bool,
    pub contraction: bool,
    pub hyperexpansion: bool,
    pub hypercontraction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeClassification {
    pub mode: Mode,
    pub max_order: usize,
    pub tol: f64,
    pub orders: Vec<OrderVerdict>,
    pub isometry: bool,
    pub expansion: bool,
    pub contraction: bool,
    /// Orders `p` at which the tuple is a `p`-isometry.
    pub isometric_orders: Vec<usize>,
    /// Largest `p` with `B_q <= 0` for all `q <= p` (0 if none).
    pub hyperexpansive_order: usize,
    pub hypercontractive_order: usize,
    /// `B_p <= 0` for every tested `p` (up to `max_order`).
    pub complete_hyperexpansion: bool,
    pub complete_hypercontraction: bool,
}

impl ModeClassification {
    pub fn is_p_isometry(&self, p: usize) -> bool {
        self.isometric_orders.contains(&p)
    }

    pub fn is_p_hyperexpansion(&self, p: usize) -> bool {
        self.hyperexpansive_order >= p
    }

    pub fn order(&self, p: usize) -> Option<&OrderVerdict> {
        self.orders.iter().find(|o| o.p == p)
    }

    fn from_orders(mode: Mode, max_order: usize, tol: f64, orders: Vec<OrderVerdict>) -> Self {
        let prefix = |f: fn(&OrderVerdict) -> bool| orders.iter().take_while(|o| f(o)).count();
        let hyperexpansive_order = prefix(|o| o.expansion);
        let hypercontractive_order = prefix(|o| o.contraction);
        let first = orders.first();
        ModeClassification {
            mode,
            max_order,
            tol,
            isometry: first.is_some_and(|o| o.isometry),
            expansion: first.is_some_and(|o| o.expansion),
            contraction: first.is_some_and(|o| o.contraction),
            isometric_orders: orders.iter().filter(|o| o.isometry).map(|o| o.p).collect(),
            hyperexpansive_order,
            hypercontractive_order,
            complete_hyperexpansion: hyperexpansive_order == orders.len(),
            complete_hypercontraction: hypercontractive_order == orders.len(),
            orders,
        }
    }
}

fn order_verdict(p: usize, defects: &[DefectFunction], tol: f64) -> OrderVerdict {
    let (mut min_rel, mut max_rel) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_v, mut max_v) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in defects {
        let (lo, hi) = d.relative_range();
        min_rel = min_rel.min(lo);
        max_rel = max_rel.max(hi);
        for &v in &d.values {
            min_v = min_v.min(v);
            max_v = max_v.max(v);
        }
    }
    let window = defects.iter().map(|d| d.window).min_by_key(|w| w.len).expect("nonempty order");
    let expansion = max_rel <= tol;
    let contraction = min_rel >= -tol;
    OrderVerdict {
        p,
        tested: defects.len(),
        min_relative: min_rel,
        max_relative: max_rel,
        min_value: min_v,
        max_value: max_v,
        window,
        isometry: expansion && contraction,
        expansion,
        contraction,
        hyperexpansion: false,
        hypercontraction: false,
    }
}

fn fill_prefix_flags(orders: &mut [OrderVerdict]) {
    let (mut he, mut hc) = (true, true);
    for o in orders {
        he &= o.expansion;
        hc &= o.contraction;
        o.hyperexpansion = he;
        o.hypercontraction = hc;
    }
}

/// Toral and spherical verdicts for orders `1..=max_order`, on safe windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub d: usize,
    pub labels: Vec<String>,
    pub t: Vec<f64>,
    pub constant_symbols: bool,
    pub toral: ModeClassification,
    pub spherical: ModeClassification,
}

/// Defect signs are judged relative to the term mass: `B <= tol * mass`
/// counts as nonpositive.
pub fn classify(tuple: &TranslationTuple, max_order: usize, tol: f64) -> Result<ClassificationReport> {
    tuple.require_commuting()?;
    if max_order == 0 {
        return Err(Error::InvalidArgument("max order must be at least 1".into()));
    }
    let d = tuple.d();
    let toral_orders = (1..=max_order)
        .into_par_iter()
        .map(|p| {
            let defects = budget_lattice(&vec![1; d], p)
                .into_iter()
                .filter(|n| n.total() == p)
                .map(|n| toral_defect(tuple, &n))
                .collect::<Result<Vec<_>>>()?;
            Ok(order_verdict(p, &defects, tol))
        })
        .collect::<Result<Vec<_>>>()?;
    let spherical_orders = (1..=max_order)
        .into_par_iter()
        .map(|p| Ok(order_verdict(p, &[spherical_defect(tuple, p)?], tol)))
        .collect::<Result<Vec<_>>>()?;
    let finish = |mode, mut orders: Vec<OrderVerdict>| {
        fill_prefix_flags(&mut orders);
        ModeClassification::from_orders(mode, max_order, tol, orders)
    };
    Ok(ClassificationReport {
        d,
        labels: tuple.labels(),
        t: tuple.t().to_vec(),
        constant_symbols: tuple.constant_symbols(tol)?,
        toral: finish(Mode::Toral, toral_orders),
        spherical: finish(Mode::Spherical, spherical_orders),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::lattice::binomial;
    use crate::symbol::SymbolSpec;

    fn alternating_binomial(p: usize, a: impl Fn(usize) -> f64) -> f64 {
        (0..=p).map(|q| if q % 2 == 0 { 1.0 } else { -1.0 } * binomial(p, q) * a(q)).sum()
    }

    fn grid() -> GridSpec {
        GridSpec::from_extent(0.25, 64.0).unwrap()
    }

    fn single(s: SymbolSpec) -> TranslationTuple {
        TranslationTuple::new(vec![s], vec![1.0], grid()).unwrap()
    }

    fn pair(s: SymbolSpec, t: [f64; 2]) -> TranslationTuple {
        TranslationTuple::new(vec![s.clone(), s], t.to_vec(), grid()).unwrap()
    }

    #[test]
    fn one_dimensional_defect_matches_moment_sum() {
        // B_p(x) = sum_q (-1)^q C(p,q) phi(x + q t) / phi(x)
        let s = SymbolSpec::log_shift();
        let tuple = single(s.clone());
        for p in 1..=6 {
            let b = toral_defect(&tuple, &MultiIndex::new(vec![p])).unwrap();
            assert_eq!(b.window.len, 256 - 4 * p);
            for (j, &v) in b.values.iter().enumerate().step_by(7) {
                let x = grid().x(j);
                let expect = alternating_binomial(p, |q| s.eval(x + q as f64).unwrap() / s.eval(x).unwrap());
                assert!((v - expect).abs() < 1e-12, "p={p} j={j}: {v} vs {expect}");
                assert!(v <= 1e-12);
            }
        }
    }

    #[test]
    fn constant_symbols_have_zero_defect() {
        let t = TranslationTuple::new(vec![SymbolSpec::constant(2.0), SymbolSpec::constant(5.0)], vec![1.0, 0.5], grid())
            .unwrap();
        for n in [[1, 0], [0, 1], [2, 3]] {
            let b = toral_defect(&t, &MultiIndex::new(n.to_vec())).unwrap();
            assert!(b.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn affine_pair_is_two_isometry() {
        let t = pair(SymbolSpec::affine(1.0, 1.0), [1.0, 1.0]);
        let b11 = toral_defect(&t, &MultiIndex::new(vec![1, 1])).unwrap();
        let b20 = toral_defect(&t, &MultiIndex::new(vec![2, 0])).unwrap();
        assert!(b20.values.iter().all(|v| v.abs() < 1e-10));
        assert!(b11.values.iter().all(|&v| v <= 1e-10));
        let op = toral_defect_operator(&t, &MultiIndex::new(vec![1, 1])).unwrap();
        let diag = op.diagonal();
        assert_eq!(op.terms().len(), 1);
        for (j, v) in b11.values.iter().enumerate() {
            assert!((diag[j].re - v).abs() < 1e-12);
        }
    }

    #[test]
    fn spherical_reduces_to_toral_for_one_operator() {
        let t = single(SymbolSpec::sqrt_affine());
        for p in 1..=4 {
            let a = spherical_defect(&t, p).unwrap();
            let b = toral_defect(&t, &MultiIndex::new(vec![p])).unwrap();
            assert_eq!(a.values, b.values);
        }
    }

    #[test]
    fn spherical_operator_matches_multiplier() {
        let t = pair(SymbolSpec::log_shift(), [1.0, 0.5]).scale_spherical().unwrap();
        for p in 1..=3 {
            let f = spherical_defect(&t, p).unwrap();
            let diag = spherical_defect_operator(&t, p).unwrap().diagonal();
            for (j, v) in f.values.iter().enumerate() {
                assert!((diag[j].re - v).abs() < 1e-12 * f.mass[j]);
            }
        }
    }

    #[test]
    fn classification_catalog() {
        let c = classify(&single(SymbolSpec::affine(1.0, 1.0)), 4, 1e-10).unwrap();
        assert!(c.toral.is_p_isometry(2) && c.toral.expansion && !c.toral.isometry);
        let c = classify(&single(SymbolSpec::sqrt_affine()), 4, 1e-10).unwrap();
        assert!(c.toral.is_p_hyperexpansion(2));
        let c = classify(&single(SymbolSpec::reciprocal_affine()), 8, 1e-10).unwrap();
        assert!(c.toral.complete_hypercontraction && c.toral.contraction);
        let c = classify(&pair(SymbolSpec::constant(1.0), [1.0, 1.0]), 3, 1e-10).unwrap();
        assert!(c.toral.isometry && c.constant_symbols);
    }

    #[test]
    fn scaled_pair_is_spherical() {
        let iso = pair(SymbolSpec::constant(1.0), [1.0, 1.0]).scale_spherical().unwrap();
        let c = classify(&iso, 3, 1e-10).unwrap();
        assert!(c.spherical.isometry);
        let two = pair(SymbolSpec::affine(1.0, 1.0), [1.0, 1.0]).scale_spherical().unwrap();
        let c = classify(&two, 3, 1e-10).unwrap();
        assert!(c.spherical.is_p_isometry(2) && !c.spherical.isometry);
        let ch = pair(SymbolSpec::log_shift(), [1.0, 1.0]).scale_spherical().unwrap();
        assert!(classify(&ch, 6, 1e-10).unwrap().spherical.complete_hyperexpansion);
    }

    #[test]
    fn refuses_noncommuting_and_empty_windows() {
        let t = TranslationTuple::new(vec![SymbolSpec::affine(1.0, 1.0), SymbolSpec::exp(1.0)], vec![1.0, 1.0], grid())
            .unwrap();
        assert!(matches!(toral_defect(&t, &MultiIndex::new(vec![1, 0])), Err(Error::NotCommuting { .. })));
        let small = TranslationTuple::new(vec![SymbolSpec::log_shift()], vec![1.0], GridSpec::new(0.25, 8).unwrap()).unwrap();
        assert!(matches!(spherical_defect(&small, 2), Err(Error::WindowTooSmall(_))));
    }
}
