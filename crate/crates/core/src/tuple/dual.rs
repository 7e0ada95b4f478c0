//! Toral and spherical Cauchy duals.
//!
//! Both duals of a tuple of weighted translations are again weighted
//! translations with the same steps: the toral dual has weight `1 / w_i`, the
//! spherical dual has weight `w_i(x) / q(x - t_i)` with
//! `q(x) = sum_i w_i(x + t_i)^2` the multiplier of `Q_s(I)`.

use super::TranslationTuple;
use crate::error::{Error, Result};
use crate::grid::{OperatorExpr, SafeWindow};

/// Left-invertibility threshold below which duals are refused.
pub const DEFAULT_ALPHA: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ToralDual {
    pub tuple: TranslationTuple,
    /// `min Q_i(I)` over the safe window, per component.
    pub alpha: Vec<f64>,
    /// `max |S_i'^* S_i - I|` over the safe window.
    pub identity_residual: f64,
    pub window: SafeWindow,
}

#[derive(Debug, Clone)]
pub struct SphericalDual {
    pub tuple: TranslationTuple,
    /// Multiplier of `Q_s(I)`.
    pub q: Vec<f64>,
    /// `min q` over the safe window.
    pub alpha: f64,
    pub window: SafeWindow,
}

impl SphericalDual {
    pub fn commutes(&self) -> bool {
        self.tuple.commutes()
    }

    pub fn require_commuting(&self) -> Result<()> {
        if self.commutes() {
            Ok(())
        } else {
            Err(Error::DualNotCommuting { residual: self.tuple.commutation().max_residual })
        }
    }
}

impl TranslationTuple {
    /// `S_i' = S_i (S_i^* S_i)^{-1}`, with weight `1 / w_i`.
    pub fn toral_cauchy_dual(&self, alpha_threshold: f64) -> Result<ToralDual> {
        let n = self.grid().n();
        let reach = self.max_steps();
        if reach >= n {
            return Err(Error::WindowTooSmall("translation exceeds the grid".into()));
        }
        let alpha: Vec<f64> = self
            .weights()
            .iter()
            .zip(self.steps())
            .map(|(w, &k)| (0..n - k).map(|j| w[j + k] * w[j + k]).fold(f64::INFINITY, f64::min))
            .collect();
        let alpha_min = alpha.iter().copied().fold(f64::INFINITY, f64::min);
        if !(alpha_min > alpha_threshold) {
            return Err(Error::NotLeftInvertible { alpha: alpha_min });
        }
        let weights = self
            .weights()
            .iter()
            .zip(self.steps())
            .map(|(w, &k)| (0..n).map(|j| if j >= k { 1.0 / w[j] } else { 0.0 }).collect())
            .collect();
        let mut tuple = TranslationTuple::from_weights(*self.grid(), self.steps().to_vec(), weights)?;
        tuple.constant_weights = self.constant_weights().iter().map(|c| c.map(|v| 1.0 / v)).collect();
        let window = SafeWindow::new(self.grid(), n - reach);
        let mut identity_residual = 0.0f64;
        for i in 0..self.d() {
            let p = tuple.adjoint(i).compose(self.op(i))?;
            let diag = p.diagonal();
            let off = p.terms().iter().filter(|t| t.shift != 0).count();
            if off > 0 {
                identity_residual = f64::INFINITY;
            }
            for v in &diag[..window.len] {
                identity_residual = identity_residual.max((v - 1.0).norm());
            }
        }
        Ok(ToralDual { tuple, alpha, identity_residual, window })
    }

    /// `Q_s(I)` multiplier `q(x) = sum_i w_i(x + t_i)^2`, truncated terms dropped.
    pub fn spherical_q(&self) -> Vec<f64> {
        let n = self.grid().n();
        (0..n)
            .map(|j| {
                self.weights()
                    .iter()
                    .zip(self.steps())
                    .filter(|(_, &k)| j + k < n)
                    .map(|(w, &k)| w[j + k] * w[j + k])
                    .sum()
            })
            .collect()
    }

    /// `S_i^s = S_i Q_s(I)^{-1}`; the dual tuple's commutation is checked
    /// on construction and reported, not required.
    pub fn spherical_cauchy_dual(&self, alpha_threshold: f64) -> Result<SphericalDual> {
        let n = self.grid().n();
        let reach = self.max_steps();
        if reach >= n {
            return Err(Error::WindowTooSmall("translation exceeds the grid".into()));
        }
        let q = self.spherical_q();
        let alpha = q[..n - reach].iter().copied().fold(f64::INFINITY, f64::min);
        if !(alpha > alpha_threshold) {
            return Err(Error::NotJointlyLeftInvertible { alpha });
        }
        let inv_q: Vec<f64> = q.iter().map(|&v| if v > 0.0 { 1.0 / v } else { 0.0 }).collect();
        let qinv = OperatorExpr::multiplication(*self.grid(), &inv_q);
        let weights = (0..self.d())
            .map(|i| {
                let op = self.op(i).compose(&qinv)?;
                let m = op.single_term().map(|t| t.multiplier.iter().map(|v| v.re).collect());
                m.or_else(|_| Ok(vec![0.0; n]))
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let tuple = TranslationTuple::from_weights(*self.grid(), self.steps().to_vec(), weights)?
            .with_valid_len(n - reach + self.min_steps());
        Ok(SphericalDual { tuple, q, alpha, window: SafeWindow::new(self.grid(), n - reach) })
    }
}

/// The two displayed `d = 2` spherical dual weights
/// `w_1(x) / (w_1(x)^2 + w_2(x - t_1 + t_2)^2)` and its mirror, evaluated
/// from the primal weights; zero where the shifted argument leaves the grid.
pub fn spherical_pair_formula(tuple: &TranslationTuple) -> Result<[Vec<f64>; 2]> {
    if tuple.d() != 2 {
        return Err(Error::InvalidArgument(format!("pair formula needs d = 2, got {}", tuple.d())));
    }
    let n = tuple.grid().n();
    let (k1, k2) = (tuple.steps()[0] as isize, tuple.steps()[1] as isize);
    let w = tuple.weights();
    let side = |a: usize, b: usize, ka: isize, kb: isize| -> Vec<f64> {
        (0..n)
            .map(|j| {
                let s = j as isize - ka + kb;
                if (j as isize) < ka || s < 0 || s as usize >= n {
                    return 0.0;
                }
                let wa = w[a][j];
                wa / (wa * wa + w[b][s as usize].powi(2))
            })
            .collect()
    };
    Ok([side(0, 1, k1, k2), side(1, 0, k2, k1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, C64};
    use crate::symbol::SymbolSpec;

    fn grid() -> GridSpec {
        GridSpec::from_extent(0.25, 64.0).unwrap()
    }

    #[test]
    fn toral_dual_examples() {
        let g = grid();
        let c = TranslationTuple::new(vec![SymbolSpec::constant(4.0)], vec![1.0], g).unwrap();
        let dc = c.toral_cauchy_dual(DEFAULT_ALPHA).unwrap();
        assert_eq!(dc.tuple.op(0), c.op(0));
        let e = TranslationTuple::new(vec![SymbolSpec::exp(-1.0)], vec![1.0], g).unwrap();
        let de = e.toral_cauchy_dual(DEFAULT_ALPHA).unwrap();
        assert!(de.tuple.weights()[0][4..].iter().all(|&v| (v - 0.5f64.exp()).abs() < 1e-15));
        assert!(de.identity_residual < 1e-12);
        assert_eq!(de.window.len, 252);
    }

    #[test]
    fn toral_dual_is_an_involution_on_weights() {
        let g = grid();
        let t = TranslationTuple::new(vec![SymbolSpec::log_shift(), SymbolSpec::log_shift()], vec![1.0, 0.5], g).unwrap();
        let dd = t.toral_cauchy_dual(DEFAULT_ALPHA).unwrap().tuple.toral_cauchy_dual(DEFAULT_ALPHA).unwrap().tuple;
        for (a, b) in dd.weights().iter().zip(t.weights()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 4.0 * f64::EPSILON * y.abs());
            }
        }
        assert!(t.toral_cauchy_dual(DEFAULT_ALPHA).unwrap().tuple.commutes());
    }

    #[test]
    fn refuses_without_left_invertibility() {
        let g = grid();
        let t = TranslationTuple::new(vec![SymbolSpec::constant(1.0)], vec![1.0], g).unwrap();
        let mut w = t.weights()[0].clone();
        w[40] = 1e-6;
        let bad = t.with_weight(0, w).unwrap();
        assert!(matches!(bad.toral_cauchy_dual(DEFAULT_ALPHA), Err(Error::NotLeftInvertible { .. })));
        assert!(matches!(bad.spherical_cauchy_dual(1e-8), Err(Error::NotJointlyLeftInvertible { .. })));
    }

    #[test]
    fn spherical_dual_matches_pair_formula() {
        let g = grid();
        let t = TranslationTuple::new(vec![SymbolSpec::exp(-1.0), SymbolSpec::exp(1.0)], vec![1.0, 0.5], g).unwrap();
        let s = t.spherical_cauchy_dual(DEFAULT_ALPHA).unwrap();
        let f = spherical_pair_formula(&t).unwrap();
        for i in 0..2 {
            let k = t.steps()[i];
            for j in k..s.window.len {
                assert!((s.tuple.weights()[i][j] - f[i][j]).abs() < 1e-12, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn example_equalities() {
        let g = grid();
        let iso = TranslationTuple::new(vec![SymbolSpec::constant(1.0); 2], vec![1.0, 1.0], g).unwrap();
        let s = iso.spherical_cauchy_dual(DEFAULT_ALPHA).unwrap();
        let half = C64::new(0.5, 0.0);
        for i in 0..2 {
            let diff = s.tuple.op(i).sub(&iso.op(i).scale(half)).unwrap();
            let m = &diff.terms().first().map(|t| t.multiplier.clone()).unwrap_or_default();
            assert!(m.iter().take(s.window.len).all(|v| v.norm() < 1e-12));
        }
        assert!(s.commutes());
    }
}
