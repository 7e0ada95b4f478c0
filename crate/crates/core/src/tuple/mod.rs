//! Commuting tuples `S_t = (S_1, ..., S_d)` of weighted translations.

mod defect;
mod dual;
mod structure;

pub use defect::{
    classify, spherical_defect, spherical_defect_operator, toral_defect, toral_defect_operator, ClassificationReport,
    DefectFunction, DefectOrder, Mode, ModeClassification, OrderVerdict,
};
pub use dual::{spherical_pair_formula, SphericalDual, ToralDual, DEFAULT_ALPHA};
pub use structure::{
    check_hyponormal_powers, kernel_condition, AnalyticReport, GramReport, HyponormalReport, KernelConditionEntry,
    KernelConditionReport, WanderingReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec, OperatorExpr};
use crate::lattice::MultiIndex;
use crate::symbol::SymbolSpec;

/// Default commutation tolerance (relative residual).
pub const DEFAULT_COMMUTE_TOL: f64 = 1e-10;

/// Which family a structural check runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    Primal,
    Dual,
}

/// `sqrt(phi(x) / phi(x - t))` for `x >= t`, zero below.
pub fn weight_samples(symbol: &SymbolSpec, grid: &GridSpec, t: f64) -> Result<Vec<f64>> {
    let k = grid.steps(t)?;
    let phi = symbol.sample(grid)?;
    let closed = symbol.constant_weight(t);
    Ok((0..grid.n())
        .map(|j| match (j >= k, closed) {
            (false, _) => 0.0,
            (true, Some(c)) => c,
            (true, None) => (phi[j] / phi[j - k]).sqrt(),
        })
        .collect())
}

/// `S_t` for one symbol.
pub fn make_weighted_translation(symbol: &SymbolSpec, t: f64, grid: &GridSpec) -> Result<OperatorExpr> {
    let k = grid.steps(t)?;
    OperatorExpr::weighted_shift(*grid, k, &weight_samples(symbol, grid, t)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCommutation {
    pub i: usize,
    pub j: usize,
    /// Ratio identity `w_i(x)^2 w_j(x-t_i)^2 = w_j(x)^2 w_i(x-t_j)^2` on `x >= t_i + t_j`.
    pub ratio_residual: f64,
    /// Largest multiplier of `S_i S_j - S_j S_i`, relative to `max(1, |S_i S_j|)`.
    pub operator_residual: f64,
    pub commutes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub pairs: Vec<PairCommutation>,
    pub max_residual: f64,
    pub commutes: bool,
    pub tol: f64,
}

/// `d` weighted translations on a shared grid, each a single shift term
/// `S_i f(x_j) = w_i(x_j) f(x_j - t_i)`.
#[derive(Debug, Clone)]
pub struct TranslationTuple {
    grid: GridSpec,
    symbols: Option<Vec<SymbolSpec>>,
    t: Vec<f64>,
    steps: Vec<usize>,
    weights: Vec<Vec<f64>>,
    /// `w_i` when it is constant by construction (closed form).
    constant_weights: Vec<Option<f64>>,
    ops: Vec<OperatorExpr>,
    adjoints: Vec<OperatorExpr>,
    /// Weights are exact (not truncation-affected) on `[0, valid_len)`.
    valid_len: usize,
    commutation: CommutationReport,
}

impl TranslationTuple {
    pub fn new(symbols: Vec<SymbolSpec>, t: Vec<f64>, grid: GridSpec) -> Result<Self> {
        if symbols.is_empty() || symbols.len() != t.len() {
            return Err(Error::InvalidArgument(format!(
                "need one translation per symbol, got {} symbols and {} translations",
                symbols.len(),
                t.len()
            )));
        }
        let weights = symbols
            .iter()
            .zip(&t)
            .map(|(s, &ti)| weight_samples(s, &grid, ti))
            .collect::<Result<Vec<_>>>()?;
        let constant_weights = symbols.iter().zip(&t).map(|(s, &ti)| s.constant_weight(ti)).collect();
        let steps = t.iter().map(|&ti| grid.steps(ti)).collect::<Result<Vec<_>>>()?;
        Self::assemble(grid, Some(symbols), t, steps, weights, constant_weights)
    }

    /// Tuple from explicit weights (`weights[i][j]` for `j >= steps[i]`).
    pub fn from_weights(grid: GridSpec, steps: Vec<usize>, weights: Vec<Vec<f64>>) -> Result<Self> {
        if steps.is_empty() || steps.len() != weights.len() || steps.contains(&0) {
            return Err(Error::InvalidArgument("need positive steps, one per weight".into()));
        }
        let t = steps.iter().map(|&k| grid.x(k)).collect();
        let d = steps.len();
        Self::assemble(grid, None, t, steps, weights, vec![None; d])
    }

    fn assemble(
        grid: GridSpec,
        symbols: Option<Vec<SymbolSpec>>,
        t: Vec<f64>,
        steps: Vec<usize>,
        mut weights: Vec<Vec<f64>>,
        constant_weights: Vec<Option<f64>>,
    ) -> Result<Self> {
        for (w, &k) in weights.iter_mut().zip(&steps) {
            if w.len() != grid.n() {
                return Err(Error::GridMismatch(format!("weight has {} values, grid has {}", w.len(), grid.n())));
            }
            w[..k.min(grid.n())].iter_mut().for_each(|v| *v = 0.0);
        }
        let ops = steps
            .iter()
            .zip(&weights)
            .map(|(&k, w)| OperatorExpr::weighted_shift(grid, k, w))
            .collect::<Result<Vec<_>>>()?;
        let adjoints = ops.iter().map(OperatorExpr::adjoint).collect();
        let mut tuple = TranslationTuple {
            grid,
            symbols,
            t,
            steps,
            weights,
            constant_weights,
            ops,
            adjoints,
            valid_len: grid.n(),
            commutation: CommutationReport { pairs: Vec::new(), max_residual: 0.0, commutes: true, tol: 0.0 },
        };
        tuple.commutation = tuple.check_commuting(DEFAULT_COMMUTE_TOL);
        Ok(tuple)
    }

    /// Restricts commutation checks to `[0, len)`, where the weights are exact.
    pub(crate) fn with_valid_len(mut self, len: usize) -> Self {
        self.valid_len = len.min(self.grid.n());
        self.commutation = self.check_commuting(DEFAULT_COMMUTE_TOL);
        self
    }

    pub fn valid_len(&self) -> usize {
        self.valid_len
    }

    pub fn d(&self) -> usize {
        self.steps.len()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn symbols(&self) -> Option<&[SymbolSpec]> {
        self.symbols.as_deref()
    }

    pub fn labels(&self) -> Vec<String> {
        match &self.symbols {
            Some(s) => s.iter().map(SymbolSpec::label).collect(),
            None => (0..self.d()).map(|i| format!("w{}", i + 1)).collect(),
        }
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn constant_weights(&self) -> &[Option<f64>] {
        &self.constant_weights
    }

    pub fn op(&self, i: usize) -> &OperatorExpr {
        &self.ops[i]
    }

    pub fn ops(&self) -> &[OperatorExpr] {
        &self.ops
    }

    pub fn adjoint(&self, i: usize) -> &OperatorExpr {
        &self.adjoints[i]
    }

    pub fn commutation(&self) -> &CommutationReport {
        &self.commutation
    }

    pub fn commutes(&self) -> bool {
        self.commutation.commutes
    }

    pub(crate) fn require_commuting(&self) -> Result<()> {
        match self.commutation.pairs.iter().find(|p| !p.commutes) {
            None => Ok(()),
            Some(p) => Err(Error::NotCommuting {
                i: p.i,
                j: p.j,
                residual: p.ratio_residual.max(p.operator_residual),
            }),
        }
    }

    /// Every symbol constant on the grid, to `tol` relative to its largest value.
    pub fn constant_symbols(&self, tol: f64) -> Result<bool> {
        match &self.symbols {
            Some(symbols) => {
                for s in symbols {
                    let v = s.sample(&self.grid)?;
                    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                    if v.iter().any(|x| (x - v[0]).abs() > tol * max) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            None => Ok(self.weights.iter().zip(&self.steps).all(|(w, &k)| {
                w[k..].iter().all(|&v| (v - 1.0).abs() <= tol)
            })),
        }
    }

    /// Pairwise commutation via the ratio identity and the operator commutator.
    pub fn check_commuting(&self, tol: f64) -> CommutationReport {
        let d = self.d();
        let pairs: Vec<PairCommutation> = (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .map(|(i, j)| self.pair_commutation(i, j, tol))
            .collect();
        let max_residual =
            pairs.iter().map(|p| p.ratio_residual.max(p.operator_residual)).fold(0.0, f64::max);
        CommutationReport { commutes: pairs.iter().all(|p| p.commutes), pairs, max_residual, tol }
    }

    pub fn pair_commutation(&self, i: usize, j: usize, tol: f64) -> PairCommutation {
        let n = self.valid_len;
        let (ki, kj) = (self.steps[i], self.steps[j]);
        let (wi, wj) = (&self.weights[i], &self.weights[j]);
        let ratio_residual = (ki + kj..n)
            .map(|x| {
                let lhs = wi[x].powi(2) * wj[x - ki].powi(2);
                let rhs = wj[x].powi(2) * wi[x - kj].powi(2);
                (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
            })
            .fold(0.0, f64::max);
        let ab = self.ops[i].compose(&self.ops[j]).expect("same grid");
        let ba = self.ops[j].compose(&self.ops[i]).expect("same grid");
        let diff = ab.sub(&ba).expect("same grid");
        let window_max = |op: &OperatorExpr| {
            op.terms().iter().flat_map(|t| t.multiplier[..n].iter()).map(|m| m.norm()).fold(0.0, f64::max)
        };
        let operator_residual = window_max(&diff) / window_max(&ab).max(1.0);
        PairCommutation {
            i,
            j,
            ratio_residual,
            operator_residual,
            commutes: ratio_residual <= tol && operator_residual <= tol,
        }
    }

    /// Every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<TranslationTuple> {
        let weights = self.weights.iter().map(|w| w.iter().map(|v| v * c).collect()).collect();
        let constant_weights = self.constant_weights.iter().map(|w| w.map(|v| v * c)).collect();
        Self::assemble(self.grid, self.symbols.clone(), self.t.clone(), self.steps.clone(), weights, constant_weights)
            .map(|mut t| {
                if c != 1.0 {
                    t.symbols = None;
                }
                t
            })
    }

    /// `(S_1 / sqrt d, ..., S_d / sqrt d)`.
    pub fn scale_spherical(&self) -> Result<TranslationTuple> {
        self.scaled(1.0 / (self.d() as f64).sqrt())
    }

    /// Copy with the `i`-th weight replaced.
    pub fn with_weight(&self, i: usize, weight: Vec<f64>) -> Result<TranslationTuple> {
        let mut weights = self.weights.clone();
        weights[i] = weight;
        let mut constant_weights = self.constant_weights.clone();
        constant_weights[i] = None;
        Self::assemble(self.grid, None, self.t.clone(), self.steps.clone(), weights, constant_weights)
    }

    /// `S^k = S_1^{k_1} ... S_d^{k_d}`.
    pub fn power(&self, k: &MultiIndex) -> Result<OperatorExpr> {
        let mut acc = OperatorExpr::identity(self.grid);
        for (op, &ki) in self.ops.iter().zip(k.components()) {
            acc = acc.compose(&op.pow(ki)?)?;
        }
        Ok(acc)
    }

    /// Total shift `sum_i k_i steps_i` of `S^k`.
    pub fn shift_of(&self, k: &MultiIndex) -> usize {
        k.dot(&self.steps)
    }

    pub fn min_steps(&self) -> usize {
        *self.steps.iter().min().expect("nonempty tuple")
    }

    pub fn max_steps(&self) -> usize {
        *self.steps.iter().max().expect("nonempty tuple")
    }

    pub fn joint_kernel(&self) -> JointKernelDescriptor {
        let k = self.min_steps();
        let n = self.grid.n();
        let annihilation = |ops: &[OperatorExpr]| {
            (0..k.min(n))
                .flat_map(|j| ops.iter().map(move |a| a.apply(&GridFunction::delta(n, j)).expect("same grid").max_abs()))
                .fold(0.0, f64::max)
        };
        let dual_residual = self
            .toral_cauchy_dual(0.0)
            .ok()
            .map(|dual| annihilation(&dual.tuple.adjoints));
        JointKernelDescriptor {
            t_min: self.grid.x(k),
            steps: k,
            dim: k.min(n),
            annihilation_residual: annihilation(&self.adjoints),
            dual_annihilation_residual: dual_residual,
        }
    }

    /// Kernel basis vector `e_j` (unit mass at `x_j`, `j < t_min / h`).
    pub fn kernel_basis(&self) -> Vec<GridFunction> {
        let n = self.grid.n();
        (0..self.min_steps().min(n)).map(|j| GridFunction::delta(n, j)).collect()
    }
}

/// `E = span{ e_j : x_j < t_min }`, the joint kernel of the adjoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointKernelDescriptor {
    pub t_min: f64,
    pub steps: usize,
    pub dim: usize,
    /// `max |S_i^* e|` over basis vectors and components.
    pub annihilation_residual: f64,
    /// Same for the toral Cauchy dual, when it exists.
    pub dual_annihilation_residual: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::catalog;

    pub(crate) fn grid() -> GridSpec {
        GridSpec::from_extent(0.25, 64.0).unwrap()
    }

    #[test]
    fn weighted_translation_examples() {
        let g = grid();
        let s = make_weighted_translation(&SymbolSpec::constant(3.0), 0.25, &g).unwrap();
        let m = &s.single_term().unwrap().multiplier;
        assert_eq!(m[0].re, 0.0);
        assert!(m[1..].iter().all(|v| v.re == 1.0));
        let a = make_weighted_translation(&SymbolSpec::affine(1.0, 1.0), 1.0, &g).unwrap();
        assert!((a.single_term().unwrap().multiplier[4].re - 2f64.sqrt()).abs() < 1e-15);
        let e = make_weighted_translation(&SymbolSpec::exp(1.0), 1.0, &g).unwrap();
        assert!(e.single_term().unwrap().multiplier[4..].iter().all(|v| v.re == 0.5f64.exp()));
        assert!(matches!(
            make_weighted_translation(&SymbolSpec::log_shift(), 0.3, &g),
            Err(Error::NonGridTranslation { .. })
        ));
    }

    #[test]
    fn semigroup_law() {
        let g = grid();
        for (_, s) in catalog() {
            let a = make_weighted_translation(&s, 0.5, &g).unwrap();
            let b = make_weighted_translation(&s, 0.75, &g).unwrap();
            let ab = make_weighted_translation(&s, 1.25, &g).unwrap();
            let c = a.compose(&b).unwrap();
            let diff = c.sub(&ab).unwrap();
            assert!(diff.max_abs_multiplier() < 1e-12, "{}", s.label());
        }
    }

    #[test]
    fn adjoint_product_is_ratio_multiplication() {
        let g = grid();
        let s = SymbolSpec::log_shift();
        let op = make_weighted_translation(&s, 1.0, &g).unwrap();
        let p = op.adjoint().compose(&op).unwrap();
        let m = p.single_term().unwrap();
        assert_eq!(m.shift, 0);
        for j in 0..g.n() - 4 {
            let x = g.x(j);
            let expect = s.eval(x + 1.0).unwrap() / s.eval(x).unwrap();
            assert!((m.multiplier[j].re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn commutation_examples() {
        let g = grid();
        let pair = |a: SymbolSpec, b: SymbolSpec, t: [f64; 2]| TranslationTuple::new(vec![a, b], t.to_vec(), g).unwrap();
        assert!(pair(SymbolSpec::affine(1.0, 1.0), SymbolSpec::affine(1.0, 1.0), [1.0, 0.5]).commutes());
        assert!(pair(SymbolSpec::exp(-1.0), SymbolSpec::exp(1.0), [1.0, 0.75]).commutes());
        assert!(pair(SymbolSpec::constant(2.0), SymbolSpec::exp(1.0), [1.0, 1.0]).commutes());
        let mixed = pair(SymbolSpec::affine(1.0, 1.0), SymbolSpec::exp(1.0), [1.0, 1.0]);
        assert!(!mixed.commutes());
        assert!(mixed.commutation().max_residual > 1e-3);
        assert!(matches!(mixed.require_commuting(), Err(Error::NotCommuting { .. })));
    }

    #[test]
    fn joint_kernel_dimension() {
        let g = GridSpec::new(1.0, 32).unwrap();
        let t = TranslationTuple::new(vec![SymbolSpec::log_shift(), SymbolSpec::log_shift()], vec![2.0, 3.0], g).unwrap();
        let e = t.joint_kernel();
        assert_eq!(e.dim, 2);
        assert_eq!(e.t_min, 2.0);
        assert_eq!(e.annihilation_residual, 0.0);
        assert_eq!(e.dual_annihilation_residual, Some(0.0));
        let t = TranslationTuple::new(vec![SymbolSpec::constant(1.0); 2], vec![1.0, 1.0], g).unwrap();
        assert_eq!(t.joint_kernel().dim, 1);
    }

    #[test]
    fn spherical_scaling() {
        let g = grid();
        let t = TranslationTuple::new(vec![SymbolSpec::constant(1.0); 2], vec![1.0, 1.0], g).unwrap();
        let s = t.scale_spherical().unwrap();
        assert!((s.weights()[0][10] - 0.5f64.sqrt()).abs() < 1e-15);
        let one = TranslationTuple::new(vec![SymbolSpec::log_shift()], vec![1.0], g).unwrap();
        assert_eq!(one.scale_spherical().unwrap().weights(), one.weights());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::grid::C64;
    use crate::lattice::{binomial, box_lattice};
    use crate::symbol::catalog;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn symbol() -> impl Strategy<Value = SymbolSpec> {
        (0..catalog().len()).prop_map(|i| catalog()[i].1.clone())
    }

    fn small_grid() -> GridSpec {
        GridSpec::new(0.25, 32).unwrap()
    }

    proptest! {
        #[test]
        fn semigroup_law(s in symbol(), a in 1usize..8, b in 1usize..8) {
            let g = GridSpec::from_extent(0.25, 16.0).unwrap();
            let sa = make_weighted_translation(&s, a as f64 * 0.25, &g).unwrap();
            let sb = make_weighted_translation(&s, b as f64 * 0.25, &g).unwrap();
            let sab = make_weighted_translation(&s, (a + b) as f64 * 0.25, &g).unwrap();
            let c = sa.compose(&sb).unwrap();
            let scale = sab.max_abs_multiplier().max(1.0);
            prop_assert!(c.sub(&sab).unwrap().max_abs_multiplier() <= 1e-12 * scale);
            prop_assert!(sa.compose(&sb).unwrap().sub(&sb.compose(&sa).unwrap()).unwrap().max_abs_multiplier() <= 1e-12 * scale);
        }

        #[test]
        fn commutation_verdict_is_symmetric(s1 in symbol(), s2 in symbol(), a in 1usize..6, b in 1usize..6) {
            let t = TranslationTuple::new(vec![s1, s2], vec![a as f64 * 0.25, b as f64 * 0.25], small_grid()).unwrap();
            let (p, q) = (t.pair_commutation(0, 1, 1e-10), t.pair_commutation(1, 0, 1e-10));
            prop_assert_eq!(p.ratio_residual, q.ratio_residual);
            prop_assert_eq!(p.commutes, q.commutes);
        }

        #[test]
        fn toral_defect_matches_dense(s in symbol(), a in 1usize..4, b in 1usize..4, n1 in 0usize..3, n2 in 0usize..3) {
            let t = TranslationTuple::new(vec![s.clone(), s], vec![a as f64 * 0.25, b as f64 * 0.25], small_grid()).unwrap();
            let order = MultiIndex::new(vec![n1, n2]);
            let f = toral_defect(&t, &order).unwrap();
            let mut dense = DMatrix::<C64>::zeros(32, 32);
            for p in box_lattice(order.components()) {
                let sp = t.power(&p).unwrap().to_dense().unwrap();
                let sign = if p.total() % 2 == 0 { 1.0 } else { -1.0 };
                dense += (sp.adjoint() * sp) * C64::new(sign * binomial(n1, p.components()[0]) * binomial(n2, p.components()[1]), 0.0);
            }
            for j in 0..f.window.len {
                prop_assert!((dense[(j, j)].re - f.values[j]).abs() <= 1e-12 * f.mass[j]);
            }
            let op = toral_defect_operator(&t, &order).unwrap().diagonal();
            for j in 0..f.window.len {
                prop_assert!((op[j].re - f.values[j]).abs() <= 1e-12 * f.mass[j]);
            }
        }

        #[test]
        fn toral_dual_is_a_left_inverse(s in symbol(), a in 1usize..6) {
            let t = TranslationTuple::new(vec![s], vec![a as f64 * 0.25], GridSpec::from_extent(0.25, 16.0).unwrap()).unwrap();
            let dual = t.toral_cauchy_dual(DEFAULT_ALPHA).unwrap();
            prop_assert!(dual.identity_residual <= 1e-12);
            let back = dual.tuple.toral_cauchy_dual(DEFAULT_ALPHA).unwrap().tuple;
            for (x, y) in back.weights()[0].iter().zip(&t.weights()[0]) {
                prop_assert!((x - y).abs() <= 4.0 * f64::EPSILON * y.abs());
            }
        }

        #[test]
        fn spherical_defect_is_toral_for_one_operator(s in symbol(), a in 1usize..4, p in 0usize..5) {
            let t = TranslationTuple::new(vec![s], vec![a as f64 * 0.25], small_grid()).unwrap();
            let sph = spherical_defect(&t, p).unwrap();
            let tor = toral_defect(&t, &MultiIndex::new(vec![p])).unwrap();
            prop_assert_eq!(sph.values, tor.values);
        }
    }
}
