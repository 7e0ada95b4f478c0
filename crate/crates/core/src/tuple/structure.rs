use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{TranslationTuple, Which, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::grid::{inner_product, norm, GridFunction, OperatorExpr, C64};
use crate::lattice::{box_lattice, budget_lattice, cube, MultiIndex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub which: Which,
    pub lattice_radius: usize,
    pub vectors: usize,
    /// Sum of `|G_ab|` over pairs with different lattice points, divided by
    /// the largest diagonal entry.
    pub off_diagonal_mass: f64,
    /// Largest `|G_ab| / sqrt(G_aa G_bb)` over such pairs.
    pub max_cosine: f64,
    /// `max |G - h I|` on the `k = 0` block.
    pub identity_block_residual: f64,
    /// Every `S^k e_j` lies in `[k.t, k.t + t_min)`.
    pub support_certificate: bool,
    /// First lattice pairs whose images overlap.
    pub overlapping: Vec<(MultiIndex, MultiIndex)>,
    pub tol: f64,
    pub orthogonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub lattice_radius: usize,
    /// Largest `|S^k f|` strictly below `k.t` over all dense columns.
    pub below_bound_max: f64,
    pub support_bound_exact: bool,
    /// Grid points in the range of every `S^k`, `|k|_inf <= K`.
    pub intersection_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WanderingReport {
    pub which: Which,
    pub lattice_points: usize,
    pub vectors: usize,
    pub span_dim: usize,
    pub union_points: usize,
    pub max_projection_residual: f64,
    pub tol: f64,
    pub spans: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConditionEntry {
    pub j: usize,
    pub alpha: MultiIndex,
    /// `max_e |S_j^* S'^alpha_[j] e| / |e|` over the kernel basis.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConditionReport {
    pub alpha_max: MultiIndex,
    pub entries: Vec<KernelConditionEntry>,
    pub max_residual: f64,
    pub tol: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyponormalReport {
    pub p: usize,
    /// Side of each compressed block.
    pub window: usize,
    pub min_eigenvalue: f64,
    pub trace_scale: f64,
    pub tol: f64,
    pub hyponormal: bool,
}

impl TranslationTuple {
    pub fn family(&self, which: Which) -> Result<Cow<'_, TranslationTuple>> {
        Ok(match which {
            Which::Primal => Cow::Borrowed(self),
            Which::Dual => Cow::Owned(self.toral_cauchy_dual(DEFAULT_ALPHA)?.tuple),
        })
    }

    /// Gram matrix of `{S^k e : |k|_inf <= K}` over the kernel basis.
    pub fn check_orthogonality(&self, radius: usize, which: Which, tol: f64) -> Result<GramReport> {
        self.require_commuting()?;
        let fam = self.family(which)?;
        let grid = *fam.grid();
        let n = grid.n();
        let e_dim = fam.min_steps();
        let lattice = cube(fam.d(), radius);
        let mut labels = Vec::new();
        let mut columns = Vec::new();
        let mut support_certificate = true;
        for k in &lattice {
            let shift = fam.shift_of(k);
            if shift + e_dim > n {
                return Err(Error::WindowTooSmall(format!(
                    "S^{k} E reaches x = {}, beyond the grid end {}",
                    grid.x(shift + e_dim),
                    grid.x_max()
                )));
            }
            let op = fam.power(k)?;
            for e in fam.kernel_basis() {
                let v = op.apply(&e)?;
                support_certificate &= v
                    .values()
                    .iter()
                    .enumerate()
                    .all(|(j, c)| c.norm() == 0.0 || (shift..shift + e_dim).contains(&j));
                labels.push(k.clone());
                columns.push(v);
            }
        }
        let m = columns.len();
        let mut gram = DMatrix::<C64>::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let g = inner_product(&columns[a], &columns[b], &grid)?;
                gram[(a, b)] = g;
                gram[(b, a)] = g.conj();
            }
        }
        let diag_max = (0..m).map(|a| gram[(a, a)].re).fold(0.0, f64::max);
        let (mut mass, mut max_cosine) = (0.0, 0.0f64);
        let mut overlapping = BTreeSet::new();
        for a in 0..m {
            for b in 0..m {
                if labels[a] == labels[b] {
                    continue;
                }
                let g = gram[(a, b)].norm();
                mass += g;
                let denom = (gram[(a, a)].re * gram[(b, b)].re).sqrt();
                if denom > 0.0 {
                    max_cosine = max_cosine.max(g / denom);
                }
                if g > tol * diag_max && a < b && overlapping.len() < 8 {
                    overlapping.insert((labels[a].clone(), labels[b].clone()));
                }
            }
        }
        let h = grid.h();
        let identity_block_residual = (0..e_dim)
            .flat_map(|a| (0..e_dim).map(move |b| (a, b)))
            .map(|(a, b)| (gram[(a, b)] - C64::new(if a == b { h } else { 0.0 }, 0.0)).norm())
            .fold(0.0, f64::max);
        let off_diagonal_mass = if diag_max > 0.0 { mass / diag_max } else { 0.0 };
        Ok(GramReport {
            which,
            lattice_radius: radius,
            vectors: m,
            off_diagonal_mass,
            max_cosine,
            identity_block_residual,
            support_certificate,
            overlapping: overlapping.into_iter().collect(),
            tol,
            orthogonal: off_diagonal_mass <= tol,
        })
    }

    /// Dense columns of `S^k` vanish below `k.t`.
    pub fn check_analytic(&self, radius: usize) -> Result<AnalyticReport> {
        let n = self.grid().n();
        let mut below_bound_max = 0.0f64;
        let mut in_every_range = vec![true; n];
        for k in cube(self.d(), radius) {
            let shift = self.shift_of(&k);
            let dense = self.power(&k)?.to_dense()?;
            for j in 0..n {
                let row_max = dense.row(j).iter().map(|c| c.norm()).fold(0.0, f64::max);
                if j < shift {
                    below_bound_max = below_bound_max.max(row_max);
                }
                if row_max == 0.0 {
                    in_every_range[j] = false;
                }
            }
        }
        Ok(AnalyticReport {
            lattice_radius: radius,
            below_bound_max,
            support_bound_exact: below_bound_max == 0.0,
            intersection_dim: in_every_range.iter().filter(|&&b| b).count(),
        })
    }

    /// Span of `{S^k e}` over every lattice point whose image starts on the grid.
    pub fn check_wandering(&self, which: Which, tol: f64) -> Result<WanderingReport> {
        self.require_commuting()?;
        let fam = self.family(which)?;
        let n = fam.grid().n();
        let lattice = budget_lattice(fam.steps(), n - 1);
        let basis = fam.kernel_basis();
        let mut gram = DMatrix::<C64>::zeros(n, n);
        let mut union = vec![false; n];
        let mut vectors = 0;
        // Lexicographic order: every `k - e_j` precedes `k`.
        let mut images: HashMap<MultiIndex, Vec<GridFunction>> = HashMap::with_capacity(lattice.len());
        for k in &lattice {
            let row = match (0..k.dim()).find_map(|j| k.minus_unit(j).map(|p| (j, p))) {
                None => basis.clone(),
                Some((j, prev)) => images[&prev].iter().map(|v| fam.op(j).apply(v)).collect::<Result<Vec<_>>>()?,
            };
            for v in &row {
                let scale = norm(v, fam.grid())?;
                let nz: Vec<(usize, C64)> = v
                    .values()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() > 0.0)
                    .map(|(a, &c)| (a, c / scale))
                    .collect();
                for &(a, va) in &nz {
                    union[a] = true;
                    for &(b, vb) in &nz {
                        gram[(a, b)] += va * vb.conj();
                    }
                }
                vectors += 1;
            }
            images.insert(k.clone(), row);
        }
        let eig = SymmetricEigen::new(gram);
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 1e-12 * top).collect();
        let mut max_projection_residual = 0.0f64;
        for j in (0..n).filter(|&j| union[j]) {
            let captured: f64 = keep.iter().map(|&r| eig.eigenvectors[(j, r)].norm_sqr()).sum();
            max_projection_residual = max_projection_residual.max((1.0 - captured).max(0.0).sqrt());
        }
        let union_points = union.iter().filter(|&&b| b).count();
        Ok(WanderingReport {
            which,
            lattice_points: lattice.len(),
            vectors,
            span_dim: keep.len(),
            union_points,
            max_projection_residual,
            tol,
            spans: keep.len() == union_points && max_projection_residual <= tol,
        })
    }

    /// `E ⊆ ker S_j^* prod_{i != j} S_i'^{alpha_i}` for `alpha <= alpha_max`.
    pub fn check_kernel_condition(&self, alpha_max: &MultiIndex, tol: f64) -> Result<KernelConditionReport> {
        self.require_commuting()?;
        let dual = self.toral_cauchy_dual(DEFAULT_ALPHA)?.tuple;
        kernel_condition(self.ops(), dual.ops(), &self.kernel_basis(), alpha_max, tol)
    }
}

/// Kernel condition for explicit operators: `primal[j]^*` applied to
/// `prod_{i != j} dual[i]^{alpha_i} e` for every basis vector `e`.
pub fn kernel_condition(
    primal: &[OperatorExpr],
    dual: &[OperatorExpr],
    basis: &[GridFunction],
    alpha_max: &MultiIndex,
    tol: f64,
) -> Result<KernelConditionReport> {
    let d = primal.len();
    if alpha_max.dim() != d || dual.len() != d || d == 0 {
        return Err(Error::InvalidArgument(format!("alpha_max {alpha_max} does not match d = {d}")));
    }
    let grid = *primal[0].grid();
    let mut entries = Vec::new();
    for j in 0..d {
        let mut bounds = alpha_max.components().to_vec();
        bounds[j] = 0;
        if d == 1 {
            bounds = vec![0];
        }
        let adj = primal[j].adjoint();
        for alpha in box_lattice(&bounds) {
            let mut op = adj.clone();
            for (i, &a) in alpha.components().iter().enumerate() {
                op = op.compose(&dual[i].pow(a)?)?;
            }
            let reach: usize = alpha.components().iter().zip(dual).map(|(&a, op)| a * max_shift(op)).sum();
            if basis.iter().filter_map(last_support).any(|last| last + reach >= grid.n()) {
                return Err(Error::WindowTooSmall(format!("S'^{alpha} E leaves the grid")));
            }
            let mut residual = 0.0f64;
            for e in basis {
                residual = residual.max(norm(&op.apply(e)?, &grid)? / norm(e, &grid)?);
            }
            entries.push(KernelConditionEntry { j, alpha, residual });
        }
    }
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    Ok(KernelConditionReport { alpha_max: alpha_max.clone(), entries, max_residual, tol, holds: max_residual <= tol })
}

fn max_shift(op: &OperatorExpr) -> usize {
    op.terms().iter().map(|t| t.shift.unsigned_abs()).max().unwrap_or(0)
}

fn last_support(f: &GridFunction) -> Option<usize> {
    f.values().iter().rposition(|c| c.norm() > 0.0)
}

/// Positivity of the block matrix `([H_j^*, H_i])_{i,j < p}`, `H_i = S^i`,
/// compressed to `[0, n - (p-1) k)` where no block touches the right boundary.
pub fn check_hyponormal_powers(s: &OperatorExpr, p: usize, grid_limit: usize, tol: f64) -> Result<HyponormalReport> {
    let n = s.grid().n();
    if n > grid_limit {
        return Err(Error::TooLarge { n, limit: grid_limit });
    }
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let reach = max_shift(s);
    let window = n.saturating_sub((p - 1) * reach.max(1));
    if window == 0 {
        return Err(Error::WindowTooSmall(format!("p = {p} blocks leave no untruncated points")));
    }
    let powers = (0..p).map(|i| s.pow(i)).collect::<Result<Vec<_>>>()?;
    let mut block = DMatrix::<C64>::zeros(p * window, p * window);
    for i in 0..p {
        for j in 0..p {
            let hj_star = powers[j].adjoint();
            let c = hj_star.compose(&powers[i])?.sub(&powers[i].compose(&hj_star)?)?.to_dense()?;
            block.view_mut((i * window, j * window), (window, window)).copy_from(&c.view((0, 0), (window, window)));
        }
    }
    let trace_scale: f64 = (0..p * window).map(|i| block[(i, i)].norm()).sum();
    let min_eigenvalue = block.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(HyponormalReport {
        p,
        window,
        min_eigenvalue,
        trace_scale,
        tol,
        hyponormal: min_eigenvalue >= -tol * trace_scale.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::symbol::SymbolSpec;

    fn grid() -> GridSpec {
        GridSpec::from_extent(0.25, 64.0).unwrap()
    }

    fn tuple(s: &[SymbolSpec], t: &[f64]) -> TranslationTuple {
        TranslationTuple::new(s.to_vec(), t.to_vec(), grid()).unwrap()
    }

    #[test]
    fn single_operator_structure() {
        let t = tuple(&[SymbolSpec::log_shift()], &[1.0]);
        for which in [Which::Primal, Which::Dual] {
            let g = t.check_orthogonality(3, which, 1e-10).unwrap();
            assert!(g.orthogonal && g.support_certificate, "{g:?}");
            assert!(g.identity_block_residual < 1e-15);
        }
        assert!(t.check_kernel_condition(&MultiIndex::new(vec![3]), 1e-12).unwrap().holds);
        let a = t.check_analytic(3).unwrap();
        assert!(a.support_bound_exact);
        assert_eq!(a.intersection_dim, 256 - 12);
        assert_eq!(t.check_analytic(64).unwrap().intersection_dim, 0);
    }

    #[test]
    fn wandering_for_unit_step() {
        let g = GridSpec::new(0.25, 48).unwrap();
        let t = TranslationTuple::new(vec![SymbolSpec::sqrt_affine()], vec![0.25], g).unwrap();
        let w = t.check_wandering(Which::Primal, 1e-8).unwrap();
        assert_eq!(w.span_dim, 48);
        assert!(w.spans);
    }

    #[test]
    fn wandering_for_pairs() {
        let g = GridSpec::new(1.0, 40).unwrap();
        let t = TranslationTuple::new(vec![SymbolSpec::log_shift(); 2], vec![2.0, 3.0], g).unwrap();
        for which in [Which::Primal, Which::Dual] {
            let w = t.check_wandering(which, 1e-8).unwrap();
            assert!(w.spans, "{w:?}");
            assert_eq!(w.union_points, 40);
        }
    }

    #[test]
    fn kernel_condition_negative_control() {
        let t = tuple(&[SymbolSpec::log_shift()], &[1.0]);
        let dual = t.toral_cauchy_dual(DEFAULT_ALPHA).unwrap().tuple;
        let alpha = MultiIndex::new(vec![2]);
        let ok = kernel_condition(t.ops(), dual.ops(), &t.kernel_basis(), &alpha, 1e-12).unwrap();
        assert!(ok.holds);
        let mut m = t.op(0).single_term().unwrap().multiplier.clone();
        m.iter_mut().for_each(|v| *v = C64::new(0.5, 0.0));
        let backward = OperatorExpr::single(grid(), -1, m).unwrap();
        let perturbed = t.op(0).add(&backward).unwrap();
        let bad = kernel_condition(&[perturbed], dual.ops(), &t.kernel_basis(), &alpha, 1e-12).unwrap();
        assert!(!bad.holds && bad.max_residual > 0.1);
    }

    #[test]
    fn hyponormal_examples() {
        let g = GridSpec::new(0.25, 64).unwrap();
        let e = TranslationTuple::new(vec![SymbolSpec::exp(-1.0)], vec![1.0], g).unwrap();
        let r = check_hyponormal_powers(e.op(0), 2, 4096, 1e-9).unwrap();
        assert!(r.hyponormal, "{r:?}");
        let one = check_hyponormal_powers(e.op(0), 1, 4096, 1e-9).unwrap();
        assert_eq!(one.min_eigenvalue, 0.0);
        assert!(matches!(check_hyponormal_powers(e.op(0), 2, 32, 1e-9), Err(Error::TooLarge { .. })));
    }
}
