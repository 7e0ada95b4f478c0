//! Spectral radii, polydisc bounds for the Taylor spectrum, adjoint
//! eigenfunctions, point-spectrum evidence and the `M_theta` rotation
//! identity.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, OperatorExpr, ShiftTerm, C64};
use crate::tuple::{TranslationTuple, DEFAULT_ALPHA};

/// Default largest power used for spectral radius estimates.
pub const DEFAULT_KMAX: usize = 32;

const RADIUS_EQ_TOL: f64 = 1e-9;

/// Largest `k <= cap` with `k * steps < n`.
pub fn fitting_kmax(steps: usize, n: usize, cap: usize) -> usize {
    if steps == 0 {
        cap
    } else {
        cap.min((n - 1) / steps)
    }
}

/// `||S^k||` as the grid sup of the composed multiplier, with the location
/// of the sup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerNorm {
    pub k: usize,
    pub norm: f64,
    pub argmax: usize,
    /// The sup sits on the last grid point, so the true norm may be larger.
    pub at_edge: bool,
}

fn power_norm_detail(s: &OperatorExpr, k: usize) -> Result<PowerNorm> {
    let term = s.single_term()?;
    let n = s.grid().n();
    let needed = k * term.shift.unsigned_abs() + 1;
    if needed > n {
        return Err(Error::TruncationExceedsGrid { needed, available: n });
    }
    let p = s.pow(k)?;
    let m = &p.single_term()?.multiplier;
    let (argmax, norm) = m
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, v)| if v > best.1 { (j, v) } else { best });
    Ok(PowerNorm { k, norm, argmax, at_edge: k > 0 && argmax + 1 == n })
}

/// Grid sup of the multiplier of `S^k` for a single-term `S`.
pub fn power_norm(s: &OperatorExpr, k: usize) -> Result<f64> {
    power_norm_detail(s, k).map(|p| p.norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralRadius {
    pub kmax: usize,
    pub norms: Vec<PowerNorm>,
    /// `||S^kmax|| / ||S^(kmax-1)||`.
    pub ratio: f64,
    /// `||S^kmax||^(1/kmax)`.
    pub root: f64,
    pub gap: f64,
    pub closed_form: Option<f64>,
    /// Closed form when available, otherwise the root estimate.
    pub estimate: f64,
    pub edge_hit: bool,
}

/// `lim ||S^k||^(1/k)` by the ratio and root methods. `closed_form` is the
/// constant weight, when the symbol has one, and then `r = closed_form`.
pub fn spectral_radius(s: &OperatorExpr, kmax: usize, closed_form: Option<f64>) -> Result<SpectralRadius> {
    if kmax < 4 {
        return Err(Error::InvalidArgument(format!("kmax must be at least 4, got {kmax}")));
    }
    let norms = (1..=kmax).map(|k| power_norm_detail(s, k)).collect::<Result<Vec<_>>>()?;
    let last = norms[kmax - 1].norm;
    let prev = norms[kmax - 2].norm;
    let ratio = if prev > 0.0 { last / prev } else { 0.0 };
    let root = last.powf(1.0 / kmax as f64);
    Ok(SpectralRadius {
        kmax,
        ratio,
        root,
        gap: (ratio - root).abs(),
        closed_form,
        estimate: closed_form.unwrap_or(root),
        edge_hit: norms.iter().any(|p| p.at_edge),
        norms,
    })
}

/// `D_r^d ⊆ σ(S) ⊆ D_R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    pub outer: Vec<SpectralRadius>,
    pub dual: Option<Vec<SpectralRadius>>,
    /// `r_i = 1 / r(S_i')`; absent when the tuple is not left-invertible.
    pub inner_radii: Option<Vec<f64>>,
    pub outer_radii: Vec<f64>,
    pub inner_error: Option<String>,
    /// `r_i <= R_i` on every axis.
    pub consistent: bool,
    /// `r = R`, so the spectrum is the polydisc itself.
    pub polydisc_equality: bool,
    pub toral_isometry: bool,
    pub note: String,
}

pub fn polydisc_bounds(tuple: &TranslationTuple, kmax: usize) -> Result<SpectralBounds> {
    let n = tuple.grid().n();
    let fit = |i: usize| fitting_kmax(tuple.steps()[i], n, kmax);
    let outer = (0..tuple.d())
        .map(|i| spectral_radius(tuple.op(i), fit(i), tuple.constant_weights()[i]))
        .collect::<Result<Vec<_>>>()?;
    let outer_radii: Vec<f64> = outer.iter().map(|s| s.estimate).collect();
    let (dual, inner_error) = match tuple.toral_cauchy_dual(DEFAULT_ALPHA) {
        Ok(d) => {
            let radii = (0..tuple.d())
                .map(|i| spectral_radius(d.tuple.op(i), fit(i), d.tuple.constant_weights()[i]))
                .collect::<Result<Vec<_>>>()?;
            (Some(radii), None)
        }
        Err(e @ Error::NotLeftInvertible { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let inner_radii: Option<Vec<f64>> =
        dual.as_ref().map(|d| d.iter().map(|s| if s.estimate > 0.0 { 1.0 / s.estimate } else { f64::INFINITY }).collect());
    let (consistent, polydisc_equality, toral_isometry) = match &inner_radii {
        Some(r) => {
            let consistent = r.iter().zip(&outer_radii).all(|(a, b)| *a <= b + 1e-6);
            let eq = r.iter().zip(&outer_radii).all(|(a, b)| (a - b).abs() <= RADIUS_EQ_TOL);
            let iso = eq && outer_radii.iter().all(|v| (v - 1.0).abs() <= RADIUS_EQ_TOL);
            (consistent, eq, iso)
        }
        None => (true, false, false),
    };
    let note = if polydisc_equality {
        "inner and outer polyradii agree: the Taylor spectrum is the closed polydisc of that radius".to_string()
    } else {
        "annular sandwich only; spherical symmetry of the spectrum is not tested".to_string()
    };
    Ok(SpectralBounds { outer, dual, inner_radii, outer_radii, inner_error, consistent, polydisc_equality, toral_isometry, note })
}

/// Eigenfunction of `S^*` built from a seed on `[0, t)`.
#[derive(Debug, Clone)]
pub struct EigenfunctionWitness {
    pub lambda: C64,
    pub f: GridFunction,
    /// `max |S^* f - lambda f| / max |f|` over `[0, n - k)`.
    pub residual: f64,
    /// Energy of `f` on consecutive blocks of length `k`.
    pub block_energies: Vec<f64>,
    /// Geometric mean ratio of successive block energies over the second half.
    pub convergence_ratio: f64,
    pub converges: bool,
}

/// `f(x + t) = lambda f(x) / w(x + t)`, which solves `S^* f = lambda f`.
pub fn adjoint_eigenfunction(s: &OperatorExpr, lambda: C64, seed: &[C64]) -> Result<EigenfunctionWitness> {
    let term = s.single_term()?;
    if term.shift <= 0 {
        return Err(Error::InvalidArgument("expected a forward weighted translation".into()));
    }
    let k = term.shift as usize;
    let n = s.grid().n();
    if seed.len() != k || k >= n {
        return Err(Error::InvalidArgument(format!("seed needs {k} values on [0, t)")));
    }
    let w = &term.multiplier;
    let mut f = vec![C64::new(0.0, 0.0); n];
    f[..k].copy_from_slice(seed);
    for j in k..n {
        f[j] = if lambda == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { lambda * f[j - k] / w[j] };
    }
    let f = GridFunction::new(f);
    let sf = s.adjoint().apply(&f)?;
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    let residual = (0..n - k).map(|j| (sf.values()[j] - lambda * f.values()[j]).norm()).fold(0.0, f64::max) / scale;
    let block_energies: Vec<f64> =
        f.values().chunks(k).filter(|c| c.len() == k).map(|c| c.iter().map(|v| v.norm_sqr()).sum()).collect();
    let convergence_ratio = block_ratio(&block_energies);
    Ok(EigenfunctionWitness {
        lambda,
        f,
        residual,
        converges: convergence_ratio < 1.0,
        block_energies,
        convergence_ratio,
    })
}

fn block_ratio(b: &[f64]) -> f64 {
    let m = b.len();
    if m < 2 {
        return 0.0;
    }
    let (lo, hi) = (m / 2, m - 1);
    let (a, z) = (b[lo.min(hi - 1)], b[hi]);
    let steps = (hi - lo.min(hi - 1)) as f64;
    if a == 0.0 {
        0.0
    } else {
        (z / a).powf(1.0 / steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSpectrumEntry {
    pub lambda: [f64; 2],
    pub method: String,
    /// Smallest pivot `|lambda|` or smallest weight used by the substitution.
    pub min_pivot: f64,
    /// Points on which the zero solution is forced.
    pub window: usize,
    pub only_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSpectrumReport {
    pub entries: Vec<PointSpectrumEntry>,
    pub empty: bool,
}

/// `S f = lambda f` has only the zero solution: for `lambda != 0` the system
/// is lower triangular with pivots `-lambda`; for `lambda = 0` positive
/// weights force `f = 0` wherever `S f` is seen on the grid.
pub fn check_no_point_spectrum(s: &OperatorExpr, lambdas: &[C64]) -> Result<PointSpectrumReport> {
    let term = s.single_term()?;
    if term.shift <= 0 {
        return Err(Error::InvalidArgument("expected a forward weighted translation".into()));
    }
    let k = term.shift as usize;
    let n = s.grid().n();
    let w = &term.multiplier;
    let entries = lambdas
        .iter()
        .map(|&lambda| {
            if lambda.norm() > 0.0 {
                // Forward substitution on (S - lambda) f = 0.
                let mut f = vec![C64::new(0.0, 0.0); n];
                for j in 0..n {
                    let sf = if j >= k { w[j] * f[j - k] } else { C64::new(0.0, 0.0) };
                    f[j] = sf / lambda;
                }
                PointSpectrumEntry {
                    lambda: [lambda.re, lambda.im],
                    method: "forward-substitution".into(),
                    min_pivot: lambda.norm(),
                    window: n,
                    only_zero: f.iter().all(|v| v.norm() == 0.0),
                }
            } else {
                let min_pivot = w[k..].iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
                PointSpectrumEntry {
                    lambda: [0.0, 0.0],
                    method: "injectivity".into(),
                    min_pivot,
                    window: n - k,
                    only_zero: min_pivot > 0.0,
                }
            }
        })
        .collect::<Vec<_>>();
    let empty = entries.iter().all(|e| e.only_zero);
    Ok(PointSpectrumReport { entries, empty })
}

/// Smallest singular value of `S - lambda I` restricted to functions
/// supported on `[0, n - k)`, whose images stay on the grid.
pub fn smallest_singular_value(s: &OperatorExpr, lambda: C64) -> Result<f64> {
    let term = s.single_term()?;
    let k = term.shift.unsigned_abs();
    let n = s.grid().n();
    if k >= n {
        return Err(Error::WindowTooSmall("translation exceeds the grid".into()));
    }
    let mut a = s.to_dense()?;
    for j in 0..n {
        a[(j, j)] -= lambda;
    }
    let cols = a.columns(0, n - k).into_owned();
    let sv = cols.svd(false, false).singular_values;
    Ok(sv.iter().copied().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularSymmetryEntry {
    pub theta: f64,
    pub j: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularSymmetryReport {
    pub entries: Vec<CircularSymmetryEntry>,
    pub max_residual: f64,
    pub tol: f64,
    /// Every rotation identity holds, so the spectrum is Reinhardt.
    pub reinhardt: bool,
}

/// Dense `M_theta = diag(e^{i theta x})`.
pub fn rotation(grid: &crate::grid::GridSpec, theta: f64) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        grid.n(),
        grid.points().map(|x| C64::from_polar(1.0, theta * x)),
    ))
}

/// `max |M_theta^* S_j M_theta - e^{-i theta t_j} S_j|` on dense matrices.
pub fn check_circular_symmetry(tuple: &TranslationTuple, thetas: &[f64], tol: f64) -> Result<CircularSymmetryReport> {
    let dense = tuple.ops().iter().map(OperatorExpr::to_dense).collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    for &theta in thetas {
        let m = rotation(tuple.grid(), theta);
        for (j, s) in dense.iter().enumerate() {
            // Diagonal conjugation, entrywise: conj(m_a) S_ab m_b.
            let lhs = DMatrix::from_fn(s.nrows(), s.ncols(), |a, b| m[(a, a)].conj() * s[(a, b)] * m[(b, b)]);
            let rhs = s * C64::from_polar(1.0, -theta * tuple.t()[j]);
            let residual = (lhs - rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
            entries.push(CircularSymmetryEntry { theta, j, residual });
        }
    }
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    Ok(CircularSymmetryReport { entries, max_residual, tol, reinhardt: max_residual <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDensityEntry {
    pub i: usize,
    pub null_dim: usize,
    /// `min(i t_min / h, n)`.
    pub expected_dim: usize,
    /// Every null vector lives on `[0, i t_min)`.
    pub support_ok: bool,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDensityReport {
    pub entries: Vec<KernelDensityEntry>,
    /// The last kernel is the whole grid.
    pub exhausted: bool,
    pub all_match: bool,
}

/// Null space of `h -> (S_1^{*i} h, ..., S_d^{*i} h)` for `i = 1..=imax`,
/// from the eigen-decomposition of the dense Gram matrix.
pub fn check_kernel_density(tuple: &TranslationTuple, imax: usize) -> Result<KernelDensityReport> {
    check_kernel_density_at(tuple, &(1..=imax).collect::<Vec<_>>())
}

/// As [`check_kernel_density`] for selected powers `i` (ascending).
pub fn check_kernel_density_at(tuple: &TranslationTuple, powers: &[usize]) -> Result<KernelDensityReport> {
    let n = tuple.grid().n();
    let kmin = tuple.min_steps();
    let adj = tuple.ops().iter().map(|s| s.adjoint()).collect::<Vec<_>>();
    let mut entries = Vec::new();
    for &i in powers {
        let mut gram = OperatorExpr::zero(*tuple.grid());
        for a in &adj {
            let m = normalize_rows(&a.pow(i)?)?;
            gram = gram.add(&m.adjoint().compose(&m)?)?;
        }
        let eig = SymmetricEigen::new(gram.to_dense()?);
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max).max(1.0);
        let null: Vec<usize> = (0..n).filter(|&c| eig.eigenvalues[c].abs() <= 1e-12 * top).collect();
        let expected_dim = (i * kmin).min(n);
        let support_ok = null
            .iter()
            .all(|&c| (expected_dim..n).all(|j| eig.eigenvectors[(j, c)].norm() <= 1e-10));
        entries.push(KernelDensityEntry {
            i,
            null_dim: null.len(),
            expected_dim,
            support_ok,
            matches: support_ok && null.len() == expected_dim,
        });
    }
    Ok(KernelDensityReport {
        exhausted: entries.last().is_some_and(|e| e.null_dim == n),
        all_match: entries.iter().all(|e| e.matches),
        entries,
    })
}

/// Row scaling keeps the kernel and removes the weight magnitude.
fn normalize_rows(m: &OperatorExpr) -> Result<OperatorExpr> {
    let n = m.grid().n();
    let norms: Vec<f64> = (0..n).map(|r| m.terms().iter().map(|t| t.multiplier[r].norm_sqr()).sum::<f64>().sqrt()).collect();
    let terms = m
        .terms()
        .iter()
        .map(|t| ShiftTerm {
            shift: t.shift,
            multiplier: t.multiplier.iter().zip(&norms).map(|(&v, &r)| if r > 0.0 { v / r } else { v }).collect(),
        })
        .collect();
    OperatorExpr::from_terms(*m.grid(), terms)
}

/// Smallest `i` with `i t_min >= x_max`.
pub fn exhausting_index(tuple: &TranslationTuple) -> usize {
    tuple.grid().n().div_ceil(tuple.min_steps())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::symbol::SymbolSpec;
    use crate::tuple::make_weighted_translation;

    fn grid() -> GridSpec {
        GridSpec::from_extent(0.25, 64.0).unwrap()
    }

    fn op(s: SymbolSpec) -> OperatorExpr {
        make_weighted_translation(&s, 1.0, &grid()).unwrap()
    }

    #[test]
    fn power_norm_examples() {
        let c = op(SymbolSpec::constant(2.0));
        assert!((1..10).all(|k| power_norm(&c, k).unwrap() == 1.0));
        let e = op(SymbolSpec::exp(-1.0));
        for k in 1..10 {
            assert!((power_norm(&e, k).unwrap() - (-(k as f64) / 2.0).exp()).abs() < 1e-14);
        }
        let a = op(SymbolSpec::affine(1.0, 1.0));
        for k in 1..10 {
            assert!((power_norm(&a, k).unwrap() - (k as f64 + 1.0).sqrt()).abs() < 1e-12);
        }
        assert!(matches!(power_norm(&a, 64), Err(Error::TruncationExceedsGrid { .. })));
    }

    #[test]
    fn spectral_radius_examples() {
        let e = op(SymbolSpec::exp(-1.0));
        let r = spectral_radius(&e, 32, SymbolSpec::exp(-1.0).constant_weight(1.0)).unwrap();
        assert!((r.estimate - (-0.5f64).exp()).abs() < 1e-12);
        assert!((r.root - (-0.5f64).exp()).abs() < 1e-12);
        let a = op(SymbolSpec::affine(1.0, 1.0));
        let r = spectral_radius(&a, 32, None).unwrap();
        assert!((r.root - 33f64.powf(1.0 / 64.0)).abs() < 1e-12);
        assert!(r.root > 1.05 && r.gap > 0.0);
        assert!(spectral_radius(&a, 3, None).is_err());
    }

    #[test]
    fn polydisc_examples() {
        let g = grid();
        let iso = TranslationTuple::new(vec![SymbolSpec::constant(1.0); 2], vec![1.0, 2.0], g).unwrap();
        let b = polydisc_bounds(&iso, DEFAULT_KMAX).unwrap();
        assert_eq!(b.outer_radii, vec![1.0, 1.0]);
        assert_eq!(b.inner_radii, Some(vec![1.0, 1.0]));
        assert!(b.polydisc_equality && b.toral_isometry);
        let e = TranslationTuple::new(vec![SymbolSpec::exp(-1.0)], vec![1.0], g).unwrap();
        let b = polydisc_bounds(&e, DEFAULT_KMAX).unwrap();
        assert!((b.inner_radii.unwrap()[0] - (-0.5f64).exp()).abs() < 1e-12);
        assert!(b.polydisc_equality && !b.toral_isometry);
        let a = TranslationTuple::new(vec![SymbolSpec::affine(1.0, 1.0)], vec![1.0], g).unwrap();
        let b = polydisc_bounds(&a, DEFAULT_KMAX).unwrap();
        assert!(b.consistent && !b.polydisc_equality);
        assert!(b.dual.unwrap()[0].edge_hit);
    }

    #[test]
    fn eigenfunction_examples() {
        let seed = vec![C64::new(1.0, 0.0); 4];
        let c = op(SymbolSpec::constant(1.0));
        let w = adjoint_eigenfunction(&c, C64::new(0.5, 0.0), &seed).unwrap();
        for j in 0..256 {
            assert!((w.f.values()[j].re - 0.5f64.powi((j / 4) as i32)).abs() < 1e-15);
        }
        assert!(w.residual == 0.0 && w.converges);
        assert!((w.convergence_ratio - 0.25).abs() < 1e-12);
        let z = adjoint_eigenfunction(&c, C64::new(0.0, 0.0), &seed).unwrap();
        assert!(z.f.values()[4..].iter().all(|v| v.norm() == 0.0));
        assert_eq!(z.residual, 0.0);
        let e = op(SymbolSpec::exp(-1.0));
        let l = C64::new(0.9 * (-0.5f64).exp(), 0.0);
        let w = adjoint_eigenfunction(&e, l, &seed).unwrap();
        assert!(w.residual < 1e-12);
        assert!((w.convergence_ratio - 0.81).abs() < 1e-9);
    }

    #[test]
    fn no_point_spectrum() {
        let lambdas = [C64::new(0.3, 0.0), C64::new(-0.1, 0.7), C64::new(0.0, 0.0)];
        for (_, s) in crate::symbol::catalog() {
            let r = check_no_point_spectrum(&op(s), &lambdas).unwrap();
            assert!(r.empty);
        }
    }

    #[test]
    fn singular_values_for_isometry() {
        let g = GridSpec::new(0.25, 64).unwrap();
        let s = make_weighted_translation(&SymbolSpec::constant(1.0), 1.0, &g).unwrap();
        for l in [0.0, 0.3, 0.8] {
            let sv = smallest_singular_value(&s, C64::new(l, 0.0)).unwrap();
            assert!(sv >= 1.0 - l - 1e-12, "lambda {l}: {sv}");
        }
    }

    #[test]
    fn circular_symmetry_examples() {
        let g = GridSpec::new(0.25, 64).unwrap();
        let t = TranslationTuple::new(vec![SymbolSpec::log_shift(), SymbolSpec::log_shift()], vec![1.0, 0.5], g).unwrap();
        let r = check_circular_symmetry(&t, &[0.0, std::f64::consts::PI, 1.234], 1e-12).unwrap();
        assert!(r.reinhardt, "{}", r.max_residual);
        assert_eq!(r.entries[0].residual, 0.0);
    }

    #[test]
    fn kernel_density_examples() {
        let g = GridSpec::new(0.25, 64).unwrap();
        let t = TranslationTuple::new(vec![SymbolSpec::moebius(0.5), SymbolSpec::exp(-1.0)], vec![1.0, 0.5], g).unwrap();
        let imax = exhausting_index(&t);
        assert_eq!(imax, 32);
        let r = check_kernel_density(&t, imax).unwrap();
        assert!(r.all_match && r.exhausted);
        assert_eq!(r.entries[0].null_dim, 2);
        assert_eq!(r.entries[4].null_dim, 10);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::grid::GridSpec;
    use crate::lattice::MultiIndex;
    use crate::symbol::catalog;
    use crate::tuple::{make_weighted_translation, toral_defect};
    use proptest::prelude::*;

    fn symbol() -> impl Strategy<Value = crate::symbol::SymbolSpec> {
        (0..catalog().len()).prop_map(|i| catalog()[i].1.clone())
    }

    fn grid() -> GridSpec {
        GridSpec::from_extent(0.25, 32.0).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn power_norms_are_submultiplicative(s in symbol(), steps in 1usize..5, a in 1usize..10, b in 1usize..10) {
            let op = make_weighted_translation(&s, steps as f64 * 0.25, &grid()).unwrap();
            let (na, nb, nab) = (power_norm(&op, a).unwrap(), power_norm(&op, b).unwrap(), power_norm(&op, a + b).unwrap());
            prop_assert!(nab <= na * nb * (1.0 + 1e-12));
        }

        #[test]
        fn inner_radius_below_outer(s1 in symbol(), steps in 1usize..5, second in any::<bool>()) {
            let t = steps as f64 * 0.25;
            let tuple = if second {
                TranslationTuple::new(vec![s1.clone(), s1], vec![t, 2.0 * t], grid()).unwrap()
            } else {
                TranslationTuple::new(vec![s1], vec![t], grid()).unwrap()
            };
            let b = polydisc_bounds(&tuple, 16).unwrap();
            prop_assert!(b.consistent);
            for (r, big_r) in b.inner_radii.unwrap().iter().zip(&b.outer_radii) {
                prop_assert!(*r <= big_r + 1e-6);
            }
        }

        #[test]
        fn rotation_preserves_defects(s in symbol(), steps in 1usize..5, theta in 0.0..std::f64::consts::TAU) {
            let small = GridSpec::new(0.25, 48).unwrap();
            let tuple = TranslationTuple::new(vec![s], vec![steps as f64 * 0.25], small).unwrap();
            let sym = check_circular_symmetry(&tuple, &[theta], 1e-12).unwrap();
            prop_assert!(sym.reinhardt, "{}", sym.max_residual);
            // M_theta S M_theta^* = e^{i theta t} S leaves S^* S, hence every defect, unchanged.
            let s = tuple.op(0).to_dense().unwrap();
            let m = rotation(&small, theta);
            let rotated = &m * &s * m.adjoint();
            let d0 = s.adjoint() * &s;
            let d1 = rotated.adjoint() * &rotated;
            prop_assert!((d0 - d1).iter().all(|v| v.norm() <= 1e-12));
            prop_assert!(toral_defect(&tuple, &MultiIndex::new(vec![2])).is_ok());
        }

        #[test]
        fn adjoint_eigenvectors_inside_inner_disc(s in symbol(), re in -1.0..1.0f64, im in -1.0..1.0f64) {
            let tuple = TranslationTuple::new(vec![s], vec![1.0], grid()).unwrap();
            let r = polydisc_bounds(&tuple, 16).unwrap().inner_radii.unwrap()[0];
            let lambda = C64::new(re, im) * (0.9 * r.min(1e3) / 2f64.sqrt());
            let w = adjoint_eigenfunction(tuple.op(0), lambda, &[C64::new(1.0, 0.0); 4]).unwrap();
            prop_assert!(w.residual <= 1e-12, "{}", w.residual);
        }

        #[test]
        fn no_eigenvalues(s in symbol(), re in -1.0..1.0f64, im in -1.0..1.0f64) {
            let tuple = TranslationTuple::new(vec![s], vec![0.5], grid()).unwrap();
            prop_assert!(check_no_point_spectrum(tuple.op(0), &[C64::new(re, im), C64::new(0.0, 0.0)]).unwrap().empty);
        }
    }
}
