//! The analytic model: `U f(z) = sum_k (P S'^{*k} f) z^k`, an `E`-valued
//! function on the polydisc `D_r^d` whose reproducing kernel is
//! `k(z, lambda) = sum_n c_n z^n conj(lambda)^n` with
//! `c_n = P S'^{*n} S'^n |_E`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm, GridFunction, GridSpec, OperatorExpr, C64};
use crate::lattice::{box_lattice, cube, factorial, MultiIndex};
use crate::spectrum::{polydisc_bounds, DEFAULT_KMAX};
use crate::tuple::{KernelConditionReport, TranslationTuple, DEFAULT_ALPHA};

fn monomial(z: &[C64], n: &MultiIndex) -> C64 {
    z.iter().zip(n.components()).map(|(zi, &ni)| zi.powu(ni as u32)).product()
}

fn require_fits(tuple: &TranslationTuple, bound: usize) -> Result<()> {
    let n = tuple.grid().n();
    let needed = bound * tuple.steps().iter().sum::<usize>() + tuple.min_steps();
    if needed > n {
        return Err(Error::TruncationExceedsGrid { needed, available: n });
    }
    Ok(())
}

/// `c_n(x)` for `|n|_inf <= bound` and `x` in the support of `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSeries {
    pub grid: GridSpec,
    pub steps: Vec<usize>,
    pub bound: usize,
    /// Number of grid points in `E = [0, t_min)`.
    pub e_dim: usize,
    pub coefficients: BTreeMap<MultiIndex, Vec<f64>>,
    /// `sup c_{n + e_i} / c_n` over the table, per axis.
    pub axis_ratio: Vec<f64>,
    /// Inner polyradius `r_i = 1 / r(S_i')`.
    pub radius: Vec<f64>,
    /// Kernel condition at `alpha_max = (bound, ..., bound)`, when it fits on the grid.
    pub kernel_condition: Option<KernelConditionReport>,
}

/// `c_n` from the composition `S'^{*n} S'^n`, whose shift-0 multiplier is read on `E`.
pub fn kernel_coefficients(tuple: &TranslationTuple, bound: usize) -> Result<KernelSeries> {
    tuple.require_commuting()?;
    let dual = tuple.toral_cauchy_dual(DEFAULT_ALPHA)?.tuple;
    require_fits(tuple, bound)?;
    let d = tuple.d();
    let e_dim = tuple.min_steps();
    let lattice = cube(d, bound);
    let coefficients = lattice
        .par_iter()
        .map(|n| {
            let p = dual.power(n)?;
            let c = p.adjoint().compose(&p)?.diagonal();
            Ok((n.clone(), c[..e_dim].iter().map(|v| v.re).collect::<Vec<f64>>()))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let axis_ratio = (0..d)
        .map(|i| {
            let mut rho = 0.0f64;
            for (n, c) in &coefficients {
                if let Some(next) = coefficients.get(&n.plus_unit(i)) {
                    for (a, b) in c.iter().zip(next) {
                        if *a > 0.0 {
                            rho = rho.max(b / a);
                        }
                    }
                }
            }
            rho
        })
        .collect();
    let radius = polydisc_bounds(tuple, DEFAULT_KMAX)?
        .inner_radii
        .ok_or(Error::NotLeftInvertible { alpha: 0.0 })?;
    let kernel_condition = tuple.check_kernel_condition(&MultiIndex::new(vec![bound; d]), 1e-10).ok();
    Ok(KernelSeries {
        grid: *tuple.grid(),
        steps: tuple.steps().to_vec(),
        bound,
        e_dim,
        coefficients,
        axis_ratio,
        radius,
        kernel_condition,
    })
}

/// The `d = 2` closed form of `c_n(x)` as the product of four square-root ratios of the symbols.
pub fn pair_coefficient_formula(tuple: &TranslationTuple, n: &MultiIndex) -> Result<Vec<f64>> {
    let symbols = tuple
        .symbols()
        .filter(|s| s.len() == 2)
        .ok_or_else(|| Error::InvalidArgument("closed form needs a symbol pair".into()))?;
    let (p1, p2) = (&symbols[0], &symbols[1]);
    let (a, b) = (n.components()[0] as f64 * tuple.t()[0], n.components()[1] as f64 * tuple.t()[1]);
    let g = tuple.grid();
    (0..tuple.min_steps())
        .map(|j| {
            let x = g.x(j);
            Ok((p1.eval(x)? / p1.eval(x + a)?).sqrt()
                * (p2.eval(x + a)? / p2.eval(x + a + b)?).sqrt()
                * (p1.eval(x + b)? / p1.eval(x + a + b)?).sqrt()
                * (p2.eval(x)? / p2.eval(x + b)?).sqrt())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: [f64; 2],
    /// Bound on the omitted terms plus a rounding allowance; infinite when
    /// the ratio estimate does not give a convergent majorant.
    pub tail: f64,
    pub bound: usize,
}

impl KernelValue {
    pub fn complex(&self) -> C64 {
        C64::new(self.value[0], self.value[1])
    }
}

impl KernelSeries {
    pub fn d(&self) -> usize {
        self.steps.len()
    }

    pub fn coefficient(&self, n: &MultiIndex) -> Option<&[f64]> {
        self.coefficients.get(n).map(Vec::as_slice)
    }

    fn check_inside(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.d() {
            return Err(Error::InvalidArgument(format!("point has {} coordinates, d = {}", z.len(), self.d())));
        }
        for (i, (zi, &r)) in z.iter().zip(&self.radius).enumerate() {
            if zi.norm() >= r {
                return Err(Error::OutsidePolydisc { coordinate: i, modulus: zi.norm(), radius: r });
            }
        }
        Ok(())
    }

    /// Truncated `sum_{|n|_inf <= N} c_n(x_j) z^n conj(lambda)^n` with its tail bound.
    pub fn evaluate(&self, z: &[C64], lambda: &[C64], j: usize) -> Result<KernelValue> {
        self.check_inside(z)?;
        self.check_inside(lambda)?;
        if j >= self.e_dim {
            return Err(Error::InvalidArgument(format!("x index {j} is outside E (dim {})", self.e_dim)));
        }
        let lbar: Vec<C64> = lambda.iter().map(|l| l.conj()).collect();
        let (mut value, mut abs_sum) = (C64::new(0.0, 0.0), 0.0);
        for (n, c) in &self.coefficients {
            let term = monomial(z, n) * monomial(&lbar, n) * c[j];
            value += term;
            abs_sum += term.norm();
        }
        let c0 = self.coefficients[&MultiIndex::zero(self.d())][j];
        let a: Vec<f64> = (0..self.d()).map(|i| self.axis_ratio[i] * z[i].norm() * lambda[i].norm()).collect();
        let tail = if a.iter().any(|&ai| ai >= 1.0) {
            f64::INFINITY
        } else {
            let full: f64 = a.iter().map(|ai| 1.0 / (1.0 - ai)).product();
            let kept: f64 = a.iter().map(|ai| (1.0 - ai.powi(self.bound as i32 + 1)) / (1.0 - ai)).product();
            c0 * (full - kept).max(0.0) + 64.0 * f64::EPSILON * abs_sum
        };
        Ok(KernelValue { value: [value.re, value.im], tail, bound: self.bound })
    }

    /// Coefficients of `k(., lambda) g`: `c_k conj(lambda)^k g`.
    pub fn section(&self, lambda: &[C64], g: &[C64]) -> ModelCoefficients {
        let lbar: Vec<C64> = lambda.iter().map(|l| l.conj()).collect();
        let coefficients = self
            .coefficients
            .iter()
            .map(|(n, c)| {
                let m = monomial(&lbar, n);
                (n.clone(), c.iter().zip(g).map(|(ci, gi)| gi * m * *ci).collect())
            })
            .collect();
        ModelCoefficients { bound: self.bound, e_dim: self.e_dim, coefficients }
    }
}

/// Points strictly inside `D_r^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolydiscSample {
    pub radius: Vec<f64>,
    pub points: Vec<Vec<C64>>,
}

impl PolydiscSample {
    pub fn new(radius: Vec<f64>, points: Vec<Vec<C64>>) -> Result<Self> {
        for p in &points {
            if p.len() != radius.len() {
                return Err(Error::InvalidArgument("sample point has the wrong dimension".into()));
            }
            for (i, (z, &r)) in p.iter().zip(&radius).enumerate() {
                if z.norm() >= r {
                    return Err(Error::OutsidePolydisc { coordinate: i, modulus: z.norm(), radius: r });
                }
            }
        }
        Ok(PolydiscSample { radius, points })
    }

    /// `count` points uniform in `D_{fraction r}^d` (fraction < 1).
    pub fn random(radius: &[f64], fraction: f64, count: usize, seed: u64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::InvalidArgument(format!("sampling fraction must lie in (0, 1), got {fraction}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                radius
                    .iter()
                    .map(|&r| {
                        let rho = fraction * r.min(1e6) * rng.random::<f64>().sqrt();
                        C64::from_polar(rho, std::f64::consts::TAU * rng.random::<f64>())
                    })
                    .collect()
            })
            .collect();
        PolydiscSample::new(radius.to_vec(), points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub points: usize,
    pub x: f64,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub hermitian_residual: f64,
    pub max_tail: f64,
    pub tol: f64,
    pub psd: bool,
}

/// Gram matrix `G_ab = k(z_a, z_b)(x_j)` is Hermitian positive semidefinite.
pub fn check_psd(series: &KernelSeries, samples: &PolydiscSample, j: usize, tol: f64) -> Result<PsdReport> {
    let m = samples.points.len();
    let mut gram = DMatrix::<C64>::zeros(m, m);
    let mut max_tail = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let v = series.evaluate(&samples.points[a], &samples.points[b], j)?;
            gram[(a, b)] = v.complex();
            max_tail = max_tail.max(v.tail);
        }
    }
    let hermitian_residual =
        (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).map(|(a, b)| (gram[(a, b)] - gram[(b, a)].conj()).norm()).fold(0.0, f64::max);
    let trace: f64 = (0..m).map(|a| gram[(a, a)].re).sum();
    let min_eigenvalue = SymmetricEigen::new(gram).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PsdReport {
        points: m,
        x: series.grid.x(j),
        min_eigenvalue,
        trace,
        hermitian_residual,
        max_tail,
        tol,
        psd: min_eigenvalue >= -tol * trace,
    })
}

/// `P S'^{*k} f` for `|k|_inf <= bound`, each living on `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelCoefficients {
    pub bound: usize,
    pub e_dim: usize,
    pub coefficients: BTreeMap<MultiIndex, Vec<C64>>,
}

impl ModelCoefficients {
    pub fn coefficient(&self, k: &MultiIndex) -> Option<&[C64]> {
        self.coefficients.get(k).map(Vec::as_slice)
    }

    /// `U f(lambda)` truncated to the lattice.
    pub fn evaluate(&self, lambda: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.e_dim];
        for (k, a) in &self.coefficients {
            let m = monomial(lambda, k);
            out.iter_mut().zip(a).for_each(|(o, ai)| *o += ai * m);
        }
        out
    }

    /// `sum_k <c_k^{-1} a_k, b_k>` with quadrature weight `h`.
    pub fn h_inner(&self, other: &ModelCoefficients, series: &KernelSeries) -> Result<C64> {
        let h = series.grid.h();
        let mut acc = C64::new(0.0, 0.0);
        for (k, a) in &self.coefficients {
            let (b, c) = match (other.coefficients.get(k), series.coefficient(k)) {
                (Some(b), Some(c)) => (b, c),
                _ => return Err(Error::InvalidArgument(format!("lattice point {k} missing from a table"))),
            };
            acc += a.iter().zip(b).zip(c).map(|((ai, bi), ci)| ai * bi.conj() / *ci).sum::<C64>() * h;
        }
        Ok(acc)
    }

    pub fn h_norm(&self, series: &KernelSeries) -> Result<f64> {
        Ok(self.h_inner(self, series)?.re.max(0.0).sqrt())
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.values().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Coefficient lattice of `U f`.
pub fn model_map(tuple: &TranslationTuple, f: &GridFunction, bound: usize) -> Result<ModelCoefficients> {
    tuple.require_commuting()?;
    let dual = tuple.toral_cauchy_dual(DEFAULT_ALPHA)?.tuple;
    model_map_with(&dual, f, bound)
}

fn model_map_with(dual: &TranslationTuple, f: &GridFunction, bound: usize) -> Result<ModelCoefficients> {
    require_fits(dual, bound)?;
    let e_dim = dual.min_steps();
    let coefficients = cube(dual.d(), bound)
        .par_iter()
        .map(|k| {
            let v = dual.power(k)?.adjoint().apply(f)?;
            Ok((k.clone(), v.values()[..e_dim].to_vec()))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(ModelCoefficients { bound, e_dim, coefficients })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertwiningEntry {
    pub j: usize,
    pub residual: f64,
    /// Worst residual on the `k_j = 0` face, where `U S_j f` must vanish.
    pub face_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertwiningReport {
    pub bound: usize,
    pub entries: Vec<IntertwiningEntry>,
    pub max_residual: f64,
    pub tol: f64,
    pub holds: bool,
}

/// Coefficients of `U(S_j f)` against those of `z_j U f`, relative to the
/// largest coefficient of either side.
pub fn check_intertwining(tuple: &TranslationTuple, f: &GridFunction, bound: usize, tol: f64) -> Result<IntertwiningReport> {
    tuple.require_commuting()?;
    let dual = tuple.toral_cauchy_dual(DEFAULT_ALPHA)?.tuple;
    let uf = model_map_with(&dual, f, bound)?;
    let mut entries = Vec::new();
    for j in 0..tuple.d() {
        let usf = model_map_with(&dual, &tuple.op(j).apply(f)?, bound)?;
        let scale = uf.max_abs().max(usf.max_abs());
        let (mut residual, mut face_residual) = (0.0f64, 0.0f64);
        for (k, lhs) in &usf.coefficients {
            let r = match k.minus_unit(j) {
                Some(prev) => {
                    let rhs = &uf.coefficients[&prev];
                    lhs.iter().zip(rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
                }
                None => {
                    let r = lhs.iter().map(|a| a.norm()).fold(0.0, f64::max);
                    face_residual = face_residual.max(r);
                    r
                }
            };
            residual = residual.max(r);
        }
        if scale > 0.0 {
            residual /= scale;
            face_residual /= scale;
        }
        entries.push(IntertwiningEntry { j, residual, face_residual });
    }
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    Ok(IntertwiningReport { bound, entries, max_residual, tol, holds: max_residual <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub bound: usize,
    pub pairs: usize,
    /// Largest `|P S'^{*j} S'^k e|` over `j != k` and basis vectors of `E`.
    pub max_off_diagonal: f64,
    pub worst: Option<(MultiIndex, MultiIndex)>,
    pub tol: f64,
    pub holds: bool,
}

/// `P S'^{*j} S'^k |_E = 0` for `j != k`, `|j|_inf, |k|_inf <= bound`.
pub fn check_diagonal_orthogonality(tuple: &TranslationTuple, bound: usize, tol: f64) -> Result<DiagonalReport> {
    tuple.require_commuting()?;
    let dual = tuple.toral_cauchy_dual(DEFAULT_ALPHA)?.tuple;
    require_fits(tuple, bound)?;
    let e_dim = dual.min_steps();
    let lattice = cube(dual.d(), bound);
    let powers = lattice.iter().map(|k| dual.power(k)).collect::<Result<Vec<_>>>()?;
    let adjoints: Vec<OperatorExpr> = powers.iter().map(OperatorExpr::adjoint).collect();
    let mut max_off_diagonal = 0.0f64;
    let mut worst = None;
    for (a, ja) in adjoints.iter().zip(&lattice) {
        for (p, k) in powers.iter().zip(&lattice) {
            if ja == k {
                continue;
            }
            let op = a.compose(p)?;
            for term in op.terms() {
                for row in 0..e_dim {
                    let src = row as isize - term.shift;
                    if (0..e_dim as isize).contains(&src) && term.multiplier[row].norm() > max_off_diagonal {
                        max_off_diagonal = term.multiplier[row].norm();
                        worst = Some((ja.clone(), k.clone()));
                    }
                }
            }
        }
    }
    let pairs = lattice.len() * (lattice.len() - 1);
    Ok(DiagonalReport { bound, pairs, max_off_diagonal, worst, tol, holds: max_off_diagonal <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalModelEntry {
    pub j: usize,
    pub alpha: MultiIndex,
    /// `alpha_j / (d + |alpha| - 1)`.
    pub coefficient: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalModelReport {
    pub alpha_max: MultiIndex,
    pub entries: Vec<SphericalModelEntry>,
    /// `a_alpha = (d + |alpha| - 1)! / ((d - 1)! alpha!)`.
    pub a_coefficients: Vec<(MultiIndex, f64)>,
    pub max_residual: f64,
    pub tol: f64,
    pub holds: bool,
}

/// `S_j^* S^{s alpha} g = alpha_j / (d + |alpha| - 1) S^{s (alpha - e_j)} g`
/// (zero target when `alpha_j = 0`) for every kernel basis vector `g`.
pub fn spherical_model_condition(tuple: &TranslationTuple, alpha_max: &MultiIndex, tol: f64) -> Result<SphericalModelReport> {
    let d = tuple.d();
    if alpha_max.dim() != d {
        return Err(Error::InvalidArgument(format!("alpha_max {alpha_max} does not match d = {d}")));
    }
    let sd = tuple.spherical_cauchy_dual(DEFAULT_ALPHA)?;
    sd.require_commuting()?;
    let dual = &sd.tuple;
    let grid = *tuple.grid();
    let basis = tuple.kernel_basis();
    let mut entries = Vec::new();
    let mut a_coefficients = Vec::new();
    for alpha in box_lattice(alpha_max.components()) {
        let reach = dual.shift_of(&alpha) + tuple.min_steps();
        if reach > dual.valid_len() {
            return Err(Error::WindowTooSmall(format!("S^s^{alpha} E leaves the exact window of the spherical dual")));
        }
        let total = alpha.total();
        a_coefficients.push((alpha.clone(), factorial(d + total - 1) / (factorial(d - 1) * alpha.factorial())));
        let power = dual.power(&alpha)?;
        for j in 0..d {
            let lhs_op = tuple.adjoint(j).compose(&power)?;
            let (coefficient, rhs_op) = match alpha.minus_unit(j) {
                Some(prev) => {
                    let c = alpha.components()[j] as f64 / (d + total - 1) as f64;
                    (c, Some(dual.power(&prev)?.scale(C64::new(c, 0.0))))
                }
                None => (0.0, None),
            };
            let mut residual = 0.0f64;
            for g in &basis {
                let mut diff = lhs_op.apply(g)?;
                if let Some(r) = &rhs_op {
                    diff = diff.sub(&r.apply(g)?);
                }
                residual = residual.max(norm(&diff, &grid)? / norm(g, &grid)?);
            }
            entries.push(SphericalModelEntry { j, alpha: alpha.clone(), coefficient, residual, pass: residual <= tol });
        }
    }
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    Ok(SphericalModelReport {
        alpha_max: alpha_max.clone(),
        entries,
        a_coefficients,
        max_residual,
        tol,
        holds: max_residual <= tol,
    })
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::grid::GridSpec;
    use crate::symbol::SymbolSpec;
    use proptest::prelude::*;

    fn pair() -> impl Strategy<Value = TranslationTuple> {
        let symbols = prop_oneof![
            Just(SymbolSpec::log_shift()),
            Just(SymbolSpec::two_minus_exp()),
            Just(SymbolSpec::moebius(0.5)),
            Just(SymbolSpec::reciprocal_affine()),
            Just(SymbolSpec::affine(1.0, 1.0)),
            Just(SymbolSpec::constant(2.0)),
        ];
        (symbols, 1usize..4, 1usize..4).prop_map(|(s, a, b)| {
            let g = GridSpec::from_extent(0.25, 32.0).unwrap();
            TranslationTuple::new(vec![s.clone(), s], vec![a as f64 * 0.25, b as f64 * 0.25], g).unwrap()
        })
    }

    fn point() -> impl Strategy<Value = [(f64, f64); 2]> {
        [(0.0..1.0f64, 0.0..std::f64::consts::TAU), (0.0..1.0f64, 0.0..std::f64::consts::TAU)]
    }

    fn inside(series: &KernelSeries, p: [(f64, f64); 2]) -> Vec<C64> {
        p.iter().zip(&series.radius).map(|(&(rho, arg), r)| C64::from_polar(0.8 * rho * r.min(1.0), arg)).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn kernel_is_hermitian(t in pair(), p in point(), q in point()) {
            let s = kernel_coefficients(&t, 4).unwrap();
            let (z, l) = (inside(&s, p), inside(&s, q));
            for j in 0..s.e_dim {
                let a = s.evaluate(&z, &l, j).unwrap().complex();
                let b = s.evaluate(&l, &z, j).unwrap().complex();
                prop_assert!((a - b.conj()).norm() <= 1e-14 * (1.0 + a.norm()));
            }
        }

        #[test]
        fn truncation_is_monotone_and_within_tail(t in pair(), p in point()) {
            let small = kernel_coefficients(&t, 3).unwrap();
            let big = kernel_coefficients(&t, 5).unwrap();
            let z = inside(&small, p);
            for j in 0..small.e_dim {
                let a = small.evaluate(&z, &z, j).unwrap();
                let b = big.evaluate(&z, &z, j).unwrap();
                prop_assert!(b.value[0] >= a.value[0] - 1e-15);
                prop_assert!(b.value[0] <= a.value[0] + a.tail);
            }
        }

        #[test]
        fn reproducing_identity(t in pair(), q in point(), g in [(-1.0..1.0f64, -1.0..1.0f64), (-1.0..1.0f64, -1.0..1.0f64)], seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let s = kernel_coefficients(&t, 3).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = t.grid().n();
            let f = GridFunction::new((0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect());
            let u = model_map(&t, &f, 3).unwrap();
            let lambda = inside(&s, q);
            let g: Vec<C64> = (0..s.e_dim).map(|j| C64::new(g[j % 2].0, g[j % 2].1)).collect();
            let lhs = u.h_inner(&s.section(&lambda, &g), &s).unwrap();
            let rhs: C64 = u.evaluate(&lambda).iter().zip(&g).map(|(a, b)| a * b.conj()).sum::<C64>() * t.grid().h();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
