//! Exact algebra of weighted translation operators on a uniform grid over
//! the half-line.
//!
//! An [`OperatorExpr`] is a finite sum of shift terms `(k, m)` acting by
//! `g(x_j) = m(x_j) f(x_{j-k})`, with `g = 0` wherever `j - k` falls off the
//! grid. Every operator built from weighted translations, their adjoints and
//! multiplication operators stays in this class, so composition and adjoints
//! are exact and cost `O(n)` per pair of terms. [`OperatorExpr::to_dense`]
//! gives the matrix oracle used to cross-check the algebra.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Largest grid accepted by the dense-matrix oracle.
pub const DENSE_LIMIT: usize = 4096;

const GRID_MULTIPLE_TOL: f64 = 1e-9;

/// Uniform grid `x_j = j h`, `j = 0..n`, with quadrature weight `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    h: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {h}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 points, got {n}")));
        }
        Ok(GridSpec { h, n })
    }

    /// Grid covering `[0, x_max)`; `x_max / h` must be integral.
    pub fn from_extent(h: f64, x_max: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {h}")));
        }
        let n = integral_ratio(x_max, h).ok_or_else(|| {
            Error::InvalidArgument(format!("x_max = {x_max} is not a multiple of h = {h}"))
        })?;
        GridSpec::new(h, n)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    pub fn x_max(&self) -> f64 {
        self.n as f64 * self.h
    }

    /// Number of grid steps in the translation `t`, which must be `k h` with `k >= 1`.
    pub fn steps(&self, t: f64) -> Result<usize> {
        match integral_ratio(t, self.h) {
            Some(k) if k >= 1 => Ok(k),
            _ => Err(Error::NonGridTranslation { t, h: self.h }),
        }
    }

    /// Index of the grid point `x`, if `x` is one.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        integral_ratio(x, self.h).filter(|&j| j < self.n)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Grid function of the indicator of `[a, b)`.
    pub fn indicator(&self, a: f64, b: f64) -> GridFunction {
        GridFunction::from_real(
            &self
                .points()
                .map(|x| if x >= a - 1e-12 * self.h && x < b - 1e-12 * self.h { 1.0 } else { 0.0 })
                .collect::<Vec<_>>(),
        )
    }

    fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{what} has {len} values, grid has {}", self.n)))
        }
    }

    fn same_as(&self, other: &GridSpec) -> Result<()> {
        if self.n == other.n && (self.h - other.h).abs() <= 1e-12 * self.h {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grids differ: (h={}, n={}) vs (h={}, n={})",
                self.h, self.n, other.h, other.n
            )))
        }
    }
}

/// `x / h` as an integer when it is one (up to rounding).
pub(crate) fn integral_ratio(x: f64, h: f64) -> Option<usize> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let r = x / h;
    let k = r.round();
    ((r - k).abs() <= GRID_MULTIPLE_TOL * k.max(1.0)).then_some(k as usize)
}

/// Interval `[0, len)` of grid points on which a computation is free of
/// right-boundary truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafeWindow {
    pub len: usize,
    pub x_end: f64,
}

impl SafeWindow {
    pub fn new(grid: &GridSpec, len: usize) -> Self {
        SafeWindow { len, x_end: grid.x(len) }
    }
}

/// Complex samples at the grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction(Vec<C64>);

impl GridFunction {
    pub fn zeros(n: usize) -> Self {
        GridFunction(vec![C64::new(0.0, 0.0); n])
    }

    pub fn new(values: Vec<C64>) -> Self {
        GridFunction(values)
    }

    pub fn from_real(values: &[f64]) -> Self {
        GridFunction(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64) -> C64) -> Self {
        GridFunction(grid.points().map(f).collect())
    }

    /// Unit mass at grid point `j`.
    pub fn delta(n: usize, j: usize) -> Self {
        let mut g = GridFunction::zeros(n);
        g.0[j] = C64::new(1.0, 0.0);
        g
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<C64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        GridFunction(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: C64) -> GridFunction {
        GridFunction(self.0.iter().map(|v| v * c).collect())
    }
}

/// `<f, g> = h * sum_j f(x_j) conj(g(x_j))`.
pub fn inner_product(f: &GridFunction, g: &GridFunction, grid: &GridSpec) -> Result<C64> {
    grid.check_len(f.len(), "left operand")?;
    grid.check_len(g.len(), "right operand")?;
    let s: C64 = f.0.iter().zip(&g.0).map(|(a, b)| a * b.conj()).sum();
    Ok(s * grid.h)
}

pub fn norm(f: &GridFunction, grid: &GridSpec) -> Result<f64> {
    Ok(inner_product(f, f, grid)?.re.max(0.0).sqrt())
}

/// Source index `j - shift`, if on the grid.
#[inline]
fn source(shift: isize, j: usize, n: usize) -> Option<usize> {
    let s = j as isize - shift;
    (s >= 0 && (s as usize) < n).then_some(s as usize)
}

/// One shift term. Positive `shift` translates toward `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftTerm {
    pub shift: isize,
    pub multiplier: Vec<C64>,
}

impl ShiftTerm {
    #[inline]
    fn source(&self, j: usize, n: usize) -> Option<usize> {
        source(self.shift, j, n)
    }

    fn is_zero(&self) -> bool {
        self.multiplier.iter().all(|m| m.re == 0.0 && m.im == 0.0)
    }
}

/// Finite sum of shift terms in canonical form: strictly increasing shifts,
/// no identically zero term, multiplier entries zeroed where the source point
/// is off the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorExpr {
    grid: GridSpec,
    terms: Vec<ShiftTerm>,
}

impl OperatorExpr {
    pub fn from_terms(grid: GridSpec, terms: Vec<ShiftTerm>) -> Result<Self> {
        let n = grid.n;
        let mut merged: BTreeMap<isize, Vec<C64>> = BTreeMap::new();
        for term in terms {
            grid.check_len(term.multiplier.len(), "multiplier")?;
            match merged.get_mut(&term.shift) {
                Some(acc) => acc.iter_mut().zip(&term.multiplier).for_each(|(a, b)| *a += b),
                None => {
                    merged.insert(term.shift, term.multiplier);
                }
            }
        }
        let mut out = Vec::with_capacity(merged.len());
        for (shift, mut multiplier) in merged {
            for (j, m) in multiplier.iter_mut().enumerate() {
                if source(shift, j, n).is_none() {
                    *m = C64::new(0.0, 0.0);
                }
            }
            let term = ShiftTerm { shift, multiplier };
            if !term.is_zero() {
                out.push(term);
            }
        }
        Ok(OperatorExpr { grid, terms: out })
    }

    pub fn single(grid: GridSpec, shift: isize, multiplier: Vec<C64>) -> Result<Self> {
        Self::from_terms(grid, vec![ShiftTerm { shift, multiplier }])
    }

    pub fn identity(grid: GridSpec) -> Self {
        Self::multiplication(grid, &vec![1.0; grid.n])
    }

    pub fn zero(grid: GridSpec) -> Self {
        OperatorExpr { grid, terms: Vec::new() }
    }

    /// Multiplication by a real grid function.
    pub fn multiplication(grid: GridSpec, m: &[f64]) -> Self {
        let multiplier = m.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::single(grid, 0, multiplier).expect("multiplier length checked by caller")
    }

    /// `S_t f(x) = m(x) f(x - t)` with a real weight `m` (already zero below `t`).
    pub fn weighted_shift(grid: GridSpec, steps: usize, weight: &[f64]) -> Result<Self> {
        grid.check_len(weight.len(), "weight")?;
        let multiplier = weight.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::single(grid, steps as isize, multiplier)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn terms(&self) -> &[ShiftTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn single_term(&self) -> Result<&ShiftTerm> {
        match self.terms.as_slice() {
            [t] => Ok(t),
            ts => Err(Error::NotSingleTerm { terms: ts.len() }),
        }
    }

    /// Term `(k, m)` maps to `(-k, j -> conj(m(j + k)))`.
    pub fn adjoint(&self) -> OperatorExpr {
        let n = self.grid.n;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let multiplier = (0..n)
                    .map(|j| {
                        let src = j as isize + t.shift;
                        if src >= 0 && (src as usize) < n {
                            t.multiplier[src as usize].conj()
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                ShiftTerm { shift: -t.shift, multiplier }
            })
            .collect();
        OperatorExpr::from_terms(self.grid, terms).expect("lengths preserved")
    }

    /// `self ∘ other`: `(k_a, m_a)∘(k_b, m_b) = (k_a + k_b, x -> m_a(x) m_b(x - k_a h))`.
    pub fn compose(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        self.grid.same_as(&other.grid)?;
        let n = self.grid.n;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let multiplier = (0..n)
                    .map(|j| match a.source(j, n) {
                        Some(s) => a.multiplier[j] * b.multiplier[s],
                        None => C64::new(0.0, 0.0),
                    })
                    .collect();
                terms.push(ShiftTerm { shift: a.shift + b.shift, multiplier });
            }
        }
        OperatorExpr::from_terms(self.grid, terms)
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.grid.check_len(f.len(), "argument")?;
        let n = self.grid.n;
        let mut g = GridFunction::zeros(n);
        for t in &self.terms {
            for j in 0..n {
                if let Some(s) = t.source(j, n) {
                    g.0[j] += t.multiplier[j] * f.0[s];
                }
            }
        }
        Ok(g)
    }

    pub fn add(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        self.grid.same_as(&other.grid)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        OperatorExpr::from_terms(self.grid, terms)
    }

    pub fn sub(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> OperatorExpr {
        let terms = self
            .terms
            .iter()
            .map(|t| ShiftTerm { shift: t.shift, multiplier: t.multiplier.iter().map(|m| m * c).collect() })
            .collect();
        OperatorExpr::from_terms(self.grid, terms).expect("lengths preserved")
    }

    /// `self^k` by repeated composition (`k = 0` gives the identity).
    pub fn pow(&self, k: usize) -> Result<OperatorExpr> {
        let mut acc = OperatorExpr::identity(self.grid);
        for _ in 0..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Largest multiplier modulus over all terms (0 for the zero operator).
    pub fn max_abs_multiplier(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.multiplier.iter())
            .map(|m| m.norm())
            .fold(0.0, f64::max)
    }

    /// Grid maximum of `|m|` for a single-term operator. For a weighted
    /// translation this approximates the operator norm (an essential sup on
    /// the half-line).
    pub fn sup_multiplier_norm(&self) -> Result<f64> {
        let t = self.single_term()?;
        Ok(t.multiplier.iter().map(|m| m.norm()).fold(0.0, f64::max))
    }

    /// Multiplier of the shift-0 term (zeros if there is none).
    pub fn diagonal(&self) -> Vec<C64> {
        self.terms
            .iter()
            .find(|t| t.shift == 0)
            .map(|t| t.multiplier.clone())
            .unwrap_or_else(|| vec![C64::new(0.0, 0.0); self.grid.n])
    }

    /// Dense `n x n` matrix with entry `(j, j - k) = m(x_j)` per term.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let n = self.grid.n;
        if n > DENSE_LIMIT {
            return Err(Error::TooLarge { n, limit: DENSE_LIMIT });
        }
        let mut a = DMatrix::<C64>::zeros(n, n);
        for t in &self.terms {
            for j in 0..n {
                if let Some(s) = t.source(j, n) {
                    a[(j, s)] += t.multiplier[j];
                }
            }
        }
        Ok(a)
    }
}
