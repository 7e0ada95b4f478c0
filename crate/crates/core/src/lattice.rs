use std::fmt;

use serde::{Deserialize, Serialize};

/// Element of `N^d`, ordered componentwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Self {
        MultiIndex(components)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// `e_j`.
    pub fn unit(d: usize, j: usize) -> Self {
        let mut v = vec![0; d];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    /// `|n| = sum n_i`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_norm(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, weights: &[usize]) -> usize {
        self.0.iter().zip(weights).map(|(a, b)| a * b).sum()
    }

    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn plus_unit(&self, j: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[j] += 1;
        MultiIndex(v)
    }

    pub fn minus_unit(&self, j: usize) -> Option<MultiIndex> {
        let mut v = self.0.clone();
        v[j] = v[j].checked_sub(1)?;
        Some(MultiIndex(v))
    }

    /// `prod_i C(n_i, p_i)`.
    pub fn binomial(&self, p: &MultiIndex) -> f64 {
        self.0.iter().zip(&p.0).map(|(&n, &k)| binomial(n, k)).product()
    }

    /// `prod_i n_i!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// All `n` with `0 <= n <= bounds` componentwise, in lexicographic order.
pub fn box_lattice(bounds: &[usize]) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex(Vec::new())];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..=b).map(move |c| {
                    let mut v = m.0.clone();
                    v.push(c);
                    MultiIndex(v)
                })
            })
            .collect();
    }
    out
}

/// `|n|_inf <= radius` in dimension `d`.
pub fn cube(d: usize, radius: usize) -> Vec<MultiIndex> {
    box_lattice(&vec![radius; d])
}

/// All `n` with `n . weights <= budget` (weights positive).
pub fn budget_lattice(weights: &[usize], budget: usize) -> Vec<MultiIndex> {
    fn rec(weights: &[usize], budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        match weights.split_first() {
            None => out.push(MultiIndex(prefix.clone())),
            Some((&w, rest)) => {
                for c in 0..=budget / w {
                    prefix.push(c);
                    rec(rest, budget - c * w, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(weights, budget, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 4), 70.0);
        assert_eq!(binomial(16, 8), 12870.0);
        assert_eq!(binomial(3, 5), 0.0);
        let n = MultiIndex::new(vec![2, 3]);
        assert_eq!(n.binomial(&MultiIndex::new(vec![1, 1])), 6.0);
        assert_eq!(n.factorial(), 12.0);
    }

    #[test]
    fn lattices() {
        let c = cube(2, 2);
        assert_eq!(c.len(), 9);
        assert_eq!(c[0], MultiIndex::zero(2));
        assert_eq!(c[5], MultiIndex::new(vec![1, 2]));
        let b = budget_lattice(&[1, 2], 3);
        // (0,0) (0,1) (1,0) (1,1) (2,0) (3,0)
        assert_eq!(b.len(), 6);
        assert!(b.iter().all(|m| m.dot(&[1, 2]) <= 3));
    }

    #[test]
    fn unit_arithmetic() {
        let e = MultiIndex::unit(3, 1);
        assert_eq!(e.components(), &[0, 1, 0]);
        assert_eq!(e.minus_unit(1), Some(MultiIndex::zero(3)));
        assert_eq!(e.minus_unit(0), None);
        assert_eq!(e.plus_unit(2).total(), 2);
        assert_eq!(format!("{}", e), "(0,1,0)");
    }
}
