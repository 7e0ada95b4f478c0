//! Toral and spherical Cauchy duals and the pair identities.
//!
//! `cargo run --example cauchy_duals`

use semigroup_lab::tuple::{spherical_pair_formula, TranslationTuple, DEFAULT_ALPHA};
use semigroup_lab::{GridSpec, SymbolSpec};

fn max_diff(a: &[f64], b: &[f64], range: std::ops::Range<usize>) -> f64 {
    range.map(|j| (a[j] - b[j]).abs()).fold(0.0, f64::max)
}

fn main() -> semigroup_lab::Result<()> {
    let grid = GridSpec::from_extent(0.25, 64.0)?;

    let t = TranslationTuple::new(vec![SymbolSpec::exp(-1.0), SymbolSpec::exp(1.0)], vec![1.0, 0.5], grid)?;
    let toral = t.toral_cauchy_dual(DEFAULT_ALPHA)?;
    println!("toral dual: |S'^* S - I| = {:e} on {} points", toral.identity_residual, toral.window.len);

    let sph = t.spherical_cauchy_dual(DEFAULT_ALPHA)?;
    let formula = spherical_pair_formula(&t)?;
    for i in 0..2 {
        let d = max_diff(&sph.tuple.weights()[i], &formula[i], t.steps()[i]..sph.window.len);
        println!("spherical dual weight {i}: max |computed - formula| = {d:e}");
    }
    println!("spherical dual commutes: {}", sph.commutes());

    // (S_t, S_t): the spherical dual is half the toral dual.
    let same = TranslationTuple::new(vec![SymbolSpec::log_shift(); 2], vec![1.0, 1.0], grid)?;
    let (s, p) = (same.spherical_cauchy_dual(DEFAULT_ALPHA)?, same.toral_cauchy_dual(DEFAULT_ALPHA)?);
    let half: Vec<f64> = p.tuple.weights()[0].iter().map(|v| v / 2.0).collect();
    println!("(S, S): max |S^s - S'/2| = {:e}", max_diff(&s.tuple.weights()[0], &half, 0..s.window.len));
    Ok(())
}
