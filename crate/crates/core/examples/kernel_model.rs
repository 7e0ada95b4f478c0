//! Kernel coefficients, values with tail bounds, positivity and the
//! reproducing identity of the analytic model.
//!
//! `cargo run --example kernel_model`

use semigroup_lab::rkhs::{check_psd, kernel_coefficients, model_map, pair_coefficient_formula, PolydiscSample};
use semigroup_lab::tuple::TranslationTuple;
use semigroup_lab::{GridFunction, GridSpec, MultiIndex, SymbolSpec, C64};

fn main() -> semigroup_lab::Result<()> {
    let grid = GridSpec::from_extent(0.25, 64.0)?;

    let constants = TranslationTuple::new(vec![SymbolSpec::constant(3.0), SymbolSpec::constant(5.0)], vec![0.25, 1.25], grid)?;
    let series = kernel_coefficients(&constants, 16)?;
    let z = [C64::new(0.5, 0.0); 2];
    let k = series.evaluate(&z, &z, 0)?;
    println!("constants: k(z, z) = {:.12} +- {:.1e} (geometric series 16/9 = {:.12})", k.value[0], k.tail, 16.0 / 9.0);

    let log = TranslationTuple::new(vec![SymbolSpec::log_shift(); 2], vec![0.25, 1.25], grid)?;
    let series = kernel_coefficients(&log, 8)?;
    let n = MultiIndex::new(vec![3, 2]);
    let closed = pair_coefficient_formula(&log, &n)?;
    println!("log pair: c_(3,2)(0) = {:.15}, four-factor form {:.15}", series.coefficient(&n).unwrap()[0], closed[0]);
    println!("inner polyradius {:?}", series.radius);

    let sample = PolydiscSample::random(&series.radius, 0.9, 8, 7)?;
    let psd = check_psd(&series, &sample, 0, 1e-9)?;
    println!("Gram on 8 points: min eigenvalue {:.3e}, trace {:.3}", psd.min_eigenvalue, psd.trace);

    let f = GridFunction::from_fn(&grid, |x| C64::new((-x).exp(), (x / 3.0).sin()));
    let u = model_map(&log, &f, 8)?;
    let lambda = [C64::new(0.3, 0.1), C64::new(-0.2, 0.2)];
    let g = vec![C64::new(1.0, 0.0); series.e_dim];
    let lhs = u.h_inner(&series.section(&lambda, &g), &series)?;
    let rhs: C64 = u.evaluate(&lambda).iter().zip(&g).map(|(a, b)| a * b.conj()).sum::<C64>() * grid.h();
    println!("<Uf, k(., l) g>_H = {lhs:.12}, <Uf(l), g>_E = {rhs:.12}");
    Ok(())
}
