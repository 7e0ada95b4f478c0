//! Spectral radii, the polydisc sandwich, point spectrum, singular values
//! and rotation symmetry.
//!
//! `cargo run --example spectrum_bounds`

use semigroup_lab::spectrum::{
    check_circular_symmetry, check_no_point_spectrum, polydisc_bounds, smallest_singular_value, spectral_radius,
};
use semigroup_lab::tuple::TranslationTuple;
use semigroup_lab::{GridSpec, SymbolSpec, C64};

fn main() -> semigroup_lab::Result<()> {
    let grid = GridSpec::from_extent(0.25, 64.0)?;

    let e = TranslationTuple::new(vec![SymbolSpec::exp(-1.0)], vec![1.0], grid)?;
    let r = spectral_radius(e.op(0), 32, e.constant_weights()[0])?;
    println!("exp(-x): r = {:.9} (closed form), root {:.6}, ratio {:.6}, e^(-1/2) = {:.9}", r.estimate, r.root, r.ratio, (-0.5f64).exp());

    for (name, symbols) in [
        ("constants", vec![SymbolSpec::constant(2.0), SymbolSpec::constant(5.0)]),
        ("log(x+2)", vec![SymbolSpec::log_shift(); 2]),
        ("1/(x+1)", vec![SymbolSpec::reciprocal_affine(); 2]),
    ] {
        let t = TranslationTuple::new(symbols, vec![0.25, 1.25], grid)?;
        let b = polydisc_bounds(&t, 32)?;
        println!("{name}: inner {:?}, outer {:?}, polydisc {}", b.inner_radii.unwrap_or_default(), b.outer_radii, b.polydisc_equality);
        let sym = check_circular_symmetry(&t, &[0.5, 1.0, 2.5], 1e-12)?;
        println!("  rotation residual {:.1e}", sym.max_residual);
    }

    let lambdas = [C64::new(0.3, 0.4), C64::new(-0.9, 0.1), C64::new(0.0, 0.0)];
    println!("point spectrum of S empty: {}", check_no_point_spectrum(e.op(0), &lambdas)?.empty);

    let small = TranslationTuple::new(vec![SymbolSpec::exp(-1.0)], vec![1.0], GridSpec::new(0.25, 64)?)?;
    for rho in [0.0, 0.3, 0.54] {
        println!("sigma_min(S - {rho}) = {:.4}", smallest_singular_value(small.op(0), C64::new(rho, 0.0))?);
    }
    Ok(())
}
