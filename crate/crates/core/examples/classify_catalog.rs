//! Defect-operator classification and symbol classes for the catalog symbols.
//!
//! `cargo run --example classify_catalog`

use semigroup_lab::symbol::{catalog, classify_symbol, default_steps, DEFAULT_SYMBOL_TOL};
use semigroup_lab::tuple::{classify, TranslationTuple};
use semigroup_lab::GridSpec;

fn main() -> semigroup_lab::Result<()> {
    let grid = GridSpec::from_extent(0.25, 64.0)?;
    println!("{:<16} {:>8} {:>6} {:>6} {:>6} {:>6}  symbol", "phi", "isometry", "2-iso", "CHE", "CHC", "contr");
    for (name, phi) in catalog() {
        let tuple = TranslationTuple::new(vec![phi.clone()], vec![1.0], grid)?;
        let c = classify(&tuple, 8, 1e-10)?;
        let v = classify_symbol(&phi, &grid, 8, &default_steps(&grid), DEFAULT_SYMBOL_TOL)?;
        let class = match (v.constant, v.completely_monotone, v.completely_alternating) {
            (true, ..) => "constant",
            (_, true, _) => "completely monotone",
            (_, _, true) => "completely alternating",
            _ => "-",
        };
        println!(
            "{name:<16} {:>8} {:>6} {:>6} {:>6} {:>6}  {class}",
            c.toral.isometry,
            c.toral.is_p_isometry(2),
            c.toral.complete_hyperexpansion,
            c.toral.complete_hypercontraction,
            c.toral.contraction,
        );
    }

    // Pairs: the spherical defect of (S, S) / sqrt 2.
    let pair = TranslationTuple::new(vec![catalog()[1].1.clone(); 2], vec![1.0, 0.5], grid)?;
    let c = classify(&pair, 4, 1e-10)?;
    println!("pair x+1: toral 2-isometry {}, spherical orders {:?}", c.toral.is_p_isometry(2), c.spherical.isometric_orders);
    Ok(())
}
