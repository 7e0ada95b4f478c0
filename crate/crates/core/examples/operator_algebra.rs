//! Shift-term algebra against its dense-matrix oracle.
//!
//! `cargo run --example operator_algebra`

use semigroup_lab::tuple::make_weighted_translation;
use semigroup_lab::{GridSpec, SymbolSpec, C64};

fn main() -> semigroup_lab::Result<()> {
    let grid = GridSpec::new(0.25, 64)?;
    let s = make_weighted_translation(&SymbolSpec::log_shift(), 1.0, &grid)?;
    let e = make_weighted_translation(&SymbolSpec::exp(-1.0), 0.5, &grid)?;

    // S^* S is multiplication by phi(x + t) / phi(x).
    let sts = s.adjoint().compose(&s)?;
    println!("S*S: {} term(s), shift {}", sts.terms().len(), sts.terms()[0].shift);

    // A word in S, E and their adjoints, checked entrywise.
    let word = s.compose(&e.adjoint())?.compose(&s.adjoint())?.compose(&e)?.add(&sts.scale(C64::new(0.5, 0.0)))?;
    let dense = s.to_dense()? * e.adjoint().to_dense()? * s.adjoint().to_dense()? * e.to_dense()?
        + sts.to_dense()? * C64::new(0.5, 0.0);
    let diff = (word.to_dense()? - dense).iter().map(|v| v.norm()).fold(0.0, f64::max);
    println!("word has {} shift terms; max |algebra - dense| = {diff:e}", word.terms().len());
    Ok(())
}
