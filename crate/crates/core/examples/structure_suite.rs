//! Joint kernel, orthogonality, analyticity, wandering subspaces and the
//! kernel condition for two commuting pairs.
//!
//! `cargo run --example structure_suite`

use semigroup_lab::tuple::{TranslationTuple, Which};
use semigroup_lab::{GridSpec, MultiIndex, SymbolSpec};

fn main() -> semigroup_lab::Result<()> {
    let grid = GridSpec::from_extent(0.25, 64.0)?;
    for (name, t) in [("t = (0.25, 1.25)", [0.25, 1.25]), ("t = (1, 1)", [1.0, 1.0])] {
        let tuple = TranslationTuple::new(vec![SymbolSpec::log_shift(); 2], t.to_vec(), grid)?;
        let e = tuple.joint_kernel();
        println!("log(x+2) pair, {name}: dim E = {} (t_min / h = {})", e.dim, e.t_min / grid.h());
        for which in [Which::Primal, Which::Dual] {
            let g = tuple.check_orthogonality(3, which, 1e-10)?;
            let w = tuple.check_wandering(which, 1e-8)?;
            println!(
                "  {which:?}: off-diagonal mass {:.3e}, {} overlapping pairs; wandering span {}/{}",
                g.off_diagonal_mass,
                g.overlapping.len(),
                w.span_dim,
                w.union_points
            );
        }
        let a = tuple.check_analytic(3)?;
        println!("  analytic support bound exact: {}", a.support_bound_exact);
        let k = tuple.check_kernel_condition(&MultiIndex::new(vec![3, 3]), 1e-10)?;
        let worst = k.entries.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).expect("entries");
        println!("  kernel condition holds: {} (worst j = {}, alpha = {}, residual {:.3e})", k.holds, worst.j, worst.alpha, worst.residual);
    }
    Ok(())
}
