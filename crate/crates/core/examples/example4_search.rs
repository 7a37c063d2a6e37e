//! Exhaustive integer-grid search on three IID items drawn uniformly from the
//! multiset {0, 1, 2, 2, 2, 2, 5, 6, 6, 6}, under four menu classes.

use mechbench::model::{product, SingleItemDistribution};
use mechbench::rational::describe;
use mechbench::search::{candidate_grid, search_optimal, GridMode, SearchConstraint};

fn main() -> mechbench::Result<()> {
    let f = SingleItemDistribution::uniform_ints(&[0, 1, 2, 2, 2, 2, 5, 6, 6, 6])?;
    let dist = product(&[f.clone(), f.clone(), f])?;
    let grid = candidate_grid(&dist, &GridMode::IntegerGrid)?;
    println!("grid combinations: {}", grid.combinations());
    for constraint in [
        SearchConstraint::Unrestricted,
        SearchConstraint::Symmetric,
        SearchConstraint::Submodular,
        SearchConstraint::SymmetricSubmodular,
    ] {
        let r = search_optimal(&dist, constraint, &grid)?;
        println!(
            "{:<22} {}  revenue {}  ({} menus, {:.2?})",
            constraint.name(),
            r.best,
            describe(&r.revenue),
            r.examined,
            r.elapsed
        );
    }
    Ok(())
}
