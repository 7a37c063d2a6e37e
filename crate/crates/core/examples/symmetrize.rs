//! Symmetrizes an asymmetric submodular menu for IID items, and shows why
//! the same cannot be done for correlated items.

use mechbench::buyer::expected_revenue;
use mechbench::constructions::symmetrize2;
use mechbench::data::{self, Epsilon};
use mechbench::model::{Menu, SingleItemDistribution};
use mechbench::rational::describe;
use mechbench::search::{candidate_grid, search_optimal, GridMode, SearchConstraint};

fn main() -> mechbench::Result<()> {
    let f = SingleItemDistribution::uniform_ints(&[1, 2, 4, 7])?;
    let menu = Menu::from_ints(2, &[2, 6, 7])?;
    let cert = symmetrize2(&menu, &f)?;
    println!(
        "IID: {} earns {}, symmetric {} earns {}",
        cert.input,
        describe(&cert.input_revenue),
        cert.output,
        describe(&cert.output_revenue)
    );

    let joint = data::example6(Epsilon::Tenth);
    let asymmetric = data::example6_menu();
    let grid = candidate_grid(&joint, &GridMode::SupportSums)?;
    let best = search_optimal(&joint, SearchConstraint::Symmetric, &grid)?;
    println!(
        "correlated: {} earns {}, best symmetric {} earns {}",
        asymmetric,
        describe(&expected_revenue(&asymmetric, &joint)),
        best.best,
        describe(&best.revenue)
    );
    Ok(())
}
