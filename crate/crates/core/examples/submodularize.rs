//! Replaces a strictly supermodular two-item menu by a submodular one that
//! earns at least as much under independent items.

use mechbench::constructions::submodularize2;
use mechbench::model::{Menu, SingleItemDistribution};
use mechbench::rational::describe;

fn main() -> mechbench::Result<()> {
    let d1 = SingleItemDistribution::uniform_ints(&[10, 20, 40, 60])?;
    let d2 = SingleItemDistribution::uniform_ints(&[30, 50, 70])?;
    for menu in [Menu::from_ints(2, &[15, 45, 80])?, Menu::from_ints(2, &[20, 30, 70])?] {
        let cert = submodularize2(&menu, &d1, &d2)?;
        println!(
            "{} ({}) -> {} ({}), branch {:?}, margin {}",
            cert.input,
            describe(&cert.input_revenue),
            cert.output,
            describe(&cert.output_revenue),
            cert.branch,
            describe(&cert.margin())
        );
    }
    Ok(())
}
