//! Bounds a supermodular menu's revenue by its additive part plus half of a
//! bundle-only menu, on the correlated three-atom instance.

use mechbench::constructions::three_halves_certificate;
use mechbench::data::{self, Epsilon};
use mechbench::model::Menu;
use mechbench::rational::describe;
use mechbench::search::{candidate_grid, gap_report, GridMode, SearchOptions};

fn main() -> mechbench::Result<()> {
    let dist = data::example5(Epsilon::Hundredth);
    let cert = three_halves_certificate(&Menu::from_ints(2, &[4, 4, 100])?, &dist)?;
    println!("rev{} = {}", cert.input, describe(&cert.input_revenue));
    for (menu, revenue) in &cert.candidates {
        println!("rev{menu} = {}", describe(revenue));
    }
    println!("slack = {}", describe(&cert.three_halves_slack().expect("three-halves branch")));

    let grid = candidate_grid(&dist, &GridMode::SupportSums)?;
    let report = gap_report(&dist, &grid, SearchOptions::default())?;
    for ratio in &report.ratios {
        if let Some(v) = &ratio.value {
            println!("{} = {}", ratio.name, describe(v));
        }
    }
    Ok(())
}
