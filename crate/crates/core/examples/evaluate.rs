//! Exact expected revenue and sale probabilities of a fixed menu.

use mechbench::buyer::{expected_revenue, sale_probabilities};
use mechbench::data;
use mechbench::rational::describe;

fn main() {
    let dist = data::example4_distribution();
    let menu = data::example4_menu();
    println!("{menu} earns {}", describe(&expected_revenue(&menu, &dist)));
    for (bundle, p) in sale_probabilities(&menu, &dist) {
        println!("  {bundle}: {}", describe(&p));
    }
}
