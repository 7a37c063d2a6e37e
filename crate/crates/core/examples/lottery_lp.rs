//! The two-item lottery instance: the buyer's single purchase at (46, 80),
//! a profitable two-purchase deviation, and the revenue LP over all 36 types.

use std::time::Instant;

use mechbench::data;
use mechbench::model::Valuation;
use mechbench::randomized::{
    best_false_name_deviation, lp_optimal, lp_optimal_float, rchoice, verify_ic_ir,
    CombinationRule, DirectMechanism,
};
use mechbench::rational::describe;

fn main() -> mechbench::Result<()> {
    let menu = data::example7_menu();
    let types = data::example7_types();
    let v = Valuation::from_ints(&[46, 80]);

    let single = rchoice(&menu, &v);
    println!("single purchase: entry {} utility {}", single.index, describe(&single.utility));
    for rule in [CombinationRule::CappedAdditive, CombinationRule::IndependentLotteries] {
        let dev = best_false_name_deviation(&menu, &v, rule, 2)?;
        println!("best {} deviation: picks {:?} utility {}", rule.name(), dev.picks, describe(&dev.utility));
    }

    let direct = DirectMechanism::from_menu(&menu, &types);
    println!("menu as a direct mechanism: IC/IR hold = {}", verify_ic_ir(&direct, &types).holds());
    println!("menu revenue: {}", describe(&direct.revenue(&types)));

    let start = Instant::now();
    let float = lp_optimal_float(&types)?;
    println!(
        "float LP: {:.12} after {} pivots, residuals {:.1e} / {:.1e} ({:?})",
        float.revenue,
        float.pivots,
        float.primal_residual,
        float.dual_residual,
        start.elapsed()
    );
    let start = Instant::now();
    let exact = lp_optimal(&types)?;
    println!(
        "exact LP: {} (certified float basis: {}, {:?})",
        describe(&exact.revenue),
        exact.certified_float_basis,
        start.elapsed()
    );
    Ok(())
}
