//! Lottery menus: single-purchase choice, false-name (multiple purchase)
//! deviations, incentive checks for direct mechanisms, and the revenue LP
//! over a finite type space.

mod mechanism;
mod menu;
mod simplex;

pub use mechanism::{
    ic_ir_residual, lp_optimal, lp_optimal_float, reconstruct, verify_ic_ir, DirectMechanism,
    FloatLpSolution, IcIrReport, LpSolution, Violation,
};
pub use menu::{
    best_false_name_deviation, false_name_utility, parse_randomized_menu, rchoice, Choice,
    CombinationRule, Deviation, Entry, RandomizedMenu, MAX_PICKS, PICK_LIMIT,
};
