//! Buyer best response, exact expected revenue, two-item region geometry,
//! and revenue-monotonicity audits.

mod choice;
mod monotone;
mod regions;

pub use choice::{buyer_choice, expected_revenue, revenue_at, sale_probabilities, BuyerOutcome};
pub use monotone::{
    check_monotone, monotonicity_grid, MonotonicityReport, MonotonicityViolation,
};
pub use regions::{region_partition_2, HalfPlane, MenuShape, Region, RegionPartition2};
