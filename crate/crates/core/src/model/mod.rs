//! Valuations, distributions, menus, structural predicates, and their JSON
//! forms.

mod bundle;
mod distribution;
pub mod json;
mod menu;

pub use bundle::{canonical_bundles, canonical_cmp, Bundle, MAX_ITEMS};
pub use distribution::{product, JointDistribution, SingleItemDistribution, Valuation};
pub use json::{distribution_to_json, menu_to_json, parse_distribution, parse_menu};
pub use menu::Menu;
