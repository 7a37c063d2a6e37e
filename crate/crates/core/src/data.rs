//! Bundled worked instances. The raw JSON is exposed so the CLI can print
//! or write it; the typed accessors parse it.

use crate::model::{parse_distribution, parse_menu, JointDistribution, Menu};
use crate::randomized::{parse_randomized_menu, RandomizedMenu};

pub const EXAMPLE4_DISTRIBUTION: &str = include_str!("../data/example4_distribution.json");
pub const EXAMPLE4_MENU: &str = include_str!("../data/example4_menu.json");
pub const EXAMPLE5_EPS_1_10: &str = include_str!("../data/example5_eps_1_10.json");
pub const EXAMPLE5_EPS_1_100: &str = include_str!("../data/example5_eps_1_100.json");
pub const EXAMPLE6_EPS_1_10: &str = include_str!("../data/example6_eps_1_10.json");
pub const EXAMPLE6_EPS_1_100: &str = include_str!("../data/example6_eps_1_100.json");
pub const EXAMPLE6_MENU: &str = include_str!("../data/example6_menu_eps_1_10.json");
pub const EXAMPLE7_MENU: &str = include_str!("../data/example7_menu.json");
pub const EXAMPLE7_TYPES: &str = include_str!("../data/example7_types.json");

/// The ε values the correlated examples ship with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Epsilon {
    Tenth,
    Hundredth,
}

/// Every bundled file by name, for `mechbench data`.
pub const FILES: [(&str, &str); 9] = [
    ("example4_distribution.json", EXAMPLE4_DISTRIBUTION),
    ("example4_menu.json", EXAMPLE4_MENU),
    ("example5_eps_1_10.json", EXAMPLE5_EPS_1_10),
    ("example5_eps_1_100.json", EXAMPLE5_EPS_1_100),
    ("example6_eps_1_10.json", EXAMPLE6_EPS_1_10),
    ("example6_eps_1_100.json", EXAMPLE6_EPS_1_100),
    ("example6_menu_eps_1_10.json", EXAMPLE6_MENU),
    ("example7_menu.json", EXAMPLE7_MENU),
    ("example7_types.json", EXAMPLE7_TYPES),
];

fn dist(text: &str) -> JointDistribution {
    parse_distribution(text).expect("bundled distribution parses")
}

pub fn example4_distribution() -> JointDistribution {
    dist(EXAMPLE4_DISTRIBUTION)
}

/// The unrestricted optimum (6,6,6,7,7,8,9).
pub fn example4_menu() -> Menu {
    parse_menu(EXAMPLE4_MENU).expect("bundled menu parses")
}

pub fn example5(eps: Epsilon) -> JointDistribution {
    dist(match eps {
        Epsilon::Tenth => EXAMPLE5_EPS_1_10,
        Epsilon::Hundredth => EXAMPLE5_EPS_1_100,
    })
}

pub fn example6(eps: Epsilon) -> JointDistribution {
    dist(match eps {
        Epsilon::Tenth => EXAMPLE6_EPS_1_10,
        Epsilon::Hundredth => EXAMPLE6_EPS_1_100,
    })
}

/// The asymmetric menu (1,10,100).
pub fn example6_menu() -> Menu {
    parse_menu(EXAMPLE6_MENU).expect("bundled menu parses")
}

pub fn example7_menu() -> RandomizedMenu {
    parse_randomized_menu(EXAMPLE7_MENU).expect("bundled lottery menu parses")
}

/// The 36 types of the two-item lottery example.
pub fn example7_types() -> JointDistribution {
    dist(EXAMPLE7_TYPES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn everything_parses() {
        assert_eq!(example4_distribution().len(), 125);
        assert_eq!(example4_menu().canonical_prices(), [6, 6, 6, 7, 7, 8, 9].map(int));
        for eps in [Epsilon::Tenth, Epsilon::Hundredth] {
            assert_eq!(example5(eps).len(), 3);
            assert_eq!(example6(eps).len(), 4);
        }
        assert_eq!(example6_menu().canonical_prices(), vec![int(1), int(10), int(100)]);
        assert_eq!(example7_menu().len(), 11);
        let types = example7_types();
        assert_eq!(types.len(), 36);
        assert_eq!(types.marginal(0).tail(&int(100)), rat(7, 45));
    }
}
