//! Exhaustive search for revenue-optimal menus over finite candidate grids.
//!
//! The search is exact for the grid it is given: the result is the best menu
//! in the grid's cartesian product that satisfies the constraint, ties going
//! to the lexicographically smallest price vector in canonical bundle order.
//! Whether the grid contains a globally optimal menu is the caller's concern;
//! for integer supports the integer grid does.

mod grid;
mod kernel;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub use grid::{candidate_grid, parse_grid, CandidateGrid, GridKind, GridMode};
pub use report::{gap_report, results_to_csv, GapReport, Ratio, CSV_HEADER};

use crate::buyer::expected_revenue;
use crate::error::{Error, Result};
use crate::model::{JointDistribution, Menu};
use crate::rational::{to_f64, Rational};
use kernel::{choose_scale, scaled_to, Amount, Found, Problem, Scaled};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchConstraint {
    Unrestricted,
    /// Price depends only on bundle size.
    Symmetric,
    Submodular,
    SymmetricSubmodular,
    /// Every bundle costs the sum of its item prices.
    Additive,
    /// Every bundle costs the same, so only the grand bundle is bought.
    BundleOnly,
}

impl SearchConstraint {
    pub const ALL: [SearchConstraint; 6] = [
        SearchConstraint::Unrestricted,
        SearchConstraint::Symmetric,
        SearchConstraint::Submodular,
        SearchConstraint::SymmetricSubmodular,
        SearchConstraint::Additive,
        SearchConstraint::BundleOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SearchConstraint::Unrestricted => "unrestricted",
            SearchConstraint::Symmetric => "symmetric",
            SearchConstraint::Submodular => "submodular",
            SearchConstraint::SymmetricSubmodular => "symmetric-submodular",
            SearchConstraint::Additive => "additive",
            SearchConstraint::BundleOnly => "bundle-only",
        }
    }

    pub fn admits(self, menu: &Menu) -> bool {
        match self {
            SearchConstraint::Unrestricted => true,
            SearchConstraint::Symmetric => menu.is_symmetric(),
            SearchConstraint::Submodular => menu.is_submodular(),
            SearchConstraint::SymmetricSubmodular => menu.is_symmetric() && menu.is_submodular(),
            SearchConstraint::Additive => menu.is_additive(),
            SearchConstraint::BundleOnly => menu.is_bundle_only(),
        }
    }
}

impl fmt::Display for SearchConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SearchConstraint::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::parse("--constraint", format!("unknown constraint {s:?}")))
    }
}

/// Number type used while enumerating.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Arithmetic {
    /// Scaled 64- or 128-bit integers when they suffice, otherwise rationals.
    #[default]
    Auto,
    Rational,
    /// Binary64; the winning menu's revenue is still recomputed exactly.
    Float,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Only enumerate menus with `p(S) <= p(T)` for `S ⊆ T`. Applied when
    /// the grid is downward closed, where it cannot change the result.
    pub monotone_pruning: bool,
    pub arithmetic: Arithmetic,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            monotone_pruning: true,
            arithmetic: Arithmetic::Auto,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: Menu,
    /// Exact expected revenue of `best`.
    pub revenue: Rational,
    /// Complete menus evaluated.
    pub examined: u64,
    pub constraint: SearchConstraint,
    pub grid: GridKind,
    pub pruned: bool,
    pub elapsed: Duration,
}

pub fn search_optimal(
    dist: &JointDistribution,
    constraint: SearchConstraint,
    grid: &CandidateGrid,
) -> Result<SearchResult> {
    search_with(dist, constraint, grid, SearchOptions::default())
}

pub fn search_with(
    dist: &JointDistribution,
    constraint: SearchConstraint,
    grid: &CandidateGrid,
    options: SearchOptions,
) -> Result<SearchResult> {
    if grid.n() != dist.n() {
        return Err(Error::Dimension {
            expected: dist.n(),
            found: grid.n(),
        });
    }
    let start = Instant::now();
    let prune = options.monotone_pruning && grid.is_downward_closed();
    let run = |arithmetic| match arithmetic {
        Scaled::I64 {
            price_scale,
            weight_scale,
        } => solve(
            Problem::new(
                dist,
                grid,
                constraint,
                prune,
                scaled_to(&price_scale, BigInt::to_i64),
                scaled_to(&weight_scale, BigInt::to_i64),
            ),
        ),
        Scaled::I128 {
            price_scale,
            weight_scale,
        } => solve(
            Problem::new(
                dist,
                grid,
                constraint,
                prune,
                scaled_to(&price_scale, BigInt::to_i128),
                scaled_to(&weight_scale, BigInt::to_i128),
            ),
        ),
        Scaled::Exact => solve(Problem::new(
            dist,
            grid,
            constraint,
            prune,
            Rational::clone,
            Rational::clone,
        )),
    };
    let (indices, examined) = match options.arithmetic {
        Arithmetic::Float => solve(Problem::new(dist, grid, constraint, prune, to_f64, to_f64)),
        Arithmetic::Rational => run(Scaled::Exact),
        Arithmetic::Auto => run(choose_scale(dist, grid)),
    };
    let indices = indices.ok_or_else(|| Error::EmptyFeasibleSet(constraint.name().into()))?;
    let prices = indices
        .iter()
        .zip(grid.sets())
        .map(|(&i, set)| set[i].clone())
        .collect();
    let best = Menu::new(dist.n(), prices)?;
    debug_assert!(constraint.admits(&best), "{best} violates {constraint}");
    let revenue = expected_revenue(&best, dist);
    Ok(SearchResult {
        best,
        revenue,
        examined,
        constraint,
        grid: grid.kind(),
        pruned: prune,
        elapsed: start.elapsed(),
    })
}

fn solve<T: Amount>(problem: Problem<T>) -> (Option<Vec<usize>>, u64) {
    let found: Found<T> = problem.solve();
    (found.best.map(|(_, idx)| idx), found.examined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{product, SingleItemDistribution, Valuation};
    use crate::rational::{int, rat};

    fn example4() -> JointDistribution {
        let f = SingleItemDistribution::uniform_ints(&[0, 1, 2, 2, 2, 2, 5, 6, 6, 6]).unwrap();
        product(&[f.clone(), f.clone(), f]).unwrap()
    }

    #[test]
    fn point_mass_extracts_full_surplus() {
        let d = JointDistribution::point(Valuation::from_ints(&[3, 4])).unwrap();
        let g = candidate_grid(&d, &GridMode::SupportSums).unwrap();
        let r = search_optimal(&d, SearchConstraint::Unrestricted, &g).unwrap();
        assert_eq!(r.revenue, int(7));
        assert_eq!(r.best.c(), &int(7));
    }

    #[test]
    fn one_item_posted_price() {
        let f = SingleItemDistribution::uniform_ints(&[1, 2, 3]).unwrap();
        let d = product(&[f]).unwrap();
        let g = candidate_grid(&d, &GridMode::IntegerGrid).unwrap();
        let r = search_optimal(&d, SearchConstraint::Unrestricted, &g).unwrap();
        // prices 2 and 3 both earn 4/3 ... price 2 earns 4/3, price 3 earns 1
        assert_eq!(r.revenue, rat(4, 3));
        assert_eq!(r.best.price(crate::model::Bundle::singleton(0)), &int(2));
    }

    #[test]
    fn arithmetic_modes_agree() {
        let f = SingleItemDistribution::uniform_ints(&[1, 2, 5]).unwrap();
        let d = product(&[f.clone(), f]).unwrap();
        let g = candidate_grid(&d, &GridMode::IntegerGrid).unwrap();
        for c in SearchConstraint::ALL {
            let base = search_optimal(&d, c, &g).unwrap();
            for arithmetic in [Arithmetic::Rational, Arithmetic::Float] {
                let opts = SearchOptions {
                    monotone_pruning: true,
                    arithmetic,
                };
                let other = search_with(&d, c, &g, opts).unwrap();
                assert_eq!(other.revenue, base.revenue, "{c} {arithmetic:?}");
            }
            let unpruned = search_with(
                &d,
                c,
                &g,
                SearchOptions {
                    monotone_pruning: false,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(unpruned.best, base.best, "{c}");
            assert!(unpruned.examined >= base.examined);
        }
    }

    #[test]
    fn constrained_results_satisfy_their_predicate() {
        let d = example4();
        let g = candidate_grid(&d, &GridMode::IntegerGrid).unwrap().with_max_price(&int(9)).unwrap();
        for c in [SearchConstraint::Additive, SearchConstraint::BundleOnly] {
            let r = search_optimal(&d, c, &g).unwrap();
            assert!(c.admits(&r.best), "{c}: {}", r.best);
        }
    }

    #[test]
    fn infeasible_grid_is_reported() {
        let d = JointDistribution::point(Valuation::from_ints(&[1, 1])).unwrap();
        let g = CandidateGrid::explicit(2, vec![vec![int(1)], vec![int(2)], vec![int(3)]]).unwrap();
        let err = search_optimal(&d, SearchConstraint::Symmetric, &g).unwrap_err();
        assert!(matches!(err, Error::EmptyFeasibleSet(_)));
    }

    #[test]
    fn constraint_names_round_trip() {
        for c in SearchConstraint::ALL {
            assert_eq!(c.name().parse::<SearchConstraint>().unwrap(), c);
        }
        assert!("convex".parse::<SearchConstraint>().is_err());
    }
}
