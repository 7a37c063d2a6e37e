use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::choice::revenue_at;
use crate::model::{Menu, Valuation};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub low: Valuation,
    pub high: Valuation,
    pub revenue_low: Rational,
    pub revenue_high: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub violations: Vec<MonotonicityViolation>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares every coordinatewise-ordered pair of grid points and reports
/// each pair where the higher valuation pays strictly less.
pub fn check_monotone(menu: &Menu, grid: &[Valuation]) -> MonotonicityReport {
    let revenues: Vec<Rational> = grid.iter().map(|v| revenue_at(menu, v)).collect();
    let mut violations = Vec::new();
    for (i, low) in grid.iter().enumerate() {
        for (j, high) in grid.iter().enumerate() {
            if i != j && low.dominated_by(high) && revenues[j] < revenues[i] {
                violations.push(MonotonicityViolation {
                    low: low.clone(),
                    high: high.clone(),
                    revenue_low: revenues[i].clone(),
                    revenue_high: revenues[j].clone(),
                });
            }
        }
    }
    MonotonicityReport { violations }
}

/// Audit grid for a two-item menu: every support point, plus the product of
/// the breakpoint coordinates `0, a, b, c-a, c-b, c`, each shifted by
/// `-offset, 0, +offset` (negative coordinates dropped).
pub fn monotonicity_grid(menu: &Menu, support: &[Valuation], offset: &Rational) -> Vec<Valuation> {
    assert_eq!(menu.n(), 2, "corner grids are defined for two items");
    let (a, b, c) = (menu.a(), menu.b(), menu.c());
    let mut coords: BTreeSet<Rational> = BTreeSet::new();
    let breakpoints = [Rational::zero(), a.clone(), b.clone(), c - a, c - b, c.clone()];
    for x in breakpoints {
        for shifted in [&x - offset, x.clone(), &x + offset] {
            if !shifted.is_negative() {
                coords.insert(shifted);
            }
        }
    }
    let mut points: BTreeSet<Valuation> = support.iter().cloned().collect();
    for x in &coords {
        for y in &coords {
            points.insert(Valuation::new(vec![x.clone(), y.clone()]).expect("nonnegative"));
        }
    }
    points.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn supermodular_menu_violates_monotonicity() {
        let m = Menu::from_ints(2, &[5, 1, 10]).unwrap();
        let grid = vec![
            Valuation::from_ints(&[5, 0]),
            Valuation::new(vec![int(5), rat(9, 2)]).unwrap(),
        ];
        let report = check_monotone(&m, &grid);
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!((v.revenue_low.clone(), v.revenue_high.clone()), (int(5), int(1)));
    }

    #[test]
    fn submodular_menu_on_corner_grid() {
        let m = Menu::from_ints(2, &[27, 70, 85]).unwrap();
        let grid = monotonicity_grid(&m, &[], &rat(1, 2));
        assert!(grid.len() > 50);
        assert!(check_monotone(&m, &grid).is_monotone());
    }

    #[test]
    fn single_item_is_monotone() {
        let m = Menu::from_ints(1, &[3]).unwrap();
        let grid: Vec<Valuation> = (0..8).map(|x| Valuation::from_ints(&[x])).collect();
        assert!(check_monotone(&m, &grid).is_monotone());
    }

    #[test]
    fn corner_grid_finds_the_supermodular_drop() {
        let m = Menu::from_ints(2, &[5, 1, 10]).unwrap();
        let grid = monotonicity_grid(&m, &[], &rat(1, 2));
        assert!(!check_monotone(&m, &grid).is_monotone());
    }
}
