use std::cmp::Ordering;

use num_traits::Zero;

use crate::model::{canonical_cmp, Bundle, JointDistribution, Menu, Valuation};
use crate::rational::Rational;

/// What a utility-maximizing buyer takes from a menu.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuyerOutcome {
    pub bundle: Bundle,
    pub payment: Rational,
    pub utility: Rational,
}

/// Total preference order of the buyer over offered bundles: higher utility,
/// then higher payment, then more items, then the lexicographically smallest
/// item set. `Greater` means `x` is preferred.
pub(crate) fn prefer(x: &BuyerOutcome, y: &BuyerOutcome) -> Ordering {
    x.utility
        .cmp(&y.utility)
        .then_with(|| x.payment.cmp(&y.payment))
        .then_with(|| x.bundle.len().cmp(&y.bundle.len()))
        .then_with(|| canonical_cmp(y.bundle, x.bundle))
}

pub fn buyer_choice(menu: &Menu, valuation: &Valuation) -> BuyerOutcome {
    assert_eq!(menu.n(), valuation.n(), "menu and valuation dimensions differ");
    let mut best = BuyerOutcome {
        bundle: Bundle::EMPTY,
        payment: Rational::zero(),
        utility: Rational::zero(),
    };
    for mask in 1..(1u32 << menu.n()) {
        let bundle = Bundle::from_mask(mask as u16);
        let payment = menu.price(bundle).clone();
        let candidate = BuyerOutcome {
            bundle,
            utility: valuation.of(bundle) - &payment,
            payment,
        };
        if prefer(&candidate, &best) == Ordering::Greater {
            best = candidate;
        }
    }
    best
}

pub fn revenue_at(menu: &Menu, valuation: &Valuation) -> Rational {
    buyer_choice(menu, valuation).payment
}

/// Exact expected payment of the buyer.
pub fn expected_revenue(menu: &Menu, dist: &JointDistribution) -> Rational {
    assert_eq!(menu.n(), dist.n(), "menu and distribution dimensions differ");
    dist.atoms()
        .iter()
        .map(|(v, p)| revenue_at(menu, v) * p)
        .sum()
}

/// Probability that each bundle is the one bought (empty bundle included),
/// in mask order.
pub fn sale_probabilities(menu: &Menu, dist: &JointDistribution) -> Vec<(Bundle, Rational)> {
    let mut probs = vec![Rational::zero(); 1 << menu.n()];
    for (v, p) in dist.atoms() {
        probs[buyer_choice(menu, v).bundle.index()] += p;
    }
    probs
        .into_iter()
        .enumerate()
        .map(|(mask, p)| (Bundle::from_mask(mask as u16), p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{product, SingleItemDistribution};
    use crate::rational::{int, rat};

    fn menu2(a: i64, b: i64, c: i64) -> Menu {
        Menu::from_ints(2, &[a, b, c]).unwrap()
    }

    fn val(values: &[Rational]) -> Valuation {
        Valuation::new(values.to_vec()).unwrap()
    }

    #[test]
    fn zero_utility_tie_goes_to_the_sale() {
        let out = buyer_choice(&menu2(1, 10, 100), &Valuation::from_ints(&[1, 1]));
        assert_eq!(out.bundle, Bundle::singleton(0));
        assert_eq!(out.payment, int(1));
        assert_eq!(out.utility, int(0));
    }

    #[test]
    fn nothing_affordable() {
        let out = buyer_choice(&menu2(3, 4, 5), &Valuation::from_ints(&[0, 0]));
        assert_eq!(out.bundle, Bundle::EMPTY);
        assert_eq!(out.payment, int(0));
    }

    #[test]
    fn equal_utility_prefers_higher_payment() {
        // item 1 and the pair both leave utility 96
        let out = buyer_choice(&menu2(4, 100, 104), &Valuation::from_ints(&[100, 100]));
        assert_eq!(out.bundle, Bundle::full(2));
        assert_eq!(out.payment, int(104));
        assert_eq!(out.utility, int(96));
    }

    #[test]
    fn equal_utility_and_payment_prefers_larger_then_lexicographic() {
        // symmetric menu on the diagonal: items 1 and 2 tie completely
        let out = buyer_choice(&menu2(3, 3, 9), &Valuation::from_ints(&[5, 5]));
        assert_eq!(out.bundle, Bundle::singleton(0));
        // pair and item 1 tie in utility and payment
        let out = buyer_choice(&menu2(3, 5, 3), &Valuation::from_ints(&[4, 0]));
        assert_eq!(out.bundle, Bundle::full(2));
    }

    #[test]
    fn revenue_at_examples() {
        let m = menu2(5, 1, 10);
        assert_eq!(revenue_at(&m, &Valuation::from_ints(&[5, 0])), int(5));
        assert_eq!(revenue_at(&m, &val(&[int(5), rat(9, 2)])), int(1));
        assert_eq!(revenue_at(&m, &Valuation::from_ints(&[0, 0])), int(0));
    }

    #[test]
    fn example4_optimal_menu_revenue() {
        let f = SingleItemDistribution::uniform_ints(&[0, 1, 2, 2, 2, 2, 5, 6, 6, 6]).unwrap();
        let d = product(&[f.clone(), f.clone(), f]).unwrap();
        let m = Menu::from_ints(3, &[6, 6, 6, 7, 7, 8, 9]).unwrap();
        assert_eq!(expected_revenue(&m, &d), rat(6293, 1000));
    }

    #[test]
    fn point_mass_at_zero_earns_nothing() {
        let d = JointDistribution::point(Valuation::from_ints(&[0, 0])).unwrap();
        assert_eq!(expected_revenue(&menu2(1, 2, 3), &d), int(0));
    }

    #[test]
    fn sale_probabilities_sum_to_one() {
        let u = SingleItemDistribution::uniform_ints(&[1, 3]).unwrap();
        let d = product(&[u.clone(), u]).unwrap();
        let probs = sale_probabilities(&menu2(1, 2, 3), &d);
        let total: Rational = probs.iter().map(|(_, p)| p).sum();
        assert_eq!(total, int(1));
    }
}
