//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's evaluation or search code: menus are plain price
//! vectors indexed by item bitmask, and everything is brute force.

#![allow(dead_code)]

use mechbench::model::JointDistribution;
use mechbench::search::SearchConstraint;
use mechbench::Rational;
use num_traits::Zero;

/// Prices indexed by bitmask, `prices[0] == 0`.
pub type Prices = Vec<Rational>;

/// Bitmasks of nonempty bundles by size, then lexicographically by item list.
pub fn canonical_masks(n: usize) -> Vec<usize> {
    let mut masks: Vec<usize> = (1..1usize << n).collect();
    let items = |m: usize| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>();
    masks.sort_by(|&x, &y| {
        x.count_ones()
            .cmp(&y.count_ones())
            .then_with(|| items(x).cmp(&items(y)))
    });
    masks
}

/// Payment of a buyer with these values: highest utility, ties to the
/// higher payment.
pub fn payment(prices: &Prices, values: &[Rational]) -> Rational {
    let mut best_u = Rational::zero();
    let mut best_p = Rational::zero();
    for (mask, p) in prices.iter().enumerate().skip(1) {
        let v: Rational = (0..values.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| values[i].clone())
            .sum();
        let u = v - p;
        if u > best_u || (u == best_u && *p > best_p) {
            best_u = u;
            best_p = p.clone();
        }
    }
    best_p
}

pub fn revenue(prices: &Prices, dist: &JointDistribution) -> Rational {
    dist.atoms()
        .iter()
        .map(|(v, q)| payment(prices, v.values()) * q)
        .sum()
}

/// `[p1, p2, p12]` as a mask-indexed vector.
pub fn two(a: i64, b: i64, c: i64) -> Prices {
    [0, a, b, c].iter().map(|&x| Rational::from_integer(x.into())).collect()
}

pub fn admits(constraint: SearchConstraint, prices: &Prices) -> bool {
    let size = prices.len();
    let n = size.trailing_zeros() as usize;
    let pairs = || (0..size).flat_map(move |s| (0..size).map(move |t| (s, t)));
    let submodular = || pairs().all(|(s, t)| &prices[s] + &prices[t] >= &prices[s & t] + &prices[s | t]);
    let symmetric = || {
        pairs().all(|(s, t)| s.count_ones() != t.count_ones() || prices[s] == prices[t])
    };
    match constraint {
        SearchConstraint::Unrestricted => true,
        SearchConstraint::Symmetric => symmetric(),
        SearchConstraint::Submodular => submodular(),
        SearchConstraint::SymmetricSubmodular => symmetric() && submodular(),
        SearchConstraint::Additive => (1..size).all(|m| {
            let sum: Rational = (0..n).filter(|i| m >> i & 1 == 1).map(|i| prices[1 << i].clone()).sum();
            sum == prices[m]
        }),
        SearchConstraint::BundleOnly => (1..size).all(|m| prices[m] == prices[size - 1]),
    }
}

/// Best revenue over every admissible menu of the grid, `None` when no menu
/// is admissible. `sets` follow [`canonical_masks`] order.
pub fn naive_optimum(
    n: usize,
    sets: &[Vec<Rational>],
    constraint: SearchConstraint,
    dist: &JointDistribution,
) -> Option<Rational> {
    let masks = canonical_masks(n);
    assert_eq!(masks.len(), sets.len());
    let mut index = vec![0usize; sets.len()];
    let mut best: Option<Rational> = None;
    loop {
        let mut prices = vec![Rational::zero(); 1 << n];
        for (k, &m) in masks.iter().enumerate() {
            prices[m] = sets[k][index[k]].clone();
        }
        if admits(constraint, &prices) {
            let r = revenue(&prices, dist);
            if best.as_ref().is_none_or(|b| r > *b) {
                best = Some(r);
            }
        }
        let mut k = 0;
        loop {
            if k == index.len() {
                return best;
            }
            index[k] += 1;
            if index[k] < sets[k].len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

pub fn prices_of(menu: &mechbench::model::Menu) -> Prices {
    (0..1u16 << menu.n())
        .map(|m| menu.price(mechbench::model::Bundle::from_mask(m)).clone())
        .collect()
}
