use std::fmt;

use num_traits::{Signed, Zero};

use super::bundle::{canonical_bundles, Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// A deterministic mechanism: one price for every nonempty bundle.
///
/// Prices are stored by bundle mask; slot 0 is the empty bundle and always
/// holds 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Menu {
    n: usize,
    prices: Vec<Rational>,
}

impl Menu {
    /// Builds a menu from prices listed in canonical bundle order
    /// (singletons, then pairs, ...).
    pub fn new(n: usize, prices: Vec<Rational>) -> Result<Self> {
        if n == 0 || n > MAX_ITEMS {
            return Err(Error::ItemCount(n));
        }
        let bundles = canonical_bundles(n);
        if prices.len() != bundles.len() {
            return Err(Error::Grid(format!(
                "{} prices given, {n} items need {}",
                prices.len(),
                bundles.len()
            )));
        }
        let mut slots = vec![Rational::zero(); 1 << n];
        for (bundle, price) in bundles.into_iter().zip(prices) {
            if price.is_negative() {
                return Err(Error::Negative {
                    what: "price",
                    value: price,
                    location: format!("bundle {}", bundle.key()),
                });
            }
            slots[bundle.index()] = price;
        }
        Ok(Menu { n, prices: slots })
    }

    pub fn from_fn(n: usize, mut price: impl FnMut(Bundle) -> Rational) -> Result<Self> {
        let prices = canonical_bundles(n).into_iter().map(&mut price).collect();
        Menu::new(n, prices)
    }

    pub fn from_ints(n: usize, prices: &[i64]) -> Result<Self> {
        Menu::new(n, prices.iter().map(|&p| int(p)).collect())
    }

    /// Two-item menu `(a, b, c)`: item 1, item 2, and the pair.
    pub fn two(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        Menu::new(2, vec![a, b, c])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn price(&self, bundle: Bundle) -> &Rational {
        &self.prices[bundle.index()]
    }

    /// Prices in canonical bundle order.
    pub fn canonical_prices(&self) -> Vec<Rational> {
        canonical_bundles(self.n)
            .into_iter()
            .map(|b| self.prices[b.index()].clone())
            .collect()
    }

    pub fn a(&self) -> &Rational {
        debug_assert_eq!(self.n, 2);
        &self.prices[0b01]
    }

    pub fn b(&self) -> &Rational {
        debug_assert_eq!(self.n, 2);
        &self.prices[0b10]
    }

    pub fn c(&self) -> &Rational {
        debug_assert_eq!(self.n, 2);
        &self.prices[0b11]
    }

    fn all_bundles(&self) -> impl Iterator<Item = Bundle> {
        (0..(1u32 << self.n)).map(|m| Bundle::from_mask(m as u16))
    }

    /// `p(S) + p(T) >= p(S ∩ T) + p(S ∪ T)` for every pair, with `p(∅) = 0`.
    pub fn is_submodular(&self) -> bool {
        self.all_bundles().all(|s| {
            self.all_bundles().all(|t| {
                self.price(s) + self.price(t)
                    >= self.price(s.intersection(t)) + self.price(s.union(t))
            })
        })
    }

    /// `p(S) + p(T) >= p(S ∪ T)` for every pair.
    pub fn is_subadditive(&self) -> bool {
        self.all_bundles()
            .all(|s| self.all_bundles().all(|t| self.price(s) + self.price(t) >= *self.price(s.union(t))))
    }

    /// Prices depend only on bundle size.
    pub fn is_symmetric(&self) -> bool {
        let mut by_size: Vec<Option<&Rational>> = vec![None; self.n + 1];
        self.all_bundles().all(|b| match by_size[b.len()] {
            Some(p) => p == self.price(b),
            None => {
                by_size[b.len()] = Some(self.price(b));
                true
            }
        })
    }

    /// `p(S) = Σ_{i∈S} p({i})` for every bundle.
    pub fn is_additive(&self) -> bool {
        self.all_bundles().all(|b| {
            let sum: Rational = b.items().map(|i| self.price(Bundle::singleton(i))).sum();
            sum == *self.price(b)
        })
    }

    /// Every nonempty bundle has the same price.
    pub fn is_bundle_only(&self) -> bool {
        let grand = self.price(Bundle::full(self.n));
        self.all_bundles().skip(1).all(|b| self.price(b) == grand)
    }

    /// `p(S) <= p(T)` whenever `S ⊆ T`.
    pub fn is_bundle_monotone(&self) -> bool {
        self.all_bundles().skip(1).all(|t| {
            t.items()
                .all(|i| t.len() == 1 || self.price(t.without(i)) <= self.price(t))
        })
    }

    /// Two-item normalization `(min(a,c), min(b,c), c)`. Buyer behavior is
    /// unchanged at every valuation.
    pub fn normalize(&self) -> Result<Menu> {
        if self.n != 2 {
            return Err(Error::WrongItemCount {
                expected: 2,
                found: self.n,
            });
        }
        let c = self.c().clone();
        Menu::two(
            self.a().min(&c).clone(),
            self.b().min(&c).clone(),
            c,
        )
    }

    /// Lowers every price to the cheapest price of a superset:
    /// `p'(S) = min_{T ⊇ S} p(T)`. For two items this is [`Menu::normalize`].
    /// Submodularity and symmetry are preserved.
    pub fn monotone_closure(&self) -> Menu {
        let mut prices = self.prices.clone();
        // Masks in decreasing size order so supersets are final first.
        let mut order: Vec<Bundle> = self.all_bundles().skip(1).collect();
        order.sort_by_key(|b| std::cmp::Reverse(b.len()));
        for s in order {
            for i in 0..self.n {
                if !s.contains(i) {
                    let sup = s.union(Bundle::singleton(i));
                    if prices[sup.index()] < prices[s.index()] {
                        prices[s.index()] = prices[sup.index()].clone();
                    }
                }
            }
        }
        Menu { n: self.n, prices }
    }

    /// Relabels items: item `i` becomes item `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Menu {
        let mut prices = vec![Rational::zero(); self.prices.len()];
        for b in self.all_bundles() {
            prices[b.permuted(perm).index()] = self.prices[b.index()].clone();
        }
        Menu { n: self.n, prices }
    }

    /// Two-item menu with the items exchanged: `(b, a, c)`.
    pub fn swapped(&self) -> Menu {
        self.permuted(&[1, 0])
    }

    /// Multiplies every price by a positive factor.
    pub fn scaled(&self, factor: &Rational) -> Menu {
        Menu {
            n: self.n,
            prices: self.prices.iter().map(|p| p * factor).collect(),
        }
    }
}

impl fmt::Debug for Menu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Menu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.canonical_prices().iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3(p: &[i64]) -> Menu {
        Menu::from_ints(3, p).unwrap()
    }

    #[test]
    fn submodularity_examples() {
        assert!(m3(&[5, 6, 6, 7, 7, 8, 9]).is_submodular());
        assert!(m3(&[5, 5, 5, 7, 7, 7, 9]).is_submodular());
        // p({1,2}) + p({1,3}) = 14 < p({1}) + p({1,2,3}) = 15
        assert!(!m3(&[6, 6, 6, 7, 7, 8, 9]).is_submodular());
        assert!(Menu::from_ints(2, &[2, 3, 5]).unwrap().is_submodular());
    }

    #[test]
    fn subadditivity_examples() {
        assert!(!Menu::from_ints(2, &[1, 1, 3]).unwrap().is_subadditive());
        assert!(m3(&[6, 6, 6, 7, 7, 8, 9]).is_subadditive());
    }

    #[test]
    fn symmetry_examples() {
        assert!(m3(&[6, 6, 6, 7, 7, 7, 9]).is_symmetric());
        assert!(!m3(&[6, 6, 6, 7, 7, 8, 9]).is_symmetric());
        assert!(Menu::from_ints(1, &[4]).unwrap().is_symmetric());
    }

    #[test]
    fn normalize_caps_item_prices() {
        let norm = |p: &[i64]| Menu::from_ints(2, p).unwrap().normalize().unwrap();
        assert_eq!(norm(&[5, 1, 3]), Menu::from_ints(2, &[3, 1, 3]).unwrap());
        assert_eq!(norm(&[1, 1, 3]), Menu::from_ints(2, &[1, 1, 3]).unwrap());
        assert_eq!(norm(&[10, 10, 4]), Menu::from_ints(2, &[4, 4, 4]).unwrap());
        assert!(m3(&[1, 1, 1, 2, 2, 2, 3]).normalize().is_err());
    }

    #[test]
    fn closure_is_monotone_and_keeps_submodularity() {
        let m = m3(&[9, 2, 3, 4, 12, 5, 6]);
        let c = m.monotone_closure();
        assert!(c.is_bundle_monotone());
        assert_eq!(c, m3(&[4, 2, 3, 4, 6, 5, 6]));
    }

    #[test]
    fn rejects_negative_prices_and_wrong_length() {
        assert!(Menu::from_ints(2, &[1, -1, 3]).is_err());
        assert!(Menu::from_ints(2, &[1, 1]).is_err());
    }

    #[test]
    fn display_uses_canonical_order() {
        assert_eq!(m3(&[6, 6, 6, 7, 7, 8, 9]).to_string(), "(6, 6, 6, 7, 7, 8, 9)");
        assert_eq!(
            Menu::from_ints(2, &[1, 10, 100]).unwrap().swapped().to_string(),
            "(10, 1, 100)"
        );
    }
}
