//! Depth-first enumeration of menus in canonical bundle order.
//!
//! Each type keeps its current best offer (utility, payment, size) while
//! prices are fixed one bundle at a time, so extending a partial menu costs
//! one comparison per type. The grand bundle is last and is evaluated in a
//! flat loop over its candidate prices.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use super::SearchConstraint;
use crate::model::{canonical_bundles, Bundle, JointDistribution};
use crate::rational::{lcm_of_denominators, Rational};

use super::grid::{max_price, price_denominator_lcm, CandidateGrid};

/// Arithmetic used inside the enumeration.
pub(crate) trait Amount: Clone + PartialOrd + Send + Sync + Debug {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

macro_rules! primitive_amount {
    ($t:ty, $zero:expr) => {
        impl Amount for $t {
            fn zero() -> Self {
                $zero
            }
            fn add(&self, other: &Self) -> Self {
                self + other
            }
            fn sub(&self, other: &Self) -> Self {
                self - other
            }
            fn mul(&self, other: &Self) -> Self {
                self * other
            }
        }
    };
}

primitive_amount!(i64, 0);
primitive_amount!(i128, 0);
primitive_amount!(f64, 0.0);

impl Amount for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// How a bundle's price is tied to earlier bundles.
#[derive(Clone, Debug)]
enum Tie {
    Free,
    /// Same price as an earlier level.
    Equal(usize),
    /// Sum of earlier levels' prices.
    Sum(Vec<usize>),
}

struct Level<T> {
    prices: Vec<T>,
    exact: Vec<Rational>,
    size: u8,
    /// Levels of `S \ {i}` for `|S| >= 2`.
    lower: Vec<usize>,
    /// Submodularity pairs `(S, T, S ∩ T)` with `S ∪ T` equal to this bundle.
    pairs: Vec<(usize, usize, Option<usize>)>,
    tie: Tie,
    /// `v_t(S)` for every type.
    values: Vec<T>,
}

pub(crate) struct Problem<T> {
    levels: Vec<Level<T>>,
    weights: Vec<T>,
    prune: bool,
}

#[derive(Clone)]
struct State<T> {
    utility: Vec<T>,
    payment: Vec<T>,
    size: Vec<u8>,
}

#[derive(Clone, Debug)]
pub(crate) struct Found<T> {
    pub best: Option<(T, Vec<usize>)>,
    pub examined: u64,
}

impl<T: Amount> Found<T> {
    fn empty() -> Self {
        Found {
            best: None,
            examined: 0,
        }
    }

    /// Higher revenue wins; equal revenue goes to the smaller index vector.
    fn merge(self, other: Self) -> Self {
        let examined = self.examined + other.examined;
        let best = match (self.best, other.best) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => match a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal) {
                Ordering::Greater => Some(a),
                Ordering::Less => Some(b),
                Ordering::Equal => {
                    if a.1 <= b.1 {
                        Some(a)
                    } else {
                        Some(b)
                    }
                }
            },
        };
        Found { best, examined }
    }
}

/// Levels shallower than this fan out across the thread pool.
const PARALLEL_DEPTH: usize = 2;

impl<T: Amount> Problem<T> {
    pub(crate) fn new(
        dist: &JointDistribution,
        grid: &CandidateGrid,
        constraint: SearchConstraint,
        prune: bool,
        convert: impl Fn(&Rational) -> T,
        convert_weight: impl Fn(&Rational) -> T,
    ) -> Self {
        let bundles = canonical_bundles(dist.n());
        let level_of = |b: Bundle| bundles.iter().position(|x| *x == b).expect("bundle");
        let submodular = matches!(
            constraint,
            SearchConstraint::Submodular | SearchConstraint::SymmetricSubmodular
        );
        let levels = bundles
            .iter()
            .enumerate()
            .map(|(k, &bundle)| {
                let lower = if bundle.len() >= 2 {
                    bundle.items().map(|i| level_of(bundle.without(i))).collect()
                } else {
                    Vec::new()
                };
                let mut pairs = Vec::new();
                if submodular {
                    for &s in &bundles[..k] {
                        for &t in &bundles[..k] {
                            if s.mask() < t.mask()
                                && s.is_subset_of(bundle)
                                && t.is_subset_of(bundle)
                                && s.union(t) == bundle
                            {
                                let meet = s.intersection(t);
                                let meet = (!meet.is_empty()).then(|| level_of(meet));
                                pairs.push((level_of(s), level_of(t), meet));
                            }
                        }
                    }
                }
                let first_of_size = bundles.iter().position(|b| b.len() == bundle.len()).expect("size");
                let tie = match constraint {
                    SearchConstraint::Symmetric | SearchConstraint::SymmetricSubmodular
                        if first_of_size < k =>
                    {
                        Tie::Equal(first_of_size)
                    }
                    SearchConstraint::Additive if bundle.len() >= 2 => {
                        Tie::Sum(bundle.items().map(|i| level_of(Bundle::singleton(i))).collect())
                    }
                    SearchConstraint::BundleOnly if k > 0 => Tie::Equal(0),
                    _ => Tie::Free,
                };
                let exact = grid.sets()[k].clone();
                Level {
                    prices: exact.iter().map(&convert).collect(),
                    exact,
                    size: bundle.len() as u8,
                    lower,
                    pairs,
                    tie,
                    values: dist.atoms().iter().map(|(v, _)| convert(&v.of(bundle))).collect(),
                }
            })
            .collect();
        Problem {
            levels,
            weights: dist.atoms().iter().map(|(_, p)| convert_weight(p)).collect(),
            prune,
        }
    }

    /// Grid indices of the best menu and the number of complete menus
    /// evaluated.
    pub(crate) fn solve(&self) -> Found<T> {
        let types = self.weights.len();
        let state = State {
            utility: vec![T::zero(); types],
            payment: vec![T::zero(); types],
            size: vec![0; types],
        };
        let mut chosen = Vec::with_capacity(self.levels.len());
        self.descend(0, &mut chosen, &state)
    }

    /// Candidate index range of level `k` given the earlier choices, or
    /// `None` when no price fits.
    fn candidates(&self, k: usize, chosen: &[usize]) -> Option<(usize, usize)> {
        let level = &self.levels[k];
        let price = |j: usize| &self.levels[j].exact[chosen[j]];
        let mut lo = 0;
        let mut hi = level.exact.len();
        match &level.tie {
            Tie::Free => {}
            Tie::Equal(j) => {
                let idx = level.exact.binary_search(price(*j)).ok()?;
                lo = idx;
                hi = idx + 1;
            }
            Tie::Sum(parts) => {
                let total: Rational = parts.iter().map(|&j| price(j)).sum();
                let idx = level.exact.binary_search(&total).ok()?;
                lo = idx;
                hi = idx + 1;
            }
        }
        if self.prune {
            if let Some(floor) = level.lower.iter().map(|&j| price(j)).max() {
                lo = lo.max(level.exact.partition_point(|p| p < floor));
            }
        }
        for &(s, t, meet) in &level.pairs {
            let mut cap = price(s) + price(t);
            if let Some(m) = meet {
                cap -= price(m);
            }
            hi = hi.min(level.exact.partition_point(|p| *p <= cap));
        }
        (lo < hi).then_some((lo, hi))
    }

    fn apply(&self, k: usize, idx: usize, state: &State<T>) -> State<T> {
        let level = &self.levels[k];
        let q = &level.prices[idx];
        let mut next = state.clone();
        for t in 0..self.weights.len() {
            let u = level.values[t].sub(q);
            if Self::takes(&u, q, level.size, &state.utility[t], &state.payment[t], state.size[t]) {
                next.utility[t] = u;
                next.payment[t] = q.clone();
                next.size[t] = level.size;
            }
        }
        next
    }

    /// Whether a type switches to a bundle offered later in canonical order.
    #[inline]
    fn takes(u: &T, q: &T, size: u8, best_u: &T, best_p: &T, best_size: u8) -> bool {
        match u.partial_cmp(best_u) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Equal) => match q.partial_cmp(best_p) {
                Some(Ordering::Greater) => true,
                Some(Ordering::Equal) => size > best_size,
                _ => false,
            },
            _ => false,
        }
    }

    fn descend(&self, k: usize, chosen: &mut Vec<usize>, state: &State<T>) -> Found<T> {
        let Some((lo, hi)) = self.candidates(k, chosen) else {
            return Found::empty();
        };
        if k + 1 == self.levels.len() {
            return self.last_level(k, lo, hi, chosen, state);
        }
        if k < PARALLEL_DEPTH {
            (lo..hi)
                .into_par_iter()
                .map(|idx| {
                    let mut chosen = chosen.clone();
                    chosen.push(idx);
                    let next = self.apply(k, idx, state);
                    self.descend(k + 1, &mut chosen, &next)
                })
                .reduce(Found::empty, Found::merge)
        } else {
            let mut found = Found::empty();
            for idx in lo..hi {
                chosen.push(idx);
                let next = self.apply(k, idx, state);
                found = found.merge(self.descend(k + 1, chosen, &next));
                chosen.pop();
            }
            found
        }
    }

    fn last_level(
        &self,
        k: usize,
        lo: usize,
        hi: usize,
        chosen: &[usize],
        state: &State<T>,
    ) -> Found<T> {
        let level = &self.levels[k];
        let types = self.weights.len();
        let base = (0..types).fold(T::zero(), |acc, t| acc.add(&self.weights[t].mul(&state.payment[t])));
        let mut best: Option<(T, usize)> = None;
        for idx in lo..hi {
            let q = &level.prices[idx];
            let mut revenue = base.clone();
            for t in 0..types {
                let u = level.values[t].sub(q);
                if Self::takes(&u, q, level.size, &state.utility[t], &state.payment[t], state.size[t]) {
                    revenue = revenue.add(&self.weights[t].mul(&q.sub(&state.payment[t])));
                }
            }
            if best.as_ref().is_none_or(|(r, _)| revenue > *r) {
                best = Some((revenue, idx));
            }
        }
        Found {
            best: best.map(|(r, idx)| {
                let mut indices = chosen.to_vec();
                indices.push(idx);
                (r, indices)
            }),
            examined: (hi - lo) as u64,
        }
    }
}

/// Arithmetic chosen for an instance.
pub(crate) enum Scaled {
    I64 { price_scale: BigInt, weight_scale: BigInt },
    I128 { price_scale: BigInt, weight_scale: BigInt },
    Exact,
}

/// Picks the narrowest integer type in which values times the price scale
/// and weights times the weight scale are integers and every revenue sum
/// fits.
pub(crate) fn choose_scale(dist: &JointDistribution, grid: &CandidateGrid) -> Scaled {
    let values = dist.atoms().iter().flat_map(|(v, _)| v.values().iter());
    let price_scale = lcm_of_denominators(values).lcm(&price_denominator_lcm(grid));
    let weight_scale = lcm_of_denominators(dist.atoms().iter().map(|(_, p)| p));
    let full = Bundle::full(dist.n());
    let top = dist.max_bundle_value(full).max(max_price(grid));
    let bound = (top * Rational::from_integer(price_scale.clone())).ceil().to_integer()
        * &weight_scale
        * BigInt::from(4);
    let bits = bound.bits();
    if bits < 63 {
        Scaled::I64 {
            price_scale,
            weight_scale,
        }
    } else if bits < 127 {
        Scaled::I128 {
            price_scale,
            weight_scale,
        }
    } else {
        Scaled::Exact
    }
}

/// Converts rationals to a scaled primitive; the scale must clear every
/// denominator.
pub(crate) fn scaled_to<'a, T>(
    scale: &'a BigInt,
    narrow: impl Fn(&BigInt) -> Option<T> + 'a,
) -> impl Fn(&Rational) -> T + 'a {
    move |x: &Rational| {
        let y = x * Rational::from_integer(scale.clone());
        debug_assert!(y.is_integer());
        narrow(&y.to_integer()).expect("scaled value fits")
    }
}
