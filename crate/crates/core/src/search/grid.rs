use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::json::{array, field, item_count, parse_json, rational_at};
use crate::model::{canonical_bundles, Bundle, JointDistribution};
use crate::rational::{ceil_to_int, format_rational, int, Rational};

/// How a candidate grid was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GridKind {
    /// Prices `0, 1, ..., ceil(max v(S))` for each bundle `S`.
    IntegerGrid,
    /// Sums of per-item support values (or zero) over the items of `S`.
    SupportSums,
    Explicit,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::IntegerGrid => "integer-grid",
            GridKind::SupportSums => "support-sums",
            GridKind::Explicit => "explicit",
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Requested grid construction.
#[derive(Clone, Debug, PartialEq)]
pub enum GridMode {
    IntegerGrid,
    SupportSums,
    /// Per-bundle price sets in canonical bundle order.
    Explicit(Vec<Vec<Rational>>),
}

/// Finite candidate price sets, one per nonempty bundle in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateGrid {
    n: usize,
    sets: Vec<Vec<Rational>>,
    kind: GridKind,
}

impl CandidateGrid {
    /// Sorts and deduplicates every set. Sets must be nonempty and
    /// nonnegative, one per bundle.
    pub fn explicit(n: usize, sets: Vec<Vec<Rational>>) -> Result<Self> {
        Self::build(n, sets, GridKind::Explicit)
    }

    fn build(n: usize, sets: Vec<Vec<Rational>>, kind: GridKind) -> Result<Self> {
        let bundles = canonical_bundles(n);
        if sets.len() != bundles.len() {
            return Err(Error::Grid(format!(
                "expected {} price sets for {n} items, found {}",
                bundles.len(),
                sets.len()
            )));
        }
        let mut clean = Vec::with_capacity(sets.len());
        for (bundle, set) in bundles.iter().zip(sets) {
            if set.is_empty() {
                return Err(Error::Grid(format!("empty price set for bundle {bundle}")));
            }
            if let Some(neg) = set.iter().find(|p| p.is_negative()) {
                return Err(Error::Grid(format!("negative price {neg} for bundle {bundle}")));
            }
            let sorted: BTreeSet<Rational> = set.into_iter().collect();
            clean.push(sorted.into_iter().collect());
        }
        Ok(CandidateGrid {
            n,
            sets: clean,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Price sets in canonical bundle order.
    pub fn sets(&self) -> &[Vec<Rational>] {
        &self.sets
    }

    pub fn set(&self, bundle: Bundle) -> &[Rational] {
        let pos = canonical_bundles(self.n)
            .iter()
            .position(|b| *b == bundle)
            .expect("nonempty bundle of the grid's items");
        &self.sets[pos]
    }

    /// Size of the cartesian product of all sets.
    pub fn combinations(&self) -> u128 {
        self.sets
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
            .unwrap_or(u128::MAX)
    }

    /// True when, for every `S ⊂ T`, each price of `T` not above the largest
    /// price of `S` is also a price of `S`. Lowering a price to that of a
    /// superset then stays on the grid.
    pub fn is_downward_closed(&self) -> bool {
        let bundles = canonical_bundles(self.n);
        let pos = |b: Bundle| bundles.iter().position(|x| *x == b).expect("bundle");
        bundles.iter().enumerate().all(|(ti, &t)| {
            t.items().all(|i| {
                let s = t.without(i);
                if s.is_empty() {
                    return true;
                }
                let small = &self.sets[pos(s)];
                let top = small.last().expect("nonempty");
                self.sets[ti]
                    .iter()
                    .take_while(|p| *p <= top)
                    .all(|p| small.binary_search(p).is_ok())
            })
        })
    }

    /// Caps every bundle's prices at `max_price`. On an integer grid the
    /// sets become `0..=floor(max_price)`.
    pub fn with_max_price(&self, max_price: &Rational) -> Result<Self> {
        let sets = match self.kind {
            GridKind::IntegerGrid => {
                let top = max_price.floor().to_integer().to_i64().ok_or_else(|| {
                    Error::Grid(format!("max price {max_price} out of range"))
                })?;
                if top < 0 {
                    return Err(Error::Grid(format!("negative max price {max_price}")));
                }
                vec![(0..=top).map(int).collect(); self.sets.len()]
            }
            _ => self
                .sets
                .iter()
                .map(|s| s.iter().filter(|p| *p <= max_price).cloned().collect())
                .collect(),
        };
        Self::build(self.n, sets, self.kind)
    }

    pub fn to_json(&self) -> Value {
        let mut prices = Map::new();
        for (bundle, set) in canonical_bundles(self.n).iter().zip(&self.sets) {
            prices.insert(
                bundle.key(),
                Value::Array(set.iter().map(|p| Value::String(format_rational(p))).collect()),
            );
        }
        json!({"items": self.n, "prices": prices})
    }
}

pub fn candidate_grid(dist: &JointDistribution, mode: &GridMode) -> Result<CandidateGrid> {
    let n = dist.n();
    let bundles = canonical_bundles(n);
    match mode {
        GridMode::IntegerGrid => {
            for (v, _) in dist.atoms() {
                if let Some(x) = v.values().iter().find(|x| !x.is_integer()) {
                    return Err(Error::NonIntegerSupport(x.clone()));
                }
            }
            let mut sets = Vec::with_capacity(bundles.len());
            for &b in &bundles {
                let top = ceil_to_int(&dist.max_bundle_value(b));
                let top = top.to_i64().ok_or_else(|| Error::Grid("price bound too large".into()))?;
                sets.push((0..=top).map(int).collect());
            }
            CandidateGrid::build(n, sets, GridKind::IntegerGrid)
        }
        GridMode::SupportSums => {
            let supports: Vec<Vec<Rational>> = (0..n)
                .map(|i| {
                    let mut s: BTreeSet<Rational> =
                        dist.marginal(i).support().cloned().collect();
                    s.insert(Rational::zero());
                    s.into_iter().collect()
                })
                .collect();
            let sets = bundles
                .iter()
                .map(|b| {
                    let mut sums: BTreeSet<Rational> = BTreeSet::from([Rational::zero()]);
                    for i in b.items() {
                        sums = sums
                            .iter()
                            .flat_map(|a| supports[i].iter().map(move |x| a + x))
                            .collect();
                    }
                    sums.into_iter().collect()
                })
                .collect();
            CandidateGrid::build(n, sets, GridKind::SupportSums)
        }
        GridMode::Explicit(sets) => CandidateGrid::explicit(n, sets.clone()),
    }
}

/// Reads `{"items": n, "prices": {"1": ["0", "1/2"], "1,2": [...], ...}}`.
pub fn parse_grid(text: &str) -> Result<CandidateGrid> {
    let root = parse_json(text)?;
    let n = item_count(&root)?;
    let prices = field(&root, "prices", "$")?
        .as_object()
        .ok_or_else(|| Error::parse("$.prices", "expected an object"))?;
    let mut sets = Vec::new();
    for bundle in canonical_bundles(n) {
        let key = bundle.key();
        let loc = format!("$.prices.{key:?}");
        let list = prices
            .get(&key)
            .ok_or_else(|| Error::parse("$.prices", format!("missing bundle {key:?}")))?;
        let set = array(list, &loc)?
            .iter()
            .enumerate()
            .map(|(j, v)| rational_at(v, &format!("{loc}[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        sets.push(set);
    }
    if prices.len() != sets.len() {
        return Err(Error::parse("$.prices", "unexpected bundle keys"));
    }
    CandidateGrid::explicit(n, sets)
}

/// Smallest common denominator of every price in the grid.
pub(crate) fn price_denominator_lcm(grid: &CandidateGrid) -> num_bigint::BigInt {
    crate::rational::lcm_of_denominators(grid.sets.iter().flatten())
}

pub(crate) fn max_price(grid: &CandidateGrid) -> Rational {
    grid.sets
        .iter()
        .filter_map(|s| s.last())
        .max()
        .cloned()
        .unwrap_or_else(Rational::one)
}
