use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::json::{array, field, item_count, parse_json, rational_at};
use crate::model::{canonical_bundles, Menu, Valuation};
use crate::rational::{format_rational, Rational};

/// One option of a lottery menu: per-item allocation probabilities and a
/// payment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub alloc: Vec<Rational>,
    pub pay: Rational,
}

impl Entry {
    pub fn null(n: usize) -> Self {
        Entry {
            alloc: vec![Rational::zero(); n],
            pay: Rational::zero(),
        }
    }

    pub fn is_null(&self) -> bool {
        self.pay.is_zero() && self.alloc.iter().all(Zero::is_zero)
    }

    pub fn utility(&self, v: &Valuation) -> Rational {
        expected_value(v, &self.alloc) - &self.pay
    }
}

pub(crate) fn expected_value(v: &Valuation, alloc: &[Rational]) -> Rational {
    v.values().iter().zip(alloc).map(|(x, q)| x * q).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomizedMenu {
    n: usize,
    entries: Vec<Entry>,
}

impl RandomizedMenu {
    /// Validates the entries and puts the null entry first if it is missing.
    pub fn new(n: usize, entries: Vec<Entry>) -> Result<Self> {
        for (k, e) in entries.iter().enumerate() {
            if e.alloc.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: e.alloc.len(),
                });
            }
            if let Some(q) = e.alloc.iter().find(|q| q.is_negative() || **q > Rational::one()) {
                return Err(Error::parse(
                    format!("entries[{k}].alloc"),
                    format!("probability {q} outside [0, 1]"),
                ));
            }
            if e.pay.is_negative() {
                return Err(Error::Negative {
                    what: "payment",
                    value: e.pay.clone(),
                    location: format!("entries[{k}].pay"),
                });
            }
        }
        let mut entries = entries;
        if !entries.iter().any(Entry::is_null) {
            entries.insert(0, Entry::null(n));
        }
        Ok(RandomizedMenu { n, entries })
    }

    /// A deterministic menu as lotteries with 0/1 allocations.
    pub fn from_menu(menu: &Menu) -> Self {
        let n = menu.n();
        let entries = canonical_bundles(n)
            .into_iter()
            .map(|b| Entry {
                alloc: (0..n)
                    .map(|i| if b.contains(i) { Rational::one() } else { Rational::zero() })
                    .collect(),
                pay: menu.price(b).clone(),
            })
            .collect();
        RandomizedMenu::new(n, entries).expect("menu prices are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn entry(&self, k: usize) -> &Entry {
        &self.entries[k]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "alloc": e.alloc.iter().map(format_rational).collect::<Vec<_>>(),
                    "pay": format_rational(&e.pay),
                })
            })
            .collect();
        json!({"items": self.n, "entries": entries})
    }
}

/// Reads `{"items": n, "entries": [{"alloc": [...], "pay": "..."}, ...]}`.
pub fn parse_randomized_menu(text: &str) -> Result<RandomizedMenu> {
    let root = parse_json(text)?;
    let n = item_count(&root)?;
    let list = array(field(&root, "entries", "$")?, "$.entries")?;
    let mut entries = Vec::with_capacity(list.len());
    for (k, e) in list.iter().enumerate() {
        let loc = format!("$.entries[{k}]");
        let alloc = array(field(e, "alloc", &loc)?, &format!("{loc}.alloc"))?
            .iter()
            .enumerate()
            .map(|(i, q)| rational_at(q, &format!("{loc}.alloc[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let pay = rational_at(field(e, "pay", &loc)?, &format!("{loc}.pay"))?;
        entries.push(Entry { alloc, pay });
    }
    RandomizedMenu::new(n, entries)
}

/// The entry a single-purchase buyer picks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub index: usize,
    pub utility: Rational,
    pub pay: Rational,
}

/// Highest utility; ties go to the higher payment, then the lowest index.
pub fn rchoice(menu: &RandomizedMenu, v: &Valuation) -> Choice {
    assert_eq!(menu.n(), v.n(), "menu and valuation dimensions differ");
    let mut best: Option<Choice> = None;
    for (index, e) in menu.entries().iter().enumerate() {
        let c = Choice {
            index,
            utility: e.utility(v),
            pay: e.pay.clone(),
        };
        let better = match &best {
            None => true,
            Some(b) => c
                .utility
                .cmp(&b.utility)
                .then_with(|| c.pay.cmp(&b.pay))
                == Ordering::Greater,
        };
        if better {
            best = Some(c);
        }
    }
    best.expect("menu has the null entry")
}

/// How allocations from several purchases combine for each item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombinationRule {
    /// `min(1, π_i + ρ_i)`.
    CappedAdditive,
    /// `1 - (1 - π_i)(1 - ρ_i)`: every lottery is drawn independently.
    IndependentLotteries,
}

impl CombinationRule {
    pub fn name(self) -> &'static str {
        match self {
            CombinationRule::CappedAdditive => "capped",
            CombinationRule::IndependentLotteries => "independent",
        }
    }

    pub fn combine(self, a: &Rational, b: &Rational) -> Rational {
        match self {
            CombinationRule::CappedAdditive => (a + b).min(Rational::one()),
            CombinationRule::IndependentLotteries => {
                let one = Rational::one();
                &one - (&one - a) * (&one - b)
            }
        }
    }
}

impl std::str::FromStr for CombinationRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "capped" | "capped-additive" => Ok(CombinationRule::CappedAdditive),
            "independent" | "independent-lotteries" => Ok(CombinationRule::IndependentLotteries),
            other => Err(Error::parse("--rule", format!("unknown rule {other:?}"))),
        }
    }
}

/// Utility of buying every entry in `picks` (repeats allowed) and combining
/// the allocations with `rule`.
pub fn false_name_utility(
    menu: &RandomizedMenu,
    v: &Valuation,
    picks: &[usize],
    rule: CombinationRule,
) -> Rational {
    assert!(!picks.is_empty(), "at least one pick");
    let mut alloc = menu.entry(picks[0]).alloc.clone();
    let mut paid = menu.entry(picks[0]).pay.clone();
    for &k in &picks[1..] {
        let e = menu.entry(k);
        for (q, r) in alloc.iter_mut().zip(&e.alloc) {
            *q = rule.combine(q, r);
        }
        paid += &e.pay;
    }
    expected_value(v, &alloc) - paid
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    /// Nondecreasing entry indices.
    pub picks: Vec<usize>,
    pub utility: Rational,
}

/// Largest multiset enumeration accepted.
pub const MAX_PICKS: usize = 3;
pub const PICK_LIMIT: u128 = 5_000_000;

/// Best multiset of at most `k` entries. Ties go to fewer picks, then the
/// lexicographically smallest multiset.
pub fn best_false_name_deviation(
    menu: &RandomizedMenu,
    v: &Valuation,
    rule: CombinationRule,
    k: usize,
) -> Result<Deviation> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let e = menu.len() as u128;
    // multisets of size j from e entries: C(e + j - 1, j)
    let count: u128 = (1..=k as u128)
        .map(|j| (0..j).fold(1u128, |acc, i| acc.saturating_mul(e + i) / (i + 1)))
        .fold(0u128, u128::saturating_add);
    if k > MAX_PICKS || count > PICK_LIMIT {
        return Err(Error::CombinatorialLimit {
            count,
            limit: PICK_LIMIT,
        });
    }
    let better = |a: &Deviation, b: &Deviation| {
        a.utility
            .cmp(&b.utility)
            .then_with(|| b.picks.len().cmp(&a.picks.len()))
            .then_with(|| b.picks.cmp(&a.picks))
            == Ordering::Greater
    };
    let best = (0..menu.len())
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Deviation> = None;
            let mut picks = vec![first];
            extend(menu, v, rule, k, &mut picks, &mut |d| {
                if best.as_ref().is_none_or(|b| better(&d, b)) {
                    best = Some(d);
                }
            });
            best.expect("at least one multiset")
        })
        .reduce_with(|a, b| if better(&b, &a) { b } else { a })
        .expect("menu is nonempty");
    Ok(best)
}

fn extend(
    menu: &RandomizedMenu,
    v: &Valuation,
    rule: CombinationRule,
    k: usize,
    picks: &mut Vec<usize>,
    visit: &mut dyn FnMut(Deviation),
) {
    visit(Deviation {
        picks: picks.clone(),
        utility: false_name_utility(menu, v, picks, rule),
    });
    if picks.len() == k {
        return;
    }
    let last = *picks.last().expect("nonempty");
    for next in last..menu.len() {
        picks.push(next);
        extend(menu, v, rule, k, picks, visit);
        picks.pop();
    }
}
