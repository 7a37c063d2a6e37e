use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// A buyer's item values `v_1, .., v_n`, all nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(Vec<Rational>);

impl Valuation {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::Negative {
                    what: "value",
                    value: v.clone(),
                    location: format!("item {}", i + 1),
                });
            }
        }
        Ok(Valuation(values))
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Valuation::new(values.iter().map(|&v| crate::rational::int(v)).collect())
            .expect("nonnegative integer values")
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn value(&self, item: usize) -> &Rational {
        &self.0[item]
    }

    /// Additive value of a bundle.
    pub fn of(&self, bundle: Bundle) -> Rational {
        bundle
            .items()
            .fold(Rational::zero(), |acc, i| acc + &self.0[i])
    }

    pub fn permuted(&self, perm: &[usize]) -> Valuation {
        let mut out = self.0.clone();
        for (i, v) in self.0.iter().enumerate() {
            out[perm[i]] = v.clone();
        }
        Valuation(out)
    }

    /// Coordinatewise `self <= other`.
    pub fn dominated_by(&self, other: &Valuation) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// Finitely supported distribution of one item's value.
///
/// Atoms are sorted by value with duplicates merged, and the probabilities
/// sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleItemDistribution {
    atoms: Vec<(Rational, Rational)>,
}

impl SingleItemDistribution {
    pub fn new(atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (i, (value, prob)) in atoms.into_iter().enumerate() {
            if value.is_negative() {
                return Err(Error::Negative {
                    what: "value",
                    value,
                    location: format!("atom {i}"),
                });
            }
            if !prob.is_positive() {
                return Err(Error::NonPositiveProbability {
                    value: prob,
                    location: format!("atom {i}"),
                });
            }
            *merged.entry(value).or_insert_with(Rational::zero) += prob;
        }
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::Mass { total });
        }
        Ok(SingleItemDistribution {
            atoms: merged.into_iter().collect(),
        })
    }

    /// Uniform over a multiset of values; repeated values accumulate mass.
    pub fn uniform(values: &[Rational]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySupport);
        }
        let p = Rational::new(1.into(), values.len().into());
        Self::new(values.iter().map(|v| (v.clone(), p.clone())).collect())
    }

    pub fn uniform_ints(values: &[i64]) -> Result<Self> {
        Self::uniform(&values.iter().map(|&v| crate::rational::int(v)).collect::<Vec<_>>())
    }

    pub fn point(value: Rational) -> Result<Self> {
        Self::new(vec![(value, Rational::one())])
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn support(&self) -> impl Iterator<Item = &Rational> {
        self.atoms.iter().map(|(v, _)| v)
    }

    pub fn max_value(&self) -> &Rational {
        &self.atoms.last().expect("nonempty").0
    }

    pub fn prob_where(&self, mut pred: impl FnMut(&Rational) -> bool) -> Rational {
        self.atoms
            .iter()
            .filter(|(v, _)| pred(v))
            .map(|(_, p)| p)
            .sum()
    }

    /// `Pr[v >= x]`.
    pub fn tail(&self, x: &Rational) -> Rational {
        self.prob_where(|v| v >= x)
    }

    /// `Pr[lo <= v < hi]`.
    pub fn prob_in(&self, lo: &Rational, hi: &Rational) -> Rational {
        self.prob_where(|v| v >= lo && v < hi)
    }

    /// Best single posted-price revenue `max_p p * Pr[v >= p]`, attained at a
    /// support point.
    pub fn optimal_price_revenue(&self) -> (Rational, Rational) {
        let mut best = (Rational::zero(), Rational::zero());
        let mut tail = Rational::one();
        for (value, prob) in &self.atoms {
            let revenue = value * &tail;
            if revenue > best.1 {
                best = (value.clone(), revenue);
            }
            tail -= prob;
        }
        best
    }
}

/// Finitely supported joint distribution over `n`-item valuations.
///
/// Atoms are sorted lexicographically with duplicates merged, so two
/// distributions are equal exactly when they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution {
    n: usize,
    atoms: Vec<(Valuation, Rational)>,
}

impl JointDistribution {
    pub fn new(n: usize, atoms: Vec<(Valuation, Rational)>) -> Result<Self> {
        if n == 0 || n > MAX_ITEMS {
            return Err(Error::ItemCount(n));
        }
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut merged: BTreeMap<Valuation, Rational> = BTreeMap::new();
        for (i, (valuation, prob)) in atoms.into_iter().enumerate() {
            if valuation.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: valuation.n(),
                });
            }
            if !prob.is_positive() {
                return Err(Error::NonPositiveProbability {
                    value: prob,
                    location: format!("atom {i}"),
                });
            }
            *merged.entry(valuation).or_insert_with(Rational::zero) += prob;
        }
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::Mass { total });
        }
        Ok(JointDistribution {
            n,
            atoms: merged.into_iter().collect(),
        })
    }

    pub fn point(valuation: Valuation) -> Result<Self> {
        Self::new(valuation.n(), vec![(valuation, Rational::one())])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[(Valuation, Rational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn marginal(&self, item: usize) -> SingleItemDistribution {
        SingleItemDistribution::new(
            self.atoms
                .iter()
                .map(|(v, p)| (v.value(item).clone(), p.clone()))
                .collect(),
        )
        .expect("marginal of a valid joint")
    }

    /// Largest `v(S)` over the support.
    pub fn max_bundle_value(&self, bundle: Bundle) -> Rational {
        self.atoms
            .iter()
            .map(|(v, _)| v.of(bundle))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn prob_where(&self, mut pred: impl FnMut(&Valuation) -> bool) -> Rational {
        self.atoms
            .iter()
            .filter(|(v, _)| pred(v))
            .map(|(_, p)| p)
            .sum()
    }

    /// Relabels items: item `i` becomes item `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> JointDistribution {
        Self::new(
            self.n,
            self.atoms
                .iter()
                .map(|(v, p)| (v.permuted(perm), p.clone()))
                .collect(),
        )
        .expect("relabeling preserves validity")
    }

    /// Invariant under every relabeling of the items.
    pub fn is_symmetric(&self) -> bool {
        if self.n == 1 {
            return true;
        }
        // Adjacent transpositions generate the symmetric group.
        (0..self.n - 1).all(|i| {
            let mut perm: Vec<usize> = (0..self.n).collect();
            perm.swap(i, i + 1);
            self.permuted(&perm) == *self
        })
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &JointDistribution, lambda: &Rational) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        let rest = Rational::one() - lambda;
        let atoms = self
            .atoms
            .iter()
            .map(|(v, p)| (v.clone(), p * lambda))
            .chain(other.atoms.iter().map(|(v, p)| (v.clone(), p * &rest)))
            .filter(|(_, p)| p.is_positive())
            .collect();
        Self::new(self.n, atoms)
    }

    /// The marginals, when the items are independent.
    pub fn as_product(&self) -> Option<Vec<SingleItemDistribution>> {
        let parts: Vec<_> = (0..self.n).map(|i| self.marginal(i)).collect();
        (product(&parts).ok()? == *self).then_some(parts)
    }

    /// The common marginal, when the distribution is the product of `n`
    /// copies of it.
    pub fn as_iid(&self) -> Option<SingleItemDistribution> {
        let first = self.marginal(0);
        let parts = vec![first.clone(); self.n];
        (product(&parts).ok()? == *self).then_some(first)
    }
}

/// Independent product of single-item distributions.
pub fn product(parts: &[SingleItemDistribution]) -> Result<JointDistribution> {
    if parts.is_empty() || parts.len() > MAX_ITEMS {
        return Err(Error::ItemCount(parts.len()));
    }
    let mut atoms: Vec<(Vec<Rational>, Rational)> = vec![(Vec::new(), Rational::one())];
    for part in parts {
        atoms = atoms
            .into_iter()
            .flat_map(|(prefix, p)| {
                part.atoms().iter().map(move |(v, q)| {
                    let mut values = prefix.clone();
                    values.push(v.clone());
                    (values, &p * q)
                })
            })
            .collect();
    }
    JointDistribution::new(
        parts.len(),
        atoms
            .into_iter()
            .map(|(values, p)| (Valuation(values), p))
            .collect(),
    )
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn example4_marginal() -> SingleItemDistribution {
        SingleItemDistribution::uniform_ints(&[0, 1, 2, 2, 2, 2, 5, 6, 6, 6]).unwrap()
    }

    #[test]
    fn multiset_merges_duplicates() {
        let f = example4_marginal();
        let atoms: Vec<_> = f.atoms().to_vec();
        assert_eq!(
            atoms,
            vec![
                (int(0), rat(1, 10)),
                (int(1), rat(1, 10)),
                (int(2), rat(4, 10)),
                (int(5), rat(1, 10)),
                (int(6), rat(3, 10)),
            ]
        );
    }

    #[test]
    fn product_of_one_part_is_identity() {
        let u = SingleItemDistribution::uniform_ints(&[1, 2]).unwrap();
        let joint = product(std::slice::from_ref(&u)).unwrap();
        assert_eq!(joint.len(), 2);
        assert!(joint.atoms().iter().all(|(_, p)| *p == rat(1, 2)));
    }

    #[test]
    fn product_of_uniforms() {
        let u = SingleItemDistribution::uniform_ints(&[1, 3]).unwrap();
        let joint = product(&[u.clone(), u]).unwrap();
        assert_eq!(joint.len(), 4);
        assert!(joint.atoms().iter().all(|(_, p)| *p == rat(1, 4)));
    }

    #[test]
    fn example4_cube_has_125_atoms_and_unit_mass() {
        let f = example4_marginal();
        let joint = product(&[f.clone(), f.clone(), f]).unwrap();
        assert_eq!(joint.len(), 125);
        // independent sum-check
        let mut total = Rational::zero();
        for (_, p) in joint.atoms() {
            total += p;
        }
        assert!(total.is_one());
    }

    #[test]
    fn mass_error_reports_total() {
        let err = SingleItemDistribution::new(vec![(int(1), rat(1, 2)), (int(2), rat(1, 3))])
            .unwrap_err();
        assert_eq!(err.to_string(), "mass 5/6 ≠ 1");
    }

    #[test]
    fn negative_values_rejected() {
        assert!(Valuation::new(vec![int(-1)]).is_err());
        assert!(SingleItemDistribution::new(vec![(int(-1), int(1))]).is_err());
    }

    #[test]
    fn marginals_recover_parts() {
        let a = SingleItemDistribution::new(vec![(int(1), rat(1, 3)), (int(4), rat(2, 3))]).unwrap();
        let b = example4_marginal();
        let joint = product(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(joint.marginal(0), a);
        assert_eq!(joint.marginal(1), b);
        assert!(joint.as_iid().is_none());
        let iid = product(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(iid.as_iid(), Some(a));
    }

    #[test]
    fn symmetry_detection() {
        let u = SingleItemDistribution::uniform_ints(&[1, 3]).unwrap();
        assert!(product(&[u.clone(), u.clone()]).unwrap().is_symmetric());
        let a = SingleItemDistribution::uniform_ints(&[1, 2]).unwrap();
        assert!(!product(&[u, a]).unwrap().is_symmetric());
    }

    #[test]
    fn optimal_single_price() {
        let f = SingleItemDistribution::uniform_ints(&[1, 2]).unwrap();
        let (_, revenue) = f.optimal_price_revenue();
        assert_eq!(revenue, int(1));
    }
}
