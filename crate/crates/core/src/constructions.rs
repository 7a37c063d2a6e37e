//! Revenue-preserving menu transformations for two items.
//!
//! Each construction evaluates its candidate menus exactly, checks that the
//! chosen output earns at least as much as the input, and returns a
//! [`ConstructionCertificate`] recording the branch taken and every revenue.
//! A failed check is returned as [`Error::DominanceViolated`] with the full
//! instance in the message.

use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::buyer::expected_revenue;
use crate::error::{Error, Result};
use crate::model::{menu_to_json, product, JointDistribution, Menu, SingleItemDistribution};
use crate::rational::{decimal_string, format_rational, int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Input already satisfied the target property.
    Unchanged,
    /// Supermodular input, cheap-item mass outweighs the bundle premium:
    /// sell separately at the input's item prices.
    SeparateAtItemPrices,
    /// Supermodular input otherwise: raise the cheaper item to `c - b`.
    RaiseCheaperItem,
    /// `c <= 2a`: the two symmetric menus average to the input.
    EqualSplit,
    /// `c > 2a` with mass on `[a, c-a)` dominating: candidates
    /// `(b,b,c)` and `(a,a,2a)`.
    LowItemPrice,
    /// `c > 2a` otherwise: candidates `(b,b,c)` and `(c-a,c-a,2c-2a)`.
    HighItemPrice,
    /// Strictly supermodular input split into an additive menu and a
    /// bundle-only menu.
    ThreeHalvesSplit,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Branch::Unchanged => "unchanged",
            Branch::SeparateAtItemPrices => "separate-at-item-prices",
            Branch::RaiseCheaperItem => "raise-cheaper-item",
            Branch::EqualSplit => "equal-split",
            Branch::LowItemPrice => "low-item-price",
            Branch::HighItemPrice => "high-item-price",
            Branch::ThreeHalvesSplit => "three-halves-split",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionCertificate {
    pub construction: &'static str,
    pub input: Menu,
    pub input_revenue: Rational,
    pub branch: Branch,
    /// Candidate menus with their exact revenues.
    pub candidates: Vec<(Menu, Rational)>,
    pub output: Menu,
    pub output_revenue: Rational,
    /// Certificates of transformations applied to the input first.
    pub prior: Vec<ConstructionCertificate>,
}

impl ConstructionCertificate {
    pub fn margin(&self) -> Rational {
        &self.output_revenue - &self.input_revenue
    }

    pub fn to_json(&self) -> Value {
        json!({
            "construction": self.construction,
            "input": menu_to_json(&self.input),
            "input_revenue": format_rational(&self.input_revenue),
            "branch": self.branch.to_string(),
            "candidates": self.candidates.iter().map(|(m, r)| json!({
                "menu": menu_to_json(m),
                "revenue": format_rational(r),
                "revenue_decimal": decimal_string(r),
            })).collect::<Vec<_>>(),
            "output": menu_to_json(&self.output),
            "output_revenue": format_rational(&self.output_revenue),
            "margin": format_rational(&self.margin()),
            "prior": self.prior.iter().map(Self::to_json).collect::<Vec<_>>(),
        })
    }
}

fn require_two_items(menu: &Menu) -> Result<()> {
    if menu.n() != 2 {
        return Err(Error::WrongItemCount {
            expected: 2,
            found: menu.n(),
        });
    }
    Ok(())
}

/// Best candidate by revenue (first wins ties) and its margin over the
/// baseline.
pub fn verify_dominance(
    candidates: &[Menu],
    baseline: &Menu,
    dist: &JointDistribution,
) -> Result<(Menu, Rational)> {
    let mut best: Option<(&Menu, Rational)> = None;
    for menu in candidates {
        let revenue = expected_revenue(menu, dist);
        if best.as_ref().is_none_or(|(_, r)| revenue > *r) {
            best = Some((menu, revenue));
        }
    }
    let (menu, revenue) = best.ok_or(Error::EmptyCandidates)?;
    Ok((menu.clone(), revenue - expected_revenue(baseline, dist)))
}

fn evaluate(candidates: Vec<Menu>, dist: &JointDistribution) -> (Vec<(Menu, Rational)>, usize) {
    let scored: Vec<(Menu, Rational)> = candidates
        .into_iter()
        .map(|m| {
            let r = expected_revenue(&m, dist);
            (m, r)
        })
        .collect();
    let mut best = 0;
    for (i, (_, r)) in scored.iter().enumerate() {
        if *r > scored[best].1 {
            best = i;
        }
    }
    (scored, best)
}

fn violation(construction: &'static str, details: String) -> Error {
    Error::DominanceViolated {
        construction,
        details,
    }
}

fn describe_dist(dist: &JointDistribution) -> String {
    crate::model::distribution_to_json(dist).to_string()
}

/// Replaces a strictly supermodular two-item menu by a submodular one that
/// earns at least as much under `d1 × d2`.
///
/// With items relabeled so that `a <= b`, the test
/// `Pr[v1 ∈ [a, c-b)]·a >= Pr[v1 >= c-b]·(c-a-b)` selects `(a, b, a+b)`;
/// otherwise the output is `(c-b, b, c)`.
pub fn submodularize2(
    menu: &Menu,
    d1: &SingleItemDistribution,
    d2: &SingleItemDistribution,
) -> Result<ConstructionCertificate> {
    require_two_items(menu)?;
    let dist = product(&[d1.clone(), d2.clone()])?;
    let input_revenue = expected_revenue(menu, &dist);
    let (a, b, c) = (menu.a(), menu.b(), menu.c());
    if c <= &(a + b) {
        return Ok(ConstructionCertificate {
            construction: "submodularize2",
            input: menu.clone(),
            input_revenue: input_revenue.clone(),
            branch: Branch::Unchanged,
            candidates: vec![(menu.clone(), input_revenue.clone())],
            output: menu.clone(),
            output_revenue: input_revenue,
            prior: vec![],
        });
    }

    // Work with the cheaper item first.
    let swap = a > b;
    let (work, cheap) = if swap {
        (menu.swapped(), d2)
    } else {
        (menu.clone(), d1)
    };
    let (a, b, c) = (work.a().clone(), work.b().clone(), work.c().clone());
    let switch = &c - &b;
    let gain = cheap.prob_in(&a, &switch) * &a;
    let loss = cheap.tail(&switch) * (&c - &a - &b);
    let (branch, out) = if gain >= loss {
        (Branch::SeparateAtItemPrices, Menu::two(a.clone(), b.clone(), &a + &b)?)
    } else {
        (Branch::RaiseCheaperItem, Menu::two(switch, b, c)?)
    };
    let out = if swap { out.swapped() } else { out };
    let output_revenue = expected_revenue(&out, &dist);
    if output_revenue < input_revenue || !out.is_submodular() {
        return Err(violation(
            "submodularize2",
            format!(
                "input {menu} earns {input_revenue}, output {out} ({branch}) earns {output_revenue} under {}",
                describe_dist(&dist)
            ),
        ));
    }
    Ok(ConstructionCertificate {
        construction: "submodularize2",
        input: menu.clone(),
        input_revenue,
        branch,
        candidates: vec![(out.clone(), output_revenue.clone())],
        output: out,
        output_revenue,
        prior: vec![],
    })
}

/// Replaces a two-item menu by a symmetric one that earns at least as much
/// when both values are drawn independently from `f`.
///
/// Unnormalized inputs are normalized and supermodular inputs are first
/// passed through [`submodularize2`]; those steps appear in `prior`.
pub fn symmetrize2(menu: &Menu, f: &SingleItemDistribution) -> Result<ConstructionCertificate> {
    require_two_items(menu)?;
    let dist = product(&[f.clone(), f.clone()])?;
    let input_revenue = expected_revenue(menu, &dist);

    let mut prior = Vec::new();
    let mut work = menu.normalize()?;
    if work.c() > &(work.a() + work.b()) {
        let cert = submodularize2(&work, f, f)?;
        work = cert.output.clone();
        prior.push(cert);
    }
    let work_revenue = expected_revenue(&work, &dist);

    if work.a() == work.b() {
        return Ok(ConstructionCertificate {
            construction: "symmetrize2",
            input: menu.clone(),
            input_revenue,
            branch: Branch::Unchanged,
            candidates: vec![(work.clone(), work_revenue.clone())],
            output: work,
            output_revenue: work_revenue,
            prior,
        });
    }

    // Relabel so that a < b; F × F is invariant under the swap.
    let ordered = if work.a() > work.b() { work.swapped() } else { work.clone() };
    let (a, b, c) = (ordered.a().clone(), ordered.b().clone(), ordered.c().clone());
    let two = int(2);
    let sym = |p: &Rational, q: Rational| Menu::two(p.clone(), p.clone(), q);

    let (branch, candidates) = if c <= &two * &a {
        (Branch::EqualSplit, vec![sym(&a, c.clone())?, sym(&b, c.clone())?])
    } else {
        let upper = &c - &a;
        let low_mass = f.prob_in(&a, &upper) * (&two * &a);
        let high_mass = f.tail(&upper) * (&c - &two * &a);
        if low_mass >= high_mass {
            (
                Branch::LowItemPrice,
                vec![sym(&b, c.clone())?, sym(&a, &two * &a)?],
            )
        } else {
            (
                Branch::HighItemPrice,
                vec![sym(&b, c.clone())?, sym(&upper, &two * &upper)?],
            )
        }
    };
    let (scored, best) = evaluate(candidates, &dist);
    let pair_sum: Rational = scored.iter().map(|(_, r)| r).sum();
    let twice = &two * &work_revenue;
    let holds = match branch {
        Branch::EqualSplit => pair_sum == twice,
        _ => pair_sum >= twice,
    };
    let (output, output_revenue) = scored[best].clone();
    if !holds || output_revenue < input_revenue {
        return Err(violation(
            "symmetrize2",
            format!(
                "input {menu} (working {work}) earns {input_revenue}; {branch} candidates {:?} sum to {pair_sum}, twice the working revenue is {twice}; F = {}",
                scored,
                describe_dist(&dist)
            ),
        ));
    }
    Ok(ConstructionCertificate {
        construction: "symmetrize2",
        input: menu.clone(),
        input_revenue,
        branch,
        candidates: scored,
        output,
        output_revenue,
        prior,
    })
}

/// [`symmetrize2`] for a joint distribution, which must be a product of two
/// identical marginals.
pub fn symmetrize2_joint(menu: &Menu, dist: &JointDistribution) -> Result<ConstructionCertificate> {
    if dist.n() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: dist.n(),
        });
    }
    let f = dist.as_iid().ok_or(Error::NonIid)?;
    symmetrize2(menu, &f)
}

/// Splits a strictly supermodular menu `(p1, p2, p12)` into the additive
/// menu `(p1, p2, p1+p2)` and the bundle-only menu `(p, p, p)` with
/// `p = 2·p12 - p1 - p2`. Under any joint distribution the input earns at
/// most the additive revenue plus half the bundle-only revenue.
pub fn three_halves_decomposition(menu: &Menu) -> Result<(Menu, Menu)> {
    require_two_items(menu)?;
    let (a, b, c) = (menu.a(), menu.b(), menu.c());
    if c <= &(a + b) {
        return Err(Error::NotSupermodular(menu.to_string()));
    }
    let p = int(2) * c - a - b;
    Ok((
        Menu::two(a.clone(), b.clone(), a + b)?,
        Menu::two(p.clone(), p.clone(), p)?,
    ))
}

/// Checks `rev(m) <= rev(additive) + rev(bundle-only)/2` under `dist` and
/// returns the certificate; the output is the better of the two parts.
pub fn three_halves_certificate(
    menu: &Menu,
    dist: &JointDistribution,
) -> Result<ConstructionCertificate> {
    let (additive, bundle_only) = three_halves_decomposition(menu)?;
    let input_revenue = expected_revenue(menu, dist);
    let (scored, best) = evaluate(vec![additive, bundle_only], dist);
    let bound = &scored[0].1 + &scored[1].1 / int(2);
    if bound < input_revenue {
        return Err(violation(
            "three_halves_decomposition",
            format!(
                "input {menu} earns {input_revenue} above the bound {bound} under {}",
                describe_dist(dist)
            ),
        ));
    }
    let (output, output_revenue) = scored[best].clone();
    Ok(ConstructionCertificate {
        construction: "three_halves_decomposition",
        input: menu.clone(),
        input_revenue,
        branch: Branch::ThreeHalvesSplit,
        candidates: scored,
        output,
        output_revenue,
        prior: vec![],
    })
}

impl ConstructionCertificate {
    /// Slack of the three-halves bound: `rev(additive) + rev(bundle)/2 - rev(m)`.
    pub fn three_halves_slack(&self) -> Option<Rational> {
        (self.branch == Branch::ThreeHalvesSplit).then(|| {
            &self.candidates[0].1 + &self.candidates[1].1 / int(2) - &self.input_revenue
        })
    }

    pub fn is_identity(&self) -> bool {
        self.branch == Branch::Unchanged && self.margin().is_zero() && self.prior.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Valuation;
    use crate::rational::rat;

    fn menu2(a: i64, b: i64, c: i64) -> Menu {
        Menu::from_ints(2, &[a, b, c]).unwrap()
    }

    fn uniform(values: &[i64]) -> SingleItemDistribution {
        SingleItemDistribution::uniform_ints(values).unwrap()
    }

    // Revenue by direct enumeration of a product of uniforms, written out
    // independently of the buyer module.
    fn enumerated_revenue(m: &Menu, xs: &[i64], ys: &[i64]) -> Rational {
        let (a, b, c) = (m.a().clone(), m.b().clone(), m.c().clone());
        let mut total = Rational::zero();
        for &x in xs {
            for &y in ys {
                let (x, y) = (int(x), int(y));
                let opts = [
                    (Rational::zero(), Rational::zero()),
                    (&x - &a, a.clone()),
                    (&y - &b, b.clone()),
                    (&x + &y - &c, c.clone()),
                ];
                let best = opts
                    .iter()
                    .max_by(|p, q| p.0.cmp(&q.0).then(p.1.cmp(&q.1)))
                    .unwrap();
                total += &best.1;
            }
        }
        total / int((xs.len() * ys.len()) as i64)
    }

    #[test]
    fn submodularize_separate_branch() {
        let u = uniform(&[1, 3]);
        let cert = submodularize2(&menu2(1, 1, 3), &u, &u).unwrap();
        assert_eq!(cert.branch, Branch::SeparateAtItemPrices);
        assert_eq!(cert.output, menu2(1, 1, 2));
        let before = enumerated_revenue(&menu2(1, 1, 3), &[1, 3], &[1, 3]);
        let after = enumerated_revenue(&menu2(1, 1, 2), &[1, 3], &[1, 3]);
        assert_eq!(cert.input_revenue, before);
        assert_eq!(cert.output_revenue, after);
        assert!(after >= before);
    }

    #[test]
    fn submodularize_raise_branch() {
        let point = SingleItemDistribution::point(int(10)).unwrap();
        let cert = submodularize2(&menu2(1, 1, 3), &point, &uniform(&[1, 3])).unwrap();
        assert_eq!(cert.branch, Branch::RaiseCheaperItem);
        assert_eq!(cert.output, menu2(2, 1, 3));
        let before = enumerated_revenue(&menu2(1, 1, 3), &[10], &[1, 3]);
        let after = enumerated_revenue(&menu2(2, 1, 3), &[10], &[1, 3]);
        assert_eq!(cert.output_revenue, after);
        assert!(cert.margin() >= Rational::zero() && after >= before);
    }

    #[test]
    fn submodularize_identity_on_submodular() {
        let u = uniform(&[1, 3]);
        let cert = submodularize2(&menu2(2, 3, 4), &u, &u).unwrap();
        assert!(cert.is_identity());
        assert_eq!(cert.output, menu2(2, 3, 4));
    }

    #[test]
    fn submodularize_relabels_when_first_item_is_dearer() {
        let cheap = uniform(&[1, 2, 6]);
        let other = uniform(&[0, 4]);
        let cert = submodularize2(&menu2(3, 1, 6), &other, &cheap).unwrap();
        assert!(cert.output.is_submodular());
        assert!(cert.margin() >= Rational::zero());
    }

    #[test]
    fn equal_split_identity() {
        let f = uniform(&[0, 2, 3, 4, 5, 7]);
        let cert = symmetrize2(&menu2(3, 4, 5), &f).unwrap();
        assert_eq!(cert.branch, Branch::EqualSplit);
        let sum = &cert.candidates[0].1 + &cert.candidates[1].1;
        assert_eq!(sum, int(2) * &cert.input_revenue);
        assert!(cert.output.is_symmetric());
    }

    #[test]
    fn symmetric_input_is_unchanged() {
        let cert = symmetrize2(&menu2(3, 3, 5), &uniform(&[1, 4])).unwrap();
        assert!(cert.is_identity());
    }

    #[test]
    fn wide_bundle_case() {
        let f = uniform(&[1, 5]);
        let m = menu2(1, 4, 5);
        let cert = symmetrize2(&m, &f).unwrap();
        // candidate menus evaluated independently
        let candidates = [menu2(4, 4, 5), menu2(1, 1, 2), menu2(4, 4, 8)];
        let revs: Vec<Rational> = candidates
            .iter()
            .map(|c| enumerated_revenue(c, &[1, 5], &[1, 5]))
            .collect();
        let base = enumerated_revenue(&m, &[1, 5], &[1, 5]);
        // 2·Pr[1 <= v < 4] = 1 vs (5-2)·Pr[v >= 4] = 3/2
        assert_eq!(cert.branch, Branch::HighItemPrice);
        assert_eq!(cert.candidates[0].1, revs[0]);
        assert_eq!(cert.candidates[1].1, revs[2]);
        assert!(cert.output_revenue >= base);
        assert!(revs.iter().any(|r| *r >= base));
    }

    #[test]
    fn symmetrize_joint_rejects_non_iid() {
        let d = product(&[uniform(&[1, 2]), uniform(&[1, 3])]).unwrap();
        assert!(matches!(
            symmetrize2_joint(&menu2(1, 2, 3), &d),
            Err(Error::NonIid)
        ));
    }

    #[test]
    fn three_halves_formula() {
        let (add, bun) = three_halves_decomposition(&menu2(4, 4, 100)).unwrap();
        assert_eq!((add, bun), (menu2(4, 4, 8), menu2(192, 192, 192)));
        let (add, bun) = three_halves_decomposition(&menu2(0, 0, 1)).unwrap();
        assert_eq!((add, bun), (menu2(0, 0, 0), menu2(2, 2, 2)));
        let (add, bun) = three_halves_decomposition(&menu2(1, 2, 4)).unwrap();
        assert_eq!((add, bun), (menu2(1, 2, 3), menu2(5, 5, 5)));
        assert!(three_halves_decomposition(&menu2(1, 2, 3)).is_err());
    }

    #[test]
    fn dominance_examples() {
        let u = uniform(&[1, 3]);
        let d = product(&[u.clone(), u]).unwrap();
        let (_, margin) =
            verify_dominance(&[menu2(1, 1, 2), menu2(2, 1, 3)], &menu2(1, 1, 3), &d).unwrap();
        assert!(margin >= Rational::zero());
        let (best, margin) = verify_dominance(&[menu2(1, 1, 3)], &menu2(1, 1, 3), &d).unwrap();
        assert_eq!((best, margin), (menu2(1, 1, 3), Rational::zero()));
        assert!(matches!(
            verify_dominance(&[], &menu2(1, 1, 3), &d),
            Err(Error::EmptyCandidates)
        ));
    }

    #[test]
    fn correlated_three_halves_instance() {
        // (4,0) and (0,4) w.p. 49/100 each, (100,100) w.p. 2/100
        let d = JointDistribution::new(
            2,
            vec![
                (Valuation::from_ints(&[4, 0]), rat(49, 100)),
                (Valuation::from_ints(&[0, 4]), rat(49, 100)),
                (Valuation::from_ints(&[100, 100]), rat(2, 100)),
            ],
        )
        .unwrap();
        let cert = three_halves_certificate(&menu2(4, 4, 100), &d).unwrap();
        assert_eq!(cert.input_revenue, rat(592, 100));
        assert_eq!(cert.candidates[0].1, rat(408, 100));
        assert_eq!(cert.candidates[1].1, rat(384, 100));
        assert_eq!(cert.three_halves_slack().unwrap(), rat(8, 100));
    }
}
