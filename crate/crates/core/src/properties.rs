//! Seeded randomized suites that exercise the constructions on many small
//! instances with exact arithmetic.
//!
//! Every suite is deterministic for a given seed and returns the list of
//! instances that failed, with enough detail to replay them.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::buyer::{check_monotone, expected_revenue, monotonicity_grid};
use crate::constructions::{submodularize2, symmetrize2, three_halves_certificate, Branch};
use crate::model::{JointDistribution, Menu, SingleItemDistribution, Valuation};
use crate::rational::{int, rat, Rational};

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub instances: usize,
    pub failures: Vec<String>,
    /// Smallest certificate margin seen (revenue gained by the construction).
    pub min_margin: Option<Rational>,
    /// Instances where an exact identity was checked in addition.
    pub identity_checks: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record_margin(&mut self, margin: Rational) {
        if margin.is_negative() {
            self.failures.push(format!("negative margin {margin}"));
        }
        if self.min_margin.as_ref().is_none_or(|m| margin < *m) {
            self.min_margin = Some(margin);
        }
    }
}

/// Random distribution with `1..=max_atoms` integer values in `0..=max_value`
/// and random positive integer weights.
pub fn random_single(rng: &mut impl Rng, max_atoms: usize, max_value: i64) -> SingleItemDistribution {
    let k = rng.gen_range(1..=max_atoms);
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=10)).collect();
    let total: i64 = weights.iter().sum();
    let atoms = weights
        .iter()
        .map(|&w| (int(rng.gen_range(0..=max_value)), rat(w, total)))
        .collect();
    SingleItemDistribution::new(atoms).expect("valid random distribution")
}

/// Random correlated two-item joint with up to `max_atoms` atoms.
pub fn random_joint(rng: &mut impl Rng, max_atoms: usize, max_value: i64) -> JointDistribution {
    let k = rng.gen_range(1..=max_atoms);
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=10)).collect();
    let total: i64 = weights.iter().sum();
    let atoms = weights
        .iter()
        .map(|&w| {
            let v = Valuation::from_ints(&[rng.gen_range(0..=max_value), rng.gen_range(0..=max_value)]);
            (v, rat(w, total))
        })
        .collect();
    JointDistribution::new(2, atoms).expect("valid random joint")
}

pub fn random_supermodular(rng: &mut impl Rng, max_price: i64) -> Menu {
    let a = rng.gen_range(0..=max_price);
    let b = rng.gen_range(0..=max_price);
    let c = a + b + rng.gen_range(1..=max_price);
    Menu::from_ints(2, &[a, b, c]).expect("nonnegative")
}

/// Normalized submodular menu with `a != b`.
pub fn random_asymmetric_submodular(rng: &mut impl Rng, max_price: i64) -> Menu {
    loop {
        let a = rng.gen_range(0..=max_price);
        let b = rng.gen_range(0..=max_price);
        if a == b {
            continue;
        }
        let c = rng.gen_range(a.max(b)..=a + b);
        return Menu::from_ints(2, &[a, b, c]).expect("nonnegative");
    }
}

pub fn random_submodular(rng: &mut impl Rng, max_price: i64) -> Menu {
    let a = rng.gen_range(0..=max_price);
    let b = rng.gen_range(0..=max_price);
    let c = rng.gen_range(0..=a + b);
    Menu::from_ints(2, &[a, b, c]).expect("nonnegative")
}

/// Supermodular menus over random product distributions: the submodular
/// replacement never earns less.
pub fn submodularize_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    for _ in 0..count {
        let d1 = random_single(&mut rng, 5, 20);
        let d2 = random_single(&mut rng, 5, 20);
        let menu = random_supermodular(&mut rng, 20);
        report.instances += 1;
        match submodularize2(&menu, &d1, &d2) {
            Ok(cert) => {
                if !cert.output.is_submodular() {
                    report.failures.push(format!("{menu}: output {} not submodular", cert.output));
                }
                report.record_margin(cert.margin());
            }
            Err(e) => report.failures.push(e.to_string()),
        }
    }
    report
}

/// Asymmetric submodular menus over random IID pairs: the symmetric
/// replacement never earns less, and when `c <= 2a` the two symmetric
/// candidates average exactly to the input.
pub fn symmetrize_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    for _ in 0..count {
        let f = random_single(&mut rng, 5, 20);
        let menu = random_asymmetric_submodular(&mut rng, 20);
        report.instances += 1;
        match symmetrize2(&menu, &f) {
            Ok(cert) => {
                if !cert.output.is_symmetric() {
                    report.failures.push(format!("{menu}: output {} not symmetric", cert.output));
                }
                if cert.branch == Branch::EqualSplit {
                    report.identity_checks += 1;
                    let sum = &cert.candidates[0].1 + &cert.candidates[1].1;
                    if sum != int(2) * &cert.input_revenue {
                        report.failures.push(format!("{menu}: equal split sum {sum}"));
                    }
                }
                report.record_margin(cert.margin());
            }
            Err(e) => report.failures.push(e.to_string()),
        }
    }
    report
}

/// Strictly supermodular menus over random correlated joints:
/// `rev(m) <= rev(additive) + rev(bundle-only)/2`.
pub fn three_halves_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    for _ in 0..count {
        let dist = random_joint(&mut rng, 6, 20);
        let menu = random_supermodular(&mut rng, 20);
        report.instances += 1;
        match three_halves_certificate(&menu, &dist) {
            Ok(cert) => report.record_margin(cert.three_halves_slack().expect("split branch")),
            Err(e) => report.failures.push(e.to_string()),
        }
    }
    report
}

/// Random submodular two-item menus audited on support-plus-corner grids.
pub fn monotonicity_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    let offset = rat(1, 2);
    for _ in 0..count {
        let menu = random_submodular(&mut rng, 20);
        let support: Vec<Valuation> = random_joint(&mut rng, 6, 30)
            .atoms()
            .iter()
            .map(|(v, _)| v.clone())
            .collect();
        let grid = monotonicity_grid(&menu, &support, &offset);
        report.instances += 1;
        let audit = check_monotone(&menu, &grid);
        if let Some(v) = audit.violations.first() {
            report.failures.push(format!(
                "{menu}: {} pays {} but {} pays {}",
                v.low, v.revenue_low, v.high, v.revenue_high
            ));
        }
    }
    report
}

/// Exact identity `rev(a,a,c) + rev(b,b,c) = 2 rev(a,b,c)` for `c <= 2a` on
/// random symmetric (possibly correlated) joints.
pub fn equal_split_symmetric_joint_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    while report.instances < count {
        let base = random_joint(&mut rng, 5, 20);
        let dist = base
            .mix(&base.permuted(&[1, 0]), &rat(1, 2))
            .expect("same dimension");
        let a = rng.gen_range(1..=20);
        let b = rng.gen_range(a + 1..=a + 20);
        if 2 * a < b {
            continue;
        }
        let c = rng.gen_range(b..=2 * a);
        report.instances += 1;
        let rev = |x: i64, y: i64, z: i64| {
            expected_revenue(&Menu::from_ints(2, &[x, y, z]).unwrap(), &dist)
        };
        let lhs = rev(a, a, c) + rev(b, b, c);
        let rhs = int(2) * rev(a, b, c);
        report.identity_checks += 1;
        if lhs != rhs {
            report
                .failures
                .push(format!("({a},{b},{c}): {lhs} != {rhs}"));
        }
        report.record_margin(Rational::zero());
    }
    report
}
