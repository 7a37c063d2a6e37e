//! Reproduction targets. Each target recomputes a worked result from
//! scratch and compares it against a fixed table of expected values, one
//! [`Check`] per number.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::One;
use serde_json::{json, Value};

use crate::buyer::{check_monotone, expected_revenue};
use crate::constructions::three_halves_certificate;
use crate::continuous::{cap_convergence, numeric_gap_er, solve_w, w_residual, NumericParams};
use crate::data::{self, Epsilon};
use crate::error::{Error, Result};
use crate::model::{Menu, Valuation};
use crate::properties::{
    equal_split_symmetric_joint_suite, monotonicity_suite, submodularize_suite, symmetrize_suite,
    three_halves_suite, SuiteReport,
};
use crate::randomized::{
    best_false_name_deviation, false_name_utility, lp_optimal, rchoice, verify_ic_ir,
    CombinationRule, DirectMechanism, RandomizedMenu,
};
use crate::rational::{describe, format_rational, int, rat, to_f64, Rational};
use crate::search::{candidate_grid, search_optimal, GridMode, SearchConstraint};

/// Seed shared by the randomized property targets.
pub const SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    /// Three IID items: optimal menus under four structural constraints.
    Example4,
    /// Correlated two-item joint where submodular menus lose a third.
    Example5,
    /// Correlated joint where symmetric menus lose to an asymmetric one.
    Example6,
    /// Lottery menu: single purchase, false-name deviation, LP optimality.
    Example7,
    /// Supermodular menus can be made submodular without losing revenue,
    /// and submodular menus are revenue monotone.
    SubmodularityProperty,
    /// Asymmetric submodular menus can be symmetrized under IID values.
    SymmetryProperty,
    /// Supermodular menus earn at most additive plus half of bundling.
    ThreeHalvesProperty,
    /// Equal-revenue pairs: bundling versus separate sales.
    ErGap,
    /// The constant `w` solving `(w - 1) e^w = 1`.
    WConstant,
}

impl Target {
    pub const ALL: [Target; 9] = [
        Target::Example4,
        Target::Example5,
        Target::Example6,
        Target::Example7,
        Target::SubmodularityProperty,
        Target::SymmetryProperty,
        Target::ThreeHalvesProperty,
        Target::ErGap,
        Target::WConstant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Example4 => "example-4",
            Target::Example5 => "example-5",
            Target::Example6 => "example-6",
            Target::Example7 => "example-7",
            Target::SubmodularityProperty => "theorem-3-1-property",
            Target::SymmetryProperty => "theorem-4-1-property",
            Target::ThreeHalvesProperty => "lemma-5-property",
            Target::ErGap => "er-gap",
            Target::WConstant => "w-constant",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownTarget(s.to_string()))
    }
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// A number stated with the worked example.
    Published,
    /// Computed independently of the implementation under test, by hand
    /// or by a simpler procedure.
    Derived,
    /// Follows from a definition.
    Definitional,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Published => "published",
            Source::Derived => "derived",
            Source::Definitional => "definitional",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub expected: String,
    pub observed: String,
    pub source: Source,
    pub passed: bool,
}

impl Check {
    fn new(label: &str, expected: String, observed: String, source: Source, passed: bool) -> Self {
        Check {
            label: label.to_string(),
            expected,
            observed,
            source,
            passed,
        }
    }

    fn exact(label: &str, expected: &Rational, observed: &Rational, source: Source) -> Self {
        Check::new(
            label,
            format_rational(expected),
            describe(observed),
            source,
            expected == observed,
        )
    }

    fn at_least(label: &str, bound: &Rational, observed: &Rational, source: Source) -> Self {
        Check::new(
            label,
            format!(">= {}", format_rational(bound)),
            describe(observed),
            source,
            observed >= bound,
        )
    }

    fn at_most(label: &str, bound: &Rational, observed: &Rational, source: Source) -> Self {
        Check::new(
            label,
            format!("<= {}", format_rational(bound)),
            describe(observed),
            source,
            observed <= bound,
        )
    }

    fn within(label: &str, expected: f64, observed: f64, tolerance: f64, source: Source) -> Self {
        Check::new(
            label,
            format!("{expected} ± {tolerance}"),
            format!("{observed:.9}"),
            source,
            (observed - expected).abs() <= tolerance,
        )
    }

    fn holds(label: &str, expected: &str, observed: String, source: Source, passed: bool) -> Self {
        Check::new(label, expected.to_string(), observed, source, passed)
    }

    fn suite(label: &str, report: &SuiteReport, source: Source) -> Self {
        let margin = report
            .min_margin
            .as_ref()
            .map_or_else(|| "-".to_string(), format_rational);
        let mut observed = format!(
            "{} instances, {} failures, min margin {margin}",
            report.instances,
            report.failures.len()
        );
        if report.identity_checks > 0 {
            observed.push_str(&format!(", {} identity checks", report.identity_checks));
        }
        if let Some(first) = report.failures.first() {
            observed.push_str(&format!("; first: {first}"));
        }
        Check::new(label, "0 failures".into(), observed, source, report.passed())
    }

    pub fn line(&self, target: Target) -> String {
        format!(
            "{} {}: {}: expected {}, observed {} [{}]",
            if self.passed { "PASS" } else { "FAIL" },
            target,
            self.label,
            self.expected,
            self.observed,
            self.source.name()
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "expected": self.expected,
            "observed": self.observed,
            "source": self.source.name(),
            "passed": self.passed,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Reproduction {
    pub target: Target,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks.iter().map(|c| c.line(self.target)).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target.name(),
            "passed": self.passed(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn reproduce(target: Target) -> Result<Reproduction> {
    let start = Instant::now();
    let checks = match target {
        Target::Example4 => example4()?,
        Target::Example5 => example5()?,
        Target::Example6 => example6()?,
        Target::Example7 => example7()?,
        Target::SubmodularityProperty => submodularity_property()?,
        Target::SymmetryProperty => symmetry_property(),
        Target::ThreeHalvesProperty => three_halves_property()?,
        Target::ErGap => er_gap()?,
        Target::WConstant => w_constant(),
    };
    Ok(Reproduction {
        target,
        checks,
        elapsed: start.elapsed(),
    })
}

fn example4() -> Result<Vec<Check>> {
    let dist = data::example4_distribution();
    let grid = candidate_grid(&dist, &GridMode::IntegerGrid)?;
    let mut checks = Vec::new();
    let expected = [
        (SearchConstraint::Unrestricted, rat(6293, 1000)),
        (SearchConstraint::Symmetric, rat(6291, 1000)),
        (SearchConstraint::Submodular, rat(6292, 1000)),
        (SearchConstraint::SymmetricSubmodular, rat(6288, 1000)),
    ];
    for (constraint, value) in expected {
        let found = search_optimal(&dist, constraint, &grid)?;
        let label = format!("{constraint} optimum");
        checks.push(Check::exact(&label, &value, &found.revenue, Source::Published));
        if constraint == SearchConstraint::Unrestricted {
            let menu = data::example4_menu();
            checks.push(Check::holds(
                "unrestricted optimal menu",
                &menu.to_string(),
                found.best.to_string(),
                Source::Published,
                found.best == menu,
            ));
        }
    }
    Ok(checks)
}

fn example5() -> Result<Vec<Check>> {
    let dist = data::example5(Epsilon::Hundredth);
    let menu = Menu::from_ints(2, &[4, 4, 100])?;
    let cert = three_halves_certificate(&menu, &dist)?;
    let mut checks = vec![
        Check::exact("rev(4,4,100)", &rat(592, 100), &cert.input_revenue, Source::Derived),
        Check::exact("rev(4,4,8)", &rat(408, 100), &cert.candidates[0].1, Source::Derived),
        Check::exact("rev(192,192,192)", &rat(384, 100), &cert.candidates[1].1, Source::Derived),
        Check::exact(
            "three-halves slack",
            &rat(8, 100),
            &cert.three_halves_slack().expect("split certificate"),
            Source::Derived,
        ),
    ];
    let grid = candidate_grid(&dist, &GridMode::SupportSums)?;
    let drev = search_optimal(&dist, SearchConstraint::Unrestricted, &grid)?.revenue;
    let smdrev = search_optimal(&dist, SearchConstraint::Submodular, &grid)?.revenue;
    checks.push(Check::at_least("searched drev", &rat(592, 100), &drev, Source::Published));
    checks.push(Check::at_most("searched smdrev", &rat(404, 100), &smdrev, Source::Published));
    checks.push(Check::at_least(
        "drev/smdrev",
        &rat(142, 100),
        &(&drev / &smdrev),
        Source::Published,
    ));
    Ok(checks)
}

fn example6() -> Result<Vec<Check>> {
    let dist = data::example6(Epsilon::Tenth);
    let menu = data::example6_menu();
    let grid = candidate_grid(&dist, &GridMode::SupportSums)?;
    let symmetric = search_optimal(&dist, SearchConstraint::Symmetric, &grid)?;
    Ok(vec![
        Check::exact("rev(1,10,100)", &rat(61, 25), &expected_revenue(&menu, &dist), Source::Derived),
        Check::at_most("searched symmetric optimum", &rat(21, 10), &symmetric.revenue, Source::Published),
    ])
}

/// Index of the entry with the given allocation.
fn entry_with(menu: &RandomizedMenu, alloc: &[Rational]) -> Result<usize> {
    menu.entries()
        .iter()
        .position(|e| e.alloc == alloc)
        .ok_or_else(|| Error::InvalidParams(format!("no entry with allocation {alloc:?}")))
}

fn example7() -> Result<Vec<Check>> {
    let menu = data::example7_menu();
    let types = data::example7_types();
    let v = Valuation::from_ints(&[46, 80]);
    let truthful = rchoice(&menu, &v);
    let chosen = menu.entry(truthful.index);
    let mut checks = vec![
        Check::exact("utility at (46,80)", &rat(1152, 1187), &truthful.utility, Source::Published),
        Check::holds(
            "entry chosen at (46,80)",
            "(35/1187, 5647/5935) for 90810/1187",
            format!(
                "({}, {}) for {}",
                format_rational(&chosen.alloc[0]),
                format_rational(&chosen.alloc[1]),
                format_rational(&chosen.pay)
            ),
            Source::Published,
            chosen.alloc == [rat(35, 1187), rat(5647, 5935)] && chosen.pay == rat(90810, 1187),
        ),
    ];
    let top = rchoice(&menu, &Valuation::from_ints(&[100, 100]));
    checks.push(Check::holds(
        "entry chosen at (100,100)",
        "(1, 1) for 126, utility 74",
        format!("entry {} for {}, utility {}", top.index, top.pay, top.utility),
        Source::Derived,
        menu.entry(top.index).alloc.iter().all(One::is_one)
            && top.pay == int(126)
            && top.utility == int(74),
    ));

    let first = entry_with(&menu, &[rat(32, 1187), rat(384, 13057)])?;
    let second = entry_with(&menu, &[rat(384, 13057), rat(32, 1187)])?;
    let pair = false_name_utility(&menu, &v, &[first, second], CombinationRule::IndependentLotteries);
    checks.push(Check::at_least(
        "two-entry independent deviation beats single purchase",
        &rat(1152, 1187),
        &pair,
        Source::Published,
    ));
    checks.push(Check::within(
        "two-entry independent deviation value",
        1.46,
        to_f64(&pair),
        0.01,
        Source::Published,
    ));
    // The published figure prices both items' combined probability at 32/1187.
    let q = rat(32, 1187);
    let one = Rational::one();
    let formula = int(126) * (&one - (&one - &q) * (&one - &q)) - int(2) * rat(34240, 13057);
    checks.push(Check::within(
        "126(1-(1-32/1187)^2) - 2*34240/13057",
        1.46,
        to_f64(&formula),
        0.01,
        Source::Derived,
    ));
    let best = best_false_name_deviation(&menu, &v, CombinationRule::IndependentLotteries, 2)?;
    checks.push(Check::holds(
        "best two-purchase deviation improves on single purchase",
        "> 1152/1187",
        format!("picks {:?}, utility {}", best.picks, describe(&best.utility)),
        Source::Published,
        best.utility > truthful.utility,
    ));

    let direct = DirectMechanism::from_menu(&menu, &types);
    let audit = verify_ic_ir(&direct, &types);
    checks.push(Check::holds(
        "menu is IC and IR on all 36 types",
        "no violations",
        format!("{} violations", audit.violations.len()),
        Source::Derived,
        audit.holds(),
    ));
    let menu_revenue = direct.revenue(&types);
    let lp = lp_optimal(&types)?;
    checks.push(Check::exact(
        "LP optimum equals the menu's expected payment",
        &menu_revenue,
        &lp.revenue,
        Source::Published,
    ));
    Ok(checks)
}

fn submodularity_property() -> Result<Vec<Check>> {
    let mut checks = vec![
        Check::suite(
            "submodular replacement of supermodular menus (1000 product instances)",
            &submodularize_suite(SEED, 1000),
            Source::Derived,
        ),
        Check::suite(
            "revenue monotonicity of submodular menus (500 menus)",
            &monotonicity_suite(SEED, 500),
            Source::Derived,
        ),
    ];
    let menu = Menu::from_ints(2, &[5, 1, 10])?;
    let low = Valuation::from_ints(&[5, 0]);
    let high = Valuation::new(vec![int(5), rat(9, 2)])?;
    let audit = check_monotone(&menu, &[low.clone(), high.clone()]);
    let found = audit
        .violations
        .iter()
        .find(|v| v.low == low && v.high == high);
    checks.push(Check::holds(
        "supermodular (5,1,10) drops from (5,0) to (5,9/2)",
        "payment 5 then 1",
        found.map_or_else(
            || "no violation".to_string(),
            |v| format!("payment {} then {}", v.revenue_low, v.revenue_high),
        ),
        Source::Derived,
        found.is_some(),
    ));
    Ok(checks)
}

fn symmetry_property() -> Vec<Check> {
    vec![
        Check::suite(
            "symmetric replacement of asymmetric submodular menus (1000 IID instances)",
            &symmetrize_suite(SEED, 1000),
            Source::Derived,
        ),
        Check::suite(
            "equal-split identity on symmetric joints (200 instances)",
            &equal_split_symmetric_joint_suite(SEED, 200),
            Source::Derived,
        ),
    ]
}

fn three_halves_property() -> Result<Vec<Check>> {
    let mut checks = vec![Check::suite(
        "additive plus half bundle bound (1000 correlated instances)",
        &three_halves_suite(SEED, 1000),
        Source::Derived,
    )];
    let dist = data::example5(Epsilon::Hundredth);
    let cert = three_halves_certificate(&Menu::from_ints(2, &[4, 4, 100])?, &dist)?;
    checks.push(Check::exact(
        "bound slack on the correlated two-item instance",
        &rat(8, 100),
        &cert.three_halves_slack().expect("split certificate"),
        Source::Derived,
    ));
    Ok(checks)
}

fn er_gap() -> Result<Vec<Check>> {
    let params = NumericParams::default();
    let report = numeric_gap_er(1.0, 1.0, &params)?;
    let w = solve_w();
    let mut checks = vec![
        Check::within("srev", 2.0, report.srev, 0.0, Source::Definitional),
        Check::within(
            &format!("brev at cap {} with {} points", params.cap, params.grid_points),
            2.0 * w,
            report.brev,
            0.01 * 2.0 * w,
            Source::Derived,
        ),
        Check::within(
            &format!("searched drev against brev on {} points", params.search_points),
            report.brev_coarse,
            report.drev,
            report.drev_tolerance,
            Source::Derived,
        ),
    ];
    let caps = [1e2, 1e3, 1e4];
    let points = cap_convergence(1.0, 1.0, &caps, 500)?;
    let ratios: Vec<f64> = points.iter().map(|p| p.brev_over_srev).collect();
    let monotone = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let bounded = ratios.iter().all(|&r| r <= w + 1e-12);
    checks.push(Check::holds(
        "brev/srev across caps 1e2, 1e3, 1e4 is nondecreasing and at most w",
        &format!("nondecreasing, <= {w:.9}"),
        format!("{ratios:.9?}"),
        Source::Derived,
        monotone && bounded,
    ));
    Ok(checks)
}

fn w_constant() -> Vec<Check> {
    let w = solve_w();
    let residual = w_residual(w).abs();
    vec![
        Check::holds(
            "w",
            "in (1.2784, 1.2785)",
            format!("{w:.12}"),
            Source::Published,
            w > 1.2784 && w < 1.2785,
        ),
        Check::holds(
            "|(w-1)e^w - 1|",
            "< 1e-12",
            format!("{residual:.3e}"),
            Source::Definitional,
            residual < 1e-12,
        ),
    ]
}
