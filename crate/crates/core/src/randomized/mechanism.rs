use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::menu::{expected_value, rchoice, RandomizedMenu};
use super::simplex::{basic_solution, certify_basis, Field, Outcome, Row, Tableau};
use crate::error::{Error, Result};
use crate::model::{JointDistribution, Valuation};
use crate::rational::{format_rational, from_f64, to_f64, Rational};

/// Allocation and payment for every type (atom) of a distribution, in atom
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectMechanism {
    pub alloc: Vec<Vec<Rational>>,
    pub pay: Vec<Rational>,
}

impl DirectMechanism {
    /// Each type gets the entry it picks from the menu.
    pub fn from_menu(menu: &RandomizedMenu, dist: &JointDistribution) -> Self {
        let (alloc, pay) = dist
            .atoms()
            .iter()
            .map(|(v, _)| {
                let e = menu.entry(rchoice(menu, v).index);
                (e.alloc.clone(), e.pay.clone())
            })
            .unzip();
        DirectMechanism { alloc, pay }
    }

    pub fn null(dist: &JointDistribution) -> Self {
        DirectMechanism {
            alloc: vec![vec![Rational::zero(); dist.n()]; dist.len()],
            pay: vec![Rational::zero(); dist.len()],
        }
    }

    pub fn revenue(&self, dist: &JointDistribution) -> Rational {
        dist.atoms().iter().zip(&self.pay).map(|((_, p), q)| p * q).sum()
    }

    /// Relabels items: item `i` becomes item `perm[i]`, for the distribution
    /// permuted the same way.
    pub fn permuted(&self, dist: &JointDistribution, perm: &[usize]) -> (JointDistribution, Self) {
        let target = dist.permuted(perm);
        let mut alloc = vec![Vec::new(); target.len()];
        let mut pay = vec![Rational::zero(); target.len()];
        for (t, (v, _)) in dist.atoms().iter().enumerate() {
            let w = v.permuted(perm);
            let s = target
                .atoms()
                .iter()
                .position(|(u, _)| *u == w)
                .expect("permuted atom present");
            let mut a = vec![Rational::zero(); v.n()];
            for (i, q) in self.alloc[t].iter().enumerate() {
                a[perm[i]] = q.clone();
            }
            alloc[s] = a;
            pay[s] = self.pay[t].clone();
        }
        (target, DirectMechanism { alloc, pay })
    }

    /// Convex combination `λ·self + (1-λ)·other` on the same types.
    pub fn mix(&self, other: &Self, lambda: &Rational) -> Self {
        let mu = Rational::from_integer(1.into()) - lambda;
        DirectMechanism {
            alloc: self
                .alloc
                .iter()
                .zip(&other.alloc)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * lambda + y * &mu).collect())
                .collect(),
            pay: self
                .pay
                .iter()
                .zip(&other.pay)
                .map(|(x, y)| x * lambda + y * &mu)
                .collect(),
        }
    }

    pub fn to_json(&self, dist: &JointDistribution) -> Value {
        let types: Vec<Value> = dist
            .atoms()
            .iter()
            .zip(self.alloc.iter().zip(&self.pay))
            .map(|((v, p), (a, q))| {
                json!({
                    "values": v.values().iter().map(format_rational).collect::<Vec<_>>(),
                    "prob": format_rational(p),
                    "alloc": a.iter().map(format_rational).collect::<Vec<_>>(),
                    "pay": format_rational(q),
                })
            })
            .collect();
        json!({"items": dist.n(), "types": types})
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Type `truth` strictly prefers the outcome of type `report`.
    Ic { truth: usize, report: usize, gain: Rational },
    /// Type gets negative utility.
    Ir { truth: usize, utility: Rational },
    /// Allocation probability outside `[0, 1]`.
    Bounds { truth: usize, item: usize },
}

#[derive(Clone, Debug, Default)]
pub struct IcIrReport {
    pub violations: Vec<Violation>,
}

impl IcIrReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks all `|types|²` incentive constraints and all participation
/// constraints exactly.
pub fn verify_ic_ir(mech: &DirectMechanism, dist: &JointDistribution) -> IcIrReport {
    let types: Vec<&Valuation> = dist.atoms().iter().map(|(v, _)| v).collect();
    assert_eq!(mech.pay.len(), types.len(), "mechanism covers every type");
    let one = Rational::from_integer(1.into());
    let mut violations: Vec<Violation> = (0..types.len())
        .into_par_iter()
        .flat_map_iter(|t| {
            let v = types[t];
            let own = expected_value(v, &mech.alloc[t]) - &mech.pay[t];
            let mut found = Vec::new();
            for (i, q) in mech.alloc[t].iter().enumerate() {
                if q.is_negative() || *q > one {
                    found.push(Violation::Bounds { truth: t, item: i });
                }
            }
            if own.is_negative() {
                found.push(Violation::Ir {
                    truth: t,
                    utility: own.clone(),
                });
            }
            for s in 0..types.len() {
                let other = expected_value(v, &mech.alloc[s]) - &mech.pay[s];
                if other > own {
                    found.push(Violation::Ic {
                        truth: t,
                        report: s,
                        gain: other - &own,
                    });
                }
            }
            found
        })
        .collect();
    violations.sort_by_key(|v| match v {
        Violation::Bounds { truth, .. } | Violation::Ir { truth, .. } => (*truth, 0),
        Violation::Ic { truth, report, .. } => (*truth, report + 1),
    });
    IcIrReport { violations }
}

/// Largest violation of any constraint for a floating-point mechanism.
pub fn ic_ir_residual(alloc: &[Vec<f64>], pay: &[f64], dist: &JointDistribution) -> f64 {
    let types: Vec<Vec<f64>> = dist
        .atoms()
        .iter()
        .map(|(v, _)| v.values().iter().map(to_f64).collect())
        .collect();
    let value = |v: &[f64], a: &[f64]| v.iter().zip(a).map(|(x, q)| x * q).sum::<f64>();
    let mut worst = 0.0f64;
    for (t, v) in types.iter().enumerate() {
        let own = value(v, &alloc[t]) - pay[t];
        worst = worst.max(-own);
        for q in &alloc[t] {
            worst = worst.max(-q).max(q - 1.0);
        }
        for s in 0..types.len() {
            worst = worst.max(value(v, &alloc[s]) - pay[s] - own);
        }
    }
    worst
}

/// The revenue LP in utility form: columns are `x[t][i]`, then the
/// truthful utility `u[t] >= 0`, with payment `p_t = v_t·x_t - u_t`. This
/// makes IR a variable bound. Rows are IC for every ordered pair, then
/// `x <= 1`.
struct RevenueLp {
    cols: usize,
    c: Vec<Rational>,
    rows: Vec<Row<Rational>>,
    b: Vec<Rational>,
    values: Vec<Vec<Rational>>,
}

impl RevenueLp {
    fn new(dist: &JointDistribution) -> Self {
        let n = dist.n();
        let types = dist.len();
        let x = |t: usize, i: usize| t * n + i;
        let u = |t: usize| types * n + t;
        let cols = types * n + types;
        let values: Vec<Vec<Rational>> =
            dist.atoms().iter().map(|(v, _)| v.values().to_vec()).collect();
        let mut c = vec![Rational::zero(); cols];
        for (t, (v, mu)) in dist.atoms().iter().enumerate() {
            for i in 0..n {
                c[x(t, i)] = mu * v.value(i);
            }
            c[u(t)] = -mu.clone();
        }
        let one = Rational::from_integer(1.into());
        let mut rows = Vec::new();
        let mut b = Vec::new();
        // u_s - u_t + (v_t - v_s)·x_s <= 0: type t does not gain by reporting s
        for t in 0..types {
            for s in 0..types {
                if s == t {
                    continue;
                }
                let mut row = Vec::with_capacity(n + 2);
                for i in 0..n {
                    let d = &values[t][i] - &values[s][i];
                    if !d.is_zero() {
                        row.push((x(s, i), d));
                    }
                }
                row.push((u(s), one.clone()));
                row.push((u(t), -one.clone()));
                rows.push(row);
                b.push(Rational::zero());
            }
        }
        for t in 0..types {
            for i in 0..n {
                rows.push(vec![(x(t, i), one.clone())]);
                b.push(one.clone());
            }
        }
        RevenueLp {
            cols,
            c,
            rows,
            b,
            values,
        }
    }

    fn float_rows(&self) -> Vec<Row<f64>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(j, a)| (*j, to_f64(a))).collect())
            .collect()
    }

    fn split<F: Field>(&self, x: &[F], conv: impl Fn(&Rational) -> F) -> (Vec<Vec<F>>, Vec<F>) {
        let types = self.values.len();
        let n = self.values.first().map_or(0, Vec::len);
        let alloc: Vec<Vec<F>> = (0..types).map(|t| x[t * n..(t + 1) * n].to_vec()).collect();
        let pay = (0..types)
            .map(|t| {
                let value = (0..n).fold(F::nought(), |acc, i| {
                    acc.add(&conv(&self.values[t][i]).mul(&alloc[t][i]))
                });
                value.sub(&x[types * n + t])
            })
            .collect();
        (alloc, pay)
    }

}

/// Floating-point LP solution with its feasibility and optimality residuals.
#[derive(Clone, Debug)]
pub struct FloatLpSolution {
    pub alloc: Vec<Vec<f64>>,
    pub pay: Vec<f64>,
    pub revenue: f64,
    /// Largest IC, IR or bound violation.
    pub primal_residual: f64,
    /// Largest negative dual or positive reduced cost.
    pub dual_residual: f64,
    pub pivots: usize,
    dual_basis: Vec<usize>,
}

/// Exact optimum of the revenue LP.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub mechanism: DirectMechanism,
    pub revenue: Rational,
    /// Whether the floating-point basis was certified directly, without
    /// exact pivoting.
    pub certified_float_basis: bool,
    pub pivots: usize,
}

/// The dual of the revenue LP, `min b·y` subject to `Aᵀy - s = c`,
/// `y, s >= 0`, written as a maximization. It has one row per primal
/// column, far fewer than the primal's IC rows, and a feasible unit basis
/// at the start: the bound row's multiplier for allocation columns (whose
/// cost is nonnegative) and the surplus for utility columns. Its right-hand
/// side is the primal objective, so it is far less degenerate than the
/// primal, whose right-hand side is almost entirely zero.
struct DualLp<F> {
    c: Vec<F>,
    rows: Vec<Row<F>>,
    b: Vec<F>,
    start: Vec<usize>,
    primal_rows: usize,
    primal_cols: usize,
}

impl<F: Field> DualLp<F> {
    fn new(lp: &RevenueLp, conv: impl Fn(&Rational) -> F) -> Self {
        let (m, n) = (lp.rows.len(), lp.cols);
        let mut bound_row = vec![None; n];
        for (r, row) in lp.rows.iter().enumerate() {
            if let [(j, a)] = row.as_slice() {
                if a.is_one() {
                    bound_row[*j] = Some(r);
                }
            }
        }
        let mut sign = vec![false; n];
        let mut start = Vec::with_capacity(n);
        for j in 0..n {
            match bound_row[j] {
                Some(r) if lp.c[j].is_positive() => start.push(r),
                _ => {
                    debug_assert!(!lp.c[j].is_positive(), "no unit column for row {j}");
                    sign[j] = true;
                    start.push(m + j);
                }
            }
        }
        let flip = |j: usize, a: &Rational| if sign[j] { conv(&-a) } else { conv(a) };
        let mut rows: Vec<Row<F>> = vec![Vec::new(); n];
        for (r, row) in lp.rows.iter().enumerate() {
            for (j, a) in row {
                rows[*j].push((r, flip(*j, a)));
            }
        }
        let minus_one = Rational::from_integer((-1).into());
        for (j, row) in rows.iter_mut().enumerate() {
            row.push((m + j, flip(j, &minus_one)));
        }
        let b = (0..n).map(|j| flip(j, &lp.c[j])).collect();
        let c = lp
            .b
            .iter()
            .map(|b| conv(&-b))
            .chain((0..n).map(|_| F::nought()))
            .collect();
        DualLp {
            c,
            rows,
            b,
            start,
            primal_rows: m,
            primal_cols: n,
        }
    }

    fn tableau(&self) -> Tableau<F> {
        Tableau::canonical(&self.c, &self.rows, &self.b, self.start.clone())
    }

    fn max_pivots(&self) -> usize {
        50 * (self.rows.len() + self.c.len())
    }

    /// The complementary primal basis: a primal column is basic when its
    /// surplus is not, and a primal row's slack is basic when its
    /// multiplier is not.
    fn primal_basis(&self, dual_basis: &[usize]) -> Vec<usize> {
        let (m, n) = (self.primal_rows, self.primal_cols);
        let mut in_basis = vec![false; m + n];
        for &k in dual_basis {
            in_basis[k] = true;
        }
        (0..n)
            .filter(|&j| !in_basis[m + j])
            .chain((0..m).filter(|&r| !in_basis[r]).map(|r| n + r))
            .collect()
    }
}

pub fn lp_optimal_float(dist: &JointDistribution) -> Result<FloatLpSolution> {
    float_solve(&RevenueLp::new(dist), dist)
}

fn float_solve(lp: &RevenueLp, dist: &JointDistribution) -> Result<FloatLpSolution> {
    let dual = DualLp::new(lp, to_f64);
    let mut tableau = dual.tableau();
    match tableau.solve(dual.max_pivots()) {
        Outcome::Optimal => {}
        other => return Err(Error::Lp(format!("floating-point simplex: {other:?}"))),
    }
    let c: Vec<f64> = lp.c.iter().map(to_f64).collect();
    let b: Vec<f64> = lp.b.iter().map(to_f64).collect();
    let rows = lp.float_rows();
    let basis = dual.primal_basis(&tableau.basis);
    let (x, y) = basic_solution(lp.cols, &c, &rows, &b, &basis)
        .ok_or_else(|| Error::Lp("singular floating-point basis".into()))?;
    let (alloc, pay) = lp.split(&x, to_f64);
    let revenue = c.iter().zip(&x).map(|(c, x)| c * x).sum();
    let mut reduced = c.clone();
    for (r, row) in rows.iter().enumerate() {
        for (j, a) in row {
            reduced[*j] -= y[r] * a;
        }
    }
    let negative = |v: &f64| -v;
    let primal_residual = ic_ir_residual(&alloc, &pay, dist).max(x.iter().map(negative).fold(0.0, f64::max));
    let dual_residual = y.iter().map(negative).chain(reduced).fold(0.0f64, f64::max);
    Ok(FloatLpSolution {
        primal_residual,
        dual_residual,
        alloc,
        pay,
        revenue,
        pivots: tableau.pivots,
        dual_basis: tableau.basis,
    })
}

/// Solves in floating point, then certifies the final basis in exact
/// arithmetic. If the certificate fails, re-solves exactly, starting from
/// as much of the floating-point basis as stays feasible.
pub fn lp_optimal(dist: &JointDistribution) -> Result<LpSolution> {
    let lp = RevenueLp::new(dist);
    let dual = DualLp::new(&lp, Rational::clone);
    let float = float_solve(&lp, dist).ok();
    if let Some(f) = &float {
        let basis = dual.primal_basis(&f.dual_basis);
        if let Some((x, _)) = certify_basis(lp.cols, &lp.c, &lp.rows, &lp.b, &basis) {
            return Ok(exact_solution(&lp, dist, x, true, f.pivots));
        }
    }
    let mut tableau = dual.tableau();
    if let Some(f) = &float {
        for &k in &f.dual_basis {
            if !tableau.basis.contains(&k) {
                tableau.try_enter(k);
            }
        }
    }
    match tableau.solve(dual.max_pivots()) {
        Outcome::Optimal => {}
        other => return Err(Error::Lp(format!("exact simplex: {other:?}"))),
    }
    let basis = dual.primal_basis(&tableau.basis);
    let (x, _) = certify_basis(lp.cols, &lp.c, &lp.rows, &lp.b, &basis)
        .ok_or_else(|| Error::Lp("optimal dual basis failed certification".into()))?;
    Ok(exact_solution(&lp, dist, x, false, tableau.pivots))
}

fn exact_solution(
    lp: &RevenueLp,
    dist: &JointDistribution,
    x: Vec<Rational>,
    certified: bool,
    pivots: usize,
) -> LpSolution {
    let (alloc, pay) = lp.split(&x, Rational::clone);
    let mechanism = DirectMechanism { alloc, pay };
    let revenue = mechanism.revenue(dist);
    LpSolution {
        mechanism,
        revenue,
        certified_float_basis: certified,
        pivots,
    }
}

/// Nearest rational with a denominator below `max_den` to a float, for
/// reporting floating-point solutions.
pub fn reconstruct(x: f64, max_den: u64) -> Option<Rational> {
    let exact = from_f64(x)?;
    // continued fraction convergents
    let (mut h0, mut h1) = (num_bigint::BigInt::from(0), num_bigint::BigInt::from(1));
    let (mut k0, mut k1) = (num_bigint::BigInt::from(1), num_bigint::BigInt::from(0));
    let mut rest = exact;
    let mut best = None;
    for _ in 0..64 {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > num_bigint::BigInt::from(max_den) {
            break;
        }
        best = Some(Rational::new(h2.clone(), k2.clone()));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{product, SingleItemDistribution};
    use crate::rational::{int, rat};

    #[test]
    fn point_mass_gets_full_surplus() {
        let d = JointDistribution::point(Valuation::from_ints(&[5])).unwrap();
        let s = lp_optimal(&d).unwrap();
        assert_eq!(s.revenue, int(5));
        assert_eq!(s.mechanism.alloc[0], vec![int(1)]);
        assert_eq!(s.mechanism.pay[0], int(5));
    }

    #[test]
    fn uniform_one_two_earns_one() {
        let f = SingleItemDistribution::uniform_ints(&[1, 2]).unwrap();
        let d = product(&[f]).unwrap();
        let s = lp_optimal(&d).unwrap();
        assert_eq!(s.revenue, int(1));
        assert!(verify_ic_ir(&s.mechanism, &d).holds());
        let float = lp_optimal_float(&d).unwrap();
        assert!((float.revenue - 1.0).abs() < 1e-9);
        assert!(float.primal_residual < 1e-9 && float.dual_residual < 1e-9);
    }

    #[test]
    fn lottery_example_menu_is_lp_optimal() {
        let types = crate::data::example7_types();
        let menu = crate::data::example7_menu();
        let direct = DirectMechanism::from_menu(&menu, &types);
        assert!(verify_ic_ir(&direct, &types).holds());
        let s = lp_optimal(&types).unwrap();
        assert_eq!(s.revenue, direct.revenue(&types));
        assert!(verify_ic_ir(&s.mechanism, &types).holds());
    }

    #[test]
    fn exact_path_matches_certified_path() {
        let f = SingleItemDistribution::uniform_ints(&[1, 3, 4]).unwrap();
        let d = product(&[f.clone(), f]).unwrap();
        let lp = RevenueLp::new(&d);
        let dual = DualLp::new(&lp, Rational::clone);
        let mut t = dual.tableau();
        assert!(matches!(t.solve(dual.max_pivots()), Outcome::Optimal));
        let basis = dual.primal_basis(&t.basis);
        let (x, _) = certify_basis(lp.cols, &lp.c, &lp.rows, &lp.b, &basis).unwrap();
        let exact: Rational = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
        assert_eq!(exact, lp_optimal(&d).unwrap().revenue);
    }

    #[test]
    fn full_surplus_extraction_is_not_ic() {
        let f = SingleItemDistribution::uniform_ints(&[1, 2]).unwrap();
        let d = product(&[f]).unwrap();
        let m = DirectMechanism {
            alloc: vec![vec![int(1)], vec![int(1)]],
            pay: vec![int(1), int(2)],
        };
        let report = verify_ic_ir(&m, &d);
        assert_eq!(
            report.violations,
            vec![Violation::Ic { truth: 1, report: 0, gain: int(1) }]
        );
        assert!(verify_ic_ir(&DirectMechanism::null(&d), &d).holds());
    }

    #[test]
    fn reconstruct_small_fractions() {
        assert_eq!(reconstruct(1.0 / 3.0, 1000), Some(rat(1, 3)));
        assert_eq!(reconstruct(0.6293, 100_000), Some(rat(6293, 10_000)));
    }
}
