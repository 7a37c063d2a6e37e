//! Equal-revenue distributions, the constant `w`, and numeric gap estimates
//! on truncated geometric discretizations.
//!
//! Everything here is binary64 with explicit tolerances. Discretized
//! distributions are exact rationals (their tail probabilities are dyadic),
//! but revenues computed from them are floats.

use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{product, SingleItemDistribution};
use crate::rational::{from_f64, to_f64, Rational};
use crate::search::{candidate_grid, search_with, Arithmetic, GridMode, SearchConstraint, SearchOptions};

/// `(w - 1) e^w - 1`.
pub fn w_residual(w: f64) -> f64 {
    (w - 1.0) * w.exp() - 1.0
}

/// Root of `(w - 1) e^w = 1`: bisection on `[1, 2]` followed by Newton steps.
pub fn solve_w() -> f64 {
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    debug_assert!(w_residual(lo) < 0.0 && w_residual(hi) > 0.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if w_residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..8 {
        // d/dw (w - 1) e^w = w e^w
        let step = w_residual(w) / (w * w.exp());
        w -= step;
        if step.abs() < 1e-17 {
            break;
        }
    }
    w
}

/// `min(1, r / p)`.
pub fn er_tail(r: f64, p: f64) -> Result<f64> {
    if !(r > 0.0 && p > 0.0) {
        return Err(Error::InvalidParams(format!(
            "tail needs positive r and p, got r = {r}, p = {p}"
        )));
    }
    Ok((r / p).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericParams {
    /// Largest support point; the tail beyond it sits on the cap.
    pub cap: f64,
    /// Points of the geometric grid from `r` to `cap`, both included.
    pub grid_points: usize,
    /// Relative tolerance for reported comparisons.
    pub tolerance: f64,
    /// Points of the coarser grid used for the exhaustive menu search.
    pub search_points: usize,
}

impl Default for NumericParams {
    fn default() -> Self {
        NumericParams {
            cap: 1e4,
            grid_points: 2001,
            tolerance: 1e-2,
            search_points: 24,
        }
    }
}

impl NumericParams {
    /// Grid with a fixed number of points per factor of ten between `r` and
    /// `cap`, so grids for larger caps extend smaller ones.
    pub fn with_density(r: f64, cap: f64, per_decade: usize) -> Self {
        let decades = (cap / r).log10();
        NumericParams {
            cap,
            grid_points: (decades * per_decade as f64).round() as usize + 1,
            ..Default::default()
        }
    }

    pub fn validate(&self, r: f64) -> Result<()> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
        }
        if !(self.cap > r && self.cap.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "cap {} must exceed r = {r}",
                self.cap
            )));
        }
        if self.grid_points < 100 {
            return Err(Error::InvalidParams(format!(
                "need at least 100 grid points, got {}",
                self.grid_points
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParams("tolerance must be positive".into()));
        }
        if self.search_points < 2 {
            return Err(Error::InvalidParams("need at least 2 search points".into()));
        }
        Ok(())
    }

    /// Ratio between neighbouring grid points.
    pub fn grid_ratio(&self, r: f64, points: usize) -> f64 {
        (self.cap / r).powf(1.0 / (points - 1) as f64)
    }
}

pub fn er_discretize(r: f64, params: &NumericParams) -> Result<SingleItemDistribution> {
    params.validate(r)?;
    geometric(r, params.cap, params.grid_points)
}

/// Atoms at `g_k = r / t_k` where `t_k = (r/cap)^(k/(m-1))` rounded to a
/// double. The atom at `g_k` has mass `t_k - t_{k+1}`, the cap keeps the
/// residual `t_{m-1} = r/cap`, and the masses telescope to exactly 1. The
/// tail at every grid point equals the equal-revenue tail there.
fn geometric(r: f64, cap: f64, points: usize) -> Result<SingleItemDistribution> {
    let r_exact = from_f64(r).ok_or_else(|| Error::InvalidParams(format!("r = {r}")))?;
    let ratio = r / cap;
    let mut tails: Vec<Rational> = (0..points)
        .map(|k| {
            let t = if k == 0 {
                1.0
            } else if k + 1 == points {
                ratio
            } else {
                ratio.powf(k as f64 / (points - 1) as f64)
            };
            from_f64(t).expect("finite tail")
        })
        .collect();
    tails.dedup();
    let mut atoms = Vec::with_capacity(tails.len());
    for (k, t) in tails.iter().enumerate() {
        let mass = match tails.get(k + 1) {
            Some(next) => t - next,
            None => t.clone(),
        };
        atoms.push((&r_exact / t, mass));
    }
    SingleItemDistribution::new(atoms)
}

/// True when the distribution's tail never exceeds the equal-revenue tail
/// at its own optimal single-price revenue. Checked exactly at the support
/// points, which suffices for step tails.
pub fn dominated_by_er(f: &SingleItemDistribution) -> bool {
    let (_, r) = f.optimal_price_revenue();
    f.atoms().iter().all(|(x, _)| {
        if x.is_zero() {
            return true;
        }
        let bound = (&r / x).min(Rational::one());
        f.tail(x) <= bound
    })
}

/// Best grand-bundle price for independent items and its revenue, in
/// floating point: `max_p p · Pr[v1 + v2 >= p]` over all support sums.
pub fn bundle_price_sweep(
    d1: &SingleItemDistribution,
    d2: &SingleItemDistribution,
) -> (f64, f64) {
    let a: Vec<(f64, f64)> = d1.atoms().iter().map(|(v, p)| (to_f64(v), to_f64(p))).collect();
    let b: Vec<(f64, f64)> = d2.atoms().iter().map(|(v, p)| (to_f64(v), to_f64(p))).collect();
    let mut sums: Vec<(f64, f64)> = a
        .par_iter()
        .flat_map_iter(|&(x, p)| b.iter().map(move |&(y, q)| (x + y, p * q)))
        .collect();
    sums.par_sort_by(|u, v| v.0.total_cmp(&u.0));
    let mut best = (0.0, 0.0);
    let mut mass = 0.0;
    for (k, &(s, p)) in sums.iter().enumerate() {
        mass += p;
        let group_ends = sums.get(k + 1).is_none_or(|next| next.0 != s);
        if group_ends && s * mass > best.1 {
            best = (s, s * mass);
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct ErGapReport {
    pub r1: f64,
    pub r2: f64,
    pub cap: f64,
    pub grid_points: usize,
    pub search_points: usize,
    /// `r1 + r2`, the separate-sale revenue of the untruncated pair.
    pub srev: f64,
    pub brev: f64,
    pub brev_price: f64,
    /// Best deterministic menu on the coarse search discretization.
    pub drev: f64,
    /// Bundle revenue on the same coarse discretization as `drev`.
    pub brev_coarse: f64,
    /// Neighbouring-point ratio minus one on the coarse grid: the relative
    /// resolution at which `drev` and `brev_coarse` are compared.
    pub drev_tolerance: f64,
    pub w: f64,
}

impl ErGapReport {
    pub fn brev_over_srev(&self) -> f64 {
        self.brev / self.srev
    }

    pub fn drev_over_srev(&self) -> f64 {
        self.drev / self.srev
    }

    pub fn drev_matches_brev(&self) -> bool {
        (self.drev - self.brev_coarse).abs() <= self.drev_tolerance * self.brev_coarse
    }

    pub fn to_json(&self) -> Value {
        json!({
            "r1": self.r1,
            "r2": self.r2,
            "cap": self.cap,
            "grid_points": self.grid_points,
            "search_points": self.search_points,
            "srev": self.srev,
            "brev": self.brev,
            "brev_price": self.brev_price,
            "drev": self.drev,
            "brev_coarse": self.brev_coarse,
            "drev_tolerance": self.drev_tolerance,
            "brev_over_srev": self.brev_over_srev(),
            "drev_over_srev": self.drev_over_srev(),
            "w": self.w,
        })
    }

    pub const CSV_HEADER: &'static str =
        "cap,grid_points,srev,brev,drev,brev_coarse,brev_over_srev,drev_over_srev,w";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.cap,
            self.grid_points,
            self.srev,
            self.brev,
            self.drev,
            self.brev_coarse,
            self.brev_over_srev(),
            self.drev_over_srev(),
            self.w
        )
    }
}

pub fn numeric_gap_er(r1: f64, r2: f64, params: &NumericParams) -> Result<ErGapReport> {
    params.validate(r1)?;
    params.validate(r2)?;
    let d1 = er_discretize(r1, params)?;
    let d2 = er_discretize(r2, params)?;
    let (brev_price, brev) = bundle_price_sweep(&d1, &d2);

    let c1 = geometric(r1, params.cap, params.search_points)?;
    let c2 = geometric(r2, params.cap, params.search_points)?;
    let (_, brev_coarse) = bundle_price_sweep(&c1, &c2);
    let coarse = product(&[c1, c2])?;
    let grid = candidate_grid(&coarse, &GridMode::SupportSums)?;
    let options = SearchOptions {
        monotone_pruning: true,
        arithmetic: Arithmetic::Float,
    };
    let found = search_with(&coarse, SearchConstraint::Unrestricted, &grid, options)?;
    let drev = found.revenue.to_f64().unwrap_or(f64::NAN);
    let drev_tolerance = params.grid_ratio(r1.min(r2), params.search_points) - 1.0;

    Ok(ErGapReport {
        r1,
        r2,
        cap: params.cap,
        grid_points: params.grid_points,
        search_points: params.search_points,
        srev: r1 + r2,
        brev,
        brev_price,
        drev,
        brev_coarse,
        drev_tolerance,
        w: solve_w(),
    })
}

/// Bundle revenue of a discretized pair for each cap, at a fixed number of
/// grid points per decade.
#[derive(Clone, Debug)]
pub struct CapPoint {
    pub cap: f64,
    pub grid_points: usize,
    pub brev: f64,
    pub brev_over_srev: f64,
}

pub fn cap_convergence(r1: f64, r2: f64, caps: &[f64], per_decade: usize) -> Result<Vec<CapPoint>> {
    caps.iter()
        .map(|&cap| {
            let params = NumericParams::with_density(r1.min(r2), cap, per_decade);
            let p1 = NumericParams::with_density(r1, cap, per_decade);
            let p2 = NumericParams::with_density(r2, cap, per_decade);
            let d1 = er_discretize(r1, &p1)?;
            let d2 = er_discretize(r2, &p2)?;
            let (_, brev) = bundle_price_sweep(&d1, &d2);
            Ok(CapPoint {
                cap,
                grid_points: params.grid_points,
                brev,
                brev_over_srev: brev / (r1 + r2),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn w_is_the_root() {
        let w = solve_w();
        assert!(w > 1.2784 && w < 1.2785, "{w}");
        assert!(w_residual(w).abs() < 1e-12);
        assert!(w_residual(1.0) < 0.0 && w_residual(2.0) > 0.0);
        assert_eq!(solve_w().to_bits(), w.to_bits());
    }

    #[test]
    fn tail_values() {
        assert_eq!(er_tail(1.0, 2.0).unwrap(), 0.5);
        assert_eq!(er_tail(1.0, 0.5).unwrap(), 1.0);
        for p in [1.0, 3.0, 17.5, 1e6] {
            assert!((p * er_tail(1.0, p).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(er_tail(0.0, 1.0).is_err());
        assert!(er_tail(1.0, -1.0).is_err());
    }

    #[test]
    fn discretization_has_unit_mass_and_er_tails() {
        let params = NumericParams {
            grid_points: 200,
            cap: 1e3,
            ..Default::default()
        };
        let d = er_discretize(1.0, &params).unwrap();
        let total: Rational = d.atoms().iter().map(|(_, p)| p).sum();
        assert_eq!(total, int(1));
        for (x, _) in d.atoms() {
            let er = er_tail(1.0, to_f64(x)).unwrap();
            assert!((to_f64(&d.tail(x)) - er).abs() < 1e-12);
        }
        assert!(dominated_by_er(&d));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let bad = [
            NumericParams { grid_points: 50, ..Default::default() },
            NumericParams { cap: 0.5, ..Default::default() },
            NumericParams { tolerance: 0.0, ..Default::default() },
        ];
        for p in bad {
            assert!(er_discretize(1.0, &p).is_err(), "{p:?}");
        }
    }

    #[test]
    fn sweep_on_two_point_masses() {
        let a = SingleItemDistribution::point(int(2)).unwrap();
        let b = SingleItemDistribution::point(int(3)).unwrap();
        assert_eq!(bundle_price_sweep(&a, &b), (5.0, 5.0));
    }
}
