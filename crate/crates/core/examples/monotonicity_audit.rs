//! Revenue monotonicity: a submodular menu never charges a higher type less,
//! while a supermodular one can.

use mechbench::buyer::{check_monotone, monotonicity_grid};
use mechbench::model::{Menu, Valuation};
use mechbench::rational::{format_rational, rat};

fn main() -> mechbench::Result<()> {
    let support: Vec<Valuation> = (0..=6).flat_map(|x| (0..=6).map(move |y| Valuation::from_ints(&[x, y]))).collect();
    for prices in [[4, 5, 7], [5, 1, 10]] {
        let menu = Menu::from_ints(2, &prices)?;
        let grid = monotonicity_grid(&menu, &support, &rat(1, 2));
        let report = check_monotone(&menu, &grid);
        println!("{menu}: {} points, {} violations", grid.len(), report.violations.len());
        if let Some(v) = report.violations.first() {
            let show = |v: &Valuation| v.values().iter().map(format_rational).collect::<Vec<_>>().join(", ");
            println!(
                "  e.g. ({}) pays {} but ({}) pays {}",
                show(&v.low),
                v.revenue_low,
                show(&v.high),
                v.revenue_high
            );
        }
    }
    Ok(())
}
