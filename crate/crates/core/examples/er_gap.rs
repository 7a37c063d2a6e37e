//! Bundle and deterministic revenue for a pair of independent equal-revenue
//! items, compared with separate sales and the constant `w`.

use mechbench::continuous::{cap_convergence, numeric_gap_er, solve_w, NumericParams};

fn main() -> mechbench::Result<()> {
    let w = solve_w();
    println!("w = {w:.12}, 2w = {:.6}", 2.0 * w);

    let report = numeric_gap_er(1.0, 1.0, &NumericParams::default())?;
    println!(
        "cap {}  points {}  srev {}  brev {:.6} (price {:.4})  brev/srev {:.6}",
        report.cap,
        report.grid_points,
        report.srev,
        report.brev,
        report.brev_price,
        report.brev_over_srev()
    );
    println!(
        "search grid {} points: drev {:.6}  brev {:.6}  tolerance {:.3}",
        report.search_points, report.drev, report.brev_coarse, report.drev_tolerance
    );

    for p in cap_convergence(1.0, 1.0, &[1e2, 1e3, 1e4], 500)? {
        println!(
            "cap {:>7}  points {:>5}  brev {:.8}  brev/srev {:.8}",
            p.cap, p.grid_points, p.brev, p.brev_over_srev
        );
    }
    Ok(())
}
