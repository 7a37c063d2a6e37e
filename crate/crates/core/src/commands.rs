//! Command surface behind the `mechbench` binary. Each command renders its
//! whole output to a string so it can be tested without a process.
//!
//! Input files may be given as paths or as `bundled:NAME` for one of the
//! files in [`crate::data::FILES`].
//!
//! Exit codes: 0 on success, 1 when a reproduction check fails (or an
//! internal certificate does not hold), 2 on bad input.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::buyer::{expected_revenue, region_partition_2, sale_probabilities};
use crate::constructions::{submodularize2, symmetrize2, three_halves_certificate, ConstructionCertificate};
use crate::continuous::{numeric_gap_er, ErGapReport, NumericParams};
use crate::data;
use crate::error::{Error, Result};
use crate::model::{parse_distribution, parse_menu, JointDistribution, Menu, Valuation};
use crate::randomized::{
    best_false_name_deviation, lp_optimal, parse_randomized_menu, rchoice, CombinationRule,
};
use crate::rational::{describe, format_rational, parse_rational};
use crate::reproduce::{reproduce, Target};
use crate::search::{
    candidate_grid, gap_report, parse_grid, results_to_csv, Arithmetic, CandidateGrid, GridMode,
    SearchConstraint, SearchOptions,
};

#[derive(Debug, Parser)]
#[command(name = "mechbench", version, about = "Exact revenue of selling mechanisms for one additive buyer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ArithmeticArg {
    Auto,
    Rational,
    Float,
}

impl From<ArithmeticArg> for Arithmetic {
    fn from(a: ArithmeticArg) -> Self {
        match a {
            ArithmeticArg::Auto => Arithmetic::Auto,
            ArithmeticArg::Rational => Arithmetic::Rational,
            ArithmeticArg::Float => Arithmetic::Float,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructionKind {
    Submodularize,
    Symmetrize,
    ThreeHalves,
}

#[derive(Debug, clap::Args)]
pub struct GridArgs {
    /// `integer`, `support-sums`, or a grid JSON file.
    #[arg(long, default_value = "integer")]
    pub grid: String,
    /// Drop candidate prices above this value.
    #[arg(long)]
    pub max_price: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub arithmetic: ArithmeticArg,
    /// Enumerate every menu even on downward-closed grids.
    #[arg(long)]
    pub no_pruning: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact expected revenue of a menu, with per-bundle sale probabilities.
    Eval {
        menu: String,
        distribution: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Optimal menu on a candidate grid, one row per constraint.
    Search {
        distribution: String,
        /// Constraint class; repeat for several, or pass `all`.
        #[arg(long = "constraint", default_value = "unrestricted")]
        constraints: Vec<String>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// drev, srev, brev, smdrev, symdrev and their ratios.
    Gap {
        distribution: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a worked result and compare it with its expected values.
    Reproduce {
        /// Target name, or `all`.
        target: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Draw the four purchase regions of a two-item menu as SVG.
    Plot {
        menu: String,
        #[arg(long)]
        out: PathBuf,
        /// Also print an ASCII rendering.
        #[arg(long)]
        ascii: bool,
    },
    /// Apply a revenue-preserving menu transformation and print its certificate.
    Construct {
        #[arg(value_enum)]
        kind: ConstructionKind,
        menu: String,
        distribution: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Discretized equal-revenue pair: srev, brev and drev.
    ErGap {
        #[arg(long, default_value_t = 1e4)]
        cap: f64,
        #[arg(long, default_value_t = 2001)]
        grid_points: usize,
        #[arg(long, default_value_t = 24)]
        search_points: usize,
        #[arg(long, default_value_t = 1.0)]
        r1: f64,
        #[arg(long, default_value_t = 1.0)]
        r2: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Lottery menu: the buyer's single purchase and the best multi-purchase deviation.
    Lottery {
        menu: String,
        /// Comma-separated values, e.g. `46,80`.
        #[arg(long, value_delimiter = ',', required = true)]
        value: Vec<String>,
        #[arg(long, default_value = "independent")]
        rule: CombinationRule,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Optimal randomized mechanism via the revenue LP.
    Lp {
        distribution: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the bundled data files, or write them to a directory.
    Data {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Rendered output and exit code of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

/// Exit code for an error: 1 when an internal check failed, 2 for bad input.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Lp(_) | Error::DominanceViolated { .. } => 1,
        _ => 2,
    }
}

pub fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Eval {
            menu,
            distribution,
            format,
        } => eval(&load_menu(&menu)?, &load_distribution(&distribution)?, format).map(Output::ok),
        Command::Search {
            distribution,
            constraints,
            grid,
            format,
            out,
        } => {
            let dist = load_distribution(&distribution)?;
            let constraints = parse_constraints(&constraints)?;
            let text = search(&dist, &constraints, &grid, format)?;
            emit(text, out.as_deref())
        }
        Command::Gap {
            distribution,
            grid,
            format,
            out,
        } => {
            let dist = load_distribution(&distribution)?;
            let (g, options) = build_grid(&dist, &grid)?;
            let report = gap_report(&dist, &g, options)?;
            let text = match format {
                Format::Json => pretty(&report.to_json()),
                Format::Csv => {
                    let rows: Vec<_> = report.results().iter().map(|(_, r)| (*r).clone()).collect();
                    results_to_csv(&rows)
                }
                Format::Text => {
                    let mut s = String::new();
                    for (name, r) in report.results() {
                        s += &format!("{name}: {} menu {}\n", describe(&r.revenue), r.best);
                    }
                    for ratio in &report.ratios {
                        let v = ratio.value.as_ref().map_or("undefined".to_string(), describe);
                        s += &format!("{}: {v}\n", ratio.name);
                    }
                    s
                }
            };
            emit(text, out.as_deref())
        }
        Command::Reproduce { target, format } => reproduce_command(&target, format),
        Command::Plot { menu, out, ascii } => {
            let partition = region_partition_2(&load_menu(&menu)?)?;
            fs::write(&out, partition.to_svg())?;
            let mut s = format!("{:?} partition written to {}\n", partition.shape, out.display());
            if ascii {
                s += &partition.to_ascii(60, 30);
            }
            Ok(Output::ok(s))
        }
        Command::Construct {
            kind,
            menu,
            distribution,
            format,
        } => {
            let cert = construct(kind, &load_menu(&menu)?, &load_distribution(&distribution)?)?;
            Ok(Output::ok(match format {
                Format::Text => {
                    let mut s = format!("input {} earns {}\n", cert.input, describe(&cert.input_revenue));
                    for (menu, revenue) in &cert.candidates {
                        s += &format!("candidate {menu} earns {}\n", describe(revenue));
                    }
                    s += &format!("output {} earns {}\n", cert.output, describe(&cert.output_revenue));
                    match cert.three_halves_slack() {
                        Some(slack) => s += &format!("slack of rev(additive) + rev(bundle)/2 {}\n", describe(&slack)),
                        None => s += &format!("margin {}\n", describe(&cert.margin())),
                    }
                    s
                }
                _ => pretty(&cert.to_json()),
            }))
        }
        Command::ErGap {
            cap,
            grid_points,
            search_points,
            r1,
            r2,
            format,
        } => {
            let params = NumericParams {
                cap,
                grid_points,
                search_points,
                ..Default::default()
            };
            let report = numeric_gap_er(r1, r2, &params)?;
            Ok(Output::ok(er_text(&report, format)))
        }
        Command::Lottery {
            menu,
            value,
            rule,
            k,
            format,
        } => {
            let menu = parse_randomized_menu(&read_input(&menu)?)?;
            let values = value.iter().map(|v| parse_rational(v)).collect::<Result<Vec<_>>>()?;
            let v = Valuation::new(values)?;
            if v.n() != menu.n() {
                return Err(Error::Dimension {
                    expected: menu.n(),
                    found: v.n(),
                });
            }
            let single = rchoice(&menu, &v);
            let dev = best_false_name_deviation(&menu, &v, rule, k)?;
            Ok(Output::ok(match format {
                Format::Json | Format::Csv => pretty(&json!({
                    "single": {"entry": single.index, "utility": format_rational(&single.utility), "pay": format_rational(&single.pay)},
                    "deviation": {"rule": rule.name(), "picks": dev.picks, "utility": format_rational(&dev.utility)},
                    "improves": dev.utility > single.utility,
                })),
                Format::Text => format!(
                    "single purchase: entry {} utility {} pay {}\nbest {} deviation (k = {k}): picks {:?} utility {}\nimproves: {}\n",
                    single.index,
                    describe(&single.utility),
                    describe(&single.pay),
                    rule.name(),
                    dev.picks,
                    describe(&dev.utility),
                    dev.utility > single.utility
                ),
            }))
        }
        Command::Lp {
            distribution,
            format,
        } => {
            let dist = load_distribution(&distribution)?;
            let solution = lp_optimal(&dist)?;
            Ok(Output::ok(match format {
                Format::Json | Format::Csv => pretty(&json!({
                    "revenue": format_rational(&solution.revenue),
                    "decimal": crate::rational::decimal_string(&solution.revenue),
                    "mechanism": solution.mechanism.to_json(&dist),
                })),
                Format::Text => format!(
                    "optimal revenue: {}\ntypes: {}\n",
                    describe(&solution.revenue),
                    dist.len()
                ),
            }))
        }
        Command::Data { out } => match out {
            None => Ok(Output::ok(
                data::FILES.iter().map(|(name, _)| format!("{name}\n")).collect(),
            )),
            Some(dir) => {
                fs::create_dir_all(&dir)?;
                for (name, text) in data::FILES {
                    fs::write(dir.join(name), text)?;
                }
                Ok(Output::ok(format!("wrote {} files to {}\n", data::FILES.len(), dir.display())))
            }
        },
    }
}

/// Parses arguments, runs the command and prints its output or error.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Reads a path, or a bundled file given as `bundled:NAME`.
pub fn read_input(input: &str) -> Result<String> {
    match input.strip_prefix("bundled:") {
        Some(name) => data::FILES
            .iter()
            .find(|(n, _)| *n == name || n.trim_end_matches(".json") == name)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| Error::parse(input, "no such bundled file")),
        None => Ok(fs::read_to_string(input)?),
    }
}

pub fn load_menu(input: &str) -> Result<Menu> {
    parse_menu(&read_input(input)?)
}

pub fn load_distribution(input: &str) -> Result<JointDistribution> {
    parse_distribution(&read_input(input)?)
}

pub fn eval(menu: &Menu, dist: &JointDistribution, format: Format) -> Result<String> {
    if menu.n() != dist.n() {
        return Err(Error::Dimension {
            expected: menu.n(),
            found: dist.n(),
        });
    }
    let revenue = expected_revenue(menu, dist);
    let sales = sale_probabilities(menu, dist);
    Ok(match format {
        Format::Text => {
            let mut s = format!("{}\n", describe(&revenue));
            for (bundle, p) in &sales {
                s += &format!("  {bundle}: {}\n", describe(p));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("bundle,probability,decimal\n");
            for (bundle, p) in &sales {
                s += &format!("\"{bundle}\",{},{}\n", format_rational(p), crate::rational::decimal_string(p));
            }
            s
        }
        Format::Json => pretty(&json!({
            "revenue": format_rational(&revenue),
            "decimal": crate::rational::decimal_string(&revenue),
            "sales": sales.iter().map(|(b, p)| json!({"bundle": b.key(), "probability": format_rational(p)})).collect::<Vec<_>>(),
        })),
    })
}

fn parse_constraints(names: &[String]) -> Result<Vec<SearchConstraint>> {
    if names.iter().any(|n| n == "all") {
        return Ok(SearchConstraint::ALL.to_vec());
    }
    let mut out: Vec<SearchConstraint> = Vec::new();
    for name in names {
        let c: SearchConstraint = name.parse()?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn build_grid(dist: &JointDistribution, args: &GridArgs) -> Result<(CandidateGrid, SearchOptions)> {
    let grid = match args.grid.as_str() {
        "integer" => candidate_grid(dist, &GridMode::IntegerGrid)?,
        "support-sums" => candidate_grid(dist, &GridMode::SupportSums)?,
        file => parse_grid(&read_input(file)?)?,
    };
    let grid = match &args.max_price {
        Some(p) => grid.with_max_price(&parse_rational(p)?)?,
        None => grid,
    };
    let options = SearchOptions {
        monotone_pruning: !args.no_pruning,
        arithmetic: args.arithmetic.into(),
    };
    Ok((grid, options))
}

pub fn search(
    dist: &JointDistribution,
    constraints: &[SearchConstraint],
    args: &GridArgs,
    format: Format,
) -> Result<String> {
    let (grid, options) = build_grid(dist, args)?;
    let results = constraints
        .iter()
        .map(|&c| crate::search::search_with(dist, c, &grid, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(match format {
        Format::Csv => results_to_csv(&results),
        Format::Json => pretty(&Value::Array(results.iter().map(|r| r.to_json()).collect())),
        Format::Text => results
            .iter()
            .map(|r| {
                format!(
                    "{}: {} menu {} ({} menus)\n",
                    r.constraint,
                    describe(&r.revenue),
                    r.best,
                    r.examined
                )
            })
            .collect(),
    })
}

pub fn construct(kind: ConstructionKind, menu: &Menu, dist: &JointDistribution) -> Result<ConstructionCertificate> {
    match kind {
        ConstructionKind::Submodularize => {
            let parts = dist.as_product().ok_or_else(|| {
                Error::parse("distribution", "submodularize needs independent items")
            })?;
            if parts.len() != 2 {
                return Err(Error::WrongItemCount {
                    expected: 2,
                    found: parts.len(),
                });
            }
            submodularize2(menu, &parts[0], &parts[1])
        }
        ConstructionKind::Symmetrize => symmetrize2(menu, &dist.as_iid().ok_or(Error::NonIid)?),
        ConstructionKind::ThreeHalves => three_halves_certificate(menu, dist),
    }
}

fn reproduce_command(target: &str, format: Format) -> Result<Output> {
    let targets = if target == "all" {
        Target::ALL.to_vec()
    } else {
        vec![target.parse::<Target>()?]
    };
    let runs = targets.into_iter().map(reproduce).collect::<Result<Vec<_>>>()?;
    let passed = runs.iter().all(|r| r.passed());
    let stdout = match format {
        Format::Json => pretty(&Value::Array(runs.iter().map(|r| r.to_json()).collect())),
        _ => {
            let mut s = String::new();
            for r in &runs {
                for line in r.lines() {
                    s += &line;
                    s.push('\n');
                }
            }
            let failed = runs.iter().flat_map(|r| &r.checks).filter(|c| !c.passed).count();
            let total: usize = runs.iter().map(|r| r.checks.len()).sum();
            s += &format!("{} of {total} checks passed\n", total - failed);
            s
        }
    };
    Ok(Output {
        stdout,
        code: if passed { 0 } else { 1 },
    })
}

fn er_text(report: &ErGapReport, format: Format) -> String {
    match format {
        Format::Json => pretty(&report.to_json()),
        Format::Csv => format!("{}\n{}\n", ErGapReport::CSV_HEADER, report.csv_row()),
        Format::Text => format!(
            "cap {} with {} grid points ({} for the menu search)\n\
             srev {:.6}\nbrev {:.6} at price {:.4}\ndrev {:.6} (coarse brev {:.6}, tolerance {:.4})\n\
             brev/srev {:.6}, w {:.12}\n",
            report.cap,
            report.grid_points,
            report.search_points,
            report.srev,
            report.brev,
            report.brev_price,
            report.drev,
            report.brev_coarse,
            report.drev_tolerance,
            report.brev_over_srev(),
            report.w
        ),
    }
}

fn emit(text: String, out: Option<&Path>) -> Result<Output> {
    match out {
        Some(path) => {
            fs::write(path, &text)?;
            Ok(Output::ok(format!("wrote {}\n", path.display())))
        }
        None => Ok(Output::ok(text)),
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Output> {
        run(Cli::try_parse_from(std::iter::once("mechbench").chain(args.iter().copied())).unwrap())
    }

    #[test]
    fn eval_example4() {
        let out = run_args(&["eval", "bundled:example4_menu", "bundled:example4_distribution"]).unwrap();
        assert!(out.stdout.starts_with("6293/1000 (6.293)\n"), "{}", out.stdout);
    }

    #[test]
    fn eval_example6_menu() {
        let out = run_args(&["eval", "bundled:example6_menu_eps_1_10", "bundled:example6_eps_1_10"]).unwrap();
        assert!(out.stdout.starts_with("61/25 (2.44)\n"), "{}", out.stdout);
    }

    #[test]
    fn unknown_target_is_input_error() {
        let err = run_args(&["reproduce", "example-9"]).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn symmetrize_requires_iid() {
        let err = run_args(&["construct", "symmetrize", "bundled:example6_menu_eps_1_10", "bundled:example6_eps_1_10"])
            .unwrap_err();
        assert!(matches!(err, Error::NonIid));
    }

    #[test]
    fn all_constraints() {
        assert_eq!(parse_constraints(&["all".into()]).unwrap().len(), 6);
        assert!(parse_constraints(&["convex".into()]).is_err());
    }

    #[test]
    fn missing_bundled_file() {
        assert!(read_input("bundled:nope").is_err());
    }
}
