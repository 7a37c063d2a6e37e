use serde_json::{json, Value};

use super::{search_with, CandidateGrid, SearchConstraint, SearchOptions, SearchResult};
use crate::error::Result;
use crate::model::{menu_to_json, JointDistribution};
use crate::rational::{decimal_string, format_rational, Rational};

/// Optimal revenues of one instance under the standard constraint classes.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub drev: SearchResult,
    pub srev: SearchResult,
    pub brev: SearchResult,
    pub smdrev: SearchResult,
    pub symdrev: SearchResult,
    pub ratios: Vec<Ratio>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ratio {
    pub name: String,
    /// `None` when the denominator is zero.
    pub value: Option<Rational>,
}

impl Ratio {
    fn of(name: &str, num: &Rational, den: &Rational) -> Self {
        let value = (*den != Rational::from_integer(0.into())).then(|| num / den);
        Ratio {
            name: name.to_string(),
            value,
        }
    }
}

pub fn gap_report(
    dist: &JointDistribution,
    grid: &CandidateGrid,
    options: SearchOptions,
) -> Result<GapReport> {
    let run = |c| search_with(dist, c, grid, options);
    let drev = run(SearchConstraint::Unrestricted)?;
    let srev = run(SearchConstraint::Additive)?;
    let brev = run(SearchConstraint::BundleOnly)?;
    let smdrev = run(SearchConstraint::Submodular)?;
    let symdrev = run(SearchConstraint::Symmetric)?;
    let ratios = vec![
        Ratio::of("drev/srev", &drev.revenue, &srev.revenue),
        Ratio::of("drev/brev", &drev.revenue, &brev.revenue),
        Ratio::of("drev/smdrev", &drev.revenue, &smdrev.revenue),
        Ratio::of("drev/symdrev", &drev.revenue, &symdrev.revenue),
        Ratio::of("smdrev/srev", &smdrev.revenue, &srev.revenue),
        Ratio::of("brev/srev", &brev.revenue, &srev.revenue),
    ];
    Ok(GapReport {
        drev,
        srev,
        brev,
        smdrev,
        symdrev,
        ratios,
    })
}

impl GapReport {
    pub fn results(&self) -> [(&'static str, &SearchResult); 5] {
        [
            ("drev", &self.drev),
            ("srev", &self.srev),
            ("brev", &self.brev),
            ("smdrev", &self.smdrev),
            ("symdrev", &self.symdrev),
        ]
    }

    pub fn to_json(&self) -> Value {
        let mut out = serde_json::Map::new();
        for (name, r) in self.results() {
            out.insert(name.into(), r.to_json());
        }
        let ratios: Vec<Value> = self
            .ratios
            .iter()
            .map(|r| match &r.value {
                Some(v) => json!({"name": r.name, "exact": format_rational(v), "decimal": decimal_string(v)}),
                None => json!({"name": r.name, "exact": null, "decimal": null}),
            })
            .collect();
        out.insert("ratios".into(), Value::Array(ratios));
        Value::Object(out)
    }
}

impl SearchResult {
    pub fn to_json(&self) -> Value {
        json!({
            "constraint": self.constraint.name(),
            "grid": self.grid.name(),
            "menu": menu_to_json(&self.best),
            "revenue": format_rational(&self.revenue),
            "decimal": decimal_string(&self.revenue),
            "examined": self.examined,
            "wall_ms": self.elapsed.as_millis() as u64,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},\"{}\",{},{},{},{}",
            self.constraint,
            self.best,
            format_rational(&self.revenue),
            decimal_string(&self.revenue),
            self.examined,
            self.elapsed.as_millis()
        )
    }
}

pub const CSV_HEADER: &str = "constraint,menu,revenue,decimal,examined,wall_ms";

pub fn results_to_csv(results: &[SearchResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
