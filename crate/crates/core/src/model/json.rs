//! JSON forms of distributions and menus.
//!
//! Distributions:
//!
//! ```json
//! {"items": 2, "kind": "product", "marginals": [[["1", "1/2"], ["3", "1/2"]], [["2", "1"]]]}
//! {"items": 2, "kind": "joint", "atoms": [{"values": ["4", "0"], "prob": "49/100"}, ...]}
//! ```
//!
//! Menus use comma-joined, sorted, 1-based bundle keys:
//!
//! ```json
//! {"items": 2, "prices": {"1": "4", "2": "4", "1,2": "100"}}
//! ```
//!
//! Rationals are strings (`"p/q"` or decimal) or JSON numbers; all convert
//! exactly.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::bundle::{canonical_bundles, MAX_ITEMS};
use super::distribution::{product, JointDistribution, SingleItemDistribution, Valuation};
use super::menu::Menu;
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

pub(crate) fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

pub(crate) fn rational_at(value: &Value, location: &str) -> Result<Rational> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => {
            return Err(Error::parse(
                location,
                format!("expected a rational, found {other}"),
            ))
        }
    };
    parse_rational(&text).map_err(|_| Error::parse(location, format!("invalid rational {text:?}")))
}

pub(crate) fn field<'a>(obj: &'a Value, key: &str, location: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(location, format!("missing field {key:?}")))
}

pub(crate) fn array<'a>(value: &'a Value, location: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::parse(location, "expected an array"))
}

pub(crate) fn item_count(obj: &Value) -> Result<usize> {
    let n = field(obj, "items", "$")?
        .as_u64()
        .ok_or_else(|| Error::parse("$.items", "expected a positive integer"))? as usize;
    if n == 0 || n > MAX_ITEMS {
        return Err(Error::ItemCount(n));
    }
    Ok(n)
}

/// Tags a validation error with the JSON path it came from.
fn at(location: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Mass { .. } | Error::EmptySupport => e,
        other => Error::parse(location, other.to_string()),
    }
}

pub fn parse_distribution(text: &str) -> Result<JointDistribution> {
    let root = parse_json(text)?;
    let n = item_count(&root)?;
    let kind = field(&root, "kind", "$")?
        .as_str()
        .ok_or_else(|| Error::parse("$.kind", "expected a string"))?;
    match kind {
        "product" => {
            let marginals = array(field(&root, "marginals", "$")?, "$.marginals")?;
            if marginals.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: marginals.len(),
                });
            }
            let mut parts = Vec::with_capacity(n);
            for (i, marginal) in marginals.iter().enumerate() {
                let loc = format!("$.marginals[{i}]");
                let mut atoms = Vec::new();
                for (j, pair) in array(marginal, &loc)?.iter().enumerate() {
                    let loc = format!("{loc}[{j}]");
                    let pair = array(pair, &loc)?;
                    if pair.len() != 2 {
                        return Err(Error::parse(loc, "expected [value, prob]"));
                    }
                    atoms.push((
                        rational_at(&pair[0], &format!("{loc}[0]"))?,
                        rational_at(&pair[1], &format!("{loc}[1]"))?,
                    ));
                }
                parts.push(SingleItemDistribution::new(atoms).map_err(at(loc))?);
            }
            product(&parts)
        }
        "joint" => {
            let atoms_json = array(field(&root, "atoms", "$")?, "$.atoms")?;
            let mut atoms = Vec::with_capacity(atoms_json.len());
            for (j, atom) in atoms_json.iter().enumerate() {
                let loc = format!("$.atoms[{j}]");
                let values = array(field(atom, "values", &loc)?, &format!("{loc}.values"))?;
                if values.len() != n {
                    return Err(Error::parse(
                        format!("{loc}.values"),
                        format!("expected {n} values, found {}", values.len()),
                    ));
                }
                let values = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| rational_at(v, &format!("{loc}.values[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let prob = rational_at(field(atom, "prob", &loc)?, &format!("{loc}.prob"))?;
                atoms.push((Valuation::new(values).map_err(at(loc))?, prob));
            }
            JointDistribution::new(n, atoms).map_err(at("$.atoms".into()))
        }
        other => Err(Error::parse(
            "$.kind",
            format!("expected \"product\" or \"joint\", found {other:?}"),
        )),
    }
}

/// Joint form with canonical atom order; parsing it back yields an equal
/// distribution.
pub fn distribution_to_json(dist: &JointDistribution) -> Value {
    let atoms: Vec<Value> = dist
        .atoms()
        .iter()
        .map(|(v, p)| {
            json!({
                "values": v.values().iter().map(format_rational).collect::<Vec<_>>(),
                "prob": format_rational(p),
            })
        })
        .collect();
    json!({"items": dist.n(), "kind": "joint", "atoms": atoms})
}

pub fn product_to_json(parts: &[SingleItemDistribution]) -> Value {
    let marginals: Vec<Value> = parts
        .iter()
        .map(|part| {
            Value::Array(
                part.atoms()
                    .iter()
                    .map(|(v, p)| json!([format_rational(v), format_rational(p)]))
                    .collect(),
            )
        })
        .collect();
    json!({"items": parts.len(), "kind": "product", "marginals": marginals})
}

pub fn parse_menu(text: &str) -> Result<Menu> {
    let root = parse_json(text)?;
    let n = item_count(&root)?;
    let prices = field(&root, "prices", "$")?
        .as_object()
        .ok_or_else(|| Error::parse("$.prices", "expected an object"))?;
    let bundles = canonical_bundles(n);
    let mut by_key: BTreeMap<String, Rational> = BTreeMap::new();
    for (key, value) in prices {
        let normalized = normalize_key(key, n)
            .ok_or_else(|| Error::parse(format!("$.prices.{key:?}"), "invalid bundle key"))?;
        let price = rational_at(value, &format!("$.prices.{key:?}"))?;
        if by_key.insert(normalized, price).is_some() {
            return Err(Error::parse(format!("$.prices.{key:?}"), "duplicate bundle"));
        }
    }
    let mut ordered = Vec::with_capacity(bundles.len());
    for bundle in bundles {
        let price = by_key
            .remove(&bundle.key())
            .ok_or_else(|| Error::parse("$.prices", format!("missing bundle {:?}", bundle.key())))?;
        ordered.push(price);
    }
    Menu::new(n, ordered).map_err(at("$.prices".into()))
}

fn normalize_key(key: &str, n: usize) -> Option<String> {
    let mut items: Vec<usize> = key
        .split(',')
        .map(|s| s.trim().parse::<usize>().ok().filter(|&i| i >= 1 && i <= n))
        .collect::<Option<_>>()?;
    items.sort_unstable();
    items.dedup();
    Some(
        items
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    )
}

pub fn menu_to_json(menu: &Menu) -> Value {
    let mut prices = Map::new();
    for bundle in canonical_bundles(menu.n()) {
        prices.insert(bundle.key(), Value::String(format_rational(menu.price(bundle))));
    }
    json!({"items": menu.n(), "prices": prices})
}
