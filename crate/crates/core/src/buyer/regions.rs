//! Geometry of the two-item valuation quadrant induced by a menu `(a, b, c)`.
//!
//! Each bundle's region is the set of valuations where it beats the three
//! other options under the buyer's preference order, so it is a conjunction of
//! three half-planes. Boundaries belong to the side with the higher payment.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use super::choice::{prefer, BuyerOutcome};
use crate::error::{Error, Result};
use crate::model::{Bundle, Menu, Valuation};
use crate::rational::{format_rational, int, to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MenuShape {
    /// `c < a + b`
    Submodular,
    /// `c > a + b`
    Supermodular,
    /// `c = a + b`
    Additive,
}

/// `coeffs · v >= bound`, or `>` when strict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlane {
    pub coeffs: [Rational; 2],
    pub bound: Rational,
    pub strict: bool,
}

impl HalfPlane {
    pub fn contains(&self, v: &Valuation) -> bool {
        let lhs = &self.coeffs[0] * v.value(0) + &self.coeffs[1] * v.value(1);
        if self.strict {
            lhs > self.bound
        } else {
            lhs >= self.bound
        }
    }

    fn eval_f64(&self, x: f64, y: f64) -> f64 {
        to_f64(&self.coeffs[0]) * x + to_f64(&self.coeffs[1]) * y - to_f64(&self.bound)
    }
}

#[derive(Clone, Debug)]
pub struct Region {
    pub bundle: Bundle,
    pub payment: Rational,
    pub constraints: Vec<HalfPlane>,
}

impl Region {
    pub fn contains(&self, v: &Valuation) -> bool {
        self.constraints.iter().all(|h| h.contains(v))
    }
}

#[derive(Clone, Debug)]
pub struct RegionPartition2 {
    pub menu: Menu,
    pub shape: MenuShape,
    /// Named corner points of the partition (e.g. `("a", (a, 0))`).
    pub vertices: Vec<(String, [Rational; 2])>,
    /// Regions for ∅, {1}, {2}, {1,2}.
    pub regions: Vec<Region>,
}

pub fn region_partition_2(menu: &Menu) -> Result<RegionPartition2> {
    if menu.n() != 2 {
        return Err(Error::WrongItemCount {
            expected: 2,
            found: menu.n(),
        });
    }
    let (a, b, c) = (menu.a().clone(), menu.b().clone(), menu.c().clone());
    if c < a || c < b {
        return Err(Error::NotNormalized(format!(
            "bundle price {c} is below an item price in {menu}"
        )));
    }
    let sum = &a + &b;
    let shape = match c.cmp(&sum) {
        Ordering::Less => MenuShape::Submodular,
        Ordering::Greater => MenuShape::Supermodular,
        Ordering::Equal => MenuShape::Additive,
    };
    let zero = Rational::zero();
    let mut vertices = vec![
        ("a".to_string(), [a.clone(), zero.clone()]),
        ("b".to_string(), [zero.clone(), b.clone()]),
    ];
    match shape {
        MenuShape::Submodular => {
            vertices.push(("(a, c-a)".into(), [a.clone(), &c - &a]));
            vertices.push(("(c-b, b)".into(), [&c - &b, b.clone()]));
        }
        MenuShape::Supermodular => {
            vertices.push(("(a, b)".into(), [a.clone(), b.clone()]));
            vertices.push(("(c-b, c-a)".into(), [&c - &b, &c - &a]));
        }
        MenuShape::Additive => vertices.push(("(a, b)".into(), [a.clone(), b.clone()])),
    }

    let options: Vec<(Bundle, [Rational; 2])> = (0u16..4)
        .map(|m| {
            let bundle = Bundle::from_mask(m);
            let ind = |i: usize| {
                if bundle.contains(i) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            };
            (bundle, [ind(0), ind(1)])
        })
        .collect();
    let regions = options
        .iter()
        .map(|(x, x_ind)| {
            let px = menu.price(*x).clone();
            let constraints = options
                .iter()
                .filter(|(y, _)| y != x)
                .map(|(y, y_ind)| {
                    let py = menu.price(*y).clone();
                    // At equal utility the static tie-break decides.
                    let tie = |bundle: Bundle, payment: &Rational| BuyerOutcome {
                        bundle,
                        payment: payment.clone(),
                        utility: Rational::zero(),
                    };
                    let x_wins_ties = prefer(&tie(*x, &px), &tie(*y, &py)) == Ordering::Greater;
                    HalfPlane {
                        coeffs: [&x_ind[0] - &y_ind[0], &x_ind[1] - &y_ind[1]],
                        bound: &px - &py,
                        strict: !x_wins_ties,
                    }
                })
                .collect();
            Region {
                bundle: *x,
                payment: px,
                constraints,
            }
        })
        .collect();

    Ok(RegionPartition2 {
        menu: menu.clone(),
        shape,
        vertices,
        regions,
    })
}

impl RegionPartition2 {
    /// The bundle whose region contains `v`.
    pub fn classify(&self, v: &Valuation) -> Bundle {
        self.regions
            .iter()
            .find(|r| r.contains(v))
            .map(|r| r.bundle)
            .expect("regions cover the quadrant")
    }

    /// Side length of the square drawn by the plot helpers.
    pub fn extent(&self) -> Rational {
        let m = self.menu.c().clone().max(int(1));
        m * Rational::new(5.into(), 4.into())
    }

    /// Region outline clipped to `[0, extent]^2`.
    pub fn polygon(&self, bundle: Bundle) -> Vec<[f64; 2]> {
        let e = to_f64(&self.extent());
        let mut poly = vec![[0.0, 0.0], [e, 0.0], [e, e], [0.0, e]];
        let region = &self.regions[bundle.index()];
        for h in &region.constraints {
            poly = clip(&poly, h);
            if poly.is_empty() {
                break;
            }
        }
        poly
    }

    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 400.0;
        const MARGIN: f64 = 60.0;
        let e = to_f64(&self.extent());
        let scale = SIZE / e;
        let px = |x: f64| MARGIN + x * scale;
        let py = |y: f64| MARGIN + SIZE - y * scale;
        let fills = ["#f4f4f4", "#cfe3f7", "#f7e0c8", "#d6efd0"];
        let names = ["0", "a", "b", "c"];

        let mut svg = String::new();
        let total = SIZE + 2.0 * MARGIN;
        writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}" font-family="sans-serif" font-size="14">"#
        )
        .unwrap();
        writeln!(svg, "  <title>Menu {} ({:?})</title>", self.menu, self.shape).unwrap();
        for (i, region) in self.regions.iter().enumerate() {
            let poly = self.polygon(region.bundle);
            if poly.len() < 3 {
                continue;
            }
            let points: Vec<String> = poly
                .iter()
                .map(|p| format!("{:.2},{:.2}", px(p[0]), py(p[1])))
                .collect();
            writeln!(
                svg,
                r#"  <polygon class="region" data-bundle="{}" points="{}" fill="{}" stroke="black" stroke-width="2"/>"#,
                region.bundle.key(),
                points.join(" "),
                fills[i]
            )
            .unwrap();
            let (cx, cy) = centroid(&poly);
            writeln!(
                svg,
                r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle">{} = {}</text>"#,
                px(cx),
                py(cy),
                names[i],
                format_rational(&region.payment)
            )
            .unwrap();
        }

        let (a, b, c) = (self.menu.a(), self.menu.b(), self.menu.c());
        let mut ticks = vec![
            ("a", to_f64(a), true),
            ("b", to_f64(b), false),
        ];
        if self.shape != MenuShape::Additive {
            ticks.push(("c-b", to_f64(&(c - b)), true));
            ticks.push(("c-a", to_f64(&(c - a)), false));
        }
        for (label, at, horizontal) in ticks {
            if horizontal {
                let x = px(at);
                writeln!(
                    svg,
                    r#"  <line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
                    py(0.0),
                    py(0.0) + 6.0
                )
                .unwrap();
                writeln!(
                    svg,
                    r#"  <text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                    py(0.0) + 22.0
                )
                .unwrap();
            } else {
                let y = py(at);
                writeln!(
                    svg,
                    r#"  <line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/>"#,
                    px(0.0) - 6.0,
                    px(0.0)
                )
                .unwrap();
                writeln!(
                    svg,
                    r#"  <text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                    px(0.0) - 10.0,
                    y + 5.0
                )
                .unwrap();
            }
        }
        svg.push_str("</svg>\n");
        svg
    }

    /// Character raster: `.` nothing, `1` item 1, `2` item 2, `#` both.
    pub fn to_ascii(&self, width: usize, height: usize) -> String {
        let e = self.extent();
        let mut out = String::new();
        for row in (0..height).rev() {
            for col in 0..width {
                let x = &e * Rational::new((2 * col + 1).into(), (2 * width).into());
                let y = &e * Rational::new((2 * row + 1).into(), (2 * height).into());
                let v = Valuation::new(vec![x, y]).expect("nonnegative");
                out.push(match self.classify(&v).mask() {
                    0 => '.',
                    1 => '1',
                    2 => '2',
                    _ => '#',
                });
            }
            out.push('\n');
        }
        out
    }
}

/// Sutherland-Hodgman step against one half-plane.
fn clip(poly: &[[f64; 2]], h: &HalfPlane) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let fp = h.eval_f64(p[0], p[1]);
        let fq = h.eval_f64(q[0], q[1]);
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn centroid(poly: &[[f64; 2]]) -> (f64, f64) {
    let n = poly.len() as f64;
    let (sx, sy) = poly.iter().fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
    (sx / n, sy / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buyer::buyer_choice;

    fn partition(p: &[i64]) -> RegionPartition2 {
        region_partition_2(&Menu::from_ints(2, p).unwrap()).unwrap()
    }

    #[test]
    fn shapes() {
        assert_eq!(partition(&[15, 45, 80]).shape, MenuShape::Supermodular);
        assert_eq!(partition(&[27, 70, 85]).shape, MenuShape::Submodular);
        assert_eq!(partition(&[2, 3, 5]).shape, MenuShape::Additive);
    }

    #[test]
    fn supermodular_point_agrees_with_choice() {
        let part = partition(&[15, 45, 80]);
        let v = Valuation::from_ints(&[50, 60]);
        assert_eq!(part.classify(&v), Bundle::singleton(0));
        assert_eq!(buyer_choice(&part.menu, &v).bundle, Bundle::singleton(0));
    }

    #[test]
    fn boundary_goes_to_higher_payment() {
        let part = partition(&[27, 70, 85]);
        assert_eq!(part.classify(&Valuation::from_ints(&[27, 0])), Bundle::singleton(0));
    }

    #[test]
    fn additive_partition_is_a_product_grid() {
        let part = partition(&[2, 3, 5]);
        for x in 0..6 {
            for y in 0..6 {
                let expected = Bundle::from_mask(((x >= 2) as u16) | (((y >= 3) as u16) << 1));
                assert_eq!(part.classify(&Valuation::from_ints(&[x, y])), expected, "({x},{y})");
            }
        }
    }

    #[test]
    fn rejects_unnormalized_and_wrong_dimension() {
        assert!(region_partition_2(&Menu::from_ints(2, &[5, 1, 3]).unwrap()).is_err());
        assert!(region_partition_2(&Menu::from_ints(1, &[5]).unwrap()).is_err());
    }

    #[test]
    fn svg_has_four_regions_and_tick_labels() {
        let svg = partition(&[15, 45, 80]).to_svg();
        assert_eq!(svg.matches("<polygon").count(), 4);
        for label in [">a<", ">b<", ">c-a<", ">c-b<"] {
            assert!(svg.contains(label), "{label}");
        }
        let svg = partition(&[2, 3, 5]).to_svg();
        assert!(!svg.contains(">c-a<"));
    }

    #[test]
    fn ascii_raster_corners() {
        let art = partition(&[27, 70, 85]).to_ascii(20, 10);
        let rows: Vec<&str> = art.lines().collect();
        assert_eq!(rows.len(), 10);
        assert!(rows[9].starts_with('.'));
        assert!(rows[0].ends_with('#'));
    }
}
