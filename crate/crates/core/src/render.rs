//! Deterministic SVG output. Every coordinate is printed with three
//! decimals on a fixed viewport, so equal inputs give equal bytes.

use std::fmt::Write as _;

use crate::cantor::CantorPair;
use crate::error::{Error, Result};
use crate::ifs::LineIfs;
use crate::renorm::{thickness_window, RecurrentRegion, TwoBranch};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 40.0;
const ROW: f64 = 24.0;
const BAR: f64 = 14.0;
const PLANE_HEIGHT: f64 = 600.0;

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
}

/// One row per depth `1..=depth`, each showing the depth-`k` union of hull images.
pub fn interval_stack(ifs: &LineIfs, depth: usize, component_budget: usize) -> Result<String> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let hull = ifs.hull();
    let (lo, hi) = (hull.lo().to_f64(), hull.hi().to_f64());
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let x = |v: f64| MARGIN + (v - lo) / span * (WIDTH - 2.0 * MARGIN);
    let height = 2.0 * MARGIN + ROW * (depth + 1) as f64;
    let mut out = String::new();
    header(&mut out, WIDTH, height);
    let rows = std::iter::once(crate::interval::IntervalSet::single(hull.clone()))
        .map(Ok)
        .chain((1..=depth).map(|k| ifs.depth_union(k, component_budget)));
    for (k, row) in rows.enumerate() {
        let row = row?;
        let y = MARGIN + ROW * k as f64;
        let _ = writeln!(out, r#"<g id="depth-{k}" fill="black">"#);
        let _ = writeln!(
            out,
            r#"<text x="4" y="{:.3}" font-size="10" font-family="monospace">{k}</text>"#,
            y + BAR - 3.0
        );
        for iv in row.intervals() {
            let (a, b) = (x(iv.lo().to_f64()), x(iv.hi().to_f64()));
            let _ = writeln!(
                out,
                r#"<rect x="{a:.3}" y="{y:.3}" width="{:.3}" height="{BAR:.3}"/>"#,
                (b - a).max(0.5)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Line `t = c0 + c1·s`.
#[derive(Clone, Copy, Debug)]
struct Line(f64, f64);

impl Line {
    fn at(self, s: f64) -> f64 {
        self.0 + self.1 * s
    }
}

/// Polygon `{lower(s) < t < upper(s), s ∈ [s_a, s_b]}`, trimmed to where it is nonempty.
fn band(lower: Line, upper: Line, s_a: f64, s_b: f64) -> Option<Vec<(f64, f64)>> {
    let gap = |s: f64| upper.at(s) - lower.at(s);
    let (mut a, mut b) = (s_a, s_b);
    let slope = upper.1 - lower.1;
    if slope != 0.0 {
        let cross = (lower.0 - upper.0) / slope;
        if slope > 0.0 {
            a = a.max(cross);
        } else {
            b = b.min(cross);
        }
    } else if gap(a) <= 0.0 {
        return None;
    }
    if b <= a {
        return None;
    }
    Some(vec![(a, lower.at(a)), (b, lower.at(b)), (b, upper.at(b)), (a, upper.at(a))])
}

/// Escape region `E`, full-interval regions `F` and `G`, and `R` when given,
/// in coordinates where both hulls start at 0.
pub fn plane_regions(pair: &CantorPair, region: Option<&RecurrentRegion>) -> Result<String> {
    let k = TwoBranch::of(pair.first())?;
    let k2 = TwoBranch::of(pair.second())?;
    let (s1, s0) = thickness_window(pair)?;
    let f = |x: &crate::Scalar| x.to_f64();
    let (a, p, b, q, f1) = (f(&k.a), f(&k.p), f(&k2.a), f(&k2.p), f(&k2.e));
    let (s0, s1) = (f(&s0), f(&s1));
    let mut s_max = s0.max(1.0);
    if let Some(r) = region {
        s_max = s_max.max(f(&r.s_max));
    }
    s_max *= 1.25;
    let t_top = a * 1.25;
    let t_bottom = -b * s_max - 0.25 * a;
    let sx = |s: f64| MARGIN + s / s_max * (WIDTH - 2.0 * MARGIN);
    let ty = |t: f64| MARGIN + (t_top - t) / (t_top - t_bottom) * (PLANE_HEIGHT - 2.0 * MARGIN);

    let mut layers: Vec<(&str, &str, Option<Vec<(f64, f64)>>)> = vec![
        ("E-upper", "#d9d9d9", band(Line(a, 0.0), Line(t_top, 0.0), 0.0, s_max)),
        ("E-lower", "#d9d9d9", band(Line(t_bottom, 0.0), Line(0.0, -b), 0.0, s_max)),
        ("F", "#9ecae1", band(Line(a, f1 / q), Line(0.0, -b / q), s0, s_max)),
        ("G", "#a1d99b", band(Line(a / p, 0.0), Line(a - a / p, -b), 0.0, s1)),
    ];
    if let Some(r) = region {
        let d = f(&r.delta);
        layers.push((
            "R",
            "#fdae6b",
            band(Line(d, -f(&r.b)), Line(f(&r.a) - d, 0.0), f(&r.s_min), f(&r.s_max)),
        ));
    }

    let mut out = String::new();
    header(&mut out, WIDTH, PLANE_HEIGHT);
    let _ = writeln!(
        out,
        r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#000000"/>"##,
        sx(0.0),
        ty(0.0),
        sx(s_max),
        ty(0.0)
    );
    for (name, colour, poly) in layers {
        let Some(poly) = poly else { continue };
        let pts: Vec<String> = poly.iter().map(|&(s, t)| format!("{:.3},{:.3}", sx(s), ty(t))).collect();
        let _ = writeln!(
            out,
            r#"<polygon id="{name}" points="{}" fill="{colour}" fill-opacity="0.7" stroke="black" stroke-width="0.5"/>"#,
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::generate_ifs;
    use crate::renorm::build_recurrent_set;
    use crate::Scalar;

    fn balanced(svg: &str) -> bool {
        svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>") && svg.matches("<g ").count() == svg.matches("</g>").count()
    }

    #[test]
    fn stack_is_byte_stable() {
        let pair = CantorPair::golden();
        let ifs = generate_ifs(&pair, &(Scalar::from_int(2) / Scalar::generator(pair.field().unwrap()))).unwrap();
        let a = interval_stack(&ifs, 3, 1 << 20).unwrap();
        let b = interval_stack(&ifs, 3, 1 << 20).unwrap();
        assert_eq!(a, b);
        assert!(balanced(&a));
        assert_eq!(a.matches("<g ").count(), 4);
    }

    #[test]
    fn tiling_rows_are_single_bars() {
        let pair = CantorPair::middle_rational((1, 3), (1, 3));
        let ifs = generate_ifs(&pair, &Scalar::one()).unwrap();
        let svg = interval_stack(&ifs, 2, 1000).unwrap();
        assert_eq!(svg.matches("<rect x=\"40.000\"").count(), 3);
        assert!(interval_stack(&ifs, 0, 1000).is_err());
    }

    #[test]
    fn plane_has_all_regions() {
        let pair = CantorPair::middle_rational((2, 5), (2, 5));
        let r = build_recurrent_set(&pair).unwrap();
        let svg = plane_regions(&pair, Some(&r)).unwrap();
        for id in ["E-upper", "E-lower", "F", "G", "R"] {
            assert!(svg.contains(&format!("id=\"{id}\"")), "{id} missing");
        }
        assert_eq!(svg, plane_regions(&pair, Some(&r)).unwrap());
        assert!(balanced(&svg));
    }

    #[test]
    fn band_trims_to_nonempty_part() {
        let p = band(Line(0.0, 1.0), Line(1.0, 0.0), 0.0, 3.0).unwrap();
        assert_eq!(p[1].0, 1.0);
        assert!(band(Line(1.0, 0.0), Line(0.0, 0.0), 0.0, 1.0).is_none());
    }
}
