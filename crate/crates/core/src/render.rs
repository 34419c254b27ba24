//! SVG diagrams of the cylinders around each new neighbourhood pair of the
//! construction, with vertical markers at the overlapping endpoints.

use std::fmt::Write as _;
use std::path::Path;

use num_traits::One;
use serde::Serialize;

use crate::arith::{AffineExpr, ParamPoint, Rational};
use crate::construction::ConstructionState;
use crate::error::{Error, Result};
use crate::ifs::{Cylinder, IfsSystem, Word};

pub const DEFAULT_SCALE: u32 = 900;
pub const DEFAULT_DECIMALS: usize = 12;

const MARGIN: i64 = 20;
const ROW_HEIGHT: i64 = 60;
const BAR_HEIGHT: i64 = 24;

#[derive(Clone, Debug, Serialize)]
pub struct DiagramRow {
    pub label: String,
    pub cylinders: Vec<Cylinder>,
}

/// Rows of cylinders plus marker positions, in original coordinates.
///
/// Plotting applies `x ↦ zoom·(x − origin)`, which maps every drawn cylinder
/// into `[0, 1]`, then multiplies by `scale` pixels.
#[derive(Clone, Debug)]
pub struct CylinderDiagram {
    pub title: String,
    pub rows: Vec<DiagramRow>,
    pub markers: Vec<AffineExpr>,
    pub origin: AffineExpr,
    pub zoom: Rational,
    pub scale: u32,
    pub decimals: usize,
    point: ParamPoint,
}

impl CylinderDiagram {
    pub fn with_scale(mut self, scale: u32) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_decimals(mut self, decimals: usize) -> Self {
        self.decimals = decimals;
        self
    }

    /// Horizontal pixel position of an exact coordinate, as an exact form.
    pub fn plot_x(&self, x: &AffineExpr) -> AffineExpr {
        let px = Rational::from_integer(self.scale.into()) * &self.zoom;
        (x - &self.origin).scale(&px).add_constant(&Rational::from_integer(MARGIN.into()))
    }

    fn coord(&self, x: &AffineExpr) -> Result<String> {
        self.point.eval_decimal(&self.plot_x(x), self.decimals)
    }

    fn length(&self, w: &Rational) -> String {
        let px = Rational::from_integer(self.scale.into()) * &self.zoom * w;
        crate::arith::format_decimal(&px, self.decimals)
    }

    pub fn to_svg(&self) -> Result<String> {
        let width = i64::from(self.scale) + 2 * MARGIN;
        let height = ROW_HEIGHT * self.rows.len() as i64 + 2 * MARGIN;
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(out, "  <title>{}</title>", escape(&self.title));
        for (r, row) in self.rows.iter().enumerate() {
            let y = MARGIN + ROW_HEIGHT * r as i64 + (ROW_HEIGHT - BAR_HEIGHT) / 2;
            let _ = writeln!(out, r#"  <g class="row" data-label="{}">"#, escape(&row.label));
            for c in &row.cylinders {
                let x = self.coord(&c.left)?;
                let w = self.length(&(&c.right - &c.left).p);
                let mid = self.coord(&midpoint(c))?;
                let _ = writeln!(
                    out,
                    r##"    <rect class="cylinder" data-word="{word}" x="{x}" y="{y}" width="{w}" height="{BAR_HEIGHT}" fill="#c6dbef" fill-opacity="0.6" stroke="#08519c"/>"##,
                    word = c.word,
                );
                let _ = writeln!(
                    out,
                    r#"    <text x="{mid}" y="{ty}" font-size="12" text-anchor="middle">{word}</text>"#,
                    ty = y + BAR_HEIGHT + 14,
                    word = c.word,
                );
            }
            let _ = writeln!(out, "  </g>");
        }
        let _ = writeln!(out, r#"  <g class="markers">"#);
        for m in &self.markers {
            let x = self.coord(m)?;
            let _ = writeln!(
                out,
                r##"    <line class="marker" x1="{x}" y1="{MARGIN}" x2="{x}" y2="{y2}" stroke="#cb181d" stroke-dasharray="4 3"/>"##,
                y2 = height - MARGIN,
            );
        }
        let _ = writeln!(out, "  </g>");
        let _ = writeln!(out, "</svg>");
        Ok(out)
    }
}

fn midpoint(c: &Cylinder) -> AffineExpr {
    (&c.left + &c.right).scale(&Rational::new(1.into(), 2.into()))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn children(sys: &IfsSystem, parent: &Word) -> Result<Vec<Cylinder>> {
    sys.symbols().map(|i| sys.cylinder(&parent.with(i))).collect()
}

/// Diagram for the new neighbourhood pair `(σ⁽ⁿ⁾, τ⁽ⁿ⁾)`.
///
/// Level 1 shows every first-level cylinder. Level `n ≥ 2` shows the
/// children of `τ⁽ⁿ⁻¹⁾` (top row) and of `σ⁽ⁿ⁻¹⁾` (bottom row). The markers
/// sit at `S_{τ⁽ⁿ⁾}(0)` and `S_{σ⁽ⁿ⁾}(1)`, the ends of the new overlap.
pub fn diagram_for_level(
    sys: &IfsSystem,
    pt: &ParamPoint,
    states: &[ConstructionState],
    level: usize,
) -> Result<CylinderDiagram> {
    let find = |n: usize| {
        states.iter().find(|s| s.level == n).ok_or(Error::LevelOutOfRange {
            requested: n,
            available: states.last().map_or(0, |s| s.level),
        })
    };
    let state = find(level)?;
    let markers = vec![sys.map_at_zero(&state.tau)?, sys.cylinder(&state.sigma)?.right];
    let (rows, origin, zoom) = if level <= 1 {
        let row = DiagramRow {
            label: "level 1".into(),
            cylinders: children(sys, &Word::empty())?,
        };
        (vec![row], AffineExpr::zero(), Rational::one())
    } else {
        let parent = find(level - 1)?;
        let rows = vec![
            DiagramRow {
                label: format!("children of {}", parent.tau),
                cylinders: children(sys, &parent.tau)?,
            },
            DiagramRow {
                label: format!("children of {}", parent.sigma),
                cylinders: children(sys, &parent.sigma)?,
            },
        ];
        // The two parents span less than two parent lengths.
        let zoom = sys.m_pow(level - 1) / Rational::from_integer(2.into());
        (rows, sys.map_at_zero(&parent.sigma)?, zoom)
    };
    Ok(CylinderDiagram {
        title: format!("level {level}: {} overlaps {}", state.sigma, state.tau),
        rows,
        markers,
        origin,
        zoom,
        scale: DEFAULT_SCALE,
        decimals: DEFAULT_DECIMALS,
        point: pt.clone(),
    })
}

pub fn emit_svg(diagram: &CylinderDiagram, path: &Path) -> Result<()> {
    let svg = diagram.to_svg()?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::construction::{run_construction, DrivingSequence};
    use crate::examples::Example;

    fn diagram(ex: Example, level: usize) -> CylinderDiagram {
        let tmpl = ex.template();
        let states = run_construction(&tmpl, &DrivingSequence::ThueMorse, level.max(2)).unwrap();
        diagram_for_level(&tmpl.system, &ex.thue_morse_point(), &states, level).unwrap()
    }

    fn count(svg: &str, tag: &str) -> usize {
        let doc = roxmltree::Document::parse(svg).unwrap();
        doc.descendants().filter(|n| n.has_tag_name(tag)).count()
    }

    #[test]
    fn level_one_structure() {
        let d = diagram(Example::One, 1);
        let svg = d.to_svg().unwrap();
        assert_eq!(count(&svg, "rect"), 3);
        assert_eq!(count(&svg, "line"), 2);
        assert_eq!(d.markers, vec![AffineExpr::param(), AffineExpr::constant(rat(1, 7))]);
    }

    #[test]
    fn level_two_structure() {
        let d = diagram(Example::One, 2);
        let svg = d.to_svg().unwrap();
        assert_eq!(count(&svg, "rect"), 6);
        assert_eq!(count(&svg, "g"), 3);
        let sys = Example::One.system();
        assert_eq!(d.markers[0], sys.map_at_zero(&"21".parse().unwrap()).unwrap());
        assert_eq!(d.markers[1], sys.cylinder(&"13".parse().unwrap()).unwrap().right);
        assert_eq!(d.rows[0].label, "children of 2");
    }

    #[test]
    fn plotted_coordinates_stay_in_frame() {
        let pt = Example::One.thue_morse_point();
        for level in 1..=6 {
            let d = diagram(Example::One, level);
            let lo = AffineExpr::constant(Rational::from_integer(MARGIN.into()));
            let hi = lo.add_constant(&Rational::from_integer(d.scale.into()));
            for c in d.rows.iter().flat_map(|r| &r.cylinders) {
                for x in [&c.left, &c.right] {
                    let px = d.plot_x(x);
                    assert!(pt.compare(&px, &lo).unwrap().is_ge() && pt.compare(&px, &hi).unwrap().is_le());
                }
            }
        }
    }

    #[test]
    fn example_two_level_one() {
        let svg = diagram(Example::Two, 1).to_svg().unwrap();
        assert_eq!(count(&svg, "rect"), 5);
        assert_eq!(count(&svg, "line"), 2);
    }

    #[test]
    fn deterministic_and_escaped() {
        let a = diagram(Example::One, 3).to_svg().unwrap();
        let b = diagram(Example::One, 3).to_svg().unwrap();
        assert_eq!(a, b);
        assert_eq!(escape(r#"<a & "b">"#), "&lt;a &amp; &quot;b&quot;&gt;");
    }

    #[test]
    fn missing_level_is_an_error() {
        let tmpl = Example::One.template();
        let states = run_construction(&tmpl, &DrivingSequence::ThueMorse, 3).unwrap();
        let err = diagram_for_level(&tmpl.system, &Example::One.thue_morse_point(), &states, 5);
        assert!(matches!(err, Err(Error::LevelOutOfRange { requested: 5, .. })));
    }
}
