//! Deterministic SVG 1.1 plots of two-coordinate projections.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;
use zlorenz_core::trajectory::Trajectory;

/// Colors for sheets 0, 1, 2, ...; indices wrap past the end.
pub const PALETTE: [&str; 8] = ["#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9", "#f0e442", "#000000"];
pub const UNCOLORED: &str = "#1a1a1a";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    Radius,
    Angle,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
            Axis::Radius => "radius",
            Axis::Angle => "angle",
        }
    }

    fn pick(self, s: [f64; 3]) -> f64 {
        match self {
            Axis::X => s[0],
            Axis::Y => s[1],
            Axis::Z => s[2],
            Axis::Radius => s[0].hypot(s[1]),
            Axis::Angle => s[1].atan2(s[0]),
        }
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.trim() {
            "x" => Axis::X,
            "y" => Axis::Y,
            "z" => Axis::Z,
            "radius" | "r" => Axis::Radius,
            "angle" | "phi" => Axis::Angle,
            other => return Err(format!("unknown axis {other:?}; expected x, y, z, radius or angle")),
        })
    }
}

/// Horizontal and vertical coordinates, written `h,v` (for example `x,z`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projection {
    pub horizontal: Axis,
    pub vertical: Axis,
}

impl FromStr for Projection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (h, v) = s.split_once(',').ok_or_else(|| format!("projection {s:?} must look like x,z"))?;
        let (horizontal, vertical) = (h.parse()?, v.parse()?);
        if horizontal == vertical {
            return Err(format!("projection {s:?} uses the same axis twice"));
        }
        Ok(Projection { horizontal, vertical })
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.horizontal.name(), self.vertical.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    pub stroke_width: f64,
    pub title: Option<String>,
    /// Draw the color channel with [`PALETTE`] when present.
    pub use_colors: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { width: 800, height: 600, stroke_width: 0.6, title: None, use_colors: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("nothing to render: the trajectory has no samples")]
    Empty,
    #[error("canvas {width}x{height} is too small (minimum 200x150)")]
    Canvas { width: u32, height: u32 },
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 70.0;

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    if span <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        let pad = 0.5 * (1.0 + lo.abs().max(hi.abs()) * 1e-3);
        return (lo - pad, hi + pad);
    }
    (lo - 0.04 * span, hi + 0.04 * span)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn caption(traj: &Trajectory) -> String {
    let mut parts = Vec::new();
    if let Some(spec) = &traj.meta.system {
        parts.push(match spec.fold() {
            Some(n) if spec.name() == "ln" => format!("system ln, n={n}"),
            _ => format!("system {}", spec.name()),
        });
    }
    let t = traj.times();
    parts.push(format!("{} samples, t in [{}, {}]", t.len(), tick(t[0]), tick(t[t.len() - 1])));
    if let Some(c) = &traj.meta.coloring {
        parts.push(format!("colored n={}", c.n));
    }
    parts.join("; ")
}

/// Renders the trajectory's projection. Identical inputs give identical bytes.
pub fn render_svg(traj: &Trajectory, projection: Projection, opts: &RenderOptions) -> Result<String, RenderError> {
    if traj.is_empty() {
        return Err(RenderError::Empty);
    }
    if opts.width < 200 || opts.height < 150 {
        return Err(RenderError::Canvas { width: opts.width, height: opts.height });
    }
    let view = traj.cartesian_view();
    let pts: Vec<(f64, f64)> =
        view.states().iter().map(|s| (projection.horizontal.pick(*s), projection.vertical.pick(*s))).collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let (w, h) = (f64::from(opts.width), f64::from(opts.height));
    let (pw, ph) = (w - MARGIN_LEFT - MARGIN_RIGHT, h - MARGIN_TOP - MARGIN_BOTTOM);
    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        opts.width, opts.height, opts.width, opts.height
    );
    let title = opts
        .title
        .clone()
        .unwrap_or_else(|| format!("{} vs {}", projection.vertical.name(), projection.horizontal.name()));
    let _ = writeln!(out, "<title>{}</title>", esc(&title));
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, opts.width, opts.height);
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN_LEFT:.2}" y="{MARGIN_TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#808080" stroke-width="1"/>"##
    );

    let colors = if opts.use_colors { view.colors() } else { None };
    let stroke = |i: usize| match colors {
        Some(c) => PALETTE[c[i] as usize % PALETTE.len()],
        None => UNCOLORED,
    };
    if pts.len() == 1 {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
            px(pts[0].0),
            py(pts[0].1),
            stroke(0)
        );
    } else {
        let _ = writeln!(
            out,
            r#"<g fill="none" stroke-width="{:.2}" stroke-linejoin="round" stroke-linecap="round">"#,
            opts.stroke_width
        );
        let mut start = 0;
        while start + 1 < pts.len() {
            let color = stroke(start + 1);
            let mut end = start + 1;
            while end + 1 < pts.len() && stroke(end + 1) == color {
                end += 1;
            }
            let _ = write!(out, r#"<polyline stroke="{color}" points=""#);
            for (k, p) in pts[start..=end].iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:.2},{:.2}", px(p.0), py(p.1));
            }
            out.push_str("\"/>\n");
            start = end;
        }
        out.push_str("</g>\n");
    }

    let font = r##"font-family="sans-serif" font-size="12" fill="#333333""##;
    let bottom = MARGIN_TOP + ph;
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" {font}>{}</text>"#, MARGIN_LEFT, bottom + 16.0, tick(x0));
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" {font}>{}</text>"#,
        MARGIN_LEFT + pw,
        bottom + 16.0,
        tick(x1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" {font}>{}</text>"#,
        MARGIN_LEFT - 6.0,
        bottom,
        tick(y0)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" {font}>{}</text>"#,
        MARGIN_LEFT - 6.0,
        MARGIN_TOP + 10.0,
        tick(y1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" {font}>{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        bottom + 30.0,
        projection.horizontal.name()
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})" {font}>{}</text>"#,
        MARGIN_LEFT - 40.0,
        MARGIN_TOP + ph / 2.0,
        MARGIN_LEFT - 40.0,
        MARGIN_TOP + ph / 2.0,
        projection.vertical.name()
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="15" fill="black">{}</text>"#,
        MARGIN_LEFT,
        esc(&title)
    );
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" {font}>{}</text>"#, MARGIN_LEFT, h - 14.0, esc(&caption(traj)));
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zlorenz_core::state::CoordinateKind;

    fn line() -> Trajectory {
        Trajectory::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, -1.0, 2.0], [-1.0, 0.0, 3.0]],
            CoordinateKind::Cartesian,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_and_well_formed() {
        let p = "x,z".parse().unwrap();
        let a = render_svg(&line(), p, &RenderOptions::default()).unwrap();
        let b = render_svg(&line(), p, &RenderOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml") && a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 1);
    }

    #[test]
    fn colors_split_polylines() {
        let t = line().with_colors(vec![0, 0, 1, 1]).unwrap();
        let svg = render_svg(&t, "x,y".parse().unwrap(), &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(PALETTE[0]) && svg.contains(PALETTE[1]));
    }

    #[test]
    fn degenerate_inputs() {
        let p = "x,y".parse().unwrap();
        let empty = Trajectory::new(vec![], vec![], CoordinateKind::Cartesian).unwrap();
        assert_eq!(render_svg(&empty, p, &RenderOptions::default()), Err(RenderError::Empty));
        let one = Trajectory::new(vec![0.0], vec![[1.0, 2.0, 3.0]], CoordinateKind::Cartesian).unwrap();
        assert!(render_svg(&one, p, &RenderOptions::default()).unwrap().contains("<circle"));
    }

    #[test]
    fn projection_parsing() {
        assert_eq!("radius,z".parse::<Projection>().unwrap().to_string(), "radius,z");
        assert!("x,x".parse::<Projection>().is_err());
        assert!("x".parse::<Projection>().is_err());
        assert!("x,w".parse::<Projection>().is_err());
    }
}
