//! Deterministic SVG rendering of region and pseudospectrum pictures.
//!
//! Elements are written in a fixed order: background, heat cells, wedge,
//! exclusion discs, lattice markers. Coordinates are printed with three
//! decimals so repeated renders are byte-identical.

use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64 as C64;

const WIDTH: f64 = 600.0;
const MARKER_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

/// One heat cell centred at `(re, im)`; `value` is `log10` of a norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub re: f64,
    pub im: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub frame: Frame,
    /// Cells on an `nx × ny` grid spanning the frame.
    pub cells: Vec<Cell>,
    pub grid: (usize, usize),
    /// Half-annulus `{r_in <= |z| <= r_out, Re z >= 0}`.
    pub wedge: Option<(f64, f64)>,
    pub disc_radius: f64,
    /// Lattice points; each gets a disc of `disc_radius` and a marker.
    pub points: Vec<C64>,
}

impl Figure {
    pub fn empty(frame: Frame) -> Self {
        Self {
            frame,
            cells: Vec::new(),
            grid: (0, 0),
            wedge: None,
            disc_radius: 0.0,
            points: Vec::new(),
        }
    }
}

struct Map {
    scale: f64,
    frame: Frame,
    height: f64,
}

impl Map {
    fn new(frame: Frame) -> Self {
        let span_x = (frame.re_max - frame.re_min).max(f64::MIN_POSITIVE);
        let span_y = (frame.im_max - frame.im_min).max(f64::MIN_POSITIVE);
        let scale = WIDTH / span_x;
        Self {
            scale,
            frame,
            height: (span_y * scale).clamp(1.0, 4.0 * WIDTH),
        }
    }

    fn x(&self, re: f64) -> f64 {
        (re - self.frame.re_min) * self.scale
    }

    fn y(&self, im: f64) -> f64 {
        self.height - (im - self.frame.im_min) * self.scale
    }
}

/// Grey level for a cell: larger values are darker, infinite is black.
pub fn shade(value: f64, lo: f64, hi: f64) -> u8 {
    if value.is_infinite() && value > 0.0 {
        return 0;
    }
    if !value.is_finite() || hi <= lo {
        return 128;
    }
    let t = ((value - lo) / (hi - lo)).clamp(0.0, 1.0);
    (255.0 * (1.0 - t)).round() as u8
}

pub fn render(fig: &Figure) -> String {
    let m = Map::new(fig.frame);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.3}" height="{:.3}" viewBox="0 0 {:.3} {:.3}">"#,
        WIDTH, m.height, WIDTH, m.height
    );
    let _ = writeln!(
        s,
        r#"<rect class="background" x="0" y="0" width="{WIDTH:.3}" height="{:.3}" fill="white"/>"#,
        m.height
    );

    if !fig.cells.is_empty() {
        let finite = fig.cells.iter().map(|c| c.value).filter(|v| v.is_finite());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let (nx, ny) = fig.grid;
        let step = |n: usize, span: f64| if n > 1 { span / (n - 1) as f64 } else { span };
        let w = step(nx, fig.frame.re_max - fig.frame.re_min) * m.scale;
        let h = step(ny, fig.frame.im_max - fig.frame.im_min) * m.scale;
        for c in &fig.cells {
            let g = shade(c.value, lo, hi);
            let _ = writeln!(
                s,
                r#"<rect class="cell" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="rgb({g},{g},{g})"/>"#,
                m.x(c.re) - w / 2.0,
                m.y(c.im) - h / 2.0,
                w,
                h
            );
        }
    }

    if let Some((r_in, r_out)) = fig.wedge {
        let pt = |r: f64, th: f64| (m.x(r * th.cos()), m.y(r * th.sin()));
        let (ax, ay) = pt(r_out, -PI / 2.0);
        let (bx, by) = pt(r_out, PI / 2.0);
        let (cx, cy) = pt(r_in, PI / 2.0);
        let (dx, dy) = pt(r_in, -PI / 2.0);
        let (ro, ri) = (r_out * m.scale, r_in * m.scale);
        let _ = writeln!(
            s,
            r#"<path class="wedge" d="M {ax:.3} {ay:.3} A {ro:.3} {ro:.3} 0 0 0 {bx:.3} {by:.3} L {cx:.3} {cy:.3} A {ri:.3} {ri:.3} 0 0 1 {dx:.3} {dy:.3} Z" fill="lightgrey" stroke="black" stroke-dasharray="6 4"/>"#
        );
    }

    let rd = fig.disc_radius * m.scale;
    for p in fig.points.iter().filter(|_| fig.disc_radius > 0.0) {
        let _ = writeln!(
            s,
            r#"<circle class="disc" cx="{:.3}" cy="{:.3}" r="{rd:.3}" fill="white" stroke="black"/>"#,
            m.x(p.re),
            m.y(p.im)
        );
    }
    for p in &fig.points {
        let _ = writeln!(
            s,
            r#"<circle class="marker" cx="{:.3}" cy="{:.3}" r="{MARKER_RADIUS:.3}" fill="black"/>"#,
            m.x(p.re),
            m.y(p.im)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Frame {
        Frame {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
        }
    }

    #[test]
    fn empty_figure_is_a_blank_canvas() {
        let s = render(&Figure::empty(frame()));
        assert!(s.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(s.ends_with("</svg>\n"));
        assert_eq!(s.lines().count(), 3);
    }

    #[test]
    fn one_disc_and_marker_per_point() {
        let fig = Figure {
            wedge: Some((0.1, 0.9)),
            disc_radius: 0.05,
            points: vec![C64::new(0.5, 0.1), C64::new(0.3, -0.2)],
            ..Figure::empty(frame())
        };
        let s = render(&fig);
        assert_eq!(s.matches(r#"class="disc""#).count(), 2);
        assert_eq!(s.matches(r#"class="marker""#).count(), 2);
        assert_eq!(s.matches(r#"class="wedge""#).count(), 1);
        assert_eq!(s, render(&fig));
    }

    #[test]
    fn shading_darkens_with_value() {
        let levels: Vec<u8> = [0.0, 0.5, 1.0, 2.0, f64::INFINITY]
            .iter()
            .map(|&v| shade(v, 0.0, 2.0))
            .collect();
        assert!(levels.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(levels[0], 255);
        assert_eq!(levels[4], 0);
    }
}
