//! SVG drawings of the sampled curve and 16-bit PGM rasters of complex slices.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limit_set::{LimitSetApprox, LineIndex};
use crate::linalg::{self, C3, V3};
use crate::marked_box::MarkedBox;

pub const SVG_SIZE: f64 = 800.0;

/// Affine window `xmin:xmax:ymin:ymax` in the chart z = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl View {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let ok = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) && xmin < xmax && ymin < ymax;
        if !ok {
            return Err(Error::Parse(format!("bad view {xmin}:{xmax}:{ymin}:{ymax}")));
        }
        Ok(View { xmin, xmax, ymin, ymax })
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.xmin) / (self.xmax - self.xmin) * SVG_SIZE,
            (self.ymax - y) / (self.ymax - self.ymin) * SVG_SIZE,
        )
    }
}

impl std::str::FromStr for View {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad view {s:?}"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [a, b, c, d] => View::new(a, b, c, d),
            _ => Err(Error::Parse(format!("view needs four numbers: {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Drawing<'a> {
    pub curve: Option<&'a LimitSetApprox>,
    pub lines: Option<&'a LimitSetApprox>,
    /// Upper bound on the number of line segments drawn (evenly strided).
    pub max_lines: usize,
    pub boxes: &'a [MarkedBox],
}

fn affine(v: &V3) -> Option<(f64, f64)> {
    (v[2].abs() > 1e-12 * linalg::norm(v)).then(|| (v[0] / v[2], v[1] / v[2]))
}

/// Segment of the line ax + by + c = 0 inside the view, if any.
fn clip_line(l: &V3, view: &View) -> Option<((f64, f64), (f64, f64))> {
    let [a, b, c] = *l;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    if b.abs() > 1e-15 {
        for x in [view.xmin, view.xmax] {
            let y = -(a * x + c) / b;
            if y >= view.ymin && y <= view.ymax {
                pts.push((x, y));
            }
        }
    }
    if a.abs() > 1e-15 {
        for y in [view.ymin, view.ymax] {
            let x = -(b * y + c) / a;
            if x >= view.xmin && x <= view.xmax {
                pts.push((x, y));
            }
        }
    }
    let first = *pts.first()?;
    let far = pts.iter().copied().max_by(|p, q| {
        let dp = (p.0 - first.0).hypot(p.1 - first.1);
        let dq = (q.0 - first.0).hypot(q.1 - first.1);
        dp.total_cmp(&dq)
    })?;
    ((far.0 - first.0).hypot(far.1 - first.1) > 0.0).then_some((first, far))
}

/// Standalone SVG. Curve samples are joined in parameter order, one polyline
/// per run of consecutive samples inside the view.
pub fn svg(drawing: &Drawing<'_>, view: &View) -> String {
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SVG_SIZE
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for bx in drawing.boxes {
        let pts: Vec<String> = [&bx.p, &bx.q, &bx.r, &bx.s]
            .iter()
            .filter_map(|p| p.to_real().and_then(|v| affine(&v)))
            .map(|(x, y)| {
                let (u, v) = view.px(x, y);
                format!("{u:.3},{v:.3}")
            })
            .collect();
        if pts.len() == 4 {
            let _ = writeln!(out, r#"<polygon points="{}" fill="none" stroke="gray" stroke-width="0.5"/>"#, pts.join(" "));
        }
    }
    if let Some(a) = drawing.lines {
        let stride = a.lines.len().div_ceil(drawing.max_lines.max(1)).max(1);
        for s in a.lines.iter().step_by(stride) {
            if let Some(((x0, y0), (x1, y1))) = clip_line(&s.line, view) {
                let (u0, v0) = view.px(x0, y0);
                let (u1, v1) = view.px(x1, y1);
                let _ = writeln!(
                    out,
                    r#"<line x1="{u0:.3}" y1="{v0:.3}" x2="{u1:.3}" y2="{v1:.3}" stroke="steelblue" stroke-width="0.3"/>"#
                );
            }
        }
    }
    if let Some(a) = drawing.curve {
        for run in curve_runs(a, view) {
            let pts: Vec<String> = run
                .iter()
                .map(|&(x, y)| {
                    let (u, v) = view.px(x, y);
                    format!("{u:.3},{v:.3}")
                })
                .collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1"/>"#, pts.join(" "));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Maximal runs of consecutive in-view samples within one translate, with at
/// least two points each.
pub fn curve_runs(a: &LimitSetApprox, view: &View) -> Vec<Vec<(f64, f64)>> {
    let mut runs = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    let mut last_translate = u32::MAX;
    for s in &a.curve {
        if s.param.translate != last_translate {
            if current.len() >= 2 {
                runs.push(std::mem::take(&mut current));
            }
            current.clear();
            last_translate = s.param.translate;
        }
        match affine(&s.point).filter(|&(x, y)| view.contains(x, y)) {
            Some(p) => current.push(p),
            None => {
                if current.len() >= 2 {
                    runs.push(std::mem::take(&mut current));
                }
                current.clear();
            }
        }
    }
    if current.len() >= 2 {
        runs.push(current);
    }
    runs
}

/// Complex line through `base` in direction `dir`: w ↦ [base + w·dir].
#[derive(Debug, Clone)]
pub struct SliceSpec {
    pub base: C3,
    pub dir: C3,
    /// (re_min, re_max, im_min, im_max) of the parameter w.
    pub window: (f64, f64, f64, f64),
}

impl SliceSpec {
    pub fn new(base: C3, dir: C3, window: (f64, f64, f64, f64)) -> Result<Self> {
        let nb = linalg::cnorm(&base);
        let nd = linalg::cnorm(&dir);
        if nb == 0.0 || nd == 0.0 || linalg::cnorm(&linalg::ccross(&base, &dir)) <= 1e-12 * nb * nd {
            return Err(Error::EqualPoints);
        }
        let (a, b, c, d) = window;
        if !(a < b && c < d) || ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::Parse("bad slice window".into()));
        }
        Ok(SliceSpec { base, dir, window })
    }

    /// Point at row r, column c of an n×n grid; the top-left pixel sits at
    /// the corner (re_min, im_max).
    pub fn point(&self, r: usize, c: usize, n: usize) -> C3 {
        let (a, b, lo, hi) = self.window;
        let step = |k: usize| if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
        let w = Complex64::new(a + step(c) * (b - a), hi - step(r) * (hi - lo));
        std::array::from_fn(|k| self.base[k] + w * self.dir[k])
    }
}

/// Kulkarni distances on the grid, row-major.
pub fn slice_values(lines: &LineIndex, spec: &SliceSpec, n: usize) -> Vec<f64> {
    (0..n)
        .into_par_iter()
        .flat_map_iter(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| lines.min_distance(&spec.point(r, c, n)))
        .collect()
}

/// Binary 16-bit PGM with value round(65535·min(d/(π/2), 1)).
pub fn pgm(values: &[f64], n: usize, comments: &[String]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 2 + 128);
    out.extend_from_slice(b"P5\n");
    for c in comments {
        out.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    out.extend_from_slice(format!("{n} {n}\n65535\n").as_bytes());
    for d in values {
        let v = (d / std::f64::consts::FRAC_PI_2).clamp(0.0, 1.0);
        out.extend_from_slice(&((v * 65535.0).round() as u16).to_be_bytes());
    }
    out
}
