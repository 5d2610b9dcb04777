//! SVG pictures of Π (half-space fans) or of the fan itself (full ambient).

use std::fmt::Write;

use gammafan::polyhedra::cone::Cone;
use gammafan::polyhedra::fan::Ambient;
use gammafan::scalar::approx_rat;
use gammafan::{Error, Rat, Result, Scalar};

use crate::format::Loaded;

#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Refinement depth for the numeric placement of symbolic coordinates.
    pub depth: u32,
    pub width: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { depth: 24, width: 640.0 }
    }
}

type P3 = [f64; 3];

struct Cell {
    dim: usize,
    verts: Vec<P3>,
    dirs: Vec<P3>,
    /// Exact coordinates of a single vertex, for the label.
    label: Option<String>,
    name: Option<String>,
}

fn place(x: &Scalar, depth: u32) -> f64 {
    match x.enclose(depth) {
        Ok((lo, hi)) => approx_rat(&((lo + hi) / Rat::from_integer(2.into()))),
        Err(_) => x.approx(),
    }
}

fn pad(v: Vec<f64>) -> P3 {
    [v.first().copied().unwrap_or(0.0), v.get(1).copied().unwrap_or(0.0), v.get(2).copied().unwrap_or(0.0)]
}

fn unit(v: P3) -> P3 {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-12);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// `(-3a, 0)` from exact coordinates.
pub fn point_label(p: &[Scalar]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_text().replace('*', "")).collect();
    format!("({})", parts.join(", "))
}

fn cell_of(c: &Cone, ambient: Ambient, depth: u32) -> Option<Cell> {
    let d = c.ambient_dim();
    let mut verts = Vec::new();
    let mut dirs = Vec::new();
    let mut label = None;
    match ambient {
        Ambient::HalfSpace => {
            let n = d - 1;
            for r in c.rays() {
                let t = r[n].to_rat().expect("rational height");
                if t > Rat::from_integer(0.into()) {
                    let p: Vec<Scalar> = r[..n].iter().map(|x| x.div_rat(&t)).collect();
                    if label.is_none() {
                        label = Some(point_label(&p));
                    }
                    verts.push(pad(p.iter().map(|x| place(x, depth)).collect()));
                } else {
                    dirs.push(unit(pad(r[..n].iter().map(|x| place(x, depth)).collect())));
                }
            }
            if verts.is_empty() {
                return None;
            }
            for l in c.lines() {
                let v = unit(pad(l[..n].iter().map(|x| place(x, depth)).collect()));
                dirs.push(v);
                dirs.push([-v[0], -v[1], -v[2]]);
            }
            Some(Cell { dim: c.dim() - 1, verts, dirs, label, name: None })
        }
        Ambient::Full => {
            verts.push([0.0; 3]);
            for r in c.rays() {
                dirs.push(unit(pad(r.iter().map(|x| place(x, depth)).collect())));
            }
            for l in c.lines() {
                let v = unit(pad(l.iter().map(|x| place(x, depth)).collect()));
                dirs.push(v);
                dirs.push([-v[0], -v[1], -v[2]]);
            }
            Some(Cell { dim: c.dim(), verts, dirs, label: (c.dim() == 0).then(|| "0".to_string()), name: None })
        }
    }
}

fn hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

const PALETTE: [&str; 6] = ["#dbe9f6", "#fde4c8", "#dff2d8", "#f3d9ec", "#fff4c2", "#e3e0f3"];

/// Deterministic SVG. Planar for Π ⊂ R^1, R^2; oblique wireframe for Π ⊂ R^3.
pub fn render(l: &Loaded, opts: &RenderOptions) -> Result<String> {
    let f = &l.fan;
    let n = match f.ambient() {
        Ambient::HalfSpace => f.ambient_dim() - 1,
        Ambient::Full => f.ambient_dim(),
    };
    if n > 3 {
        return Err(Error::DimensionTooLarge(f.ambient_dim()));
    }
    let mut cells: Vec<Cell> = Vec::new();
    for c in f.cones() {
        if let Some(mut cell) = cell_of(c, f.ambient(), opts.depth) {
            cell.name = l.label_of(c).map(str::to_string);
            cells.push(cell);
        }
    }
    // Length of the drawn part of unbounded directions.
    let mut reach = 1.0f64;
    for c in &cells {
        for v in &c.verts {
            reach = reach.max(v.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        }
    }
    let reach = reach * 0.6 + 1.0;
    let proj = |p: P3| -> [f64; 2] {
        if n == 3 {
            [p[0] - 0.45 * p[2], p[1] - 0.3 * p[2]]
        } else {
            [p[0], p[1]]
        }
    };
    let shape = |c: &Cell| -> Vec<[f64; 2]> {
        let mut pts: Vec<[f64; 2]> = c.verts.iter().map(|v| proj(*v)).collect();
        for v in &c.verts {
            for d in &c.dirs {
                pts.push(proj([v[0] + reach * d[0], v[1] + reach * d[1], v[2] + reach * d[2]]));
            }
        }
        hull(pts)
    };
    let all: Vec<[f64; 2]> = cells.iter().flat_map(|c| shape(c)).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &all {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if all.is_empty() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let margin = 60.0;
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let s = (opts.width - 2.0 * margin) / span;
    let height = (y1 - y0) * s + 2.0 * margin;
    let to = |p: [f64; 2]| -> (f64, f64) { (margin + (p[0] - x0) * s, margin + (y1 - p[1]) * s) };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#,
        w = opts.width,
        h = height
    );
    if let Some(name) = &l.metadata.name {
        let _ = writeln!(out, r#"<title>{}</title>"#, escape(name));
    }
    let top = cells.iter().map(|c| c.dim).max().unwrap_or(0);
    let mut k = 0;
    for c in cells.iter().filter(|c| c.dim == 2 && n <= 2) {
        let pts: Vec<String> = shape(c).into_iter().map(|p| to(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(out, r#"<polygon points="{}" fill="{}" stroke="none"/>"#, pts.join(" "), PALETTE[k % PALETTE.len()]);
        k += 1;
    }
    for c in cells.iter().filter(|c| c.dim == 1) {
        let h = shape(c);
        if h.len() >= 2 {
            let (a, b) = (to(h[0]), to(h[h.len() - 1]));
            let dash = if c.verts.len() < 2 { r#" stroke-dasharray="4 3""# } else { "" };
            let _ = writeln!(out, r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333" stroke-width="1.5"{dash}/>"##, a.0, a.1, b.0, b.1);
        }
    }
    for c in cells.iter().filter(|c| c.dim == 0) {
        let (x, y) = to(proj(c.verts[0]));
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#000"/>"##);
        if let Some(lab) = &c.label {
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 5.0, y - 5.0, escape(lab));
        }
    }
    for c in cells.iter().filter(|c| c.dim == top && c.name.is_some()) {
        let h = shape(c);
        let m = h.len().max(1) as f64;
        let cx = h.iter().map(|p| p[0]).sum::<f64>() / m;
        let cy = h.iter().map(|p| p[1]).sum::<f64>() / m;
        let (x, y) = to([cx, cy]);
        let _ = writeln!(out, r##"<text x="{x:.2}" y="{y:.2}" fill="#225" font-style="italic" text-anchor="middle">{}</text>"##, escape(c.name.as_deref().unwrap_or("")));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use gammafan::fixtures::by_name;
    use gammafan::polyhedra::cone::int_point;
    use gammafan::polyhedra::fan::Fan;

    fn loaded(name: &str) -> Loaded {
        Loaded::from_fixture(&by_name(name, &[]).unwrap())
    }

    #[test]
    fn dart_outline_with_symbolic_labels() {
        let svg = render(&loaded("dart"), &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<line").count(), 4);
        assert_eq!(svg.matches("<circle").count(), 4);
        assert!(svg.contains("(-3a, 0)"));
        assert!(svg.contains("(a + 2b, 2a + b)"));
    }

    #[test]
    fn completion_figure_has_ten_regions() {
        let svg = render(&loaded("dart-completion"), &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 10);
        for name in ["tau1", "tau6", "rho4"] {
            assert!(svg.contains(name));
        }
    }

    #[test]
    fn deterministic() {
        let l = loaded("dart-completion");
        assert_eq!(render(&l, &RenderOptions::default()).unwrap(), render(&l, &RenderOptions::default()).unwrap());
    }

    #[test]
    fn four_dimensional_fan_is_rejected() {
        let c = Cone::from_rays(4, vec![int_point(&[1, 0, 0, 0]), int_point(&[0, 1, 0, 0])], vec![]).unwrap();
        let f = Fan::from_max(4, Ambient::Full, vec![c]).unwrap();
        let l = Loaded { fan: f, gamma: gammafan::gamma::ValueGroup::integers(), named: vec![], metadata: Default::default() };
        assert_eq!(render(&l, &RenderOptions::default()).unwrap_err(), Error::DimensionTooLarge(4));
    }

    #[test]
    fn wireframe_for_three_dimensional_complex() {
        let l = loaded("badnorm");
        assert!(render(&l, &RenderOptions::default()).is_ok());
        let g = gammafan::gamma::ValueGroup::integers();
        let m = Loaded::from_fixture(&gammafan::fixtures::model(1, 3, &Scalar::from_int(1), &g).unwrap());
        let svg = render(&m, &RenderOptions::default()).unwrap();
        assert!(!svg.contains("<polygon"));
        assert!(svg.contains("<line"));
    }
}
