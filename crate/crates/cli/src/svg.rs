//! Self-contained SVG figures: the singular curves in the half
//! cross-section, and the partition raster with its separating curves.

use std::fmt::Write;

use orthocusp::classify::Wt;
use orthocusp::features::FeatureReport;
use orthocusp::surfaces::SurfaceId;
use orthocusp::sweep::{boundary_overlay, PartitionRaster};
use orthocusp::trace::Branch;

use crate::format::sig;

/// Fixed colour per topology, colour-blind friendly order.
pub const PALETTE: [(Wt, &str); 9] = [
    (Wt::WT1, "#e69f00"),
    (Wt::WT2, "#56b4e9"),
    (Wt::WT3, "#009e73"),
    (Wt::WT4, "#f0e442"),
    (Wt::WT5, "#0072b2"),
    (Wt::WT6, "#d55e00"),
    (Wt::WT7, "#cc79a7"),
    (Wt::WT8, "#999999"),
    (Wt::WT9, "#882255"),
];

pub fn color(wt: Wt) -> &'static str {
    PALETTE[wt.index() - 1].1
}

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 48.0;

/// Affine map from data coordinates to SVG pixels, `y` pointing up.
struct Frame {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
    height: f64,
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64), plot_w: f64, plot_h: f64) -> Self {
        Self {
            x0: x.0,
            y0: y.0,
            sx: plot_w / (x.1 - x.0),
            sy: plot_h / (y.1 - y.0),
            height: plot_h + 2.0 * MARGIN,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * self.sx
    }

    fn py(&self, y: f64) -> f64 {
        self.height - MARGIN - (y - self.y0) * self.sy
    }
}

fn num(x: f64) -> String {
    sig(x, 6)
}

fn header(out: &mut String, width: f64, height: f64) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = num(width),
        h = num(height)
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    )
    .unwrap();
}

/// WS1/WS2 images with cusps (circles) and nodes (crosses).
pub fn boundary_svg(report: &FeatureReport) -> String {
    let mut max_rho: f64 = 0.0;
    let mut max_z: f64 = 0.0;
    for c in &report.curves {
        for p in &c.image {
            max_rho = max_rho.max(p.rho);
            max_z = max_z.max(p.z.abs());
        }
    }
    let (max_rho, max_z) = (1.05 * max_rho.max(1e-9), 1.05 * max_z.max(1e-9));
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = plot_w * (2.0 * max_z) / max_rho;
    let f = Frame::new((0.0, max_rho), (-max_z, max_z), plot_w, plot_h);
    let mut out = String::new();
    header(&mut out, WIDTH, f.height);

    // axes: ρ horizontal through z = 0, z vertical at ρ = 0
    writeln!(
        out,
        r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#000000" stroke-width="0.5"/>"##,
        num(f.px(0.0)),
        num(f.px(max_rho)),
        y = num(f.py(0.0))
    )
    .unwrap();
    writeln!(
        out,
        r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#000000" stroke-width="0.5"/>"##,
        num(f.py(-max_z)),
        num(f.py(max_z)),
        x = num(f.px(0.0))
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}">rho</text>"#,
        num(f.px(max_rho) - 24.0),
        num(f.py(0.0) - 6.0)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}">z</text>"#,
        num(f.px(0.0) + 6.0),
        num(f.py(max_z) + 12.0)
    )
    .unwrap();

    for curve in &report.curves {
        let (class, stroke) = match curve.branch {
            Branch::S1 => ("ws1", "#d55e00"),
            Branch::S2 => ("ws2", "#0072b2"),
            // the singular lines map to isolated points, drawn below
            _ => continue,
        };
        let mut d = String::new();
        for (k, p) in curve.image.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            write!(d, "{cmd}{} {} ", num(f.px(p.rho)), num(f.py(p.z))).unwrap();
        }
        d.push('Z');
        writeln!(
            out,
            r#"<path class="{class}" d="{d}" fill="none" stroke="{stroke}" stroke-width="1.2"/>"#
        )
        .unwrap();
    }
    for p in &report.isolated_points {
        writeln!(
            out,
            r##"<rect class="isolated" x="{}" y="{}" width="6" height="6" fill="#000000"/>"##,
            num(f.px(p.rho) - 3.0),
            num(f.py(p.z) - 3.0)
        )
        .unwrap();
    }
    for c in &report.cusps {
        writeln!(
            out,
            r##"<circle class="cusp" cx="{}" cy="{}" r="4" fill="none" stroke="#000000" stroke-width="1.5"/>"##,
            num(f.px(c.location.rho)),
            num(f.py(c.location.z))
        )
        .unwrap();
    }
    for n in &report.nodes {
        let (x, y) = (f.px(n.location.rho), f.py(n.location.z));
        writeln!(
            out,
            r##"<path class="node" d="M{} {} L{} {} M{} {} L{} {}" stroke="#000000" stroke-width="1.5"/>"##,
            num(x - 4.0),
            num(y - 4.0),
            num(x + 4.0),
            num(y + 4.0),
            num(x - 4.0),
            num(y + 4.0),
            num(x + 4.0),
            num(y - 4.0)
        )
        .unwrap();
    }
    let legend_y = f.height - 14.0;
    writeln!(
        out,
        r##"<text x="{MARGIN}" y="{}"><tspan fill="#d55e00">WS1 internal</tspan>  <tspan fill="#0072b2">WS2 external</tspan>  o cusp ({})  x node ({})</text>"##,
        num(legend_y),
        report.cusps.len(),
        report.nodes.len()
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

/// Partition raster with run-length rows, separating curves and a legend.
pub fn sweep_svg(raster: &PartitionRaster) -> String {
    let c = &raster.config;
    let plot = WIDTH - 2.0 * MARGIN;
    let legend_w = 110.0;
    let f = Frame::new(c.d3_range, c.d4_range, plot, plot);
    let mut out = String::new();
    header(&mut out, WIDTH + legend_w, f.height);

    let cw = plot / c.n_d3 as f64;
    let ch = plot / c.n_d4 as f64;
    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for j in 0..c.n_d4 {
        let y = f.height - MARGIN - (j + 1) as f64 * ch;
        let mut i = 0;
        while i < c.n_d3 {
            let wt = raster.get(i, j).wt;
            let start = i;
            while i < c.n_d3 && raster.get(i, j).wt == wt {
                i += 1;
            }
            writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                num(MARGIN + start as f64 * cw),
                num(y),
                num((i - start) as f64 * cw + 0.05),
                num(ch + 0.05),
                color(wt)
            )
            .unwrap();
        }
    }

    out.push_str("</g>\n");

    let overlay = boundary_overlay(c.r2, c.d3_range, 600).expect("valid range");
    for line in &overlay {
        let dash = if matches!(line.id, SurfaceId::E1 | SurfaceId::E2 | SurfaceId::E3) {
            r#" stroke-dasharray="5 3""#
        } else {
            ""
        };
        let mut d = String::new();
        let mut pen_down = false;
        for &(d3, d4) in &line.points {
            if d4 < c.d4_range.0 || d4 > c.d4_range.1 {
                pen_down = false;
                continue;
            }
            let cmd = if pen_down { 'L' } else { 'M' };
            write!(d, "{cmd}{} {} ", num(f.px(d3)), num(f.py(d4))).unwrap();
            pen_down = true;
        }
        if d.is_empty() {
            continue;
        }
        writeln!(
            out,
            r##"<path class="surface" data-id="{}" d="{}" fill="none" stroke="#000000" stroke-width="1"{dash}/>"##,
            line.id,
            d.trim_end()
        )
        .unwrap();
    }

    // frame and axis labels
    writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{p}" height="{p}" fill="none" stroke="#000000"/>"##,
        p = num(plot)
    )
    .unwrap();
    for (v, anchor) in [(c.d3_range.0, "start"), (c.d3_range.1, "end")] {
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            num(f.px(v)),
            num(f.height - MARGIN + 16.0),
            num(v)
        )
        .unwrap();
    }
    for v in [c.d4_range.0, c.d4_range.1] {
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            num(MARGIN - 4.0),
            num(f.py(v) + 4.0),
            num(v)
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">d3 (r2 = {})</text>"#,
        num(MARGIN + plot / 2.0),
        num(f.height - 12.0),
        num(c.r2)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {y})" text-anchor="middle">d4</text>"#,
        num(MARGIN + plot / 2.0),
        y = num(MARGIN + plot / 2.0)
    )
    .unwrap();

    let lx = WIDTH + 4.0;
    for (k, (wt, fill)) in PALETTE.iter().enumerate() {
        let y = MARGIN + k as f64 * 20.0;
        writeln!(
            out,
            r##"<rect class="legend" x="{}" y="{}" width="14" height="14" fill="{fill}" stroke="#000000" stroke-width="0.5"/><text x="{}" y="{}">{wt}</text>"##,
            num(lx),
            num(y),
            num(lx + 20.0),
            num(y + 11.0)
        )
        .unwrap();
    }
    for (k, (label, dash)) in [("C1-C4", ""), ("E1-E3", r#" stroke-dasharray="5 3""#)]
        .iter()
        .enumerate()
    {
        let y = MARGIN + (9 + k) as f64 * 20.0 + 12.0;
        writeln!(
            out,
            r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#000000" stroke-width="1"{dash}/><text x="{}" y="{}">{label}</text>"##,
            num(lx),
            num(lx + 16.0),
            num(lx + 20.0),
            num(y + 4.0),
            y = num(y)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
