//! Grid and region output: JSON, CSV, PNG and SVG.
//!
//! Images are drawn from the grid as re-read from its own JSON, so pixels
//! never see values the written file does not hold.

use std::fmt::Write as _;
use std::io::Cursor;
use std::path::Path;

use anyhow::{bail, Context, Result};
use image::{Rgb, RgbImage};
use tilerank_core::regions::RegionSet;
use tilerank_core::tile::{all_placements, gamma_curve, prior_grid_overlay, Axis, CurveKind, PlacementKind};
use tilerank_core::{GridKind, Priors, TileCoord, TileGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Png,
    Svg,
    Json,
    Csv,
}

impl OutputFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        Ok(match ext.as_deref() {
            Some("png") => OutputFormat::Png,
            Some("svg") => OutputFormat::Svg,
            Some("json") => OutputFormat::Json,
            Some("csv") => OutputFormat::Csv,
            _ => bail!("cannot infer output format of {} (use .json, .csv, .png or .svg)", path.display()),
        })
    }

    pub fn is_image(self) -> bool {
        matches!(self, OutputFormat::Png | OutputFormat::Svg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Palette {
    /// Sequential, for values in `[0, 1]` and ranks.
    Viridis,
    /// Diverging around 0, for τ in `[−1, 1]`.
    RdBu,
}

impl Palette {
    pub fn name(self) -> &'static str {
        match self {
            Palette::Viridis => "viridis",
            Palette::RdBu => "rdbu",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "viridis" => Ok(Palette::Viridis),
            "rdbu" => Ok(Palette::RdBu),
            other => bail!("unknown palette `{other}` (viridis or rdbu)"),
        }
    }

    pub fn for_kind(kind: GridKind) -> Self {
        match kind {
            GridKind::KendallTau => Palette::RdBu,
            _ => Palette::Viridis,
        }
    }

    /// `t` in `[0, 1]`; out-of-range values are clamped.
    pub fn color(self, t: f64) -> Rgb<u8> {
        const VIRIDIS: [[f64; 3]; 5] =
            [[68.0, 1.0, 84.0], [59.0, 82.0, 139.0], [33.0, 145.0, 140.0], [94.0, 201.0, 98.0], [253.0, 231.0, 37.0]];
        const RDBU: [[f64; 3]; 3] = [[33.0, 102.0, 172.0], [247.0, 247.0, 247.0], [178.0, 24.0, 43.0]];
        let stops: &[[f64; 3]] = match self {
            Palette::Viridis => &VIRIDIS,
            Palette::RdBu => &RDBU,
        };
        let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
        let x = t * (stops.len() - 1) as f64;
        let k = (x.floor() as usize).min(stops.len() - 2);
        let f = x - k as f64;
        let c = |ch: usize| (stops[k][ch] + f * (stops[k + 1][ch] - stops[k][ch])).round() as u8;
        Rgb([c(0), c(1), c(2)])
    }
}

const UNDEFINED: Rgb<u8> = Rgb([128, 128, 128]);
const OVERLAY: Rgb<u8> = Rgb([255, 255, 255]);
const PLACEMENT: Rgb<u8> = Rgb([0, 0, 0]);
const CATEGORICAL: [[u8; 3]; 10] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
];

pub fn entity_color(i: usize) -> Rgb<u8> {
    Rgb(CATEGORICAL[i % CATEGORICAL.len()])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overlays {
    pub gamma: bool,
    pub prior_grid: bool,
    pub placements: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderSpec {
    pub format: OutputFormat,
    /// Lattice size for region maps; grids keep their own resolution.
    pub res: usize,
    /// Pixels per cell side.
    pub cell_px: u32,
    pub palette: Option<Palette>,
    pub overlays: Overlays,
}

impl RenderSpec {
    pub fn new(format: OutputFormat) -> Self {
        RenderSpec { format, res: 201, cell_px: 4, palette: None, overlays: Overlays::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.res < 2 {
            bail!("resolution {} must be at least 2", self.res);
        }
        if self.cell_px == 0 {
            bail!("cell size must be at least one pixel");
        }
        Ok(())
    }
}

pub fn grid_to_json(grid: &TileGrid) -> String {
    serde_json::to_string_pretty(grid).expect("grid serializes")
}

pub fn grid_from_json(text: &str) -> Result<TileGrid> {
    let grid: TileGrid = serde_json::from_str(text).context("invalid TileGrid JSON")?;
    grid.validate()?;
    Ok(grid)
}

/// Long format, one cell per row: `a,b,value` with an empty value for Undefined.
pub fn grid_to_csv(grid: &TileGrid) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["a", "b", "value"])?;
    for (i, row) in grid.values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let value = v.value().map(|x| x.to_string()).unwrap_or_default();
            w.write_record([grid.a[i].to_string(), grid.b[j].to_string(), value])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Value range mapped onto the palette.
fn value_range(grid: &TileGrid) -> (f64, f64) {
    match grid.kind {
        GridKind::KendallTau => (-1.0, 1.0),
        GridKind::Rank => {
            let max = grid.defined_values().fold(1.0, f64::max);
            (1.0, max.max(2.0))
        }
        _ => (0.0, 1.0),
    }
}

/// Priors used to place prior-dependent overlays.
fn overlay_priors(grid: &TileGrid) -> Option<Priors> {
    grid.meta
        .priors
        .or(grid.meta.shifted_to)
        .or_else(|| grid.meta.fixed_neg_prior.and_then(|n| Priors::from_neg(n).ok()))
        .filter(|p| p.require_interior().is_ok())
}

/// A polyline in Tile coordinates with its color.
struct Stroke {
    points: Vec<[f64; 2]>,
    color: Rgb<u8>,
    marker: bool,
}

fn overlay_strokes(priors: Option<Priors>, overlays: Overlays) -> Result<Vec<Stroke>> {
    let mut out = Vec::new();
    let priors_or_balanced = priors.unwrap_or_else(Priors::balanced);
    if overlays.gamma {
        let curve = gamma_curve(CurveKind::GammaPi, priors_or_balanced.neg(), 129)?;
        out.push(Stroke { points: curve.points.iter().map(|c| [c.a, c.b]).collect(), color: OVERLAY, marker: false });
    }
    if overlays.prior_grid {
        for line in prior_grid_overlay(priors_or_balanced, 0.1)? {
            let x = line.position;
            let points = match line.axis {
                Axis::A => vec![[x, 0.0], [x, 1.0]],
                Axis::B => vec![[0.0, x], [1.0, x]],
            };
            out.push(Stroke { points, color: Rgb([200, 200, 200]), marker: false });
        }
    }
    if overlays.placements {
        for p in all_placements(priors)? {
            let pt = |c: &TileCoord| [c.a, c.b];
            let (points, marker) = match &p.kind {
                PlacementKind::Point { at } => (vec![pt(at)], true),
                PlacementKind::Segment { from, to } => (vec![pt(from), pt(to)], false),
                PlacementKind::Curve { points } => (points.iter().map(pt).collect(), false),
            };
            out.push(Stroke { points, color: PLACEMENT, marker });
        }
    }
    Ok(out)
}

/// Maps Tile coordinates to pixel centers of an `n_a × n_b` cell image.
struct Frame {
    n_a: usize,
    n_b: usize,
    px: u32,
}

impl Frame {
    fn width(&self) -> u32 {
        self.n_a as u32 * self.px
    }

    fn height(&self) -> u32 {
        self.n_b as u32 * self.px
    }

    fn to_px(&self, [a, b]: [f64; 2]) -> (f64, f64) {
        let s = self.px as f64;
        ((a * (self.n_a - 1) as f64 + 0.5) * s, ((1.0 - b) * (self.n_b - 1) as f64 + 0.5) * s)
    }
}

fn put(img: &mut RgbImage, x: f64, y: f64, c: Rgb<u8>) {
    if x >= 0.0 && y >= 0.0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}

fn draw_stroke(img: &mut RgbImage, frame: &Frame, s: &Stroke) {
    if s.marker {
        let (x, y) = frame.to_px(s.points[0]);
        for dx in -2..=2 {
            for dy in -2..=2 {
                put(img, x + dx as f64, y + dy as f64, s.color);
            }
        }
        return;
    }
    for w in s.points.windows(2) {
        let (x0, y0) = frame.to_px(w[0]);
        let (x1, y1) = frame.to_px(w[1]);
        let steps = (x1 - x0).abs().max((y1 - y0).abs()).ceil().max(1.0) as usize;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            put(img, x0 + t * (x1 - x0), y0 + t * (y1 - y0), s.color);
        }
    }
}

fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, image::ImageFormat::Png)?;
    Ok(buf.into_inner())
}

fn hex(c: Rgb<u8>) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn cell_color(grid: &TileGrid, palette: Palette, i: usize, j: usize) -> Rgb<u8> {
    let (lo, hi) = value_range(grid);
    match grid.values[i][j].value() {
        Some(v) => palette.color((v - lo) / (hi - lo)),
        None => UNDEFINED,
    }
}

/// PNG or SVG bytes for a grid.
pub fn render_grid(grid: &TileGrid, spec: &RenderSpec) -> Result<Vec<u8>> {
    spec.validate()?;
    grid.validate()?;
    let palette = match spec.palette {
        Some(p) => p,
        None => match grid.meta.palette.as_deref() {
            Some(name) => Palette::parse(name)?,
            None => Palette::for_kind(grid.kind),
        },
    };
    let frame = Frame { n_a: grid.n_a, n_b: grid.n_b, px: spec.cell_px };
    let strokes = overlay_strokes(overlay_priors(grid), spec.overlays)?;
    match spec.format {
        OutputFormat::Png => {
            let mut img = RgbImage::new(frame.width(), frame.height());
            for (x, y, px) in img.enumerate_pixels_mut() {
                let i = (x / spec.cell_px) as usize;
                let j = grid.n_b - 1 - (y / spec.cell_px) as usize;
                *px = cell_color(grid, palette, i, j);
            }
            for s in &strokes {
                draw_stroke(&mut img, &frame, s);
            }
            encode_png(&img)
        }
        OutputFormat::Svg => {
            let (w, h) = (frame.width(), frame.height());
            let s = spec.cell_px;
            let mut svg = svg_open(w, h);
            for i in 0..grid.n_a {
                for j in 0..grid.n_b {
                    let y = (grid.n_b - 1 - j) as u32 * s;
                    let _ = writeln!(
                        svg,
                        r#"<rect x="{}" y="{y}" width="{s}" height="{s}" fill="{}"/>"#,
                        i as u32 * s,
                        hex(cell_color(grid, palette, i, j))
                    );
                }
            }
            svg_strokes(&mut svg, &frame, &strokes);
            svg.push_str("</svg>\n");
            Ok(svg.into_bytes())
        }
        other => bail!("{other:?} is not an image format"),
    }
}

fn svg_open(w: u32, h: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" shape-rendering=\"crispEdges\">\n"
    )
}

fn svg_strokes(svg: &mut String, frame: &Frame, strokes: &[Stroke]) {
    for s in strokes {
        if s.marker {
            let (x, y) = frame.to_px(s.points[0]);
            let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{}"/>"#, hex(s.color));
        } else {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&p| {
                    let (x, y) = frame.to_px(p);
                    format!("{x},{y}")
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
                pts.join(" "),
                hex(s.color)
            );
        }
    }
}

/// Writes the grid in the format implied by `path`. Images are drawn from the
/// re-parsed JSON text.
pub fn write_grid(grid: &TileGrid, path: &Path, spec: &RenderSpec) -> Result<()> {
    let bytes = match spec.format {
        OutputFormat::Json => grid_to_json(grid).into_bytes(),
        OutputFormat::Csv => grid_to_csv(grid)?.into_bytes(),
        OutputFormat::Png | OutputFormat::Svg => {
            let reread = grid_from_json(&grid_to_json(grid))?;
            render_grid(&reread, spec)?
        }
    };
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

/// Index of the first entity whose rank-`rank` region holds each lattice point.
///
/// Points on the square's edges count as just inside it, so the outer rows
/// and columns are labelled too.
pub fn region_labels(set: &RegionSet, rank: usize, a: &[f64], b: &[f64]) -> Vec<Vec<Option<usize>>> {
    const INSET: f64 = 1e-12;
    let inset = |xs: &[f64]| -> Vec<f64> { xs.iter().map(|x| x.clamp(INSET, 1.0 - INSET)).collect() };
    let (a, b) = (&inset(a)[..], &inset(b)[..]);
    let mut labels = vec![vec![None; b.len()]; a.len()];
    for e in (0..set.entities.len()).rev() {
        let mask = set.raster(e, rank, a, b);
        for (row, mrow) in labels.iter_mut().zip(&mask) {
            for (l, &m) in row.iter_mut().zip(mrow) {
                if m {
                    *l = Some(e);
                }
            }
        }
    }
    labels
}

/// Colored region map for one rank: PNG from a `spec.res²` lattice, SVG from
/// the polygons themselves.
pub fn render_regions(set: &RegionSet, rank: usize, spec: &RenderSpec) -> Result<Vec<u8>> {
    spec.validate()?;
    let frame = Frame { n_a: spec.res, n_b: spec.res, px: spec.cell_px };
    let mut strokes = overlay_strokes(Some(set.priors).filter(|p| p.require_interior().is_ok()), spec.overlays)?;
    for s in &mut strokes {
        if s.color == OVERLAY {
            s.color = PLACEMENT;
        }
    }
    match spec.format {
        OutputFormat::Png => {
            let axis = tilerank_core::grid::linspace(spec.res);
            let labels = region_labels(set, rank, &axis, &axis);
            let mut img = RgbImage::new(frame.width(), frame.height());
            for (x, y, px) in img.enumerate_pixels_mut() {
                let i = (x / spec.cell_px) as usize;
                let j = spec.res - 1 - (y / spec.cell_px) as usize;
                *px = labels[i][j].map_or(Rgb([255, 255, 255]), entity_color);
            }
            for s in &strokes {
                draw_stroke(&mut img, &frame, s);
            }
            encode_png(&img)
        }
        OutputFormat::Svg => {
            let mut svg = svg_open(frame.width(), frame.height());
            for (e, ent) in set.entities.iter().enumerate() {
                for poly in set.polygons(e, rank) {
                    let pts: Vec<String> = poly
                        .vertices
                        .iter()
                        .map(|&v| {
                            let (x, y) = frame.to_px(v);
                            format!("{x},{y}")
                        })
                        .collect();
                    let _ = writeln!(
                        svg,
                        r#"<polygon points="{}" fill="{}" stroke="none"><title>{}</title></polygon>"#,
                        pts.join(" "),
                        hex(entity_color(e)),
                        xml_escape(&ent.name)
                    );
                }
            }
            svg_strokes(&mut svg, &frame, &strokes);
            for (e, ent) in set.entities.iter().enumerate() {
                let y = 14 + 16 * e as u32;
                let _ = writeln!(
                    svg,
                    r#"<rect x="6" y="{}" width="10" height="10" fill="{}"/><text x="20" y="{y}" font-size="12" font-family="sans-serif">{}</text>"#,
                    y - 9,
                    hex(entity_color(e)),
                    xml_escape(&ent.name)
                );
            }
            svg.push_str("</svg>\n");
            Ok(svg.into_bytes())
        }
        other => bail!("{other:?} is not an image format"),
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
