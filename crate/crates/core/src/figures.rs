//! SVG and CSV renderings of the slope picture, the can/φ band diagram, the
//! interlocking-slopes plot for π^*, and product tables.
//!
//! Output is plain text built in sorted order, so identical inputs give
//! identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::functoriality::{lemma_predicate, pi_star_nonzero, TowerMapQuery};
use crate::mult::{mult_table, Fixed, MultTable, TableMode};
use crate::padic::{brace, ceil_div, clamp, epsilon, vp, Prime};

const RED: &str = "#d62728";
const GREEN: &str = "#2ca02c";
const BLUE: &str = "#1f77b4";
const GREY: &str = "#7f7f7f";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Figure {
    /// File stem, `<kind>-p<val>-…`.
    pub name: String,
    pub svg: String,
    pub csv: String,
}

impl Figure {
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (ext, body) in [("svg", &self.svg), ("csv", &self.csv)] {
            let path = dir.join(format!("{}.{ext}", self.name));
            fs::write(&path, body)?;
            out.push(path);
        }
        Ok(out)
    }
}

struct Svg {
    body: String,
    width: u64,
    height: u64,
}

impl Svg {
    fn new(width: u64, height: u64) -> Svg {
        Svg { body: String::new(), width, height }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, opacity: Option<f64>) {
        let _ = write!(self.body, r#"<rect x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="{fill}""#);
        if let Some(o) = opacity {
            let _ = write!(self.body, r#" fill-opacity="{o:.2}""#);
        }
        self.body.push_str("/>\n");
    }

    fn line(&mut self, from: (f64, f64), to: (f64, f64), stroke: &str, dashed: bool) {
        let _ = write!(
            self.body,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{stroke}" stroke-width="0.1""#,
            from.0, from.1, to.0, to.1
        );
        if dashed {
            self.body.push_str(r#" stroke-dasharray="0.2,0.2""#);
        }
        self.body.push_str("/>\n");
    }

    fn dot(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{fill}"/>"#);
    }

    fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {w} {h}\" width=\"{w}\" height=\"{h}\">\n\
             <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Lattice points (e, d), rays d = ie, and optionally the p-band of j.
pub fn emit_slopes(e_max: u64, d_max: u64, i_max: u64, band: Option<(Prime, u64)>) -> Result<Figure> {
    if e_max == 0 || d_max == 0 || i_max == 0 {
        return invalid("slope plot bounds must be positive");
    }
    let (w, h) = (e_max + 1, d_max + 1);
    let y = |d: u64| (h - d) as f64 - 0.5;
    let x = |e: u64| e as f64 + 0.5;
    let mut svg = Svg::new(w, h);
    for i in 1..=i_max {
        // clip d = ie at the top edge
        let e_end = (d_max as f64 / i as f64).min(e_max as f64);
        svg.line((x(0), y(0)), (e_end + 0.5, y(0) - i as f64 * e_end), BLUE, false);
    }
    let on_band = |d: u64| match band {
        Some((p, j)) => {
            let mut q = j;
            while q < d {
                q *= p.get();
            }
            q == d
        }
        None => false,
    };
    for e in 1..=e_max {
        for d in 1..=d_max {
            let fill = if on_band(d) { RED } else { GREY };
            svg.dot(x(e), y(d), 0.08, fill);
        }
    }
    let mut csv = String::from("e,i,d\n");
    for e in 1..=e_max {
        for i in 1..=i_max {
            if i * e <= d_max {
                let _ = writeln!(csv, "{e},{i},{}", i * e);
            }
        }
    }
    let mut name = format!("slopes-e{e_max}-d{d_max}-i{i_max}");
    if let Some((p, j)) = band {
        let _ = write!(name, "-p{p}-j{j}");
    }
    Ok(Figure { name, svg: svg.finish(), csv })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BandEdge {
    pub j: u64,
    pub r: u32,
    pub degree: u64,
    /// "can" (to degree d) or "phi" (to degree pd).
    pub map: &'static str,
    pub exponent: u64,
    pub source_length: u64,
    pub target_length: u64,
}

impl BandEdge {
    pub fn is_iso(&self) -> bool {
        self.exponent == 0 && self.source_length == self.target_length
    }
}

/// can and φ/p^i on the degree-d components of band j, for d = p^r j, r ≤ r_max.
pub fn band_edges(p: Prime, e: u64, i: u64, j: u64, r_max: u32) -> Vec<BandEdge> {
    let length = |d: u64| vp(brace(d, e) as i64, p).expect("brace is positive");
    (0..=r_max)
        .flat_map(|r| {
            let d = p.get().pow(r) * j;
            let c = ceil_div(d, e) as i64;
            let source = epsilon(i, d, e) + length(d);
            [
                BandEdge {
                    j,
                    r,
                    degree: d,
                    map: "can",
                    exponent: clamp(i as i64 - c),
                    source_length: source,
                    target_length: length(d),
                },
                BandEdge {
                    j,
                    r,
                    degree: d,
                    map: "phi",
                    exponent: clamp(c - i as i64),
                    source_length: source,
                    target_length: length(p.get() * d),
                },
            ]
        })
        .collect()
}

pub fn emit_bands(p: Prime, e: u64, i: u64, j_max: u64, r_max: u32) -> Result<Figure> {
    if e == 0 || j_max == 0 {
        return invalid("band plot needs e ≥ 1 and j_max ≥ 1");
    }
    let js: Vec<u64> = (1..=j_max).filter(|&j| !p.divides(j)).collect();
    let (w, h) = (3 * js.len() as u64, 2 * (r_max as u64 + 2));
    let mut svg = Svg::new(w, h);
    let y = |r: u32| (h - 1) as f64 - 2.0 * r as f64;
    let mut csv = String::from("j,r,d,map,exponent,source_length,target_length,iso\n");
    for (col, &j) in js.iter().enumerate() {
        // Nygaard node on the left, de Rham node on the right
        let (xn, xw) = (3.0 * col as f64 + 0.75, 3.0 * col as f64 + 2.25);
        for r in 0..=r_max + 1 {
            svg.dot(xn, y(r), 0.15, if r <= r_max { GREY } else { "none" });
            svg.dot(xw, y(r), 0.15, GREY);
        }
        for edge in band_edges(p, e, i, j, r_max) {
            let to = if edge.map == "can" { (xw, y(edge.r)) } else { (xw, y(edge.r + 1)) };
            let color = if edge.map == "can" { BLUE } else { RED };
            svg.line((xn, y(edge.r)), to, color, !edge.is_iso());
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                edge.j,
                edge.r,
                edge.degree,
                edge.map,
                edge.exponent,
                edge.source_length,
                edge.target_length,
                u8::from(edge.is_iso())
            );
        }
    }
    Ok(Figure { name: format!("bands-p{p}-e{e}-i{i}-j{j_max}-r{r_max}"), svg: svg.finish(), csv })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InterlockCell {
    pub j: u64,
    pub i: u64,
    pub red: bool,
    pub green: bool,
}

/// Cells (j, i) with N ≠ 0, sorted by (j, i).
pub fn interlock_cells(p: Prime, m: u64, n: u64, i_max: u64, j_max: u64) -> Result<Vec<InterlockCell>> {
    if m <= n || n == 0 {
        return invalid(format!("need m > n ≥ 1, got m={m}, n={n}"));
    }
    let mut cells = Vec::new();
    for j in (1..=j_max).filter(|&j| !p.divides(j)) {
        for i in (1..=i_max).filter(|&i| j <= n * i) {
            let q = TowerMapQuery::new(p, m, n, i, j)?;
            cells.push(InterlockCell { j, i, red: pi_star_nonzero(&q), green: lemma_predicate(&q) });
        }
    }
    Ok(cells)
}

pub fn emit_interlock(p: Prime, m: u64, n: u64, i_max: u64, j_max: u64) -> Result<Figure> {
    let cells = interlock_cells(p, m, n, i_max, j_max)?;
    let (w, h) = (j_max, i_max);
    let mut svg = Svg::new(w, h);
    let mut green_cols: Vec<u64> = cells.iter().filter(|c| c.green).map(|c| c.j).collect();
    green_cols.dedup();
    for j in green_cols {
        svg.rect((j - 1) as f64, 0.0, 1.0, h as f64, GREEN, Some(0.3));
    }
    for c in cells.iter().filter(|c| c.red) {
        svg.rect((c.j - 1) as f64, (h - c.i) as f64, 1.0, 1.0, RED, None);
    }
    // i = p^r j/m, drawn until the slope leaves the canvas
    let mut pr = 1u64;
    while pr <= m * i_max {
        let slope = pr as f64 / m as f64;
        let j_end = (h as f64 / slope).min(w as f64);
        svg.line((0.0, h as f64), (j_end, h as f64 - slope * j_end), BLUE, false);
        pr *= p.get();
    }
    let mut csv = String::from("j,i,red,green\n");
    for c in &cells {
        let _ = writeln!(csv, "{},{},{},{}", c.j, c.i, u8::from(c.red), u8::from(c.green));
    }
    Ok(Figure { name: format!("interlock-p{p}-m{m}-n{n}-i{i_max}-j{j_max}"), svg: svg.finish(), csv })
}

pub fn render_multtable(table: &MultTable) -> Figure {
    let w = table.x_range.1.saturating_sub(table.x_range.0) + 1;
    let h = table.y_range.1.saturating_sub(table.y_range.0) + 1;
    let mut svg = Svg::new(w, h);
    for (a, row) in table.grid.iter().enumerate() {
        for (b, &cell) in row.iter().enumerate() {
            if cell == 1 {
                svg.rect(a as f64, (h - 1 - b as u64) as f64, 1.0, 1.0, "#000000", None);
            }
        }
    }
    let fixed = match table.fixed {
        Fixed::J { j1, j2 } => format!("j{j1}-j{j2}"),
        Fixed::I { i1, i2 } => format!("i{i1}-i{i2}"),
    };
    let name = format!(
        "multtable-p{}-e{}-{}-{fixed}-x{}_{}-y{}_{}",
        table.p,
        table.e,
        table.mode.name(),
        table.x_range.0,
        table.x_range.1,
        table.y_range.0,
        table.y_range.1
    );
    Figure { name, svg: svg.finish(), csv: table.to_csv() }
}

pub fn emit_multtable(
    mode: TableMode,
    p: Prime,
    e: u64,
    fixed: Fixed,
    x_range: (u64, u64),
    y_range: (u64, u64),
) -> Result<Figure> {
    Ok(render_multtable(&mult_table(mode, p, e, fixed, x_range, y_range)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopesConfig {
    pub e_max: u64,
    pub d_max: u64,
    pub i_max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandsConfig {
    pub p: Prime,
    pub e: u64,
    pub i: u64,
    pub j_max: u64,
    pub r_max: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlockConfig {
    pub p: Prime,
    pub m: u64,
    pub n: u64,
    pub i_max: u64,
    pub j_max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultTableConfig {
    pub caption: String,
    pub mode: TableMode,
    pub p: Prime,
    pub e: u64,
    pub fixed: Fixed,
    pub x_range: (u64, u64),
    pub y_range: (u64, u64),
}

/// Default plot ranges, shipped in `config/figures.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiguresConfig {
    pub slopes: SlopesConfig,
    pub bands: BandsConfig,
    pub interlock: Vec<InterlockConfig>,
    pub multtable: Vec<MultTableConfig>,
}

impl FiguresConfig {
    pub fn builtin() -> FiguresConfig {
        serde_json::from_str(include_str!("../config/figures.json")).expect("bundled figure config parses")
    }

    pub fn load(path: &Path) -> Result<FiguresConfig> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|err| crate::error::Error::InvalidInput(format!("{}: {err}", path.display())))
    }

    /// Every configured figure, in config order.
    pub fn render_all(&self) -> Result<Vec<Figure>> {
        let mut out = vec![
            emit_slopes(self.slopes.e_max, self.slopes.d_max, self.slopes.i_max, None)?,
            emit_bands(self.bands.p, self.bands.e, self.bands.i, self.bands.j_max, self.bands.r_max)?,
        ];
        for c in &self.interlock {
            out.push(emit_interlock(c.p, c.m, c.n, c.i_max, c.j_max)?);
        }
        for c in &self.multtable {
            out.push(emit_multtable(c.mode, c.p, c.e, c.fixed, c.x_range, c.y_range)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn slopes_examples() {
        let fig = emit_slopes(4, 12, 3, None).unwrap();
        assert_eq!(fig.svg.matches("<line").count(), 3);
        assert_eq!(fig.svg, emit_slopes(4, 12, 3, None).unwrap().svg);
        let tiny = emit_slopes(1, 1, 1, None).unwrap();
        assert_eq!(tiny.csv, "e,i,d\n1,1,1\n");
        assert!(emit_slopes(0, 1, 1, None).is_err());
    }

    #[test]
    fn band_iso_pattern() {
        // i = 0: every can has exponent 0 and preserves length
        for j in [1, 3, 5, 7] {
            for edge in band_edges(p(2), 2, 0, j, 4).iter().filter(|e| e.map == "can") {
                assert!(edge.is_iso(), "{edge:?}");
            }
        }
        let edges = band_edges(p(2), 2, 2, 1, 3);
        let can0 = edges[0];
        assert_eq!((can0.map, can0.exponent), ("can", 1));
        assert!(!can0.is_iso());
        let fig = emit_bands(p(2), 2, 2, 7, 3).unwrap();
        assert_eq!(fig.csv.lines().count(), 1 + 4 * 4 * 2);
    }

    #[test]
    fn interlock_properties() {
        for q in [2, 3] {
            let cells = interlock_cells(p(q), 5, 4, 40, 30).unwrap();
            for c in &cells {
                assert!(!(c.green && c.red), "{c:?}");
                assert!(c.j <= 4 * c.i);
            }
            let mut sorted = cells.clone();
            sorted.sort_by_key(|c| (c.j, c.i));
            assert_eq!(sorted, cells);
        }
        assert!(interlock_cells(p(2), 3, 3, 5, 5).is_err());
    }

    #[test]
    fn multtable_symmetry() {
        let t = mult_table(TableMode::Aa, p(2), 3, Fixed::J { j1: 1, j2: 1 }, (1, 12), (1, 12)).unwrap();
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(t.grid[a][b], t.grid[b][a]);
            }
        }
        let fig = render_multtable(&t);
        assert!(fig.name.starts_with("multtable-p2-e3-aa-"));
    }

    #[test]
    fn builtin_config_renders() {
        let config = FiguresConfig::builtin();
        assert_eq!(config.multtable.len(), 4);
        assert_eq!(config.interlock.len(), 2);
    }
}
