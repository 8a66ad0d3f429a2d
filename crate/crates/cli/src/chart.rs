//! Static chart emitters: stems across, filtration `s` up.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use a1_core::davismahowald::{D2Pair, LocalizedE1};
use a1_core::resolution::ExtChart;
use serde::Serialize;

/// Marker shape; on DM pages it encodes `σ` (circle, square, triangle for
/// `σ ≡ 0, 2, 4 mod 6`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    Circle,
    Square,
    Triangle,
}

impl Shape {
    pub fn for_sigma(sigma: u32) -> Shape {
        match (sigma / 2) % 3 {
            0 => Shape::Circle,
            1 => Shape::Square,
            _ => Shape::Triangle,
        }
    }

    fn ascii(self) -> char {
        match self {
            Shape::Circle => 'o',
            Shape::Square => '#',
            Shape::Triangle => '^',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Point {
    pub stem: i32,
    pub s: u32,
    pub count: usize,
    pub shape: Shape,
}

/// An h0-tower: a vertical run from `from_s` to the top of the chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tower {
    pub stem: i32,
    pub from_s: u32,
    pub shape: Shape,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub from: (i32, u32),
    pub to: (i32, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chart {
    pub title: String,
    pub min_stem: i32,
    pub max_stem: i32,
    pub max_s: u32,
    pub points: Vec<Point>,
    pub towers: Vec<Tower>,
    pub arrows: Vec<Arrow>,
}

impl Chart {
    pub fn new(title: &str, min_stem: i32, max_stem: i32, max_s: u32) -> Self {
        Chart {
            title: title.to_string(),
            min_stem,
            max_stem,
            max_s,
            points: Vec::new(),
            towers: Vec::new(),
            arrows: Vec::new(),
        }
    }

    fn in_range(&self, stem: i32, s: u32) -> bool {
        (self.min_stem..=self.max_stem).contains(&stem) && s <= self.max_s
    }
}

/// Generators of a minimal resolution, plotted at `(t - s, s)`.
pub fn ext_chart(c: &ExtChart) -> Chart {
    let max_stem = c.dims.keys().map(|&(s, t)| t - s as i32).max().unwrap_or(0).max(0);
    let min_stem = c.dims.keys().map(|&(s, t)| t - s as i32).min().unwrap_or(0).min(0);
    let mut chart = Chart::new(&format!("Ext over {:?}", c.algebra), min_stem, max_stem, c.max_s);
    for (&(s, t), &n) in &c.dims {
        chart.points.push(Point { stem: t - s as i32, s, count: n, shape: Shape::Circle });
    }
    chart
}

/// One tower per unit of multiplicity, starting at `s = 0`.
pub fn tower_chart(towers: &BTreeMap<i32, usize>, max_stem: i32, max_s: u32) -> Chart {
    let min_stem = towers.keys().next().copied().unwrap_or(0).min(0);
    let mut chart = Chart::new("h0-towers", min_stem, max_stem, max_s);
    for (&stem, &n) in towers {
        for i in 0..n {
            chart.towers.push(Tower { stem, from_s: i as u32, shape: Shape::Circle });
        }
    }
    chart
}

/// The localized E1/E2 page: each record a tower starting at `s = σ`, with
/// d2 drawn from `(stem, σ + 2)` to `(stem - 1, σ + 3)`.
pub fn dm_chart(e1: &LocalizedE1, pairs: &[D2Pair], max_s: u32) -> Chart {
    let max_stem = e1.records.iter().map(|r| r.stem).max().unwrap_or(0).max(0);
    let min_stem = e1.records.iter().map(|r| r.stem).min().unwrap_or(0).min(0);
    let mut chart = Chart::new("localized DM E2 page", min_stem, max_stem, max_s);
    for r in &e1.records {
        chart.towers.push(Tower { stem: r.stem, from_s: r.sigma, shape: Shape::for_sigma(r.sigma) });
    }
    for sigma in (0..e1.max_sigma.saturating_sub(1)).step_by(2) {
        for p in pairs {
            let stem = 2 * sigma as i32 + p.source_degree;
            chart.arrows.push(Arrow { from: (stem, sigma + 2), to: (stem - 1, sigma + 3) });
        }
    }
    chart
}

const COL: usize = 3;

pub fn render_ascii(c: &Chart) -> String {
    let width = (c.max_stem - c.min_stem + 1) as usize;
    let rows = c.max_s as usize + 1;
    let mut grid = vec![vec![' '; width]; rows + 1];
    let put = |stem: i32, row: usize, ch: char, grid: &mut Vec<Vec<char>>| {
        let x = (stem - c.min_stem) as usize;
        let cell = &mut grid[row][x];
        *cell = if *cell == ' ' || *cell == ch { ch } else { '*' };
    };
    for t in &c.towers {
        if !c.in_range(t.stem, t.from_s) {
            continue;
        }
        for s in t.from_s..=c.max_s {
            put(t.stem, s as usize, t.shape.ascii(), &mut grid);
        }
        put(t.stem, rows, '|', &mut grid);
    }
    for p in &c.points {
        if !c.in_range(p.stem, p.s) {
            continue;
        }
        let ch = if p.count == 1 {
            p.shape.ascii()
        } else {
            char::from_digit(p.count.min(9) as u32, 10).unwrap()
        };
        put(p.stem, p.s as usize, ch, &mut grid);
    }
    let mut out = String::new();
    writeln!(out, "{}", c.title).unwrap();
    let row_text = |cells: &[char]| cells.iter().map(|ch| format!("{ch:>COL$}")).collect::<String>();
    if c.towers.iter().any(|t| c.in_range(t.stem, t.from_s)) {
        writeln!(out, "{:>4} |{}", "", row_text(&grid[rows]).trim_end()).unwrap();
    }
    for s in (0..rows).rev() {
        writeln!(out, "{s:>4} |{}", row_text(&grid[s]).trim_end()).unwrap();
    }
    writeln!(out, "{:>4} +{}", "", "-".repeat(width * COL)).unwrap();
    let labels: String = (c.min_stem..=c.max_stem).map(|t| format!("{t:>COL$}")).collect();
    writeln!(out, "{:>4}  {labels}", "").unwrap();
    for a in &c.arrows {
        writeln!(out, "d2: ({}, {}) -> ({}, {})", a.from.0, a.from.1, a.to.0, a.to.1).unwrap();
    }
    out
}

const CELL: i32 = 30;
const MARGIN: i32 = 50;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(c: &Chart) -> String {
    let cols = c.max_stem - c.min_stem + 1;
    let rows = c.max_s as i32 + 1;
    let w = 2 * MARGIN + cols * CELL;
    let h = 2 * MARGIN + (rows + 1) * CELL;
    let x = |stem: i32| MARGIN + (stem - c.min_stem) * CELL + CELL / 2;
    let y = |s: i32| h - MARGIN - s * CELL - CELL / 2;
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(
        out,
        r#"<defs><marker id="head" markerWidth="8" markerHeight="8" refX="4" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="black"/></marker></defs>"#
    )
    .unwrap();
    writeln!(out, r#"<title>{}</title>"#, escape(&c.title)).unwrap();
    writeln!(out, r#"<text x="{MARGIN}" y="{}" font-size="14">{}</text>"#, MARGIN / 2, escape(&c.title)).unwrap();
    let (x0, y0) = (MARGIN, h - MARGIN);
    writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#, w - MARGIN).unwrap();
    writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{MARGIN}" stroke="black"/>"#).unwrap();
    for stem in c.min_stem..=c.max_stem {
        writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{stem}</text>"#, x(stem), y0 + 15).unwrap();
    }
    for s in 0..rows {
        writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{s}</text>"#, x0 - 5, y(s) + 4).unwrap();
    }
    let marker = |out: &mut String, shape: Shape, cx: i32, cy: i32| {
        match shape {
            Shape::Circle => writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="4" fill="black"/>"#),
            Shape::Square => writeln!(out, r#"<rect x="{}" y="{}" width="8" height="8" fill="black"/>"#, cx - 4, cy - 4),
            Shape::Triangle => writeln!(
                out,
                r#"<polygon points="{},{} {},{} {},{}" fill="black"/>"#,
                cx,
                cy - 5,
                cx - 5,
                cy + 4,
                cx + 5,
                cy + 4
            ),
        }
        .unwrap();
    };
    for t in &c.towers {
        if !c.in_range(t.stem, t.from_s) {
            continue;
        }
        let top = y(rows) + CELL / 2;
        writeln!(
            out,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{top}" stroke="black" marker-end="url(#head)"/>"#,
            x(t.stem),
            y(t.from_s as i32)
        )
        .unwrap();
        for s in t.from_s..=c.max_s {
            marker(&mut out, t.shape, x(t.stem), y(s as i32));
        }
    }
    for p in &c.points {
        if !c.in_range(p.stem, p.s) {
            continue;
        }
        marker(&mut out, p.shape, x(p.stem), y(p.s as i32));
        if p.count > 1 {
            writeln!(out, r#"<text x="{}" y="{}" font-size="9">{}</text>"#, x(p.stem) + 5, y(p.s as i32) - 5, p.count).unwrap();
        }
    }
    for a in &c.arrows {
        writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="red" marker-end="url(#head)"/>"#,
            x(a.from.0),
            y(a.from.1 as i32),
            x(a.to.0),
            y(a.to.1 as i32)
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}
