//! SVG rendering of laid-out graphs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::font::{glyph, TRACKING};
use super::layout::Point;
use crate::psmiles::{BondOrder, MolecularGraph};

/// Drawing parameters; lengths are fractions of the on-canvas bond length
/// unless noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Style {
    pub line_width: f64,
    pub label_height: f64,
    pub multiple_bond_offset: f64,
    /// Blank border as a fraction of the canvas size.
    pub margin: f64,
    /// Largest bond length as a fraction of the canvas size.
    pub max_bond_fraction: f64,
    pub stroke: String,
    pub background: String,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            line_width: 0.06,
            label_height: 0.42,
            multiple_bond_offset: 0.16,
            margin: 0.06,
            max_bond_fraction: 0.15,
            stroke: "#000000".to_string(),
            background: "#ffffff".to_string(),
        }
    }
}

/// Partial style; unset fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StyleOverrides {
    pub line_width: Option<f64>,
    pub label_height: Option<f64>,
    pub multiple_bond_offset: Option<f64>,
    pub margin: Option<f64>,
    pub max_bond_fraction: Option<f64>,
    pub stroke: Option<String>,
    pub background: Option<String>,
}

impl Style {
    pub fn with_overrides(o: &StyleOverrides) -> Style {
        let d = Style::default();
        Style {
            line_width: o.line_width.unwrap_or(d.line_width),
            label_height: o.label_height.unwrap_or(d.label_height),
            multiple_bond_offset: o.multiple_bond_offset.unwrap_or(d.multiple_bond_offset),
            margin: o.margin.unwrap_or(d.margin),
            max_bond_fraction: o.max_bond_fraction.unwrap_or(d.max_bond_fraction),
            stroke: o.stroke.clone().unwrap_or(d.stroke),
            background: o.background.clone().unwrap_or(d.background),
        }
    }
}

/// Text shown at an atom, or `None` for plain carbons.
fn atom_label(graph: &MolecularGraph, atom: usize) -> Option<String> {
    let a = graph.atom(atom);
    if a.is_wildcard() {
        return Some("*".to_string());
    }
    if a.atomic_number == 6 && a.formal_charge == 0 && a.isotope.is_none() && graph.degree(atom) > 0 {
        return None;
    }
    let mut s = a.symbol().to_string();
    match a.total_h() {
        0 => {}
        1 => s.push('H'),
        h => {
            s.push('H');
            s.push_str(&h.to_string());
        }
    }
    match a.formal_charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => s.push_str(&format!("{c}+")),
        c => s.push_str(&format!("{}-", -c)),
    }
    Some(s)
}

fn label_width(text: &str) -> f64 {
    let chars: Vec<char> = text.chars().collect();
    chars.iter().map(|&c| glyph(c).width).sum::<f64>() + TRACKING * (chars.len().saturating_sub(1)) as f64
}

struct Canvas {
    scale: f64,
    center: Point,
    half: f64,
}

impl Canvas {
    fn map(&self, p: Point) -> Point {
        Point::new(self.half + (p.x - self.center.x) * self.scale, self.half - (p.y - self.center.y) * self.scale)
    }
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn line(out: &mut String, a: Point, b: Point) {
    let _ = write!(out, "M{} {}L{} {}", fmt(a.x), fmt(a.y), fmt(b.x), fmt(b.y));
}

/// Render to an SVG document of `size`×`size` pixels.
pub fn render_svg(graph: &MolecularGraph, coordinates: &[Point], size: u32, style: &Style) -> String {
    let s = size as f64;
    let labels: Vec<Option<String>> = (0..graph.atom_count()).map(|i| atom_label(graph, i)).collect();

    // Fit the drawing, labels included, inside the margin.
    let pad = style.label_height;
    let (mut lo, mut hi) = (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN));
    for (i, p) in coordinates.iter().enumerate() {
        let half_w = labels[i].as_deref().map_or(0.0, |t| label_width(t) * style.label_height / 2.0);
        lo = Point::new(lo.x.min(p.x - half_w.max(pad)), lo.y.min(p.y - pad));
        hi = Point::new(hi.x.max(p.x + half_w.max(pad)), hi.y.max(p.y + pad));
    }
    if coordinates.is_empty() {
        lo = Point::new(-1.0, -1.0);
        hi = Point::new(1.0, 1.0);
    }
    let usable = s * (1.0 - 2.0 * style.margin);
    let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let scale = (usable / extent).min(s * style.max_bond_fraction);
    let canvas = Canvas { scale, center: Point::new((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0), half: s / 2.0 };
    let px: Vec<Point> = coordinates.iter().map(|&p| canvas.map(p)).collect();
    let stroke_width = (style.line_width * scale).max(1.0);
    let label_px = style.label_height * scale;

    let mut bonds = String::new();
    for bond in graph.bonds() {
        let (mut a, mut b) = (px[bond.begin], px[bond.end]);
        let dir = b.sub(a);
        let len = dir.norm();
        if len < 1e-9 {
            continue;
        }
        let unit = dir.scale(1.0 / len);
        let clip = 0.6 * label_px;
        if labels[bond.begin].is_some() {
            a = a.add(unit.scale(clip.min(len / 2.0 - 1.0)));
        }
        if labels[bond.end].is_some() {
            b = b.sub(unit.scale(clip.min(len / 2.0 - 1.0)));
        }
        let normal = Point::new(-unit.y, unit.x);
        let offset = style.multiple_bond_offset * scale;
        let order = match bond.order {
            BondOrder::Aromatic => bond.kekule,
            o => o,
        };
        match order {
            BondOrder::Single | BondOrder::Aromatic => line(&mut bonds, a, b),
            BondOrder::Double => {
                if let Some(side) = ring_side(graph, bond.begin, bond.end, &px, normal) {
                    line(&mut bonds, a, b);
                    let shrink = unit.scale(0.15 * len);
                    let shift = normal.scale(side * offset);
                    line(&mut bonds, a.add(shift).add(shrink), b.add(shift).sub(shrink));
                } else {
                    let shift = normal.scale(offset / 2.0);
                    line(&mut bonds, a.add(shift), b.add(shift));
                    line(&mut bonds, a.sub(shift), b.sub(shift));
                }
            }
            BondOrder::Triple => {
                line(&mut bonds, a, b);
                let shift = normal.scale(offset);
                line(&mut bonds, a.add(shift), b.add(shift));
                line(&mut bonds, a.sub(shift), b.sub(shift));
            }
        }
    }

    let mut text = String::new();
    for (i, label) in labels.iter().enumerate() {
        let Some(label) = label else { continue };
        let width = label_width(label) * label_px;
        let origin = Point::new(px[i].x - width / 2.0, px[i].y + label_px / 2.0);
        let mut cursor = 0.0;
        for c in label.chars() {
            let g = glyph(c);
            for stroke in g.strokes {
                for (k, &(gx, gy)) in stroke.iter().enumerate() {
                    let x = origin.x + (cursor + gx) * label_px;
                    let y = origin.y - gy * label_px;
                    let _ = write!(text, "{}{} {}", if k == 0 { 'M' } else { 'L' }, fmt(x), fmt(y));
                }
            }
            cursor += g.width + TRACKING;
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{size}" height="{size}" fill="{}"/>"#, style.background);
    if !bonds.is_empty() {
        let _ = writeln!(
            out,
            r#"<path d="{bonds}" fill="none" stroke="{}" stroke-width="{}" stroke-linecap="round"/>"#,
            style.stroke,
            fmt(stroke_width)
        );
    }
    if !text.is_empty() {
        let _ = writeln!(
            out,
            r#"<path d="{text}" fill="none" stroke="{}" stroke-width="{}" stroke-linecap="round" stroke-linejoin="round"/>"#,
            style.stroke,
            fmt((stroke_width * 0.8).max(1.0))
        );
    }
    out.push_str("</svg>\n");
    out
}

/// For a ring bond, +1 or -1 telling which side of `normal` the ring lies on.
fn ring_side(graph: &MolecularGraph, a: usize, b: usize, px: &[Point], normal: Point) -> Option<f64> {
    let ring = graph.rings().iter().filter(|r| r.contains_atom(a) && r.contains_atom(b)).min_by_key(|r| r.len())?;
    let n = ring.atoms.len() as f64;
    let center = ring.atoms.iter().fold(Point::default(), |acc, &i| acc.add(px[i])).scale(1.0 / n);
    let to_center = center.sub(px[a]);
    Some(if to_center.x * normal.x + to_center.y * normal.y >= 0.0 { 1.0 } else { -1.0 })
}
