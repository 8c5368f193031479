//! Bounding-box collision model used by the sensing blocks.
//!
//! Sprites are axis-aligned boxes sized by their costume and size percentage.
//! Overlap is tested on open intervals: boxes that only share an edge do not
//! touch.

use crate::ast::{ColorRegion, Costume};
use crate::vm::{SpriteState, STAGE_HALF_HEIGHT, STAGE_HALF_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn centered(x: f64, y: f64, width: f64, height: f64) -> Self {
        Rect { min_x: x - width / 2.0, min_y: y - height / 2.0, max_x: x + width / 2.0, max_y: y + height / 2.0 }
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        self.min_x < other.max_x
            && other.min_x < self.max_x
            && self.min_y < other.max_y
            && other.min_y < self.max_y
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        self.min_x < x && x < self.max_x && self.min_y < y && y < self.max_y
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }
}

pub fn bounds(sprite: &SpriteState, costume: &Costume) -> Rect {
    let scale = sprite.size / 100.0;
    Rect::centered(sprite.x, sprite.y, costume.width * scale, costume.height * scale)
}

/// True when the box reaches or crosses the stage border.
pub fn touches_edge(r: &Rect) -> bool {
    r.min_x <= -STAGE_HALF_WIDTH
        || r.max_x >= STAGE_HALF_WIDTH
        || r.min_y <= -STAGE_HALF_HEIGHT
        || r.max_y >= STAGE_HALF_HEIGHT
}

pub fn region_rect(region: &ColorRegion) -> Rect {
    let (min_x, min_y, max_x, max_y) = region.bounds();
    Rect { min_x, min_y, max_x, max_y }
}

/// Parses `#rrggbb` (case-insensitive).
pub fn parse_color(s: &str) -> Option<[u8; 3]> {
    let hex = s.trim().strip_prefix('#')?;
    if hex.len() != 6 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
    Some([channel(0)?, channel(2)?, channel(4)?])
}

/// True iff the box overlaps any region whose color equals `color`.
pub fn touches_color(r: &Rect, color: &str, regions: &[ColorRegion]) -> bool {
    let Some(wanted) = parse_color(color) else { return false };
    regions
        .iter()
        .filter(|reg| parse_color(&reg.color) == Some(wanted))
        .any(|reg| r.overlaps(&region_rect(reg)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Left,
    Top,
    Right,
    Bottom,
}

/// The stage edge the box is touching, nearest first, if any.
pub fn nearest_edge(r: &Rect) -> Option<Edge> {
    let candidates = [
        (Edge::Left, r.min_x + STAGE_HALF_WIDTH),
        (Edge::Top, STAGE_HALF_HEIGHT - r.max_y),
        (Edge::Right, STAGE_HALF_WIDTH - r.max_x),
        (Edge::Bottom, r.min_y + STAGE_HALF_HEIGHT),
    ];
    let (edge, dist) = candidates
        .into_iter()
        .fold((Edge::Left, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
    (dist <= 0.0).then_some(edge)
}
