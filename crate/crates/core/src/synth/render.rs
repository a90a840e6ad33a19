use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::glyphs::{glyph, Stroke};
use super::SynthError;
use crate::image::{GrayImage, WordImage, IMAGE_HEIGHT, IMAGE_WIDTH};
use crate::{math, rng};

/// Longest word the renderer accepts.
pub const MAX_WORD_LEN: usize = 24;
/// Row of the baseline on the 50-pixel canvas.
pub const BASELINE_ROW: f64 = 32.0;

const STYLE_SEED: u64 = 0x005E_ED0F_571E;
const MARGIN: f64 = 4.0;

/// Handwriting-like rendering parameters derived from a style id.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Style {
    /// Pixels per x-height.
    pub unit: f64,
    pub thickness: f64,
    /// Horizontal shift per unit of height.
    pub slant: f64,
    pub width_scale: f64,
    /// Gap between letters in x-height units.
    pub spacing: f64,
    /// Per-letter displacement amplitude in x-height units.
    pub jitter: f64,
    /// Gray level of a fully covered pixel.
    pub ink: u8,
}

impl Style {
    pub fn from_id(id: u32) -> Self {
        let mut r = rng::stream(STYLE_SEED, "style", u64::from(id));
        Self {
            unit: r.random_range(10.5..13.0),
            thickness: r.random_range(1.3..2.3),
            slant: r.random_range(-0.15..0.3),
            width_scale: r.random_range(0.85..1.15),
            spacing: r.random_range(0.15..0.35),
            jitter: r.random_range(0.0..0.05),
            ink: r.random_range(0..40),
        }
    }
}

fn arc_points(center: (f64, f64), radii: (f64, f64), start: f64, end: f64, out: &mut Vec<(f64, f64)>) {
    let sweep = end - start;
    let n = ((sweep.abs() / 15.0) as usize).max(6);
    for k in 0..=n {
        let a = (start + sweep * k as f64 / n as f64).to_radians();
        out.push((center.0 + radii.0 * math::cos(a), center.1 + radii.1 * math::sin(a)));
    }
}

/// Polylines of a word in slanted unit coordinates.
fn layout(word: &str, style: &Style) -> Result<Vec<Vec<(f64, f64)>>, SynthError> {
    let mut lines = Vec::new();
    let mut cursor = 0.0;
    for (pos, ch) in word.chars().enumerate() {
        let g = glyph(ch).ok_or(SynthError::UnknownCharacter(ch))?;
        let mut r = rng::stream(STYLE_SEED ^ u64::from(ch), word, pos as u64);
        let j = style.jitter;
        let (dx, dy) = if j > 0.0 { (r.random_range(-j..j), r.random_range(-j..j)) } else { (0.0, 0.0) };
        let sy = 1.0 + if j > 0.0 { r.random_range(-j..j) } else { 0.0 };
        for s in g.strokes {
            let mut pts = Vec::new();
            match s.stroke {
                Stroke::Line { from, to } => {
                    pts.push(from);
                    pts.push(to);
                }
                Stroke::Arc { center, radii, start, end } => arc_points(center, radii, start, end, &mut pts),
            }
            lines.push(
                pts.into_iter()
                    .map(|(x, y)| {
                        let y = y * sy + dy;
                        (cursor + x * style.width_scale + dx + style.slant * y, y)
                    })
                    .collect(),
            );
        }
        cursor += g.width * style.width_scale + style.spacing;
    }
    Ok(lines)
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (vx, vy) = (b.0 - a.0, b.1 - a.1);
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * vx + (p.1 - a.1) * vy) / len2).clamp(0.0, 1.0) };
    let (dx, dy) = (p.0 - a.0 - t * vx, p.1 - a.1 - t * vy);
    math::sqrt(dx * dx + dy * dy)
}

/// Renders `word` on a white 250x50 canvas. Words wider than the canvas are
/// scaled down uniformly; the result is centered horizontally.
pub fn render_word(word: &str, style_id: u32) -> Result<WordImage, SynthError> {
    let n = word.chars().count();
    if n == 0 {
        return Err(SynthError::EmptyWord);
    }
    if n > MAX_WORD_LEN {
        return Err(SynthError::WordTooLong {
            word: word.to_string(),
            len: n,
            max: MAX_WORD_LEN,
        });
    }
    let style = Style::from_id(style_id);
    let lines = layout(word, &style)?;
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in lines.iter().flatten() {
        xmin = xmin.min(p.0);
        xmax = xmax.max(p.0);
    }
    let span = (xmax - xmin).max(1e-9);
    let avail = IMAGE_WIDTH as f64 - 2.0 * MARGIN - style.thickness;
    let scale = style.unit.min(avail / span);
    let thickness = style.thickness * (scale / style.unit).max(0.6);
    let left = (IMAGE_WIDTH as f64 - span * scale) / 2.0;
    let mut cover = alloc::vec![0.0f64; IMAGE_WIDTH * IMAGE_HEIGHT];
    let half = thickness / 2.0;
    for line in &lines {
        let px: Vec<(f64, f64)> =
            line.iter().map(|&(x, y)| (left + (x - xmin) * scale, BASELINE_ROW - y * scale)).collect();
        for w in px.windows(2) {
            let (a, b) = (w[0], w[1]);
            let x0 = (a.0.min(b.0) - half - 1.0).max(0.0) as usize;
            let x1 = ((a.0.max(b.0) + half + 1.0) as usize).min(IMAGE_WIDTH - 1);
            let y0 = (a.1.min(b.1) - half - 1.0).max(0.0) as usize;
            let y1 = ((a.1.max(b.1) + half + 1.0) as usize).min(IMAGE_HEIGHT - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let d = segment_distance((x as f64 + 0.5, y as f64 + 0.5), a, b);
                    let c = (half + 0.5 - d).clamp(0.0, 1.0);
                    let slot = &mut cover[y * IMAGE_WIDTH + x];
                    if c > *slot {
                        *slot = c;
                    }
                }
            }
        }
    }
    let ink = f64::from(style.ink);
    let pixels = cover.iter().map(|&c| math::round(255.0 - c * (255.0 - ink)) as u8).collect();
    Ok(WordImage {
        image: GrayImage::from_pixels(IMAGE_WIDTH, IMAGE_HEIGHT, pixels).expect("canvas size"),
        label: word.to_string(),
        style_id,
    })
}
