//! Stroke skeletons for the lowercase Latin alphabet.
//!
//! Coordinates are in x-height units with the baseline at `y = 0`, the
//! x-height at `y = 1`, ascenders reaching `1.75` and descenders `-0.75`.
//! Every stroke that realizes one of the primitive shapes carries that shape
//! as its tag, so a glyph's tag census reproduces its row in the default
//! shape table.

use crate::signature::Shape;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stroke {
    Line { from: (f64, f64), to: (f64, f64) },
    /// Elliptical arc, angles in degrees counter-clockwise from +x.
    Arc { center: (f64, f64), radii: (f64, f64), start: f64, end: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaggedStroke {
    pub stroke: Stroke,
    pub shape: Option<Shape>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Glyph {
    pub ch: char,
    pub width: f64,
    pub strokes: &'static [TaggedStroke],
}

const fn line(x0: f64, y0: f64, x1: f64, y1: f64, shape: Shape) -> TaggedStroke {
    TaggedStroke {
        stroke: Stroke::Line { from: (x0, y0), to: (x1, y1) },
        shape: Some(shape),
    }
}

#[allow(clippy::too_many_arguments)]
const fn arc(cx: f64, cy: f64, rx: f64, ry: f64, start: f64, end: f64, shape: Shape) -> TaggedStroke {
    TaggedStroke {
        stroke: Stroke::Arc { center: (cx, cy), radii: (rx, ry), start, end },
        shape: Some(shape),
    }
}

/// The dot over `i` and `j` is decoration, not a shape.
const fn dot(x: f64) -> TaggedStroke {
    TaggedStroke {
        stroke: Stroke::Line { from: (x, 1.35), to: (x, 1.45) },
        shape: None,
    }
}

use Shape::{
    Ascender as Asc, Circle as Circ, Descender as Desc, Diagonal135 as D135, DiagonalLine as Diag,
    HorizontalLine as Hor, LeftLargeSemiCircle as Lls, LeftSmallSemiCircle as Lss, RightLargeSemiCircle as Rls,
    RightSmallSemiCircle as Rss, VerticalLine as Vert,
};

const ARCH: f64 = 0.6;

static GLYPHS: [Glyph; 26] = [
    Glyph { ch: 'a', width: 0.8, strokes: &[arc(0.4, 0.42, 0.4, 0.42, 90.0, 270.0, Lls), line(0.8, 0.0, 0.8, 0.9, Vert)] },
    Glyph {
        ch: 'b',
        width: 0.75,
        strokes: &[line(0.0, 1.0, 0.0, 1.75, Asc), line(0.0, 0.0, 0.0, 1.0, Vert), arc(0.15, 0.5, 0.6, 0.5, -90.0, 90.0, Rls)],
    },
    Glyph { ch: 'c', width: 0.75, strokes: &[arc(0.45, 0.5, 0.45, 0.5, 55.0, 305.0, Lls)] },
    Glyph {
        ch: 'd',
        width: 0.85,
        strokes: &[line(0.85, 1.0, 0.85, 1.75, Asc), line(0.85, 0.0, 0.85, 1.0, Vert), arc(0.7, 0.5, 0.7, 0.5, 90.0, 270.0, Lls)],
    },
    Glyph { ch: 'e', width: 0.8, strokes: &[arc(0.42, 0.5, 0.42, 0.5, 20.0, 310.0, Lls), line(0.0, 0.5, 0.84, 0.5, Hor)] },
    Glyph {
        ch: 'f',
        width: 0.6,
        strokes: &[
            line(0.2, 1.0, 0.2, 1.55, Asc),
            arc(0.4, 1.55, 0.2, 0.18, 0.0, 180.0, Rss),
            line(0.2, 0.0, 0.2, 1.0, Vert),
            line(0.0, 1.0, 0.5, 1.0, Hor),
        ],
    },
    Glyph {
        ch: 'g',
        width: 0.85,
        strokes: &[
            line(0.85, 0.5, 0.85, -0.5, Desc),
            arc(0.55, -0.5, 0.3, 0.25, 180.0, 360.0, Lss),
            arc(0.45, 0.55, 0.4, 0.45, 0.0, 360.0, Circ),
        ],
    },
    Glyph {
        ch: 'h',
        width: 0.75,
        strokes: &[
            line(0.0, 1.0, 0.0, 1.75, Asc),
            arc(0.375, ARCH, 0.375, 0.35, 0.0, 180.0, Rss),
            line(0.0, 0.0, 0.0, 1.0, Vert),
            line(0.75, 0.0, 0.75, ARCH, Vert),
        ],
    },
    Glyph { ch: 'i', width: 0.2, strokes: &[line(0.1, 0.0, 0.1, 1.0, Vert), dot(0.1)] },
    Glyph {
        ch: 'j',
        width: 0.45,
        strokes: &[
            line(0.35, 0.0, 0.35, -0.5, Desc),
            arc(0.15, -0.5, 0.2, 0.25, 180.0, 360.0, Lss),
            line(0.35, 0.0, 0.35, 1.0, Vert),
            dot(0.35),
        ],
    },
    Glyph {
        ch: 'k',
        width: 0.7,
        strokes: &[
            line(0.0, 1.0, 0.0, 1.75, Asc),
            line(0.0, 0.0, 0.0, 1.0, Vert),
            line(0.05, 0.35, 0.65, 1.0, Diag),
            line(0.25, 0.55, 0.7, 0.0, D135),
        ],
    },
    Glyph { ch: 'l', width: 0.2, strokes: &[line(0.1, 1.0, 0.1, 1.75, Asc), line(0.1, 0.0, 0.1, 1.0, Vert)] },
    Glyph {
        ch: 'm',
        width: 1.2,
        strokes: &[
            arc(0.3, ARCH, 0.3, 0.35, 0.0, 180.0, Rss),
            arc(0.9, ARCH, 0.3, 0.35, 0.0, 180.0, Rss),
            line(0.0, 0.0, 0.0, 1.0, Vert),
            line(0.6, 0.0, 0.6, ARCH, Vert),
            line(1.2, 0.0, 1.2, ARCH, Vert),
        ],
    },
    Glyph {
        ch: 'n',
        width: 0.75,
        strokes: &[
            arc(0.375, ARCH, 0.375, 0.35, 0.0, 180.0, Rss),
            line(0.0, 0.0, 0.0, 1.0, Vert),
            line(0.75, 0.0, 0.75, ARCH, Vert),
        ],
    },
    Glyph { ch: 'o', width: 0.85, strokes: &[arc(0.425, 0.5, 0.425, 0.5, 0.0, 360.0, Circ)] },
    Glyph {
        ch: 'p',
        width: 0.75,
        strokes: &[line(0.0, 0.0, 0.0, -0.75, Desc), arc(0.15, 0.5, 0.6, 0.5, -90.0, 90.0, Rls), line(0.0, 0.0, 0.0, 1.0, Vert)],
    },
    Glyph {
        ch: 'q',
        width: 0.85,
        strokes: &[line(0.85, 0.0, 0.85, -0.75, Desc), arc(0.7, 0.5, 0.7, 0.5, 90.0, 270.0, Lls), line(0.85, 0.0, 0.85, 1.0, Vert)],
    },
    Glyph {
        ch: 'r',
        width: 0.55,
        strokes: &[arc(0.3, ARCH, 0.3, 0.35, 30.0, 180.0, Rss), line(0.0, 0.0, 0.0, 1.0, Vert)],
    },
    Glyph {
        ch: 's',
        width: 0.65,
        strokes: &[arc(0.33, 0.75, 0.3, 0.25, 45.0, 270.0, Lss), arc(0.33, 0.25, 0.3, 0.25, -135.0, 90.0, Rss)],
    },
    Glyph {
        ch: 't',
        width: 0.55,
        strokes: &[line(0.25, 1.0, 0.25, 1.5, Asc), line(0.25, 0.0, 0.25, 1.0, Vert), line(0.0, 1.0, 0.55, 1.0, Hor)],
    },
    Glyph {
        ch: 'u',
        width: 0.75,
        strokes: &[
            arc(0.375, 0.4, 0.375, 0.4, 180.0, 360.0, Lss),
            line(0.0, 0.4, 0.0, 1.0, Vert),
            line(0.75, 0.0, 0.75, 1.0, Vert),
        ],
    },
    Glyph { ch: 'v', width: 0.75, strokes: &[line(0.375, 0.0, 0.75, 1.0, Diag), line(0.0, 1.0, 0.375, 0.0, D135)] },
    Glyph {
        ch: 'w',
        width: 1.2,
        strokes: &[
            line(0.3, 0.0, 0.6, 1.0, Diag),
            line(0.9, 0.0, 1.2, 1.0, Diag),
            line(0.0, 1.0, 0.3, 0.0, D135),
            line(0.6, 1.0, 0.9, 0.0, D135),
        ],
    },
    Glyph { ch: 'x', width: 0.7, strokes: &[line(0.0, 0.0, 0.7, 1.0, Diag), line(0.0, 1.0, 0.7, 0.0, D135)] },
    Glyph {
        ch: 'y',
        width: 0.75,
        strokes: &[line(0.38, 0.0, 0.15, -0.75, Desc), line(0.38, 0.0, 0.75, 1.0, Diag), line(0.0, 1.0, 0.38, 0.0, D135)],
    },
    Glyph {
        ch: 'z',
        width: 0.7,
        strokes: &[line(0.0, 0.0, 0.7, 1.0, Diag), line(0.0, 1.0, 0.7, 1.0, Hor), line(0.0, 0.0, 0.7, 0.0, Hor)],
    },
];

pub fn glyph(ch: char) -> Option<&'static Glyph> {
    let i = (ch as u32).checked_sub('a' as u32)? as usize;
    GLYPHS.get(i).filter(|g| g.ch == ch)
}

pub fn glyphs() -> &'static [Glyph] {
    &GLYPHS
}

/// Number of strokes per shape in a glyph, in shape-table order.
pub fn census(g: &Glyph) -> crate::signature::ShapeCounts {
    let mut counts = [0u8; crate::signature::NUM_SHAPES];
    for s in g.strokes {
        if let Some(shape) = s.shape {
            counts[shape as usize] += 1;
        }
    }
    counts
}
