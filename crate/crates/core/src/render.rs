//! Drawing configurations for terminals and browsers.
//!
//! The grid is drawn with rows of constant `y` and each step in `y` shifted
//! half a cell, so all six neighbor directions look equidistant. In ASCII a
//! grid point occupies every second column (`column = 2x + y`), which leaves
//! room for a `-` between horizontally linked buddies.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::analysis::Window;
use crate::geometry::Point;
use crate::model::{Configuration, PairState};

#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Emit ANSI colors (object blue, robots yellow, head pair magenta,
    /// highlights green).
    pub color: bool,
    /// Extra points to mark — typically a coating set.
    pub highlight: BTreeSet<Point>,
    /// Blank ring drawn around everything, in grid cells.
    pub margin: i64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            color: false,
            highlight: BTreeSet::new(),
            margin: 1,
        }
    }
}

const ANSI_RESET: &str = "\x1b[0m";
const ANSI_OBJECT: &str = "\x1b[34m";
const ANSI_ROBOT: &str = "\x1b[33m";
const ANSI_HEAD: &str = "\x1b[35m";
const ANSI_MARK: &str = "\x1b[32m";

fn drawn_window(c: &Configuration, opts: &RenderOptions) -> Option<Window> {
    Window::around(
        c.object()
            .iter()
            .copied()
            .chain(c.positions().iter().copied())
            .chain(opts.highlight.iter().copied()),
        opts.margin,
    )
}

/// Renders the configuration as text, one row per `y`, top row first.
/// Glyphs: `#` object, `o` one robot, `8` two robots, `*` highlighted free
/// point, `.` empty point, `-` a horizontally linked Long pair.
pub fn render_ascii(c: &Configuration, opts: &RenderOptions) -> String {
    let Some(window) = drawn_window(c, opts) else {
        return String::new();
    };
    // Screen column of a grid point, before normalization.
    let column = |p: Point| 2 * p.x + p.y;
    let min_col = (window.min_y..=window.max_y)
        .map(|y| 2 * window.min_x + y)
        .min()
        .unwrap();
    let max_col = (window.min_y..=window.max_y)
        .map(|y| 2 * window.max_x + y)
        .max()
        .unwrap();
    let width = usize::try_from(max_col - min_col + 1).unwrap();

    let head_points: BTreeSet<Point> = match c.head_pair() {
        Some(pair) => {
            let (a, b) = c.pair_points(pair).expect("head pair in range");
            BTreeSet::from([a, b])
        }
        None => BTreeSet::new(),
    };

    let mut lines = Vec::new();
    for y in (window.min_y..=window.max_y).rev() {
        let mut glyphs: Vec<char> = vec![' '; width];
        let mut colors: Vec<&str> = vec![""; width];
        for x in window.min_x..=window.max_x {
            let p = Point::new(x, y);
            let col = usize::try_from(column(p) - min_col).unwrap();
            let robots = c.robots_at(p);
            let (glyph, color) = if robots >= 2 {
                ('8', if head_points.contains(&p) { ANSI_HEAD } else { ANSI_ROBOT })
            } else if robots == 1 {
                ('o', if head_points.contains(&p) { ANSI_HEAD } else { ANSI_ROBOT })
            } else if c.object().contains(&p) {
                ('#', ANSI_OBJECT)
            } else if opts.highlight.contains(&p) {
                ('*', ANSI_MARK)
            } else {
                ('.', "")
            };
            glyphs[col] = glyph;
            colors[col] = color;
        }
        // Tie horizontally adjacent buddies together.
        for pair in 0..c.n_pairs() {
            let (a, b) = c.pair_points(pair).expect("pair index in range");
            if a.y == y && b.y == y && (a.x - b.x).abs() == 1 {
                let col = usize::try_from(column(a) + column(b) - 2 * min_col).unwrap() / 2;
                glyphs[col] = '-';
            }
        }
        let mut line = String::new();
        for (glyph, color) in glyphs.iter().zip(&colors) {
            if opts.color && !color.is_empty() && *glyph != ' ' {
                let _ = write!(line, "{color}{glyph}{ANSI_RESET}");
            } else {
                line.push(*glyph);
            }
        }
        lines.push(line.trim_end().to_string());
    }
    lines.join("\n")
}

const SVG_STEP: f64 = 40.0;
// Vertical distance between rows on a unit-40 triangular grid.
const SVG_ROW: f64 = 34.641_016_151_377_54;

fn svg_center(p: Point) -> (f64, f64) {
    // `+ 0.0` turns negative zero into plain zero before formatting.
    (
        SVG_STEP * (p.x as f64 + p.y as f64 / 2.0) + 0.0,
        -SVG_ROW * p.y as f64 + 0.0,
    )
}

/// Renders the configuration as a standalone SVG document.
pub fn render_svg(c: &Configuration, opts: &RenderOptions) -> String {
    let Some(window) = drawn_window(c, opts) else {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>".to_string();
    };
    let corners = [
        Point::new(window.min_x, window.min_y),
        Point::new(window.min_x, window.max_y),
        Point::new(window.max_x, window.min_y),
        Point::new(window.max_x, window.max_y),
    ];
    let xs = corners.map(|p| svg_center(p).0);
    let ys = corners.map(|p| svg_center(p).1);
    let pad = SVG_STEP;
    let min_x = xs.iter().copied().fold(f64::INFINITY, f64::min) - pad;
    let max_x = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad;
    let min_y = ys.iter().copied().fold(f64::INFINITY, f64::min) - pad;
    let max_y = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.2} {:.2} {:.2} {:.2}\">\n",
        min_x,
        min_y,
        max_x - min_x,
        max_y - min_y
    );

    // Faint dots for the empty grid, so the geometry is legible.
    for p in window.points() {
        if c.object().contains(&p) || c.robots_at(p) > 0 || opts.highlight.contains(&p) {
            continue;
        }
        let (cx, cy) = svg_center(p);
        let _ = write!(
            svg,
            "  <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"2.00\" fill=\"#d0d0d0\"/>\n"
        );
    }
    for &p in &opts.highlight {
        if c.object().contains(&p) || c.robots_at(p) > 0 {
            continue;
        }
        let (cx, cy) = svg_center(p);
        let _ = write!(
            svg,
            "  <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"8.00\" fill=\"none\" \
             stroke=\"#2e8b57\" stroke-width=\"2.00\"/>\n"
        );
    }
    for &p in c.object() {
        let (cx, cy) = svg_center(p);
        let _ = write!(
            svg,
            "  <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"16.00\" fill=\"#4682b4\"/>\n"
        );
    }
    // Links first so robot disks sit on top of them.
    for pair in 0..c.n_pairs() {
        if c.pair_state(pair) == Ok(PairState::Long) {
            let (a, b) = c.pair_points(pair).expect("pair index in range");
            let (x1, y1) = svg_center(a);
            let (x2, y2) = svg_center(b);
            let _ = write!(
                svg,
                "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
                 stroke=\"#b8860b\" stroke-width=\"4.00\"/>\n"
            );
        }
    }
    let head_points: BTreeSet<Point> = match c.head_pair() {
        Some(pair) => {
            let (a, b) = c.pair_points(pair).expect("head pair in range");
            BTreeSet::from([a, b])
        }
        None => BTreeSet::new(),
    };
    let occupied: BTreeSet<Point> = c.positions().iter().copied().collect();
    for &p in &occupied {
        let (cx, cy) = svg_center(p);
        let stroke = if head_points.contains(&p) {
            "#8b008b"
        } else {
            "none"
        };
        let _ = write!(
            svg,
            "  <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"10.00\" fill=\"#ffa500\" \
             stroke=\"{stroke}\" stroke-width=\"3.00\"/>\n"
        );
        if c.robots_at(p) >= 2 {
            let _ = write!(
                svg,
                "  <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4.00\" fill=\"#8b0000\"/>\n"
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
