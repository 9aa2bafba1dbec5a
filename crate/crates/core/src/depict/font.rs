//! A minimal stroke font so labels render identically without system fonts.
//!
//! Glyphs live on a grid where the cap height is 1 and the baseline is 0.

type Stroke = &'static [(f64, f64)];

pub(crate) struct Glyph {
    pub strokes: &'static [Stroke],
    pub width: f64,
}

const ROUND_O: Stroke =
    &[(0.15, 0.0), (0.45, 0.0), (0.6, 0.2), (0.6, 0.8), (0.45, 1.0), (0.15, 1.0), (0.0, 0.8), (0.0, 0.2), (0.15, 0.0)];
const ROUND_C: Stroke =
    &[(0.6, 0.85), (0.45, 1.0), (0.15, 1.0), (0.0, 0.8), (0.0, 0.2), (0.15, 0.0), (0.45, 0.0), (0.6, 0.15)];
const SMALL_O: Stroke = &[
    (0.15, 0.0),
    (0.35, 0.0),
    (0.5, 0.15),
    (0.5, 0.45),
    (0.35, 0.6),
    (0.15, 0.6),
    (0.0, 0.45),
    (0.0, 0.15),
    (0.15, 0.0),
];
const SMALL_BOWL: Stroke =
    &[(0.5, 0.45), (0.35, 0.6), (0.15, 0.6), (0.0, 0.45), (0.0, 0.15), (0.15, 0.0), (0.35, 0.0), (0.5, 0.15)];
const BOX: Stroke = &[(0.0, 0.0), (0.6, 0.0), (0.6, 1.0), (0.0, 1.0), (0.0, 0.0)];

pub(crate) fn glyph(c: char) -> Glyph {
    let (strokes, width): (&'static [Stroke], f64) = match c {
        'A' => (&[&[(0.0, 0.0), (0.3, 1.0), (0.6, 0.0)], &[(0.12, 0.4), (0.48, 0.4)]], 0.6),
        'B' => (
            &[&[
                (0.0, 0.5),
                (0.45, 0.5),
                (0.6, 0.65),
                (0.6, 0.85),
                (0.45, 1.0),
                (0.0, 1.0),
                (0.0, 0.0),
                (0.45, 0.0),
                (0.6, 0.15),
                (0.6, 0.35),
                (0.45, 0.5),
            ]],
            0.6,
        ),
        'C' => (&[ROUND_C], 0.6),
        'E' => (&[&[(0.6, 1.0), (0.0, 1.0), (0.0, 0.0), (0.6, 0.0)], &[(0.0, 0.5), (0.45, 0.5)]], 0.6),
        'F' => (&[&[(0.6, 1.0), (0.0, 1.0), (0.0, 0.0)], &[(0.0, 0.5), (0.45, 0.5)]], 0.6),
        'G' => (&[ROUND_C, &[(0.6, 0.15), (0.6, 0.45), (0.35, 0.45)]], 0.6),
        'H' => (&[&[(0.0, 0.0), (0.0, 1.0)], &[(0.6, 0.0), (0.6, 1.0)], &[(0.0, 0.5), (0.6, 0.5)]], 0.6),
        'I' => (&[&[(0.1, 1.0), (0.5, 1.0)], &[(0.3, 1.0), (0.3, 0.0)], &[(0.1, 0.0), (0.5, 0.0)]], 0.6),
        'K' => (&[&[(0.0, 0.0), (0.0, 1.0)], &[(0.6, 1.0), (0.0, 0.4)], &[(0.2, 0.6), (0.6, 0.0)]], 0.6),
        'L' => (&[&[(0.0, 1.0), (0.0, 0.0), (0.6, 0.0)]], 0.6),
        'N' => (&[&[(0.0, 0.0), (0.0, 1.0), (0.6, 0.0), (0.6, 1.0)]], 0.6),
        'O' => (&[ROUND_O], 0.6),
        'P' => (&[&[(0.0, 0.0), (0.0, 1.0), (0.45, 1.0), (0.6, 0.85), (0.6, 0.65), (0.45, 0.5), (0.0, 0.5)]], 0.6),
        'S' => (
            &[&[
                (0.6, 0.85),
                (0.45, 1.0),
                (0.15, 1.0),
                (0.0, 0.85),
                (0.0, 0.65),
                (0.15, 0.5),
                (0.45, 0.5),
                (0.6, 0.35),
                (0.6, 0.15),
                (0.45, 0.0),
                (0.15, 0.0),
                (0.0, 0.15),
            ]],
            0.6,
        ),
        'T' => (&[&[(0.0, 1.0), (0.6, 1.0)], &[(0.3, 1.0), (0.3, 0.0)]], 0.6),
        'Z' => (&[&[(0.0, 1.0), (0.6, 1.0), (0.0, 0.0), (0.6, 0.0)]], 0.6),
        'a' => (&[&[(0.5, 0.6), (0.5, 0.0)], SMALL_BOWL], 0.5),
        'e' => (
            &[&[
                (0.0, 0.3),
                (0.5, 0.3),
                (0.5, 0.45),
                (0.35, 0.6),
                (0.15, 0.6),
                (0.0, 0.45),
                (0.0, 0.15),
                (0.15, 0.0),
                (0.45, 0.0),
            ]],
            0.5,
        ),
        'g' => (&[&[(0.5, 0.6), (0.5, -0.15), (0.35, -0.3), (0.1, -0.3)], SMALL_BOWL], 0.5),
        'i' => (&[&[(0.1, 0.6), (0.1, 0.0)], &[(0.1, 0.8), (0.1, 0.85)]], 0.2),
        'l' => (&[&[(0.1, 1.0), (0.1, 0.0)]], 0.2),
        'n' => (&[&[(0.0, 0.6), (0.0, 0.0)], &[(0.0, 0.45), (0.15, 0.6), (0.35, 0.6), (0.5, 0.45), (0.5, 0.0)]], 0.5),
        'o' => (&[SMALL_O], 0.5),
        'r' => (&[&[(0.0, 0.6), (0.0, 0.0)], &[(0.0, 0.35), (0.2, 0.55), (0.45, 0.6)]], 0.45),
        's' => (
            &[&[
                (0.5, 0.55),
                (0.35, 0.6),
                (0.1, 0.6),
                (0.0, 0.5),
                (0.05, 0.35),
                (0.45, 0.25),
                (0.5, 0.1),
                (0.4, 0.0),
                (0.1, 0.0),
                (0.0, 0.05),
            ]],
            0.5,
        ),
        't' => (&[&[(0.2, 0.9), (0.2, 0.1), (0.3, 0.0), (0.45, 0.0)], &[(0.0, 0.6), (0.4, 0.6)]], 0.45),
        '0' => (&[ROUND_O], 0.6),
        '1' => (&[&[(0.1, 0.8), (0.3, 1.0), (0.3, 0.0)], &[(0.1, 0.0), (0.5, 0.0)]], 0.6),
        '2' => (&[&[(0.0, 0.8), (0.15, 1.0), (0.45, 1.0), (0.6, 0.8), (0.6, 0.6), (0.0, 0.0), (0.6, 0.0)]], 0.6),
        '3' => (
            &[&[
                (0.0, 0.85),
                (0.15, 1.0),
                (0.45, 1.0),
                (0.6, 0.85),
                (0.6, 0.65),
                (0.45, 0.5),
                (0.2, 0.5),
                (0.45, 0.5),
                (0.6, 0.35),
                (0.6, 0.15),
                (0.45, 0.0),
                (0.15, 0.0),
                (0.0, 0.15),
            ]],
            0.6,
        ),
        '4' => (&[&[(0.45, 0.0), (0.45, 1.0), (0.0, 0.3), (0.6, 0.3)]], 0.6),
        '5' => (
            &[&[
                (0.6, 1.0),
                (0.0, 1.0),
                (0.0, 0.55),
                (0.4, 0.6),
                (0.6, 0.4),
                (0.6, 0.15),
                (0.45, 0.0),
                (0.1, 0.0),
                (0.0, 0.1),
            ]],
            0.6,
        ),
        '6' => (
            &[&[
                (0.55, 0.9),
                (0.4, 1.0),
                (0.15, 1.0),
                (0.0, 0.8),
                (0.0, 0.15),
                (0.15, 0.0),
                (0.45, 0.0),
                (0.6, 0.15),
                (0.6, 0.4),
                (0.45, 0.55),
                (0.15, 0.55),
                (0.0, 0.4),
            ]],
            0.6,
        ),
        '7' => (&[&[(0.0, 1.0), (0.6, 1.0), (0.2, 0.0)]], 0.6),
        '8' => (
            &[&[
                (0.3, 0.5),
                (0.05, 0.6),
                (0.05, 0.9),
                (0.3, 1.0),
                (0.55, 0.9),
                (0.55, 0.6),
                (0.3, 0.5),
                (0.0, 0.35),
                (0.0, 0.1),
                (0.3, 0.0),
                (0.6, 0.1),
                (0.6, 0.35),
                (0.3, 0.5),
            ]],
            0.6,
        ),
        '9' => (
            &[&[
                (0.05, 0.1),
                (0.2, 0.0),
                (0.45, 0.0),
                (0.6, 0.2),
                (0.6, 0.85),
                (0.45, 1.0),
                (0.15, 1.0),
                (0.0, 0.85),
                (0.0, 0.6),
                (0.15, 0.45),
                (0.45, 0.45),
                (0.6, 0.6),
            ]],
            0.6,
        ),
        '+' => (&[&[(0.3, 0.2), (0.3, 0.8)], &[(0.0, 0.5), (0.6, 0.5)]], 0.6),
        '-' => (&[&[(0.1, 0.5), (0.5, 0.5)]], 0.6),
        '*' => (&[&[(0.3, 0.1), (0.3, 0.9)], &[(0.05, 0.3), (0.55, 0.7)], &[(0.05, 0.7), (0.55, 0.3)]], 0.6),
        _ => (&[BOX], 0.6),
    };
    Glyph { strokes, width }
}

/// Horizontal gap between glyphs, in cap heights.
pub(crate) const TRACKING: f64 = 0.2;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_letters_are_defined() {
        for c in "BCFHIKNOPSaeilnorst0123456789+-*".chars() {
            let g = glyph(c);
            assert!(!std::ptr::eq(g.strokes[0], BOX), "{c}");
        }
    }

    #[test]
    fn strokes_stay_near_the_cell() {
        for c in "ABCEFGHIKLNOPSTZaegilnorst0123456789+-*".chars() {
            let g = glyph(c);
            for stroke in g.strokes {
                assert!(stroke.len() >= 2);
                for &(x, y) in stroke.iter() {
                    assert!((0.0..=g.width + 1e-9).contains(&x), "{c}");
                    assert!((-0.3..=1.0).contains(&y), "{c}");
                }
            }
        }
    }
}
