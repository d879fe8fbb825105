//! Two-dimensional binary-expansion bitmaps of orbits.
//!
//! Pixel `(i, j)` of the bitmap seeded at `x` is white iff `3^i 2^j x mod 1 < 1/2`.
//! Moving right applies `x -> 2x`, moving down applies `x -> 3x`. Every pixel is
//! computed from exact residues.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::mul_mod_u64;
use crate::orbits::{Orbit, ReducedFraction};

pub const DEFAULT_SIZE: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    width: usize,
    height: usize,
    seed: ReducedFraction,
    /// Row-major, `true` = white.
    pixels: Vec<bool>,
}

#[inline]
fn is_white(r: u64, n: u64) -> bool {
    2 * (r as u128) < n as u128
}

/// Residue of `3^i x` over the seed's denominator.
fn row_residue(seed: ReducedFraction, row: usize) -> u64 {
    let n = seed.denominator().get();
    (0..row).fold(seed.numerator(), |s, _| mul_mod_u64(s, 3, n))
}

fn render_row(start: u64, n: u64, width: usize, out: &mut Vec<bool>) {
    let mut r = start;
    for _ in 0..width {
        out.push(is_white(r, n));
        r = mul_mod_u64(r, 2, n);
    }
}

pub fn render(seed: ReducedFraction, width: usize, height: usize) -> Bitmap {
    assert!(width >= 1 && height >= 1, "bitmap needs positive dimensions");
    let n = seed.denominator().get();
    let mut pixels = Vec::with_capacity(width * height);
    let mut s = seed.numerator();
    for _ in 0..height {
        render_row(s, n, width, &mut pixels);
        s = mul_mod_u64(s, 3, n);
    }
    Bitmap {
        width,
        height,
        seed,
        pixels,
    }
}

/// Bitmap seeded at the orbit's smallest point.
pub fn render_orbit(o: &Orbit, width: usize, height: usize) -> Bitmap {
    render(o.seed(), width, height)
}

impl Bitmap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn seed(&self) -> ReducedFraction {
        self.seed
    }

    #[inline]
    pub fn is_white(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col]
    }

    pub fn flip(&mut self, row: usize, col: usize) {
        let p = &mut self.pixels[row * self.width + col];
        *p = !*p;
    }

    pub fn white_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    pub fn black_count(&self) -> usize {
        self.pixels.len() - self.white_count()
    }

    fn row(&self, i: usize) -> &[bool] {
        &self.pixels[i * self.width..(i + 1) * self.width]
    }

    /// Smallest `p` with row `i` equal to row `i + p` throughout the window; `height` if none.
    pub fn row_period(&self) -> usize {
        (1..self.height)
            .find(|&p| (0..self.height - p).all(|i| self.row(i) == self.row(i + p)))
            .unwrap_or(self.height)
    }

    /// Smallest `p` with column `j` equal to column `j + p` throughout the window; `width` if none.
    pub fn column_period(&self) -> usize {
        (1..self.width)
            .find(|&p| {
                (0..self.height).all(|i| {
                    let row = self.row(i);
                    (0..self.width - p).all(|j| row[j] == row[j + p])
                })
            })
            .unwrap_or(self.width)
    }

    /// Binary PGM (`P5`, maxval 255), white = 255.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self
            .pixels
            .iter()
            .map(|&white| if white { 255 } else { 0 })
            .collect();
        w.write_all(&bytes)
    }

    /// Plain PBM (`P1`), `1` = black, raster lines at most 70 characters.
    pub fn write_pbm<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "P1\n{} {}\n", self.width, self.height)?;
        for i in 0..self.height {
            for chunk in self.row(i).chunks(70) {
                let line: String = chunk.iter().map(|&white| if white { '0' } else { '1' }).collect();
                writeln!(w, "{line}")?;
            }
        }
        Ok(())
    }
}

/// `sym_<n>_<rep>.pgm`
pub fn pgm_file_name(n: u64, rep: u64) -> String {
    format!("sym_{n}_{rep}.pgm")
}

/// Checks the bitmap against its seed and the add-and-shift row recurrence.
///
/// Row `i + 1` is the binary expansion of `y + 2y` where row `i` shows `y`.
/// Digits of `y` and `2y` are read from the bitmap; the carry into each column,
/// which depends on digits beyond the window, is computed from exact residues.
pub fn row_recurrence_check(b: &Bitmap) -> bool {
    let n = b.seed.denominator().get();
    let mut first = Vec::with_capacity(b.width);
    render_row(b.seed.numerator(), n, b.width, &mut first);
    if first != b.row(0) {
        return false;
    }
    let digit = |white: bool| u8::from(!white);
    let mut s = b.seed.numerator();
    for i in 0..b.height - 1 {
        // tail = 2^(j+1) y mod 1, as a residue
        let mut tail = mul_mod_u64(s, 2, n);
        for j in 0..b.width {
            let d_y = digit(b.is_white(i, j));
            let d_2y = if j + 1 < b.width {
                digit(b.is_white(i, j + 1))
            } else {
                digit(is_white(tail, n))
            };
            let next_tail = mul_mod_u64(tail, 2, n);
            let carry = u8::from(tail as u128 + next_tail as u128 >= n as u128);
            if (d_y + d_2y + carry) % 2 != digit(b.is_white(i + 1, j)) {
                return false;
            }
            tail = next_tail;
        }
        s = mul_mod_u64(s, 3, n);
    }
    true
}

/// A white triangle anchored at a point close to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub row: usize,
    pub col: usize,
    /// Least `a` with `3^a y > 1/2`: the vertical extent.
    pub tripling_steps: u32,
    /// Least `b` with `2^b y > 1/2`: the horizontal extent.
    pub doubling_steps: u32,
}

impl Triangle {
    pub fn area(&self) -> f64 {
        self.tripling_steps as f64 * self.doubling_steps as f64 / 2.0
    }
}

fn escape_steps(r: u64, n: u64, q: u128) -> u32 {
    let mut x = r as u128;
    let mut k = 0;
    while 2 * x <= n as u128 {
        x *= q;
        k += 1;
    }
    k
}

/// `(tripling_steps, doubling_steps)` for `y` in `(0, 1/2)`.
pub fn triangle_dims(y: ReducedFraction) -> Result<(u32, u32)> {
    let (r, n) = (y.numerator(), y.denominator().get());
    if !is_white(r, n) {
        return Err(Error::NotNearZero { k: r, n });
    }
    Ok((escape_steps(r, n, 3), escape_steps(r, n, 2)))
}

/// Triangle whose corner is pixel `(row, col)` of `b`.
pub fn triangle_at(b: &Bitmap, row: usize, col: usize) -> Result<Triangle> {
    let n = b.seed.denominator().get();
    let r = (0..col).fold(row_residue(b.seed, row), |s, _| mul_mod_u64(s, 2, n));
    let y = ReducedFraction::new(r, n)?;
    let (a, bb) = triangle_dims(y)?;
    Ok(Triangle {
        row,
        col,
        tripling_steps: a,
        doubling_steps: bb,
    })
}

/// A rectangle of `long` matching the periodic `short` pattern at one phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRegion {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
    pub row_phase: usize,
    pub col_phase: usize,
}

impl MatchRegion {
    pub fn area(&self) -> usize {
        self.height * self.width
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub row_period: usize,
    pub col_period: usize,
    /// Largest matching rectangle per phase, biggest first. Phases that find the
    /// same rectangle are reported once.
    pub regions: Vec<MatchRegion>,
}

impl OverlapReport {
    pub fn largest(&self) -> Option<&MatchRegion> {
        self.regions.first()
    }
}

/// Largest all-true rectangle in a row-major mask: `(row, col, height, width)`.
fn largest_rectangle(mask: &[bool], width: usize, height: usize) -> (usize, usize, usize, usize) {
    let mut heights = vec![0usize; width];
    let mut best = (0, 0, 0, 0);
    let mut stack: Vec<usize> = Vec::with_capacity(width + 1);
    for i in 0..height {
        for j in 0..width {
            heights[j] = if mask[i * width + j] { heights[j] + 1 } else { 0 };
        }
        stack.clear();
        for j in 0..=width {
            let h = if j < width { heights[j] } else { 0 };
            while let Some(&top) = stack.last() {
                if heights[top] < h {
                    break;
                }
                stack.pop();
                let left = stack.last().map_or(0, |&l| l + 1);
                let (rh, rw) = (heights[top], j - left);
                if rh * rw > best.2 * best.3 {
                    best = (i + 1 - rh, left, rh, rw);
                }
            }
            stack.push(j);
        }
    }
    best
}

/// Regions where `long` reproduces `short` pixel for pixel, with `short`
/// extended periodically by its own row and column periods.
///
/// Cost is `row_period * col_period * width * height`.
pub fn shadowing_overlap(long: &Bitmap, short: &Bitmap) -> Result<OverlapReport> {
    if (long.width, long.height) != (short.width, short.height) {
        return Err(Error::DimensionMismatch(
            long.width,
            long.height,
            short.width,
            short.height,
        ));
    }
    let (w, h) = (long.width, long.height);
    let (rp, cp) = (short.row_period(), short.column_period());
    let mut mask = vec![false; w * h];
    let mut regions = Vec::new();
    for row_phase in 0..rp {
        for col_phase in 0..cp {
            for i in 0..h {
                let si = (i + row_phase) % rp;
                for j in 0..w {
                    mask[i * w + j] = long.is_white(i, j) == short.is_white(si, (j + col_phase) % cp);
                }
            }
            let (row, col, height, width) = largest_rectangle(&mask, w, h);
            let seen = regions.iter().any(|r: &MatchRegion| {
                (r.row, r.col, r.height, r.width) == (row, col, height, width)
            });
            if height * width > 0 && !seen {
                regions.push(MatchRegion {
                    row,
                    col,
                    height,
                    width,
                    row_phase,
                    col_phase,
                });
            }
        }
    }
    regions.sort_by(|a, b| b.area().cmp(&a.area()).then((a.row, a.col).cmp(&(b.row, b.col))));
    Ok(OverlapReport {
        row_period: rp,
        col_period: cp,
        regions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(k: u64, n: u64) -> ReducedFraction {
        ReducedFraction::new(k, n).unwrap()
    }

    fn row_pattern(b: &Bitmap, i: usize, len: usize) -> String {
        (0..len)
            .map(|j| if b.is_white(i, j) { 'W' } else { 'B' })
            .collect()
    }

    #[test]
    fn seventh_rows() {
        let b = render(frac(1, 7), 12, 2);
        assert_eq!(row_pattern(&b, 0, 12), "WWBWWBWWBWWB");
        assert_eq!(row_pattern(&b, 1, 12), "WBBWBBWBBWBB");
    }

    #[test]
    fn fifth_row() {
        let b = render(frac(1, 5), 12, 1);
        assert_eq!(row_pattern(&b, 0, 12), "WWBBWWBBWWBB");
    }

    #[test]
    fn recurrence_detects_corruption() {
        let mut b = render(frac(31, 609427), 64, 64);
        assert!(row_recurrence_check(&b));
        b.flip(20, 63);
        assert!(!row_recurrence_check(&b));
        let mut c = render(frac(1, 7), 5, 1);
        c.flip(0, 0);
        assert!(!row_recurrence_check(&c));
    }

    #[test]
    fn seventh_periods() {
        let b = render(frac(1, 7), 128, 128);
        assert!(row_recurrence_check(&b));
        assert_eq!(b.row_period(), 6);
        assert_eq!(b.column_period(), 3);
    }

    #[test]
    fn triangle_of_580615() {
        assert_eq!(triangle_dims(frac(1, 580615)).unwrap(), (12, 19));
        let b = render(frac(1, 580615), 32, 32);
        let t = triangle_at(&b, 0, 0).unwrap();
        assert_eq!((t.tripling_steps, t.doubling_steps), (12, 19));
        assert_eq!(t.area(), 114.0);
        assert_eq!(triangle_dims(frac(3, 5)), Err(Error::NotNearZero { k: 3, n: 5 }));
    }

    #[test]
    fn triangle_region_is_white() {
        let b = render(frac(1, 580615), 32, 32);
        for i in 0..12 {
            for j in 0..19 {
                // below the anti-diagonal 3^i 2^j y stays under 1/2
                if 3f64.powi(i as i32) * 2f64.powi(j as i32) / 580615.0 < 0.5 {
                    assert!(b.is_white(i, j), "({i}, {j})");
                }
            }
        }
    }

    #[test]
    fn overlap_with_self_is_full() {
        let b = render(frac(1, 7), 24, 24);
        let rep = shadowing_overlap(&b, &b).unwrap();
        assert_eq!(rep.largest().unwrap().area(), 24 * 24);
        let other = render(frac(1, 7), 24, 12);
        assert!(shadowing_overlap(&b, &other).is_err());
    }

    #[test]
    fn largest_rectangle_basic() {
        #[rustfmt::skip]
        let mask = [
            false, true,  false, false,
            true,  true,  true,  false,
            true,  true,  true,  true,
        ];
        assert_eq!(largest_rectangle(&mask, 4, 3), (1, 0, 2, 3));
    }

    #[test]
    fn pgm_layout() {
        let b = render(frac(1, 5), 4, 1);
        let mut buf = Vec::new();
        b.write_pgm(&mut buf).unwrap();
        assert_eq!(buf, b"P5\n4 1\n255\n\xff\xff\x00\x00");
        assert_eq!(pgm_file_name(609427, 31), "sym_609427_31.pgm");
    }

    #[test]
    fn pbm_layout() {
        let b = render(frac(1, 5), 4, 2);
        let mut buf = Vec::new();
        b.write_pbm(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "P1\n4 2\n0011\n1001\n");
    }
}
