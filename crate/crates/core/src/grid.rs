//! Bounded tilings of ordered levels.
//!
//! A [`Grid`] is a row-major raster whose cells carry a level in `[0, levels - 1]`.
//! Neighbors of a cell are addressed with the keypad convention
//!
//! ```text
//! e1 e2 e3
//! e4 e5 e6
//! e7 e8 e9
//! ```
//!
//! where `e5` is the cell itself and rows grow downward. `e2, e4, e6, e8` share an
//! edge with the center ("+"-connected), `e1, e3, e7, e9` share only a vertex
//! ("x"-connected). Reads past the edge of the grid are answered by a
//! [`BorderPolicy`].

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// One cell value. Only the order of levels matters to the kernels.
pub type Level = u16;

pub const DEFAULT_LEVELS: u32 = 256;
pub const MAX_LEVELS: u32 = 1 << 16;

/// Row/column offset of keypad position `index` (1..=9) relative to the center.
pub const fn offset(index: u8) -> (isize, isize) {
    let i = index as isize - 1;
    (i / 3 - 1, i % 3 - 1)
}

/// Keypad position for a row/column offset in `-1..=1`.
pub const fn index_of(dr: isize, dc: isize) -> u8 {
    ((dr + 1) * 3 + (dc + 1) + 1) as u8
}

/// Keypad position reached by rotating `index` a quarter turn clockwise about e5.
pub const fn rotate_index_cw(index: u8) -> u8 {
    let (dr, dc) = offset(index);
    index_of(dc, -dr)
}

pub const N4: [u8; 4] = [2, 4, 6, 8];
pub const NX: [u8; 4] = [1, 3, 7, 9];
pub const N8: [u8; 8] = [1, 2, 3, 4, 6, 7, 8, 9];

/// How out-of-bounds neighbor reads are answered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BorderPolicy {
    Constant(Level),
}

impl Default for BorderPolicy {
    fn default() -> Self {
        BorderPolicy::Constant(0)
    }
}

impl BorderPolicy {
    pub fn value(self) -> Level {
        match self {
            BorderPolicy::Constant(v) => v,
        }
    }

    pub fn validate(self, levels: u32) -> Result<()> {
        let v = self.value() as u32;
        if v >= levels {
            return Err(Error::LevelOutOfRange {
                value: v,
                max: levels - 1,
            });
        }
        Ok(())
    }
}

/// The nine values `e1..e9` around (and including) a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Neighborhood(pub [Level; 9]);

impl Neighborhood {
    /// Value at keypad position `index` (1..=9).
    #[inline]
    pub fn e(&self, index: u8) -> Level {
        self.0[index as usize - 1]
    }

    #[inline]
    pub fn center(&self) -> Level {
        self.0[4]
    }

    /// The neighborhood seen after the underlying grid is rotated a quarter turn clockwise.
    pub fn rotate_cw(&self) -> Neighborhood {
        let mut out = [0; 9];
        for i in 1..=9u8 {
            out[rotate_index_cw(i) as usize - 1] = self.e(i);
        }
        Neighborhood(out)
    }
}

/// A rectangular tiling with ordered integer levels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    width: usize,
    height: usize,
    levels: u32,
    cells: Vec<Level>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Grid {}x{} (levels {})",
            self.width, self.height, self.levels
        )?;
        for row in self.cells.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
            writeln!(f, "{}", line.join(""))?;
        }
        Ok(())
    }
}

fn check_levels(levels: u32) -> Result<()> {
    if !(2..=MAX_LEVELS).contains(&levels) {
        return Err(Error::InvalidLevels(levels));
    }
    Ok(())
}

impl Grid {
    /// A grid filled with `value`.
    pub fn filled(width: usize, height: usize, levels: u32, value: Level) -> Result<Grid> {
        Grid::from_cells(width, height, levels, vec![value; width * height])
    }

    /// An all-zero grid.
    pub fn new(width: usize, height: usize, levels: u32) -> Result<Grid> {
        Grid::filled(width, height, levels, 0)
    }

    pub fn from_cells(width: usize, height: usize, levels: u32, cells: Vec<Level>) -> Result<Grid> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyGrid { width, height });
        }
        check_levels(levels)?;
        if cells.len() != width * height {
            return Err(Error::CellCount {
                expected: width * height,
                actual: cells.len(),
            });
        }
        if let Some(&bad) = cells.iter().find(|&&v| v as u32 >= levels) {
            return Err(Error::LevelOutOfRange {
                value: bad as u32,
                max: levels - 1,
            });
        }
        Ok(Grid {
            width,
            height,
            levels,
            cells,
        })
    }

    /// Builds a grid from equally long rows.
    pub fn from_rows<R: AsRef<[Level]>>(levels: u32, rows: &[R]) -> Result<Grid> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut cells = Vec::with_capacity(width * height);
        for row in rows {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::InvalidArgument("ragged rows".into()));
            }
            cells.extend_from_slice(row);
        }
        Grid::from_cells(width, height, levels, cells)
    }

    /// Parses a small picture: `.` is background 0, any other character is `value`.
    pub fn from_ascii(levels: u32, value: Level, art: &str) -> Result<Grid> {
        let rows: Vec<Vec<Level>> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.chars().map(|c| if c == '.' { 0 } else { value }).collect())
            .collect();
        Grid::from_rows(levels, &rows)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn levels(&self) -> u32 {
        self.levels
    }

    #[inline]
    pub fn max_level(&self) -> Level {
        (self.levels - 1) as Level
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn cells(&self) -> &[Level] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<Level> {
        self.cells
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<Level> {
        (row < self.height && col < self.width).then(|| self.cells[row * self.width + col])
    }

    /// Value at a signed coordinate, falling back to the border policy.
    #[inline]
    pub fn get_or(&self, row: isize, col: isize, policy: BorderPolicy) -> Level {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            policy.value()
        } else {
            self.cells[row as usize * self.width + col as usize]
        }
    }

    /// Sets one cell. Panics if the coordinate or value is out of range.
    pub fn set(&mut self, row: usize, col: usize, value: Level) {
        assert!(row < self.height && col < self.width, "cell out of bounds");
        assert!((value as u32) < self.levels, "level out of range");
        self.cells[row * self.width + col] = value;
    }

    pub fn same_shape(&self, other: &Grid) -> Result<()> {
        if self.width != other.width || self.height != other.height || self.levels != other.levels
        {
            return Err(Error::Mismatch {
                left: self.shape_string(),
                right: other.shape_string(),
            });
        }
        Ok(())
    }

    fn shape_string(&self) -> String {
        format!("{}x{} levels {}", self.width, self.height, self.levels)
    }

    /// The nine values around `(row, col)`.
    pub fn neighborhood_at(&self, row: usize, col: usize, policy: BorderPolicy) -> Result<Neighborhood> {
        if row >= self.height || col >= self.width {
            return Err(Error::OutOfBounds {
                row,
                col,
                width: self.width,
                height: self.height,
            });
        }
        let mut n = [0; 9];
        for i in 1..=9u8 {
            let (dr, dc) = offset(i);
            n[i as usize - 1] = self.get_or(row as isize + dr, col as isize + dc, policy);
        }
        Ok(Neighborhood(n))
    }

    /// Non-background mask: `true` where the cell differs from `background`.
    pub fn support(&self, background: Level) -> Vec<bool> {
        self.cells.iter().map(|&v| v != background).collect()
    }

    /// Number of cells that differ from `background`.
    pub fn count_nonzero(&self) -> usize {
        self.cells.iter().filter(|&&v| v != 0).count()
    }

    /// Two-level image: 1 where the cell is at least `t`.
    pub fn binarize(&self, t: Level) -> Grid {
        Grid {
            width: self.width,
            height: self.height,
            levels: 2,
            cells: self.cells.iter().map(|&v| Level::from(v >= t)).collect(),
        }
    }

    /// Binary grid (levels 2) from a mask.
    pub fn from_mask(width: usize, height: usize, mask: &[bool]) -> Result<Grid> {
        Grid::from_cells(width, height, 2, mask.iter().map(|&b| Level::from(b)).collect())
    }

    /// Same cells, reinterpreted with a different level count.
    pub fn with_levels(&self, levels: u32) -> Result<Grid> {
        Grid::from_cells(self.width, self.height, levels, self.cells.clone())
    }

    /// Requantizes to `levels` equal-width bins.
    pub fn levelize(&self, levels: u32) -> Result<Grid> {
        check_levels(levels)?;
        let from = self.levels as u64;
        let cells = self
            .cells
            .iter()
            .map(|&v| (v as u64 * levels as u64 / from) as Level)
            .collect();
        Grid::from_cells(self.width, self.height, levels, cells)
    }

    /// Quarter turn clockwise: the top row becomes the right column.
    pub fn rotate_cw(&self) -> Grid {
        let (w, h) = (self.width, self.height);
        let mut cells = vec![0; w * h];
        // new grid is h wide and w tall; new(r, c) = old(h - 1 - c, r)
        for r in 0..w {
            for c in 0..h {
                cells[r * h + c] = self.cells[(h - 1 - c) * w + r];
            }
        }
        Grid {
            width: h,
            height: w,
            levels: self.levels,
            cells,
        }
    }

    /// Surrounds the grid with constant-valued margins.
    pub fn pad(&self, top: usize, left: usize, bottom: usize, right: usize, value: Level) -> Grid {
        let width = self.width + left + right;
        let height = self.height + top + bottom;
        let mut cells = vec![value; width * height];
        for r in 0..self.height {
            let dst = (r + top) * width + left;
            cells[dst..dst + self.width]
                .copy_from_slice(&self.cells[r * self.width..(r + 1) * self.width]);
        }
        Grid {
            width,
            height,
            levels: self.levels,
            cells,
        }
    }

    /// Equal margin on every side.
    pub fn pad_uniform(&self, margin: usize, value: Level) -> Grid {
        self.pad(margin, margin, margin, margin, value)
    }

    /// Sub-rectangle starting at `(row, col)`.
    pub fn crop(&self, row: usize, col: usize, width: usize, height: usize) -> Result<Grid> {
        if row + height > self.height || col + width > self.width || width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "crop {width}x{height}+{col}+{row} outside {}x{}",
                self.width, self.height
            )));
        }
        let mut cells = Vec::with_capacity(width * height);
        for r in row..row + height {
            cells.extend_from_slice(&self.cells[r * self.width + col..r * self.width + col + width]);
        }
        Ok(Grid {
            width,
            height,
            levels: self.levels,
            cells,
        })
    }

    /// Removes an equal margin from every side.
    pub fn crop_uniform(&self, margin: usize) -> Result<Grid> {
        self.crop(
            margin,
            margin,
            self.width.saturating_sub(2 * margin),
            self.height.saturating_sub(2 * margin),
        )
    }

    fn map_pair(&self, other: &Grid, f: impl Fn(Level, Level) -> Level) -> Result<Grid> {
        self.same_shape(other)?;
        Ok(Grid {
            width: self.width,
            height: self.height,
            levels: self.levels,
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `max(a - b, 0)` per cell.
    pub fn minus_sat(&self, other: &Grid) -> Result<Grid> {
        self.map_pair(other, |a, b| a.saturating_sub(b))
    }

    /// Bitwise xor of level codes, capped at the top level; zero exactly where the grids agree.
    pub fn xor_mask(&self, other: &Grid) -> Result<Grid> {
        let max = self.max_level();
        self.map_pair(other, |a, b| (a ^ b).min(max))
    }

    /// Cellwise maximum.
    pub fn max_with(&self, other: &Grid) -> Result<Grid> {
        self.map_pair(other, |a, b| a.max(b))
    }

    /// Keeps values at or above `t`, zeroes the rest.
    pub fn threshold(&self, t: Level) -> Result<Grid> {
        if t as u32 >= self.levels {
            return Err(Error::InvalidArgument(format!(
                "threshold {t} must be below levels {}",
                self.levels
            )));
        }
        Ok(self.map(|v| if v >= t { v } else { 0 }))
    }

    /// Saturating multiply by `k`.
    pub fn amplify(&self, k: u32) -> Result<Grid> {
        if k == 0 {
            return Err(Error::InvalidArgument("amplify factor must be positive".into()));
        }
        let max = self.levels - 1;
        Ok(self.map(|v| (v as u32).saturating_mul(k).min(max) as Level))
    }

    /// Mean over the `(2r+1)^2` window, rounded down, reading the border policy off-grid.
    pub fn box_blur(&self, radius: usize, policy: BorderPolicy) -> Result<Grid> {
        policy.validate(self.levels)?;
        let r = radius as isize;
        let area = ((2 * radius + 1) * (2 * radius + 1)) as u64;
        let mut cells = Vec::with_capacity(self.cells.len());
        for row in 0..self.height as isize {
            for col in 0..self.width as isize {
                let mut sum = 0u64;
                for dr in -r..=r {
                    for dc in -r..=r {
                        sum += self.get_or(row + dr, col + dc, policy) as u64;
                    }
                }
                cells.push((sum / area) as Level);
            }
        }
        Ok(Grid {
            width: self.width,
            height: self.height,
            levels: self.levels,
            cells,
        })
    }

    fn map(&self, f: impl Fn(Level) -> Level) -> Grid {
        Grid {
            width: self.width,
            height: self.height,
            levels: self.levels,
            cells: self.cells.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Positive part of `neighbor(dir) - center`, written to a fresh grid.
    ///
    /// `dir` is a keypad position other than 5. Off-grid neighbors read as 0.
    pub fn diff_directional(&self, dir: u8) -> Result<Grid> {
        if !(1..=9).contains(&dir) || dir == 5 {
            return Err(Error::InvalidArgument(format!(
                "direction must be a neighbor position 1..=9 other than 5 (got {dir})"
            )));
        }
        let (dr, dc) = offset(dir);
        let policy = BorderPolicy::Constant(0);
        let mut cells = Vec::with_capacity(self.cells.len());
        for row in 0..self.height {
            for col in 0..self.width {
                let e5 = self.cells[row * self.width + col];
                let n = self.get_or(row as isize + dr, col as isize + dc, policy);
                cells.push(n.saturating_sub(e5));
            }
        }
        Ok(Grid {
            width: self.width,
            height: self.height,
            levels: self.levels,
            cells,
        })
    }
}

impl Index<(usize, usize)> for Grid {
    type Output = Level;

    fn index(&self, (row, col): (usize, usize)) -> &Level {
        assert!(row < self.height && col < self.width, "cell out of bounds");
        &self.cells[row * self.width + col]
    }
}

/// The operations accepted by [`pointwise`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointwiseOp {
    MinusSat,
    XorMask,
    Threshold(Level),
    Amplify(u32),
    BoxBlur(usize),
}

impl PointwiseOp {
    pub fn is_binary(self) -> bool {
        matches!(self, PointwiseOp::MinusSat | PointwiseOp::XorMask)
    }
}

/// Cellwise image arithmetic. Binary ops need `b`; unary ops reject it.
pub fn pointwise(a: &Grid, b: Option<&Grid>, op: PointwiseOp) -> Result<Grid> {
    match (op, b) {
        (PointwiseOp::MinusSat, Some(b)) => a.minus_sat(b),
        (PointwiseOp::XorMask, Some(b)) => a.xor_mask(b),
        (op, None) if op.is_binary() => Err(Error::InvalidArgument(format!(
            "{op:?} needs a second grid"
        ))),
        (op, Some(_)) if !op.is_binary() => Err(Error::InvalidArgument(format!(
            "{op:?} takes a single grid"
        ))),
        (PointwiseOp::Threshold(t), _) => a.threshold(t),
        (PointwiseOp::Amplify(k), _) => a.amplify(k),
        (PointwiseOp::BoxBlur(r), _) => a.box_blur(r, BorderPolicy::default()),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(values: &[Level]) -> Grid {
        Grid::from_rows(256, &[values]).unwrap()
    }

    #[test]
    fn keypad_offsets() {
        assert_eq!(offset(1), (-1, -1));
        assert_eq!(offset(5), (0, 0));
        assert_eq!(offset(6), (0, 1));
        assert_eq!(offset(8), (1, 0));
        for i in 1..=9 {
            let (dr, dc) = offset(i);
            assert_eq!(index_of(dr, dc), i);
        }
        // N4 differ in one axis, Nx in both
        for i in N4 {
            let (dr, dc) = offset(i);
            assert_eq!((dr != 0) as u8 + (dc != 0) as u8, 1);
        }
        for i in NX {
            let (dr, dc) = offset(i);
            assert!(dr != 0 && dc != 0);
        }
    }

    #[test]
    fn rotation_cycles_neighbors() {
        assert_eq!(rotate_index_cw(2), 6);
        assert_eq!(rotate_index_cw(6), 8);
        assert_eq!(rotate_index_cw(1), 3);
        assert_eq!(rotate_index_cw(5), 5);
    }

    #[test]
    fn neighborhood_identity_layout() {
        let g = Grid::from_rows(256, &[[1, 2, 3], [4, 5, 6], [7, 8, 9]]).unwrap();
        let n = g.neighborhood_at(1, 1, BorderPolicy::default()).unwrap();
        assert_eq!(n.0, [1, 2, 3, 4, 5, 6, 7, 8, 9]);
    }

    #[test]
    fn neighborhood_border_fill() {
        let g = Grid::from_rows(256, &[[1, 2, 3], [4, 5, 6], [7, 8, 9]]).unwrap();
        let n = g.neighborhood_at(0, 0, BorderPolicy::default()).unwrap();
        assert_eq!(n.0, [0, 0, 0, 0, 1, 2, 0, 4, 5]);
    }

    #[test]
    fn neighborhood_all_border() {
        let g = Grid::from_rows(256, &[[7]]).unwrap();
        let n = g.neighborhood_at(0, 0, BorderPolicy::Constant(3)).unwrap();
        assert_eq!(n.0, [3, 3, 3, 3, 7, 3, 3, 3, 3]);
    }

    #[test]
    fn neighborhood_out_of_range() {
        let g = Grid::new(2, 2, 256).unwrap();
        assert!(g.neighborhood_at(2, 0, BorderPolicy::default()).is_err());
    }

    #[test]
    fn construction_checks() {
        assert!(Grid::new(0, 3, 256).is_err());
        assert!(Grid::new(3, 3, 1).is_err());
        assert!(Grid::from_cells(2, 1, 4, vec![1, 4]).is_err());
        assert!(Grid::from_cells(2, 1, 4, vec![1]).is_err());
        assert!(BorderPolicy::Constant(9).validate(8).is_err());
    }

    #[test]
    fn minus_saturates() {
        let out = row(&[5, 3]).minus_sat(&row(&[3, 5])).unwrap();
        assert_eq!(out.cells(), &[2, 0]);
    }

    #[test]
    fn xor_stays_in_range() {
        let a = Grid::from_rows(6, &[[5, 2, 3]]).unwrap();
        let b = Grid::from_rows(6, &[[2, 2, 1]]).unwrap();
        assert_eq!(a.xor_mask(&b).unwrap().cells(), &[5, 0, 2]);
    }

    #[test]
    fn xor_of_equal_is_zero() {
        let a = row(&[5, 3, 200]);
        assert_eq!(a.xor_mask(&a).unwrap().count_nonzero(), 0);
    }

    #[test]
    fn threshold_keeps_values() {
        assert_eq!(row(&[0, 3, 4, 9]).threshold(4).unwrap().cells(), &[0, 0, 4, 9]);
        assert!(row(&[1]).threshold(256).is_err());
    }

    #[test]
    fn amplify_saturates() {
        assert_eq!(row(&[10, 200]).amplify(3).unwrap().cells(), &[30, 255]);
        assert!(row(&[1]).amplify(0).is_err());
    }

    #[test]
    fn binary_ops_check_shape() {
        let a = row(&[1, 2]);
        let b = row(&[1, 2, 3]);
        assert!(a.minus_sat(&b).is_err());
        assert!(pointwise(&a, None, PointwiseOp::MinusSat).is_err());
        assert!(pointwise(&a, Some(&a), PointwiseOp::Amplify(2)).is_err());
        let c = a.with_levels(8).unwrap();
        assert!(a.xor_mask(&c).is_err());
    }

    #[test]
    fn box_blur_rounds_down() {
        let g = Grid::from_rows(256, &[[0, 0, 0], [0, 9, 0], [0, 0, 0]]).unwrap();
        let b = g.box_blur(1, BorderPolicy::default()).unwrap();
        assert_eq!(b.cells(), &[1; 9]);
    }

    #[test]
    fn diff_directional_examples() {
        assert_eq!(row(&[2, 5, 1]).diff_directional(6).unwrap().cells(), &[3, 0, 0]);
        let flat = Grid::filled(4, 3, 256, 9).unwrap();
        let d = flat.diff_directional(6).unwrap();
        // the right column sees the zero border and has nothing to gain
        assert_eq!(d.count_nonzero(), 0);
        let col = Grid::from_rows(256, &[[0], [7]]).unwrap();
        assert_eq!(col.diff_directional(8).unwrap().cells(), &[7, 0]);
        assert!(col.diff_directional(5).is_err());
    }

    #[test]
    fn rotate_four_times_is_identity() {
        let g = Grid::from_rows(256, &[[1, 2, 3], [4, 5, 6]]).unwrap();
        let r = g.rotate_cw();
        assert_eq!((r.width(), r.height()), (2, 3));
        assert_eq!(r.cells(), &[4, 1, 5, 2, 6, 3]);
        assert_eq!(r.rotate_cw().rotate_cw().rotate_cw(), g);
    }

    #[test]
    fn pad_and_crop_round_trip() {
        let g = Grid::from_rows(256, &[[1, 2, 3], [4, 5, 6]]).unwrap();
        let p = g.pad_uniform(2, 0);
        assert_eq!((p.width(), p.height()), (7, 6));
        assert_eq!(p.crop_uniform(2).unwrap(), g);
    }

    #[test]
    fn levelize_bins() {
        let g = row(&[0, 63, 64, 255]);
        assert_eq!(g.levelize(4).unwrap().cells(), &[0, 0, 1, 3]);
    }

    #[test]
    fn ascii_fixture() {
        let g = Grid::from_ascii(256, 9, "#.\n.#").unwrap();
        assert_eq!(g.cells(), &[9, 0, 0, 9]);
    }
}
