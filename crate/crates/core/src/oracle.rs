//! Brute-force references built straight from the path definitions.
//!
//! A distance path between two tiles is a shortest path under 4- or
//! 8-adjacency; a distance figure is the union of all such paths. The
//! closure here repeatedly adds every tile lying on a shortest path between two
//! tiles of the current set, using breadth-first distances on the whole grid:
//! `x` lies on a shortest `u -> v` path iff `d(u,x) + d(x,v) == d(u,v)`.
//!
//! Nothing in this module uses the kernels or the engine.

use std::collections::VecDeque;

use crate::components::{label_mask, Connectivity};
use crate::error::{Error, Result};
use crate::grid::{offset, Grid, Level, N4, N8};

/// Which pairs of tiles contribute their shortest paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairScope {
    /// Only pairs inside the same 8-connected component of the current set.
    /// Components merge as the set grows, so nearby pieces join once their
    /// figures touch.
    Component,
    /// Every pair of tiles in the set, however far apart.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClosureSpec {
    /// Path adjacency; only [`Connectivity::Four`] and [`Connectivity::Eight`] are meaningful.
    pub connectivity: Connectivity,
    pub scope: PairScope,
}

impl ClosureSpec {
    pub fn four() -> Self {
        ClosureSpec {
            connectivity: Connectivity::Four,
            scope: PairScope::Component,
        }
    }

    pub fn eight() -> Self {
        ClosureSpec {
            connectivity: Connectivity::Eight,
            scope: PairScope::Component,
        }
    }

    pub fn all_pairs(self) -> Self {
        ClosureSpec {
            scope: PairScope::All,
            ..self
        }
    }
}

type Bits = Vec<u64>;

fn bits_new(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

#[inline]
fn bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
fn set_bit(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn members(b: &Bits, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| bit(b, i)).collect()
}

/// All-pairs grid distances and, for small grids, every shortest-path interval.
pub struct DistanceTable {
    width: usize,
    height: usize,
    dist: Vec<u32>,
    intervals: Option<Vec<Bits>>,
}

/// Interval tables are cached up to this many cells (n^3 / 8 bytes).
const CACHE_CELLS: usize = 256;

impl DistanceTable {
    pub fn new(width: usize, height: usize, connectivity: Connectivity) -> Result<DistanceTable> {
        let steps: &[u8] = match connectivity {
            Connectivity::Four => &N4,
            Connectivity::Eight => &N8,
            Connectivity::X => {
                return Err(Error::InvalidArgument(
                    "distance figures use 4- or 8-paths".into(),
                ))
            }
        };
        let n = width * height;
        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::new();
        for src in 0..n {
            let row = &mut dist[src * n..(src + 1) * n];
            row[src] = 0;
            queue.push_back(src);
            while let Some(i) = queue.pop_front() {
                let (r, c) = ((i / width) as isize, (i % width) as isize);
                for &s in steps {
                    let (dr, dc) = offset(s);
                    let (nr, nc) = (r + dr, c + dc);
                    if nr < 0 || nc < 0 || nr >= height as isize || nc >= width as isize {
                        continue;
                    }
                    let j = nr as usize * width + nc as usize;
                    if row[j] == u32::MAX {
                        row[j] = row[i] + 1;
                        queue.push_back(j);
                    }
                }
            }
        }
        let mut table = DistanceTable {
            width,
            height,
            dist,
            intervals: None,
        };
        if n <= CACHE_CELLS {
            let mut all = Vec::with_capacity(n * n);
            for u in 0..n {
                for v in 0..n {
                    all.push(table.compute_interval(u, v));
                }
            }
            table.intervals = Some(all);
        }
        Ok(table)
    }

    #[inline]
    pub fn distance(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.cells() + v]
    }

    fn cells(&self) -> usize {
        self.width * self.height
    }

    fn compute_interval(&self, u: usize, v: usize) -> Bits {
        let n = self.cells();
        let d = self.distance(u, v);
        let mut b = bits_new(n);
        for x in 0..n {
            if self.distance(u, x) + self.distance(x, v) == d {
                set_bit(&mut b, x);
            }
        }
        b
    }

    fn union_interval(&self, u: usize, v: usize, into: &mut Bits) {
        match &self.intervals {
            Some(all) => {
                for (dst, src) in into.iter_mut().zip(&all[u * self.cells() + v]) {
                    *dst |= src;
                }
            }
            None => {
                let b = self.compute_interval(u, v);
                for (dst, src) in into.iter_mut().zip(&b) {
                    *dst |= src;
                }
            }
        }
    }

    /// Closure of a foreground mask.
    pub fn closure(&self, mask: &[bool], scope: PairScope) -> Vec<bool> {
        let n = self.cells();
        let mut set = bits_new(n);
        for (i, &m) in mask.iter().enumerate() {
            if m {
                set_bit(&mut set, i);
            }
        }
        loop {
            let cells = members(&set, n);
            let mut grown = set.clone();
            match scope {
                PairScope::All => {
                    for (a, &u) in cells.iter().enumerate() {
                        for &v in &cells[a + 1..] {
                            self.union_interval(u, v, &mut grown);
                        }
                    }
                }
                PairScope::Component => {
                    let current: Vec<bool> = (0..n).map(|i| bit(&set, i)).collect();
                    let labels =
                        label_mask(self.width, self.height, &current, Connectivity::Eight, 0)
                            .labels;
                    for (a, &u) in cells.iter().enumerate() {
                        for &v in &cells[a + 1..] {
                            if labels[u] == labels[v] {
                                self.union_interval(u, v, &mut grown);
                            }
                        }
                    }
                }
            }
            if grown == set {
                return (0..n).map(|i| bit(&set, i)).collect();
            }
            set = grown;
        }
    }
}

fn check_binary(g: &Grid) -> Result<()> {
    if g.cells().iter().any(|&v| v > 1) {
        return Err(Error::InvalidArgument(
            "distance-figure closure needs a 0/1 grid".into(),
        ));
    }
    Ok(())
}

/// Distance-figure closure of the 1-cells of a binary grid.
pub fn df_closure(binary: &Grid, spec: ClosureSpec) -> Result<Grid> {
    check_binary(binary)?;
    let table = DistanceTable::new(binary.width(), binary.height(), spec.connectivity)?;
    df_closure_with(&table, binary, spec.scope)
}

/// [`df_closure`] reusing a precomputed table of the same dimensions.
pub fn df_closure_with(table: &DistanceTable, binary: &Grid, scope: PairScope) -> Result<Grid> {
    check_binary(binary)?;
    if table.width != binary.width() || table.height != binary.height() {
        return Err(Error::Mismatch {
            left: format!("{}x{}", binary.width(), binary.height()),
            right: format!("{}x{}", table.width, table.height),
        });
    }
    let mask: Vec<bool> = binary.cells().iter().map(|&v| v == 1).collect();
    let closed = table.closure(&mask, scope);
    Grid::from_cells(
        binary.width(),
        binary.height(),
        binary.levels(),
        closed.into_iter().map(Level::from).collect(),
    )
}

/// Gray closure by threshold decomposition: each level set is closed on its own and
/// a cell takes the highest level whose closed set contains it.
pub fn gray_flat_oracle(g: &Grid, spec: ClosureSpec) -> Result<Grid> {
    let table = DistanceTable::new(g.width(), g.height(), spec.connectivity)?;
    let mut out = vec![0 as Level; g.len()];
    for t in 1..g.levels() {
        let t = t as Level;
        let mask: Vec<bool> = g.cells().iter().map(|&v| v >= t).collect();
        if !mask.iter().any(|&m| m) {
            break;
        }
        for (o, inside) in out.iter_mut().zip(table.closure(&mask, spec.scope)) {
            if inside {
                *o = t;
            }
        }
    }
    Grid::from_cells(g.width(), g.height(), g.levels(), out)
}

/// Cells reachable from `seeds` by 4-steps that never climb in `reference`,
/// found by relaxing whole-grid sweeps until nothing changes.
pub fn monotone_reach(reference: &Grid, seeds: &[(usize, usize)]) -> Vec<bool> {
    let (w, h) = (reference.width(), reference.height());
    let t = reference.cells();
    let mut reach = vec![false; w * h];
    for &(r, c) in seeds {
        reach[r * w + c] = true;
    }
    loop {
        let mut changed = false;
        for r in 0..h {
            for c in 0..w {
                let i = r * w + c;
                if reach[i] {
                    continue;
                }
                let from = |j: usize| reach[j] && t[j] >= t[i];
                if (r > 0 && from(i - w))
                    || (r + 1 < h && from(i + w))
                    || (c > 0 && from(i - 1))
                    || (c + 1 < w && from(i + 1))
                {
                    reach[i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return reach;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(art: &str) -> Grid {
        Grid::from_ascii(2, 1, art).unwrap()
    }

    #[test]
    fn x_pair_closes_to_square_under_four() {
        let g = bin("....\n.#..\n..#.\n....");
        let want = bin("....\n.##.\n.##.\n....");
        assert_eq!(df_closure(&g, ClosureSpec::four()).unwrap(), want);
        assert_eq!(df_closure(&g, ClosureSpec::four().all_pairs()).unwrap(), want);
    }

    #[test]
    fn x_pair_is_already_closed_under_eight() {
        let g = bin("....\n.#..\n..#.\n....");
        assert_eq!(df_closure(&g, ClosureSpec::eight()).unwrap(), g);
    }

    #[test]
    fn single_cell_is_closed() {
        let g = bin("...\n.#.\n...");
        assert_eq!(df_closure(&g, ClosureSpec::four()).unwrap(), g);
        assert_eq!(df_closure(&g, ClosureSpec::eight()).unwrap(), g);
    }

    #[test]
    fn near_tile_joins_after_growth() {
        // the lower-left tile is not adjacent to the x-pair, but it is to the filled square
        let g = bin(".#.\n..#\n#..");
        assert_eq!(df_closure(&g, ClosureSpec::four()).unwrap(), bin("###\n###\n###"));
    }

    #[test]
    fn scopes_differ_on_far_pieces() {
        let g = bin("#..#\n....");
        assert_eq!(df_closure(&g, ClosureSpec::four()).unwrap(), g);
        assert_eq!(
            df_closure(&g, ClosureSpec::four().all_pairs()).unwrap(),
            bin("####\n....")
        );
    }

    #[test]
    fn horizontal_gap_under_eight_bulges() {
        let g = bin(".....\n.#.#.\n.....");
        let all = df_closure(&g, ClosureSpec::eight().all_pairs()).unwrap();
        assert_eq!(all, bin("..#..\n.###.\n..#.."));
    }

    #[test]
    fn closure_is_idempotent_and_extensive() {
        let g = bin("#....\n..#..\n.#...\n....#");
        for spec in [ClosureSpec::four(), ClosureSpec::eight(), ClosureSpec::four().all_pairs()] {
            let once = df_closure(&g, spec).unwrap();
            assert_eq!(df_closure(&once, spec).unwrap(), once);
            assert!(g.cells().iter().zip(once.cells()).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn rejects_gray_input() {
        let g = Grid::from_rows(4, &[[0, 2]]).unwrap();
        assert!(df_closure(&g, ClosureSpec::four()).is_err());
        let x = ClosureSpec {
            connectivity: Connectivity::X,
            scope: PairScope::All,
        };
        assert!(df_closure(&bin("#."), x).is_err());
    }

    #[test]
    fn gray_oracle_examples() {
        let b = bin("#.\n.#");
        assert_eq!(gray_flat_oracle(&b, ClosureSpec::four()).unwrap(), df_closure(&b, ClosureSpec::four()).unwrap());
        let c = Grid::filled(3, 2, 8, 5).unwrap();
        assert_eq!(gray_flat_oracle(&c, ClosureSpec::four()).unwrap(), c);
        let mut g = Grid::new(4, 4, 8).unwrap();
        g.set(1, 1, 7);
        g.set(2, 2, 7);
        let out = gray_flat_oracle(&g, ClosureSpec::four()).unwrap();
        let mut want = g.clone();
        want.set(1, 2, 7);
        want.set(2, 1, 7);
        assert_eq!(out, want);
    }

    #[test]
    fn monotone_reach_examples() {
        let r = Grid::from_rows(16, &[[9, 7, 5, 3]]).unwrap();
        assert_eq!(monotone_reach(&r, &[(0, 0)]), vec![true; 4]);
        let r = Grid::from_rows(16, &[[3, 5, 3]]).unwrap();
        assert_eq!(monotone_reach(&r, &[(0, 0)]), vec![true, false, false]);
        // reaching back around a bend needs more than one sweep
        let r = Grid::from_rows(16, &[[1, 9, 9], [2, 9, 9], [3, 4, 5]]).unwrap();
        assert_eq!(
            monotone_reach(&r, &[(2, 2)]),
            vec![true, false, false, true, false, false, true, true, true]
        );
    }
}
