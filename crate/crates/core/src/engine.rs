//! Fixed-point iteration of local rules.
//!
//! [`run_fixpoint`] applies a kernel to every cell, in place, until no cell
//! changes. Each update moves a cell strictly in one direction (up for expand,
//! down for contract), so a run makes at most `width * height * (levels - 1)`
//! updates and always terminates. The order of visits is a [`Schedule`]; the
//! canonical one is [`Schedule::RasterSweep`].

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{offset, BorderPolicy, Grid, Level, Neighborhood};
use crate::kernels::{KernelSchema, Mode};

/// Visit order for a fixed-point run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Schedule {
    /// Row-major, repeated until a full sweep changes nothing.
    #[default]
    RasterSweep,
    /// Reverse row-major.
    ReverseSweep,
    /// Every cell once, then only the 8-neighbors of cells that changed.
    Worklist,
    /// A fresh uniformly random permutation each round.
    RandomFair { seed: u64 },
}

/// What a guarded contract rule may do when its value falls below the reference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContractFloor {
    /// Stop at the reference value. The run is then a monotone descent and every
    /// schedule reaches the same grid.
    #[default]
    Reference,
    /// Take the rule value as is. The cell freezes wherever it lands, so the
    /// result can depend on visit order.
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub schedule: Schedule,
    pub border: BorderPolicy,
    /// Stop after this many rounds even if cells are still changing.
    pub max_passes: Option<usize>,
    pub contract_floor: ContractFloor,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            schedule: Schedule::RasterSweep,
            border: BorderPolicy::default(),
            max_passes: None,
            contract_floor: ContractFloor::Reference,
        }
    }
}

impl RunOptions {
    pub fn with_schedule(schedule: Schedule) -> Self {
        RunOptions {
            schedule,
            ..RunOptions::default()
        }
    }
}

/// Audit trail of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Rounds in which every pending cell was examined, including the final quiet one.
    pub passes: usize,
    /// Number of cell value changes.
    pub cell_updates: u64,
    /// Contract updates whose rule value fell strictly below the reference value.
    /// Under [`ContractFloor::Reference`] these were floored at the reference.
    pub undershoots: u64,
    pub converged: bool,
}

impl RunStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats serialize")
    }
}

#[derive(Clone, Debug)]
pub struct Fixpoint {
    pub grid: Grid,
    pub stats: RunStats,
}

/// Working copy of the grid with a one-cell frame holding the border value.
struct Frame {
    width: usize,
    height: usize,
    stride: usize,
    cells: Vec<Level>,
    taps: [isize; 9],
}

impl Frame {
    fn new(grid: &Grid, border: Level) -> Frame {
        let (width, height) = (grid.width(), grid.height());
        let stride = width + 2;
        let mut cells = vec![border; stride * (height + 2)];
        for (r, row) in grid.cells().chunks(width).enumerate() {
            let start = (r + 1) * stride + 1;
            cells[start..start + width].copy_from_slice(row);
        }
        let mut taps = [0isize; 9];
        for (i, tap) in taps.iter_mut().enumerate() {
            let (dr, dc) = offset(i as u8 + 1);
            *tap = dr * stride as isize + dc;
        }
        Frame {
            width,
            height,
            stride,
            cells,
            taps,
        }
    }

    #[inline]
    fn framed(&self, cell: usize) -> usize {
        (cell / self.width + 1) * self.stride + cell % self.width + 1
    }

    #[inline]
    fn neighborhood(&self, at: usize) -> Neighborhood {
        let mut n = [0; 9];
        for (slot, tap) in n.iter_mut().zip(self.taps) {
            *slot = self.cells[(at as isize + tap) as usize];
        }
        Neighborhood(n)
    }

    fn into_grid(self, levels: u32) -> Grid {
        let mut out = Vec::with_capacity(self.width * self.height);
        for r in 0..self.height {
            let start = (r + 1) * self.stride + 1;
            out.extend_from_slice(&self.cells[start..start + self.width]);
        }
        Grid::from_cells(self.width, self.height, levels, out).expect("frame keeps grid invariants")
    }
}

struct Runner<'a> {
    frame: Frame,
    kernel: &'a KernelSchema,
    reference: Option<&'a [Level]>,
    floor: ContractFloor,
    stats: RunStats,
}

impl Runner<'_> {
    /// Re-evaluates one cell; returns whether it changed.
    #[inline]
    fn visit(&mut self, cell: usize) -> bool {
        let at = self.frame.framed(cell);
        let e5 = self.frame.cells[at];
        if let Some(reference) = self.reference {
            if !self.kernel.guard.allows(e5, reference[cell]) {
                return false;
            }
        }
        let mut next = self.kernel.apply_unguarded(&self.frame.neighborhood(at));
        if self.kernel.mode == Mode::Contract {
            if let Some(reference) = self.reference {
                if next < reference[cell] {
                    self.stats.undershoots += 1;
                    if self.floor == ContractFloor::Reference {
                        next = reference[cell];
                    }
                }
            }
        }
        if next == e5 {
            return false;
        }
        self.frame.cells[at] = next;
        self.stats.cell_updates += 1;
        true
    }

    fn neighbors(&self, cell: usize, out: &mut Vec<usize>) {
        out.clear();
        let (w, h) = (self.frame.width as isize, self.frame.height as isize);
        let (r, c) = ((cell / self.frame.width) as isize, (cell % self.frame.width) as isize);
        for i in [1u8, 2, 3, 4, 6, 7, 8, 9] {
            let (dr, dc) = offset(i);
            let (nr, nc) = (r + dr, c + dc);
            if nr >= 0 && nc >= 0 && nr < h && nc < w {
                out.push((nr * w + nc) as usize);
            }
        }
    }

    fn sweeps(&mut self, order: impl Fn(usize) -> Vec<usize>, max_passes: Option<usize>) {
        loop {
            let round = order(self.stats.passes);
            self.stats.passes += 1;
            let mut changed = false;
            for cell in round {
                changed |= self.visit(cell);
            }
            if !changed {
                self.stats.converged = true;
                return;
            }
            if max_passes.is_some_and(|m| self.stats.passes >= m) {
                return;
            }
        }
    }

    fn worklist(&mut self, max_passes: Option<usize>) {
        let n = self.frame.width * self.frame.height;
        let mut queued = vec![true; n];
        let mut current: VecDeque<usize> = (0..n).collect();
        let mut next = VecDeque::new();
        let mut around = Vec::with_capacity(8);
        loop {
            self.stats.passes += 1;
            while let Some(cell) = current.pop_front() {
                queued[cell] = false;
                if self.visit(cell) {
                    self.neighbors(cell, &mut around);
                    for &nb in &around {
                        if !queued[nb] {
                            queued[nb] = true;
                            next.push_back(nb);
                        }
                    }
                }
            }
            if next.is_empty() {
                self.stats.converged = true;
                return;
            }
            if max_passes.is_some_and(|m| self.stats.passes >= m) {
                return;
            }
            std::mem::swap(&mut current, &mut next);
        }
    }
}

/// Runs `kernel` over `grid` until no cell changes.
///
/// Guarded kernels need `reference` (same shape as `grid`); unguarded ones must not get one.
/// When `max_passes` cuts the run short the partial grid is returned with
/// `stats.converged == false`.
pub fn run_fixpoint(
    grid: &Grid,
    kernel: &KernelSchema,
    reference: Option<&Grid>,
    opts: &RunOptions,
) -> Result<Fixpoint> {
    match (kernel.is_guarded(), reference) {
        (true, None) => return Err(Error::MissingReference(kernel.name.clone())),
        (false, Some(_)) => return Err(Error::UnexpectedReference(kernel.name.clone())),
        (true, Some(r)) => grid.same_shape(r)?,
        (false, None) => {}
    }
    opts.border.validate(grid.levels())?;

    let mut runner = Runner {
        frame: Frame::new(grid, opts.border.value()),
        kernel,
        reference: reference.map(Grid::cells),
        floor: opts.contract_floor,
        stats: RunStats::default(),
    };
    let n = grid.len();
    match opts.schedule {
        Schedule::RasterSweep => runner.sweeps(|_| (0..n).collect(), opts.max_passes),
        Schedule::ReverseSweep => runner.sweeps(|_| (0..n).rev().collect(), opts.max_passes),
        Schedule::RandomFair { seed } => {
            let rng = std::cell::RefCell::new(ChaCha8Rng::seed_from_u64(seed));
            runner.sweeps(
                |_| {
                    let mut order: Vec<usize> = (0..n).collect();
                    order.shuffle(&mut *rng.borrow_mut());
                    order
                },
                opts.max_passes,
            )
        }
        Schedule::Worklist => runner.worklist(opts.max_passes),
    }
    let stats = runner.stats;
    Ok(Fixpoint {
        grid: runner.frame.into_grid(grid.levels()),
        stats,
    })
}

/// Result of a waterfall fill.
#[derive(Clone, Debug)]
pub struct Waterfall {
    pub grid: Grid,
    /// Cells that received their reference value.
    pub filled: Vec<bool>,
    pub stats: RunStats,
}

/// Allowance fill of an empty image from `seeds`.
///
/// A seed copies its reference value. An unfilled cell copies its reference value
/// `t5` once some filled 4-neighbor holds a value `>= t5`; a cell is filled at most once.
/// The filled set is everything reachable from the seeds along 4-paths whose
/// reference values never increase.
pub fn run_waterfall(reference: &Grid, seeds: &[(usize, usize)]) -> Result<Waterfall> {
    let (w, h) = (reference.width(), reference.height());
    let t = reference.cells();
    let mut out = vec![0 as Level; w * h];
    let mut filled = vec![false; w * h];
    let mut stats = RunStats::default();
    let mut current = VecDeque::new();
    for &(r, c) in seeds {
        if r >= h || c >= w {
            return Err(Error::OutOfBounds {
                row: r,
                col: c,
                width: w,
                height: h,
            });
        }
        let i = r * w + c;
        if !filled[i] {
            filled[i] = true;
            out[i] = t[i];
            stats.cell_updates += 1;
            current.push_back(i);
        }
    }
    let mut next = VecDeque::new();
    loop {
        stats.passes += 1;
        while let Some(i) = current.pop_front() {
            let (r, c) = (i / w, i % w);
            let mut step = |j: usize| {
                if !filled[j] && t[j] <= out[i] {
                    filled[j] = true;
                    out[j] = t[j];
                    stats.cell_updates += 1;
                    next.push_back(j);
                }
            };
            if r > 0 {
                step(i - w);
            }
            if c > 0 {
                step(i - 1);
            }
            if c + 1 < w {
                step(i + 1);
            }
            if r + 1 < h {
                step(i + w);
            }
        }
        if next.is_empty() {
            break;
        }
        std::mem::swap(&mut current, &mut next);
    }
    stats.converged = true;
    Ok(Waterfall {
        grid: Grid::from_cells(w, h, reference.levels(), out)?,
        filled,
        stats,
    })
}

/// Every cell on the outer frame of a `width x height` grid.
pub fn border_cells(width: usize, height: usize) -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for r in 0..height {
        for c in 0..width {
            if r == 0 || c == 0 || r + 1 == height || c + 1 == width {
                cells.push((r, c));
            }
        }
    }
    cells
}

/// Staircase rays of slope `1/peak`.
///
/// Repeats, in raster order: if the left neighbor holds more than 1, take it minus 1;
/// otherwise, if the cell below holds exactly 1, restart at `peak`. Off-grid reads are 0.
pub fn run_slope_ray(grid: &Grid, peak: Level) -> Result<Fixpoint> {
    if peak as u32 >= grid.levels() {
        return Err(Error::InvalidArgument(format!(
            "peak {peak} must be below levels {}",
            grid.levels()
        )));
    }
    let (w, h) = (grid.width(), grid.height());
    let border = BorderPolicy::Constant(0);
    let mut g = grid.clone();
    let mut stats = RunStats::default();
    // values only flow rightward and upward, so w + h + 1 sweeps always settle
    let bound = w + h + 1;
    while stats.passes < bound {
        stats.passes += 1;
        let mut changed = false;
        for r in 0..h {
            for c in 0..w {
                let e4 = g.get_or(r as isize, c as isize - 1, border);
                let e8 = g.get_or(r as isize + 1, c as isize, border);
                let e5 = g[(r, c)];
                let next = if e4 > 1 {
                    e4 - 1
                } else if e8 == 1 {
                    peak
                } else {
                    e5
                };
                if next != e5 {
                    g.set(r, c, next);
                    stats.cell_updates += 1;
                    changed = true;
                }
            }
        }
        if !changed {
            stats.converged = true;
            break;
        }
    }
    Ok(Fixpoint { grid: g, stats })
}

/// [`run_fixpoint`] by catalog name with default options, returning only the grid.
pub fn fixpoint(grid: &Grid, kernel: &str, reference: Option<&Grid>) -> Result<Grid> {
    let k = crate::kernels::lookup_kernel(kernel)?;
    Ok(run_fixpoint(grid, k, reference, &RunOptions::default())?.grid)
}
