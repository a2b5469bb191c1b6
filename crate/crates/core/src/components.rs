//! Connected-component labeling under edge (4), vertex-only (x) or full (8) adjacency.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{offset, Grid, Level, N4, N8, NX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    /// Diagonal steps only.
    X,
    Eight,
}

impl Connectivity {
    pub fn steps(self) -> &'static [u8] {
        match self {
            Connectivity::Four => &N4,
            Connectivity::X => &NX,
            Connectivity::Eight => &N8,
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connectivity::Four => "4",
            Connectivity::X => "x",
            Connectivity::Eight => "8",
        })
    }
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "4" | "+" => Ok(Connectivity::Four),
            "x" | "X" => Ok(Connectivity::X),
            "8" => Ok(Connectivity::Eight),
            _ => Err(Error::InvalidArgument(format!("connectivity must be 4, x or 8 (got `{s}`)"))),
        }
    }
}

impl Serialize for Connectivity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Per-cell component ids; 0 marks background.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentMap {
    #[serde(skip)]
    pub width: usize,
    #[serde(skip)]
    pub height: usize,
    #[serde(skip)]
    pub labels: Vec<u32>,
    pub count: u32,
    pub connectivity: Connectivity,
    pub background: Level,
}

impl ComponentMap {
    /// Cells carrying label `id`.
    pub fn mask(&self, id: u32) -> Vec<bool> {
        self.labels.iter().map(|&l| l == id).collect()
    }

    /// Cell count of every component, indexed by `id - 1`.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0; self.count as usize];
        for &l in &self.labels {
            if l > 0 {
                areas[l as usize - 1] += 1;
            }
        }
        areas
    }

    /// Label raster with `maxval = max(count, 1)`.
    pub fn label_grid(&self) -> Result<Grid> {
        let levels = self.count.max(1) + 1;
        if levels > crate::grid::MAX_LEVELS {
            return Err(Error::InvalidArgument(format!(
                "{} components do not fit a 16-bit raster",
                self.count
            )));
        }
        Grid::from_cells(
            self.width,
            self.height,
            levels,
            self.labels.iter().map(|&l| l as Level).collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("component map serializes")
    }
}

/// Labels every maximal set of non-background cells joined by steps of `connectivity`.
///
/// Ids are handed out in raster order of each component's first cell.
pub fn label_components(g: &Grid, connectivity: Connectivity, background: Level) -> ComponentMap {
    label_mask(g.width(), g.height(), &g.support(background), connectivity, background)
}

/// Labeling of an arbitrary foreground mask.
pub fn label_mask(
    width: usize,
    height: usize,
    mask: &[bool],
    connectivity: Connectivity,
    background: Level,
) -> ComponentMap {
    let mut labels = vec![0u32; width * height];
    let mut count = 0;
    let mut queue = VecDeque::new();
    let steps: Vec<(isize, isize)> = connectivity.steps().iter().map(|&i| offset(i)).collect();
    for start in 0..labels.len() {
        if !mask[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (r, c) = ((i / width) as isize, (i % width) as isize);
            for &(dr, dc) in &steps {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= height as isize || nc >= width as isize {
                    continue;
                }
                let j = nr as usize * width + nc as usize;
                if mask[j] && labels[j] == 0 {
                    labels[j] = count;
                    queue.push_back(j);
                }
            }
        }
    }
    ComponentMap {
        width,
        height,
        labels,
        count,
        connectivity,
        background,
    }
}

/// `g` on the cells of component `id`, background elsewhere.
pub fn extract_component(g: &Grid, m: &ComponentMap, id: u32) -> Result<Grid> {
    if id == 0 || id > m.count {
        return Err(Error::ComponentOutOfRange { id, count: m.count });
    }
    if m.labels.len() != g.len() || m.width != g.width() {
        return Err(Error::Mismatch {
            left: format!("{}x{}", g.width(), g.height()),
            right: format!("{}x{}", m.width, m.height),
        });
    }
    let cells = g
        .cells()
        .iter()
        .zip(&m.labels)
        .map(|(&v, &l)| if l == id { v } else { m.background })
        .collect();
    Grid::from_cells(g.width(), g.height(), g.levels(), cells)
}

/// Number of components of the non-zero support, ignoring components smaller than `min_area`.
pub fn count_components(g: &Grid, connectivity: Connectivity, min_area: usize) -> usize {
    let m = label_components(g, connectivity, 0);
    m.areas().into_iter().filter(|&a| a >= min_area).count()
}
