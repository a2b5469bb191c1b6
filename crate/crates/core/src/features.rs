//! Shape features built from fixpoint runs: lakes, directional dales, concavity
//! depth, ridges, and per-glyph descriptors.
//!
//! Every function pads its input with a background margin before running and
//! crops the result back, so callers may pass tightly cropped images.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::components::{extract_component, label_components, label_mask, Connectivity};
use crate::engine::{run_fixpoint, RunOptions};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::lookup_kernel;

/// Side toward which a dale opens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Down,
    Up,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    /// Expand kernel that fills dales opened this way.
    pub fn expand_kernel(self) -> &'static str {
        match self {
            Direction::Down => "expand_1234_1236",
            Direction::Up => "expand_4789_6789",
            Direction::Right => "expand_1247_1478",
            Direction::Left => "expand_2369_3689",
        }
    }

    /// Contract kernel that strips fill leaking past the dale's side walls.
    pub fn clean_kernel(self) -> &'static str {
        match self {
            Direction::Down | Direction::Up => "clean_46",
            Direction::Left | Direction::Right => "clean_28",
        }
    }

    /// The direction after rotating the image a quarter turn clockwise.
    pub fn rotated_cw(self) -> Direction {
        match self {
            Direction::Down => Direction::Left,
            Direction::Left => Direction::Up,
            Direction::Up => Direction::Right,
            Direction::Right => Direction::Down,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Down => "down",
            Direction::Up => "up",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Direction::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("direction must be up, down, left or right (got `{s}`)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureOptions {
    /// Background cells added on every side before running.
    pub margin: usize,
    /// Dale components smaller than this are ignored when counting.
    pub min_dale_area: usize,
    pub run: RunOptions,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            margin: 2,
            min_dale_area: 2,
            run: RunOptions::default(),
        }
    }
}

impl FeatureOptions {
    fn fix(&self, g: &Grid, kernel: &str, reference: Option<&Grid>) -> Result<Grid> {
        Ok(run_fixpoint(g, lookup_kernel(kernel)?, reference, &self.run)?.grid)
    }

    fn on_padded(&self, g: &Grid, f: impl FnOnce(&Grid) -> Result<Grid>) -> Result<Grid> {
        let padded = g.pad_uniform(self.margin, self.run.border.value());
        f(&padded)?.crop_uniform(self.margin)
    }
}

fn lakes_padded(g: &Grid, o: &FeatureOptions) -> Result<Grid> {
    let hull = o.fix(g, "convex_hull_oct", None)?;
    let kept = o.fix(&hull, "clean_all8", Some(g))?;
    kept.minus_sat(g)
}

fn dales_padded(g: &Grid, dir: Direction, cleaned: bool, o: &FeatureOptions) -> Result<Grid> {
    let mut filled = o.fix(g, dir.expand_kernel(), None)?;
    if cleaned {
        filled = o.fix(&filled, dir.clean_kernel(), Some(g))?;
    }
    filled.minus_sat(g)
}

/// Enclosed concavities: the octagonal hull eroded back toward `g` from every side, minus `g`.
pub fn lakes(g: &Grid, opts: &FeatureOptions) -> Result<Grid> {
    opts.on_padded(g, |p| lakes_padded(p, opts))
}

/// Fill of the concavities opened toward `dir`, minus `g`. Lakes are included.
pub fn dales(g: &Grid, dir: Direction, cleaned: bool, opts: &FeatureOptions) -> Result<Grid> {
    opts.on_padded(g, |p| dales_padded(p, dir, cleaned, opts))
}

/// Per-cell excavation round of the concavities of a grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthMap {
    pub width: usize,
    pub height: usize,
    /// Alternation index (1-based) at which each cell last changed; 0 if never.
    pub depth: Vec<u32>,
    /// Alternations executed, including the final one that changed nothing.
    pub passes: u32,
}

impl DepthMap {
    pub fn max_depth(&self) -> u32 {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn at(&self, row: usize, col: usize) -> u32 {
        self.depth[row * self.width + col]
    }
}

/// Digs the octagonal hull of `g` back toward `g` by alternating the 4- and
/// 8-connected minconvex kernels until one full alternation changes nothing.
pub fn concavity_depth(g: &Grid, opts: &FeatureOptions) -> Result<(DepthMap, u32)> {
    let m = opts.margin;
    let padded = g.pad_uniform(m, opts.run.border.value());
    let first = lookup_kernel("minconvex_hull4")?;
    let second = lookup_kernel("minconvex_123_369_789_147")?;
    let mut work = opts.fix(&padded, "convex_hull_oct", None)?;
    let mut depth = vec![0u32; padded.len()];
    let mut passes = 0;
    loop {
        passes += 1;
        let mut changed = false;
        for k in [first, second] {
            let next = run_fixpoint(&work, k, Some(&padded), &opts.run)?.grid;
            for (i, (a, b)) in work.cells().iter().zip(next.cells()).enumerate() {
                if a != b {
                    depth[i] = passes;
                    changed = true;
                }
            }
            work = next;
        }
        if !changed {
            break;
        }
    }
    let (pw, w, h) = (padded.width(), g.width(), g.height());
    let depth = (0..h)
        .flat_map(|r| depth[(r + m) * pw + m..(r + m) * pw + m + w].to_vec())
        .collect();
    Ok((
        DepthMap {
            width: w,
            height: h,
            depth,
            passes,
        },
        passes,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RidgeMethod {
    /// Angle expansion of the down-dale, then the up-dale of that.
    A,
    /// Side dale, angle expansion, opposite side dale.
    B,
}

impl FromStr for RidgeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(RidgeMethod::A),
            "b" | "B" => Ok(RidgeMethod::B),
            _ => Err(Error::InvalidArgument(format!("ridge method must be A or B (got `{s}`)"))),
        }
    }
}

/// Strokes recovered as dales of dale-derived images.
pub fn ridges(g: &Grid, method: RidgeMethod, opts: &FeatureOptions) -> Result<Grid> {
    opts.on_padded(g, |p| match method {
        RidgeMethod::A => {
            let dale = dales_padded(p, Direction::Down, true, opts)?;
            let rays = opts.fix(&dale, "ray_268", Some(p))?;
            let up = opts.fix(&rays, "expand_4789_6789", None)?;
            let up = opts.fix(&up, "clean_46", Some(&rays))?;
            up.minus_sat(&rays)
        }
        RidgeMethod::B => {
            let side = opts.fix(p, "expand_369", None)?;
            let rays = opts.fix(&side, "ray_468", Some(p))?;
            let other = opts.fix(&rays, "expand_147", None)?;
            other.minus_sat(p)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    Above,
    Within,
    Contains,
}

impl RelationKind {
    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Above => "above",
            RelationKind::Within => "within",
            RelationKind::Contains => "contains",
        }
    }
}

/// `(subject, relation, object)`; serializes as a three-element array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub subject: String,
    pub kind: RelationKind,
    pub object: String,
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.subject, self.kind.name(), &self.object).serialize(s)
    }
}

/// Pairwise relations between named parts of one image.
///
/// `P above Q` when rays cast downward from P's support reach Q.
/// `P contains Q` (and `Q within P`) when Q's support lies inside the octagonal hull of P.
/// Parts with empty support take part in no relation.
pub fn relation_matrix(parts: &[(String, Grid)], opts: &FeatureOptions) -> Result<Vec<Relation>> {
    let Some((_, first)) = parts.first() else {
        return Ok(Vec::new());
    };
    for (_, g) in parts {
        first.same_shape(g)?;
    }
    let mut shadows = Vec::with_capacity(parts.len());
    let mut hulls = Vec::with_capacity(parts.len());
    let mut supports = Vec::with_capacity(parts.len());
    for (_, g) in parts {
        let support = g.support(0);
        let mask = Grid::from_mask(g.width(), g.height(), &support)?;
        shadows.push(opts.on_padded(&mask, |p| opts.fix(p, "ray_2", None))?.support(0));
        hulls.push(opts.on_padded(&mask, |p| opts.fix(p, "convex_hull_oct", None))?.support(0));
        supports.push(support);
    }
    let mut out = Vec::new();
    for (p, (pname, _)) in parts.iter().enumerate() {
        for (q, (qname, _)) in parts.iter().enumerate() {
            if p == q || !supports[p].contains(&true) || !supports[q].contains(&true) {
                continue;
            }
            let q_cells = || supports[q].iter().enumerate().filter(|&(_, &s)| s).map(|(i, _)| i);
            let rel = |kind, subject: &String, object: &String| Relation {
                subject: subject.clone(),
                kind,
                object: object.clone(),
            };
            if q_cells().any(|i| shadows[p][i] && !supports[p][i]) {
                out.push(rel(RelationKind::Above, pname, qname));
            }
            if q_cells().all(|i| hulls[p][i]) {
                out.push(rel(RelationKind::Contains, pname, qname));
                out.push(rel(RelationKind::Within, qname, pname));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DaleCounts {
    pub up: usize,
    pub down: usize,
    pub left: usize,
    pub right: usize,
}

impl DaleCounts {
    pub fn get(&self, dir: Direction) -> usize {
        match dir {
            Direction::Up => self.up,
            Direction::Down => self.down,
            Direction::Left => self.left,
            Direction::Right => self.right,
        }
    }

    fn slot(&mut self, dir: Direction) -> &mut usize {
        match dir {
            Direction::Up => &mut self.up,
            Direction::Down => &mut self.down,
            Direction::Left => &mut self.left,
            Direction::Right => &mut self.right,
        }
    }

    pub fn total(&self) -> usize {
        self.up + self.down + self.left + self.right
    }
}

/// Lake and dale counts of one glyph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeatureDescriptor {
    pub component_id: u32,
    pub lakes: usize,
    pub dales: DaleCounts,
    pub relations: Vec<Relation>,
}

impl FeatureDescriptor {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }
}

/// Counts the lakes and cleaned dales of a single glyph.
///
/// Dale fill overlapping a lake is dropped; remaining 8-components smaller than
/// `min_dale_area` are ignored. Parts are named `lake1`, `dale-down1`, ... in raster
/// order and related through [`relation_matrix`].
pub fn glyph_descriptor(g: &Grid, component_id: u32, opts: &FeatureOptions) -> Result<FeatureDescriptor> {
    let mut parts = Vec::new();
    let lake = lakes(g, opts)?;
    let lake_support = lake.support(0);
    let lake_map = label_mask(g.width(), g.height(), &lake_support, Connectivity::Eight, 0);
    for id in 1..=lake_map.count {
        parts.push((format!("lake{id}"), extract_component(&lake, &lake_map, id)?));
    }
    let mut counts = DaleCounts::default();
    for dir in Direction::ALL {
        let fill = dales(g, dir, true, opts)?;
        let mask: Vec<bool> = fill.support(0).iter().zip(&lake_support).map(|(&d, &l)| d && !l).collect();
        let map = label_mask(g.width(), g.height(), &mask, Connectivity::Eight, 0);
        for (i, area) in map.areas().into_iter().enumerate() {
            if area >= opts.min_dale_area {
                *counts.slot(dir) += 1;
                let id = i as u32 + 1;
                let part = extract_component(&fill, &map, id)?;
                parts.push((format!("dale-{dir}{}", counts.get(dir)), part));
            }
        }
    }
    Ok(FeatureDescriptor {
        component_id,
        lakes: lake_map.count as usize,
        dales: counts,
        relations: relation_matrix(&parts, opts)?,
    })
}

/// One descriptor per 8-connected glyph on a zero background, in label order.
pub fn describe(g: &Grid, opts: &FeatureOptions) -> Result<Vec<FeatureDescriptor>> {
    let map = label_components(g, Connectivity::Eight, 0);
    (1..=map.count)
        .map(|id| glyph_descriptor(&extract_component(g, &map, id)?, id, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::count_components;
    use proptest::prelude::*;

    fn art(s: &str) -> Grid {
        Grid::from_ascii(64, 63, s).unwrap()
    }

    fn opts() -> FeatureOptions {
        FeatureOptions::default()
    }

    fn ring() -> Grid {
        art("#####\n#...#\n#...#\n#...#\n#####")
    }

    #[test]
    fn ring_has_one_lake() {
        let l = lakes(&ring(), &opts()).unwrap();
        assert_eq!(l.count_nonzero(), 9);
        assert_eq!(count_components(&l, Connectivity::Eight, 1), 1);
    }

    #[test]
    fn open_ring_has_no_lake() {
        let c = art("#####\n#....\n#....\n#....\n#####");
        assert_eq!(lakes(&c, &opts()).unwrap().count_nonzero(), 0);
        let d = dales(&c, Direction::Right, true, &opts()).unwrap();
        assert_eq!(count_components(&d, Connectivity::Eight, 2), 1);
    }

    #[test]
    fn blank_and_solid_have_nothing() {
        let blank = Grid::new(6, 6, 64).unwrap();
        assert_eq!(lakes(&blank, &opts()).unwrap(), blank);
        let solid = art("####\n####\n####");
        for dir in Direction::ALL {
            assert_eq!(dales(&solid, dir, false, &opts()).unwrap().count_nonzero(), 0);
            assert_eq!(dales(&solid, dir, true, &opts()).unwrap().count_nonzero(), 0);
        }
        let d = glyph_descriptor(&blank, 0, &opts()).unwrap();
        assert_eq!((d.lakes, d.dales.total(), d.relations.len()), (0, 0, 0));
    }

    #[test]
    fn u_opens_up() {
        let u = art("#...#\n#...#\n#...#\n#####");
        let d = glyph_descriptor(&u, 1, &opts()).unwrap();
        assert_eq!(d.lakes, 0);
        assert_eq!(d.dales, DaleCounts { up: 1, ..DaleCounts::default() });
    }

    #[test]
    fn ring_lake_sits_inside() {
        let d = glyph_descriptor(&ring(), 1, &opts()).unwrap();
        assert_eq!(d.lakes, 1);
        assert_eq!(d.dales.total(), 0);
        let r = ring();
        let parts = vec![("ring".to_string(), r.clone()), ("lake".to_string(), lakes(&r, &opts()).unwrap())];
        let rel = relation_matrix(&parts, &opts()).unwrap();
        let has = |s: &str, k, o: &str| rel.iter().any(|x| x.subject == s && x.kind == k && x.object == o);
        assert!(has("ring", RelationKind::Contains, "lake"));
        assert!(has("lake", RelationKind::Within, "ring"));
        assert!(!has("lake", RelationKind::Contains, "ring"));
    }

    #[test]
    fn side_by_side_blobs_are_unrelated() {
        let a = art("##.....\n##.....");
        let b = art(".....##\n.....##");
        let rel = relation_matrix(&[("a".into(), a), ("b".into(), b)], &opts()).unwrap();
        assert!(rel.is_empty());
    }

    #[test]
    fn stacked_blobs_are_above() {
        let a = art("##.\n...\n...");
        let b = art("...\n...\n.##");
        let rel = relation_matrix(&[("a".into(), a), ("b".into(), b)], &opts()).unwrap();
        assert_eq!(
            rel,
            vec![Relation {
                subject: "a".into(),
                kind: RelationKind::Above,
                object: "b".into()
            }]
        );
    }

    #[test]
    fn relation_json_shape() {
        let r = Relation {
            subject: "lake1".into(),
            kind: RelationKind::Above,
            object: "dale-down1".into(),
        };
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"["lake1","above","dale-down1"]"#);
    }

    #[test]
    fn mismatched_parts_rejected() {
        let parts = vec![("a".into(), Grid::new(2, 2, 4).unwrap()), ("b".into(), Grid::new(3, 2, 4).unwrap())];
        assert!(relation_matrix(&parts, &opts()).is_err());
    }

    #[test]
    fn convex_blob_has_no_depth() {
        let (d, passes) = concavity_depth(&art("####\n####\n####"), &opts()).unwrap();
        assert_eq!(d.max_depth(), 0);
        assert_eq!(passes, 1);
    }

    #[test]
    fn notch_is_one_round_deep() {
        let g = art("##.##\n#####\n#####\n#####");
        let (d, passes) = concavity_depth(&g, &opts()).unwrap();
        assert_eq!(d.at(0, 2), 1);
        assert_eq!(d.max_depth(), 1);
        assert_eq!(passes, 2);
        assert!(d.max_depth() <= passes);
    }

    /// Funnel of depth `3k` whose gap narrows by two cells every three rows.
    fn funnel(k: usize) -> Grid {
        let width = 2 * k + 5;
        let mid = width / 2;
        let mut rows = Vec::new();
        for r in 0..3 * k {
            let half = k - r / 3;
            rows.push((0..width).map(|c| if c + half >= mid && c <= mid + half { '.' } else { '#' }).collect::<String>());
        }
        rows.push("#".repeat(width));
        art(&rows.join("\n"))
    }

    #[test]
    fn funnel_depth_grows_with_size() {
        let depths: Vec<u32> = (1..6)
            .map(|k| {
                let (d, passes) = concavity_depth(&funnel(k), &opts()).unwrap();
                assert!(d.max_depth() <= passes);
                d.max_depth()
            })
            .collect();
        assert!(depths.windows(2).all(|w| w[0] <= w[1]), "{depths:?}");
        assert!(depths[4] > depths[0], "{depths:?}");
    }

    #[test]
    fn diagonal_walls_empty_in_one_round() {
        let g = art("#.....#\n##...##\n###.###\n#######");
        assert_eq!(concavity_depth(&g, &opts()).unwrap().0.max_depth(), 1);
    }

    #[test]
    fn slot_depth_is_monotone_toward_the_mouth() {
        for k in 1..8 {
            let mut rows = vec!["###.###".to_string(); k];
            rows.push("#######".into());
            rows.push("#######".into());
            let (d, _) = concavity_depth(&art(&rows.join("\n")), &opts()).unwrap();
            for r in 1..k {
                assert!(d.at(r, 3) <= d.at(r - 1, 3), "k={k} row {r}");
            }
        }
    }

    #[test]
    fn concavity_rerun_is_quiet() {
        let g = funnel(3);
        let o = opts();
        let padded = g.pad_uniform(o.margin, 0);
        let mut work = o.fix(&padded, "convex_hull_oct", None).unwrap();
        loop {
            let a = o.fix(&work, "minconvex_hull4", Some(&padded)).unwrap();
            let b = o.fix(&a, "minconvex_123_369_789_147", Some(&padded)).unwrap();
            if b == work {
                break;
            }
            work = b;
        }
        for k in ["minconvex_hull4", "minconvex_123_369_789_147"] {
            let run = run_fixpoint(&work, lookup_kernel(k).unwrap(), Some(&padded), &o.run).unwrap();
            assert_eq!(run.stats.cell_updates, 0);
        }
    }

    #[test]
    fn ridges_of_convex_blob_vanish() {
        let g = art("####\n####\n####");
        assert_eq!(ridges(&g, RidgeMethod::A, &opts()).unwrap().count_nonzero(), 0);
    }

    #[test]
    fn ridge_a_keeps_the_left_stem() {
        let g = crate::fixtures::glyph('A').unwrap();
        let r = ridges(&g, RidgeMethod::A, &opts()).unwrap();
        assert!(r.count_nonzero() > 0);
        let (w, h) = (g.width(), g.height());
        let fg: Vec<(usize, usize)> = (0..h).flat_map(|y| (0..w).map(move |x| (y, x))).filter(|&p| g[p] > 0).collect();
        let (top, bottom) = (fg.iter().map(|p| p.0).min().unwrap(), fg.iter().map(|p| p.0).max().unwrap());
        let left = fg.iter().map(|p| p.1).min().unwrap();
        let mid = w / 2;
        let mut stem_cells = 0;
        for y in 0..h {
            for x in 0..w {
                if r[(y, x)] > 0 {
                    assert!(y >= top && y <= bottom && x >= left && x < mid, "ridge cell ({y},{x})");
                    stem_cells += usize::from(g[(y, x)] > 0);
                }
            }
        }
        // the whole left leg, up to the crossbar
        let leg = (0..h).filter(|&y| g[(y, left)] > 0).count();
        assert!(stem_cells >= 2 * leg);
    }

    #[test]
    fn ridge_b_of_a_bar_opens_down() {
        let g = crate::fixtures::load("vbar").unwrap();
        let r = ridges(&g, RidgeMethod::B, &opts()).unwrap();
        assert!(r.count_nonzero() > 0);
        let down = dales(&r, Direction::Down, true, &opts()).unwrap();
        assert_eq!(count_components(&down, Connectivity::Eight, 2), 1);
        for (d, v) in down.cells().iter().zip(g.cells()) {
            assert_eq!(*d > 0, *v > 0);
        }
    }

    #[test]
    fn direction_names_round_trip() {
        for d in Direction::ALL {
            assert_eq!(d.name().parse::<Direction>().unwrap(), d);
            assert_eq!(d.rotated_cw().rotated_cw().rotated_cw().rotated_cw(), d);
        }
        assert!("north".parse::<Direction>().is_err());
    }

    fn arb_glyph() -> impl Strategy<Value = Grid> {
        (2usize..8, 2usize..8).prop_flat_map(|(w, h)| {
            prop::collection::vec(prop::bool::weighted(0.6), w * h).prop_map(move |bits| {
                let cells = bits.into_iter().map(|b| if b { 5 } else { 0 }).collect();
                Grid::from_cells(w, h, 64, cells).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn dales_rotate_with_the_image(g in arb_glyph(), cleaned: bool) {
            for dir in Direction::ALL {
                let turned = dales(&g.rotate_cw(), dir.rotated_cw(), cleaned, &opts()).unwrap();
                prop_assert_eq!(turned, dales(&g, dir, cleaned, &opts()).unwrap().rotate_cw());
            }
        }

        #[test]
        fn features_are_zero_on_foreground(g in arb_glyph()) {
            let l = lakes(&g, &opts()).unwrap();
            for (a, b) in l.cells().iter().zip(g.cells()) {
                prop_assert!(*b == 0 || *a == 0);
            }
            for dir in Direction::ALL {
                let d = dales(&g, dir, true, &opts()).unwrap();
                for (a, b) in d.cells().iter().zip(g.cells()) {
                    prop_assert!(*b == 0 || *a == 0);
                }
            }
        }

        #[test]
        fn descriptor_ignores_shift_and_gain(g in arb_glyph(), dx in 0usize..4, dy in 0usize..4, k in 1u32..10) {
            let base = glyph_descriptor(&g, 1, &opts()).unwrap();
            let shifted = g.pad(dy, dx, 3 - dy, 3 - dx, 0);
            let moved = glyph_descriptor(&shifted, 1, &opts()).unwrap();
            prop_assert_eq!(moved.lakes, base.lakes);
            prop_assert_eq!(moved.dales, base.dales);
            prop_assert_eq!(&moved.relations, &base.relations);
            let gained = glyph_descriptor(&g.amplify(k).unwrap(), 1, &opts()).unwrap();
            prop_assert_eq!(gained, base);
        }
    }
}
