//! Named multi-stage cascades over one source image.
//!
//! Each stage is tagged with a figure-style number (`16_2_7_lakes`) and carries
//! the checks that must hold against earlier stages: hulls dominate their input,
//! cleans stay under theirs, and every difference is taken from a grid that
//! dominates what is subtracted.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::engine::{border_cells, run_fixpoint, run_waterfall, RunOptions, RunStats};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{lookup_kernel, Mode};
use crate::pgm::{self, PgmFormat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PipelineName {
    Alphabet,
    Hieroglyph,
    Face,
    WaterfallBorder,
}

impl PipelineName {
    pub const ALL: [PipelineName; 4] = [
        PipelineName::Alphabet,
        PipelineName::Hieroglyph,
        PipelineName::Face,
        PipelineName::WaterfallBorder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PipelineName::Alphabet => "alphabet",
            PipelineName::Hieroglyph => "hieroglyph",
            PipelineName::Face => "face",
            PipelineName::WaterfallBorder => "waterfall-border",
        }
    }

    /// Bundled fixture the pipeline is exercised on.
    pub fn fixture(self) -> &'static str {
        match self {
            PipelineName::Alphabet => "alphabet",
            PipelineName::Hieroglyph => "hieroglyph",
            PipelineName::Face => "face",
            PipelineName::WaterfallBorder => "gradient",
        }
    }
}

impl fmt::Display for PipelineName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PipelineName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PipelineName::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let known: Vec<_> = PipelineName::ALL.iter().map(|p| p.name()).collect();
            Error::InvalidArgument(format!("unknown pipeline `{s}`; known: {}", known.join(", ")))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub run: RunOptions,
    /// Gain applied when writing stages marked for amplified display.
    pub display_gain: u32,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            run: RunOptions::default(),
            display_gain: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Stage >= the named stage, cellwise.
    Extensive,
    /// Stage <= the named stage, cellwise.
    AntiExtensive,
    /// The minuend of this difference dominated the subtrahend, so nothing saturated.
    NoUnderflow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub kind: CheckKind,
    pub against: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub tag: String,
    pub operation: String,
    /// Written to disk; helper stages feed later ones but are not written.
    pub emitted: bool,
    /// Written amplified by the pipeline's display gain. The stored grid is never amplified.
    pub amplified: bool,
    pub stats: Option<RunStats>,
    pub nonzero: usize,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub grid: Grid,
}

impl Stage {
    pub fn file_name(&self) -> String {
        format!("{}.pgm", self.tag)
    }

    /// False when a fixpoint run stopped at the pass bound.
    pub fn converged(&self) -> bool {
        self.stats.is_none_or(|s| s.converged)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub pipeline: String,
    pub stages: Vec<Stage>,
}

impl PipelineReport {
    pub fn stage(&self, tag: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.tag == tag)
    }

    pub fn emitted(&self) -> impl Iterator<Item = &Stage> {
        self.stages.iter().filter(|s| s.emitted)
    }

    /// `(stage tag, failed check)` for every check that does not hold.
    pub fn violations(&self) -> Vec<(String, Check)> {
        self.stages
            .iter()
            .flat_map(|s| s.checks.iter().filter(|c| !c.holds).map(|c| (s.tag.clone(), c.clone())))
            .collect()
    }

    pub fn all_converged(&self) -> bool {
        self.stages.iter().all(Stage::converged)
    }

    pub fn manifest_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes every emitted stage as binary PGM plus `manifest.json`.
    pub fn write(&self, out_dir: &Path, display_gain: u32) -> Result<()> {
        fs::create_dir_all(out_dir)?;
        for s in self.emitted() {
            let shown = if s.amplified { s.grid.amplify(display_gain)? } else { s.grid.clone() };
            pgm::write(out_dir.join(s.file_name()), &shown, PgmFormat::Binary)?;
        }
        fs::write(out_dir.join("manifest.json"), self.manifest_json())?;
        Ok(())
    }
}

struct Builder {
    opts: PipelineOptions,
    stages: Vec<Stage>,
}

impl Builder {
    fn new(opts: PipelineOptions) -> Builder {
        Builder { opts, stages: Vec::new() }
    }

    fn grid(&self, tag: &str) -> &Grid {
        &self.stages.iter().find(|s| s.tag == tag).expect("stage tags are static").grid
    }

    fn check(&self, kind: CheckKind, grid: &Grid, against: &str) -> Check {
        let other = self.grid(against);
        let holds = grid.cells().iter().zip(other.cells()).all(|(a, b)| match kind {
            CheckKind::Extensive | CheckKind::NoUnderflow => a >= b,
            CheckKind::AntiExtensive => a <= b,
        });
        Check {
            kind,
            against: against.to_string(),
            holds,
        }
    }

    fn push(&mut self, tag: &str, operation: String, grid: Grid, stats: Option<RunStats>, checks: Vec<Check>) -> &mut Stage {
        self.stages.push(Stage {
            tag: tag.to_string(),
            operation,
            emitted: true,
            amplified: false,
            stats,
            nonzero: grid.count_nonzero(),
            checks,
            grid,
        });
        self.stages.last_mut().expect("just pushed")
    }

    fn source(&mut self, tag: &str, g: &Grid) {
        self.push(tag, "source".into(), g.clone(), None, Vec::new());
    }

    fn kernel(&mut self, tag: &str, kernel: &str, input: &str, reference: Option<&str>) -> Result<&mut Stage> {
        let k = lookup_kernel(kernel)?;
        let run = run_fixpoint(self.grid(input), k, reference.map(|r| self.grid(r)), &self.opts.run)?;
        let kind = match k.mode {
            Mode::Expand => CheckKind::Extensive,
            Mode::Contract => CheckKind::AntiExtensive,
        };
        let checks = vec![self.check(kind, &run.grid, input)];
        let op = match reference {
            Some(r) => format!("{}({input}, ref={r})", k.name),
            None => format!("{}({input})", k.name),
        };
        Ok(self.push(tag, op, run.grid, Some(run.stats), checks))
    }

    fn minus(&mut self, tag: &str, a: &str, b: &str) -> Result<&mut Stage> {
        let g = self.grid(a).minus_sat(self.grid(b))?;
        let checks = vec![self.check(CheckKind::NoUnderflow, self.grid(a), b)];
        Ok(self.push(tag, format!("minus({a}, {b})"), g, None, checks))
    }

    fn xor(&mut self, tag: &str, a: &str, b: &str) -> Result<&mut Stage> {
        let g = self.grid(a).xor_mask(self.grid(b))?;
        Ok(self.push(tag, format!("xor({a}, {b})"), g, None, Vec::new()))
    }

    fn waterfall(&mut self, tag: &str, reference: &str) -> Result<&mut Stage> {
        let r = self.grid(reference);
        let fill = run_waterfall(r, &border_cells(r.width(), r.height()))?;
        let checks = vec![self.check(CheckKind::AntiExtensive, &fill.grid, reference)];
        Ok(self.push(tag, format!("waterfall_min(ref={reference}, seeds=border)"), fill.grid, Some(fill.stats), checks))
    }

    fn finish(self, name: PipelineName) -> PipelineReport {
        PipelineReport {
            pipeline: name.name().to_string(),
            stages: self.stages,
        }
    }
}

fn hide(stage: &mut Stage) {
    stage.emitted = false;
}

fn amplify(stage: &mut Stage) {
    stage.amplified = true;
}

fn alphabet(b: &mut Builder) -> Result<()> {
    let src = "15_1_original";
    b.kernel("15_2_convex_hull", "convex_hull_oct", src, None)?;
    b.kernel("15_3_lakes_filled", "clean_all8", "15_2_convex_hull", Some(src))?;
    b.kernel("15_4_dales_down_and_lakes", "expand_1234_1236", src, None)?;
    b.kernel("15_5_dales_down_cleaned", "clean_46", "15_4_dales_down_and_lakes", Some(src))?;
    hide(b.kernel("15_6_fill_right", "expand_1247_1478", src, None)?);
    b.kernel("15_6_dales_right_and_lakes", "clean_28", "15_6_fill_right", Some(src))?;
    hide(b.kernel("15_7_fill_left", "expand_2369_3689", src, None)?);
    b.kernel("15_7_dales_left_and_lakes", "clean_28", "15_7_fill_left", Some(src))?;
    Ok(())
}

fn hieroglyph(b: &mut Builder) -> Result<()> {
    let src = "16_2_1_original";
    b.kernel("16_2_2_convex_hull", "convex_hull_oct", src, None)?;
    b.kernel("16_2_3_minconvex", "minconvex_hull_oct", "16_2_2_convex_hull", Some(src))?;
    b.minus("16_2_4_concavities", "16_2_3_minconvex", src)?;
    hide(b.kernel("16_2_5_hull_of_concavities", "convex_hull_oct", "16_2_4_concavities", None)?);
    b.kernel("16_2_5_minconvex_of_concavities", "minconvex_hull_oct", "16_2_5_hull_of_concavities", Some("16_2_4_concavities"))?;
    b.kernel("16_2_6_cleaned", "clean_all8", "16_2_5_minconvex_of_concavities", Some("16_2_4_concavities"))?;
    b.minus("16_2_7_lakes", "16_2_6_cleaned", "16_2_4_concavities")?;
    for (fill, dale, kernel) in [
        ("16_2_8_fill_down", "16_2_8_dales_down", "expand_1234_1236"),
        ("16_2_9_fill_right", "16_2_9_dales_right", "expand_1247_1478"),
        ("16_2_10_fill_left", "16_2_10_dales_left", "expand_2369_3689"),
        ("16_2_11_fill_up", "16_2_11_dales_up", "expand_4789_6789"),
    ] {
        hide(b.kernel(fill, kernel, src, None)?);
        b.minus(dale, fill, src)?;
    }
    Ok(())
}

fn face(b: &mut Builder) -> Result<()> {
    let src = "17_2_1_original";
    b.waterfall("17_2_2_waterfall", src)?;
    b.minus("17_2_3_interior", src, "17_2_2_waterfall")?;
    let base = "17_2_3_interior";
    b.kernel("17_2_4_convex_hull", "convex_hull_oct", base, None)?;
    b.kernel("17_2_5_cleaned", "clean_all8", "17_2_4_convex_hull", Some(base))?;
    amplify(b.minus("17_2_6_lakes", "17_2_5_cleaned", base)?);
    b.xor("17_2_7_xor", "17_2_5_cleaned", "17_2_4_convex_hull")?;
    amplify(b.kernel("17_2_8_hull_of_lakes", "convex_hull_oct", "17_2_6_lakes", None)?);
    amplify(b.minus("17_2_9_concavities_of_lakes", "17_2_8_hull_of_lakes", "17_2_6_lakes")?);
    b.xor("17_2_10_xor", "17_2_6_lakes", "17_2_8_hull_of_lakes")?;
    let directional = [
        ("17_2_11", "17_2_12", "17_2_13", "down", "expand_1234_1236", "clean_46"),
        ("17_2_14", "17_2_15", "17_2_16", "right", "expand_1247_1478", "clean_28"),
        ("17_2_17", "17_2_18", "17_2_19", "left", "expand_2369_3689", "clean_28"),
    ];
    for (fill, diff, xor, dir, expand, clean) in directional {
        let raw = format!("{fill}_fill_{dir}");
        let cleaned = format!("{fill}_dales_{dir}");
        hide(b.kernel(&raw, expand, base, None)?);
        b.kernel(&cleaned, clean, &raw, Some(base))?;
        let minus = format!("{diff}_dales_{dir}_minus_interior");
        let stage = b.minus(&minus, &cleaned, base)?;
        if dir == "down" {
            amplify(stage);
        }
        // the down row xors the fill, the side rows xor the difference
        let lhs = if dir == "down" { cleaned } else { minus };
        b.xor(&format!("{xor}_xor"), &lhs, base)?;
    }
    Ok(())
}

fn waterfall_border(b: &mut Builder) -> Result<()> {
    b.waterfall("12_3_2_waterfall", "12_3_1_original")?;
    b.minus("12_3_3_difference", "12_3_1_original", "12_3_2_waterfall")?;
    Ok(())
}

/// Runs the named cascade on `source`.
pub fn run_pipeline(name: PipelineName, source: &Grid, opts: &PipelineOptions) -> Result<PipelineReport> {
    let mut b = Builder::new(*opts);
    let src = match name {
        PipelineName::Alphabet => "15_1_original",
        PipelineName::Hieroglyph => "16_2_1_original",
        PipelineName::Face => "17_2_1_original",
        PipelineName::WaterfallBorder => "12_3_1_original",
    };
    b.source(src, source);
    match name {
        PipelineName::Alphabet => alphabet(&mut b)?,
        PipelineName::Hieroglyph => hieroglyph(&mut b)?,
        PipelineName::Face => face(&mut b)?,
        PipelineName::WaterfallBorder => waterfall_border(&mut b)?,
    }
    Ok(b.finish(name))
}
