//! Built-in verification suite behind `dalescope selftest`.
//!
//! Exhaustive sweeps compare the hull kernels with the shortest-path closure
//! on every 4x4 binary pattern; randomized suites check schedule confluence,
//! flatness, the update bound, and the waterfall against its oracle.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::components::Connectivity;
use crate::engine::{border_cells, run_fixpoint, run_waterfall, RunOptions, Schedule};
use crate::error::Result;
use crate::features::{glyph_descriptor, DaleCounts, FeatureOptions};
use crate::fixtures;
use crate::grid::{Grid, Level};
use crate::kernels::{catalog, convex_hull8on8_literal, lookup_kernel, KernelSchema, Mode};
use crate::oracle::{df_closure_with, monotone_reach, DistanceTable, PairScope};
use crate::pgm::{self, PgmFormat};

#[derive(Clone, Debug)]
pub struct SelftestOptions {
    /// Run the 8-connected sweep with the hull's d36 window as printed (`{5,6,7}`).
    pub literal_d36: bool,
    /// Extra kernels validated alongside the catalog.
    pub extra_kernels: Vec<KernelSchema>,
    /// Random grids per randomized suite.
    pub random_cases: usize,
    pub seed: u64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            literal_d36: false,
            extra_kernels: Vec::new(),
            random_cases: 20,
            seed: 0x5eed,
        }
    }
}

/// A failing input with what was expected and what came out.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub note: String,
    #[serde(skip)]
    pub input: Grid,
    #[serde(skip)]
    pub expected: Option<Grid>,
    #[serde(skip)]
    pub actual: Option<Grid>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    /// `canonical`, or `literal-variant` when the d36 window was taken as printed.
    pub variant: String,
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes each failing check's grids as PGM and its note as JSON under `dir`.
    pub fn write_counterexamples(&self, dir: &Path) -> Result<Vec<String>> {
        let mut written = Vec::new();
        for c in self.checks.iter().filter(|c| !c.passed) {
            let Some(cx) = &c.counterexample else { continue };
            fs::create_dir_all(dir)?;
            let stem = c.name.replace(' ', "_");
            let mut put = |suffix: &str, g: &Grid| -> Result<()> {
                let name = format!("{stem}_{suffix}.pgm");
                pgm::write(dir.join(&name), g, PgmFormat::Ascii)?;
                written.push(name);
                Ok(())
            };
            put("input", &cx.input)?;
            if let Some(g) = &cx.expected {
                put("expected", g)?;
            }
            if let Some(g) = &cx.actual {
                put("actual", g)?;
            }
            let name = format!("{stem}.json");
            fs::write(dir.join(&name), serde_json::to_string_pretty(c).expect("outcome serializes"))?;
            written.push(name);
        }
        Ok(written)
    }
}

fn outcome(name: &str, failure: Option<Counterexample>, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed: failure.is_none(),
        detail,
        counterexample: failure,
    }
}

/// All 65,536 foreground patterns of a 4x4 block inside an 8x8 zero frame.
pub fn patterns_4x4() -> impl Iterator<Item = Grid> {
    (0u32..1 << 16).map(|p| {
        let mut g = Grid::new(8, 8, 2).expect("8x8 binary grid");
        for i in 0..16 {
            if p >> i & 1 == 1 {
                g.set(2 + i / 4, 2 + i % 4, 1);
            }
        }
        g
    })
}

/// Random `w x h` grid over `levels`.
pub fn random_grid(rng: &mut impl Rng, w: usize, h: usize, levels: u32) -> Grid {
    let cells = (0..w * h).map(|_| rng.gen_range(0..levels) as Level).collect();
    Grid::from_cells(w, h, levels, cells).expect("values drawn below levels")
}

/// Working grid and reference for exercising `k` on the random grid `g`.
///
/// Contract rules start from the octagonal hull of `g` with `g` as reference;
/// guarded expand rules start from an independent random grid.
pub fn workload(k: &KernelSchema, g: &Grid, rng: &mut impl Rng) -> (Grid, Option<Grid>) {
    if !k.is_guarded() {
        return (g.clone(), None);
    }
    match k.mode {
        Mode::Contract => {
            let hull = run_fixpoint(g, lookup_kernel("convex_hull_oct").expect("catalog kernel"), None, &RunOptions::default())
                .expect("unguarded run")
                .grid;
            (hull, Some(g.clone()))
        }
        Mode::Expand => (random_grid(rng, g.width(), g.height(), g.levels()), Some(g.clone())),
    }
}

fn fewer_cells(a: &Option<Counterexample>, g: &Grid) -> bool {
    a.as_ref().is_none_or(|c| g.count_nonzero() < c.input.count_nonzero())
}

fn check_registry(opts: &SelftestOptions) -> CheckOutcome {
    let mut bad = Vec::new();
    for result in catalog().map(KernelSchema::validate).chain(opts.extra_kernels.iter().map(KernelSchema::validate)) {
        if let Err(e) = result {
            bad.push(e.to_string());
        }
    }
    let detail = if bad.is_empty() {
        format!("{} kernels valid", catalog().count() + opts.extra_kernels.len())
    } else {
        bad.join("; ")
    };
    let failure = (!bad.is_empty()).then(|| Counterexample {
        note: bad.join("; "),
        input: Grid::new(3, 3, 2).expect("3x3 grid"),
        expected: None,
        actual: None,
    });
    outcome("registry", failure, detail)
}

fn check_df4() -> CheckOutcome {
    let table = DistanceTable::new(8, 8, Connectivity::Four).expect("4-connected table");
    let k = lookup_kernel("convex_hull4").expect("catalog kernel");
    let mut failures = 0;
    let mut worst = None;
    for g in patterns_4x4() {
        let got = run_fixpoint(&g, k, None, &RunOptions::default()).expect("unguarded run").grid;
        let want = df_closure_with(&table, &g, PairScope::Component).expect("binary grid");
        if got != want {
            failures += 1;
            if fewer_cells(&worst, &g) {
                worst = Some(Counterexample {
                    note: "convex_hull4 fixpoint differs from the 4-connected closure".into(),
                    input: g,
                    expected: Some(want),
                    actual: Some(got),
                });
            }
        }
    }
    outcome("df4 exhaustive", worst, format!("{failures} of 65536 patterns differ"))
}

fn check_df8(opts: &SelftestOptions) -> CheckOutcome {
    let table = DistanceTable::new(8, 8, Connectivity::Eight).expect("8-connected table");
    let canonical = lookup_kernel("convex_hull8on8").expect("catalog kernel");
    let literal = convex_hull8on8_literal();
    let k = if opts.literal_d36 { &literal } else { canonical };
    let (mut equal, mut failures, mut drift) = (0, 0, 0);
    let mut worst = None;
    for g in patterns_4x4() {
        let got = run_fixpoint(&g, k, None, &RunOptions::default()).expect("unguarded run").grid;
        let want = df_closure_with(&table, &g, PairScope::Component).expect("binary grid");
        if opts.literal_d36 {
            let reference = run_fixpoint(&g, canonical, None, &RunOptions::default()).expect("unguarded run").grid;
            drift += usize::from(reference != got);
        }
        if got == want {
            equal += 1;
        } else if !got.cells().iter().zip(want.cells()).all(|(a, b)| a <= b) {
            failures += 1;
            if fewer_cells(&worst, &g) {
                worst = Some(Counterexample {
                    note: format!("{} fixpoint leaves the 8-connected closure", k.name),
                    input: g,
                    expected: Some(want),
                    actual: Some(got),
                });
            }
        }
    }
    let mut detail = format!("{failures} of 65536 patterns escape the closure; {equal} equal");
    if opts.literal_d36 {
        detail.push_str(&format!("; literal d36 differs from canonical on {drift}"));
    }
    outcome("df8 exhaustive", worst, detail)
}

fn check_confluence(opts: &SelftestOptions) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let schedules = [
        Schedule::ReverseSweep,
        Schedule::Worklist,
        Schedule::RandomFair { seed: opts.seed },
        Schedule::RandomFair { seed: opts.seed + 1 },
    ];
    let mut runs = 0;
    for _ in 0..opts.random_cases {
        let g = random_grid(&mut rng, 12, 12, 8);
        for k in catalog() {
            let (work, reference) = workload(k, &g, &mut rng);
            let base = run_fixpoint(&work, k, reference.as_ref(), &RunOptions::default()).expect("catalog run");
            for s in schedules {
                runs += 1;
                let other = run_fixpoint(&work, k, reference.as_ref(), &RunOptions::with_schedule(s)).expect("catalog run");
                if other.grid != base.grid {
                    let failure = Counterexample {
                        note: format!("{} under {s:?} differs from raster order", k.name),
                        input: work,
                        expected: Some(base.grid),
                        actual: Some(other.grid),
                    };
                    return outcome("confluence", Some(failure), format!("failed after {runs} runs"));
                }
            }
        }
    }
    outcome("confluence", None, format!("{runs} alternative-schedule runs agree"))
}

fn check_flatness(opts: &SelftestOptions) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xf1a7);
    let mut runs = 0;
    for _ in 0..opts.random_cases {
        let g = random_grid(&mut rng, 12, 12, 8);
        for k in catalog().filter(|k| !k.is_guarded()) {
            let fixed = run_fixpoint(&g, k, None, &RunOptions::default()).expect("catalog run").grid;
            for t in 1..8 {
                runs += 1;
                let bin = g.binarize(t);
                let a = fixed.binarize(t);
                let b = run_fixpoint(&bin, k, None, &RunOptions::default()).expect("catalog run").grid;
                if a != b {
                    let failure = Counterexample {
                        note: format!("{} does not commute with threshold {t}", k.name),
                        input: g,
                        expected: Some(a),
                        actual: Some(b),
                    };
                    return outcome("threshold commutation", Some(failure), format!("failed after {runs} runs"));
                }
            }
        }
    }
    outcome("threshold commutation", None, format!("{runs} threshold checks agree"))
}

fn check_bounds(opts: &SelftestOptions) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xb0);
    for _ in 0..opts.random_cases {
        let g = random_grid(&mut rng, 12, 12, 8);
        let bound = (g.len() * (g.levels() as usize - 1)) as u64;
        for k in catalog() {
            let (work, reference) = workload(k, &g, &mut rng);
            let first = run_fixpoint(&work, k, reference.as_ref(), &RunOptions::default()).expect("catalog run");
            let again = run_fixpoint(&first.grid, k, reference.as_ref(), &RunOptions::default()).expect("catalog run");
            if first.stats.cell_updates > bound || again.stats.cell_updates != 0 || !first.stats.converged {
                let failure = Counterexample {
                    note: format!(
                        "{}: {} updates (bound {bound}), {} on rerun",
                        k.name, first.stats.cell_updates, again.stats.cell_updates
                    ),
                    input: work,
                    expected: None,
                    actual: Some(first.grid),
                };
                return outcome("update bound and idempotence", Some(failure), String::new());
            }
        }
    }
    outcome("update bound and idempotence", None, "all runs within bound, reruns quiet".into())
}

fn check_waterfall(opts: &SelftestOptions) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xfa11);
    for _ in 0..opts.random_cases {
        let r = random_grid(&mut rng, 16, 16, 8);
        let seeds = border_cells(16, 16);
        let fill = run_waterfall(&r, &seeds).expect("seeds in range");
        let want = monotone_reach(&r, &seeds);
        if fill.filled != want {
            let failure = Counterexample {
                note: "waterfall reach differs from the non-increasing path oracle".into(),
                input: r.clone(),
                expected: Some(Grid::from_mask(16, 16, &want).expect("mask grid")),
                actual: Some(Grid::from_mask(16, 16, &fill.filled).expect("mask grid")),
            };
            return outcome("waterfall oracle", Some(failure), String::new());
        }
    }
    outcome("waterfall oracle", None, format!("{} grids agree", opts.random_cases))
}

/// Expected `(lakes, up, down, left, right)` per bundled glyph.
pub const GLYPH_TABLE: [(char, usize, DaleCounts); 6] = [
    ('O', 1, DaleCounts { up: 0, down: 0, left: 0, right: 0 }),
    ('C', 0, DaleCounts { up: 0, down: 0, left: 0, right: 1 }),
    ('E', 0, DaleCounts { up: 0, down: 0, left: 0, right: 2 }),
    ('H', 0, DaleCounts { up: 1, down: 1, left: 0, right: 0 }),
    ('U', 0, DaleCounts { up: 1, down: 0, left: 0, right: 0 }),
    ('A', 1, DaleCounts { up: 0, down: 1, left: 0, right: 0 }),
];

fn check_glyphs() -> CheckOutcome {
    for (letter, lakes, dales) in GLYPH_TABLE {
        let g = fixtures::glyph(letter).expect("bundled glyph");
        let d = glyph_descriptor(&g, 1, &FeatureOptions::default()).expect("glyph pipeline");
        if d.lakes != lakes || d.dales != dales {
            let failure = Counterexample {
                note: format!("glyph {letter}: got {}", d.to_json()),
                input: g,
                expected: None,
                actual: None,
            };
            return outcome("glyph table", Some(failure), String::new());
        }
    }
    outcome("glyph table", None, "O C E H U A match".into())
}

pub fn run_selftest(opts: &SelftestOptions) -> SelftestReport {
    let checks = vec![
        check_registry(opts),
        check_df4(),
        check_df8(opts),
        check_confluence(opts),
        check_flatness(opts),
        check_bounds(opts),
        check_waterfall(opts),
        check_glyphs(),
    ];
    SelftestReport {
        variant: if opts.literal_d36 { "literal-variant" } else { "canonical" }.into(),
        checks,
    }
}
