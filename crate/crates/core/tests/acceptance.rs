//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` still run and still print FAIL; they only
//! stop counting against the exit status. An unexpected pass is reported too.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dalescope::engine::{border_cells, fixpoint, run_waterfall, ContractFloor};
use dalescope::features::{glyph_descriptor, FeatureOptions, Relation, RelationKind};
use dalescope::kernels::{catalog, KernelSchema};
use dalescope::oracle::{df_closure_with, monotone_reach, DistanceTable, PairScope};
use dalescope::pipelines::{run_pipeline, PipelineName, PipelineOptions};
use dalescope::selftest::{patterns_4x4, random_grid, workload, GLYPH_TABLE};
use dalescope::{components, fixtures, lookup_kernel, run_fixpoint, Connectivity, Grid, RunOptions, Schedule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DF4_BUDGET: Duration = Duration::from_secs(120);
const CONFLUENCE_BUDGET: Duration = Duration::from_secs(60);
const PIPELINE_BUDGET: Duration = Duration::from_secs(60);
const CONFLUENCE_GRIDS: usize = 100;
const FLATNESS_GRIDS: usize = 200;
const WATERFALL_GRIDS: usize = 100;
const CROSS_COMPONENTS: usize = 4;

/// Criterion 9 cannot hold on a straight-armed cross; see the project decisions ledger.
const KNOWN_FAILURES: &[u32] = &[9];

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Verdict + 'a>);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn hull(g: &Grid, name: &str) -> Grid {
    fixpoint(g, name, None).expect("unguarded run")
}

fn is_subset(a: &Grid, b: &Grid) -> bool {
    a.cells().iter().zip(b.cells()).all(|(x, y)| x <= y)
}

fn df4_theorem() -> Verdict {
    let start = Instant::now();
    let table = DistanceTable::new(8, 8, Connectivity::Four).expect("table");
    let differ = patterns_4x4()
        .filter(|g| hull(g, "convex_hull4") != df_closure_with(&table, g, PairScope::Component).expect("binary"))
        .count();
    let elapsed = start.elapsed();
    verdict(
        differ == 0 && elapsed < DF4_BUDGET,
        format!("{differ} of 65536 patterns differ from the 4-closure; {:.1}s (limit 120s)", elapsed.as_secs_f64()),
    )
}

fn df8_theorem() -> Verdict {
    let table = DistanceTable::new(8, 8, Connectivity::Eight).expect("table");
    let (mut on8_out, mut on8_eq, mut oct_out, mut oct_eq) = (0, 0, 0, 0);
    for g in patterns_4x4() {
        let want = df_closure_with(&table, &g, PairScope::Component).expect("binary");
        for (name, out, eq) in [
            ("convex_hull8on8", &mut on8_out, &mut on8_eq),
            ("convex_hull_oct", &mut oct_out, &mut oct_eq),
        ] {
            let got = hull(&g, name);
            *out += usize::from(!is_subset(&got, &want));
            *eq += usize::from(got == want);
        }
    }
    verdict(
        on8_out == 0 && oct_out == 0,
        format!(
            "hull8on8: {on8_out} escape, {on8_eq}/65536 equal; hull_oct: {oct_out} escape, {oct_eq}/65536 equal (report only)"
        ),
    )
}

/// Shared random grids for criteria 3, 4 and 8.
fn confluence_grids() -> Vec<Grid> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..CONFLUENCE_GRIDS).map(|_| random_grid(&mut rng, 16, 16, 8)).collect()
}

fn flatness_grids() -> Vec<Grid> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..FLATNESS_GRIDS).map(|_| random_grid(&mut rng, 16, 16, 8)).collect()
}

fn workloads(grids: &[Grid]) -> Vec<(&'static KernelSchema, Grid, Option<Grid>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    grids
        .iter()
        .flat_map(|g| catalog().map(move |k| (k, g)))
        .map(|(k, g)| {
            let (work, reference) = workload(k, g, &mut rng);
            (k, work, reference)
        })
        .collect()
}

fn confluence(loads: &[(&KernelSchema, Grid, Option<Grid>)]) -> Verdict {
    let start = Instant::now();
    let schedules = [
        Schedule::ReverseSweep,
        Schedule::Worklist,
        Schedule::RandomFair { seed: 1 },
        Schedule::RandomFair { seed: 2 },
        Schedule::RandomFair { seed: 3 },
    ];
    let (mut runs, mut differ) = (0, 0);
    let mut first = None;
    for (k, work, reference) in loads {
        let base = run_fixpoint(work, k, reference.as_ref(), &RunOptions::default()).expect("run").grid;
        for s in schedules {
            runs += 1;
            let other = run_fixpoint(work, k, reference.as_ref(), &RunOptions::with_schedule(s)).expect("run").grid;
            if other != base {
                differ += 1;
                first.get_or_insert_with(|| format!(" (first: {} under {s:?})", k.name));
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        differ == 0 && elapsed < CONFLUENCE_BUDGET,
        format!(
            "{differ} of {runs} alternative-schedule runs differ{}; {:.1}s (limit 60s)",
            first.unwrap_or_default(),
            elapsed.as_secs_f64()
        ),
    )
}

fn flatness(grids: &[Grid]) -> Verdict {
    let (mut checks, mut differ) = (0, 0);
    for g in grids {
        for k in catalog().filter(|k| !k.is_guarded()) {
            let fixed = run_fixpoint(g, k, None, &RunOptions::default()).expect("run").grid;
            for t in 1..8 {
                checks += 1;
                let direct = run_fixpoint(&g.binarize(t), k, None, &RunOptions::default()).expect("run").grid;
                differ += usize::from(fixed.binarize(t) != direct);
            }
        }
    }
    verdict(differ == 0, format!("{differ} of {checks} threshold checks differ"))
}

fn disconnected_difference() -> Verdict {
    let cross = fixtures::load("cross").expect("fixture");
    let d = hull(&cross, "convex_hull4").minus_sat(&cross).expect("same shape");
    let n = components::count_components(&d, Connectivity::Eight, 1);
    verdict(n == CROSS_COMPONENTS, format!("{n} 8-components (expected {CROSS_COMPONENTS})"))
}

fn glyph_table() -> Verdict {
    let opts = FeatureOptions::default();
    let mut wrong = Vec::new();
    for (letter, lakes, dales) in GLYPH_TABLE {
        let d = glyph_descriptor(&fixtures::glyph(letter).expect("glyph"), 1, &opts).expect("descriptor");
        if d.lakes != lakes || d.dales != dales {
            wrong.push(format!("{letter}: {}", d.to_json()));
        }
    }
    let a = glyph_descriptor(&fixtures::glyph('A').expect("glyph"), 1, &opts).expect("descriptor");
    let want = Relation { subject: "lake1".into(), kind: RelationKind::Above, object: "dale-down1".into() };
    if !a.relations.contains(&want) {
        wrong.push(format!("A relations: {}", serde_json::to_string(&a.relations).expect("json")));
    }
    let detail = if wrong.is_empty() {
        "O C E H U A match; A has lake1 above dale-down1".to_string()
    } else {
        wrong.join("; ")
    };
    verdict(wrong.is_empty(), detail)
}

fn waterfall_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let seeds = border_cells(32, 32);
    let mut bad = 0;
    for _ in 0..WATERFALL_GRIDS {
        let r = random_grid(&mut rng, 32, 32, 8);
        let fill = run_waterfall(&r, &seeds).expect("seeds in range");
        let want = monotone_reach(&r, &seeds);
        let values_ok = fill
            .grid
            .cells()
            .iter()
            .zip(r.cells())
            .zip(&want)
            .all(|((&v, &t), &inside)| v == if inside { t } else { 0 });
        bad += usize::from(fill.filled != want || !values_ok);
    }
    verdict(bad == 0, format!("{bad} of {WATERFALL_GRIDS} 32x32 grids disagree with the path oracle"))
}

fn termination(loads: &[(&KernelSchema, Grid, Option<Grid>)], flat: &[Grid]) -> Verdict {
    let mut runs = 0;
    let mut bad = Vec::new();
    let flat_loads = flat.iter().flat_map(|g| catalog().filter(|k| !k.is_guarded()).map(move |k| (k, g.clone(), None)));
    for (k, work, reference) in loads.iter().cloned().chain(flat_loads) {
        runs += 1;
        let bound = (work.len() * (work.levels() as usize - 1)) as u64;
        let first = run_fixpoint(&work, k, reference.as_ref(), &RunOptions::default()).expect("run");
        let again = run_fixpoint(&first.grid, k, reference.as_ref(), &RunOptions::default()).expect("run");
        if first.stats.cell_updates > bound || again.stats.cell_updates != 0 || !first.stats.converged {
            bad.push(k.name.clone());
        }
    }
    bad.sort();
    bad.dedup();
    let detail = if bad.is_empty() {
        format!("{runs} runs within w*h*(L-1) updates, every rerun quiet")
    } else {
        format!("violations in {}", bad.join(", "))
    };
    verdict(bad.is_empty(), detail)
}

/// Merged and sequential minconvex runs from `start`, under `floor`.
fn merged_vs_sequential(start: &Grid, g: &Grid, floor: ContractFloor) -> (Grid, Grid) {
    let a = lookup_kernel("minconvex_hull4").expect("catalog kernel");
    let b = lookup_kernel("minconvex_123_369_789_147").expect("catalog kernel");
    let merged = a.merged(b).expect("same mode and guard");
    let opts = RunOptions { contract_floor: floor, ..RunOptions::default() };
    let m = run_fixpoint(start, &merged, Some(g), &opts).expect("run").grid;
    let first = run_fixpoint(start, a, Some(g), &opts).expect("run").grid;
    let s = run_fixpoint(&first, b, Some(g), &opts).expect("run").grid;
    (m, s)
}

fn non_composability() -> Verdict {
    let cross = fixtures::load("cross").expect("fixture");
    let mut on_cross = Vec::new();
    let mut pass = false;
    for start in ["convex_hull4", "convex_hull_oct", "convex_hull8on8"] {
        let (m, s) = merged_vs_sequential(&hull(&cross, start), &cross, ContractFloor::Reference);
        pass |= m != s;
        let outcome = match (m == s, s == cross) {
            (true, true) => "equal, both back to the original",
            (true, false) => "equal",
            (false, _) => "differ",
        };
        on_cross.push(format!("{start} start {outcome}"));
    }
    let differ = patterns_4x4()
        .filter(|g| {
            let (m, s) = merged_vs_sequential(&hull(g, "convex_hull4"), g, ContractFloor::Reference);
            m != s
        })
        .count();
    verdict(
        pass,
        format!(
            "cross fixture: {}. 4x4 exhaustive: merged != sequential on {differ} of 65536",
            on_cross.join(", ")
        ),
    )
}

fn pipelines() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut stages = 0;
    for name in PipelineName::ALL {
        let source = fixtures::load(name.fixture()).expect("fixture");
        let report = run_pipeline(name, &source, &PipelineOptions::default()).expect("pipeline");
        stages += report.stages.len();
        if !report.all_converged() {
            problems.push(format!("{name} did not converge"));
        }
        for (tag, check) in report.violations() {
            problems.push(format!("{name} {tag}: {:?} against {}", check.kind, check.against));
        }
        if name == PipelineName::WaterfallBorder {
            let reach = monotone_reach(&source, &border_cells(source.width(), source.height()));
            let diff = &report.stage("12_3_3_difference").expect("difference stage").grid;
            let leaked = diff.cells().iter().zip(&reach).filter(|&(&v, &r)| r && v != 0).count();
            if leaked != 0 {
                problems.push(format!("waterfall-border difference nonzero on {leaked} reached cells"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= PIPELINE_BUDGET {
        problems.push("over the 60s budget".into());
    }
    let detail = if problems.is_empty() {
        format!("4 pipelines, {stages} stages, all converged, invariants hold; {:.1}s (limit 60s)", elapsed.as_secs_f64())
    } else {
        problems.join("; ")
    };
    verdict(problems.is_empty(), detail)
}

fn main() -> ExitCode {
    let grids = confluence_grids();
    let flat = flatness_grids();
    let loads = workloads(&grids);
    let criteria: Vec<Criterion> = vec![
        (1, "df4 theorem", Box::new(df4_theorem)),
        (2, "df8 containment", Box::new(df8_theorem)),
        (3, "schedule confluence", Box::new(|| confluence(&loads))),
        (4, "threshold commutation", Box::new(|| flatness(&flat))),
        (5, "disconnected difference", Box::new(disconnected_difference)),
        (6, "glyph table", Box::new(glyph_table)),
        (7, "waterfall oracle", Box::new(waterfall_oracle)),
        (8, "termination and idempotence", Box::new(|| termination(&loads, &flat))),
        (9, "non-composability", Box::new(non_composability)),
        (10, "pipelines", Box::new(pipelines)),
    ];
    let mut unexpected = 0;
    for (n, name, check) in criteria {
        let v = check();
        let known = KNOWN_FAILURES.contains(&n);
        let note = match (v.pass, known) {
            (false, true) => " [known failure]",
            (true, true) => " [listed as known failure]",
            _ => "",
        };
        println!("criterion {n:2} {name}: {} - {}{note}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        unexpected += usize::from(!v.pass && !known);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
