//! The `dalescope` command line.
//!
//! Exit status: 0 on success, 1 when data cannot be read or a check fails,
//! 2 for usage errors (bad flags, unknown names, a guarded kernel without `--ref`).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::components::{label_components, Connectivity};
use crate::engine::{border_cells, run_fixpoint, run_slope_ray, run_waterfall, ContractFloor, RunOptions, RunStats, Schedule};
use crate::error::{Error, Result};
use crate::features::{describe, FeatureOptions};
use crate::grid::{BorderPolicy, Grid, Level};
use crate::kernels::{kernel_names, lookup_kernel, Guard, KernelSchema, Mode, Window};
use crate::pgm::{self, PgmFormat};
use crate::pipelines::{run_pipeline, PipelineName, PipelineOptions};
use crate::selftest::{run_selftest, SelftestOptions};

/// Environment variable bounding the number of passes of every fixpoint run.
pub const MAX_PASSES_ENV: &str = "DALESCOPE_MAX_PASSES";

#[derive(Debug, Parser)]
#[command(name = "dalescope", version, about = "Min/max propagation on gray images: hulls, dales, lakes, glyph features")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one kernel to its fixed point, or one image operation.
    Apply(ApplyArgs),
    /// Run a named multi-stage cascade and write every stage.
    Pipeline(PipelineArgs),
    /// Print lake and dale counts for every glyph in an image.
    Describe(DescribeArgs),
    /// Label connected components.
    Label(LabelArgs),
    /// List kernel and operation names.
    Kernels,
    /// Run the built-in oracle sweeps and property checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScheduleArg {
    Raster,
    Reverse,
    Worklist,
    Random,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Constant value read outside the grid.
    #[arg(long, default_value_t = 0)]
    pub border: Level,
    #[arg(long, value_enum, default_value = "raster")]
    pub schedule: ScheduleArg,
    /// Seed for `--schedule random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Requantize the input to this many levels first.
    #[arg(long)]
    pub levels: Option<u32>,
    /// Let contract rules go below the reference (order-dependent).
    #[arg(long)]
    pub literal_contract: bool,
}

impl RunArgs {
    fn options(&self) -> Result<RunOptions> {
        let schedule = match self.schedule {
            ScheduleArg::Raster => Schedule::RasterSweep,
            ScheduleArg::Reverse => Schedule::ReverseSweep,
            ScheduleArg::Worklist => Schedule::Worklist,
            ScheduleArg::Random => Schedule::RandomFair { seed: self.seed },
        };
        Ok(RunOptions {
            schedule,
            border: BorderPolicy::Constant(self.border),
            max_passes: max_passes_from_env()?,
            contract_floor: if self.literal_contract {
                ContractFloor::Unbounded
            } else {
                ContractFloor::Reference
            },
        })
    }

    fn load(&self, path: &PathBuf) -> Result<Grid> {
        let g = pgm::read(path)?;
        match self.levels {
            Some(n) => g.levelize(n),
            None => Ok(g),
        }
    }
}

fn max_passes_from_env() -> Result<Option<usize>> {
    match std::env::var(MAX_PASSES_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidArgument(format!("{MAX_PASSES_ENV} must be a positive integer (got `{v}`)"))),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Kernel name, or one of: waterfall, slope_ray, diff, minus, xor, threshold, amplify, blur.
    #[arg(long)]
    pub op: String,
    /// Reference grid for guarded kernels; second operand of minus and xor.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
    /// Threshold for `threshold`.
    #[arg(long, default_value_t = 128)]
    pub t: Level,
    /// Factor for `amplify`.
    #[arg(long, default_value_t = 4)]
    pub gain: u32,
    /// Radius for `blur`.
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    /// Keypad direction (1-9, not 5) for `diff`.
    #[arg(long, default_value_t = 8)]
    pub dir: u8,
    /// Start value for `slope_ray`.
    #[arg(long, default_value_t = 5)]
    pub peak: Level,
    /// Write plain-text (P2) output.
    #[arg(long)]
    pub ascii: bool,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// alphabet, hieroglyph, face or waterfall-border.
    pub name: String,
    pub input: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Gain for stages written amplified.
    #[arg(long, default_value_t = 4)]
    pub gain: u32,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub min_dale_area: usize,
    /// Background margin added around each glyph.
    #[arg(long, default_value_t = 2)]
    pub margin: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    pub input: PathBuf,
    /// Where to write the label raster.
    pub output: Option<PathBuf>,
    /// 4, x or 8.
    #[arg(long, default_value = "8")]
    pub connectivity: String,
    #[arg(long, default_value_t = 0)]
    pub background: Level,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Use the hull8on8 d36 window exactly as printed.
    #[arg(long)]
    pub literal_d36: bool,
    /// Random grids per randomized suite.
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Where failing inputs are written.
    #[arg(long, default_value = "selftest-failures")]
    pub counterexample_dir: PathBuf,
    /// Extra kernel to validate, `name:expand|contract:none|ge|gt:1,2/3,4`.
    #[arg(long = "inject-kernel")]
    pub inject: Vec<String>,
}

/// Parses `name:mode:guard:windows` without validating, so the selftest can reject it.
fn parse_injected(spec: &str) -> Result<KernelSchema> {
    let bad = || Error::InvalidArgument(format!("kernel spec `{spec}` is not name:mode:guard:windows"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [name, mode, guard, windows] = parts[..] else {
        return Err(bad());
    };
    let mode = match mode {
        "expand" => Mode::Expand,
        "contract" => Mode::Contract,
        _ => return Err(bad()),
    };
    let guard = match guard {
        "none" => Guard::None,
        "ge" => Guard::RefGe,
        "gt" => Guard::RefGt,
        _ => return Err(bad()),
    };
    let windows = windows
        .split('/')
        .map(|w| {
            let idx = w.split(',').map(|i| i.trim().parse::<u8>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
            Window::from_indices(&idx)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelSchema {
        name: name.to_string(),
        mode,
        guard,
        windows,
    })
}

const EXTRA_OPS: [&str; 8] = ["waterfall", "slope_ray", "diff", "minus", "xor", "threshold", "amplify", "blur"];

/// Stats for a one-shot image operation: one pass, one update per changed cell.
fn pointwise_stats(before: &Grid, after: &Grid) -> RunStats {
    let changed = if before.same_shape(after).is_ok() {
        before.cells().iter().zip(after.cells()).filter(|(a, b)| a != b).count()
    } else {
        after.len()
    };
    RunStats {
        passes: 1,
        cell_updates: changed as u64,
        undershoots: 0,
        converged: true,
    }
}

fn apply(a: &ApplyArgs, out: &mut dyn Write) -> Result<()> {
    let opts = a.run.options()?;
    let op = a.op.as_str();
    // resolve the name before touching files so typos are usage errors
    let kernel = if EXTRA_OPS.contains(&op) { None } else { Some(lookup_kernel(op)?) };
    let needs_ref = match kernel {
        Some(k) => k.is_guarded(),
        None => matches!(op, "minus" | "xor"),
    };
    if needs_ref && a.reference.is_none() {
        return Err(match kernel {
            Some(k) => Error::MissingReference(k.name.clone()),
            None => Error::InvalidArgument(format!("`{op}` needs --ref for its second operand")),
        });
    }
    if !needs_ref && a.reference.is_some() {
        return Err(Error::InvalidArgument(format!("`{op}` takes no --ref")));
    }
    let g = a.run.load(&a.input)?;
    let reference = a.reference.as_ref().map(|p| a.run.load(p)).transpose()?;
    let (result, stats) = match (kernel, op) {
        (Some(k), _) => {
            let run = run_fixpoint(&g, k, reference.as_ref(), &opts)?;
            (run.grid, run.stats)
        }
        (None, "waterfall") => {
            let fill = run_waterfall(&g, &border_cells(g.width(), g.height()))?;
            (fill.grid, fill.stats)
        }
        (None, "slope_ray") => {
            let run = run_slope_ray(&g, a.peak)?;
            (run.grid, run.stats)
        }
        (None, _) => {
            let r = match op {
                "diff" => g.diff_directional(a.dir)?,
                "minus" => g.minus_sat(reference.as_ref().expect("checked above"))?,
                "xor" => g.xor_mask(reference.as_ref().expect("checked above"))?,
                "threshold" => g.threshold(a.t)?,
                "amplify" => g.amplify(a.gain)?,
                "blur" => g.box_blur(a.radius, opts.border)?,
                _ => unreachable!("EXTRA_OPS covers every name"),
            };
            let stats = pointwise_stats(&g, &r);
            (r, stats)
        }
    };
    let format = if a.ascii { PgmFormat::Ascii } else { PgmFormat::Binary };
    pgm::write(&a.output, &result, format)?;
    writeln!(out, "{}", stats.to_json())?;
    Ok(())
}

fn pipeline(a: &PipelineArgs, out: &mut dyn Write) -> Result<()> {
    let name: PipelineName = a.name.parse()?;
    if a.gain == 0 {
        return Err(Error::InvalidArgument("--gain must be positive".into()));
    }
    let opts = PipelineOptions {
        run: a.run.options()?,
        display_gain: a.gain,
    };
    let g = a.run.load(&a.input)?;
    let report = run_pipeline(name, &g, &opts)?;
    report.write(&a.out_dir, opts.display_gain)?;
    for s in report.emitted() {
        writeln!(out, "{}\t{}", s.file_name(), s.operation)?;
    }
    if !report.all_converged() || !report.violations().is_empty() {
        for (tag, c) in report.violations() {
            writeln!(out, "check failed: {tag} {:?} {}", c.kind, c.against)?;
        }
        return Err(Error::CheckFailed(format!("pipeline `{name}` stage checks")));
    }
    Ok(())
}

fn describe_cmd(a: &DescribeArgs, out: &mut dyn Write) -> Result<()> {
    let opts = FeatureOptions {
        margin: a.margin,
        min_dale_area: a.min_dale_area,
        run: a.run.options()?,
    };
    let g = a.run.load(&a.input)?;
    let descriptors = describe(&g, &opts)?;
    writeln!(out, "{}", serde_json::to_string(&descriptors).expect("descriptors serialize"))?;
    Ok(())
}

fn label(a: &LabelArgs, out: &mut dyn Write) -> Result<()> {
    let conn: Connectivity = a.connectivity.parse()?;
    let g = pgm::read(&a.input)?;
    let m = label_components(&g, conn, a.background);
    if let Some(path) = &a.output {
        pgm::write(path, &m.label_grid()?, PgmFormat::Binary)?;
    }
    writeln!(out, "{}", m.to_json())?;
    Ok(())
}

fn selftest(a: &SelftestArgs, out: &mut dyn Write) -> Result<bool> {
    let extra = a.inject.iter().map(|s| parse_injected(s)).collect::<Result<Vec<_>>>()?;
    let report = run_selftest(&SelftestOptions {
        literal_d36: a.literal_d36,
        extra_kernels: extra,
        random_cases: a.cases,
        seed: a.seed,
    });
    writeln!(out, "variant: {}", report.variant)?;
    for c in &report.checks {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    if !report.passed() {
        for f in report.write_counterexamples(&a.counterexample_dir)? {
            writeln!(out, "wrote {}", a.counterexample_dir.join(f).display())?;
        }
    }
    Ok(report.passed())
}

/// Runs a parsed command. `Ok(false)` means the command ran but reported failure.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Apply(a) => apply(a, out).map(|_| true),
        Command::Pipeline(a) => pipeline(a, out).map(|_| true),
        Command::Describe(a) => describe_cmd(a, out).map(|_| true),
        Command::Label(a) => label(a, out).map(|_| true),
        Command::Kernels => {
            for n in kernel_names().into_iter().chain(EXTRA_OPS) {
                writeln!(out, "{n}")?;
            }
            Ok(true)
        }
        Command::Selftest(a) => selftest(a, out),
    }
}

/// Parses `args`, runs, reports errors on stderr, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("dalescope: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}
