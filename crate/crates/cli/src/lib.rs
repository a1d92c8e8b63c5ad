//! Batch front-end: scores media pairs, benchmarks methods against
//! subjective scores, prunes cost/performance tables and fits 5PL maps.

pub mod bench;
pub mod error;
pub mod media;
pub mod score;
pub mod timing;

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use ssimkit::io::{write_report, ReportFormat};
use ssimkit::pipeline::PRESETS;
use ssimkit::{ChromaSubsampling, Engine, SsimConfig, WindowSpec};

pub use error::{CliError, CliResult, EXIT_DEGENERATE, EXIT_INPUT};
pub use media::RawGeometry;
pub use score::{run_score, InputPair, PipelineSpec, ScoreReport};

#[derive(Debug, Parser)]
#[command(name = "ssimkit", version, about = "Full-reference SSIM scoring and benchmarking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a distorted image or video against its reference.
    Score(ScoreArgs),
    /// Score a manifest under one or more methods and correlate with
    /// subjective scores.
    Benchmark(BenchmarkArgs),
    /// Flag Pareto-optimal rows of a cost/performance CSV.
    Pareto(ParetoArgs),
    /// Fit the five-parameter logistic map from objective to subjective
    /// scores.
    #[command(name = "fit-5pl")]
    Fit5pl(FitArgs),
    /// List the named presets and what they expand to.
    Presets,
}

/// Method options. A preset is expanded first and the other flags
/// override its fields.
#[derive(Debug, Clone, Default, Args)]
pub struct MethodArgs {
    /// Named preset: ssim, enhanced or msssim.
    #[arg(long)]
    pub preset: Option<String>,
    /// Window shape: rect:<k> or gauss:<sigma>[,k=<n>].
    #[arg(long)]
    pub window: Option<String>,
    /// Spacing between scored windows.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Statistics engine: auto, naive or integral.
    #[arg(long)]
    pub engine: Option<String>,
    /// Resolution policy: none, legacy, legacy-ceil, dh:<ratio> or
    /// sast:h=<H>,w=<W>,d=<D>.
    #[arg(long)]
    pub scale: Option<String>,
    /// Color model: luma, cw[:a=,b=], fixed[:wy,wcb,wcr], qssim[:yuv|lab],
    /// cmssim or hssim.
    #[arg(long)]
    pub color: Option<String>,
    /// Multi-scale aggregation: off, product, sum or fast4.
    #[arg(long)]
    pub multiscale: Option<String>,
    /// Spatial pooler, e.g. am, cov, md:p=2,o=1, pp:ps=6,rs=4000.
    #[arg(long = "spatial-pool")]
    pub spatial_pool: Option<String>,
    /// Temporal pooler, e.g. am, hm, wam:k=3.
    #[arg(long = "temporal-pool")]
    pub temporal_pool: Option<String>,
    /// Temporal window for SSIM-3D (rectangular windows only).
    #[arg(long)]
    pub kt: Option<usize>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub k2: Option<f64>,
    /// Bit depth for the saturation constants; defaults to the input's.
    #[arg(long = "constants-depth")]
    pub constants_depth: Option<u8>,
    /// Label used in reports.
    #[arg(long)]
    pub label: Option<String>,
}

/// Geometry for headerless planar input.
#[derive(Debug, Clone, Args)]
pub struct RawArgs {
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Sample bit depth of raw input.
    #[arg(long = "bit-depth", default_value_t = 8)]
    pub bit_depth: u8,
    /// Chroma layout of raw input: 420 or 444.
    #[arg(long, default_value = "420")]
    pub chroma: String,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// json (one object per line) or csv.
    #[arg(long, default_value = "json")]
    pub format: String,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub reference: PathBuf,
    pub distorted: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub raw: RawArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Worker threads for frame scoring (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// CSV with ref_path, dist_path, subjective_score and optionally
    /// width, height, bit_depth.
    pub manifest: PathBuf,
    /// A preset name or a JSON method file; repeat to compare methods.
    /// Without any, the method flags describe a single method.
    #[arg(long = "spec")]
    pub specs: Vec<String>,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub raw: RawArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    /// CSV with a label, a cost and a performance column.
    pub input: PathBuf,
    #[arg(long = "label-column", default_value = "spec")]
    pub label: String,
    #[arg(long = "cost-column", default_value = "user_seconds")]
    pub cost: String,
    #[arg(long = "perf-column", default_value = "srocc")]
    pub perf: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with objective and subjective columns.
    pub input: PathBuf,
    #[arg(long = "x-column", default_value = "objective")]
    pub x: String,
    #[arg(long = "y-column", default_value = "subjective")]
    pub y: String,
    /// Second CSV (same columns) to evaluate the fitted map on.
    #[arg(long)]
    pub holdout: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A method file for `benchmark --spec`: either this wrapper or a bare
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodFile {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub kt: Option<usize>,
    pub config: SsimConfig,
}

fn parse_engine(s: &str) -> CliResult<Engine> {
    match s {
        "auto" => Ok(Engine::Auto),
        "naive" => Ok(Engine::Naive),
        "integral" => Ok(Engine::Integral),
        other => Err(CliError::input(format!("unknown engine {other:?}; expected auto, naive or integral"))),
    }
}

fn parse_with<T: std::str::FromStr<Err = ssimkit::Error>>(flag: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|e: ssimkit::Error| CliError::from(e).context(format!("--{flag}")))
}

impl MethodArgs {
    fn overrides(&self) -> bool {
        self.window.is_some()
            || self.stride.is_some()
            || self.engine.is_some()
            || self.scale.is_some()
            || self.color.is_some()
            || self.multiscale.is_some()
            || self.spatial_pool.is_some()
            || self.temporal_pool.is_some()
            || self.kt.is_some()
            || self.k1.is_some()
            || self.k2.is_some()
            || self.constants_depth.is_some()
    }

    /// Expands the preset, applies overrides and validates.
    pub fn resolve(&self) -> CliResult<PipelineSpec> {
        let name = self.preset.as_deref().unwrap_or("ssim");
        let mut spec = PipelineSpec::from_preset(name)?;
        let c = &mut spec.config;
        if let Some(w) = &self.window {
            let stride = c.window.stride;
            c.window = parse_with::<WindowSpec>("window", w)?;
            if !w.contains("stride=") {
                c.window.stride = stride;
            }
        }
        if let Some(s) = self.stride {
            c.window = c.window.clone().with_stride(s).map_err(|e| CliError::from(e).context("--stride"))?;
        }
        if let Some(e) = &self.engine {
            c.engine = parse_engine(e)?;
        }
        if let Some(s) = &self.scale {
            c.scaling = parse_with("scale", s)?;
        }
        if let Some(s) = &self.color {
            c.color = parse_with("color", s)?;
        }
        if let Some(s) = &self.multiscale {
            c.multiscale = parse_with("multiscale", s)?;
        }
        if let Some(s) = &self.spatial_pool {
            c.spatial_pool = parse_with("spatial-pool", s)?;
        }
        if let Some(s) = &self.temporal_pool {
            c.temporal_pool = parse_with("temporal-pool", s)?;
        }
        if let Some(k) = self.k1 {
            c.k1 = k;
        }
        if let Some(k) = self.k2 {
            c.k2 = k;
        }
        if let Some(d) = self.constants_depth {
            c.bit_depth = d;
            spec.follow_input_depth = false;
        }
        spec.kt = self.kt;
        spec.config.validate()?;
        if spec.kt.is_some() && !spec.config.window.is_rectangular() {
            return Err(ssimkit::Error::GaussianNotSupported3D.into());
        }
        spec.label = match &self.label {
            Some(l) => l.clone(),
            None if self.overrides() => format!("{name}+custom"),
            None => name.to_string(),
        };
        Ok(spec)
    }
}

/// A `--spec` value: a preset name or a path to a [`MethodFile`] (or bare
/// configuration) in JSON.
pub fn load_spec(value: &str) -> CliResult<PipelineSpec> {
    if PRESETS.contains(&value) {
        return PipelineSpec::from_preset(value);
    }
    let path = Path::new(value);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::from(e).context(format!("--spec {value}")))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(value).to_string();
    let file: MethodFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(_) => MethodFile {
            label: None,
            kt: None,
            config: serde_json::from_str(&text).map_err(|e| CliError::from(e).context(path.display()))?,
        },
    };
    file.config.validate().map_err(|e| CliError::from(e).context(path.display()))?;
    let mut spec = PipelineSpec::from_config(file.label.unwrap_or(stem), file.config);
    spec.kt = file.kt;
    Ok(spec)
}

impl Default for RawArgs {
    fn default() -> Self {
        Self {
            width: None,
            height: None,
            bit_depth: 8,
            chroma: "420".into(),
        }
    }
}

impl RawArgs {
    pub fn geometry(&self) -> CliResult<Option<RawGeometry>> {
        let chroma = match self.chroma.as_str() {
            "420" => ChromaSubsampling::Cs420,
            "444" => ChromaSubsampling::Cs444,
            other => return Err(CliError::input(format!("--chroma {other}: expected 420 or 444"))),
        };
        Ok(match (self.width, self.height) {
            (Some(width), Some(height)) => Some(RawGeometry {
                width,
                height,
                bit_depth: self.bit_depth,
                chroma,
            }),
            (None, None) => None,
            _ => return Err(CliError::input("--width and --height go together")),
        })
    }
}

impl OutputArgs {
    pub fn format(&self) -> CliResult<ReportFormat> {
        self.format.parse().map_err(|e: ssimkit::Error| CliError::from(e).context("--format"))
    }

    fn writer(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.output {
            Some(p) => Box::new(File::create(p).map_err(|e| CliError::from(e).context(p.display()))?),
            None => Box::new(io::stdout().lock()),
        })
    }
}

#[derive(Serialize)]
struct PresetListing {
    name: &'static str,
    config: SsimConfig,
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::input(e.to_string()))?
            .install(f),
    }
}

/// Runs a parsed command. Returns the process exit status.
pub fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Score(a) => {
            let spec = a.method.resolve()?;
            let format = a.out.format()?;
            let inputs = InputPair {
                reference: a.reference,
                distorted: a.distorted,
                raw: a.raw.geometry()?,
            };
            let report = with_threads(a.threads, || run_score(&inputs, &spec))?;
            report.write(&mut a.out.writer()?, format)?;
            Ok(0)
        }
        Command::Benchmark(a) => {
            let specs = if a.specs.is_empty() {
                vec![a.method.resolve()?]
            } else {
                a.specs.iter().map(|s| load_spec(s)).collect::<CliResult<_>>()?
            };
            let format = a.out.format()?;
            let raw = a.raw.geometry()?;
            let rows = with_threads(a.threads, || bench::run_benchmark(&a.manifest, &specs, raw))?;
            bench::write_bench(&mut a.out.writer()?, &rows, format)?;
            if let Some(r) = rows.iter().find(|r| r.degenerate()) {
                eprintln!("{}: correlations undefined ({})", r.label, r.note.as_deref().unwrap_or("NaN"));
                return Ok(EXIT_DEGENERATE);
            }
            Ok(0)
        }
        Command::Pareto(a) => {
            let format = a.out.format()?;
            let file = File::open(&a.input).map_err(|e| CliError::from(e).context(a.input.display()))?;
            let table = bench::pareto_table(BufReader::new(file), &a.label, &a.cost, &a.perf)
                .map_err(|e| e.context(a.input.display()))?;
            bench::write_pareto(&mut a.out.writer()?, &table, format)?;
            Ok(0)
        }
        Command::Fit5pl(a) => {
            let format = a.out.format()?;
            let read = |p: &Path| -> CliResult<(Vec<f64>, Vec<f64>)> {
                let file = File::open(p).map_err(|e| CliError::from(e).context(p.display()))?;
                bench::read_columns(BufReader::new(file), &a.x, &a.y).map_err(|e| e.context(p.display()))
            };
            let (x, y) = read(&a.input)?;
            let holdout = a.holdout.as_deref().map(read).transpose()?;
            let (columns, row) = bench::fit_table(&x, &y, holdout.as_ref().map(|(hx, hy)| (&hx[..], &hy[..])))?;
            write_report(&mut a.out.writer()?, &columns, &[row], format)?;
            Ok(0)
        }
        Command::Presets => {
            let mut out = io::stdout().lock();
            for name in PRESETS {
                let listing = PresetListing {
                    name,
                    config: ssimkit::preset(name)?,
                };
                writeln!(out, "{}", serde_json::to_string(&listing)?)?;
            }
            Ok(0)
        }
    }
}
