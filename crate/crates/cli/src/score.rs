//! Scoring a reference/distorted pair frame by frame.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use ssimkit::io::{write_report, ReportFormat, ReportValue};
use ssimkit::multiscale::Aggregation;
use ssimkit::spatiotemporal::Ssim3dStream;
use ssimkit::{pool_temporal, score_frames, score_planes, FrameScore, MultiscaleSpec, ScoreSeries, SsimConfig, TemporalPooler};

use crate::error::{CliError, CliResult, Context};
use crate::media::{open, Frame, RawGeometry, Source};
use crate::timing::{Stopwatch, Timing};

/// A resolved scoring method.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineSpec {
    /// Name shown in reports: the preset, a config file stem, or a custom
    /// label.
    pub label: String,
    pub preset: Option<String>,
    pub config: SsimConfig,
    /// Temporal window for SSIM-3D; `None` scores frames independently.
    pub kt: Option<usize>,
    /// Take the bit depth from the input instead of `config.bit_depth`.
    pub follow_input_depth: bool,
}

impl PipelineSpec {
    pub fn from_config(label: impl Into<String>, config: SsimConfig) -> Self {
        Self {
            label: label.into(),
            preset: None,
            config,
            kt: None,
            follow_input_depth: true,
        }
    }

    pub fn from_preset(name: &str) -> CliResult<Self> {
        Ok(Self {
            preset: Some(name.to_string()),
            ..Self::from_config(name, ssimkit::preset(name)?)
        })
    }
}

/// The two inputs of a scoring run.
#[derive(Clone, Debug, PartialEq)]
pub struct InputPair {
    pub reference: PathBuf,
    pub distorted: PathBuf,
    pub raw: Option<RawGeometry>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameRecord {
    pub frame: usize,
    pub score: f64,
    /// Term means; absent for SSIM-3D.
    pub terms: Option<FrameScore>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub frames: usize,
    pub temporal_pool: TemporalPooler,
    /// Frame scores pooled with the temporal pooler.
    pub pooled: f64,
    /// Arithmetic means over frames of the per-frame term means.
    pub mean_mssim: Option<f64>,
    pub mean_l: Option<f64>,
    pub mean_cs: Option<f64>,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreReport {
    pub method: String,
    pub records: Vec<FrameRecord>,
    pub summary: Summary,
}

pub const SCORE_COLUMNS: [&str; 10] = [
    "record", "method", "frame", "score", "mssim", "l_mean", "cs_mean", "user_seconds", "wall_seconds", "clock",
];

impl ScoreReport {
    pub fn rows(&self) -> Vec<Vec<ReportValue>> {
        let mut rows: Vec<Vec<ReportValue>> = self
            .records
            .iter()
            .map(|r| {
                vec![
                    "frame".into(),
                    self.method.as_str().into(),
                    r.frame.into(),
                    r.score.into(),
                    r.terms.map(|t| t.mssim).into(),
                    r.terms.map(|t| t.l_mean).into(),
                    r.terms.map(|t| t.cs_mean).into(),
                    ReportValue::Null,
                    ReportValue::Null,
                    ReportValue::Null,
                ]
            })
            .collect();
        let s = &self.summary;
        rows.push(vec![
            "summary".into(),
            self.method.as_str().into(),
            ReportValue::Null,
            s.pooled.into(),
            s.mean_mssim.into(),
            s.mean_l.into(),
            s.mean_cs.into(),
            s.timing.user_seconds.into(),
            s.timing.wall_seconds.into(),
            s.timing.clock().into(),
        ]);
        rows
    }

    pub fn write<W: Write>(&self, w: &mut W, format: ReportFormat) -> CliResult<()> {
        Ok(write_report(w, &SCORE_COLUMNS, &self.rows(), format)?)
    }
}

fn score_pair(r: &Frame, d: &Frame, config: &SsimConfig) -> ssimkit::Result<FrameScore> {
    if r.bit_depth() != d.bit_depth() {
        return Err(ssimkit::Error::BitDepthMismatch(r.bit_depth(), d.bit_depth()));
    }
    match (r, d) {
        (Frame::Color(a), Frame::Color(b)) => score_frames(a, b, config),
        _ if !config.color.is_luma_only() => Err(ssimkit::Error::InvalidParameter(
            "color models need color input on both sides".into(),
        )),
        _ => score_planes(&r.luma()?, &d.luma()?, config),
    }
}

/// Reads up to `n` aligned frame pairs; errors when one input ends first.
fn next_chunk(reference: &mut Source, distorted: &mut Source, n: usize, first: usize) -> CliResult<Vec<(Frame, Frame)>> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let index = first + out.len();
        match (reference.next(), distorted.next()) {
            (None, None) => break,
            (Some(a), Some(b)) => {
                let a = a.context(format!("reference frame {index}"))?;
                let b = b.context(format!("distorted frame {index}"))?;
                out.push((a, b));
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(CliError::input(format!("inputs have different frame counts (one ends at frame {index})")))
            }
        }
    }
    Ok(out)
}

fn mean_of(values: impl Iterator<Item = f64>) -> CliResult<f64> {
    Ok(pool_temporal(&ScoreSeries::new(values.collect()), TemporalPooler::Am)?)
}

/// Scores every frame pair and pools the series.
///
/// Frames are scored in parallel in chunks and collected in order; SSIM-3D
/// runs sequentially since each frame depends on the previous ones.
pub fn run_score(inputs: &InputPair, spec: &PipelineSpec) -> CliResult<ScoreReport> {
    let watch = Stopwatch::start();
    let mut reference = open(&inputs.reference, inputs.raw)?;
    let mut distorted = open(&inputs.distorted, inputs.raw)?;
    let mut config = spec.config.clone();
    let chunk = 4 * rayon::current_num_threads();
    let mut records = Vec::new();
    let mut stream: Option<Ssim3dStream> = None;
    loop {
        let pairs = next_chunk(&mut reference, &mut distorted, chunk, records.len())?;
        if pairs.is_empty() {
            break;
        }
        if records.is_empty() {
            if spec.follow_input_depth {
                config.bit_depth = pairs[0].0.bit_depth();
            }
            config.validate()?;
            if let Some(kt) = spec.kt {
                let ms = if config.multiscale.aggregation == Aggregation::Off {
                    MultiscaleSpec::off()
                } else {
                    config.multiscale.clone()
                };
                stream = Some(Ssim3dStream::new(kt, ms, config.clone())?);
            }
        }
        let first = records.len();
        match stream.as_mut() {
            Some(s) => {
                for (i, (a, b)) in pairs.iter().enumerate() {
                    let ctx = format!("frame {}", first + i);
                    let a = config.scaling.apply(&a.luma().context(&ctx)?).context(&ctx)?;
                    let b = config.scaling.apply(&b.luma().context(&ctx)?).context(&ctx)?;
                    let score = s.push(&a, &b).context(&ctx)?;
                    records.push(FrameRecord {
                        frame: first + i,
                        score,
                        terms: None,
                    });
                }
            }
            None => {
                let scored: Vec<CliResult<FrameScore>> = pairs
                    .par_iter()
                    .enumerate()
                    .map(|(i, (a, b))| score_pair(a, b, &config).context(format!("frame {}", first + i)))
                    .collect();
                for (i, s) in scored.into_iter().enumerate() {
                    let s = s?;
                    records.push(FrameRecord {
                        frame: first + i,
                        score: s.score,
                        terms: Some(s),
                    });
                }
            }
        }
    }
    if records.is_empty() {
        return Err(CliError::input("inputs contain no frames"));
    }
    let series = ScoreSeries::new(records.iter().map(|r| r.score).collect());
    let pooled = pool_temporal(&series, config.temporal_pool).context("temporal pooling")?;
    let terms: Option<Vec<FrameScore>> = records.iter().map(|r| r.terms).collect();
    let (mean_mssim, mean_l, mean_cs) = match terms {
        Some(t) => (
            Some(mean_of(t.iter().map(|s| s.mssim))?),
            Some(mean_of(t.iter().map(|s| s.l_mean))?),
            Some(mean_of(t.iter().map(|s| s.cs_mean))?),
        ),
        None => (None, None, None),
    };
    Ok(ScoreReport {
        method: spec.label.clone(),
        summary: Summary {
            frames: records.len(),
            temporal_pool: config.temporal_pool,
            pooled,
            mean_mssim,
            mean_l,
            mean_cs,
            timing: watch.stop(),
        },
        records,
    })
}

/// Pooled score of one pair; used by the benchmark.
pub fn pooled_score(reference: &Path, distorted: &Path, raw: Option<RawGeometry>, spec: &PipelineSpec) -> CliResult<f64> {
    let inputs = InputPair {
        reference: reference.to_path_buf(),
        distorted: distorted.to_path_buf(),
        raw,
    };
    Ok(run_score(&inputs, spec)?.summary.pooled)
}
