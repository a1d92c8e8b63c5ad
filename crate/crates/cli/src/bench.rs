//! Dataset benchmarking, Pareto pruning and standalone 5PL fitting.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use ssimkit::eval::{cross_apply, evaluate, pareto_front, CostPerfPoint, Evaluation, Manifest};
use ssimkit::io::{write_report, ReportFormat, ReportValue};

use crate::error::{is_degenerate, CliError, CliResult, Context};
use crate::media::RawGeometry;
use crate::score::{pooled_score, PipelineSpec};
use crate::timing::{Stopwatch, Timing};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub label: String,
    pub rows: usize,
    pub pcc: f64,
    pub srocc: f64,
    pub rmse: f64,
    pub timing: Timing,
    pub pareto: bool,
    /// Why correlations are missing, if they are.
    pub note: Option<String>,
}

impl BenchRow {
    pub fn degenerate(&self) -> bool {
        self.pcc.is_nan() || self.srocc.is_nan() || self.rmse.is_nan()
    }
}

pub const BENCH_COLUMNS: [&str; 10] = [
    "spec", "rows", "pcc", "srocc", "rmse", "user_seconds", "wall_seconds", "clock", "pareto", "note",
];

pub fn write_bench<W: Write>(w: &mut W, rows: &[BenchRow], format: ReportFormat) -> CliResult<()> {
    let cells: Vec<Vec<ReportValue>> = rows
        .iter()
        .map(|r| {
            vec![
                r.label.as_str().into(),
                r.rows.into(),
                r.pcc.into(),
                r.srocc.into(),
                r.rmse.into(),
                r.timing.user_seconds.into(),
                r.timing.wall_seconds.into(),
                r.timing.clock().into(),
                (if r.pareto { "true" } else { "false" }).into(),
                r.note.clone().into(),
            ]
        })
        .collect();
    Ok(write_report(w, &BENCH_COLUMNS, &cells, format)?)
}

/// Row geometry for raw inputs: manifest columns override the defaults.
fn row_geometry(row: &ssimkit::eval::ManifestRow, default: Option<RawGeometry>) -> Option<RawGeometry> {
    match (row.width, row.height, default) {
        (Some(width), Some(height), d) => Some(RawGeometry {
            width,
            height,
            bit_depth: row.bit_depth.or(d.map(|g| g.bit_depth)).unwrap_or(8),
            chroma: d.map_or(ssimkit::ChromaSubsampling::Cs420, |g| g.chroma),
        }),
        (_, _, Some(d)) => Some(RawGeometry {
            bit_depth: row.bit_depth.unwrap_or(d.bit_depth),
            ..d
        }),
        _ => None,
    }
}

/// Scores every manifest row under each spec, fits the 5PL map and reports
/// PCC and RMSE after the fit, SROCC on the raw scores, and CPU cost.
/// Pareto flags compare cost against |SROCC|.
pub fn run_benchmark(manifest_path: &Path, specs: &[PipelineSpec], raw: Option<RawGeometry>) -> CliResult<Vec<BenchRow>> {
    let manifest = Manifest::from_path(manifest_path).context(manifest_path.display())?;
    if manifest.rows.is_empty() {
        return Err(CliError::input(format!("{}: manifest has no rows", manifest_path.display())));
    }
    let subjective: Vec<f64> = manifest.rows.iter().map(|r| r.subjective_score).collect();
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let watch = Stopwatch::start();
        let objective: Vec<f64> = manifest
            .rows
            .par_iter()
            .enumerate()
            .map(|(i, row)| {
                pooled_score(&row.ref_path, &row.dist_path, row_geometry(row, raw), spec)
                    .context(format!("{} row {}", spec.label, i + 1))
            })
            .collect::<CliResult<_>>()?;
        let timing = watch.stop();
        let (pcc, srocc, rmse, note) = match evaluate(&objective, &subjective) {
            Ok(Evaluation { correlations: c, .. }) => (c.pcc, c.srocc, c.rmse, None),
            Err(e) if is_degenerate(&e) || matches!(e, ssimkit::Error::TooFew { .. }) => {
                (f64::NAN, f64::NAN, f64::NAN, Some(e.to_string()))
            }
            Err(e) => return Err(CliError::from(e).context(&spec.label)),
        };
        out.push(BenchRow {
            label: spec.label.clone(),
            rows: objective.len(),
            pcc,
            srocc,
            rmse,
            timing,
            pareto: false,
            note,
        });
    }
    flag_pareto(&mut out);
    Ok(out)
}

fn flag_pareto(rows: &mut [BenchRow]) {
    let points: Vec<CostPerfPoint> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.degenerate())
        .filter_map(|(i, r)| CostPerfPoint::new(i.to_string(), r.timing.cost().max(f64::MIN_POSITIVE), r.srocc.abs()).ok())
        .collect();
    for p in pareto_front(&points) {
        if let Ok(i) = p.label.parse::<usize>() {
            rows[i].pareto = true;
        }
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> CliResult<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| CliError::input(format!("missing column {name:?}")))
}

fn number(rec: &csv::StringRecord, idx: usize, line: usize) -> CliResult<f64> {
    let cell = rec.get(idx).unwrap_or("").trim();
    cell.parse()
        .map_err(|_| CliError::input(format!("line {line}: {cell:?} is not a number")))
}

/// Reads two numeric columns from CSV.
pub fn read_columns<R: Read>(reader: R, x: &str, y: &str) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let (xi, yi) = (column(&headers, x)?, column(&headers, y)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        xs.push(number(&rec, xi, i + 2)?);
        ys.push(number(&rec, yi, i + 2)?);
    }
    Ok((xs, ys))
}

/// Labelled (cost, performance) rows with their Pareto flag, in input
/// order.
pub fn pareto_table<R: Read>(reader: R, label: &str, cost: &str, perf: &str) -> CliResult<Vec<(CostPerfPoint, bool)>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let (li, ci, pi) = (column(&headers, label)?, column(&headers, cost)?, column(&headers, perf)?);
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let p = CostPerfPoint::new(
            rec.get(li).unwrap_or("").trim(),
            number(&rec, ci, line)?,
            number(&rec, pi, line)?,
        )
        .context(format!("line {line}"))?;
        points.push(p);
    }
    let front = pareto_front(&points);
    Ok(points
        .into_iter()
        .map(|p| {
            let on = front.contains(&p);
            (p, on)
        })
        .collect())
}

pub fn write_pareto<W: Write>(w: &mut W, table: &[(CostPerfPoint, bool)], format: ReportFormat) -> CliResult<()> {
    let rows: Vec<Vec<ReportValue>> = table
        .iter()
        .map(|(p, on)| {
            vec![
                p.label.as_str().into(),
                p.cost.into(),
                p.perf.into(),
                (if *on { "true" } else { "false" }).into(),
            ]
        })
        .collect();
    Ok(write_report(w, &["label", "cost", "perf", "pareto"], &rows, format)?)
}

/// Fits the 5PL map and reports parameters and agreement; `holdout`
/// adds the RMSE of the fitted map on another set.
pub fn fit_table(x: &[f64], y: &[f64], holdout: Option<(&[f64], &[f64])>) -> CliResult<(Vec<&'static str>, Vec<ReportValue>)> {
    let e = evaluate(x, y)?;
    let b = e.fit.params.beta;
    let mut columns = vec!["beta1", "beta2", "beta3", "beta4", "beta5", "pcc", "srocc", "rmse", "iterations", "monotone"];
    let mut row: Vec<ReportValue> = vec![
        b[0].into(),
        b[1].into(),
        b[2].into(),
        b[3].into(),
        b[4].into(),
        e.correlations.pcc.into(),
        e.correlations.srocc.into(),
        e.correlations.rmse.into(),
        e.fit.iterations.into(),
        (if e.monotone { "true" } else { "false" }).into(),
    ];
    if let Some((hx, hy)) = holdout {
        columns.push("holdout_rmse");
        row.push(cross_apply(&e.fit.params, hx, hy)?.into());
    }
    Ok((columns, row))
}
