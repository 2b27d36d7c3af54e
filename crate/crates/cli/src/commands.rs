//! Subcommand implementations.

use crate::output::{csv_text, fmt_f64, json_envelope, write_out, Meta};
use crate::table::parse_study_csv;
use crate::{
    resolve_seed, ApproachArg, ComputeArgs, ConvergeArgs, DistArgs, DistCommand, Format,
    RegimeArg, SimCommand, TruthArg, UsageError,
};
use anyhow::{Context, Result};
use failsafe_core::convergence::{convergence_study, ols_loglog, SkippedPoint, TruthSource};
use failsafe_core::montecarlo::{
    histogram, ks_critical_value, ks_statistic, simulate_half_normal_sums, simulate_nr, Bins,
    HistogramData, Regime, SimulationBatch,
};
use failsafe_core::normal::std_normal_pdf;
use failsafe_core::{Approach, NrDistribution, SumParams};
use serde::Serialize;

/// Points per overlay curve in the simulate commands.
const CURVE_POINTS: usize = 257;

fn approaches(arg: ApproachArg) -> Vec<Approach> {
    match arg {
        ApproachArg::Truncated => vec![Approach::Truncated],
        ApproachArg::Folded => vec![Approach::Folded],
        ApproachArg::Both => vec![Approach::Truncated, Approach::Folded],
    }
}

fn approach_name(a: Approach) -> &'static str {
    match a {
        Approach::Truncated => "truncated",
        Approach::Folded => "folded",
    }
}

// --- compute -------------------------------------------------------------

pub fn compute(args: ComputeArgs) -> Result<()> {
    let table = parse_study_csv(&args.file)?;
    let report = table.studies.fail_safe_n(args.alpha)?;
    let mut meta = Meta::new("compute");
    meta.input = Some(args.file.clone());
    meta.alpha = Some(args.alpha);
    meta.k = Some(report.k);
    let text = match args.format {
        Format::Json => json_envelope(&meta, &report)?,
        Format::Csv => {
            let header = [
                "k",
                "alpha",
                "z_alpha",
                "stouffer_z",
                "stouffer_p",
                "n_r_raw",
                "n_r_reported",
                "threshold",
                "minimal_bias",
            ];
            let row = vec![
                report.k.to_string(),
                fmt_f64(report.alpha),
                fmt_f64(report.z_alpha),
                fmt_f64(report.stouffer_z),
                fmt_f64(report.stouffer_p),
                fmt_f64(report.n_r_raw),
                fmt_f64(report.n_r_reported),
                fmt_f64(report.threshold),
                report.minimal_bias.to_string(),
            ];
            csv_text(&header, &[row])?
        }
    };
    write_out(args.out.as_deref(), &text)
}

// --- dist ----------------------------------------------------------------

#[derive(Serialize)]
struct ValueRow {
    x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    folded: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptotic: Option<f64>,
}

#[derive(Serialize)]
struct MomentsRow {
    approach: &'static str,
    mean: f64,
    variance: f64,
    epsilon: f64,
    delta: f64,
}

#[derive(Serialize)]
struct CfRow {
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    re_truncated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im_truncated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    re_folded: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im_folded: Option<f64>,
}

fn dist_meta(command: &str, common: &DistArgs) -> Meta {
    let mut meta = Meta::new(command);
    meta.k = Some(common.k);
    meta.alpha = Some(common.alpha);
    meta.approach = Some(
        match common.approach {
            ApproachArg::Truncated => "truncated",
            ApproachArg::Folded => "folded",
            ApproachArg::Both => "both",
        }
        .to_string(),
    );
    meta
}

fn opt_cell(v: Option<f64>) -> Option<String> {
    v.map(fmt_f64)
}

pub fn dist(which: DistCommand) -> Result<()> {
    match which {
        DistCommand::Pdf {
            common,
            grid,
            asymptotic,
        } => {
            let params = SumParams::new(common.k, common.alpha)?;
            let mut meta = dist_meta("dist pdf", &common);
            meta.grid = Some(grid.to_string());
            meta.asymptotic = Some(asymptotic);
            let wanted = approaches(common.approach);
            let mut rows = Vec::with_capacity(grid.n);
            for x in grid.points() {
                let mut row = ValueRow {
                    x,
                    truncated: None,
                    folded: None,
                    asymptotic: None,
                };
                if asymptotic {
                    row.asymptotic = Some(failsafe_core::dist::asymptotic_pdf(x, &params));
                } else {
                    for &a in &wanted {
                        let v = NrDistribution::new(a, params).pdf(x)?;
                        match a {
                            Approach::Truncated => row.truncated = Some(v),
                            Approach::Folded => row.folded = Some(v),
                        }
                    }
                }
                rows.push(row);
            }
            emit_value_rows(&common, meta, "pdf", &rows)
        }
        DistCommand::Cdf { common, grid } => {
            let params = SumParams::new(common.k, common.alpha)?;
            let mut meta = dist_meta("dist cdf", &common);
            meta.grid = Some(grid.to_string());
            let wanted = approaches(common.approach);
            let rows: Vec<ValueRow> = grid
                .points()
                .into_iter()
                .map(|x| {
                    let mut row = ValueRow {
                        x,
                        truncated: None,
                        folded: None,
                        asymptotic: None,
                    };
                    for &a in &wanted {
                        let v = NrDistribution::new(a, params).cdf(x);
                        match a {
                            Approach::Truncated => row.truncated = Some(v),
                            Approach::Folded => row.folded = Some(v),
                        }
                    }
                    row
                })
                .collect();
            emit_value_rows(&common, meta, "cdf", &rows)
        }
        DistCommand::Moments { common } => {
            let params = SumParams::new(common.k, common.alpha)?;
            let meta = dist_meta("dist moments", &common);
            let rows: Vec<MomentsRow> = approaches(common.approach)
                .into_iter()
                .map(|a| {
                    let m = NrDistribution::new(a, params).moments();
                    MomentsRow {
                        approach: approach_name(a),
                        mean: m.mean,
                        variance: m.variance,
                        epsilon: m.epsilon,
                        delta: m.delta,
                    }
                })
                .collect();
            let text = match common.format {
                Format::Json => json_envelope(&meta, &rows)?,
                Format::Csv => {
                    let header = ["approach", "mean", "variance", "epsilon", "delta"];
                    let body: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.approach.to_string(),
                                fmt_f64(r.mean),
                                fmt_f64(r.variance),
                                fmt_f64(r.epsilon),
                                fmt_f64(r.delta),
                            ]
                        })
                        .collect();
                    csv_text(&header, &body)?
                }
            };
            write_out(common.out.as_deref(), &text)
        }
        DistCommand::Cf { common, t, grid } => {
            let params = SumParams::new(common.k, common.alpha)?;
            let ts: Vec<f64> = match (t, grid) {
                (Some(t), None) => vec![t],
                (None, Some(g)) => g.points(),
                (Some(_), Some(_)) => {
                    return Err(UsageError("pass either --t or --grid, not both".into()).into())
                }
                (None, None) => {
                    return Err(UsageError("cf needs --t or --grid".into()).into())
                }
            };
            let mut meta = dist_meta("dist cf", &common);
            meta.t = t;
            meta.grid = grid.map(|g| g.to_string());
            let wanted = approaches(common.approach);
            let rows: Vec<CfRow> = ts
                .into_iter()
                .map(|t| {
                    let mut row = CfRow {
                        t,
                        re_truncated: None,
                        im_truncated: None,
                        re_folded: None,
                        im_folded: None,
                    };
                    for &a in &wanted {
                        let v = NrDistribution::new(a, params).cf(t);
                        match a {
                            Approach::Truncated => {
                                row.re_truncated = Some(v.re);
                                row.im_truncated = Some(v.im);
                            }
                            Approach::Folded => {
                                row.re_folded = Some(v.re);
                                row.im_folded = Some(v.im);
                            }
                        }
                    }
                    row
                })
                .collect();
            let text = match common.format {
                Format::Json => json_envelope(&meta, &rows)?,
                Format::Csv => {
                    let mut header = vec!["t"];
                    for &a in &wanted {
                        match a {
                            Approach::Truncated => header.extend(["re_truncated", "im_truncated"]),
                            Approach::Folded => header.extend(["re_folded", "im_folded"]),
                        }
                    }
                    let body: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| {
                            let mut cells = vec![fmt_f64(r.t)];
                            cells.extend(
                                [r.re_truncated, r.im_truncated, r.re_folded, r.im_folded]
                                    .into_iter()
                                    .filter_map(opt_cell),
                            );
                            cells
                        })
                        .collect();
                    csv_text(&header, &body)?
                }
            };
            write_out(common.out.as_deref(), &text)
        }
    }
}

fn emit_value_rows(
    common: &DistArgs,
    meta: Meta,
    kind: &str,
    rows: &[ValueRow],
) -> Result<()> {
    let text = match common.format {
        Format::Json => json_envelope(&meta, &rows)?,
        Format::Csv => {
            let mut header = vec!["x".to_string()];
            if rows.first().is_some_and(|r| r.asymptotic.is_some()) {
                header.push(format!("{kind}_asymptotic"));
            } else {
                for &a in &approaches(common.approach) {
                    header.push(format!("{kind}_{}", approach_name(a)));
                }
            }
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut cells = vec![fmt_f64(r.x)];
                    cells.extend(
                        [r.truncated, r.folded, r.asymptotic]
                            .into_iter()
                            .filter_map(opt_cell),
                    );
                    cells
                })
                .collect();
            csv_text(&header_refs, &body)?
        }
    };
    write_out(common.out.as_deref(), &text)
}

// --- simulate ------------------------------------------------------------

#[derive(Serialize)]
struct Bar {
    lo: f64,
    hi: f64,
    count: u64,
    density: f64,
}

#[derive(Serialize)]
struct Curve {
    series: &'static str,
    points: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct KsEntry {
    series: &'static str,
    d: f64,
    critical_1pct: f64,
}

#[derive(Serialize)]
struct SimData {
    reps_requested: usize,
    reps_kept: usize,
    histogram: Vec<Bar>,
    curves: Vec<Curve>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    ks: Vec<KsEntry>,
}

fn bars(hist: &HistogramData) -> Vec<Bar> {
    hist.counts
        .iter()
        .zip(hist.bin_edges.windows(2))
        .zip(hist.densities())
        .map(|((&count, w), density)| Bar {
            lo: w[0],
            hi: w[1],
            count,
            density,
        })
        .collect()
}

fn curve_points<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> Vec<(f64, f64)> {
    let step = (hi - lo) / (CURVE_POINTS - 1) as f64;
    (0..CURVE_POINTS)
        .map(|i| {
            let x = lo + step * i as f64;
            (x, f(x))
        })
        .collect()
}

fn bins_arg(bins: Option<usize>) -> Bins {
    match bins {
        Some(n) => Bins::Fixed(n),
        None => Bins::Auto,
    }
}

fn emit_sim(
    format: Format,
    out: Option<&std::path::Path>,
    meta: Meta,
    batch: &SimulationBatch,
    hist: &HistogramData,
    curves: Vec<Curve>,
    ks: Vec<KsEntry>,
) -> Result<()> {
    let data = SimData {
        reps_requested: batch.reps_requested(),
        reps_kept: batch.reps_kept(),
        histogram: bars(hist),
        curves,
        ks,
    };
    let text = match format {
        Format::Json => json_envelope(&meta, &data)?,
        Format::Csv => {
            let header = ["series", "x", "x_hi", "y"];
            let mut rows: Vec<Vec<String>> = Vec::new();
            for b in &data.histogram {
                rows.push(vec![
                    "histogram".into(),
                    fmt_f64(b.lo),
                    fmt_f64(b.hi),
                    fmt_f64(b.density),
                ]);
            }
            for c in &data.curves {
                for &(x, y) in &c.points {
                    rows.push(vec![c.series.into(), fmt_f64(x), String::new(), fmt_f64(y)]);
                }
            }
            for k in &data.ks {
                rows.push(vec![k.series.into(), String::new(), String::new(), fmt_f64(k.d)]);
            }
            if !data.ks.is_empty() {
                rows.push(vec![
                    "ks_critical_1pct".into(),
                    String::new(),
                    String::new(),
                    fmt_f64(data.ks[0].critical_1pct),
                ]);
            }
            rows.push(vec![
                "reps_kept".into(),
                String::new(),
                String::new(),
                data.reps_kept.to_string(),
            ]);
            csv_text(&header, &rows)?
        }
    };
    write_out(out, &text)
}

pub fn simulate(which: SimCommand) -> Result<()> {
    match which {
        SimCommand::Clt(args) => {
            let seed = resolve_seed(args.seed)?;
            let batch = simulate_half_normal_sums(args.k, args.reps, seed)?;
            let hist = histogram(&batch, bins_arg(args.bins))?;
            let params = SumParams::new(args.k, 0.05)?; // alpha irrelevant for the sum law
            let (mu, sigma) = (params.mu(), params.sigma());
            let lo = hist.bin_edges[0];
            let hi = *hist.bin_edges.last().unwrap();
            let curves = vec![Curve {
                series: "pdf_normal",
                points: curve_points(lo, hi, |s| std_normal_pdf((s - mu) / sigma) / sigma),
            }];
            let mut meta = Meta::new("simulate clt");
            meta.k = Some(args.k);
            meta.reps = Some(args.reps);
            meta.seed = Some(seed);
            meta.bins = args.bins;
            emit_sim(args.format, args.out.as_deref(), meta, &batch, &hist, curves, vec![])
        }
        SimCommand::Nr(args) => {
            let seed = resolve_seed(args.seed)?;
            let regime = match args.regime {
                RegimeArg::Truncated => Regime::NrTruncated,
                RegimeArg::Folded => Regime::NrFolded,
            };
            let batch = simulate_nr(args.k, args.alpha, args.reps, seed, regime)?;
            let hist = histogram(&batch, bins_arg(args.bins))?;
            let params = SumParams::new(args.k, args.alpha)?;
            let trunc = NrDistribution::truncated(params);
            let fold = NrDistribution::folded(params);
            let lo = hist.bin_edges[0];
            let hi = *hist.bin_edges.last().unwrap();
            let curves = vec![
                Curve {
                    series: "pdf_truncated",
                    points: curve_points(lo, hi, |n| trunc.pdf(n).unwrap_or(f64::NAN)),
                },
                Curve {
                    series: "pdf_folded",
                    points: curve_points(lo, hi, |n| fold.pdf(n).unwrap_or(f64::NAN)),
                },
            ];
            let crit = ks_critical_value(batch.reps_kept(), 0.01);
            let ks = vec![
                KsEntry {
                    series: "ks_truncated",
                    d: ks_statistic(&batch, |x| trunc.cdf(x)),
                    critical_1pct: crit,
                },
                KsEntry {
                    series: "ks_folded",
                    d: ks_statistic(&batch, |x| fold.cdf(x)),
                    critical_1pct: crit,
                },
            ];
            let mut meta = Meta::new("simulate nr");
            meta.k = Some(args.k);
            meta.alpha = Some(args.alpha);
            meta.reps = Some(args.reps);
            meta.seed = Some(seed);
            meta.bins = args.bins;
            meta.regime = Some(
                match args.regime {
                    RegimeArg::Truncated => "truncated",
                    RegimeArg::Folded => "folded",
                }
                .to_string(),
            );
            emit_sim(args.format, args.out.as_deref(), meta, &batch, &hist, curves, ks)
        }
    }
}

// --- converge ------------------------------------------------------------

#[derive(Serialize)]
struct FitData {
    slope: f64,
    intercept: f64,
    slope_ci_95: (f64, f64),
    n_points: usize,
    records_used: usize,
    skipped: Vec<SkippedPoint>,
}

pub fn converge(args: ConvergeArgs) -> Result<()> {
    let seed = resolve_seed(args.seed)?;
    let kmax = args.kmax.unwrap_or(if args.full_scale { 5000 } else { 1000 });
    let reps = args.reps.unwrap_or(if args.full_scale { 10_000 } else { 2000 });
    if args.kmin == 0 || args.step == 0 || kmax < args.kmin {
        return Err(UsageError(format!(
            "need 0 < kmin <= kmax and step > 0, got kmin={} kmax={kmax} step={}",
            args.kmin, args.step
        ))
        .into());
    }
    let truth = match args.truth {
        TruthArg::Folded => TruthSource::FoldedMean,
        TruthArg::Truncated => TruthSource::TruncatedMean,
    };
    let grid: Vec<usize> = (args.kmin..=kmax).step_by(args.step).collect();
    let study = convergence_study(&grid, reps, args.alpha, seed, truth)?;

    let mut meta = Meta::new("converge");
    meta.alpha = Some(args.alpha);
    meta.seed = Some(seed);
    meta.kmin = Some(args.kmin);
    meta.kmax = Some(kmax);
    meta.step = Some(args.step);
    meta.reps = Some(reps);
    meta.truth = Some(
        match args.truth {
            TruthArg::Folded => "folded",
            TruthArg::Truncated => "truncated",
        }
        .to_string(),
    );

    let header = ["k", "mean_estimate", "true_value", "abs_rel_error", "ratio"];
    let rows: Vec<Vec<String>> = study
        .records
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                fmt_f64(r.mean_estimate),
                fmt_f64(r.true_value),
                fmt_f64(r.abs_rel_error),
                fmt_f64(r.ratio),
            ]
        })
        .collect();
    write_out(args.out.as_deref(), &csv_text(&header, &rows)?)?;

    let fit = ols_loglog(&study.records).context("log-log fit failed")?;
    let data = FitData {
        slope: fit.slope,
        intercept: fit.intercept,
        slope_ci_95: fit.slope_ci_95,
        n_points: fit.n_points,
        records_used: study.records.len(),
        skipped: study.skipped,
    };
    write_out(args.fit_out.as_deref(), &json_envelope(&meta, &data)?)
}
