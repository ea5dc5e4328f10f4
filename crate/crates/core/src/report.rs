//! CSV artifacts and SVG plots.
//!
//! Schemas (UTF-8, header row first, newline-terminated):
//!
//! - `training.csv`: `iteration,env_steps,avg_return,critic_loss,protagonist_loss,adversary_loss,alpha`
//! - `eval_<mode>.csv`: `episode,mode,return,steps,outcome,crossing_time`
//! - `eval_summary.csv`: `mode,episodes,mean,std,pass_rate,collision_rate,mean_crossing_time`
//! - `trajectory_<mode>.csv`: `t,d_p,v_p,d_a1,v_a1,d_a2,v_a2,a,u1,u2,r,outcome`
//!
//! Undefined values (no finished episode yet, no adversary) are written as `NaN`.

use std::fs;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::config::{Algo, TrainConfig};
use crate::env::{AdversaryMode, EnvState, OutcomeKind, VehicleState};
use crate::error::{Error, Result};
use crate::eval::{EpisodeRecord, EvalSummary, TrajectoryRow};
use crate::stats::{self, confidence_band, welch_t_test};
use crate::train::{LogRow, RunArtifacts};

pub const TRAINING_HEADER: [&str; 7] = [
    "iteration",
    "env_steps",
    "avg_return",
    "critic_loss",
    "protagonist_loss",
    "adversary_loss",
    "alpha",
];
pub const EVAL_HEADER: [&str; 6] = ["episode", "mode", "return", "steps", "outcome", "crossing_time"];
pub const SUMMARY_HEADER: [&str; 7] = [
    "mode",
    "episodes",
    "mean",
    "std",
    "pass_rate",
    "collision_rate",
    "mean_crossing_time",
];
pub const TRAJECTORY_HEADER: [&str; 12] = [
    "t", "d_p", "v_p", "d_a1", "v_a1", "d_a2", "v_a2", "a", "u1", "u2", "r", "outcome",
];

/// Every mode an artifact directory carries a file for.
const REPORT_MODES: [AdversaryMode; 4] = [
    AdversaryMode::Aggressive,
    AdversaryMode::Conservative,
    AdversaryMode::Random,
    AdversaryMode::TrainRandom,
];

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Plot(e.to_string())
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let found = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(csv_err(path, format!("unexpected header {found:?}")));
    }
    r.records().map(|rec| rec.map_err(|e| csv_err(path, e))).collect()
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| csv_err(path, format!("bad field {i} in row {rec:?}")))
}

pub fn write_training_csv(path: &Path, log: &[LogRow]) -> Result<()> {
    write_rows(
        path,
        &TRAINING_HEADER,
        log.iter().map(|r| {
            vec![
                r.iteration.to_string(),
                r.env_steps.to_string(),
                r.avg_return.to_string(),
                r.critic_loss.to_string(),
                r.protagonist_loss.to_string(),
                r.adversary_loss.to_string(),
                r.alpha.to_string(),
            ]
        }),
    )
}

/// Reads a training log back. Learning rates are not part of the file and come back as NaN.
pub fn read_training_csv(path: &Path) -> Result<Vec<LogRow>> {
    read_rows(path, &TRAINING_HEADER)?
        .iter()
        .map(|rec| {
            Ok(LogRow {
                iteration: field(path, rec, 0)?,
                env_steps: field(path, rec, 1)?,
                avg_return: field(path, rec, 2)?,
                critic_loss: field(path, rec, 3)?,
                protagonist_loss: field(path, rec, 4)?,
                adversary_loss: field(path, rec, 5)?,
                alpha: field(path, rec, 6)?,
                actor_lr: f64::NAN,
                critic_lr: f64::NAN,
                alpha_lr: f64::NAN,
            })
        })
        .collect()
}

pub fn write_eval_csv(path: &Path, summary: &EvalSummary, dt: f64) -> Result<()> {
    let mode = summary.mode.name();
    write_rows(
        path,
        &EVAL_HEADER,
        summary
            .returns
            .iter()
            .zip(&summary.steps)
            .zip(&summary.outcomes)
            .enumerate()
            .map(|(i, ((ret, steps), outcome))| {
                let crossing = if *outcome == OutcomeKind::Pass {
                    *steps as f64 * dt
                } else {
                    f64::NAN
                };
                vec![
                    i.to_string(),
                    mode.to_string(),
                    ret.to_string(),
                    steps.to_string(),
                    outcome.name().to_string(),
                    crossing.to_string(),
                ]
            }),
    )
}

fn write_empty(path: &Path, header: &[&str]) -> Result<()> {
    write_rows(path, header, std::iter::empty())
}

/// Reads a per-episode evaluation file. Returns `None` for a headers-only file.
pub fn read_eval_csv(path: &Path, dt: f64) -> Result<Option<EvalSummary>> {
    let rows = read_rows(path, &EVAL_HEADER)?;
    let Some(first) = rows.first() else {
        return Ok(None);
    };
    let mode: AdversaryMode = field::<String>(path, first, 1)?.parse()?;
    let mut returns = Vec::with_capacity(rows.len());
    let mut steps = Vec::with_capacity(rows.len());
    let mut outcomes = Vec::with_capacity(rows.len());
    for rec in &rows {
        returns.push(field(path, rec, 2)?);
        steps.push(field(path, rec, 3)?);
        outcomes.push(field::<String>(path, rec, 4)?.parse()?);
    }
    Ok(Some(EvalSummary::from_parts(mode, returns, steps, outcomes, dt)))
}

/// The `return` column of an evaluation file.
pub fn read_eval_returns(path: &Path) -> Result<Vec<f64>> {
    read_rows(path, &EVAL_HEADER)?
        .iter()
        .map(|rec| field(path, rec, 2))
        .collect()
}

pub fn write_summary_csv(path: &Path, evals: &[EvalSummary]) -> Result<()> {
    write_rows(
        path,
        &SUMMARY_HEADER,
        evals.iter().map(|s| {
            vec![
                s.mode.name().to_string(),
                s.returns.len().to_string(),
                s.mean.to_string(),
                s.std.to_string(),
                s.pass_rate.to_string(),
                s.collision_rate.to_string(),
                s.mean_crossing_time.to_string(),
            ]
        }),
    )
}

pub fn write_trajectory_csv(path: &Path, episode: &EpisodeRecord) -> Result<()> {
    write_rows(
        path,
        &TRAJECTORY_HEADER,
        episode.rows.iter().map(|r| {
            let [a1, a2] = r.state.adversaries;
            vec![
                r.t.to_string(),
                r.state.protagonist.d.to_string(),
                r.state.protagonist.v.to_string(),
                a1.d.to_string(),
                a1.v.to_string(),
                a2.d.to_string(),
                a2.v.to_string(),
                r.action.to_string(),
                r.adversary_action[0].to_string(),
                r.adversary_action[1].to_string(),
                r.reward.to_string(),
                r.outcome.name().to_string(),
            ]
        }),
    )
}

pub fn read_trajectory_csv(path: &Path, dt: f64) -> Result<Vec<TrajectoryRow>> {
    read_rows(path, &TRAJECTORY_HEADER)?
        .iter()
        .map(|rec| {
            let f = |i| field::<f64>(path, rec, i);
            let t = f(0)?;
            let vehicle = |i| -> Result<VehicleState> { Ok(VehicleState { d: f(i)?, v: f(i + 1)? }) };
            Ok(TrajectoryRow {
                t,
                state: EnvState {
                    protagonist: vehicle(1)?,
                    adversaries: [vehicle(3)?, vehicle(5)?],
                    step_count: (t / dt).round() as u32,
                },
                action: f(7)?,
                adversary_action: [f(8)?, f(9)?],
                reward: f(10)?,
                outcome: field::<String>(path, rec, 11)?.parse()?,
            })
        })
        .collect()
}

fn eval_file(dir: &Path, mode: AdversaryMode) -> PathBuf {
    dir.join(format!("eval_{}.csv", mode.name()))
}

fn trajectory_file(dir: &Path, mode: AdversaryMode) -> PathBuf {
    dir.join(format!("trajectory_{}.csv", mode.name()))
}

/// Writes the CSV files and plots of one run. Returns the paths written.
pub fn emit_reports(artifacts: &RunArtifacts, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let dt = artifacts.config.env.dt;
    let mut written = Vec::new();

    let training = out_dir.join("training.csv");
    write_training_csv(&training, &artifacts.log)?;
    written.push(training);

    for mode in REPORT_MODES {
        let path = eval_file(out_dir, mode);
        match artifacts.evals.iter().find(|s| s.mode == mode) {
            Some(s) => write_eval_csv(&path, s, dt)?,
            None => write_empty(&path, &EVAL_HEADER)?,
        }
        written.push(path);

        let path = trajectory_file(out_dir, mode);
        match artifacts.trajectories.iter().find(|(m, _)| *m == mode) {
            Some((_, ep)) => write_trajectory_csv(&path, ep)?,
            None => write_empty(&path, &TRAJECTORY_HEADER)?,
        }
        written.push(path);
    }

    let summary = out_dir.join("eval_summary.csv");
    write_summary_csv(&summary, &artifacts.evals)?;
    written.push(summary);

    let curve: Vec<(f64, f64)> = artifacts
        .log
        .iter()
        .map(|r| (r.env_steps as f64, r.avg_return))
        .collect();
    let name = artifacts.config.algo.name();
    let path = out_dir.join("training_curve.svg");
    plot_training_curves(&path, &[(name.to_string(), band_of(&[curve]))])?;
    written.push(path);

    let groups: Vec<(String, Vec<f64>)> = artifacts
        .evals
        .iter()
        .map(|s| (format!("{} {}", name, s.mode.name()), s.returns.clone()))
        .collect();
    let path = out_dir.join("eval_boxplot.svg");
    plot_boxplots(&path, "Evaluation return", &groups)?;
    written.push(path);

    for (mode, ep) in &artifacts.trajectories {
        let path = out_dir.join(format!("trajectory_{}.svg", mode.name()));
        plot_trajectory(&path, &format!("{name}, {} adversaries", mode.name()), &ep.rows)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes config, reports and checkpoints of a run into `dir`.
pub fn save_run(artifacts: &RunArtifacts, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = emit_reports(artifacts, dir)?;
    let config = dir.join("config.txt");
    artifacts.config.save(&config)?;
    written.push(config);
    let ckpt_dir = dir.join("checkpoints");
    fs::create_dir_all(&ckpt_dir).map_err(|e| Error::io(&ckpt_dir, e))?;
    for ck in &artifacts.checkpoints {
        let path = ckpt_dir.join(format!("step_{:09}.ckpt", ck.env_steps));
        ck.save(&path)?;
        written.push(path);
    }
    if let Some(last) = artifacts.checkpoints.last() {
        let path = dir.join("final.ckpt");
        last.save(&path)?;
        written.push(path);
    }
    Ok(written)
}

/// Pointwise band over curves sampled at the same x positions.
fn band_of(curves: &[Vec<(f64, f64)>]) -> Vec<(f64, f64, f64, f64)> {
    let len = curves.iter().map(Vec::len).min().unwrap_or(0);
    let ys: Vec<Vec<f64>> = curves.iter().map(|c| c[..len].iter().map(|p| p.1).collect()).collect();
    confidence_band(&ys)
        .into_iter()
        .enumerate()
        .map(|(i, (m, lo, hi))| (curves[0][i].0, m, lo, hi))
        .filter(|p| p.1.is_finite())
        .collect()
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1.0);
    (lo - pad, hi + pad)
}

const SERIES_COLORS: [RGBColor; 4] = [RGBColor(200, 40, 40), RGBColor(30, 90, 200), RGBColor(30, 150, 60), RGBColor(150, 80, 180)];

/// Mean curve with shaded 95% band per labelled group. Points are `(x, mean, lower, upper)`.
pub fn plot_training_curves(path: &Path, groups: &[(String, Vec<(f64, f64, f64, f64)>)]) -> Result<()> {
    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let (x_lo, x_hi) = finite_range(groups.iter().flat_map(|(_, b)| b.iter().map(|p| p.0)));
    let (y_lo, y_hi) = finite_range(groups.iter().flat_map(|(_, b)| b.iter().flat_map(|p| [p.2, p.3])));
    let mut chart = ChartBuilder::on(&root)
        .caption("Average return during training", ("sans-serif", 20))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x_lo..x_hi, y_lo..y_hi)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("environment steps")
        .y_desc("average return")
        .draw()
        .map_err(plot_err)?;
    for (i, (label, band)) in groups.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let polygon: Vec<(f64, f64)> = band
            .iter()
            .map(|p| (p.0, p.3))
            .chain(band.iter().rev().map(|p| (p.0, p.2)))
            .collect();
        if polygon.len() >= 3 {
            chart
                .draw_series(std::iter::once(Polygon::new(polygon, color.mix(0.2).filled())))
                .map_err(plot_err)?;
        }
        chart
            .draw_series(LineSeries::new(band.iter().map(|p| (p.0, p.1)), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(label.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)
}

pub fn plot_boxplots(path: &Path, caption: &str, groups: &[(String, Vec<f64>)]) -> Result<()> {
    let root = SVGBackend::new(path, (900, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let groups: Vec<&(String, Vec<f64>)> = groups.iter().filter(|(_, v)| !v.is_empty()).collect();
    if groups.is_empty() {
        root.titled(caption, ("sans-serif", 20)).map_err(plot_err)?;
        return root.present().map_err(plot_err);
    }
    let labels: Vec<&str> = groups.iter().map(|(l, _)| l.as_str()).collect();
    let (y_lo, y_hi) = finite_range(groups.iter().flat_map(|(_, v)| v.iter().copied()));
    let mut chart = ChartBuilder::on(&root)
        .caption(caption, ("sans-serif", 20))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(labels[..].into_segmented(), y_lo as f32..y_hi as f32)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .y_desc("episode return")
        .draw()
        .map_err(plot_err)?;
    for (i, (_, values)) in groups.iter().enumerate() {
        let q = Quartiles::new(values);
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let key = &labels[i];
        chart
            .draw_series(std::iter::once(
                Boxplot::new_vertical(SegmentValue::CenterOf(key), &q)
                    .width(30)
                    .style(color),
            ))
            .map_err(plot_err)?;
    }
    root.present().map_err(plot_err)
}

/// Position and velocity of all three vehicles against time.
pub fn plot_trajectory(path: &Path, caption: &str, rows: &[TrajectoryRow]) -> Result<()> {
    let root = SVGBackend::new(path, (900, 700)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let (upper, lower) = root.split_vertically(350);
    let t_max = rows.last().map(|r| r.t).unwrap_or(1.0).max(0.1);
    let vehicles: [(&str, fn(&EnvState) -> VehicleState); 3] = [
        ("protagonist", |s| s.protagonist),
        ("adversary 1", |s| s.adversaries[0]),
        ("adversary 2", |s| s.adversaries[1]),
    ];
    for (area, (name, pick)) in [(&upper, ("distance to centre [m]", true)), (&lower, ("speed [m/s]", false))] {
        let value = |v: VehicleState| if pick { v.d } else { v.v };
        let (y_lo, y_hi) = finite_range(rows.iter().flat_map(|r| {
            vehicles.iter().map(move |(_, f)| value(f(&r.state)))
        }));
        let mut chart = ChartBuilder::on(area)
            .caption(if pick { caption } else { "" }, ("sans-serif", 18))
            .margin(10)
            .x_label_area_size(35)
            .y_label_area_size(55)
            .build_cartesian_2d(0.0..t_max, y_lo..y_hi)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc("time [s]")
            .y_desc(name)
            .draw()
            .map_err(plot_err)?;
        for (i, (label, f)) in vehicles.iter().enumerate() {
            let color = SERIES_COLORS[i];
            chart
                .draw_series(LineSeries::new(rows.iter().map(|r| (r.t, value(f(&r.state)))), color.stroke_width(2)))
                .map_err(plot_err)?
                .label(*label)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
    }
    root.present().map_err(plot_err)
}

/// Welch comparison of two algorithms under one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeComparison {
    pub mode: AdversaryMode,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t: f64,
    pub p: f64,
}

/// Aggregates several run directories (as written by [`save_run`]) into
/// multi-seed curves, boxplots, Welch comparisons and trajectory plots.
pub fn aggregate_runs(run_dirs: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut runs: Vec<(TrainConfig, PathBuf)> = Vec::new();
    for dir in run_dirs {
        runs.push((TrainConfig::load(dir.join("config.txt"))?, dir.clone()));
    }
    let mut written = Vec::new();
    let algos: Vec<Algo> = [Algo::Dsac, Algo::MinimaxDsac]
        .into_iter()
        .filter(|a| runs.iter().any(|(c, _)| c.algo == *a))
        .collect();

    // training curves with a band over seeds
    let mut bands = Vec::new();
    let band_path = out_dir.join("training_band.csv");
    let mut band_rows = Vec::new();
    for &algo in &algos {
        let mut curves = Vec::new();
        for (_, dir) in runs.iter().filter(|(c, _)| c.algo == algo) {
            let log = read_training_csv(&dir.join("training.csv"))?;
            curves.push(log.iter().map(|r| (r.env_steps as f64, r.avg_return)).collect::<Vec<_>>());
        }
        let band = band_of(&curves);
        for p in &band {
            band_rows.push(vec![
                algo.name().to_string(),
                p.0.to_string(),
                curves.len().to_string(),
                p.1.to_string(),
                p.2.to_string(),
                p.3.to_string(),
            ]);
        }
        bands.push((format!("{} ({} runs)", algo.name(), curves.len()), band));
    }
    write_rows(&band_path, &["algo", "env_steps", "runs", "mean", "lower", "upper"], band_rows)?;
    written.push(band_path);
    let path = out_dir.join("training_curve.svg");
    plot_training_curves(&path, &bands)?;
    written.push(path);

    // pooled evaluation returns per (algo, mode)
    let mut pooled: Vec<(Algo, AdversaryMode, Vec<f64>)> = Vec::new();
    for &algo in &algos {
        for mode in AdversaryMode::EVAL_MODES {
            let mut all = Vec::new();
            for (_, dir) in runs.iter().filter(|(c, _)| c.algo == algo) {
                let file = eval_file(dir, mode);
                if file.exists() {
                    all.extend(read_eval_returns(&file)?);
                }
            }
            pooled.push((algo, mode, all));
        }
    }
    let groups: Vec<(String, Vec<f64>)> = AdversaryMode::EVAL_MODES
        .iter()
        .flat_map(|&mode| {
            pooled
                .iter()
                .filter(move |(_, m, _)| *m == mode)
                .map(|(a, m, v)| (format!("{} {}", a.name(), m.name()), v.clone()))
        })
        .collect();
    let path = out_dir.join("eval_boxplot.svg");
    plot_boxplots(&path, "Evaluation return by adversary mode", &groups)?;
    written.push(path);

    let comparisons = compare_pooled(&pooled);
    let path = out_dir.join("comparison.csv");
    write_rows(
        &path,
        &["mode", "mean_dsac", "mean_minimax_dsac", "t", "p"],
        comparisons.iter().map(|c| {
            vec![
                c.mode.name().to_string(),
                c.mean_a.to_string(),
                c.mean_b.to_string(),
                c.t.to_string(),
                c.p.to_string(),
            ]
        }),
    )?;
    written.push(path);

    // trajectories of the first run of each algorithm
    for &algo in &algos {
        let Some((cfg, dir)) = runs.iter().find(|(c, _)| c.algo == algo) else {
            continue;
        };
        for mode in AdversaryMode::EVAL_MODES {
            let file = trajectory_file(dir, mode);
            if !file.exists() {
                continue;
            }
            let rows = read_trajectory_csv(&file, cfg.env.dt)?;
            if rows.is_empty() {
                continue;
            }
            let path = out_dir.join(format!("trajectory_{}_{}.svg", algo.name(), mode.name()));
            plot_trajectory(&path, &format!("{}, {} adversaries", algo.name(), mode.name()), &rows)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Welch tests of minimax-dsac (b) against dsac (a) for every mode both have.
fn compare_pooled(pooled: &[(Algo, AdversaryMode, Vec<f64>)]) -> Vec<ModeComparison> {
    AdversaryMode::EVAL_MODES
        .iter()
        .filter_map(|&mode| {
            let get = |algo| pooled.iter().find(|(a, m, _)| *a == algo && *m == mode).map(|p| &p.2);
            let (a, b) = (get(Algo::Dsac)?, get(Algo::MinimaxDsac)?);
            let r = welch_t_test(a, b).ok()?;
            Some(ModeComparison {
                mode,
                mean_a: stats::mean(a),
                mean_b: stats::mean(b),
                t: r.t,
                p: r.p,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_artifacts_give_header_only_csvs() {
        let dir = tempfile::tempdir().unwrap();
        let art = RunArtifacts::empty(TrainConfig::default());
        emit_reports(&art, dir.path()).unwrap();
        let training = fs::read_to_string(dir.path().join("training.csv")).unwrap();
        assert_eq!(
            training,
            "iteration,env_steps,avg_return,critic_loss,protagonist_loss,adversary_loss,alpha\n"
        );
        let eval = fs::read_to_string(dir.path().join("eval_aggressive.csv")).unwrap();
        assert_eq!(eval, "episode,mode,return,steps,outcome,crossing_time\n");
        let traj = fs::read_to_string(dir.path().join("trajectory_random.csv")).unwrap();
        assert_eq!(traj, "t,d_p,v_p,d_a1,v_a1,d_a2,v_a2,a,u1,u2,r,outcome\n");
        assert!(read_eval_csv(&dir.path().join("eval_random.csv"), 0.1).unwrap().is_none());
    }

    #[test]
    fn training_csv_round_trip_keeps_nan() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let row = LogRow {
            iteration: 3,
            env_steps: 1000,
            avg_return: f64::NAN,
            critic_loss: 1.25,
            protagonist_loss: -0.5,
            adversary_loss: f64::NAN,
            alpha: 0.01,
            actor_lr: 1.0,
            critic_lr: 1.0,
            alpha_lr: 1.0,
        };
        write_training_csv(&path, &[row]).unwrap();
        let back = read_training_csv(&path).unwrap();
        assert_eq!(back[0].env_steps, 1000);
        assert!(back[0].avg_return.is_nan() && back[0].adversary_loss.is_nan());
        assert_eq!(back[0].critic_loss, 1.25);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_eval_returns(&path).is_err());
    }

    #[test]
    fn unwritable_output_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let art = RunArtifacts::empty(TrainConfig::default());
        assert!(emit_reports(&art, &blocker.join("sub")).is_err());
    }
}
