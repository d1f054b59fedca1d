use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::monte_carlo::Trajectory;
use super::HarnessError;
use crate::labels::to_label;

pub const CSV_HEADER: [&str; 5] = ["run", "iteration", "agent", "hypothesis", "belief"];

/// 12 significant digits.
fn format_belief(p: f64) -> String {
    format!("{p:.11e}")
}

fn check_fingerprints(trajectories: &[Trajectory]) -> Result<(), HarnessError> {
    let first = trajectories.first().ok_or(HarnessError::NothingToExport)?;
    if let Some(other) = trajectories.iter().find(|t| t.fingerprint != first.fingerprint) {
        return Err(HarnessError::MixedFingerprints(
            first.fingerprint.clone(),
            other.fingerprint.clone(),
        ));
    }
    Ok(())
}

/// Writes `run,iteration,agent,hypothesis,belief` rows for iterations
/// `1..=horizon`, sorted by run, iteration, agent and hypothesis. Agents and
/// hypotheses are one-based.
pub fn export_trajectories(trajectories: &[Trajectory], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    check_fingerprints(trajectories)?;
    let mut sorted: Vec<&Trajectory> = trajectories.iter().collect();
    sorted.sort_by_key(|t| t.run);

    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    let err = |e: csv::Error| HarnessError::io(path, e);
    writer.write_record(CSV_HEADER).map_err(err)?;
    for t in sorted {
        let h = &t.history;
        let run = t.run.to_string();
        for i in 1..=h.last_iteration() {
            let iteration = i.to_string();
            for k in 0..h.agents() {
                let agent = to_label(k).to_string();
                for theta in 0..h.hypotheses() {
                    writer
                        .write_record([
                            run.as_str(),
                            iteration.as_str(),
                            agent.as_str(),
                            &to_label(theta).to_string(),
                            &format_belief(h.belief(i, k, theta)),
                        ])
                        .map_err(err)?;
                }
            }
        }
    }
    writer.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub iteration: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Per-hypothesis belief statistics across runs for one agent, iterations
/// `0..=horizon`. Returned as `series[θ][i]`.
pub fn plot_series(trajectories: &[Trajectory], agent: usize) -> Result<Vec<Vec<SeriesPoint>>, HarnessError> {
    check_fingerprints(trajectories)?;
    let first = &trajectories[0].history;
    if agent >= first.agents() {
        return Err(HarnessError::InvalidAgent {
            agent,
            agents: first.agents(),
        });
    }
    let runs = trajectories.len() as f64;
    let iterations = trajectories.iter().map(|t| t.history.len()).min().unwrap_or(0);
    Ok((0..first.hypotheses())
        .map(|theta| {
            (0..iterations)
                .map(|i| {
                    let values = trajectories.iter().map(|t| t.history.belief(i, agent, theta));
                    let (sum, min, max) = values.fold((0.0, f64::INFINITY, f64::NEG_INFINITY), |(s, lo, hi), v| {
                        (s + v, lo.min(v), hi.max(v))
                    });
                    SeriesPoint {
                        iteration: i,
                        mean: sum / runs,
                        min,
                        max,
                    }
                })
                .collect()
        })
        .collect())
}

/// Writes `agent<k>_hypothesis<θ>.csv` (one-based) with columns
/// `iteration,mean,min,max` into `dir`, returning the paths written.
pub fn emit_plot_data(
    trajectories: &[Trajectory],
    agent: usize,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, HarnessError> {
    let dir = dir.as_ref();
    let series = plot_series(trajectories, agent)?;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::with_capacity(series.len());
    for (theta, points) in series.iter().enumerate() {
        let path = dir.join(format!("agent{}_hypothesis{}.csv", to_label(agent), to_label(theta)));
        let file = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        let err = |e: csv::Error| HarnessError::io(&path, e);
        writer.write_record(["iteration", "mean", "min", "max"]).map_err(err)?;
        for p in points {
            writer
                .write_record([
                    p.iteration.to_string(),
                    format_belief(p.mean),
                    format_belief(p.min),
                    format_belief(p.max),
                ])
                .map_err(err)?;
        }
        writer.flush().map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
