//! Deterministic CSV emission.
//!
//! Every float is rendered with 17 significant digits so files are
//! byte-identical across runs of the same build, and writes go through a
//! temporary file plus rename so readers never observe a partial file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::trajectory::Trajectory;

fn render(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes a trajectory with the standard column set. The 2D columns
/// (`mean_x2,covariance`) and the programmed column (`mismatch_weight`)
/// appear exactly when the trajectory carries them.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let two_d = !traj.mean_x2.is_empty();
    let programmed = !traj.mismatch_weight.is_empty();
    let mut header = String::from("t,mean_x,sigma,norm,energy,force_expect,cost_accum");
    if two_d {
        header.push_str(",mean_x2,covariance");
    }
    if programmed {
        header.push_str(",mismatch_weight");
    }
    let mut out = header;
    out.push('\n');
    for i in 0..traj.len() {
        let mut row = vec![
            render(traj.times[i]),
            render(traj.mean_x[i]),
            render(traj.spread[i]),
            render(traj.norm[i]),
            render(traj.energy[i]),
            render(traj.force_expect[i]),
            render(traj.cost_accum[i]),
        ];
        if two_d {
            row.push(render(traj.mean_x2[i]));
            row.push(render(traj.covariance[i]));
        }
        if programmed {
            row.push(render(traj.mismatch_weight[i]));
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    write_atomic(path, &out)
}

/// Writes a reference path: just `t,mean_x`.
pub fn write_reference(path: &Path, times: &[f64], means: &[f64]) -> Result<()> {
    let mut out = String::from("t,mean_x\n");
    for (t, m) in times.iter().zip(means) {
        let _ = writeln!(out, "{},{}", render(*t), render(*m));
    }
    write_atomic(path, &out)
}

/// Writes a generic numeric table.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| render(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    write_atomic(path, &out)
}

/// Writes arbitrary text (the run summary) atomically.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    write_atomic(path, contents)
}
