//! Artifact writers: CSV ('.' decimal, ',' separator, LF, UTF-8) and
//! pretty-printed JSON.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use dol::observables::{PointStatus, SweepResult};

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(path)
}

pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "{header}")?;
    for row in rows {
        writeln!(f, "{row}")?;
    }
    Ok(path)
}

pub fn write_sweep_csv(
    dir: &Path,
    name: &str,
    sweep: &SweepResult<f64>,
) -> std::io::Result<PathBuf> {
    let rows = (0..sweep.axis_values.len()).map(|i| {
        let status = match &sweep.statuses[i] {
            PointStatus::Ok => "ok".to_string(),
            PointStatus::Failed(e) => format!("failed: {}", e.replace(',', ";")),
        };
        format!(
            "{},{},{},{},{},{}",
            sweep.axis_values[i],
            sweep.mean_velocity[i],
            sweep.stderr[i],
            sweep.mode_11_magnitude[i],
            sweep.realized_jump_rate[i],
            status
        )
    });
    write_csv(
        dir,
        name,
        "axis_value,mean_velocity,stderr,mode11_magnitude,realized_jump_rate,status",
        rows,
    )
}
