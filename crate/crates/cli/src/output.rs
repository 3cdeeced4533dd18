//! CSV and JSON artifacts plus the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use predprey::model::Lattice;
use predprey::samplers::Trajectory;
use serde::Serialize;

/// Collects the files of one run inside its output directory.
pub struct ArtifactWriter {
    dir: PathBuf,
    files: Vec<ManifestFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub format: String,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[ManifestFile] {
        &self.files
    }

    fn record(&mut self, name: &str, format: &str) {
        self.files.push(ManifestFile { path: name.to_string(), format: format.to_string() });
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.record(name, "json");
        Ok(())
    }

    /// Writes a table with the given header and rows.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.record(name, "csv");
        Ok(())
    }

    /// Long-format trajectory: one row per recorded time and cell with
    /// columns `time, cell_x[, cell_y], f, g`.
    pub fn trajectory(&mut self, name: &str, traj: &Trajectory) -> Result<()> {
        let grid = matches!(traj.lattice, Lattice::Grid { .. });
        let header: &[&str] = if grid { &["time", "cell_x", "cell_y", "f", "g"] } else { &["time", "cell_x", "f", "g"] };
        let mc = traj.n_cells();
        let rows = (0..traj.len()).flat_map(|k| {
            (0..mc).map(move |l| {
                let mut row = vec![traj.times[k].to_string()];
                if grid {
                    let (x, y) = traj.lattice.coords(l);
                    row.push(x.to_string());
                    row.push(y.to_string());
                } else {
                    row.push(l.to_string());
                }
                row.push(traj.f(k, l).to_string());
                row.push(traj.g(k, l).to_string());
                row
            })
        });
        self.csv(name, header, rows)
    }
}

/// Description of a finished run, written last as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Manifest<C, P> {
    pub program: String,
    pub version: String,
    pub kind: String,
    pub engine: String,
    pub seed: u64,
    pub params: P,
    pub config: C,
    pub files: Vec<ManifestFile>,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub created_unix: u64,
}
