//! On-disk formats: run logs, champion genomes, manifests, trajectories,
//! final-state exports and analysis reports. Every writer has a matching
//! reader.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::analysis::{ReportRow, Summary};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evolution::{GenerationRecord, Trial};
use crate::genome::{Genome, GenomeId};
use crate::physics::{FinalVoxelState, SimResult, TrajectorySample};

pub const LOG_FILE: &str = "log.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const FINAL_STATE_FILE: &str = "final_state.json";
pub const REPORT_FILE: &str = "report.csv";
pub const SUMMARY_FILE: &str = "summary.json";

const LOG_HEADER: [&str; 6] = ["generation", "best_fitness", "mean_fitness", "median_fitness", "best_age", "best_id"];
const TRAJECTORY_HEADER: [&str; 4] = ["t", "com_x", "com_y", "com_z"];

pub fn champion_file_name(generation: usize, id: GenomeId) -> String {
    format!("gen{generation}_id{id}.json")
}

/// Seconds since the Unix epoch.
pub fn unix_time() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn check_header(reader: &mut csv::Reader<fs::File>, expected: &[&str], path: &Path) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::InvalidInput(format!(
            "{}: expected header `{}`, found `{}`",
            path.display(),
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::WriterBuilder::new().has_headers(false).from_path(path)?)
}

pub fn write_log(path: &Path, records: &[GenerationRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(LOG_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_log(path: &Path) -> Result<Vec<GenerationRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    check_header(&mut reader, &LOG_HEADER, path)?;
    Ok(reader.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_genome(path: &Path, genome: &Genome) -> Result<()> {
    fs::write(path, genome.to_json() + "\n")?;
    Ok(())
}

pub fn read_genome(path: &Path) -> Result<Genome> {
    Genome::from_json(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChampionEntry {
    pub file: String,
    pub id: GenomeId,
    pub generation: usize,
    pub fitness: f64,
}

/// Everything needed to reproduce a run: configuration, seed and the files
/// the run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub log: String,
    /// Best-ever individual at the end of the run.
    pub champion: ChampionEntry,
    /// Champion snapshots in generation order; the last is `champion`.
    pub snapshots: Vec<ChampionEntry>,
    pub started_unix: f64,
    pub finished_unix: f64,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Writes the log, every champion snapshot and the manifest of a finished
/// trial into `out_dir`, creating it if needed.
pub fn save_trial(out_dir: &Path, trial: &Trial, config: &RunConfig, seed: u64, started_unix: f64) -> Result<RunManifest> {
    fs::create_dir_all(out_dir)?;
    write_log(&out_dir.join(LOG_FILE), &trial.log.generations)?;
    let mut snapshots = Vec::with_capacity(trial.log.snapshots.len());
    for snap in &trial.log.snapshots {
        let file = champion_file_name(snap.generation, snap.champion.genome.id);
        write_genome(&out_dir.join(&file), &snap.champion.genome)?;
        snapshots.push(ChampionEntry {
            file,
            id: snap.champion.genome.id,
            generation: snap.generation,
            fitness: snap.champion.fitness,
        });
    }
    let champion = snapshots.last().cloned().ok_or_else(|| Error::InvalidInput("trial has no snapshots".into()))?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config: config.clone(),
        log: LOG_FILE.to_string(),
        champion,
        snapshots,
        started_unix,
        finished_unix: unix_time(),
    };
    manifest.write(&out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

/// Formats `v` with six significant digits, without trailing zeros.
pub fn six_significant(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("scientific notation parses");
    format!("{rounded}")
}

pub fn write_trajectory(path: &Path, samples: &[TrajectorySample]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TRAJECTORY_HEADER)?;
    for s in samples {
        w.write_record([
            six_significant(s.t),
            six_significant(s.com[0]),
            six_significant(s.com[1]),
            six_significant(s.com[2]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectorySample>> {
    let mut reader = csv::Reader::from_path(path)?;
    check_header(&mut reader, &TRAJECTORY_HEADER, path)?;
    reader
        .deserialize::<(f64, f64, f64, f64)>()
        .map(|row| {
            let (t, x, y, z) = row?;
            Ok(TrajectorySample { t, com: [x, y, z] })
        })
        .collect()
}

/// Final-state export of a single simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    pub displacement_xy: f64,
    pub unstable: bool,
    pub voxels: Vec<FinalVoxelState>,
}

impl FinalState {
    pub fn of(result: &SimResult) -> Self {
        FinalState { displacement_xy: result.displacement_xy, unstable: result.unstable, voxels: result.final_voxels() }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

pub fn write_report(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["champion_id", "metric", "value"])?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    check_header(&mut reader, &["champion_id", "metric", "value"], path)?;
    Ok(reader.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Directories under `root` (including `root` itself) that hold a run
/// manifest, in sorted path order.
pub fn find_runs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        if dir.join(MANIFEST_FILE).is_file() {
            found.push(dir.clone());
        }
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}
