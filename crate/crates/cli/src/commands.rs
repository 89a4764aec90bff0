use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rayon::prelude::*;
use voxelforge::analysis::{self, ChampionRecord, GainBounds, ReportRow};
use voxelforge::config::RunConfig;
use voxelforge::evolution::run_trial_with;
use voxelforge::genome::express;
use voxelforge::persist::{self, RunManifest};
use voxelforge::physics::simulate as run_simulation;
use voxelforge::{DevelopmentRule, Genome, SeededRng};

use crate::Kind;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration.
    Config(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Failed(msg) => f.write_str(msg),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn failed(context: impl fmt::Display, err: impl fmt::Display) -> CliError {
    CliError::Failed(format!("{context}: {err}"))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| failed(path.display(), e))
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let config: RunConfig = serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Config(format!("{}: {} (key `{}`)", path.display(), e.inner(), e.path())))?;
    config.validate().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(config)
}

pub fn load_genome(path: &Path) -> CliResult<Genome> {
    let text = read_text(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| failed(path.display(), format_args!("invalid genome at `{}`: {}", e.path(), e.inner())))
}

fn create_out_dir(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| failed(format_args!("cannot create output directory {}", out.display()), e))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Failed("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| failed("cannot start worker threads", e))?;
            Ok(pool.install(f))
        }
    }
}

pub fn evolve(config_path: &Path, seed: u64, out: &Path, jobs: Option<usize>) -> CliResult<()> {
    let config = load_config(config_path)?;
    create_out_dir(out)?;
    let started = persist::unix_time();
    let evolution = config.evolution(seed);
    let evaluator = evolution.evaluator();
    let trial = with_jobs(jobs, || {
        run_trial_with(&evolution, &evaluator, |record| {
            log::info!(
                "generation {}: best {:.4} (id {}, age {}), mean {:.4}",
                record.generation,
                record.best_fitness,
                record.best_id,
                record.best_age,
                record.mean_fitness
            );
        })
    })?
    .map_err(|e| failed("evolution failed", e))?;
    let manifest = persist::save_trial(out, &trial, &config, seed, started)
        .map_err(|e| failed(format_args!("cannot write results to {}", out.display()), e))?;
    println!(
        "champion {} fitness {} voxel lengths ({})",
        manifest.champion.id,
        manifest.champion.fitness,
        out.join(&manifest.champion.file).display()
    );
    Ok(())
}

pub fn simulate(genome_path: &Path, rule: DevelopmentRule, out: &Path, config_path: Option<&Path>) -> CliResult<()> {
    let config = match config_path {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let genome = load_genome(genome_path)?;
    create_out_dir(out)?;
    let phenotype = express(&genome, config.dims()).map_err(|e| failed(genome_path.display(), e))?;
    let result = run_simulation(&phenotype, &config.lattice(), rule).map_err(|e| failed("simulation failed", e))?;
    let write_err = |e| failed(format_args!("cannot write results to {}", out.display()), e);
    persist::write_trajectory(&out.join(persist::TRAJECTORY_FILE), &result.trajectory).map_err(write_err)?;
    persist::FinalState::of(&result).write(&out.join(persist::FINAL_STATE_FILE)).map_err(write_err)?;
    if result.unstable {
        println!("displacement: 0 voxel lengths (unstable)");
    } else {
        println!("displacement: {} voxel lengths", result.displacement_xy);
    }
    Ok(())
}

pub struct AnalyzeOptions {
    pub kind: Kind,
    pub samples: Option<usize>,
    pub resamples: Option<usize>,
    pub seed: u64,
    pub gain_bounds: GainBounds,
    pub jobs: Option<usize>,
}

struct Run {
    label: String,
    dir: PathBuf,
    manifest: RunManifest,
}

fn discover(root: &Path) -> CliResult<Vec<Run>> {
    let dirs = persist::find_runs(root).map_err(|e| failed(root.display(), e))?;
    dirs.into_iter()
        .map(|dir| {
            let manifest = RunManifest::read(&dir.join(persist::MANIFEST_FILE))
                .map_err(|e| failed(dir.join(persist::MANIFEST_FILE).display(), e))?;
            let name = match dir.strip_prefix(root) {
                Ok(rel) if !rel.as_os_str().is_empty() => rel.to_string_lossy().replace('\\', "/"),
                _ => dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into()),
            };
            Ok(Run { label: format!("{name}:{}", manifest.champion.id), dir, manifest })
        })
        .collect()
}

fn load_champion(run: &Run) -> CliResult<ChampionRecord> {
    let path = run.dir.join(&run.manifest.champion.file);
    let genome = load_genome(&path)?;
    let config = &run.manifest.config;
    ChampionRecord::load(
        run.label.clone(),
        genome,
        config.dims(),
        config.lattice(),
        config.development_rule,
        run.manifest.champion.fitness,
    )
    .map_err(|e| failed(path.display(), e))
}

pub fn analyze(root: &Path, out: &Path, options: &AnalyzeOptions) -> CliResult<()> {
    let runs = discover(root)?;
    let needed = match options.kind {
        Kind::Diversity | Kind::Compare => 2,
        Kind::Robustness | Kind::Canalization => 1,
    };
    if runs.len() < needed {
        return Err(CliError::Failed(format!(
            "{}: found {} champion(s) with a manifest, need at least {needed}",
            root.display(),
            runs.len()
        )));
    }
    create_out_dir(out)?;
    let first = &runs[0].manifest.config;
    let samples = options.samples.unwrap_or(first.robustness_samples);
    let resamples = options.resamples.unwrap_or(first.bootstrap_resamples);
    let mut rng = SeededRng::seed_from_u64(options.seed);

    let (rows, summary) = with_jobs(options.jobs, || -> CliResult<_> {
        if options.kind == Kind::Diversity {
            let dims = runs[0].manifest.config.lattice_dims;
            if let Some(run) = runs.iter().find(|r| r.manifest.config.lattice_dims != dims) {
                return Err(CliError::Failed(format!(
                    "{}: lattice dims {:?} differ from {:?}",
                    run.dir.display(),
                    run.manifest.config.lattice_dims,
                    dims
                )));
            }
        }
        let champions = runs.par_iter().map(load_champion).collect::<CliResult<Vec<_>>>()?;
        let groups: BTreeMap<String, String> =
            champions.iter().map(|c| (c.label.clone(), analysis::group_of(c))).collect();
        let analysis_err = |e| failed("analysis failed", e);
        let rows = match options.kind {
            Kind::Diversity => analysis::diversity_rows(&champions).map_err(analysis_err)?,
            Kind::Robustness => {
                let mut rows: Vec<ReportRow> = Vec::new();
                for champion in &champions {
                    if !(champion.train_fitness > 0.0) {
                        log::warn!("skipping {}: training fitness is 0", champion.label);
                        continue;
                    }
                    rows.extend(
                        analysis::robustness_rows(std::slice::from_ref(champion), samples, &mut rng)
                            .map_err(analysis_err)?,
                    );
                }
                if rows.is_empty() {
                    return Err(CliError::Failed("no champion has positive training fitness".into()));
                }
                rows
            }
            Kind::Canalization | Kind::Compare => {
                analysis::canalization_rows(&champions, options.gain_bounds).map_err(analysis_err)?
            }
        };
        let summary = match options.kind {
            Kind::Compare => analysis::compare(&rows, &groups, resamples, &mut rng).map_err(analysis_err)?,
            Kind::Diversity => analysis::summarize("diversity", &rows, &BTreeMap::new()),
            Kind::Robustness => analysis::summarize("robustness", &rows, &groups),
            Kind::Canalization => analysis::summarize("canalization", &rows, &groups),
        };
        Ok((rows, summary))
    })??;

    let write_err = |e| failed(format_args!("cannot write results to {}", out.display()), e);
    persist::write_report(&out.join(persist::REPORT_FILE), &rows).map_err(write_err)?;
    persist::write_summary(&out.join(persist::SUMMARY_FILE), &summary).map_err(write_err)?;
    for comparison in &summary.comparisons {
        println!(
            "{} {} vs {}: p = {:.4} {}",
            comparison.metric, comparison.group_a, comparison.group_b, comparison.corrected_p, comparison.significance
        );
    }
    println!("{} rows written to {}", rows.len(), out.join(persist::REPORT_FILE).display());
    Ok(())
}
