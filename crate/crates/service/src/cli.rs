//! Command-line front-end.

use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mcdm_core::pipeline::io::{self, PathList, PipelineConfig, Sourced};
use mcdm_core::pipeline::store::RunStore;
use mcdm_core::pipeline::{
    load_run_inputs, run_and_persist, PipelineInputs, RunOptions, WeightSource,
};
use mcdm_core::tco::segment_averages;
use mcdm_core::{canonical_criteria, CriterionSet, Stage, WeightVector};

use crate::api::{self, AppState};
use crate::error::{ErrorClass, ServiceError};
use crate::ops;
use crate::report::{Format, Render, TcoReport};

pub const DEFAULT_STORE: &str = "mcdm-store";

#[derive(Debug, Parser)]
#[command(
    name = "mcdm",
    version,
    about = "Best-worst weighting and TOPSIS ranking of vehicle options"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve every survey and print the aggregated weights.
    Weights {
        /// A survey file or a directory of `*.json` surveys.
        surveys: PathBuf,
        #[arg(long)]
        criteria: PathBuf,
    },
    /// Rank the alternatives of a decision matrix.
    Rank {
        #[arg(long)]
        matrix: PathBuf,
        /// A weights file, or `from-surveys` together with `--surveys`.
        /// Optional for weighted-stage matrices.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        surveys: Option<PathBuf>,
        /// Defaults to the seven built-in vehicle criteria.
        #[arg(long)]
        criteria: Option<PathBuf>,
        /// Required for CSV matrices.
        #[arg(long, value_parser = parse_stage)]
        stage: Option<Stage>,
    },
    /// Run the full pipeline from a config file and persist the run.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        /// Run store directory; falls back to the config's `store`, then `mcdm-store`.
        #[arg(long, env = "MCDM_STORE")]
        store: Option<PathBuf>,
    },
    /// Average total cost of ownership per segment and powertrain.
    Tco {
        #[arg(long)]
        fleet: PathBuf,
    },
    /// Re-rank a stored run with one criterion's weight shifted.
    Sensitivity {
        #[arg(long)]
        run: String,
        #[arg(long)]
        criterion: String,
        /// Comma-separated signed weight shifts, e.g. `-0.1,0,0.05`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        deltas: Vec<f64>,
        /// Also search for the smallest shift that changes the top alternative.
        #[arg(long, value_parser = ["down", "up"])]
        threshold: Option<String>,
        #[arg(long, env = "MCDM_STORE", default_value = DEFAULT_STORE)]
        store: PathBuf,
    },
    /// Print a stored run.
    Export {
        #[arg(long)]
        run: String,
        #[arg(long, env = "MCDM_STORE", default_value = DEFAULT_STORE)]
        store: PathBuf,
    },
    /// Start the HTTP API.
    Serve {
        #[arg(long, env = "MCDM_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        /// Enables `POST /sessions/{id}/snapshot`.
        #[arg(long)]
        store: Option<PathBuf>,
    },
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse()
}

fn criteria_or_default(path: Option<&Path>) -> Result<CriterionSet, ServiceError> {
    match path {
        Some(p) => Ok(io::load_criteria(p)?),
        None => Ok(canonical_criteria()),
    }
}

/// `path` relative to `base` where possible, so run documents do not depend
/// on the directory the command ran from.
fn relative(base: &Path, path: &Path) -> String {
    path.strip_prefix(base)
        .unwrap_or(path)
        .display()
        .to_string()
}

fn open_store(path: &Path) -> Result<RunStore, ServiceError> {
    Ok(RunStore::open(path)?)
}

fn usage(message: impl Into<String>) -> ServiceError {
    ServiceError::new(
        ErrorClass::BadInput,
        "UsageError",
        message,
        serde_json::Value::Null,
    )
}

/// Runs one non-serving command and returns what it prints.
pub fn execute(command: Command, format: Format) -> Result<Vec<u8>, ServiceError> {
    match command {
        Command::Weights { surveys, criteria } => {
            let criteria = io::load_criteria(&criteria)?;
            let surveys = io::load_surveys(&surveys, &criteria)?;
            Ok(ops::weights_report(&criteria, &surveys)?.render(format))
        }
        Command::Rank {
            matrix,
            weights,
            surveys,
            criteria,
            stage,
        } => {
            let criteria = criteria_or_default(criteria.as_deref())?;
            let matrix = io::load_matrix(&matrix, &criteria, stage)?;
            let weights: Option<WeightVector> = match weights.as_deref() {
                None => None,
                Some("from-surveys") => {
                    let dir = surveys.ok_or_else(|| {
                        usage("`--weights from-surveys` needs `--surveys <path>`")
                    })?;
                    let surveys = io::load_surveys(&dir, &criteria)?;
                    let report = ops::weights_report(&criteria, &surveys)?;
                    Some(WeightVector::new(
                        report.weights,
                        report.xi_star,
                        report.consistency_ratio,
                    )?)
                }
                Some(file) => Some(io::load_weights(Path::new(file))?),
            };
            Ok(ops::rank(&matrix, weights.as_ref())?.render(format))
        }
        Command::Pipeline { config, store } => {
            let (config, base) = PipelineConfig::load(&config)?;
            let store = store
                .or_else(|| config.store.as_ref().map(|s| base.join(s)))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_STORE));
            let criteria_path = base.join(&config.criteria);
            let criteria = io::load_criteria(&criteria_path)?;
            let weights = match (&config.surveys, &config.weights) {
                (Some(list), _) => {
                    let paths = match list {
                        PathList::One(p) => vec![p.clone()],
                        PathList::Many(ps) => ps.clone(),
                    };
                    let mut all = Vec::new();
                    for p in paths {
                        for mut survey in io::load_surveys(&base.join(p), &criteria)? {
                            survey.source = relative(&base, Path::new(&survey.source));
                            all.push(survey);
                        }
                    }
                    WeightSource::Surveys(all)
                }
                (None, Some(w)) => {
                    let path = base.join(w);
                    WeightSource::Fixed(Sourced {
                        value: io::load_weights(&path)?,
                        source: relative(&base, &path),
                    })
                }
                (None, None) => unreachable!("config loader requires one weight source"),
            };
            let matrix_path = base.join(&config.matrix);
            let inputs = PipelineInputs {
                matrix: Sourced {
                    value: io::load_matrix(&matrix_path, &criteria, config.stage)?,
                    source: relative(&base, &matrix_path),
                },
                criteria: Sourced {
                    source: relative(&base, &criteria_path),
                    value: criteria,
                },
                weights,
            };
            let options = RunOptions {
                created_at: config.created_at,
            };
            let run = run_and_persist(&inputs, &options, &open_store(&store)?)?;
            Ok(run.render(format))
        }
        Command::Tco { fleet } => {
            let fleet = io::load_fleet(&fleet)?;
            Ok(TcoReport(segment_averages(&fleet)?).render(format))
        }
        Command::Sensitivity {
            run,
            criterion,
            deltas,
            threshold,
            store,
        } => {
            let store = open_store(&store)?;
            let run = store.load(&run)?;
            let stored = load_run_inputs(&store, &run)?;
            let direction = threshold.as_deref().map(ops::parse_direction).transpose()?;
            let response = ops::sensitivity(
                &stored.matrix,
                Some(&stored.weights),
                &criterion,
                &deltas,
                direction,
            )?;
            Ok(response.render(format))
        }
        Command::Export { run, store } => Ok(open_store(&store)?.load(&run)?.render(format)),
        Command::Serve { .. } => Err(ServiceError::internal("serve is not a batch command")),
    }
}

/// Binds and serves until interrupted.
pub fn serve(port: u16, bind: IpAddr, store: Option<PathBuf>) -> Result<(), ServiceError> {
    let store = store.as_deref().map(open_store).transpose()?;
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| ServiceError::internal(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async move {
        let addr = SocketAddr::new(bind, port);
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| {
            ServiceError::new(
                ErrorClass::BadInput,
                "BindFailed",
                format!("cannot listen on {addr}: {e}"),
                serde_json::Value::Null,
            )
        })?;
        eprintln!(
            "listening on http://{}",
            listener.local_addr().unwrap_or(addr)
        );
        api::serve(listener, AppState::new(store))
            .await
            .map_err(|e| ServiceError::internal(e.to_string()))
    })
}
