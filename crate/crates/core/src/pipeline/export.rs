//! Run export. Numbers use the shortest representation that parses back to
//! the same `f64`.

use serde::Serialize;

use crate::domain::RankingResult;

use super::store::{RunStore, StoreError};
use super::PipelineRun;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("results serialize");
    bytes.push(b'\n');
    bytes
}

pub const RANKING_CSV_HEADER: [&str; 5] = ["alternative", "s_plus", "s_minus", "score", "rank"];

/// One row per alternative, in rank order.
pub fn ranking_csv(ranking: &RankingResult) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(RANKING_CSV_HEADER)
        .expect("writing to memory");
    for a in ranking.by_rank() {
        writer
            .write_record([
                a.alternative.clone(),
                a.s_plus.to_string(),
                a.s_minus.to_string(),
                a.score.to_string(),
                a.rank.to_string(),
            ])
            .expect("writing to memory");
    }
    writer.into_inner().expect("flushing to memory")
}

pub fn render_run(run: &PipelineRun, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Json => to_json(run),
        ExportFormat::Csv => ranking_csv(&run.ranking),
    }
}

pub fn export_run(
    store: &RunStore,
    run_id: &str,
    format: ExportFormat,
) -> Result<Vec<u8>, StoreError> {
    Ok(render_run(&store.load(run_id)?, format))
}
