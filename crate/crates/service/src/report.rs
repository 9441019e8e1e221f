//! Result payloads shared by the CLI and the HTTP API, and their renderings.
//! JSON output is the exact body the API returns.

use mcdm_core::pipeline::export::{ranking_csv, to_json};
use mcdm_core::pipeline::sensitivity::{FlipThreshold, SensitivityReport};
use mcdm_core::pipeline::{PipelineRun, RespondentWeights};
use mcdm_core::tco::SegmentTco;
use mcdm_core::{ConsistencyRatio, RankingResult};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

/// Aggregated weights with each respondent's solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsReport {
    pub criteria: Vec<String>,
    pub weights: Vec<f64>,
    pub xi_star: f64,
    pub consistency_ratio: ConsistencyRatio,
    pub respondents: Vec<RespondentWeights>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResponse {
    #[serde(flatten)]
    pub report: SensitivityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Threshold>,
}

/// Outcome of a flip-threshold search in one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub direction: String,
    /// `None` when the top alternative holds over the whole admissible range.
    pub flip: Option<FlipThreshold>,
}

pub trait Render: Serialize + Sized {
    fn csv(&self) -> Vec<u8>;
    fn table(&self) -> String;

    fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => self.csv(),
            Format::Table => self.table().into_bytes(),
        }
    }
}

fn fixed(x: f64) -> String {
    format!("{x:.4}")
}

/// Left-aligned first column, right-aligned others.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let mut out = String::new();
        for (k, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if k == 0 {
                out.push_str(&format!("{cell:<w$}"));
            } else {
                out.push_str(&format!("  {cell:>w$}"));
            }
        }
        out.trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(rule.iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn csv_bytes(headers: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

impl Render for WeightsReport {
    fn csv(&self) -> Vec<u8> {
        let mut headers = vec![
            "respondent".to_string(),
            "xi_star".into(),
            "consistency_ratio".into(),
        ];
        headers.extend(self.criteria.iter().cloned());
        let mut rows: Vec<Vec<String>> = self
            .respondents
            .iter()
            .map(|r| {
                let mut row = vec![
                    r.respondent.clone(),
                    r.xi_star.to_string(),
                    cr_exact(r.consistency_ratio),
                ];
                row.extend(r.weights.iter().map(f64::to_string));
                row
            })
            .collect();
        let mut total = vec![
            "aggregate".to_string(),
            self.xi_star.to_string(),
            cr_exact(self.consistency_ratio),
        ];
        total.extend(self.weights.iter().map(f64::to_string));
        rows.push(total);
        csv_bytes(&headers, &rows)
    }

    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .criteria
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| vec![c.clone(), format!("{w:.6}")])
            .collect();
        let mut out = table(&["criterion", "weight"], &rows);
        out.push('\n');
        let rows: Vec<Vec<String>> = self
            .respondents
            .iter()
            .map(|r| {
                vec![
                    r.respondent.clone(),
                    fixed(r.xi_star),
                    cr_cell(r.consistency_ratio),
                ]
            })
            .collect();
        out.push_str(&table(&["respondent", "xi*", "CR"], &rows));
        out
    }
}

fn cr_exact(cr: ConsistencyRatio) -> String {
    if cr.is_inconsistent() {
        "inconsistent".into()
    } else {
        cr.value().to_string()
    }
}

fn cr_cell(cr: ConsistencyRatio) -> String {
    if cr.is_inconsistent() {
        "inconsistent".into()
    } else {
        fixed(cr.value())
    }
}

fn ranking_rows(ranking: &RankingResult) -> Vec<Vec<String>> {
    ranking
        .by_rank()
        .into_iter()
        .map(|a| {
            let rank = if a.tie {
                format!("{}=", a.rank)
            } else {
                a.rank.to_string()
            };
            vec![
                a.alternative.clone(),
                fixed(a.s_plus),
                fixed(a.s_minus),
                fixed(a.score),
                rank,
            ]
        })
        .collect()
}

const RANKING_HEADERS: [&str; 5] = ["alternative", "S+", "S-", "score", "rank"];

impl Render for RankingResult {
    fn csv(&self) -> Vec<u8> {
        ranking_csv(self)
    }

    fn table(&self) -> String {
        table(&RANKING_HEADERS, &ranking_rows(self))
    }
}

impl Render for PipelineRun {
    fn csv(&self) -> Vec<u8> {
        ranking_csv(&self.ranking)
    }

    fn table(&self) -> String {
        let mut out = format!(
            "run {}  ({} stage, {})\n\n",
            self.run_id, self.stage, self.created_at
        );
        let rows: Vec<Vec<String>> = self
            .criteria
            .iter()
            .zip(&self.weights.weights)
            .map(|(c, w)| vec![c.clone(), format!("{w:.6}")])
            .collect();
        out.push_str(&table(&["criterion", "weight"], &rows));
        out.push('\n');
        out.push_str(&self.ranking.table());
        out
    }
}

impl Render for SensitivityResponse {
    fn csv(&self) -> Vec<u8> {
        let headers: Vec<String> = ["delta", "alternative", "score", "rank", "flipped"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for e in &self.report.entries {
            for a in e.reranking.by_rank() {
                rows.push(vec![
                    e.delta.to_string(),
                    a.alternative.clone(),
                    a.score.to_string(),
                    a.rank.to_string(),
                    e.flipped.to_string(),
                ]);
            }
        }
        csv_bytes(&headers, &rows)
    }

    fn table(&self) -> String {
        let mut out = format!("criterion {}\n", self.report.criterion);
        for e in &self.report.entries {
            let top = e
                .reranking
                .top()
                .map(|a| a.alternative.as_str())
                .unwrap_or("");
            out.push_str(&format!(
                "\ndelta {:+}  top {}{}\n",
                e.delta,
                top,
                if e.flipped { "  (changed)" } else { "" }
            ));
            out.push_str(&table(&RANKING_HEADERS, &ranking_rows(&e.reranking)));
        }
        if let Some(t) = &self.threshold {
            out.push('\n');
            match &t.flip {
                Some(f) => out.push_str(&format!(
                    "threshold ({}): delta {:+.9}, {} -> {}\n",
                    t.direction, f.delta, f.base_top, f.new_top
                )),
                None => out.push_str(&format!(
                    "threshold ({}): top alternative never changes\n",
                    t.direction
                )),
            }
        }
        out
    }
}

/// Per-segment TCO averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TcoReport(pub Vec<SegmentTco>);

impl Render for TcoReport {
    fn csv(&self) -> Vec<u8> {
        let headers: Vec<String> = ["segment", "powertrain", "vehicles", "average_tco"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let rows: Vec<Vec<String>> = self
            .0
            .iter()
            .map(|s| {
                vec![
                    s.segment.clone(),
                    s.powertrain.to_string(),
                    s.vehicles.to_string(),
                    s.average_tco.to_string(),
                ]
            })
            .collect();
        csv_bytes(&headers, &rows)
    }

    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .0
            .iter()
            .map(|s| {
                vec![
                    s.segment.clone(),
                    s.powertrain.to_string(),
                    s.vehicles.to_string(),
                    format!("{:.2}", s.average_tco),
                ]
            })
            .collect();
        table(&["segment", "powertrain", "vehicles", "average TCO"], &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_alignment() {
        let t = table(
            &["name", "value"],
            &[
                vec!["a".into(), "1.0000".into()],
                vec!["longer".into(), "12.5000".into()],
            ],
        );
        assert_eq!(
            t,
            "name      value\n------  -------\na        1.0000\nlonger  12.5000\n"
        );
    }
}
