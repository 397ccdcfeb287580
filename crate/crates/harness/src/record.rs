//! Run records: one JSON object per line, plus a `(t, gap, bound)` CSV mirror.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub seed: u64,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CallCounts {
    pub f: u64,
    pub x_phi: u64,
    pub y_phi: u64,
}

impl From<saddlekit::oracles::OracleStats> for CallCounts {
    fn from(s: saddlekit::oracles::OracleStats) -> Self {
        CallCounts { f: s.calls_f, x_phi: s.calls_x_phi, y_phi: s.calls_y_phi }
    }
}

impl CallCounts {
    pub fn total(&self) -> u64 {
        self.f + self.x_phi + self.y_phi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRow {
    pub t: usize,
    pub gap: Option<f64>,
    /// the bound the run is held to at `t` (`B_E`, or `B^det_R + B^var_R` for rescaled runs)
    pub bound: Option<f64>,
    pub calls: CallCounts,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRow {
    pub k: usize,
    pub radius: f64,
    pub horizon: usize,
    pub gap: Option<f64>,
    /// `μR_k²/16`
    pub target: f64,
    pub calls: CallCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub final_gap: Option<f64>,
    /// what `final_gap` is compared against
    pub target: Option<f64>,
    pub success: Option<bool>,
    pub iterations: usize,
    /// closed-form iteration bound, restarts only
    pub iteration_bound: Option<f64>,
    pub calls: CallCounts,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum Line {
    Header(Box<Header>),
    Checkpoint(CheckpointRow),
    Stage(StageRow),
    Summary(Summary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub header: Header,
    pub checkpoints: Vec<CheckpointRow>,
    pub stages: Vec<StageRow>,
    pub summary: Summary,
}

impl RunRecord {
    /// Copy with every wall-clock field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> RunRecord {
        let mut r = self.clone();
        for c in &mut r.checkpoints {
            c.wall_ms = 0.0;
        }
        r.summary.wall_ms = 0.0;
        r
    }

    pub fn to_jsonl(&self) -> String {
        let mut lines = vec![Line::Header(Box::new(self.header.clone()))];
        lines.extend(self.checkpoints.iter().cloned().map(Line::Checkpoint));
        lines.extend(self.stages.iter().cloned().map(Line::Stage));
        lines.push(Line::Summary(self.summary.clone()));
        let mut out = String::new();
        for l in &lines {
            out.push_str(&serde_json::to_string(l).expect("record line serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str, origin: &str) -> Result<RunRecord> {
        let perr = |i: usize, msg: String| HarnessError::Parse { path: origin.to_string(), msg: format!("line {}: {msg}", i + 1) };
        let (mut header, mut summary) = (None, None);
        let (mut checkpoints, mut stages) = (Vec::new(), Vec::new());
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Line>(raw).map_err(|e| perr(i, e.to_string()))? {
                Line::Header(h) if header.is_none() => header = Some(*h),
                Line::Summary(s) if summary.is_none() => summary = Some(s),
                Line::Checkpoint(c) => {
                    if checkpoints.last().is_some_and(|p: &CheckpointRow| p.t >= c.t) {
                        return Err(perr(i, "checkpoints must be strictly increasing in t".into()));
                    }
                    checkpoints.push(c)
                }
                Line::Stage(s) => stages.push(s),
                _ => return Err(perr(i, "duplicate header or summary".into())),
            }
        }
        let missing = |what: &str| HarnessError::Parse { path: origin.to_string(), msg: format!("no {what} line") };
        Ok(RunRecord { header: header.ok_or_else(|| missing("header"))?, checkpoints, stages, summary: summary.ok_or_else(|| missing("summary"))? })
    }

    pub fn read(path: &Path) -> Result<RunRecord> {
        let f = File::open(path).map_err(|e| HarnessError::io(path, e))?;
        let mut text = String::new();
        for line in BufReader::new(f).lines() {
            text.push_str(&line.map_err(|e| HarnessError::io(path, e))?);
            text.push('\n');
        }
        Self::from_jsonl(&text, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| HarnessError::io(path, e))
    }

    /// `t,gap,bound` rows; empty cells for missing values.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| HarnessError::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(f));
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let io = |e: csv::Error| HarnessError::io(path, std::io::Error::other(e));
        w.write_record(["t", "gap", "bound"]).map_err(io)?;
        for c in &self.checkpoints {
            w.write_record([c.t.to_string(), cell(c.gap), cell(c.bound)]).map_err(io)?;
        }
        w.flush().map_err(|e| HarnessError::io(path, e))?;
        Ok(())
    }

    /// `(t, gap)` pairs with a recorded gap.
    pub fn gap_series(&self) -> Vec<(f64, f64)> {
        self.checkpoints.iter().filter_map(|c| c.gap.map(|g| (c.t as f64, g))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub final_gap: Option<f64>,
    pub success: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub runs: Vec<SeedOutcome>,
    pub successes: usize,
    /// runs with a verdict
    pub judged: usize,
    pub success_fraction: Option<f64>,
}

impl ExperimentSummary {
    pub fn from_records(records: &[RunRecord]) -> Self {
        let runs: Vec<SeedOutcome> = records
            .iter()
            .map(|r| SeedOutcome { seed: r.header.seed, final_gap: r.summary.final_gap, success: r.summary.success })
            .collect();
        let judged = runs.iter().filter(|r| r.success.is_some()).count();
        let successes = runs.iter().filter(|r| r.success == Some(true)).count();
        let success_fraction = (judged > 0).then(|| successes as f64 / judged as f64);
        ExperimentSummary { runs, successes, judged, success_fraction }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| HarnessError::io(path, e))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| HarnessError::io(path, e.into()))?;
        w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| HarnessError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Parse { path: path.display().to_string(), msg: e.to_string() })
    }
}
