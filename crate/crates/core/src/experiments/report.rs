use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ComparisonRecord, ComparisonSummary, ExperimentError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const CSV_COLUMNS: [&str; 9] = [
    "benchmark",
    "fidelity_par",
    "fidelity_xtalk",
    "depth_par",
    "depth_xtalk",
    "makespan_par_ns",
    "makespan_xtalk_ns",
    "omega",
    "threshold",
];

pub fn comparison_csv(records: &[ComparisonRecord]) -> Result<String, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::EmptyReport);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record([
            r.benchmark.clone(),
            r.fidelity_par.to_string(),
            r.fidelity_xtalk.to_string(),
            r.depth_par.to_string(),
            r.depth_xtalk.to_string(),
            r.makespan_par_ns.to_string(),
            r.makespan_xtalk_ns.to_string(),
            r.omega.to_string(),
            r.threshold.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct JsonReport<'a> {
    records: &'a [ComparisonRecord],
    summary: ComparisonSummary,
}

pub fn comparison_json(records: &[ComparisonRecord]) -> Result<String, ExperimentError> {
    let summary = ComparisonSummary::of(records).ok_or(ExperimentError::EmptyReport)?;
    Ok(serde_json::to_string_pretty(&JsonReport { records, summary }).expect("report serializes"))
}

/// Writes `comparison.csv` or `comparison.json` into `dir` and returns the
/// file path.
pub fn emit_report(records: &[ComparisonRecord], format: ReportFormat, dir: &Path) -> Result<PathBuf, ExperimentError> {
    let (name, body) = match format {
        ReportFormat::Csv => ("comparison.csv", comparison_csv(records)?),
        ReportFormat::Json => ("comparison.json", comparison_json(records)?),
    };
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| ExperimentError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::ScheduleCost;

    fn record() -> ComparisonRecord {
        let cost = ScheduleCost {
            crosstalk_term: 0.1,
            decoherence_term: 0.2,
            omega: 0.5,
            total: 0.15,
        };
        ComparisonRecord {
            benchmark: "bell2".into(),
            metric: "classical_fidelity".into(),
            fidelity_par: 0.9,
            fidelity_xtalk: 0.95,
            depth_par: 3,
            depth_xtalk: 4,
            makespan_par_ns: 1336,
            makespan_xtalk_ns: 1636,
            omega: 0.5,
            threshold: 2.0,
            cost_par: cost,
            cost_xtalk: cost,
        }
    }

    #[test]
    fn csv_layout() {
        let csv = comparison_csv(&[record()]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        assert_eq!(lines[1], "bell2,0.9,0.95,3,4,1336,1636,0.5,2");
    }

    #[test]
    fn empty_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            emit_report(&[], ReportFormat::Csv, dir.path()),
            Err(ExperimentError::EmptyReport)
        ));
        assert!(matches!(comparison_json(&[]), Err(ExperimentError::EmptyReport)));
    }

    #[test]
    fn files_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        for format in [ReportFormat::Csv, ReportFormat::Json] {
            let p = emit_report(&[record()], format, dir.path()).unwrap();
            let first = std::fs::read(&p).unwrap();
            emit_report(&[record()], format, dir.path()).unwrap();
            assert_eq!(first, std::fs::read(&p).unwrap());
        }
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("comparison.json")).unwrap()).unwrap();
        assert_eq!(json["records"][0]["metric"], "classical_fidelity");
    }
}
