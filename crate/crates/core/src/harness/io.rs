//! Counts CSV and report rendering.
//!
//! Counts files have the header `job_id,k,successes,shots`, one row per
//! circuit or per pooled `k`; rows repeating a `(job_id, k)` pair are
//! pooled. Lines starting with `#` are comments, and a `# device: name`
//! comment labels the records.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::analysis::{AggregateReport, DriftScan, FLAG_SIGMAS};
use super::simulate::JobRecord;
use crate::error::{Error, Result};

pub const COUNTS_HEADER: [&str; 4] = ["job_id", "k", "successes", "shots"];

#[derive(Debug, Deserialize)]
struct CountRow {
    job_id: u64,
    k: usize,
    successes: u64,
    shots: u64,
}

/// Reads and validates a counts CSV file.
pub fn ingest_counts(path: impl AsRef<Path>) -> Result<Vec<JobRecord>> {
    read_counts(std::fs::File::open(path)?)
}

pub fn read_counts(mut reader: impl Read) -> Result<Vec<JobRecord>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let comment = |key: &str| {
        text.lines()
            .filter_map(|l| l.trim().strip_prefix('#'))
            .find_map(|l| l.trim().strip_prefix(key).map(|v| v.trim().to_string()))
    };
    let device = comment("device:").unwrap_or_else(|| "unknown".into());
    let seed = match comment("seed:") {
        Some(s) => Some(s.parse::<u64>().map_err(|_| Error::invalid(format!("bad seed comment '{s}'")))?),
        None => None,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header_line = rdr.position().line();
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse { line: header_line.max(1), message: e.to_string() })?
        .clone();
    if headers.iter().ne(COUNTS_HEADER) {
        return Err(Error::Parse {
            line: header_line.max(1),
            message: format!("expected header '{}', found '{}'", COUNTS_HEADER.join(","), headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut jobs: BTreeMap<u64, JobRecord> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Parse { line, message: e.to_string() }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: CountRow =
            record.deserialize(Some(&headers)).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if row.shots == 0 {
            return Err(Error::Parse { line, message: format!("job {} k={} has zero shots", row.job_id, row.k) });
        }
        if row.successes > row.shots {
            return Err(Error::Parse {
                line,
                message: format!("job {} k={}: {} successes exceed {} shots", row.job_id, row.k, row.successes, row.shots),
            });
        }
        jobs.entry(row.job_id)
            .or_insert_with(|| JobRecord { seed, ..JobRecord::new(row.job_id, device.clone()) })
            .add(row.k, row.successes, row.shots)?;
    }
    Ok(jobs.into_values().collect())
}

/// Writes records in the counts format, one row per `(job, k)`.
pub fn write_counts(mut out: impl Write, jobs: &[JobRecord]) -> Result<()> {
    if let Some(first) = jobs.first() {
        writeln!(out, "# device: {}", first.device)?;
        if let Some(seed) = first.seed {
            writeln!(out, "# seed: {seed}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COUNTS_HEADER)?;
    for job in jobs {
        for (k, c) in &job.counts {
            w.write_record(&[job.job_id.to_string(), k.to_string(), c.successes.to_string(), c.shots.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of the witness table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub device: String,
    pub witness: String,
    #[serde(rename = "F")]
    pub value: f64,
    #[serde(rename = "F_minus_dF")]
    pub corrected: f64,
    #[serde(rename = "sigma_F")]
    pub sigma: f64,
    #[serde(rename = "sigma_prime_F")]
    pub sigma_first_only: f64,
    pub significance: f64,
    pub flagged: bool,
}

pub fn report_rows(report: &AggregateReport) -> Vec<ReportRow> {
    report
        .witnesses
        .iter()
        .map(|w| ReportRow {
            device: report.device.clone(),
            witness: w.kind.label(),
            value: w.mean_value,
            corrected: w.corrected(),
            sigma: w.sigma,
            sigma_first_only: w.sigma_first_only,
            significance: w.significance(),
            flagged: w.flagged(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::invalid(format!("unknown report format '{other}' (table or csv)"))),
        }
    }
}

pub fn render_report(report: &AggregateReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Table => Ok(render_table(report)),
        ReportFormat::Csv => render_csv(report),
    }
}

/// Aligned text table. Rows with `|(F - dF) / sigma_F| > 5` are marked `*`.
pub fn render_table(report: &AggregateReport) -> String {
    let header = ["device", "witness", "F", "F-dF", "sigma_F", "sigma'_F", "(F-dF)/sigma_F"];
    let rows: Vec<[String; 7]> = report_rows(report)
        .into_iter()
        .map(|r| {
            [
                r.device,
                r.witness,
                format!("{:.3e}", r.value),
                format!("{:.3e}", r.corrected),
                format!("{:.3e}", r.sigma),
                format!("{:.3e}", r.sigma_first_only),
                format!("{:.2}{}", r.significance, if r.flagged { " *" } else { "" }),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &[&str], out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&header, &mut out);
    for row in &rows {
        line(&row.iter().map(String::as_str).collect::<Vec<_>>(), &mut out);
    }
    if report.witnesses.iter().any(|w| w.flagged()) {
        let _ = writeln!(out, "* |F-dF| exceeds {FLAG_SIGMAS} sigma_F");
    }
    out
}

/// Machine-readable form of [`render_table`] with full-precision values.
pub fn render_csv(report: &AggregateReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let rows = report_rows(report);
    if rows.is_empty() {
        w.write_record(["device", "witness", "F", "F_minus_dF", "sigma_F", "sigma_prime_F", "significance", "flagged"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

pub fn parse_report_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<ReportRow>, _>>()?)
}

/// Plot-ready drift columns.
pub fn render_drift_csv(scan: &DriftScan) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["job_id", "F", "dF", "F_minus_dF", "sigma_F", "rolling_mean", "rolling_sigma", "rolling_count"])?;
    for p in &scan.points {
        w.write_record(&[
            p.job_id.to_string(),
            p.value.to_string(),
            p.shift.to_string(),
            p.corrected.to_string(),
            p.sigma.to_string(),
            p.rolling_mean.to_string(),
            p.rolling_sigma.to_string(),
            p.rolling_count.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::analysis::analyze_jobs;
    use crate::harness::config::ExperimentConfig;
    use crate::harness::simulate::simulate_experiment;
    use crate::witnesses::WitnessKind;

    const TWO_JOBS: &str = "# device: bench\njob_id,k,successes,shots\n0,2,1,10\n0,3,5,10\n1,2,0,10\n1,3,6,10\n";

    #[test]
    fn well_formed_file() {
        let jobs = read_counts(TWO_JOBS.as_bytes()).unwrap();
        assert_eq!(jobs.len(), 2);
        assert_eq!(jobs[0].device, "bench");
        assert_eq!(jobs[1].counts[&3].successes, 6);
    }

    #[test]
    fn repeated_rows_pool() {
        let text = "job_id,k,successes,shots\n0,2,1,10\n0,2,4,10\n";
        let jobs = read_counts(text.as_bytes()).unwrap();
        assert_eq!(jobs[0].counts[&2].successes, 5);
        assert_eq!(jobs[0].counts[&2].shots, 20);
    }

    #[test]
    fn successes_above_shots_name_the_line() {
        let text = "job_id,k,successes,shots\n# circuit 1\n0,2,1,10\n0,3,11,10\n";
        match read_counts(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("11 successes"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_rows_and_headers() {
        assert!(matches!(read_counts("job,k,s,n\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        match read_counts("job_id,k,successes,shots\n0,2,1,10\n0,x,1,10\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gaps_are_accepted_then_rejected_by_analysis() {
        let text = "job_id,k,successes,shots\n0,2,1,10\n0,4,5,10\n";
        let jobs = read_counts(text.as_bytes()).unwrap();
        assert!(matches!(analyze_jobs(&jobs, &[WitnessKind::W(1)], 2), Err(Error::Coverage { .. })));
    }

    #[test]
    fn counts_round_trip() {
        let cfg = ExperimentConfig::from_json(r#"{"jobs": 3, "seed": 2, "device": "sim"}"#).unwrap();
        let jobs = simulate_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        write_counts(&mut buf, &jobs).unwrap();
        let back = read_counts(buf.as_slice()).unwrap();
        for (a, b) in jobs.iter().zip(&back) {
            assert_eq!((a.job_id, &a.counts, &a.device), (b.job_id, &b.counts, &b.device));
        }
    }

    #[test]
    fn report_csv_round_trip_and_empty_header() {
        let cfg = ExperimentConfig::from_json(r#"{"jobs": 4, "seed": 8, "noise": {"amplitude_damping": 0.001}}"#).unwrap();
        let jobs = simulate_experiment(&cfg).unwrap();
        let rep = analyze_jobs(&jobs, &WitnessKind::parse_list("w3,w4,f1,f2").unwrap(), 2).unwrap();
        let csv = render_csv(&rep).unwrap();
        assert_eq!(parse_report_csv(&csv).unwrap(), report_rows(&rep));
        let table = render_table(&rep);
        assert_eq!(table.lines().count(), 5 + usize::from(table.contains("exceeds")));

        let empty = analyze_jobs(&[], &[WitnessKind::F1], 2).unwrap();
        assert_eq!(render_csv(&empty).unwrap().lines().count(), 1);
        assert_eq!(render_table(&empty).lines().count(), 1);
    }
}
