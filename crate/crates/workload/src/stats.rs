//! Per-request measurements and the order statistics reported against an
//! SLA. Live replay and the deployment simulator both emit the same record
//! type, so summaries and comparisons work uniformly.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("cannot summarize zero records")]
    Empty,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Timeout,
    Error,
}

/// One request as observed by the harness. Times are seconds from the start
/// of the run; `submit ≤ start ≤ end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub submit: f64,
    pub start: f64,
    pub end: f64,
    pub backend: String,
    pub outcome: Outcome,
    pub sla_violated: bool,
}

impl RequestRecord {
    /// Queueing delay before evaluation began.
    pub fn wait(&self) -> f64 {
        self.start - self.submit
    }

    /// Evaluation duration.
    pub fn compute(&self) -> f64 {
        self.end - self.start
    }

    /// End-to-end response time.
    pub fn total(&self) -> f64 {
        self.end - self.submit
    }
}

/// SLA bound on the end-to-end response time; violations are strict
/// (total > threshold).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlaConfig {
    pub threshold_secs: f64,
}

impl Default for SlaConfig {
    fn default() -> Self {
        SlaConfig { threshold_secs: 30.0 }
    }
}

/// Stamps SLA verdicts, and when `timeout` is set, clips requests that ran
/// longer: their end becomes the timeout instant and they are flagged.
pub fn stamp_records(records: &mut [RequestRecord], sla: &SlaConfig, timeout: Option<f64>) {
    for r in records.iter_mut() {
        if let Some(t) = timeout {
            if r.total() > t {
                r.end = r.submit + t;
                r.start = r.start.min(r.end);
                r.outcome = Outcome::Timeout;
            }
        }
        r.sla_violated = r.total() > sla.threshold_secs;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartet {
    pub max: f64,
    pub min: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub count: usize,
    pub total: Quartet,
    pub wait: Quartet,
    pub compute: Quartet,
    /// Requests whose total strictly exceeded the threshold.
    pub violations_total: usize,
    /// Whether the median total itself exceeds the threshold.
    pub violations_median: bool,
    pub sla_threshold_secs: f64,
}

/// Median convention: the lower middle element for even counts.
fn quartet(values: &mut [f64]) -> Quartet {
    values.sort_by(f64::total_cmp);
    Quartet {
        max: *values.last().unwrap(),
        min: values[0],
        median: values[(values.len() - 1) / 2],
    }
}

pub fn summarize(records: &[RequestRecord], sla: &SlaConfig) -> Result<StatSummary, StatsError> {
    if records.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut totals: Vec<f64> = records.iter().map(|r| r.total()).collect();
    let mut waits: Vec<f64> = records.iter().map(|r| r.wait()).collect();
    let mut computes: Vec<f64> = records.iter().map(|r| r.compute()).collect();
    let violations_total = totals.iter().filter(|t| **t > sla.threshold_secs).count();
    let total = quartet(&mut totals);
    Ok(StatSummary {
        count: records.len(),
        total,
        wait: quartet(&mut waits),
        compute: quartet(&mut computes),
        violations_total,
        violations_median: total.median > sla.threshold_secs,
        sla_threshold_secs: sla.threshold_secs,
    })
}

impl fmt::Display for StatSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "requests: {}", self.count)?;
        writeln!(f, "            max        min        median")?;
        for (label, q) in [
            ("total  ", &self.total),
            ("wait   ", &self.wait),
            ("compute", &self.compute),
        ] {
            writeln!(
                f,
                "{label}  {:>9.3}s {:>9.3}s {:>9.3}s",
                q.max, q.min, q.median
            )?;
        }
        write!(
            f,
            "SLA {}s: {} violations (median {})",
            self.sla_threshold_secs,
            self.violations_total,
            if self.violations_median { "VIOLATED" } else { "ok" }
        )
    }
}

pub fn write_records_csv(records: &[RequestRecord]) -> Result<String, StatsError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in records {
        writer.serialize(r)?;
    }
    let bytes = writer.into_inner().expect("vec writer");
    Ok(String::from_utf8(bytes).expect("csv is utf8"))
}

pub fn read_records_csv(text: &str) -> Result<Vec<RequestRecord>, StatsError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize::<RequestRecord>() {
        out.push(row?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(submit: f64, start: f64, end: f64) -> RequestRecord {
        RequestRecord {
            submit,
            start,
            end,
            backend: "test".into(),
            outcome: Outcome::Ok,
            sla_violated: false,
        }
    }

    #[test]
    fn summary_of_three_totals() {
        // totals 10, 20, 40 against a 30s SLA
        let records = vec![rec(0.0, 0.0, 10.0), rec(0.0, 5.0, 20.0), rec(0.0, 0.0, 40.0)];
        let s = summarize(&records, &SlaConfig::default()).unwrap();
        assert_eq!(s.count, 3);
        assert_eq!(s.total.median, 20.0);
        assert_eq!(s.total.max, 40.0);
        assert_eq!(s.total.min, 10.0);
        assert_eq!(s.violations_total, 1);
        assert!(!s.violations_median);
    }

    #[test]
    fn boundary_totals_do_not_violate() {
        let records = vec![rec(0.0, 1.0, 30.0), rec(0.0, 2.0, 30.0)];
        let s = summarize(&records, &SlaConfig::default()).unwrap();
        assert_eq!(s.violations_total, 0);
        assert!(!s.violations_median);
    }

    #[test]
    fn single_record_collapses_the_quartet() {
        let records = vec![rec(1.0, 2.0, 4.0)];
        let s = summarize(&records, &SlaConfig::default()).unwrap();
        assert_eq!(s.total.max, 3.0);
        assert_eq!(s.total.min, 3.0);
        assert_eq!(s.total.median, 3.0);
        assert_eq!(s.wait.median, 1.0);
        assert_eq!(s.compute.median, 2.0);
    }

    #[test]
    fn even_count_takes_lower_middle() {
        let records = vec![
            rec(0.0, 0.0, 1.0),
            rec(0.0, 0.0, 2.0),
            rec(0.0, 0.0, 3.0),
            rec(0.0, 0.0, 4.0),
        ];
        let s = summarize(&records, &SlaConfig::default()).unwrap();
        assert_eq!(s.total.median, 2.0);
    }

    #[test]
    fn empty_refused() {
        assert!(matches!(
            summarize(&[], &SlaConfig::default()),
            Err(StatsError::Empty)
        ));
    }

    #[test]
    fn stamping_clips_timeouts_and_marks_sla() {
        let mut records = vec![rec(10.0, 20.0, 200.0), rec(0.0, 0.0, 5.0)];
        stamp_records(&mut records, &SlaConfig::default(), Some(120.0));
        assert_eq!(records[0].outcome, Outcome::Timeout);
        assert_eq!(records[0].end, 130.0);
        assert!(records[0].sla_violated);
        assert_eq!(records[1].outcome, Outcome::Ok);
        assert!(!records[1].sla_violated);
    }

    #[test]
    fn records_csv_roundtrip() {
        let records = vec![rec(0.0, 1.0, 2.0), rec(3.0, 4.5, 9.25)];
        let text = write_records_csv(&records).unwrap();
        assert_eq!(read_records_csv(&text).unwrap(), records);
    }
}
