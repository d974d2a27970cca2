use serde::{Deserialize, Serialize};

use super::simulate::{JobProbabilities, JobRecord};
use crate::error::{Error, Result};
use crate::statistics::{empirical_probs, error_report, ErrorReport};
use crate::tolerances::IDEAL_NULL;
use crate::witnesses::{evaluate, WitnessKind};

/// Significance above which a report row is flagged.
pub const FLAG_SIGMAS: f64 = 5.0;

/// Default rolling-mean window of [`drift_scan`].
pub const DEFAULT_WINDOW: usize = 20;

/// How per-job variances are combined into the variance of the mean.
pub const AGGREGATION_NOTE: &str = "variance of mean = sum_j sigma_j^2 / J^2";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JobWitness {
    pub job_id: u64,
    pub report: ErrorReport,
}

/// One witness aggregated over jobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub kind: WitnessKind,
    pub mean_value: f64,
    pub mean_shift: f64,
    /// Error of the mean with first- and second-order variance.
    pub sigma: f64,
    /// Error of the mean from the first-order variance only.
    pub sigma_first_only: f64,
    pub per_job: Vec<JobWitness>,
}

impl WitnessSummary {
    fn from_jobs(kind: WitnessKind, per_job: Vec<JobWitness>) -> Self {
        let j = per_job.len() as f64;
        let mean = |f: fn(&ErrorReport) -> f64| per_job.iter().map(|r| f(&r.report)).sum::<f64>() / j;
        let mean_value = mean(|r| r.value);
        let mean_shift = mean(|r| r.shift);
        let var = per_job.iter().map(|r| r.report.sigma.powi(2)).sum::<f64>() / (j * j);
        let var_first = per_job.iter().map(|r| r.report.sigma_first_only.powi(2)).sum::<f64>() / (j * j);
        Self { kind, mean_value, mean_shift, sigma: var.sqrt(), sigma_first_only: var_first.sqrt(), per_job }
    }

    /// `F - Delta F`.
    pub fn corrected(&self) -> f64 {
        self.mean_value - self.mean_shift
    }

    /// `(F - Delta F) / sigma_F`. With `sigma_F = 0` (exact probabilities)
    /// a value within roundoff of zero counts as 0, anything else as
    /// infinitely significant.
    pub fn significance(&self) -> f64 {
        significance(self.corrected(), self.sigma)
    }

    pub fn flagged(&self) -> bool {
        self.significance().abs() > FLAG_SIGMAS
    }
}

fn significance(value: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        value / sigma
    } else if value.abs() <= IDEAL_NULL {
        0.0
    } else {
        value.signum() * f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub device: String,
    pub jobs: usize,
    pub offset: usize,
    pub aggregation: String,
    pub witnesses: Vec<WitnessSummary>,
}

fn coverage_error(job: u64, kind: WitnessKind, missing: Vec<usize>) -> Error {
    Error::Coverage { context: format!("job {job}, witness {kind}"), missing }
}

/// Per-job witnesses from pooled counts and their aggregate over jobs.
pub fn analyze_jobs(jobs: &[JobRecord], kinds: &[WitnessKind], offset: usize) -> Result<AggregateReport> {
    let device = jobs.first().map(|j| j.device.clone()).unwrap_or_default();
    let mut witnesses = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let len = kind.required_length();
        let per_job = jobs
            .iter()
            .map(|job| {
                let counts = job.indexed_counts(offset, len).map_err(|m| coverage_error(job.job_id, kind, m))?;
                let p = empirical_probs(&counts)?;
                Ok(JobWitness { job_id: job.job_id, report: error_report(kind, &p, counts.shots())? })
            })
            .collect::<Result<Vec<_>>>()?;
        if !per_job.is_empty() {
            witnesses.push(WitnessSummary::from_jobs(kind, per_job));
        }
    }
    Ok(AggregateReport { device, jobs: jobs.len(), offset, aggregation: AGGREGATION_NOTE.into(), witnesses })
}

/// [`analyze_jobs`] for exactly known probabilities: all error columns 0.
pub fn analyze_exact(
    jobs: &[JobProbabilities],
    kinds: &[WitnessKind],
    offset: usize,
    device: &str,
) -> Result<AggregateReport> {
    let mut witnesses = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let per_job = jobs
            .iter()
            .map(|job| {
                let p = job
                    .indexed(offset, kind.required_length())
                    .map_err(|m| coverage_error(job.job_id, kind, m))?;
                Ok(JobWitness { job_id: job.job_id, report: ErrorReport::exact(evaluate(kind, &p)?) })
            })
            .collect::<Result<Vec<_>>>()?;
        if !per_job.is_empty() {
            witnesses.push(WitnessSummary::from_jobs(kind, per_job));
        }
    }
    Ok(AggregateReport {
        device: device.into(),
        jobs: jobs.len(),
        offset,
        aggregation: AGGREGATION_NOTE.into(),
        witnesses,
    })
}

/// One job in a drift scan. The rolling columns cover the trailing
/// `window` jobs (fewer at the start of the series).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftPoint {
    pub job_id: u64,
    pub value: f64,
    pub shift: f64,
    pub corrected: f64,
    pub sigma: f64,
    pub rolling_mean: f64,
    pub rolling_sigma: f64,
    pub rolling_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftScan {
    pub kind: WitnessKind,
    pub window: usize,
    pub points: Vec<DriftPoint>,
    /// Weighted least-squares slope of `F - Delta F` against job order.
    pub slope: f64,
    pub slope_sigma: f64,
    /// `slope / slope_sigma`.
    pub significance: f64,
}

impl DriftScan {
    pub fn flagged(&self) -> bool {
        self.significance.abs() >= FLAG_SIGMAS
    }

    /// Weighted mean of all corrected values.
    pub fn overall_mean(&self) -> f64 {
        let (num, den) = self.points.iter().fold((0.0, 0.0), |(n, d), p| {
            let w = if p.sigma > 0.0 { p.sigma.powi(-2) } else { 1.0 };
            (n + w * p.corrected, d + w)
        });
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Fraction of full windows whose rolling mean lies within
    /// `n_sigma * rolling_sigma` of the overall mean (all windows when the
    /// series is shorter than one window).
    pub fn fraction_within_band(&self, n_sigma: f64) -> f64 {
        let full: Vec<&DriftPoint> = self.points.iter().filter(|p| p.rolling_count == self.window).collect();
        let pts: Vec<&DriftPoint> = if full.is_empty() { self.points.iter().collect() } else { full };
        if pts.is_empty() {
            return 1.0;
        }
        let mean = self.overall_mean();
        let inside = pts.iter().filter(|p| (p.rolling_mean - mean).abs() <= n_sigma * p.rolling_sigma).count();
        inside as f64 / pts.len() as f64
    }
}

/// Per-job `F - Delta F` series, trailing rolling mean and a slope test.
pub fn drift_scan(jobs: &[JobRecord], kind: WitnessKind, offset: usize, window: usize) -> Result<DriftScan> {
    let per_job = analyze_jobs(jobs, &[kind], offset)?.witnesses.pop().map(|w| w.per_job).unwrap_or_default();
    drift_scan_series(kind, &per_job, window)
}

/// Drift scan over per-job reports already computed.
pub fn drift_scan_series(kind: WitnessKind, per_job: &[JobWitness], window: usize) -> Result<DriftScan> {
    if window == 0 {
        return Err(Error::invalid("rolling window must be at least 1"));
    }
    let mut points = Vec::with_capacity(per_job.len());
    for (i, r) in per_job.iter().enumerate() {
        let lo = (i + 1).saturating_sub(window);
        let slice = &per_job[lo..=i];
        let count = slice.len() as f64;
        let rolling_mean = slice.iter().map(|r| r.report.corrected()).sum::<f64>() / count;
        let rolling_sigma = slice.iter().map(|r| r.report.sigma.powi(2)).sum::<f64>().sqrt() / count;
        points.push(DriftPoint {
            job_id: r.job_id,
            value: r.report.value,
            shift: r.report.shift,
            corrected: r.report.corrected(),
            sigma: r.report.sigma,
            rolling_mean,
            rolling_sigma,
            rolling_count: slice.len(),
        });
    }
    let (slope, slope_sigma) = slope_test(&points);
    Ok(DriftScan { kind, window, points, slope, slope_sigma, significance: significance(slope, slope_sigma) })
}

/// Slope against job order, weighted by `1/sigma^2` when every job has a
/// positive error; otherwise ordinary least squares with the residual
/// standard error.
fn slope_test(points: &[DriftPoint]) -> (f64, f64) {
    let n = points.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.job_id as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.corrected).collect();
    if points.iter().all(|p| p.sigma > 0.0) {
        let ws: Vec<f64> = points.iter().map(|p| p.sigma.powi(-2)).collect();
        let s: f64 = ws.iter().sum();
        let sx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * x).sum();
        let sy: f64 = ws.iter().zip(&ys).map(|(w, y)| w * y).sum();
        let sxx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * x * x).sum();
        let sxy: f64 = ws.iter().zip(&xs).zip(&ys).map(|((w, x), y)| w * x * y).sum();
        let delta = s * sxx - sx * sx;
        if delta <= 0.0 {
            return (0.0, 0.0);
        }
        ((s * sxy - sx * sy) / delta, (s / delta).sqrt())
    } else {
        let nf = n as f64;
        let mx = xs.iter().sum::<f64>() / nf;
        let my = ys.iter().sum::<f64>() / nf;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        if sxx == 0.0 {
            return (0.0, 0.0);
        }
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx;
        if n < 3 {
            return (slope, 0.0);
        }
        let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
        (slope, (rss / (nf - 2.0) / sxx).sqrt())
    }
}
