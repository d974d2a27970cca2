//! Self-checks runnable from the command line.
//!
//! * `rank-bounds`: random systems of a given class must null the witness
//!   at their rank bound;
//! * `closed-forms`: the term-by-term variance formulas against the generic
//!   gradient/Hessian route;
//! * `gradients`: analytic gradients against central differences.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{
    add_sink_state, random_channel, random_density, random_measurement, random_real_channel, random_real_density,
    random_real_measurement, ClassicalChain, KrausChannel,
};
use crate::error::{Error, Result};
use crate::statistics::{
    delta_variance, second_order_f2_closed, second_order_variance, variance_f1_closed, variance_f2_closed,
    variance_wn_closed,
};
use crate::tolerances::{CLOSED_FORM, FD_STEP, FINITE_DIFFERENCE, RANK_NULL, RANK_NULL_QUTRIT};
use crate::witnesses::{evaluate, witness_gradient, witness_w, WitnessKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    RankBounds,
    ClosedForms,
    Gradients,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank-bounds" => Ok(Suite::RankBounds),
            "closed-forms" => Ok(Suite::ClosedForms),
            "gradients" => Ok(Suite::Gradients),
            other => Err(Error::invalid(format!(
                "unknown suite '{other}' (rank-bounds, closed-forms or gradients)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::RankBounds => "rank-bounds",
            Suite::ClosedForms => "closed-forms",
            Suite::Gradients => "gradients",
        })
    }
}

/// Outcome of one named check: the worst observed deviation against its
/// tolerance over `cases` random instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {} (worst {:.3e}, tolerance {:.0e}, {} cases)",
                if c.passed() { "PASS" } else { "FAIL" },
                self.suite,
                c.name,
                c.worst,
                c.tolerance,
                c.cases
            )?;
        }
        Ok(())
    }
}

/// Runs `suite` with `cases` random instances per check.
pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::RankBounds => rank_bounds(cases, seed)?,
        Suite::ClosedForms => closed_forms(cases, seed)?,
        Suite::Gradients => gradients(cases, seed)?,
    };
    Ok(SuiteReport { suite, seed, checks })
}

/// Default instance count per suite.
pub fn default_cases(suite: Suite) -> usize {
    match suite {
        Suite::RankBounds | Suite::Gradients => 100,
        Suite::ClosedForms => 1000,
    }
}

fn rng_for(seed: u64, check: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ check.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(case);
    rng
}

fn worst_over(cases: usize, mut f: impl FnMut(u64) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in 0..cases as u64 {
        worst = worst.max(f(c)?);
    }
    Ok(worst)
}

fn quantum_null(channel: &KrausChannel, real: bool, n: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = channel.dim();
    let (state, m) = if real {
        (random_real_density(d, rng), random_real_measurement(d, rng))
    } else {
        (random_density(d, rng), random_measurement(d, rng))
    };
    let p = channel.probability_sequence(&state, &m, 2 * n)?;
    Ok(witness_w(&p, n)?.abs())
}

fn rank_bounds(cases: usize, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for d in [2usize, 3] {
        let worst = worst_over(cases, |c| {
            let mut rng = rng_for(seed, d as u64, c);
            let chain = ClassicalChain::random(d, &mut rng);
            Ok(witness_w(&chain.sequence(2 * d)?, d)?.abs())
        })?;
        checks.push(Check { name: format!("classical d={d}: |W_{d}|"), cases, worst, tolerance: RANK_NULL });
    }
    let worst = worst_over(cases, |c| {
        let mut rng = rng_for(seed, 10, c);
        let k = rng.random_range(1..=4);
        quantum_null(&random_channel(2, k, &mut rng), false, 4, &mut rng)
    })?;
    checks.push(Check { name: "complex qubit: |W_4|".into(), cases, worst, tolerance: RANK_NULL });
    let worst = worst_over(cases, |c| {
        let mut rng = rng_for(seed, 11, c);
        let k = rng.random_range(1..=4);
        quantum_null(&random_real_channel(2, k, &mut rng), true, 3, &mut rng)
    })?;
    checks.push(Check { name: "real qubit: |W_3|".into(), cases, worst, tolerance: RANK_NULL });
    let worst = worst_over(cases, |c| {
        let mut rng = rng_for(seed, 12, c);
        let k = rng.random_range(1..=4);
        let leak = rng.random_range(0.0..0.2);
        let channel = add_sink_state(&random_channel(2, k, &mut rng), leak)?;
        let state = random_density(2, &mut rng).extend_with_sink();
        let m = random_measurement(2, &mut rng).extend_with_sink(rng.random())?;
        let p = channel.probability_sequence(&state, &m, 10)?;
        Ok(witness_w(&p, 5)?.abs())
    })?;
    checks.push(Check { name: "qubit + sink: |W_5|".into(), cases, worst, tolerance: RANK_NULL });
    let worst = worst_over(cases, |c| {
        let mut rng = rng_for(seed, 13, c);
        let k = rng.random_range(1..=9);
        quantum_null(&random_channel(3, k, &mut rng), false, 9, &mut rng)
    })?;
    checks.push(Check { name: "complex qutrit: |W_9|".into(), cases, worst, tolerance: RANK_NULL_QUTRIT });
    Ok(checks)
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn closed_forms(cases: usize, seed: u64) -> Result<Vec<Check>> {
    let draw = |c: u64| {
        let mut rng = rng_for(seed, 20, c);
        let p: Vec<f64> = (0..12).map(|_| rng.random()).collect();
        let shots = vec![rng.random_range(100u64..1_000_000); 12];
        (p, shots)
    };
    let mut checks = Vec::new();
    for n in 1..=6 {
        let worst = worst_over(cases, |c| {
            let (p, shots) = draw(c);
            Ok(relative(variance_wn_closed(&p, n, &shots)?, delta_variance(WitnessKind::W(n), &p, &shots)?))
        })?;
        checks.push(Check { name: format!("W_{n} variance"), cases, worst, tolerance: CLOSED_FORM });
    }
    let worst = worst_over(cases, |c| {
        let (p, shots) = draw(c);
        Ok(relative(variance_f1_closed(&p, &shots)?, delta_variance(WitnessKind::F1, &p, &shots)?))
    })?;
    checks.push(Check { name: "F1 variance".into(), cases, worst, tolerance: CLOSED_FORM });
    let worst = worst_over(cases, |c| {
        let (p, shots) = draw(c);
        Ok(relative(variance_f2_closed(&p, &shots)?, delta_variance(WitnessKind::F2, &p, &shots)?))
    })?;
    checks.push(Check { name: "F2 variance".into(), cases, worst, tolerance: CLOSED_FORM });
    let worst = worst_over(cases, |c| {
        let (p, shots) = draw(c);
        Ok(relative(second_order_f2_closed(&p, &shots)?, second_order_variance(WitnessKind::F2, &p, &shots)?))
    })?;
    checks.push(Check { name: "F2 second-order variance".into(), cases, worst, tolerance: CLOSED_FORM });
    Ok(checks)
}

/// Largest central-difference mismatch relative to the gradient's size.
pub fn gradient_mismatch(kind: WitnessKind, p: &[f64]) -> Result<f64> {
    let g = witness_gradient(kind, p)?;
    let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in 0..g.len() {
        let mut up = p.to_vec();
        let mut dn = p.to_vec();
        up[i] += FD_STEP;
        dn[i] -= FD_STEP;
        let fd = (evaluate(kind, &up)? - evaluate(kind, &dn)?) / (2.0 * FD_STEP);
        worst = worst.max((fd - g[i]).abs() / scale);
    }
    Ok(worst)
}

fn gradients(cases: usize, seed: u64) -> Result<Vec<Check>> {
    let kinds = [WitnessKind::W(1), WitnessKind::W(2), WitnessKind::W(3), WitnessKind::W(4), WitnessKind::F1, WitnessKind::F2];
    let mut checks = Vec::new();
    for (i, kind) in kinds.into_iter().enumerate() {
        let worst = worst_over(cases, |c| {
            let mut rng = rng_for(seed, 30 + i as u64, c);
            let p: Vec<f64> = (0..kind.required_length()).map(|_| rng.random_range(0.05..0.95)).collect();
            gradient_mismatch(kind, &p)
        })?;
        checks.push(Check { name: format!("{kind} gradient"), cases, worst, tolerance: FINITE_DIFFERENCE });
    }
    Ok(checks)
}
