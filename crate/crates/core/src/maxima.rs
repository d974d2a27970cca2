//! Classical extremes of `|W_N|` over probability vectors in `[0, 1]^{2N}`.
//!
//! Most maximizers are 0/1 vectors, found by exhaustive enumeration. A few
//! (N = 3, 4) sit in the interior of a face, so the best vertices are
//! polished by projected gradient ascent, together with random restarts.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det_unchecked, toeplitz_from_differences};
use crate::tolerances::PROJECTED_GRADIENT;
use crate::witnesses::{witness_gradient, witness_w, WitnessKind};

/// Largest order for which enumeration (`4^N` determinants) is allowed.
pub const MAX_ENUMERATION_ORDER: usize = 9;

/// Binary vertices refined by [`find_maximum`].
pub const DEFAULT_TOP_K: usize = 64;

/// Iteration cap for each refinement in [`find_maximum`].
pub const DEFAULT_MAX_ITERS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BinaryEnumeration,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximaResult {
    pub n: usize,
    pub best_p: Vec<f64>,
    /// Signed `W_N(best_p)`.
    pub value: f64,
    pub abs_value: f64,
    pub method: Method,
    pub n_starts: usize,
    pub seed: Option<u64>,
    /// Projected-gradient norm fell below the stopping threshold.
    pub converged: bool,
    /// The start point itself was stationary; no step was taken.
    pub stationary: bool,
    /// `|W_N|` after each accepted step, starting with the initial point.
    pub trace: Vec<f64>,
}

impl MaximaResult {
    fn at(n: usize, p: Vec<f64>, method: Method) -> Result<Self> {
        let value = witness_w(&p, n)?;
        Ok(Self {
            n,
            best_p: p,
            value,
            abs_value: value.abs(),
            method,
            n_starts: 1,
            seed: None,
            converged: false,
            stationary: false,
            trace: vec![value.abs()],
        })
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("witness order must be positive"));
    }
    if n > MAX_ENUMERATION_ORDER {
        return Err(Error::Resource(format!(
            "order {n} needs 4^{n} determinant evaluations; the limit is N = {MAX_ENUMERATION_ORDER}"
        )));
    }
    Ok(())
}

/// Vertex with index `m`: `p_i` is bit `2N-1-i`, so numeric order of `m`
/// is lexicographic order of `p`.
fn vertex(m: u32, n: usize) -> Vec<f64> {
    let len = 2 * n;
    (0..len).map(|i| f64::from((m >> (len - 1 - i)) & 1)).collect()
}

/// `|W_N|` of a vertex. Differences of 0/1 entries are integers, so the
/// determinant is an integer and rounding removes elimination noise.
fn vertex_score(m: u32, n: usize) -> i64 {
    let w = toeplitz_from_differences(&vertex(m, n), n).expect("length matches");
    det_unchecked(&w, n).abs().round() as i64
}

/// The `k` best vertices as `(score, index)`, best first, ties by index.
fn top_vertices(n: usize, k: usize) -> Vec<(i64, u32)> {
    let count = 1u32 << (2 * n);
    let mut all: Vec<(i64, u32)> = (0..count).into_par_iter().map(|m| (vertex_score(m, n), m)).collect();
    all.par_sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    all.truncate(k.max(1));
    all
}

/// Exact extremum of `|W_N|` over `{0, 1}^{2N}`; the lexicographically
/// smallest maximizer wins ties.
pub fn enumerate_binary(n: usize) -> Result<MaximaResult> {
    check_order(n)?;
    let (_, m) = top_vertices(n, 1)[0];
    let mut r = MaximaResult::at(n, vertex(m, n), Method::BinaryEnumeration)?;
    r.n_starts = 1usize << (2 * n);
    Ok(r)
}

/// Ascent direction of `|W|`: the gradient of `W` times the sign of `W`
/// (taken as + at `W = 0`).
fn ascent(n: usize, p: &[f64]) -> Result<(f64, Vec<f64>)> {
    let w = witness_w(p, n)?;
    let s = if w < 0.0 { -1.0 } else { 1.0 };
    let g = witness_gradient(WitnessKind::W(n), p)?;
    Ok((w.abs(), g.into_iter().map(|x| s * x).collect()))
}

/// Gradient with components that push against an active bound removed.
fn projected_norm(p: &[f64], g: &[f64]) -> f64 {
    p.iter()
        .zip(g)
        .map(|(&x, &d)| if (x >= 1.0 && d > 0.0) || (x <= 0.0 && d < 0.0) { 0.0 } else { d * d })
        .sum::<f64>()
        .sqrt()
}

/// Projected gradient ascent on `|W_N|` from `p0` with clamp projection and
/// Armijo backtracking (initial step 0.5, factor 0.5, constant 1e-4).
pub fn refine_local(p0: &[f64], n: usize, max_iters: usize) -> Result<MaximaResult> {
    if n == 0 {
        return Err(Error::invalid("witness order must be positive"));
    }
    if p0.len() != 2 * n {
        return Err(Error::Length { required: 2 * n, actual: p0.len() });
    }
    if let Some(j) = p0.iter().position(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::invalid(format!("start point coordinate {j} = {} is outside [0, 1]", p0[j])));
    }
    const ARMIJO: f64 = 1e-4;
    const MIN_STEP: f64 = 1e-20;
    let mut p = p0.to_vec();
    let (mut f, mut g) = ascent(n, &p)?;
    let mut trace = vec![f];
    let mut converged = false;
    for _ in 0..max_iters {
        if projected_norm(&p, &g) < PROJECTED_GRADIENT {
            converged = true;
            break;
        }
        let mut step = 0.5;
        let mut accepted = None;
        while step >= MIN_STEP {
            let q: Vec<f64> = p.iter().zip(&g).map(|(&x, &d)| (x + step * d).clamp(0.0, 1.0)).collect();
            let gain: f64 = q.iter().zip(&p).zip(&g).map(|((a, b), d)| (a - b) * d).sum();
            let fq = witness_w(&q, n)?.abs();
            if fq >= f + ARMIJO * gain && fq >= f {
                accepted = Some((q, fq));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((q, fq)) => {
                p = q;
                (f, g) = ascent(n, &p)?;
                debug_assert!(fq <= f + 1e-12 && f <= fq + 1e-12);
                trace.push(f);
            }
            // no admissible step: numerically stationary
            None => {
                converged = projected_norm(&p, &g) < PROJECTED_GRADIENT.sqrt();
                break;
            }
        }
    }
    if !converged && projected_norm(&p, &g) < PROJECTED_GRADIENT {
        converged = true;
    }
    let stationary = trace.len() == 1 && converged;
    let mut r = MaximaResult::at(n, p, Method::Refined)?;
    r.converged = converged;
    r.stationary = stationary;
    r.trace = trace;
    Ok(r)
}

/// Ordering for merging: larger `|value|` first; values within `1e-12`
/// relative are tied and broken by lexicographic `p`.
fn better(a: &MaximaResult, b: &MaximaResult) -> Ordering {
    let tol = 1e-12 * a.abs_value.max(b.abs_value).max(1.0);
    if (a.abs_value - b.abs_value).abs() > tol {
        return b.abs_value.partial_cmp(&a.abs_value).unwrap_or(Ordering::Equal);
    }
    a.best_p.partial_cmp(&b.best_p).unwrap_or(Ordering::Equal)
}

/// Best refinement over the top-`top_k` binary vertices and `n_starts`
/// uniform random points.
pub fn find_maximum_with(n: usize, n_starts: usize, seed: u64, top_k: usize, max_iters: usize) -> Result<MaximaResult> {
    check_order(n)?;
    let mut starts: Vec<(Vec<f64>, bool)> =
        top_vertices(n, top_k).into_iter().map(|(_, m)| (vertex(m, n), true)).collect();
    for s in 0..n_starts as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s);
        starts.push(((0..2 * n).map(|_| rng.random::<f64>()).collect(), false));
    }
    let total = starts.len();
    let results: Vec<MaximaResult> = starts
        .into_par_iter()
        .map(|(p, is_vertex)| {
            let mut r = refine_local(&p, n, max_iters)?;
            if is_vertex && r.trace.len() == 1 {
                r.method = Method::BinaryEnumeration;
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let mut best = results
        .into_iter()
        .min_by(better)
        .expect("at least one start");
    best.n_starts = total;
    best.seed = Some(seed);
    Ok(best)
}

/// [`find_maximum_with`] using the default top-K and iteration cap.
pub fn find_maximum(n: usize, n_starts: usize, seed: u64) -> Result<MaximaResult> {
    find_maximum_with(n, n_starts, seed, DEFAULT_TOP_K, DEFAULT_MAX_ITERS)
}

/// `|W_N|` maxima listed for `N = 1 ..= 9`.
pub const KNOWN_ABS_MAXIMA: [f64; 9] = [1.0, 1.0, 1.25, 2.088_662_107_903_635_5, 4.0, 8.0, 16.0, 18.0, 64.0];
