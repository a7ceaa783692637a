//! Time-division achievable region.
//!
//! User `k` transmits a fraction `α_k` of the time with power `P_k/α_k`, using
//! a single-user wiretap code in its slot. Its rate is capped by
//! `α_k C(P_k/(α_k σ1²))` and by `α_k [C(P_k/(α_k σ1²)) − C(P_k/(α_k (σ1²+σ2²)))]/δ`.

use serde::Serialize;

use crate::channel::{shannon_c, ChannelConfig, SecrecyLevel};
use crate::error::{Error, Result};
use crate::region::RatePoint;

const SIMPLEX_TOL: f64 = 1e-12;
const MIN_STEP: f64 = 1e-9;

/// Time-share vector on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TimeShare(Vec<f64>);

impl TimeShare {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Domain("time share needs at least one user".into()));
        }
        if let Some(a) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::Domain(format!("time share entry {a} is outside [0, 1]")));
        }
        let total: f64 = alpha.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Domain(format!("time shares sum to {total}, not 1")));
        }
        Ok(Self(alpha))
    }

    /// `(1/K, …, 1/K)`.
    pub fn uniform(num_users: usize) -> Self {
        Self(vec![1.0 / num_users as f64; num_users])
    }

    pub fn alpha(&self) -> &[f64] {
        &self.0
    }
}

fn user_rate(power: f64, alpha: f64, cfg: &ChannelConfig, delta: SecrecyLevel) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    let main = alpha * shannon_c(power / (alpha * cfg.sigma1_sq())).expect("positive SNR");
    let wire = alpha
        * shannon_c(power / (alpha * (cfg.sigma1_sq() + cfg.sigma2_sq()))).expect("positive SNR");
    main.min(delta.scale(main - wire)).max(0.0)
}

/// Largest per-user rates for a given time share.
pub fn tdma_rate_bounds(
    cfg: &ChannelConfig,
    delta: SecrecyLevel,
    alpha: &TimeShare,
) -> Result<RatePoint> {
    if alpha.0.len() != cfg.num_users() {
        return Err(Error::DimensionMismatch { expected: cfg.num_users(), got: alpha.0.len() });
    }
    RatePoint::new(
        cfg.p_max()
            .iter()
            .zip(&alpha.0)
            .map(|(&p, &a)| user_rate(p, a, cfg, delta))
            .collect(),
    )
}

fn sum_rate(cfg: &ChannelConfig, delta: SecrecyLevel, alpha: &[f64]) -> f64 {
    cfg.p_max().iter().zip(alpha).map(|(&p, &a)| user_rate(p, a, cfg, delta)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdmaOptimum {
    pub alpha: TimeShare,
    pub sum_rate: f64,
}

/// Maximizes the TDMA sum rate over the simplex.
///
/// A full grid of step `1/grid_resolution` is scanned in lexicographic order
/// (first best kept), then refined by pairwise coordinate moves
/// `α_i += h, α_j −= h` with step halving down to 1e-9.
pub fn tdma_sum_optimize(
    cfg: &ChannelConfig,
    delta: SecrecyLevel,
    grid_resolution: usize,
) -> Result<TdmaOptimum> {
    if grid_resolution < 2 {
        return Err(Error::Domain(format!("grid resolution {grid_resolution} must be ≥ 2")));
    }
    let k = cfg.num_users();
    let mut best = vec![0.0; k];
    best[0] = 1.0;
    let mut best_val = sum_rate(cfg, delta, &best);

    let mut counts = vec![0usize; k];
    let mut alpha = vec![0.0; k];
    grid_scan(&mut counts, 0, grid_resolution, &mut |c| {
        for (a, &n) in alpha.iter_mut().zip(c) {
            *a = n as f64 / grid_resolution as f64;
        }
        let v = sum_rate(cfg, delta, &alpha);
        if v > best_val {
            best_val = v;
            best.copy_from_slice(&alpha);
        }
    });

    let mut step = 1.0 / grid_resolution as f64;
    while step >= MIN_STEP {
        let mut improved = false;
        for i in 0..k {
            for j in 0..k {
                if i == j || best[j] <= 0.0 {
                    continue;
                }
                let h = step.min(best[j]);
                let mut cand = best.clone();
                cand[i] += h;
                cand[j] -= h;
                let v = sum_rate(cfg, delta, &cand);
                if v > best_val {
                    best_val = v;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }

    // absorb rounding so the result is a valid share
    let total: f64 = best.iter().sum();
    for a in &mut best {
        *a = (*a / total).clamp(0.0, 1.0);
    }
    let sum_rate = sum_rate(cfg, delta, &best);
    Ok(TdmaOptimum { alpha: TimeShare::new(best)?, sum_rate })
}

/// Visits every composition of `remaining` into `counts[pos..]` in
/// lexicographic order.
fn grid_scan(counts: &mut [usize], pos: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        f(counts);
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        grid_scan(counts, pos + 1, remaining - c, f);
    }
}

/// One TDMA corner point for the two-user boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdmaSample {
    pub alpha1: f64,
    pub point: RatePoint,
}

/// Corner points for `α_1 = i/(num_samples − 1)`, tracing the outer edge of
/// the two-user TDMA union.
pub fn tdma_boundary_sample(
    cfg: &ChannelConfig,
    delta: SecrecyLevel,
    num_samples: usize,
) -> Result<Vec<TdmaSample>> {
    if cfg.num_users() != 2 {
        return Err(Error::UnsupportedSize(format!(
            "TDMA boundary sampling needs K = 2, got K = {}",
            cfg.num_users()
        )));
    }
    if num_samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {num_samples}")));
    }
    (0..num_samples)
        .map(|i| {
            let a1 = i as f64 / (num_samples - 1) as f64;
            let share = TimeShare::new(vec![a1, 1.0 - a1])?;
            Ok(TdmaSample { alpha1: a1, point: tdma_rate_bounds(cfg, delta, &share)? })
        })
        .collect()
}
