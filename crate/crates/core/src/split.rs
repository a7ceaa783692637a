//! Rate splitting for the superposition scheme.
//!
//! Each user's rate `R_k` is split into a protected part `μ_k R_k` and an open
//! part `(1 − μ_k) R_k`, and a randomization rate `R_kx` is added. A split is
//! valid when, for every nonempty subset `S`,
//!
//! * secret:   `Σ_S μ_k R_k ≤ C^M_S − C^MW*_S`
//! * wiretap:  `Σ_K [(1 − μ_k) R_k + R_kx] = C^MW − m`
//! * decoding: `Σ_S (R_k + R_kx) ≤ C^M_S`
//!
//! with `δ ≤ μ_k ≤ 1` and `R_kx ≥ 0`. The margin `m` is zero for the scheme
//! itself; simulations use `m > 0` so the wiretapper can still decode the
//! aggregate codeword at finite block length.

use serde::{Deserialize, Serialize};

use crate::channel::{cap_main, cap_wiretap, cap_wiretap_star, ChannelConfig, SecrecyLevel, SubsetId};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpError, Relation};
use crate::region::{build_gaussian_region, contains, RatePoint};

/// Tolerance used when re-checking a solved split.
pub const SPLIT_TOL: f64 = 1e-9;
/// Required slack of the rate point on every region constraint.
pub const INTERIOR_TOL: f64 = 1e-12;

const LEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub mu: Vec<f64>,
    pub r_s: Vec<f64>,
    pub r_0: Vec<f64>,
    pub r_x: Vec<f64>,
    /// Block length once integerized.
    pub n: Option<u32>,
    /// Largest per-user rate lost to integerization.
    pub eps_prime: f64,
}

impl SplitPlan {
    pub fn num_users(&self) -> usize {
        self.mu.len()
    }

    /// `R_k = R_ks + R_k0`.
    pub fn rates(&self) -> Vec<f64> {
        self.r_s.iter().zip(&self.r_0).map(|(s, o)| s + o).collect()
    }

    /// Rate the receiver has to resolve, `Σ_k (R_k + R_kx)`.
    pub fn total_rate(&self) -> f64 {
        self.r_s.iter().chain(&self.r_0).chain(&self.r_x).sum()
    }

    /// Open plus randomization rate, `Σ_k (R_k0 + R_kx)`.
    pub fn wiretap_rate(&self) -> f64 {
        self.r_0.iter().chain(&self.r_x).sum()
    }

    /// `(log2 M_ks, log2 M_k0, log2 M_kx)` per user of an integerized plan.
    pub fn message_bits(&self) -> Option<Vec<[u32; 3]>> {
        let n = self.n? as f64;
        let bits = |r: f64| (r * n).round() as u32;
        Some(
            (0..self.num_users())
                .map(|k| [bits(self.r_s[k]), bits(self.r_0[k]), bits(self.r_x[k])])
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.mu.len();
        for (name, v) in [("r_s", &self.r_s), ("r_0", &self.r_0), ("r_x", &self.r_x)] {
            if v.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: v.len() });
            }
            if v.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                return Err(Error::Domain(format!("{name} entries must be finite and ≥ 0")));
            }
        }
        if self.mu.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::Domain("mu entries must lie in [0, 1]".into()));
        }
        if self.n == Some(0) {
            return Err(Error::Domain("block length must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Worst-case residuals of a split against the three constraint families.
/// Positive values are violations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitCheck {
    pub secret_violation: f64,
    pub wiretap_residual: f64,
    pub decoding_violation: f64,
    /// `min_S Σ_S μ_k R_k / Σ_S R_k` over subsets with positive rate.
    pub min_secret_ratio: f64,
    pub min_mu: f64,
}

impl SplitCheck {
    pub fn holds(&self, delta: SecrecyLevel, tol: f64) -> bool {
        self.secret_violation <= tol
            && self.wiretap_residual.abs() <= tol
            && self.decoding_violation <= tol
            && self.min_mu >= delta.value() - tol
            && self.min_secret_ratio >= delta.value() - tol
    }
}

/// Re-evaluates every split constraint from scratch.
pub fn verify_split(cfg: &ChannelConfig, plan: &SplitPlan, margin: f64) -> Result<SplitCheck> {
    plan.validate()?;
    if plan.num_users() != cfg.num_users() {
        return Err(Error::DimensionMismatch { expected: cfg.num_users(), got: plan.num_users() });
    }
    let rates = plan.rates();
    let sum = |v: &[f64], s: SubsetId| s.members().map(|k| v[k]).sum::<f64>();
    let mut secret_violation = f64::NEG_INFINITY;
    let mut decoding_violation = f64::NEG_INFINITY;
    let mut min_secret_ratio = 1.0f64;
    for s in cfg.subsets() {
        let d = cap_main(cfg, s)? - cap_wiretap_star(cfg, s)?;
        secret_violation = secret_violation.max(sum(&plan.r_s, s) - d);
        decoding_violation =
            decoding_violation.max(sum(&rates, s) + sum(&plan.r_x, s) - cap_main(cfg, s)?);
        let r = sum(&rates, s);
        if r > 0.0 {
            min_secret_ratio = min_secret_ratio.min(sum(&plan.r_s, s) / r);
        }
    }
    let target = cap_wiretap(cfg, cfg.full_set())? - margin;
    Ok(SplitCheck {
        secret_violation,
        wiretap_residual: plan.wiretap_rate() - target,
        decoding_violation,
        min_secret_ratio,
        min_mu: plan.mu.iter().copied().fold(1.0, f64::min),
    })
}

/// [`solve_split_with_margin`] with zero margin.
pub fn solve_split(cfg: &ChannelConfig, delta: SecrecyLevel, point: &RatePoint) -> Result<SplitPlan> {
    solve_split_with_margin(cfg, delta, point, 0.0)
}

/// Finds `(μ, R_x)` for a point strictly inside the Gaussian δ-secret region.
///
/// Phase one maximizes the smallest slack `t` over the secret and decoding
/// inequalities. Phase two keeps `t` within 1e-9 of that optimum and maximizes
/// the smallest wiretapper slack `C^MW_S − Σ_{k∈S}(R_k0 + R_kx)` over proper
/// subsets `S`, so randomization is spread where the wiretapper can still
/// resolve it. Phase three keeps both and picks the lexicographically smallest
/// `μ`, then the lexicographically smallest `R_x`.
pub fn solve_split_with_margin(
    cfg: &ChannelConfig,
    delta: SecrecyLevel,
    point: &RatePoint,
    margin: f64,
) -> Result<SplitPlan> {
    let k = cfg.num_users();
    if point.dim() != k {
        return Err(Error::DimensionMismatch { expected: k, got: point.dim() });
    }
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(Error::Domain(format!("wiretap margin {margin} must be finite and ≥ 0")));
    }
    let region = build_gaussian_region(cfg, delta);
    let m = contains(&region, point)?;
    if m.slack <= INTERIOR_TOL {
        let h = m.tightest.expect("MAC constraints are always finite");
        let place = if m.slack < 0.0 { "outside" } else { "on the boundary of" };
        return Err(Error::Infeasible {
            constraint: format!("point is {place} the region: {h}"),
            slack: m.slack,
        });
    }

    let d = delta.value();
    let rates = point.rates();
    let wiretap_target = cap_wiretap(cfg, cfg.full_set())? - margin;
    let subsets: Vec<SubsetId> = cfg.subsets().collect();

    // variables: u_k = μ_k − δ (k), x_k (k), t⁺, t⁻, e⁺, e⁻
    let nv = 2 * k + 4;
    let (tp, tm) = (2 * k, 2 * k + 1);
    let (ep, em) = (2 * k + 2, 2 * k + 3);
    let mut lp = LinearProgram::new(nv);
    let mut labels = Vec::new();
    for &s in &subsets {
        let mut a = vec![0.0; nv];
        for j in s.members() {
            a[j] = rates[j];
        }
        a[tp] = 1.0;
        a[tm] = -1.0;
        let dsec = cap_main(cfg, s)? - cap_wiretap_star(cfg, s)?;
        lp.add(a, Relation::Le, dsec - d * point.sum_over(s));
        labels.push(format!("secret-rate constraint on {s}"));
    }
    for &s in &subsets {
        let mut a = vec![0.0; nv];
        for j in s.members() {
            a[k + j] = 1.0;
        }
        a[tp] = 1.0;
        a[tm] = -1.0;
        lp.add(a, Relation::Le, cap_main(cfg, s)? - point.sum_over(s));
        labels.push(format!("receiver decoding constraint on {s}"));
    }
    let mut a = vec![0.0; nv];
    for j in 0..k {
        a[j] = -rates[j];
        a[k + j] = 1.0;
    }
    lp.add(a, Relation::Eq, wiretap_target - (1.0 - d) * point.total());
    for j in 0..k {
        let mut a = vec![0.0; nv];
        a[j] = 1.0;
        lp.add(a, Relation::Le, 1.0 - d);
    }

    let mut objective = vec![0.0; nv];
    objective[tp] = 1.0;
    objective[tm] = -1.0;
    lp.set_objective(objective);
    let phase_one = lp.solve().map_err(|e| match e {
        LpError::Infeasible(r) => Error::Infeasible {
            constraint: format!(
                "wiretap rate equality Σ(R_k0 + R_kx) = C^MW − m cannot be met (margin {margin})"
            ),
            slack: -r,
        },
        LpError::Unbounded => unreachable!("t is bounded by every secret-rate constraint"),
    })?;
    let t_star = phase_one.objective;
    if t_star <= 0.0 {
        // name the constraint that is tightest at the max-min solution
        let x = &phase_one.x;
        let worst = lp.constraints()[..labels.len()]
            .iter()
            .zip(&labels)
            .map(|(c, l)| {
                let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
                    - (x[tp] - x[tm]);
                (c.rhs - lhs, l)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("at least one subset");
        return Err(Error::Infeasible { constraint: worst.1.clone(), slack: t_star });
    }

    let mut t_floor = vec![0.0; nv];
    t_floor[tp] = 1.0;
    t_floor[tm] = -1.0;
    lp.add(t_floor, Relation::Ge, (t_star - 1e-9).max(0.0));

    let mut solution = phase_one.x;
    let proper: Vec<SubsetId> = subsets.iter().copied().filter(|&s| s != cfg.full_set()).collect();
    if !proper.is_empty() {
        for &s in &proper {
            let mut a = vec![0.0; nv];
            for j in s.members() {
                a[j] = -rates[j];
                a[k + j] = 1.0;
            }
            a[ep] = 1.0;
            a[em] = -1.0;
            lp.add(a, Relation::Le, cap_wiretap(cfg, s)? - (1.0 - d) * point.sum_over(s));
        }
        let mut obj = vec![0.0; nv];
        obj[ep] = 1.0;
        obj[em] = -1.0;
        lp.set_objective(obj.clone());
        let spread = lp.solve().map_err(|e| Error::Infeasible {
            constraint: format!("wiretapper slack stage failed: {e}"),
            slack: 0.0,
        })?;
        lp.add(obj, Relation::Ge, spread.objective - 1e-9);
        solution = spread.x;
    }
    for var in 0..2 * k {
        let mut obj = vec![0.0; nv];
        obj[var] = -1.0;
        lp.set_objective(obj);
        solution = lp
            .solve()
            .map_err(|e| Error::Infeasible {
                constraint: format!("lexicographic refinement failed: {e}"),
                slack: 0.0,
            })?
            .x;
        let mut fix = vec![0.0; nv];
        fix[var] = 1.0;
        lp.add(fix, Relation::Le, solution[var] + LEX_TOL);
    }

    let mu: Vec<f64> = (0..k).map(|j| (d + solution[j]).clamp(d, 1.0)).collect();
    let r_x: Vec<f64> = (0..k).map(|j| solution[k + j].max(0.0)).collect();
    let plan = SplitPlan {
        r_s: mu.iter().zip(rates).map(|(m, r)| m * r).collect(),
        r_0: mu.iter().zip(rates).map(|(m, r)| (1.0 - m) * r).collect(),
        mu,
        r_x,
        n: None,
        eps_prime: 0.0,
    };
    let check = verify_split(cfg, &plan, margin)?;
    if !check.holds(delta, SPLIT_TOL) {
        return Err(Error::Infeasible {
            constraint: format!("solved split fails re-verification: {check:?}"),
            slack: 0.0,
        });
    }
    Ok(plan)
}

/// Lower bound on the normalized equivocation of the protected messages,
/// `1 − (C^MW − Σ(R_k0 + R_kx) + η′) / Σ R_ks`, from the wiretapper's
/// capacity bound and its residual uncertainty `η′` about the aggregate
/// codeword given the protected messages. With the wiretap equality met
/// exactly and `η′ = 0` it equals 1.
pub fn secret_equivocation_bound(cfg: &ChannelConfig, plan: &SplitPlan, eta_prime: f64) -> Result<f64> {
    let secret: f64 = plan.r_s.iter().sum();
    if secret <= 0.0 {
        return Ok(1.0);
    }
    let leak = cap_wiretap(cfg, cfg.full_set())? - plan.wiretap_rate() + eta_prime;
    Ok(1.0 - leak / secret)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateClass {
    Secret,
    Open,
    Dither,
}

/// A nonzero rate that rounded to a single codeword.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Advisory {
    pub user: usize,
    pub class: RateClass,
    pub requested: f64,
}

fn floor_bits(rate: f64, n: u32) -> u32 {
    let n = n as f64;
    let mut b = (rate * n).floor().max(0.0);
    if b / n > rate {
        b -= 1.0;
    }
    b.max(0.0) as u32
}

/// Rounds every class to `2^{⌊n R⌋}` codewords.
///
/// Secret rates round down. Open rates round down and, if needed, further so
/// that `R_ks/R_k` does not drop below the plan's `μ_k`. The open-rate deficit
/// moves to the randomization class before it is rounded, which keeps the
/// wiretap sum within `K/n` of its target and both inequality families loose.
pub fn integerize(plan: &SplitPlan, n: u32) -> Result<(SplitPlan, Vec<Advisory>)> {
    plan.validate()?;
    if n == 0 {
        return Err(Error::Domain("block length must be ≥ 1".into()));
    }
    let k = plan.num_users();
    let nf = n as f64;
    let mut out = SplitPlan {
        mu: plan.mu.clone(),
        r_s: vec![0.0; k],
        r_0: vec![0.0; k],
        r_x: vec![0.0; k],
        n: Some(n),
        eps_prime: 0.0,
    };
    let mut advisories = Vec::new();
    for j in 0..k {
        let bs = floor_bits(plan.r_s[j], n);
        let mut b0 = floor_bits(plan.r_0[j], n);
        let mu = plan.mu[j];
        if mu > 0.0 {
            let keep_ratio = (bs as f64 * (1.0 - mu) / mu + 1e-9).floor() as u32;
            b0 = b0.min(keep_ratio);
        }
        let r_s = bs as f64 / nf;
        let r_0 = b0 as f64 / nf;
        let bx = floor_bits(plan.r_x[j] + (plan.r_0[j] - r_0), n);
        let r_x = bx as f64 / nf;
        for (class, req, bits) in [
            (RateClass::Secret, plan.r_s[j], bs),
            (RateClass::Open, plan.r_0[j], b0),
            (RateClass::Dither, plan.r_x[j], bx),
        ] {
            if req > 0.0 && bits == 0 {
                advisories.push(Advisory { user: j, class, requested: req });
            }
        }
        let total = r_s + r_0;
        if total > 0.0 {
            out.mu[j] = (r_s / total).max(mu).min(1.0);
        }
        out.eps_prime = out.eps_prime.max(plan.r_s[j] + plan.r_0[j] - total);
        out.r_s[j] = r_s;
        out.r_0[j] = r_0;
        out.r_x[j] = r_x;
    }
    Ok((out, advisories))
}

/// Per-user power fractions for the secret, open and randomization codebooks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub lambda_s: Vec<f64>,
    pub lambda_0: Vec<f64>,
    pub lambda_x: Vec<f64>,
    /// Variance back-off per user.
    pub eps_var: Vec<f64>,
}

impl PowerSplit {
    /// Per-component codeword variance `max(λP − ε, 0)` for `[s, 0, x]`.
    pub fn variances(&self, cfg: &ChannelConfig, user: usize) -> [f64; 3] {
        let p = cfg.p_max()[user];
        let e = self.eps_var[user];
        [self.lambda_s[user], self.lambda_0[user], self.lambda_x[user]]
            .map(|l| if l > 0.0 { (l * p - e).max(0.0) } else { 0.0 })
    }
}

/// Power proportional to rate share; classes without rate get no power.
pub fn default_power_split(cfg: &ChannelConfig, plan: &SplitPlan) -> Result<PowerSplit> {
    plan.validate()?;
    if plan.num_users() != cfg.num_users() {
        return Err(Error::DimensionMismatch { expected: cfg.num_users(), got: plan.num_users() });
    }
    let k = plan.num_users();
    let mut ps = PowerSplit {
        lambda_s: vec![0.0; k],
        lambda_0: vec![0.0; k],
        lambda_x: vec![0.0; k],
        eps_var: cfg.p_max().iter().map(|p| 1e-6 * p).collect(),
    };
    for j in 0..k {
        let total = plan.r_s[j] + plan.r_0[j] + plan.r_x[j];
        if total > 0.0 {
            ps.lambda_s[j] = plan.r_s[j] / total;
            ps.lambda_0[j] = plan.r_0[j] / total;
            ps.lambda_x[j] = plan.r_x[j] / total;
        }
    }
    Ok(ps)
}
