//! δ-secret rate regions as halfspace systems over user subsets.
//!
//! Every region carries one MAC constraint `R_S ≤ C^M_S` and one SECRECY
//! constraint per nonempty subset `S`. For Gaussian codebooks the SECRECY
//! bound is `(C^M_S − C^MW*_S)/δ`; at δ = 0 it is `+∞` and the region reduces
//! to the ordinary Gaussian MAC capacity region.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{
    cap_main, cap_wiretap, cap_wiretap_star, ChannelConfig, SecrecyLevel, SubsetId, TWO_PI_E,
};
use crate::error::{Error, Result};

/// Additive tolerance for [`contains`].
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Two vertices closer than this (max-norm) are the same vertex.
pub const VERTEX_DEDUP_TOL: f64 = 1e-9;
/// Tolerance for [`region_subset`].
pub const CONTAINMENT_TOL: f64 = 1e-9;
/// Largest K accepted by [`enumerate_vertices`].
pub const MAX_VERTEX_USERS: usize = 4;

const VERTEX_FEASIBILITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;

/// Per-user rates in bits per channel use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RatePoint(Vec<f64>);

impl RatePoint {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if let Some((k, r)) = rates
            .iter()
            .enumerate()
            .find(|(_, r)| !(r.is_finite() && **r >= 0.0))
        {
            return Err(Error::Domain(format!("rate R{} = {r} must be finite and ≥ 0", k + 1)));
        }
        Ok(Self(rates))
    }

    pub fn origin(num_users: usize) -> Self {
        Self(vec![0.0; num_users])
    }

    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `R_S`.
    pub fn sum_over(&self, s: SubsetId) -> f64 {
        s.members().map(|k| self.0[k]).sum()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|r| r * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for RatePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RatePoint> for Vec<f64> {
    fn from(p: RatePoint) -> Vec<f64> {
        p.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Family {
    Mac,
    Secrecy,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Mac => "MAC",
            Family::Secrecy => "SECRECY",
        })
    }
}

/// `Σ_{k ∈ subset} R_k ≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfspace {
    pub subset: SubsetId,
    pub bound: f64,
    pub family: Family,
}

impl Halfspace {
    pub fn slack(&self, point: &RatePoint) -> f64 {
        self.bound - point.sum_over(self.subset)
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} constraint on {} (bound {})", self.family, self.subset, self.bound)
    }
}

/// Exported form of a [`Halfspace`]; infinite bounds become `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceRecord {
    pub subset_mask: u64,
    pub family: Family,
    pub bound: Option<f64>,
}

/// H-representation of a rate region. MAC constraints come first, then
/// SECRECY, each in ascending subset mask order.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    cfg: ChannelConfig,
    delta: SecrecyLevel,
    halfspaces: Vec<Halfspace>,
}

impl RateRegion {
    fn from_secrecy_bounds(
        cfg: &ChannelConfig,
        delta: SecrecyLevel,
        mut secrecy_bound: impl FnMut(SubsetId) -> Result<f64>,
    ) -> Result<Self> {
        let mut halfspaces = Vec::with_capacity(2 * cfg.subsets().count());
        for subset in cfg.subsets() {
            halfspaces.push(Halfspace { subset, bound: cap_main(cfg, subset)?, family: Family::Mac });
        }
        for subset in cfg.subsets() {
            halfspaces.push(Halfspace {
                subset,
                bound: secrecy_bound(subset)?,
                family: Family::Secrecy,
            });
        }
        Ok(Self { cfg: cfg.clone(), delta, halfspaces })
    }

    pub fn cfg(&self) -> &ChannelConfig {
        &self.cfg
    }

    pub fn delta(&self) -> SecrecyLevel {
        self.delta
    }

    pub fn num_users(&self) -> usize {
        self.cfg.num_users()
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn bound(&self, subset: SubsetId, family: Family) -> Option<f64> {
        self.halfspaces
            .iter()
            .find(|h| h.subset == subset && h.family == family)
            .map(|h| h.bound)
    }

    /// The tighter of the two bounds on `R_S`.
    pub fn effective_bound(&self, subset: SubsetId) -> Option<f64> {
        self.halfspaces
            .iter()
            .filter(|h| h.subset == subset)
            .map(|h| h.bound)
            .reduce(f64::min)
    }

    pub fn records(&self) -> Vec<HalfspaceRecord> {
        self.halfspaces
            .iter()
            .map(|h| HalfspaceRecord {
                subset_mask: h.subset.mask(),
                family: h.family,
                bound: h.bound.is_finite().then_some(h.bound),
            })
            .collect()
    }

    /// Number of constraints (halfspaces plus `R_k ≥ 0`) active at `point`.
    pub fn active_constraints(&self, point: &RatePoint, tol: f64) -> usize {
        let faces = self
            .halfspaces
            .iter()
            .filter(|h| h.bound.is_finite() && h.slack(point).abs() <= tol)
            .count();
        faces + point.rates().iter().filter(|r| r.abs() <= tol).count()
    }
}

/// The Gaussian MAC capacity region (no secrecy constraint).
pub fn build_gmac_region(cfg: &ChannelConfig) -> RateRegion {
    build_gaussian_region(cfg, SecrecyLevel::NONE)
}

/// The δ-secret region achievable with Gaussian codebooks, which is also the
/// outer bound restricted to Gaussian inputs.
pub fn build_gaussian_region(cfg: &ChannelConfig, delta: SecrecyLevel) -> RateRegion {
    RateRegion::from_secrecy_bounds(cfg, delta, |s| {
        Ok(delta.scale(cap_main(cfg, s)? - cap_wiretap_star(cfg, s)?))
    })
    .expect("subsets of a validated config are always in range")
}

/// Per-symbol codebook entropies `h_j = H(X_j^n)/n` in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub h_rates: Vec<f64>,
}

impl EntropyProfile {
    /// Gaussian inputs at full power, `h_j = ½ log2(2πe P_j)`, the largest
    /// entropy compatible with the power constraint.
    pub fn gaussian(cfg: &ChannelConfig) -> Self {
        Self { h_rates: cfg.p_max().iter().map(|&p| gaussian_entropy(p)).collect() }
    }
}

fn gaussian_entropy(power: f64) -> f64 {
    0.5 * (TWO_PI_E * power).log2()
}

/// Outer bound for arbitrary codebooks with the given entropy profile.
///
/// The SECRECY bound for `S` is
/// `(C^M_S − C(Σ_{j∈S} 2^{2h_j} / (2πe (P_{S^c} + σ1² + σ2²)))) / δ`.
/// `h_j = −∞` is accepted and contributes nothing to the sum.
pub fn build_generic_outer(
    cfg: &ChannelConfig,
    delta: SecrecyLevel,
    profile: &EntropyProfile,
) -> Result<RateRegion> {
    let k = cfg.num_users();
    if profile.h_rates.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: profile.h_rates.len() });
    }
    for (j, (&h, &p)) in profile.h_rates.iter().zip(cfg.p_max()).enumerate() {
        let cap = gaussian_entropy(p);
        if h.is_nan() || h > cap + 1e-12 * cap.abs().max(1.0) {
            return Err(Error::Domain(format!(
                "h_{} = {h} exceeds the Gaussian maximum {cap} at power {p}",
                j + 1
            )));
        }
    }
    let noise = cfg.sigma1_sq() + cfg.sigma2_sq();
    RateRegion::from_secrecy_bounds(cfg, delta, |s| {
        let entropy_power: f64 = s.members().map(|j| (2.0 * profile.h_rates[j]).exp2()).sum();
        let rest = cfg.power(s.complement(k));
        let inner = entropy_power / (TWO_PI_E * (rest + noise));
        Ok(delta.scale(cap_main(cfg, s)? - crate::channel::shannon_c(inner)?))
    })
}

/// Secrecy sum capacity `min{C^M, (C^M − C^MW)/δ}`.
pub fn sum_capacity(cfg: &ChannelConfig, delta: SecrecyLevel) -> f64 {
    let full = cfg.full_set();
    let main = cap_main(cfg, full).expect("full set is nonempty");
    let wire = cap_wiretap(cfg, full).expect("full set is nonempty");
    main.min(delta.scale(main - wire))
}

/// Result of a membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// Finite constraint with the smallest slack.
    pub tightest: Option<Halfspace>,
    /// `bound − R_S` for the tightest constraint; negative when violated.
    pub slack: f64,
}

/// Membership test at [`MEMBERSHIP_TOL`].
pub fn contains(region: &RateRegion, point: &RatePoint) -> Result<Membership> {
    contains_within(region, point, MEMBERSHIP_TOL)
}

pub fn contains_within(region: &RateRegion, point: &RatePoint, tol: f64) -> Result<Membership> {
    if point.dim() != region.num_users() {
        return Err(Error::DimensionMismatch { expected: region.num_users(), got: point.dim() });
    }
    let mut tightest: Option<Halfspace> = None;
    let mut slack = f64::INFINITY;
    for h in region.halfspaces.iter().filter(|h| h.bound.is_finite()) {
        let s = h.slack(point);
        if s < slack {
            slack = s;
            tightest = Some(*h);
        }
    }
    Ok(Membership { inside: slack >= -tol, tightest, slack })
}

/// Extreme points of `{R ≥ 0} ∩ region`, deduplicated and sorted
/// lexicographically.
///
/// Brute force over every K-subset of active constraints; fine up to
/// [`MAX_VERTEX_USERS`] users (at most 34 rows, 46 376 linear solves).
pub fn enumerate_vertices(region: &RateRegion) -> Result<Vec<RatePoint>> {
    let k = region.num_users();
    if k > MAX_VERTEX_USERS {
        return Err(Error::UnsupportedSize(format!(
            "vertex enumeration supports K ≤ {MAX_VERTEX_USERS}, got K = {k}"
        )));
    }

    // rows a·R ≤ b
    let mut rows: Vec<(Vec<f64>, f64)> = region
        .halfspaces
        .iter()
        .filter(|h| h.bound.is_finite())
        .map(|h| ((0..k).map(|j| if h.subset.contains(j) { 1.0 } else { 0.0 }).collect(), h.bound))
        .collect();
    for j in 0..k {
        let mut a = vec![0.0; k];
        a[j] = -1.0;
        rows.push((a, 0.0));
    }

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for combo in Combinations::new(rows.len(), k) {
        let a: Vec<&[f64]> = combo.iter().map(|&i| rows[i].0.as_slice()).collect();
        let b: Vec<f64> = combo.iter().map(|&i| rows[i].1).collect();
        let Some(mut x) = solve_square(&a, &b) else { continue };
        let feasible = rows.iter().all(|(a, b)| dot(a, &x) <= b + VERTEX_FEASIBILITY_TOL);
        if !feasible {
            continue;
        }
        for v in &mut x {
            if *v <= 0.0 {
                *v = 0.0;
            }
        }
        let duplicate = vertices.iter().any(|v| {
            v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= VERTEX_DEDUP_TOL)
        });
        if !duplicate {
            vertices.push(x);
        }
    }
    // coordinates equal up to the dedup tolerance compare equal
    vertices.sort_by_cached_key(|v| {
        v.iter().map(|x| (x / VERTEX_DEDUP_TOL).round() as i64).collect::<Vec<_>>()
    });
    vertices.into_iter().map(RatePoint::new).collect()
}

/// The inner side of a [`region_subset`] test.
#[derive(Debug, Clone, Copy)]
pub enum Inner<'a> {
    Region(&'a RateRegion),
    Points(&'a [RatePoint]),
}

impl<'a> From<&'a RateRegion> for Inner<'a> {
    fn from(r: &'a RateRegion) -> Self {
        Inner::Region(r)
    }
}

impl<'a> From<&'a [RatePoint]> for Inner<'a> {
    fn from(p: &'a [RatePoint]) -> Self {
        Inner::Points(p)
    }
}

impl<'a> From<&'a Vec<RatePoint>> for Inner<'a> {
    fn from(p: &'a Vec<RatePoint>) -> Self {
        Inner::Points(p)
    }
}

/// Whether `inner` lies inside `outer` at [`CONTAINMENT_TOL`]. A region is
/// tested through its vertices, which suffices because `outer` is convex.
pub fn region_subset<'a>(inner: impl Into<Inner<'a>>, outer: &RateRegion) -> Result<bool> {
    let owned;
    let points: &[RatePoint] = match inner.into() {
        Inner::Region(r) => {
            if r.num_users() != outer.num_users() {
                return Err(Error::DimensionMismatch {
                    expected: outer.num_users(),
                    got: r.num_users(),
                });
            }
            owned = enumerate_vertices(r)?;
            &owned
        }
        Inner::Points(p) => p,
    };
    for p in points {
        if !contains_within(outer, p, CONTAINMENT_TOL)?.inside {
            return Ok(false);
        }
    }
    Ok(true)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(a: &[&[f64]], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.to_vec();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < PIVOT_TOL {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for c in col..=n {
                    m[row][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| m[row][c] * x[c]).sum();
        x[row] = (m[row][n] - tail) / m[row][row];
    }
    Some(x)
}

/// Lexicographic k-combinations of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ChannelConfig {
        ChannelConfig::new(vec![10.0, 5.0], 1.0, 2.0).unwrap()
    }

    fn delta(d: f64) -> SecrecyLevel {
        SecrecyLevel::new(d).unwrap()
    }

    fn pt(r: &[f64]) -> RatePoint {
        RatePoint::new(r.to_vec()).unwrap()
    }

    const C_M1: f64 = 1.729_715_809_318_648_6;
    const C_M2: f64 = 1.292_481_250_360_578_1;
    const SEC1: f64 = 1.144_753_308_597_492_4;
    const SEC2: f64 = 1.057_738_608_709_968_0;
    const SEC12: f64 = 0.707_518_749_639_421_9;

    fn assert_vertices(got: &[RatePoint], want: &[[f64; 2]]) {
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (g, w) in got.iter().zip(want) {
            for (a, b) in g.rates().iter().zip(w) {
                assert!((a - b).abs() < 1e-9, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn rate_point_rejects_negative() {
        assert!(RatePoint::new(vec![0.1, -0.1]).is_err());
        assert!(RatePoint::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn gmac_bounds_and_membership() {
        let r = build_gmac_region(&reference());
        assert_eq!(r.halfspaces().len(), 6);
        let s = SubsetId::from_users;
        assert!((r.bound(s(&[0]), Family::Mac).unwrap() - C_M1).abs() < 1e-12);
        assert!((r.bound(s(&[1]), Family::Mac).unwrap() - C_M2).abs() < 1e-12);
        assert!((r.bound(s(&[0, 1]), Family::Mac).unwrap() - 2.0).abs() < 1e-12);
        assert!(r
            .halfspaces()
            .iter()
            .filter(|h| h.family == Family::Secrecy)
            .all(|h| h.bound == f64::INFINITY));
        assert!(contains(&r, &pt(&[1.0, 0.9])).unwrap().inside);
        assert!(!contains(&r, &pt(&[1.7, 1.2])).unwrap().inside);
        assert_eq!(r, build_gaussian_region(&reference(), SecrecyLevel::NONE));
    }

    #[test]
    fn gaussian_secrecy_bounds() {
        let r1 = build_gaussian_region(&reference(), SecrecyLevel::PERFECT);
        let s = SubsetId::from_users;
        assert!((r1.bound(s(&[0]), Family::Secrecy).unwrap() - SEC1).abs() < 1e-12);
        assert!((r1.bound(s(&[1]), Family::Secrecy).unwrap() - SEC2).abs() < 1e-12);
        assert!((r1.bound(s(&[0, 1]), Family::Secrecy).unwrap() - SEC12).abs() < 1e-12);
        let half = build_gaussian_region(&reference(), delta(0.5));
        assert!((half.bound(s(&[0, 1]), Family::Secrecy).unwrap() - 2.0 * SEC12).abs() < 1e-12);
    }

    #[test]
    fn sum_capacity_values() {
        let cfg = reference();
        assert!((sum_capacity(&cfg, delta(1.0)) - SEC12).abs() < 1e-12);
        assert_eq!(sum_capacity(&cfg, delta(0.0)), 2.0);
        assert!((sum_capacity(&cfg, delta(0.5)) - 1.415_037_499_278_843_8).abs() < 1e-12);
    }

    #[test]
    fn membership_reports_tightest() {
        let r = build_gaussian_region(&reference(), SecrecyLevel::PERFECT);
        let m = contains(&r, &pt(&[0.3, 0.3])).unwrap();
        assert!(m.inside);
        assert!((m.slack - (SEC12 - 0.6)).abs() < 1e-12);
        let m = contains(&r, &pt(&[0.5, 0.5])).unwrap();
        assert!(!m.inside);
        let t = m.tightest.unwrap();
        assert_eq!((t.subset, t.family), (SubsetId::full(2), Family::Secrecy));
        assert!(contains(&r, &RatePoint::origin(2)).unwrap().inside);
        assert!(matches!(
            contains(&r, &pt(&[0.1])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn membership_tolerance_is_tight() {
        let r = build_gaussian_region(&reference(), SecrecyLevel::PERFECT);
        assert!(contains(&r, &pt(&[SEC12 + 5e-13, 0.0])).unwrap().inside);
        assert!(!contains(&r, &pt(&[SEC12 + 1e-10, 0.0])).unwrap().inside);
    }

    #[test]
    fn reference_vertices() {
        let cfg = reference();
        let v1 = enumerate_vertices(&build_gaussian_region(&cfg, delta(1.0))).unwrap();
        assert_vertices(&v1, &[[0.0, 0.0], [0.0, SEC12], [SEC12, 0.0]]);

        let v05 = enumerate_vertices(&build_gaussian_region(&cfg, delta(0.5))).unwrap();
        let sum = 2.0 * SEC12;
        assert_vertices(&v05, &[[0.0, 0.0], [0.0, C_M2], [sum - C_M2, C_M2], [sum, 0.0]]);

        let v0 = enumerate_vertices(&build_gmac_region(&cfg)).unwrap();
        assert_vertices(
            &v0,
            &[[0.0, 0.0], [0.0, C_M2], [2.0 - C_M2, C_M2], [C_M1, 0.0], [C_M1, 2.0 - C_M1]],
        );
        assert!(((2.0 - C_M1) - 0.270_284_190_681_351_4).abs() < 1e-12);
    }

    #[test]
    fn vertices_are_members_and_active() {
        let cfg = ChannelConfig::new(vec![3.0, 7.0, 2.0], 1.5, 4.0).unwrap();
        for d in [0.0, 0.3, 1.0] {
            let r = build_gaussian_region(&cfg, delta(d));
            let vs = enumerate_vertices(&r).unwrap();
            assert!(vs.len() >= 4);
            for v in &vs {
                assert!(contains(&r, v).unwrap().inside, "{v:?}");
                assert!(r.active_constraints(v, 1e-9) >= 3);
            }
        }
    }

    #[test]
    fn vertex_enumeration_size_cap() {
        let cfg = ChannelConfig::new(vec![1.0; 5], 1.0, 1.0).unwrap();
        let r = build_gmac_region(&cfg);
        assert!(matches!(enumerate_vertices(&r), Err(Error::UnsupportedSize(_))));
        let one = ChannelConfig::new(vec![3.0], 1.0, 1.0).unwrap();
        let v = enumerate_vertices(&build_gmac_region(&one)).unwrap();
        assert_vertices_1d(&v, &[0.0, 1.0]);
    }

    fn assert_vertices_1d(got: &[RatePoint], want: &[f64]) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g.rates()[0] - w).abs() < 1e-12);
        }
    }

    #[test]
    fn containment_examples() {
        let cfg = reference();
        let g0 = build_gmac_region(&cfg);
        let g05 = build_gaussian_region(&cfg, delta(0.5));
        let g1 = build_gaussian_region(&cfg, delta(1.0));
        assert!(region_subset(&g1, &g1).unwrap());
        assert!(region_subset(&g1, &g05).unwrap());
        assert!(!region_subset(&g0, &g1).unwrap());
        let pts = vec![pt(&[0.1, 0.1]), pt(&[0.7, 0.0])];
        assert!(region_subset(&pts, &g1).unwrap());
        let other = build_gmac_region(&ChannelConfig::new(vec![1.0], 1.0, 1.0).unwrap());
        assert!(region_subset(&other, &g1).is_err());
    }

    #[test]
    fn generic_outer_reductions() {
        let cfg = reference();
        let d1 = SecrecyLevel::PERFECT;
        let gauss = build_generic_outer(&cfg, d1, &EntropyProfile::gaussian(&cfg)).unwrap();
        let reference = build_gaussian_region(&cfg, d1);
        for (a, b) in gauss.halfspaces().iter().zip(reference.halfspaces()) {
            assert!((a.bound - b.bound).abs() < 1e-12);
        }

        let silent = EntropyProfile { h_rates: vec![f64::NEG_INFINITY; 2] };
        let r = build_generic_outer(&cfg, d1, &silent).unwrap();
        for s in cfg.subsets() {
            let want = cap_main(&cfg, s).unwrap();
            assert!((r.bound(s, Family::Secrecy).unwrap() - want).abs() < 1e-12);
        }

        // both users at the entropy of a power-5 Gaussian: the {1,2} secrecy
        // bound is C^M (real powers) minus the wiretap term with powers (5, 5)
        let h5 = 0.5 * (TWO_PI_E * 5.0).log2();
        let r = build_generic_outer(&cfg, d1, &EntropyProfile { h_rates: vec![h5, h5] }).unwrap();
        let as_if = ChannelConfig::new(vec![5.0, 5.0], 1.0, 2.0).unwrap();
        let full = cfg.full_set();
        let want = cap_main(&cfg, full).unwrap() - cap_wiretap_star(&as_if, full).unwrap();
        assert!((r.bound(full, Family::Secrecy).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn generic_outer_rejects_super_gaussian_entropy() {
        let cfg = reference();
        let mut p = EntropyProfile::gaussian(&cfg);
        p.h_rates[1] += 1e-6;
        assert!(matches!(
            build_generic_outer(&cfg, SecrecyLevel::PERFECT, &p),
            Err(Error::Domain(_))
        ));
        let short = EntropyProfile { h_rates: vec![0.0] };
        assert!(build_generic_outer(&cfg, SecrecyLevel::PERFECT, &short).is_err());
    }

    #[test]
    fn records_encode_infinity_as_null() {
        let r = build_gmac_region(&reference());
        let recs = r.records();
        assert_eq!(recs.len(), 6);
        assert_eq!(recs[0].subset_mask, 1);
        assert_eq!(recs[3].family, Family::Secrecy);
        assert!(recs[3].bound.is_none());
        let json = serde_json::to_string(&recs[3]).unwrap();
        assert_eq!(json, r#"{"subset_mask":1,"family":"SECRECY","bound":null}"#);
    }

    #[test]
    fn combinations_enumerate_all() {
        let all: Vec<_> = Combinations::new(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[9], vec![2, 3, 4]);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }
}
