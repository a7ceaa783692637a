//! Channel parameters and the scalar capacity formulas.
//!
//! The receiver sees `Y = ΣX_k + N1` and the wiretapper `Z = Y + N2`, with
//! `N1 ~ N(0, σ1²)` and `N2 ~ N(0, σ2²)`. Every rate is measured in bits.

use std::f64::consts::{E, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `2πe`, the entropy-power normalisation of a unit-variance Gaussian.
pub const TWO_PI_E: f64 = 2.0 * PI * E;

/// Largest user count a [`SubsetId`] bitmask can address.
pub const MAX_USERS: usize = 63;

/// Parameters of a K-user Gaussian multiple-access wiretap channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelConfig {
    num_users: usize,
    p_max: Vec<f64>,
    sigma1_sq: f64,
    sigma2_sq: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannelConfig {
    num_users: usize,
    p_max: Vec<f64>,
    sigma1_sq: f64,
    sigma2_sq: f64,
}

impl<'de> Deserialize<'de> for ChannelConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawChannelConfig::deserialize(d)?;
        ChannelConfig::with_users(raw.num_users, raw.p_max, raw.sigma1_sq, raw.sigma2_sq)
            .map_err(serde::de::Error::custom)
    }
}

impl ChannelConfig {
    /// Builds a configuration, taking the user count from `p_max`.
    pub fn new(p_max: Vec<f64>, sigma1_sq: f64, sigma2_sq: f64) -> Result<Self> {
        Self::with_users(p_max.len(), p_max, sigma1_sq, sigma2_sq)
    }

    pub fn with_users(
        num_users: usize,
        p_max: Vec<f64>,
        sigma1_sq: f64,
        sigma2_sq: f64,
    ) -> Result<Self> {
        if num_users == 0 {
            return Err(Error::InvalidConfig("num_users must be at least 1".into()));
        }
        if num_users > MAX_USERS {
            return Err(Error::InvalidConfig(format!(
                "num_users {num_users} exceeds the supported maximum {MAX_USERS}"
            )));
        }
        if p_max.len() != num_users {
            return Err(Error::InvalidConfig(format!(
                "p_max has {} entries but num_users is {num_users}",
                p_max.len()
            )));
        }
        if let Some((k, p)) = p_max
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p > 0.0))
        {
            return Err(Error::InvalidConfig(format!(
                "p_max[{k}] = {p} must be positive and finite"
            )));
        }
        if !(sigma1_sq.is_finite() && sigma1_sq > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma1_sq = {sigma1_sq} must be positive and finite"
            )));
        }
        if !(sigma2_sq.is_finite() && sigma2_sq >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma2_sq = {sigma2_sq} must be nonnegative and finite"
            )));
        }
        Ok(Self { num_users, p_max, sigma1_sq, sigma2_sq })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn p_max(&self) -> &[f64] {
        &self.p_max
    }

    pub fn sigma1_sq(&self) -> f64 {
        self.sigma1_sq
    }

    pub fn sigma2_sq(&self) -> f64 {
        self.sigma2_sq
    }

    /// Same powers and main-channel noise, different wiretap noise.
    pub fn with_sigma2_sq(&self, sigma2_sq: f64) -> Result<Self> {
        Self::new(self.p_max.clone(), self.sigma1_sq, sigma2_sq)
    }

    /// The set of all users.
    pub fn full_set(&self) -> SubsetId {
        SubsetId::full(self.num_users)
    }

    /// Nonempty subsets in ascending mask order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetId> {
        SubsetId::nonempty(self.num_users)
    }

    /// `P_S`, the total received power of the users in `s`.
    pub fn power(&self, s: SubsetId) -> f64 {
        s.members().map(|k| self.p_max[k]).sum()
    }

    fn check_subset(&self, s: SubsetId) -> Result<()> {
        if s.is_empty() {
            return Err(Error::Domain("subset must be nonempty".into()));
        }
        if !s.is_subset_of(self.full_set()) {
            return Err(Error::Domain(format!(
                "subset {s} addresses users beyond K = {}",
                self.num_users
            )));
        }
        Ok(())
    }
}

/// Required secrecy level δ ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SecrecyLevel(f64);

impl SecrecyLevel {
    pub const NONE: SecrecyLevel = SecrecyLevel(0.0);
    pub const PERFECT: SecrecyLevel = SecrecyLevel(1.0);

    pub fn new(delta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&delta) {
            Ok(Self(delta))
        } else {
            Err(Error::Domain(format!("secrecy level {delta} is outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `bound / δ`, or `+∞` when δ = 0 (the constraint is vacuous).
    pub fn scale(self, bound: f64) -> f64 {
        if self.0 == 0.0 {
            f64::INFINITY
        } else {
            bound / self.0
        }
    }
}

impl TryFrom<f64> for SecrecyLevel {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SecrecyLevel> for f64 {
    fn from(d: SecrecyLevel) -> f64 {
        d.0
    }
}

impl fmt::Display for SecrecyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of users as a bitmask; bit `k` stands for user `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetId(u64);

impl SubsetId {
    pub const EMPTY: SubsetId = SubsetId(0);

    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    /// Subset from zero-based user indices.
    pub fn from_users(users: &[usize]) -> Self {
        Self(users.iter().fold(0, |m, &k| m | (1u64 << k)))
    }

    pub fn full(num_users: usize) -> Self {
        debug_assert!(num_users <= MAX_USERS);
        Self((1u64 << num_users) - 1)
    }

    pub fn singleton(user: usize) -> Self {
        Self(1u64 << user)
    }

    pub fn nonempty(num_users: usize) -> impl Iterator<Item = SubsetId> {
        (1..=Self::full(num_users).0).map(SubsetId)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, user: usize) -> bool {
        user < 64 && self.0 >> user & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetId) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement relative to the first `num_users` users.
    pub fn complement(self, num_users: usize) -> Self {
        Self(!self.0 & Self::full(num_users).0)
    }

    /// Zero-based member indices in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..64).filter(move |k| mask >> k & 1 == 1)
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.members().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        f.write_str("}")
    }
}

/// `C(ξ) = ½ log2(1 + ξ)`.
pub fn shannon_c(xi: f64) -> Result<f64> {
    if xi.is_nan() || xi < 0.0 {
        return Err(Error::Domain(format!("C(ξ) needs ξ ≥ 0, got {xi}")));
    }
    Ok(0.5 * xi.ln_1p() / std::f64::consts::LN_2)
}

// Only called with validated, nonnegative arguments.
fn c(xi: f64) -> f64 {
    0.5 * xi.ln_1p() / std::f64::consts::LN_2
}

/// `C^M_S = C(P_S / σ1²)`: what the receiver could decode from `s` alone.
pub fn cap_main(cfg: &ChannelConfig, s: SubsetId) -> Result<f64> {
    cfg.check_subset(s)?;
    Ok(c(cfg.power(s) / cfg.sigma1_sq))
}

/// `C^MW_S = C(P_S / (σ1² + σ2²))`.
pub fn cap_wiretap(cfg: &ChannelConfig, s: SubsetId) -> Result<f64> {
    cfg.check_subset(s)?;
    Ok(c(cfg.power(s) / (cfg.sigma1_sq + cfg.sigma2_sq)))
}

/// `C^MW*_S = C(P_S / (P_{S^c} + σ1² + σ2²))`: the wiretapper's rate about `s`
/// when the other users act as noise.
pub fn cap_wiretap_star(cfg: &ChannelConfig, s: SubsetId) -> Result<f64> {
    cfg.check_subset(s)?;
    let rest = cfg.power(s.complement(cfg.num_users));
    Ok(c(cfg.power(s) / (rest + cfg.sigma1_sq + cfg.sigma2_sq)))
}

/// `φ(ξ) = ½ log2[2πe(σ2² + 2^{2ξ}/2πe)] − ξ`, the entropy-power lower bound
/// on `(H(Z) − H(Y))/n` when `H(Y)/n = ξ`.
///
/// Evaluated as `½ log2(1 + 2^t)` with `t = log2(2πe σ2²) − 2ξ` so that large
/// `|ξ|` neither overflows nor cancels.
pub fn epi_phi(xi: f64, sigma2_sq: f64) -> f64 {
    if sigma2_sq <= 0.0 {
        return 0.0;
    }
    let t = (TWO_PI_E * sigma2_sq).log2() - 2.0 * xi;
    // log2(1 + 2^t) = max(t, 0) + log2(1 + 2^{-|t|})
    0.5 * (t.max(0.0) + (-t.abs()).exp2().ln_1p() / std::f64::consts::LN_2)
}

/// Per-symbol lower bound on `H(Z) − H(Y)`: `½ log2(1 + σ2²/(P_K + σ1²))`.
pub fn receiver_entropy_gap_bound(cfg: &ChannelConfig) -> f64 {
    c(cfg.sigma2_sq / (cfg.power(cfg.full_set()) + cfg.sigma1_sq))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ChannelConfig {
        ChannelConfig::new(vec![10.0, 5.0], 1.0, 2.0).unwrap()
    }

    fn s(users: &[usize]) -> SubsetId {
        SubsetId::from_users(users)
    }

    #[test]
    fn shannon_c_values() {
        assert_eq!(shannon_c(0.0).unwrap(), 0.0);
        assert!((shannon_c(3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((shannon_c(15.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(shannon_c(-1e-9), Err(Error::Domain(_))));
        assert!(shannon_c(f64::NAN).is_err());
    }

    #[test]
    fn reference_capacities() {
        let cfg = reference();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(cap_main(&cfg, s(&[0, 1])).unwrap(), 2.0));
        assert!(close(cap_main(&cfg, s(&[0])).unwrap(), 1.729_715_809_318_648_6));
        assert!(close(cap_main(&cfg, s(&[1])).unwrap(), 1.292_481_250_360_578_1));
        assert!(close(cap_wiretap(&cfg, s(&[0, 1])).unwrap(), 1.292_481_250_360_578_1));
        assert!(close(cap_wiretap(&cfg, s(&[0])).unwrap(), 1.057_738_608_709_968_0));
        assert!(close(cap_wiretap_star(&cfg, s(&[0])).unwrap(), 0.584_962_500_721_156_2));
        assert!(close(cap_wiretap_star(&cfg, s(&[1])).unwrap(), 0.234_742_641_650_610_1));
        assert_eq!(
            cap_wiretap_star(&cfg, cfg.full_set()).unwrap(),
            cap_wiretap(&cfg, cfg.full_set()).unwrap()
        );
    }

    #[test]
    fn empty_and_foreign_subsets_rejected() {
        let cfg = reference();
        assert!(cap_main(&cfg, SubsetId::EMPTY).is_err());
        assert!(cap_wiretap(&cfg, SubsetId::EMPTY).is_err());
        assert!(cap_wiretap_star(&cfg, s(&[2])).is_err());
    }

    #[test]
    fn wiretap_capacity_vanishes_with_huge_noise() {
        let cfg = reference().with_sigma2_sq(1e15).unwrap();
        for sub in cfg.subsets() {
            assert!(cap_wiretap(&cfg, sub).unwrap() < 1e-13);
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(epi_phi(1.3, 0.0), 0.0);
        assert_eq!(epi_phi(-40.0, 0.0), 0.0);
        let xi = 0.5 * TWO_PI_E.log2();
        assert!((epi_phi(xi, 2.0) - 0.792_481_250_360_578_1).abs() < 1e-12);
        assert!(epi_phi(1.0, 2.0) >= epi_phi(2.0, 2.0));
        // far tails stay finite
        assert!(epi_phi(1e6, 2.0) >= 0.0);
        assert!(epi_phi(-1e6, 2.0).is_finite());
    }

    #[test]
    fn entropy_gap_matches_phi() {
        let cfg = reference();
        let gap = receiver_entropy_gap_bound(&cfg);
        assert!((gap - 0.084_962_500_721_156_18).abs() < 1e-12);
        let xi = 0.5 * (TWO_PI_E * 16.0).log2();
        assert!((gap - epi_phi(xi, 2.0)).abs() < 1e-12);
        let quiet = reference().with_sigma2_sq(0.0).unwrap();
        assert_eq!(receiver_entropy_gap_bound(&quiet), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(ChannelConfig::new(vec![], 1.0, 1.0).is_err());
        assert!(ChannelConfig::new(vec![1.0, 0.0], 1.0, 1.0).is_err());
        assert!(ChannelConfig::new(vec![1.0], 0.0, 1.0).is_err());
        assert!(ChannelConfig::new(vec![1.0], 1.0, -1.0).is_err());
        assert!(ChannelConfig::new(vec![1.0], 1.0, 0.0).is_ok());
        assert!(ChannelConfig::with_users(2, vec![1.0], 1.0, 1.0).is_err());
    }

    #[test]
    fn config_json_is_strict() {
        let ok = r#"{"num_users":2,"p_max":[10,5],"sigma1_sq":1,"sigma2_sq":2}"#;
        assert_eq!(ChannelConfig::from_json(ok).unwrap(), reference());
        let extra = r#"{"num_users":2,"p_max":[10,5],"sigma1_sq":1,"sigma2_sq":2,"delta":1}"#;
        assert!(ChannelConfig::from_json(extra).is_err());
        let missing = r#"{"num_users":2,"p_max":[10,5],"sigma1_sq":1}"#;
        assert!(ChannelConfig::from_json(missing).is_err());
        let bad = r#"{"num_users":3,"p_max":[10,5],"sigma1_sq":1,"sigma2_sq":2}"#;
        assert!(ChannelConfig::from_json(bad).is_err());
    }

    #[test]
    fn secrecy_level_bounds() {
        assert!(SecrecyLevel::new(-0.01).is_err());
        assert!(SecrecyLevel::new(1.01).is_err());
        assert!(SecrecyLevel::new(f64::NAN).is_err());
        assert_eq!(SecrecyLevel::NONE.scale(3.0), f64::INFINITY);
        assert_eq!(SecrecyLevel::new(0.5).unwrap().scale(3.0), 6.0);
    }

    #[test]
    fn subset_helpers() {
        let a = s(&[0, 2]);
        assert_eq!(a.mask(), 0b101);
        assert_eq!(a.complement(3), s(&[1]));
        assert_eq!(a.members().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(a.to_string(), "{1,3}");
        assert_eq!(SubsetId::nonempty(2).count(), 3);
        assert!(s(&[0]).is_subset_of(a));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn config() -> impl Strategy<Value = ChannelConfig> {
        (
            prop::collection::vec(0.01f64..1e4, 1..=5),
            0.01f64..100.0,
            0.0f64..1e3,
        )
            .prop_map(|(p, s1, s2)| ChannelConfig::new(p, s1, s2).unwrap())
    }

    proptest! {
        #[test]
        fn capacity_ordering(cfg in config()) {
            for s in cfg.subsets() {
                let m = cap_main(&cfg, s).unwrap();
                let w = cap_wiretap(&cfg, s).unwrap();
                let ws = cap_wiretap_star(&cfg, s).unwrap();
                prop_assert!(m >= w && w >= ws && ws >= 0.0);
            }
            let full = cfg.full_set();
            prop_assert_eq!(cap_wiretap_star(&cfg, full).unwrap(), cap_wiretap(&cfg, full).unwrap());
        }

        #[test]
        fn main_capacity_monotone_under_inclusion(cfg in config()) {
            for a in cfg.subsets() {
                for b in cfg.subsets().filter(|b| a.is_subset_of(*b)) {
                    prop_assert!(cap_main(&cfg, a).unwrap() <= cap_main(&cfg, b).unwrap());
                }
            }
        }

        #[test]
        fn phi_nonincreasing(x1 in -20.0f64..40.0, dx in 0.0f64..20.0, s2 in 0.0f64..1e4) {
            let (a, b) = (epi_phi(x1, s2), epi_phi(x1 + dx, s2));
            prop_assert!(a >= b && b >= 0.0);
        }
    }

    #[test]
    fn shannon_c_increasing_and_concave() {
        let grid: Vec<f64> = (0..2000).map(|i| i as f64 * 0.05).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| shannon_c(x).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
        for w in vals.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-15);
        }
    }
}
