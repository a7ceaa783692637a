//! Exact equivocation of tiny finite-alphabet multiple-access wiretap codes.
//!
//! A spec lists each user's encoder as a table `message × local randomness →
//! length-n input string`, a memoryless main channel from the joint input
//! symbol to `Y`, and a memoryless wiretap channel from `Y` to `Z`. Because the
//! wiretapper only sees the main output through a second channel, every spec is
//! degraded by construction. The joint law of `(W_1, …, W_K, Z^n)` is built by
//! enumeration and `Δ_S = H(W_S|Z)/H(W_S)` is computed for every nonempty `S`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::SubsetId;
use crate::error::{Error, Result};

/// Largest `Π M_k · |Z|^n` accepted.
pub const MAX_STATES: f64 = 1e7;
/// Largest `Π M_k · Π L_k · |Z|^n` accepted.
pub const MAX_WORK: f64 = 1e9;
pub const PROB_TOL: f64 = 1e-12;
pub const PATH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Encoder {
    /// Size of the local randomness alphabet, drawn uniformly.
    pub randomness: usize,
    /// `table[w][u]` is the input string sent for message `w` and randomness `u`.
    pub table: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteWiretapSpec {
    #[serde(default)]
    pub name: String,
    pub num_users: usize,
    pub message_counts: Vec<usize>,
    /// Message laws; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message_probs: Option<Vec<Vec<f64>>>,
    pub block_length: usize,
    pub input_alphabets: Vec<usize>,
    pub encoders: Vec<Encoder>,
    /// Rows indexed by the joint input symbol, user 1 most significant.
    pub main_channel: Vec<Vec<f64>>,
    /// `|Y| × |Z|` matrix applied to the main output.
    pub wiretap_channel: Vec<Vec<f64>>,
}

fn check_stochastic(name: &str, rows: &[Vec<f64>], cols: usize) -> Result<()> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(Error::InvalidConfig(format!("{name} row {i} has {} entries, expected {cols}", r.len())));
        }
        if r.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidConfig(format!("{name} row {i} has a negative or non-finite entry")));
        }
        let s: f64 = r.iter().sum();
        if (s - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidConfig(format!("{name} row {i} sums to {s}")));
        }
    }
    Ok(())
}

impl DiscreteWiretapSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn y_size(&self) -> usize {
        self.main_channel.first().map_or(0, Vec::len)
    }

    pub fn z_size(&self) -> usize {
        self.wiretap_channel.first().map_or(0, Vec::len)
    }

    /// `Π M_k · |Z|^n`.
    pub fn state_count(&self) -> f64 {
        self.message_counts.iter().map(|&m| m as f64).product::<f64>()
            * (self.z_size() as f64).powi(self.block_length as i32)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_users;
        if k == 0 || k > 16 {
            return Err(Error::InvalidConfig(format!("num_users = {k} must be in 1..=16")));
        }
        for (name, len) in [
            ("message_counts", self.message_counts.len()),
            ("input_alphabets", self.input_alphabets.len()),
            ("encoders", self.encoders.len()),
        ] {
            if len != k {
                return Err(Error::InvalidConfig(format!("{name} has {len} entries for {k} users")));
            }
        }
        if self.block_length == 0 {
            return Err(Error::InvalidConfig("block_length must be at least 1".into()));
        }
        if self.message_counts.contains(&0) || self.input_alphabets.contains(&0) {
            return Err(Error::InvalidConfig("message counts and alphabets must be nonzero".into()));
        }
        for (j, enc) in self.encoders.iter().enumerate() {
            let u = j + 1;
            if enc.randomness == 0 {
                return Err(Error::InvalidConfig(format!("user {u}: randomness must be at least 1")));
            }
            if enc.table.len() != self.message_counts[j] {
                return Err(Error::InvalidConfig(format!("user {u}: table needs one row per message")));
            }
            for row in &enc.table {
                if row.len() != enc.randomness {
                    return Err(Error::InvalidConfig(format!(
                        "user {u}: each message needs one string per randomness value"
                    )));
                }
                for word in row {
                    if word.len() != self.block_length {
                        return Err(Error::InvalidConfig(format!("user {u}: strings must have block_length symbols")));
                    }
                    if let Some(s) = word.iter().find(|&&s| s >= self.input_alphabets[j]) {
                        return Err(Error::InvalidConfig(format!("user {u}: symbol {s} outside the input alphabet")));
                    }
                }
            }
        }
        if let Some(probs) = &self.message_probs {
            if probs.len() != k {
                return Err(Error::InvalidConfig("message_probs needs one law per user".into()));
            }
            for (j, p) in probs.iter().enumerate() {
                check_stochastic("message_probs", std::slice::from_ref(p), self.message_counts[j])?;
            }
        }
        let joint: usize = self.input_alphabets.iter().product();
        if self.main_channel.len() != joint {
            return Err(Error::InvalidConfig(format!(
                "main_channel has {} rows, expected one per joint input symbol ({joint})",
                self.main_channel.len()
            )));
        }
        let y = self.y_size();
        if y == 0 {
            return Err(Error::InvalidConfig("main_channel output alphabet is empty".into()));
        }
        check_stochastic("main_channel", &self.main_channel, y)?;
        if self.wiretap_channel.len() != y {
            return Err(Error::InvalidConfig(format!(
                "wiretap_channel must have one row per main output symbol ({y})"
            )));
        }
        let z = self.z_size();
        if z == 0 {
            return Err(Error::InvalidConfig("wiretap_channel output alphabet is empty".into()));
        }
        check_stochastic("wiretap_channel", &self.wiretap_channel, z)?;
        Ok(())
    }

    fn message_law(&self, user: usize) -> Vec<f64> {
        match &self.message_probs {
            Some(p) => p[user].clone(),
            None => vec![1.0 / self.message_counts[user] as f64; self.message_counts[user]],
        }
    }

    /// Appends a further channel `Z → Z'` to the wiretapper's output.
    pub fn degrade(&self, extra: &[Vec<f64>]) -> Result<Self> {
        if extra.len() != self.z_size() {
            return Err(Error::DimensionMismatch { expected: self.z_size(), got: extra.len() });
        }
        let cols = extra.first().map_or(0, Vec::len);
        check_stochastic("extra channel", extra, cols)?;
        let wiretap_channel = self
            .wiretap_channel
            .iter()
            .map(|row| {
                (0..cols).map(|c| row.iter().zip(extra).map(|(p, e)| p * e[c]).sum()).collect()
            })
            .collect();
        let out = Self { wiretap_channel, ..self.clone() };
        out.validate()?;
        Ok(out)
    }
}

/// Joint law of the message tuple and `Z^n`, row-major over
/// `(w_1, …, w_K)` (user 1 most significant) then `z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub message_counts: Vec<usize>,
    pub z_states: usize,
    pub probs: Vec<f64>,
}

impl JointDistribution {
    pub fn message_states(&self) -> usize {
        self.message_counts.iter().product()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn message_tuple(&self, mut idx: usize) -> Vec<usize> {
        let mut w = vec![0; self.message_counts.len()];
        for j in (0..w.len()).rev() {
            w[j] = idx % self.message_counts[j];
            idx /= self.message_counts[j];
        }
        w
    }
}

fn decompose(mut idx: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for j in (0..radices.len()).rev() {
        out[j] = idx % radices[j];
        idx /= radices[j];
    }
    out
}

pub fn joint_distribution(spec: &DiscreteWiretapSpec) -> Result<JointDistribution> {
    spec.validate()?;
    let states = spec.state_count();
    if states > MAX_STATES {
        return Err(Error::SizeCap {
            count: states,
            cap: MAX_STATES as u64,
            advice: "shrink the message sets, the wiretap alphabet or the block length".into(),
        });
    }
    let work = states * spec.encoders.iter().map(|e| e.randomness as f64).product::<f64>();
    if work > MAX_WORK {
        return Err(Error::SizeCap {
            count: work,
            cap: MAX_WORK as u64,
            advice: "shrink the local randomness alphabets".into(),
        });
    }
    let k = spec.num_users;
    let n = spec.block_length;
    let zs = spec.z_size();
    // per-symbol law of Z given the joint input symbol
    let composite: Vec<Vec<f64>> = spec
        .main_channel
        .iter()
        .map(|row| {
            (0..zs).map(|z| row.iter().zip(&spec.wiretap_channel).map(|(p, v)| p * v[z]).sum()).collect()
        })
        .collect();
    let z_states = zs.pow(n as u32);
    let laws: Vec<Vec<f64>> = (0..k).map(|j| spec.message_law(j)).collect();
    let rand_sizes: Vec<usize> = spec.encoders.iter().map(|e| e.randomness).collect();
    let rand_states: usize = rand_sizes.iter().product();
    let rand_weight = 1.0 / rand_states as f64;
    let m_states: usize = spec.message_counts.iter().product();

    let mut probs = vec![0.0; m_states * z_states];
    let mut dist = Vec::with_capacity(z_states);
    let mut next = Vec::with_capacity(z_states);
    for wi in 0..m_states {
        let w = decompose(wi, &spec.message_counts);
        let pw: f64 = w.iter().enumerate().map(|(j, &m)| laws[j][m]).product();
        if pw == 0.0 {
            continue;
        }
        let row = &mut probs[wi * z_states..(wi + 1) * z_states];
        for ui in 0..rand_states {
            let u = decompose(ui, &rand_sizes);
            dist.clear();
            dist.push(pw * rand_weight);
            for t in 0..n {
                let mut sym = 0;
                for j in 0..k {
                    sym = sym * spec.input_alphabets[j] + spec.encoders[j].table[w[j]][u[j]][t];
                }
                let pz = &composite[sym];
                next.clear();
                for &d in &dist {
                    next.extend(pz.iter().map(|p| d * p));
                }
                std::mem::swap(&mut dist, &mut next);
            }
            for (r, d) in row.iter_mut().zip(&dist) {
                *r += d;
            }
        }
    }
    Ok(JointDistribution { message_counts: spec.message_counts.clone(), z_states, probs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetEquivocation {
    pub subset: String,
    pub subset_mask: u64,
    /// `H(W_S)` in bits.
    pub h_messages: f64,
    /// `H(W_S | Z)` in bits.
    pub h_messages_given_z: f64,
    pub mutual_information: f64,
    /// `H(W_S|Z) / H(W_S)`, clamped to `[0, 1]`.
    pub delta: f64,
    /// `1 − I(W_S;Z) / H(W_S)`, clamped to `[0, 1]`.
    pub delta_via_information: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advisory: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivocationReport {
    pub name: String,
    /// Every nonempty subset, by increasing mask.
    pub subsets: Vec<SubsetEquivocation>,
    pub min_delta: f64,
    /// Largest disagreement between the two computation paths.
    pub max_path_gap: f64,
}

impl EquivocationReport {
    pub fn delta(&self, s: SubsetId) -> Option<f64> {
        self.subsets.iter().find(|e| e.subset_mask == s.mask()).map(|e| e.delta)
    }

    /// `min_S Δ_S ≥ δ − 1e-12`.
    pub fn achieves(&self, delta: f64) -> bool {
        self.min_delta >= delta - PROB_TOL
    }
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

pub fn exact_equivocation(spec: &DiscreteWiretapSpec) -> Result<EquivocationReport> {
    let joint = joint_distribution(spec)?;
    Ok(equivocation_from_joint(&joint, &spec.name))
}

pub fn equivocation_from_joint(joint: &JointDistribution, name: &str) -> EquivocationReport {
    let k = joint.message_counts.len();
    let zn = joint.z_states;
    let m_states = joint.message_states();
    let mut pz = vec![0.0; zn];
    for wi in 0..m_states {
        for (acc, p) in pz.iter_mut().zip(&joint.probs[wi * zn..(wi + 1) * zn]) {
            *acc += p;
        }
    }
    let hz = entropy(&pz);
    let tuples: Vec<Vec<usize>> = (0..m_states).map(|i| joint.message_tuple(i)).collect();

    let mut subsets = Vec::new();
    for mask in 1..(1u64 << k) {
        let s = SubsetId::from_mask(mask);
        let members: Vec<usize> = s.members().collect();
        let radices: Vec<usize> = members.iter().map(|&j| joint.message_counts[j]).collect();
        let s_states: usize = radices.iter().product();
        let mut pws_z = vec![0.0; s_states * zn];
        for (wi, w) in tuples.iter().enumerate() {
            let si = members.iter().fold(0, |acc, &j| acc * joint.message_counts[j] + w[j]);
            let dst = &mut pws_z[si * zn..(si + 1) * zn];
            for (d, p) in dst.iter_mut().zip(&joint.probs[wi * zn..(wi + 1) * zn]) {
                *d += p;
            }
        }
        let pws: Vec<f64> = pws_z.chunks(zn).map(|c| c.iter().sum()).collect();
        let h_ws = entropy(&pws);
        let h_cond = (entropy(&pws_z) - hz).max(0.0);
        let mut info = 0.0;
        for (si, row) in pws_z.chunks(zn).enumerate() {
            for (zi, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    info += p * (p / (pws[si] * pz[zi])).log2();
                }
            }
        }
        let info = info.max(0.0);
        let (delta, via_info, advisory) = if h_ws <= 0.0 {
            (1.0, 1.0, Some("H(W_S) = 0: messages of this subset are deterministic, Δ_S taken as 1".to_string()))
        } else {
            ((h_cond / h_ws).clamp(0.0, 1.0), (1.0 - info / h_ws).clamp(0.0, 1.0), None)
        };
        subsets.push(SubsetEquivocation {
            subset: s.to_string(),
            subset_mask: mask,
            h_messages: h_ws,
            h_messages_given_z: h_cond,
            mutual_information: info,
            delta,
            delta_via_information: via_info,
            advisory,
        });
    }
    let min_delta = subsets.iter().map(|e| e.delta).fold(1.0, f64::min);
    let max_path_gap = subsets.iter().map(|e| (e.delta - e.delta_via_information).abs()).fold(0.0, f64::max);
    EquivocationReport { name: name.to_string(), subsets, min_delta, max_path_gap }
}

/// Whether every nonempty subset keeps `Δ_S ≥ δ − 1e-12`.
pub fn check_delta_achievability(spec: &DiscreteWiretapSpec, delta: f64) -> Result<bool> {
    Ok(exact_equivocation(spec)?.achieves(delta))
}

/// Builders for the standard toy codes.
pub mod toys {
    use super::*;

    fn identity(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    }

    /// Joint input symbols `(x_1, …, x_K)` over `Z_q`, user 1 most significant.
    fn joint_symbols(k: usize, q: usize) -> Vec<Vec<usize>> {
        (0..q.pow(k as u32)).map(|i| decompose(i, &vec![q; k])).collect()
    }

    /// `K` users over `Z_q`, `n = 1`. Padded users send `W + U mod q` with
    /// fresh uniform `U`, others send `W`. The main channel is noiseless and the
    /// wiretapper observes `g(Σ X_k mod q)` through the `q × |Z|` map `g`.
    pub fn mod_pad(k: usize, q: usize, padded: &[bool], g: &[Vec<f64>]) -> DiscreteWiretapSpec {
        let encoders = padded
            .iter()
            .map(|&pad| {
                let l = if pad { q } else { 1 };
                Encoder {
                    randomness: l,
                    table: (0..q).map(|w| (0..l).map(|u| vec![(w + u) % q]).collect()).collect(),
                }
            })
            .collect();
        let joint = q.pow(k as u32);
        let wiretap_channel = joint_symbols(k, q)
            .iter()
            .map(|x| g[x.iter().sum::<usize>() % q].clone())
            .collect();
        DiscreteWiretapSpec {
            name: format!("mod{q}_pad"),
            num_users: k,
            message_counts: vec![q; k],
            message_probs: None,
            block_length: 1,
            input_alphabets: vec![q; k],
            encoders,
            main_channel: identity(joint),
            wiretap_channel,
        }
    }

    /// Two binary users, `X_k = W_k ⊕ U_k`, wiretapper sees `X_1 ⊕ X_2`.
    pub fn one_time_pad() -> DiscreteWiretapSpec {
        DiscreteWiretapSpec { name: "one_time_pad".into(), ..mod_pad(2, 2, &[true, true], &identity(2)) }
    }

    /// Two binary users sent in the clear; the wiretapper sees `(W_1, W_2)`.
    pub fn full_leakage() -> DiscreteWiretapSpec {
        DiscreteWiretapSpec {
            name: "full_leakage".into(),
            num_users: 2,
            message_counts: vec![2, 2],
            message_probs: None,
            block_length: 1,
            input_alphabets: vec![2, 2],
            encoders: vec![
                Encoder { randomness: 1, table: vec![vec![vec![0]], vec![vec![1]]] };
                2
            ],
            main_channel: identity(4),
            wiretap_channel: identity(4),
        }
    }

    /// As [`full_leakage`] but the wiretapper's output is constant.
    pub fn constant_output() -> DiscreteWiretapSpec {
        DiscreteWiretapSpec {
            name: "constant_output".into(),
            wiretap_channel: vec![vec![1.0]; 4],
            ..full_leakage()
        }
    }
}
