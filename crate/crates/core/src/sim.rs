//! Monte Carlo trials of the superposition scheme over the AWGN cascade.
//!
//! Each user owns three Gaussian codebooks (secret, open, randomization) and
//! transmits the sum of one codeword from each. The receiver decodes every
//! index jointly by exhaustive nearest-neighbour search; the wiretapper, given
//! the secret indices, searches the open/randomization combinations for the
//! aggregate codeword `X_Σ = Σ_k X_k`.
//!
//! The power constraint `(1/n) Σ x_i² ≤ P_k` is enforced on every transmitted
//! word by radial scaling onto the power sphere when it would be exceeded.
//! Decoders search over the scaled words, so they see the true codebook.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelConfig;
use crate::error::{Error, Result};
use crate::split::{default_power_split, PowerSplit, SplitPlan};

/// Default limit on jointly searched candidates, `2^20`.
pub const DEFAULT_CANDIDATE_CAP: u64 = 1 << 20;

const POWER_BACKOFF: f64 = 1.0 - 1e-12;

/// Codewords of one class, stored row-major (`count × n`).
#[derive(Debug, Clone, PartialEq)]
struct ClassBook {
    count: usize,
    words: Vec<f64>,
}

impl ClassBook {
    fn word(&self, i: usize, n: usize) -> &[f64] {
        &self.words[i * n..(i + 1) * n]
    }
}

#[derive(Debug, Clone, PartialEq)]
struct UserBook {
    max_power: f64,
    /// secret, open, randomization
    classes: [ClassBook; 3],
}

impl UserBook {
    fn combos(&self) -> usize {
        self.classes.iter().map(|c| c.count).product()
    }

    /// Transmitted word for `(s, o, x)` after power enforcement.
    fn transmit_word(&self, s: usize, o: usize, x: usize, n: usize) -> Vec<f64> {
        let [cs, c0, cx] = &self.classes;
        let (a, b, c) = (cs.word(s, n), c0.word(o, n), cx.word(x, n));
        let mut w: Vec<f64> = (0..n).map(|i| a[i] + b[i] + c[i]).collect();
        let power = w.iter().map(|v| v * v).sum::<f64>() / n as f64;
        if power > self.max_power {
            let f = (self.max_power / power).sqrt() * POWER_BACKOFF;
            for v in &mut w {
                *v *= f;
            }
        }
        w
    }
}

/// All codebooks of one simulation, plus the channel they are used on.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    cfg: ChannelConfig,
    n: usize,
    cap: u64,
    users: Vec<UserBook>,
}

/// Message indices of one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Message {
    pub secret: usize,
    pub open: usize,
}

/// Decoded indices of one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Indices {
    pub secret: usize,
    pub open: usize,
    pub dither: usize,
}

impl Indices {
    pub fn message(&self) -> Message {
        Message { secret: self.secret, open: self.open }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    /// Transmitted word of each user.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// Randomization indices actually used.
    pub dither: Vec<usize>,
}

impl ChannelOutput {
    pub fn aggregate(&self) -> Vec<f64> {
        sum_vectors(&self.x, self.y.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EveEstimate {
    pub open: Vec<usize>,
    pub dither: Vec<usize>,
    pub aggregate: Vec<f64>,
}

fn sum_vectors(vs: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for v in vs {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    out
}

fn size_cap_error(bits: u32, cap: u64, plan: &SplitPlan) -> Error {
    let rate = plan.total_rate();
    let max_n = if rate > 0.0 { ((cap as f64).log2() / rate).floor() } else { f64::INFINITY };
    Error::SizeCap {
        count: (bits as f64).exp2(),
        cap,
        advice: format!(
            "joint search needs 2^{bits} candidates; at a total rate of {rate:.4} bits/use \
             use a block length n ≤ {max_n}, lower the rates, or raise the cap"
        ),
    }
}

/// Draws the three codebooks of every user from `N(0, λP − ε)`.
///
/// The plan must be integerized. Fails with [`Error::SizeCap`] when the joint
/// receiver search `Π_k M_ks M_k0 M_kx` would exceed `cap`.
pub fn generate_codebooks(
    cfg: &ChannelConfig,
    plan: &SplitPlan,
    power: &PowerSplit,
    seed: u64,
    cap: u64,
) -> Result<Codebook> {
    let bits = plan_bits(cfg, plan, cap)?;
    let n = plan.n.expect("checked by plan_bits") as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = bits
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let var = power.variances(cfg, k);
            let classes = [0, 1, 2].map(|c| {
                let count = 1usize << b[c];
                let sd = var[c].sqrt();
                let words = (0..count * n)
                    .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                ClassBook { count, words }
            });
            UserBook { max_power: cfg.p_max()[k], classes }
        })
        .collect();
    Ok(Codebook { cfg: cfg.clone(), n, cap, users })
}

fn plan_bits(cfg: &ChannelConfig, plan: &SplitPlan, cap: u64) -> Result<Vec<[u32; 3]>> {
    plan.validate()?;
    if plan.num_users() != cfg.num_users() {
        return Err(Error::DimensionMismatch { expected: cfg.num_users(), got: plan.num_users() });
    }
    let bits = plan
        .message_bits()
        .ok_or_else(|| Error::Domain("plan must be integerized before simulation".into()))?;
    let total: u32 = bits.iter().flatten().sum();
    if cap == 0 || total as f64 > (cap as f64).log2() {
        return Err(size_cap_error(total, cap, plan));
    }
    Ok(bits)
}

impl Codebook {
    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn cfg(&self) -> &ChannelConfig {
        &self.cfg
    }

    /// `[M_ks, M_k0, M_kx]` for each user.
    pub fn counts(&self) -> Vec<[usize; 3]> {
        self.users.iter().map(|u| u.classes.each_ref().map(|c| c.count)).collect()
    }

    /// Candidates in a joint receiver search.
    pub fn receiver_candidates(&self) -> f64 {
        self.users.iter().map(|u| u.combos() as f64).product()
    }

    pub fn transmit_word(&self, user: usize, idx: Indices) -> Result<Vec<f64>> {
        let u = self
            .users
            .get(user)
            .ok_or_else(|| Error::IndexOutOfRange(format!("user {user}")))?;
        for (name, i, c) in [
            ("secret", idx.secret, &u.classes[0]),
            ("open", idx.open, &u.classes[1]),
            ("dither", idx.dither, &u.classes[2]),
        ] {
            if i >= c.count {
                return Err(Error::IndexOutOfRange(format!(
                    "user {} {name} index {i} ≥ {}",
                    user + 1,
                    c.count
                )));
            }
        }
        Ok(u.transmit_word(idx.secret, idx.open, idx.dither, self.n))
    }

    fn check_cap(&self, count: f64) -> Result<()> {
        if count > self.cap as f64 {
            return Err(Error::SizeCap {
                count,
                cap: self.cap,
                advice: "lower the rates or the block length, or raise the cap".into(),
            });
        }
        Ok(())
    }
}

/// Sends one block: `X_k` is the (power-limited) sum of the selected
/// codewords, `Y = Σ X_k + N1`, `Z = Y + N2`. Randomization indices are drawn
/// uniformly from `rng` when `dither` is `None`.
pub fn transmit<R: Rng>(
    book: &Codebook,
    messages: &[Message],
    dither: Option<&[usize]>,
    rng: &mut R,
) -> Result<ChannelOutput> {
    let k = book.num_users();
    if messages.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: messages.len() });
    }
    if let Some(d) = dither {
        if d.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: d.len() });
        }
    }
    let dither: Vec<usize> = match dither {
        Some(d) => d.to_vec(),
        None => book.users.iter().map(|u| rng.random_range(0..u.classes[2].count)).collect(),
    };
    let x = (0..k)
        .map(|j| {
            let m = messages[j];
            book.transmit_word(j, Indices { secret: m.secret, open: m.open, dither: dither[j] })
        })
        .collect::<Result<Vec<_>>>()?;
    let s1 = book.cfg.sigma1_sq().sqrt();
    let s2 = book.cfg.sigma2_sq().sqrt();
    let mut y = sum_vectors(&x, book.n);
    for v in &mut y {
        *v += s1 * rng.sample::<f64, _>(StandardNormal);
    }
    let z = y.iter().map(|v| v + s2 * rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(ChannelOutput { x, y, z, dither })
}

/// Candidate words of one user for a joint search.
struct Candidates {
    indices: Vec<Indices>,
    words: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

impl Candidates {
    fn new(book: &Codebook, user: usize, fixed_secret: Option<usize>) -> Self {
        let u = &book.users[user];
        let [cs, c0, cx] = &u.classes;
        let secrets: Vec<usize> = match fixed_secret {
            Some(s) => vec![s],
            None => (0..cs.count).collect(),
        };
        let mut indices = Vec::new();
        let mut words = Vec::new();
        for &s in &secrets {
            for o in 0..c0.count {
                for x in 0..cx.count {
                    indices.push(Indices { secret: s, open: o, dither: x });
                    words.push(u.transmit_word(s, o, x, book.n));
                }
            }
        }
        let norms = words.iter().map(|w| w.iter().map(|v| v * v).sum()).collect();
        Self { indices, words, norms }
    }
}

/// Minimizes `‖target − Σ_k w_k‖²` over the product of candidate lists;
/// the first minimizer in lexicographic order wins.
fn joint_search(target: &[f64], lists: &[Candidates]) -> Vec<usize> {
    struct State<'a> {
        lists: &'a [Candidates],
        best: f64,
        best_idx: Vec<usize>,
        cur: Vec<usize>,
    }
    fn go(st: &mut State<'_>, depth: usize, residual: &[f64], norm: f64) {
        let list = &st.lists[depth];
        let last = depth + 1 == st.lists.len();
        for (i, w) in list.words.iter().enumerate() {
            let dot: f64 = residual.iter().zip(w).map(|(r, v)| r * v).sum();
            let d = norm - 2.0 * dot + list.norms[i];
            st.cur[depth] = i;
            if last {
                if d < st.best {
                    st.best = d;
                    st.best_idx.copy_from_slice(&st.cur);
                }
            } else {
                let next: Vec<f64> = residual.iter().zip(w).map(|(r, v)| r - v).collect();
                go(st, depth + 1, &next, d);
            }
        }
    }
    let k = lists.len();
    let mut st = State { lists, best: f64::INFINITY, best_idx: vec![0; k], cur: vec![0; k] };
    let norm = target.iter().map(|v| v * v).sum();
    go(&mut st, 0, target, norm);
    st.best_idx
}

/// Joint nearest-neighbour decoding of every user's indices from `y`.
pub fn decode_receiver(book: &Codebook, y: &[f64]) -> Result<Vec<Indices>> {
    if y.len() != book.n {
        return Err(Error::DimensionMismatch { expected: book.n, got: y.len() });
    }
    book.check_cap(book.receiver_candidates())?;
    let lists: Vec<Candidates> = (0..book.num_users()).map(|j| Candidates::new(book, j, None)).collect();
    Ok(decode_with(&lists, y))
}

fn decode_with(lists: &[Candidates], target: &[f64]) -> Vec<Indices> {
    joint_search(target, lists)
        .into_iter()
        .zip(lists)
        .map(|(i, l)| l.indices[i])
        .collect()
}

/// The wiretapper's estimate of `X_Σ` from `z` when it knows every secret
/// index, by nearest-neighbour search over the open/randomization combinations.
pub fn eve_decode_aggregate(book: &Codebook, z: &[f64], secrets: &[usize]) -> Result<EveEstimate> {
    if z.len() != book.n {
        return Err(Error::DimensionMismatch { expected: book.n, got: z.len() });
    }
    if secrets.len() != book.num_users() {
        return Err(Error::DimensionMismatch { expected: book.num_users(), got: secrets.len() });
    }
    for (j, (&s, u)) in secrets.iter().zip(&book.users).enumerate() {
        if s >= u.classes[0].count {
            return Err(Error::IndexOutOfRange(format!("user {} secret index {s}", j + 1)));
        }
    }
    let count: f64 = book.users.iter().map(|u| (u.classes[1].count * u.classes[2].count) as f64).product();
    book.check_cap(count)?;
    let lists: Vec<Candidates> =
        (0..book.num_users()).map(|j| Candidates::new(book, j, Some(secrets[j]))).collect();
    Ok(eve_with(&lists, z, book.n))
}

fn eve_with(lists: &[Candidates], z: &[f64], n: usize) -> EveEstimate {
    let best = joint_search(z, lists);
    let words: Vec<Vec<f64>> = best.iter().zip(lists).map(|(&i, l)| l.words[i].clone()).collect();
    EveEstimate {
        open: best.iter().zip(lists).map(|(&i, l)| l.indices[i].open).collect(),
        dither: best.iter().zip(lists).map(|(&i, l)| l.indices[i].dither).collect(),
        aggregate: sum_vectors(&words, n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimOptions {
    pub trials: usize,
    pub seed: u64,
    pub cap: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { trials: 200, seed: 0, cap: DEFAULT_CANDIDATE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub trials: usize,
    pub receiver_block_errors: usize,
    pub eve_aggregate_errors: usize,
    pub seed: u64,
    pub n: u32,
    pub cap: u64,
    /// Largest `(1/n)‖X_k‖² / P_k` seen over all users and trials.
    pub max_power_ratio: f64,
    pub config: ChannelConfig,
    pub plan: SplitPlan,
    pub power: PowerSplit,
}

impl SimReport {
    pub fn receiver_error_rate(&self) -> f64 {
        rate(self.receiver_block_errors, self.trials)
    }

    pub fn eve_success_rate(&self) -> f64 {
        1.0 - rate(self.eve_aggregate_errors, self.trials)
    }
}

fn rate(count: usize, trials: usize) -> f64 {
    if trials == 0 {
        0.0
    } else {
        count as f64 / trials as f64
    }
}

/// Runs independent trials with fresh uniform messages, randomization and
/// noise. Codebooks use RNG stream 0 of `seed`, trial `t` uses stream `t + 1`,
/// so the counts do not depend on how trials are scheduled.
pub fn run_trials(cfg: &ChannelConfig, plan: &SplitPlan, opts: &SimOptions) -> Result<SimReport> {
    let power = default_power_split(cfg, plan)?;
    plan_bits(cfg, plan, opts.cap)?;
    let n = plan.n.expect("checked by plan_bits");
    let mut report = SimReport {
        trials: opts.trials,
        receiver_block_errors: 0,
        eve_aggregate_errors: 0,
        seed: opts.seed,
        n,
        cap: opts.cap,
        max_power_ratio: 0.0,
        config: cfg.clone(),
        plan: plan.clone(),
        power: power.clone(),
    };
    if opts.trials == 0 {
        return Ok(report);
    }
    let book = generate_codebooks(cfg, plan, &power, stream_seed(opts.seed, 0), opts.cap)?;
    let k = book.num_users();
    let receiver_lists: Vec<Candidates> = (0..k).map(|j| Candidates::new(&book, j, None)).collect();

    let outcomes: Vec<(bool, bool, f64)> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(t as u64 + 1);
            let messages: Vec<Message> = book
                .users
                .iter()
                .map(|u| Message {
                    secret: rng.random_range(0..u.classes[0].count),
                    open: rng.random_range(0..u.classes[1].count),
                })
                .collect();
            let out = transmit(&book, &messages, None, &mut rng).expect("indices drawn in range");
            let decoded = decode_with(&receiver_lists, &out.y);
            let rx_err = decoded.iter().zip(&messages).any(|(d, m)| d.message() != *m);

            let secrets: Vec<usize> = messages.iter().map(|m| m.secret).collect();
            let eve_lists: Vec<Candidates> =
                (0..k).map(|j| Candidates::new(&book, j, Some(secrets[j]))).collect();
            let est = eve_with(&eve_lists, &out.z, book.n);
            let eve_err = est.aggregate != out.aggregate();

            let ratio = out
                .x
                .iter()
                .zip(cfg.p_max())
                .map(|(x, p)| x.iter().map(|v| v * v).sum::<f64>() / book.n as f64 / p)
                .fold(0.0, f64::max);
            (rx_err, eve_err, ratio)
        })
        .collect();
    for (rx, eve, ratio) in outcomes {
        report.receiver_block_errors += rx as usize;
        report.eve_aggregate_errors += eve as usize;
        report.max_power_ratio = report.max_power_ratio.max(ratio);
    }
    Ok(report)
}

/// Seed for RNG stream `stream` of `seed`; codebooks use stream 0.
fn stream_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.random()
}
