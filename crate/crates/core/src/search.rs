//! Simulated annealing over sets with positive, strictly decreasing second
//! differences, minimizing the doubling exponent `ln|A+A| / ln|A|`.
//!
//! States are parameterized by the second differences `g` and the first gap
//! `d0`, so class membership is a local constraint checked per move.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::sum_rep;
use crate::error::{Error, Result};
use crate::generators::{from_second_differences, stream_rng};
use crate::par;
use crate::set::OrderedIntSet;

/// Proposals drawn before a move gives up.
pub const MOVE_RETRIES: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub initial_temperature: f64,
    /// Geometric factor applied to the temperature after every step.
    pub cooling: f64,
    /// Upper bound on every `g` entry and on `d0`.
    pub ceiling: i64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { initial_temperature: 0.1, cooling: 0.999, ceiling: 1 << 16 }
    }
}

/// Where a chain's random stream stands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngPosition {
    pub seed: u64,
    pub stream: u64,
    pub word_pos: u128,
}

impl RngPosition {
    fn rng(&self) -> ChaCha8Rng {
        let mut rng = stream_rng(self.seed, self.stream);
        rng.set_word_pos(self.word_pos);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    /// Second differences: positive, strictly decreasing.
    pub g: Vec<i64>,
    pub d0: i64,
    pub score: f64,
    pub temperature: f64,
    pub rng: RngPosition,
}

fn valid(g: &[i64], d0: i64, ceiling: i64) -> bool {
    (1..=ceiling).contains(&d0)
        && g.iter().all(|v| (1..=ceiling).contains(v))
        && g.windows(2).all(|w| w[0] > w[1])
}

impl SearchState {
    pub fn new(g: Vec<i64>, d0: i64, temperature: f64, seed: u64, stream: u64) -> Result<Self> {
        if g.is_empty() || !valid(&g, d0, i64::MAX) {
            return Err(Error::Precondition(format!("g = {g:?}, d0 = {d0} is outside the search class")));
        }
        let score = score(&g, d0)?;
        Ok(Self { g, d0, score, temperature, rng: RngPosition { seed, stream, word_pos: 0 } })
    }

    /// Second differences `n - 2, …, 1` with first gap 1.
    pub fn minimal(n: usize, temperature: f64, seed: u64, stream: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Precondition(format!("search needs n >= 3, got {n}")));
        }
        Self::new((1..=(n as i64 - 2)).rev().collect(), 1, temperature, seed, stream)
    }

    pub fn n(&self) -> usize {
        self.g.len() + 2
    }

    pub fn set(&self) -> Result<OrderedIntSet> {
        from_second_differences(&self.g, 0, self.d0)
    }

    pub fn sumset_size(&self) -> Result<usize> {
        let a = self.set()?;
        Ok(sum_rep(&a, &a)?.len())
    }
}

/// `ln|A+A| / ln|A|` for the set built from `(g, d0)`.
pub fn score(g: &[i64], d0: i64) -> Result<f64> {
    let a = from_second_differences(g, 0, d0)?;
    let size = sum_rep(&a, &a)?.len();
    Ok((size as f64).ln() / (a.len() as f64).ln())
}

/// One neighbor of `(g, d0)`: a single entry moved by one. Invalid
/// proposals are redrawn up to [`MOVE_RETRIES`] times.
fn propose_with(state: &SearchState, rng: &mut ChaCha8Rng, ceiling: i64) -> Result<SearchState> {
    let slots = state.g.len() + 1;
    for _ in 0..MOVE_RETRIES {
        let slot = rng.random_range(0..slots);
        let step = if rng.random_bool(0.5) { 1 } else { -1 };
        let mut g = state.g.clone();
        let mut d0 = state.d0;
        if slot == state.g.len() {
            d0 += step;
        } else {
            g[slot] += step;
        }
        if valid(&g, d0, ceiling) {
            let score = score(&g, d0)?;
            return Ok(SearchState { g, d0, score, temperature: state.temperature, rng: state.rng });
        }
    }
    Err(Error::Stuck { retries: MOVE_RETRIES })
}

/// Draws a neighbor from the state's own stream and advances it.
pub fn propose_move(state: &SearchState, params: &SearchParams) -> Result<SearchState> {
    let mut rng = state.rng.rng();
    let mut next = propose_with(state, &mut rng, params.ceiling)?;
    next.rng.word_pos = rng.get_word_pos();
    Ok(next)
}

/// A chain in progress; serializes as a checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub current: SearchState,
    pub best: SearchState,
    pub steps_done: u64,
}

impl Chain {
    pub fn start(initial: SearchState) -> Self {
        Self { best: initial.clone(), current: initial, steps_done: 0 }
    }

    /// Runs `steps` Metropolis steps, accepting a worse score with
    /// probability `exp(-Δ/T)` and cooling after every step.
    pub fn advance(&mut self, steps: u64, params: &SearchParams) -> Result<()> {
        let mut rng = self.current.rng.rng();
        for _ in 0..steps {
            let proposal = propose_with(&self.current, &mut rng, params.ceiling)?;
            let delta = proposal.score - self.current.score;
            let u: f64 = rng.random();
            let temperature = self.current.temperature;
            if delta <= 0.0 || (temperature > 0.0 && u < (-delta / temperature).exp()) {
                self.current = proposal;
            }
            self.current.temperature = temperature * params.cooling;
            self.current.rng.word_pos = rng.get_word_pos();
            self.steps_done += 1;
            if self.current.score < self.best.score {
                self.best = self.current.clone();
            }
        }
        Ok(())
    }
}

/// Best state seen in `steps` annealing steps from `initial`.
pub fn anneal(initial: SearchState, steps: u64, params: &SearchParams) -> Result<SearchState> {
    let mut chain = Chain::start(initial);
    chain.advance(steps, params)?;
    Ok(chain.best)
}

/// Independent chains, chain `i` on random stream `i` of `seed`, all
/// starting from the minimal profile of size `n`.
pub fn run_chains(n: usize, chains: usize, steps: u64, seed: u64, params: &SearchParams) -> Result<Vec<Chain>> {
    par::map_range(chains, |i| {
        let initial = SearchState::minimal(n, params.initial_temperature, seed, i as u64)?;
        let mut chain = Chain::start(initial);
        chain.advance(steps, params)?;
        Ok(chain)
    })
    .into_iter()
    .collect()
}

/// Continues checkpointed chains.
pub fn resume(mut chains: Vec<Chain>, steps: u64, params: &SearchParams) -> Result<Vec<Chain>> {
    let results = par::map(&chains, |c| {
        let mut c = c.clone();
        c.advance(steps, params).map(|_| c)
    });
    for (slot, r) in chains.iter_mut().zip(results) {
        *slot = r?;
    }
    Ok(chains)
}

/// Index of the chain with the lowest best score; earlier chains win ties.
pub fn best_chain(chains: &[Chain]) -> Option<usize> {
    chains
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.best.score.total_cmp(&b.best.score).then(i.cmp(j)))
        .map(|(i, _)| i)
}

/// Smallest `|A+A|` over every strictly decreasing positive `g` of length
/// `n - 2` and every `d0`, all entries at most `ceiling`.
pub fn exhaustive_min_sumset(n: usize, ceiling: i64) -> Result<(usize, Vec<i64>, i64)> {
    if n < 3 {
        return Err(Error::Precondition(format!("search needs n >= 3, got {n}")));
    }
    let len = n - 2;
    let mut best: Option<(usize, Vec<i64>, i64)> = None;
    let mut g: Vec<i64> = (1..=len as i64).rev().collect();
    loop {
        if g[0] > ceiling {
            break;
        }
        for d0 in 1..=ceiling {
            let a = from_second_differences(&g, 0, d0)?;
            let size = sum_rep(&a, &a)?.len();
            if best.as_ref().is_none_or(|b| size < b.0) {
                best = Some((size, g.clone(), d0));
            }
        }
        if !next_decreasing(&mut g) {
            break;
        }
    }
    best.ok_or_else(|| Error::Precondition(format!("no sequence of length {len} fits under {ceiling}")))
}

/// Steps through strictly decreasing positive sequences, ordered by first
/// entry, then second, and so on.
fn next_decreasing(g: &mut [i64]) -> bool {
    let len = g.len();
    // Increment the last position that can grow while staying below its
    // predecessor, then reset everything after it to the minimum.
    for i in (1..len).rev() {
        if g[i] + 1 < g[i - 1] {
            g[i] += 1;
            for (k, v) in g.iter_mut().enumerate().skip(i + 1) {
                *v = (len - k) as i64;
            }
            return true;
        }
    }
    g[0] += 1;
    for (k, v) in g.iter_mut().enumerate().skip(1) {
        *v = (len - k) as i64;
    }
    g[0] < i64::MAX
}
