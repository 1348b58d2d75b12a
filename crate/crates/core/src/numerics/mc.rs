//! Seeded, parallel-deterministic Monte Carlo.
//!
//! Samples are drawn in fixed blocks of [`BLOCK`] draws. Block `b` always uses
//! `ChaCha20Rng::seed_from_u64(seed)` on stream `b`, whichever chunk or
//! thread evaluates it. Per-block moments are merged in block order, so the
//! result depends only on `(seed, samples)`; `chunks` only sets how the blocks
//! are spread over rayon tasks.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Estimate, Method};
use crate::error::{Error, Result};

pub type McRng = ChaCha20Rng;

pub const BLOCK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSpec {
    pub seed: u64,
    pub samples: u64,
    pub chunks: usize,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec { seed: 0x5eed, samples: 200_000, chunks: 8 }
    }
}

impl McSpec {
    pub fn new(seed: u64, samples: u64, chunks: usize) -> Self {
        McSpec { seed, samples, chunks }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::input("Monte Carlo needs at least one sample"));
        }
        if self.chunks == 0 {
            return Err(Error::input("Monte Carlo needs at least one chunk"));
        }
        Ok(())
    }
}

/// Draws i.i.d. points from a declared density.
pub trait Sampler: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut McRng, out: &mut [f64]);
}

impl<S: Sampler + ?Sized> Sampler for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn sample(&self, rng: &mut McRng, out: &mut [f64]) {
        (**self).sample(rng, out)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    // Chan et al. pairwise update.
    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

fn run_block<S, F>(sampler: &S, f: &F, seed: u64, block: u64, len: u64) -> Result<Moments>
where
    S: Sampler + ?Sized,
    F: Fn(&[f64]) -> f64,
{
    let mut rng = McRng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut buf = vec![0.0; sampler.dim()];
    let mut m = Moments::default();
    for i in 0..len {
        sampler.sample(&mut rng, &mut buf);
        let v = f(&buf);
        if v.is_nan() {
            return Err(Error::PoisonedSample { index: block * BLOCK + i });
        }
        m.push(v);
    }
    Ok(m)
}

/// E[f(X)] for X drawn by `sampler`, with standard error sd/√n.
pub fn mc_expectation<S, F>(sampler: &S, f: F, spec: &McSpec) -> Result<Estimate>
where
    S: Sampler + ?Sized,
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    let n_blocks = spec.samples.div_ceil(BLOCK);
    let chunks = (spec.chunks as u64).min(n_blocks).max(1);
    let per_chunk: Vec<Result<Vec<Moments>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * n_blocks / chunks;
            let hi = (c + 1) * n_blocks / chunks;
            (lo..hi)
                .map(|b| {
                    let len = BLOCK.min(spec.samples - b * BLOCK);
                    run_block(sampler, &f, spec.seed, b, len)
                })
                .collect()
        })
        .collect();
    let mut total = Moments::default();
    for chunk in per_chunk {
        for m in chunk? {
            total = total.merge(m);
        }
    }
    let error = if total.n > 1 {
        (total.m2 / (total.n - 1) as f64).sqrt() / (total.n as f64).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        value: total.mean,
        error,
        method: Method::MonteCarlo { seed: spec.seed, samples: spec.samples },
    })
}
