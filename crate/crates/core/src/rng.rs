//! Deterministic random streams for parallel Monte-Carlo work.
//!
//! Every trial draws from its own ChaCha stream keyed by
//! `(seed, graph index, trial index)`, so results do not depend on how work
//! is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, graph: usize, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((graph as u64) << 32) ^ trial);
    rng
}

/// Stream for auxiliary draws that are not per-trial (shuffles, topology).
pub fn aux_rng(seed: u64, purpose: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(purpose);
    rng
}

/// Visits the indices of successful Bernoulli(`p`) trials among `0..n`,
/// skipping failures geometrically.
pub struct BernoulliSkip {
    ln_q: f64,
    p: f64,
}

impl BernoulliSkip {
    pub fn new(p: f64) -> Self {
        BernoulliSkip {
            ln_q: (-p).ln_1p(),
            p,
        }
    }

    pub fn for_each<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, mut f: impl FnMut(usize)) {
        if self.p <= 0.0 || n == 0 {
            return;
        }
        if self.p >= 1.0 {
            (0..n).for_each(f);
            return;
        }
        let mut i = 0usize;
        loop {
            // u in (0, 1]
            let u: f64 = 1.0 - rng.random::<f64>();
            let skip = (u.ln() / self.ln_q).floor();
            if skip >= (n - i) as f64 {
                return;
            }
            i += skip as usize;
            f(i);
            i += 1;
            if i >= n {
                return;
            }
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}
