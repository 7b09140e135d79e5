use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::dist::{sample_with_rng, Params};

/// Monte Carlo estimate of E[X_{i:n}] with its standard error.
pub fn mc_order_stat_mean(theta: &Params, i: usize, n: usize, reps: usize, seed: u64) -> Result<(f64, f64)> {
    if i < 1 || i > n {
        return Err(Error::Precondition(format!("need 1 <= i <= n, got i={i}, n={n}")));
    }
    if reps < 1000 {
        return Err(Error::Precondition(format!("need reps >= 1000, got {reps}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..reps {
        let mut xs = sample_with_rng(theta, n, &mut rng)?;
        let (_, v, _) = xs.select_nth_unstable_by(i - 1, f64::total_cmp);
        sum += *v;
        sum_sq += *v * *v;
    }
    let r = reps as f64;
    let mean = sum / r;
    let var = ((sum_sq - r * mean * mean) / (r - 1.0)).max(0.0);
    Ok((mean, (var / r).sqrt()))
}
