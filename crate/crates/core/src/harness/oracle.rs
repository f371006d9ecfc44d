//! Exact expected regret of streaming uniform exploration by enumeration.
//!
//! Shares no code with the environment or the policies: it walks every
//! joint outcome of the per-arm success counts, weights it by the product of
//! binomial probabilities and applies the keep-the-first, replace-on-strictly-
//! greater rule.

use crate::env::StreamInstance;
use crate::error::{Error, Result};

pub const MAX_OUTCOMES: u128 = 1_000_000;

fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let mut coeff = 1.0f64;
    (0..=n)
        .map(|k| {
            if k > 0 {
                coeff = coeff * (n - k + 1) as f64 / k as f64;
            }
            coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
        })
        .collect()
}

/// Expected total regret of pulling each arm `pulls` times in stream order,
/// then committing to the first arm with the highest count for the rest of
/// `horizon`.
pub fn brute_force_expected_regret(
    instance: &StreamInstance,
    pulls: u64,
    horizon: u64,
) -> Result<f64> {
    let k = instance.len();
    let outcomes = (pulls as u128 + 1)
        .checked_pow(k as u32)
        .unwrap_or(u128::MAX);
    if outcomes > MAX_OUTCOMES {
        return Err(Error::domain(format!(
            "{outcomes} joint outcomes exceed the enumeration limit"
        )));
    }
    if pulls == 0 || (k as u64).saturating_mul(pulls) > horizon {
        return Err(Error::domain(
            "exploration must fit in the horizon with at least one pull per arm",
        ));
    }
    let means = instance.means();
    let best = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let explore: f64 = means.iter().map(|m| (best - m) * pulls as f64).sum();
    let commit_pulls = (horizon - k as u64 * pulls) as f64;
    let pmfs: Vec<Vec<f64>> = means.iter().map(|&m| binomial_pmf(pulls, m)).collect();

    let mut counts = vec![0u64; k];
    let mut expected_commit = 0.0;
    loop {
        let prob: f64 = counts
            .iter()
            .zip(&pmfs)
            .map(|(&c, pmf)| pmf[c as usize])
            .product();
        if prob > 0.0 {
            let mut keep = 0;
            for i in 1..k {
                if counts[i] > counts[keep] {
                    keep = i;
                }
            }
            expected_commit += prob * (best - means[keep]);
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == k {
                return Ok(explore + commit_pulls * expected_commit);
            }
            counts[i] += 1;
            if counts[i] <= pulls {
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}
