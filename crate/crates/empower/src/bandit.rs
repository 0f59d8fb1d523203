//! One-step channel ("bandit") power: for a channel P(s'|a) from n actions
//! to m outcome states, a human choosing a distribution π over actions has
//!
//!   X = Σ_{s'} max_a P(s'|a)^ζ,        W = log₂ X,
//!
//! (each outcome is a goal, best attained by the single best action), while
//! the ζ-tilted channel capacity
//!
//!   E^ζ = max_π [ H(s') − ζ H(s'|a) ]      (base-2 entropies)
//!
//! lower-bounds W: E^ζ ≤ W for ζ ≥ 1, with equality for deterministic
//! channels. For ζ = 1 this is the Shannon capacity (Blahut–Arimoto); for
//! ζ > 1 the objective is still concave in π and is maximized by multistart
//! exponentiated-gradient ascent.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// X = Σ_{s'} max_a P(s'|a)^ζ for a row-stochastic channel (rows = actions).
pub fn bandit_goal_aggregate(channel: &[Vec<f64>], zeta: f64) -> f64 {
    let m = channel[0].len();
    (0..m)
        .map(|s| {
            let best = channel.iter().map(|row| row[s]).fold(0.0, f64::max);
            if best > 0.0 {
                best.powf(zeta)
            } else {
                0.0
            }
        })
        .sum()
}

/// W = log₂ X.
pub fn bandit_power_bits(channel: &[Vec<f64>], zeta: f64) -> f64 {
    bandit_goal_aggregate(channel, zeta).log2()
}

fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Objective J(π) = H(s') − ζ H(s'|a) in bits, where s' ∼ Σ_a π(a) P(·|a).
pub fn tilted_objective(channel: &[Vec<f64>], pi: &[f64], zeta: f64) -> f64 {
    let m = channel[0].len();
    let mut marg = vec![0.0; m];
    for (a, row) in channel.iter().enumerate() {
        for (s, &p) in row.iter().enumerate() {
            marg[s] += pi[a] * p;
        }
    }
    let h_cond: f64 = channel.iter().zip(pi).map(|(row, &pa)| pa * entropy_bits(row)).sum();
    entropy_bits(&marg) - zeta * h_cond
}

/// Shannon capacity (ζ = 1 case) by Blahut–Arimoto, in bits.
pub fn blahut_arimoto(channel: &[Vec<f64>], tol: f64, max_iter: usize) -> (f64, Vec<f64>) {
    let n = channel.len();
    let m = channel[0].len();
    let mut pi = vec![1.0 / n as f64; n];
    let mut cap = 0.0;
    for _ in 0..max_iter {
        let mut marg = vec![0.0; m];
        for (a, row) in channel.iter().enumerate() {
            for (s, &p) in row.iter().enumerate() {
                marg[s] += pi[a] * p;
            }
        }
        // D_a = Σ_s P(s|a) log₂ (P(s|a)/marg(s))
        let d: Vec<f64> = channel
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&marg)
                    .filter(|&(&p, _)| p > 0.0)
                    .map(|(&p, &q)| p * (p / q).log2())
                    .sum()
            })
            .collect();
        let lo = cap;
        let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        cap = pi.iter().zip(&d).map(|(&pa, &da)| pa * da).sum();
        if hi - cap < tol && (cap - lo).abs() < tol {
            break;
        }
        let mut z = 0.0;
        for a in 0..n {
            pi[a] *= 2f64.powf(d[a]);
            z += pi[a];
        }
        for p in &mut pi {
            *p /= z;
        }
    }
    (cap, pi)
}

#[derive(Debug, Clone)]
pub struct AscentOptions {
    pub starts: usize,
    pub iters: usize,
    pub step: f64,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions { starts: 64, iters: 500, step: 0.5, seed: 7 }
    }
}

/// E^ζ = max_π [H(s') − ζ H(s'|a)] by multistart exponentiated-gradient
/// ascent (exact gradient; the objective is concave in π, the multistart
/// guards against boundary stalls). Returns (value in bits, maximizer).
pub fn tilted_capacity(channel: &[Vec<f64>], zeta: f64, opts: &AscentOptions) -> (f64, Vec<f64>) {
    if zeta == 1.0 {
        return blahut_arimoto(channel, 1e-12, 5000);
    }
    let n = channel.len();
    let m = channel[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = (f64::NEG_INFINITY, vec![1.0 / n as f64; n]);
    let h_rows: Vec<f64> = channel.iter().map(|r| entropy_bits(r)).collect();
    for start in 0..opts.starts {
        let mut pi: Vec<f64> = if start == 0 {
            vec![1.0 / n as f64; n]
        } else {
            let raw: Vec<f64> = (0..n).map(|_| -(rng.gen::<f64>().ln())).collect();
            let z: f64 = raw.iter().sum();
            raw.iter().map(|&x| x / z).collect()
        };
        for it in 0..opts.iters {
            let mut marg = vec![0.0; m];
            for (a, row) in channel.iter().enumerate() {
                for (s, &p) in row.iter().enumerate() {
                    marg[s] += pi[a] * p;
                }
            }
            // ∂J/∂π_a = −Σ_s P(s|a) log₂ marg(s) − ζ H(s'|a) + const.
            let grad: Vec<f64> = (0..n)
                .map(|a| {
                    let cross: f64 = channel[a]
                        .iter()
                        .zip(&marg)
                        .filter(|&(&p, _)| p > 0.0)
                        .map(|(&p, &q)| p * q.log2())
                        .sum();
                    -cross - zeta * h_rows[a]
                })
                .collect();
            let step = opts.step / (1.0 + 0.02 * it as f64).sqrt();
            let gmax = grad.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for a in 0..n {
                pi[a] *= (step * (grad[a] - gmax)).exp2();
                z += pi[a];
            }
            for p in &mut pi {
                *p /= z;
            }
        }
        let val = tilted_objective(channel, &pi, zeta);
        if val > best.0 {
            best = (val, pi);
        }
    }
    best
}

/// Deterministic random row-stochastic channel for sweeps and tests.
pub fn random_channel(n: usize, m: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..m).map(|_| -(rng.gen::<f64>().ln())).collect();
            let z: f64 = raw.iter().sum();
            raw.iter().map(|&x| x / z).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn deterministic_channel_power_counts_reachable_states() {
        // 3 actions reaching 3 distinct states deterministically: X = 3.
        let ch = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert_relative_eq!(bandit_power_bits(&ch, 2.0), 3f64.log2());
        let (cap, _) = blahut_arimoto(&ch, 1e-12, 1000);
        assert_relative_eq!(cap, 3f64.log2(), epsilon = 1e-9);
        // Tilted capacity is tight for deterministic channels (H(s'|a)=0).
        let (e, _) = tilted_capacity(&ch, 2.0, &AscentOptions::default());
        assert_relative_eq!(e, 3f64.log2(), epsilon = 1e-6);
    }

    #[test]
    fn blahut_arimoto_binary_symmetric_channel() {
        let eps = 0.11f64;
        let ch = vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]];
        let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        let (cap, pi) = blahut_arimoto(&ch, 1e-13, 10_000);
        assert_relative_eq!(cap, 1.0 - h(eps), epsilon = 1e-9);
        assert_relative_eq!(pi[0], 0.5, epsilon = 1e-6);
    }

    #[test]
    fn tilted_capacity_matches_grid_oracle_3x4() {
        // Exhaustive simplex grid at resolution 0.01 as an independent
        // oracle for a fixed 3-action, 4-state channel.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = random_channel(3, 4, &mut rng);
        let zeta = 2.0;
        let mut best = f64::NEG_INFINITY;
        let steps = 100;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let k = steps - i - j;
                let pi = [i as f64 / steps as f64, j as f64 / steps as f64, k as f64 / steps as f64];
                best = best.max(tilted_objective(&ch, &pi, zeta));
            }
        }
        let (e, _) = tilted_capacity(&ch, zeta, &AscentOptions::default());
        // The ascent must match or beat the 0.01-grid within grid error.
        assert!(e >= best - 1e-4, "ascent {e} below grid oracle {best}");
        assert!(e <= best + 0.01, "ascent {e} implausibly above grid oracle {best}");
    }

    #[test]
    fn tilted_capacity_lower_bounds_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(2..5);
            let m = rng.gen_range(2..5);
            let ch = random_channel(n, m, &mut rng);
            for zeta in [1.0, 1.5, 2.0, 3.0] {
                let w = bandit_power_bits(&ch, zeta);
                let (e, _) =
                    tilted_capacity(&ch, zeta, &AscentOptions { starts: 8, iters: 200, ..Default::default() });
                assert!(
                    e <= w + 1e-6,
                    "E^zeta = {e} exceeds W = {w} for zeta = {zeta}, channel {ch:?}"
                );
            }
        }
    }
}
