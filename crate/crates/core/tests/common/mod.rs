//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use drr_mdpf::prob::FiniteMdp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Values of the best deterministic stationary policy, by solving each policy's linear system.
pub fn enumerate_policies(mdp: &FiniteMdp<f64>) -> Vec<f64> {
    let n = mdp.state_count();
    let a = mdp.action_count();
    let g = mdp.discount();
    let mut best = vec![f64::NEG_INFINITY; n];
    for code in 0..a.pow(n as u32) {
        let policy: Vec<usize> = (0..n).map(|s| code / a.pow(s as u32) % a).collect();
        // (I − γ P_π) V = r_π, Gaussian elimination with partial pivoting
        let mut m = vec![vec![0.0; n + 1]; n];
        for s in 0..n {
            let act = policy[s];
            for t in 0..n {
                m[s][t] = f64::from(u8::from(s == t)) - g * mdp.transition(s, act, t);
                m[s][n] += mdp.transition(s, act, t) * mdp.reward(s, act, t);
            }
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
            m.swap(col, piv);
            for row in 0..n {
                if row != col {
                    let f = m[row][col] / m[col][col];
                    let pivot = m[col].clone();
                    for (x, p) in m[row].iter_mut().zip(&pivot).skip(col) {
                        *x -= f * p;
                    }
                }
            }
        }
        for s in 0..n {
            best[s] = best[s].max(m[s][n] / m[s][s]);
        }
    }
    best
}

pub fn random_mdp(seed: u64) -> FiniteMdp<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, a) = (3, 2);
    let mut p = Vec::new();
    for _ in 0..n * a {
        let row: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let sum: f64 = row.iter().sum();
        p.extend(row.iter().map(|x| x / sum));
    }
    let r = (0..n * a * n).map(|_| rng.random_range(-5.0..5.0)).collect();
    FiniteMdp::new(n, a, p, r, rng.random_range(0.1..0.95)).unwrap()
}

/// Mean first, then squared deviations.
pub fn two_pass_cov(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut sum = 0.0;
    for v in x {
        sum += v;
    }
    let mean = sum / n;
    if mean == 0.0 {
        return 0.0;
    }
    let mut ss = 0.0;
    for v in x {
        ss += (v - mean).powi(2);
    }
    (ss / n).sqrt() / mean
}
