//! PAM k-medoids with best-improvement swaps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::edit::edit_distance;
use crate::log::Trace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    /// Indices of the medoids.
    pub medoids: Vec<usize>,
    /// Medoid slot each object is assigned to.
    pub assignment: Vec<usize>,
    pub cost: u64,
    pub iterations: usize,
}

/// Pairwise edit distances, computed row by row in parallel.
pub fn distance_matrix(traces: &[Trace]) -> Vec<Vec<u32>> {
    let n = traces.len();
    let upper: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| edit_distance(&traces[i], &traces[j]) as u32)
                .collect()
        })
        .collect();
    let mut full = vec![vec![0u32; n]; n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            full[i][j] = d;
            full[j][i] = d;
        }
    }
    full
}

struct Nearest {
    slot: usize,
    near: u32,
    second: u32,
}

fn nearest(dist: &[Vec<u32>], medoids: &[usize]) -> Vec<Nearest> {
    (0..dist.len())
        .map(|o| {
            let mut best = (usize::MAX, u32::MAX);
            let mut second = u32::MAX;
            for (slot, &m) in medoids.iter().enumerate() {
                let d = dist[o][m];
                if d < best.1 {
                    second = best.1;
                    best = (slot, d);
                } else if d < second {
                    second = d;
                }
            }
            Nearest {
                slot: best.0,
                near: best.1,
                second,
            }
        })
        .collect()
}

/// Clusters the objects of `dist` into `k` groups.
///
/// Initial medoids are drawn uniformly with a seeded RNG. Each iteration
/// applies the single swap with the largest cost reduction and stops when no
/// swap improves or after `max_iters` iterations. `k` larger than the number
/// of objects is clamped.
pub fn pam(dist: &[Vec<u32>], k: usize, seed: u64, max_iters: usize) -> Clustering {
    let n = dist.len();
    let mut k = k;
    if k > n {
        log::warn!("requested {k} medoids for {n} objects; using {n}");
        k = n;
    }
    if k == 0 {
        return Clustering {
            medoids: Vec::new(),
            assignment: Vec::new(),
            cost: 0,
            iterations: 0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut medoids = rand::seq::index::sample(&mut rng, n, k).into_vec();
    medoids.sort_unstable();
    let mut is_medoid = vec![false; n];
    for &m in &medoids {
        is_medoid[m] = true;
    }

    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let near = nearest(dist, &medoids);
        // (delta, slot, candidate); first strict minimum wins
        let best = (0..n)
            .into_par_iter()
            .filter(|&h| !is_medoid[h])
            .map(|h| {
                let mut best: Option<(i64, usize)> = None;
                for slot in 0..k {
                    let delta: i64 = near
                        .iter()
                        .enumerate()
                        .map(|(o, r)| {
                            let dh = dist[o][h];
                            let new = if r.slot == slot {
                                dh.min(r.second)
                            } else {
                                dh.min(r.near)
                            };
                            i64::from(new) - i64::from(r.near)
                        })
                        .sum();
                    if best.is_none_or(|(d, _)| delta < d) {
                        best = Some((delta, slot));
                    }
                }
                let (delta, slot) = best.expect("k >= 1");
                (delta, slot, h)
            })
            .min_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        match best {
            Some((delta, slot, h)) if delta < 0 => {
                is_medoid[medoids[slot]] = false;
                is_medoid[h] = true;
                medoids[slot] = h;
            }
            _ => break,
        }
    }

    let near = nearest(dist, &medoids);
    Clustering {
        cost: near.iter().map(|r| u64::from(r.near)).sum(),
        assignment: near.iter().map(|r| r.slot).collect(),
        medoids,
        iterations,
    }
}
