//! PAM (partitioning around medoids) clustering of representative days.
//!
//! Feature vectors concatenate all correlated series of one day so the
//! temporal correlation between series is preserved. Distances are
//! Euclidean on z-score normalised features. Medoids are always observed
//! days, never synthetic averages.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Clustering outcome: medoid day indices (ascending), the cluster sizes
/// as integer day weights (aligned with `medoids`), the per-day medoid
/// assignment and the total within-cluster distance.
#[derive(Debug, Clone)]
pub struct ClusterResult {
    pub medoids: Vec<usize>,
    pub weights: Vec<usize>,
    /// For every day, the position (into `medoids`) it is assigned to.
    pub assignment: Vec<usize>,
    pub objective: f64,
}

/// Number of random PAM restarts besides the deterministic BUILD start.
const RESTARTS: usize = 8;

/// Cluster `days x features` rows into `k` representative days.
///
/// Deterministic for a fixed `seed`. With `k == days` every day becomes
/// its own medoid with weight 1.
pub fn cluster_representative_days(
    matrix: &[Vec<f64>],
    k: usize,
    seed: u64,
) -> Result<ClusterResult> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::Scenario("cannot cluster an empty day matrix".into()));
    }
    if k == 0 || k > n {
        return Err(Error::Scenario(format!(
            "k must be in 1..={n}, got {k}"
        )));
    }
    let dim = matrix[0].len();
    if matrix.iter().any(|row| row.len() != dim) {
        return Err(Error::Scenario("ragged day-feature matrix".into()));
    }

    if k == n {
        return Ok(finish((0..n).collect(), &vec![vec![0.0; n]; n]));
    }

    let normalized = zscore(matrix, dim);
    let dist = distance_matrix(&normalized);

    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut consider = |medoids: Vec<usize>| {
        let medoids = swap_to_local_optimum(medoids, &dist);
        let obj = objective(&medoids, &dist);
        let better = match &best {
            None => true,
            // Deterministic tie-break on the sorted medoid set.
            Some((m, o)) => obj < o - 1e-12 || (obj < o + 1e-12 && medoids < *m),
        };
        if better {
            best = Some((medoids, obj));
        }
    };

    consider(build_init(k, &dist));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESTARTS {
        let mut medoids: Vec<usize> = sample(&mut rng, n, k).into_vec();
        medoids.sort_unstable();
        consider(medoids);
    }

    let (medoids, _) = best.expect("at least one start");
    Ok(finish(medoids, &dist))
}

fn finish(medoids: Vec<usize>, dist: &[Vec<f64>]) -> ClusterResult {
    let n = dist.len();
    let mut assignment = vec![0usize; n];
    let mut weights = vec![0usize; medoids.len()];
    for day in 0..n {
        let pos = nearest(day, &medoids, dist);
        assignment[day] = pos;
        weights[pos] += 1;
    }
    let objective = objective(&medoids, dist);
    ClusterResult {
        medoids,
        weights,
        assignment,
        objective,
    }
}

fn zscore(matrix: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let n = matrix.len() as f64;
    let mut mean = vec![0.0; dim];
    let mut var = vec![0.0; dim];
    for row in matrix {
        for (j, v) in row.iter().enumerate() {
            mean[j] += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    for row in matrix {
        for (j, v) in row.iter().enumerate() {
            var[j] += (v - mean[j]).powi(2);
        }
    }
    let std: Vec<f64> = var
        .iter()
        .map(|v| {
            let s = (v / n).sqrt();
            if s > 1e-12 {
                s
            } else {
                1.0
            }
        })
        .collect();
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, v)| (v - mean[j]) / std[j])
                .collect()
        })
        .collect()
}

fn distance_matrix(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[i][j] = dij;
            d[j][i] = dij;
        }
    }
    d
}

fn nearest(day: usize, medoids: &[usize], dist: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (pos, &m) in medoids.iter().enumerate() {
        if dist[day][m] < best_d {
            best_d = dist[day][m];
            best = pos;
        }
    }
    best
}

fn objective(medoids: &[usize], dist: &[Vec<f64>]) -> f64 {
    (0..dist.len())
        .map(|day| {
            medoids
                .iter()
                .map(|&m| dist[day][m])
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Greedy BUILD phase: start from the day minimising the total distance,
/// then repeatedly add the candidate with the largest distance reduction.
fn build_init(k: usize, dist: &[Vec<f64>]) -> Vec<usize> {
    let n = dist.len();
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut nearest_d = vec![f64::INFINITY; n];
    for _ in 0..k {
        let mut best = usize::MAX;
        if medoids.is_empty() {
            let mut best_cost = f64::INFINITY;
            for c in 0..n {
                let cost: f64 = (0..n).map(|day| dist[day][c]).sum();
                if cost < best_cost {
                    best_cost = cost;
                    best = c;
                }
            }
        } else {
            let mut best_gain = f64::NEG_INFINITY;
            for c in 0..n {
                if medoids.contains(&c) {
                    continue;
                }
                let gain: f64 = (0..n)
                    .map(|day| (nearest_d[day] - dist[day][c]).max(0.0))
                    .sum();
                if gain > best_gain {
                    best_gain = gain;
                    best = c;
                }
            }
        }
        medoids.push(best);
        for day in 0..n {
            nearest_d[day] = nearest_d[day].min(dist[day][best]);
        }
    }
    medoids.sort_unstable();
    medoids
}

/// SWAP phase: best-improvement single swaps until a local optimum.
fn swap_to_local_optimum(mut medoids: Vec<usize>, dist: &[Vec<f64>]) -> Vec<usize> {
    let n = dist.len();
    let mut current = objective(&medoids, dist);
    loop {
        let mut best_delta = -1e-12;
        let mut best_swap: Option<(usize, usize)> = None;
        for pos in 0..medoids.len() {
            for cand in 0..n {
                if medoids.contains(&cand) {
                    continue;
                }
                let old = medoids[pos];
                medoids[pos] = cand;
                let obj = objective(&medoids, dist);
                medoids[pos] = old;
                let delta = obj - current;
                if delta < best_delta {
                    best_delta = delta;
                    best_swap = Some((pos, cand));
                }
            }
        }
        match best_swap {
            Some((pos, cand)) => {
                medoids[pos] = cand;
                current += best_delta;
                current = objective(&medoids, dist);
            }
            None => break,
        }
    }
    medoids.sort_unstable();
    medoids
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_equals_n_keeps_every_day() {
        let days: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let r = cluster_representative_days(&days, 5, 0).unwrap();
        assert_eq!(r.medoids, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.weights, vec![1; 5]);
    }

    #[test]
    fn identical_days_collapse_to_one_medoid() {
        let days = vec![vec![1.0, 2.0]; 6];
        let r = cluster_representative_days(&days, 1, 0).unwrap();
        assert_eq!(r.weights, vec![6]);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn two_well_separated_clusters() {
        // 3 constant-0 days and 3 constant-1 days.
        let mut days = vec![vec![0.0; 24]; 3];
        days.extend(vec![vec![1.0; 24]; 3]);
        let r = cluster_representative_days(&days, 2, 0).unwrap();
        assert_eq!(r.weights, vec![3, 3]);
        assert!(r.medoids[0] < 3 && r.medoids[1] >= 3);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn rejects_bad_k() {
        let days = vec![vec![0.0]; 3];
        assert!(cluster_representative_days(&days, 0, 0).is_err());
        assert!(cluster_representative_days(&days, 4, 0).is_err());
        assert!(cluster_representative_days(&[], 1, 0).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let days: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i % 7) as f64, (i % 3) as f64, i as f64 * 0.01])
            .collect();
        let a = cluster_representative_days(&days, 4, 7).unwrap();
        let b = cluster_representative_days(&days, 4, 7).unwrap();
        assert_eq!(a.medoids, b.medoids);
        assert_eq!(a.weights, b.weights);
    }
}
