//! Seeded Monte Carlo estimates of slice volume and barycenter: the
//! independent cross-check for the exact enumeration and the solver.
//!
//! Sampling uses a counter-based generator (a splitmix64 finalizer applied
//! to seed + counter·golden), so sample i is a pure function of (seed, i)
//! with no generator state to hand between workers. Samples are grouped in
//! fixed 65536-sample chunks; chunks run in parallel but their partial sums
//! are merged sequentially in chunk order, so the result is bit-identical
//! for every thread count.

use crate::compensated::Neumaier;
use crate::cube_slice::Halfspace;
use crate::error::{Error, Result};
use rayon::prelude::*;

const CHUNK: u64 = 65536;
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One uniform double in [-1, 1) from a counter. The multiply places
/// consecutive counters far apart in state space; the finalizer mixes all
/// 64 bits into the top 53.
fn sample_coordinate(seed: u64, counter: u64) -> f64 {
    let mut z = seed.wrapping_add(counter.wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ((z >> 11) as f64) * (1.0 / (1u64 << 53) as f64) * 2.0 - 1.0
}

/// Scalar estimate with its standard error (sample SD over √samples).
#[derive(Debug, Clone, PartialEq)]
pub struct McScalar {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Per-coordinate estimate; sample count is the number of hits.
#[derive(Debug, Clone, PartialEq)]
pub struct McVector {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
}

/// Volume fraction estimate plus, when at least two samples landed in the
/// slice, the barycenter estimate over those hits.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceEstimate {
    pub volume: McScalar,
    pub barycenter: Option<McVector>,
    pub hits: u64,
}

struct ChunkSums {
    hits: u64,
    coord: Vec<f64>,
    coord_sq: Vec<f64>,
}

pub fn estimate_slice(h: &Halfspace, samples: u64, seed: u64) -> Result<SliceEstimate> {
    if samples < 10_000 {
        return Err(Error::Precondition {
            condition: format!("samples >= 10000 required, got {samples}"),
        });
    }
    let n = h.dimension();
    let (direction, offset) = match h {
        Halfspace::Exact { direction, offset } => (
            direction.iter().map(crate::exactnum::to_f64).collect::<Vec<f64>>(),
            crate::exactnum::to_f64(offset),
        ),
        Halfspace::Float { direction, offset } => (direction.clone(), *offset),
    };

    let chunks = samples.div_ceil(CHUNK);
    let partials: Vec<ChunkSums> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(samples);
            let mut hits = 0u64;
            let mut coord = vec![Neumaier::new(); n];
            let mut coord_sq = vec![Neumaier::new(); n];
            let mut point = vec![0.0f64; n];
            for i in lo..hi {
                let base = i * n as u64;
                let mut dot = 0.0f64;
                for (j, p) in point.iter_mut().enumerate() {
                    *p = sample_coordinate(seed, base + j as u64);
                    dot += direction[j] * *p;
                }
                if dot >= offset {
                    hits += 1;
                    for j in 0..n {
                        coord[j].add(point[j]);
                        coord_sq[j].add(point[j] * point[j]);
                    }
                }
            }
            ChunkSums {
                hits,
                coord: coord.into_iter().map(|a| a.total()).collect(),
                coord_sq: coord_sq.into_iter().map(|a| a.total()).collect(),
            }
        })
        .collect();

    // Sequential merge in chunk order keeps the result independent of how
    // the chunks were scheduled.
    let mut hits = 0u64;
    let mut coord = vec![Neumaier::new(); n];
    let mut coord_sq = vec![Neumaier::new(); n];
    for part in &partials {
        hits += part.hits;
        for j in 0..n {
            coord[j].add(part.coord[j]);
            coord_sq[j].add(part.coord_sq[j]);
        }
    }

    let nf = samples as f64;
    let p_hat = hits as f64 / nf;
    let volume = McScalar {
        mean: p_hat,
        std_error: (p_hat * (1.0 - p_hat) / (nf - 1.0)).sqrt(),
        samples,
        seed,
    };

    let barycenter = (hits >= 2).then(|| {
        let h = hits as f64;
        let mut mean = Vec::with_capacity(n);
        let mut std_error = Vec::with_capacity(n);
        for j in 0..n {
            let s = coord[j].total();
            let q = coord_sq[j].total();
            let m = s / h;
            // Guard the variance against negative rounding residue.
            let var = ((q - s * m) / (h - 1.0)).max(0.0);
            mean.push(m);
            std_error.push((var / h).sqrt());
        }
        McVector {
            mean,
            std_error,
            samples: hits,
            seed,
        }
    });

    Ok(SliceEstimate {
        volume,
        barycenter,
        hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube_slice::{slice_stats, Halfspace};
    use crate::exactnum::{rat, rat_int, to_f64};

    fn diag2() -> Halfspace {
        let inv = 0.5f64.sqrt();
        Halfspace::from_floats(vec![inv, inv], 0.0).unwrap()
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let h = diag2();
        let runs: Vec<SliceEstimate> = [1usize, 2, 7]
            .iter()
            .map(|&threads| {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap();
                pool.install(|| estimate_slice(&h, 200_000, 42).unwrap())
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }

    #[test]
    fn diagonal_slice_within_three_sigma() {
        let est = estimate_slice(&diag2(), 1_000_000, 7).unwrap();
        assert!((est.volume.mean - 0.5).abs() < 3.0 * est.volume.std_error);
        assert!((est.volume.std_error - 0.0005).abs() < 5e-5);
        let bary = est.barycenter.unwrap();
        for j in 0..2 {
            assert!(
                (bary.mean[j] - 1.0 / 3.0).abs() < 3.0 * bary.std_error[j],
                "coordinate {j}: {} +/- {}",
                bary.mean[j],
                bary.std_error[j]
            );
            assert!(bary.std_error[j] < 0.002);
        }
    }

    #[test]
    fn axis_slice_and_simplex_corner() {
        let h = Halfspace::from_floats(vec![1.0, 0.0, 0.0], 0.5).unwrap();
        let est = estimate_slice(&h, 400_000, 11).unwrap();
        assert!((est.volume.mean - 0.25).abs() < 3.0 * est.volume.std_error);

        // mean(u) >= 3/4 in n = 2, through the unit-normal parametrization.
        let inv = 0.5f64.sqrt();
        let h = Halfspace::from_floats(vec![inv, inv], 1.5 * inv).unwrap();
        let est = estimate_slice(&h, 1_000_000, 13).unwrap();
        let exact = 1.0 / 32.0;
        assert!((est.volume.mean - exact).abs() < 3.0 * est.volume.std_error);
    }

    #[test]
    fn agrees_with_exact_enumeration_at_rational_cases() {
        let cases = [
            (vec![rat(2, 3), rat(-1, 5), rat(1, 2)], rat(1, 4), 21u64),
            (vec![rat(5, 8), rat(3, 8)], rat(-1, 4), 22),
            (vec![rat_int(1); 5], rat(5, 4), 23),
        ];
        for (dir, c, seed) in cases {
            let h = Halfspace::exact(dir, c).unwrap();
            let exact = slice_stats(&h).unwrap();
            let est = estimate_slice(&h, 400_000, seed).unwrap();
            let v = to_f64(&exact.volume_fraction);
            assert!(
                (est.volume.mean - v).abs() < 3.0 * est.volume.std_error,
                "volume {} vs {v}",
                est.volume.mean
            );
            let bary = est.barycenter.unwrap();
            for j in 0..exact.barycenter.len() {
                let b = to_f64(&exact.barycenter[j]);
                assert!(
                    (bary.mean[j] - b).abs() < 3.0 * bary.std_error[j].max(1e-12),
                    "coordinate {j}"
                );
            }
        }
    }

    #[test]
    fn zero_hits_flagged() {
        let inv = 0.5f64.sqrt();
        let sigma = 2.0 * inv;
        let h = Halfspace::from_floats(vec![inv, inv], sigma * (1.0 - 1e-12)).unwrap();
        let est = estimate_slice(&h, 10_000, 3).unwrap();
        assert_eq!(est.hits, 0);
        assert_eq!(est.volume.mean, 0.0);
        assert!(est.barycenter.is_none());
    }

    #[test]
    fn sample_floor_enforced() {
        assert!(estimate_slice(&diag2(), 9_999, 1).is_err());
    }

    #[test]
    fn coordinates_fill_the_cube() {
        // Counter stream sanity: first and second moments of the raw
        // coordinates across a full-cube slice.
        let h = Halfspace::from_floats(vec![1.0, 0.0], -5.0).unwrap();
        let est = estimate_slice(&h, 1_000_000, 99).unwrap();
        assert_eq!(est.hits, 1_000_000);
        let bary = est.barycenter.unwrap();
        for j in 0..2 {
            assert!(bary.mean[j].abs() < 3.0 * bary.std_error[j]);
            // SD of a uniform on [-1,1] is 1/sqrt(3).
            let sd = bary.std_error[j] * (est.hits as f64).sqrt();
            assert!((sd - 1.0 / 3f64.sqrt()).abs() < 2e-3);
        }
    }
}
