//! Monte Carlo for nonintersecting continuous-time random-walk bridges and the discrete
//! magnon-measurement dynamics.
//!
//! Each walker jumps at rate 1/2 in each direction, so its transition weight is e^{-t} I_k(t),
//! matching the Fourier coefficients of e^{(t/2)(z + 1/z)}.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000_000;

/// Largest time accepted by the bridge sampler (the jump-count weights are kept in f64).
pub const MAX_BRIDGE_TIME: f64 = 500.0;

/// Independent RNG streams used by the parallel estimators; fixed so results do not depend on
/// the number of threads.
pub const STREAMS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkPath {
    pub jump_times: Vec<f64>,
    pub jump_signs: Vec<i8>,
    pub start: i64,
}

impl WalkPath {
    pub fn end(&self) -> i64 {
        self.start + self.jump_signs.iter().map(|&s| s as i64).sum::<i64>()
    }

    /// Position just after time s (right-continuous).
    pub fn position_at(&self, s: f64) -> i64 {
        self.start + self.jump_times.iter().zip(&self.jump_signs).filter(|(t, _)| **t <= s).map(|(_, &g)| g as i64).sum::<i64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathEnsemble {
    pub paths: Vec<WalkPath>,
    /// max over time of last-walker minus first-walker position
    pub width: i64,
    pub attempts: u64,
}

/// Deterministic generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !(t <= MAX_BRIDGE_TIME) {
        return Err(Error::Domain(format!("bridge time must lie in (0, {MAX_BRIDGE_TIME}], got {t}")));
    }
    Ok(())
}

/// Weights of K = 2m jumps for a bridge: (t/2)^{2m}/(m!)^2, normalised by I_0(t).
pub fn bridge_jump_weights(t: f64) -> Vec<f64> {
    let x = 0.25 * t * t;
    let mut w = vec![1.0];
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1.. {
        term *= x / (m as f64 * m as f64);
        w.push(term);
        sum += term;
        if term < 1e-18 * sum && m as f64 > 0.5 * t {
            break;
        }
    }
    w.iter().map(|v| v / sum).collect()
}

fn sample_bridge_with(start: i64, t: f64, weights: &[f64], rng: &mut impl Rng) -> WalkPath {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut m = weights.len() - 1;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            m = k;
            break;
        }
    }
    let mut jump_times: Vec<f64> = (0..2 * m).map(|_| rng.random::<f64>() * t).collect();
    jump_times.sort_by(f64::total_cmp);
    let mut jump_signs: Vec<i8> = (0..2 * m).map(|i| if i < m { 1 } else { -1 }).collect();
    jump_signs.shuffle(rng);
    WalkPath { jump_times, jump_signs, start }
}

/// A walk conditioned to return to `start` at time t.
pub fn sample_bridge_walk(start: i64, t: f64, rng: &mut impl Rng) -> Result<WalkPath> {
    check_time(t)?;
    Ok(sample_bridge_with(start, t, &bridge_jump_weights(t), rng))
}

/// Walk the merged jump events; returns the width if the walkers stay strictly ordered.
fn ordered_width(paths: &[WalkPath]) -> Option<i64> {
    let mut events: Vec<(f64, usize, i8)> = paths
        .iter()
        .enumerate()
        .flat_map(|(w, p)| p.jump_times.iter().zip(&p.jump_signs).map(move |(&t, &s)| (t, w, s)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pos: Vec<i64> = paths.iter().map(|p| p.start).collect();
    let last = pos.len() - 1;
    let mut width = pos[last] - pos[0];
    for (_, w, s) in events {
        pos[w] += s as i64;
        if (w > 0 && pos[w - 1] >= pos[w]) || (w < last && pos[w] >= pos[w + 1]) {
            return None;
        }
        width = width.max(pos[last] - pos[0]);
    }
    Some(width)
}

/// Rejection sampler: N_f independent bridges from 0..N_f, kept if strictly ordered throughout.
pub fn sample_nonintersecting(n_f: u32, t: f64, rng: &mut impl Rng, max_attempts: u64) -> Result<PathEnsemble> {
    check_time(t)?;
    if n_f < 1 {
        return Err(Error::Domain("need at least one walker".into()));
    }
    let weights = bridge_jump_weights(t);
    for attempt in 1..=max_attempts {
        let paths: Vec<WalkPath> = (0..n_f as i64).map(|s| sample_bridge_with(s, t, &weights, rng)).collect();
        if let Some(width) = ordered_width(&paths) {
            return Ok(PathEnsemble { paths, width, attempts: attempt });
        }
    }
    Err(Error::AttemptsExhausted { attempts: max_attempts, accepted: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthEstimate {
    pub n: u32,
    pub probability: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthCdf {
    pub estimates: Vec<WidthEstimate>,
    pub samples: u64,
    pub attempts: u64,
}

/// Empirical P(W < N) with binomial standard errors, from `samples` accepted ensembles drawn on
/// STREAMS independent streams of `seed`.
pub fn empirical_width_cdf(n_f: u32, t: f64, n_values: &[u32], samples: u64, seed: u64) -> Result<WidthCdf> {
    if samples < 1000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 samples, got {samples}")));
    }
    check_time(t)?;
    let per = |s: u64| samples / STREAMS + u64::from(s < samples % STREAMS);
    let parts: Vec<Result<(Vec<i64>, u64)>> = (0..STREAMS)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s);
            let mut widths = Vec::with_capacity(per(s) as usize);
            let mut attempts = 0;
            for _ in 0..per(s) {
                let e = sample_nonintersecting(n_f, t, &mut rng, DEFAULT_MAX_ATTEMPTS)?;
                attempts += e.attempts;
                widths.push(e.width);
            }
            Ok((widths, attempts))
        })
        .collect();
    let mut widths = Vec::with_capacity(samples as usize);
    let mut attempts = 0;
    for p in parts {
        let (w, a) = p?;
        widths.extend(w);
        attempts += a;
    }
    let total = widths.len() as f64;
    let estimates = n_values
        .iter()
        .map(|&n| {
            let hits = widths.iter().filter(|&&w| w < n as i64).count() as f64;
            let p = hits / total;
            WidthEstimate { n, probability: p, std_error: (p * (1.0 - p) / total).sqrt() }
        })
        .collect();
    Ok(WidthCdf { estimates, samples, attempts })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnonTrajectory {
    pub n: u32,
    /// occupied sites (mod N) at each step, sorted
    pub configs: Vec<Vec<u32>>,
    /// unwrapped magnon coordinates at each step, indexed by magnon
    pub unwrapped: Vec<Vec<i64>>,
}

/// Discrete-time magnon dynamics on a ring of N sites starting from the block 0..N_f.
///
/// Each step picks a magnon uniformly. With both neighbours empty it moves left or right with
/// probability 1/2; with exactly one neighbour occupied it moves away from it; with both
/// occupied it stays.
pub fn magnon_measurement_walk(n: u32, n_f: u32, steps: usize, rng: &mut impl Rng) -> Result<MagnonTrajectory> {
    if n < 1 || n_f > n {
        return Err(Error::Domain(format!("need N_f <= N and N >= 1, got N={n}, N_f={n_f}")));
    }
    let nn = n as i64;
    let mut occ = vec![false; n as usize];
    let mut x: Vec<i64> = (0..n_f as i64).collect();
    for &p in &x {
        occ[p as usize] = true;
    }
    let site = |v: i64| v.rem_euclid(nn) as usize;
    let snapshot = |x: &[i64]| {
        let mut s: Vec<u32> = x.iter().map(|&v| v.rem_euclid(nn) as u32).collect();
        s.sort_unstable();
        s
    };
    let mut configs = vec![snapshot(&x)];
    let mut unwrapped = vec![x.clone()];
    for _ in 0..steps {
        if n_f > 0 {
            let k = rng.random_range(0..n_f as usize);
            let left = occ[site(x[k] - 1)];
            let right = occ[site(x[k] + 1)];
            let mv = match (left, right) {
                (false, false) => {
                    if rng.random_bool(0.5) {
                        1
                    } else {
                        -1
                    }
                }
                (true, false) => 1,
                (false, true) => -1,
                (true, true) => 0,
            };
            if mv != 0 {
                occ[site(x[k])] = false;
                x[k] += mv;
                occ[site(x[k])] = true;
            }
        }
        configs.push(snapshot(&x));
        unwrapped.push(x.clone());
    }
    Ok(MagnonTrajectory { n, configs, unwrapped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::width_probability_exact;

    /// Independent ordering check: positions of all walkers at every event time.
    fn ordered_at_all_events(e: &PathEnsemble) -> bool {
        let mut times: Vec<f64> = e.paths.iter().flat_map(|p| p.jump_times.iter().copied()).collect();
        times.push(0.0);
        times.iter().all(|&s| {
            let pos: Vec<i64> = e.paths.iter().map(|p| p.position_at(s)).collect();
            pos.windows(2).all(|w| w[0] < w[1])
        })
    }

    #[test]
    fn bridges_return_to_start() {
        let mut rng = stream_rng(1, 0);
        for i in 0..2000 {
            let p = sample_bridge_walk(i % 7 - 3, 2.5, &mut rng).unwrap();
            assert_eq!(p.end(), p.start);
            assert!(p.jump_times.windows(2).all(|w| w[0] < w[1]));
            assert!(p.jump_times.iter().all(|&s| s > 0.0 && s < 2.5));
        }
    }

    #[test]
    fn tiny_time_rarely_jumps() {
        let mut rng = stream_rng(2, 0);
        let still = (0..1000).filter(|_| sample_bridge_walk(0, 1e-4, &mut rng).unwrap().jump_times.is_empty()).count();
        assert!(still >= 995);
    }

    #[test]
    fn jump_count_mean_matches_summation() {
        let t = 2.0f64;
        // P(K = 2m) from e^{-t} t^{2m}/(2m)! C(2m, m) 4^{-m}, summed directly
        let mut w = Vec::new();
        for m in 0..40u32 {
            let mut v = (-t).exp();
            for i in 1..=2 * m {
                v *= t / i as f64;
            }
            for i in 0..m {
                v *= (2 * m - i) as f64 / (m - i) as f64 / 4.0;
            }
            w.push(v);
        }
        let z: f64 = w.iter().sum();
        let mean: f64 = w.iter().enumerate().map(|(m, v)| 2.0 * m as f64 * v).sum::<f64>() / z;
        let var: f64 = w.iter().enumerate().map(|(m, v)| (2.0 * m as f64 - mean).powi(2) * v).sum::<f64>() / z;
        let draws = 100_000;
        let mut rng = stream_rng(3, 0);
        let total: usize = (0..draws).map(|_| sample_bridge_walk(0, t, &mut rng).unwrap().jump_times.len()).sum();
        let est = total as f64 / draws as f64;
        assert!((est - mean).abs() < 3.0 * (var / draws as f64).sqrt(), "{est} vs {mean}");
    }

    #[test]
    fn single_walker_always_accepted() {
        let mut rng = stream_rng(4, 0);
        for _ in 0..100 {
            assert_eq!(sample_nonintersecting(1, 3.0, &mut rng, 1).unwrap().attempts, 1);
        }
    }

    #[test]
    fn short_time_pairs_mostly_accepted() {
        let mut rng = stream_rng(5, 0);
        let n = 2000;
        let attempts: u64 = (0..n).map(|_| sample_nonintersecting(2, 0.1, &mut rng, 1000).unwrap().attempts).sum();
        assert!(n as f64 / attempts as f64 >= 0.9);
    }

    #[test]
    fn accepted_ensembles_are_ordered_bridges() {
        let mut rng = stream_rng(6, 0);
        for _ in 0..300 {
            let e = sample_nonintersecting(3, 1.5, &mut rng, DEFAULT_MAX_ATTEMPTS).unwrap();
            assert!(ordered_at_all_events(&e));
            assert!(e.width >= 2);
            for (i, p) in e.paths.iter().enumerate() {
                assert_eq!(p.start, i as i64);
                assert_eq!(p.end(), p.start);
            }
        }
    }

    #[test]
    fn attempts_exhausted_reported() {
        let mut rng = stream_rng(7, 0);
        let r = sample_nonintersecting(4, 40.0, &mut rng, 3);
        assert!(matches!(r, Err(Error::AttemptsExhausted { attempts: 3, .. })));
    }

    #[test]
    fn width_cdf_edges_and_monotone() {
        let c = empirical_width_cdf(2, 1.0, &[1, 2, 3, 4, 5, 6, 40], 2000, 9).unwrap();
        let p: Vec<f64> = c.estimates.iter().map(|e| e.probability).collect();
        assert_eq!(p[0], 0.0);
        assert_eq!(*p.last().unwrap(), 1.0);
        assert!(p.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn width_cdf_deterministic_per_seed() {
        let a = empirical_width_cdf(2, 1.0, &[2, 3, 4], 1000, 11).unwrap();
        let b = empirical_width_cdf(2, 1.0, &[2, 3, 4], 1000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn width_cdf_matches_determinant() {
        for (n_f, t, n) in [(2u32, 0.5, 3u32), (3, 3.0, 5)] {
            let c = empirical_width_cdf(n_f, t, &[n], 20_000, 21).unwrap();
            let e = c.estimates[0];
            let exact = width_probability_exact(n_f, t, n).unwrap();
            assert!((e.probability - exact).abs() <= 3.0 * e.std_error, "N_f={n_f} t={t} N={n}: {e:?} vs {exact}");
        }
    }

    #[test]
    fn packed_ring_is_frozen() {
        let mut rng = stream_rng(8, 0);
        let tr = magnon_measurement_walk(6, 6, 200, &mut rng).unwrap();
        assert!(tr.configs.iter().all(|c| *c == vec![0, 1, 2, 3, 4, 5]));
    }

    #[test]
    fn magnon_walk_conserves_and_excludes() {
        let mut rng = stream_rng(9, 0);
        let tr = magnon_measurement_walk(12, 5, 5000, &mut rng).unwrap();
        for c in &tr.configs {
            assert_eq!(c.len(), 5);
            assert!(c.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn single_magnon_variance_linear() {
        let (steps, runs) = (50usize, 100_000usize);
        let mut rng = stream_rng(10, 0);
        let mut s2 = vec![0.0; steps + 1];
        for _ in 0..runs {
            let tr = magnon_measurement_walk(1000, 1, steps, &mut rng).unwrap();
            for (k, x) in tr.unwrapped.iter().enumerate() {
                s2[k] += (x[0] * x[0]) as f64;
            }
        }
        // simple random walk: Var = k; least-squares slope through the origin
        let num: f64 = (0..=steps).map(|k| k as f64 * s2[k] / runs as f64).sum();
        let den: f64 = (0..=steps).map(|k| (k * k) as f64).sum();
        assert!((num / den - 1.0).abs() < 0.02, "{}", num / den);
    }
}
