use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

use xx0::chainoracle::{build_sector_hamiltonian, schur_poly, Partition, SectorBasis};
use xx0::cli::fmt_f64;
use xx0::detcore::{
    gw_log_det, gw_log_ratio_wrapped, hankel_continuous, toeplitz_discrete_real, WeightSpec,
};
use xx0::linalg::is_positive_definite;
use xx0::nibmsim::{magnon_measurement_walk, sample_nonintersecting, stream_rng};
use xx0::partition::{free_energy_finite, width_probability_exact, Model, ModelParams};
use xx0::phase::{
    boundary_hit_probability, classify, free_energy_gw_finite, j_param, mu_sigma, wall_distance, wall_n_inv, Region,
};
use xx0::specfun::{airy_ai, bessel_i, log_gamma};
use xx0::tracywidom::TwEvaluator;

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

fn costly() -> ProptestConfig {
    ProptestConfig::with_cases(12)
}

// ---------------------------------------------------------------- special functions

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn bessel_nonnegative_decreasing_even(t in 0.0f64..60.0, k in 0i64..40) {
        let a = bessel_i(k, t).unwrap();
        let b = bessel_i(k + 1, t).unwrap();
        prop_assert!(a >= 0.0 && b >= 0.0);
        prop_assert!(b <= a);
        prop_assert_eq!(bessel_i(-k, t).unwrap(), a);
    }

    #[test]
    fn bessel_generating_function_at_one(t in 0.0f64..20.0) {
        let kk = t.ceil() as i64 + 40;
        let s: f64 = (-kk..=kk).map(|k| bessel_i(k, t).unwrap()).sum();
        prop_assert!((s / t.exp() - 1.0).abs() <= 1e-10, "{} vs {}", s, t.exp());
    }

    #[test]
    fn log_gamma_recurrence(x in 0.05f64..150.0) {
        let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        prop_assert!((d - x.ln()).abs() <= 1e-12 * (1.0 + x.ln().abs()));
    }

    #[test]
    fn airy_satisfies_its_ode(x in -8.0f64..6.0) {
        // fourth-order accurate second difference
        let h = 1e-2;
        let d2 = |h: f64| (airy_ai(x + h) - 2.0 * airy_ai(x) + airy_ai(x - h)) / (h * h);
        let second = (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
        prop_assert!((second - x * airy_ai(x)).abs() <= 1e-6);
    }
}

// ---------------------------------------------------------------- Tracy-Widom

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn tw_cdf_monotone_and_bounded(a in -9.0f64..7.0, b in -9.0f64..7.0) {
        let ev = TwEvaluator::standard();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(ev.cdf(hi) >= ev.cdf(lo));
        for x in [lo, hi] {
            let f = ev.cdf(x);
            prop_assert!(f > 0.0 && f < 1.0, "F({}) = {}", x, f);
        }
    }

    #[test]
    fn log_cdf_curvature_is_minus_q_squared(s in -6.0f64..6.0) {
        let ev = TwEvaluator::standard();
        let h = 1e-2;
        let d2 = (ev.log_cdf(s + h) - 2.0 * ev.log_cdf(s) + ev.log_cdf(s - h)) / (h * h);
        let q = ev.q(s).unwrap();
        prop_assert!((d2 + q * q).abs() <= 1e-4, "s={} d2={} q^2={}", s, d2, q * q);
    }
}

// ---------------------------------------------------------------- determinants

proptest! {
    #![proptest_config(costly())]

    #[test]
    fn gw_toeplitz_determinant_positive(n in 1usize..48, t in 0.0f64..60.0) {
        let d = gw_log_det(t, n).unwrap();
        prop_assert_eq!(d.sign, 1);
        prop_assert!(d.log_abs.is_finite());
    }

    #[test]
    fn wrap_correction_shrinks_with_lattice(n_f in 1usize..5, t in 0.1f64..4.0) {
        let a = gw_log_ratio_wrapped(t, n_f, 64).unwrap().abs();
        let b = gw_log_ratio_wrapped(t, n_f, 128).unwrap().abs();
        prop_assert!(b < a, "N=64: {}, N=128: {}", a, b);
    }
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn hankel_moment_matrices_positive_definite(n_f in 1u32..24, n in 1usize..=12) {
        let h = hankel_continuous(&WeightSpec::gaussian(n_f).unwrap(), n).unwrap();
        prop_assert!(is_positive_definite(&h));
    }

    #[test]
    fn discrete_toeplitz_is_wrapped_fourier_sum(n in 1usize..6, big_n in 8u32..40, t in 0.0f64..8.0) {
        let w = WeightSpec::gross_witten(t).unwrap();
        let m = toeplitz_discrete_real(&w, n, big_n).unwrap();
        let scale = t.exp();
        for j in 0..n {
            for l in 0..n {
                // (1/N) sum_k z_k^{-(j-l)} f(z_k) over the N-th roots of unity
                let d = j as f64 - l as f64;
                let direct: f64 = (0..big_n)
                    .map(|k| {
                        let th = 2.0 * PI * k as f64 / big_n as f64;
                        (t * th.cos()).exp() * (d * th).cos()
                    })
                    .sum::<f64>()
                    / big_n as f64;
                prop_assert!((m.get(j, l) - direct).abs() <= 1e-12 * scale);
            }
        }
    }
}

// ---------------------------------------------------------------- partition functions

proptest! {
    #![proptest_config(costly())]

    #[test]
    fn width_probability_is_a_cdf(n_f in 1u32..4, t in 0.05f64..3.0, n in 1u32..12) {
        let a = width_probability_exact(n_f, t, n).unwrap();
        let b = width_probability_exact(n_f, t, n + 1).unwrap();
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(b >= a - 1e-8, "P(W<{})={} P(W<{})={}", n, a, n + 1, b);
    }

    #[test]
    fn free_energy_nondecreasing_in_t(n_f in 1u32..6, extra in 0u32..20, t in 0.0f64..8.0, dt in 0.01f64..2.0) {
        let n = n_f + extra;
        let a = free_energy_finite(&ModelParams::new(n, n_f, t).unwrap(), Model::Gw).unwrap();
        let b = free_energy_finite(&ModelParams::new(n, n_f, t + dt).unwrap(), Model::Gw).unwrap();
        prop_assert!(b >= a - 1e-12, "{} -> {}", a, b);
    }
}

// ---------------------------------------------------------------- phase diagram

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn region_matches_sign_of_j(tau in 0.01f64..5.0, n_inv in 0.01f64..6.0) {
        let p = classify(tau, n_inv).unwrap();
        let j = j_param(tau, n_inv).unwrap();
        prop_assert!(p.wall_distance >= 0.0);
        prop_assert!(wall_distance(tau, n_inv) >= 0.0);
        let above = matches!(p.region, Region::II | Region::IV);
        prop_assert_eq!(j > 0.0, above);
        prop_assert_eq!(tau <= 1.0, matches!(p.region, Region::I | Region::II));
    }

    #[test]
    fn free_energy_continuous_across_walls(tau in 0.05f64..4.0, h in 1e-6f64..1e-3) {
        let w = wall_n_inv(tau);
        let jump = (free_energy_gw_finite(tau, w + h).unwrap() - free_energy_gw_finite(tau, w - h).unwrap()).abs();
        prop_assert!(jump <= 1e-6 * h + 1e-15, "jump {} at h {}", jump, h);
        // and across tau = 1 at fixed n_inv
        let n_inv = 0.5 + tau;
        let jt = (free_energy_gw_finite(1.0 + h, n_inv).unwrap() - free_energy_gw_finite(1.0 - h, n_inv).unwrap()).abs();
        prop_assert!(jt <= 10.0 * h, "jump {} at h {}", jt, h);
    }

    #[test]
    fn scaling_pair_bounds(n_f in 1u32..200, t in 0.001f64..400.0) {
        let ms = mu_sigma(n_f, t).unwrap();
        prop_assert!(ms.sigma > 0.0);
        prop_assert!(ms.mu >= 2.0 * (n_f as f64 * t).sqrt() * (1.0 - 1e-15));
    }

    #[test]
    fn boundary_hit_decreasing_in_n(n_f in 2u32..40, t in 1.0f64..40.0, n in 2u32..120) {
        let ev = TwEvaluator::standard();
        let n = n.max(n_f);
        let a = boundary_hit_probability(&ModelParams::new(n, n_f, t).unwrap(), Model::Gw, ev).unwrap();
        let b = boundary_hit_probability(&ModelParams::new(n + 1, n_f, t).unwrap(), Model::Gw, ev).unwrap();
        prop_assert!(b <= a);
        // strict unless the value has saturated at the ends of double range
        if a > 1e-290 && b < 1.0 - 1e-15 {
            prop_assert!(b < a, "p({})={} p({})={}", n, a, n + 1, b);
        }
    }
}

// ---------------------------------------------------------------- chain oracle

fn binom(n: u32, k: u32) -> usize {
    (0..k).fold(1u128, |a, i| a * (n - i) as u128 / (i + 1) as u128) as usize
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn sector_basis_shape(n in 1u32..14, k in 0u32..14) {
        let n_f = k.min(n);
        let b = SectorBasis::new(n, n_f, 1 << 20).unwrap();
        prop_assert_eq!(b.len(), binom(n, n_f));
        let mut prev: Option<Vec<u32>> = None;
        for i in 0..b.len() {
            let p = b.positions(i);
            prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(b.index_of(&p), Some(i));
            if let Some(q) = &prev {
                prop_assert!(q < &p);
            }
            prev = Some(p);
        }
    }

    #[test]
    fn sector_hamiltonian_symmetric(n in 3u32..11, k in 0u32..11, delta in 0.1f64..3.0, periodic: bool) {
        let n_f = k.min(n);
        let h = build_sector_hamiltonian(n, n_f, delta, periodic).unwrap().matrix.to_dense();
        for i in 0..h.rows() {
            for j in 0..i {
                prop_assert_eq!(h.get(i, j), h.get(j, i));
            }
        }
    }

    #[test]
    fn schur_symmetric_under_permutation(
        parts in prop::collection::vec(0u32..5, 0..4),
        re in prop::collection::vec(-1.5f64..1.5, 4),
        im in prop::collection::vec(-1.5f64..1.5, 4),
        perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let mut parts = parts;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let lam = Partition::new(parts).unwrap();
        let vars: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let shuffled: Vec<Complex64> = perm.iter().map(|&i| vars[i]).collect();
        let a = schur_poly(&lam, &vars).unwrap();
        let b = schur_poly(&lam, &shuffled).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()), "{} vs {}", a, b);
    }
}

// ---------------------------------------------------------------- Monte Carlo

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn sampled_bridges_are_ordered_and_closed(seed: u64, n_f in 1u32..4, t in 0.05f64..2.0) {
        let mut rng = stream_rng(seed, 0);
        let e = sample_nonintersecting(n_f, t, &mut rng, 1_000_000).unwrap();
        prop_assert_eq!(e.paths.len(), n_f as usize);
        for (i, p) in e.paths.iter().enumerate() {
            prop_assert_eq!(p.start, i as i64);
            prop_assert_eq!(p.end(), p.start);
            prop_assert!(p.jump_times.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(p.jump_times.iter().all(|&s| s > 0.0 && s < t));
        }
        // independent walk over the merged event list
        let mut events: Vec<(f64, usize, i8)> = e
            .paths
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.jump_times.iter().zip(&p.jump_signs).map(move |(&s, &d)| (s, i, d)))
            .collect();
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut pos: Vec<i64> = (0..n_f as i64).collect();
        for (_, i, d) in events {
            pos[i] += d as i64;
            prop_assert!(pos.windows(2).all(|w| w[0] < w[1]), "collision at {:?}", pos);
        }
        prop_assert!(e.width >= n_f as i64 - 1);
    }

    #[test]
    fn magnon_walk_conserves_number_and_exclusion(seed: u64, n in 3u32..20, k in 1u32..20, steps in 1usize..200) {
        let n_f = k.min(n - 1);
        let mut rng = stream_rng(seed, 1);
        let tr = magnon_measurement_walk(n, n_f, steps, &mut rng).unwrap();
        for c in &tr.configs {
            prop_assert_eq!(c.len(), n_f as usize);
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            prop_assert_eq!(s.len(), n_f as usize);
            prop_assert!(c.iter().all(|&p| p < n));
        }
    }
}

// ---------------------------------------------------------------- output

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn printed_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }
}
