use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semicrossed::cli::parse_point;
use semicrossed::dynsys::DynamicalSystem;
use semicrossed::norms::{spectral_norm_bracket, svd_norm};
use semicrossed::repr::{orbit_rep_matrix, periodic_rep_matrix};
use semicrossed::sample::{random_crossed, random_matrix, random_point, random_semicrossed, random_system};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lambda(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periodic_rep_is_a_star_homomorphism(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut r = rng(seed);
        let sys = random_system(&mut r);
        let f = random_crossed(&sys, &mut r, -2..=2, 3);
        let g = random_crossed(&sys, &mut r, -2..=2, 3);
        let ys = sys.periodic_points(3);
        let y = &ys[seed as usize % ys.len()];
        let l = lambda(t);
        let rep = |e| periodic_rep_matrix(&sys, y, l, e).unwrap();
        let fg = f.multiply(&sys, &g).unwrap();
        prop_assert!(rep(&fg).max_abs_diff(&rep(&f).mul(&rep(&g))) <= 1e-10);
        prop_assert!(rep(&f.adjoint(&sys).unwrap()).max_abs_diff(&rep(&f).adjoint()) <= 1e-10);
    }

    #[test]
    fn orbit_compressions_are_multiplicative(seed in any::<u64>(), n in 2usize..20) {
        let mut r = rng(seed);
        let sys = random_system(&mut r);
        let f = random_semicrossed(&sys, &mut r, 3);
        let g = random_semicrossed(&sys, &mut r, 3);
        let x = random_point(&sys, &mut r).unwrap();
        let rep = |e| orbit_rep_matrix(&sys, &x, e, n).unwrap();
        let fg = f.multiply(&sys, &g).unwrap();
        prop_assert!(rep(&fg).max_abs_diff(&rep(&f).mul(&rep(&g))) <= 1e-10);
    }

    #[test]
    fn pushdown_preserves_periodic_norms(seed in any::<u64>(), j in 0usize..3, t in 0.0f64..1.0) {
        let mut r = rng(seed);
        let sys = random_system(&mut r);
        let g = random_crossed(&sys, &mut r, 0..=2, 4);
        let h = g.pushdown(&sys, g.max_depth() - 1 + j).unwrap();
        prop_assert!(h.is_semicrossed());
        for y in sys.periodic_points(2) {
            let a = svd_norm(&periodic_rep_matrix(&sys, &y, lambda(t), &g).unwrap());
            let b = svd_norm(&periodic_rep_matrix(&sys, &y, lambda(t), &h).unwrap());
            prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
        }
    }

    #[test]
    fn orbit_norms_respect_the_l1_cap(seed in any::<u64>(), n in 1usize..32) {
        let mut r = rng(seed);
        let sys = random_system(&mut r);
        let f = random_semicrossed(&sys, &mut r, 3);
        let x = random_point(&sys, &mut r).unwrap();
        let m = orbit_rep_matrix(&sys, &x, &f, n).unwrap();
        prop_assert!(svd_norm(&m) <= f.ell1_upper() + 1e-10);
    }

    #[test]
    fn spectral_bracket_contains_svd(seed in any::<u64>(), n in 1usize..24) {
        let mut r = rng(seed);
        let sys = random_system(&mut r);
        let f = random_semicrossed(&sys, &mut r, 3);
        let x = random_point(&sys, &mut r).unwrap();
        let m = orbit_rep_matrix(&sys, &x, &f, n).unwrap();
        let s = svd_norm(&m);
        let (lo, hi) = spectral_norm_bracket(&m).unwrap();
        prop_assert!(lo <= s + 1e-9 && s <= hi + 1e-9, "[{}, {}] vs {}", lo, hi, s);
    }

    #[test]
    fn points_round_trip_through_display(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = match seed % 3 {
            0 => DynamicalSystem::circle(2 + (seed % 4) as u32).unwrap(),
            1 => DynamicalSystem::Sft(random_matrix(&mut r, 3)),
            _ => random_system(&mut r),
        };
        let x = random_point(&sys, &mut r).unwrap();
        prop_assert_eq!(parse_point(&sys, &x.to_string()).unwrap(), x);
    }
}
