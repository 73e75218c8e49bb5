//! Property tests for the structural identities the library relies on.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tms_core::cmath::TWO_PI;
use tms_core::kernels::{lambda_fn, lambda_quadrature, n_on_line};
use tms_core::mellin::{default_s_grid, mellin_forward, mellin_inverse, plane_to_strip, strip_to_plane};
use tms_core::spectrum::{
    brackets, disjoint_from, gamma_eta, gamma_from_poles, h_level, ladder, residue_condition_gap, ExtensionBeta,
};
use tms_core::{zeros, CriticalConstants, QuadratureConfig, StripPoint};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn gamma_is_unimodular_and_eta_in_range(alpha in 0.0..TWO_PI, s0 in 0.05f64..5.0) {
        let beta = ExtensionBeta::from_angle(alpha).unwrap();
        let (gamma, eta) = gamma_eta(beta, s0).unwrap();
        prop_assert!((gamma.norm() - 1.0).abs() < 1e-14);
        prop_assert!(eta > 0.0 && eta <= TWO_PI);
        prop_assert!((Complex64::from_polar(1.0, eta) - gamma).norm() < 1e-13);
        prop_assert!((gamma_from_poles(beta, s0) - gamma).norm() < 1e-10);
    }

    #[test]
    fn beta_is_projective(alpha in 0.0..TWO_PI, scale in 1e-3f64..1e3) {
        let a = ExtensionBeta::from_angle(alpha).unwrap();
        let b = ExtensionBeta::new(a.beta * scale).unwrap();
        prop_assert!((a.beta - b.beta).norm() < 1e-14);
    }

    #[test]
    fn ladder_is_geometric_and_solves_residue_condition(
        alpha in 0.0..TWO_PI,
        s0 in 0.3f64..3.0,
        n_min in -4i64..0,
        len in 1i64..6,
    ) {
        let beta = ExtensionBeta::from_angle(alpha).unwrap();
        let l = ladder(beta, s0, n_min, n_min + len).unwrap();
        prop_assert_eq!(l.entries.len() as i64, len + 1);
        for w in l.entries.windows(2) {
            prop_assert!(w[0].lambda_n < 0.0);
            prop_assert!((w[1].lambda_n / w[0].lambda_n - l.ratio).abs() < 1e-12 * l.ratio);
        }
        for e in &l.entries {
            prop_assert!(residue_condition_gap(e.lambda_n, beta, s0) < 1e-9);
        }
    }

    #[test]
    fn h_levels_scale_with_the_inverse_square_ratio(
        alpha in 0.0..TWO_PI,
        s0 in 0.3f64..3.0,
        eps in 1e-3f64..1.0,
    ) {
        let l = ladder(ExtensionBeta::from_angle(alpha).unwrap(), s0, 0, 3).unwrap();
        let h: Vec<f64> = l.entries.iter().map(|e| h_level(e.lambda_n, eps).unwrap()).collect();
        for w in h.windows(2) {
            prop_assert!(w[0] < 0.0);
            prop_assert!((w[1] / w[0] * l.ratio * l.ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_is_even_about_the_middle_line(
        mu in 0.05f64..1.99,
        re in -3.0f64..3.0,
        im in -0.5f64..0.5,
    ) {
        let zeta = Complex64::new(re, im);
        let a = lambda_fn(StripPoint::new(Complex64::new(0.0, 0.5) + zeta).unwrap(), mu, &cfg()).unwrap();
        let b = lambda_fn(StripPoint::new(Complex64::new(0.0, 0.5) - zeta).unwrap(), mu, &cfg()).unwrap();
        prop_assert!((a - b).norm() <= 1e-13 * (1.0 + a.norm()));
    }

    #[test]
    fn strip_and_plane_round_trip(re in -4.0f64..4.0, im in 0.0f64..=1.0) {
        let z = StripPoint::new(Complex64::new(re, im)).unwrap();
        let back = plane_to_strip(strip_to_plane(z)).unwrap();
        prop_assert!((back.z - z.z).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn closed_form_matches_quadrature(mu in 0.05f64..1.99, re in -6.0f64..6.0, im in 0.0f64..=1.0) {
        let z = StripPoint::new(Complex64::new(re, im)).unwrap();
        let a = lambda_fn(z, mu, &cfg()).unwrap();
        let b = lambda_quadrature(z, mu, &cfg()).unwrap();
        prop_assert!((a - b).norm() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn symbol_is_positive_on_the_line_below_mu1(mu in 0.05f64..1.86, s in -20.0f64..20.0) {
        prop_assume!(mu < CriticalConstants::standard().mu1 - 1e-6);
        prop_assert!(n_on_line(s, mu, &cfg()).unwrap() > 0.0);
    }
}

proptest! {
    #![proptest_config(config(12))]

    /// Gaussians in `ln r`, modulated: the transform is unitary from `L²(r² dr)`
    /// and the inverse recovers the input.
    #[test]
    fn mellin_round_trip_and_parseval(
        centre in -2.0f64..2.0,
        width in 0.6f64..2.0,
        freq in -3.0f64..3.0,
    ) {
        let phi = move |r: f64| {
            let u = r.ln();
            Complex64::from_polar((-(u - centre).powi(2) / (2.0 * width * width)).exp(), freq * u) * r.powf(-1.5)
        };
        let f = mellin_forward(phi, &default_s_grid(), &cfg()).unwrap();
        let exact = width * PI.sqrt();
        prop_assert!((f.l2_norm_sq() - exact).abs() < 1e-8 * exact);

        let r_grid: Vec<f64> = (-8..=8).map(|k| (centre + 0.25 * width * k as f64).exp()).collect();
        let back = mellin_inverse(&f, &r_grid, &cfg()).unwrap();
        for (r, v) in r_grid.iter().zip(&back.values) {
            let want = phi(*r);
            prop_assert!((v - want).norm() < 1e-7 * (1.0 + want.norm() * r.powf(1.5)) * r.powf(-1.5));
        }
    }

    #[test]
    fn brackets_are_disjoint_from_n0(mu in 1.87f64..1.99, alpha in 0.0..TWO_PI) {
        let s0 = zeros::s0_of_mu(mu, CriticalConstants::standard(), &cfg()).unwrap();
        let beta = ExtensionBeta::from_angle(alpha).unwrap();
        let l = ladder(beta, s0, -2, 8).unwrap();
        let set = brackets(&l, mu).unwrap();
        prop_assert!(disjoint_from(&set, set.n0));
        // Just below n0 the condition fails, which is what makes n0 the least such index.
        let below = set.n0 - 1;
        let pair = set.brackets.iter().position(|b| b.n == below);
        if let Some(k) = pair {
            if k + 1 < set.brackets.len() {
                prop_assert!(set.brackets[k + 1].hi >= set.brackets[k].lo);
            }
        }
        prop_assert!(set.kappa < 0.0);
    }
}
