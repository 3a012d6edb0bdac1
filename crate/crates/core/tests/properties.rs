use core::f64::consts::PI;

use ffa_core::dynamics::{step, LatticeState};
use ffa_core::model::{coupling, density_of_states, spectral_density};
use ffa_core::scattering::{reflectance, reflection_coefficient, singularity_from_scattering};
use ffa_core::selfenergy::{sigma, sigma_boundary, sigma_second_sheet, Side};
use ffa_core::spectrum::{bound_states, fano_profile, find_singularities, spectrum_is_real, UNIT_CIRCLE_TOL};
use ffa_core::{Complex64, ModelParams};
use proptest::prelude::*;

fn any_params() -> impl Strategy<Value = ModelParams> {
    (0.2f64..3.0, 0.0f64..3.0, -4.0f64..4.0, -4.0f64..4.0)
        .prop_map(|(k0, ka, re, im)| ModelParams::from_parts(k0, ka * k0, re * k0, im * k0).unwrap())
}

fn hermitian_params() -> impl Strategy<Value = ModelParams> {
    (0.2f64..3.0, 0.0f64..3.0, -4.0f64..4.0).prop_map(|(k0, ka, re)| ModelParams::from_parts(k0, ka * k0, re * k0, 0.0).unwrap())
}

/// Points with exactly one spectral singularity, at `kappa0 = 1`.
fn singular_params() -> impl Strategy<Value = ModelParams> {
    (0.2f64..1.35, -1.9f64..1.9, prop::bool::ANY).prop_map(|(ka, e0, up)| {
        let sign = if up { 1.0 } else { -1.0 };
        ModelParams::from_parts(1.0, ka, (1.0 - ka * ka / 2.0) * e0, sign * ka * ka * (1.0 - e0 * e0 / 4.0).sqrt()).unwrap()
    })
}

fn off_axis() -> impl Strategy<Value = Complex64> {
    (-6.0f64..6.0, 0.01f64..6.0, prop::bool::ANY).prop_map(|(re, im, up)| Complex64::new(re, if up { im } else { -im }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn spectral_density_is_dos_times_coupling(p in any_params(), x in -0.999f64..0.999) {
        let e = x * p.band_edge();
        let k = (-x).acos();
        let v = spectral_density(&p, e);
        prop_assert!(v >= 0.0);
        let via_dos = density_of_states(&p, e).unwrap() * coupling(&p, k).powi(2);
        prop_assert!((v - via_dos).abs() <= 1e-12 * (1.0 + v));
    }

    #[test]
    fn self_energy_schwarz_reflection(p in any_params(), z in off_axis()) {
        let a = sigma(&p, z).unwrap();
        let b = sigma(&p, z.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-13 * (1.0 + a.norm()));
    }

    #[test]
    fn self_energy_sign_of_imaginary_part(p in any_params(), z in off_axis()) {
        // Sigma is a Herglotz function up to sign: Im Sigma and Im z have opposite signs.
        let s = sigma(&p, z).unwrap();
        prop_assert!(s.im * z.im <= 1e-15);
    }

    #[test]
    fn boundary_values_have_width(p in any_params(), x in -0.99f64..0.99) {
        let e = x * p.band_edge();
        let up = sigma_boundary(&p, e, Side::Upper).unwrap();
        let down = sigma_boundary(&p, e, Side::Lower).unwrap();
        prop_assert!((up - down.conj()).norm() < 1e-13 * (1.0 + up.norm()));
        prop_assert!((up.im + PI * spectral_density(&p, e)).abs() < 1e-12 * (1.0 + up.norm()));
    }

    #[test]
    fn second_sheet_continues_from_above(p in any_params(), x in -0.95f64..0.95, eta in 1e-3f64..1.0) {
        let z = Complex64::new(x * p.band_edge(), eta);
        let first = sigma(&p, z).unwrap();
        let second = sigma_second_sheet(&p, z).unwrap();
        prop_assert!((first - second).norm() < 1e-12 * (1.0 + first.norm()));
    }

    #[test]
    fn vieta_and_bound_state_criterion(p in any_params()) {
        let r = bound_states(&p);
        let k0 = p.kappa0();
        let ratio = p.kappa_a() / k0;
        prop_assert!((r.xi1 * r.xi2 - Complex64::new(1.0 - ratio * ratio, 0.0)).norm() < 1e-10);
        prop_assert!((r.xi1 + r.xi2 + p.ea() / k0).norm() < 1e-10);
        prop_assert_eq!(r.has_bound_states, r.xi1.norm().max(r.xi2.norm()) > 1.0 + UNIT_CIRCLE_TOL);
        prop_assert_eq!(spectrum_is_real(&p), !r.has_bound_states);
    }

    #[test]
    fn bound_energies_lie_off_the_band(p in any_params()) {
        for z in bound_states(&p).bound_energies {
            prop_assert!(z.im.abs() > 0.0 || z.re.abs() > p.band_edge());
            let res = (z - p.ea() - sigma(&p, z).unwrap()).norm();
            prop_assert!(res < 1e-9 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn hermitian_reflection_is_total(p in hermitian_params(), k in 0.01f64..3.13) {
        let r = reflection_coefficient(&p, k).unwrap();
        prop_assert!((r.norm() - 1.0).abs() < 1e-12);
        prop_assert!((reflectance(&p, k).unwrap().finite().unwrap() - 1.0).abs() < 1e-12);
        let f = fano_profile(&p, -p.band_edge() * k.cos()).unwrap();
        prop_assert!(f >= 0.0 && f.is_finite());
    }

    #[test]
    fn gain_loss_reciprocity(p in any_params(), k in 0.01f64..3.13) {
        let q = p.with_ea(p.ea().conj()).unwrap();
        if let (Some(a), Some(b)) = (reflectance(&p, k).unwrap().finite(), reflectance(&q, k).unwrap().finite()) {
            prop_assert!((a * b - 1.0).abs() < 1e-9 * (1.0 + a.max(b)));
            if p.is_amplifying() {
                prop_assert!(a >= 1.0 - 1e-12);
            } else if p.is_absorbing() {
                prop_assert!(a <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn singularity_routes_agree(p in singular_params()) {
        let a = find_singularities(&p, 1e-9).unwrap();
        let b = singularity_from_scattering(&p).unwrap();
        prop_assert_eq!(a.count(), 1);
        prop_assert_eq!(b.count(), 1);
        prop_assert!((a.singularities[0].energy - b.singularities[0].energy).abs() < 1e-9);
        prop_assert!((a.singularities[0].momentum - b.singularities[0].momentum).abs() < 1e-9);
        prop_assert!(spectrum_is_real(&p));
    }

    #[test]
    fn hermitian_step_preserves_norm(p in hermitian_params(), seed in 0u64..1000) {
        let n = 12;
        let sites: Vec<Complex64> = (0..n).map(|i| Complex64::new(((seed + i) % 7) as f64 - 3.0, ((seed * 3 + i) % 5) as f64 - 2.0)).collect();
        let s = LatticeState::new(0.0, Complex64::new(0.5, -0.2), sites).unwrap();
        let dt = 1e-3 / p.kappa0().max(p.kappa_a()).max(p.ea().norm());
        let next = step(&p, &s, dt).unwrap();
        prop_assert!((next.norm_sqr() - s.norm_sqr()).abs() < 1e-12 * s.norm_sqr());
    }
}
