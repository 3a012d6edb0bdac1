//! Classification of the spectrum: bound (surface) states, reality of the
//! spectrum, spectral singularities and the Fano normalization route.
//!
//! Bound states follow from the quadratic
//! `xi^2 + (Ea / kappa0) xi + 1 - (kappa_a / kappa0)^2 = 0` for `xi = exp(mu)`:
//! a root with `|xi| > 1` is a surface state at `z = -kappa0 (xi + 1/xi)`.
//! Spectral singularities are real energies `E0` inside the band with
//! `Im(Ea) = +-pi V(E0)` and `E0 - Re(Ea) = Delta(E0)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::model::{spectral_density, ModelParams};
use crate::selfenergy::{delta_shift, sigma};
use crate::{FfaError, Result};

/// Slack on `|xi| <= 1`. Roots on the unit circle are exact for points on the
/// singularity manifold and would otherwise flip on rounding.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// Default tolerance on the singularity conditions.
pub const DEFAULT_SINGULARITY_TOL: f64 = 1e-9;

/// Relative residual accepted when validating a bound energy against
/// `z - Ea = Sigma(z)`.
const BOUND_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateReport {
    pub xi1: Complex64,
    pub xi2: Complex64,
    pub has_bound_states: bool,
    pub bound_energies: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularityKind {
    /// `Im(Ea) > 0`: divergent reflectance, resolvent unbounded from above.
    Amplifying,
    /// `Im(Ea) < 0`: vanishing reflectance, resolvent unbounded from below.
    Absorbing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub energy: f64,
    pub momentum: f64,
    pub kind: SingularityKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SingularityReport {
    pub singularities: Vec<Singularity>,
    /// Two singularities that have coalesced into one energy.
    pub degenerate: bool,
}

impl SingularityReport {
    pub fn count(&self) -> usize {
        self.singularities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.singularities.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.singularities.iter().map(|s| s.energy).collect()
    }

    pub(crate) fn from_energies(params: &ModelParams, energies: &[f64], degenerate: bool) -> Self {
        let kind = if params.is_amplifying() { SingularityKind::Amplifying } else { SingularityKind::Absorbing };
        let edge = params.band_edge();
        let singularities = energies
            .iter()
            .map(|&energy| Singularity {
                energy,
                momentum: (-energy / edge).clamp(-1.0, 1.0).acos(),
                kind,
            })
            .collect();
        Self { singularities, degenerate }
    }
}

/// Roots of the bound-state quadratic, larger modulus first.
pub fn xi_roots(params: &ModelParams) -> (Complex64, Complex64) {
    let k0 = params.kappa0();
    let b = params.ea() / k0;
    let ratio = params.kappa_a() / k0;
    let c = Complex64::new(1.0 - ratio * ratio, 0.0);
    let disc = (b * b - 4.0 * c).sqrt();
    let big = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
    if big.norm() == 0.0 {
        // b = 0 and c = 0: double root at the origin.
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let q = -0.5 * big;
    (q, c / q)
}

/// Bound (surface) states of the semi-infinite lattice.
pub fn bound_states(params: &ModelParams) -> BoundStateReport {
    let (xi1, xi2) = xi_roots(params);
    let has_bound_states = xi1.norm().max(xi2.norm()) > 1.0 + UNIT_CIRCLE_TOL;
    let k0 = params.kappa0();
    let bound_energies = [xi1, xi2]
        .into_iter()
        .filter(|xi| xi.norm() > 1.0 + UNIT_CIRCLE_TOL)
        .map(|xi| -k0 * (xi + 1.0 / xi))
        .filter(|&z| match sigma(params, z) {
            Ok(s) => (z - params.ea() - s).norm() <= BOUND_RESIDUAL_TOL * (1.0 + z.norm()),
            Err(_) => false,
        })
        .collect();
    BoundStateReport { xi1, xi2, has_bound_states, bound_energies }
}

/// The spectrum is real exactly when it is purely continuous.
pub fn spectrum_is_real(params: &ModelParams) -> bool {
    !bound_states(params).has_bound_states
}

/// Spectral singularities from the resolvent conditions.
///
/// `tol` is an absolute tolerance (in units of `kappa0`) on the width
/// condition `|Im(Ea)| = pi V(E0)` and on the degeneracies `kappa_a^2 = 2 kappa0^2`,
/// `Re(Ea) = 0` and `|Im(Ea)| = 2 kappa0`.
pub fn find_singularities(params: &ModelParams, tol: f64) -> Result<SingularityReport> {
    if params.is_hermitian() {
        return Err(FfaError::HermitianInput);
    }
    let k0 = params.kappa0();
    let edge = params.band_edge();
    let ea = params.ea();
    let one_minus = 1.0 - params.coupling_ratio();
    let width_residual = |e: f64| ea.im.abs() - PI * spectral_density(params, e);

    if one_minus.abs() <= tol {
        if ea.re.abs() > tol * k0 {
            return Ok(SingularityReport::default());
        }
        let gap = edge * edge - ea.im * ea.im;
        if gap < -tol * k0 * k0 {
            return Ok(SingularityReport::default());
        }
        if gap <= tol * k0 * k0 {
            return Ok(SingularityReport::from_energies(params, &[0.0, 0.0], true));
        }
        let e0 = gap.sqrt();
        let energies: Vec<f64> = [-e0, e0].into_iter().filter(|&e| width_residual(e).abs() <= tol * k0).collect();
        return Ok(SingularityReport::from_energies(params, &energies, false));
    }

    let e0 = ea.re / one_minus;
    if !(e0.abs() < edge) || width_residual(e0).abs() > tol * k0 {
        return Ok(SingularityReport::default());
    }
    Ok(SingularityReport::from_energies(params, &[e0], false))
}

/// `Im^2(Ea) - (kappa_a^4 / kappa0^2) [1 - Re^2(Ea) / (2 kappa0 - kappa_a^2 / kappa0)^2]`,
/// zero on the single-singularity manifold. Requires `kappa_a < sqrt(2) kappa0`.
pub fn singularity_constraint_residual(params: &ModelParams) -> Result<f64> {
    let k0 = params.kappa0();
    let ka2 = params.kappa_a() * params.kappa_a();
    if !(ka2 < 2.0 * k0 * k0) {
        return Err(FfaError::Domain { what: "kappaA / kappa0 (must be < sqrt 2)", value: params.kappa_a() / k0 });
    }
    let ea = params.ea();
    let denom = 2.0 * k0 - ka2 / k0;
    Ok(ea.im * ea.im - ka2 * ka2 / (k0 * k0) * (1.0 - ea.re * ea.re / (denom * denom)))
}

/// Real-spectrum verdicts over a `(kappa_a / kappa0, Im(Ea) / kappa0)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealityGrid {
    pub kappa_ratios: Vec<f64>,
    pub im_ea: Vec<f64>,
    pub re_ea: f64,
    /// Row-major: `real[i * im_ea.len() + j]` belongs to `(kappa_ratios[i], im_ea[j])`.
    pub real: Vec<bool>,
}

impl RealityGrid {
    pub fn get(&self, i_kappa: usize, j_im: usize) -> bool {
        self.real[i_kappa * self.im_ea.len() + j_im]
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    !v.is_empty() && v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

/// Evaluates [`spectrum_is_real`] at `kappa0 = 1` for every grid point.
pub fn reality_domain_scan(kappa_ratios: &[f64], im_ea: &[f64], re_ea_over_kappa0: f64) -> Result<RealityGrid> {
    if !strictly_increasing(kappa_ratios) || !strictly_increasing(im_ea) {
        return Err(FfaError::InvalidParameter("scan grids must be non-empty and strictly increasing"));
    }
    let mut real = Vec::with_capacity(kappa_ratios.len() * im_ea.len());
    for &kr in kappa_ratios {
        for &im in im_ea {
            real.push(reality_at(kr, im, re_ea_over_kappa0)?);
        }
    }
    Ok(RealityGrid { kappa_ratios: kappa_ratios.to_vec(), im_ea: im_ea.to_vec(), re_ea: re_ea_over_kappa0, real })
}

/// Single grid point of [`reality_domain_scan`].
pub fn reality_at(kappa_ratio: f64, im_ea_over_kappa0: f64, re_ea_over_kappa0: f64) -> Result<bool> {
    let params = ModelParams::from_parts(1.0, kappa_ratio, re_ea_over_kappa0, im_ea_over_kappa0)?;
    Ok(spectrum_is_real(&params))
}

fn check_inside_band(params: &ModelParams, energy: f64) -> Result<()> {
    if energy.abs() == params.band_edge() {
        return Err(FfaError::BandEdge(energy));
    }
    if !(energy.abs() < params.band_edge()) {
        return Err(FfaError::Domain { what: "E", value: energy });
    }
    Ok(())
}

/// Fano coefficient `z(E) = (Ea - E + Delta(E)) / V(E)`.
pub fn fano_z(params: &ModelParams, energy: f64) -> Result<Complex64> {
    check_inside_band(params, energy)?;
    let v = spectral_density(params, energy);
    if v <= 0.0 {
        return Err(FfaError::BandEdge(energy));
    }
    Ok((params.ea() - energy + delta_shift(params, energy)) / v)
}

/// Fano resonance profile `|alpha(E)|^2` of the Hermitian model.
pub fn fano_profile(params: &ModelParams, energy: f64) -> Result<f64> {
    if !params.is_hermitian() {
        return Err(FfaError::NonHermitianInput);
    }
    check_inside_band(params, energy)?;
    let v = spectral_density(params, energy);
    let detuning = params.ea().re - energy + delta_shift(params, energy);
    let denom = PI * PI * v * v + detuning * detuning;
    if v == 0.0 || denom == 0.0 {
        return Ok(0.0);
    }
    Ok(v / denom)
}

/// Biorthogonal normalization factor `V(E) (pi^2 + z*(E)^2)`; it vanishes
/// exactly at a spectral singularity.
pub fn biorthogonal_norm_factor(params: &ModelParams, energy: f64) -> Result<Complex64> {
    let z = fano_z(params, energy)?.conj();
    let v = spectral_density(params, energy);
    Ok(v * (PI * PI + z * z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(ka: f64, re: f64, im: f64) -> ModelParams {
        ModelParams::from_parts(1.0, ka, re, im).unwrap()
    }

    #[test]
    fn bound_state_examples() {
        let r = bound_states(&params(2.0, 0.0, 0.0));
        assert!(r.has_bound_states);
        assert_close!(r.xi1.norm(), 3f64.sqrt(), 1e-14);
        assert_close!(r.xi2.norm(), 3f64.sqrt(), 1e-14);
        let mut e: Vec<f64> = r.bound_energies.iter().map(|z| z.re).collect();
        e.sort_by(f64::total_cmp);
        assert_close!(e[0], -4.0 / 3f64.sqrt(), 1e-13);
        assert_close!(e[1], 4.0 / 3f64.sqrt(), 1e-13);

        let r = bound_states(&params(1.0, 0.0, 0.0));
        assert_eq!(r.xi1, Complex64::new(0.0, 0.0));
        assert_eq!(r.xi2, Complex64::new(0.0, 0.0));
        assert!(!r.has_bound_states && r.bound_energies.is_empty());

        assert!(!bound_states(&params(2f64.sqrt(), 0.0, 1.9)).has_bound_states);
    }

    #[test]
    fn reality_examples() {
        assert!(spectrum_is_real(&params(2f64.sqrt(), 0.0, 1.0)));
        assert!(!spectrum_is_real(&params(2f64.sqrt(), 0.0, 2.5)));
        let hermitian = bound_states(&params(1.0, 5.0, 0.0));
        assert!(hermitian.has_bound_states);
        assert_eq!(hermitian.bound_energies.len(), 1);
        assert!(hermitian.bound_energies[0].re > 2.0);
    }

    #[test]
    fn vieta_and_bound_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let k0 = rng.gen_range(0.3..3.0);
            let p = ModelParams::from_parts(k0, rng.gen_range(0.0..3.0) * k0, rng.gen_range(-4.0..4.0) * k0, rng.gen_range(-4.0..4.0) * k0)
                .unwrap();
            let r = bound_states(&p);
            let ratio = p.kappa_a() / k0;
            assert_cclose!(r.xi1 * r.xi2, Complex64::new(1.0 - ratio * ratio, 0.0), 1e-10);
            assert_cclose!(r.xi1 + r.xi2, -p.ea() / k0, 1e-10);
            let max = r.xi1.norm().max(r.xi2.norm());
            assert_eq!(r.has_bound_states, max > 1.0 + UNIT_CIRCLE_TOL);
            let expected = [r.xi1, r.xi2].iter().filter(|x| x.norm() > 1.0 + UNIT_CIRCLE_TOL).count();
            assert_eq!(r.bound_energies.len(), expected);
            for z in &r.bound_energies {
                let res = (z - p.ea() - sigma(&p, *z).unwrap()).norm();
                assert!(res < 1e-9 * (1.0 + z.norm()));
            }
        }
    }

    #[test]
    fn singularity_examples() {
        let r = find_singularities(&params(1.0, 0.0, 1.0), 1e-9).unwrap();
        assert_eq!(r.count(), 1);
        assert_close!(r.singularities[0].energy, 0.0, 1e-12);
        assert_close!(r.singularities[0].momentum, PI / 2.0, 1e-12);
        assert_eq!(r.singularities[0].kind, SingularityKind::Amplifying);

        let r = find_singularities(&params(2f64.sqrt(), 0.0, 1.0), 1e-9).unwrap();
        assert_eq!(r.count(), 2);
        assert!(!r.degenerate);
        assert_close!(r.singularities[0].energy, -3f64.sqrt(), 1e-12);
        assert_close!(r.singularities[1].energy, 3f64.sqrt(), 1e-12);

        let r = find_singularities(&params(2f64.sqrt(), 0.0, -1.0), 1e-9).unwrap();
        assert!(r.singularities.iter().all(|s| s.kind == SingularityKind::Absorbing));

        assert!(find_singularities(&params(1.0, 0.5, 0.3), 1e-9).unwrap().is_empty());
        assert_eq!(find_singularities(&params(1.0, 0.5, 0.0), 1e-9), Err(FfaError::HermitianInput));
    }

    #[test]
    fn empty_report_has_no_zero_on_dense_scan() {
        // Neither Im(Ea) = +pi V(E) nor E - Re(Ea) = Delta(E) can be met together.
        let p = params(1.0, 0.5, 0.3);
        let min = (1..4000)
            .map(|i| -2.0 + 4.0 * i as f64 / 4000.0)
            .map(|e| {
                let s = crate::selfenergy::sigma_boundary(&p, e, crate::selfenergy::Side::Upper).unwrap();
                (Complex64::new(e, 0.0) - p.ea() - s).norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min > 0.1, "{min}");
    }

    #[test]
    fn coalesced_singularities() {
        let r = find_singularities(&params(2f64.sqrt(), 0.0, 2.0), 1e-9).unwrap();
        assert_eq!(r.count(), 2);
        assert!(r.degenerate);
        assert!(r.energies().iter().all(|e| e.abs() < 1e-12));
        assert!(find_singularities(&params(2f64.sqrt(), 0.0, 2.1), 1e-9).unwrap().is_empty());
        assert!(find_singularities(&params(2f64.sqrt(), 0.2, 1.0), 1e-9).unwrap().is_empty());
    }

    #[test]
    fn constraint_residual_examples() {
        assert_close!(singularity_constraint_residual(&params(1.0, 0.0, 1.0)).unwrap(), 0.0, 1e-15);
        assert_close!(singularity_constraint_residual(&params(1.0, 0.0, 0.5)).unwrap(), -0.75, 1e-15);
        assert_close!(singularity_constraint_residual(&params(1.0, 1.0, 0.0)).unwrap(), 0.0, 1e-15);
        assert!(singularity_constraint_residual(&params(1.5, 0.0, 0.5)).is_err());
    }

    #[test]
    fn domain_scan_examples() {
        let kappas: Vec<f64> = (0..81).map(|i| 2.0 * i as f64 / 80.0).collect();
        let ims: Vec<f64> = (0..121).map(|j| -3.0 + 6.0 * j as f64 / 120.0).collect();
        let g = reality_domain_scan(&kappas, &ims, 0.0).unwrap();
        for (i, &k) in kappas.iter().enumerate() {
            let any = (0..ims.len()).any(|j| g.get(i, j));
            assert_eq!(any, k <= 2f64.sqrt() + 1e-12, "kappa = {k}");
        }
        let g = reality_domain_scan(&kappas, &ims, 2.0).unwrap();
        for (i, &k) in kappas.iter().enumerate() {
            for (j, &im) in ims.iter().enumerate() {
                assert_eq!(g.get(i, j), k == 0.0 && im == 0.0, "({k}, {im})");
            }
        }
        let column: Vec<f64> = (0..41).map(|j| -2.5 + 5.0 * j as f64 / 40.0).collect();
        let g = reality_domain_scan(&[2f64.sqrt()], &column, 0.0).unwrap();
        for (j, &im) in column.iter().enumerate() {
            assert_eq!(g.get(0, j), im.abs() <= 2.0, "Im = {im}");
        }
        assert!(reality_domain_scan(&[], &ims, 0.0).is_err());
        assert!(reality_domain_scan(&[1.0, 0.5], &ims, 0.0).is_err());
    }

    #[test]
    fn fano_examples() {
        assert_cclose!(fano_z(&params(1.0, 0.0, 1.0), 0.0).unwrap(), Complex64::new(0.0, PI), 1e-14);
        assert_cclose!(fano_z(&params(1.0, 0.0, 0.0), 0.0).unwrap(), Complex64::new(0.0, 0.0), 1e-15);
        assert_cclose!(fano_z(&params(1.0, 0.5, 0.0), 1.0).unwrap(), Complex64::new(0.0, 0.0), 1e-15);
        assert!(matches!(fano_z(&params(1.0, 0.0, 0.0), 2.0), Err(FfaError::BandEdge(_))));
        assert!(matches!(fano_z(&params(0.0, 0.0, 0.0), 0.3), Err(FfaError::BandEdge(_))));

        assert_cclose!(biorthogonal_norm_factor(&params(1.0, 0.0, 1.0), 0.0).unwrap(), Complex64::new(0.0, 0.0), 1e-14);
        assert_cclose!(
            biorthogonal_norm_factor(&params(1.0, 0.0, 0.5), 0.0).unwrap(),
            Complex64::new(0.75 * PI, 0.0),
            1e-14
        );
        for e in [-1.5, -0.2, 0.7, 1.9] {
            let f = biorthogonal_norm_factor(&params(0.8, 0.3, 0.0), e).unwrap();
            assert!(f.re > 0.0 && f.im == 0.0);
        }
    }

    #[test]
    fn fano_profile_peak_and_weight() {
        let p = params(0.4, 0.5, 0.0);
        let n = 2000;
        let (mut best_e, mut best) = (0.0, 0.0);
        for i in 1..n {
            let e = -2.0 + 4.0 * i as f64 / n as f64;
            let f = fano_profile(&p, e).unwrap();
            if f > best {
                best = f;
                best_e = e;
            }
        }
        assert!((best_e - 0.5 / 0.92).abs() < 5e-3, "peak at {best_e}");
        let weight = crate::quad::integrate(
            |t: f64| Complex64::new(fano_profile(&p, 2.0 * t.cos()).unwrap_or(0.0) * 2.0 * t.sin(), 0.0),
            0.0,
            PI,
            &crate::quad::QuadOptions::default(),
        )
        .unwrap();
        assert_close!(weight.value.re, 1.0, 1e-3);
        assert_eq!(fano_profile(&p, 2.0), Err(FfaError::BandEdge(2.0)));
        assert!(fano_profile(&params(0.4, 0.5, 0.1), 0.0).is_err());
        assert!(fano_profile(&p, 2.0 - 1e-15).unwrap() < 1e-6);
    }

    fn random_manifold_point(rng: &mut ChaCha8Rng) -> ModelParams {
        let ka: f64 = rng.gen_range(0.2..1.35);
        let e0: f64 = rng.gen_range(-1.9..1.9);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let re = (1.0 - ka * ka / 2.0) * e0;
        let im = sign * ka * ka * (1.0 - e0 * e0 / 4.0).sqrt();
        params(ka, re, im)
    }

    #[test]
    fn resolvent_and_fano_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let p = random_manifold_point(&mut rng);
            assert!(singularity_constraint_residual(&p).unwrap().abs() < 1e-12);
            let r = find_singularities(&p, 1e-9).unwrap();
            assert_eq!(r.count(), 1, "{p:?}");
            let f = biorthogonal_norm_factor(&p, r.singularities[0].energy).unwrap();
            assert!(f.norm() < 1e-8, "{f}");
        }
    }

    #[test]
    fn singularities_sit_on_reality_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let p = random_manifold_point(&mut rng);
            assert!(spectrum_is_real(&p));
            let ea = p.ea();
            let pushed = p.with_ea(Complex64::new(ea.re, ea.im * (1.0 + 1e-6))).unwrap();
            assert!(!spectrum_is_real(&pushed), "{p:?}");
        }
        // On kappa_a = sqrt(2) kappa0 the pair of singularities persists for all
        // |Im(Ea)| < 2 kappa0; leaving the sector through kappa_a flips instead.
        let p = params(2f64.sqrt(), 0.0, 1.0);
        assert!(spectrum_is_real(&p));
        assert!(spectrum_is_real(&params(2f64.sqrt(), 0.0, 1.0 + 1e-6)));
        assert!(!spectrum_is_real(&params(2f64.sqrt() + 1e-6, 0.0, 1.0)));
    }
}
