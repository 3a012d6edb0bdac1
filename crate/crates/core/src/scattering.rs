//! Stationary scattering of band plane waves off the impurity at the end of
//! the semi-infinite lattice.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::model::ModelParams;
use crate::spectrum::{Singularity, SingularityKind, SingularityReport, DEFAULT_SINGULARITY_TOL};
use crate::{FfaError, Result};

/// Denominator magnitude below which the reflection is reported divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reflectance {
    Finite(f64),
    /// The incoming wave hits an amplifying singularity at this momentum.
    Divergent(f64),
}

impl Reflectance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Reflectance::Finite(r) => Some(r),
            Reflectance::Divergent(_) => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Reflectance::Divergent(_))
    }
}

fn check_momentum(k: f64) -> Result<()> {
    if !(k > 0.0 && k < PI) {
        return Err(FfaError::Domain { what: "k (must lie in (0, pi))", value: k });
    }
    Ok(())
}

/// `kappa0^2 (2 cos k + Ea / kappa0)`.
fn dressed_energy(params: &ModelParams, k: f64) -> Complex64 {
    let k0 = params.kappa0();
    k0 * (2.0 * k0 * k.cos() + params.ea())
}

/// Numerator and denominator of the reflection coefficient.
fn reflection_parts(params: &ModelParams, k: f64) -> (Complex64, Complex64) {
    let ka2 = params.kappa_a() * params.kappa_a();
    let a = dressed_energy(params, k);
    let phase = Complex64::from_polar(1.0, k);
    (-(ka2 - a * phase), ka2 - a * phase.conj())
}

/// Reflection coefficient `r(k)` of an incoming wave `exp(-ik(n-1))`.
pub fn reflection_coefficient(params: &ModelParams, k: f64) -> Result<Complex64> {
    check_momentum(k)?;
    let (num, den) = reflection_parts(params, k);
    if den.norm() < DIVERGENCE_THRESHOLD {
        return Err(FfaError::DivergentReflection(k));
    }
    Ok(num / den)
}

/// Reflectance `|r(k)|^2` written as an explicit real ratio.
pub fn reflectance(params: &ModelParams, k: f64) -> Result<Reflectance> {
    check_momentum(k)?;
    let k0 = params.kappa0();
    let ka2 = params.kappa_a() * params.kappa_a();
    let a = 2.0 * k0 * k0 * k.cos() + k0 * params.ea().re;
    let b = k0 * params.ea().im;
    let (s, c) = k.sin_cos();
    let num = (ka2 - a * c + b * s).powi(2) + (a * s + b * c).powi(2);
    let den = (ka2 - a * c - b * s).powi(2) + (a * s - b * c).powi(2);
    if den.sqrt() < DIVERGENCE_THRESHOLD {
        return Ok(Reflectance::Divergent(k));
    }
    Ok(Reflectance::Finite(num / den))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub k: f64,
    pub energy: f64,
    pub reflection: Complex64,
    /// Amplitudes on sites `1..=n_max`.
    pub sites: Vec<Complex64>,
    pub impurity: Complex64,
}

/// Plane-wave eigenstate `c_n = exp(-ik(n-1)) + r exp(ik(n-1))` at band energy `-2 kappa0 cos k`.
pub fn stationary_state(params: &ModelParams, k: f64, n_max: usize) -> Result<StationaryState> {
    let r = reflection_coefficient(params, k)?;
    let sites = (0..n_max)
        .map(|m| {
            let phase = Complex64::from_polar(1.0, k * m as f64);
            phase.conj() + r * phase
        })
        .collect();
    let beyond = Complex64::from_polar(1.0, k) + r * Complex64::from_polar(1.0, -k);
    let impurity = if params.kappa_a() > 0.0 { beyond * (params.kappa0() / params.kappa_a()) } else { Complex64::new(0.0, 0.0) };
    Ok(StationaryState { k, energy: -2.0 * params.kappa0() * k.cos(), reflection: r, sites, impurity })
}

/// Spectral singularities as the momenta where the reflectance diverges
/// (amplifying) or vanishes (absorbing), with the default tolerance.
pub fn singularity_from_scattering(params: &ModelParams) -> Result<SingularityReport> {
    singularity_from_scattering_tol(params, DEFAULT_SINGULARITY_TOL)
}

/// Solves `kappa_a^2 sin k0 = kappa0 |Im(Ea)|` together with
/// `(kappa_a^2 - 2 kappa0^2) cos k0 = kappa0 Re(Ea)` for `k0` in `(0, pi)`.
pub fn singularity_from_scattering_tol(params: &ModelParams, tol: f64) -> Result<SingularityReport> {
    if params.is_hermitian() {
        return Err(FfaError::HermitianInput);
    }
    let k0 = params.kappa0();
    let ka2 = params.kappa_a() * params.kappa_a();
    let ea = params.ea();
    let kind = if params.is_amplifying() { SingularityKind::Amplifying } else { SingularityKind::Absorbing };
    let make = |momenta: &[f64], degenerate: bool| SingularityReport {
        singularities: momenta
            .iter()
            .map(|&momentum| Singularity { energy: -2.0 * k0 * momentum.cos(), momentum, kind })
            .collect(),
        degenerate,
    };
    if ka2 == 0.0 {
        return Ok(SingularityReport::default());
    }
    let sin_k = k0 * ea.im.abs() / ka2;
    if sin_k > 1.0 + tol {
        return Ok(SingularityReport::default());
    }
    let detuning = ka2 - 2.0 * k0 * k0;

    if detuning.abs() <= tol * k0 * k0 {
        if ea.re.abs() > tol * k0 {
            return Ok(SingularityReport::default());
        }
        if 1.0 - sin_k <= tol {
            return Ok(make(&[PI / 2.0, PI / 2.0], true));
        }
        let k_low = sin_k.asin();
        return Ok(make(&[k_low, PI - k_low], false));
    }

    let cos_k = k0 * ea.re / detuning;
    if !(cos_k.abs() < 1.0) {
        return Ok(SingularityReport::default());
    }
    let momentum = cos_k.acos();
    if (ka2 * momentum.sin() - k0 * ea.im.abs()).abs() > tol * k0 {
        return Ok(SingularityReport::default());
    }
    Ok(make(&[momentum], false))
}
