//! Model parameters and the cosine band of the semi-infinite lattice.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{ensure_finite, FfaError, Result};

/// Hopping `kappa0` of the lattice, impurity hopping `kappa_a` and the complex
/// impurity energy `ea`. These three numbers define the whole Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    kappa0: f64,
    kappa_a: f64,
    ea: Complex64,
}

impl ModelParams {
    pub fn new(kappa0: f64, kappa_a: f64, ea: Complex64) -> Result<Self> {
        if !kappa0.is_finite() || !kappa_a.is_finite() {
            return Err(FfaError::NonFinite("hopping rate"));
        }
        ensure_finite(ea, "Ea")?;
        if kappa0 <= 0.0 {
            return Err(FfaError::InvalidParameter("kappa0 must be positive"));
        }
        if kappa_a < 0.0 {
            return Err(FfaError::InvalidParameter("kappaA must be non-negative"));
        }
        Ok(Self { kappa0, kappa_a, ea })
    }

    /// Shorthand for `new(kappa0, kappa_a, re_ea + i im_ea)`.
    pub fn from_parts(kappa0: f64, kappa_a: f64, re_ea: f64, im_ea: f64) -> Result<Self> {
        Self::new(kappa0, kappa_a, Complex64::new(re_ea, im_ea))
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn kappa_a(&self) -> f64 {
        self.kappa_a
    }

    pub fn ea(&self) -> Complex64 {
        self.ea
    }

    pub fn with_ea(&self, ea: Complex64) -> Result<Self> {
        Self::new(self.kappa0, self.kappa_a, ea)
    }

    pub fn is_hermitian(&self) -> bool {
        self.ea.im == 0.0
    }

    pub fn is_amplifying(&self) -> bool {
        self.ea.im > 0.0
    }

    pub fn is_absorbing(&self) -> bool {
        self.ea.im < 0.0
    }

    /// Upper band edge `2 kappa0`.
    pub fn band_edge(&self) -> f64 {
        2.0 * self.kappa0
    }

    /// `kappa_a^2 / (2 kappa0^2)`, the prefactor of the closed-form self-energy.
    pub(crate) fn coupling_ratio(&self) -> f64 {
        self.kappa_a * self.kappa_a / (2.0 * self.kappa0 * self.kappa0)
    }
}

/// `E(k) = -2 kappa0 cos k` for `k` in `[0, pi]`.
pub fn band_energy(params: &ModelParams, k: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&k) {
        return Err(FfaError::Domain { what: "k", value: k });
    }
    Ok(-2.0 * params.kappa0 * k.cos())
}

/// Inverse of [`band_energy`]: `k = arccos(-E / 2 kappa0)`.
pub fn momentum_of_energy(params: &ModelParams, energy: f64) -> Result<f64> {
    if !(energy.abs() <= params.band_edge()) {
        return Err(FfaError::Domain { what: "E", value: energy });
    }
    Ok((-energy / params.band_edge()).clamp(-1.0, 1.0).acos())
}

/// Spectral coupling `v(k) = -sqrt(2/pi) kappa_a sin k` between the impurity
/// and the Bloch state `|k>`.
pub fn coupling(params: &ModelParams, k: f64) -> f64 {
    -(2.0 / PI).sqrt() * params.kappa_a * k.sin()
}

/// One-dimensional density of states `1/sqrt(4 kappa0^2 - E^2)`, zero outside
/// the band. The van Hove points `|E| = 2 kappa0` are reported as
/// [`FfaError::BandEdge`].
pub fn density_of_states(params: &ModelParams, energy: f64) -> Result<f64> {
    let edge = params.band_edge();
    if !energy.is_finite() {
        return Err(FfaError::Domain { what: "E", value: energy });
    }
    if energy.abs() == edge {
        return Err(FfaError::BandEdge(energy));
    }
    if energy.abs() > edge {
        return Ok(0.0);
    }
    Ok(1.0 / ((edge - energy) * (edge + energy)).sqrt())
}

/// Spectral function `V(E) = (kappa_a^2 / pi kappa0) sqrt(1 - (E / 2 kappa0)^2)`
/// inside the band, zero outside.
pub fn spectral_density(params: &ModelParams, energy: f64) -> f64 {
    let x = energy / params.band_edge();
    if !(x.abs() < 1.0) {
        return 0.0;
    }
    params.kappa_a * params.kappa_a / (PI * params.kappa0) * ((1.0 - x) * (1.0 + x)).sqrt()
}
