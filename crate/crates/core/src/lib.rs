//! Non-Hermitian Friedrichs-Fano-Anderson model on a semi-infinite
//! tight-binding lattice with a complex boundary impurity.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the whole numerical
//! pipeline:
//!
//! * [`model`]: parameters, cosine band, density of states, spectral coupling.
//! * [`selfenergy`]: closed-form self-energy with its branch cut, boundary
//!   values, second-sheet continuation and a quadrature oracle.
//! * [`spectrum`]: bound states, reality of the spectrum, spectral
//!   singularities and the Fano normalization route.
//! * [`resolvent`]: resolvent matrix elements, second-sheet poles and the
//!   Bromwich survival amplitude.
//! * [`scattering`]: reflection coefficient and reflectance of lattice waves.
//! * [`dynamics`]: RK4 time stepping of the truncated lattice, wave packets,
//!   impurity decay and the finite-lattice eigenvalue oracle.
//!
//! Energies are measured in the same units as the lattice hopping `kappa0`
//! and times in `1/kappa0`.

#![no_std]
// `!(a < b)` is used deliberately so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

#[cfg(test)]
#[macro_use]
mod testutil;

pub mod dynamics;
mod error;
pub mod linalg;
pub mod model;
pub mod quad;
pub mod resolvent;
pub mod scattering;
pub mod selfenergy;
pub mod spectrum;

pub use error::{FfaError, Result};
pub use model::ModelParams;
pub use num_complex::Complex64;

/// Library version, echoed into output sidecars.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub(crate) fn ensure_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(FfaError::NonFinite(what))
    }
}
