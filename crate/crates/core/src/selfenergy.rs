//! Self-energy of the impurity coupled to the semi-infinite band.
//!
//! The closed form is `Sigma(z) = -i c (w(z) + i z)` with
//! `c = kappa_a^2 / (2 kappa0^2)` and `w(z)` the determination of
//! `sqrt(4 kappa0^2 - z^2)` that is analytic off the band `[-2 kappa0, 2 kappa0]`,
//! positive on the upper lip of the cut and `~ -i z` at infinity. With this
//! choice `Sigma(E + i0) = Delta(E) - i pi V(E)` and `z Sigma(z) -> kappa_a^2`.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::model::{spectral_density, ModelParams};
use crate::quad::{integrate, Integral, QuadOptions};
use crate::{ensure_finite, FfaError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Riemann sheet of the resolvent.
///
/// `Second` is the continuation of the physical sheet from the upper half
/// plane through the band into the lower half plane. It coincides with
/// `First` for `Im(z) > 0` and differs from it below the band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    First,
    Second,
}

/// Side of the real axis from which a boundary value is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `E + i0`
    Upper,
    /// `E - i0`
    Lower,
}

fn on_cut(params: &ModelParams, z: Complex64) -> bool {
    z.im == 0.0 && z.re.abs() <= params.band_edge()
}

/// Principal `sqrt(4 kappa0^2 - z^2)`; its cuts lie on the real axis outside
/// the band, so it is analytic across the band itself.
fn principal_root(params: &ModelParams, z: Complex64) -> Complex64 {
    let edge = params.band_edge();
    ((edge - z) * (edge + z)).sqrt()
}

/// Physical-sheet `w(z)`. Requires `z` off the cut.
pub(crate) fn band_root(params: &ModelParams, z: Complex64) -> Complex64 {
    if z.norm() >= params.kappa0() {
        let u = params.band_edge() / z;
        -I * z * (1.0 - u * u).sqrt()
    } else {
        // Near the band centre the principal root is accurate; it equals w in
        // the upper half plane and -w in the lower one.
        principal_root(params, z) * z.im.signum()
    }
}

/// Closed-form self-energy on the physical sheet.
pub fn sigma(params: &ModelParams, z: Complex64) -> Result<Complex64> {
    ensure_finite(z, "z")?;
    if on_cut(params, z) {
        return Err(FfaError::BranchCut { re: z.re, im: z.im });
    }
    let c = params.coupling_ratio();
    if z.norm() >= params.kappa0() {
        // w + i z = 4 i kappa0^2 / (z (1 + s)), s = sqrt(1 - 4 kappa0^2 / z^2),
        // which avoids the cancellation of w against -i z at large |z|.
        let u = params.band_edge() / z;
        let s = (1.0 - u * u).sqrt();
        let ka2 = params.kappa_a() * params.kappa_a();
        Ok(2.0 * ka2 / (z * (1.0 + s)))
    } else {
        Ok(-I * c * (band_root(params, z) + I * z))
    }
}

/// Continuation of the self-energy through the band from above.
pub fn sigma_second_sheet(params: &ModelParams, z: Complex64) -> Result<Complex64> {
    ensure_finite(z, "z")?;
    if z.im == 0.0 && z.re.abs() >= params.band_edge() {
        return Err(FfaError::Domain { what: "Re(z) on second sheet", value: z.re });
    }
    let c = params.coupling_ratio();
    Ok(-I * c * (principal_root(params, z) + I * z))
}

/// Self-energy on the requested sheet.
pub fn sigma_on(params: &ModelParams, z: Complex64, sheet: Sheet) -> Result<Complex64> {
    match sheet {
        Sheet::First => sigma(params, z),
        Sheet::Second => sigma_second_sheet(params, z),
    }
}

/// `d Sigma / dz = c + i c z / w` on the requested sheet.
pub fn sigma_derivative(params: &ModelParams, z: Complex64, sheet: Sheet) -> Result<Complex64> {
    ensure_finite(z, "z")?;
    let root = match sheet {
        Sheet::First => {
            if on_cut(params, z) {
                return Err(FfaError::BranchCut { re: z.re, im: z.im });
            }
            band_root(params, z)
        }
        Sheet::Second => {
            sigma_second_sheet(params, z)?;
            principal_root(params, z)
        }
    };
    if root.norm() == 0.0 {
        return Err(FfaError::BandEdge(z.re));
    }
    let c = params.coupling_ratio();
    Ok(c + I * c * z / root)
}

/// Principal-value shift `Delta(E)`, all three branches.
pub fn delta_shift(params: &ModelParams, energy: f64) -> f64 {
    let c = params.coupling_ratio();
    let edge = params.band_edge();
    if energy.abs() <= edge {
        c * energy
    } else {
        // E -+ sqrt(E^2 - 4 kappa0^2) written without cancellation.
        let root = ((energy - edge) * (energy + edge)).sqrt();
        c * edge * edge / (energy + energy.signum() * root)
    }
}

/// Boundary value `Sigma(E +- i0) = Delta(E) -+ i pi V(E)` inside the band.
pub fn sigma_boundary(params: &ModelParams, energy: f64, side: Side) -> Result<Complex64> {
    if !(energy.abs() < params.band_edge()) {
        return Err(FfaError::Domain { what: "E", value: energy });
    }
    let width = PI * spectral_density(params, energy);
    let sign = match side {
        Side::Upper => -1.0,
        Side::Lower => 1.0,
    };
    Ok(Complex64::new(delta_shift(params, energy), sign * width))
}

fn theta_integrand(params: &ModelParams) -> impl Fn(f64) -> f64 + '_ {
    let pref = 2.0 * params.kappa_a() * params.kappa_a() / PI;
    move |theta: f64| {
        let s = theta.sin();
        pref * s * s
    }
}

/// Direct quadrature of `Sigma(z) = int V(E) / (z - E) dE` after the change of
/// variables `E = 2 kappa0 cos(theta)`. Independent of the closed form.
pub fn sigma_quadrature_oracle(params: &ModelParams, z: Complex64) -> Result<Integral> {
    ensure_finite(z, "z")?;
    if on_cut(params, z) {
        return Err(FfaError::BranchCut { re: z.re, im: z.im });
    }
    let numerator = theta_integrand(params);
    let edge = params.band_edge();
    let options = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-10, ..QuadOptions::default() };
    integrate(|t| numerator(t) / (z - edge * t.cos()), 0.0, PI, &options)
}

/// Principal-value quadrature of `Delta(E)` for real `E`.
///
/// Inside the band the pole at `theta0 = acos(E / 2 kappa0)` is removed by
/// folding the integrand symmetrically around it.
pub fn delta_quadrature_oracle(params: &ModelParams, energy: f64) -> Result<Integral> {
    let edge = params.band_edge();
    if !energy.is_finite() {
        return Err(FfaError::NonFinite("E"));
    }
    if energy.abs() >= edge {
        let z = Complex64::new(energy, 0.0);
        if energy.abs() == edge {
            return Err(FfaError::BandEdge(energy));
        }
        return sigma_quadrature_oracle(params, z);
    }
    let numerator = theta_integrand(params);
    let theta0 = (energy / edge).acos();
    let half_width = theta0.min(PI - theta0);
    let options = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-10, ..QuadOptions::default() };
    // E - 2 kappa0 cos(theta0 + s) = 2 kappa0 * 2 sin(theta0 + s/2) sin(s/2)
    let gap = |s: f64| 2.0 * edge * (theta0 + 0.5 * s).sin() * (0.5 * s).sin();
    let folded = integrate(
        |s| {
            let plus = numerator(theta0 + s) / gap(s);
            let minus = numerator(theta0 - s) / gap(-s);
            Complex64::new(plus + minus, 0.0)
        },
        0.0,
        half_width,
        &options,
    )?;
    let (a, b) = if theta0 <= 0.5 * PI { (2.0 * theta0, PI) } else { (0.0, 2.0 * theta0 - PI) };
    let rest = integrate(
        |t| Complex64::new(numerator(t) / (energy - edge * t.cos()), 0.0),
        a,
        b,
        &options,
    )?;
    Ok(Integral {
        value: folded.value + rest.value,
        error: folded.error + rest.error,
        evaluations: folded.evaluations + rest.evaluations,
    })
}
