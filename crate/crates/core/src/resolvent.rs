//! Resolvent matrix elements, second-sheet poles and the survival amplitude
//! of the impurity state.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::SymTridiagonal;
use crate::model::{band_energy, coupling, ModelParams};
use crate::selfenergy::{sigma_derivative, sigma_on, sigma_second_sheet, Sheet};
use crate::spectrum::{find_singularities, spectrum_is_real};
use crate::{ensure_finite, FfaError, Result};

/// `|z - Ea - Sigma(z)|` below which a resolvent element is refused.
pub const POLE_PROXIMITY: f64 = 1e-12;

/// Residual accepted for a polished pole.
pub const POLE_RESIDUAL_TOL: f64 = 1e-9;

fn denominator(params: &ModelParams, z: Complex64, sheet: Sheet) -> Result<Complex64> {
    if params.kappa_a() == 0.0 {
        // A decoupled impurity has no cut.
        ensure_finite(z, "z")?;
        return Ok(z - params.ea());
    }
    Ok(z - params.ea() - sigma_on(params, z, sheet)?)
}

fn checked_denominator(params: &ModelParams, z: Complex64, sheet: Sheet) -> Result<Complex64> {
    let d = denominator(params, z, sheet)?;
    if d.norm() < POLE_PROXIMITY {
        return Err(FfaError::PoleProximity(d.norm()));
    }
    Ok(d)
}

/// `G_aa(z) = 1 / (z - Ea - Sigma(z))` on the requested sheet.
pub fn g_aa(params: &ModelParams, z: Complex64, sheet: Sheet) -> Result<Complex64> {
    Ok(checked_denominator(params, z, sheet)?.inv())
}

fn band_gap(params: &ModelParams, z: Complex64, k: f64) -> Result<Complex64> {
    if !(k > 0.0 && k < PI) {
        return Err(FfaError::Domain { what: "k (must lie in (0, pi))", value: k });
    }
    let gap = z - band_energy(params, k)?;
    if gap.norm() == 0.0 {
        return Err(FfaError::Domain { what: "z on the band energy E(k)", value: z.re });
    }
    Ok(gap)
}

/// `G_ak(z) = v(k) / ((z - E(k)) (z - Ea - Sigma(z)))`, physical sheet.
pub fn g_ak(params: &ModelParams, z: Complex64, k: f64) -> Result<Complex64> {
    let gap = band_gap(params, z, k)?;
    Ok(coupling(params, k) / (gap * checked_denominator(params, z, Sheet::First)?))
}

/// `G_ka(z)`; the coupling is real so it equals [`g_ak`].
pub fn g_ka(params: &ModelParams, z: Complex64, k: f64) -> Result<Complex64> {
    g_ak(params, z, k)
}

/// `G_kk'(z)` split into its distributional and regular parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumElement {
    /// Coefficient of `delta(k - k')`, i.e. `1 / (z - E(k'))`.
    pub delta_coefficient: Complex64,
    /// `v(k') v(k) / ((z - E(k)) (z - E(k')) (z - Ea - Sigma(z)))`.
    pub regular: Complex64,
}

pub fn g_kk(params: &ModelParams, z: Complex64, k: f64, k_prime: f64) -> Result<ContinuumElement> {
    let gap = band_gap(params, z, k)?;
    let gap_prime = band_gap(params, z, k_prime)?;
    let d = checked_denominator(params, z, Sheet::First)?;
    Ok(ContinuumElement {
        delta_coefficient: gap_prime.inv(),
        regular: coupling(params, k_prime) * coupling(params, k) / (gap * gap_prime * d),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let all_finite = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite());
        if !all_finite || !(re_min < re_max) || !(im_min < im_max) {
            return Err(FfaError::InvalidParameter("rectangle bounds must be finite and ordered"));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    fn at(&self, fx: f64, fy: f64) -> Complex64 {
        Complex64::new(self.re_min + fx * (self.re_max - self.re_min), self.im_min + fy * (self.im_max - self.im_min))
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack && z.re <= self.re_max + slack && z.im >= self.im_min - slack && z.im <= self.im_max + slack
    }

    fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub z: Complex64,
    /// `1 / (1 - dSigma/dz)`; `None` for a pole of higher order.
    pub residue: Option<Complex64>,
    pub sheet: Sheet,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleReport {
    pub poles: Vec<Pole>,
    pub region: Rect,
}

/// Largest `Im(z)` accepted for a second-sheet search, in units of `kappa0`.
const MAX_SEARCH_HEIGHT: f64 = 0.5;

/// Subdivision fractions; alternatives are tried when a zero sits on an edge.
const SPLITS: [[f64; 5]; 3] = [
    [0.0, 0.2377, 0.5113, 0.7391, 1.0],
    [0.0, 0.2659, 0.4871, 0.7617, 1.0],
    [0.0, 0.2213, 0.5347, 0.7129, 1.0],
];

const MAX_DEPTH: usize = 12;

/// Zeros of `z - Ea - Sigma_II(z)` inside `region`, located by the argument
/// principle with 4x4 subdivision and polished by Newton's method.
pub fn find_poles_second_sheet(params: &ModelParams, region: Rect) -> Result<PoleReport> {
    let edge = params.band_edge();
    if !(region.re_min > -edge && region.re_max < edge) {
        return Err(FfaError::InvalidParameter("search region must lie within the band in Re(z)"));
    }
    if region.im_max > MAX_SEARCH_HEIGHT * params.kappa0() {
        return Err(FfaError::Domain { what: "Im(z) upper bound of search region", value: region.im_max });
    }
    let mut poles = Vec::new();
    search(params, region, 0, &mut poles)?;
    poles.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(PoleReport { poles, region })
}

fn second_sheet_f(params: &ModelParams, z: Complex64) -> Result<Complex64> {
    denominator(params, z, Sheet::Second)
}

fn search(params: &ModelParams, rect: Rect, depth: usize, out: &mut Vec<Pole>) -> Result<()> {
    let count = winding_number(params, &rect)?;
    if count <= 0 {
        return Ok(());
    }
    let count = count as usize;
    if count == 1 {
        if let Some(z) = newton(params, rect.at(0.5, 0.5)) {
            if rect.contains(z, 1e-12 * (1.0 + z.norm())) {
                let slope = 1.0 - sigma_derivative(params, z, Sheet::Second)?;
                out.push(Pole { z, residue: Some(slope.inv()), sheet: Sheet::Second, multiplicity: 1 });
                return Ok(());
            }
        }
    }
    if depth >= MAX_DEPTH || rect.diameter() < 1e-9 * (1.0 + rect.at(0.5, 0.5).norm()) {
        let z = newton(params, rect.at(0.5, 0.5)).unwrap_or(rect.at(0.5, 0.5));
        out.push(Pole { z, residue: None, sheet: Sheet::Second, multiplicity: count });
        return Ok(());
    }
    let mut last_err = FfaError::ContourThroughZero;
    for splits in SPLITS {
        let mut found = Vec::new();
        let attempt = (|| {
            for i in 0..4 {
                for j in 0..4 {
                    let lo = rect.at(splits[i], splits[j]);
                    let hi = rect.at(splits[i + 1], splits[j + 1]);
                    search(params, Rect { re_min: lo.re, re_max: hi.re, im_min: lo.im, im_max: hi.im }, depth + 1, &mut found)?;
                }
            }
            Ok(())
        })();
        match attempt {
            Ok(()) => {
                out.extend(found);
                return Ok(());
            }
            Err(FfaError::ContourThroughZero) => last_err = FfaError::ContourThroughZero,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

fn newton(params: &ModelParams, start: Complex64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..80 {
        let f = second_sheet_f(params, z).ok()?;
        let slope = 1.0 - sigma_derivative(params, z, Sheet::Second).ok()?;
        if slope.norm() == 0.0 {
            return None;
        }
        let step = f / slope;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let residual = second_sheet_f(params, z).ok()?.norm();
    (residual < POLE_RESIDUAL_TOL).then_some(z)
}

/// Winding number of `z - Ea - Sigma_II(z)` around the rectangle boundary.
fn winding_number(params: &ModelParams, rect: &Rect) -> Result<i64> {
    let corners = [rect.at(0.0, 0.0), rect.at(1.0, 0.0), rect.at(1.0, 1.0), rect.at(0.0, 1.0)];
    let mut total = 0.0;
    for side in 0..4 {
        let (a, b) = (corners[side], corners[(side + 1) % 4]);
        let segments = 32;
        let mut za = a;
        let mut fa = second_sheet_f(params, za)?;
        for s in 1..=segments {
            let zb = a + (b - a) * (s as f64 / segments as f64);
            let fb = second_sheet_f(params, zb)?;
            total += arg_change(params, za, fa, zb, fb, 0)?;
            za = zb;
            fa = fb;
        }
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.1 {
        return Err(FfaError::ContourThroughZero);
    }
    Ok(rounded as i64)
}

fn arg_change(params: &ModelParams, za: Complex64, fa: Complex64, zb: Complex64, fb: Complex64, depth: usize) -> Result<f64> {
    let scale = 1.0 + za.norm() + params.ea().norm();
    if fa.norm() < 1e-12 * scale || fb.norm() < 1e-12 * scale || depth > 50 {
        return Err(FfaError::ContourThroughZero);
    }
    let whole = (fb / fa).arg();
    let zm = 0.5 * (za + zb);
    let fm = second_sheet_f(params, zm)?;
    if fm.norm() < 1e-12 * scale {
        return Err(FfaError::ContourThroughZero);
    }
    let halves = (fm / fa).arg() + (fb / fm).arg();
    if whole.abs() < 0.5 && (halves - whole).abs() < 1e-9 {
        return Ok(whole);
    }
    Ok(arg_change(params, za, fa, zm, fm, depth + 1)? + arg_change(params, zm, fm, zb, fb, depth + 1)?)
}

/// Options for [`survival_amplitude_bromwich_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BromwichOptions {
    /// Height `b` of the integration line; `None` picks `min(kappa0 / 2, 2 / t_max)`.
    pub line_height: Option<f64>,
    /// Truncation `L` of the line in units of `kappa0`.
    pub half_width: f64,
    /// Number of asymptotic terms of `G_aa` integrated in closed form.
    pub series_order: usize,
    /// Trapezoid step as a fraction of the line height.
    pub step_fraction: f64,
}

impl Default for BromwichOptions {
    fn default() -> Self {
        Self { line_height: None, half_width: 40.0, series_order: 8, step_fraction: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalAmplitude {
    pub t: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Estimate of the absolute error of each value.
    pub errors: Vec<f64>,
    pub line_height: f64,
}

/// Survival amplitude `c_a(t)` from the inverse Laplace (Bromwich) integral of
/// `G_aa` along a horizontal line above the real axis.
pub fn survival_amplitude_bromwich(params: &ModelParams, t_grid: &[f64]) -> Result<SurvivalAmplitude> {
    survival_amplitude_bromwich_with(params, t_grid, &BromwichOptions::default())
}

/// The large-`|z|` expansion `G_aa(z) = sum_j a_j / (z - c)^j` with
/// `a_{j+1} = <a|(H - c)^j|a>` is subtracted before quadrature and its
/// inverse transform `(-it)^(j-1) e^{-ict} / (j-1)!` added back in closed form.
/// The remainder decays like `|z|^-(m+1)`, so the truncated line integral
/// converges fast and `c_a(0) = 1` comes out exactly.
pub fn survival_amplitude_bromwich_with(params: &ModelParams, t_grid: &[f64], options: &BromwichOptions) -> Result<SurvivalAmplitude> {
    if !spectrum_is_real(params) {
        return Err(FfaError::ComplexSpectrum);
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(FfaError::InvalidParameter("survival times must be finite and non-negative"));
    }
    if !(options.half_width > 0.0 && options.step_fraction > 0.0 && options.step_fraction <= 0.25) || options.series_order == 0 {
        return Err(FfaError::InvalidParameter("Bromwich options out of range"));
    }
    let k0 = params.kappa0();
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);
    let b = match options.line_height {
        Some(b) if b > 0.0 && b.is_finite() => b,
        Some(b) => return Err(FfaError::Domain { what: "Bromwich line height", value: b }),
        None => (0.5 * k0).min(2.0 / t_max.max(1e-300)),
    };
    let m = options.series_order;
    let centre = Complex64::new(0.0, -k0);
    let moments = resolvent_moments(params, centre, m + 1)?;

    let half = options.half_width * k0;
    let h_target = options.step_fraction * b;
    // Even number of panels so that the doubled step reuses every other node.
    let panels = (2.0 * half / h_target / 2.0).ceil() as usize * 2;
    let h = 2.0 * half / panels as f64;
    let mut remainder = Vec::with_capacity(panels + 1);
    for j in 0..=panels {
        let z = Complex64::new(-half + j as f64 * h, b);
        let g = g_aa(params, z, Sheet::First)?;
        let u = (z - centre).inv();
        let mut series = Complex64::new(0.0, 0.0);
        let mut power = u;
        for a in &moments[..m] {
            series += a * power;
            power *= u;
        }
        let weight = if j == 0 || j == panels { 0.5 } else { 1.0 };
        remainder.push((g - series) * weight);
    }
    let magnitude: f64 = remainder.iter().map(|r| r.norm()).sum::<f64>() * h;
    let tail = moments[m].norm() / (m as f64 * half.powi(m as i32)) / PI;

    let mut values = Vec::with_capacity(t_grid.len());
    let mut errors = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let start = Complex64::from_polar(1.0, half * t);
        let step = Complex64::from_polar(1.0, -h * t);
        let (mut fine, mut coarse) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut phase = start;
        for (j, r) in remainder.iter().enumerate() {
            let term = r * phase;
            fine += term;
            if j % 2 == 0 {
                let w = if j == 0 || j == panels { 1.0 } else { 2.0 };
                coarse += term * w;
            }
            phase *= step;
        }
        let growth = (b * t).exp();
        let scale = Complex64::new(0.0, growth / (2.0 * PI));
        let fine = scale * fine * h;
        let coarse = scale * coarse * h;
        let value = fine + closed_form_series(&moments[..m], centre, t);
        ensure_finite(value, "survival amplitude")?;
        values.push(value);
        let roundoff = 64.0 * f64::EPSILON * (magnitude * growth / (2.0 * PI) + 1.0);
        errors.push((fine - coarse).norm() + tail * growth + roundoff);
    }
    Ok(SurvivalAmplitude { t: t_grid.to_vec(), values, errors, line_height: b })
}

/// `sum_j a_j (-it)^(j-1) e^{-ict} / (j-1)!`.
fn closed_form_series(moments: &[Complex64], centre: Complex64, t: f64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut factor = Complex64::new(1.0, 0.0);
    for (j, a) in moments.iter().enumerate() {
        total += a * factor;
        factor *= Complex64::new(0.0, -t) / (j + 1) as f64;
    }
    total * (Complex64::new(0.0, -1.0) * centre * t).exp()
}

/// `<a|(H - c)^j|a>` for `j = 0..count`, from a lattice long enough to be exact.
fn resolvent_moments(params: &ModelParams, centre: Complex64, count: usize) -> Result<Vec<Complex64>> {
    let sites = count + 1;
    let mut diag = vec![-centre; sites + 1];
    diag[0] = params.ea() - centre;
    let mut off = vec![Complex64::new(-params.kappa0(), 0.0); sites];
    off[0] = Complex64::new(-params.kappa_a(), 0.0);
    let shifted = SymTridiagonal::new(diag, off)?;
    let mut v = vec![Complex64::new(0.0, 0.0); sites + 1];
    v[0] = Complex64::new(1.0, 0.0);
    let mut moments = Vec::with_capacity(count);
    for _ in 0..count {
        moments.push(v[0]);
        v = shifted.mul_vec(&v);
    }
    Ok(moments)
}

/// Long-time behaviour of the survival probability `|c_a(t)|^2` implied by
/// the real second-sheet poles.
#[derive(Debug, Clone, PartialEq)]
pub enum Asymptote {
    /// One real simple pole: `P(t) -> level`.
    Plateau { level: f64, pole: Pole },
    /// Two real simple poles: `P(t)` oscillates about `mean` at `frequency`.
    Beating { mean: f64, frequency: f64, poles: [Pole; 2] },
    /// Coalesced real poles: the amplitude grows without bound.
    Secular { pole: Pole },
}

/// Singularity tolerance used by [`survival_asymptote`], loose enough that
/// parameters typed to eight or so digits still land on the singular manifold.
pub const ASYMPTOTE_SINGULARITY_TOL: f64 = 1e-6;

/// Non-decaying part of the survival probability, if any. Real second-sheet
/// poles sit at amplifying spectral singularities; absorbing and Hermitian
/// impurities decay to zero and give `None`.
pub fn survival_asymptote(params: &ModelParams) -> Result<Option<Asymptote>> {
    if !spectrum_is_real(params) {
        return Err(FfaError::ComplexSpectrum);
    }
    if !params.is_amplifying() {
        return Ok(None);
    }
    let report = find_singularities(params, ASYMPTOTE_SINGULARITY_TOL)?;
    if report.degenerate {
        let z = Complex64::new(report.singularities[0].energy, 0.0);
        return Ok(Some(Asymptote::Secular { pole: Pole { z, residue: None, sheet: Sheet::Second, multiplicity: 2 } }));
    }
    let mut poles = Vec::with_capacity(report.count());
    for s in &report.singularities {
        let z = Complex64::new(s.energy, 0.0);
        sigma_second_sheet(params, z)?;
        let slope = 1.0 - sigma_derivative(params, z, Sheet::Second)?;
        poles.push(Pole { z, residue: Some(slope.inv()), sheet: Sheet::Second, multiplicity: 1 });
    }
    let weight = |p: &Pole| p.residue.map_or(0.0, |r| r.norm_sqr());
    Ok(match poles.as_slice() {
        [] => None,
        [p] => Some(Asymptote::Plateau { level: weight(p), pole: *p }),
        [p, q] => Some(Asymptote::Beating { mean: weight(p) + weight(q), frequency: (p.z - q.z).norm(), poles: [*p, *q] }),
        _ => unreachable!("at most two singularities"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfenergy::sigma;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(ka: f64, re: f64, im: f64) -> ModelParams {
        ModelParams::from_parts(1.0, ka, re, im).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn g_aa_examples() {
        let p = params(1.0, 0.0, 1.0);
        assert!(g_aa(&p, c(0.0, 1e-6), Sheet::First).unwrap().norm() > 1e5);
        assert!(g_aa(&p, c(0.0, -1e-6), Sheet::First).unwrap().norm() < 10.0);
        let p = params(0.0, 0.3, 0.0);
        assert_cclose!(g_aa(&p, c(1.0, 0.0), Sheet::First).unwrap(), c(1.0 / 0.7, 0.0), 1e-14);
        assert!(g_aa(&params(1.0, 0.0, 0.0), c(0.5, 0.0), Sheet::First).is_err());
    }

    #[test]
    fn one_sided_divergence() {
        for (im, upper_diverges) in [(1.0, true), (-1.0, false)] {
            let p = params(1.0, 0.0, im);
            let up: Vec<f64> = [1e-3, 1e-4, 1e-5, 1e-6].iter().map(|&eta| g_aa(&p, c(0.0, eta), Sheet::First).unwrap().norm() * eta).collect();
            let down: Vec<f64> = [1e-3, 1e-4, 1e-5, 1e-6].iter().map(|&eta| g_aa(&p, c(0.0, -eta), Sheet::First).unwrap().norm() * eta).collect();
            let (diverging, bounded) = if upper_diverges { (up, down) } else { (down, up) };
            assert!(diverging.iter().all(|x| *x > 1.0), "{diverging:?}");
            assert!(bounded.iter().all(|x| *x < 1e-2), "{bounded:?}");
        }
    }

    #[test]
    fn continuum_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = params(rng.gen_range(0.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..2.0));
            let (k, kp) = (rng.gen_range(0.05..3.0), rng.gen_range(0.05..3.0));
            let gak = g_ak(&p, z, k).unwrap();
            assert_cclose!(gak * coupling(&p, k), g_ka(&p, z, k).unwrap() * coupling(&p, k), 1e-15);
            let e = g_kk(&p, z, k, kp).unwrap();
            let lhs = e.regular * (z - band_energy(&p, k).unwrap()) * (z - band_energy(&p, kp).unwrap());
            let rhs = coupling(&p, kp) * coupling(&p, k) * g_aa(&p, z, Sheet::First).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
            assert_cclose!(e.delta_coefficient, (z - band_energy(&p, kp).unwrap()).inv(), 1e-15);
        }
        assert_eq!(g_ak(&params(0.0, 0.2, 0.1), c(0.3, 0.4), 1.0).unwrap(), c(0.0, 0.0));
        assert!(g_ak(&params(1.0, 0.0, 0.5), c(0.3, 0.4), 0.0).is_err());
    }

    fn region() -> Rect {
        Rect::new(-1.9, 1.9, -5.0, 0.1).unwrap()
    }

    fn check_report(p: &ModelParams, report: &PoleReport) {
        for pole in &report.poles {
            let res = (pole.z - p.ea() - sigma_second_sheet(p, pole.z).unwrap()).norm();
            assert!(res < POLE_RESIDUAL_TOL);
            let r = pole.residue.unwrap();
            assert!(r.norm() > 0.0 && r.re.is_finite() && r.im.is_finite());
        }
    }

    #[test]
    fn pole_at_single_singularity() {
        let p = params(1.0, 0.0, 1.0);
        let report = find_poles_second_sheet(&p, region()).unwrap();
        check_report(&p, &report);
        assert_eq!(report.poles.len(), 1);
        assert!(report.poles[0].z.norm() < 1e-12);
        assert_cclose!(report.poles[0].residue.unwrap(), c(2.0, 0.0), 1e-10);
    }

    #[test]
    fn poles_at_two_singularities() {
        let p = params(2f64.sqrt(), 0.0, 1.0);
        let report = find_poles_second_sheet(&p, region()).unwrap();
        check_report(&p, &report);
        assert_eq!(report.poles.len(), 2);
        assert_cclose!(report.poles[0].z, c(-3f64.sqrt(), 0.0), 1e-10);
        assert_cclose!(report.poles[1].z, c(3f64.sqrt(), 0.0), 1e-10);
        assert_cclose!(report.poles[1].residue.unwrap(), c(0.0, 1.0 / 3f64.sqrt()), 1e-9);
    }

    #[test]
    fn absorbing_poles_lie_below_axis() {
        // With kappa_a = kappa0 the absorbing impurity has no finite pole at
        // all; a weaker coupling has one deep in the lower half plane.
        let p = params(1.0, 0.0, -1.0);
        assert!(find_poles_second_sheet(&p, region()).unwrap().poles.is_empty());
        let p = params(0.8, 0.0, -1.0);
        let report = find_poles_second_sheet(&p, region()).unwrap();
        check_report(&p, &report);
        assert_eq!(report.poles.len(), 1);
        assert!(report.poles[0].z.im < -3.0 && report.poles[0].z.re.abs() < 1e-12);

        let p = params(0.5, 0.0, 0.0);
        let report = find_poles_second_sheet(&p, region()).unwrap();
        assert_eq!(report.poles.len(), 1);
        assert_cclose!(report.poles[0].z, c(0.0, -1.0 / 12f64.sqrt()), 1e-12);
    }

    #[test]
    fn residue_from_approach_directions() {
        let p = params(0.8, 0.3, 0.0);
        let report = find_poles_second_sheet(&p, Rect::new(-1.9, 1.9, -2.0, 0.1).unwrap()).unwrap();
        assert!(!report.poles.is_empty());
        for pole in &report.poles {
            let r = pole.residue.unwrap();
            let spread = (0..8)
                .map(|i| {
                    let dz = Complex64::from_polar(1e-7, PI / 4.0 * i as f64 + 0.1);
                    let g = (pole.z + dz - p.ea() - sigma_second_sheet(&p, pole.z + dz).unwrap()).inv();
                    (dz * g - r).norm()
                })
                .fold(0.0, f64::max);
            assert!(spread < 1e-6, "{spread}");
        }
    }

    #[test]
    fn pole_search_rejects_bad_regions() {
        let p = params(1.0, 0.0, 1.0);
        assert!(find_poles_second_sheet(&p, Rect::new(-2.5, 1.0, -1.0, 0.1).unwrap()).is_err());
        assert!(find_poles_second_sheet(&p, Rect::new(-1.0, 1.0, -1.0, 3.0).unwrap()).is_err());
        assert!(Rect::new(1.0, -1.0, 0.0, 1.0).is_err());
        // Zero exactly on the bottom edge of the rectangle.
        assert_eq!(find_poles_second_sheet(&p, Rect::new(-1.0, 1.0, 0.0, 0.1).unwrap()), Err(FfaError::ContourThroughZero));
    }

    #[test]
    fn moments_reproduce_expansion() {
        let p = params(0.9, 0.2, 0.4);
        let centre = c(0.0, -1.0);
        let moments = resolvent_moments(&p, centre, 12).unwrap();
        let z = c(30.0, 25.0);
        let series: Complex64 = moments.iter().enumerate().map(|(j, a)| a / (z - centre).powi(j as i32 + 1)).sum();
        let exact = 1.0 / (z - p.ea() - sigma(&p, z).unwrap());
        assert!((series - exact).norm() < 1e-14);
    }

    #[test]
    fn bromwich_at_origin_and_hermitian_decay() {
        let p = params(0.5, 0.0, 0.0);
        let t: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
        let s = survival_amplitude_bromwich(&p, &t).unwrap();
        assert_cclose!(s.values[0], c(1.0, 0.0), 1e-9);
        let prob: Vec<f64> = s.values.iter().map(|v| v.norm_sqr()).collect();
        for w in prob[4..].windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(prob[40] < 1e-3);
        assert!(s.errors.iter().all(|e| *e < 1e-6));
    }

    #[test]
    fn bromwich_single_pole_plateau() {
        let p = params(1.0, 0.0, 1.0);
        let s = survival_amplitude_bromwich(&p, &[0.0, 60.0]).unwrap();
        assert_cclose!(s.values[0], c(1.0, 0.0), 1e-9);
        let Some(Asymptote::Plateau { level, .. }) = survival_asymptote(&p).unwrap() else { panic!() };
        assert_close!(level, 4.0, 1e-12);
        assert!((s.values[1].norm_sqr() - level).abs() < 0.05 * level);
    }

    #[test]
    fn bromwich_line_independence() {
        let p = params(2f64.sqrt(), 0.0, 1.0);
        let t: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        let opts = BromwichOptions { line_height: Some(0.1), ..Default::default() };
        let a = survival_amplitude_bromwich_with(&p, &t, &opts).unwrap();
        let b = survival_amplitude_bromwich_with(&p, &t, &BromwichOptions { line_height: Some(0.2), ..opts }).unwrap();
        for (i, ti) in t.iter().enumerate() {
            assert!((a.values[i] - b.values[i]).norm() < a.errors[i].max(b.errors[i]), "t = {ti}");
        }
    }

    #[test]
    fn bromwich_rejects_complex_spectrum() {
        assert_eq!(survival_amplitude_bromwich(&params(2.0, 0.0, 0.0), &[1.0]), Err(FfaError::ComplexSpectrum));
        assert!(survival_amplitude_bromwich(&params(1.0, 0.0, 0.5), &[-1.0]).is_err());
    }

    #[test]
    fn asymptote_examples() {
        let Some(Asymptote::Beating { mean, frequency, .. }) = survival_asymptote(&params(2f64.sqrt(), 0.0, 1.0)).unwrap() else {
            panic!()
        };
        assert_close!(frequency, 2.0 * 3f64.sqrt(), 1e-12);
        assert_close!(mean, 2.0 / 3.0, 1e-12);
        assert_eq!(survival_asymptote(&params(1.0, 0.0, -1.0)).unwrap(), None);
        assert_eq!(survival_asymptote(&params(0.5, 0.2, 0.0)).unwrap(), None);
        assert_eq!(survival_asymptote(&params(1.0, 0.0, 0.5)).unwrap(), None);
        assert!(matches!(survival_asymptote(&params(2f64.sqrt(), 0.0, 2.0)).unwrap(), Some(Asymptote::Secular { .. })));
    }
}
