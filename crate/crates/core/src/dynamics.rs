//! Time evolution of the truncated lattice
//! `i dc_n/dt = -kappa0 (c_{n+1} + c_{n-1})`, `i dc_1/dt = -kappa0 c_2 - kappa_a c_a`,
//! `i dc_a/dt = -kappa_a c_1 + Ea c_a`, with a hard wall past the last site.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{inverse_participation_ratio, SymTridiagonal};
use crate::model::ModelParams;
use crate::{FfaError, Result};

/// Largest `dt * rho` accepted, `rho` being the Gershgorin bound on the
/// spectral radius. Classical RK4 is stable on the imaginary axis up to
/// `2 sqrt(2)`.
pub const STABILITY_LIMIT: f64 = 2.5;

/// Norm allowed in the sites next to the hard wall.
pub const WALL_NORM_TOL: f64 = 1e-10;

/// Number of sites next to the wall watched by the guard.
const WALL_SITES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub t: f64,
    pub c_a: Complex64,
    /// Amplitudes on sites `1..=N`.
    pub sites: Vec<Complex64>,
}

impl LatticeState {
    pub fn new(t: f64, c_a: Complex64, sites: Vec<Complex64>) -> Result<Self> {
        if sites.len() < 2 {
            return Err(FfaError::InvalidParameter("lattice needs at least two sites"));
        }
        let state = Self { t, c_a, sites };
        if !t.is_finite() || !state.is_finite() {
            return Err(FfaError::NonFinite("lattice state"));
        }
        Ok(state)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_a.norm_sqr() + self.site_norm_sqr()
    }

    pub fn site_norm_sqr(&self) -> f64 {
        self.sites.iter().map(|c| c.norm_sqr()).sum()
    }

    fn is_finite(&self) -> bool {
        let ok = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        ok(&self.c_a) && self.sites.iter().all(ok)
    }

    fn wall_norm(&self) -> f64 {
        let n = self.sites.len();
        self.sites[n.saturating_sub(WALL_SITES)..].iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Gershgorin bound on the spectral radius of the lattice Hamiltonian.
pub fn spectral_radius_bound(params: &ModelParams) -> f64 {
    let (k0, ka) = (params.kappa0(), params.kappa_a());
    (params.ea().norm() + ka).max(ka + k0).max(2.0 * k0)
}

/// `min(1e-2, 0.05 / max(kappa0, kappa_a, |Ea|))`.
pub fn default_dt(params: &ModelParams) -> f64 {
    let scale = params.kappa0().max(params.kappa_a()).max(params.ea().norm());
    (0.05 / scale).min(1e-2)
}

/// `H c`, i.e. `i dc/dt`.
fn apply_hamiltonian(params: &ModelParams, c_a: Complex64, sites: &[Complex64], out_a: &mut Complex64, out: &mut [Complex64]) {
    let (k0, ka) = (params.kappa0(), params.kappa_a());
    let n = sites.len();
    *out_a = params.ea() * c_a - ka * sites[0];
    out[0] = -ka * c_a - k0 * sites[1];
    for i in 1..n - 1 {
        out[i] = -k0 * (sites[i - 1] + sites[i + 1]);
    }
    out[n - 1] = -k0 * sites[n - 2];
}

/// Reusable RK4 workspace.
struct Rk4 {
    stage: Vec<Complex64>,
    stage_a: Complex64,
    slope: Vec<Complex64>,
    slope_a: Complex64,
    acc: Vec<Complex64>,
    acc_a: Complex64,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self { stage: vec![zero; n], stage_a: zero, slope: vec![zero; n], slope_a: zero, acc: vec![zero; n], acc_a: zero }
    }

    fn advance(&mut self, params: &ModelParams, state: &mut LatticeState, dt: f64) {
        // dc/dt = -i H c
        let minus_i_dt = Complex64::new(0.0, -dt);
        let weights = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
        let offsets = [0.5, 0.5, 1.0];
        self.stage.copy_from_slice(&state.sites);
        self.stage_a = state.c_a;
        self.acc.copy_from_slice(&state.sites);
        self.acc_a = state.c_a;
        for s in 0..4 {
            apply_hamiltonian(params, self.stage_a, &self.stage, &mut self.slope_a, &mut self.slope);
            self.slope_a *= minus_i_dt;
            self.slope.iter_mut().for_each(|x| *x *= minus_i_dt);
            self.acc_a += self.slope_a * weights[s];
            for (a, k) in self.acc.iter_mut().zip(&self.slope) {
                *a += k * weights[s];
            }
            if s < 3 {
                let f = offsets[s];
                self.stage_a = state.c_a + self.slope_a * f;
                for ((st, c), k) in self.stage.iter_mut().zip(&state.sites).zip(&self.slope) {
                    *st = c + k * f;
                }
            }
        }
        state.sites.copy_from_slice(&self.acc);
        state.c_a = self.acc_a;
        state.t += dt;
    }
}

fn check_dt(params: &ModelParams, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FfaError::InvalidParameter("dt must be positive and finite"));
    }
    let limit = STABILITY_LIMIT / spectral_radius_bound(params);
    if dt > limit {
        return Err(FfaError::StepRejected { dt, limit });
    }
    Ok(())
}

/// One classical fourth-order Runge-Kutta step.
pub fn step(params: &ModelParams, state: &LatticeState, dt: f64) -> Result<LatticeState> {
    check_dt(params, dt)?;
    if state.sites.len() < 2 {
        return Err(FfaError::InvalidParameter("lattice needs at least two sites"));
    }
    let mut next = state.clone();
    Rk4::new(state.sites.len()).advance(params, &mut next, dt);
    if !next.is_finite() {
        return Err(FfaError::NonFinite("lattice state"));
    }
    Ok(next)
}

/// Evolves `state` to `t_final` in equal steps no longer than `dt`, calling
/// `visit` after each step with its index (1-based) and the total count.
fn evolve<F>(params: &ModelParams, state: &mut LatticeState, t_final: f64, dt: f64, mut visit: F) -> Result<()>
where
    F: FnMut(usize, usize, &LatticeState) -> Result<()>,
{
    check_dt(params, dt)?;
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let t0 = state.t;
    let mut rk = Rk4::new(state.sites.len());
    for i in 1..=steps {
        rk.advance(params, state, h);
        state.t = t0 + i as f64 * h;
        visit(i, steps, state)?;
    }
    if !state.is_finite() {
        return Err(FfaError::NonFinite("lattice state"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketSpec {
    n0: usize,
    delta_n: f64,
    k: f64,
    normalize: bool,
}

impl WavePacketSpec {
    /// Gaussian `exp(-(n - n0)^2 / delta_n^2 - i k n)` moving towards the impurity.
    pub fn new(n0: usize, delta_n: f64, k: f64, normalize: bool) -> Result<Self> {
        if !(delta_n > 0.0 && delta_n.is_finite()) {
            return Err(FfaError::Domain { what: "deltaN", value: delta_n });
        }
        if !(k > 0.0 && k < PI) {
            return Err(FfaError::Domain { what: "k (must lie in (0, pi))", value: k });
        }
        if !(n0 as f64 - 4.0 * delta_n > 1.0) {
            return Err(FfaError::InvalidParameter("packet must start clear of the boundary: n0 - 4 deltaN > 1"));
        }
        Ok(Self { n0, delta_n, k, normalize })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn delta_n(&self) -> f64 {
        self.delta_n
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn normalize(&self) -> bool {
        self.normalize
    }

    /// Amplitude on site `n` (1-based) before normalization.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        let x = (n as f64 - self.n0 as f64) / self.delta_n;
        Complex64::from_polar((-x * x).exp(), -self.k * n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Time step; `None` uses [`default_dt`].
    pub dt: Option<f64>,
    /// Snapshots are taken at `t_final * i / snapshots` for `i = 0..=snapshots`.
    pub snapshots: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { dt: None, snapshots: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacketRun {
    pub snapshots: Vec<LatticeState>,
    pub incident_norm: f64,
    pub reflected_norm: f64,
    pub gain: f64,
    /// Sites `lo..=hi` (1-based) counted in `reflected_norm`.
    pub window: (usize, usize),
}

/// `ceil(n0 + 4 deltaN + 5 kappa0 t_final)`.
pub fn wavepacket_lattice_size(params: &ModelParams, spec: &WavePacketSpec, t_final: f64) -> usize {
    (spec.n0 as f64 + 4.0 * spec.delta_n + 5.0 * params.kappa0() * t_final).ceil() as usize
}

/// `ceil(40 + 5 kappa0 t_final)`.
pub fn decay_lattice_size(params: &ModelParams, t_final: f64) -> usize {
    (40.0 + 5.0 * params.kappa0() * t_final).ceil() as usize
}

fn check_t_final(t_final: f64) -> Result<()> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(FfaError::Domain { what: "tFinal", value: t_final });
    }
    Ok(())
}

fn guard_wall(state: &LatticeState) -> Result<()> {
    let norm = state.wall_norm();
    if norm > WALL_NORM_TOL {
        return Err(FfaError::InsufficientLattice { norm, t: state.t });
    }
    Ok(())
}

fn snapshot_due(step: usize, steps: usize, snapshots: usize, next: &mut usize) -> bool {
    // Snapshot i falls on step round(i * steps / snapshots).
    let target = (*next * steps + snapshots / 2) / snapshots;
    if *next <= snapshots && step >= target {
        *next += 1;
        true
    } else {
        false
    }
}

/// Scatters a Gaussian packet off the impurity and measures the norm of the
/// outgoing lobe.
pub fn run_wavepacket(params: &ModelParams, spec: &WavePacketSpec, t_final: f64, options: &RunOptions) -> Result<WavePacketRun> {
    check_t_final(t_final)?;
    if options.snapshots == 0 {
        return Err(FfaError::InvalidParameter("snapshot count must be positive"));
    }
    let dt = options.dt.unwrap_or_else(|| default_dt(params));
    check_dt(params, dt)?;
    let n = wavepacket_lattice_size(params, spec, t_final);
    let mut sites: Vec<Complex64> = (1..=n).map(|i| spec.amplitude(i)).collect();
    if spec.normalize {
        let norm = sites.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        sites.iter_mut().for_each(|c| *c /= norm);
    }
    let mut state = LatticeState::new(0.0, Complex64::new(0.0, 0.0), sites)?;
    let incident_norm = state.site_norm_sqr();
    guard_wall(&state)?;

    let mut snapshots = vec![state.clone()];
    let mut next = 1;
    evolve(params, &mut state, t_final, dt, |i, steps, s| {
        if snapshot_due(i, steps, options.snapshots, &mut next) {
            guard_wall(s)?;
            snapshots.push(s.clone());
        }
        Ok(())
    })?;

    let window = reflection_window(params, spec, t_final, n);
    let reflected_norm: f64 = state.sites[window.0 - 1..window.1].iter().map(|c| c.norm_sqr()).sum();
    Ok(WavePacketRun { snapshots, incident_norm, reflected_norm, gain: reflected_norm / incident_norm, window })
}

/// Sites around `2 kappa0 sin(k) t_final - n0`, where a freely propagated
/// packet would sit after bouncing off site 1, of width `8 deltaN`.
pub fn reflection_window(params: &ModelParams, spec: &WavePacketSpec, t_final: f64, n: usize) -> (usize, usize) {
    let speed = 2.0 * params.kappa0() * spec.k.sin();
    let centre = speed * t_final - spec.n0 as f64;
    let half = 4.0 * spec.delta_n;
    let lo = (centre - half).floor().max(1.0) as usize;
    let hi = ((centre + half).ceil().max(1.0) as usize).min(n);
    (lo.min(hi), hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub t: f64,
    pub probability: f64,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRun {
    pub samples: Vec<DecaySample>,
    pub lattice_size: usize,
}

/// Survival probability `|c_a(t)|^2` of the impurity, sampled every step.
///
/// The impurity starts in `c_a = 1` with the lattice empty. With
/// `legacy_init` every site also starts at `c_n = 1`; that state fills the
/// whole lattice, so the wall guard is not applied.
pub fn run_decay(params: &ModelParams, t_final: f64, dt: Option<f64>, legacy_init: bool) -> Result<DecayRun> {
    check_t_final(t_final)?;
    let dt = dt.unwrap_or_else(|| default_dt(params));
    check_dt(params, dt)?;
    let n = decay_lattice_size(params, t_final);
    let fill = if legacy_init { 1.0 } else { 0.0 };
    let mut state = LatticeState::new(0.0, Complex64::new(1.0, 0.0), vec![Complex64::new(fill, 0.0); n])?;
    let sample = |s: &LatticeState| DecaySample { t: s.t, probability: s.c_a.norm_sqr(), amplitude: s.c_a };
    let mut samples = vec![sample(&state)];
    evolve(params, &mut state, t_final, dt, |_, _, s| {
        if !legacy_init {
            guard_wall(s)?;
        }
        samples.push(sample(s));
        Ok(())
    })?;
    Ok(DecayRun { samples, lattice_size: n })
}

/// Hamiltonian of the impurity plus `n` lattice sites, ordered `[a, 1, .., n]`.
pub fn finite_lattice_matrix(params: &ModelParams, n: usize) -> Result<SymTridiagonal> {
    if n < 4 {
        return Err(FfaError::InvalidParameter("finite lattice needs at least four sites"));
    }
    let mut diag = vec![Complex64::new(0.0, 0.0); n + 1];
    diag[0] = params.ea();
    let mut off = vec![Complex64::new(-params.kappa0(), 0.0); n];
    off[0] = Complex64::new(-params.kappa_a(), 0.0);
    SymTridiagonal::new(diag, off)
}

/// All `n + 1` eigenvalues of the truncated lattice.
pub fn finite_lattice_eigenvalues(params: &ModelParams, n: usize) -> Result<Vec<Complex64>> {
    finite_lattice_matrix(params, n)?.eigenvalues()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedMode {
    pub energy: Complex64,
    pub ipr: f64,
}

/// Eigenvalues of the truncated lattice whose eigenvectors have an inverse
/// participation ratio above `ipr_threshold`, sorted by real part.
pub fn localized_modes(params: &ModelParams, n: usize, ipr_threshold: f64) -> Result<Vec<LocalizedMode>> {
    let matrix = finite_lattice_matrix(params, n)?;
    let mut modes = Vec::new();
    for energy in matrix.eigenvalues()? {
        let ipr = inverse_participation_ratio(&matrix.eigenvector(energy)?);
        if ipr > ipr_threshold {
            modes.push(LocalizedMode { energy, ipr });
        }
    }
    modes.sort_by(|a, b| a.energy.re.total_cmp(&b.energy.re).then(a.energy.im.total_cmp(&b.energy.im)));
    Ok(modes)
}
