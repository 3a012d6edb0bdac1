//! Complex symmetric tridiagonal matrices: eigenvalues by implicit QL with
//! complex-orthogonal rotations, eigenvectors by inverse iteration.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::{FfaError, Result};

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<Complex64>,
    off: Vec<Complex64>,
}

impl SymTridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<Complex64>, off: Vec<Complex64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(FfaError::InvalidParameter("off-diagonal must be one shorter than the diagonal"));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn off(&self) -> &[Complex64] {
        &self.off
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// All eigenvalues, in no particular order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(Complex64::zero());
        let eps = f64::EPSILON;

        for l in 0..n {
            let mut sweeps = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].norm() + d[m + 1].norm();
                    if e[m].norm() <= eps * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(FfaError::NoConvergence);
                }
                // Wilkinson-type shift from the leading 2x2 block.
                let mut g = (d[l + 1] - d[l]) / (e[l] * 2.0);
                let mut r = (g * g + 1.0).sqrt();
                let denom = if (g + r).norm() >= (g - r).norm() { g + r } else { g - r };
                g = d[m] - d[l] + e[l] / denom;
                let mut s = Complex64::new(1.0, 0.0);
                let mut c = Complex64::new(1.0, 0.0);
                let mut p = Complex64::zero();
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = (f * f + g * g).sqrt();
                    e[i + 1] = r;
                    if r.norm() == 0.0 {
                        d[i + 1] -= p;
                        e[m] = Complex64::zero();
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + c * b * 2.0;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = Complex64::zero();
            }
        }
        if d.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(FfaError::NoConvergence);
        }
        Ok(d)
    }

    /// Solves `(A - shift) x = rhs` by Gaussian elimination with partial
    /// pivoting (one extra super-diagonal of fill).
    fn solve_shifted(&self, shift: Complex64, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut dl: Vec<Complex64> = self.off.clone();
        let mut dg: Vec<Complex64> = self.diag.iter().map(|&x| x - shift).collect();
        let mut du: Vec<Complex64> = self.off.clone();
        let mut du2 = vec![Complex64::zero(); n.saturating_sub(2)];
        let mut x = rhs.to_vec();
        let tiny = f64::MIN_POSITIVE.sqrt();

        for i in 0..n.saturating_sub(1) {
            if dg[i].norm() >= dl[i].norm() {
                if dg[i].norm() < tiny {
                    dg[i] = Complex64::new(tiny, 0.0);
                }
                let factor = dl[i] / dg[i];
                dg[i + 1] -= factor * du[i];
                x[i + 1] = x[i + 1] - factor * x[i];
                dl[i] = factor;
            } else {
                let factor = dg[i] / dl[i];
                dg[i] = dl[i];
                let tmp = dg[i + 1];
                dg[i + 1] = du[i] - factor * tmp;
                du[i] = tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -factor * du2[i];
                }
                x.swap(i, i + 1);
                x[i + 1] = x[i + 1] - factor * x[i];
                dl[i] = factor;
            }
        }
        if dg[n - 1].norm() < tiny {
            dg[n - 1] = Complex64::new(tiny, 0.0);
        }
        // Back substitution with the upper band (dg, du, du2).
        x[n - 1] /= dg[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dg[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dg[i];
        }
        x
    }

    /// Right eigenvector for an (approximate) eigenvalue, normalized to unit
    /// Euclidean norm.
    pub fn eigenvector(&self, eigenvalue: Complex64) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let scale = self.diag.iter().chain(self.off.iter()).map(|x| x.norm()).fold(1.0, f64::max);
        let shift = eigenvalue + Complex64::new(1.0, 1.0) * (scale * 1e-12);
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0))
            .collect();
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(FfaError::NoConvergence);
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(v)
    }
}

/// `sum |v_i|^4 / (sum |v_i|^2)^2`: 1 for a single-site state, `~1/n` for a
/// state spread over `n` sites.
pub fn inverse_participation_ratio(v: &[Complex64]) -> f64 {
    let (p2, p4) = v.iter().fold((0.0, 0.0), |(a, b), x| {
        let w = x.norm_sqr();
        (a + w, b + w * w)
    });
    if p2 == 0.0 {
        0.0
    } else {
        p4 / (p2 * p2)
    }
}
