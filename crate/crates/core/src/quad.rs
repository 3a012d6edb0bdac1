//! Globally adaptive 15-point Gauss-Kronrod quadrature for complex-valued
//! integrands on finite intervals.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::{FfaError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_evaluations: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(centre - dx) + f(centre + dx);
        kron += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    (value, error)
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol |I|)`.
///
/// Fails with [`FfaError::Quadrature`] when the evaluation budget runs out,
/// reporting the error estimate reached so far.
pub fn integrate<F>(mut f: F, a: f64, b: f64, options: &QuadOptions) -> Result<Integral>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(FfaError::NonFinite("integration limit"));
    }
    if a == b {
        return Ok(Integral { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let (value, error) = kronrod(&mut f, a, b);
    let mut evaluations = 15;
    let mut total = value;
    let mut total_error = error;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });

    loop {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(FfaError::NonFinite("integrand"));
        }
        let target = options.abs_tol.max(options.rel_tol * total.norm());
        if total_error <= target {
            // Running sums drift when segments of very different size mix;
            // confirm against a fresh sum before stopping.
            total = heap.iter().fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value);
            total_error = heap.iter().map(|s| s.error).sum();
            if total_error <= options.abs_tol.max(options.rel_tol * total.norm()) {
                break;
            }
        }
        if evaluations + 30 > options.max_evaluations {
            return Err(FfaError::Quadrature { error: total_error, evaluations });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point.
            return Err(FfaError::Quadrature { error: total_error, evaluations });
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }

    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value);
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Integral { value, error, evaluations })
}
