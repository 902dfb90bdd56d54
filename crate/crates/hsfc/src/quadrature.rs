//! Shift-averaged Hammersley quadrature, used by the volume and integral
//! oracles. Randomized by Cranley–Patterson rotation so every estimate
//! carries a defensible standard error.

use crate::rng::RngState;
use rand::Rng;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

pub(crate) fn radical_inverse(mut n: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 0.0;
    let mut scale = 1.0 / base as f64;
    while n > 0 {
        inv += (n % b) as f64 * scale;
        n /= b;
        scale /= base as f64;
    }
    inv
}

/// Point `i` of the `count`-point Hammersley set in `d` dimensions.
fn hammersley(i: u64, count: u64, d: usize, out: &mut [f64]) {
    out[0] = (i as f64 + 0.5) / count as f64;
    for axis in 1..d {
        out[axis] = radical_inverse(i, PRIMES[axis - 1]);
    }
}

/// Mean of `f` over the unit cube, estimated from `shifts` randomly rotated
/// copies of a `samples`-point Hammersley set. Returns `(mean, std_error)`
/// where the error is the sample standard error across shifts.
pub(crate) fn mean_over_cube<F: FnMut(&[f64]) -> f64>(
    d: usize,
    samples: u64,
    shifts: u32,
    rng: &RngState,
    mut f: F,
) -> (f64, f64) {
    assert!(d >= 1 && d <= PRIMES.len() && samples >= 1 && shifts >= 2);
    let mut stream = rng.stream();
    let mut estimates = Vec::with_capacity(shifts as usize);
    let mut shift = vec![0.0; d];
    let mut point = vec![0.0; d];
    let mut base = vec![0.0; d];
    for _ in 0..shifts {
        for s in shift.iter_mut() {
            *s = stream.gen::<f64>();
        }
        let mut sum = 0.0;
        let mut c = 0.0;
        for i in 0..samples {
            hammersley(i, samples, d, &mut base);
            for axis in 0..d {
                let v = base[axis] + shift[axis];
                point[axis] = if v >= 1.0 { v - 1.0 } else { v };
            }
            let y = f(&point) - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        estimates.push(sum / samples as f64);
    }
    let (mean, std) = crate::stats::mean_std(&estimates);
    (mean, std / (shifts as f64).sqrt())
}
