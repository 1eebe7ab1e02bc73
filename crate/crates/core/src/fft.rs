//! FFT convolution helpers shared by the symbol algebra and the operator engine.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward and inverse plans of length `size`, cached per thread.
pub fn plans(size: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(size), p.plan_fft_inverse(size))
    })
}

/// Below this product of lengths the direct O(nm) convolution wins.
const DIRECT_CUTOFF: usize = 4096;

/// Full linear convolution, `out[i] = Σ_k a[i-k] b[k]`, of length `a.len() + b.len() - 1`.
pub fn convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 16 || a.len() * b.len() <= DIRECT_CUTOFF {
        let mut out = vec![C64::new(0.0, 0.0); out_len];
        for (i, &x) in a.iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for (k, &y) in b.iter().enumerate() {
                out[i + k] += x * y;
            }
        }
        return out;
    }
    let mut full = circular_convolve(a, b, out_len.next_power_of_two());
    full.truncate(out_len);
    full
}

/// Circular convolution of zero-padded `a` and `b` at transform length `size`.
pub fn circular_convolve(a: &[C64], b: &[C64], size: usize) -> Vec<C64> {
    debug_assert!(a.len() <= size && b.len() <= size);
    let (fwd, inv) = plans(size);

    let mut fa = vec![C64::new(0.0, 0.0); size];
    fa[..a.len()].copy_from_slice(a);
    let mut fb = vec![C64::new(0.0, 0.0); size];
    fb[..b.len()].copy_from_slice(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    for x in fa.iter_mut() {
        *x *= scale;
    }
    fa
}

/// Sliding correlation-type product used by Toeplitz and Hankel application.
///
/// With `kernel` of length `out_len + v.len() - 1`, returns
/// `out[m] = Σ_k kernel[m + v.len() - 1 - k] v[k]` for `m < out_len`.
pub fn sliding_product(kernel: &[C64], v: &[C64], out_len: usize) -> Vec<C64> {
    let l = v.len();
    debug_assert_eq!(kernel.len(), out_len + l - 1);
    if l == 0 || out_len == 0 {
        return vec![C64::new(0.0, 0.0); out_len];
    }
    if (l as u128) * (out_len as u128) <= 1 << 16 {
        let mut out = vec![C64::new(0.0, 0.0); out_len];
        for (m, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &x) in v.iter().enumerate() {
                acc += kernel[m + l - 1 - k] * x;
            }
            *o = acc;
        }
        return out;
    }
    // Wrap-around of the circular product only pollutes indices below l - 1.
    let size = kernel.len().next_power_of_two();
    let full = circular_convolve(kernel, v, size);
    full[l - 1..l - 1 + out_len].to_vec()
}

/// Values `Σ c_n e^{inθ_j}` on the grid `θ_j = 2πj/size` for coefficients at degrees
/// `lo..lo + coeffs.len()`. Degrees are folded modulo `size`, which is exact on the grid.
pub fn grid_values(lo: i64, coeffs: &[C64], size: usize) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); size];
    for (i, c) in coeffs.iter().enumerate() {
        let slot = (lo + i as i64).rem_euclid(size as i64) as usize;
        buf[slot] += c;
    }
    plans(size).1.process(&mut buf);
    buf
}
