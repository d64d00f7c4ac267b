//! Iterative radix-2 complex FFT, used for the causal convolutions in the
//! finite-volume flux. Sizes are powers of two; linear convolution pads to
//! the next power of two at least `2n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

pub fn next_pow2(n: usize) -> usize {
    let mut p = 1;
    while p < n {
        p <<= 1;
    }
    p
}

/// In-place decimation-in-time FFT on split re/im arrays (power-of-two length).
pub fn fft_inplace(re: &mut [f64], im: &mut [f64], inverse: bool) {
    let n = re.len();
    debug_assert!(n.is_power_of_two() && im.len() == n);
    // bit reversal
    let mut j = 0;
    for i in 0..n {
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * math::PI / len as f64;
        let (wr, wi) = (math::cos(ang), math::sin(ang));
        let mut i = 0;
        while i < n {
            let mut cr = 1.0;
            let mut ci = 0.0;
            for k in 0..len / 2 {
                let a = i + k;
                let b = a + len / 2;
                let tr = re[b] * cr - im[b] * ci;
                let ti = re[b] * ci + im[b] * cr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let inv = 1.0 / n as f64;
        for v in re.iter_mut() {
            *v *= inv;
        }
        for v in im.iter_mut() {
            *v *= inv;
        }
    }
}

/// Precomputed spectrum of a fixed kernel for repeated causal convolutions.
pub struct ConvPlan {
    len: usize,
    n_out: usize,
    kre: Vec<f64>,
    kim: Vec<f64>,
}

impl ConvPlan {
    /// Plans convolution against `kernel`; outputs will have `n_out` entries
    /// (sum over j of kernel[m-j]·g[j], m = 0..n_out-1).
    pub fn new(kernel: &[f64], n_out: usize) -> Self {
        let len = next_pow2(kernel.len() + n_out);
        let mut kre = vec![0.0; len];
        let mut kim = vec![0.0; len];
        kre[..kernel.len()].copy_from_slice(kernel);
        fft_inplace(&mut kre, &mut kim, false);
        ConvPlan { len, n_out, kre, kim }
    }

    /// (kernel ⋆ g)[m] for m = 0..n_out-1.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        debug_assert!(g.len() <= self.n_out);
        let mut re = vec![0.0; self.len];
        let mut im = vec![0.0; self.len];
        re[..g.len()].copy_from_slice(g);
        fft_inplace(&mut re, &mut im, false);
        for i in 0..self.len {
            let r = re[i] * self.kre[i] - im[i] * self.kim[i];
            let m = re[i] * self.kim[i] + im[i] * self.kre[i];
            re[i] = r;
            im[i] = m;
        }
        fft_inplace(&mut re, &mut im, true);
        re.truncate(self.n_out);
        re
    }
}

/// Direct causal convolution for reference and small sizes.
pub fn convolve_direct(kernel: &[f64], g: &[f64], n_out: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_out];
    for (m, o) in out.iter_mut().enumerate() {
        let jmax = m.min(g.len() - 1);
        let mut acc = 0.0;
        for j in 0..=jmax {
            if m - j < kernel.len() {
                acc += kernel[m - j] * g[j];
            }
        }
        *o = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_roundtrip() {
        let n = 64;
        let mut re: Vec<f64> = (0..n).map(|i| math::sin(i as f64)).collect();
        let mut im: Vec<f64> = (0..n).map(|i| math::cos(2.0 * i as f64)).collect();
        let (r0, i0) = (re.clone(), im.clone());
        fft_inplace(&mut re, &mut im, false);
        fft_inplace(&mut re, &mut im, true);
        for i in 0..n {
            assert!(math::abs(re[i] - r0[i]) < 1e-12);
            assert!(math::abs(im[i] - i0[i]) < 1e-12);
        }
    }

    #[test]
    fn conv_matches_direct() {
        let kernel: Vec<f64> = (0..300).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let g: Vec<f64> = (0..300).map(|i| math::sin(0.1 * i as f64)).collect();
        let plan = ConvPlan::new(&kernel, 300);
        let a = plan.apply(&g);
        let b = convolve_direct(&kernel, &g, 300);
        for i in 0..300 {
            assert!(math::abs(a[i] - b[i]) < 1e-10, "i={i}: {} vs {}", a[i], b[i]);
        }
    }
}
