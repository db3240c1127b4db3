//! Forward DFT abstraction used by every transform in this crate.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

/// In-place forward DFT of a fixed size, `X[k] = sum_i x[i] e^{-j 2 pi k i / n}`.
pub trait Dft {
    fn size(&self) -> usize;

    /// `buf.len()` must equal [`Dft::size`].
    fn forward(&self, buf: &mut [Complex64]);
}

impl<D: Dft + ?Sized> Dft for &D {
    fn size(&self) -> usize {
        (**self).size()
    }

    fn forward(&self, buf: &mut [Complex64]) {
        (**self).forward(buf)
    }
}

/// Quadratic-time DFT with a precomputed twiddle table. Portable but slow;
/// std users should prefer an FFT-backed implementation.
#[derive(Debug, Clone)]
pub struct DirectDft {
    twiddles: Vec<Complex64>,
}

impl DirectDft {
    pub fn new(n: usize) -> Self {
        let twiddles = (0..n)
            .map(|i| {
                let arg = -2.0 * PI * i as f64 / n as f64;
                Complex64::new(Float::cos(arg), Float::sin(arg))
            })
            .collect();
        DirectDft { twiddles }
    }
}

impl Dft for DirectDft {
    fn size(&self) -> usize {
        self.twiddles.len()
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.twiddles.len();
        assert_eq!(buf.len(), n, "DFT buffer length");
        let input: Vec<Complex64> = buf.to_vec();
        let nonzero: Vec<(usize, Complex64)> = input
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, x)| x.re != 0.0 || x.im != 0.0)
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(i, x) in &nonzero {
                acc += x * self.twiddles[(k * i) % n];
            }
            *o = acc;
        }
        buf.copy_from_slice(&out);
    }
}
