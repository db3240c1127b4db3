use std::sync::Arc;

use ridgesqueeze_core::{Complex64, Dft};
use rustfft::{Fft, FftPlanner};

/// Planned forward FFT of a fixed size.
pub struct RustFft {
    fft: Arc<dyn Fft<f64>>,
}

impl RustFft {
    pub fn new(n: usize) -> Self {
        RustFft {
            fft: FftPlanner::new().plan_fft_forward(n),
        }
    }
}

impl Dft for RustFft {
    fn size(&self) -> usize {
        self.fft.len()
    }

    fn forward(&self, buf: &mut [Complex64]) {
        self.fft.process(buf);
    }
}
