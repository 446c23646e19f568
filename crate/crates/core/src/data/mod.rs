//! Dataset construction and ingestion: sine benchmark data, long-format CSV
//! I/O, min-max scaling, sliding windows, and noise sampling.

mod batch;
mod csv_io;
mod scaler;
mod sines;

pub use batch::SeriesBatch;
pub use csv_io::{export_csv, load_csv};
pub use scaler::{scaler_apply, scaler_fit, scaler_invert, ScalerParams};
pub use sines::{generate_sines, SineConfig};

use crate::error::{Error, Result};
use crate::numkit::Rng;

/// Cuts a single long sequence into overlapping windows of length `t`.
///
/// `series` must hold exactly one sample; the result has
/// `floor((L - t) / stride) + 1` windows, each a contiguous slice.
pub fn window(series: &SeriesBatch, t: usize, stride: usize) -> Result<SeriesBatch> {
    if series.samples() != 1 {
        return Err(Error::contract(format!(
            "window expects a single long sequence, got {} samples",
            series.samples()
        )));
    }
    if t == 0 || stride == 0 {
        return Err(Error::contract("window length and stride must be positive"));
    }
    let l = series.timestamps();
    let f = series.features();
    if l < t {
        return Err(Error::contract(format!(
            "sequence length {l} is shorter than window length {t}"
        )));
    }
    let n = (l - t) / stride + 1;
    let mut out = SeriesBatch::zeros(n, t, f, series.is_scaled());
    for w in 0..n {
        let start = w * stride;
        for j in 0..t {
            for k in 0..f {
                out.set(w, j, k, series.get(0, start + j, k));
            }
        }
    }
    Ok(out)
}

/// Independent uniform noise in `[0, 1)` with shape `(n, t, z)`.
pub fn sample_noise(n: usize, t: usize, z: usize, rng: &mut Rng) -> SeriesBatch {
    let mut out = SeriesBatch::zeros(n, t, z, true);
    for v in out.values_mut() {
        *v = rng.uniform();
    }
    out
}
