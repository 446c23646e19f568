//! Per-feature min-max scaling to `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::data::batch::SeriesBatch;
use crate::error::{Error, Result};

/// Per-feature minima and maxima observed on the training set. Degenerate
/// features (`max == min`) map to a constant 0.5 and invert back to their
/// single observed value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl ScalerParams {
    pub fn features(&self) -> usize {
        self.mins.len()
    }
}

pub fn scaler_fit(batch: &SeriesBatch) -> ScalerParams {
    let f = batch.features();
    let mut mins = vec![f64::INFINITY; f];
    let mut maxs = vec![f64::NEG_INFINITY; f];
    for s in 0..batch.samples() {
        for t in 0..batch.timestamps() {
            for k in 0..f {
                let v = batch.get(s, t, k);
                mins[k] = mins[k].min(v);
                maxs[k] = maxs[k].max(v);
            }
        }
    }
    ScalerParams { mins, maxs }
}

pub fn scaler_apply(batch: &SeriesBatch, p: &ScalerParams) -> Result<SeriesBatch> {
    if batch.is_scaled() {
        return Err(Error::contract("scaler_apply on an already scaled batch"));
    }
    if batch.features() != p.features() {
        return Err(Error::shape(
            "scaler_apply",
            &[batch.features()],
            &[p.features()],
        ));
    }
    let mut out = batch.clone();
    let f = batch.features();
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        let k = i % f;
        let span = p.maxs[k] - p.mins[k];
        *v = if span == 0.0 {
            0.5
        } else {
            (*v - p.mins[k]) / span
        };
    }
    out.set_scaled(true);
    Ok(out)
}

pub fn scaler_invert(batch: &SeriesBatch, p: &ScalerParams) -> Result<SeriesBatch> {
    if !batch.is_scaled() {
        return Err(Error::contract("scaler_invert on an unscaled batch"));
    }
    if batch.features() != p.features() {
        return Err(Error::shape(
            "scaler_invert",
            &[batch.features()],
            &[p.features()],
        ));
    }
    let mut out = batch.clone();
    let f = batch.features();
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        let k = i % f;
        let span = p.maxs[k] - p.mins[k];
        *v = if span == 0.0 {
            p.mins[k]
        } else {
            p.mins[k] + *v * span
        };
    }
    out.set_scaled(false);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Rng;

    #[test]
    fn midpoint_maps_to_half() {
        let b = SeriesBatch::new(3, 1, 1, vec![-1.0, 0.0, 1.0], false).unwrap();
        let p = scaler_fit(&b);
        let s = scaler_apply(&b, &p).unwrap();
        assert_eq!(s.get(1, 0, 0), 0.5);
        assert_eq!(s.get(0, 0, 0), 0.0);
        assert_eq!(s.get(2, 0, 0), 1.0);
    }

    #[test]
    fn constant_feature_becomes_half_and_inverts_exactly() {
        let b = SeriesBatch::new(2, 2, 1, vec![3.0; 4], false).unwrap();
        let p = scaler_fit(&b);
        let s = scaler_apply(&b, &p).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.5));
        let back = scaler_invert(&s, &p).unwrap();
        assert!(back.values().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn apply_then_invert_is_identity() {
        let mut rng = Rng::from_seed(4);
        let mut b = SeriesBatch::zeros(5, 4, 3, false);
        for v in b.values_mut() {
            *v = rng.uniform_range(-7.0, 13.0);
        }
        let p = scaler_fit(&b);
        let s = scaler_apply(&b, &p).unwrap();
        assert!(s.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        let back = scaler_invert(&s, &p).unwrap();
        let max_err = b
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, c)| (a - c).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-12, "round-trip error {max_err}");
    }

    #[test]
    fn invert_requires_scaled_input() {
        let b = SeriesBatch::zeros(1, 1, 1, false);
        let p = scaler_fit(&b);
        assert!(scaler_invert(&b, &p).is_err());
    }

    #[test]
    fn scaling_is_monotone_per_feature() {
        let b = SeriesBatch::new(4, 1, 1, vec![0.0, 1.0, 2.0, 5.0], false).unwrap();
        let p = scaler_fit(&b);
        let s = scaler_apply(&b, &p).unwrap();
        for i in 1..4 {
            assert!(s.get(i, 0, 0) > s.get(i - 1, 0, 0));
        }
    }
}
