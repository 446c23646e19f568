//! Principal component projection of flattened sequences.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::data::SeriesBatch;
use crate::error::{Error, Result};
use crate::eval::{Embedding, SourceLabel};

/// Flattens each sample to a `T*F` vector, fits the principal axes of the
/// pooled real + synthetic set, and projects onto the top two components.
///
/// Components are ordered by descending eigenvalue; each eigenvector's sign
/// is fixed so its largest-magnitude loading is positive.
pub fn pca_project(real: &SeriesBatch, synthetic: &SeriesBatch) -> Result<Embedding> {
    if real.timestamps() != synthetic.timestamps() || real.features() != synthetic.features() {
        return Err(Error::shape(
            "pca_project",
            &[real.timestamps(), real.features()],
            &[synthetic.timestamps(), synthetic.features()],
        ));
    }
    let n = real.samples() + synthetic.samples();
    if n < 3 {
        return Err(Error::contract(format!(
            "pca_project needs at least 3 pooled samples, got {n}"
        )));
    }
    let d = real.timestamps() * real.features();

    let mut rows: Vec<&[f64]> = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..real.samples() {
        rows.push(real.sample(i));
        labels.push(SourceLabel::Real);
    }
    for i in 0..synthetic.samples() {
        rows.push(synthetic.sample(i));
        labels.push(SourceLabel::Synthetic);
    }

    let mut mean = vec![0.0; d];
    for row in &rows {
        for (m, &v) in mean.iter_mut().zip(*row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| row.iter().zip(&mean).map(|(&v, &m)| v - m).collect())
        .collect();

    // sample covariance of the pooled set
    let mut cov = DMatrix::zeros(d, d);
    for row in &centered {
        for i in 0..d {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            for j in 0..d {
                cov[(i, j)] += ri * row[j];
            }
        }
    }
    cov /= (n - 1) as f64;

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let scale = eig.eigenvalues[order[0]].abs();
    if scale <= 1e-24 {
        return Err(Error::domain(
            "pca_project",
            "degenerate covariance: all pooled samples are identical",
        ));
    }

    let mut axes = [vec![0.0; d], vec![0.0; d]];
    for (c, axis) in axes.iter_mut().enumerate() {
        let col = eig.eigenvectors.column(order[c]);
        for (a, &v) in axis.iter_mut().zip(col.iter()) {
            *a = v;
        }
        // sign convention: largest-magnitude loading positive
        let lead = axis
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite"))
            .map(|(i, _)| i)
            .expect("d >= 1");
        if axis[lead] < 0.0 {
            for a in axis.iter_mut() {
                *a = -*a;
            }
        }
    }

    let coords = centered
        .iter()
        .map(|row| {
            let mut c = [0.0; 2];
            for (k, axis) in axes.iter().enumerate() {
                c[k] = row.iter().zip(axis).map(|(&v, &a)| v * a).sum();
            }
            c
        })
        .collect();

    Ok(Embedding { coords, labels })
}
