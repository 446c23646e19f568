//! Finite-difference verification of analytic gradients.

use crate::error::{Error, Result};
use crate::numkit::graph::{Graph, Var};
use crate::numkit::tensor::Tensor;

/// Compares the tape's gradients of a scalar-valued function against central
/// finite differences at `points`, returning the maximum relative error
/// `|analytic - numeric| / max(1, |analytic|)` over all coordinates.
pub fn grad_check_multi<F>(build: F, points: &[Tensor], eps: f64) -> Result<f64>
where
    F: Fn(&mut Graph, &[Var]) -> Result<Var>,
{
    if eps <= 0.0 {
        return Err(Error::contract("grad_check epsilon must be positive"));
    }

    let mut graph = Graph::new();
    let vars: Vec<Var> = points.iter().map(|p| graph.param(p.clone())).collect();
    let loss = build(&mut graph, &vars)?;
    if !graph.value(loss).is_scalar() {
        return Err(Error::contract(format!(
            "grad_check requires a scalar-valued function, got shape {:?}",
            graph.value(loss).shape()
        )));
    }
    let grads = graph.backward(loss)?;
    let analytic: Vec<Tensor> = vars
        .iter()
        .zip(points)
        .map(|(&v, p)| grads.get_or_zero(v, p.shape()))
        .collect();

    let eval = |perturbed: &[Tensor]| -> Result<f64> {
        let mut g = Graph::new();
        let vs: Vec<Var> = perturbed.iter().map(|p| g.param(p.clone())).collect();
        let out = build(&mut g, &vs)?;
        Ok(g.value(out).item())
    };

    let mut max_rel: f64 = 0.0;
    let mut work: Vec<Tensor> = points.to_vec();
    for k in 0..points.len() {
        for i in 0..points[k].len() {
            let orig = work[k].data()[i];
            work[k].data_mut()[i] = orig + eps;
            let plus = eval(&work)?;
            work[k].data_mut()[i] = orig - eps;
            let minus = eval(&work)?;
            work[k].data_mut()[i] = orig;

            let numeric = (plus - minus) / (2.0 * eps);
            let a = analytic[k].data()[i];
            let rel = (a - numeric).abs() / a.abs().max(1.0);
            max_rel = max_rel.max(rel);
        }
    }
    Ok(max_rel)
}

/// Single-tensor convenience wrapper around [`grad_check_multi`].
pub fn grad_check<F>(build: F, point: &Tensor, eps: f64) -> Result<f64>
where
    F: Fn(&mut Graph, Var) -> Result<Var>,
{
    grad_check_multi(
        |g, vars| build(g, vars[0]),
        std::slice::from_ref(point),
        eps,
    )
}
