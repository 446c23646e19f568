//! Gated recurrent unit cell.
//!
//! Gate convention, fixed here and relied on by hand-computed test vectors:
//!
//! ```text
//! z_t = sigmoid(x_t W_z + h_{t-1} U_z + b_z)
//! r_t = sigmoid(x_t W_r + h_{t-1} U_r + b_r)
//! c_t = tanh(x_t W_h + (r_t ⊙ h_{t-1}) U_h + b_h)
//! h_t = (1 - z_t) ⊙ h_{t-1} + z_t ⊙ c_t
//! ```
//!
//! Inputs are row-major `(batch, dim)` matrices, so weights are stored as
//! `(input_dim, hidden_dim)` / `(hidden_dim, hidden_dim)` and applied on the
//! right.

use crate::error::Result;
use crate::numkit::{Graph, Rng, Tensor, Var};

#[derive(Clone, Debug, PartialEq)]
pub struct GruParams {
    pub w_z: Tensor,
    pub u_z: Tensor,
    pub b_z: Tensor,
    pub w_r: Tensor,
    pub u_r: Tensor,
    pub b_r: Tensor,
    pub w_h: Tensor,
    pub u_h: Tensor,
    pub b_h: Tensor,
}

impl GruParams {
    /// Weights uniform in `[-k, k]` with `k = 1/sqrt(hidden_dim)`, biases
    /// zero. Draw order is fixed (z, r, h; input weight before recurrent).
    pub fn init(input_dim: usize, hidden_dim: usize, rng: &mut Rng) -> Self {
        let k = 1.0 / (hidden_dim as f64).sqrt();
        let mut w = |rows: usize, cols: usize| {
            Tensor::from_fn(&[rows, cols], |_| rng.uniform_range(-k, k))
        };
        let w_z = w(input_dim, hidden_dim);
        let u_z = w(hidden_dim, hidden_dim);
        let w_r = w(input_dim, hidden_dim);
        let u_r = w(hidden_dim, hidden_dim);
        let w_h = w(input_dim, hidden_dim);
        let u_h = w(hidden_dim, hidden_dim);
        Self {
            w_z,
            u_z,
            b_z: Tensor::zeros(&[hidden_dim]),
            w_r,
            u_r,
            b_r: Tensor::zeros(&[hidden_dim]),
            w_h,
            u_h,
            b_h: Tensor::zeros(&[hidden_dim]),
        }
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        Self {
            w_z: Tensor::zeros(&[input_dim, hidden_dim]),
            u_z: Tensor::zeros(&[hidden_dim, hidden_dim]),
            b_z: Tensor::zeros(&[hidden_dim]),
            w_r: Tensor::zeros(&[input_dim, hidden_dim]),
            u_r: Tensor::zeros(&[hidden_dim, hidden_dim]),
            b_r: Tensor::zeros(&[hidden_dim]),
            w_h: Tensor::zeros(&[input_dim, hidden_dim]),
            u_h: Tensor::zeros(&[hidden_dim, hidden_dim]),
            b_h: Tensor::zeros(&[hidden_dim]),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.u_z.shape()[0]
    }

    /// Canonical parameter order, shared with [`BoundGru::vars`].
    pub fn params(&self) -> Vec<&Tensor> {
        vec![
            &self.w_z, &self.u_z, &self.b_z, &self.w_r, &self.u_r, &self.b_r, &self.w_h,
            &self.u_h, &self.b_h,
        ]
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        vec![
            &mut self.w_z,
            &mut self.u_z,
            &mut self.b_z,
            &mut self.w_r,
            &mut self.u_r,
            &mut self.b_r,
            &mut self.w_h,
            &mut self.u_h,
            &mut self.b_h,
        ]
    }

    pub fn param_names() -> [&'static str; 9] {
        ["w_z", "u_z", "b_z", "w_r", "u_r", "b_r", "w_h", "u_h", "b_h"]
    }
}

/// A GRU cell's parameters registered as nodes of one graph.
#[derive(Clone, Copy)]
pub struct BoundGru {
    pub w_z: Var,
    pub u_z: Var,
    pub b_z: Var,
    pub w_r: Var,
    pub u_r: Var,
    pub b_r: Var,
    pub w_h: Var,
    pub u_h: Var,
    pub b_h: Var,
}

impl BoundGru {
    /// Same order as [`GruParams::params`].
    pub fn vars(&self) -> [Var; 9] {
        [
            self.w_z, self.u_z, self.b_z, self.w_r, self.u_r, self.b_r, self.w_h, self.u_h,
            self.b_h,
        ]
    }
}

/// Registers the cell's parameters on `graph`; trainable cells collect
/// gradients, frozen ones participate as constants.
pub fn bind_gru(graph: &mut Graph, params: &GruParams, trainable: bool) -> BoundGru {
    let mut reg = |t: &Tensor| {
        if trainable {
            graph.param(t.clone())
        } else {
            graph.constant(t.clone())
        }
    };
    BoundGru {
        w_z: reg(&params.w_z),
        u_z: reg(&params.u_z),
        b_z: reg(&params.b_z),
        w_r: reg(&params.w_r),
        u_r: reg(&params.u_r),
        b_r: reg(&params.b_r),
        w_h: reg(&params.w_h),
        u_h: reg(&params.u_h),
        b_h: reg(&params.b_h),
    }
}

fn gate(
    g: &mut Graph,
    x: Var,
    h: Var,
    w: Var,
    u: Var,
    b: Var,
    rows: usize,
) -> Result<Var> {
    let xw = g.matmul(x, w)?;
    let hu = g.matmul(h, u)?;
    let s = g.add(xw, hu)?;
    let bb = g.broadcast(b, rows)?;
    g.add(s, bb)
}

/// Runs the cell over a sequence of `(batch, input_dim)` steps, returning the
/// hidden state at every step. `h0` defaults to zeros.
pub fn gru_forward(
    graph: &mut Graph,
    cell: &BoundGru,
    inputs: &[Var],
    h0: Option<Var>,
) -> Result<Vec<Var>> {
    let rows = graph.value(inputs[0]).shape()[0];
    let hidden = graph.value(cell.u_z).shape()[0];
    let mut h = match h0 {
        Some(v) => v,
        None => graph.constant(Tensor::zeros(&[rows, hidden])),
    };
    let mut out = Vec::with_capacity(inputs.len());
    for &x in inputs {
        let z_pre = gate(graph, x, h, cell.w_z, cell.u_z, cell.b_z, rows)?;
        let z = graph.sigmoid(z_pre)?;
        let r_pre = gate(graph, x, h, cell.w_r, cell.u_r, cell.b_r, rows)?;
        let r = graph.sigmoid(r_pre)?;
        let rh = graph.mul(r, h)?;
        let c_pre = gate(graph, x, rh, cell.w_h, cell.u_h, cell.b_h, rows)?;
        let c = graph.tanh(c_pre)?;
        // h + z * (c - h) == (1 - z) * h + z * c
        let diff = graph.sub(c, h)?;
        let step = graph.mul(z, diff)?;
        h = graph.add(h, step)?;
        out.push(h);
    }
    Ok(out)
}
