//! Reverse-mode differentiation over a flat tape of tensor primitives.
//!
//! A [`Graph`] records primitive applications in topological (insertion)
//! order together with their cached forward values. [`Graph::backward`]
//! walks the tape in reverse and accumulates gradients into every leaf that
//! was registered with [`Graph::param`]. Graphs are built for a single
//! training step and discarded afterwards.

use crate::error::{Error, Result};
use crate::numkit::tensor::Tensor;

/// The primitive operations the tape understands.
#[derive(Clone, Debug, PartialEq)]
pub enum PrimitiveKind {
    /// Rank-2 matrix product `(m,k) x (k,n) -> (m,n)`.
    MatMul,
    Add,
    Sub,
    Mul,
    /// Multiply every element by a constant.
    Scale(f64),
    /// Add a constant to every element.
    AddScalar(f64),
    Sigmoid,
    Tanh,
    Square,
    /// Elementwise square root; inputs must be non-negative.
    Sqrt,
    Abs,
    /// Natural logarithm; inputs must be strictly positive.
    Ln,
    /// Concatenate two tensors along their last axis.
    ConcatLast,
    /// Contiguous slice along one axis.
    Slice { axis: usize, start: usize, len: usize },
    /// Sum over the given axes (empty = all axes, yielding a scalar).
    ReduceSum { axes: Vec<usize> },
    /// Mean over the given axes (empty = all axes, yielding a scalar).
    ReduceMean { axes: Vec<usize> },
    /// Repeat a rank-1 vector as the rows of a `(rows, d)` matrix.
    Broadcast { rows: usize },
    /// Reinterpret the data under a new shape of equal length.
    Reshape { shape: Vec<usize> },
}

impl PrimitiveKind {
    pub fn name(&self) -> &'static str {
        match self {
            PrimitiveKind::MatMul => "matmul",
            PrimitiveKind::Add => "add",
            PrimitiveKind::Sub => "sub",
            PrimitiveKind::Mul => "mul",
            PrimitiveKind::Scale(_) => "scale",
            PrimitiveKind::AddScalar(_) => "add_scalar",
            PrimitiveKind::Sigmoid => "sigmoid",
            PrimitiveKind::Tanh => "tanh",
            PrimitiveKind::Square => "square",
            PrimitiveKind::Sqrt => "sqrt",
            PrimitiveKind::Abs => "abs",
            PrimitiveKind::Ln => "ln",
            PrimitiveKind::ConcatLast => "concat_last",
            PrimitiveKind::Slice { .. } => "slice",
            PrimitiveKind::ReduceSum { .. } => "reduce_sum",
            PrimitiveKind::ReduceMean { .. } => "reduce_mean",
            PrimitiveKind::Broadcast { .. } => "broadcast",
            PrimitiveKind::Reshape { .. } => "reshape",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            PrimitiveKind::MatMul
            | PrimitiveKind::Add
            | PrimitiveKind::Sub
            | PrimitiveKind::Mul
            | PrimitiveKind::ConcatLast => 2,
            _ => 1,
        }
    }
}

// ── raw kernels ─────────────────────────────────────────────────────────

/// `out += a (m,k) · b (k,n)`.
fn mm_nn(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64]) {
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let orow = &mut out[i * n..(i + 1) * n];
        for (p, &aip) in arow.iter().enumerate() {
            let brow = &b[p * n..(p + 1) * n];
            for (o, &bv) in orow.iter_mut().zip(brow.iter()) {
                *o += aip * bv;
            }
        }
    }
}

/// `out (m,k) += a (m,n) · b (k,n)ᵀ` — rows of `a` dotted with rows of `b`.
fn mm_nt(a: &[f64], b: &[f64], m: usize, n: usize, k: usize, out: &mut [f64]) {
    for i in 0..m {
        let arow = &a[i * n..(i + 1) * n];
        let orow = &mut out[i * k..(i + 1) * k];
        for p in 0..k {
            let brow = &b[p * n..(p + 1) * n];
            let mut s = 0.0;
            for (av, bv) in arow.iter().zip(brow.iter()) {
                s += av * bv;
            }
            orow[p] += s;
        }
    }
}

/// `out (k,n) += a (m,k)ᵀ · b (m,n)`.
fn mm_tn(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64]) {
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let brow = &b[i * n..(i + 1) * n];
        for (p, &aip) in arow.iter().enumerate() {
            let orow = &mut out[p * n..(p + 1) * n];
            for (o, &bv) in orow.iter_mut().zip(brow.iter()) {
                *o += aip * bv;
            }
        }
    }
}

// ── axis bookkeeping for reductions and slices ──────────────────────────

fn normalize_axes(axes: &[usize], rank: usize, kind: &str) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = if axes.is_empty() {
        (0..rank).collect()
    } else {
        axes.to_vec()
    };
    out.sort_unstable();
    out.dedup();
    if let Some(&bad) = out.iter().find(|&&a| a >= rank) {
        return Err(Error::domain(
            kind,
            format!("axis {bad} out of range for rank {rank}"),
        ));
    }
    Ok(out)
}

fn reduce_out_shape(shape: &[usize], axes: &[usize]) -> Vec<usize> {
    let kept: Vec<usize> = shape
        .iter()
        .enumerate()
        .filter(|(d, _)| !axes.contains(d))
        .map(|(_, &e)| e)
        .collect();
    if kept.is_empty() {
        vec![1]
    } else {
        kept
    }
}

/// Calls `f(in_index, out_index)` for every position of `shape`, where
/// `out_index` is the flat index after dropping the `axes` dimensions.
fn for_each_reduce_map(shape: &[usize], axes: &[usize], mut f: impl FnMut(usize, usize)) {
    let rank = shape.len();
    let mut kept_stride = vec![0usize; rank];
    let mut stride = 1usize;
    for d in (0..rank).rev() {
        if !axes.contains(&d) {
            kept_stride[d] = stride;
            stride *= shape[d];
        }
    }
    let total: usize = shape.iter().product();
    let mut coords = vec![0usize; rank];
    let mut out_idx = 0usize;
    for in_idx in 0..total {
        f(in_idx, out_idx);
        // odometer increment
        for d in (0..rank).rev() {
            coords[d] += 1;
            out_idx += kept_stride[d];
            if coords[d] < shape[d] {
                break;
            }
            out_idx -= kept_stride[d] * shape[d];
            coords[d] = 0;
        }
    }
}

/// Calls `f(out_index, in_index)` for every position of the slice output.
fn for_each_slice_map(
    in_shape: &[usize],
    axis: usize,
    start: usize,
    out_shape: &[usize],
    mut f: impl FnMut(usize, usize),
) {
    let rank = in_shape.len();
    let mut in_stride = vec![1usize; rank];
    for d in (0..rank - 1).rev() {
        in_stride[d] = in_stride[d + 1] * in_shape[d + 1];
    }
    let total: usize = out_shape.iter().product();
    let mut coords = vec![0usize; rank];
    let mut in_idx = start * in_stride[axis];
    for out_idx in 0..total {
        f(out_idx, in_idx);
        for d in (0..rank).rev() {
            coords[d] += 1;
            in_idx += in_stride[d];
            if coords[d] < out_shape[d] {
                break;
            }
            in_idx -= in_stride[d] * out_shape[d];
            coords[d] = 0;
        }
    }
}

fn check_same_shape(kind: &str, a: &Tensor, b: &Tensor) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(kind, a.shape(), b.shape()));
    }
    Ok(())
}

fn unary_map(input: &Tensor, f: impl Fn(f64) -> f64) -> Tensor {
    Tensor::from_fn(input.shape(), |i| f(input.data()[i]))
}

/// Applies one primitive to concrete tensors, without recording anything.
///
/// This is the single forward implementation; [`Graph::apply`] wraps it and
/// records the application on the tape.
pub fn forward_primitive(kind: &PrimitiveKind, inputs: &[&Tensor]) -> Result<Tensor> {
    if inputs.len() != kind.arity() {
        return Err(Error::contract(format!(
            "{} expects {} inputs, got {}",
            kind.name(),
            kind.arity(),
            inputs.len()
        )));
    }
    match kind {
        PrimitiveKind::MatMul => {
            let (a, b) = (inputs[0], inputs[1]);
            if a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0] {
                return Err(Error::shape("matmul", a.shape(), b.shape()));
            }
            let (m, k, n) = (a.shape()[0], a.shape()[1], b.shape()[1]);
            let mut out = vec![0.0; m * n];
            mm_nn(a.data(), b.data(), m, k, n, &mut out);
            Tensor::new(vec![m, n], out)
        }
        PrimitiveKind::Add => {
            check_same_shape("add", inputs[0], inputs[1])?;
            Ok(Tensor::from_fn(inputs[0].shape(), |i| {
                inputs[0].data()[i] + inputs[1].data()[i]
            }))
        }
        PrimitiveKind::Sub => {
            check_same_shape("sub", inputs[0], inputs[1])?;
            Ok(Tensor::from_fn(inputs[0].shape(), |i| {
                inputs[0].data()[i] - inputs[1].data()[i]
            }))
        }
        PrimitiveKind::Mul => {
            check_same_shape("mul", inputs[0], inputs[1])?;
            Ok(Tensor::from_fn(inputs[0].shape(), |i| {
                inputs[0].data()[i] * inputs[1].data()[i]
            }))
        }
        PrimitiveKind::Scale(c) => Ok(unary_map(inputs[0], |v| c * v)),
        PrimitiveKind::AddScalar(c) => Ok(unary_map(inputs[0], |v| c + v)),
        PrimitiveKind::Sigmoid => Ok(unary_map(inputs[0], |v| 1.0 / (1.0 + (-v).exp()))),
        PrimitiveKind::Tanh => Ok(unary_map(inputs[0], f64::tanh)),
        PrimitiveKind::Square => Ok(unary_map(inputs[0], |v| v * v)),
        PrimitiveKind::Sqrt => {
            if inputs[0].data().iter().any(|&v| v < 0.0) {
                return Err(Error::domain("sqrt", "negative input"));
            }
            Ok(unary_map(inputs[0], f64::sqrt))
        }
        PrimitiveKind::Abs => Ok(unary_map(inputs[0], f64::abs)),
        PrimitiveKind::Ln => {
            if inputs[0].data().iter().any(|&v| v <= 0.0) {
                return Err(Error::domain("ln", "non-positive input"));
            }
            Ok(unary_map(inputs[0], f64::ln))
        }
        PrimitiveKind::ConcatLast => {
            let (a, b) = (inputs[0], inputs[1]);
            let ra = a.rank();
            if ra != b.rank() || a.shape()[..ra - 1] != b.shape()[..ra - 1] {
                return Err(Error::shape("concat_last", a.shape(), b.shape()));
            }
            let (la, lb) = (a.shape()[ra - 1], b.shape()[ra - 1]);
            let rows: usize = a.shape()[..ra - 1].iter().product();
            let mut out = Vec::with_capacity(rows * (la + lb));
            for r in 0..rows {
                out.extend_from_slice(&a.data()[r * la..(r + 1) * la]);
                out.extend_from_slice(&b.data()[r * lb..(r + 1) * lb]);
            }
            let mut shape = a.shape().to_vec();
            shape[ra - 1] = la + lb;
            Tensor::new(shape, out)
        }
        PrimitiveKind::Slice { axis, start, len } => {
            let input = inputs[0];
            if *axis >= input.rank() {
                return Err(Error::domain(
                    "slice",
                    format!("axis {axis} out of range for rank {}", input.rank()),
                ));
            }
            if *len == 0 || start + len > input.shape()[*axis] {
                return Err(Error::domain(
                    "slice",
                    format!(
                        "range {}..{} out of bounds for extent {}",
                        start,
                        start + len,
                        input.shape()[*axis]
                    ),
                ));
            }
            let mut out_shape = input.shape().to_vec();
            out_shape[*axis] = *len;
            let mut out = vec![0.0; out_shape.iter().product()];
            for_each_slice_map(input.shape(), *axis, *start, &out_shape, |o, i| {
                out[o] = input.data()[i];
            });
            Tensor::new(out_shape, out)
        }
        PrimitiveKind::ReduceSum { axes } | PrimitiveKind::ReduceMean { axes } => {
            let input = inputs[0];
            let axes = normalize_axes(axes, input.rank(), kind.name())?;
            let out_shape = reduce_out_shape(input.shape(), &axes);
            let mut out = vec![0.0; out_shape.iter().product()];
            for_each_reduce_map(input.shape(), &axes, |i, o| {
                out[o] += input.data()[i];
            });
            if matches!(kind, PrimitiveKind::ReduceMean { .. }) {
                let count: usize = axes.iter().map(|&d| input.shape()[d]).product();
                let inv = 1.0 / count as f64;
                for v in &mut out {
                    *v *= inv;
                }
            }
            Tensor::new(out_shape, out)
        }
        PrimitiveKind::Broadcast { rows } => {
            let input = inputs[0];
            if input.rank() != 1 {
                return Err(Error::shape("broadcast", input.shape(), &[*rows]));
            }
            let d = input.shape()[0];
            let mut out = Vec::with_capacity(rows * d);
            for _ in 0..*rows {
                out.extend_from_slice(input.data());
            }
            Tensor::new(vec![*rows, d], out)
        }
        PrimitiveKind::Reshape { shape } => {
            let input = inputs[0];
            let expected: usize = shape.iter().product();
            if expected != input.len() || shape.iter().any(|&d| d == 0) {
                return Err(Error::shape("reshape", input.shape(), shape));
            }
            Tensor::new(shape.clone(), input.data().to_vec())
        }
    }
}

// ── the tape ────────────────────────────────────────────────────────────

/// Handle to a node in a [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

enum NodeOp {
    Leaf,
    Prim(PrimitiveKind),
}

struct Node {
    op: NodeOp,
    inputs: Vec<usize>,
    value: Tensor,
    requires_grad: bool,
}

/// Topologically ordered record of primitive applications.
#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
}

impl Graph {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    /// Leaf that does not collect gradients.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(NodeOp::Leaf, vec![], value, false)
    }

    /// Leaf that collects gradients during [`Graph::backward`].
    pub fn param(&mut self, value: Tensor) -> Var {
        self.push(NodeOp::Leaf, vec![], value, true)
    }

    fn push(&mut self, op: NodeOp, inputs: Vec<usize>, value: Tensor, requires: bool) -> Var {
        self.nodes.push(Node {
            op,
            inputs,
            value,
            requires_grad: requires,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies a primitive to existing nodes and records it on the tape.
    pub fn apply(&mut self, kind: PrimitiveKind, inputs: &[Var]) -> Result<Var> {
        let tensors: Vec<&Tensor> = inputs.iter().map(|v| &self.nodes[v.0].value).collect();
        let value = forward_primitive(&kind, &tensors)?;
        let requires = inputs.iter().any(|v| self.nodes[v.0].requires_grad);
        let idx: Vec<usize> = inputs.iter().map(|v| v.0).collect();
        Ok(self.push(NodeOp::Prim(kind), idx, value, requires))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.apply(PrimitiveKind::MatMul, &[a, b])
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Add, &[a, b])
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Sub, &[a, b])
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Mul, &[a, b])
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Result<Var> {
        self.apply(PrimitiveKind::Scale(c), &[a])
    }

    pub fn add_scalar(&mut self, a: Var, c: f64) -> Result<Var> {
        self.apply(PrimitiveKind::AddScalar(c), &[a])
    }

    pub fn sigmoid(&mut self, a: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Sigmoid, &[a])
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Tanh, &[a])
    }

    pub fn square(&mut self, a: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Square, &[a])
    }

    pub fn sqrt(&mut self, a: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Sqrt, &[a])
    }

    pub fn abs(&mut self, a: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Abs, &[a])
    }

    pub fn ln(&mut self, a: Var) -> Result<Var> {
        self.apply(PrimitiveKind::Ln, &[a])
    }

    pub fn concat_last(&mut self, a: Var, b: Var) -> Result<Var> {
        self.apply(PrimitiveKind::ConcatLast, &[a, b])
    }

    pub fn slice(&mut self, a: Var, axis: usize, start: usize, len: usize) -> Result<Var> {
        self.apply(PrimitiveKind::Slice { axis, start, len }, &[a])
    }

    pub fn reduce_sum(&mut self, a: Var, axes: &[usize]) -> Result<Var> {
        self.apply(PrimitiveKind::ReduceSum { axes: axes.to_vec() }, &[a])
    }

    pub fn reduce_mean(&mut self, a: Var, axes: &[usize]) -> Result<Var> {
        self.apply(PrimitiveKind::ReduceMean { axes: axes.to_vec() }, &[a])
    }

    /// Sum of every element, as a scalar node.
    pub fn sum_all(&mut self, a: Var) -> Result<Var> {
        self.reduce_sum(a, &[])
    }

    /// Mean of every element, as a scalar node.
    pub fn mean_all(&mut self, a: Var) -> Result<Var> {
        self.reduce_mean(a, &[])
    }

    pub fn broadcast(&mut self, a: Var, rows: usize) -> Result<Var> {
        self.apply(PrimitiveKind::Broadcast { rows }, &[a])
    }

    pub fn reshape(&mut self, a: Var, shape: &[usize]) -> Result<Var> {
        self.apply(
            PrimitiveKind::Reshape {
                shape: shape.to_vec(),
            },
            &[a],
        )
    }

    /// Reverse pass from a scalar loss node. Returns the gradient of the
    /// loss with respect to every node that requires gradients; leaves the
    /// loss does not depend on report zero gradients.
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        if !self.nodes[loss.0].value.is_scalar() {
            return Err(Error::contract(format!(
                "backward requires a scalar loss, got shape {:?}",
                self.nodes[loss.0].value.shape()
            )));
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(vec![1.0]);

        for i in (0..=loss.0).rev() {
            if grads[i].is_none() || !self.nodes[i].requires_grad {
                continue;
            }
            let node = &self.nodes[i];
            let kind = match &node.op {
                NodeOp::Leaf => continue,
                NodeOp::Prim(kind) => kind,
            };
            let out_grad = grads[i].take().expect("grad present");
            self.propagate(kind, node, &out_grad, &mut grads);
            grads[i] = Some(out_grad);
        }

        let slots = grads
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.map(|data| (self.nodes[i].value.shape().to_vec(), data)))
            .collect();
        Ok(Gradients { slots })
    }

    fn propagate(
        &self,
        kind: &PrimitiveKind,
        node: &Node,
        out_grad: &[f64],
        grads: &mut [Option<Vec<f64>>],
    ) {
        let input = |k: usize| &self.nodes[node.inputs[k]].value;
        let wants = |k: usize| self.nodes[node.inputs[k]].requires_grad;
        macro_rules! sink {
            ($k:expr) => {
                grads[node.inputs[$k]].get_or_insert_with(|| vec![0.0; input($k).len()])
            };
        }

        match kind {
            PrimitiveKind::MatMul => {
                let (a, b) = (input(0), input(1));
                let (m, k, n) = (a.shape()[0], a.shape()[1], b.shape()[1]);
                if wants(0) {
                    mm_nt(out_grad, b.data(), m, n, k, sink!(0));
                }
                if wants(1) {
                    mm_tn(a.data(), out_grad, m, k, n, sink!(1));
                }
            }
            PrimitiveKind::Add => {
                for k in 0..2 {
                    if wants(k) {
                        for (g, &og) in sink!(k).iter_mut().zip(out_grad) {
                            *g += og;
                        }
                    }
                }
            }
            PrimitiveKind::Sub => {
                if wants(0) {
                    for (g, &og) in sink!(0).iter_mut().zip(out_grad) {
                        *g += og;
                    }
                }
                if wants(1) {
                    for (g, &og) in sink!(1).iter_mut().zip(out_grad) {
                        *g -= og;
                    }
                }
            }
            PrimitiveKind::Mul => {
                if wants(0) {
                    let b = input(1).data();
                    for ((g, &og), &bv) in sink!(0).iter_mut().zip(out_grad).zip(b) {
                        *g += og * bv;
                    }
                }
                if wants(1) {
                    let a = input(0).data();
                    for ((g, &og), &av) in sink!(1).iter_mut().zip(out_grad).zip(a) {
                        *g += og * av;
                    }
                }
            }
            PrimitiveKind::Scale(c) => {
                if wants(0) {
                    for (g, &og) in sink!(0).iter_mut().zip(out_grad) {
                        *g += c * og;
                    }
                }
            }
            PrimitiveKind::AddScalar(_) | PrimitiveKind::Reshape { .. } => {
                if wants(0) {
                    for (g, &og) in sink!(0).iter_mut().zip(out_grad) {
                        *g += og;
                    }
                }
            }
            PrimitiveKind::Sigmoid => {
                if wants(0) {
                    let y = node.value.data();
                    for ((g, &og), &yv) in sink!(0).iter_mut().zip(out_grad).zip(y) {
                        *g += og * yv * (1.0 - yv);
                    }
                }
            }
            PrimitiveKind::Tanh => {
                if wants(0) {
                    let y = node.value.data();
                    for ((g, &og), &yv) in sink!(0).iter_mut().zip(out_grad).zip(y) {
                        *g += og * (1.0 - yv * yv);
                    }
                }
            }
            PrimitiveKind::Square => {
                if wants(0) {
                    let x = input(0).data();
                    for ((g, &og), &xv) in sink!(0).iter_mut().zip(out_grad).zip(x) {
                        *g += og * 2.0 * xv;
                    }
                }
            }
            PrimitiveKind::Sqrt => {
                if wants(0) {
                    let y = node.value.data();
                    for ((g, &og), &yv) in sink!(0).iter_mut().zip(out_grad).zip(y) {
                        *g += og / (2.0 * yv);
                    }
                }
            }
            PrimitiveKind::Abs => {
                if wants(0) {
                    let x = input(0).data();
                    for ((g, &og), &xv) in sink!(0).iter_mut().zip(out_grad).zip(x) {
                        *g += og * if xv > 0.0 {
                            1.0
                        } else if xv < 0.0 {
                            -1.0
                        } else {
                            0.0
                        };
                    }
                }
            }
            PrimitiveKind::Ln => {
                if wants(0) {
                    let x = input(0).data();
                    for ((g, &og), &xv) in sink!(0).iter_mut().zip(out_grad).zip(x) {
                        *g += og / xv;
                    }
                }
            }
            PrimitiveKind::ConcatLast => {
                let ra = input(0).rank();
                let (la, lb) = (input(0).shape()[ra - 1], input(1).shape()[ra - 1]);
                let rows: usize = input(0).shape()[..ra - 1].iter().product();
                if wants(0) {
                    let sink = sink!(0);
                    for r in 0..rows {
                        let src = &out_grad[r * (la + lb)..r * (la + lb) + la];
                        for (g, &og) in sink[r * la..(r + 1) * la].iter_mut().zip(src) {
                            *g += og;
                        }
                    }
                }
                if wants(1) {
                    let sink = sink!(1);
                    for r in 0..rows {
                        let src = &out_grad[r * (la + lb) + la..(r + 1) * (la + lb)];
                        for (g, &og) in sink[r * lb..(r + 1) * lb].iter_mut().zip(src) {
                            *g += og;
                        }
                    }
                }
            }
            PrimitiveKind::Slice { axis, start, .. } => {
                if wants(0) {
                    let sink = sink!(0);
                    for_each_slice_map(
                        input(0).shape(),
                        *axis,
                        *start,
                        node.value.shape(),
                        |o, i| sink[i] += out_grad[o],
                    );
                }
            }
            PrimitiveKind::ReduceSum { axes } => {
                if wants(0) {
                    let norm =
                        normalize_axes(axes, input(0).rank(), "reduce_sum").expect("validated");
                    let sink = sink!(0);
                    for_each_reduce_map(input(0).shape(), &norm, |i, o| {
                        sink[i] += out_grad[o];
                    });
                }
            }
            PrimitiveKind::ReduceMean { axes } => {
                if wants(0) {
                    let norm =
                        normalize_axes(axes, input(0).rank(), "reduce_mean").expect("validated");
                    let count: usize = norm.iter().map(|&d| input(0).shape()[d]).product();
                    let inv = 1.0 / count as f64;
                    let sink = sink!(0);
                    for_each_reduce_map(input(0).shape(), &norm, |i, o| {
                        sink[i] += out_grad[o] * inv;
                    });
                }
            }
            PrimitiveKind::Broadcast { rows } => {
                if wants(0) {
                    let d = input(0).len();
                    let sink = sink!(0);
                    for r in 0..*rows {
                        for (g, &og) in sink.iter_mut().zip(&out_grad[r * d..(r + 1) * d]) {
                            *g += og;
                        }
                    }
                }
            }
        }
    }
}

/// Result of [`Graph::backward`]: per-node gradients.
pub struct Gradients {
    slots: Vec<Option<(Vec<usize>, Vec<f64>)>>,
}

impl Gradients {
    pub fn get(&self, v: Var) -> Option<Tensor> {
        self.slots[v.index()]
            .as_ref()
            .map(|(shape, data)| Tensor::new(shape.clone(), data.clone()).expect("shape tracked"))
    }

    /// Gradient for a leaf, or an all-zero tensor of the given shape when the
    /// loss did not depend on it.
    pub fn get_or_zero(&self, v: Var, shape: &[usize]) -> Tensor {
        self.get(v).unwrap_or_else(|| Tensor::zeros(shape))
    }
}
