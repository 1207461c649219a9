//! Reverse-mode tape over vector-level operations.

use super::math;
use super::params::ParamSet;
use super::scalar::Real;
use super::tensor::Tensor;
use super::NnError;

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Val(u32);

impl Val {
    fn idx(self) -> usize {
        self.0 as usize
    }
}

const CE_FLOOR: f64 = 1e-12;

enum Op<T> {
    Param(usize),
    Const,
    Matmul(Val, Val),
    Add(Val, Val),
    AddN(Vec<Val>),
    Mul(Val, Val),
    ScalarMul(Val, T),
    Tanh(Val),
    Sigmoid(Val),
    Softmax(Val),
    Concat(Vec<Val>),
    Stack(Vec<Val>),
    Gather(Val, Vec<usize>),
    Row(Val, usize),
    Slice(Val, usize),
    MaxPoolRows(Val, Vec<usize>),
    CrossEntropy(Val, Tensor<T>),
    NormalizeFloor(Val, T),
    /// Fused LSTM activation: input pre-activations (4h) and previous cell
    /// (h); output `[h'; c']` (2h). Cache holds `[i, f, g, o, tanh(c')]`.
    LstmAct { gates: Val, prev_c: Val, cache: Vec<T> },
}

struct Node<T> {
    op: Op<T>,
    value: Tensor<T>,
    needs_grad: bool,
}

/// Append-only computation tape. Forward values materialize at insertion;
/// [`Graph::backward`] replays the tape once in reverse.
pub struct Graph<T: Real> {
    nodes: Vec<Node<T>>,
}

impl<T: Real> Default for Graph<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Graph<T> {
    pub fn new() -> Graph<T> {
        Graph { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Current tape position, for later [`Graph::truncate`].
    pub fn mark(&self) -> usize {
        self.nodes.len()
    }

    /// Drop every node appended after `mark`. Used by inference stepping:
    /// extract the state values you need, truncate, and reinsert them as
    /// constants on the next step, keeping memory bounded.
    pub fn truncate(&mut self, mark: usize) {
        self.nodes.truncate(mark);
    }

    pub fn value(&self, v: Val) -> &Tensor<T> {
        &self.nodes[v.idx()].value
    }

    fn push(&mut self, op: Op<T>, value: Tensor<T>, needs_grad: bool) -> Val {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { op, value, needs_grad });
        Val(id)
    }

    fn needs(&self, v: Val) -> bool {
        self.nodes[v.idx()].needs_grad
    }

    pub fn param(&mut self, params: &ParamSet<T>, pid: usize) -> Val {
        self.push(Op::Param(pid), params.get(pid).clone(), true)
    }

    pub fn constant(&mut self, t: Tensor<T>) -> Val {
        self.push(Op::Const, t, false)
    }

    pub fn zeros(&mut self, shape: &[usize]) -> Val {
        self.constant(Tensor::zeros(shape))
    }

    /// Matrix-vector, vector-matrix, or matrix-matrix product.
    pub fn matmul(&mut self, a: Val, b: Val) -> Val {
        let (ta, tb) = (self.value(a), self.value(b));
        let value = match (ta.rank(), tb.rank()) {
            (2, 1) => {
                assert_eq!(ta.cols(), tb.numel(), "matvec dims");
                let mut out = vec![T::ZERO; ta.rows()];
                math::matvec(&ta.data, ta.rows(), ta.cols(), &tb.data, &mut out);
                Tensor::vector(out)
            }
            (1, 2) => {
                assert_eq!(ta.numel(), tb.rows(), "vecmat dims");
                let mut out = vec![T::ZERO; tb.cols()];
                math::matvec_t_accum(&tb.data, tb.rows(), tb.cols(), &ta.data, &mut out);
                Tensor::vector(out)
            }
            (2, 2) => {
                assert_eq!(ta.cols(), tb.rows(), "matmat dims");
                let (r, k, c) = (ta.rows(), ta.cols(), tb.cols());
                let mut out = vec![T::ZERO; r * c];
                for i in 0..r {
                    for p in 0..k {
                        let av = ta.data[i * k + p];
                        if av == T::ZERO {
                            continue;
                        }
                        math::axpy(av, tb.row(p), &mut out[i * c..(i + 1) * c]);
                    }
                }
                Tensor::matrix(r, c, out)
            }
            other => panic!("matmul on ranks {other:?}"),
        };
        let ng = self.needs(a) || self.needs(b);
        self.push(Op::Matmul(a, b), value, ng)
    }

    pub fn add(&mut self, a: Val, b: Val) -> Val {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(ta.shape, tb.shape, "add shapes");
        let data = ta.data.iter().zip(tb.data.iter()).map(|(x, y)| *x + *y).collect();
        let value = Tensor { shape: ta.shape.clone(), data };
        let ng = self.needs(a) || self.needs(b);
        self.push(Op::Add(a, b), value, ng)
    }

    pub fn add_n(&mut self, vs: &[Val]) -> Val {
        assert!(!vs.is_empty(), "add_n of nothing");
        let mut value = self.value(vs[0]).clone();
        for v in &vs[1..] {
            let tv = self.value(*v);
            assert_eq!(tv.shape, value.shape, "add_n shapes");
            for (o, x) in value.data.iter_mut().zip(tv.data.iter()) {
                *o += *x;
            }
        }
        let ng = vs.iter().any(|v| self.needs(*v));
        self.push(Op::AddN(vs.to_vec()), value, ng)
    }

    pub fn mul(&mut self, a: Val, b: Val) -> Val {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(ta.shape, tb.shape, "mul shapes");
        let data = ta.data.iter().zip(tb.data.iter()).map(|(x, y)| *x * *y).collect();
        let value = Tensor { shape: ta.shape.clone(), data };
        let ng = self.needs(a) || self.needs(b);
        self.push(Op::Mul(a, b), value, ng)
    }

    pub fn scalar_mul(&mut self, a: Val, s: T) -> Val {
        let ta = self.value(a);
        let value =
            Tensor { shape: ta.shape.clone(), data: ta.data.iter().map(|x| *x * s).collect() };
        let ng = self.needs(a);
        self.push(Op::ScalarMul(a, s), value, ng)
    }

    pub fn tanh(&mut self, a: Val) -> Val {
        let ta = self.value(a);
        let value =
            Tensor { shape: ta.shape.clone(), data: ta.data.iter().map(|x| x.tanh()).collect() };
        let ng = self.needs(a);
        self.push(Op::Tanh(a), value, ng)
    }

    pub fn sigmoid(&mut self, a: Val) -> Val {
        let ta = self.value(a);
        let value = Tensor {
            shape: ta.shape.clone(),
            data: ta.data.iter().map(|x| math::sigmoid(*x)).collect(),
        };
        let ng = self.needs(a);
        self.push(Op::Sigmoid(a), value, ng)
    }

    pub fn softmax(&mut self, a: Val) -> Val {
        let ta = self.value(a);
        assert_eq!(ta.rank(), 1, "softmax takes a vector");
        let mut data = ta.data.clone();
        math::softmax_inplace(&mut data);
        let ng = self.needs(a);
        self.push(Op::Softmax(a), Tensor::vector(data), ng)
    }

    pub fn concat(&mut self, vs: &[Val]) -> Val {
        let mut data = Vec::new();
        for v in vs {
            let tv = self.value(*v);
            assert_eq!(tv.rank(), 1, "concat takes vectors");
            data.extend_from_slice(&tv.data);
        }
        let ng = vs.iter().any(|v| self.needs(*v));
        self.push(Op::Concat(vs.to_vec()), Tensor::vector(data), ng)
    }

    /// Stack n equal-length vectors into an (n x d) matrix.
    pub fn stack(&mut self, vs: &[Val]) -> Val {
        assert!(!vs.is_empty(), "stack of nothing");
        let d = self.value(vs[0]).numel();
        let mut data = Vec::with_capacity(vs.len() * d);
        for v in vs {
            let tv = self.value(*v);
            assert_eq!(tv.numel(), d, "stack widths");
            data.extend_from_slice(&tv.data);
        }
        let ng = vs.iter().any(|v| self.needs(*v));
        self.push(Op::Stack(vs.to_vec()), Tensor::matrix(vs.len(), d, data), ng)
    }

    /// Select rows of a matrix (embedding lookup for many indices).
    pub fn gather(&mut self, a: Val, rows: Vec<usize>) -> Val {
        let ta = self.value(a);
        assert_eq!(ta.rank(), 2, "gather from a matrix");
        let c = ta.cols();
        let mut data = Vec::with_capacity(rows.len() * c);
        for &r in &rows {
            data.extend_from_slice(ta.row(r));
        }
        let value = Tensor::matrix(rows.len(), c, data);
        let ng = self.needs(a);
        self.push(Op::Gather(a, rows), value, ng)
    }

    /// One row of a matrix as a vector (single embedding lookup).
    pub fn row(&mut self, a: Val, r: usize) -> Val {
        let ta = self.value(a);
        assert_eq!(ta.rank(), 2, "row of a matrix");
        let value = Tensor::vector(ta.row(r).to_vec());
        let ng = self.needs(a);
        self.push(Op::Row(a, r), value, ng)
    }

    pub fn slice(&mut self, a: Val, start: usize, len: usize) -> Val {
        let ta = self.value(a);
        assert_eq!(ta.rank(), 1, "slice of a vector");
        assert!(start + len <= ta.numel(), "slice bounds");
        let value = Tensor::vector(ta.data[start..start + len].to_vec());
        let ng = self.needs(a);
        self.push(Op::Slice(a, start), value, ng)
    }

    /// Column-wise max over the rows of a matrix; gradient routes to the
    /// first argmax row of each column.
    pub fn maxpool_rows(&mut self, a: Val) -> Val {
        let ta = self.value(a);
        assert_eq!(ta.rank(), 2, "maxpool over a matrix");
        let (r, c) = (ta.rows(), ta.cols());
        assert!(r > 0, "maxpool over an empty set");
        let mut out = ta.row(0).to_vec();
        let mut arg = vec![0usize; c];
        for i in 1..r {
            for (j, v) in ta.row(i).iter().enumerate() {
                if *v > out[j] {
                    out[j] = *v;
                    arg[j] = i;
                }
            }
        }
        let ng = self.needs(a);
        self.push(Op::MaxPoolRows(a, arg), Tensor::vector(out), ng)
    }

    /// Cross-entropy `-sum t_i ln(max(p_i, 1e-12))` of a probability vector
    /// against a fixed target distribution.
    pub fn cross_entropy(&mut self, p: Val, target: Tensor<T>) -> Val {
        let tp = self.value(p);
        assert_eq!(tp.shape, target.shape, "cross_entropy shapes");
        let floor = T::from_f64(CE_FLOOR);
        let mut loss = T::ZERO;
        for (pi, ti) in tp.data.iter().zip(target.data.iter()) {
            if *ti != T::ZERO {
                loss -= *ti * pi.maximum(floor).ln();
            }
        }
        let ng = self.needs(p);
        self.push(Op::CrossEntropy(p, target), Tensor::scalar(loss), ng)
    }

    /// Renormalize a nonnegative vector into a distribution after flooring
    /// every entry at `floor` (keeps elementwise weight products away from
    /// an all-zero division).
    pub fn normalize_floor(&mut self, a: Val, floor: f64) -> Val {
        let ta = self.value(a);
        assert_eq!(ta.rank(), 1, "normalize_floor takes a vector");
        let fl = T::from_f64(floor);
        let clamped: Vec<T> = ta.data.iter().map(|v| v.maximum(fl)).collect();
        let sum: T = clamped.iter().copied().sum();
        let value = Tensor::vector(clamped.iter().map(|v| *v / sum).collect());
        let ng = self.needs(a);
        self.push(Op::NormalizeFloor(a, fl), value, ng)
    }

    /// Cross-entropy against a one-hot target.
    pub fn cross_entropy_index(&mut self, p: Val, index: usize) -> Val {
        let n = self.value(p).numel();
        let mut t = Tensor::zeros(&[n]);
        t.data[index] = T::ONE;
        self.cross_entropy(p, t)
    }

    fn lstm_act(&mut self, gates: Val, prev_c: Val) -> Val {
        let tg = self.value(gates);
        let tc = self.value(prev_c);
        assert_eq!(tg.numel(), 4 * tc.numel(), "lstm gate width");
        let h = tc.numel();
        let mut cache = vec![T::ZERO; 5 * h];
        let mut out = vec![T::ZERO; 2 * h];
        for j in 0..h {
            let i = math::sigmoid(tg.data[j]);
            let f = math::sigmoid(tg.data[h + j]);
            let g = tg.data[2 * h + j].tanh();
            let o = math::sigmoid(tg.data[3 * h + j]);
            let c_new = f * tc.data[j] + i * g;
            let tanh_c = c_new.tanh();
            cache[j] = i;
            cache[h + j] = f;
            cache[2 * h + j] = g;
            cache[3 * h + j] = o;
            cache[4 * h + j] = tanh_c;
            out[j] = o * tanh_c;
            out[h + j] = c_new;
        }
        let ng = self.needs(gates) || self.needs(prev_c);
        self.push(Op::LstmAct { gates, prev_c, cache }, Tensor::vector(out), ng)
    }

    /// Reverse pass from a scalar loss; returns one gradient tensor per
    /// parameter in `params` (zeros for parameters the loss never touched).
    pub fn backward(&self, loss: Val, params: &ParamSet<T>) -> Vec<Tensor<T>> {
        assert_eq!(self.value(loss).numel(), 1, "backward needs a scalar loss");
        let mut grads: Vec<Option<Tensor<T>>> = vec![None; self.nodes.len()];
        grads[loss.idx()] = Some(Tensor::scalar(T::ONE));

        let mut out: Vec<Tensor<T>> =
            (0..params.len()).map(|i| Tensor::zeros(params.get(i).shape.as_slice())).collect();

        for idx in (0..=loss.idx()).rev() {
            if !self.nodes[idx].needs_grad {
                continue;
            }
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            // local helper: lazily materialize an input's grad slot
            macro_rules! slot {
                ($v:expr) => {{
                    let i = $v.idx();
                    if grads[i].is_none() {
                        grads[i] = Some(Tensor::zeros(self.nodes[i].value.shape.as_slice()));
                    }
                    grads[i].as_mut().unwrap()
                }};
            }
            match &node.op {
                Op::Const => {}
                Op::Param(pid) => {
                    for (o, x) in out[*pid].data.iter_mut().zip(g.data.iter()) {
                        *o += *x;
                    }
                }
                Op::Matmul(a, b) => {
                    let (ta, tb) = (&self.nodes[a.idx()].value, &self.nodes[b.idx()].value);
                    match (ta.rank(), tb.rank()) {
                        (2, 1) => {
                            if self.needs(*a) {
                                math::outer_accum(&g.data, &tb.data, &mut slot!(a).data);
                            }
                            if self.needs(*b) {
                                math::matvec_t_accum(
                                    &ta.data,
                                    ta.rows(),
                                    ta.cols(),
                                    &g.data,
                                    &mut slot!(b).data,
                                );
                            }
                        }
                        (1, 2) => {
                            if self.needs(*a) {
                                let mut dx = vec![T::ZERO; ta.numel()];
                                math::matvec(&tb.data, tb.rows(), tb.cols(), &g.data, &mut dx);
                                math::axpy(T::ONE, &dx, &mut slot!(a).data);
                            }
                            if self.needs(*b) {
                                math::outer_accum(&ta.data, &g.data, &mut slot!(b).data);
                            }
                        }
                        (2, 2) => {
                            let (r, k, c) = (ta.rows(), ta.cols(), tb.cols());
                            if self.needs(*a) {
                                let da = slot!(a);
                                for i in 0..r {
                                    for p in 0..k {
                                        da.data[i * k + p] +=
                                            math::dot(&g.data[i * c..(i + 1) * c], tb.row(p));
                                    }
                                }
                            }
                            if self.needs(*b) {
                                let db = slot!(b);
                                for i in 0..r {
                                    for p in 0..k {
                                        let av = ta.data[i * k + p];
                                        if av != T::ZERO {
                                            math::axpy(
                                                av,
                                                &g.data[i * c..(i + 1) * c],
                                                &mut db.data[p * c..(p + 1) * c],
                                            );
                                        }
                                    }
                                }
                            }
                        }
                        _ => unreachable!(),
                    }
                }
                Op::Add(a, b) => {
                    for v in [a, b] {
                        if self.needs(*v) {
                            math::axpy(T::ONE, &g.data, &mut slot!(v).data);
                        }
                    }
                }
                Op::AddN(vs) => {
                    for v in vs {
                        if self.needs(*v) {
                            math::axpy(T::ONE, &g.data, &mut slot!(v).data);
                        }
                    }
                }
                Op::Mul(a, b) => {
                    let (ta, tb) =
                        (&self.nodes[a.idx()].value.data, &self.nodes[b.idx()].value.data);
                    if self.needs(*a) {
                        let da = slot!(a);
                        for i in 0..g.data.len() {
                            da.data[i] += g.data[i] * tb[i];
                        }
                    }
                    if self.needs(*b) {
                        let db = slot!(b);
                        for i in 0..g.data.len() {
                            db.data[i] += g.data[i] * ta[i];
                        }
                    }
                }
                Op::ScalarMul(a, s) => {
                    if self.needs(*a) {
                        math::axpy(*s, &g.data, &mut slot!(a).data);
                    }
                }
                Op::Tanh(a) => {
                    if self.needs(*a) {
                        let y = &node.value.data;
                        let da = slot!(a);
                        for i in 0..g.data.len() {
                            da.data[i] += g.data[i] * (T::ONE - y[i] * y[i]);
                        }
                    }
                }
                Op::Sigmoid(a) => {
                    if self.needs(*a) {
                        let y = &node.value.data;
                        let da = slot!(a);
                        for i in 0..g.data.len() {
                            da.data[i] += g.data[i] * y[i] * (T::ONE - y[i]);
                        }
                    }
                }
                Op::Softmax(a) => {
                    if self.needs(*a) {
                        let y = &node.value.data;
                        let inner = math::dot(&g.data, y);
                        let da = slot!(a);
                        for i in 0..g.data.len() {
                            da.data[i] += y[i] * (g.data[i] - inner);
                        }
                    }
                }
                Op::Concat(vs) => {
                    let mut off = 0;
                    for v in vs {
                        let n = self.nodes[v.idx()].value.numel();
                        if self.needs(*v) {
                            math::axpy(T::ONE, &g.data[off..off + n], &mut slot!(v).data);
                        }
                        off += n;
                    }
                }
                Op::Stack(vs) => {
                    let d = self.nodes[vs[0].idx()].value.numel();
                    for (i, v) in vs.iter().enumerate() {
                        if self.needs(*v) {
                            math::axpy(T::ONE, &g.data[i * d..(i + 1) * d], &mut slot!(v).data);
                        }
                    }
                }
                Op::Gather(a, rows) => {
                    if self.needs(*a) {
                        let c = self.nodes[a.idx()].value.cols();
                        let da = slot!(a);
                        for (i, &r) in rows.iter().enumerate() {
                            math::axpy(
                                T::ONE,
                                &g.data[i * c..(i + 1) * c],
                                &mut da.data[r * c..(r + 1) * c],
                            );
                        }
                    }
                }
                Op::Row(a, r) => {
                    if self.needs(*a) {
                        let c = self.nodes[a.idx()].value.cols();
                        let da = slot!(a);
                        math::axpy(T::ONE, &g.data, &mut da.data[r * c..(r + 1) * c]);
                    }
                }
                Op::Slice(a, start) => {
                    if self.needs(*a) {
                        let da = slot!(a);
                        math::axpy(T::ONE, &g.data, &mut da.data[*start..*start + g.data.len()]);
                    }
                }
                Op::MaxPoolRows(a, arg) => {
                    if self.needs(*a) {
                        let c = g.data.len();
                        let da = slot!(a);
                        for (j, &r) in arg.iter().enumerate() {
                            da.data[r * c + j] += g.data[j];
                        }
                    }
                }
                Op::NormalizeFloor(a, floor) => {
                    if self.needs(*a) {
                        let va = &self.nodes[a.idx()].value.data;
                        let y = &node.value.data;
                        let mut sum = T::ZERO;
                        for v in va.iter() {
                            sum += v.maximum(*floor);
                        }
                        let inner = math::dot(&g.data, y);
                        let da = slot!(a);
                        for i in 0..va.len() {
                            if va[i] > *floor {
                                da.data[i] += (g.data[i] - inner) / sum;
                            }
                        }
                    }
                }
                Op::CrossEntropy(p, target) => {
                    if self.needs(*p) {
                        let gs = g.data[0];
                        let floor = T::from_f64(CE_FLOOR);
                        let pv = &self.nodes[p.idx()].value.data;
                        let dp = slot!(p);
                        for i in 0..pv.len() {
                            if target.data[i] != T::ZERO {
                                dp.data[i] -= gs * target.data[i] / pv[i].maximum(floor);
                            }
                        }
                    }
                }
                Op::LstmAct { gates, prev_c, cache } => {
                    let h = cache.len() / 5;
                    let c_in = &self.nodes[prev_c.idx()].value.data;
                    let mut dgates = vec![T::ZERO; 4 * h];
                    let mut dc_in = vec![T::ZERO; h];
                    for j in 0..h {
                        let (i_g, f_g, g_g, o_g, tanh_c) = (
                            cache[j],
                            cache[h + j],
                            cache[2 * h + j],
                            cache[3 * h + j],
                            cache[4 * h + j],
                        );
                        let gh = g.data[j];
                        let gc_out = g.data[h + j];
                        let dc = gc_out + gh * o_g * (T::ONE - tanh_c * tanh_c);
                        let d_o = gh * tanh_c;
                        dgates[j] = dc * g_g * i_g * (T::ONE - i_g);
                        dgates[h + j] = dc * c_in[j] * f_g * (T::ONE - f_g);
                        dgates[2 * h + j] = dc * i_g * (T::ONE - g_g * g_g);
                        dgates[3 * h + j] = d_o * o_g * (T::ONE - o_g);
                        dc_in[j] = dc * f_g;
                    }
                    if self.needs(*gates) {
                        math::axpy(T::ONE, &dgates, &mut slot!(gates).data);
                    }
                    if self.needs(*prev_c) {
                        math::axpy(T::ONE, &dc_in, &mut slot!(prev_c).data);
                    }
                }
            }
        }
        out
    }
}

/// One LSTM direction: fused weight matrix (4h x (in + h)) and bias (4h),
/// gate order `[input, forget, cell, output]`.
#[derive(Debug, Clone, Copy)]
pub struct LstmCell {
    pub w: Val,
    pub b: Val,
    pub hidden: usize,
}

/// Single LSTM step: returns `(h', c')`.
pub fn lstm_step<T: Real>(g: &mut Graph<T>, cell: &LstmCell, x: Val, h: Val, c: Val) -> (Val, Val) {
    let z = g.concat(&[x, h]);
    let lin = g.matmul(cell.w, z);
    let pre = g.add(lin, cell.b);
    let hc = g.lstm_act(pre, c);
    (g.slice(hc, 0, cell.hidden), g.slice(hc, cell.hidden, cell.hidden))
}

/// Run stacked bi-directional LSTM layers over a sequence; each position's
/// output is the concatenation of the forward and backward hidden states of
/// the last layer.
pub fn bilstm_encode<T: Real>(
    g: &mut Graph<T>,
    layers: &[(LstmCell, LstmCell)],
    seq: &[Val],
) -> Vec<Val> {
    let mut inputs: Vec<Val> = seq.to_vec();
    for (fwd, bwd) in layers {
        let mut fwd_states = Vec::with_capacity(inputs.len());
        let (mut h, mut c) = (g.zeros(&[fwd.hidden]), g.zeros(&[fwd.hidden]));
        for x in &inputs {
            let (h2, c2) = lstm_step(g, fwd, *x, h, c);
            h = h2;
            c = c2;
            fwd_states.push(h);
        }
        let mut bwd_states = vec![fwd_states[0]; inputs.len()];
        let (mut h, mut c) = (g.zeros(&[bwd.hidden]), g.zeros(&[bwd.hidden]));
        for (t, x) in inputs.iter().enumerate().rev() {
            let (h2, c2) = lstm_step(g, bwd, *x, h, c);
            h = h2;
            c = c2;
            bwd_states[t] = h;
        }
        inputs = fwd_states
            .iter()
            .zip(bwd_states.iter())
            .map(|(f, b)| g.concat(&[*f, *b]))
            .collect();
    }
    inputs
}

/// Bilinear attention: weights are the softmax of `keysᵀ (W q)`, the context
/// is the weight-averaged value rows.
pub fn attention<T: Real>(
    g: &mut Graph<T>,
    w_att: Val,
    query: Val,
    keys: Val,
    values: Val,
) -> Result<(Val, Val), NnError> {
    let n = g.value(keys).rows();
    if g.value(keys).rank() != 2 || n == 0 {
        return Err(NnError::EmptyKeySet);
    }
    if g.value(values).rows() != n {
        return Err(NnError::ShapeMismatch(format!(
            "{n} keys vs {} values",
            g.value(values).rows()
        )));
    }
    let projected = g.matmul(w_att, query);
    let scores = g.matmul(keys, projected);
    let weights = g.softmax(scores);
    let context = g.matmul(weights, values);
    Ok((context, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;

    fn params_with(values: &[(&str, &[usize], &[f64])]) -> ParamSet<f64> {
        let mut ps = ParamSet::new();
        for (name, shape, data) in values {
            ps.add_tensor(name, Tensor { shape: shape.to_vec(), data: data.to_vec() });
        }
        ps
    }

    #[test]
    fn gradient_of_quadratic_is_two_x() {
        let ps = params_with(&[("x", &[3], &[1.0, -2.0, 0.5])]);
        let mut g = Graph::new();
        let x = g.param(&ps, 0);
        let y = g.mul(x, x);
        let ones = g.constant(Tensor::vector(vec![1.0; 3]));
        let s = g.mul(y, ones);
        // reduce via cross-entropy-free path: dot with ones using matmul
        let ones_m = g.constant(Tensor::matrix(1, 3, vec![1.0; 3]));
        let total = g.matmul(ones_m, s);
        let grads = g.backward(total, &ps);
        assert_eq!(grads[0].data, vec![2.0, -4.0, 1.0]);
    }

    #[test]
    fn gradient_of_constant_path_is_zero() {
        let ps = params_with(&[("x", &[2], &[1.0, 2.0])]);
        let mut g = Graph::new();
        let _x = g.param(&ps, 0);
        let c = g.constant(Tensor::vector(vec![3.0, 4.0]));
        let ones_m = g.constant(Tensor::matrix(1, 2, vec![1.0; 2]));
        let total = g.matmul(ones_m, c);
        let grads = g.backward(total, &ps);
        assert_eq!(grads[0].data, vec![0.0, 0.0]);
    }

    #[test]
    fn zero_weights_and_state_give_zero_lstm_output() {
        let ps = params_with(&[
            ("w", &[8, 3], &[0.0; 24]),
            ("b", &[8], &[0.0; 8]),
        ]);
        let mut g = Graph::new();
        let w = g.param(&ps, 0);
        let b = g.param(&ps, 1);
        let cell = LstmCell { w, b, hidden: 2 };
        let x = g.constant(Tensor::vector(vec![0.3]));
        let h0 = g.zeros(&[2]);
        let c0 = g.zeros(&[2]);
        let (h1, _c1) = lstm_step(&mut g, &cell, x, h0, c0);
        assert_eq!(g.value(h1).data, vec![0.0, 0.0]);
    }

    #[test]
    fn single_position_bilstm_sees_the_input_from_both_sides() {
        let mut rng = Prng::seed_from(&[5]);
        let mut ps = ParamSet::new();
        let w_f = ps.add("w_f", &[8, 4], &mut rng, 0.5);
        let b_f = ps.add_zeros("b_f", &[8]);
        let w_b = ps.add("w_b", &[8, 4], &mut rng, 0.5);
        let b_b = ps.add_zeros("b_b", &[8]);
        let mut g = Graph::new();
        let cells = [(
            LstmCell { w: g.param(&ps, w_f), b: g.param(&ps, b_f), hidden: 2 },
            LstmCell { w: g.param(&ps, w_b), b: g.param(&ps, b_b), hidden: 2 },
        )];
        let x = g.constant(Tensor::vector(vec![0.7, -0.2]));
        let out = bilstm_encode(&mut g, &cells, &[x]);
        assert_eq!(out.len(), 1);
        assert_eq!(g.value(out[0]).numel(), 4);
    }

    #[test]
    fn attention_with_identical_keys_is_uniform_and_averages_values() {
        let ps = params_with(&[("w", &[2, 2], &[1.0, 0.0, 0.0, 1.0])]);
        let mut g = Graph::new();
        let w = g.param(&ps, 0);
        let q = g.constant(Tensor::vector(vec![0.3, -0.8]));
        let keys = g.constant(Tensor::matrix(3, 2, vec![0.5, 1.0, 0.5, 1.0, 0.5, 1.0]));
        let values = g.constant(Tensor::matrix(3, 2, vec![3.0, 0.0, 0.0, 3.0, 3.0, 3.0]));
        let (ctx, weights) = attention(&mut g, w, q, keys, values).unwrap();
        for wv in &g.value(weights).data {
            assert!((wv - 1.0 / 3.0).abs() < 1e-12);
        }
        for cv in &g.value(ctx).data {
            assert!((cv - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn attention_with_single_key_returns_that_value() {
        let ps = params_with(&[("w", &[2, 2], &[0.2, -0.1, 0.4, 0.9])]);
        let mut g = Graph::new();
        let w = g.param(&ps, 0);
        let q = g.constant(Tensor::vector(vec![1.0, 1.0]));
        let keys = g.constant(Tensor::matrix(1, 2, vec![0.5, 1.0]));
        let values = g.constant(Tensor::matrix(1, 2, vec![-7.0, 2.5]));
        let (ctx, weights) = attention(&mut g, w, q, keys, values).unwrap();
        assert_eq!(g.value(weights).data, vec![1.0]);
        assert_eq!(g.value(ctx).data, vec![-7.0, 2.5]);
    }

    #[test]
    fn attention_over_empty_keys_is_an_error() {
        let ps = params_with(&[("w", &[2, 2], &[1.0, 0.0, 0.0, 1.0])]);
        let mut g = Graph::new();
        let w = g.param(&ps, 0);
        let q = g.constant(Tensor::vector(vec![0.0, 0.0]));
        let keys = g.constant(Tensor::matrix(0, 2, vec![]));
        let values = g.constant(Tensor::matrix(0, 2, vec![]));
        assert_eq!(attention(&mut g, w, q, keys, values).unwrap_err(), NnError::EmptyKeySet);
    }

    #[test]
    fn maxpool_of_one_element_is_identity() {
        let mut g: Graph<f64> = Graph::new();
        let m = g.constant(Tensor::matrix(1, 3, vec![0.5, -1.0, 2.0]));
        let out = g.maxpool_rows(m);
        assert_eq!(g.value(out).data, vec![0.5, -1.0, 2.0]);
    }

    #[test]
    fn cross_entropy_of_confident_correct_prediction_approaches_zero() {
        let mut g: Graph<f64> = Graph::new();
        let p = g.constant(Tensor::vector(vec![1.0 - 2e-9, 1e-9, 1e-9]));
        let loss = g.cross_entropy_index(p, 0);
        assert!(g.value(loss).item() < 1e-8);
    }

    #[test]
    fn truncate_rewinds_the_tape() {
        let mut g: Graph<f64> = Graph::new();
        let a = g.constant(Tensor::vector(vec![1.0]));
        let mark = g.mark();
        let b = g.constant(Tensor::vector(vec![2.0]));
        let _ = g.add(a, b);
        assert_eq!(g.len(), 3);
        g.truncate(mark);
        assert_eq!(g.len(), 1);
    }
}
