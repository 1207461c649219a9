//! Slice-level kernels shared by forward and backward passes.

use super::scalar::Real;
use super::tensor::Tensor;

/// Eight independent accumulator lanes so the reduction vectorizes without
/// any reassociation by the compiler; summation order is fixed, results are
/// bit-reproducible.
#[inline]
fn dot_lanes<T: Real>(a: &[T], b: &[T]) -> T {
    const LANES: usize = 8;
    let mut acc = [T::ZERO; LANES];
    let chunks = a.len() / LANES;
    for i in 0..chunks {
        let (ra, rb) = (&a[i * LANES..(i + 1) * LANES], &b[i * LANES..(i + 1) * LANES]);
        for l in 0..LANES {
            acc[l] += ra[l] * rb[l];
        }
    }
    let mut tail = T::ZERO;
    for i in chunks * LANES..a.len() {
        tail += a[i] * b[i];
    }
    let s01 = acc[0] + acc[1];
    let s23 = acc[2] + acc[3];
    let s45 = acc[4] + acc[5];
    let s67 = acc[6] + acc[7];
    ((s01 + s23) + (s45 + s67)) + tail
}

/// out = M x, with M row-major (rows x cols).
pub fn matvec<T: Real>(m: &[T], rows: usize, cols: usize, x: &[T], out: &mut [T]) {
    debug_assert_eq!(m.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(out.len(), rows);
    for r in 0..rows {
        out[r] = dot_lanes(&m[r * cols..(r + 1) * cols], x);
    }
}

/// out += Mᵀ g (gradient of `matvec` w.r.t. x).
pub fn matvec_t_accum<T: Real>(m: &[T], rows: usize, cols: usize, g: &[T], out: &mut [T]) {
    debug_assert_eq!(g.len(), rows);
    debug_assert_eq!(out.len(), cols);
    for r in 0..rows {
        let gr = g[r];
        if gr == T::ZERO {
            continue;
        }
        let row = &m[r * cols..(r + 1) * cols];
        for (o, a) in out.iter_mut().zip(row.iter()) {
            *o += gr * *a;
        }
    }
}

/// out += g ⊗ x (gradient of `matvec` w.r.t. M).
pub fn outer_accum<T: Real>(g: &[T], x: &[T], out: &mut [T]) {
    debug_assert_eq!(out.len(), g.len() * x.len());
    for (r, gr) in g.iter().enumerate() {
        if *gr == T::ZERO {
            continue;
        }
        let row = &mut out[r * x.len()..(r + 1) * x.len()];
        for (o, b) in row.iter_mut().zip(x.iter()) {
            *o += *gr * *b;
        }
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    dot_lanes(a, b)
}

/// out += s * x.
pub fn axpy<T: Real>(s: T, x: &[T], out: &mut [T]) {
    debug_assert_eq!(x.len(), out.len());
    for (o, v) in out.iter_mut().zip(x.iter()) {
        *o += s * *v;
    }
}

pub fn sigmoid<T: Real>(x: T) -> T {
    T::ONE / (T::ONE + (-x).exp())
}

/// Numerically stable in-place softmax over a vector.
pub fn softmax_inplace<T: Real>(x: &mut [T]) {
    let mut max = x[0];
    for v in x.iter().skip(1) {
        max = max.maximum(*v);
    }
    let mut sum = T::ZERO;
    for v in x.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in x.iter_mut() {
        *v = *v / sum;
    }
}

/// Euclidean norm over a set of tensors, accumulated in f64.
pub fn global_norm<T: Real>(tensors: &[Tensor<T>]) -> f64 {
    let mut acc = 0.0f64;
    for t in tensors {
        for v in &t.data {
            let x = v.to_f64();
            acc += x * x;
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_small() {
        let m = [1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0]; // 2x3
        let x = [1.0, 0.0, -1.0];
        let mut out = [0.0; 2];
        matvec(&m, 2, 3, &x, &mut out);
        assert_eq!(out, [-2.0, -2.0]);
    }

    #[test]
    fn softmax_of_zeros_is_uniform() {
        let mut x = [0.0f64; 3];
        softmax_inplace(&mut x);
        for v in x {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_is_shift_invariant_and_normalized() {
        let mut a = [1.0f64, 2.0, 3.0];
        let mut b = [101.0f64, 102.0, 103.0];
        softmax_inplace(&mut a);
        softmax_inplace(&mut b);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
