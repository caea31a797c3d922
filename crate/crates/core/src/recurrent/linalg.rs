//! Small dense kernels over row-major slices.

/// Dot product with four independent accumulators so the loop vectorizes.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for k in 0..4 {
            acc[k] += ca[k] * cb[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `out[r] += Σ_c m[r, c] · v[c]` for an `out.len() × v.len()` matrix.
///
/// Rows are processed four at a time so each load of `v` feeds four
/// accumulator sets; every row sums in the same order as [`dot`].
#[inline]
pub(crate) fn matvec_acc(out: &mut [f64], m: &[f64], v: &[f64]) {
    let cols = v.len();
    let body = cols - cols % 4;
    let mut r = 0;
    while r + 4 <= out.len() {
        let rows = [
            &m[r * cols..(r + 1) * cols],
            &m[(r + 1) * cols..(r + 2) * cols],
            &m[(r + 2) * cols..(r + 3) * cols],
            &m[(r + 3) * cols..(r + 4) * cols],
        ];
        let mut acc = [[0.0f64; 4]; 4];
        let mut c = 0;
        while c < body {
            let vc = &v[c..c + 4];
            for (a, row) in acc.iter_mut().zip(&rows) {
                let mc = &row[c..c + 4];
                for k in 0..4 {
                    a[k] += mc[k] * vc[k];
                }
            }
            c += 4;
        }
        for (j, (a, row)) in acc.iter().zip(&rows).enumerate() {
            let tail: f64 = row[body..].iter().zip(&v[body..]).map(|(x, y)| x * y).sum();
            out[r + j] += (a[0] + a[1]) + (a[2] + a[3]) + tail;
        }
        r += 4;
    }
    for (i, o) in out.iter_mut().enumerate().skip(r) {
        *o += dot(&m[i * cols..(i + 1) * cols], v);
    }
}

/// `y += a0·x0 + a1·x1 + a2·x2 + a3·x3`
#[inline]
fn axpy4(y: &mut [f64], a: [f64; 4], x: [&[f64]; 4]) {
    for (j, yj) in y.iter_mut().enumerate() {
        *yj += (a[0] * x[0][j] + a[1] * x[1][j]) + (a[2] * x[2][j] + a[3] * x[3][j]);
    }
}

/// `back += mᵀ · delta` for a `delta.len() × back.len()` matrix.
#[inline]
pub(crate) fn matvec_t_acc(back: &mut [f64], m: &[f64], delta: &[f64]) {
    let cols = back.len();
    let row = |r: usize| &m[r * cols..(r + 1) * cols];
    let mut r = 0;
    while r + 4 <= delta.len() {
        let d = [delta[r], delta[r + 1], delta[r + 2], delta[r + 3]];
        axpy4(back, d, [row(r), row(r + 1), row(r + 2), row(r + 3)]);
        r += 4;
    }
    for (i, &d) in delta.iter().enumerate().skip(r) {
        axpy(back, d, row(i));
    }
}

/// `grad_m += Σ_t outer(deltas[t], inputs[t])` with both sides stored
/// step-major. Each gradient row is finished before moving to the next.
pub(crate) fn outer_acc_steps(grad_m: &mut [f64], deltas: &[f64], inputs: &[f64], rows: usize, cols: usize) {
    let steps = deltas.len() / rows;
    debug_assert_eq!(inputs.len(), steps * cols);
    let input = |t: usize| &inputs[t * cols..(t + 1) * cols];
    for r in 0..rows {
        let row = &mut grad_m[r * cols..(r + 1) * cols];
        let d = |t: usize| deltas[t * rows + r];
        let mut t = 0;
        while t + 4 <= steps {
            axpy4(
                row,
                [d(t), d(t + 1), d(t + 2), d(t + 3)],
                [input(t), input(t + 1), input(t + 2), input(t + 3)],
            );
            t += 4;
        }
        for t in t..steps {
            axpy(row, d(t), input(t));
        }
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
