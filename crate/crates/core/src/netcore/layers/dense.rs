use super::super::Real;
use super::dot;

/// `y[r] = W x[r] + b` for each of `rows` input rows; `W` is `(out, inp)`.
pub(crate) fn forward<R: Real>(input: &[R], rows: usize, inp: usize, out: usize, w: &[R], b: &[R], y: &mut [R]) {
    for r in 0..rows {
        let x = &input[r * inp..(r + 1) * inp];
        for o in 0..out {
            let row = &w[o * inp..(o + 1) * inp];
            y[r * out + o] = b[o] + dot(row, x);
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn backward<R: Real>(
    input: &[R],
    rows: usize,
    inp: usize,
    out: usize,
    w: &[R],
    upstream: &[R],
    gw: &mut [R],
    gb: &mut [R],
    gx: &mut [R],
) {
    gx.fill(R::zero());
    for r in 0..rows {
        let x = &input[r * inp..(r + 1) * inp];
        let dx = &mut gx[r * inp..(r + 1) * inp];
        for o in 0..out {
            let g = upstream[r * out + o];
            if g == R::zero() {
                continue;
            }
            gb[o] += g;
            for ((d, gwv), (&wv, &xv)) in dx
                .iter_mut()
                .zip(&mut gw[o * inp..(o + 1) * inp])
                .zip(w[o * inp..(o + 1) * inp].iter().zip(x))
            {
                *d += g * wv;
                *gwv += g * xv;
            }
        }
    }
}
