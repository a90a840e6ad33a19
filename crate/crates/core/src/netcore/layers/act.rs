use super::super::{ActivationKind, Real};

pub(crate) fn sigmoid<R: Real>(x: R) -> R {
    R::one() / (R::one() + (-x).exp())
}

pub(crate) fn apply<R: Real>(kind: ActivationKind, x: &[R], y: &mut [R]) {
    for (o, &v) in y.iter_mut().zip(x) {
        *o = match kind {
            ActivationKind::Relu => v.max(R::zero()),
            ActivationKind::Sigmoid => sigmoid(v),
            ActivationKind::Tanh => v.tanh(),
        };
    }
}

/// Input gradient expressed through the layer output `y`.
pub(crate) fn backward<R: Real>(kind: ActivationKind, y: &[R], upstream: &[R], gx: &mut [R]) {
    for ((d, &o), &g) in gx.iter_mut().zip(y).zip(upstream) {
        *d = match kind {
            ActivationKind::Relu => {
                if o > R::zero() {
                    g
                } else {
                    R::zero()
                }
            }
            ActivationKind::Sigmoid => g * o * (R::one() - o),
            ActivationKind::Tanh => g * (R::one() - o * o),
        };
    }
}

/// Row-wise softmax over the last dimension.
pub(crate) fn softmax<R: Real>(x: &[R], cols: usize, y: &mut [R]) {
    for (xr, yr) in x.chunks(cols).zip(y.chunks_mut(cols)) {
        let m = xr.iter().copied().fold(R::neg_infinity(), R::max);
        let mut total = R::zero();
        for (o, &v) in yr.iter_mut().zip(xr) {
            *o = (v - m).exp();
            total += *o;
        }
        for o in yr.iter_mut() {
            *o = *o / total;
        }
    }
}

pub(crate) fn softmax_backward<R: Real>(y: &[R], cols: usize, upstream: &[R], gx: &mut [R]) {
    for ((yr, gr), dr) in y.chunks(cols).zip(upstream.chunks(cols)).zip(gx.chunks_mut(cols)) {
        let dot: R = yr.iter().zip(gr).map(|(&a, &b)| a * b).sum();
        for ((d, &o), &g) in dr.iter_mut().zip(yr).zip(gr) {
            *d = o * (g - dot);
        }
    }
}
