//! Stacked bidirectional LSTM. Gate order within the `4H` pre-activation is
//! input, forget, cell, output. Parameters per layer and direction are
//! `wx (4H, F)`, `wh (4H, H)` and `b (4H)`, stored forward direction first.

use alloc::vec;
use alloc::vec::Vec;

use super::act::sigmoid;
use super::dot;
use super::super::gemm::{gemm, Mat};
use super::super::{Param, Real};

pub(crate) const PARAMS_PER_DIRECTION: usize = 3;

#[derive(Clone, Debug)]
struct DirCache<R> {
    /// Post-activation gates `(T, 4H)`.
    gates: Vec<R>,
    cells: Vec<R>,
    hidden: Vec<R>,
}

#[derive(Clone, Debug)]
struct LayerCache<R> {
    input: Vec<R>,
    features: usize,
    dirs: [DirCache<R>; 2],
}

#[derive(Clone, Debug)]
pub(crate) struct LstmCache<R> {
    layers: Vec<LayerCache<R>>,
}

fn step_order(steps: usize, reverse: bool, k: usize) -> usize {
    if reverse {
        steps - 1 - k
    } else {
        k
    }
}

fn matvec_acc<R: Real>(m: &[R], cols: usize, x: &[R], out: &mut [R]) {
    for (o, row) in out.iter_mut().zip(m.chunks(cols)) {
        *o += dot(row, x);
    }
}

fn run_direction<R: Real>(x: &[R], steps: usize, feat: usize, hid: usize, p: &[Param<R>], reverse: bool) -> DirCache<R> {
    let (wx, wh, b) = (&p[0].value, &p[1].value, &p[2].value);
    // Input projections for every step at once: (T, F) x (F, 4H).
    let mut gates = vec![R::zero(); steps * 4 * hid];
    gemm(Mat::new(x, steps, feat), Mat::new(wx, 4 * hid, feat).t(), &mut gates, false);
    let mut cells = vec![R::zero(); steps * hid];
    let mut hidden = vec![R::zero(); steps * hid];
    let mut h_prev = vec![R::zero(); hid];
    let mut c_prev = vec![R::zero(); hid];
    for k in 0..steps {
        let t = step_order(steps, reverse, k);
        let z = &mut gates[t * 4 * hid..(t + 1) * 4 * hid];
        for (zv, &bv) in z.iter_mut().zip(b) {
            *zv += bv;
        }
        if k > 0 {
            matvec_acc(wh, hid, &h_prev, z);
        }
        for j in 0..hid {
            let i = sigmoid(z[j]);
            let f = sigmoid(z[hid + j]);
            let g = z[2 * hid + j].tanh();
            let o = sigmoid(z[3 * hid + j]);
            z[j] = i;
            z[hid + j] = f;
            z[2 * hid + j] = g;
            z[3 * hid + j] = o;
            let c = f * c_prev[j] + i * g;
            cells[t * hid + j] = c;
            hidden[t * hid + j] = o * c.tanh();
            c_prev[j] = c;
            h_prev[j] = hidden[t * hid + j];
        }
    }
    DirCache { gates, cells, hidden }
}

/// Runs the stack on a `(steps, features)` sequence; returns `(steps, 2H)`.
pub(crate) fn forward<R: Real>(
    input: &[R],
    steps: usize,
    features: usize,
    hid: usize,
    params: &[Param<R>],
) -> (Vec<R>, LstmCache<R>) {
    let num_layers = params.len() / (2 * PARAMS_PER_DIRECTION);
    let mut x = input.to_vec();
    let mut feat = features;
    let mut layers = Vec::with_capacity(num_layers);
    for l in 0..num_layers {
        let p = &params[l * 2 * PARAMS_PER_DIRECTION..(l + 1) * 2 * PARAMS_PER_DIRECTION];
        let fwd = run_direction(&x, steps, feat, hid, &p[..PARAMS_PER_DIRECTION], false);
        let bwd = run_direction(&x, steps, feat, hid, &p[PARAMS_PER_DIRECTION..], true);
        let mut out = Vec::with_capacity(steps * 2 * hid);
        for t in 0..steps {
            out.extend_from_slice(&fwd.hidden[t * hid..(t + 1) * hid]);
            out.extend_from_slice(&bwd.hidden[t * hid..(t + 1) * hid]);
        }
        layers.push(LayerCache {
            input: core::mem::replace(&mut x, out),
            features: feat,
            dirs: [fwd, bwd],
        });
        feat = 2 * hid;
    }
    (x, LstmCache { layers })
}

#[allow(clippy::too_many_arguments)]
fn backprop_direction<R: Real>(
    cache: &DirCache<R>,
    x: &[R],
    steps: usize,
    feat: usize,
    hid: usize,
    dh_out: &[R],
    p: &mut [Param<R>],
    reverse: bool,
    gx: &mut [R],
) {
    let mut dh_next = vec![R::zero(); hid];
    let mut dc_next = vec![R::zero(); hid];
    // Pre-activation gradients and the recurrent input seen at each step.
    let mut dz_all = vec![R::zero(); steps * 4 * hid];
    let mut h_prev_all = vec![R::zero(); steps * hid];
    let one = R::one();
    let wh = &p[1].value;
    for k in (0..steps).rev() {
        let t = step_order(steps, reverse, k);
        let prev = (k > 0).then(|| step_order(steps, reverse, k - 1));
        let gates = &cache.gates[t * 4 * hid..(t + 1) * 4 * hid];
        let dz = &mut dz_all[t * 4 * hid..(t + 1) * 4 * hid];
        for j in 0..hid {
            let (i, f, g, o) = (gates[j], gates[hid + j], gates[2 * hid + j], gates[3 * hid + j]);
            let c = cache.cells[t * hid + j];
            let c_prev = prev.map_or(R::zero(), |tp| cache.cells[tp * hid + j]);
            let dh = dh_out[t * hid + j] + dh_next[j];
            let tc = c.tanh();
            let d_o = dh * tc;
            let dc = dh * o * (one - tc * tc) + dc_next[j];
            dz[j] = dc * g * i * (one - i);
            dz[hid + j] = dc * c_prev * f * (one - f);
            dz[2 * hid + j] = dc * i * (one - g * g);
            dz[3 * hid + j] = d_o * o * (one - o);
            dc_next[j] = dc * f;
        }
        dh_next.fill(R::zero());
        if let Some(tp) = prev {
            h_prev_all[t * hid..(t + 1) * hid].copy_from_slice(&cache.hidden[tp * hid..(tp + 1) * hid]);
            // dh_next = Wh^T dz
            for (r, &d) in dz.iter().enumerate() {
                if d == R::zero() {
                    continue;
                }
                for (dn, &w) in dh_next.iter_mut().zip(&wh[r * hid..(r + 1) * hid]) {
                    *dn += d * w;
                }
            }
        }
    }
    let dz = Mat::new(&dz_all, steps, 4 * hid);
    gemm(dz.t(), Mat::new(x, steps, feat), &mut p[0].grad, true);
    gemm(dz.t(), Mat::new(&h_prev_all, steps, hid), &mut p[1].grad, true);
    for row in dz_all.chunks(4 * hid) {
        for (gb, &d) in p[2].grad.iter_mut().zip(row) {
            *gb += d;
        }
    }
    gemm(dz, Mat::new(&p[0].value, 4 * hid, feat), gx, true);
}

/// Accumulates parameter gradients; returns the gradient w.r.t. the stack input.
pub(crate) fn backward<R: Real>(
    cache: &LstmCache<R>,
    steps: usize,
    hid: usize,
    upstream: &[R],
    params: &mut [Param<R>],
) -> Vec<R> {
    let mut grad = upstream.to_vec();
    for (l, layer) in cache.layers.iter().enumerate().rev() {
        let mut dh_f = vec![R::zero(); steps * hid];
        let mut dh_b = vec![R::zero(); steps * hid];
        for t in 0..steps {
            dh_f[t * hid..(t + 1) * hid].copy_from_slice(&grad[t * 2 * hid..t * 2 * hid + hid]);
            dh_b[t * hid..(t + 1) * hid].copy_from_slice(&grad[t * 2 * hid + hid..(t + 1) * 2 * hid]);
        }
        let feat = layer.features;
        let mut gx = vec![R::zero(); steps * feat];
        let p = &mut params[l * 2 * PARAMS_PER_DIRECTION..(l + 1) * 2 * PARAMS_PER_DIRECTION];
        let (pf, pb) = p.split_at_mut(PARAMS_PER_DIRECTION);
        backprop_direction(&layer.dirs[0], &layer.input, steps, feat, hid, &dh_f, pf, false, &mut gx);
        backprop_direction(&layer.dirs[1], &layer.input, steps, feat, hid, &dh_b, pb, true, &mut gx);
        grad = gx;
    }
    grad
}
