use alloc::vec;
use alloc::vec::Vec;

use super::super::{NetError, Real};

/// 2x2 stride-2 max pooling; returns the output and the flat input index of each maximum.
pub(crate) fn max_pool<R: Real>(input: &[R], c: usize, h: usize, w: usize) -> (Vec<R>, Vec<usize>) {
    let (oh, ow) = (h / 2, w / 2);
    let mut out = Vec::with_capacity(c * oh * ow);
    let mut arg = Vec::with_capacity(c * oh * ow);
    for ch in 0..c {
        let base = ch * h * w;
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best = base + 2 * oy * w + 2 * ox;
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let idx = base + (2 * oy + dy) * w + 2 * ox + dx;
                    if input[idx] > input[best] {
                        best = idx;
                    }
                }
                out.push(input[best]);
                arg.push(best);
            }
        }
    }
    (out, arg)
}

/// Cell `i` of `n` over a length `len` spans `floor(i*len/n)..floor((i+1)*len/n)`.
fn cell(i: usize, n: usize, len: usize) -> (usize, usize) {
    (i * len / n, (i + 1) * len / n)
}

/// Spatial pyramid max pooling with argmax indices. Output order is level,
/// then channel, then cell in row-major order.
pub(crate) fn spp_with_indices<R: Real>(
    input: &[R],
    c: usize,
    h: usize,
    w: usize,
    levels: &[usize],
) -> Result<(Vec<R>, Vec<usize>), NetError> {
    if let Some(&level) = levels.iter().find(|&&l| l == 0 || l > h || l > w) {
        return Err(NetError::TooSmall {
            height: h,
            width: w,
            level,
        });
    }
    let total = c * levels.iter().map(|l| l * l).sum::<usize>();
    let mut out = Vec::with_capacity(total);
    let mut arg = Vec::with_capacity(total);
    for &n in levels {
        for ch in 0..c {
            let base = ch * h * w;
            for i in 0..n {
                let (y0, y1) = cell(i, n, h);
                for j in 0..n {
                    let (x0, x1) = cell(j, n, w);
                    let mut best = base + y0 * w + x0;
                    for y in y0..y1 {
                        for x in x0..x1 {
                            let idx = base + y * w + x;
                            if input[idx] > input[best] {
                                best = idx;
                            }
                        }
                    }
                    out.push(input[best]);
                    arg.push(best);
                }
            }
        }
    }
    Ok((out, arg))
}

/// Spatial pyramid pooling of a `(C, H, W)` feature map into a vector of
/// length `C * sum(level^2)`.
pub fn spp_pool<R: Real>(input: &[R], shape: [usize; 3], levels: &[usize]) -> Result<Vec<R>, NetError> {
    let [c, h, w] = shape;
    if input.len() != c * h * w {
        return Err(NetError::ShapeMismatch {
            layer: 0,
            reason: alloc::format!("{} values for a {c}x{h}x{w} map", input.len()),
        });
    }
    spp_with_indices(input, c, h, w, levels).map(|(out, _)| out)
}

/// Max over the height axis of `(C, H, W)`, producing the `(W, C)` sequence.
pub(crate) fn collapse_height<R: Real>(input: &[R], c: usize, h: usize, w: usize) -> (Vec<R>, Vec<usize>) {
    let mut out = vec![R::zero(); w * c];
    let mut arg = vec![0; w * c];
    for ch in 0..c {
        for x in 0..w {
            let mut best = ch * h * w + x;
            for y in 1..h {
                let idx = ch * h * w + y * w + x;
                if input[idx] > input[best] {
                    best = idx;
                }
            }
            out[x * c + ch] = input[best];
            arg[x * c + ch] = best;
        }
    }
    (out, arg)
}

/// Routes an upstream gradient back through recorded argmax indices.
pub(crate) fn scatter<R: Real>(upstream: &[R], arg: &[usize], grad_input: &mut [R]) {
    grad_input.fill(R::zero());
    for (&g, &idx) in upstream.iter().zip(arg) {
        grad_input[idx] += g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spp_global_max_and_constant() {
        let input: Vec<f64> = (0..2 * 5 * 7).map(|i| ((i * 37) % 11) as f64).collect();
        let out = spp_pool(&input, [2, 5, 7], &[1]).unwrap();
        assert_eq!(out, [10.0, 10.0]);
        let flat = vec![0.25f32; 3 * 6 * 6];
        let out = spp_pool(&flat, [3, 6, 6], &[1, 2, 4]).unwrap();
        assert_eq!(out.len(), 3 * 21);
        assert!(out.iter().all(|&v| v == 0.25));
    }

    #[test]
    fn spp_cells_cover_map() {
        // 2x2 cells over a 5x5 map split at floor(5/2)=2
        let mut input = vec![0.0f64; 25];
        input[2 * 5 + 2] = 1.0;
        let out = spp_pool(&input, [1, 5, 5], &[2]).unwrap();
        assert_eq!(out, [0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(spp_pool(&input, [1, 5, 5], &[6]), Err(NetError::TooSmall { .. })));
    }

    #[test]
    fn pooling_drops_odd_edges() {
        let input: Vec<f64> = (0..15).map(f64::from).collect();
        let (out, arg) = max_pool(&input, 1, 3, 5);
        assert_eq!(out, [6.0, 8.0]);
        assert_eq!(arg, [6, 8]);
    }

    #[test]
    fn collapse_layout() {
        // channel 0: rows [1,5],[3,2]; channel 1: rows [0,0],[7,1]
        let input = [1.0, 5.0, 3.0, 2.0, 0.0, 0.0, 7.0, 1.0];
        let (out, _) = collapse_height(&input, 2, 2, 2);
        assert_eq!(out, [3.0, 7.0, 5.0, 1.0]);
    }
}
