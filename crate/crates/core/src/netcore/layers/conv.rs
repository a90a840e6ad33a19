use alloc::vec;
use alloc::vec::Vec;

use super::super::gemm::{gemm, Mat};
use super::super::Real;

/// Geometry of a square convolution over one sample.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ConvGeom {
    pub in_c: usize,
    pub in_h: usize,
    pub in_w: usize,
    pub out_c: usize,
    pub out_h: usize,
    pub out_w: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
}

/// Output positions `o` in `0..out_len` whose input index `o * stride + k - padding`
/// falls inside `0..in_len`.
fn valid(out_len: usize, in_len: usize, stride: usize, k: usize, padding: usize) -> (usize, usize) {
    let lo = if padding > k { (padding - k).div_ceil(stride) } else { 0 };
    let reach = in_len - 1 + padding;
    if reach < k {
        return (0, 0);
    }
    let hi = ((reach - k) / stride + 1).min(out_len);
    (lo.min(hi), hi)
}

impl ConvGeom {
    #[cfg(test)]
    fn weight_index(&self, o: usize, c: usize, ky: usize, kx: usize) -> usize {
        ((o * self.in_c + c) * self.kernel + ky) * self.kernel + kx
    }

    fn patch_len(&self) -> usize {
        self.in_c * self.kernel * self.kernel
    }

    /// Unfolds the input into a `(C*K*K, OH*OW)` matrix of receptive fields.
    fn im2col<R: Real>(&self, input: &[R]) -> Vec<R> {
        let plane = self.out_h * self.out_w;
        let mut cols = vec![R::zero(); self.patch_len() * plane];
        for c in 0..self.in_c {
            let src = &input[c * self.in_h * self.in_w..(c + 1) * self.in_h * self.in_w];
            for ky in 0..self.kernel {
                let (y0, y1) = valid(self.out_h, self.in_h, self.stride, ky, self.padding);
                for kx in 0..self.kernel {
                    let (x0, x1) = valid(self.out_w, self.in_w, self.stride, kx, self.padding);
                    let row = (c * self.kernel + ky) * self.kernel + kx;
                    let dst = &mut cols[row * plane..(row + 1) * plane];
                    for oy in y0..y1 {
                        let iy = oy * self.stride + ky - self.padding;
                        let ix0 = x0 * self.stride + kx - self.padding;
                        let line = &src[iy * self.in_w..(iy + 1) * self.in_w];
                        let out = &mut dst[oy * self.out_w + x0..oy * self.out_w + x1];
                        for (d, &v) in out.iter_mut().zip(line[ix0..].iter().step_by(self.stride)) {
                            *d = v;
                        }
                    }
                }
            }
        }
        cols
    }

    /// Adjoint of [`im2col`](Self::im2col): scatter-adds columns into an image.
    fn col2im<R: Real>(&self, cols: &[R], grad_input: &mut [R]) {
        let plane = self.out_h * self.out_w;
        grad_input.fill(R::zero());
        for c in 0..self.in_c {
            let dst = &mut grad_input[c * self.in_h * self.in_w..(c + 1) * self.in_h * self.in_w];
            for ky in 0..self.kernel {
                let (y0, y1) = valid(self.out_h, self.in_h, self.stride, ky, self.padding);
                for kx in 0..self.kernel {
                    let (x0, x1) = valid(self.out_w, self.in_w, self.stride, kx, self.padding);
                    let row = (c * self.kernel + ky) * self.kernel + kx;
                    let src = &cols[row * plane..(row + 1) * plane];
                    for oy in y0..y1 {
                        let iy = oy * self.stride + ky - self.padding;
                        let ix0 = x0 * self.stride + kx - self.padding;
                        let line = &mut dst[iy * self.in_w..(iy + 1) * self.in_w];
                        let g = &src[oy * self.out_w + x0..oy * self.out_w + x1];
                        for (d, &v) in line[ix0..].iter_mut().step_by(self.stride).zip(g) {
                            *d += v;
                        }
                    }
                }
            }
        }
    }

    pub fn forward<R: Real>(&self, input: &[R], weight: &[R], bias: &[R], out: &mut [R]) {
        let plane = self.out_h * self.out_w;
        let cols = self.im2col(input);
        gemm(
            Mat::new(weight, self.out_c, self.patch_len()),
            Mat::new(&cols, self.patch_len(), plane),
            out,
            false,
        );
        for (row, &b) in out.chunks_mut(plane).zip(bias) {
            for v in row {
                *v += b;
            }
        }
    }

    /// Accumulates parameter gradients and writes the input gradient.
    pub fn backward<R: Real>(
        &self,
        input: &[R],
        weight: &[R],
        upstream: &[R],
        grad_weight: &mut [R],
        grad_bias: &mut [R],
        grad_input: &mut [R],
    ) {
        let plane = self.out_h * self.out_w;
        let patch = self.patch_len();
        for (gb, row) in grad_bias.iter_mut().zip(upstream.chunks(plane)) {
            *gb += row.iter().copied().sum::<R>();
        }
        let cols = self.im2col(input);
        let g = Mat::new(upstream, self.out_c, plane);
        gemm(g, Mat::new(&cols, patch, plane).t(), grad_weight, true);
        let mut grad_cols = vec![R::zero(); patch * plane];
        gemm(Mat::new(weight, self.out_c, patch).t(), g, &mut grad_cols, false);
        self.col2im(&grad_cols, grad_input);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_ranges() {
        // kernel 3, padding 1, stride 1 over width 5
        assert_eq!(valid(5, 5, 1, 0, 1), (1, 5));
        assert_eq!(valid(5, 5, 1, 1, 1), (0, 5));
        assert_eq!(valid(5, 5, 1, 2, 1), (0, 4));
        // stride 2, out width 3 from in width 5
        assert_eq!(valid(3, 5, 2, 0, 1), (1, 3));
        assert_eq!(valid(3, 5, 2, 2, 1), (0, 2));
    }

    #[test]
    fn matches_direct_definition() {
        let g = ConvGeom {
            in_c: 2,
            in_h: 5,
            in_w: 6,
            out_c: 3,
            out_h: 3,
            out_w: 3,
            kernel: 3,
            stride: 2,
            padding: 1,
        };
        let input: alloc::vec::Vec<f64> = (0..60).map(|i| (i as f64 * 0.37).sin()).collect();
        let weight: alloc::vec::Vec<f64> = (0..54).map(|i| (i as f64 * 0.11).cos()).collect();
        let bias = [0.1, -0.2, 0.3];
        let mut out = alloc::vec![0.0; 27];
        g.forward(&input, &weight, &bias, &mut out);
        for o in 0..3 {
            for oy in 0..3 {
                for ox in 0..3 {
                    let mut acc = bias[o];
                    for c in 0..2 {
                        for ky in 0..3 {
                            for kx in 0..3 {
                                let iy = (oy * 2 + ky) as isize - 1;
                                let ix = (ox * 2 + kx) as isize - 1;
                                if iy < 0 || ix < 0 || iy >= 5 || ix >= 6 {
                                    continue;
                                }
                                acc += weight[g.weight_index(o, c, ky, kx)]
                                    * input[c * 30 + iy as usize * 6 + ix as usize];
                            }
                        }
                    }
                    assert!((out[o * 9 + oy * 3 + ox] - acc).abs() < 1e-12);
                }
            }
        }
    }
}
