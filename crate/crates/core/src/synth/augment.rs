use alloc::format;

use rand_distr::{Distribution, Normal};

use super::render::BASELINE_ROW;
use super::SynthError;
use crate::image::GrayImage;
use crate::{math, rng};

pub const MAX_SHEAR_DEGREES: f64 = 25.0;

/// Horizontal shear about the baseline (white fill), then additive Gaussian
/// noise clamped to `[0, 255]`.
pub fn augment(image: &GrayImage, shear_degrees: f64, noise_sigma: f64, seed: u64) -> Result<GrayImage, SynthError> {
    if !(-MAX_SHEAR_DEGREES..=MAX_SHEAR_DEGREES).contains(&shear_degrees) {
        return Err(SynthError::OutOfRange(format!("shear {shear_degrees} outside ±{MAX_SHEAR_DEGREES}°")));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(SynthError::OutOfRange(format!("noise sigma {noise_sigma}")));
    }
    let (w, h) = (image.width(), image.height());
    let mut out = image.clone();
    let k = math::tan(shear_degrees.to_radians());
    if k != 0.0 {
        for y in 0..h {
            // Rows above the baseline move right for a positive angle.
            let shift = k * (BASELINE_ROW - (y as f64 + 0.5));
            for x in 0..w {
                let sx = x as f64 - shift;
                let x0 = math::floor(sx);
                let frac = sx - x0;
                let sample = |xi: f64| -> f64 {
                    if xi < 0.0 || xi >= w as f64 {
                        255.0
                    } else {
                        f64::from(image.get(xi as usize, y))
                    }
                };
                let v = sample(x0) * (1.0 - frac) + sample(x0 + 1.0) * frac;
                out.set(x, y, math::round(v).clamp(0.0, 255.0) as u8);
            }
        }
    }
    if noise_sigma > 0.0 {
        let normal = Normal::new(0.0, noise_sigma).map_err(|e| SynthError::OutOfRange(format!("{e}")))?;
        let mut r = rng::stream(seed, "noise", 0);
        for p in out.pixels_mut() {
            let v = f64::from(*p) + normal.sample(&mut r);
            *p = math::round(v).clamp(0.0, 255.0) as u8;
        }
    }
    Ok(out)
}
