//! 8-bit grayscale images and their conversion to network input.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::netcore::{NetError, Real, Tensor};

/// Canvas width used by every word image.
pub const IMAGE_WIDTH: usize = 250;
/// Canvas height used by every word image.
pub const IMAGE_HEIGHT: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// A white canvas.
    pub fn blank(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![255; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, String> {
        if pixels.len() != width * height || width == 0 || height == 0 {
            return Err(format!("{} pixels cannot form a {width}x{height} image", pixels.len()));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    /// `(1, H, W)` tensor of `pixel / 255`, so the white background is 1.
    pub fn to_tensor<R: Real>(&self) -> Tensor<R> {
        let data = self.pixels.iter().map(|&p| R::from_f64(f64::from(p) / 255.0)).collect();
        Tensor::from_vec(&[1, self.height, self.width], data).expect("pixel count matches shape")
    }

    /// Like [`to_tensor`](Self::to_tensor) but checks the canvas size first.
    pub fn to_input<R: Real>(&self, height: usize, width: usize) -> Result<Tensor<R>, NetError> {
        if self.height != height || self.width != width {
            return Err(NetError::ShapeMismatch {
                layer: 0,
                reason: format!("image is {}x{}, model expects {height}x{width}", self.height, self.width),
            });
        }
        Ok(self.to_tensor())
    }
}

/// A rendered word with its label and rendering style.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordImage {
    pub image: GrayImage,
    pub label: String,
    pub style_id: u32,
}
