//! 8-bit binary PGM (P5) images.

use std::io::Cursor;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat};
use phosc_core::image::GrayImage;

use super::{read_bytes, write_bytes};
use crate::error::{PhoscError, Result};

pub fn encode(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.pixels().len() + 16);
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(img.pixels(), img.width() as u32, img.height() as u32, ExtendedColorType::L8)
        .expect("in-memory PGM encoding");
    out
}

pub fn decode(bytes: &[u8]) -> Result<GrayImage, String> {
    let img = image::load(Cursor::new(bytes), ImageFormat::Pnm).map_err(|e| e.to_string())?;
    let gray = img.as_luma8().ok_or("expected an 8-bit grayscale image")?;
    GrayImage::from_pixels(gray.width() as usize, gray.height() as usize, gray.as_raw().clone())
}

pub fn read(path: &Path) -> Result<GrayImage> {
    decode(&read_bytes(path)?).map_err(|e| PhoscError::format(path, e))
}

pub fn write(path: &Path, img: &GrayImage) -> Result<()> {
    write_bytes(path, &encode(img))
}
