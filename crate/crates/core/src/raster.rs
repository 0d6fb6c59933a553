//! 8-bit RGB rasters, bilinear resampling and the canonical PNG codec.

use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const WHITE: Rgb = Rgb([255, 255, 255]);
    pub const BLACK: Rgb = Rgb([0, 0, 0]);
}

/// Row-major RGB raster, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

/// The composed SuperCaptioning image.
pub type Canvas = Raster;

impl Raster {
    pub fn filled(width: u32, height: u32, color: Rgb) -> Result<Self> {
        check_dims(width, height)?;
        let data = color.0.repeat(width as usize * height as usize);
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "raster {width}x{height} needs {expected} bytes, got {}",
                data.len()
            )));
        }
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * 3
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        let o = self.offset(x, y);
        Rgb([self.data[o], self.data[o + 1], self.data[o + 2]])
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, color: Rgb) {
        let o = self.offset(x, y);
        self.data[o..o + 3].copy_from_slice(&color.0);
    }

    /// Copy `src` into this raster with its top-left corner at `(x, y)`.
    pub fn blit(&mut self, src: &Raster, x: u32, y: u32) -> Result<()> {
        if x + src.width > self.width || y + src.height > self.height {
            return Err(Error::invalid("blit source does not fit the destination"));
        }
        let row_bytes = src.width as usize * 3;
        for row in 0..src.height {
            let d = self.offset(x, y + row);
            let s = src.offset(0, row);
            self.data[d..d + row_bytes].copy_from_slice(&src.data[s..s + row_bytes]);
        }
        Ok(())
    }

    /// Encode with the fixed canvas settings: 8-bit RGB, no interlacing,
    /// Paeth filter on every row, zlib level 6, no ancillary chunks.
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width, self.height);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            encoder.set_deflate_compression(png::DeflateCompression::Level(6));
            encoder.set_filter(png::Filter::Paeth);
            let mut writer = encoder
                .write_header()
                .map_err(|e| Error::Image(e.to_string()))?;
            writer
                .write_image_data(&self.data)
                .map_err(|e| Error::Image(e.to_string()))?;
            writer.finish().map_err(|e| Error::Image(e.to_string()))?;
        }
        Ok(out)
    }

    /// Decode any supported image format (PNG, JPEG) into RGB.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let img = image::ImageReader::new(Cursor::new(bytes))
            .with_guessed_format()
            .map_err(|e| Error::Image(e.to_string()))?
            .decode()
            .map_err(|e| Error::Image(e.to_string()))?
            .into_rgb8();
        let (w, h) = img.dimensions();
        Raster::from_raw(w, h, img.into_raw())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Raster::decode(&bytes).map_err(|e| match e {
            Error::Image(msg) => Error::Image(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::invalid(format!(
            "raster dimensions must be positive, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Source sample position for one destination coordinate, as an integer
/// index plus a fractional weight `frac / denom` toward the next index.
#[derive(Debug, Clone, Copy)]
struct Tap {
    lo: usize,
    hi: usize,
    frac: u64,
}

/// Pixel-center aligned taps: destination `d` samples source position
/// `(d + 1/2) · src/dst − 1/2`, clamped to the edge pixels. Exact in
/// integers with denominator `2·dst`.
fn taps(src: u32, dst: u32) -> Vec<Tap> {
    let denom = 2 * dst as i64;
    (0..dst as i64)
        .map(|d| {
            let num = (2 * d + 1) * src as i64 - dst as i64;
            if num <= 0 {
                return Tap {
                    lo: 0,
                    hi: 0,
                    frac: 0,
                };
            }
            let lo = num / denom;
            let frac = (num % denom) as u64;
            if lo >= src as i64 - 1 {
                let last = src as usize - 1;
                Tap {
                    lo: last,
                    hi: last,
                    frac: 0,
                }
            } else {
                Tap {
                    lo: lo as usize,
                    hi: lo as usize + 1,
                    frac,
                }
            }
        })
        .collect()
}

/// Stretch `src` to exactly `dst_w × dst_h` with bilinear interpolation.
///
/// Weights are exact rationals and each channel is rounded half-up, so the
/// output is bit-identical on every platform.
pub fn resize_bilinear(src: &Raster, dst_w: u32, dst_h: u32) -> Result<Raster> {
    check_dims(dst_w, dst_h)?;
    if src.width == dst_w && src.height == dst_h {
        return Ok(src.clone());
    }
    let xs = taps(src.width, dst_w);
    let ys = taps(src.height, dst_h);
    let dx = 2 * dst_w as u64;
    let dy = 2 * dst_h as u64;
    let denom = dx * dy;
    let mut data = Vec::with_capacity(dst_w as usize * dst_h as usize * 3);
    for ty in &ys {
        for tx in &xs {
            let w00 = (dx - tx.frac) * (dy - ty.frac);
            let w10 = tx.frac * (dy - ty.frac);
            let w01 = (dx - tx.frac) * ty.frac;
            let w11 = tx.frac * ty.frac;
            let p00 = src.offset(tx.lo as u32, ty.lo as u32);
            let p10 = src.offset(tx.hi as u32, ty.lo as u32);
            let p01 = src.offset(tx.lo as u32, ty.hi as u32);
            let p11 = src.offset(tx.hi as u32, ty.hi as u32);
            for c in 0..3 {
                let acc = w00 * src.data[p00 + c] as u64
                    + w10 * src.data[p10 + c] as u64
                    + w01 * src.data[p01 + c] as u64
                    + w11 * src.data[p11 + c] as u64;
                data.push(((acc + denom / 2) / denom) as u8);
            }
        }
    }
    Raster::from_raw(dst_w, dst_h, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Straightforward floating-point bilinear resampler using the same
    /// pixel-center convention, written independently of the integer path.
    fn reference_resize(src: &Raster, dw: u32, dh: u32) -> Vec<f64> {
        let sample = |s: u32, d: u32, i: u32| -> (usize, usize, f64) {
            let pos = (i as f64 + 0.5) * s as f64 / d as f64 - 0.5;
            let pos = pos.clamp(0.0, (s - 1) as f64);
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(s as usize - 1);
            (lo, hi, pos - lo as f64)
        };
        let mut out = Vec::new();
        for y in 0..dh {
            let (y0, y1, fy) = sample(src.height(), dh, y);
            for x in 0..dw {
                let (x0, x1, fx) = sample(src.width(), dw, x);
                for c in 0..3 {
                    let p = |xx: usize, yy: usize| src.pixel(xx as u32, yy as u32).0[c] as f64;
                    let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
                    let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
                    out.push(top * (1.0 - fy) + bottom * fy);
                }
            }
        }
        out
    }

    fn pseudo_random(w: u32, h: u32, seed: u32) -> Raster {
        let mut state = seed.wrapping_mul(2654435761).wrapping_add(1);
        let data = (0..w * h * 3)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 17;
                state ^= state << 5;
                (state >> 24) as u8
            })
            .collect();
        Raster::from_raw(w, h, data).unwrap()
    }

    #[test]
    fn identity_resize_is_exact_copy() {
        let src = pseudo_random(224, 150, 7);
        assert_eq!(resize_bilinear(&src, 224, 150).unwrap(), src);
    }

    #[test]
    fn constant_image_stays_constant() {
        let src = Raster::filled(448, 300, Rgb([91, 91, 91])).unwrap();
        let out = resize_bilinear(&src, 224, 150).unwrap();
        assert!(out.as_bytes().iter().all(|&v| v == 91));
        assert_eq!((out.width(), out.height()), (224, 150));
    }

    #[test]
    fn checkerboard_to_single_pixel() {
        let mut src = Raster::filled(2, 2, Rgb::BLACK).unwrap();
        src.set_pixel(1, 0, Rgb::WHITE);
        src.set_pixel(0, 1, Rgb::WHITE);
        let reference = reference_resize(&src, 1, 1);
        assert_eq!(reference, vec![127.5; 3]);
        // round half up
        assert_eq!(
            resize_bilinear(&src, 1, 1).unwrap().pixel(0, 0),
            Rgb([128, 128, 128])
        );
    }

    #[test]
    fn zero_dimensions_rejected() {
        let src = Raster::filled(3, 3, Rgb::WHITE).unwrap();
        assert!(matches!(
            resize_bilinear(&src, 0, 3),
            Err(Error::InvalidArgument(_))
        ));
        assert!(Raster::filled(0, 1, Rgb::WHITE).is_err());
        assert!(Raster::from_raw(2, 2, vec![0; 11]).is_err());
    }

    #[test]
    fn png_roundtrip_and_stable_bytes() {
        let src = pseudo_random(31, 17, 3);
        let a = src.encode_png().unwrap();
        assert_eq!(a, src.encode_png().unwrap());
        assert_eq!(Raster::decode(&a).unwrap(), src);
    }

    proptest! {
        #[test]
        fn matches_float_reference(
            sw in 1u32..40, sh in 1u32..40, dw in 1u32..40, dh in 1u32..40, seed in any::<u32>()
        ) {
            let src = pseudo_random(sw, sh, seed);
            let ours = resize_bilinear(&src, dw, dh).unwrap();
            let reference = reference_resize(&src, dw, dh);
            for (got, want) in ours.as_bytes().iter().zip(&reference) {
                // ±0.5 from rounding, plus float noise at exact halves
                prop_assert!((*got as f64 - want).abs() <= 0.5 + 1e-6, "got {} want {}", got, want);
            }
        }
    }
}
