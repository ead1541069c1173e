//! Escape-time rendering of fields and masks, and PPM/PNG output.

use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{EscapeField, Mask, Verdict};
use crate::io::write_atomic;
use crate::scalar::Scalar;

pub type Rgb = [u8; 3];

/// Color reserved for pixels with a bounded witness.
pub const BOUNDED_COLOR: Rgb = [0, 0, 0];
pub const UNDETERMINED_COLOR: Rgb = [96, 96, 160];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major from the top row.
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn pixel(&self, i: usize, j: usize) -> Rgb {
        self.pixels[j * self.width + i]
    }

    pub fn raw_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }
}

/// Maps `(verdict, first escape iteration, iteration budget)` to a color.
#[derive(Clone, Copy)]
pub struct Palette {
    pub name: &'static str,
    pub map: fn(Verdict, Option<u32>, u32) -> Rgb,
}

impl std::fmt::Debug for Palette {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Palette").field("name", &self.name).finish()
    }
}

/// Escape speed in `[0, 1]`: 1 for escape on the first iteration.
fn speed(iter: Option<u32>, max_iter: u32) -> f64 {
    match iter {
        Some(it) if max_iter > 0 => (1.0 - f64::from(it.saturating_sub(1)) / f64::from(max_iter)).clamp(0.0, 1.0),
        _ => 0.0,
    }
}

fn ramp(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn fire(v: Verdict, iter: Option<u32>, max_iter: u32) -> Rgb {
    match v {
        Verdict::Bounded => BOUNDED_COLOR,
        Verdict::Undetermined => UNDETERMINED_COLOR,
        Verdict::EscapingAll => {
            let t = speed(iter, max_iter);
            // red floor keeps every escaping pixel distinct from the bounded color
            [40 + (f64::from(215u8) * (3.0 * t).clamp(0.0, 1.0)).round() as u8, ramp(3.0 * t - 1.0), ramp(3.0 * t - 2.0)]
        }
    }
}

fn gray(v: Verdict, iter: Option<u32>, max_iter: u32) -> Rgb {
    match v {
        Verdict::Bounded => BOUNDED_COLOR,
        Verdict::Undetermined => UNDETERMINED_COLOR,
        Verdict::EscapingAll => {
            let g = 55 + (200.0 * speed(iter, max_iter)).round() as u8;
            [g, g, g]
        }
    }
}

impl Palette {
    pub const FIRE: Palette = Palette { name: "fire", map: fire };
    pub const GRAY: Palette = Palette { name: "gray", map: gray };

    pub fn by_name(name: &str) -> Option<Palette> {
        [Palette::FIRE, Palette::GRAY].into_iter().find(|p| p.name == name)
    }
}

impl Default for Palette {
    fn default() -> Self {
        Palette::FIRE
    }
}

pub fn render_field<T: Scalar>(field: &EscapeField<T>, palette: &Palette) -> Image {
    let n = field.params.max_iter;
    Image {
        width: field.grid.width,
        height: field.grid.height,
        pixels: field
            .verdicts
            .iter()
            .zip(&field.first_escape_iter)
            .map(|(&v, &it)| (palette.map)(v, it, n))
            .collect(),
    }
}

/// Set pixels white, unset black.
pub fn render_mask<T: Scalar>(m: &Mask<T>) -> Image {
    Image {
        width: m.grid().width,
        height: m.grid().height,
        pixels: m.bits().iter().map(|&b| if b { [255; 3] } else { [0; 3] }).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Ppm => "ppm",
            ImageFormat::Png => "png",
        }
    }
}

impl std::str::FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ppm" => Ok(ImageFormat::Ppm),
            "png" => Ok(ImageFormat::Png),
            other => Err(Error::InvalidParameter(format!("unknown image format `{other}`"))),
        }
    }
}

/// Binary PPM: `P6\n<w> <h>\n255\n` followed by RGB rows from the top.
pub fn encode_ppm(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.pixels.iter().flatten());
    out
}

pub fn encode_png(img: &Image) -> Result<Vec<u8>> {
    use image::ImageEncoder;
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out)
        .write_image(&img.raw_bytes(), img.width as u32, img.height as u32, image::ExtendedColorType::Rgb8)
        .map_err(|e| Error::Image(e.to_string()))?;
    Ok(out)
}

pub fn write_image(img: &Image, path: &Path, format: ImageFormat) -> Result<()> {
    let bytes = match format {
        ImageFormat::Ppm => encode_ppm(img),
        ImageFormat::Png => encode_png(img)?,
    };
    write_atomic(path, &bytes)
}
