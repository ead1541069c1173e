//! Pixel-grid approximations: escape fields, boolean masks for `I(h)`,
//! `I(S)`, and the image/preimage towers.
//!
//! Everything here is window-relative: points whose images leave the
//! [`Rectangle`] are dropped. Work is spread over rows with rayon; every
//! output is assembled by pixel index, so results do not depend on the
//! number of worker threads.

mod codec;
mod mask;
mod tower;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Generator;
use crate::orbit::{iterate_word, Classifier, OrbitParams, PointSummary, Word};
use crate::scalar::Scalar;

pub use codec::{decode_escape_field, decode_pbm, encode_escape_field, encode_pbm, DecodedField};
pub use mask::{
    cell_subsamples, forward_image_cells, forward_image_mask, mask_and, mask_or, preimage_mask, ForwardImage, Mask,
    MAX_CELL_SUBSAMPLES,
};
pub use tower::{construct_e, construct_e_with, construct_f, construct_f_with, ImageRule, Tower, TowerKind};

/// Axis-aligned window `[x_min, x_max] × [y_min, y_max]` of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Scalar> Rectangle<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T) -> Result<Self> {
        let r = Rectangle { x_min, x_max, y_min, y_max };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::InvalidParameter(format!(
                "rectangle needs finite x_min < x_max and y_min < y_max, got [{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }

    pub fn width(&self) -> T {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> T {
        self.y_max - self.y_min
    }
}

/// Pixel `(i, j)` (column, row; row 0 at the top) samples the center of its
/// cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleGrid<T> {
    pub region: Rectangle<T>,
    pub width: usize,
    pub height: usize,
}

impl<T: Scalar> SampleGrid<T> {
    pub fn new(region: Rectangle<T>, width: usize, height: usize) -> Result<Self> {
        region.validate()?;
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("grid dimensions must be positive".into()));
        }
        Ok(SampleGrid { region, width, height })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pixel_size(&self) -> (T, T) {
        (
            self.region.width() / T::from_usize(self.width).unwrap(),
            self.region.height() / T::from_usize(self.height).unwrap(),
        )
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    pub fn center(&self, i: usize, j: usize) -> Complex<T> {
        let (dx, dy) = self.pixel_size();
        let half = T::lit(0.5);
        Complex::new(
            self.region.x_min + (T::from_usize(i).unwrap() + half) * dx,
            self.region.y_max - (T::from_usize(j).unwrap() + half) * dy,
        )
    }

    pub fn center_of(&self, index: usize) -> Complex<T> {
        let (i, j) = self.coords(index);
        self.center(i, j)
    }

    /// Pixel whose cell contains `z`, if any. Cells are half-open, so the
    /// right and bottom window edges fall outside.
    pub fn pixel_of(&self, z: Complex<T>) -> Option<(usize, usize)> {
        let (dx, dy) = self.pixel_size();
        let fx = (z.re - self.region.x_min) / dx;
        let fy = (self.region.y_max - z.im) / dy;
        if fx.is_nan() || fy.is_nan() || fx < T::zero() || fy < T::zero() {
            return None;
        }
        let (i, j) = (fx.floor().to_usize()?, fy.floor().to_usize()?);
        (i < self.width && j < self.height).then_some((i, j))
    }

    pub fn index_of(&self, z: Complex<T>) -> Option<usize> {
        self.pixel_of(z).map(|(i, j)| self.index(i, j))
    }

    pub(crate) fn check_same(&self, other: &SampleGrid<T>) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{}x{} over {:?} vs {}x{} over {:?}",
                self.width, self.height, self.region, other.width, other.height, other.region
            )));
        }
        Ok(())
    }
}

/// Per-pixel summary of a [`crate::orbit::PointClass`]. The discriminants are
/// the on-disk codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Verdict {
    Bounded = 0,
    EscapingAll = 1,
    Undetermined = 2,
}

impl Verdict {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Verdict::Bounded),
            1 => Some(Verdict::EscapingAll),
            2 => Some(Verdict::Undetermined),
            _ => None,
        }
    }
}

/// Escape classification of every pixel center of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EscapeField<T> {
    pub grid: SampleGrid<T>,
    pub verdicts: Vec<Verdict>,
    /// Minimum escape iteration over all words, when any word escaped.
    pub first_escape_iter: Vec<Option<u32>>,
    pub params: OrbitParams<T>,
    pub depth: usize,
    pub labels: Vec<String>,
}

impl<T: Scalar> EscapeField<T> {
    pub fn verdict(&self, i: usize, j: usize) -> Verdict {
        self.verdicts[self.grid.index(i, j)]
    }

    pub fn escaping_count(&self) -> usize {
        self.verdicts.iter().filter(|&&v| v == Verdict::EscapingAll).count()
    }

    pub fn escaping_density(&self) -> f64 {
        self.escaping_count() as f64 / self.grid.len() as f64
    }
}

/// Runs `f` on every pixel index, row-parallel, keeping pixel order.
pub(crate) fn par_pixels<T, R, F>(grid: &SampleGrid<T>, f: F) -> Result<Vec<R>>
where
    T: Scalar,
    R: Send,
    F: Fn(usize, Complex<T>) -> Result<R> + Sync,
{
    let rows: Vec<Vec<R>> = (0..grid.height)
        .into_par_iter()
        .map(|j| {
            (0..grid.width)
                .map(|i| f(grid.index(i, j), grid.center(i, j)))
                .collect::<Result<Vec<R>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Classifies every pixel center against all words up to `depth`.
pub fn compute_escape_field<T: Scalar>(
    gens: &[Generator<T>],
    grid: &SampleGrid<T>,
    depth: usize,
    params: &OrbitParams<T>,
) -> Result<EscapeField<T>> {
    let classifier = Classifier::new(gens, depth, params)?;
    let summaries: Vec<PointSummary> = par_pixels(grid, |_, z| classifier.summarize(z))?;
    Ok(EscapeField {
        grid: *grid,
        verdicts: summaries.iter().map(|s| s.verdict).collect(),
        first_escape_iter: summaries.iter().map(|s| s.first_escape_iter).collect(),
        params: *params,
        depth,
        labels: gens.iter().map(|g| g.name.clone()).collect(),
    })
}

/// Pixels classified as escaping under every tested word.
pub fn mask_escaping<T: Scalar>(field: &EscapeField<T>) -> Mask<T> {
    Mask::from_bits(field.grid, field.verdicts.iter().map(|&v| v == Verdict::EscapingAll).collect())
}

/// Pixel form of `I(h)` for one semigroup element `h`.
pub fn mask_single_element<T: Scalar>(
    h: &Word,
    gens: &[Generator<T>],
    grid: &SampleGrid<T>,
    params: &OrbitParams<T>,
) -> Result<Mask<T>> {
    params.validate()?;
    h.validate(gens.len())?;
    let bits = par_pixels(grid, |_, z| Ok(iterate_word(h, gens, z, params)?.escaped()))?;
    Ok(Mask::from_bits(*grid, bits))
}

/// Pixel form of `⋂_h I(h)` over the given words, short-circuiting per pixel.
pub fn mask_all_elements<T: Scalar>(
    words: &[Word],
    gens: &[Generator<T>],
    grid: &SampleGrid<T>,
    params: &OrbitParams<T>,
) -> Result<Mask<T>> {
    params.validate()?;
    for w in words {
        w.validate(gens.len())?;
    }
    let bits = par_pixels(grid, |_, z| {
        for w in words {
            if !iterate_word(w, gens, z, params)?.escaped() {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(Mask::from_bits(*grid, bits))
}
