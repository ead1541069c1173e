use num_complex::Complex;
use rayon::prelude::*;

use super::{par_pixels, SampleGrid};
use crate::error::{Error, Result};
use crate::expr::{Evaluation, Generator};
use crate::scalar::Scalar;

/// Boolean image over a sample grid, row-major from the top row.
#[derive(Clone, Debug, PartialEq)]
pub struct Mask<T> {
    grid: SampleGrid<T>,
    bits: Vec<bool>,
}

impl<T: Scalar> Mask<T> {
    pub fn zeros(grid: SampleGrid<T>) -> Self {
        Mask { bits: vec![false; grid.len()], grid }
    }

    pub fn ones(grid: SampleGrid<T>) -> Self {
        Mask { bits: vec![true; grid.len()], grid }
    }

    /// Panics if `bits` does not have one entry per pixel.
    pub fn from_bits(grid: SampleGrid<T>, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), grid.len(), "mask length must match grid");
        Mask { grid, bits }
    }

    pub fn from_fn(grid: SampleGrid<T>, f: impl Fn(usize, usize) -> bool) -> Self {
        let bits = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.coords(k);
                f(i, j)
            })
            .collect();
        Mask { grid, bits }
    }

    pub fn grid(&self) -> &SampleGrid<T> {
        &self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[self.grid.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let k = self.grid.index(i, j);
        self.bits[k] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn is_subset_of(&self, other: &Mask<T>) -> Result<bool> {
        self.grid.check_same(&other.grid)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b))
    }

    pub fn not(&self) -> Mask<T> {
        Mask { grid: self.grid, bits: self.bits.iter().map(|b| !b).collect() }
    }
}

fn combine<T: Scalar>(masks: &[&Mask<T>], op: fn(bool, bool) -> bool) -> Result<Mask<T>> {
    let (first, rest) = masks
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("mask combinator needs at least one mask".into()))?;
    for m in rest {
        first.grid.check_same(&m.grid)?;
    }
    let mut bits = first.bits.clone();
    for m in rest {
        bits.par_iter_mut().zip(m.bits.par_iter()).for_each(|(a, &b)| *a = op(*a, b));
    }
    Ok(Mask { grid: first.grid, bits })
}

/// Pixelwise intersection.
pub fn mask_and<T: Scalar>(masks: &[&Mask<T>]) -> Result<Mask<T>> {
    combine(masks, |a, b| a && b)
}

/// Pixelwise union.
pub fn mask_or<T: Scalar>(masks: &[&Mask<T>]) -> Result<Mask<T>> {
    combine(masks, |a, b| a || b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForwardImage<T> {
    pub mask: Mask<T>,
    /// Set pixels whose image left the window (or overflowed).
    pub spill: usize,
}

/// Scatters `g(center(p))` for every set pixel `p` into the pixel containing it.
pub fn forward_image_mask<T: Scalar>(m: &Mask<T>, g: &Generator<T>) -> Result<ForwardImage<T>> {
    let grid = m.grid;
    let landings: Vec<Option<usize>> = m
        .bits
        .par_iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| {
            Ok(match g.eval(grid.center_of(k))? {
                Evaluation::Finite(w) => grid.index_of(w),
                Evaluation::Overflow => None,
            })
        })
        .collect::<Result<_>>()?;
    let mut out = Mask::zeros(grid);
    let mut spill = 0;
    for landing in landings {
        match landing {
            Some(k) => out.bits[k] = true,
            None => spill += 1,
        }
    }
    Ok(ForwardImage { mask: out, spill })
}

/// Upper bound on the per-axis subsample count of [`forward_image_cells`].
pub const MAX_CELL_SUBSAMPLES: usize = 32;

/// Per-axis subsample count for a cell whose center has derivative modulus
/// `slope`: image sample spacing stays under half a pixel.
pub fn cell_subsamples<T: Scalar>(grid: &SampleGrid<T>, slope: Option<T>) -> usize {
    let (dx, dy) = grid.pixel_size();
    let aspect = (dx.max(dy) / dx.min(dy)).to_f64().unwrap_or(1.0);
    match slope.and_then(|s| s.to_f64()) {
        Some(s) if s.is_finite() => {
            let n = (2.0 * s * aspect).ceil();
            if n >= MAX_CELL_SUBSAMPLES as f64 {
                MAX_CELL_SUBSAMPLES
            } else {
                (n as usize).max(1)
            }
        }
        _ => MAX_CELL_SUBSAMPLES,
    }
}

/// Forward image of the union of the set cells: each set pixel is sampled on
/// an `s × s` lattice (`s` from [`cell_subsamples`] at the cell center) and
/// every landing pixel is set. `spill` counts set pixels with at least one
/// lattice point leaving the window.
pub fn forward_image_cells<T: Scalar>(m: &Mask<T>, g: &Generator<T>) -> Result<ForwardImage<T>> {
    let grid = m.grid;
    let (dx, dy) = grid.pixel_size();
    let landings: Vec<(Vec<usize>, bool)> = m
        .bits
        .par_iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| {
            let c = grid.center_of(k);
            let slope = match g.eval_derivative(c)? {
                Evaluation::Finite(d) => Some(d.norm()),
                Evaluation::Overflow => None,
            };
            let s = cell_subsamples(&grid, slope);
            let n = T::from_usize(s).expect("small count");
            let half = T::lit(0.5);
            let mut hits = Vec::new();
            let mut spilled = false;
            for b in 0..s {
                let v = (T::from_usize(b).expect("small count") + half) / n - half;
                for a in 0..s {
                    let u = (T::from_usize(a).expect("small count") + half) / n - half;
                    let z = Complex::new(c.re + u * dx, c.im - v * dy);
                    match g.eval(z)? {
                        Evaluation::Finite(w) => match grid.index_of(w) {
                            Some(q) => hits.push(q),
                            None => spilled = true,
                        },
                        Evaluation::Overflow => spilled = true,
                    }
                }
            }
            Ok((hits, spilled))
        })
        .collect::<Result<_>>()?;
    let mut out = Mask::zeros(grid);
    let mut spill = 0;
    for (hits, spilled) in landings {
        for q in hits {
            out.bits[q] = true;
        }
        spill += usize::from(spilled);
    }
    Ok(ForwardImage { mask: out, spill })
}

/// Membership form of `g^{-1}(m)`: pixel `p` is set iff `g(center(p))` is
/// finite and lands in a set pixel of `m`.
pub fn preimage_mask<T: Scalar>(m: &Mask<T>, g: &Generator<T>) -> Result<Mask<T>> {
    let grid = m.grid;
    let bits = par_pixels(&grid, |_, z| {
        Ok(match g.eval(z)? {
            Evaluation::Finite(w) => grid.index_of(w).is_some_and(|k| m.bits[k]),
            Evaluation::Overflow => false,
        })
    })?;
    Ok(Mask { grid, bits })
}
