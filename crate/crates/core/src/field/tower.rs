use serde::{Deserialize, Serialize};

use super::{forward_image_cells, forward_image_mask, mask_all_elements, mask_and, mask_or, preimage_mask, Mask, SampleGrid};
use crate::error::{Error, Result};
use crate::expr::Generator;
use crate::orbit::{enumerate_words, OrbitParams};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TowerKind {
    /// Images and preimages: the completely invariant construction.
    E,
    /// Images only: the forward construction.
    F,
}

/// How the towers push a mask forward under a generator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageRule {
    /// Scatter pixel centers only ([`forward_image_mask`]).
    Center,
    /// Image of the whole cells ([`forward_image_cells`]).
    #[default]
    Cells,
}

/// Levels `0..=n_max` of a tower and their intersection.
#[derive(Clone, Debug, PartialEq)]
pub struct Tower<T> {
    pub kind: TowerKind,
    pub levels: Vec<Mask<T>>,
    pub intersection: Mask<T>,
    /// Forward-image points that left the window, per level transition.
    pub spill: Vec<usize>,
}

fn construct<T: Scalar>(
    kind: TowerKind,
    gens: &[Generator<T>],
    grid: &SampleGrid<T>,
    depth: usize,
    n_max: usize,
    params: &OrbitParams<T>,
    rule: ImageRule,
) -> Result<Tower<T>> {
    if gens.is_empty() {
        return Err(Error::InvalidParameter("at least one generator is required".into()));
    }
    // level 0: ⋂ I(h) over all words up to depth
    let words = enumerate_words(gens.len(), depth)?;
    let mut levels = vec![mask_all_elements(&words, gens, grid, params)?];
    let mut spill = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let prev = levels.last().expect("level 0 exists");
        let mut parts = Vec::with_capacity(2 * gens.len());
        let mut spilled = 0;
        for g in gens {
            let img = match rule {
                ImageRule::Center => forward_image_mask(prev, g)?,
                ImageRule::Cells => forward_image_cells(prev, g)?,
            };
            spilled += img.spill;
            parts.push(img.mask);
            if kind == TowerKind::E {
                parts.push(preimage_mask(prev, g)?);
            }
        }
        spill.push(spilled);
        let refs: Vec<&Mask<T>> = parts.iter().collect();
        levels.push(mask_or(&refs)?);
    }
    let refs: Vec<&Mask<T>> = levels.iter().collect();
    let intersection = mask_and(&refs)?;
    Ok(Tower { kind, levels, intersection, spill })
}

/// `E_0 = ⋂_h I(h)`, `E_{n+1} = ⋃_g g^{-1}(E_n) ∪ g(E_n)` over generators,
/// `E = ⋂_{n ≤ n_max} E_n`.
pub fn construct_e<T: Scalar>(
    gens: &[Generator<T>],
    grid: &SampleGrid<T>,
    depth: usize,
    n_max: usize,
    params: &OrbitParams<T>,
) -> Result<Tower<T>> {
    construct(TowerKind::E, gens, grid, depth, n_max, params, ImageRule::default())
}

/// [`construct_e`] with an explicit image rule.
pub fn construct_e_with<T: Scalar>(
    gens: &[Generator<T>],
    grid: &SampleGrid<T>,
    depth: usize,
    n_max: usize,
    params: &OrbitParams<T>,
    rule: ImageRule,
) -> Result<Tower<T>> {
    construct(TowerKind::E, gens, grid, depth, n_max, params, rule)
}

/// As [`construct_e`] with forward images only; `F_0 = E_0`.
pub fn construct_f<T: Scalar>(
    gens: &[Generator<T>],
    grid: &SampleGrid<T>,
    depth: usize,
    n_max: usize,
    params: &OrbitParams<T>,
) -> Result<Tower<T>> {
    construct(TowerKind::F, gens, grid, depth, n_max, params, ImageRule::default())
}

/// [`construct_f`] with an explicit image rule.
pub fn construct_f_with<T: Scalar>(
    gens: &[Generator<T>],
    grid: &SampleGrid<T>,
    depth: usize,
    n_max: usize,
    params: &OrbitParams<T>,
    rule: ImageRule,
) -> Result<Tower<T>> {
    construct(TowerKind::F, gens, grid, depth, n_max, params, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rectangle;

    fn grid(x0: f64, x1: f64, y0: f64, y1: f64, w: usize, h: usize) -> SampleGrid<f64> {
        SampleGrid::new(Rectangle::new(x0, x1, y0, y1).unwrap(), w, h).unwrap()
    }

    fn gens(texts: &[&str]) -> Vec<Generator<f64>> {
        texts.iter().map(|t| Generator::parse(*t, t).unwrap()).collect()
    }

    #[test]
    fn contraction_towers_are_empty() {
        let g = grid(-2.0, 2.0, -2.0, 2.0, 8, 8);
        let p = OrbitParams::new(1e10, 40).unwrap();
        let e = construct_e(&gens(&["0.5*z"]), &g, 2, 3, &p).unwrap();
        assert!(e.levels[0].is_empty() && e.intersection.is_empty());
        assert_eq!(e.levels.len(), 4);
        let f = construct_f(&gens(&["0.5*z"]), &g, 2, 3, &p).unwrap();
        assert!(f.intersection.is_empty());
    }

    #[test]
    fn empty_pair_tower_is_empty() {
        let g = grid(-2.0, 2.0, -2.0, 2.0, 16, 16);
        let p = OrbitParams::new(1e10, 50).unwrap();
        let e = construct_e(&gens(&["exp(z)", "exp(-z)"]), &g, 2, 2, &p).unwrap();
        assert!(e.intersection.is_empty());
    }

    #[test]
    fn towers_nest_in_level_zero() {
        let g = grid(-1.0, 3.0, -2.0, 2.0, 24, 24);
        let p = OrbitParams::new(1e10, 30).unwrap();
        let gs = gens(&["exp(z)"]);
        let e = construct_e(&gs, &g, 2, 3, &p).unwrap();
        let f = construct_f(&gs, &g, 2, 3, &p).unwrap();
        assert_eq!(e.levels[0], f.levels[0]);
        assert!(e.intersection.is_subset_of(&e.levels[0]).unwrap());
        assert!(f.intersection.is_subset_of(&f.levels[0]).unwrap());
        // each F level transition is contained in the matching E transition
        for n in 1..=3 {
            let img = forward_image_mask(&e.levels[n - 1], &gs[0]).unwrap();
            assert!(img.mask.is_subset_of(&e.levels[n]).unwrap());
        }
        assert_eq!(e.spill.len(), 3);
    }
}
