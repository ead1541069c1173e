//! Pixel-level checks of invariance, containment, equality and emptiness.
//!
//! Every check is a pure function of its inputs. Work fans out over pixels;
//! counts and the (at most ten) violation examples are collected in pixel
//! order so repeated runs give identical reports.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::expr::{Evaluation, Generator};
use crate::field::{par_pixels, EscapeField, Mask, SampleGrid, Verdict};
use crate::orbit::Classifier;
use crate::scalar::Scalar;

pub const MAX_EXAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParameters {
    /// `[x_min, x_max, y_min, y_max]`
    pub region: [f64; 4],
    pub width: usize,
    pub height: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

impl ReportParameters {
    pub fn from_grid<T: Scalar>(grid: &SampleGrid<T>) -> Self {
        let r = grid.region;
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        ReportParameters {
            region: [f(r.x_min), f(r.x_max), f(r.y_min), f(r.y_max)],
            width: grid.width,
            height: grid.height,
            depth: None,
            max_iter: None,
            escape_radius: None,
            generator: None,
        }
    }

    pub fn from_field<T: Scalar>(field: &EscapeField<T>) -> Self {
        ReportParameters {
            depth: Some(field.depth),
            max_iter: Some(field.params.max_iter),
            escape_radius: field.params.escape_radius.to_f64(),
            ..Self::from_grid(&field.grid)
        }
    }

    pub fn with_generator(mut self, name: impl Into<String>) -> Self {
        self.generator = Some(name.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationExample {
    pub point: [f64; 2],
    pub pixel: [usize; 2],
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub population: usize,
    pub violations: usize,
    pub fraction: f64,
    pub threshold: f64,
    pub passed: bool,
    pub parameters: ReportParameters,
    #[serde(rename = "examples")]
    pub violation_examples: Vec<ViolationExample>,
}

impl VerificationReport {
    /// Passes iff `violations / population <= threshold`; an empty
    /// population passes vacuously.
    pub fn new(
        check_name: impl Into<String>,
        population: usize,
        violations: usize,
        threshold: f64,
        parameters: ReportParameters,
        violation_examples: Vec<ViolationExample>,
    ) -> Self {
        let fraction = if population == 0 { 0.0 } else { violations as f64 / population as f64 };
        VerificationReport {
            check_name: check_name.into(),
            population,
            violations,
            fraction,
            threshold,
            passed: fraction <= threshold,
            parameters,
            violation_examples,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn example<T: Scalar>(grid: &SampleGrid<T>, index: usize, detail: String) -> ViolationExample {
    let z = grid.center_of(index);
    let (i, j) = grid.coords(index);
    ViolationExample {
        point: [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)],
        pixel: [i, j],
        detail,
    }
}

/// Outcome of testing one pixel: `None` when the pixel is outside the
/// population, `Some(None)` for a pass, `Some(Some(detail))` for a violation.
type PixelOutcome = Option<Option<String>>;

fn tally<T: Scalar>(
    name: &str,
    grid: &SampleGrid<T>,
    outcomes: Vec<PixelOutcome>,
    threshold: f64,
    parameters: ReportParameters,
) -> VerificationReport {
    let mut population = 0;
    let mut violations = 0;
    let mut examples = Vec::new();
    for (k, o) in outcomes.into_iter().enumerate() {
        let Some(o) = o else { continue };
        population += 1;
        if let Some(detail) = o {
            violations += 1;
            if examples.len() < MAX_EXAMPLES {
                examples.push(example(grid, k, detail));
            }
        }
    }
    VerificationReport::new(name, population, violations, threshold, parameters, examples)
}

/// Pixels set in `inner` but not in `outer`, relative to the size of `inner`.
pub fn check_containment<T: Scalar>(inner: &Mask<T>, outer: &Mask<T>, threshold: f64) -> Result<VerificationReport> {
    inner.grid().check_same(outer.grid())?;
    let outcomes = inner
        .bits()
        .iter()
        .zip(outer.bits())
        .map(|(&a, &b)| a.then(|| (!b).then(|| "set in inner, unset in outer".to_string())))
        .collect();
    Ok(tally(
        "containment",
        inner.grid(),
        outcomes,
        threshold,
        ReportParameters::from_grid(inner.grid()),
    ))
}

/// For each escaping pixel `z` and generator `g`, re-classifies `g(z)`
/// directly; a bounded witness at the image is a violation. One report per
/// generator.
pub fn check_forward_invariance<T: Scalar>(
    field: &EscapeField<T>,
    gens: &[Generator<T>],
    threshold: f64,
) -> Result<Vec<VerificationReport>> {
    let classifier = Classifier::new(gens, field.depth, &field.params)?;
    gens.iter()
        .map(|g| {
            let outcomes = par_pixels(&field.grid, |k, z| {
                if field.verdicts[k] != Verdict::EscapingAll {
                    return Ok(None);
                }
                let Evaluation::Finite(w) = g.eval(z)? else {
                    return Ok(None);
                };
                let image = classifier.summarize(w)?;
                Ok(Some((image.verdict == Verdict::Bounded).then(|| {
                    format!("image {} has a bounded witness", fmt_point(w))
                })))
            })?;
            Ok(tally(
                &format!("forward_invariance[{}]", g.name),
                &field.grid,
                outcomes,
                threshold,
                ReportParameters::from_field(field).with_generator(&g.name),
            ))
        })
        .collect()
}

/// Membership form of `g^{-1}(I) ⊆ I`: for each pixel whose image
/// re-classifies as escaping, the pixel itself must be escaping.
pub fn check_backward_invariance<T: Scalar>(
    field: &EscapeField<T>,
    gens: &[Generator<T>],
    threshold: f64,
) -> Result<Vec<VerificationReport>> {
    let classifier = Classifier::new(gens, field.depth, &field.params)?;
    gens.iter()
        .map(|g| {
            let outcomes = par_pixels(&field.grid, |k, z| {
                let Evaluation::Finite(w) = g.eval(z)? else {
                    return Ok(None);
                };
                if classifier.summarize(w)?.verdict != Verdict::EscapingAll {
                    return Ok(None);
                }
                Ok(Some((field.verdicts[k] != Verdict::EscapingAll).then(|| {
                    format!("image {} escapes but the point does not", fmt_point(w))
                })))
            })?;
            Ok(tally(
                &format!("backward_invariance[{}]", g.name),
                &field.grid,
                outcomes,
                threshold,
                ReportParameters::from_field(field).with_generator(&g.name),
            ))
        })
        .collect()
}

/// Escaping-pixel density as the violation fraction.
pub fn check_emptiness<T: Scalar>(field: &EscapeField<T>, threshold: f64) -> VerificationReport {
    let outcomes = field
        .verdicts
        .iter()
        .map(|&v| Some((v == Verdict::EscapingAll).then(|| "escaping pixel".to_string())))
        .collect();
    tally("emptiness", &field.grid, outcomes, threshold, ReportParameters::from_field(field))
}

fn fmt_point<T: Scalar>(z: num_complex::Complex<T>) -> String {
    format!("{}{:+}i", z.re, z.im)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskComparison {
    pub jaccard: f64,
    pub sym_diff_fraction: f64,
    pub only_left: usize,
    pub only_right: usize,
    pub both: usize,
}

/// Jaccard index and symmetric-difference counts; two empty masks have
/// Jaccard index 1.
pub fn compare_masks<T: Scalar>(a: &Mask<T>, b: &Mask<T>) -> Result<MaskComparison> {
    a.grid().check_same(b.grid())?;
    let (mut only_left, mut only_right, mut both) = (0, 0, 0);
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        match (x, y) {
            (true, true) => both += 1,
            (true, false) => only_left += 1,
            (false, true) => only_right += 1,
            (false, false) => {}
        }
    }
    let union = both + only_left + only_right;
    Ok(MaskComparison {
        jaccard: if union == 0 { 1.0 } else { both as f64 / union as f64 },
        sym_diff_fraction: (only_left + only_right) as f64 / a.bits().len() as f64,
        only_left,
        only_right,
        both,
    })
}

fn neighbor<T: Scalar>(m: &Mask<T>, i: usize, j: usize, di: isize, dj: isize) -> bool {
    let (w, h) = (m.grid().width as isize, m.grid().height as isize);
    let (x, y) = (i as isize + di, j as isize + dj);
    // outside the window counts as unset
    x >= 0 && y >= 0 && x < w && y < h && m.get(x as usize, y as usize)
}

/// Set pixels with at least one unset 4-neighbor; pixels on the window
/// frame count as touching the unset outside. Used as the pixel proxy for
/// the Julia set `∂I(S)`.
pub fn extract_boundary<T: Scalar>(m: &Mask<T>) -> Mask<T> {
    let grid = *m.grid();
    Mask::from_fn(grid, |i, j| {
        m.get(i, j)
            && [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .any(|&(di, dj)| !neighbor(m, i, j, di, dj))
    })
}

/// Fraction of set pixels whose whole 3×3 neighborhood is set.
pub fn thinness_statistic<T: Scalar>(m: &Mask<T>) -> f64 {
    let grid = m.grid();
    let set = m.count();
    if set == 0 {
        return 0.0;
    }
    let mut interior = 0usize;
    for j in 0..grid.height {
        for i in 0..grid.width {
            if m.get(i, j)
                && (-1..=1).all(|dj| (-1..=1).all(|di| neighbor(m, i, j, di, dj)))
            {
                interior += 1;
            }
        }
    }
    interior as f64 / set as f64
}
