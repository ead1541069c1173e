//! Semigroup words, orbit iteration and point classification against the
//! escaping-set definition, plus preimage solvers.
//!
//! The quantifier "for all f in S" is truncated to the words of length at
//! most `depth`; "f^n(z) -> ∞" is truncated to `max_iter` applications with
//! escape radius `escape_radius`.

mod preimage;
mod words;

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::expr::{Evaluation, Generator};
use crate::field::Verdict;
use crate::scalar::Scalar;

pub use preimage::{exp_affine_preimages, exp_affine_template, newton_preimages, ExpAffine};
pub use words::{enumerate_words, enumerate_words_capped, word_count, Word, DEFAULT_WORD_CAP};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e10;
pub const DEFAULT_MAX_ITER: u32 = 100;
pub const DEFAULT_DEPTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitParams<T> {
    pub escape_radius: T,
    pub max_iter: u32,
    /// When false, an overflow ends the orbit without a verdict.
    pub overflow_is_escape: bool,
}

impl<T: Scalar> Default for OrbitParams<T> {
    fn default() -> Self {
        OrbitParams {
            escape_radius: T::lit(DEFAULT_ESCAPE_RADIUS),
            max_iter: DEFAULT_MAX_ITER,
            overflow_is_escape: true,
        }
    }
}

impl<T: Scalar> OrbitParams<T> {
    pub fn new(escape_radius: T, max_iter: u32) -> Result<Self> {
        let p = OrbitParams { escape_radius, max_iter, overflow_is_escape: true };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.escape_radius.is_finite() || self.escape_radius <= T::one() {
            return Err(Error::InvalidParameter("escape radius must be finite and > 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrbitStatus<T> {
    /// Left the disc of radius R (or overflowed) after `iter` word applications.
    Escaped { iter: u32, modulus: T, overflowed: bool },
    /// Still inside the disc after the full budget.
    MaxedOut { final_value: Complex<T> },
    /// Overflowed while overflow is not counted as escape.
    Overflow { iter: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitResult<T> {
    pub status: OrbitStatus<T>,
    /// Number of word applications performed.
    pub trace_len: u32,
}

impl<T> OrbitResult<T> {
    pub fn escaped(&self) -> bool {
        matches!(self.status, OrbitStatus::Escaped { .. })
    }

    pub fn maxed_out(&self) -> bool {
        matches!(self.status, OrbitStatus::MaxedOut { .. })
    }

    pub fn escape_iter(&self) -> Option<u32> {
        match self.status {
            OrbitStatus::Escaped { iter, .. } => Some(iter),
            _ => None,
        }
    }
}

/// Applies the generators named by `w` in order: `gens[w[0]]` first.
pub fn apply_word<T: Scalar>(w: &Word, gens: &[Generator<T>], z: Complex<T>) -> Result<Evaluation<T>> {
    let mut v = z;
    for &i in w.indices() {
        let g = gens.get(i).ok_or_else(|| {
            Error::InvalidParameter(format!("word index {i} out of range for {} generators", gens.len()))
        })?;
        match g.eval(v)? {
            Evaluation::Finite(next) => v = next,
            Evaluation::Overflow => return Ok(Evaluation::Overflow),
        }
    }
    Ok(Evaluation::Finite(v))
}

/// Iterates the semigroup element `w` from `z0` until escape or budget exhaustion.
pub fn iterate_word<T: Scalar>(
    w: &Word,
    gens: &[Generator<T>],
    z0: Complex<T>,
    params: &OrbitParams<T>,
) -> Result<OrbitResult<T>> {
    params.validate()?;
    w.validate(gens.len())?;
    iterate_unchecked(w, gens, z0, params)
}

fn iterate_unchecked<T: Scalar>(
    w: &Word,
    gens: &[Generator<T>],
    z0: Complex<T>,
    params: &OrbitParams<T>,
) -> Result<OrbitResult<T>> {
    let mut z = z0;
    for n in 1..=params.max_iter {
        match apply_word(w, gens, z)? {
            Evaluation::Overflow => {
                let status = if params.overflow_is_escape {
                    OrbitStatus::Escaped { iter: n, modulus: T::infinity(), overflowed: true }
                } else {
                    OrbitStatus::Overflow { iter: n }
                };
                return Ok(OrbitResult { status, trace_len: n });
            }
            Evaluation::Finite(next) => {
                z = next;
                let modulus = z.norm();
                if modulus > params.escape_radius {
                    return Ok(OrbitResult {
                        status: OrbitStatus::Escaped { iter: n, modulus, overflowed: false },
                        trace_len: n,
                    });
                }
            }
        }
    }
    Ok(OrbitResult {
        status: OrbitStatus::MaxedOut { final_value: z },
        trace_len: params.max_iter,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointVerdict<T> {
    /// Every tested word escaped.
    EscapingAll,
    /// The lexicographically first word whose orbit stayed bounded.
    BoundedWitness { word: Word, result: OrbitResult<T> },
    Undetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointClass<T> {
    pub verdict: PointVerdict<T>,
    pub per_word: BTreeMap<Word, OrbitResult<T>>,
}

impl<T: Scalar> PointClass<T> {
    pub fn is_escaping(&self) -> bool {
        matches!(self.verdict, PointVerdict::EscapingAll)
    }

    pub fn summary(&self) -> Verdict {
        match self.verdict {
            PointVerdict::EscapingAll => Verdict::EscapingAll,
            PointVerdict::BoundedWitness { .. } => Verdict::Bounded,
            PointVerdict::Undetermined => Verdict::Undetermined,
        }
    }
}

/// Classifies `z` against every word of length at most `depth`.
pub fn classify_point<T: Scalar>(
    z: Complex<T>,
    gens: &[Generator<T>],
    depth: usize,
    params: &OrbitParams<T>,
) -> Result<PointClass<T>> {
    Classifier::new(gens, depth, params)?.classify(z)
}

/// Per-pixel outcome, without the per-word detail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointSummary {
    pub verdict: Verdict,
    /// Minimum escape iteration over all words that escaped.
    pub first_escape_iter: Option<u32>,
}

/// A generator set together with its enumerated words, reusable across points.
#[derive(Clone, Debug)]
pub struct Classifier<'a, T> {
    gens: &'a [Generator<T>],
    words: Vec<Word>,
    params: OrbitParams<T>,
}

impl<'a, T: Scalar> Classifier<'a, T> {
    pub fn new(gens: &'a [Generator<T>], depth: usize, params: &OrbitParams<T>) -> Result<Self> {
        params.validate()?;
        let words = enumerate_words(gens.len(), depth)?;
        Ok(Classifier { gens, words, params: *params })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn params(&self) -> &OrbitParams<T> {
        &self.params
    }

    pub fn generators(&self) -> &'a [Generator<T>] {
        self.gens
    }

    pub fn classify(&self, z: Complex<T>) -> Result<PointClass<T>> {
        let mut per_word = BTreeMap::new();
        for w in &self.words {
            per_word.insert(w.clone(), iterate_unchecked(w, self.gens, z, &self.params)?);
        }
        // BTreeMap iterates in lexicographic word order
        let witness = per_word.iter().find(|(_, r)| r.maxed_out());
        let verdict = if let Some((w, r)) = witness {
            PointVerdict::BoundedWitness { word: w.clone(), result: *r }
        } else if per_word.values().all(|r| r.escaped()) {
            PointVerdict::EscapingAll
        } else {
            PointVerdict::Undetermined
        };
        Ok(PointClass { verdict, per_word })
    }

    pub fn summarize(&self, z: Complex<T>) -> Result<PointSummary> {
        let mut any_maxed = false;
        let mut any_overflow = false;
        let mut first = None::<u32>;
        for w in &self.words {
            let r = iterate_unchecked(w, self.gens, z, &self.params)?;
            match r.status {
                OrbitStatus::Escaped { iter, .. } => {
                    first = Some(first.map_or(iter, |f| f.min(iter)));
                }
                OrbitStatus::MaxedOut { .. } => any_maxed = true,
                OrbitStatus::Overflow { .. } => any_overflow = true,
            }
        }
        let verdict = if any_maxed {
            Verdict::Bounded
        } else if any_overflow {
            Verdict::Undetermined
        } else {
            Verdict::EscapingAll
        };
        Ok(PointSummary { verdict, first_escape_iter: first })
    }
}
