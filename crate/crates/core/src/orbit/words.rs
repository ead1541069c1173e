use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of enumerated words.
pub const DEFAULT_WORD_CAP: usize = 10_000;

/// One semigroup element as a sequence of generator indices in application
/// order: `[0, 1]` applies generator 0 first, then generator 1, i.e. `g1 ∘ g0`.
///
/// Ordering is plain lexicographic on the index sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("a word needs at least one generator".into()));
        }
        Ok(Word(indices))
    }

    pub fn single(index: usize) -> Self {
        Word(vec![index])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Checks every index against the generator count.
    pub fn validate(&self, generator_count: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= generator_count) {
            Some(i) => Err(Error::InvalidParameter(format!(
                "word index {i} out of range for {generator_count} generators"
            ))),
            None => Ok(()),
        }
    }

    /// Composition notation with the last-applied map leftmost, e.g. `g∘f`.
    pub fn composition_notation(&self, names: &[&str]) -> String {
        self.0
            .iter()
            .rev()
            .map(|&i| names.get(i).copied().unwrap_or("?"))
            .collect::<Vec<_>>()
            .join("∘")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

/// Number of words of length `1..=depth` over `k` letters.
pub fn word_count(k: usize, depth: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..depth {
        level = level.saturating_mul(k as u128);
        total = total.saturating_add(level);
    }
    total
}

/// All words of length `1..=depth` over `k` generators, shortest first and
/// lexicographic within each length.
pub fn enumerate_words(k: usize, depth: usize) -> Result<Vec<Word>> {
    enumerate_words_capped(k, depth, DEFAULT_WORD_CAP)
}

pub fn enumerate_words_capped(k: usize, depth: usize, cap: usize) -> Result<Vec<Word>> {
    if k == 0 || depth == 0 {
        return Err(Error::InvalidParameter("generator count and depth must be at least 1".into()));
    }
    let count = word_count(k, depth);
    if count > cap as u128 {
        return Err(Error::BudgetExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..depth {
        let next: Vec<Vec<usize>> = level
            .iter()
            .flat_map(|prefix| {
                (0..k).map(move |i| {
                    let mut w = prefix.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
        out.extend(next.iter().cloned().map(Word));
        level = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(v: &[&[usize]]) -> Vec<Word> {
        v.iter().map(|w| Word(w.to_vec())).collect()
    }

    #[test]
    fn cyclic_semigroup() {
        assert_eq!(enumerate_words(1, 3).unwrap(), words(&[&[0], &[0, 0], &[0, 0, 0]]));
    }

    #[test]
    fn two_generators_depth_two() {
        assert_eq!(
            enumerate_words(2, 2).unwrap(),
            words(&[&[0], &[1], &[0, 0], &[0, 1], &[1, 0], &[1, 1]])
        );
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_words(2, 5).unwrap().len(), 62);
        assert_eq!(word_count(3, 4), 3 + 9 + 27 + 81);
        // brute-force count over all index tuples
        let brute: usize = (1..=4).map(|l| 3usize.pow(l)).sum();
        assert_eq!(enumerate_words(3, 4).unwrap().len(), brute);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_words(2, 14),
            Err(Error::BudgetExceeded { count: 32766, cap: 10_000 })
        ));
        assert_eq!(enumerate_words(2, 12).unwrap().len(), 8190);
        assert!(enumerate_words_capped(2, 3, 13).is_err());
        assert!(enumerate_words(0, 3).is_err());
        assert!(enumerate_words(2, 0).is_err());
    }

    #[test]
    fn notation() {
        let w = Word::new(vec![0, 1, 1]).unwrap();
        assert_eq!(w.to_string(), "[0,1,1]");
        assert_eq!(w.composition_notation(&["f", "g"]), "g∘g∘f");
        assert!(Word::new(vec![]).is_err());
        assert!(w.validate(2).is_ok());
        assert!(w.validate(1).is_err());
    }

    #[test]
    fn lexicographic_order() {
        let a = Word(vec![0, 1]);
        let b = Word(vec![1]);
        assert!(a < b);
    }
}
