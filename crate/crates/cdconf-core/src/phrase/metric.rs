//! Word lengths and the distance between phrases.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::{Phrase, PhraseError, Word};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhraseMetricParams {
    b: f64,
}

impl PhraseMetricParams {
    pub fn new(b: f64) -> Result<Self, PhraseError> {
        if b > 0.0 && b < 1.0 {
            Ok(PhraseMetricParams { b })
        } else {
            Err(PhraseError::BadMetricParameter(b))
        }
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

impl Default for PhraseMetricParams {
    fn default() -> Self {
        PhraseMetricParams { b: 0.5 }
    }
}

/// Sum of symbol lengths; a real coefficient other than ±1 is one more
/// constant symbol.
pub fn word_length(w: &Word) -> u32 {
    let symbols: u32 = w.tree.leaves().iter().map(|l| l.length()).sum();
    symbols + u32::from(!w.coeff.abs().is_one())
}

/// Distance between the degree-j components. Identical components are at
/// distance 0; otherwise the largest `max(l(w), l(w'))` over unequal pairs,
/// a missing side counting as the zero word.
fn component_distance(a: &[&Word], b: &[&Word]) -> u32 {
    if a == b {
        return 0;
    }
    if a.is_empty() || b.is_empty() {
        return a.iter().chain(b).map(|w| word_length(w)).max().unwrap_or(0);
    }
    let mut best = 0;
    for x in a {
        for y in b {
            if x != y {
                best = best.max(word_length(x).max(word_length(y)));
            }
        }
    }
    best
}

pub fn phrase_distance(nu: &Phrase, mu: &Phrase, params: &PhraseMetricParams) -> f64 {
    let mut degrees = nu.degrees();
    degrees.extend(mu.degrees());
    degrees.sort_unstable();
    degrees.dedup();
    degrees.into_iter().map(|j| f64::from(component_distance(&nu.component(j), &mu.component(j))) * params.b.powi(j as i32)).sum()
}

/// `d(a, c) − d(a, b) − d(b, c)`; positive values break the triangle
/// inequality.
pub fn triangle_defect(a: &Phrase, b: &Phrase, c: &Phrase, params: &PhraseMetricParams) -> f64 {
    phrase_distance(a, c, params) - phrase_distance(a, b, params) - phrase_distance(b, c, params)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn lengths() {
        let w = parse("[0,1,0,0] z^3 [0,0,1,0]", 2).unwrap();
        assert_eq!(word_length(&w.words()[0]), 6);
        let s = parse("[3] z", 2).unwrap();
        assert_eq!(word_length(&s.words()[0]), 3);
        let n = parse("-e", 2).unwrap();
        assert_eq!(word_length(&n.words()[0]), 1);
    }

    #[test]
    fn distance_basics() {
        let p = PhraseMetricParams::default();
        let a = parse("z^2 + [0,1,0,0] z", 2).unwrap();
        assert_eq!(phrase_distance(&a, &a, &p), 0.0);
        // single degree-3 difference of length 4: 4 b^3
        let b = parse("z^2 + [0,1,0,0] z + z^3", 2).unwrap();
        assert_eq!(phrase_distance(&a, &b, &p), 4.0 * 0.125);
        assert_eq!(phrase_distance(&b, &a, &p), phrase_distance(&a, &b, &p));
        assert!(PhraseMetricParams::new(1.0).is_err());
    }
}
