//! The subalgebras A(0) and A(1) of the mod 2 Steenrod algebra.
//!
//! A(1) has basis 1, Sq1, Sq2, Sq1Sq2, Sq2Sq1, Sq1Sq2Sq1, Sq2Sq1Sq2,
//! Sq2Sq1Sq2Sq1 subject to Sq1Sq1 = 0 and Sq2Sq2 = Sq1Sq2Sq1.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A generator of A(1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sq {
    Sq1,
    Sq2,
}

impl Sq {
    pub fn degree(self) -> i32 {
        match self {
            Sq::Sq1 => 1,
            Sq::Sq2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sq::Sq1 => "Sq1",
            Sq::Sq2 => "Sq2",
        }
    }
}

/// An admissible basis element of A(1), indexed 0..8 in the order above.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(u8);

use Sq::{Sq1, Sq2};

const LETTERS: [&[Sq]; 8] = [
    &[],
    &[Sq1],
    &[Sq2],
    &[Sq1, Sq2],
    &[Sq2, Sq1],
    &[Sq1, Sq2, Sq1],
    &[Sq2, Sq1, Sq2],
    &[Sq2, Sq1, Sq2, Sq1],
];

const DEGREES: [i32; 8] = [0, 1, 2, 3, 3, 4, 5, 6];

// Left multiplication by Sq1 and Sq2 on the basis; None means zero.
const SQ1_TIMES: [Option<u8>; 8] = [Some(1), None, Some(3), None, Some(5), None, Some(7), None];
const SQ2_TIMES: [Option<u8>; 8] = [Some(2), Some(4), Some(5), Some(6), None, Some(7), None, None];

impl Word {
    pub const ONE: Word = Word(0);
    pub const SQ1: Word = Word(1);
    pub const SQ2: Word = Word(2);
    pub const SQ1SQ2: Word = Word(3);
    pub const SQ2SQ1: Word = Word(4);
    pub const SQ1SQ2SQ1: Word = Word(5);
    pub const SQ2SQ1SQ2: Word = Word(6);
    pub const TOP: Word = Word(7);

    pub fn all() -> impl Iterator<Item = Word> {
        (0..8).map(Word)
    }

    pub fn from_index(i: usize) -> Word {
        assert!(i < 8, "A(1) has eight basis elements");
        Word(i as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn degree(self) -> i32 {
        DEGREES[self.index()]
    }

    /// Letters left to right; acting on a module element applies the last letter first.
    pub fn letters(self) -> &'static [Sq] {
        LETTERS[self.index()]
    }

    pub fn name(self) -> String {
        if self.0 == 0 {
            "1".to_string()
        } else {
            self.letters().iter().map(|s| s.name()).collect()
        }
    }

    /// `s * self`, or `None` if the product is zero.
    pub fn left_mul(self, s: Sq) -> Option<Word> {
        let t = match s {
            Sq::Sq1 => SQ1_TIMES,
            Sq::Sq2 => SQ2_TIMES,
        };
        t[self.index()].map(Word)
    }

    /// `self * rhs` in A(1), or `None` if zero.
    pub fn mul(self, rhs: Word) -> Option<Word> {
        let mut acc = Some(rhs);
        for &s in self.letters().iter().rev() {
            acc = acc?.left_mul(s);
        }
        acc
    }

    pub fn in_a0(self) -> bool {
        self.0 <= 1
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Reduces a product of generators (left to right) to a basis element,
/// returning `None` when the product is zero. Products are single basis
/// elements in A(1): every nonzero monomial reduces to one admissible word.
pub fn reduce_letters(letters: &[Sq]) -> Option<Word> {
    let mut acc = Some(Word::ONE);
    for &s in letters.iter().rev() {
        acc = acc?.left_mul(s);
    }
    acc
}

/// Which algebra a free module or resolution is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algebra {
    A0,
    A1,
}

impl Algebra {
    pub fn words(self) -> Vec<Word> {
        match self {
            Algebra::A0 => vec![Word::ONE, Word::SQ1],
            Algebra::A1 => Word::all().collect(),
        }
    }

    pub fn generators(self) -> &'static [Sq] {
        match self {
            Algebra::A0 => &[Sq1],
            Algebra::A1 => &[Sq1, Sq2],
        }
    }

    pub fn dim(self) -> usize {
        self.words().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_table() {
        let mut dims = [0usize; 7];
        for w in Word::all() {
            dims[w.degree() as usize] += 1;
        }
        assert_eq!(dims, [1, 1, 1, 2, 1, 1, 1]);
    }

    #[test]
    fn defining_relations() {
        assert_eq!(reduce_letters(&[Sq1, Sq1]), None);
        assert_eq!(reduce_letters(&[Sq2, Sq2]), Some(Word::SQ1SQ2SQ1));
        assert_eq!(reduce_letters(&[Sq1, Sq2, Sq2]), None);
        assert_eq!(reduce_letters(&[Sq2, Sq2, Sq1]), None);
        assert_eq!(reduce_letters(&[Sq1, Sq2, Sq1, Sq2]), Some(Word::TOP));
    }

    #[test]
    fn letters_reduce_to_self() {
        for w in Word::all() {
            assert_eq!(reduce_letters(w.letters()), Some(w));
        }
    }

    #[test]
    fn product_is_associative() {
        for a in Word::all() {
            for b in Word::all() {
                for c in Word::all() {
                    let left = a.mul(b).and_then(|ab| ab.mul(c));
                    let right = b.mul(c).and_then(|bc| a.mul(bc));
                    assert_eq!(left, right, "{a:?} {b:?} {c:?}");
                }
            }
        }
    }
}
