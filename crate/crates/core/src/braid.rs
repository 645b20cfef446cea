//! Artin braid words and their induced permutations.
//!
//! Strands are numbered from 1 as in the usual presentation of B_N; the
//! letter `b_i` crosses strands i and i+1. Permutations compose as functions,
//! `(p ∘ r)(x) = p(r(x))`, which is the convention the colored Burau twist
//! needs for `^{στ}f = ^σ(^τ f)`.

use std::fmt;
use std::ops::RangeInclusive;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("generator index {index} out of range for {n_strands} strands")]
    IndexOutOfRange { index: usize, n_strands: usize },
    #[error("strand count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("not a permutation of 1..={0}")]
    NotBijective(usize),
    #[error("empty generator index range")]
    EmptyRange,
    #[error("cannot parse braid letter {0:?}")]
    Parse(String),
    #[error("unsupported strand count {0}")]
    StrandCount(usize),
}

/// A bijection of `{1..N}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    // 0-based images; images[j] is the image of strand j+1, minus one.
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    /// Builds a permutation from 1-based images, `images[j-1] = p(j)`.
    pub fn from_images(images: &[usize]) -> Result<Self, BraidError> {
        let zero_based: Vec<usize> = images.iter().map(|&x| x.wrapping_sub(1)).collect();
        Self::from_zero_based(&zero_based)
    }

    /// Builds a permutation from 0-based images (the wire representation).
    pub fn from_zero_based(images: &[usize]) -> Result<Self, BraidError> {
        let n = images.len();
        if n > 256 {
            return Err(BraidError::StrandCount(n));
        }
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n || seen[x] {
                return Err(BraidError::NotBijective(n));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.iter().map(|&x| x as u8).collect(),
        })
    }

    /// The simple transposition swapping `i` and `i+1`.
    pub fn transposition(n: usize, i: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(i - 1, i);
        p
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `p(x)` for 1-based `x`.
    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1] as usize + 1
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize + 1).collect()
    }

    pub fn zero_based(&self) -> &[u8] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(j, &x)| j == x as usize)
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, BraidError> {
        if self.len() != other.len() {
            return Err(BraidError::SizeMismatch(self.len(), other.len()));
        }
        Ok(Permutation {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.len()];
        for (j, &x) in self.images.iter().enumerate() {
            inv[x as usize] = j as u8;
        }
        Permutation { images: inv }
    }

    /// In-place `self ← self ∘ s_i`.
    #[inline]
    pub fn then_transposition(&mut self, i: usize) {
        self.images.swap(i - 1, i);
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images())
    }
}

/// One Artin generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    index: u8,
    inverse: bool,
}

impl Letter {
    pub fn pos(index: usize) -> Self {
        Letter {
            index: index as u8,
            inverse: false,
        }
    }

    pub fn neg(index: usize) -> Self {
        Letter {
            index: index as u8,
            inverse: true,
        }
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn inverted(self) -> Self {
        Letter {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    /// Signed byte form: `+i` for `b_i`, `-i` for `b_i^{-1}`.
    pub fn to_i8(self) -> i8 {
        if self.inverse {
            -(self.index as i8)
        } else {
            self.index as i8
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            0 | i8::MIN => None,
            v if v > 0 => Some(Letter::pos(v as usize)),
            v => Some(Letter::neg(v.unsigned_abs() as usize)),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.inverse { 'B' } else { 'b' };
        write!(f, "{c}{}", self.index)
    }
}

/// A word `b_{i1}^{e1} ... b_{ik}^{ek}` in the Artin generators of B_N.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    n_strands: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn identity(n_strands: usize) -> Self {
        BraidWord {
            n_strands,
            letters: Vec::new(),
        }
    }

    pub fn new(n_strands: usize, letters: Vec<Letter>) -> Result<Self, BraidError> {
        if !(2..=128).contains(&n_strands) {
            return Err(BraidError::StrandCount(n_strands));
        }
        for l in &letters {
            if l.index() == 0 || l.index() >= n_strands {
                return Err(BraidError::IndexOutOfRange {
                    index: l.index(),
                    n_strands,
                });
            }
        }
        Ok(BraidWord { n_strands, letters })
    }

    /// Parses the diagnostic form `b1 B2 b3` (capital letter = inverse).
    pub fn parse(n_strands: usize, text: &str) -> Result<Self, BraidError> {
        let letters = text
            .split_whitespace()
            .map(|tok| {
                let (inverse, digits) = match tok.split_at(1) {
                    ("b", rest) => (false, rest),
                    ("B", rest) => (true, rest),
                    _ => return Err(BraidError::Parse(tok.to_string())),
                };
                let index: usize = digits
                    .parse()
                    .map_err(|_| BraidError::Parse(tok.to_string()))?;
                if index > 127 {
                    return Err(BraidError::Parse(tok.to_string()));
                }
                Ok(if inverse {
                    Letter::neg(index)
                } else {
                    Letter::pos(index)
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n_strands, letters)
    }

    pub fn n_strands(&self) -> usize {
        self.n_strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self · other` (no reduction).
    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.n_strands != other.n_strands {
            return Err(BraidError::SizeMismatch(self.n_strands, other.n_strands));
        }
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            n_strands: self.n_strands,
            letters,
        })
    }

    /// Group inverse: reversed word with every letter inverted.
    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            n_strands: self.n_strands,
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// Induced permutation `σ_{i1} ∘ ... ∘ σ_{ik}`; letter signs are ignored.
    pub fn permutation(&self) -> Permutation {
        let mut p = Permutation::identity(self.n_strands);
        for l in &self.letters {
            p.then_transposition(l.index());
        }
        p
    }

    /// Deletes adjacent `b_i^e b_i^{-e}` pairs until none remain.
    pub fn free_reduce(&self) -> BraidWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inverted()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        BraidWord {
            n_strands: self.n_strands,
            letters: out,
        }
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inverted())
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Shorthand for [`BraidWord::permutation`].
pub fn permutation_of(word: &BraidWord) -> Permutation {
    word.permutation()
}

fn check_range(n_strands: usize, range: &RangeInclusive<usize>) -> Result<(), BraidError> {
    if range.is_empty() {
        return Err(BraidError::EmptyRange);
    }
    if *range.start() == 0 || *range.end() >= n_strands {
        return Err(BraidError::IndexOutOfRange {
            index: if *range.start() == 0 { 0 } else { *range.end() },
            n_strands,
        });
    }
    Ok(())
}

/// `length` i.i.d. uniform letters over `range × {±1}`, freely reduced.
pub fn random_word<R: Rng + ?Sized>(
    n_strands: usize,
    length: usize,
    range: RangeInclusive<usize>,
    rng: &mut R,
) -> Result<BraidWord, BraidError> {
    check_range(n_strands, &range)?;
    let letters = (0..length)
        .map(|_| {
            let i = rng.gen_range(range.clone());
            if rng.gen_bool(0.5) {
                Letter::pos(i)
            } else {
                Letter::neg(i)
            }
        })
        .collect();
    Ok(BraidWord::new(n_strands, letters)?.free_reduce())
}

/// `free_reduce(z · w · z⁻¹)`.
pub fn conjugate(z: &BraidWord, w: &BraidWord) -> Result<BraidWord, BraidError> {
    Ok(z.concat(w)?.concat(&z.inverse())?.free_reduce())
}

/// Simple transpositions `s_{j1}, ..., s_{jm}` (as indices) with
/// `p ∘ s_{j1} ∘ ... ∘ s_{jm} = id`, found by bubble-sorting the image list.
pub fn sorting_transpositions(p: &Permutation) -> Vec<usize> {
    let mut images = p.zero_based().to_vec();
    let mut out = Vec::new();
    let n = images.len();
    loop {
        let mut swapped = false;
        for j in 0..n.saturating_sub(1) {
            if images[j] > images[j + 1] {
                images.swap(j, j + 1);
                out.push(j + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    out
}

/// A random word with trivial induced permutation: a random word `w` followed
/// by the positive lift of a sorting factorization of `σ_w⁻¹`.
pub fn make_pure_word<R: Rng + ?Sized>(
    n_strands: usize,
    length: usize,
    range: RangeInclusive<usize>,
    rng: &mut R,
) -> Result<BraidWord, BraidError> {
    let w = random_word(n_strands, length, range, rng)?;
    let tail: Vec<Letter> = sorting_transpositions(&w.permutation())
        .into_iter()
        .map(Letter::pos)
        .collect();
    let tail = BraidWord::new(n_strands, tail)?;
    Ok(w.concat(&tail)?.free_reduce())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(n: usize, s: &str) -> BraidWord {
        BraidWord::parse(n, s).unwrap()
    }

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    #[test]
    fn permutation_of_small_words() {
        assert_eq!(w(3, "b1").permutation(), perm(&[2, 1, 3]));
        assert_eq!(w(3, "b1 b2").permutation(), perm(&[2, 3, 1]));
        assert!(w(3, "b1 B1").permutation().is_identity());
        assert!(BraidWord::identity(5).permutation().is_identity());
    }

    #[test]
    fn composition_convention() {
        let p = perm(&[2, 1, 3]);
        let r = perm(&[1, 3, 2]);
        // direct application: x -> p(r(x))
        let expected: Vec<usize> = (1..=3).map(|x| p.apply(r.apply(x))).collect();
        assert_eq!(expected, vec![2, 3, 1]);
        assert_eq!(p.compose(&r).unwrap(), perm(&[2, 3, 1]));
        assert_eq!(Permutation::identity(3).compose(&r).unwrap(), r);
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
        assert!(p.compose(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(&[1, 1, 3]).is_err());
        assert!(Permutation::from_images(&[0, 1, 2]).is_err());
        assert!(Permutation::from_images(&[1, 2, 4]).is_err());
    }

    #[test]
    fn free_reduction_examples() {
        assert!(w(3, "b1 B1").free_reduce().is_empty());
        assert_eq!(w(3, "b1 b2 B2 b1").free_reduce(), w(3, "b1 b1"));
        let reduced = w(4, "b1 b2 B1 b3");
        assert_eq!(reduced.free_reduce(), reduced);
        assert_eq!(
            w(4, "b1 b2 b3 B3 B2 B1").free_reduce(),
            BraidWord::identity(4)
        );
    }

    #[test]
    fn text_form_round_trips() {
        let word = w(5, "b1 B2 b3 B4");
        assert_eq!(word.to_string(), "b1 B2 b3 B4");
        assert_eq!(BraidWord::parse(5, &word.to_string()).unwrap(), word);
        assert!(BraidWord::parse(3, "b3").is_err());
        assert!(BraidWord::parse(3, "c1").is_err());
        assert!(BraidWord::parse(3, "b0").is_err());
    }

    #[test]
    fn random_word_is_deterministic_and_reduced() {
        let a = random_word(16, 200, 1..=15, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = random_word(16, 200, 1..=15, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert!(a.is_freely_reduced());
        assert!(
            random_word(16, 0, 1..=15, &mut ChaCha8Rng::seed_from_u64(3))
                .unwrap()
                .is_empty()
        );
        let low = random_word(16, 300, 1..=7, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert!(low.letters().iter().all(|l| (1..=7).contains(&l.index())));
        #[allow(clippy::reversed_empty_ranges)]
        let empty = random_word(16, 5, 3..=2, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(empty, Err(BraidError::EmptyRange));
        assert!(random_word(16, 5, 1..=16, &mut ChaCha8Rng::seed_from_u64(4)).is_err());
    }

    #[test]
    fn conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = random_word(6, 20, 1..=5, &mut rng).unwrap();
        let x = random_word(6, 20, 1..=5, &mut rng).unwrap();
        assert_eq!(conjugate(&BraidWord::identity(6), &x).unwrap(), x);
        assert!(conjugate(&z, &BraidWord::identity(6)).unwrap().is_empty());
        let c = conjugate(&z, &x).unwrap();
        let expected = z
            .permutation()
            .compose(&x.permutation().compose(&z.permutation().inverse()).unwrap())
            .unwrap();
        assert_eq!(c.permutation(), expected);
        let pure = make_pure_word(6, 20, 1..=5, &mut rng).unwrap();
        assert!(conjugate(&z, &pure).unwrap().permutation().is_identity());
    }

    #[test]
    fn pure_words_have_trivial_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let p = make_pure_word(3, 15, 1..=2, &mut rng).unwrap();
            assert!(p.permutation().is_identity());
            let p = make_pure_word(16, 64, 1..=7, &mut rng).unwrap();
            assert!(p.permutation().is_identity());
            assert!(p.letters().iter().all(|l| (1..=7).contains(&l.index())));
        }
        // Already pure: the sorting tail is empty.
        assert!(sorting_transpositions(&w(4, "b1 b1 B3 B3").permutation()).is_empty());
    }

    fn arb_word(n: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
        prop::collection::vec((1..n, any::<bool>()), 0..max_len).prop_map(move |ls| {
            let letters = ls
                .into_iter()
                .map(|(i, inv)| if inv { Letter::neg(i) } else { Letter::pos(i) })
                .collect();
            BraidWord::new(n, letters).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn permutation_is_a_homomorphism(u in arb_word(8, 40), v in arb_word(8, 40)) {
            let uv = u.concat(&v).unwrap();
            prop_assert_eq!(uv.permutation(), u.permutation().compose(&v.permutation()).unwrap());
        }

        #[test]
        fn free_reduce_keeps_permutation(u in arb_word(5, 60)) {
            let r = u.free_reduce();
            prop_assert!(r.is_freely_reduced());
            prop_assert_eq!(r.permutation(), u.permutation());
            prop_assert_eq!(r.free_reduce(), r.clone());
        }

        #[test]
        fn inverse_word_cancels(u in arb_word(6, 40)) {
            prop_assert!(u.concat(&u.inverse()).unwrap().free_reduce().is_empty());
        }
    }
}
