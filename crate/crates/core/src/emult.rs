//! E-Multiplication: the action of a braid word on a (matrix, permutation)
//! pair, evaluated at a fixed set of T-values.
//!
//! One step computes `(M, σ₀) ⋆ b_i^± = (M · ^{σ₀}CB(b_i^±)↓, σ₀ ∘ σ_i)`.
//! Because `CB(b_i^±)` differs from the identity only in row i, the product
//! only touches columns i-1, i and i+1 of `M`, so each letter costs O(N)
//! field operations.

use rand::Rng;
use thiserror::Error;

use crate::braid::{BraidError, BraidWord, Letter, Permutation};
use crate::field::{Fe, Field, FieldError};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmultError {
    #[error("generator index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: state {state}, operand {operand}")]
    DimensionMismatch { state: usize, operand: usize },
    #[error("T-values must avoid 0 and 1")]
    BadTValue,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

/// The substitution values `τ_1..τ_N` for the Laurent variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TValues {
    taus: Vec<Fe>,
}

impl TValues {
    pub fn new(taus: Vec<Fe>) -> Result<Self, EmultError> {
        if taus.iter().any(|&t| t == Fe::ZERO || t == Fe::ONE) {
            return Err(EmultError::BadTValue);
        }
        Ok(TValues { taus })
    }

    pub fn from_u16(values: &[u16]) -> Result<Self, EmultError> {
        Self::new(values.iter().map(|&v| Fe::new(v)).collect())
    }

    /// N uniform draws from `F_q \ {0, 1}`.
    pub fn random<R: Rng + ?Sized>(
        field: &Field,
        n: usize,
        rng: &mut R,
    ) -> Result<Self, EmultError> {
        if field.q() < 4 {
            return Err(EmultError::BadTValue);
        }
        let taus = (0..n)
            .map(|_| Fe::new(rng.gen_range(2..field.q()) as u16))
            .collect();
        Ok(TValues { taus })
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// `τ_j` for 1-based `j`.
    #[inline]
    pub fn tau(&self, j: usize) -> Fe {
        self.taus[j - 1]
    }

    pub fn values(&self) -> &[Fe] {
        &self.taus
    }
}

/// Receives field-operation counts from the E-Multiplication kernel.
pub trait OpTally {
    fn record(&mut self, adds: u64, muls: u64, invs: u64);
}

impl OpTally for () {
    #[inline(always)]
    fn record(&mut self, _: u64, _: u64, _: u64) {}
}

/// Counts additions (incl. subtraction and negation), multiplications and
/// inversions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub adds: u64,
    pub muls: u64,
    pub invs: u64,
    pub letters: u64,
    /// Largest count charged to a single letter.
    pub max_per_letter: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.invs
    }
}

impl OpTally for OpCount {
    fn record(&mut self, adds: u64, muls: u64, invs: u64) {
        self.adds += adds;
        self.muls += muls;
        self.invs += invs;
        self.letters += 1;
        self.max_per_letter = self.max_per_letter.max(adds + muls + invs);
    }
}

/// An element of GL(N, F_q) × S_N.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EMultState {
    pub matrix: Matrix,
    pub perm: Permutation,
}

impl EMultState {
    pub fn new(matrix: Matrix, perm: Permutation) -> Result<Self, EmultError> {
        if matrix.n() != perm.len() {
            return Err(EmultError::DimensionMismatch {
                state: matrix.n(),
                operand: perm.len(),
            });
        }
        Ok(EMultState { matrix, perm })
    }

    /// `(Id, id)`.
    pub fn identity(n: usize) -> Self {
        EMultState {
            matrix: Matrix::identity(n),
            perm: Permutation::identity(n),
        }
    }

    /// `(m, id)`.
    pub fn from_matrix(m: Matrix) -> Self {
        let n = m.n();
        EMultState {
            matrix: m,
            perm: Permutation::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Applies one letter in place.
    pub fn step(
        &mut self,
        field: &Field,
        letter: Letter,
        tvals: &TValues,
    ) -> Result<(), EmultError> {
        self.step_counted(field, letter, tvals, &mut ())
    }

    pub fn step_counted<T: OpTally>(
        &mut self,
        field: &Field,
        letter: Letter,
        tvals: &TValues,
        tally: &mut T,
    ) -> Result<(), EmultError> {
        let n = self.n();
        let i = letter.index();
        if i == 0 || i >= n {
            return Err(EmultError::IndexOutOfRange { index: i, n });
        }
        if tvals.len() != n {
            return Err(EmultError::DimensionMismatch {
                state: n,
                operand: tvals.len(),
            });
        }
        // 0-based columns: left = i-2, mid = i-1, right = i.
        let mid = i - 1;
        let has_left = i > 1;
        let n64 = n as u64;
        let side = if has_left { n64 } else { 0 };
        if !letter.is_inverse() {
            // Row i of ^{σ₀}CB(b_i) is (τ', -τ', 1) with τ' = τ_{σ₀(i)}:
            //   col_{i-1} += τ'·v,  col_i = -τ'·v,  col_{i+1} += v.
            let tau = tvals.tau(self.perm.apply(i));
            let neg_tau = field.neg(tau);
            for r in 0..n {
                let v = self.matrix.get(r, mid);
                let w = field.mul(neg_tau, v);
                self.matrix.set(r, mid, w);
                if has_left {
                    let l = self.matrix.get(r, mid - 1);
                    self.matrix.set(r, mid - 1, field.sub(l, w));
                }
                let rt = self.matrix.get(r, mid + 1);
                self.matrix.set(r, mid + 1, field.add(rt, v));
            }
            tally.record(1 + n64 + side, n64, 0);
        } else {
            // Row i of ^{σ₀}CB(b_i⁻¹) is (1, -1/τ', 1/τ') with τ' = τ_{σ₀(i+1)}:
            //   col_{i-1} += v,  col_i = -v/τ',  col_{i+1} += v/τ'.
            let tau = tvals.tau(self.perm.apply(i + 1));
            let neg_inv = field.neg(field.inv(tau)?);
            for r in 0..n {
                let v = self.matrix.get(r, mid);
                let w = field.mul(neg_inv, v);
                self.matrix.set(r, mid, w);
                if has_left {
                    let l = self.matrix.get(r, mid - 1);
                    self.matrix.set(r, mid - 1, field.add(l, v));
                }
                let rt = self.matrix.get(r, mid + 1);
                self.matrix.set(r, mid + 1, field.sub(rt, w));
            }
            tally.record(1 + n64 + side, n64, 1);
        }
        self.perm.then_transposition(i);
        Ok(())
    }

    /// Applies every letter of `word`, left to right, in place.
    pub fn apply_word_counted<T: OpTally>(
        &mut self,
        field: &Field,
        word: &BraidWord,
        tvals: &TValues,
        tally: &mut T,
    ) -> Result<(), EmultError> {
        if word.n_strands() != self.n() {
            return Err(EmultError::DimensionMismatch {
                state: self.n(),
                operand: word.n_strands(),
            });
        }
        for &l in word.letters() {
            self.step_counted(field, l, tvals, tally)?;
        }
        Ok(())
    }
}

/// `state ⋆ letter`.
pub fn emult_step(
    field: &Field,
    state: &EMultState,
    letter: Letter,
    tvals: &TValues,
) -> Result<EMultState, EmultError> {
    let mut out = state.clone();
    out.step(field, letter, tvals)?;
    Ok(out)
}

/// `state ⋆ word`, associating left to right.
pub fn emult(
    field: &Field,
    state: &EMultState,
    word: &BraidWord,
    tvals: &TValues,
) -> Result<EMultState, EmultError> {
    let mut out = state.clone();
    out.apply_word_counted(field, word, tvals, &mut ())?;
    Ok(out)
}

/// Like [`emult`] but charges every field operation to `tally`.
pub fn emult_counted<T: OpTally>(
    field: &Field,
    state: &EMultState,
    word: &BraidWord,
    tvals: &TValues,
    tally: &mut T,
) -> Result<EMultState, EmultError> {
    let mut out = state.clone();
    out.apply_word_counted(field, word, tvals, tally)?;
    Ok(out)
}

/// Randomized braid equality: compares `u` and `v` acting on `trials` random
/// states under random T-values. Equal braids always pass; a `false` answer
/// is certain.
pub fn probably_equal_braids<R: Rng + ?Sized>(
    field: &Field,
    u: &BraidWord,
    v: &BraidWord,
    trials: usize,
    rng: &mut R,
) -> Result<bool, EmultError> {
    let n = u.n_strands();
    if v.n_strands() != n {
        return Err(BraidError::SizeMismatch(n, v.n_strands()).into());
    }
    if u.permutation() != v.permutation() {
        return Ok(false);
    }
    for _ in 0..trials {
        let tvals = TValues::random(field, n, rng)?;
        let mut images: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(images.as_mut_slice(), rng);
        let perm = Permutation::from_zero_based(&images)?;
        let start = EMultState::new(Matrix::random_invertible(field, n, rng), perm)?;
        if emult(field, &start, u, &tvals)? != emult(field, &start, v, &tvals)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::random_word;
    use crate::field::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f5() -> Field {
        Field::new(FieldSpec::prime(5)).unwrap()
    }

    fn w(n: usize, s: &str) -> BraidWord {
        BraidWord::parse(n, s).unwrap()
    }

    #[test]
    fn single_generator_from_identity() {
        let f = f5();
        let t = TValues::from_u16(&[2, 3, 4]).unwrap();
        let out = emult_step(&f, &EMultState::identity(3), Letter::pos(1), &t).unwrap();
        assert_eq!(out.matrix.row(0), &[Fe::new(3), Fe::new(1), Fe::new(0)]);
        assert_eq!(out.matrix.row(1), &[Fe::new(0), Fe::new(1), Fe::new(0)]);
        assert_eq!(out.perm.images(), vec![2, 1, 3]);
    }

    #[test]
    fn twisted_lookup_uses_current_permutation() {
        // σ₀ = [2,1,3] so b1 reads τ_{σ₀(1)} = τ₂ = 3, and row 1 becomes (-3, 1, 0).
        let f = f5();
        let t = TValues::from_u16(&[2, 3, 4]).unwrap();
        let start = EMultState::new(
            Matrix::identity(3),
            Permutation::from_images(&[2, 1, 3]).unwrap(),
        )
        .unwrap();
        let out = emult_step(&f, &start, Letter::pos(1), &t).unwrap();
        assert_eq!(out.matrix.row(0), &[Fe::new(2), Fe::new(1), Fe::new(0)]);
        assert!(out.perm.is_identity());
    }

    #[test]
    fn generator_then_inverse_restores_state() {
        let f = Field::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = TValues::random(&f, 8, &mut rng).unwrap();
        let start = EMultState::new(
            Matrix::random_invertible(&f, 8, &mut rng),
            Permutation::from_images(&[3, 1, 2, 8, 7, 5, 6, 4]).unwrap(),
        )
        .unwrap();
        for i in 1..8 {
            for word in [format!("b{i} B{i}"), format!("B{i} b{i}")] {
                assert_eq!(emult(&f, &start, &w(8, &word), &t).unwrap(), start);
            }
        }
    }

    #[test]
    fn empty_word_is_identity_action() {
        let f = f5();
        let t = TValues::from_u16(&[2, 3, 4, 2]).unwrap();
        let s = EMultState::identity(4);
        assert_eq!(emult(&f, &s, &BraidWord::identity(4), &t).unwrap(), s);
    }

    #[test]
    fn braid_relations_hold() {
        let f = Field::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = TValues::random(&f, 6, &mut rng).unwrap();
        let s = EMultState::new(
            Matrix::random_invertible(&f, 6, &mut rng),
            Permutation::identity(6),
        )
        .unwrap();
        for (a, b) in [
            ("b1 b2 b1", "b2 b1 b2"),
            ("b3 b4 b3", "b4 b3 b4"),
            ("b1 b3", "b3 b1"),
            ("B2 b5", "b5 B2"),
        ] {
            assert_eq!(
                emult(&f, &s, &w(6, a), &t).unwrap(),
                emult(&f, &s, &w(6, b), &t).unwrap(),
                "{a} vs {b}"
            );
        }
        let f = f5();
        let t = TValues::from_u16(&[2, 3, 4]).unwrap();
        assert_eq!(
            emult(&f, &EMultState::identity(3), &w(3, "b1 b2 b1"), &t).unwrap(),
            emult(&f, &EMultState::identity(3), &w(3, "b2 b1 b2"), &t).unwrap()
        );
    }

    #[test]
    fn action_is_a_homomorphism() {
        let f = Field::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = TValues::random(&f, 8, &mut rng).unwrap();
        for _ in 0..100 {
            let u = random_word(8, 30, 1..=7, &mut rng).unwrap();
            let v = random_word(8, 30, 1..=7, &mut rng).unwrap();
            let s = EMultState::from_matrix(Matrix::random_invertible(&f, 8, &mut rng));
            let stepwise = emult(&f, &emult(&f, &s, &u, &t).unwrap(), &v, &t).unwrap();
            assert_eq!(stepwise, emult(&f, &s, &u.concat(&v).unwrap(), &t).unwrap());
            assert!(stepwise.matrix.is_invertible(&f));
        }
    }

    #[test]
    fn determinant_tracks_generator_units() {
        // det CB(b_i) = -τ', det CB(b_i⁻¹) = -1/τ'; track on a small case.
        let f = f5();
        let t = TValues::from_u16(&[2, 3, 4, 2]).unwrap();
        let mut s = EMultState::identity(4);
        let mut det = Fe::ONE;
        for l in w(4, "b1 B2 b3 b2 B1 B3").letters() {
            let tau = if l.is_inverse() {
                f.inv(t.tau(s.perm.apply(l.index() + 1))).unwrap()
            } else {
                t.tau(s.perm.apply(l.index()))
            };
            det = f.mul(det, f.neg(tau));
            s.step(&f, *l, &t).unwrap();
            assert_eq!(s.matrix.determinant(&f), det);
        }
    }

    #[test]
    fn op_count_is_linear_per_letter() {
        let f = Field::gf256();
        let n = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = TValues::random(&f, n, &mut rng).unwrap();
        let word = random_word(n, 1000, 1..=15, &mut rng).unwrap();
        let mut count = OpCount::default();
        emult_counted(&f, &EMultState::identity(n), &word, &t, &mut count).unwrap();
        assert_eq!(count.letters, word.len() as u64);
        assert!(count.max_per_letter <= 3 * n as u64 + 2);
        let twice = word.concat(&word).unwrap();
        let mut count2 = OpCount::default();
        emult_counted(&f, &EMultState::identity(n), &twice, &t, &mut count2).unwrap();
        assert_eq!(count2.total(), 2 * count.total());
    }

    #[test]
    fn errors() {
        let f = f5();
        let t = TValues::from_u16(&[2, 3, 4]).unwrap();
        let s = EMultState::identity(3);
        assert!(emult_step(&f, &s, Letter::pos(3), &t).is_err());
        assert!(emult_step(&f, &s, Letter::pos(0), &t).is_err());
        assert!(emult(&f, &s, &BraidWord::identity(4), &t).is_err());
        assert_eq!(TValues::from_u16(&[2, 1, 3]), Err(EmultError::BadTValue));
        assert_eq!(TValues::from_u16(&[0, 2]), Err(EmultError::BadTValue));
        let f2 = Field::new(FieldSpec::prime(3)).unwrap();
        assert!(TValues::random(&f2, 3, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn probabilistic_equality() {
        let f = Field::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(probably_equal_braids(&f, &w(5, "b1 b3"), &w(5, "b1 b3"), 5, &mut rng).unwrap());
        assert!(probably_equal_braids(&f, &w(5, "b1 b3"), &w(5, "b3 b1"), 5, &mut rng).unwrap());
        assert!(!probably_equal_braids(&f, &w(4, "b1"), &w(4, "b2"), 5, &mut rng).unwrap());
        // Same permutation, different braids.
        assert!(
            !probably_equal_braids(&f, &w(4, "b1 b1"), &BraidWord::identity(4), 5, &mut rng)
                .unwrap()
        );
        assert!(!probably_equal_braids(&f, &w(4, "b1 b2"), &w(4, "b2 b1"), 5, &mut rng).unwrap());
    }

    #[test]
    fn disjoint_support_words_commute() {
        let f = Field::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let u = random_word(8, 20, 1..=3, &mut rng).unwrap();
            let v = random_word(8, 20, 5..=7, &mut rng).unwrap();
            let uv = u.concat(&v).unwrap();
            let vu = v.concat(&u).unwrap();
            assert!(probably_equal_braids(&f, &uv, &vu, 3, &mut rng).unwrap());
        }
    }
}
