//! Exact colored Burau representation over `Z[t_1^{±1}, ..., t_N^{±1}]`.
//!
//! This is the slow reference for [`crate::emult`]: build `Π_CB(β)` symbolically,
//! then substitute T-values. Coefficients grow quickly with word length, so it
//! is only meant for small N and short words.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::braid::{BraidWord, Letter, Permutation};
use crate::emult::{EMultState, TValues};
use crate::field::{Fe, Field};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CbError {
    #[error("generator index {index} out of range for {n} strands")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero T-value at t_{0} with a negative exponent")]
    ZeroAtNegativeExponent(usize),
}

/// Exponent vector of a Laurent monomial.
pub type Monomial = Vec<i32>;

/// A Laurent polynomial with integer coefficients in N variables.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, i64>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: i64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// `c · t_var^exp` for 1-based `var`.
    pub fn monomial(nvars: usize, var: usize, exp: i32, c: i64) -> Self {
        let mut e = vec![0; nvars];
        e[var - 1] = exp;
        let mut p = Self::zero(nvars);
        p.add_term(e, c);
        p
    }

    fn add_term(&mut self, e: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = Self::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.checked_mul(cb).expect("coefficient overflow"));
            }
        }
        out
    }

    /// `^σ f`: substitutes `t_j ↦ t_{σ(j)}`.
    pub fn twist(&self, sigma: &Permutation) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| {
                    let mut moved = vec![0; self.nvars];
                    for (j, &x) in e.iter().enumerate() {
                        moved[sigma.apply(j + 1) - 1] = x;
                    }
                    (moved, c)
                })
                .collect(),
        }
    }

    /// `f(τ_1, ..., τ_N)` with coefficients mapped into the field.
    pub fn evaluate(&self, field: &Field, tvals: &[Fe]) -> Result<Fe, CbError> {
        let mut acc = Fe::ZERO;
        for (e, &c) in &self.terms {
            let mut term = field.from_int(c);
            for (j, &x) in e.iter().enumerate() {
                let base = if x < 0 {
                    field
                        .inv(tvals[j])
                        .map_err(|_| CbError::ZeroAtNegativeExponent(j + 1))?
                } else {
                    tvals[j]
                };
                term = field.mul(term, field.pow(base, x.unsigned_abs() as u64));
            }
            acc = field.add(acc, term);
        }
        Ok(acc)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, &c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| {
                    if x == 1 {
                        format!("t{}", j + 1)
                    } else {
                        format!("t{}^{x}", j + 1)
                    }
                })
                .collect();
            let sign = if c < 0 {
                "-"
            } else if k > 0 {
                "+"
            } else {
                ""
            };
            if k > 0 {
                f.write_str(" ")?;
            }
            match (c.abs(), mono.is_empty()) {
                (a, true) => write!(f, "{sign}{a}")?,
                (1, false) => write!(f, "{sign}{}", mono.join("*"))?,
                (a, false) => write!(f, "{sign}{a}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Square matrix of Laurent polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    n: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    LaurentPoly::constant(n, 1)
                } else {
                    LaurentPoly::zero(n)
                }
            })
            .collect();
        LaurentMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.entries[row * self.n + col]
    }

    fn set(&mut self, row: usize, col: usize, p: LaurentPoly) {
        self.entries[row * self.n + col] = p;
    }

    pub fn mul(&self, other: &LaurentMatrix) -> Result<LaurentMatrix, CbError> {
        if self.n != other.n {
            return Err(CbError::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut out = LaurentMatrix {
            n,
            entries: vec![LaurentPoly::zero(n); n * n],
        };
        for i in 0..n {
            for j in 0..n {
                let mut acc = LaurentPoly::zero(n);
                for k in 0..n {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn twist(&self, sigma: &Permutation) -> LaurentMatrix {
        LaurentMatrix {
            n: self.n,
            entries: self.entries.iter().map(|p| p.twist(sigma)).collect(),
        }
    }

    pub fn evaluate(&self, field: &Field, tvals: &TValues) -> Result<Matrix, CbError> {
        let data = self
            .entries
            .iter()
            .map(|p| p.evaluate(field, tvals.values()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_rows(self.n, data).expect("square"))
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[ {} ]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A colored Burau pair `(CB(β), σ_β)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbPair {
    pub matrix: LaurentMatrix,
    pub perm: Permutation,
}

impl CbPair {
    pub fn identity(n: usize) -> Self {
        CbPair {
            matrix: LaurentMatrix::identity(n),
            perm: Permutation::identity(n),
        }
    }
}

/// `(CB(b_i^±), σ_i)`.
///
/// `CB(b_i)` is the identity except row i = `(t_i, -t_i, 1)` in columns
/// `i-1, i, i+1`; `CB(b_i⁻¹)` has row i = `(1, -1/t_{i+1}, 1/t_{i+1})`.
/// For i = 1 the column-0 entry is dropped.
pub fn cb_generator(letter: Letter, n: usize) -> Result<CbPair, CbError> {
    let i = letter.index();
    if i == 0 || i >= n {
        return Err(CbError::IndexOutOfRange { index: i, n });
    }
    let mut m = LaurentMatrix::identity(n);
    let row = i - 1;
    let (left, mid, right) = if letter.is_inverse() {
        (
            LaurentPoly::constant(n, 1),
            LaurentPoly::monomial(n, i + 1, -1, -1),
            LaurentPoly::monomial(n, i + 1, -1, 1),
        )
    } else {
        (
            LaurentPoly::monomial(n, i, 1, 1),
            LaurentPoly::monomial(n, i, 1, -1),
            LaurentPoly::constant(n, 1),
        )
    };
    if i > 1 {
        m.set(row, row - 1, left);
    }
    m.set(row, row, mid);
    m.set(row, row + 1, right);
    Ok(CbPair {
        matrix: m,
        perm: Permutation::transposition(n, i),
    })
}

/// `(A, σ) ∘ (B, τ) = (A · ^σ B, σ ∘ τ)`.
pub fn cb_multiply(a: &CbPair, b: &CbPair) -> Result<CbPair, CbError> {
    if a.matrix.n() != b.matrix.n() {
        return Err(CbError::DimensionMismatch(a.matrix.n(), b.matrix.n()));
    }
    Ok(CbPair {
        matrix: a.matrix.mul(&b.matrix.twist(&a.perm))?,
        perm: a.perm.compose(&b.perm).expect("same size"),
    })
}

/// `Π_CB(β)`, folding generators left to right.
pub fn cb_of_word(word: &BraidWord) -> Result<CbPair, CbError> {
    let n = word.n_strands();
    word.letters()
        .iter()
        .try_fold(CbPair::identity(n), |acc, &l| {
            cb_multiply(&acc, &cb_generator(l, n)?)
        })
}

/// Substitutes T-values into every entry.
pub fn cb_evaluate(pair: &CbPair, tvals: &TValues, field: &Field) -> Result<EMultState, CbError> {
    if tvals.len() != pair.matrix.n() {
        return Err(CbError::DimensionMismatch(pair.matrix.n(), tvals.len()));
    }
    let matrix = pair.matrix.evaluate(field, tvals)?;
    Ok(EMultState {
        matrix,
        perm: pair.perm.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::random_word;
    use crate::field::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(n: usize, s: &str) -> BraidWord {
        BraidWord::parse(n, s).unwrap()
    }

    fn t(n: usize, var: usize) -> LaurentPoly {
        LaurentPoly::monomial(n, var, 1, 1)
    }

    #[test]
    fn generator_matrices() {
        let g = cb_generator(Letter::pos(1), 3).unwrap();
        assert_eq!(*g.matrix.get(0, 0), t(3, 1).neg());
        assert_eq!(*g.matrix.get(0, 1), LaurentPoly::constant(3, 1));
        assert!(g.matrix.get(0, 2).is_zero());
        assert_eq!(*g.matrix.get(1, 1), LaurentPoly::constant(3, 1));
        assert_eq!(g.perm.images(), vec![2, 1, 3]);

        let g = cb_generator(Letter::pos(2), 3).unwrap();
        assert_eq!(*g.matrix.get(1, 0), t(3, 2));
        assert_eq!(*g.matrix.get(1, 1), t(3, 2).neg());
        assert_eq!(*g.matrix.get(1, 2), LaurentPoly::constant(3, 1));
        assert_eq!(g.perm.images(), vec![1, 3, 2]);

        let g = cb_generator(Letter::neg(1), 3).unwrap();
        assert_eq!(*g.matrix.get(0, 0), LaurentPoly::monomial(3, 2, -1, -1));
        assert_eq!(*g.matrix.get(0, 1), LaurentPoly::monomial(3, 2, -1, 1));

        assert!(cb_generator(Letter::pos(3), 3).is_err());
    }

    #[test]
    fn generator_times_inverse_is_identity() {
        for n in 3..=5 {
            for i in 1..n {
                for (a, b) in [
                    (Letter::pos(i), Letter::neg(i)),
                    (Letter::neg(i), Letter::pos(i)),
                ] {
                    let p = cb_multiply(&cb_generator(a, n).unwrap(), &cb_generator(b, n).unwrap())
                        .unwrap();
                    assert_eq!(p, CbPair::identity(n), "n={n} i={i}");
                }
            }
        }
        assert_eq!(cb_of_word(&w(3, "b1 B1")).unwrap(), CbPair::identity(3));
        assert_eq!(
            cb_of_word(&BraidWord::identity(4)).unwrap(),
            CbPair::identity(4)
        );
    }

    #[test]
    fn braid_relations_are_exact() {
        for n in 3..=5 {
            for i in 1..n - 1 {
                let j = i + 1;
                assert_eq!(
                    cb_of_word(&w(n, &format!("b{i} b{j} b{i}"))).unwrap(),
                    cb_of_word(&w(n, &format!("b{j} b{i} b{j}"))).unwrap()
                );
                assert_eq!(
                    cb_of_word(&w(n, &format!("B{i} B{j} B{i}"))).unwrap(),
                    cb_of_word(&w(n, &format!("B{j} B{i} B{j}"))).unwrap()
                );
            }
            for i in 1..n {
                for j in i + 2..n {
                    assert_eq!(
                        cb_of_word(&w(n, &format!("b{i} b{j}"))).unwrap(),
                        cb_of_word(&w(n, &format!("b{j} b{i}"))).unwrap()
                    );
                    assert_eq!(
                        cb_of_word(&w(n, &format!("B{i} b{j}"))).unwrap(),
                        cb_of_word(&w(n, &format!("b{j} B{i}"))).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn representation_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..40 {
            let u = random_word(4, 6, 1..=3, &mut rng).unwrap();
            let v = random_word(4, 6, 1..=3, &mut rng).unwrap();
            let lhs = cb_of_word(&u.concat(&v).unwrap()).unwrap();
            let rhs = cb_multiply(&cb_of_word(&u).unwrap(), &cb_of_word(&v).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn evaluation_examples() {
        let f = Field::new(FieldSpec::prime(5)).unwrap();
        let tv = TValues::from_u16(&[2, 3, 4]).unwrap();
        let id = cb_evaluate(&CbPair::identity(3), &tv, &f).unwrap();
        assert_eq!(id, EMultState::identity(3));
        let g = cb_evaluate(&cb_generator(Letter::pos(1), 3).unwrap(), &tv, &f).unwrap();
        assert_eq!(g.matrix.row(0), &[Fe::new(3), Fe::new(1), Fe::new(0)]);
    }

    #[test]
    fn evaluated_words_are_invertible() {
        let f = Field::new(FieldSpec::prime(7)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tv = TValues::random(&f, 4, &mut rng).unwrap();
        for _ in 0..30 {
            let u = random_word(4, 8, 1..=3, &mut rng).unwrap();
            let e = cb_evaluate(&cb_of_word(&u).unwrap(), &tv, &f).unwrap();
            assert!(!e.matrix.determinant(&f).is_zero());
        }
    }

    #[test]
    fn zero_at_negative_exponent_is_an_error() {
        let f = Field::new(FieldSpec::prime(5)).unwrap();
        let p = LaurentPoly::monomial(2, 2, -1, 1);
        assert_eq!(
            p.evaluate(&f, &[Fe::new(2), Fe::ZERO]),
            Err(CbError::ZeroAtNegativeExponent(2))
        );
    }

    #[test]
    fn twist_composes_as_left_action() {
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = t(n, 1)
            .mul(&t(n, 2))
            .mul(&t(n, 2))
            .add(&LaurentPoly::monomial(n, 4, -2, 3));
        for _ in 0..20 {
            let s = random_word(n, 10, 1..=3, &mut rng).unwrap().permutation();
            let r = random_word(n, 10, 1..=3, &mut rng).unwrap().permutation();
            assert_eq!(f.twist(&r).twist(&s), f.twist(&s.compose(&r).unwrap()));
        }
    }

    #[test]
    fn display() {
        let n = 3;
        let p = t(n, 1)
            .neg()
            .add(&LaurentPoly::monomial(n, 2, -1, 2))
            .add(&LaurentPoly::constant(n, 1));
        let s = p.to_string();
        assert!(s.contains("-t1"), "{s}");
        assert!(s.contains("2*t2^-1"), "{s}");
    }
}
