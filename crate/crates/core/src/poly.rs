//! Dense univariate polynomials over F_q, just enough to find irreducible
//! polynomials for the public matrix m0.

use rand::Rng;

use crate::field::{Fe, Field};
use crate::matrix::Matrix;

/// Coefficients from the constant term upwards, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<Fe>);

impl Poly {
    pub fn new(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last() == Some(&Fe::ZERO) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn x() -> Self {
        Poly(vec![Fe::ZERO, Fe::ONE])
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sub(&self, field: &Field, other: &Poly) -> Poly {
        let len = self.0.len().max(other.0.len());
        let get = |p: &Poly, k: usize| p.0.get(k).copied().unwrap_or(Fe::ZERO);
        Poly::new(
            (0..len)
                .map(|k| field.sub(get(self, k), get(other, k)))
                .collect(),
        )
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![Fe::ZERO; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn rem(&self, field: &Field, modulus: &Poly) -> Poly {
        let dm = modulus.degree().expect("nonzero modulus");
        let lead_inv = field
            .inv(modulus.0[dm])
            .expect("nonzero leading coefficient");
        let mut r = self.0.clone();
        while r.len() > dm {
            let top = r.len() - 1;
            let c = field.mul(*r.last().expect("nonempty"), lead_inv);
            if !c.is_zero() {
                for (k, &m) in modulus.0.iter().enumerate() {
                    let idx = top - dm + k;
                    r[idx] = field.sub(r[idx], field.mul(c, m));
                }
            }
            r.pop();
        }
        Poly::new(r)
    }

    pub fn mulmod(&self, field: &Field, other: &Poly, modulus: &Poly) -> Poly {
        self.mul(field, other).rem(field, modulus)
    }

    pub fn powmod(&self, field: &Field, mut e: u64, modulus: &Poly) -> Poly {
        let mut base = self.rem(field, modulus);
        let mut acc = Poly(vec![Fe::ONE]).rem(field, modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(field, &base, modulus);
            }
            base = base.mulmod(field, &base, modulus);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(&self, field: &Field, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or's test: `f` of degree n is irreducible iff
    /// `gcd(x^{q^i} - x, f) = 1` for all `1 <= i <= n/2`.
    pub fn is_irreducible(&self, field: &Field) -> bool {
        let Some(n) = self.degree() else {
            return false;
        };
        if n == 0 {
            return false;
        }
        let q = field.q() as u64;
        let x = Poly::x();
        let mut h = x.rem(field, self);
        for _ in 1..=n / 2 {
            h = h.powmod(field, q, self);
            let g = h.sub(field, &x).gcd(field, self);
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Uniform random monic irreducible polynomial of degree `n`.
    pub fn random_irreducible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Poly {
        loop {
            let mut c: Vec<Fe> = (0..n).map(|_| field.random(rng)).collect();
            c.push(Fe::ONE);
            if c[0].is_zero() {
                continue;
            }
            let p = Poly::new(c);
            if p.is_irreducible(field) {
                return p;
            }
        }
    }

    /// Companion matrix: ones on the subdiagonal and `-a_k` in the last
    /// column. Its minimal polynomial is `self` (which must be monic).
    pub fn companion(&self, field: &Field) -> Matrix {
        let n = self.degree().expect("nonconstant");
        let mut m = Matrix::zero(n);
        for i in 0..n - 1 {
            m.set(i + 1, i, Fe::ONE);
        }
        for k in 0..n {
            m.set(k, n - 1, field.neg(self.0[k]));
        }
        m
    }
}
