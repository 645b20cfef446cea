//! E-multiplication against the symbolic colored Burau product.

mod common;

use ironwood::cburau::{cb_evaluate, cb_of_word};
use ironwood::emult::{emult, EMultState, TValues};
use ironwood::{Field, FieldSpec};
use rand::Rng;

fn check(spec: FieldSpec, n: usize, words: usize, max_len: usize, seed: u64) {
    let field = Field::new(spec).unwrap();
    let mut rng = common::rng(seed);
    for _ in 0..words {
        let tvals = TValues::random(&field, n, &mut rng).unwrap();
        let len = rng.gen_range(0..=max_len);
        let w = common::raw_word(n, len, &mut rng);
        let fast = emult(&field, &EMultState::identity(n), &w, &tvals).unwrap();
        let slow = cb_evaluate(&cb_of_word(&w).unwrap(), &tvals, &field).unwrap();
        assert_eq!(fast, slow, "word {w}, T = {:?}", tvals.values());
    }
}

#[test]
fn toy_field_hundred_words() {
    check(FieldSpec::prime(5), 4, 100, 12, 1);
}

#[test]
fn larger_strand_counts() {
    check(FieldSpec::GF256, 6, 40, 10, 2);
    check(FieldSpec::prime(7), 5, 40, 10, 3);
    check(FieldSpec::binary(0b1_0011), 8, 20, 8, 4);
}

#[test]
fn nonidentity_start_matrix_is_a_left_factor() {
    // (A, id) ⋆ w = A · ((Id, id) ⋆ w) in the matrix slot.
    let field = Field::gf256();
    let mut rng = common::rng(5);
    for _ in 0..50 {
        let tvals = TValues::random(&field, 6, &mut rng).unwrap();
        let a = ironwood::Matrix::random(&field, 6, &mut rng);
        let w = common::raw_word(6, 20, &mut rng);
        let lhs = emult(&field, &EMultState::from_matrix(a.clone()), &w, &tvals).unwrap();
        let rhs = emult(&field, &EMultState::identity(6), &w, &tvals).unwrap();
        assert_eq!(lhs.matrix, a.mul(&field, &rhs.matrix).unwrap());
        assert_eq!(lhs.perm, rhs.perm);
    }
}
