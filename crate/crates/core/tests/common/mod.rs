#![allow(dead_code)]

use ironwood::braid::Letter;
use ironwood::keygen::{gen_conjugate_sets, gen_tvalues, ConjugateConfig};
use ironwood::{BraidWord, FieldSpec, SystemParams, Ttp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform letters over the full index range, not reduced.
pub fn raw_word<R: Rng>(n: usize, len: usize, rng: &mut R) -> BraidWord {
    let letters = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..n);
            if rng.gen_bool(0.5) {
                Letter::pos(i)
            } else {
                Letter::neg(i)
            }
        })
        .collect();
    BraidWord::new(n, letters).unwrap()
}

pub fn toy_ttp(seed: u64) -> (Ttp, ChaCha8Rng) {
    let mut rng = rng(seed);
    let params = SystemParams::generate(4, FieldSpec::prime(5), &mut rng).unwrap();
    let ttp = Ttp::setup(params, &ConjugateConfig::toy(), b"ttp", &mut rng).unwrap();
    (ttp, rng)
}

pub fn default_ttp(seed: u64) -> (Ttp, ChaCha8Rng) {
    let mut rng = rng(seed);
    let params = SystemParams::generate(16, FieldSpec::GF256, &mut rng).unwrap();
    let ttp = Ttp::setup(params, &ConjugateConfig::default(), b"ttp", &mut rng).unwrap();
    (ttp, rng)
}

/// Small TTP at arbitrary (N, field) for codec tests.
pub fn small_ttp(n: usize, spec: FieldSpec, seed: u64) -> (Ttp, ChaCha8Rng) {
    let mut rng = rng(seed);
    let params = SystemParams::generate(n, spec, &mut rng).unwrap();
    let cfg = ConjugateConfig {
        r: 4,
        z_length: 6,
        word_length: 6,
        pure_fraction: 0.5,
    };
    let (alpha, gamma) = gen_conjugate_sets(&params, &cfg, &mut rng).unwrap();
    let tvals = gen_tvalues(&params, &mut rng).unwrap();
    let ttp = Ttp {
        params,
        alpha,
        gamma,
        tvals,
        signer: ironwood::KeyedHashSigner::new(rng.gen(), "ttp"),
    };
    (ttp, rng)
}
