//! E-multiplication throughput against word length at N = 16 over GF(256).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ironwood::braid::Letter;
use ironwood::emult::{emult, EMultState, TValues};
use ironwood::{BraidWord, Field, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: usize = 16;

fn word(len: usize, rng: &mut ChaCha8Rng) -> BraidWord {
    let letters = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..N);
            if rng.gen_bool(0.5) {
                Letter::pos(i)
            } else {
                Letter::neg(i)
            }
        })
        .collect();
    BraidWord::new(N, letters).unwrap()
}

fn bench_emult(c: &mut Criterion) {
    let field = Field::gf256();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tvals = TValues::random(&field, N, &mut rng).unwrap();
    let start = EMultState::from_matrix(Matrix::random_invertible(&field, N, &mut rng));
    let mut group = c.benchmark_group("emult_n16_gf256");
    for len in [500, 2000, 8000] {
        let w = word(len, &mut rng);
        group.throughput(Throughput::Elements(len as u64));
        group.bench_with_input(BenchmarkId::from_parameter(len), &w, |b, w| {
            b.iter(|| emult(&field, &start, w, &tvals).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_emult);
criterion_main!(benches);
