//! Parallel vs. sequential exhaustive Cheeger-constant scan. The subset
//! space doubles per node, so the largest admissible sizes dominate and the
//! parallel chunked scan pays off there.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use curverewire_core::data::gen_erdos_renyi;
use curverewire_core::graph::Graph;
use curverewire_core::spectral::{cheeger_constant_exact, cheeger_constant_exact_seq};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn connected_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = gen_erdos_renyi(n, p, &mut rng).expect("valid generator parameters");
        if g.is_connected() {
            return g;
        }
    }
}

fn bench_cheeger(c: &mut Criterion) {
    let mut group = c.benchmark_group("cheeger_exact");
    group.sample_size(20);
    for &n in &[16usize, 20] {
        let g = connected_graph(n, 0.3, 11);
        group.bench_with_input(BenchmarkId::new("parallel", n), &g, |b, g| {
            b.iter(|| cheeger_constant_exact(g).expect("within scan limits"))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &g, |b, g| {
            b.iter(|| cheeger_constant_exact_seq(g).expect("within scan limits"))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_cheeger);
criterion_main!(benches);
