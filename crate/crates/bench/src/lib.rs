//! Synthetic inputs shared by the benchmarks.

use glotto_core::chronology::{random_ancestor, simulate_divergence, WordGenerator};
use glotto_core::phylogeny::{Phylogeny, TreeBuilder};
use glotto_core::{Corpus, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Caterpillar tree over `n` leaves, one split every `step` years.
pub fn caterpillar(n: usize, step: f64) -> Phylogeny {
    let mut b = TreeBuilder::new();
    let mut top = b.leaf("l000");
    for i in 1..n {
        let leaf = b.leaf(format!("l{i:03}"));
        top = b.internal(vec![top, leaf], step * i as f64);
    }
    b.finish(top).unwrap()
}

/// Related corpus of `n` lexicons over `m` meanings.
pub fn corpus(n: usize, m: u32, seed: u64) -> Corpus {
    let generator = WordGenerator::default();
    let ancestor = random_ancestor(&generator, m, seed);
    simulate_divergence(&ancestor, &caterpillar(n, 50.0), 5e-4, seed, &generator, m).unwrap()
}

/// Random word pairs over a four-letter alphabet.
pub fn word_pairs(count: usize, max_len: usize, seed: u64) -> Vec<(Word, Word)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word = |rng: &mut ChaCha8Rng| {
        let len = rng.random_range(1..=max_len);
        let s: String = (0..len).map(|_| ['a', 'c', 'g', 't'][rng.random_range(0..4)]).collect();
        Word::parse(&s).unwrap()
    };
    (0..count).map(|_| (word(&mut rng), word(&mut rng))).collect()
}
