//! The renormalized distance is not a metric: dividing by the longer length
//! can make a detour through a long word cheaper than the direct route. The
//! unnormalized distance is a metric, and so is the renormalized one on words
//! of a single length.

use glotto_core::edit_distance::{levenshtein_chars, normalized_chars};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHABET: [char; 4] = ['a', 'c', 'g', 't'];

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Vec<char> {
    (0..len).map(|_| ALPHABET[rng.random_range(0..4)]).collect()
}

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

#[test]
fn renormalized_distance_violates_the_triangle_inequality() {
    let (a, b, c) = (chars("aatc"), chars("acatcg"), chars("ccg"));
    assert_eq!(normalized_chars(&a, &b), 2.0 / 6.0);
    assert_eq!(normalized_chars(&b, &c), 3.0 / 6.0);
    assert_eq!(normalized_chars(&a, &c), 1.0);
}

#[test]
fn a_million_sampled_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut renormalized_violations = 0usize;
    let mut worst_excess = 0.0f64;
    for _ in 0..1_000_000 {
        let word = |rng: &mut ChaCha8Rng| {
            let len = rng.random_range(1..=10);
            random_word(rng, len)
        };
        let (a, b, c) = (word(&mut rng), word(&mut rng), word(&mut rng));
        let (ab, bc, ac) = (
            levenshtein_chars(&a, &b),
            levenshtein_chars(&b, &c),
            levenshtein_chars(&a, &c),
        );
        assert!(ac <= ab + bc, "{a:?} {b:?} {c:?}");
        // exact comparison of ac/m_ac against ab/m_ab + bc/m_bc
        let (m_ab, m_bc, m_ac) = (a.len().max(b.len()), b.len().max(c.len()), a.len().max(c.len()));
        if ac * m_ab * m_bc > (ab * m_bc + bc * m_ab) * m_ac {
            renormalized_violations += 1;
            let excess =
                normalized_chars(&a, &c) - normalized_chars(&a, &b) - normalized_chars(&b, &c);
            worst_excess = worst_excess.max(excess);
        }
    }
    println!("renormalized violations: {renormalized_violations} / 1000000, worst excess {worst_excess:.4}");
    // rare but present at this sample size
    assert!(renormalized_violations > 0 && renormalized_violations < 100);
    assert!(worst_excess < 1.0);
}

#[test]
fn renormalized_distance_is_a_metric_on_equal_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200_000 {
        let len = rng.random_range(1..=10);
        let (a, b, c) = (
            random_word(&mut rng, len),
            random_word(&mut rng, len),
            random_word(&mut rng, len),
        );
        let l = len as f64;
        // with a shared denominator the sums are exact
        let lhs = levenshtein_chars(&a, &c) as f64 / l;
        let rhs = (levenshtein_chars(&a, &b) + levenshtein_chars(&b, &c)) as f64 / l;
        assert!(lhs <= rhs);
        assert!(normalized_chars(&a, &c) <= normalized_chars(&a, &b) + normalized_chars(&b, &c) + 1e-15);
    }
}
