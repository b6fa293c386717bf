//! Seeded synthetic inputs: DNA-like documents and small random automata.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frontend::{ByteSet, VarAutomaton, VarId};

pub const DNA_ALPHABET: &[u8; 4] = b"ACGT";

/// `len` bytes drawn i.i.d. and uniformly from `ACGT`.
pub fn dna(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| DNA_ALPHABET[rng.gen_range(0..4)]).collect()
}

/// Shape of [`random_va`] output.
#[derive(Clone, Debug)]
pub struct RandomVaParams {
    pub max_states: u32,
    pub max_variables: u32,
    pub alphabet: Vec<u8>,
    /// Probability of a letter transition per state pair and letter.
    pub letter_density: f64,
    /// Probability of a marker transition per state pair and marker.
    pub marker_density: f64,
    pub final_density: f64,
}

impl Default for RandomVaParams {
    fn default() -> Self {
        RandomVaParams {
            max_states: 8,
            max_variables: 3,
            alphabet: b"ab".to_vec(),
            letter_density: 0.2,
            marker_density: 0.08,
            final_density: 0.3,
        }
    }
}

/// A random, possibly non-sequential VA with 1..=max_states states.
pub fn random_va<R: Rng>(rng: &mut R, p: &RandomVaParams) -> VarAutomaton {
    let n = rng.gen_range(1..=p.max_states);
    let k = rng.gen_range(0..=p.max_variables);
    let vars = (0..k).map(|i| ((b'x' + i as u8) as char).to_string()).collect();
    let mut va = VarAutomaton::with_states(vars, n);
    for s in 0..n {
        for d in 0..n {
            for &b in &p.alphabet {
                if rng.gen_bool(p.letter_density) {
                    va.add_letters(s, ByteSet::single(b), d);
                }
            }
            for v in 0..k {
                for m in [VarId(v).open(), VarId(v).close()] {
                    if rng.gen_bool(p.marker_density) {
                        va.add_marker(s, m, d);
                    }
                }
            }
        }
        if rng.gen_bool(p.final_density) {
            va.set_final(s, true);
        }
    }
    va
}

/// A random document of length `0..=max_len` over `alphabet`.
pub fn random_doc<R: Rng>(rng: &mut R, alphabet: &[u8], max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dna_is_seeded() {
        assert_eq!(dna(64, 7), dna(64, 7));
        assert_ne!(dna(64, 7), dna(64, 8));
        assert!(dna(1000, 1).iter().all(|b| DNA_ALPHABET.contains(b)));
    }

    #[test]
    fn random_va_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let va = random_va(&mut rng, &RandomVaParams::default());
            assert!(va.num_states() <= 8);
            assert!(va.num_variables() <= 3);
        }
    }
}
