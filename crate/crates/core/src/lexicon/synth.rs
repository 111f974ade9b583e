//! Deterministic synthetic lexicons for load testing.

use std::collections::HashSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::avm::av;

use super::{Function, LexicalEntry};

const FRAMES: &[(&[&str], &[&[&str]])] = &[
    (&["(cat n)", "(nform norm)", "(num sg)"], &[]),
    (&["(cat n)", "(nform norm)", "(num pl)"], &[]),
    (&["(cat v)"], &[]),
    (&["(cat v)"], &[&["(cat n)", "(case acc)"]]),
    (&["(cat v)"], &[&["(cat c)"]]),
    (&["(cat v)"], &[&["(cat i)", "-bare_inf"]]),
    (&["(cat v)", "(rare very)"], &[&["(cat n)", "(case acc)"], &["(cat n)", "(case acc)"]]),
    (&["(cat p)"], &[]),
    (&["(cat d)"], &[]),
];

/// A pseudo-word of 4 to 12 lowercase letters.
pub fn random_word(rng: &mut impl Rng) -> String {
    let len = rng.gen_range(4..=12);
    (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect()
}

/// `n` entries with distinct keys and one to three subcat frames each.
/// Only features of the bundled English grammar are used.
pub fn synthetic_entries(n: usize, seed: u64) -> Vec<LexicalEntry> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let key = random_word(&mut rng);
        if !seen.insert(key.clone()) {
            continue;
        }
        let k = rng.gen_range(1..=3);
        let functions = (0..k)
            .map(|_| {
                let (head, comps) = FRAMES[rng.gen_range(0..FRAMES.len())];
                Function::Subcat {
                    head: av(head),
                    comps: comps.iter().map(|c| av(c)).collect(),
                }
            })
            .collect();
        out.push(LexicalEntry { key, functions });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_distinct() {
        let a = synthetic_entries(500, 7);
        assert_eq!(a, synthetic_entries(500, 7));
        assert_ne!(a, synthetic_entries(500, 8));
        let keys: HashSet<_> = a.iter().map(|e| &e.key).collect();
        assert_eq!(keys.len(), 500);
    }
}
