//! Random and adversarial collage systems for tests and benchmarks.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::internalize::internalize;
use crate::model::{expansion_length, validate, CollageSystem, Rule};

#[derive(Clone, Debug)]
pub struct RandomParams {
    /// Upper bound on the number of rules after pruning.
    pub max_rules: usize,
    pub max_text_len: u64,
    /// Atomic rules, at most 26.
    pub alphabet: usize,
    /// Fraction of truncation rules an accepted system must reach.
    pub min_truncation_share: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { max_rules: 50, max_text_len: 10_000, alphabet: 4, min_truncation_share: 0.3 }
    }
}

/// Draws systems until one passes validation after pruning, has between
/// two and `max_rules` rules and enough truncations.
pub fn random_system<R: Rng>(rng: &mut R, params: &RandomParams) -> CollageSystem {
    loop {
        let g = draw(rng, params).prune_useless();
        let share = g.truncation_count() as f64 / g.size() as f64;
        if (2..=params.max_rules).contains(&g.size()) && share >= params.min_truncation_share && validate(&g).is_ok() {
            return g;
        }
    }
}

/// An internal system (the internalization of a random one, which may use
/// truncations) whose text length lies in `min_len..=max_len`.
pub fn random_internal_system<R: Rng>(rng: &mut R, min_len: u64, max_len: u64) -> CollageSystem {
    let params = RandomParams { max_rules: 12, max_text_len: max_len, alphabet: 3, min_truncation_share: 0.3 };
    loop {
        let g = internalize(&random_system(rng, &params));
        if expansion_length(&g, g.start()) >= BigUint::from(min_len) {
            return g;
        }
    }
}

fn draw<R: Rng>(rng: &mut R, params: &RandomParams) -> CollageSystem {
    let mut letters: Vec<char> = ('a'..='z').take(params.alphabet.clamp(1, 26)).collect();
    letters.shuffle(rng);
    let sigma = rng.gen_range(1..=letters.len());
    let mut rules: Vec<Rule> = letters[..sigma].iter().map(|&c| Rule::Atomic(c)).collect();
    let mut lens: Vec<u64> = vec![1; sigma];
    let target = rng.gen_range(sigma + 1..=2 * params.max_rules.max(sigma + 1));
    let max = params.max_text_len;

    // Referents favour recent rules so that pruning keeps most of them.
    let pick = |rng: &mut R, n: usize| -> usize {
        if rng.gen_bool(0.6) {
            rng.gen_range(n.saturating_sub(6).max(1)..=n)
        } else {
            rng.gen_range(1..=n)
        }
    };
    let mut attempts = 0;
    while rules.len() < target && attempts < 20 * target {
        attempts += 1;
        let n = rules.len();
        let y = pick(rng, n);
        let ly = lens[y - 1];
        let (rule, len) = match rng.gen_range(0..10) {
            0..=3 => {
                let z = pick(rng, n);
                (Rule::Concat(y, z), ly + lens[z - 1])
            }
            4..=5 => {
                if ly * 3 > max {
                    continue;
                }
                let r = rng.gen_range(3..=(max / ly).clamp(3, 12));
                (Rule::Repeat(y, BigUint::from(r)), ly * r)
            }
            _ => {
                if ly < 2 {
                    continue;
                }
                let b = rng.gen_range(1..=ly);
                let e = rng.gen_range(b + 1..=ly + 1);
                (Rule::Truncate(y, BigUint::from(b), BigUint::from(e)), e - b)
            }
        };
        if len > max {
            continue;
        }
        rules.push(rule);
        lens.push(len);
    }
    let g = CollageSystem::with_last_start(rules).expect("referents precede their rules");
    debug_assert!(g.lengths().iter().all(|l| l.to_u64().is_some_and(|l| l <= max)));
    g
}

/// A system of exactly `m >= 8` rules (`m` even) where `~m/4` reachable
/// rules each truncate the top of a chain of `~m/4` nested unreachable
/// truncations, so internalizing takes quadratically many steps.
pub fn nested_truncation_chain(m: usize) -> CollageSystem {
    assert!(m >= 8 && m.is_multiple_of(2), "chain size must be an even number >= 8");
    let copies = (m / 4).max(1);
    let levels = (m - 2 - 2 * copies) / 2;
    let three = BigUint::from(3u8);
    let mut rules = vec![Rule::Atomic('a'), Rule::Atomic('b'), Rule::Concat(1, 2)];
    let mut top = 3;
    for _ in 0..levels {
        rules.push(Rule::Concat(top, 1));
        rules.push(Rule::Truncate(rules.len(), BigUint::from(1u8), three.clone()));
        top = rules.len();
    }
    let first = rules.len() + 1;
    for _ in 0..copies {
        rules.push(Rule::Truncate(top, BigUint::from(1u8), three.clone()));
    }
    let mut acc = first;
    for q in first + 1..first + copies {
        rules.push(Rule::Concat(acc, q));
        acc = rules.len();
    }
    debug_assert_eq!(rules.len(), m);
    CollageSystem::with_last_start(rules).expect("chain is topological")
}
