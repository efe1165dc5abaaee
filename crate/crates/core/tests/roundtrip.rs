use collage::decode::reconstruct;
use collage::generate::random_internal_system;
use collage::model::{expand, ics_factorization, is_internal, stats, CollageSystem};
use collage::oracle::{brute_force_chat, check_factorization, sigma, valid_factorizations, CandidateDomain};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|s| alphabet.iter().map(move |&c| format!("{s}{c}"))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn small_internal(seed: u64) -> CollageSystem {
    random_internal_system(&mut StdRng::seed_from_u64(seed), 4, 8)
}

fn text_of(g: &CollageSystem) -> String {
    expand(g, g.start(), 64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn grammar_tree_factorizations_pass_the_checker(seed in any::<u64>()) {
        let g = small_internal(seed);
        prop_assert!(is_internal(&g));
        let t = text_of(&g);
        let tf = ics_factorization(&g, 64).unwrap();
        prop_assert_eq!(check_factorization(&t, &tf), vec![]);
        let st = stats(&g);
        prop_assert_eq!(st.node_count_identity(), Some(true));
        prop_assert_eq!(tf.h(), st.grammar_tree_leaves);
        // A one-character truncation leaf is typed as a plain letter.
        prop_assert!(tf.truncations() <= st.m_tr);
    }

    #[test]
    fn reconstruction_has_the_counted_size(seed in any::<u64>()) {
        let g = small_internal(seed);
        let t = text_of(&g);
        let tf = ics_factorization(&g, 64).unwrap();
        let r = reconstruct(&t, &tf).unwrap();
        prop_assert_eq!(text_of(&r), t.clone());
        prop_assert!(is_internal(&r));
        prop_assert_eq!(r.size(), tf.h() + tf.truncations() + sigma(&t) - 1);
        prop_assert!(r.size() <= g.size());
        prop_assert_eq!(ics_factorization(&r, 64).unwrap().starts, tf.starts);
    }

    #[test]
    fn oracle_is_a_lower_bound(seed in any::<u64>()) {
        let g = small_internal(seed);
        let t = text_of(&g);
        let best = brute_force_chat(&t, t.len() + sigma(&t)).unwrap();
        prop_assert!(best.size <= g.size());
    }
}

#[test]
fn every_valid_factorization_reconstructs() {
    for t in all_strings(&['a', 'b'], 5) {
        for tf in valid_factorizations(&t, CandidateDomain::Full) {
            let g = reconstruct(&t, &tf).unwrap_or_else(|e| panic!("{t}: {e}"));
            assert_eq!(g.size(), tf.system_size(sigma(&t)), "{t}");
            assert_eq!(ics_factorization(&g, 64).unwrap().starts, tf.starts, "{t}");
        }
    }
}

#[test]
fn restricted_truncation_domain_keeps_the_optimum() {
    let mut texts = all_strings(&['a', 'b'], 6);
    texts.extend(all_strings(&['a', 'b', 'c'], 5));
    for t in texts {
        let full = brute_force_chat(&t, t.len() + sigma(&t)).unwrap().size;
        let sigma = sigma(&t);
        let catalog =
            valid_factorizations(&t, CandidateDomain::Catalog).iter().map(|tf| tf.system_size(sigma)).min().unwrap();
        assert_eq!(full, catalog, "{t}");
    }
}

#[test]
fn spot_values() {
    for (t, want) in [("a", 1), ("aa", 2), ("aaaa", 2), ("aaaaaa", 2), ("abab", 4), ("ab", 3)] {
        assert_eq!(brute_force_chat(t, 10).unwrap().size, want, "{t}");
    }
}

