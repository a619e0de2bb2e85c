// SPDX-License-Identifier: Apache-2.0

mod common;

use mna_core::codec::{
    bytes_to_words, decode_stack, dissect_text, encode_stack, Codec, SpanKind, StackEntry,
    UNLIMITED_RLD,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn roundtrip(seed: u64) {
        let stack = common::random_stack(&mut ChaCha8Rng::seed_from_u64(seed));
        let bytes = encode_stack(&stack).unwrap();
        prop_assert_eq!(decode_stack(&bytes, UNLIMITED_RLD).unwrap().into_stack(), stack);
    }

    #[test]
    fn words_match_reference_packing(seed: u64) {
        let stack = common::random_stack(&mut ChaCha8Rng::seed_from_u64(seed));
        let words = Codec::default().encode_words(&stack).unwrap();
        prop_assert_eq!(words, common::oracle_words(&stack));
    }

    #[test]
    fn spans_follow_entries(seed: u64) {
        let stack = common::random_stack(&mut ChaCha8Rng::seed_from_u64(seed));
        let words = Codec::default().encode_words(&stack).unwrap();
        let spans = Codec::default().spans(&words).unwrap();
        prop_assert_eq!(spans.len(), stack.entries.len());
        let mut at = 0;
        for (s, e) in spans.iter().zip(&stack.entries) {
            prop_assert_eq!(s.start, at);
            prop_assert_eq!(s.len, e.lse_count());
            match e {
                StackEntry::Forwarding(_) => prop_assert_eq!(s.kind, SpanKind::Label),
                StackEntry::Nas(n) => prop_assert_eq!(s.kind, SpanKind::Nas(n.scope())),
            }
            at = s.end();
        }
    }

    #[test]
    fn arbitrary_words_never_panic(words in proptest::collection::vec(any::<u32>(), 0..40), rld in 0usize..48) {
        let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_be_bytes()).collect();
        let _ = decode_stack(&bytes, rld);
        let _ = Codec::lenient().decode_words(&words, rld);
        let _ = Codec::default().spans(&words);
        let text = dissect_text(&bytes, Some(rld));
        prop_assert!(text.lines().count() <= words.len() + 2);
    }

    #[test]
    fn truncated_decode_is_a_prefix(seed: u64, rld in 1usize..40) {
        let stack = common::random_stack(&mut ChaCha8Rng::seed_from_u64(seed));
        let bytes = encode_stack(&stack).unwrap();
        let n = bytes_to_words(&bytes).unwrap().len();
        if let Ok(p) = decode_stack(&bytes, rld) {
            let got = p.into_stack();
            prop_assert!(got.lse_count() <= n);
            prop_assert_eq!(&got.entries[..], &stack.entries[..got.entries.len()]);
        }
    }
}
