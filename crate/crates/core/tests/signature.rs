use phosc_core::signature::{phoc_encode, phos_encode, segment_of, PhocConfig, PhosConfig, SignatureEncoder, NUM_SHAPES};
use proptest::prelude::*;

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,12}"
}

/// Block offsets of each pyramid level in a PHOS vector.
fn phos_blocks(levels: &[usize]) -> Vec<(usize, usize)> {
    let mut off = 0;
    levels
        .iter()
        .map(|&h| {
            let b = (h, off);
            off += h * NUM_SHAPES;
            b
        })
        .collect()
}

#[test]
fn default_signature_lengths() {
    let enc = SignatureEncoder::default();
    assert_eq!(enc.phos_len(), (1 + 2 + 3 + 4 + 5) * 11);
    assert_eq!(enc.phoc_len(), (2 + 3 + 4 + 5) * 26);
    assert_eq!(enc.len(), 529);
    let sig = enc.encode("zero").unwrap();
    assert_eq!(sig.combined.len(), 529);
    assert_eq!(&sig.combined[..364], sig.phoc.as_slice());
    assert_eq!(&sig.combined[364..], sig.phos.as_slice());
}

#[test]
fn midpoint_segments_for_six_letters() {
    // Character i occupies [i/6, (i+1)/6]; its midpoint decides the segment,
    // and a midpoint on a boundary belongs to the later segment.
    let got: Vec<Vec<usize>> = (1..=5).map(|h| (0..6).map(|i| segment_of(i, 6, h)).collect()).collect();
    assert_eq!(
        got,
        vec![
            vec![0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 1, 1],
            vec![0, 0, 1, 1, 2, 2],
            vec![0, 1, 1, 2, 3, 3],
            vec![0, 1, 2, 2, 3, 4],
        ]
    );
}

#[test]
fn unknown_characters_are_named() {
    let err = SignatureEncoder::default().encode("ab1").unwrap_err();
    assert!(err.to_string().contains('1'), "{err}");
    assert!(SignatureEncoder::default().encode("").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn anagrams_share_only_the_level_one_block(w in word(), seed in any::<u64>()) {
        let mut chars: Vec<char> = w.chars().collect();
        let n = chars.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            chars.swap(i, (s >> 33) as usize % (i + 1));
        }
        let anagram: String = chars.into_iter().collect();
        let cfg = PhosConfig::default();
        let a = phos_encode(&w, &cfg).unwrap();
        let b = phos_encode(&anagram, &cfg).unwrap();
        prop_assert_eq!(&a[..NUM_SHAPES], &b[..NUM_SHAPES]);
    }

    #[test]
    fn every_phos_level_partitions_the_word(w in word()) {
        let cfg = PhosConfig::default();
        let v = phos_encode(&w, &cfg).unwrap();
        prop_assert_eq!(v.len(), cfg.len());
        prop_assert!(v.iter().all(|&x| x >= 0.0 && x.fract() == 0.0));
        let blocks = phos_blocks(&cfg.levels);
        let (_, first) = blocks[0];
        for &(h, off) in &blocks {
            for s in 0..NUM_SHAPES {
                let total: f32 = (0..h).map(|seg| v[off + seg * NUM_SHAPES + s]).sum();
                prop_assert_eq!(total, v[first + s]);
            }
        }
    }

    #[test]
    fn phoc_marks_characters_and_nothing_else(w in word()) {
        let cfg = PhocConfig::default();
        let v = phoc_encode(&w, &cfg).unwrap();
        prop_assert!(v.iter().all(|&x| x == 0.0 || x == 1.0));
        let k = cfg.alphabet.len();
        let mut off = 0;
        for &h in &cfg.levels {
            // A character at least as narrow as a region covers half of one.
            for c in w.chars().filter(|_| w.len() >= h) {
                let idx = cfg.alphabet.iter().position(|&a| a == c).unwrap();
                prop_assert!((0..h).any(|r| v[off + r * k + idx] == 1.0), "{c} unmarked at level {h}");
            }
            for (idx, a) in cfg.alphabet.iter().enumerate() {
                if !w.contains(*a) {
                    prop_assert!((0..h).all(|r| v[off + r * k + idx] == 0.0));
                }
            }
            off += h * k;
        }
    }

    #[test]
    fn encoding_is_deterministic(w in word()) {
        let enc = SignatureEncoder::default();
        prop_assert_eq!(enc.encode(&w).unwrap(), enc.encode(&w).unwrap());
    }
}
