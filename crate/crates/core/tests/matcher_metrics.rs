use phosc_core::matcher::{gzsl_predict, zsl_predict, Lexicon, MatchError, SearchSpace};
use phosc_core::metrics::{cer, edit_distance, harmonic_mean, length_confusion, top1_accuracy};
use phosc_core::signature::SignatureEncoder;
use proptest::prelude::*;

/// Textbook recursive Levenshtein distance.
fn levenshtein(a: &[char], b: &[char]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((ca, ra)), Some((cb, rb))) => {
            let sub = levenshtein(ra, rb) + usize::from(ca != cb);
            sub.min(levenshtein(ra, b) + 1).min(levenshtein(a, rb) + 1)
        }
    }
}

fn short() -> impl Strategy<Value = String> {
    "[abc]{0,6}"
}

fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
    let na: f64 = a.iter().map(|&x| f64::from(x).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|&x| f64::from(x).powi(2)).sum::<f64>().sqrt();
    dot / (na * nb)
}

const SEEN: [&str; 4] = ["house", "river", "stone", "light"];
const UNSEEN: [&str; 3] = ["horse", "silent", "listen"];

fn lexicon() -> (Lexicon, SignatureEncoder) {
    let enc = SignatureEncoder::default();
    (Lexicon::build(&SEEN, &UNSEEN, &enc).unwrap(), enc)
}

#[test]
fn harmonic_mean_of_reported_pair() {
    let h = harmonic_mean(0.75, 0.96).unwrap();
    assert_eq!((h * 100.0).round() / 100.0, 0.84);
    assert_eq!(harmonic_mean(0.0, 0.0).unwrap(), 0.0);
    assert!(harmonic_mean(1.2, 0.5).is_err());
}

#[test]
fn cosine_toy_picks_the_closer_blend() {
    let (lex, enc) = lexicon();
    let a = enc.encode("horse").unwrap().combined;
    let b = enc.encode("house").unwrap().combined;
    for (wa, expected_all) in [(0.7f32, "horse"), (0.3, "house")] {
        let pred: Vec<f32> = a.iter().zip(&b).map(|(x, y)| wa * x + (1.0 - wa) * y).collect();
        let oracle = SEEN
            .iter()
            .chain(&UNSEEN)
            .map(|w| (cosine(&pred, &enc.encode(w).unwrap().combined), *w))
            .max_by(|x, y| x.0.total_cmp(&y.0))
            .unwrap()
            .1;
        assert_eq!(oracle, expected_all);
        assert_eq!(gzsl_predict(&pred, &lex).unwrap(), expected_all);
        assert_eq!(zsl_predict(&pred, &lex).unwrap(), "horse");
        assert_eq!(lex.predict(&pred, SearchSpace::Seen).unwrap(), "house");
    }
}

#[test]
fn matcher_rejects_bad_inputs() {
    let (lex, enc) = lexicon();
    assert!(matches!(
        lex.predict(&[1.0; 3], SearchSpace::All),
        Err(MatchError::DimensionMismatch { .. })
    ));
    assert_eq!(lex.predict(&vec![0.0; lex.dim()], SearchSpace::All), Err(MatchError::ZeroVector));
    assert!(matches!(
        Lexicon::build(&["house"], &["house"], &enc),
        Err(MatchError::SeenUnseenOverlap(_))
    ));
    assert!(matches!(
        Lexicon::build(&["house", "house"], &[], &enc),
        Err(MatchError::DuplicateWord(_))
    ));
}

#[test]
fn every_word_retrieves_itself() {
    let (lex, enc) = lexicon();
    for w in SEEN.iter().chain(&UNSEEN) {
        let sig = enc.encode(w).unwrap().combined;
        assert_eq!(gzsl_predict(&sig, &lex).unwrap(), *w);
    }
}

#[test]
fn length_confusion_columns_sum_to_one() {
    let lc = length_confusion(&["ab", "abc", "a", "abcd", ""], &["ab", "ab", "a", "abc", "abc"]).unwrap();
    assert_eq!(lc.counts[3][2], 1);
    assert_eq!(lc.counts[0][3], 1);
    assert_eq!(lc.samples_per_true_length, vec![0, 1, 2, 2, 0]);
    assert_eq!(lc.classes_per_true_length, vec![0, 1, 1, 1, 0]);
    for t in 0..lc.counts.len() {
        let col: f64 = lc.normalized.iter().map(|row| row[t]).sum();
        if lc.samples_per_true_length[t] == 0 {
            assert_eq!(col, 0.0);
        } else {
            assert!((col - 1.0).abs() < 1e-12, "column {t} sums to {col}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn edit_distance_matches_recursive_oracle(a in short(), b in short()) {
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        prop_assert_eq!(edit_distance(&a, &b), levenshtein(&ca, &cb));
    }

    #[test]
    fn edit_distance_is_a_metric(a in short(), b in short(), c in short()) {
        prop_assert_eq!(edit_distance(&a, &b) == 0, a == b);
        prop_assert_eq!(edit_distance(&a, &b), edit_distance(&b, &a));
        prop_assert!(edit_distance(&a, &c) <= edit_distance(&a, &b) + edit_distance(&b, &c));
    }

    #[test]
    fn harmonic_mean_lies_between_min_and_mean(u in 0.0f64..=1.0, s in 0.0f64..=1.0) {
        let h = harmonic_mean(u, s).unwrap();
        prop_assert!(h >= u.min(s) - 1e-15);
        prop_assert!(h <= (u + s) / 2.0 + 1e-15);
    }

    #[test]
    fn cer_is_zero_iff_exact(p in short(), t in "[abc]{1,6}") {
        let c = cer(&[&p], &[&t]).unwrap();
        prop_assert_eq!(c.mean == 0.0, p == t);
        prop_assert_eq!(top1_accuracy(&[&p], &[&t]).unwrap() == 1.0, p == t);
    }

    #[test]
    fn zsl_stays_in_the_unseen_set(raw in prop::collection::vec(0.0f32..1.0, 529), scale in 0.01f32..100.0) {
        let (lex, _) = lexicon();
        prop_assume!(raw.iter().any(|&x| x > 0.0));
        let w = zsl_predict(&raw, &lex).unwrap();
        prop_assert!(UNSEEN.contains(&w));
        let scaled: Vec<f32> = raw.iter().map(|x| x * scale).collect();
        prop_assert_eq!(zsl_predict(&scaled, &lex).unwrap(), w);
        prop_assert_eq!(gzsl_predict(&scaled, &lex).unwrap(), gzsl_predict(&raw, &lex).unwrap());
    }
}
