//! Property tests for the structural invariants: corpus round-trips, target
//! masking, multiset preservation, and interpolation algebra.

use ndarray::Array2;
use proptest::prelude::*;

use absa_augment::corpus::{
    dataset_stats, parse_semeval_xml, write_xml, OpinionRecord, OutputRecord, Polarity,
};
use absa_augment::eda::{random_deletion, random_swap};
use absa_augment::mixup::{mixup_pair, EmbeddedTriple};
use absa_augment::seed::record_stream;
use absa_augment::text::{mask_target, tokenize, unmask_target};

const WORDS: &[&str] = &[
    "the", "a", "was", "very", "and", "with", "good", "slow", "cold", "rude", "delicious",
    "phenomenal", "patient", "friendly", "naïve", "café", "food", "meal", "service", "place",
    "staff", "menu", "soup", "pizza", "wine", "dessert",
];

const TARGETS: &[&str] = &[
    "food", "meal", "service", "staff", "wine list", "fish and chips", "café", "waitress",
];

const CATEGORIES: &[&str] = &[
    "FOOD#QUALITY",
    "SERVICE#GENERAL",
    "AMBIENCE#GENERAL",
    "DRINKS#PRICES",
];

fn polarity_strategy() -> impl Strategy<Value = Polarity> {
    prop::sample::select(vec![Polarity::Positive, Polarity::Neutral, Polarity::Negative])
}

prop_compose! {
    fn record_strategy()(
        words in prop::collection::vec(prop::sample::select(WORDS.to_vec()), 2..10),
        target in prop::sample::select(TARGETS.to_vec()),
        slot_seed in any::<prop::sample::Index>(),
        category in prop::sample::select(CATEGORIES.to_vec()),
        polarity in polarity_strategy(),
        bang in any::<bool>(),
        id in "[a-z][a-z0-9]{1,6}",
    ) -> OpinionRecord {
        let mut words: Vec<String> = words.into_iter().map(str::to_string).collect();
        let slot = slot_seed.index(words.len() + 1);
        words.insert(slot, target.to_string());
        let mut text = words.join(" ");
        if bang {
            text.push('!');
        }
        let target_from: usize = words[..slot].iter().map(|w| w.chars().count() + 1).sum();
        OpinionRecord {
            id,
            text,
            target: target.to_string(),
            target_from,
            target_to: target_from + target.chars().count(),
            category: category.to_string(),
            polarity,
            sentence_attrs: vec![],
            opinion_attrs: vec![],
        }
    }
}

proptest! {
    #[test]
    fn xml_round_trip_is_identity(records in prop::collection::vec(record_strategy(), 0..12)) {
        let entries: Vec<OutputRecord> =
            records.iter().cloned().map(OutputRecord::Original).collect();
        let mut buffer = Vec::new();
        write_xml(&entries, &mut buffer).unwrap();
        let reparsed = parse_semeval_xml(buffer.as_slice()).unwrap();
        // Re-parsing what we wrote must also be a fixed point.
        let mut buffer2 = Vec::new();
        let entries2: Vec<OutputRecord> =
            reparsed.iter().cloned().map(OutputRecord::Original).collect();
        write_xml(&entries2, &mut buffer2).unwrap();
        prop_assert_eq!(&records, &reparsed);
        prop_assert_eq!(buffer, buffer2);
    }

    #[test]
    fn mask_unmask_round_trip(record in record_strategy()) {
        let ms = mask_target(&record).unwrap();
        let (text, from, to) = unmask_target(&ms, None).unwrap();
        // Token-level identity and valid offsets.
        let mut expected = Vec::new();
        for token in &ms.tokens {
            if token == "$t$" {
                expected.extend(tokenize(&record.target));
            } else {
                expected.push(token.clone());
            }
        }
        prop_assert_eq!(tokenize(&text), expected);
        let span: String = text.chars().skip(from).take(to - from).collect();
        prop_assert_eq!(span, record.target);
    }

    #[test]
    fn swap_preserves_token_multiset(record in record_strategy(), seed in any::<u64>(), alpha in 0.0f64..1.0) {
        let ms = mask_target(&record).unwrap();
        let mut rng = record_stream(seed, &record.id, "rs");
        let out = random_swap(&ms, alpha, true, false, &mut rng);
        let mut before = ms.tokens.clone();
        let mut after = out.sentence.tokens.clone();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
        prop_assert_eq!(out.sentence.tokens[out.sentence.placeholder_index].as_str(), "$t$");
    }

    #[test]
    fn deletion_output_is_subsequence(record in record_strategy(), seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let ms = mask_target(&record).unwrap();
        let mut rng = record_stream(seed, &record.id, "rd");
        let out = random_deletion(&ms, alpha, &mut rng);
        // Output tokens appear in the input in order (a subsequence).
        let mut cursor = 0;
        for token in &out.sentence.tokens {
            let found = ms.tokens[cursor..].iter().position(|t| t == token);
            prop_assert!(found.is_some(), "token {} not in remaining input", token);
            cursor += found.unwrap() + 1;
        }
        prop_assert_eq!(
            out.sentence.tokens.iter().filter(|t| *t == "$t$").count(),
            1
        );
    }

    #[test]
    fn mixup_symmetry_and_convexity(
        values_a in prop::collection::vec(-10.0f64..10.0, 12),
        values_b in prop::collection::vec(-10.0f64..10.0, 12),
        lambda in 0.0f64..=1.0,
    ) {
        let triple = |values: Vec<f64>, id: &str, polarity: Polarity| {
            let matrix = Array2::from_shape_vec((3, 4), values).unwrap();
            EmbeddedTriple {
                record_id: id.to_string(),
                label: polarity.one_hot(),
                left: matrix.clone(),
                target: matrix.clone(),
                right: matrix,
                left_len: 4,
                target_len: 4,
                right_len: 4,
            }
        };
        let a = triple(values_a, "a", Polarity::Positive);
        let b = triple(values_b, "b", Polarity::Negative);
        let forward = mixup_pair(&a, &b, lambda).unwrap();
        let reverse = mixup_pair(&b, &a, 1.0 - lambda).unwrap();
        for (x, y) in forward.left.iter().zip(reverse.left.iter()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
        for ((out, x), y) in forward.left.iter().zip(a.left.iter()).zip(b.left.iter()) {
            let (lo, hi) = (x.min(*y), x.max(*y));
            prop_assert!(*out >= lo - 1e-12 && *out <= hi + 1e-12);
        }
        let sum: f64 = forward.label.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn stats_are_order_invariant(records in prop::collection::vec(record_strategy(), 0..20), rotation in any::<prop::sample::Index>()) {
        let stats = dataset_stats(&records);
        prop_assert_eq!(stats.total, records.len());
        let counted: usize = stats.polarity_counts.values().sum();
        prop_assert_eq!(counted, records.len());
        if !records.is_empty() {
            let mut rotated = records.clone();
            rotated.rotate_left(rotation.index(records.len()));
            prop_assert_eq!(dataset_stats(&rotated), stats);
        }
    }
}
