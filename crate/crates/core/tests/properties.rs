mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vulnx::chunking::{build_chunks, segment_records, validate_chunks, ChunkConfig};
use vulnx::consolidation::{consolidate, dedup_key};
use vulnx::evaluation::{rouge_l, EvalConfig};
use vulnx::ingest::{normalize_text, NormalizedText, RawReport};
use vulnx::schema::{parse_record, serialize_record, validate_record};
use vulnx::ScannerKind;

proptest! {
    #[test]
    fn normalization_is_idempotent(s in "[ -~\t\r\n\u{c}\u{a0}é]{0,400}") {
        let once = normalize_text(&RawReport::from_text("x.txt", &s));
        let twice = normalize_text(&RawReport::from_text("x.txt", &once.text));
        prop_assert_eq!(once.text, twice.text);
    }

    #[test]
    fn generated_records_validate_and_round_trip(rec in common::record()) {
        prop_assert!(validate_record(&rec).ok, "{:?}", validate_record(&rec).violations);
        let text = serialize_record(&rec);
        let back = parse_record(&text).unwrap();
        prop_assert_eq!(&back, &rec);
        prop_assert_eq!(serialize_record(&back), text);
    }

    #[test]
    fn rouge_is_bounded_and_symmetric_at_beta_one(a in "[a-d ]{0,40}", b in "[a-d ]{0,40}") {
        let cfg = EvalConfig::default();
        let ab = rouge_l(&a, &b, &cfg);
        let ba = rouge_l(&b, &a, &cfg);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - ba).abs() < 1e-12);
    }

    #[test]
    fn rouge_identity(a in "[a-z]{1,8}( [a-z]{1,8}){0,10}") {
        prop_assert_eq!(rouge_l(&a, &a, &EvalConfig::default()), 1.0);
    }

    #[test]
    fn chunking_is_lossless_and_monotonic(
        seed in any::<u64>(),
        sizes in prop::collection::vec(200usize..6000, 1..12),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = common::chunk_fixture(&mut rng, &sizes);
        let norm = NormalizedText::from_normalized(text);
        let seg = segment_records(&norm, ScannerKind::OpenVas).unwrap();
        prop_assert_eq!(seg.records.len(), sizes.len());
        let expected: String = seg.records.iter().map(|s| norm.text.chars().skip(s.start).take(s.len()).collect::<String>()).collect();
        let mut last = usize::MAX;
        for target in [1000, 3000, 5000] {
            let cfg = ChunkConfig { target_chars: target, hard_max_chars: 5000, ..ChunkConfig::default() };
            let chunks = build_chunks(&seg.records, &norm, &cfg).unwrap();
            let joined: String = chunks.iter().map(|c| c.fresh_text()).collect();
            prop_assert_eq!(&joined, &expected);
            prop_assert!(validate_chunks(&chunks, &seg.records).coverage_complete);
            prop_assert!(chunks.len() <= last);
            last = chunks.len();
        }
    }

    #[test]
    fn consolidation_ignores_input_order(
        recs in prop::collection::vec(common::record(), 1..8),
        dup_from in prop::collection::vec(any::<prop::sample::Index>(), 0..6),
        shuffle_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let mut list = recs.clone();
        for ix in &dup_from {
            list.push(recs[ix.index(recs.len())].clone());
        }
        let mut shuffled = list.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let keys = |v: &[vulnx::UnifiedVulnerability]| {
            let mut k: Vec<String> = v.iter().map(dedup_key).collect();
            k.sort();
            k
        };
        let a = consolidate(&list);
        let b = consolidate(&shuffled);
        prop_assert_eq!(keys(&a.records), keys(&b.records));
        prop_assert_eq!(a.dropped_duplicates, b.dropped_duplicates);
    }
}
