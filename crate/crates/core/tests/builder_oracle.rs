mod common;

use common::{brute_boundaries, brute_bwt, brute_sa};
use pfp_rindex::pfp_builder::{build_from_parse, BuildMode};
use pfp_rindex::pfparse::{parse_text, TriggerConfig, MERSENNE_61};
use pfp_rindex::text_ingest::TextBuffer;
use proptest::prelude::*;

fn check(content: &[u8], w: usize, p: u64) -> Result<(), TestCaseError> {
    let text = TextBuffer::from_content(content.to_vec(), w).unwrap();
    let (dict, parse) = parse_text(&text, &TriggerConfig::new(w, p)).unwrap();
    let sa = brute_sa(text.data());
    let bwt = brute_bwt(text.data(), &sa);

    let out = build_from_parse(&dict, &parse, BuildMode::Sa).unwrap();
    prop_assert_eq!(&out.bwt, &bwt);
    prop_assert_eq!(&out.sa, &sa);

    let out = build_from_parse(&dict, &parse, BuildMode::Sample).unwrap();
    let (starts, ends) = brute_boundaries(&bwt, &sa);
    prop_assert_eq!(&out.bwt, &bwt);
    prop_assert_eq!(&out.sample.ssa, &starts);
    prop_assert_eq!(&out.sample.esa, &ends);
    prop_assert_eq!(out.sample.ssa.len(), out.runs());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matches_brute_force(
        content in (1u8..=6).prop_flat_map(|s| proptest::collection::vec(2u8..2 + s, 1..300)),
        w in 1usize..7,
        p in prop_oneof![1u64..16, Just(MERSENNE_61)],
    ) {
        check(&content, w, p)?;
    }

    #[test]
    fn repetitive_inputs(
        unit in proptest::collection::vec(b'A'..=b'D', 1..40),
        reps in 1usize..12,
        w in 1usize..6,
        p in 1u64..10,
    ) {
        let content: Vec<u8> = unit.iter().copied().cycle().take(unit.len() * reps).collect();
        check(&content, w, p)?;
    }
}

#[test]
fn edge_texts() {
    for content in [&b"A"[..], b"AA", b"AB", b"BA", b"\x02", b"\xff\x02\xff"] {
        for w in 1..5 {
            for p in [1, 2, 3, MERSENNE_61] {
                check(content, w, p).unwrap();
            }
        }
    }
}
