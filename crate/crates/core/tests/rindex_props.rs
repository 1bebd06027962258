mod common;

use common::{brute_boundaries, brute_bwt, brute_occurrences, brute_sa, terminated};
use pfp_rindex::pfp_builder::{build_from_parse, BuildMode};
use pfp_rindex::pfparse::{parse_text, TriggerConfig};
use pfp_rindex::rindex::{self, RIndex};
use pfp_rindex::text_ingest::TextBuffer;
use proptest::prelude::*;

fn brute_index(content: &[u8]) -> (RIndex, Vec<u8>, Vec<u64>) {
    let text = terminated(content, 1);
    let sa = brute_sa(&text);
    let bwt = brute_bwt(&text, &sa);
    let (ssa, esa) = brute_boundaries(&bwt, &sa);
    (RIndex::from_bwt(&bwt, &ssa, &esa).unwrap(), text, sa)
}

fn content() -> impl Strategy<Value = Vec<u8>> {
    (1u8..=4).prop_flat_map(|s| {
        proptest::collection::vec((0..s).prop_map(|k| b"ACGT"[k as usize]), 1..400)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn queries_match_naive(
        content in content(),
        picks in proptest::collection::vec((any::<prop::sample::Index>(), 1usize..12), 1..20),
        randoms in proptest::collection::vec(proptest::collection::vec(prop_oneof![Just(b'A'), Just(b'C'), Just(b'G'), Just(b'T')], 1..8), 1..10),
    ) {
        let (idx, text, _) = brute_index(&content);
        let planted = picks.iter().map(|(at, len)| {
            let s = at.index(content.len());
            content[s..(s + len).min(content.len())].to_vec()
        });
        for pat in planted.chain(randoms) {
            let expect = brute_occurrences(&text, &pat);
            prop_assert_eq!(idx.count(&pat).unwrap(), expect.len() as u64);
            let mut got = idx.locate_all(&pat, None).unwrap();
            got.sort_unstable();
            prop_assert_eq!(&got, &expect);
            if !expect.is_empty() {
                let capped = idx.locate_all(&pat, Some(2)).unwrap();
                prop_assert_eq!(capped.len(), expect.len().min(2));
                prop_assert!(capped.iter().all(|h| expect.contains(h)));
            }
        }
    }

    #[test]
    fn phi_inverse_sweep(content in content()) {
        let (idx, _, sa) = brute_index(&content);
        for h in 0..sa.len() - 1 {
            prop_assert_eq!(idx.phi_inverse(sa[h]), Some(sa[h + 1]));
        }
        prop_assert_eq!(idx.phi_inverse(sa[sa.len() - 1]), None);
        prop_assert_eq!(idx.last_sa(), sa[sa.len() - 1]);
    }

    #[test]
    fn toehold_exact_after_every_step(content in content(), start in any::<prop::sample::Index>()) {
        let (idx, _, sa) = brute_index(&content);
        let from = start.index(content.len());
        for mut st in [idx.initial_state(), idx.initial_state_bottom()] {
            for &c in content[from..].iter().rev() {
                st = idx.backward_step(&st, c).unwrap();
                prop_assert_eq!(st.toehold, sa[st.anchored_row() as usize]);
            }
        }
    }

    #[test]
    fn pfp_path_builds_same_index(content in content(), w in 1usize..5, p in 1u64..10) {
        let text = TextBuffer::from_content(content.clone(), w).unwrap();
        let (dict, parse) = parse_text(&text, &TriggerConfig::new(w, p)).unwrap();
        let out = build_from_parse(&dict, &parse, BuildMode::Sample).unwrap();
        let idx = RIndex::from_bwt(&out.bwt, &out.sample.ssa, &out.sample.esa).unwrap();
        let sa = brute_sa(text.data());
        for h in 0..sa.len() - 1 {
            prop_assert_eq!(idx.phi_inverse(sa[h]), Some(sa[h + 1]));
        }
        let pat = &content[..content.len().min(5)];
        prop_assert_eq!(idx.count(pat).unwrap(), brute_occurrences(text.data(), pat).len() as u64);
    }
}

#[test]
fn absent_byte_gives_empty_step() {
    let (idx, _, _) = brute_index(b"ACGTACGT");
    assert!(idx.backward_step(&idx.initial_state(), b'Z').is_none());
    assert_eq!(idx.count(b"ZZZ").unwrap(), 0);
}

#[test]
fn save_load_preserves_queries() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.ri");
    let content: Vec<u8> = b"ACGTTGCA".iter().copied().cycle().take(3000).collect();
    let (idx, _, _) = brute_index(&content);
    rindex::save(&idx, &path).unwrap();
    let back = rindex::load(&path).unwrap();
    assert_eq!(back, idx);
    for len in 1..30 {
        let pat = &content[len..2 * len];
        assert_eq!(back.count(pat).unwrap(), idx.count(pat).unwrap());
        assert_eq!(
            back.locate_all(pat, None).unwrap(),
            idx.locate_all(pat, None).unwrap()
        );
    }
}

#[test]
fn empty_path_is_io_error() {
    assert!(matches!(
        rindex::load(std::path::Path::new("")),
        Err(pfp_rindex::Error::Io { .. })
    ));
}
