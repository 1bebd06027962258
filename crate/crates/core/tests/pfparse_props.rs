mod common;

use common::{horner_hash, terminated};
use pfp_rindex::pfparse::*;
use pfp_rindex::text_ingest::TextBuffer;
use proptest::prelude::*;

fn content_strategy() -> impl Strategy<Value = Vec<u8>> {
    (1u8..=5).prop_flat_map(|sigma| {
        proptest::collection::vec((0..sigma).prop_map(|k| b"ACGTN"[k as usize]), 1..600)
    })
}

fn expected_triggers(data: &[u8], w: usize, p: u64) -> Vec<usize> {
    let last = data.len() - w;
    (0..=last)
        .filter(|&s| {
            s == 0
                || s == last
                || horner_hash(&data[s..s + w], DEFAULT_HASH_BASE, MERSENNE_61).is_multiple_of(p)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn triggers_match_horner(content in content_strategy(), w in 1usize..9, p in 1u64..24) {
        let text = TextBuffer::from_content(content.clone(), w).unwrap();
        let cfg = TriggerConfig::new(w, p);
        let data = terminated(&content, w);
        prop_assert_eq!(find_triggers(&text, &cfg).unwrap(), expected_triggers(&data, w, p));
    }

    #[test]
    fn parse_reconstructs_text(content in content_strategy(), w in 1usize..9, p in 1u64..24) {
        let text = TextBuffer::from_content(content, w).unwrap();
        let (dict, parse) = parse_text(&text, &TriggerConfig::new(w, p)).unwrap();
        prop_assert_eq!(parse.reconstruct(&dict), text.data().to_vec());
        prop_assert_eq!(parse.text_len(&dict), text.len() as u64);
        let total: u64 = parse.occ().iter().map(|&c| c as u64).sum();
        prop_assert_eq!(total, parse.len() as u64);
        prop_assert!(parse.occ().iter().all(|&c| c > 0));
        let phrases: Vec<&[u8]> = (0..dict.len()).map(|i| dict.phrase(i)).collect();
        prop_assert!(phrases.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn streaming_and_parallel_agree(
        content in content_strategy(),
        w in 1usize..9,
        p in 1u64..24,
        cuts in proptest::collection::vec(1usize..50, 1..20),
        chunk_len in 1usize..200,
    ) {
        let text = TextBuffer::from_content(content.clone(), w).unwrap();
        let cfg = TriggerConfig::new(w, p);
        let reference = parse_text(&text, &cfg).unwrap();
        prop_assert_eq!(&parse_text_parallel(&text, &cfg, chunk_len).unwrap(), &reference);

        let mut sp = StreamingParser::new(cfg).unwrap();
        let mut rest = &content[..];
        for &c in cuts.iter().cycle() {
            if rest.is_empty() {
                break;
            }
            let k = c.min(rest.len());
            sp.push(&rest[..k]).unwrap();
            rest = &rest[k..];
        }
        prop_assert_eq!(sp.consumed(), content.len() as u64);
        prop_assert_eq!(sp.finish().unwrap(), reference);
    }

    #[test]
    fn phrases_are_trigger_bounded(content in content_strategy(), w in 1usize..6, p in 1u64..12) {
        let text = TextBuffer::from_content(content.clone(), w).unwrap();
        let (dict, parse) = parse_text(&text, &TriggerConfig::new(w, p)).unwrap();
        let ranks = parse.ranks();
        for (q, &r) in ranks.iter().enumerate() {
            let t = dict.phrase(r as usize - 1);
            prop_assert!(t.len() > w);
            let hash = |win: &[u8]| horner_hash(win, DEFAULT_HASH_BASE, MERSENNE_61) % p;
            // Interior windows never trigger; the closing window does unless forced.
            for s in 1..t.len() - w {
                prop_assert_ne!(hash(&t[s..s + w]), 0);
            }
            if q + 1 < ranks.len() {
                prop_assert_eq!(hash(&t[t.len() - w..]), 0);
                let next = dict.phrase(ranks[q + 1] as usize - 1);
                prop_assert_eq!(&t[t.len() - w..], &next[..w]);
            }
        }
    }
}

#[test]
fn parse_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("x");
    let text = TextBuffer::from_content(b"GATTACAGATTACAGATTACA".to_vec(), 3).unwrap();
    let (dict, parse) = parse_text(&text, &TriggerConfig::new(3, 4)).unwrap();
    write_parse_files(&base, &dict, &parse).unwrap();
    assert_eq!(read_parse_files(&base, 3).unwrap(), (dict, parse.clone()));
    let bumped: Vec<u8> = parse
        .occ()
        .iter()
        .flat_map(|&c| (c + 1).to_le_bytes())
        .collect();
    std::fs::write(with_extension(&base, "occ"), bumped).unwrap();
    assert!(read_parse_files(&base, 3).is_err());
}

#[test]
fn mismatched_window_rejected() {
    let text = TextBuffer::from_content(b"ACGT".to_vec(), 3).unwrap();
    assert!(find_triggers(&text, &TriggerConfig::new(2, 4)).is_err());
}
