//! Suffix array and BWT primitives: a comparison-sort oracle, SA-IS,
//! BWT from SA, LF mapping and BWT inversion (the `bwt2sa` baseline).
//!
//! All positions are 0-based. Suffixes are ordered by plain lexicographic
//! comparison, so a suffix that is a proper prefix of another sorts first.
//! For a text ending in `w` sentinels this puts the sentinel-only suffixes
//! at rows `0..w`, shortest first.

mod sais;

use std::fmt::Debug;

use num_traits::{AsPrimitive, PrimInt, Unsigned};

use crate::error::{Error, Result};
use crate::text_ingest::SENTINEL;

/// An unsigned symbol type a suffix array can be built over: bytes for
/// texts, 32-bit ranks for parses.
pub trait Symbol: PrimInt + Unsigned + AsPrimitive<usize> + Debug + Send + Sync {}

impl<T> Symbol for T where T: PrimInt + Unsigned + AsPrimitive<usize> + Debug + Send + Sync {}

/// Text positions ordered by the suffixes starting there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixArray(Vec<usize>);

impl SuffixArray {
    pub fn new(entries: Vec<usize>) -> Self {
        SuffixArray(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl std::ops::Index<usize> for SuffixArray {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// Oracle construction: sorts all suffixes by direct comparison.
pub fn sa_naive<S: Symbol>(text: &[S]) -> SuffixArray {
    let mut sa: Vec<usize> = (0..text.len()).collect();
    sa.sort_unstable_by(|&a, &b| text[a..].cmp(&text[b..]));
    SuffixArray(sa)
}

/// Linear-time construction (SA-IS). Equal to [`sa_naive`] on every input.
pub fn sa_fast<S: Symbol>(text: &[S]) -> SuffixArray {
    let upper = text.iter().map(|s| s.as_()).max().unwrap_or(0);
    SuffixArray(sais::sa_is(text, upper))
}

const OCC_BLOCK: usize = 64;

/// A BWT with its character counts, `C` array and sampled rank support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwtString {
    data: Vec<u8>,
    counts: [u64; 256],
    c_array: [u64; 256],
    // Per-block occurrence counts for the symbols present, `symbols.len()`
    // entries per block of OCC_BLOCK bytes.
    symbols: Vec<u8>,
    slot: [u8; 256],
    occ: Vec<u64>,
}

impl BwtString {
    pub fn from_bytes(data: Vec<u8>) -> Self {
        let mut counts = [0u64; 256];
        for &b in &data {
            counts[b as usize] += 1;
        }
        let mut c_array = [0u64; 256];
        let mut acc = 0u64;
        for c in 0..256 {
            c_array[c] = acc;
            acc += counts[c];
        }
        let symbols: Vec<u8> = (0..=255u8).filter(|&c| counts[c as usize] > 0).collect();
        let mut slot = [u8::MAX; 256];
        for (k, &c) in symbols.iter().enumerate() {
            slot[c as usize] = k as u8;
        }
        let sigma = symbols.len();
        let blocks = data.len() / OCC_BLOCK + 1;
        let mut occ = vec![0u64; blocks * sigma];
        let mut running = vec![0u64; sigma];
        for (i, &b) in data.iter().enumerate() {
            if i % OCC_BLOCK == 0 {
                let k = i / OCC_BLOCK;
                occ[k * sigma..(k + 1) * sigma].copy_from_slice(&running);
            }
            running[slot[b as usize] as usize] += 1;
        }
        if data.len().is_multiple_of(OCC_BLOCK) {
            let k = data.len() / OCC_BLOCK;
            occ[k * sigma..(k + 1) * sigma].copy_from_slice(&running);
        }
        BwtString {
            data,
            counts,
            c_array,
            symbols,
            slot,
            occ,
        }
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn char_counts(&self) -> &[u64; 256] {
        &self.counts
    }

    /// `c_array[c]` = number of text bytes strictly smaller than `c`.
    pub fn c_array(&self) -> &[u64; 256] {
        &self.c_array
    }

    /// Occurrences of `c` in `data[..i]`.
    pub fn rank(&self, c: u8, i: usize) -> usize {
        let s = self.slot[c as usize];
        if s == u8::MAX {
            return 0;
        }
        let k = i / OCC_BLOCK;
        let base = self.occ[k * self.symbols.len() + s as usize] as usize;
        base + self.data[k * OCC_BLOCK..i]
            .iter()
            .filter(|&&b| b == c)
            .count()
    }

    /// Number of BWT runs.
    pub fn runs(&self) -> usize {
        count_runs(&self.data)
    }
}

pub fn count_runs(bwt: &[u8]) -> usize {
    if bwt.is_empty() {
        return 0;
    }
    1 + bwt.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `BWT[i] = text[(SA[i] - 1) mod n]`.
pub fn bwt_from_sa<S: Symbol>(text: &[S], sa: &SuffixArray) -> Vec<S> {
    let n = text.len();
    sa.entries()
        .iter()
        .map(|&p| text[if p == 0 { n - 1 } else { p - 1 }])
        .collect()
}

/// Byte BWT with rank support.
pub fn bwt_string_from_sa(text: &[u8], sa: &SuffixArray) -> BwtString {
    BwtString::from_bytes(bwt_from_sa(text, sa))
}

/// LF mapping: the F-column row holding the character found at L-row `pos`.
///
/// For texts with a single terminator this is a cycle through all rows. With
/// `w > 1` trailing sentinels the rows of the sentinel-only suffixes do not
/// follow the text backwards; [`invert_bwt_to_sa`] handles them directly.
pub fn lf_step(bwt: &BwtString, pos: usize) -> usize {
    let c = bwt.data[pos];
    bwt.c_array[c as usize] as usize + bwt.rank(c, pos)
}

/// Start-run and end-run `(BWT position, SA value)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunBoundarySample {
    pub ssa: Vec<(u64, u64)>,
    pub esa: Vec<(u64, u64)>,
}

impl RunBoundarySample {
    /// Extracts the pairs from a complete BWT and SA.
    pub fn from_bwt_and_sa(bwt: &[u8], sa: &[usize]) -> Self {
        let n = bwt.len();
        let mut out = RunBoundarySample::default();
        for i in 0..n {
            if is_run_start(bwt, i) {
                out.ssa.push((i as u64, sa[i] as u64));
            }
            if is_run_end(bwt, i) {
                out.esa.push((i as u64, sa[i] as u64));
            }
        }
        out
    }

    pub fn runs(&self) -> usize {
        self.ssa.len()
    }
}

fn is_run_start(bwt: &[u8], i: usize) -> bool {
    i == 0 || bwt[i] != bwt[i - 1]
}

fn is_run_end(bwt: &[u8], i: usize) -> bool {
    i + 1 == bwt.len() || bwt[i] != bwt[i + 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvertMode {
    Full,
    Sample,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inverted {
    Full(SuffixArray),
    Sample(RunBoundarySample),
}

/// Recovers the SA (or its run-boundary sample) from a BWT by walking the
/// text backwards with the LF mapping.
///
/// The number of sentinel bytes `w` is read off the BWT: rows `0..w-1` hold
/// sentinels, row `w-1` starts the walk at text position `n - w`, and the
/// walk ends at the row of text position 0, whose BWT byte is a sentinel.
pub fn invert_bwt_to_sa(bwt: &BwtString, mode: InvertMode) -> Result<Inverted> {
    let n = bwt.len();
    let w = bwt.counts[SENTINEL as usize] as usize;
    if w == 0 {
        return Err(Error::Structural("BWT contains no sentinel".into()));
    }
    if n <= w {
        return Err(Error::Structural("BWT holds only sentinels".into()));
    }
    if bwt.data[..w - 1].iter().any(|&b| b != SENTINEL) || bwt.data[w - 1] == SENTINEL {
        return Err(Error::Structural(
            "sentinel rows do not match a sentinel-terminated text".into(),
        ));
    }

    let mut visited = vec![false; n];

    let mut sa = match mode {
        InvertMode::Full => vec![0usize; n],
        InvertMode::Sample => Vec::new(),
    };
    let mut pairs: Vec<(u64, u64, bool, bool)> = Vec::new();
    let data = &bwt.data;
    let mut record = |row: usize, value: usize| match mode {
        InvertMode::Full => sa[row] = value,
        InvertMode::Sample => {
            let start = is_run_start(data, row);
            let end = is_run_end(data, row);
            if start || end {
                pairs.push((row as u64, value as u64, start, end));
            }
        }
    };

    for t in 0..w - 1 {
        visited[t] = true;
        record(t, n - 1 - t);
    }
    let mut row = w - 1;
    let mut value = n - w;
    visited[row] = true;
    record(row, value);
    while value > 0 {
        if data[row] == SENTINEL {
            return Err(Error::Structural(format!(
                "LF walk reached a sentinel at row {row} before text position 0"
            )));
        }
        row = lf_step(bwt, row);
        value -= 1;
        if row >= n || visited[row] {
            return Err(Error::Structural(format!(
                "LF walk revisits row {row}; input is not a BWT"
            )));
        }
        visited[row] = true;
        record(row, value);
    }
    if data[row] != SENTINEL {
        return Err(Error::Structural(
            "text position 0 is not preceded by a sentinel".into(),
        ));
    }

    Ok(match mode {
        InvertMode::Full => Inverted::Full(SuffixArray(sa)),
        InvertMode::Sample => {
            // Entries arrive in text order; sort them back into BWT order.
            pairs.sort_unstable_by_key(|p| p.0);
            let mut out = RunBoundarySample::default();
            for (pos, v, start, end) in pairs {
                if start {
                    out.ssa.push((pos, v));
                }
                if end {
                    out.esa.push((pos, v));
                }
            }
            Inverted::Sample(out)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABRA: &[u8] = b"abracadabra\0";
    const ABRA_SA: [usize; 12] = [11, 10, 7, 0, 3, 5, 8, 1, 4, 6, 9, 2];

    #[test]
    fn naive_examples() {
        assert_eq!(sa_naive(ABRA).entries(), &ABRA_SA);
        assert_eq!(sa_naive(b"a\0").entries(), &[1, 0]);
        assert_eq!(sa_naive(b"aaa\0").entries(), &[3, 2, 1, 0]);
    }

    #[test]
    fn fast_examples() {
        assert_eq!(sa_fast(ABRA).entries(), &ABRA_SA);
        assert_eq!(sa_fast(b"x\0").entries(), &[1, 0]);
    }

    #[test]
    fn bwt_examples() {
        let sa = sa_naive(ABRA);
        assert_eq!(bwt_from_sa(ABRA, &sa), b"ard\0rcaaaabb");
        assert_eq!(bwt_from_sa(b"a\0", &sa_naive(b"a\0")), b"a\0");
        let t = b"bbbbb\0";
        assert_eq!(bwt_from_sa(t, &sa_naive(t)), b"bbbbb\0");
    }

    #[test]
    fn counts_and_c_array() {
        let bwt = BwtString::from_bytes(b"ard\0rcaaaabb".to_vec());
        assert_eq!(bwt.char_counts()[b'a' as usize], 5);
        assert_eq!(bwt.c_array()[b'a' as usize], 1);
        assert_eq!(bwt.c_array()[b'b' as usize], 6);
        assert_eq!(bwt.c_array()[b'r' as usize], 10);
        let mut acc = 0;
        for c in 0..256 {
            assert_eq!(bwt.c_array()[c], acc);
            acc += bwt.char_counts()[c];
        }
    }

    #[test]
    fn lf_examples() {
        let bwt = BwtString::from_bytes(b"ard\0rcaaaabb".to_vec());
        assert_eq!(lf_step(&bwt, 3), 0);
        assert_eq!(lf_step(&bwt, 0), 1);
        let start = 3;
        let mut pos = start;
        for step in 1..=bwt.len() {
            pos = lf_step(&bwt, pos);
            if step < bwt.len() {
                assert_ne!(pos, start);
            }
        }
        assert_eq!(pos, start);
    }

    #[test]
    fn invert_examples() {
        let bwt = BwtString::from_bytes(b"ard\0rcaaaabb".to_vec());
        match invert_bwt_to_sa(&bwt, InvertMode::Full).unwrap() {
            Inverted::Full(sa) => assert_eq!(sa.entries(), &ABRA_SA),
            other => panic!("{other:?}"),
        }
        let tiny = BwtString::from_bytes(b"a\0".to_vec());
        assert_eq!(
            invert_bwt_to_sa(&tiny, InvertMode::Full).unwrap(),
            Inverted::Full(SuffixArray::new(vec![1, 0]))
        );
        match invert_bwt_to_sa(&bwt, InvertMode::Sample).unwrap() {
            Inverted::Sample(s) => {
                let starts: Vec<u64> = s.ssa.iter().map(|p| p.0).collect();
                let ends: Vec<u64> = s.esa.iter().map(|p| p.0).collect();
                assert_eq!(starts, [0, 1, 2, 3, 4, 5, 6, 10]);
                assert_eq!(ends, [0, 1, 2, 3, 4, 5, 9, 11]);
                for &(p, v) in s.ssa.iter().chain(&s.esa) {
                    assert_eq!(v as usize, ABRA_SA[p as usize]);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invert_multi_sentinel() {
        let text = b"banana\0\0\0";
        let sa = sa_naive(text);
        let bwt = bwt_string_from_sa(text, &sa);
        assert_eq!(
            invert_bwt_to_sa(&bwt, InvertMode::Full).unwrap(),
            Inverted::Full(sa)
        );
    }

    #[test]
    fn invert_rejects_garbage() {
        for bad in [&b"abc"[..], b"\0\0\0", b"a\0b\0", b"ab\0\0"] {
            let bwt = BwtString::from_bytes(bad.to_vec());
            assert!(
                matches!(
                    invert_bwt_to_sa(&bwt, InvertMode::Full),
                    Err(Error::Structural(_))
                ),
                "{bad:?}"
            );
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn terminated(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
            (2u8..6, 1usize..4).prop_flat_map(move |(sigma, w)| {
                proptest::collection::vec(2u8..2 + sigma, 1..max_len).prop_map(move |mut v| {
                    v.extend(std::iter::repeat_n(0, w));
                    v
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(400))]

            #[test]
            fn fast_equals_naive(text in proptest::collection::vec(0u8..4, 0..600)) {
                prop_assert_eq!(sa_fast(&text), sa_naive(&text));
            }

            #[test]
            fn fast_equals_naive_wide(text in proptest::collection::vec(0u32..40, 0..400)) {
                prop_assert_eq!(sa_fast(&text), sa_naive(&text));
            }

            #[test]
            fn inversion_is_identity(text in terminated(400)) {
                let sa = sa_fast(&text);
                let bwt = bwt_string_from_sa(&text, &sa);
                prop_assert_eq!(invert_bwt_to_sa(&bwt, InvertMode::Full).unwrap(), Inverted::Full(sa.clone()));
                let expect = RunBoundarySample::from_bwt_and_sa(bwt.data(), sa.entries());
                prop_assert_eq!(invert_bwt_to_sa(&bwt, InvertMode::Sample).unwrap(), Inverted::Sample(expect));
            }

            #[test]
            fn rank_matches_scan(text in terminated(300), c in 0u8..8) {
                let bwt = BwtString::from_bytes(bwt_from_sa(&text, &sa_naive(&text)));
                for i in 0..=bwt.len() {
                    let naive = bwt.data()[..i].iter().filter(|&&b| b == c).count();
                    prop_assert_eq!(bwt.rank(c, i), naive);
                }
            }
        }
    }
}
