//! Brute-force references shared by the integration tests. Nothing here
//! calls into the library's suffix sorting or hashing.

#![allow(dead_code)]

use rand::Rng;

/// Suffix array by sorting suffix slices.
pub fn brute_sa(text: &[u8]) -> Vec<u64> {
    let mut sa: Vec<usize> = (0..text.len()).collect();
    sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
    sa.into_iter().map(|v| v as u64).collect()
}

/// `BWT[j] = text[(SA[j] - 1) mod n]`.
pub fn brute_bwt(text: &[u8], sa: &[u64]) -> Vec<u8> {
    let n = text.len();
    sa.iter().map(|&v| text[(v as usize + n - 1) % n]).collect()
}

pub type Pairs = Vec<(u64, u64)>;

/// Run-start and run-end `(position, SA)` pairs.
pub fn brute_boundaries(bwt: &[u8], sa: &[u64]) -> (Pairs, Pairs) {
    let n = bwt.len();
    let starts = (0..n)
        .filter(|&j| j == 0 || bwt[j] != bwt[j - 1])
        .map(|j| (j as u64, sa[j]))
        .collect();
    let ends = (0..n)
        .filter(|&j| j == n - 1 || bwt[j] != bwt[j + 1])
        .map(|j| (j as u64, sa[j]))
        .collect();
    (starts, ends)
}

pub fn brute_occurrences(text: &[u8], pattern: &[u8]) -> Vec<u64> {
    if pattern.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - pattern.len())
        .filter(|&i| &text[i..i + pattern.len()] == pattern)
        .map(|i| i as u64)
        .collect()
}

/// `w` trailing zero bytes after the content.
pub fn terminated(content: &[u8], w: usize) -> Vec<u8> {
    let mut t = content.to_vec();
    t.extend(std::iter::repeat_n(0, w));
    t
}

/// Window hash `sum W[i] * base^(w-1-i) mod modulus` in 128-bit arithmetic.
pub fn horner_hash(window: &[u8], base: u64, modulus: u64) -> u64 {
    let (b, m) = (base as u128, modulus as u128);
    window.iter().fold(0u128, |h, &c| (h * b + c as u128) % m) as u64
}

/// Random content over the first `sigma` letters of `ACGTN` (or other
/// letters beyond 5).
pub fn random_content<R: Rng>(rng: &mut R, len: usize, sigma: u8) -> Vec<u8> {
    const DNA: &[u8] = b"ACGTN";
    (0..len)
        .map(|_| {
            let k = rng.gen_range(0..sigma);
            if (k as usize) < DNA.len() {
                DNA[k as usize]
            } else {
                b'a' + k
            }
        })
        .collect()
}

/// A seed followed by `copies - 1` copies carrying point substitutions at
/// rate `rate`.
pub fn mutated_copies<R: Rng>(rng: &mut R, seed: &[u8], copies: usize, rate: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(seed.len() * copies);
    out.extend_from_slice(seed);
    for _ in 1..copies {
        let start = out.len();
        out.extend_from_slice(seed);
        let subs = (seed.len() as f64 * rate).round() as usize;
        for _ in 0..subs {
            let i = start + rng.gen_range(0..seed.len());
            let old = out[i];
            let choices: Vec<u8> = b"ACGT".iter().copied().filter(|&c| c != old).collect();
            out[i] = choices[rng.gen_range(0..choices.len())];
        }
    }
    out
}
