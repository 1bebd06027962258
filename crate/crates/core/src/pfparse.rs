//! Prefix-free parsing.
//!
//! A window of `w` bytes slides over the text. A window starting at `s`
//! is a trigger when `s == 0`, when `s == n - w` (the all-sentinel tail), or
//! when its Karp-Rabin hash is `0 mod p`. Consecutive triggers `s_i < s_{i+1}`
//! delimit the phrase `text[s_i .. s_{i+1} + w]`, so neighbouring phrases
//! overlap by exactly `w` bytes. The dictionary holds the distinct phrases
//! in lexicographic order; the parse lists the 1-based rank of every phrase
//! occurrence.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::suffix_kernel::{sa_fast, SuffixArray};
use crate::text_ingest::{TextBuffer, SENTINEL, SEPARATOR};

/// `2^61 - 1`.
pub const MERSENNE_61: u64 = (1 << 61) - 1;
/// Default multiplier of the window hash (the 64-bit FNV prime).
pub const DEFAULT_HASH_BASE: u64 = 0x0000_0100_0000_01b3;
pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_MODULUS_P: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriggerConfig {
    /// Window width in bytes.
    pub w: usize,
    /// A window triggers when its hash is `0 mod p`.
    pub p: u64,
    pub hash_base: u64,
    /// Must be a prime above `2^32`.
    pub hash_modulus: u64,
}

impl Default for TriggerConfig {
    fn default() -> Self {
        TriggerConfig::new(DEFAULT_WINDOW, DEFAULT_MODULUS_P)
    }
}

impl TriggerConfig {
    pub fn new(w: usize, p: u64) -> Self {
        TriggerConfig {
            w,
            p,
            hash_base: DEFAULT_HASH_BASE,
            hash_modulus: MERSENNE_61,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.w == 0 {
            return Err(Error::Config("window width must be at least 1".into()));
        }
        if self.p == 0 {
            return Err(Error::Config("trigger modulus p must be at least 1".into()));
        }
        if self.hash_modulus <= 1 << 32 || self.hash_modulus >= 1 << 63 {
            return Err(Error::Config(
                "hash modulus must lie in (2^32, 2^63)".into(),
            ));
        }
        if !is_prime(self.hash_modulus) {
            return Err(Error::Config("hash modulus must be prime".into()));
        }
        if self.hash_base < 2 || self.hash_base >= self.hash_modulus {
            return Err(Error::Config("hash base must lie in [2, modulus)".into()));
        }
        Ok(())
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    let prod = a as u128 * b as u128;
    if m == MERSENNE_61 {
        let folded = (prod as u64 & MERSENNE_61) + (prod >> 61) as u64;
        if folded >= MERSENNE_61 {
            folded - MERSENNE_61
        } else {
            folded
        }
    } else {
        (prod % m as u128) as u64
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// Deterministic Miller-Rabin for 64-bit inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Polynomial hash of a `w`-byte window, updated in O(1) per shift:
/// `h(W) = sum W[i] * base^(w-1-i) mod modulus`.
#[derive(Debug, Clone)]
pub struct RollingHash {
    base: u64,
    modulus: u64,
    // base^(w-1), the weight of the byte leaving the window.
    top_weight: u64,
    window: Vec<u8>,
    head: usize,
    filled: usize,
    hash: u64,
}

impl RollingHash {
    pub fn new(cfg: &TriggerConfig) -> Self {
        RollingHash {
            base: cfg.hash_base,
            modulus: cfg.hash_modulus,
            top_weight: pow_mod(cfg.hash_base, cfg.w as u64 - 1, cfg.hash_modulus),
            window: vec![0; cfg.w],
            head: 0,
            filled: 0,
            hash: 0,
        }
    }

    /// Shifts `byte` in; returns the window hash once `w` bytes were seen.
    #[inline]
    pub fn push(&mut self, byte: u8) -> Option<u64> {
        let w = self.window.len();
        let m = self.modulus;
        if self.filled == w {
            let out = mul_mod(self.window[self.head] as u64, self.top_weight, m);
            self.hash = if self.hash >= out {
                self.hash - out
            } else {
                self.hash + m - out
            };
        } else {
            self.filled += 1;
        }
        self.hash = (mul_mod(self.hash, self.base, m) + byte as u64) % m;
        self.window[self.head] = byte;
        self.head = (self.head + 1) % w;
        (self.filled == w).then_some(self.hash)
    }

    /// Hash of one window computed from scratch.
    pub fn hash_window(window: &[u8], cfg: &TriggerConfig) -> u64 {
        window.iter().fold(0, |h, &b| {
            (mul_mod(h, cfg.hash_base, cfg.hash_modulus) + b as u64) % cfg.hash_modulus
        })
    }
}

fn check_text(text: &TextBuffer, cfg: &TriggerConfig) -> Result<()> {
    cfg.validate()?;
    if text.w_pad() != cfg.w {
        return Err(Error::Config(format!(
            "text carries {} sentinels but window width is {}",
            text.w_pad(),
            cfg.w
        )));
    }
    Ok(())
}

/// Trigger positions `s_1 = 0 < ... < s_k = n - w`.
pub fn find_triggers(text: &TextBuffer, cfg: &TriggerConfig) -> Result<Vec<usize>> {
    check_text(text, cfg)?;
    let data = text.data();
    let last = data.len() - cfg.w;
    let mut hasher = RollingHash::new(cfg);
    let mut triggers = Vec::new();
    for (i, &b) in data.iter().enumerate() {
        if let Some(h) = hasher.push(b) {
            let s = i + 1 - cfg.w;
            if s == 0 || s == last || h % cfg.p == 0 {
                triggers.push(s);
            }
        }
    }
    Ok(triggers)
}

/// [`find_triggers`] over independent chunks of window starts; each chunk
/// warms its own hasher up on its first window. Output is identical to the
/// sequential scan.
pub fn find_triggers_parallel(
    text: &TextBuffer,
    cfg: &TriggerConfig,
    chunk_len: usize,
) -> Result<Vec<usize>> {
    check_text(text, cfg)?;
    let data = text.data();
    let w = cfg.w;
    let last = data.len() - w;
    let chunk_len = chunk_len.max(1);
    let chunks: Vec<(usize, usize)> = (0..=last)
        .step_by(chunk_len)
        .map(|lo| (lo, (lo + chunk_len).min(last + 1)))
        .collect();
    let parts: Vec<Vec<usize>> = chunks
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut hasher = RollingHash::new(cfg);
            let mut out = Vec::new();
            for (off, &b) in data[lo..hi + w - 1].iter().enumerate() {
                if let Some(h) = hasher.push(b) {
                    let s = lo + off + 1 - w;
                    if s == 0 || s == last || h % cfg.p == 0 {
                        out.push(s);
                    }
                }
            }
            out
        })
        .collect();
    Ok(parts.concat())
}

/// The distinct phrases in lexicographic order, stored as
/// `t_1 0x01 t_2 0x01 ... t_d 0x01 0x00`, with the suffix array of that text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    text: Vec<u8>,
    phrase_starts: Vec<usize>,
    sa: Vec<usize>,
    w: usize,
}

impl Dictionary {
    /// Builds the dictionary from phrases already sorted and deduplicated.
    pub fn from_sorted_phrases<P: AsRef<[u8]>>(phrases: &[P], w: usize) -> Result<Self> {
        if phrases.len() >= u32::MAX as usize {
            return Err(Error::RankOverflow(phrases.len()));
        }
        let total: usize = phrases.iter().map(|p| p.as_ref().len() + 1).sum();
        let mut text = Vec::with_capacity(total + 1);
        let mut phrase_starts = Vec::with_capacity(phrases.len());
        for p in phrases {
            phrase_starts.push(text.len());
            text.extend_from_slice(p.as_ref());
            text.push(SEPARATOR);
        }
        text.push(SENTINEL);
        let sa = sa_fast(&text).into_vec();
        Ok(Dictionary {
            text,
            phrase_starts,
            sa,
            w,
        })
    }

    /// Rebuilds a dictionary from its serialized text.
    pub fn from_text(text: Vec<u8>, w: usize) -> Result<Self> {
        if text.last() != Some(&SENTINEL) {
            return Err(Error::Format("dictionary text must end with 0x00".into()));
        }
        let body = &text[..text.len() - 1];
        if !body.is_empty() && body.last() != Some(&SEPARATOR) {
            return Err(Error::Format(
                "dictionary phrases must be 0x01-terminated".into(),
            ));
        }
        let phrases: Vec<&[u8]> = body
            .split(|&b| b == SEPARATOR)
            .take(body.iter().filter(|&&b| b == SEPARATOR).count())
            .collect();
        let dict = Dictionary::from_sorted_phrases(&phrases, w)?;
        dict.validate()?;
        Ok(dict)
    }

    /// Checks ordering and length invariants.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.len() {
            if self.phrase(i).len() <= self.w {
                return Err(Error::Structural(format!(
                    "phrase {} has length {} <= w",
                    i + 1,
                    self.phrase(i).len()
                )));
            }
            if i > 0 && self.phrase(i - 1) >= self.phrase(i) {
                return Err(Error::Structural(format!(
                    "phrases {} and {} are not strictly increasing",
                    i,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    /// Suffix array of [`Dictionary::text`].
    pub fn sa(&self) -> &[usize] {
        &self.sa
    }

    pub fn phrase_starts(&self) -> &[usize] {
        &self.phrase_starts
    }

    /// Number of phrases `d`.
    pub fn len(&self) -> usize {
        self.phrase_starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrase_starts.is_empty()
    }

    pub fn w(&self) -> usize {
        self.w
    }

    /// Phrase with 0-based index `i` (rank `i + 1`).
    pub fn phrase(&self, i: usize) -> &[u8] {
        let start = self.phrase_starts[i];
        &self.text[start..start + self.phrase_len(i)]
    }

    pub fn phrase_len(&self, i: usize) -> usize {
        let end = match self.phrase_starts.get(i + 1) {
            Some(&next) => next,
            None => self.text.len() - 1,
        };
        end - self.phrase_starts[i] - 1
    }

    /// Index of the phrase covering text offset `pos`, or `None` when `pos`
    /// is a separator or the final terminator.
    pub fn phrase_at(&self, pos: usize) -> Option<usize> {
        let i = self
            .phrase_starts
            .partition_point(|&s| s <= pos)
            .checked_sub(1)?;
        (pos < self.phrase_starts[i] + self.phrase_len(i)).then_some(i)
    }
}

/// Phrase ranks in text order plus per-phrase occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parse {
    ranks: Vec<u32>,
    occ: Vec<u32>,
}

impl Parse {
    /// `ranks` are 1-based; `occ[i]` counts rank `i + 1`.
    pub fn new(ranks: Vec<u32>, d: usize) -> Result<Self> {
        if ranks.len() >= u32::MAX as usize {
            return Err(Error::Config("parse too long for 32-bit positions".into()));
        }
        let mut occ = vec![0u32; d];
        for &r in &ranks {
            if r == 0 || r as usize > d {
                return Err(Error::Structural(format!("rank {r} outside 1..={d}")));
            }
            occ[r as usize - 1] += 1;
        }
        if let Some(i) = occ.iter().position(|&c| c == 0) {
            return Err(Error::Structural(format!(
                "phrase {} never occurs in the parse",
                i + 1
            )));
        }
        Ok(Parse { ranks, occ })
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn occ(&self) -> &[u32] {
        &self.occ
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Suffix array of the ranks followed by the end marker `0`.
    pub fn suffix_array(&self) -> SuffixArray {
        let mut terminated = Vec::with_capacity(self.ranks.len() + 1);
        terminated.extend_from_slice(&self.ranks);
        terminated.push(0u32);
        sa_fast(&terminated)
    }

    /// BWT of the ranks followed by the end marker `0`.
    pub fn bwt_p(&self) -> Vec<u32> {
        self.suffix_array()
            .entries()
            .iter()
            .map(|&q| if q == 0 { 0 } else { self.ranks[q - 1] })
            .collect()
    }

    /// Overlap-concatenates the phrases back into the text.
    pub fn reconstruct(&self, dict: &Dictionary) -> Vec<u8> {
        let w = dict.w();
        let mut out = Vec::new();
        for (q, &r) in self.ranks.iter().enumerate() {
            let phrase = dict.phrase(r as usize - 1);
            out.extend_from_slice(if q == 0 { phrase } else { &phrase[w..] });
        }
        out
    }

    /// Text length `n` implied by the phrase lengths.
    pub fn text_len(&self, dict: &Dictionary) -> u64 {
        let w = dict.w() as u64;
        let body: u64 = self
            .ranks
            .iter()
            .map(|&r| dict.phrase_len(r as usize - 1) as u64 - w)
            .sum();
        body + w
    }
}

/// Parses an in-memory text.
pub fn parse_text(text: &TextBuffer, cfg: &TriggerConfig) -> Result<(Dictionary, Parse)> {
    let triggers = find_triggers(text, cfg)?;
    assemble(text.data(), &triggers, cfg.w, false)
}

/// Parses with chunked trigger discovery and parallel phrase ranking on the
/// current rayon pool. Bit-identical to [`parse_text`].
pub fn parse_text_parallel(
    text: &TextBuffer,
    cfg: &TriggerConfig,
    chunk_len: usize,
) -> Result<(Dictionary, Parse)> {
    let triggers = find_triggers_parallel(text, cfg, chunk_len)?;
    assemble(text.data(), &triggers, cfg.w, true)
}

fn assemble(
    data: &[u8],
    triggers: &[usize],
    w: usize,
    parallel: bool,
) -> Result<(Dictionary, Parse)> {
    let phrases: Vec<&[u8]> = triggers.windows(2).map(|t| &data[t[0]..t[1] + w]).collect();
    let mut unique = phrases.clone();
    if parallel {
        unique.par_sort_unstable();
    } else {
        unique.sort_unstable();
    }
    unique.dedup();
    let rank_of = |p: &&[u8]| unique.binary_search(p).expect("phrase present") as u32 + 1;
    let ranks: Vec<u32> = if parallel {
        phrases.par_iter().map(rank_of).collect()
    } else {
        phrases.iter().map(rank_of).collect()
    };
    let dict = Dictionary::from_sorted_phrases(&unique, w)?;
    let parse = Parse::new(ranks, dict.len())?;
    Ok((dict, parse))
}

/// One-pass parser over streamed content. Only the current phrase, the
/// distinct phrases and the parse are kept in memory; the text is not.
#[derive(Debug)]
pub struct StreamingParser {
    cfg: TriggerConfig,
    hasher: RollingHash,
    pos: u64,
    phrase: Vec<u8>,
    ids: HashMap<Vec<u8>, u32>,
    parse: Vec<u32>,
}

impl StreamingParser {
    pub fn new(cfg: TriggerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(StreamingParser {
            cfg,
            hasher: RollingHash::new(&cfg),
            pos: 0,
            phrase: Vec::new(),
            ids: HashMap::new(),
            parse: Vec::new(),
        })
    }

    /// Feeds content bytes; they must already be validated (`>= 0x02`).
    pub fn push(&mut self, chunk: &[u8]) -> Result<()> {
        for &b in chunk {
            self.push_byte(b, false)?;
        }
        Ok(())
    }

    #[inline]
    fn push_byte(&mut self, b: u8, force: bool) -> Result<()> {
        self.phrase.push(b);
        let hash = self.hasher.push(b);
        self.pos += 1;
        if let Some(h) = hash {
            let start = self.pos - self.cfg.w as u64;
            if start > 0 && (force || h % self.cfg.p == 0) {
                self.close_phrase()?;
            }
        }
        Ok(())
    }

    fn close_phrase(&mut self) -> Result<()> {
        let w = self.cfg.w;
        let tail = self.phrase[self.phrase.len() - w..].to_vec();
        let phrase = std::mem::replace(&mut self.phrase, tail);
        let next = self.ids.len();
        let id = *self.ids.entry(phrase).or_insert(next as u32);
        if self.ids.len() >= u32::MAX as usize {
            return Err(Error::RankOverflow(self.ids.len()));
        }
        self.parse.push(id);
        Ok(())
    }

    /// Content bytes consumed so far.
    pub fn consumed(&self) -> u64 {
        self.pos
    }

    /// Appends the `w` sentinels and returns the sorted dictionary and
    /// the rank parse.
    pub fn finish(mut self) -> Result<(Dictionary, Parse)> {
        if self.pos == 0 {
            return Err(Error::EmptyInput);
        }
        let w = self.cfg.w;
        for _ in 0..w - 1 {
            self.push_byte(SENTINEL, false)?;
        }
        let before = self.parse.len();
        self.push_byte(SENTINEL, true)?;
        debug_assert_eq!(self.parse.len(), before + 1);

        let mut entries: Vec<(Vec<u8>, u32)> = self.ids.into_iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut rank_of_id = vec![0u32; entries.len()];
        for (rank, (_, id)) in entries.iter().enumerate() {
            rank_of_id[*id as usize] = rank as u32 + 1;
        }
        let ranks: Vec<u32> = self
            .parse
            .iter()
            .map(|&id| rank_of_id[id as usize])
            .collect();
        drop(self.parse);
        let phrases: Vec<Vec<u8>> = entries.into_iter().map(|(p, _)| p).collect();
        let dict = Dictionary::from_sorted_phrases(&phrases, w)?;
        drop(phrases);
        let parse = Parse::new(ranks, dict.len())?;
        Ok((dict, parse))
    }
}

fn write_u32s(path: &Path, values: &[u32]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for &v in values {
        out.write_all(&v.to_le_bytes())
            .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn read_u32s(path: &Path) -> Result<Vec<u32>> {
    let mut bytes = Vec::new();
    File::open(path)
        .map(BufReader::new)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(Error::Truncated(path.display().to_string()));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn with_extension(base: &Path, ext: &str) -> std::path::PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    s.into()
}

/// Writes `<base>.dict`, `<base>.parse` (1-based u32 LE ranks) and
/// `<base>.occ` (u32 LE counts).
pub fn write_parse_files(base: &Path, dict: &Dictionary, parse: &Parse) -> Result<()> {
    let dict_path = with_extension(base, "dict");
    std::fs::write(&dict_path, dict.text()).map_err(|e| Error::io(&dict_path, e))?;
    write_u32s(&with_extension(base, "parse"), parse.ranks())?;
    write_u32s(&with_extension(base, "occ"), parse.occ())
}

/// Reads the files written by [`write_parse_files`]; `w` is not stored in
/// them and must be supplied.
pub fn read_parse_files(base: &Path, w: usize) -> Result<(Dictionary, Parse)> {
    let dict_path = with_extension(base, "dict");
    let text = std::fs::read(&dict_path).map_err(|e| Error::io(&dict_path, e))?;
    let dict = Dictionary::from_text(text, w)?;
    let ranks = read_u32s(&with_extension(base, "parse"))?;
    let parse = Parse::new(ranks, dict.len())?;
    let occ = read_u32s(&with_extension(base, "occ"))?;
    if occ != parse.occ() {
        return Err(Error::Structural(
            "occurrence file disagrees with the parse".into(),
        ));
    }
    Ok((dict, parse))
}
