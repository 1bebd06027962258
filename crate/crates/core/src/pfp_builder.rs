//! BWT, suffix array and run-boundary SA sample of a text, computed from
//! its prefix-free parse without building the text's suffix array.
//!
//! Every suffix of the text that starts at a content byte has exactly one
//! prefix `alpha` that is a suffix of a dictionary phrase with
//! `|alpha| > w`. Scanning the dictionary suffix array yields these
//! representatives in lexicographic order; each one owns a contiguous SA
//! range whose size is the total occurrence count of the phrases ending
//! with it. Inside a range, suffixes are ordered like the positions of their
//! phrases in the BWT of the parse, which the inverted lists record.
//!
//! The `w` suffixes made only of sentinels precede everything else and are
//! emitted directly.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::pfparse::{with_extension, Dictionary, Parse};
use crate::suffix_kernel::RunBoundarySample;
use crate::text_ingest::SENTINEL;

/// Per-phrase inverted lists (`IL`), preceding bytes (`PR`) and occurrence
/// end positions (`EP`), stored back to back: the lists of phrase `i`
/// occupy `offsets[i]..offsets[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfpTables {
    offsets: Vec<usize>,
    il: Vec<u32>,
    pr: Vec<u8>,
    ep: Vec<u64>,
    n: u64,
    last_content_byte: u8,
}

impl PfpTables {
    /// Rows of the parse BWT holding phrase `i`, increasing.
    pub fn il(&self, i: usize) -> &[u32] {
        &self.il[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Text byte preceding each occurrence listed in [`PfpTables::il`].
    pub fn pr(&self, i: usize) -> &[u8] {
        &self.pr[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Text position of the last byte of each listed occurrence.
    pub fn ep(&self, i: usize) -> &[u64] {
        &self.ep[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Length of the parsed text, sentinels included.
    pub fn text_len(&self) -> u64 {
        self.n
    }

    pub fn phrase_count(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// Builds IL, PR and EP from the parse and its BWT (the parse is terminated
/// by the marker rank 0 before suffix sorting).
pub fn compute_tables(dict: &Dictionary, parse: &Parse) -> Result<PfpTables> {
    let w = dict.w();
    let ranks = parse.ranks();
    let m = ranks.len();
    if m == 0 {
        return Err(Error::Structural("empty parse".into()));
    }
    if parse.occ().len() != dict.len() {
        return Err(Error::Structural(format!(
            "parse counts {} phrases, dictionary holds {}",
            parse.occ().len(),
            dict.len()
        )));
    }

    let last = dict.phrase(ranks[m - 1] as usize - 1);
    let tail = &last[last.len() - w..];
    if tail.iter().any(|&b| b != SENTINEL) || last[last.len() - w - 1] == SENTINEL {
        return Err(Error::Structural(
            "final phrase does not end with exactly w sentinels".into(),
        ));
    }
    let last_content_byte = last[last.len() - w - 1];

    let mut ends = Vec::with_capacity(m);
    let mut start = 0u64;
    for &r in ranks {
        let len = dict.phrase_len(r as usize - 1) as u64;
        ends.push(start + len - 1);
        start += len - w as u64;
    }
    let n = ends[m - 1] + 1;

    let mut offsets = Vec::with_capacity(dict.len() + 1);
    offsets.push(0usize);
    for &c in parse.occ() {
        offsets.push(offsets.last().unwrap() + c as usize);
    }
    let mut cursor = offsets[..dict.len()].to_vec();
    let mut il = vec![0u32; m];
    let mut pr = vec![0u8; m];
    let mut ep = vec![0u64; m];

    let sa_p = parse.suffix_array();
    for (row, &suffix) in sa_p.entries().iter().enumerate() {
        if suffix == 0 {
            // BWT_P holds the end marker here.
            continue;
        }
        let q = suffix - 1;
        let i = ranks[q] as usize - 1;
        let slot = cursor[i];
        if slot >= offsets[i + 1] {
            return Err(Error::Structural(format!(
                "phrase {} occurs more often in BWT_P than its count",
                i + 1
            )));
        }
        cursor[i] += 1;
        il[slot] = row as u32;
        ep[slot] = ends[q];
        pr[slot] = if q == 0 {
            // Cyclically the text's last byte, a sentinel, precedes position 0.
            SENTINEL
        } else {
            let prev = dict.phrase(ranks[q - 1] as usize - 1);
            prev[prev.len() - w - 1]
        };
    }
    if let Some(i) = (0..dict.len()).find(|&i| cursor[i] != offsets[i + 1]) {
        return Err(Error::Structural(format!(
            "phrase {} occurs less often in BWT_P than its count",
            i + 1
        )));
    }

    Ok(PfpTables {
        offsets,
        il,
        pr,
        ep,
        n,
        last_content_byte,
    })
}

/// A representative prefix and the phrases ending with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentativeGroup<'a> {
    pub alpha: &'a [u8],
    /// 0-based phrase indices.
    pub phrases: Vec<usize>,
}

/// Representatives in increasing lexicographic order.
pub struct Representatives<'a> {
    dict: &'a Dictionary,
    next: usize,
}

impl<'a> Representatives<'a> {
    // The phrase suffix starting at dictionary offset `pos`, if longer than w.
    fn beta(&self, pos: usize) -> Option<(&'a [u8], usize)> {
        let dict = self.dict;
        let phrase = dict.phrase_at(pos)?;
        let end = dict.phrase_starts()[phrase] + dict.phrase_len(phrase);
        (end - pos > dict.w()).then(|| (&dict.text()[pos..end], phrase))
    }
}

impl<'a> Iterator for Representatives<'a> {
    type Item = RepresentativeGroup<'a>;

    fn next(&mut self) -> Option<Self::Item> {
        let sa = self.dict.sa();
        let (alpha, first) = loop {
            let pos = *sa.get(self.next)?;
            self.next += 1;
            if let Some(found) = self.beta(pos) {
                break found;
            }
        };
        let mut phrases = vec![first];
        // Equal suffixes are all followed by a separator, so they are
        // adjacent in the dictionary suffix array.
        while let Some(&pos) = sa.get(self.next) {
            match self.beta(pos) {
                Some((beta, phrase)) if beta == alpha => {
                    phrases.push(phrase);
                    self.next += 1;
                }
                _ => break,
            }
        }
        Some(RepresentativeGroup { alpha, phrases })
    }
}

pub fn enumerate_representatives(dict: &Dictionary) -> Representatives<'_> {
    Representatives { dict, next: 0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BuildMode {
    Bwt,
    Sa,
    #[default]
    Sample,
}

/// Receives `(BWT byte, SA value)` in BWT order.
pub trait BuildSink {
    fn push(&mut self, byte: u8, sa: u64) -> Result<()>;

    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

/// Turns the `(byte, SA)` stream into start-run and end-run pairs: a pair is
/// emitted to each side whenever `BWT[j-1] != BWT[j]`, plus the first
/// start and the last end.
#[derive(Debug, Default)]
pub struct RunBoundaryTracker {
    pos: u64,
    prev: Option<(u8, u64)>,
}

pub type Pair = (u64, u64);

impl RunBoundaryTracker {
    /// Returns `(end pair of the previous run, start pair of a new run)`.
    #[inline]
    pub fn push(&mut self, byte: u8, sa: u64) -> (Option<Pair>, Option<Pair>) {
        let j = self.pos;
        let out = match self.prev {
            None => (None, Some((j, sa))),
            Some((b, prev_sa)) if b != byte => (Some((j - 1, prev_sa)), Some((j, sa))),
            Some(_) => (None, None),
        };
        self.prev = Some((byte, sa));
        self.pos += 1;
        out
    }

    /// End pair of the final run.
    pub fn finish(&self) -> Option<Pair> {
        self.prev.map(|(_, sa)| (self.pos - 1, sa))
    }
}

/// Everything a build produced, held in memory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildOutput {
    pub mode: BuildMode,
    pub bwt: Vec<u8>,
    /// Filled in [`BuildMode::Sa`].
    pub sa: Vec<u64>,
    /// Filled in [`BuildMode::Sample`].
    pub sample: RunBoundarySample,
}

impl BuildOutput {
    pub fn runs(&self) -> usize {
        crate::suffix_kernel::count_runs(&self.bwt)
    }
}

#[derive(Debug, Default)]
pub struct MemorySink {
    out: BuildOutput,
    tracker: RunBoundaryTracker,
}

impl MemorySink {
    pub fn new(mode: BuildMode) -> Self {
        MemorySink {
            out: BuildOutput {
                mode,
                ..Default::default()
            },
            tracker: RunBoundaryTracker::default(),
        }
    }

    pub fn into_output(self) -> BuildOutput {
        self.out
    }
}

impl BuildSink for MemorySink {
    fn push(&mut self, byte: u8, sa: u64) -> Result<()> {
        self.out.bwt.push(byte);
        match self.out.mode {
            BuildMode::Bwt => {}
            BuildMode::Sa => self.out.sa.push(sa),
            BuildMode::Sample => {
                let (end, start) = self.tracker.push(byte, sa);
                self.out.sample.esa.extend(end);
                self.out.sample.ssa.extend(start);
            }
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if self.out.mode == BuildMode::Sample {
            self.out.sample.esa.extend(self.tracker.finish());
        }
        Ok(())
    }
}

struct OutFile {
    path: PathBuf,
    writer: BufWriter<File>,
}

impl OutFile {
    fn create(path: PathBuf) -> Result<Self> {
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(OutFile {
            writer: BufWriter::with_capacity(1 << 16, file),
            path,
        })
    }

    #[inline]
    fn write(&mut self, bytes: &[u8]) -> Result<()> {
        self.writer
            .write_all(bytes)
            .map_err(|e| Error::io(&self.path, e))
    }

    fn write_pair(&mut self, (pos, sa): Pair) -> Result<()> {
        self.write(&pos.to_le_bytes())?;
        self.write(&sa.to_le_bytes())
    }

    fn flush(&mut self) -> Result<()> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Streams the build to `<base>.bwt` plus `<base>.sa` (u64 LE) or
/// `<base>.ssa` / `<base>.esa` (u64 LE position, u64 LE SA value) by mode.
pub struct FileSink {
    mode: BuildMode,
    bwt: OutFile,
    sa: Option<OutFile>,
    ssa: Option<OutFile>,
    esa: Option<OutFile>,
    tracker: RunBoundaryTracker,
}

impl FileSink {
    pub fn create(base: &Path, mode: BuildMode) -> Result<Self> {
        let bwt = OutFile::create(with_extension(base, "bwt"))?;
        let (sa, ssa, esa) = match mode {
            BuildMode::Bwt => (None, None, None),
            BuildMode::Sa => (
                Some(OutFile::create(with_extension(base, "sa"))?),
                None,
                None,
            ),
            BuildMode::Sample => (
                None,
                Some(OutFile::create(with_extension(base, "ssa"))?),
                Some(OutFile::create(with_extension(base, "esa"))?),
            ),
        };
        Ok(FileSink {
            mode,
            bwt,
            sa,
            ssa,
            esa,
            tracker: RunBoundaryTracker::default(),
        })
    }

    /// Paths this sink writes to.
    pub fn paths(&self) -> Vec<PathBuf> {
        [
            Some(&self.bwt),
            self.sa.as_ref(),
            self.ssa.as_ref(),
            self.esa.as_ref(),
        ]
        .into_iter()
        .flatten()
        .map(|f| f.path.clone())
        .collect()
    }
}

impl BuildSink for FileSink {
    #[inline]
    fn push(&mut self, byte: u8, sa: u64) -> Result<()> {
        self.bwt.write(&[byte])?;
        match self.mode {
            BuildMode::Bwt => {}
            BuildMode::Sa => self.sa.as_mut().unwrap().write(&sa.to_le_bytes())?,
            BuildMode::Sample => {
                let (end, start) = self.tracker.push(byte, sa);
                if let Some(p) = end {
                    self.esa.as_mut().unwrap().write_pair(p)?;
                }
                if let Some(p) = start {
                    self.ssa.as_mut().unwrap().write_pair(p)?;
                }
            }
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if self.mode == BuildMode::Sample {
            if let Some(p) = self.tracker.finish() {
                self.esa.as_mut().unwrap().write_pair(p)?;
            }
        }
        for f in [
            Some(&mut self.bwt),
            self.sa.as_mut(),
            self.ssa.as_mut(),
            self.esa.as_mut(),
        ]
        .into_iter()
        .flatten()
        {
            f.flush()?;
        }
        Ok(())
    }
}

/// Emits the whole BWT (with SA values) of the parsed text into `sink`.
/// Returns the number of entries, which equals the text length.
pub fn build_into<S: BuildSink>(
    dict: &Dictionary,
    parse: &Parse,
    tables: &PfpTables,
    sink: &mut S,
) -> Result<u64> {
    let w = dict.w() as u64;
    let n = tables.n;
    if parse.text_len(dict) != n {
        return Err(Error::Structural(
            "tables were computed for another parse".into(),
        ));
    }

    // Sentinel-only suffixes, shortest first: SA = n-1, n-2, ..., n-w.
    for t in 0..w {
        let byte = if t + 1 < w {
            SENTINEL
        } else {
            tables.last_content_byte
        };
        sink.push(byte, n - 1 - t)?;
    }
    let mut emitted = w;

    let mut heap = BinaryHeap::new();
    for group in enumerate_representatives(dict) {
        let alpha_len = group.alpha.len();
        let emit = |sink: &mut S, phrase: usize, j: usize| -> Result<()> {
            let len = dict.phrase_len(phrase);
            let byte = if alpha_len < len {
                dict.phrase(phrase)[len - alpha_len - 1]
            } else {
                tables.pr(phrase)[j]
            };
            sink.push(byte, tables.ep(phrase)[j] + 1 - alpha_len as u64)
        };
        match group.phrases.as_slice() {
            [] => return Err(Error::Structural("empty representative group".into())),
            &[phrase] => {
                for j in 0..tables.il(phrase).len() {
                    emit(sink, phrase, j)?;
                }
                emitted += tables.il(phrase).len() as u64;
            }
            members => {
                // k-way merge of the inverted lists by BWT_P row.
                heap.clear();
                for (k, &phrase) in members.iter().enumerate() {
                    heap.push(Reverse((tables.il(phrase)[0], k, 0usize)));
                }
                while let Some(Reverse((_, k, j))) = heap.pop() {
                    let phrase = members[k];
                    emit(sink, phrase, j)?;
                    emitted += 1;
                    if let Some(&row) = tables.il(phrase).get(j + 1) {
                        heap.push(Reverse((row, k, j + 1)));
                    }
                }
            }
        }
    }
    if emitted != n {
        return Err(Error::Structural(format!(
            "emitted {emitted} BWT entries for a text of length {n}"
        )));
    }
    sink.finish()?;
    Ok(n)
}

/// In-memory build.
pub fn build(
    dict: &Dictionary,
    parse: &Parse,
    tables: &PfpTables,
    mode: BuildMode,
) -> Result<BuildOutput> {
    let mut sink = MemorySink::new(mode);
    build_into(dict, parse, tables, &mut sink)?;
    Ok(sink.into_output())
}

/// Convenience: tables plus in-memory build.
pub fn build_from_parse(dict: &Dictionary, parse: &Parse, mode: BuildMode) -> Result<BuildOutput> {
    let tables = compute_tables(dict, parse)?;
    build(dict, parse, &tables, mode)
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    File::open(path)
        .map(BufReader::new)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    Ok(bytes)
}

/// Reads a file of u64 LE values (`.sa`).
pub fn read_u64_file(path: &Path) -> Result<Vec<u64>> {
    let bytes = read_all(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Truncated(path.display().to_string()));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn write_u64_file(path: &Path, values: impl IntoIterator<Item = u64>) -> Result<()> {
    let mut out = OutFile::create(path.to_path_buf())?;
    for v in values {
        out.write(&v.to_le_bytes())?;
    }
    out.flush()
}

/// Reads a `.ssa` / `.esa` pair file.
pub fn read_pair_file(path: &Path) -> Result<Vec<Pair>> {
    let values = read_u64_file(path)?;
    if values.len() % 2 != 0 {
        return Err(Error::Truncated(path.display().to_string()));
    }
    Ok(values.chunks_exact(2).map(|c| (c[0], c[1])).collect())
}

pub fn write_pair_file(path: &Path, pairs: &[Pair]) -> Result<()> {
    let mut out = OutFile::create(path.to_path_buf())?;
    for &p in pairs {
        out.write_pair(p)?;
    }
    out.flush()
}
