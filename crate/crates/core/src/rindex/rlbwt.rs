//! Run-length encoded BWT with rank support.

use std::io::Read;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct ByteRuns {
    /// Indices of the runs headed by this byte, increasing.
    runs: Vec<u32>,
    /// `cum[j]`: occurrences of the byte in runs `runs[..j]`.
    cum: Vec<u64>,
}

/// The BWT as maximal runs of equal bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunLengthBwt {
    heads: Vec<u8>,
    /// `starts[k]` is the first position of run `k`; `starts[r] = n`.
    starts: Vec<u64>,
    c_array: [u64; 256],
    by_byte: Vec<ByteRuns>,
}

impl RunLengthBwt {
    pub fn from_bytes(bwt: &[u8]) -> Result<Self> {
        let mut b = RunLengthBuilder::default();
        b.push(bwt);
        b.finish()
    }

    /// Reads the BWT from a byte stream in fixed-size chunks.
    pub fn from_reader<R: Read>(mut reader: R) -> Result<Self> {
        let mut b = RunLengthBuilder::default();
        let mut buf = vec![0u8; 1 << 16];
        loop {
            let got = reader.read(&mut buf)?;
            if got == 0 {
                break;
            }
            b.push(&buf[..got]);
        }
        b.finish()
    }

    /// Assembles from run heads and lengths; adjacent heads must differ and
    /// lengths must be positive.
    pub fn from_runs(heads: Vec<u8>, lengths: &[u64]) -> Result<Self> {
        if heads.len() != lengths.len() {
            return Err(Error::Structural(format!(
                "{} run heads but {} run lengths",
                heads.len(),
                lengths.len()
            )));
        }
        if heads.is_empty() {
            return Err(Error::EmptyInput);
        }
        if heads.len() > u32::MAX as usize {
            return Err(Error::Config("more than 2^32 - 1 runs".into()));
        }
        let mut starts = Vec::with_capacity(heads.len() + 1);
        let mut pos = 0u64;
        for (k, &len) in lengths.iter().enumerate() {
            if len == 0 {
                return Err(Error::Structural(format!("run {k} is empty")));
            }
            if k > 0 && heads[k] == heads[k - 1] {
                return Err(Error::Structural(format!(
                    "runs {} and {k} share the head byte {:#04x}",
                    k - 1,
                    heads[k]
                )));
            }
            starts.push(pos);
            pos = pos
                .checked_add(len)
                .ok_or_else(|| Error::Structural("BWT length overflows u64".into()))?;
        }
        starts.push(pos);

        let mut by_byte = vec![ByteRuns::default(); 256];
        let mut totals = [0u64; 256];
        for (k, &h) in heads.iter().enumerate() {
            let entry = &mut by_byte[h as usize];
            entry.runs.push(k as u32);
            entry.cum.push(totals[h as usize]);
            totals[h as usize] += lengths[k];
        }
        for (entry, &total) in by_byte.iter_mut().zip(&totals) {
            entry.cum.push(total);
            entry.runs.shrink_to_fit();
            entry.cum.shrink_to_fit();
        }
        let mut c_array = [0u64; 256];
        let mut acc = 0;
        for c in 0..256 {
            c_array[c] = acc;
            acc += totals[c];
        }
        Ok(RunLengthBwt {
            heads,
            starts,
            c_array,
            by_byte,
        })
    }

    pub fn len(&self) -> u64 {
        *self.starts.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn runs(&self) -> usize {
        self.heads.len()
    }

    pub fn heads(&self) -> &[u8] {
        &self.heads
    }

    pub fn run_lengths(&self) -> impl ExactSizeIterator<Item = u64> + '_ {
        self.starts.windows(2).map(|w| w[1] - w[0])
    }

    pub fn run_start(&self, k: usize) -> u64 {
        self.starts[k]
    }

    pub fn run_end(&self, k: usize) -> u64 {
        self.starts[k + 1] - 1
    }

    pub fn head(&self, k: usize) -> u8 {
        self.heads[k]
    }

    /// Number of bytes smaller than `c`.
    pub fn c(&self, c: u8) -> u64 {
        self.c_array[c as usize]
    }

    pub fn c_array(&self) -> &[u64; 256] {
        &self.c_array
    }

    /// Index of the run containing position `i < n`.
    pub fn run_of(&self, i: u64) -> usize {
        debug_assert!(i < self.len());
        self.starts.partition_point(|&s| s <= i) - 1
    }

    pub fn access(&self, i: u64) -> u8 {
        self.heads[self.run_of(i)]
    }

    /// Occurrences of `c` in `BWT[..i]`, for `i <= n`.
    pub fn rank(&self, c: u8, i: u64) -> u64 {
        let entry = &self.by_byte[c as usize];
        if i == 0 || entry.runs.is_empty() {
            return 0;
        }
        let k = self.run_of(i - 1) as u32;
        // c-runs strictly before run k contribute fully.
        let j = entry.runs.partition_point(|&run| run < k);
        let mut count = entry.cum[j];
        if entry.runs.get(j) == Some(&k) {
            count += i - self.starts[k as usize];
        }
        count
    }

    /// First run at index `>= k` headed by `c`.
    pub fn next_run_of(&self, c: u8, k: usize) -> Option<usize> {
        let runs = &self.by_byte[c as usize].runs;
        runs.get(runs.partition_point(|&run| (run as usize) < k))
            .map(|&run| run as usize)
    }

    /// Last run at index `<= k` headed by `c`.
    pub fn prev_run_of(&self, c: u8, k: usize) -> Option<usize> {
        let runs = &self.by_byte[c as usize].runs;
        runs.partition_point(|&run| run as usize <= k)
            .checked_sub(1)
            .map(|j| runs[j] as usize)
    }

    /// Expands back to the plain BWT.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for (k, len) in self.run_lengths().enumerate() {
            out.extend(std::iter::repeat_n(self.heads[k], len as usize));
        }
        out
    }
}

/// Incremental run collector.
#[derive(Debug, Default)]
pub struct RunLengthBuilder {
    heads: Vec<u8>,
    lengths: Vec<u64>,
}

impl RunLengthBuilder {
    pub fn push(&mut self, bytes: &[u8]) {
        for &b in bytes {
            match self.heads.last() {
                Some(&h) if h == b => *self.lengths.last_mut().unwrap() += 1,
                _ => {
                    self.heads.push(b);
                    self.lengths.push(1);
                }
            }
        }
    }

    pub fn finish(self) -> Result<RunLengthBwt> {
        RunLengthBwt::from_runs(self.heads, &self.lengths)
    }
}
