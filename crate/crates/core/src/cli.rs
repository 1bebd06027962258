//! Command-line front end.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pfp_builder::{self, BuildMode, FileSink};
use crate::pfparse::{self, with_extension, StreamingParser, TriggerConfig};
use crate::rindex::{self, RIndex};
use crate::suffix_kernel::{invert_bwt_to_sa, BwtString, InvertMode, Inverted};
use crate::text_ingest::{self, IngestConfig};

#[derive(Debug, Parser)]
#[command(
    name = "pfp-rindex",
    version,
    about = "Prefix-free parsing BWT and r-index toolkit"
)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the prefix-free parse: <BASE>.dict, .parse, .occ.
    Parse(InputArgs),
    /// Build the BWT plus SA or boundary samples, and the .ri index in sample mode.
    Build {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Sample)]
        mode: ModeArg,
    },
    /// Recover SA (or boundary samples) from <BASE>.bwt by LF inversion.
    Invert {
        base: PathBuf,
        /// Output base (default: BASE).
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = InvertModeArg::Sa)]
        mode: InvertModeArg,
    },
    /// Count occurrences of each pattern in <BASE>.ri.
    Count(QueryArgs),
    /// Report occurrence positions of each pattern in <BASE>.ri.
    Locate {
        #[command(flatten)]
        query: QueryArgs,
        /// Report at most this many positions per pattern.
        #[arg(long)]
        max_hits: Option<usize>,
    },
    /// Print n, r, n/r, |D|, |P| and d for a built BASE.
    Stats { base: PathBuf },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    pub input: PathBuf,
    /// Output base path (default: the input path).
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    /// Trigger window length.
    #[arg(short = 'w', default_value_t = pfparse::DEFAULT_WINDOW)]
    pub w: usize,
    /// Trigger modulus: a window triggers when its hash is divisible by p.
    #[arg(short = 'p', default_value_t = pfparse::DEFAULT_MODULUS_P)]
    pub p: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    pub format: FormatArg,
    /// Keep only A, C, G, T, N from FASTA input.
    #[arg(long)]
    pub strip_to_dna: bool,
    /// Append the reverse complement of the FASTA content.
    #[arg(long)]
    pub add_revcomp: bool,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Index base; <BASE>.ri is loaded.
    pub base: PathBuf,
    /// Patterns, one per line or FASTA.
    pub patterns: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bwt,
    Sa,
    Sample,
}

impl From<ModeArg> for BuildMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Bwt => BuildMode::Bwt,
            ModeArg::Sa => BuildMode::Sa,
            ModeArg::Sample => BuildMode::Sample,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InvertModeArg {
    Sa,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// FASTA if the first non-blank byte is '>', raw bytes otherwise.
    Auto,
    Fasta,
    Raw,
}

/// Parses `std::env::args`, runs, and maps errors to a nonzero exit.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match run(cli, &mut out).and_then(|()| out.flush().map_err(Error::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    if let Some(t) = cli.threads {
        // Fails only if a pool already exists, which then stays in use.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match cli.command {
        Command::Parse(input) => {
            let base = output_base(&input);
            with_cleanup(parse_outputs(&base), || {
                let (dict, parse) = stream_parse(&input)?;
                pfparse::write_parse_files(&base, &dict, &parse)
            })
        }
        Command::Build { input, mode } => {
            let base = output_base(&input);
            let mode = BuildMode::from(mode);
            let mut paths = parse_outputs(&base);
            paths.extend(build_outputs(&base, mode));
            with_cleanup(paths, || build(&input, &base, mode))
        }
        Command::Invert { base, output, mode } => {
            let out_base = output.unwrap_or_else(|| base.clone());
            let paths = match mode {
                InvertModeArg::Sa => vec![with_extension(&out_base, "sa")],
                InvertModeArg::Sample => vec![
                    with_extension(&out_base, "ssa"),
                    with_extension(&out_base, "esa"),
                ],
            };
            with_cleanup(paths, || invert(&base, &out_base, mode))
        }
        Command::Count(q) => query(&q, None, false, out),
        Command::Locate { query: q, max_hits } => query(&q, max_hits, true, out),
        Command::Stats { base } => stats(&base, out),
    }
}

fn output_base(input: &InputArgs) -> PathBuf {
    input.output.clone().unwrap_or_else(|| input.input.clone())
}

fn parse_outputs(base: &Path) -> Vec<PathBuf> {
    ["dict", "parse", "occ"]
        .iter()
        .map(|e| with_extension(base, e))
        .collect()
}

fn build_outputs(base: &Path, mode: BuildMode) -> Vec<PathBuf> {
    let exts: &[&str] = match mode {
        BuildMode::Bwt => &["bwt"],
        BuildMode::Sa => &["bwt", "sa"],
        BuildMode::Sample => &["bwt", "ssa", "esa", "ri"],
    };
    exts.iter().map(|e| with_extension(base, e)).collect()
}

/// Runs `f`; on failure removes every listed output that exists.
fn with_cleanup(paths: Vec<PathBuf>, f: impl FnOnce() -> Result<()>) -> Result<()> {
    let result = f();
    if result.is_err() {
        for p in &paths {
            let _ = std::fs::remove_file(p);
        }
    }
    result
}

fn detect_fasta(path: &Path) -> Result<bool> {
    let mut reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    loop {
        let buf = reader.fill_buf().map_err(|e| Error::io(path, e))?;
        if buf.is_empty() {
            return Ok(false);
        }
        if let Some(&b) = buf.iter().find(|b| !b.is_ascii_whitespace()) {
            return Ok(b == b'>');
        }
        let len = buf.len();
        reader.consume(len);
    }
}

/// Streams the input through the parser without materializing the text.
fn stream_parse(input: &InputArgs) -> Result<(pfparse::Dictionary, pfparse::Parse)> {
    let cfg = TriggerConfig::new(input.w, input.p);
    let mut parser = StreamingParser::new(cfg)?;
    let path = &input.input;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::with_capacity(1 << 16, file);
    let fasta = match input.format {
        FormatArg::Auto => detect_fasta(path)?,
        FormatArg::Fasta => true,
        FormatArg::Raw => false,
    };
    if fasta {
        let ingest = IngestConfig {
            strip_to_dna: input.strip_to_dna,
            add_revcomp: input.add_revcomp,
            ..Default::default()
        };
        text_ingest::stream_fasta(reader, &ingest, |chunk| parser.push(chunk))?;
    } else {
        if input.strip_to_dna || input.add_revcomp {
            return Err(Error::Config(
                "--strip-to-dna and --add-revcomp apply to FASTA input only".into(),
            ));
        }
        text_ingest::stream_raw(reader, |chunk| parser.push(chunk))?;
    }
    parser.finish()
}

fn build(input: &InputArgs, base: &Path, mode: BuildMode) -> Result<()> {
    {
        let (dict, parse) = stream_parse(input)?;
        pfparse::write_parse_files(base, &dict, &parse)?;
        let tables = pfp_builder::compute_tables(&dict, &parse)?;
        let mut sink = FileSink::create(base, mode)?;
        pfp_builder::build_into(&dict, &parse, &tables, &mut sink)?;
    }
    if mode == BuildMode::Sample {
        let bwt_path = with_extension(base, "bwt");
        let bwt = File::open(&bwt_path).map_err(|e| Error::io(&bwt_path, e))?;
        let ssa = pfp_builder::read_pair_file(&with_extension(base, "ssa"))?;
        let esa = pfp_builder::read_pair_file(&with_extension(base, "esa"))?;
        let idx = rindex::build_rindex(BufReader::new(bwt), &ssa, &esa)?;
        drop((ssa, esa));
        rindex::save(&idx, &with_extension(base, "ri"))?;
    }
    Ok(())
}

fn invert(base: &Path, out_base: &Path, mode: InvertModeArg) -> Result<()> {
    let bwt_path = with_extension(base, "bwt");
    let data = std::fs::read(&bwt_path).map_err(|e| Error::io(&bwt_path, e))?;
    let bwt = BwtString::from_bytes(data);
    let mode = match mode {
        InvertModeArg::Sa => InvertMode::Full,
        InvertModeArg::Sample => InvertMode::Sample,
    };
    match invert_bwt_to_sa(&bwt, mode)? {
        Inverted::Full(sa) => pfp_builder::write_u64_file(
            &with_extension(out_base, "sa"),
            sa.entries().iter().map(|&v| v as u64),
        ),
        Inverted::Sample(s) => {
            pfp_builder::write_pair_file(&with_extension(out_base, "ssa"), &s.ssa)?;
            pfp_builder::write_pair_file(&with_extension(out_base, "esa"), &s.esa)
        }
    }
}

/// A query pattern and its identifier (FASTA name or 0-based line ordinal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub id: String,
    pub bytes: Vec<u8>,
}

/// Reads patterns one per line, or FASTA when the first non-blank line
/// starts with '>'. Blank lines are skipped.
pub fn read_patterns<R: BufRead>(reader: R) -> Result<Vec<Pattern>> {
    let mut lines = Vec::new();
    for line in reader.split(b'\n') {
        let mut line = line?;
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        lines.push(line);
    }
    let fasta = lines
        .iter()
        .find(|l| !l.iter().all(u8::is_ascii_whitespace))
        .is_some_and(|l| l.first() == Some(&b'>'));
    let mut out = Vec::new();
    if fasta {
        for line in lines {
            if let Some(name) = line.strip_prefix(b">") {
                let id = String::from_utf8_lossy(name)
                    .split_whitespace()
                    .next()
                    .unwrap_or("")
                    .to_string();
                out.push(Pattern {
                    id,
                    bytes: Vec::new(),
                });
            } else if let Some(p) = out.last_mut() {
                p.bytes
                    .extend(line.iter().filter(|b| !b.is_ascii_whitespace()));
            }
        }
        out.retain(|p| !p.bytes.is_empty());
    } else {
        for line in lines.into_iter().filter(|l| !l.is_empty()) {
            out.push(Pattern {
                id: out.len().to_string(),
                bytes: line,
            });
        }
    }
    Ok(out)
}

fn query(q: &QueryArgs, max_hits: Option<usize>, locate: bool, out: &mut dyn Write) -> Result<()> {
    let idx = rindex::load(&with_extension(&q.base, "ri"))?;
    let file = File::open(&q.patterns).map_err(|e| Error::io(&q.patterns, e))?;
    let patterns = read_patterns(BufReader::new(file))?;
    let rows: Vec<Result<String>> = patterns
        .par_iter()
        .map(|p| query_row(&idx, p, max_hits, locate))
        .collect();
    let header = if locate {
        "#pattern_id\tcount\tpositions"
    } else {
        "#pattern_id\tcount"
    };
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", row?)?;
    }
    Ok(())
}

fn query_row(idx: &RIndex, p: &Pattern, max_hits: Option<usize>, locate: bool) -> Result<String> {
    let Some(st) = idx.find(&p.bytes)? else {
        return Ok(format!("{}\t0", p.id));
    };
    let mut row = format!("{}\t{}", p.id, st.size());
    if locate {
        let mut hits = idx.locate_state(&st, max_hits);
        hits.sort_unstable();
        for h in hits {
            row.push('\t');
            row.push_str(&h.to_string());
        }
    }
    Ok(row)
}

/// Length and run count of a built BWT, read from the .ri header when
/// present and otherwise by scanning the .bwt file.
fn bwt_shape(base: &Path) -> Result<(u64, u64)> {
    let ri = with_extension(base, "ri");
    if ri.exists() {
        let mut head = [0u8; 6 + 1 + 16];
        File::open(&ri)
            .and_then(|mut f| f.read_exact(&mut head))
            .map_err(|e| Error::io(&ri, e))?;
        if &head[..6] != rindex::MAGIC {
            return Err(Error::Format(format!("{} is not an r-index", ri.display())));
        }
        let n = u64::from_le_bytes(head[7..15].try_into().unwrap());
        let r = u64::from_le_bytes(head[15..23].try_into().unwrap());
        return Ok((n, r));
    }
    let path = with_extension(base, "bwt");
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let (mut n, mut r, mut prev) = (0u64, 0u64, None);
    loop {
        let buf = reader.fill_buf().map_err(|e| Error::io(&path, e))?;
        if buf.is_empty() {
            break;
        }
        for &b in buf {
            if prev != Some(b) {
                r += 1;
                prev = Some(b);
            }
        }
        n += buf.len() as u64;
        let len = buf.len();
        reader.consume(len);
    }
    Ok((n, r))
}

fn stats(base: &Path, out: &mut dyn Write) -> Result<()> {
    let (n, r) = bwt_shape(base)?;
    let dict_path = with_extension(base, "dict");
    let dict = std::fs::read(&dict_path).map_err(|e| Error::io(&dict_path, e))?;
    let d = dict
        .iter()
        .filter(|&&b| b == crate::text_ingest::SEPARATOR)
        .count() as u64;
    let dict_len = dict.len() as u64 - d - 1;
    let parse_path = with_extension(base, "parse");
    let parse_len = std::fs::metadata(&parse_path)
        .map_err(|e| Error::io(&parse_path, e))?
        .len()
        / 4;
    writeln!(out, "n\t{n}")?;
    writeln!(out, "r\t{r}")?;
    writeln!(out, "n/r\t{:.4}", n as f64 / r.max(1) as f64)?;
    writeln!(out, "|D|\t{dict_len}")?;
    writeln!(out, "|P|\t{parse_len}")?;
    writeln!(out, "d\t{d}")?;
    Ok(())
}
