//! Prefix-free parsing based construction of the BWT, suffix array and
//! run-length compressed r-index of highly repetitive texts, plus
//! count/locate queries over the resulting index.
//!
//! ```
//! use pfp_rindex::pfp_builder::{build_from_parse, BuildMode};
//! use pfp_rindex::pfparse::{parse_text, TriggerConfig};
//! use pfp_rindex::rindex::RIndex;
//! use pfp_rindex::text_ingest::TextBuffer;
//!
//! # fn main() -> pfp_rindex::Result<()> {
//! let text = TextBuffer::from_content(b"abracadabra".to_vec(), 4)?;
//! let (dict, parse) = parse_text(&text, &TriggerConfig::new(4, 8))?;
//! let out = build_from_parse(&dict, &parse, BuildMode::Sample)?;
//! let idx = RIndex::from_bwt(&out.bwt, &out.sample.ssa, &out.sample.esa)?;
//! assert_eq!(idx.count(b"abra")?, 2);
//! let mut hits = idx.locate_all(b"abra", None)?;
//! hits.sort();
//! assert_eq!(hits, [0, 7]);
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod error;
pub mod pfp_builder;
pub mod pfparse;
pub mod rindex;
pub mod suffix_kernel;
pub mod text_ingest;

pub use error::{Error, Result};

/// 1-based dictionary rank of a phrase.
pub type Rank = u32;
/// 0-based text position.
pub type Position = u64;
