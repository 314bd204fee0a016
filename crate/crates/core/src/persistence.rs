//! Binary cache of sieved segments.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    [u8; 8]  "GMOATSEG"
//! version  u16      1
//! flags    u16      bit 0 = include_axis, other bits zero
//! lo       u64
//! hi       u64
//! count    u64
//! records  count x (a u64, b u64), sorted by (norm, a)
//! crc32    u32      CRC-32 (IEEE) of the record bytes
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::arith::{gaussian_prime_unchecked, sieve_octant, GaussianPrime, NormSegment};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"GMOATSEG";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 8 + 2 + 2 + 8 + 8 + 8;
pub const RECORD_LEN: usize = 16;

const FLAG_INCLUDE_AXIS: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SegmentFlags {
    pub include_axis: bool,
}

impl SegmentFlags {
    pub fn bits(&self) -> u16 {
        if self.include_axis {
            FLAG_INCLUDE_AXIS
        } else {
            0
        }
    }

    pub fn from_bits(bits: u16) -> Option<Self> {
        (bits & !FLAG_INCLUDE_AXIS == 0).then_some(SegmentFlags {
            include_axis: bits & FLAG_INCLUDE_AXIS != 0,
        })
    }
}

/// Reason a byte buffer is not a valid segment cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeError {
    Truncated { expected: usize, actual: usize },
    BadMagic,
    Version(u16),
    Flags(u16),
    Segment(u64, u64),
    Checksum { stored: u32, computed: u32 },
    Record { index: usize, reason: &'static str },
}

impl std::fmt::Display for DecodeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecodeError::Truncated { expected, actual } => {
                write!(f, "length mismatch: expected {expected} bytes, found {actual}")
            }
            DecodeError::BadMagic => write!(f, "bad magic"),
            DecodeError::Version(v) => write!(f, "unsupported version {v}"),
            DecodeError::Flags(b) => write!(f, "unknown flag bits {b:#06x}"),
            DecodeError::Segment(lo, hi) => write!(f, "invalid segment [{lo}, {hi})"),
            DecodeError::Checksum { stored, computed } => {
                write!(f, "checksum mismatch: stored {stored:08x}, computed {computed:08x}")
            }
            DecodeError::Record { index, reason } => write!(f, "record {index}: {reason}"),
        }
    }
}

fn check_records(
    primes: &[GaussianPrime],
    segment: &NormSegment,
    flags: SegmentFlags,
) -> std::result::Result<(), DecodeError> {
    for (index, p) in primes.iter().enumerate() {
        let bad = |reason| Err(DecodeError::Record { index, reason });
        let norm = p.a as u128 * p.a as u128 + p.b as u128 * p.b as u128;
        if norm >= segment.hi as u128 || (norm as u64) < segment.lo {
            return bad("norm outside the segment");
        }
        if p.b > p.a {
            return bad("not in first-octant form");
        }
        if p.b == 0 && !flags.include_axis {
            return bad("axis prime in a cache without include_axis");
        }
        if !gaussian_prime_unchecked(p.a, p.b) {
            return bad("not a Gaussian prime");
        }
        if index > 0 && primes[index - 1] >= *p {
            return bad("records not strictly sorted by (norm, a)");
        }
    }
    Ok(())
}

pub fn encode_segment(primes: &[GaussianPrime], segment: NormSegment, flags: SegmentFlags) -> Result<Vec<u8>> {
    check_records(primes, &segment, flags).map_err(|e| Error::Invariant(format!("refusing to write cache: {e}")))?;
    let mut out = Vec::with_capacity(HEADER_LEN + primes.len() * RECORD_LEN + 4);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&flags.bits().to_le_bytes());
    out.extend_from_slice(&segment.lo.to_le_bytes());
    out.extend_from_slice(&segment.hi.to_le_bytes());
    out.extend_from_slice(&(primes.len() as u64).to_le_bytes());
    for p in primes {
        out.extend_from_slice(&p.a.to_le_bytes());
        out.extend_from_slice(&p.b.to_le_bytes());
    }
    let crc = crc32fast::hash(&out[HEADER_LEN..]);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

fn u16_at(buf: &[u8], at: usize) -> u16 {
    u16::from_le_bytes(buf[at..at + 2].try_into().unwrap())
}

fn u64_at(buf: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(buf[at..at + 8].try_into().unwrap())
}

pub fn decode_segment(
    buf: &[u8],
) -> std::result::Result<(NormSegment, SegmentFlags, Vec<GaussianPrime>), DecodeError> {
    if buf.len() < HEADER_LEN + 4 {
        return Err(DecodeError::Truncated {
            expected: HEADER_LEN + 4,
            actual: buf.len(),
        });
    }
    if buf[..8] != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    let version = u16_at(buf, 8);
    if version != VERSION {
        return Err(DecodeError::Version(version));
    }
    let bits = u16_at(buf, 10);
    let flags = SegmentFlags::from_bits(bits).ok_or(DecodeError::Flags(bits))?;
    let (lo, hi) = (u64_at(buf, 12), u64_at(buf, 20));
    let segment = NormSegment::new(lo, hi).map_err(|_| DecodeError::Segment(lo, hi))?;
    let count = u64_at(buf, 28);
    let expected = (count as u128) * RECORD_LEN as u128 + HEADER_LEN as u128 + 4;
    if expected != buf.len() as u128 {
        return Err(DecodeError::Truncated {
            expected: expected.min(usize::MAX as u128) as usize,
            actual: buf.len(),
        });
    }
    let body = &buf[HEADER_LEN..buf.len() - 4];
    let stored = u32::from_le_bytes(buf[buf.len() - 4..].try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(DecodeError::Checksum { stored, computed });
    }
    let primes: Vec<GaussianPrime> = body
        .chunks_exact(RECORD_LEN)
        .map(|r| {
            let a = u64_at(r, 0);
            let b = u64_at(r, 8);
            GaussianPrime {
                a,
                b,
                norm: a.wrapping_mul(a).wrapping_add(b.wrapping_mul(b)),
            }
        })
        .collect();
    check_records(&primes, &segment, flags)?;
    Ok((segment, flags, primes))
}

/// Writes the cache atomically (temporary file in the same directory, then rename).
pub fn write_segment(
    path: &Path,
    primes: &[GaussianPrime],
    segment: NormSegment,
    flags: SegmentFlags,
) -> Result<()> {
    let bytes = encode_segment(primes, segment, flags)?;
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(&bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn read_segment(path: &Path) -> Result<(NormSegment, SegmentFlags, Vec<GaussianPrime>)> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_segment(&bytes).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Reads the cache and compares it with a fresh sieve of the same segment.
pub fn verify_segment(path: &Path) -> Result<(NormSegment, SegmentFlags, usize)> {
    let (segment, flags, primes) = read_segment(path)?;
    let fresh = sieve_octant(segment, flags.include_axis)?;
    if fresh != primes {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!(
                "contents differ from a fresh sieve ({} cached, {} expected)",
                primes.len(),
                fresh.len()
            ),
        });
    }
    Ok((segment, flags, primes.len()))
}
