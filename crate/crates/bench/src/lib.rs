//! Shared inputs for the criterion benchmarks.

use gmoat_core::NormSegment;

/// The decade `[10^(A-1), 10^A)`.
pub fn decade(exponent: u32) -> NormSegment {
    NormSegment::decade(exponent).expect("valid decade")
}
