//! Upper-bound models `g(p)` for the gap between consecutive ordinary primes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::NormSegment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapKind {
    /// `c * sqrt(p) * log p`, the bound conditional on the Riemann hypothesis.
    Rh,
    /// `c * (log p)^2`.
    Cramer,
    /// `p^(1/2 + delta)`; `delta = 0.025` gives the exponent 21/40.
    Bhp,
    /// A fixed radius, for experiments.
    Const,
}

impl GapKind {
    pub const BOUNDED: [GapKind; 3] = [GapKind::Rh, GapKind::Cramer, GapKind::Bhp];

    pub fn name(&self) -> &'static str {
        match self {
            GapKind::Rh => "rh",
            GapKind::Cramer => "cramer",
            GapKind::Bhp => "bhp",
            GapKind::Const => "const",
        }
    }
}

impl fmt::Display for GapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rh" => Ok(GapKind::Rh),
            "cramer" => Ok(GapKind::Cramer),
            "bhp" => Ok(GapKind::Bhp),
            "const" | "constant" => Ok(GapKind::Const),
            other => Err(Error::precondition(format!("unknown gap model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Natural,
    Ten,
}

impl LogBase {
    fn log(&self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Ten => x.log10(),
        }
    }
}

pub const DEFAULT_DELTA: f64 = 0.025;

/// A named, parameterized gap bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapModel {
    pub kind: GapKind,
    /// Leading constant for RH and Cramér.
    pub c: f64,
    /// Exponent offset for BHP.
    pub delta: f64,
    /// Radius for the constant model.
    pub const_value: f64,
    pub log_base: LogBase,
}

impl GapModel {
    pub fn new(kind: GapKind) -> Self {
        GapModel {
            kind,
            c: 1.0,
            delta: DEFAULT_DELTA,
            const_value: 1.0,
            log_base: LogBase::Natural,
        }
    }

    pub fn rh(c: f64) -> Self {
        GapModel { c, ..Self::new(GapKind::Rh) }
    }

    pub fn cramer(c: f64) -> Self {
        GapModel { c, ..Self::new(GapKind::Cramer) }
    }

    pub fn bhp(delta: f64) -> Self {
        GapModel { delta, ..Self::new(GapKind::Bhp) }
    }

    pub fn constant(value: f64) -> Self {
        GapModel { const_value: value, ..Self::new(GapKind::Const) }
    }

    pub fn with_log_base(mut self, base: LogBase) -> Self {
        self.log_base = base;
        self
    }

    /// Checks the parameters are usable.
    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            GapKind::Rh | GapKind::Cramer => self.c > 0.0 && self.c.is_finite(),
            GapKind::Bhp => self.delta >= 0.0 && self.delta.is_finite(),
            GapKind::Const => self.const_value > 0.0 && self.const_value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::precondition(format!("invalid parameters for gap model {self:?}")))
        }
    }

    /// `g(p)`. Defined for real `p >= 2`.
    pub fn gap_value(&self, p: f64) -> Result<f64> {
        if !(p >= 2.0) {
            return Err(Error::domain(format!("gap model evaluated at p = {p} < 2")));
        }
        Ok(self.eval(p))
    }

    pub(crate) fn eval(&self, p: f64) -> f64 {
        match self.kind {
            GapKind::Rh => self.c * p.sqrt() * self.log_base.log(p),
            GapKind::Cramer => {
                let l = self.log_base.log(p);
                self.c * l * l
            }
            GapKind::Bhp => p.powf(0.5 + self.delta),
            GapKind::Const => self.const_value,
        }
    }

    /// The value of `g` at the top of the segment, used as its supremum.
    pub fn segment_max_gap(&self, segment: &NormSegment) -> f64 {
        self.eval(segment.hi as f64)
    }
}

impl fmt::Display for GapModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GapKind::Rh | GapKind::Cramer => write!(f, "{}(c={})", self.kind, self.c),
            GapKind::Bhp => write!(f, "bhp(delta={})", self.delta),
            GapKind::Const => write!(f, "const({})", self.const_value),
        }
    }
}
