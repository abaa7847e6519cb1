//! Closed-form running-phase operation counts of the compared estimators.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Omp,
    PolarOmp,
    Mrdn,
    PolarMrdn,
    PolarMsrdn,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Omp,
        Scheme::PolarOmp,
        Scheme::Mrdn,
        Scheme::PolarMrdn,
        Scheme::PolarMsrdn,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Scheme::Omp => "omp",
            Scheme::PolarOmp => "pomp",
            Scheme::Mrdn => "mrdn",
            Scheme::PolarMrdn => "pmrdn",
            Scheme::PolarMsrdn => "pmsrdn",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// N antennas, Q polar atoms, L paths, B RDN blocks, M layers per RDN,
/// K kernel extent, E feature channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityParams {
    pub n: u64,
    pub q: u64,
    pub l: u64,
    pub b: u64,
    pub m: u64,
    pub k: u64,
    pub e: u64,
}

impl ComplexityParams {
    fn validate(&self) -> Result<()> {
        let all = [self.n, self.q, self.l, self.b, self.m, self.k, self.e];
        if all.contains(&0) {
            return Err(Error::invalid("complexity parameters must all be positive"));
        }
        Ok(())
    }
}

/// Operation count for `scheme`:
///
/// | scheme  | count          |
/// |---------|----------------|
/// | omp     | L³N²           |
/// | pomp    | L³NQ           |
/// | mrdn    | BMN²K²E²       |
/// | pmrdn   | BMNQK²E²       |
/// | pmsrdn  | B(M+4)NQK²E²   |
pub fn theoretical_complexity(scheme: Scheme, p: &ComplexityParams) -> Result<u128> {
    p.validate()?;
    let [n, q, l, b, m, k, e] = [p.n, p.q, p.l, p.b, p.m, p.k, p.e].map(u128::from);
    let kernels = k * k * e * e;
    let count = match scheme {
        Scheme::Omp => l.pow(3) * n * n,
        Scheme::PolarOmp => l.pow(3) * n * q,
        Scheme::Mrdn => b * m * n * n * kernels,
        Scheme::PolarMrdn => b * m * n * q * kernels,
        Scheme::PolarMsrdn => b * (m + 4) * n * q * kernels,
    };
    Ok(count)
}
