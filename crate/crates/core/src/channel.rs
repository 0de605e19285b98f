//! Single-qubit Pauli channel and the four parameters it induces on the
//! `|0>,|1>` operator basis.
//!
//! The channel acts as `rho -> pi0 rho + pi1 X rho X + pi2 Y rho Y + pi3 Z rho Z`.
//! On the operators `|i><j|` it mixes `|0><0|` with `|1><1|` through `(a, b)` and
//! `|0><1|` with `|1><0|` through `(c, d)`; every downstream formula depends on
//! the channel only through these four numbers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance applied to probability validation.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// A validated Pauli channel: probabilities of identity, X, Y and Z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pi: [f64; 4],
}

/// `(a, b, c, d)` with `a = pi0 + pi3`, `b = pi1 + pi2`, `c = pi0 - pi3`, `d = pi1 - pi2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Named one-parameter channel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelFamily {
    /// `pi1 = pi2 = pi3 = (1 - pi0) / 3`
    Depolarizing,
    /// `pi1 = pi2 = 0`, `pi3 = 1 - pi0`
    Dephasing,
}

impl FromStr for ChannelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "depolarizing" | "depolarising" => Ok(ChannelFamily::Depolarizing),
            "dephasing" => Ok(ChannelFamily::Dephasing),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelFamily::Depolarizing => f.write_str("depolarizing"),
            ChannelFamily::Dephasing => f.write_str("dephasing"),
        }
    }
}

impl PauliChannel {
    /// Validates four raw probabilities.
    ///
    /// Values within [`PROBABILITY_TOLERANCE`] of the simplex are accepted:
    /// slightly negative entries are clamped to zero and the result is divided
    /// by its sum.
    pub fn new(raw: [f64; 4]) -> Result<Self> {
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < -PROBABILITY_TOLERANCE {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        let clamped = raw.map(|p| p.max(0.0));
        let total: f64 = clamped.iter().sum();
        Ok(Self {
            pi: clamped.map(|p| p / total),
        })
    }

    pub fn identity() -> Self {
        Self {
            pi: [1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Member of a named family with `pi0 = strength`.
    pub fn preset(family: ChannelFamily, strength: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&strength) {
            return Err(Error::StrengthOutOfRange(strength));
        }
        let rest = 1.0 - strength;
        let pi = match family {
            ChannelFamily::Depolarizing => [strength, rest / 3.0, rest / 3.0, rest / 3.0],
            ChannelFamily::Dephasing => [strength, 0.0, 0.0, rest],
        };
        Self::new(pi)
    }

    /// Looks the family up by name, then delegates to [`PauliChannel::preset`].
    pub fn preset_by_name(name: &str, strength: f64) -> Result<Self> {
        Self::preset(name.parse()?, strength)
    }

    /// Inverse of [`PauliChannel::params`].
    pub fn from_params(p: DerivedParams) -> Result<Self> {
        Self::new([
            (p.a + p.c) / 2.0,
            (p.b + p.d) / 2.0,
            (p.b - p.d) / 2.0,
            (p.a - p.c) / 2.0,
        ])
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.pi
    }

    pub fn pi0(&self) -> f64 {
        self.pi[0]
    }

    pub fn pi1(&self) -> f64 {
        self.pi[1]
    }

    pub fn pi2(&self) -> f64 {
        self.pi[2]
    }

    pub fn pi3(&self) -> f64 {
        self.pi[3]
    }

    pub fn params(&self) -> DerivedParams {
        derive_params(self)
    }
}

impl fmt::Display for PauliChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(pi0={}, pi1={}, pi2={}, pi3={})",
            self.pi[0], self.pi[1], self.pi[2], self.pi[3]
        )
    }
}

pub fn validate_channel(raw: [f64; 4]) -> Result<PauliChannel> {
    PauliChannel::new(raw)
}

pub fn derive_params(ch: &PauliChannel) -> DerivedParams {
    let [p0, p1, p2, p3] = ch.pi;
    DerivedParams {
        a: p0 + p3,
        b: p1 + p2,
        c: p0 - p3,
        d: p1 - p2,
    }
}

impl DerivedParams {
    /// Larger and smaller of `(a, b)`.
    pub fn ab_ordered(&self) -> (f64, f64) {
        if self.a >= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }

    /// Larger and smaller of `(|c|, |d|)`.
    pub fn cd_abs_ordered(&self) -> (f64, f64) {
        let (c, d) = (self.c.abs(), self.d.abs());
        if c >= d {
            (c, d)
        } else {
            (d, c)
        }
    }

    /// `a == b` up to the probability tolerance; every cut is then separable.
    pub fn is_balanced(&self) -> bool {
        (self.a - self.b).abs() <= PROBABILITY_TOLERANCE
    }

    /// `c` and `d` strictly opposite in sign.
    pub fn opposite_signs(&self) -> bool {
        self.c * self.d < 0.0
    }
}
