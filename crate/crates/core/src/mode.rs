//! Spatial-mode tags and polarization symbols.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Spatial mode of the setup: a port number with an optional prime (`2'`)
/// marking the outputs of a beam-splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Mode {
    pub port: u8,
    pub primed: bool,
}

impl Mode {
    pub const fn new(port: u8) -> Self {
        Mode { port, primed: false }
    }

    pub const fn primed(port: u8) -> Self {
        Mode { port, primed: true }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primed {
            write!(f, "{}'", self.port)
        } else {
            write!(f, "{}", self.port)
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let (digits, primed) = match t.strip_suffix('\'').or_else(|| t.strip_suffix('′')) {
            Some(d) => (d, true),
            None => (t, false),
        };
        digits.parse::<u8>().map(|port| Mode { port, primed }).map_err(|_| Error::ModeTag(s.to_string()))
    }
}

impl TryFrom<String> for Mode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<Mode> for String {
    fn from(m: Mode) -> String {
        m.to_string()
    }
}

/// Polarization symbol of one photon in a basis ket.
///
/// In the H/V basis these are horizontal and vertical. When a photon's
/// analysis basis is rotated to θ, `H` denotes `|θ⟩` and `V` denotes `|θ+90°⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub fn flip(self) -> Pol {
        match self {
            Pol::H => Pol::V,
            Pol::V => Pol::H,
        }
    }

    #[inline]
    pub fn bit(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }

    #[inline]
    pub fn from_bit(b: usize) -> Pol {
        if b & 1 == 0 {
            Pol::H
        } else {
            Pol::V
        }
    }
}

/// A photon identity with the spatial mode it occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhotonLabel {
    pub index: u8,
    pub mode: Mode,
}

impl PhotonLabel {
    pub fn new(index: u8, mode: Mode) -> Self {
        PhotonLabel { index, mode }
    }
}
