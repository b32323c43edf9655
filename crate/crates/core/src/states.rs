//! Canonical states: down-conversion singlets, Bell states, GHZ states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode::{Mode, Pol};
use crate::scalar::{c, inv_sqrt2, Real};
use crate::state::{Ket, PureState};

/// The four Bell states of a photon pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellKind {
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [BellKind::PsiPlus, BellKind::PsiMinus, BellKind::PhiPlus, BellKind::PhiMinus];

    /// Polarizations of the two kets and the relative sign of the second.
    fn terms(self) -> ([Pol; 2], [Pol; 2], f64) {
        use Pol::*;
        match self {
            BellKind::PsiPlus => ([H, V], [V, H], 1.0),
            BellKind::PsiMinus => ([H, V], [V, H], -1.0),
            BellKind::PhiPlus => ([H, H], [V, V], 1.0),
            BellKind::PhiMinus => ([H, H], [V, V], -1.0),
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        })
    }
}

impl FromStr for BellKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psi+" | "ψ+" | "ψ⁺" => Ok(BellKind::PsiPlus),
            "psi-" | "ψ-" | "ψ⁻" => Ok(BellKind::PsiMinus),
            "phi+" | "φ+" | "φ⁺" => Ok(BellKind::PhiPlus),
            "phi-" | "φ-" | "φ⁻" => Ok(BellKind::PhiMinus),
            _ => Err(Error::InvalidBellKind(s.to_string())),
        }
    }
}

/// Bell state on photons `i`, `j`, each in the mode with the same number.
pub fn bell_state<T: Real>(kind: BellKind, i: u8, j: u8) -> Result<PureState<T>> {
    bell_state_in_modes(kind, (i, Mode::new(i)), (j, Mode::new(j)))
}

pub fn bell_state_in_modes<T: Real>(kind: BellKind, a: (u8, Mode), b: (u8, Mode)) -> Result<PureState<T>> {
    if a.0 == b.0 {
        return Err(Error::InvalidPair(a.0, b.0));
    }
    let (k0, k1, sign) = kind.terms();
    let modes = [a.1, b.1];
    let h = inv_sqrt2::<T>();
    PureState::from_terms(
        &[a.0, b.0],
        [(Ket::from_pols(&modes, &k0), c(h)), (Ket::from_pols(&modes, &k1), c(h * T::lit(sign)))],
    )
}

/// Polarization singlet `(|H⟩ᵢ|V⟩ⱼ − |V⟩ᵢ|H⟩ⱼ)/√2` emitted by one down-conversion pass.
pub fn spdc_pair<T: Real>(i: u8, j: u8) -> Result<PureState<T>> {
    bell_state(BellKind::PsiMinus, i, j)
}

pub fn spdc_pair_in_modes<T: Real>(a: (u8, Mode), b: (u8, Mode)) -> Result<PureState<T>> {
    bell_state_in_modes(BellKind::PsiMinus, a, b)
}

/// Polarization assignment of the first GHZ branch; the second branch is its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GhzPattern {
    /// `H…H + V…V`
    Uniform,
    /// Outer photons H, inner photons V: `HVVH + VHHV`, `HVH + VHV`.
    Bracketed,
    Custom(Vec<Pol>),
}

impl GhzPattern {
    fn first_branch(&self, n: usize) -> Result<Vec<Pol>> {
        Ok(match self {
            GhzPattern::Uniform => vec![Pol::H; n],
            GhzPattern::Bracketed => (0..n).map(|i| if i == 0 || i + 1 == n { Pol::H } else { Pol::V }).collect(),
            GhzPattern::Custom(p) => {
                if p.len() != n {
                    return Err(Error::PhotonCount { expected: n, got: p.len() });
                }
                p.clone()
            }
        })
    }
}

/// `n`-photon GHZ state on photons `1..=n` in modes `1..=n`.
pub fn ghz_state<T: Real>(n: usize, pattern: &GhzPattern) -> Result<PureState<T>> {
    if n < 2 {
        return Err(Error::TooFewPhotons(n));
    }
    let first = pattern.first_branch(n)?;
    let second: Vec<Pol> = first.iter().map(|p| p.flip()).collect();
    let photons: Vec<u8> = (1..=n as u8).collect();
    let modes: Vec<Mode> = photons.iter().map(|&i| Mode::new(i)).collect();
    let h = inv_sqrt2::<T>();
    PureState::from_terms(&photons, [(Ket::from_pols(&modes, &first), c(h)), (Ket::from_pols(&modes, &second), c(h))])
}
