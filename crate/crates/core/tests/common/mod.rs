//! Dense 16-dimensional reference model, written without the sparse algebra.
#![allow(dead_code)]

use ghz_core::{Ket, Mode, PhotonLabel, Pol, PureState};
use num_complex::Complex64;
use rand::Rng;

pub type Dense = Vec<Complex64>;
pub type DenseRho = Vec<Vec<Complex64>>;

pub fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `|θ⟩` for a reading along `angle` (`orth = false`) or `angle + 90°`.
pub fn analyzer(angle: f64, orth: bool) -> [f64; 2] {
    let t = (angle + if orth { 90.0 } else { 0.0 }).to_radians();
    [t.cos(), t.sin()]
}

fn bit(pols: [usize; 4]) -> usize {
    pols.iter().fold(0, |acc, &p| (acc << 1) | p)
}

/// Two singlets through the PBS, kept where 2′ and 3′ each fire.
/// Detector order 1, 2′, 3′, 4. Returns the unnormalized vector.
pub fn ghz_unnormalized() -> Dense {
    // singlet amplitude s(a, b): H=0, V=1
    let s = |a: usize, b: usize| match (a, b) {
        (0, 1) => std::f64::consts::FRAC_1_SQRT_2,
        (1, 0) => -std::f64::consts::FRAC_1_SQRT_2,
        _ => 0.0,
    };
    let mut out = vec![cx(0.0); 16];
    for p1 in 0..2 {
        for p2 in 0..2 {
            for p3 in 0..2 {
                for p4 in 0..2 {
                    let amp = s(p1, p2) * s(p3, p4);
                    // photon 2: H → 2′, V → 3′; photon 3: H → 3′, V → 2′
                    if p2 != p3 {
                        continue;
                    }
                    // both H: 2′ holds photon 2 (H), 3′ holds photon 3 (H); both V likewise
                    out[bit([p1, p2, p3, p4])] += cx(amp);
                }
            }
        }
    }
    out
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub fn normalized(v: &[Complex64]) -> Dense {
    let n = norm_sqr(v).sqrt();
    v.iter().map(|a| a / n).collect()
}

pub fn ghz() -> Dense {
    normalized(&ghz_unnormalized())
}

/// The GHZ vector with the sign of its `2′ = V` branch flipped.
pub fn ghz_flipped() -> Dense {
    let mut v = ghz();
    for (i, a) in v.iter_mut().enumerate() {
        if (i >> 2) & 1 == 1 {
            *a = -*a;
        }
    }
    v
}

pub fn outer(v: &[Complex64]) -> DenseRho {
    v.iter().map(|a| v.iter().map(|b| a * b.conj()).collect()).collect()
}

pub fn rho_mix(parts: &[(f64, &DenseRho)]) -> DenseRho {
    let d = parts[0].1.len();
    let mut r = vec![vec![cx(0.0); d]; d];
    for (w, m) in parts {
        for i in 0..d {
            for j in 0..d {
                r[i][j] += m[i][j] * w;
            }
        }
    }
    r
}

/// Partially coherent GHZ state for overlap `d` and ceiling `v0`.
pub fn ghz_rho(d: f64, v0: f64) -> DenseRho {
    let (a, b) = (outer(&ghz()), outer(&ghz_flipped()));
    rho_mix(&[((1.0 + d * v0) / 2.0, &a), ((1.0 - d * v0) / 2.0, &b)])
}

pub fn kron(vecs: &[[f64; 2]]) -> Dense {
    let mut out = vec![cx(1.0)];
    for v in vecs {
        out = out.iter().flat_map(|a| [a * v[0], a * v[1]]).collect();
    }
    out
}

pub fn expectation(rho: &DenseRho, v: &[Complex64]) -> f64 {
    let mut s = cx(0.0);
    for i in 0..v.len() {
        for j in 0..v.len() {
            s += v[i].conj() * rho[i][j] * v[j];
        }
    }
    s.re
}

/// Probability of a joint reading; `None` angles are summed over H and V.
pub fn reading_probability(rho: &DenseRho, angles: &[Option<f64>], orth: &[bool]) -> f64 {
    let free: Vec<usize> = (0..angles.len()).filter(|&i| angles[i].is_none()).collect();
    let mut p = 0.0;
    for fill in 0..(1usize << free.len()) {
        let vecs: Vec<[f64; 2]> = (0..angles.len())
            .map(|i| match angles[i] {
                Some(a) => analyzer(a, orth[i]),
                None => {
                    let j = free.iter().position(|&f| f == i).unwrap();
                    analyzer(0.0, (fill >> j) & 1 == 1)
                }
            })
            .collect();
        p += expectation(rho, &kron(&vecs));
    }
    p
}

/// `Σ (−1)^(orthogonal readings) p` with analyzers at `angles`.
pub fn correlation(rho: &DenseRho, angles: &[f64]) -> f64 {
    let n = angles.len();
    let mut e = 0.0;
    for k in 0..(1usize << n) {
        let orth: Vec<bool> = (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect();
        let vecs: Vec<[f64; 2]> = (0..n).map(|i| analyzer(angles[i], orth[i])).collect();
        let sign = if k.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        e += sign * expectation(rho, &kron(&vecs));
    }
    e
}

pub fn detector_labels() -> Vec<PhotonLabel> {
    [Mode::new(1), Mode::primed(2), Mode::primed(3), Mode::new(4)]
        .into_iter()
        .enumerate()
        .map(|(i, m)| PhotonLabel::new(i as u8 + 1, m))
        .collect()
}

pub fn random_dense<R: Rng>(rng: &mut R, dim: usize) -> Dense {
    loop {
        let v: Dense =
            (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        if norm_sqr(&v) > 1e-3 {
            return normalized(&v);
        }
    }
}

/// Random state on photons 1..4 in modes 1, 2′, 3′, 4 whose 2′3′ part is HH or VV.
pub fn random_coincidence_state<R: Rng>(rng: &mut R) -> PureState {
    let labels = detector_labels();
    let modes: Vec<Mode> = labels.iter().map(|l| l.mode).collect();
    let v = random_dense(rng, 8);
    let mut terms = Vec::new();
    for (k, a) in v.into_iter().enumerate() {
        let mid = if (k >> 1) & 1 == 1 { Pol::V } else { Pol::H };
        let pols = [Pol::from_bit(k >> 2), mid, mid, Pol::from_bit(k)];
        terms.push((Ket::from_pols(&modes, &pols), a));
    }
    PureState::from_terms(&[1, 2, 3, 4], terms).unwrap()
}

/// `(HVVH + VHHV)/√2` written out directly.
pub fn ghz_target() -> PureState {
    let labels = detector_labels();
    let modes: Vec<Mode> = labels.iter().map(|l| l.mode).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |s: &str| {
        Ket::from_pols(&modes, &s.chars().map(|c| if c == 'H' { Pol::H } else { Pol::V }).collect::<Vec<_>>())
    };
    PureState::from_terms(&[1, 2, 3, 4], [(ket("HVVH"), cx(h)), (ket("VHHV"), cx(h))]).unwrap()
}

/// The same two kets with a relative minus sign.
pub fn ghz_partner() -> PureState {
    let labels = detector_labels();
    let modes: Vec<Mode> = labels.iter().map(|l| l.mode).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |s: &str| {
        Ket::from_pols(&modes, &s.chars().map(|c| if c == 'H' { Pol::H } else { Pol::V }).collect::<Vec<_>>())
    };
    PureState::from_terms(&[1, 2, 3, 4], [(ket("HVVH"), cx(h)), (ket("VHHV"), cx(-h))]).unwrap()
}
