//! Sparse complex-amplitude states of labeled polarization photons.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::mode::{Mode, PhotonLabel, Pol};
use crate::scalar::{basis_vectors, c, Real, C};

/// Occupation of one photon inside a basis ket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub pol: Pol,
    pub mode: Mode,
}

impl Slot {
    pub fn new(mode: Mode, pol: Pol) -> Self {
        Slot { pol, mode }
    }
}

/// Basis ket: one slot per photon, in ascending photon-index order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ket(Vec<Slot>);

impl Ket {
    pub fn new(slots: Vec<Slot>) -> Self {
        Ket(slots)
    }

    /// Ket with every photon in its own mode, given only the polarizations.
    pub fn from_pols(modes: &[Mode], pols: &[Pol]) -> Self {
        debug_assert_eq!(modes.len(), pols.len());
        Ket(modes.iter().zip(pols).map(|(&m, &p)| Slot::new(m, p)).collect())
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn pols(&self) -> Vec<Pol> {
        self.0.iter().map(|s| s.pol).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of photons sitting in `mode`.
    pub fn occupancy(&self, mode: Mode) -> usize {
        self.0.iter().filter(|s| s.mode == mode).count()
    }
}

/// Normalized pure state over a fixed set of labeled photons.
///
/// Amplitudes are stored sparsely. Each photon carries an analysis-basis
/// angle (degrees, 0 = H/V) that gives meaning to its `Pol` symbols. After
/// normalization the first nonzero amplitude in ket order is real and
/// non-negative, so equal rays compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    photons: Vec<u8>,
    bases: Vec<T>,
    amps: BTreeMap<Ket, C<T>>,
}

impl<T: Real> PureState<T> {
    /// Builds a state from unnormalized terms. Repeated kets add coherently.
    pub fn from_terms<I>(photons: &[u8], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Ket, C<T>)>,
    {
        let bases = vec![T::zero(); photons.len()];
        Self::from_terms_in_bases(photons, bases, terms)
    }

    pub(crate) fn from_terms_in_bases<I>(photons: &[u8], bases: Vec<T>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Ket, C<T>)>,
    {
        let mut order: Vec<usize> = (0..photons.len()).collect();
        order.sort_by_key(|&i| photons[i]);
        for w in order.windows(2) {
            if photons[w[0]] == photons[w[1]] {
                return Err(Error::LabelCollision(photons[w[0]]));
            }
        }
        let sorted: Vec<u8> = order.iter().map(|&i| photons[i]).collect();
        let sorted_bases: Vec<T> = order.iter().map(|&i| bases[i]).collect();

        let mut amps: BTreeMap<Ket, C<T>> = BTreeMap::new();
        for (ket, a) in terms {
            if ket.len() != photons.len() {
                return Err(Error::PhotonCount { expected: photons.len(), got: ket.len() });
            }
            let ket = Ket(order.iter().map(|&i| ket.0[i]).collect());
            let e = amps.entry(ket).or_insert_with(C::zero);
            *e = *e + a;
        }
        let mut s = PureState { photons: sorted, bases: sorted_bases, amps };
        s.normalize()?;
        Ok(s)
    }

    /// A single product ket with amplitude 1.
    pub fn product(labels: &[(PhotonLabel, Pol)]) -> Result<Self> {
        let photons: Vec<u8> = labels.iter().map(|(l, _)| l.index).collect();
        let ket = Ket(labels.iter().map(|(l, p)| Slot::new(l.mode, *p)).collect());
        Self::from_terms(&photons, [(ket, c(T::one()))])
    }

    fn normalize(&mut self) -> Result<()> {
        self.prune();
        let n2 = self.norm_sqr();
        if n2 <= T::zero() {
            return Err(Error::ZeroState);
        }
        let inv = T::one() / n2.sqrt();
        let phase = match self.amps.values().next() {
            Some(a) if a.norm() > T::zero() => a.conj() / c(a.norm()),
            _ => c(T::one()),
        };
        for a in self.amps.values_mut() {
            *a = *a * phase * c(inv);
        }
        // Kill the residual imaginary part of the leading amplitude.
        if let Some(a) = self.amps.values_mut().next() {
            *a = c(a.norm());
        }
        Ok(())
    }

    fn prune(&mut self) {
        let tol = T::prune_tol();
        self.amps.retain(|_, a| a.norm() > tol);
    }

    pub fn photons(&self) -> &[u8] {
        &self.photons
    }

    pub fn photon_count(&self) -> usize {
        self.photons.len()
    }

    pub fn position(&self, photon: u8) -> Result<usize> {
        self.photons.iter().position(|&p| p == photon).ok_or(Error::UnknownPhoton(photon))
    }

    /// Analysis-basis angle (degrees) of a photon.
    pub fn basis(&self, photon: u8) -> Result<T> {
        Ok(self.bases[self.position(photon)?])
    }

    pub fn bases(&self) -> &[T] {
        &self.bases
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Ket, &C<T>)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, ket: &Ket) -> C<T> {
        self.amps.get(ket).copied().unwrap_or_else(C::zero)
    }

    /// Amplitude of the ket whose photons keep the state's fixed modes and carry `pols`.
    pub fn amplitude_of(&self, pols: &[Pol]) -> C<T> {
        match self.fixed_modes() {
            Some(modes) => self.amplitude(&Ket::from_pols(&modes, pols)),
            None => C::zero(),
        }
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Mode of every photon if it is the same across all terms.
    pub fn fixed_modes(&self) -> Option<Vec<Mode>> {
        let mut it = self.amps.keys();
        let first: Vec<Mode> = it.next()?.0.iter().map(|s| s.mode).collect();
        for k in it {
            if k.0.iter().zip(&first).any(|(s, m)| s.mode != *m) {
                return None;
            }
        }
        Some(first)
    }

    /// Labels of the photons, valid when modes are fixed.
    pub fn labels(&self) -> Result<Vec<PhotonLabel>> {
        let modes = self.fixed_modes().ok_or(Error::ModesNotFixed)?;
        Ok(self.photons.iter().zip(modes).map(|(&i, m)| PhotonLabel::new(i, m)).collect())
    }

    /// Reassigns the mode of every photon. Only valid when modes are fixed.
    pub fn with_modes(&self, modes: &[Mode]) -> Result<Self> {
        if self.fixed_modes().is_none() {
            return Err(Error::ModesNotFixed);
        }
        if modes.len() != self.photons.len() {
            return Err(Error::PhotonCount { expected: self.photons.len(), got: modes.len() });
        }
        let amps = self
            .amps
            .iter()
            .map(|(k, a)| {
                let slots = k.0.iter().zip(modes).map(|(s, &m)| Slot::new(m, s.pol)).collect();
                (Ket(slots), *a)
            })
            .collect();
        Ok(PureState { photons: self.photons.clone(), bases: self.bases.clone(), amps })
    }

    /// Tensor product with a state on a disjoint photon set.
    pub fn tensor(&self, other: &PureState<T>) -> Result<Self> {
        if let Some(&p) = self.photons.iter().find(|p| other.photons.contains(p)) {
            return Err(Error::LabelCollision(p));
        }
        let photons: Vec<u8> = self.photons.iter().chain(&other.photons).copied().collect();
        let bases: Vec<T> = self.bases.iter().chain(&other.bases).copied().collect();
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (ka, a) in &self.amps {
            for (kb, b) in &other.amps {
                let slots = ka.0.iter().chain(&kb.0).copied().collect();
                terms.push((Ket(slots), *a * *b));
            }
        }
        Self::from_terms_in_bases(&photons, bases, terms)
    }

    /// Re-expresses one photon in the linear basis `{|θ⟩, |θ+90°⟩}`, θ in degrees.
    pub fn change_basis(&self, photon: u8, angle: T) -> Result<Self> {
        if !(angle >= T::zero() && angle < T::lit(180.0)) {
            return Err(Error::AngleOutOfRange(angle.to_f64_lossy()));
        }
        self.rotate_unchecked(photon, angle)
    }

    pub(crate) fn rotate_unchecked(&self, photon: u8, angle: T) -> Result<Self> {
        let p = self.position(photon)?;
        let old = basis_vectors(self.bases[p]);
        let new = basis_vectors(angle);
        // overlap[k][s] = ⟨new_k | old_s⟩
        let overlap = [[dot(new[0], old[0]), dot(new[0], old[1])], [dot(new[1], old[0]), dot(new[1], old[1])]];
        let mut terms = Vec::with_capacity(self.len() * 2);
        for (ket, a) in &self.amps {
            let s = ket.0[p].pol.bit();
            for (k, row) in overlap.iter().enumerate() {
                let w = row[s];
                if w != T::zero() {
                    let mut slots = ket.0.clone();
                    slots[p].pol = Pol::from_bit(k);
                    terms.push((Ket(slots), *a * c(w)));
                }
            }
        }
        let mut bases = self.bases.clone();
        bases[p] = angle;
        Self::from_terms_in_bases(&self.photons, bases, terms)
    }

    /// Same state with every photon in its own analysis basis angle.
    pub fn in_bases(&self, bases: &[T]) -> Result<Self> {
        if bases.len() != self.photons.len() {
            return Err(Error::PhotonCount { expected: self.photons.len(), got: bases.len() });
        }
        let mut s = self.clone();
        for (i, &b) in bases.iter().enumerate() {
            if s.bases[i] != b {
                s = s.rotate_unchecked(self.photons[i], b)?;
            }
        }
        Ok(s)
    }

    /// Same state written in the H/V basis for every photon.
    pub fn to_hv(&self) -> Result<Self> {
        self.in_bases(&vec![T::zero(); self.photons.len()])
    }

    /// `⟨self|other⟩`. `other` is rotated into this state's bases first.
    pub fn inner(&self, other: &PureState<T>) -> Result<C<T>> {
        if self.photons != other.photons {
            return Err(Error::IncompatibleStates);
        }
        let other = other.in_bases(&self.bases)?;
        Ok(self.amps.iter().map(|(k, a)| a.conj() * other.amplitude(k)).fold(C::zero(), |acc, x| acc + x))
    }

    /// Amplitude-wise equality within `tol`, after bringing `other` into this state's bases.
    pub fn approx_eq(&self, other: &PureState<T>, tol: T) -> bool {
        if self.photons != other.photons {
            return false;
        }
        let Ok(rotated) = other.in_bases(&self.bases) else {
            return false;
        };
        for k in self.amps.keys().chain(rotated.amps.keys()) {
            if (self.amplitude(k) - rotated.amplitude(k)).norm() > tol {
                return false;
            }
        }
        true
    }

    /// Drops a photon that sits in the same slot in every term (i.e. factorizes out).
    pub fn remove_photon(&self, photon: u8) -> Result<Self> {
        let p = self.position(photon)?;
        let mut slot = None;
        for k in self.amps.keys() {
            match slot {
                None => slot = Some(k.0[p]),
                Some(s) if s != k.0[p] => return Err(Error::ImpossibleOutcome("photon is entangled with the rest")),
                _ => {}
            }
        }
        let mut photons = self.photons.clone();
        photons.remove(p);
        let mut bases = self.bases.clone();
        bases.remove(p);
        let terms = self.amps.iter().map(|(k, a)| {
            let mut slots = k.0.clone();
            slots.remove(p);
            (Ket(slots), *a)
        });
        Self::from_terms_in_bases(&photons, bases, terms)
    }

    /// Dense amplitude vector in the H/V basis, index bit `n-1-i` = photon `i` is V.
    ///
    /// Requires fixed modes.
    pub fn to_dense(&self) -> Result<Vec<C<T>>> {
        if self.fixed_modes().is_none() {
            return Err(Error::ModesNotFixed);
        }
        let hv = self.to_hv()?;
        let n = hv.photons.len();
        let mut v = vec![C::zero(); 1 << n];
        for (k, a) in &hv.amps {
            v[ket_index(k)] = *a;
        }
        Ok(v)
    }

    /// Inverse of [`to_dense`](Self::to_dense).
    pub fn from_dense(labels: &[PhotonLabel], v: &[C<T>]) -> Result<Self> {
        let n = labels.len();
        if v.len() != 1 << n {
            return Err(Error::DimensionMismatch(v.len(), 1 << n));
        }
        let photons: Vec<u8> = labels.iter().map(|l| l.index).collect();
        let modes: Vec<Mode> = labels.iter().map(|l| l.mode).collect();
        let terms = v.iter().enumerate().map(|(i, a)| (Ket::from_pols(&modes, &index_pols(i, n)), *a));
        Self::from_terms(&photons, terms)
    }
}

fn dot<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn ket_index(k: &Ket) -> usize {
    k.0.iter().fold(0, |acc, s| (acc << 1) | s.pol.bit())
}

pub(crate) fn index_pols(i: usize, n: usize) -> Vec<Pol> {
    (0..n).map(|j| Pol::from_bit(i >> (n - 1 - j))).collect()
}

fn symbol<T: Real>(pol: Pol, basis: T) -> &'static str {
    if basis == T::zero() {
        match pol {
            Pol::H => "H",
            Pol::V => "V",
        }
    } else {
        match pol {
            Pol::H => "+",
            Pol::V => "-",
        }
    }
}

impl<T: Real> fmt::Display for PureState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in &self.amps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|", a.re, a.im)?;
            for (i, s) in k.0.iter().enumerate() {
                write!(f, "{}{}", symbol(s.pol, self.bases[i]), s.mode)?;
                if i + 1 < k.0.len() {
                    write!(f, " ")?;
                }
            }
            write!(f, "⟩")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(index: u8, pol: Pol) -> PureState<f64> {
        PureState::product(&[(PhotonLabel::new(index, Mode::new(index)), pol)]).unwrap()
    }

    #[test]
    fn product_of_single_kets_is_single_ket() {
        let s = single(1, Pol::H).tensor(&single(2, Pol::V)).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.amplitude_of(&[Pol::H, Pol::V]) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn tensor_rejects_shared_photon() {
        let a = single(1, Pol::H);
        assert_eq!(a.tensor(&a), Err(Error::LabelCollision(1)));
    }

    #[test]
    fn h_in_45_basis() {
        let s = single(1, Pol::H).change_basis(1, 45.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude_of(&[Pol::H]) - c(h)).norm() < 1e-12);
        assert!((s.amplitude_of(&[Pol::V]) - c(h)).norm() < 1e-12);
        assert_eq!(s.to_string(), "(0.707107+0.000000i)|+1⟩ + (0.707107+0.000000i)|-1⟩");
    }

    #[test]
    fn change_basis_rejects_angle() {
        let s = single(1, Pol::H);
        assert!(matches!(s.change_basis(1, 180.0), Err(Error::AngleOutOfRange(_))));
        assert!(matches!(s.change_basis(1, -1.0), Err(Error::AngleOutOfRange(_))));
        assert!(matches!(s.change_basis(7, 10.0), Err(Error::UnknownPhoton(7))));
    }

    #[test]
    fn zero_state_rejected() {
        let r = PureState::<f64>::from_terms(&[1], [(Ket::new(vec![Slot::new(Mode::new(1), Pol::H)]), c(0.0))]);
        assert_eq!(r, Err(Error::ZeroState));
    }

    #[test]
    fn global_phase_fixed() {
        let k = |p| Ket::new(vec![Slot::new(Mode::new(1), p)]);
        let s = PureState::<f64>::from_terms(&[1], [(k(Pol::H), C::new(0.0, -1.0)), (k(Pol::V), C::new(0.0, 1.0))])
            .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(&k(Pol::H)) - c(h)).norm() < 1e-15);
        assert!((s.amplitude(&k(Pol::V)) - c(-h)).norm() < 1e-15);
    }

    #[test]
    fn dense_round_trip() {
        let labels = [PhotonLabel::new(1, Mode::new(1)), PhotonLabel::new(2, Mode::new(2))];
        let v = vec![c(0.5), C::new(0.0, 0.5), c(-0.5), c(0.5)];
        let s = PureState::from_dense(&labels, &v).unwrap();
        let back = s.to_dense().unwrap();
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn remove_factorized_photon() {
        let s = single(1, Pol::H).tensor(&single(2, Pol::V)).unwrap();
        let r = s.remove_photon(2).unwrap();
        assert_eq!(r, single(1, Pol::H));
    }

    #[test]
    fn works_in_f32() {
        let s = PureState::<f32>::product(&[(PhotonLabel::new(1, Mode::new(1)), Pol::V)]).unwrap();
        let r = s.change_basis(1, 30.0).unwrap().change_basis(1, 0.0).unwrap();
        assert!(r.approx_eq(&s, 1e-5));
    }
}
