//! Dense density matrices in the H/V product basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::mode::{Mode, PhotonLabel};
use crate::scalar::{c, jones, Real, C};
use crate::state::PureState;

/// Mixed polarization state of photons with fixed modes.
///
/// Row/column index bit `n-1-i` is 1 when photon `i` (ascending photon index)
/// is V. Dimension is `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    labels: Vec<PhotonLabel>,
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> DensityMatrix<T> {
    pub(crate) fn from_raw(labels: Vec<PhotonLabel>, data: Vec<C<T>>) -> Self {
        let dim = 1 << labels.len();
        debug_assert_eq!(data.len(), dim * dim);
        DensityMatrix { labels, dim, data }
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &PureState<T>) -> Result<Self> {
        let labels = state.labels()?;
        let v = state.to_dense()?;
        let dim = v.len();
        let mut data = vec![C::zero(); dim * dim];
        for i in 0..dim {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                data[i * dim + j] = v[i] * v[j].conj();
            }
        }
        Ok(Self::from_raw(labels, data))
    }

    pub fn labels(&self) -> &[PhotonLabel] {
        &self.labels
    }

    pub fn modes(&self) -> Vec<Mode> {
        self.labels.iter().map(|l| l.mode).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn photon_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self.get(i, i))
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                // Tr(ρρ) = Σ ρ_ij ρ_ji
                s = s + (self.get(i, j) * self.get(j, i)).re;
            }
        }
        s
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        (0..self.dim).all(|i| (i..self.dim).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// Smallest eigenvalue, computed in double precision.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::<Complex64>::from_fn(self.dim, self.dim, |i, j| {
            let a = self.get(i, j);
            Complex64::new(a.re.to_f64_lossy(), a.im.to_f64_lossy())
        });
        // Symmetrize so round-off asymmetry cannot leak into the solver.
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks hermiticity, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let tol = T::invariant_tol();
        if !self.is_hermitian(tol) {
            return Err(Error::InvalidDensity("not Hermitian"));
        }
        if (self.trace() - c(T::one())).norm() > tol {
            return Err(Error::InvalidDensity("trace differs from 1"));
        }
        if self.min_eigenvalue() < -tol.to_f64_lossy() {
            return Err(Error::InvalidDensity("negative eigenvalue"));
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩`
    pub fn expectation(&self, target: &PureState<T>) -> Result<T> {
        let labels = target.labels()?;
        if labels.len() != self.labels.len() {
            return Err(Error::DimensionMismatch(1 << labels.len(), self.dim));
        }
        if labels != self.labels {
            return Err(Error::IncompatibleStates);
        }
        let v = target.to_dense()?;
        Ok(self.sandwich(&v).re)
    }

    fn sandwich(&self, v: &[C<T>]) -> C<T> {
        let mut acc = C::zero();
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            let mut row = C::zero();
            for (j, vj) in v.iter().enumerate() {
                if !vj.is_zero() {
                    row = row + self.get(i, j) * *vj;
                }
            }
            acc = acc + vi.conj() * row;
        }
        acc
    }

    /// Probability of finding every photon `i` in the linear polarization `angles[i]`.
    pub fn product_probability(&self, angles: &[T]) -> Result<T> {
        if angles.len() != self.labels.len() {
            return Err(Error::PhotonCount { expected: self.labels.len(), got: angles.len() });
        }
        let vecs: Vec<[T; 2]> = angles.iter().map(|&a| jones(a)).collect();
        Ok(self.sandwich(&product_vector(&vecs)).re)
    }

    /// Probability of a partial measurement: photons at `positions` found in the
    /// joint (possibly entangled) state `v` of dimension `2^positions.len()`.
    pub fn subsystem_probability(&self, positions: &[usize], v: &[C<T>]) -> Result<T> {
        let (_, p) = self.project_subsystem(positions, v)?;
        Ok(p)
    }

    /// Conditional state of the remaining photons after the photons at `positions`
    /// are found in `v`; returns the unnormalized block and its trace.
    fn project_subsystem(&self, positions: &[usize], v: &[C<T>]) -> Result<(Self, T)> {
        let n = self.labels.len();
        let k = positions.len();
        if v.len() != 1 << k {
            return Err(Error::DimensionMismatch(v.len(), 1 << k));
        }
        if positions.iter().any(|&p| p >= n) {
            return Err(Error::PhotonCount { expected: n, got: k });
        }
        let rest: Vec<usize> = (0..n).filter(|i| !positions.contains(i)).collect();
        let rdim = 1 << rest.len();
        let full = |r: usize, s: usize| -> usize {
            let mut idx = 0usize;
            for (bit, &pos) in rest.iter().enumerate() {
                if (r >> (rest.len() - 1 - bit)) & 1 == 1 {
                    idx |= 1 << (n - 1 - pos);
                }
            }
            for (bit, &pos) in positions.iter().enumerate() {
                if (s >> (k - 1 - bit)) & 1 == 1 {
                    idx |= 1 << (n - 1 - pos);
                }
            }
            idx
        };
        let mut data = vec![C::zero(); rdim * rdim];
        for r1 in 0..rdim {
            for r2 in 0..rdim {
                let mut acc = C::zero();
                for (a, va) in v.iter().enumerate() {
                    if va.is_zero() {
                        continue;
                    }
                    for (b, vb) in v.iter().enumerate() {
                        if vb.is_zero() {
                            continue;
                        }
                        acc = acc + va.conj() * self.get(full(r1, a), full(r2, b)) * vb;
                    }
                }
                data[r1 * rdim + r2] = acc;
            }
        }
        let labels = rest.iter().map(|&i| self.labels[i]).collect();
        let m = Self::from_raw(labels, data);
        let p = m.trace().re;
        Ok((m, p))
    }

    /// Normalized conditional state of the photons not in `modes`, given that the
    /// photons in `modes` were projected onto `v`. Returns the state and its probability.
    pub fn condition_on(&self, modes: &[Mode], v: &[C<T>]) -> Result<(Self, T)> {
        let positions = self.positions_of(modes)?;
        let (m, p) = self.project_subsystem(&positions, v)?;
        if p <= T::exact_tol() * T::exact_tol() {
            return Err(Error::ImpossibleOutcome("projection has zero probability"));
        }
        Ok((m.scaled(T::one() / p), p))
    }

    /// Unnormalized conditional block (see [`condition_on`](Self::condition_on)).
    pub fn project_on(&self, modes: &[Mode], v: &[C<T>]) -> Result<(Self, T)> {
        let positions = self.positions_of(modes)?;
        self.project_subsystem(&positions, v)
    }

    pub fn positions_of(&self, modes: &[Mode]) -> Result<Vec<usize>> {
        modes.iter().map(|m| self.labels.iter().position(|l| l.mode == *m).ok_or(Error::ModeOccupancy(*m))).collect()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::from_raw(self.labels.clone(), self.data.iter().map(|a| *a * c(s)).collect())
    }

    /// Element-wise sum. Both operands must share labels.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.labels != other.labels {
            return Err(Error::IncompatibleStates);
        }
        Ok(Self::from_raw(self.labels.clone(), self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.labels != other.labels {
            return Err(Error::IncompatibleStates);
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max))
    }

    /// Correlation `Σ (−1)^(#orthogonal outcomes) p` for linear analyzers at `angles`.
    pub fn correlation(&self, angles: &[T]) -> Result<T> {
        let n = self.labels.len();
        if angles.len() != n {
            return Err(Error::PhotonCount { expected: n, got: angles.len() });
        }
        let mut e = T::zero();
        for outcome in 0..(1usize << n) {
            let settings: Vec<T> = (0..n)
                .map(|i| if (outcome >> (n - 1 - i)) & 1 == 1 { angles[i] + T::lit(90.0) } else { angles[i] })
                .collect();
            let p = self.product_probability(&settings)?;
            if outcome.count_ones() % 2 == 0 {
                e = e + p;
            } else {
                e = e - p;
            }
        }
        Ok(e)
    }
}

/// Kronecker product of real single-photon vectors.
pub(crate) fn product_vector<T: Real>(vecs: &[[T; 2]]) -> Vec<C<T>> {
    let mut out = vec![c(T::one())];
    for v in vecs {
        let mut next = Vec::with_capacity(out.len() * 2);
        for a in &out {
            next.push(*a * c(v[0]));
            next.push(*a * c(v[1]));
        }
        out = next;
    }
    out
}

/// Convex combination `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`.
pub fn mix<T: Real>(components: &[(T, PureState<T>)]) -> Result<DensityMatrix<T>> {
    let first = components.first().ok_or(Error::EmptyMixture)?;
    let labels = first.1.labels()?;
    let mut total = T::zero();
    for (w, s) in components {
        if *w < T::zero() {
            return Err(Error::NegativeWeight(w.to_f64_lossy()));
        }
        if s.labels()? != labels {
            return Err(Error::IncompatibleStates);
        }
        total = total + *w;
    }
    if (total - T::one()).abs() > T::invariant_tol() {
        return Err(Error::WeightSum(total.to_f64_lossy()));
    }
    let dim = 1 << labels.len();
    let mut data = vec![C::zero(); dim * dim];
    for (w, s) in components {
        let p = DensityMatrix::from_pure(s)?;
        for (d, x) in data.iter_mut().zip(&p.data) {
            *d = *d + *x * c(*w);
        }
    }
    Ok(DensityMatrix::from_raw(labels, data))
}

/// `⟨target|ρ|target⟩`
pub fn fidelity<T: Real>(rho: &DensityMatrix<T>, target: &PureState<T>) -> Result<T> {
    rho.expectation(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::Pol;
    use crate::states::{bell_state, BellKind};

    fn phi(kind: BellKind) -> PureState<f64> {
        bell_state(kind, 1, 2).unwrap()
    }

    #[test]
    fn pure_projector_has_unit_purity_and_fidelity() {
        let rho = mix(&[(1.0, phi(BellKind::PhiPlus))]).unwrap();
        rho.validate().unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!((fidelity(&rho, &phi(BellKind::PhiPlus)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mix_errors() {
        let s = phi(BellKind::PhiPlus);
        assert_eq!(mix(&[(-0.1, s.clone()), (1.1, s.clone())]), Err(Error::NegativeWeight(-0.1)));
        assert!(matches!(mix(&[(0.5, s.clone())]), Err(Error::WeightSum(_))));
        assert_eq!(mix::<f64>(&[]), Err(Error::EmptyMixture));
        let other = bell_state(BellKind::PhiPlus, 3, 4).unwrap();
        assert_eq!(mix(&[(0.5, s), (0.5, other)]), Err(Error::IncompatibleStates));
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let rho = mix(&[(1.0, phi(BellKind::PhiPlus))]).unwrap();
        let single = PureState::product(&[(PhotonLabel::new(1, Mode::new(1)), Pol::H)]).unwrap();
        assert_eq!(fidelity(&rho, &single), Err(Error::DimensionMismatch(2, 4)));
    }

    #[test]
    fn min_eigenvalue_of_mixture() {
        let rho = mix(&[(0.7, phi(BellKind::PhiPlus)), (0.3, phi(BellKind::PsiMinus))]).unwrap();
        assert!(rho.min_eigenvalue().abs() < 1e-12);
        rho.validate().unwrap();
    }

    #[test]
    fn fidelity_uses_targets_basis() {
        let rho = mix(&[(1.0, phi(BellKind::PhiPlus))]).unwrap();
        let rotated = phi(BellKind::PhiPlus).change_basis(1, 45.0).unwrap();
        assert!((fidelity(&rho, &rotated).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_plus_correlations() {
        let rho = mix(&[(1.0, phi(BellKind::PhiPlus))]).unwrap();
        for (a, b) in [(0.0, 0.0), (45.0, 45.0), (0.0, 22.5), (10.0, 70.0)] {
            let e = rho.correlation(&[a, b]).unwrap();
            let want = (2.0 * (a - b)).to_radians().cos();
            assert!((e - want).abs() < 1e-12, "{a} {b}: {e} vs {want}");
        }
    }

    #[test]
    fn conditioning_on_one_photon() {
        let rho = mix(&[(1.0, phi(BellKind::PhiPlus))]).unwrap();
        let (r, p) = rho.condition_on(&[Mode::new(1)], &[c(1.0), c(0.0)]).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(r.labels(), &[PhotonLabel::new(2, Mode::new(2))]);
        assert!((r.get(0, 0) - c(1.0)).norm() < 1e-15);
    }
}
