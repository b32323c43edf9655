//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
///
/// Tolerances scale with the precision of the type, so the same checks run
/// for both widths.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for state and density-matrix invariants (norm, trace, hermiticity).
    fn invariant_tol() -> Self;
    /// Tolerance for exact-algebra identities.
    fn exact_tol() -> Self;
    /// Amplitudes with modulus below this are dropped from sparse states.
    fn prune_tol() -> Self;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn invariant_tol() -> Self {
        1e-9
    }
    fn exact_tol() -> Self {
        1e-12
    }
    fn prune_tol() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn invariant_tol() -> Self {
        1e-5
    }
    fn exact_tol() -> Self {
        1e-5
    }
    fn prune_tol() -> Self {
        1e-6
    }
}

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `1/√2`
#[inline]
pub fn inv_sqrt2<T: Real>() -> T {
    T::FRAC_1_SQRT_2()
}

/// Reduces a linear-polarization angle (degrees) to its representative in (-90, 90].
///
/// Linear polarizations are lines, so `θ` and `θ + 180°` are the same state;
/// the representative fixes the sign of the Jones vector. With it the
/// partner of `+45°` is `-45°` = (H - V)/√2 and the partner of `0°` is `V`.
pub fn representative_angle<T: Real>(deg: T) -> T {
    let half_turn = T::lit(180.0);
    let mut a = deg % half_turn;
    if a <= T::lit(-90.0) {
        a = a + half_turn;
    }
    if a > T::lit(90.0) {
        a = a - half_turn;
    }
    a
}

/// Jones vector `(⟨H|θ⟩, ⟨V|θ⟩)` of the linear polarization at `deg`.
pub fn jones<T: Real>(deg: T) -> [T; 2] {
    let a = representative_angle(deg).to_radians();
    [a.cos(), a.sin()]
}

/// The two basis vectors `{|θ⟩, |θ+90°⟩}` of the analysis basis at `deg`.
pub fn basis_vectors<T: Real>(deg: T) -> [[T; 2]; 2] {
    [jones(deg), jones(deg + T::lit(90.0))]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minus_45_is_h_minus_v() {
        let [plus, minus] = basis_vectors(45.0_f64);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((plus[0] - s).abs() < 1e-15 && (plus[1] - s).abs() < 1e-15);
        assert!((minus[0] - s).abs() < 1e-15 && (minus[1] + s).abs() < 1e-15);
    }

    #[test]
    fn hv_basis_has_positive_v() {
        let [h, v] = basis_vectors(0.0_f32);
        assert_eq!(h, [1.0, 0.0]);
        assert!(v[0].abs() < 1e-7 && (v[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn representative_wraps() {
        assert_eq!(representative_angle(135.0_f64), -45.0);
        assert_eq!(representative_angle(90.0_f64), 90.0);
        assert_eq!(representative_angle(-90.0_f64), 90.0);
        assert_eq!(representative_angle(180.0_f64), 0.0);
    }
}
