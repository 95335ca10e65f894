//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All matrix, channel and bound code is written against [`Real`], which is
//! implemented for `f32` and `f64`. Each scalar type carries its own
//! [`Tolerances`] record so that thresholds stay meaningful at the
//! precision in use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar usable throughout the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Convert a count into this scalar.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Lossy conversion to `f64`, used by reporting code.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// The default tolerance record for this precision.
    fn tolerances() -> Tolerances<Self>;
}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

/// Every numeric threshold used by the library.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Relative Hermiticity tolerance accepted by the eigensolver.
    pub hermitian: T,
    /// Jacobi stops when off-diagonal Frobenius mass drops below this times `‖M‖_F`.
    pub eig_convergence: T,
    /// Sweep cap for the Jacobi eigensolver.
    pub eig_max_sweeps: usize,
    /// Completeness defect allowed for a valid channel.
    pub completeness: T,
    /// Hermiticity / trace tolerance for density operators.
    pub state: T,
    /// Lowest eigenvalue still accepted as positive semidefinite.
    pub psd_floor: T,
    /// Choi eigenvalues below this are dropped when pruning Kraus sets.
    pub kraus_prune: T,
    /// Channels are equal when their Choi matrices differ by at most this (operator norm).
    pub channel_equality: T,
    /// Pure-state amplitude lists within this of unit norm are renormalized.
    pub pure_state_norm: T,
    /// Orthonormality tolerance for code words.
    pub orthonormal: T,
    /// Knill-Laflamme violation threshold.
    pub knill_laflamme: T,
    /// Off-pattern residual accepted by T-matrix canonicalization.
    pub canonical: T,
    /// Distance from 1 below which an eigenvalue counts as unit.
    pub unit_eigenvalue: T,
    /// Slack for the T-matrix first-row and entry-range invariants.
    pub transfer: T,
}

impl Real for f64 {
    fn tolerances() -> Tolerances<f64> {
        Tolerances {
            hermitian: 1e-10,
            eig_convergence: 1e-14,
            eig_max_sweeps: 100,
            completeness: 1e-9,
            state: 1e-10,
            psd_floor: -1e-9,
            kraus_prune: 1e-12,
            channel_equality: 1e-9,
            pure_state_norm: 1e-8,
            orthonormal: 1e-10,
            knill_laflamme: 1e-9,
            canonical: 1e-9,
            unit_eigenvalue: 1e-12,
            transfer: 1e-10,
        }
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances<f32> {
        Tolerances {
            hermitian: 1e-5,
            eig_convergence: 1e-6,
            eig_max_sweeps: 100,
            completeness: 1e-4,
            state: 1e-5,
            psd_floor: -1e-4,
            kraus_prune: 1e-6,
            channel_equality: 1e-4,
            pure_state_norm: 1e-4,
            orthonormal: 1e-5,
            knill_laflamme: 1e-4,
            canonical: 1e-4,
            unit_eigenvalue: 1e-6,
            transfer: 1e-5,
        }
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        T::tolerances()
    }
}

/// Shorthand for `T::tolerances()`.
#[inline]
pub fn tol<T: Real>() -> Tolerances<T> {
    T::tolerances()
}

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}
