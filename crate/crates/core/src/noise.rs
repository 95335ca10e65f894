//! Noise-model constructors on qubits and truncated Fock spaces.
//!
//! Bosonic operators are defined directly on `span{|0⟩, …, |cutoff⟩}` from
//! their action on number states, so every channel here is exactly trace
//! preserving on the truncated space.

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{check_unit_interval, Result};
use crate::numerics::Matrix;
use crate::scalar::{re, Real};

/// Fock-space truncation: occupation numbers `0..=cutoff` per mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockTruncation {
    pub cutoff: usize,
    pub modes: usize,
}

impl FockTruncation {
    pub fn single(cutoff: usize) -> Self {
        Self { cutoff, modes: 1 }
    }

    pub fn mode_dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn total_dim(&self) -> usize {
        self.mode_dim().pow(self.modes as u32)
    }
}

/// Damping / transmission parameters, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub gamma: f64,
    pub eta: f64,
}

impl NoiseParams {
    pub fn new(gamma: f64, eta: f64) -> Result<Self> {
        check_unit_interval("gamma", gamma)?;
        check_unit_interval("eta", eta)?;
        Ok(Self { gamma, eta })
    }
}

/// Binomial coefficient by multiplicative recurrence.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_count(n - i) / T::from_count(i + 1);
    }
    acc
}

/// Qubit amplitude damping, Kraus pair `A₀ = diag(1, √(1−γ))`, `A₁ = √γ |0⟩⟨1|`.
pub fn amplitude_damping<T: Real>(gamma: T) -> Result<Channel<T>> {
    check_unit_interval("gamma", gamma.as_f64())?;
    let a0 = Matrix::diag_real(&[T::one(), (T::one() - gamma).sqrt()]);
    let mut a1 = Matrix::zeros(2, 2);
    a1[(0, 1)] = re(gamma.sqrt());
    Channel::new(vec![a0, a1])
}

/// Single-mode loss Kraus operators `K_l|m⟩ = √(C(m,l) p^l (1−p)^{m−l}) |m−l⟩`
/// with loss probability `p`, for `l = 0..=cutoff`.
fn loss_kraus<T: Real>(loss: T, cutoff: usize) -> Vec<Matrix<T>> {
    let keep = T::one() - loss;
    let d = cutoff + 1;
    (0..d)
        .map(|l| {
            let mut k = Matrix::zeros(d, d);
            for m in l..d {
                let w = binomial::<T>(m, l) * loss.powi(l as i32) * keep.powi((m - l) as i32);
                k[(m - l, m)] = re(w.sqrt());
            }
            k
        })
        .collect()
}

/// Bosonic amplitude damping `B_k = Σ_{j≥k} √C(j,k) √((1−γ)^{j−k} γ^k) |j−k⟩⟨j|`.
pub fn bosonic_ad_kraus<T: Real>(gamma: T, trunc: FockTruncation) -> Result<Channel<T>> {
    check_unit_interval("gamma", gamma.as_f64())?;
    single_mode(trunc)?;
    Channel::new(loss_kraus(gamma, trunc.cutoff))
}

/// Pure-loss channel `A_l = √((1−η)^l / l!) √η^{a†a} aˡ` with transmission `η`.
pub fn pure_loss_kraus<T: Real>(eta: T, trunc: FockTruncation) -> Result<Channel<T>> {
    check_unit_interval("eta", eta.as_f64())?;
    single_mode(trunc)?;
    Channel::new(loss_kraus(T::one() - eta, trunc.cutoff))
}

/// Two-mode (or more) product of a single-mode channel.
pub fn product_channel<T: Real>(single: &Channel<T>, modes: usize) -> Channel<T> {
    let mut acc = single.clone();
    for _ in 1..modes {
        acc = acc.tensor(single);
    }
    acc
}

/// Annihilation operator `a|m⟩ = √m |m−1⟩` on the truncated space.
pub fn annihilation<T: Real>(trunc: FockTruncation) -> Matrix<T> {
    let d = trunc.mode_dim();
    let mut a = Matrix::zeros(d, d);
    for m in 1..d {
        a[(m - 1, m)] = re(T::from_count(m).sqrt());
    }
    a
}

fn single_mode(trunc: FockTruncation) -> Result<()> {
    if trunc.modes != 1 {
        return Err(crate::Error::ShapeMismatch(format!(
            "single-mode constructor called with {} modes",
            trunc.modes
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::DensityOperator;
    use crate::numerics::Matrix;
    use crate::transfer::transfer_matrix;

    #[test]
    fn ad_endpoints() {
        assert!(amplitude_damping(0.0f64)
            .unwrap()
            .equals(&Channel::identity(2))
            .unwrap());
        let full = amplitude_damping(1.0f64).unwrap();
        for i in 0..2 {
            let out = full.apply(&DensityOperator::basis(2, i)).unwrap();
            assert!((out.matrix() - &Matrix::diag_real(&[1.0, 0.0])).max_abs() < 1e-15);
        }
        assert!(amplitude_damping(1.5f64).is_err());
    }

    #[test]
    fn ad_transfer_matrix_at_036() {
        let t = transfer_matrix(&amplitude_damping(0.36f64).unwrap()).unwrap();
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.8, 0.0, 0.0],
            [0.0, 0.0, 0.8, 0.0],
            [0.36, 0.0, 0.0, 0.64],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((t.get(i, j) - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bosonic_examples() {
        let tr = FockTruncation::single(4);
        let id = bosonic_ad_kraus(0.0f64, tr).unwrap();
        assert!(id.equals(&Channel::identity(5)).unwrap());
        assert!(id.kraus()[1..].iter().all(|k| k.max_abs() == 0.0));

        let g = 0.1f64;
        let b = bosonic_ad_kraus(g, tr).unwrap();
        let b0 = &b.kraus()[0];
        for j in 0..5 {
            assert!((b0[(j, j)].re - (1.0 - g).powf(j as f64 / 2.0)).abs() < 1e-15);
        }
        let b1 = &b.kraus()[1];
        let b1tb1 = &b1.adjoint() * b1;
        for m in 0..5 {
            let expected = m as f64 * g * (1.0 - g).powi(m as i32 - 1);
            let expected = if m == 0 { 0.0 } else { expected };
            assert!((b1tb1[(m, m)].re - expected).abs() < 1e-15);
        }
        assert!((b1tb1[(4, 4)].re - 0.2916).abs() < 1e-12);
    }

    #[test]
    fn bosonic_cutoff_one_is_qubit_ad() {
        for &g in &[0.0, 0.13, 0.5, 0.9, 1.0] {
            let b = bosonic_ad_kraus(g, FockTruncation::single(1)).unwrap();
            let a = amplitude_damping(g).unwrap();
            for (kb, ka) in b.kraus().iter().zip(a.kraus()) {
                assert!((kb - ka).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_loss_examples() {
        let id = pure_loss_kraus(1.0f64, FockTruncation::single(4)).unwrap();
        assert!(id.equals(&Channel::identity(5)).unwrap());

        let lossy = pure_loss_kraus(0.0f64, FockTruncation::single(2)).unwrap();
        for m in 0..3 {
            let out = lossy.apply(&DensityOperator::basis(3, m)).unwrap();
            assert!((out.matrix() - &Matrix::diag_real(&[1.0, 0.0, 0.0])).max_abs() < 1e-15);
        }

        let c = pure_loss_kraus(0.9f64, FockTruncation::single(4)).unwrap();
        let mut tail = Matrix::zeros(5, 5);
        for k in &c.kraus()[1..] {
            tail += &(&k.adjoint() * k);
        }
        assert!((tail[(4, 4)].re - (1.0 - 0.9f64.powi(4))).abs() < 1e-12);
        assert!((tail[(4, 4)].re - 0.3439).abs() < 1e-12);
    }

    #[test]
    fn completeness_exact_on_truncation() {
        for cutoff in 0..=8 {
            for &p in &[0.0, 0.05, 0.3, 0.5, 0.77, 1.0] {
                let tr = FockTruncation::single(cutoff);
                let b = bosonic_ad_kraus(p, tr).unwrap();
                let l = pure_loss_kraus(p, tr).unwrap();
                assert!(b.validate().unwrap().defect <= 1e-12);
                assert!(l.validate().unwrap().defect <= 1e-12);
                for k in b.kraus().iter().chain(l.kraus()) {
                    assert!(k.data().iter().all(|z| z.im == 0.0 && z.re >= 0.0));
                }
            }
        }
    }

    #[test]
    fn annihilation_examples() {
        let a = annihilation::<f64>(FockTruncation::single(1));
        let mut expected = Matrix::zeros(2, 2);
        expected[(0, 1)] = re(1.0);
        assert_eq!(a, expected);

        let a = annihilation::<f64>(FockTruncation::single(4));
        let n = &a.adjoint() * &a;
        assert!((&n - &Matrix::diag_real(&[0.0, 1.0, 2.0, 3.0, 4.0])).max_abs() < 1e-14);

        // [a, a†] = I except on the cutoff state, where it is −cutoff.
        let comm = &(&a * &a.adjoint()) - &n;
        for m in 0..4 {
            assert!((comm[(m, m)].re - 1.0).abs() < 1e-14);
        }
        assert!((comm[(4, 4)].re + 4.0).abs() < 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(8, 4), 70.0);
        assert_eq!(binomial::<f64>(5, 0), 1.0);
        assert_eq!(binomial::<f64>(3, 5), 0.0);
    }
}
