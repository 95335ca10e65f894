//! Pauli transfer matrices of qubit channels, their canonical form, the
//! limit channel and the convergence-radius quantities built from them.
//!
//! Note on the limit channel: the rank-one matrix produced by
//! [`limit_transfer`] (first column `(1, tᵢ/(1−λᵢ))`, all other columns
//! zero) is the constant map onto the fixed point. Copying a unit entry into
//! the bottom-right corner would break idempotence and the absorbing
//! property, both of which are checked here numerically.

use std::ops::{Mul, Sub};

use serde::Serialize;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, operator_norm, Matrix};
use crate::scalar::{tol, Real};

/// Real 4×4 matrix in the Pauli basis order `I, X, Y, Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferMatrix<T> {
    entries: [[T; 4]; 4],
}

impl<T: Real> TransferMatrix<T> {
    /// Validated construction: first row `(1,0,0,0)` and entries in `[−1, 1]`.
    pub fn new(entries: [[T; 4]; 4]) -> Result<Self> {
        let slack = tol::<T>().transfer;
        let row_ok = (entries[0][0] - T::one()).abs() <= slack
            && (1..4).all(|j| entries[0][j].abs() <= slack);
        if !row_ok {
            return Err(Error::InvalidChannel {
                defect: (entries[0][0] - T::one()).abs().as_f64(),
            });
        }
        for row in &entries {
            for &x in row {
                if !(x.abs() <= T::one() + slack) {
                    return Err(Error::OutOfRange {
                        name: "transfer matrix entry",
                        value: x.as_f64(),
                        expected: "[-1, 1]",
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    /// Construction without invariant checks (intermediate products).
    pub fn from_entries(entries: [[T; 4]; 4]) -> Self {
        Self { entries }
    }

    pub fn identity() -> Self {
        let mut e = [[T::zero(); 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = T::one();
        }
        Self { entries: e }
    }

    pub fn zero() -> Self {
        Self {
            entries: [[T::zero(); 4]; 4],
        }
    }

    /// Canonical shape: first column `(1, t)`, diagonal `(1, λ)`.
    pub fn canonical_shape(t: [T; 3], lambda: [T; 3]) -> Self {
        let mut e = [[T::zero(); 4]; 4];
        e[0][0] = T::one();
        for i in 0..3 {
            e[i + 1][0] = t[i];
            e[i + 1][i + 1] = lambda[i];
        }
        Self { entries: e }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i][j]
    }

    pub fn entries(&self) -> &[[T; 4]; 4] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut e = [[T::zero(); 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.entries[j][i];
            }
        }
        Self { entries: e }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::identity();
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        m
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        let flat: Vec<T> = self.entries.iter().flatten().copied().collect();
        Matrix::from_real(4, 4, &flat).expect("4x4")
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<T> {
        operator_norm(&self.to_matrix())
    }

    /// The 3×3 Bloch block.
    pub fn bloch_block(&self) -> [[T; 3]; 3] {
        let mut b = [[T::zero(); 3]; 3];
        for (i, row) in b.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.entries[i + 1][j + 1];
            }
        }
        b
    }

    /// The Bloch shift column `(t₁, t₂, t₃)`.
    pub fn shift(&self) -> [T; 3] {
        [self.entries[1][0], self.entries[2][0], self.entries[3][0]]
    }
}

impl<T: Real> Mul for TransferMatrix<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut e = [[T::zero(); 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum();
            }
        }
        Self { entries: e }
    }
}

impl<T: Real> Sub for TransferMatrix<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut e = self.entries;
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x -= rhs.entries[i][j];
            }
        }
        Self { entries: e }
    }
}

/// Pauli matrices `I, X, Y, Z`.
pub fn paulis<T: Real>() -> [Matrix<T>; 4] {
    use crate::scalar::cx;
    let (o, l) = (T::zero(), T::one());
    [
        Matrix::identity(2),
        Matrix::from_real(2, 2, &[o, l, l, o]).expect("2x2"),
        Matrix::from_vec(2, 2, vec![cx(o, o), cx(o, -l), cx(o, l), cx(o, o)]).expect("2x2"),
        Matrix::from_real(2, 2, &[l, o, o, -l]).expect("2x2"),
    ]
}

/// `t_mn = ½ Tr(P_m Φ(P_n))`.
pub fn transfer_matrix<T: Real>(c: &Channel<T>) -> Result<TransferMatrix<T>> {
    if c.dim_in() != 2 || c.dim_out() != 2 {
        return Err(Error::NotQubit {
            dim_in: c.dim_in(),
            dim_out: c.dim_out(),
        });
    }
    let p = paulis::<T>();
    let half = T::lit(0.5);
    let mut e = [[T::zero(); 4]; 4];
    for n in 0..4 {
        let img = c.apply_matrix(&p[n])?;
        for m in 0..4 {
            e[m][n] = (&p[m] * &img).trace().re * half;
        }
    }
    TransferMatrix::new(e)
}

/// Canonical form of a T-matrix under a Bloch rotation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalTransfer<T> {
    pub t: [T; 3],
    pub lambda: [T; 3],
    /// `(Qᵀ, Q)` with `Q = diag(1, R)`, `R ∈ SO(3)`: canonical `= Qᵀ · T · Q`.
    pub rotations: (TransferMatrix<T>, TransferMatrix<T>),
    /// Off-pattern mass left after conjugation.
    pub residual: T,
}

impl<T: Real> CanonicalTransfer<T> {
    pub fn matrix(&self) -> TransferMatrix<T> {
        TransferMatrix::canonical_shape(self.t, self.lambda)
    }

    /// Map a canonical-frame matrix back to the original frame.
    pub fn to_original(&self, m: &TransferMatrix<T>) -> TransferMatrix<T> {
        self.rotations.1 * *m * self.rotations.0
    }
}

/// Bring `T` to the canonical shape by a special-orthogonal Bloch rotation.
///
/// The rotation comes from the spectral decomposition of the (symmetric)
/// Bloch block, which is its real SVD with signed singular values; it is a
/// genuine similarity, so the spectrum is preserved. Singular values are
/// sorted descending, degenerate clusters are aligned with the identity,
/// and column signs are chosen to make `det R = +1` while keeping the shift
/// column nonnegative where possible. Non-symmetric Bloch blocks leave an
/// off-diagonal residual and are rejected.
pub fn canonicalize<T: Real>(tm: &TransferMatrix<T>) -> Result<CanonicalTransfer<T>> {
    let tolr = tol::<T>();
    let block = tm.bloch_block();
    let sym = Matrix::from_fn(3, 3, |i, j| {
        crate::scalar::re((block[i][j] + block[j][i]) * T::lit(0.5))
    });
    let eig = hermitian_eig(&sym)?;
    let mut rot = [[T::zero(); 3]; 3];
    for (i, row) in rot.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = eig.eigenvectors[(i, j)].re;
        }
    }

    // Align degenerate eigenvalue clusters with the identity (orthogonal Procrustes).
    let vals = &eig.eigenvalues;
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && (vals[start] - vals[end]).abs() <= tolr.canonical {
            end += 1;
        }
        if end - start >= 2 {
            align_cluster(&mut rot, start, end);
        }
        start = end;
    }

    // Sign fixing: det(R) = +1, shift column nonnegative where possible.
    let t = tm.shift();
    let shift_of = |rot: &[[T; 3]; 3], k: usize| -> T { (0..3).map(|i| rot[i][k] * t[i]).sum() };
    let mut flips = [false; 3];
    let mut neg: Vec<usize> = (0..3).filter(|&k| shift_of(&rot, k) < -tolr.canonical).collect();
    let zero: Vec<usize> = (0..3)
        .filter(|&k| shift_of(&rot, k).abs() <= tolr.canonical)
        .collect();
    let det_negative = det3(&rot) < T::zero();
    let want_odd = det_negative;
    if (neg.len() % 2 == 1) != want_odd {
        if let Some(&z) = zero.last() {
            neg.push(z);
        } else {
            // drop the smallest-magnitude negative, or flip the smallest positive
            let mut order: Vec<usize> = (0..3).collect();
            order.sort_by(|&a, &b| {
                shift_of(&rot, a)
                    .abs()
                    .partial_cmp(&shift_of(&rot, b).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let k = order[0];
            if let Some(pos) = neg.iter().position(|&n| n == k) {
                neg.remove(pos);
            } else {
                neg.push(k);
            }
        }
    }
    for k in neg {
        flips[k] = true;
    }
    for (k, &f) in flips.iter().enumerate() {
        if f {
            for row in rot.iter_mut() {
                row[k] = -row[k];
            }
        }
    }

    let mut q = TransferMatrix::identity();
    for i in 0..3 {
        for j in 0..3 {
            q.entries[i + 1][j + 1] = rot[i][j];
        }
    }
    let qt = q.transpose();
    let conj = qt * *tm * q;

    let mut residual = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            let on_pattern = i == j || j == 0;
            let x = if i == 0 && j == 0 {
                conj.entries[0][0] - T::one()
            } else if on_pattern && i > 0 {
                T::zero()
            } else {
                conj.entries[i][j]
            };
            residual += x * x;
        }
    }
    let residual = residual.sqrt();
    if !(residual <= tolr.canonical) {
        return Err(Error::NotCanonicalizable {
            residual: residual.as_f64(),
        });
    }
    let t = [conj.entries[1][0], conj.entries[2][0], conj.entries[3][0]];
    let lambda = [conj.entries[1][1], conj.entries[2][2], conj.entries[3][3]];
    Ok(CanonicalTransfer {
        t,
        lambda,
        rotations: (qt, q),
        residual,
    })
}

fn det3<T: Real>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Rotate columns `start..end` of `rot` within their span so they are as
/// close as possible to the matching identity columns.
fn align_cluster<T: Real>(rot: &mut [[T; 3]; 3], start: usize, end: usize) {
    let k = end - start;
    // A = Wᵀ E, E = identity columns start..end; Q = A (AᵀA)^{-1/2}.
    let a = Matrix::from_fn(k, k, |i, j| crate::scalar::re(rot[start + j][start + i]));
    let ata = &a.adjoint() * &a;
    let eig = match hermitian_eig(&ata) {
        Ok(e) => e,
        Err(_) => return,
    };
    let floor = T::lit(1e-6);
    if eig.eigenvalues.iter().any(|&l| l < floor) {
        return;
    }
    let mut inv_sqrt = eig.clone();
    for l in inv_sqrt.eigenvalues.iter_mut() {
        *l = T::one() / l.sqrt();
    }
    let q = &a * &inv_sqrt.reconstruct();
    let mut new_cols = [[T::zero(); 3]; 3];
    for r in 0..3 {
        for j in 0..k {
            new_cols[r][j] = (0..k).map(|i| rot[r][start + i] * q[(i, j)].re).sum();
        }
    }
    for r in 0..3 {
        for j in 0..k {
            rot[r][start + j] = new_cols[r][j];
        }
    }
}

fn check_not_unit<T: Real>(lambda: &[T; 3]) -> Result<()> {
    let cut = T::one() - tol::<T>().unit_eigenvalue;
    for &l in lambda {
        if l.abs() >= cut {
            return Err(Error::UnitEigenvalue { value: l.as_f64() });
        }
    }
    Ok(())
}

/// Rank-one limit transfer matrix in the canonical frame.
pub fn limit_transfer<T: Real>(ct: &CanonicalTransfer<T>) -> Result<TransferMatrix<T>> {
    check_not_unit(&ct.lambda)?;
    let mut e = [[T::zero(); 4]; 4];
    e[0][0] = T::one();
    for i in 0..3 {
        e[i + 1][0] = ct.t[i] / (T::one() - ct.lambda[i]);
    }
    Ok(TransferMatrix::from_entries(e))
}

/// Limit transfer matrix mapped back to the frame of the original T-matrix.
pub fn limit_transfer_original<T: Real>(ct: &CanonicalTransfer<T>) -> Result<TransferMatrix<T>> {
    Ok(ct.to_original(&limit_transfer(ct)?))
}

/// `μ = max(0, λ₁, λ₂, λ₃)`, requiring each `λᵢ ∈ [0, 1)`.
pub fn spectral_radius_mu<T: Real>(ct: &CanonicalTransfer<T>) -> Result<T> {
    let t = tol::<T>();
    let mut mu = T::zero();
    for &l in &ct.lambda {
        if l >= T::one() - t.unit_eigenvalue && l <= T::one() + t.transfer {
            return Err(Error::UnitEigenvalue { value: l.as_f64() });
        }
        if l < -t.canonical || l >= T::one() {
            return Err(Error::OutOfRange {
                name: "lambda",
                value: l.as_f64(),
                expected: "[0, 1)",
            });
        }
        mu = mu.max(l);
    }
    Ok(mu)
}

/// `R_n = ((1 + μ)/2)ⁿ`.
pub fn radius_of_convergence<T: Real>(mu: T, n: usize) -> Result<T> {
    if !(mu >= T::zero() && mu <= T::one()) {
        return Err(Error::OutOfRange {
            name: "mu",
            value: mu.as_f64(),
            expected: "[0, 1]",
        });
    }
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            expected: "n >= 1",
        });
    }
    Ok(((T::one() + mu) * T::lit(0.5)).powi(n as i32))
}

/// Largest `n` with `n ≤ 2δ/ε`.
pub fn preservation_horizon(epsilon: f64, delta: f64) -> Result<usize> {
    for (name, v) in [("epsilon", epsilon), ("delta", delta)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                expected: "(0, 1]",
            });
        }
    }
    let ratio = 2.0 * delta / epsilon;
    // absorb representation error in ratios that are integers on paper
    Ok((ratio * (1.0 + 8.0 * f64::EPSILON)).floor() as usize)
}

/// One sample of the Gelfand trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaSample<T> {
    pub n: usize,
    /// `‖(T − T∞)ⁿ‖`.
    pub norm: T,
    /// `‖Tⁿ − T∞ⁿ‖` computed from the powers directly.
    pub direct_norm: T,
    /// `‖Δₙ‖^{1/n}`.
    pub root: T,
}

/// Gelfand sequence of `Δₙ = Tⁿ − T∞ⁿ` for `n = 1..=n_max`.
///
/// Both sides of `‖Tⁿ − T∞ⁿ‖ = ‖(T − T∞)ⁿ‖` are evaluated and compared to
/// `1e-9` relative, with an absolute floor proportional to `n·eps` for the
/// cancellation in the direct difference.
pub fn delta_norm_trace<T: Real>(tm: &TransferMatrix<T>, n_max: usize) -> Result<Vec<DeltaSample<T>>> {
    let ct = canonicalize(tm)?;
    let limit = limit_transfer_original(&ct)?;
    let delta = *tm - limit;
    let rel = T::lit(1e-9);
    let mut tn = TransferMatrix::identity();
    let mut ln = TransferMatrix::identity();
    let mut dn = TransferMatrix::identity();
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        tn = tn * *tm;
        ln = ln * limit;
        dn = dn * delta;
        let direct = (tn - ln).operator_norm()?;
        let norm = dn.operator_norm()?;
        let floor = T::epsilon() * T::lit(512.0) * T::from_count(n);
        if (direct - norm).abs() > rel * direct.max(norm) + floor {
            return Err(Error::Inconsistent(format!(
                "n = {n}: ‖Tⁿ − T∞ⁿ‖ = {direct} but ‖(T − T∞)ⁿ‖ = {norm}"
            )));
        }
        let root = norm.powf(T::one() / T::from_count(n));
        out.push(DeltaSample {
            n,
            norm,
            direct_norm: direct,
            root,
        });
    }
    Ok(out)
}

/// Spectral summary of a qubit T-matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport<T> {
    pub t: [T; 3],
    pub lambda: [T; 3],
    pub mu: T,
    /// Limit transfer matrix in the original frame.
    pub limit_transfer: TransferMatrix<T>,
    pub gelfand_trace: Vec<DeltaSample<T>>,
    /// Smallest `n₀` with `‖Δₙ‖ ≤ R_n` for every sampled `n ≥ n₀`.
    pub n0: Option<usize>,
    /// `max_n ‖Δₙ‖ / μⁿ` over the sampled range (absent when `μ = 0`).
    pub k_envelope: Option<T>,
}

impl<T: Real> SpectralReport<T> {
    pub fn radius(&self, n: usize) -> Result<T> {
        radius_of_convergence(self.mu, n)
    }
}

pub fn spectral_report<T: Real>(tm: &TransferMatrix<T>, n_max: usize) -> Result<SpectralReport<T>> {
    let ct = canonicalize(tm)?;
    let mu = spectral_radius_mu(&ct)?;
    let limit = limit_transfer_original(&ct)?;
    let trace = delta_norm_trace(tm, n_max)?;
    let mut n0 = None;
    for s in trace.iter().rev() {
        if s.norm <= radius_of_convergence(mu, s.n)? {
            n0 = Some(s.n);
        } else {
            break;
        }
    }
    let k_envelope = if mu > T::zero() {
        trace
            .iter()
            .map(|s| s.norm / mu.powi(s.n as i32))
            .fold(None, |acc: Option<T>, x| Some(acc.map_or(x, |a| a.max(x))))
    } else {
        None
    };
    Ok(SpectralReport {
        t: ct.t,
        lambda: ct.lambda,
        mu,
        limit_transfer: limit,
        gelfand_trace: trace,
        n0,
        k_envelope,
    })
}
