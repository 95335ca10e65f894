//! Dense complex matrices, the cyclic Jacobi Hermitian eigensolver and the
//! norms built on top of it.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{re, tol, Cx, Real};

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Cx::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from row-major entries. Fails when the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[T]) -> Result<Self> {
        Self::from_vec(rows, cols, entries.iter().map(|&x| re(x)).collect())
    }

    pub fn diag_real(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    /// Column vector from amplitudes.
    pub fn column(amps: &[Cx<T>]) -> Self {
        Self {
            rows: amps.len(),
            cols: 1,
            data: amps.to_vec(),
        }
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Cx<T>], b: &[Cx<T>]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<Cx<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            rhs.shape()
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r2, c2) = rhs.shape();
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * rhs[(i % r2, j % c2)]
        })
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius norm of `M − M†`.
    pub fn hermitian_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut acc = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * half
        })
    }

    /// `⟨a|M|b⟩` for amplitude vectors.
    pub fn sandwich(&self, a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
        let mut acc = Cx::zero();
        for i in 0..self.rows {
            let mut row = Cx::zero();
            for j in 0..self.cols {
                row += self[(i, j)] * b[j];
            }
            acc += a[i].conj() * row;
        }
        acc
    }

    pub fn apply_vec(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Copy of a rectangular block.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Operator-norm distance, convenient for tests and equality predicates.
    pub fn distance(&self, other: &Self) -> Result<T> {
        operator_norm(&(self - other))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Cx<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> AddAssign<&Matrix<T>> for Matrix<T> {
    fn add_assign(&mut self, rhs: &Matrix<T>) {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianEig<T> {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, matching `eigenvalues`.
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> HermitianEig<T> {
    /// `V · diag(λ) · V†`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let v = &self.eigenvectors;
        let n = v.rows();
        Matrix::from_fn(n, n, |i, j| {
            (0..self.eigenvalues.len())
                .map(|k| v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
                .sum()
        })
    }

    pub fn vector(&self, k: usize) -> Vec<Cx<T>> {
        self.eigenvectors.col(k)
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Inputs within the Hermiticity tolerance are symmetrized first. The output
/// is a pure function of the input bits.
pub fn hermitian_eig<T: Real>(m: &Matrix<T>) -> Result<HermitianEig<T>> {
    let t = tol::<T>();
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::Computation("hermitian_eig input"));
    }
    let norm = m.frobenius_norm();
    let defect = m.hermitian_defect();
    if defect > t.hermitian * (T::one() + norm) {
        return Err(Error::NonHermitian {
            defect: defect.as_f64(),
        });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = T::zero();
    }
    let mut v = Matrix::<T>::identity(n);
    let threshold = t.eig_convergence * norm;

    let off_mass = |a: &Matrix<T>| -> T {
        let mut acc = T::zero();
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    acc += a[(p, q)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = false;
    for _ in 0..t.eig_max_sweeps {
        if off_mass(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_mass(&a);
        if off > threshold {
            return Err(Error::NoConvergence {
                sweeps: t.eig_max_sweeps,
                off: off.as_f64(),
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (r + r);
    let mut tan = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
    if theta < T::zero() {
        tan = -tan;
    }
    let c = T::one() / (tan * tan + T::one()).sqrt();
    let s = tan * c;
    let conj_phase = phase.conj();
    let n = a.rows();

    // A ← A·U with U = D·R, D_qq = e^{-iφ}.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - conj_phase * akq * s;
        a[(k, q)] = akp * s + conj_phase * akq * c;
    }
    // A ← U†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - phase * aqk * s;
        a[(q, k)] = apk * s + phase * aqk * c;
    }
    a[(p, p)] = re(app - tan * r);
    a[(q, q)] = re(aqq + tan * r);
    a[(p, q)] = Cx::zero();
    a[(q, p)] = Cx::zero();

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - conj_phase * vkq * s;
        v[(k, q)] = vkp * s + conj_phase * vkq * c;
    }
}

/// Largest singular value.
pub fn operator_norm<T: Real>(m: &Matrix<T>) -> Result<T> {
    if m.data().iter().all(|z| z.is_zero()) {
        return Ok(T::zero());
    }
    let gram = if m.rows() < m.cols() {
        m * &m.adjoint()
    } else {
        &m.adjoint() * m
    };
    let eig = hermitian_eig(&gram)?;
    let top = eig.eigenvalues[0].max(T::zero()).sqrt();
    if !top.is_finite() {
        return Err(Error::Computation("operator_norm"));
    }
    Ok(top)
}

/// Sum of singular values of a square matrix.
///
/// Hermitian inputs take the eigenvalue route `Σ|λ|`, which keeps small
/// singular values accurate; everything else goes through `M†M`.
pub fn trace_norm<T: Real>(m: &Matrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "trace norm of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.frobenius_norm();
    if scale.is_zero() {
        return Ok(T::zero());
    }
    if m.hermitian_defect() <= tol::<T>().hermitian * scale {
        return hermitian_trace_norm(m);
    }
    let eig = hermitian_eig(&(&m.adjoint() * m))?;
    let total: T = eig
        .eigenvalues
        .iter()
        .map(|&l| l.max(T::zero()).sqrt())
        .sum();
    if !total.is_finite() {
        return Err(Error::Computation("trace_norm"));
    }
    Ok(total)
}

/// `Σ|λ|` for a Hermitian matrix.
pub fn hermitian_trace_norm<T: Real>(m: &Matrix<T>) -> Result<T> {
    Ok(hermitian_eig(m)?.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Returns `f(M)` for Hermitian `M` via its spectral decomposition.
pub fn hermitian_fn<T: Real>(m: &Matrix<T>, f: impl Fn(T) -> T) -> Result<Matrix<T>> {
    let mut eig = hermitian_eig(m)?;
    for l in eig.eigenvalues.iter_mut() {
        *l = f(*l);
    }
    Ok(eig.reconstruct())
}
