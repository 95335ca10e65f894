//! Kraus-operator channel algebra.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, operator_norm, Matrix};
use crate::scalar::{re, tol, Cx, Real};

/// A quantum channel given by Kraus operators, each `dim_out × dim_in`.
///
/// Completeness is checked by [`Channel::new`]; [`Channel::from_kraus`]
/// only checks shapes so that defective operator sets can still be
/// inspected with [`Channel::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T> {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Matrix<T>>,
}

/// Completeness check result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport<T> {
    pub passed: bool,
    /// `‖Σ A†A − I‖` in operator norm.
    pub defect: T,
}

impl<T: Real> Channel<T> {
    /// Shape-checked construction without the completeness requirement.
    pub fn from_kraus(kraus: Vec<Matrix<T>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty Kraus list".into()))?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::ShapeMismatch("zero-sized Kraus operator".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {dim_out}x{dim_in}",
                    k.rows(),
                    k.cols()
                )));
            }
            if !k.is_finite() {
                return Err(Error::Computation("Kraus operator"));
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    /// Construction requiring `Σ A†A = I` within tolerance.
    pub fn new(kraus: Vec<Matrix<T>>) -> Result<Self> {
        let c = Self::from_kraus(kraus)?;
        let report = c.validate()?;
        if !report.passed {
            return Err(Error::InvalidChannel {
                defect: report.defect.as_f64(),
            });
        }
        Ok(c)
    }

    /// Dimension-checked construction (`dim_in`, `dim_out` stated up front).
    pub fn with_dims(dim_in: usize, dim_out: usize, kraus: Vec<Matrix<T>>) -> Result<Self> {
        let c = Self::new(kraus)?;
        if c.dim_in != dim_in || c.dim_out != dim_out {
            return Err(Error::ShapeMismatch(format!(
                "declared {dim_in}->{dim_out}, Kraus operators are {}->{}",
                c.dim_in, c.dim_out
            )));
        }
        Ok(c)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            kraus: vec![Matrix::identity(d)],
        }
    }

    /// Single-Kraus channel `ρ ↦ UρU†`.
    pub fn unitary(u: Matrix<T>) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Completely depolarizing channel `ρ ↦ Tr(ρ) I/d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let w = T::one() / T::from_count(d).sqrt();
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for i in 0..d {
                let mut k = Matrix::zeros(d, d);
                k[(a, i)] = re(w);
                kraus.push(k);
            }
        }
        Self {
            dim_in: d,
            dim_out: d,
            kraus,
        }
    }

    /// Completely dephasing channel in the computational basis.
    pub fn completely_dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut k = Matrix::zeros(d, d);
                k[(i, i)] = Cx::one();
                k
            })
            .collect();
        Self {
            dim_in: d,
            dim_out: d,
            kraus,
        }
    }

    #[inline]
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    #[inline]
    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[Matrix<T>] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<Matrix<T>> {
        self.kraus
    }

    pub fn is_endomorphic(&self) -> bool {
        self.dim_in == self.dim_out
    }

    /// `Σ A†A`.
    pub fn completeness_sum(&self) -> Matrix<T> {
        let mut acc = Matrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc += &(&k.adjoint() * k);
        }
        acc
    }

    pub fn validate(&self) -> Result<ValidationReport<T>> {
        let defect = operator_norm(&(&self.completeness_sum() - &Matrix::identity(self.dim_in)))?;
        Ok(ValidationReport {
            passed: defect <= tol::<T>().completeness,
            defect,
        })
    }

    /// `Σ A X A†` for an arbitrary operator `X`.
    pub fn apply_matrix(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: x.rows(),
            });
        }
        let mut out = Matrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &(&(k * x) * &k.adjoint());
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        let out = self.apply_matrix(rho.matrix())?;
        Ok(DensityOperator::from_matrix_unchecked(out.hermitian_part()))
    }

    /// Unnormalized Choi matrix `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` (input leg first).
    pub fn choi(&self) -> Matrix<T> {
        let (din, dout) = (self.dim_in, self.dim_out);
        let n = din * dout;
        let mut j = Matrix::zeros(n, n);
        for k in &self.kraus {
            let v: Vec<Cx<T>> = (0..n).map(|idx| k[(idx % dout, idx / dout)]).collect();
            for r in 0..n {
                if v[r].is_zero() {
                    continue;
                }
                for c in 0..n {
                    j[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        j
    }

    /// Operator-norm distance between Choi matrices.
    pub fn choi_distance(&self, other: &Self) -> Result<T> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in * self.dim_out,
                got: other.dim_in * other.dim_out,
            });
        }
        operator_norm(&(&self.choi() - &other.choi()))
    }

    /// Channel equality as maps (Choi distance within tolerance).
    pub fn equals(&self, other: &Self) -> Result<bool> {
        Ok(self.choi_distance(other)? <= tol::<T>().channel_equality)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        compose(self, inner)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        tensor(self, other)
    }

    pub fn complementary(&self) -> Self {
        complementary(self)
    }

    pub fn power(&self, n: usize) -> Result<Self> {
        power(self, n)
    }

    /// Replace the Kraus set with a minimal one from the Choi spectrum.
    pub fn pruned(&self) -> Result<Self> {
        let kraus = kraus_from_choi(&self.choi(), self.dim_in, self.dim_out)?;
        Ok(Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus,
        })
    }
}

/// Apply `inner`, then `outer`. Product sets larger than `dim_in·dim_out`
/// are pruned through the Choi matrix.
pub fn compose<T: Real>(outer: &Channel<T>, inner: &Channel<T>) -> Result<Channel<T>> {
    if inner.dim_out != outer.dim_in {
        return Err(Error::DimensionMismatch {
            expected: outer.dim_in,
            got: inner.dim_out,
        });
    }
    let mut kraus = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
    for b in &outer.kraus {
        for a in &inner.kraus {
            kraus.push(b * a);
        }
    }
    let c = Channel {
        dim_in: inner.dim_in,
        dim_out: outer.dim_out,
        kraus,
    };
    if c.kraus.len() > c.dim_in * c.dim_out {
        c.pruned()
    } else {
        Ok(c)
    }
}

/// `n`-fold self-composition by repeated squaring; `n = 0` is the identity.
pub fn power<T: Real>(c: &Channel<T>, n: usize) -> Result<Channel<T>> {
    if !c.is_endomorphic() {
        return Err(Error::NotEndomorphic {
            dim_in: c.dim_in,
            dim_out: c.dim_out,
        });
    }
    let mut result = Channel::identity(c.dim_in);
    let mut base = c.clone();
    let mut k = n;
    let mut first = true;
    while k > 0 {
        if k & 1 == 1 {
            result = if first { base.clone() } else { compose(&base, &result)? };
            first = false;
        }
        k >>= 1;
        if k > 0 {
            base = compose(&base, &base)?;
        }
    }
    Ok(result)
}

/// Kraus set of all Kronecker products `Aᵢ ⊗ Bⱼ`.
pub fn tensor<T: Real>(a: &Channel<T>, b: &Channel<T>) -> Channel<T> {
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ka in &a.kraus {
        for kb in &b.kraus {
            kraus.push(ka.kron(kb));
        }
    }
    Channel {
        dim_in: a.dim_in * b.dim_in,
        dim_out: a.dim_out * b.dim_out,
        kraus,
    }
}

/// Environment channel: `(Φᶜ(ρ))ᵢⱼ = Tr(Aᵢ ρ Aⱼ†)`.
pub fn complementary<T: Real>(c: &Channel<T>) -> Channel<T> {
    let m = c.kraus.len();
    let kraus = (0..c.dim_out)
        .map(|b| Matrix::from_fn(m, c.dim_in, |i, k| c.kraus[i][(b, k)]))
        .collect();
    Channel {
        dim_in: c.dim_in,
        dim_out: m,
        kraus,
    }
}

/// Minimal Kraus set from an unnormalized Choi matrix, keeping eigenvalues
/// above the pruning threshold.
pub fn kraus_from_choi<T: Real>(j: &Matrix<T>, dim_in: usize, dim_out: usize) -> Result<Vec<Matrix<T>>> {
    let eig = hermitian_eig(j)?;
    let cut = tol::<T>().kraus_prune;
    let mut kraus = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l < cut {
            break;
        }
        let w = l.sqrt();
        let k_op = Matrix::from_fn(dim_out, dim_in, |a, i| eig.eigenvectors[(i * dim_out + a, k)] * w);
        kraus.push(k_op);
    }
    if kraus.is_empty() {
        kraus.push(Matrix::zeros(dim_out, dim_in));
    }
    Ok(kraus)
}

/// Partial trace of a bipartite operator over its second factor.
pub fn partial_trace_second<T: Real>(m: &Matrix<T>, d1: usize, d2: usize) -> Matrix<T> {
    Matrix::from_fn(d1, d1, |i, j| {
        (0..d2).map(|a| m[(i * d2 + a, j * d2 + a)]).sum()
    })
}

/// Partial trace of a bipartite operator over its first factor.
pub fn partial_trace_first<T: Real>(m: &Matrix<T>, d1: usize, d2: usize) -> Matrix<T> {
    Matrix::from_fn(d2, d2, |a, b| {
        (0..d1).map(|i| m[(i * d2 + a, i * d2 + b)]).sum()
    })
}

/// Matrix unit `|i⟩⟨j|`.
pub fn matrix_unit<T: Real>(d: usize, i: usize, j: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(d, d);
    m[(i, j)] = Cx::one();
    m
}

/// Density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T> {
    matrix: Matrix<T>,
}

impl<T: Real> DensityOperator<T> {
    /// Validating constructor.
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        let t = tol::<T>();
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if matrix.hermitian_defect() > t.state {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > t.state || tr.im.abs() > t.state {
            return Err(Error::InvalidState(format!("trace {} != 1", tr.re)));
        }
        let matrix = matrix.hermitian_part();
        let eig = hermitian_eig(&matrix)?;
        let low = *eig.eigenvalues.last().expect("nonempty");
        if low < -t.state {
            return Err(Error::InvalidState(format!("negative eigenvalue {low}")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: Matrix<T>) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` from amplitudes, renormalized when within tolerance of unit norm.
    pub fn pure(amps: &[Cx<T>]) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if amps.is_empty() || (norm - T::one()).abs() > tol::<T>().pure_state_norm {
            return Err(Error::InvalidState(format!(
                "amplitude norm {norm} is not 1"
            )));
        }
        let v: Vec<Cx<T>> = amps.iter().map(|a| a / norm).collect();
        Ok(Self {
            matrix: Matrix::outer(&v, &v),
        })
    }

    pub fn basis(d: usize, i: usize) -> Self {
        Self {
            matrix: matrix_unit(d, i, i),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: Matrix::identity(d).scale_real(T::one() / T::from_count(d)),
        }
    }

    /// Qubit state from a Bloch vector; the vector must lie in the unit ball.
    pub fn from_bloch(r: [T; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > T::one() + tol::<T>().state {
            return Err(Error::InvalidState(format!("Bloch vector length {len} > 1")));
        }
        Ok(Self::from_matrix_unchecked(bloch_matrix(r)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Option<[T; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let m = &self.matrix;
        let two = T::lit(2.0);
        Some([
            m[(0, 1)].re * two,
            -m[(0, 1)].im * two,
            m[(0, 0)].re - m[(1, 1)].re,
        ])
    }
}

/// `(I + r·σ)/2`.
pub(crate) fn bloch_matrix<T: Real>(r: [T; 3]) -> Matrix<T> {
    let half = T::lit(0.5);
    let mut m = Matrix::zeros(2, 2);
    m[(0, 0)] = re(half * (T::one() + r[2]));
    m[(1, 1)] = re(half * (T::one() - r[2]));
    m[(0, 1)] = Cx::new(half * r[0], -half * r[1]);
    m[(1, 0)] = Cx::new(half * r[0], half * r[1]);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::amplitude_damping;

    fn ad(g: f64) -> Channel<f64> {
        amplitude_damping(g).unwrap()
    }

    fn assert_close(a: &Matrix<f64>, b: &Matrix<f64>, eps: f64) {
        let d = (a - b).max_abs();
        assert!(d <= eps, "matrices differ by {d}");
    }

    fn same_on_units(a: &Channel<f64>, b: &Channel<f64>) {
        let d = a.dim_in();
        for i in 0..d {
            for j in 0..d {
                let u = matrix_unit(d, i, j);
                assert_close(&a.apply_matrix(&u).unwrap(), &b.apply_matrix(&u).unwrap(), 1e-12);
            }
        }
    }

    #[test]
    fn validate_examples() {
        let r = Channel::<f64>::identity(2).validate().unwrap();
        assert!(r.passed);
        assert_eq!(r.defect, 0.0);
        assert!(ad(0.3).validate().unwrap().passed);
        let weak = Channel::from_kraus(vec![Matrix::<f64>::identity(2).scale_real(0.9)]).unwrap();
        let r = weak.validate().unwrap();
        assert!(!r.passed);
        assert!((r.defect - 0.19).abs() < 1e-12);
        assert!(Channel::new(weak.into_kraus()).is_err());
    }

    #[test]
    fn shape_mismatch_rejected() {
        let err = Channel::<f64>::from_kraus(vec![Matrix::identity(2), Matrix::identity(3)]);
        assert!(matches!(err, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn apply_examples() {
        let rho = DensityOperator::from_bloch([0.3, -0.2, 0.5]).unwrap();
        let out = Channel::identity(2).apply(&rho).unwrap();
        assert_close(out.matrix(), rho.matrix(), 1e-15);

        let one = DensityOperator::<f64>::basis(2, 1);
        let out = ad(1.0).apply(&one).unwrap();
        assert_close(out.matrix(), &Matrix::diag_real(&[1.0, 0.0]), 1e-15);

        let out = ad(0.4).apply(&one).unwrap();
        assert_close(out.matrix(), &Matrix::diag_real(&[0.4, 0.6]), 1e-15);

        let wrong = DensityOperator::<f64>::basis(3, 0);
        assert!(matches!(ad(0.4).apply(&wrong), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_examples() {
        let phi = ad(0.3);
        let c = compose(&Channel::identity(2), &phi).unwrap();
        assert!(c.equals(&phi).unwrap());

        let c = compose(&ad(0.2), &ad(0.6)).unwrap();
        same_on_units(&c, &ad(1.0 - 0.8 * 0.4));

        let c = compose(&ad(0.5), &ad(0.5)).unwrap();
        let out = c.apply(&DensityOperator::basis(2, 1)).unwrap();
        assert_close(out.matrix(), &Matrix::diag_real(&[0.75, 0.25]), 1e-15);
    }

    #[test]
    fn power_examples() {
        let phi = ad(0.2);
        assert!(power(&phi, 0).unwrap().equals(&Channel::identity(2)).unwrap());
        assert!(power(&phi, 1).unwrap().equals(&phi).unwrap());
        same_on_units(&power(&phi, 3).unwrap(), &ad(0.488));
        let rect = Channel::<f64>::from_kraus(vec![Matrix::zeros(3, 2)]).unwrap();
        assert!(matches!(power(&rect, 2), Err(Error::NotEndomorphic { .. })));
    }

    #[test]
    fn power_keeps_kraus_count_bounded() {
        let p = power(&ad(0.01), 500).unwrap();
        assert!(p.kraus().len() <= 4);
        same_on_units(&p, &ad(1.0 - 0.99f64.powi(500)));
    }

    #[test]
    fn tensor_examples() {
        let id4 = tensor(&Channel::<f64>::identity(2), &Channel::identity(2));
        assert!(id4.equals(&Channel::identity(4)).unwrap());

        let t = tensor(&ad(0.3), &Channel::identity(2));
        let out = t.apply(&DensityOperator::basis(4, 3)).unwrap();
        // |11⟩ decays to |01⟩ with weight γ, stays with weight 1 − γ.
        let mut expected = Matrix::zeros(4, 4);
        expected[(1, 1)] = re(0.3);
        expected[(3, 3)] = re(0.7);
        assert_close(out.matrix(), &expected, 1e-15);
    }

    #[test]
    fn choi_examples() {
        let j = Channel::<f64>::identity(2).choi();
        assert!((j.trace().re - 2.0).abs() < 1e-15);
        let omega = [re(1.0), re(0.0), re(0.0), re(1.0)];
        assert_close(&j, &Matrix::outer(&omega, &omega), 1e-15);

        let j = Channel::<f64>::completely_depolarizing(2).choi();
        assert_close(&j, &Matrix::identity(4).scale_real(0.5), 1e-15);

        let j = ad(0.4).choi();
        // Tracing out the output leg leaves the identity on the input leg.
        assert_close(&partial_trace_second(&j, 2, 2), &Matrix::identity(2), 1e-15);
    }

    #[test]
    fn complementary_examples() {
        let c = complementary(&Channel::<f64>::identity(2));
        assert_eq!(c.dim_out(), 1);
        let rho = DensityOperator::from_bloch([0.1, 0.2, 0.3]).unwrap();
        let out = c.apply(&rho).unwrap();
        assert!((out.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);

        same_on_units(&complementary(&ad(0.5)), &ad(0.5));

        let deph = Channel::<f64>::completely_dephasing(2);
        let out = complementary(&deph).apply(&rho).unwrap();
        let m = rho.matrix();
        let expected = Matrix::diag_real(&[m[(0, 0)].re, m[(1, 1)].re]);
        assert_close(out.matrix(), &expected, 1e-15);
        assert!(complementary(&ad(0.3)).validate().unwrap().passed);
    }

    #[test]
    fn pure_state_constructor() {
        let s = 0.5f64.sqrt();
        let rho = DensityOperator::pure(&[re(s), re(s + 1e-9)]).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(DensityOperator::<f64>::pure(&[re(1.0), re(1.0)]).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::new(Matrix::<f64>::diag_real(&[0.5, 0.5])).is_ok());
        assert!(DensityOperator::new(Matrix::<f64>::diag_real(&[1.5, -0.5])).is_err());
        assert!(DensityOperator::new(Matrix::<f64>::diag_real(&[0.5, 0.6])).is_err());
    }
}
