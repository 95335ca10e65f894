//! Codes, Knill-Laflamme certification, recovery maps and tail-error bounds.
//!
//! A [`Code`] is a list of orthonormal logical words in a physical space.
//! Given an error set satisfying the Knill-Laflamme conditions,
//! [`build_recovery`] returns the standard recovery: the c-matrix is
//! diagonalized, each orthogonalized error direction gets one Kraus element
//! `P G_k† / √d_k`, and everything outside the addressed subspaces is reset to
//! `|0_L⟩`.
//!
//! The pure-loss tail and its Chernoff estimate live here as well. The
//! Chernoff exponent uses natural logarithms ([`CHERNOFF_LOG_BASE`]).

use serde::Serialize;

use crate::channels::{Channel, DensityOperator};
use crate::error::{check_unit_interval, Error, Result};
use crate::noise::{binomial, bosonic_ad_kraus, pure_loss_kraus, FockTruncation};
use crate::numerics::{hermitian_eig, operator_norm, trace_norm, Matrix};
use crate::random::{haar_vector, rng, DEFAULT_SEED};
use crate::scalar::{cx, re, tol, Cx, Real};

/// Base of the logarithm inside the Chernoff KL divergence.
pub const CHERNOFF_LOG_BASE: f64 = std::f64::consts::E;

/// Random logical states drawn by [`recovery_residual`] (plus the axis states).
pub const RESIDUAL_SAMPLES: usize = 200;

/// Logical basis of a code inside a physical Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Code<T> {
    physical_dim: usize,
    words: Vec<Vec<Cx<T>>>,
}

impl<T: Real> Code<T> {
    pub fn new(physical_dim: usize, words: Vec<Vec<Cx<T>>>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::ShapeMismatch("code has no words".into()));
        }
        if let Some(w) = words.iter().find(|w| w.len() != physical_dim) {
            return Err(Error::DimensionMismatch {
                expected: physical_dim,
                got: w.len(),
            });
        }
        let mut defect = T::zero();
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                let ip: Cx<T> = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { T::one() } else { T::zero() };
                defect = defect.max((ip - re(target)).norm());
            }
        }
        if defect > tol::<T>().orthonormal {
            return Err(Error::NonOrthonormalWords { defect: defect.as_f64() });
        }
        Ok(Self { physical_dim, words })
    }

    /// `|i_L⟩ = |i⟩`: the identity embedding of a `d`-level system.
    pub fn trivial(d: usize) -> Self {
        let words = (0..d)
            .map(|i| (0..d).map(|j| re(if i == j { T::one() } else { T::zero() })).collect())
            .collect();
        Self { physical_dim: d, words }
    }

    pub fn physical_dim(&self) -> usize {
        self.physical_dim
    }

    pub fn logical_dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Vec<Cx<T>>] {
        &self.words
    }

    /// `S = Σ_i |i_L⟩⟨i|`, physical × logical.
    pub fn isometry(&self) -> Matrix<T> {
        Matrix::from_fn(self.physical_dim, self.logical_dim(), |r, c| self.words[c][r])
    }

    /// Codespace projector `P = S S†`.
    pub fn projector(&self) -> Matrix<T> {
        let s = self.isometry();
        &s * &s.adjoint()
    }

    /// `S ρ S†` for a logical state.
    pub fn encode(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        encoder(self).apply(rho)
    }
}

/// Encoding channel `σ ↦ S σ S†`.
pub fn encoder<T: Real>(code: &Code<T>) -> Channel<T> {
    Channel::from_kraus(vec![code.isometry()]).expect("isometry has consistent shape")
}

/// Outcome of a Knill-Laflamme check.
#[derive(Clone, Debug, PartialEq)]
pub struct KLReport<T> {
    pub satisfied: bool,
    /// `c_ab`, averaged over the logical diagonal.
    pub c_matrix: Matrix<T>,
    pub max_violation: T,
}

/// Check `⟨i_L|F_a† F_b|j_L⟩ = c_ab δ_ij`.
pub fn kl_check<T: Real>(code: &Code<T>, errors: &[Matrix<T>]) -> Result<KLReport<T>> {
    let d = code.physical_dim();
    if let Some(f) = errors.iter().find(|f| f.shape() != (d, d)) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: if f.rows() != d { f.rows() } else { f.cols() },
        });
    }
    let k = code.logical_dim();
    let images: Vec<Vec<Vec<Cx<T>>>> = errors
        .iter()
        .map(|f| code.words().iter().map(|w| f.apply_vec(w)).collect())
        .collect();
    let inner = |a: &[Cx<T>], b: &[Cx<T>]| -> Cx<T> { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };

    let n = errors.len();
    let mut c = Matrix::zeros(n, n);
    let mut violation = T::zero();
    for a in 0..n {
        for b in 0..n {
            let block: Vec<Vec<Cx<T>>> = (0..k)
                .map(|i| (0..k).map(|j| inner(&images[a][i], &images[b][j])).collect())
                .collect();
            let cab = (0..k).map(|i| block[i][i]).sum::<Cx<T>>() / T::from_count(k);
            for (i, row) in block.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let target = if i == j { cab } else { re(T::zero()) };
                    violation = violation.max((v - target).norm());
                }
            }
            c[(a, b)] = cab;
        }
    }
    Ok(KLReport {
        satisfied: violation <= tol::<T>().knill_laflamme,
        c_matrix: c,
        max_violation: violation,
    })
}

/// Recovery channel on the physical space for a Knill-Laflamme error set.
///
/// For every `F_a` and code state `ρ`, `R(F_a ρ F_a†) = Tr(F_a ρ F_a†) ρ`.
pub fn build_recovery<T: Real>(code: &Code<T>, errors: &[Matrix<T>]) -> Result<Channel<T>> {
    let report = kl_check(code, errors)?;
    if !report.satisfied {
        return Err(Error::KlViolated {
            violation: report.max_violation.as_f64(),
        });
    }
    let d = code.physical_dim();
    let p = code.projector();
    let eig = hermitian_eig(&report.c_matrix)?;
    let floor = tol::<T>().kraus_prune;

    let mut kraus = Vec::new();
    let mut covered = Matrix::zeros(d, d);
    for (k, &dk) in eig.eigenvalues.iter().enumerate() {
        if dk <= floor {
            continue;
        }
        let u = eig.vector(k);
        let mut g = Matrix::zeros(d, d);
        for (f, &uak) in errors.iter().zip(&u) {
            g += &f.scale(uak);
        }
        let gp = &g * &p;
        covered += &(&gp * &g.adjoint()).scale_real(T::one() / dk);
        kraus.push((&p * &g.adjoint()).scale_real(T::one() / dk.sqrt()));
    }

    // Reset everything outside the corrected subspaces to |0_L⟩.
    let rest = &Matrix::identity(d) - &covered;
    let rest_eig = hermitian_eig(&rest)?;
    let zero_l = &code.words()[0];
    for (m, &lm) in rest_eig.eigenvalues.iter().enumerate() {
        if lm <= floor {
            continue;
        }
        let e = rest_eig.vector(m);
        kraus.push(Matrix::outer(zero_l, &e).scale_real(lm.sqrt()));
    }
    Channel::new(kraus)
}

/// Decoder `D = S† ∘ R` from the physical space back to the logical one.
pub fn decoder<T: Real>(code: &Code<T>, errors: &[Matrix<T>]) -> Result<Channel<T>> {
    let r = build_recovery(code, errors)?;
    let s_dag = code.isometry().adjoint();
    Channel::new(r.kraus().iter().map(|k| &s_dag * k).collect())
}

/// `‖Σ_{i ≥ k} M_i† M_i‖` (zero-based, so the first `k` operators are the corrected ones).
pub fn tail_error_bound<T: Real>(kraus: &[Matrix<T>], k: usize) -> Result<T> {
    if k > kraus.len() {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            expected: "<= number of Kraus operators",
        });
    }
    let Some(first) = kraus.first() else {
        return Ok(T::zero());
    };
    let mut sum = Matrix::zeros(first.cols(), first.cols());
    for m in &kraus[k..] {
        sum += &(&m.adjoint() * m);
    }
    operator_norm(&sum)
}

/// Sampled recovery residual with the tail bound it is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualReport<T> {
    /// `max_ρ ½‖R(Φ(ρ)) − ρ‖₁` over the sampled code states.
    pub residual: T,
    /// `‖I − Σ_a F_a† F_a‖` over the corrected set.
    pub tail_bound: T,
    pub samples: usize,
}

/// [`recovery_residual_seeded`] with [`DEFAULT_SEED`].
pub fn recovery_residual<T: Real>(
    code: &Code<T>,
    noise: &Channel<T>,
    corrected: &[Matrix<T>],
) -> Result<ResidualReport<T>> {
    recovery_residual_seeded(code, noise, corrected, DEFAULT_SEED)
}

/// Worst `½‖R(Φ(ρ)) − ρ‖₁` over seeded Haar logical states plus the axis
/// states; fails with [`Error::Inconsistent`] if it exceeds the tail bound.
pub fn recovery_residual_seeded<T: Real>(
    code: &Code<T>,
    noise: &Channel<T>,
    corrected: &[Matrix<T>],
    seed: u64,
) -> Result<ResidualReport<T>> {
    let d = code.physical_dim();
    if noise.dim_in() != d || noise.dim_out() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: noise.dim_in(),
        });
    }
    let r = build_recovery(code, corrected)?;
    let mut sum = Matrix::zeros(d, d);
    for f in corrected {
        sum += &(&f.adjoint() * f);
    }
    let tail_bound = operator_norm(&(&Matrix::identity(d) - &sum))?;

    let states = sample_logical_states::<T>(code.logical_dim(), seed);
    let enc = encoder(code);
    let half = T::lit(0.5);
    let mut residual = T::zero();
    for amps in &states {
        let rho = enc.apply(&DensityOperator::pure(amps)?)?;
        let out = r.apply_matrix(&noise.apply_matrix(rho.matrix())?)?;
        residual = residual.max(half * trace_norm(&(&out - rho.matrix()))?);
    }
    if residual > tail_bound + tol::<T>().channel_equality {
        return Err(Error::Inconsistent(format!(
            "recovery residual {residual} exceeds tail bound {tail_bound}"
        )));
    }
    Ok(ResidualReport {
        residual,
        tail_bound,
        samples: states.len(),
    })
}

fn sample_logical_states<T: Real>(k: usize, seed: u64) -> Vec<Vec<Cx<T>>> {
    let mut g = rng(seed);
    let mut states: Vec<Vec<Cx<T>>> = (0..RESIDUAL_SAMPLES).map(|_| haar_vector(&mut g, k)).collect();
    let zero = re(T::zero());
    let s = T::one() / T::lit(2.0).sqrt();
    for i in 0..k {
        let mut e = vec![zero; k];
        e[i] = re(T::one());
        states.push(e);
    }
    if k == 2 {
        for (a, b) in [(re(s), re(s)), (re(s), re(-s)), (re(s), cx(T::zero(), s)), (re(s), cx(T::zero(), -s))] {
            states.push(vec![a, b]);
        }
    }
    states
}

/// `max_{m = k+1..cutoff} Σ_{l=k+1}^m C(m,l) η^{m−l} (1−η)^l`, cross-checked
/// against the operator norm of `Σ_{l>k} A_l† A_l`.
pub fn pure_loss_exact_tail(eta: f64, k: usize, cutoff: usize) -> Result<f64> {
    check_pure_loss_args(eta, k, cutoff)?;
    let scalar = (k + 1..=cutoff)
        .map(|m| binomial_upper_tail(eta, k, m))
        .fold(0.0, f64::max);
    let matrix = pure_loss_tail_matrix_norm(eta, k, cutoff)?;
    if (scalar - matrix).abs() > 1e-12 {
        return Err(Error::Inconsistent(format!(
            "pure-loss tail {scalar} disagrees with matrix norm {matrix}"
        )));
    }
    Ok(scalar)
}

/// `‖Σ_{l>k} A_l† A_l‖` for the truncated pure-loss channel.
pub fn pure_loss_tail_matrix_norm(eta: f64, k: usize, cutoff: usize) -> Result<f64> {
    check_pure_loss_args(eta, k, cutoff)?;
    let c = pure_loss_kraus(eta, FockTruncation::single(cutoff))?;
    tail_error_bound(c.kraus(), k + 1)
}

fn binomial_upper_tail(eta: f64, k: usize, m: usize) -> f64 {
    (k + 1..=m)
        .map(|l| binomial::<f64>(m, l) * eta.powi((m - l) as i32) * (1.0 - eta).powi(l as i32))
        .sum()
}

fn check_pure_loss_args(eta: f64, k: usize, cutoff: usize) -> Result<()> {
    check_unit_interval("eta", eta)?;
    if k >= cutoff {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            expected: "< cutoff",
        });
    }
    Ok(())
}

/// `D(q‖p)` in nats, with `0 ln 0 = 0`; infinite when `p` puts no mass where `q` does.
pub fn kl_divergence(q: f64, p: f64) -> f64 {
    let term = |a: f64, b: f64| {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln() / CHERNOFF_LOG_BASE.ln()
        }
    };
    term(q, p) + term(1.0 - q, 1.0 - p)
}

/// `e^{−m D(q‖p)}` with `q = (k+1)/m`, evaluated as
/// `(p/q)^{k+1} ((1−p)/(1−q))^{m−k−1}` so the exponents stay integral.
pub fn chernoff_value(k: usize, m: usize, p: f64) -> f64 {
    let q = (k + 1) as f64 / m as f64;
    let head = (p / q).powi((k + 1) as i32);
    let rest = m - k - 1;
    if rest == 0 {
        head
    } else {
        head * ((1.0 - p) / (1.0 - q)).powi(rest as i32)
    }
}

/// One `m` of the Chernoff comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernoffRow {
    pub m: usize,
    pub exact: f64,
    /// `e^{−m D((k+1)/m ‖ 1−η)}`, the upper-tail bound in loss count.
    pub primary: f64,
    /// `(k+1)/m ≥ 1−η`.
    pub primary_valid: bool,
    /// `e^{−m D((k+1)/m ‖ η)}`, reported for comparison only.
    pub literal: f64,
    /// `(k+1)/m ≥ η`.
    pub literal_regime: bool,
}

/// Exact pure-loss tail next to its Chernoff estimates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailBoundReport {
    pub exact_norm: f64,
    pub k: usize,
    /// Largest primary Chernoff value over the `m` where it applies.
    pub chernoff: Option<f64>,
    /// The Chernoff regime holds for every `m`.
    pub chernoff_valid: bool,
    pub rows: Vec<ChernoffRow>,
}

/// Chernoff estimates of the pure-loss tail for `m = k+1..cutoff`.
///
/// Every valid primary value is checked to dominate the exact tail.
pub fn chernoff_tail_bound(eta: f64, k: usize, cutoff: usize) -> Result<TailBoundReport> {
    let exact_norm = pure_loss_exact_tail(eta, k, cutoff)?;
    let loss = 1.0 - eta;
    let mut rows = Vec::with_capacity(cutoff - k);
    for m in k + 1..=cutoff {
        let q = (k + 1) as f64 / m as f64;
        let exact = binomial_upper_tail(eta, k, m);
        let primary = chernoff_value(k, m, loss);
        let primary_valid = q >= loss;
        if primary_valid && exact > primary * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::Inconsistent(format!(
                "Chernoff value {primary} below exact tail {exact} at m = {m}"
            )));
        }
        rows.push(ChernoffRow {
            m,
            exact,
            primary,
            primary_valid,
            literal: chernoff_value(k, m, eta),
            literal_regime: q >= eta,
        });
    }
    let chernoff = rows
        .iter()
        .filter(|r| r.primary_valid)
        .map(|r| r.primary)
        .reduce(f64::max);
    Ok(TailBoundReport {
        exact_norm,
        k,
        chernoff,
        chernoff_valid: rows.iter().all(|r| r.primary_valid),
        rows,
    })
}

/// Two-mode code `|0_L⟩ = (|40⟩ + |04⟩)/√2`, `|1_L⟩ = |22⟩` with basis index
/// `m·(cutoff+1) + n` for `|m n⟩`.
pub fn cly_code<T: Real>(cutoff: usize) -> Result<Code<T>> {
    if cutoff < 4 {
        return Err(Error::CutoffTooSmall { cutoff, needed: 4 });
    }
    let d = cutoff + 1;
    let idx = |m: usize, n: usize| m * d + n;
    let s = T::one() / T::lit(2.0).sqrt();
    let mut zero = vec![re(T::zero()); d * d];
    zero[idx(4, 0)] = re(s);
    zero[idx(0, 4)] = re(s);
    let mut one = vec![re(T::zero()); d * d];
    one[idx(2, 2)] = re(T::one());
    Code::new(d * d, vec![zero, one])
}

/// Two-mode bosonic amplitude damping with Kraus order
/// `B₀⊗B₀, B₀⊗B₁, B₁⊗B₀`, then the remaining products.
pub fn cly_noise<T: Real>(gamma: T, cutoff: usize) -> Result<Channel<T>> {
    let single = bosonic_ad_kraus(gamma, FockTruncation::single(cutoff))?;
    let b = single.kraus();
    let mut kraus = vec![b[0].kron(&b[0]), b[0].kron(&b[1]), b[1].kron(&b[0])];
    for (i, bi) in b.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if !matches!((i, j), (0, 0) | (0, 1) | (1, 0)) {
                kraus.push(bi.kron(bj));
            }
        }
    }
    Channel::new(kraus)
}

/// The error set `{B₀⊗B₀, B₀⊗B₁, B₁⊗B₀}` corrected by the CLY code.
pub fn cly_errors<T: Real>(gamma: T, cutoff: usize) -> Result<Vec<Matrix<T>>> {
    Ok(cly_noise(gamma, cutoff)?.into_kraus().into_iter().take(3).collect())
}

/// One row of the CLY error curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClyCurvePoint {
    pub gamma: f64,
    /// Tail norm of the two-mode noise outside the corrected set.
    pub exact_norm: f64,
    /// `max_{p=0..8} 1 − (1−γ)^p (1 + pγ/(1−γ))`.
    pub p_formula_max: f64,
    /// `49γ²`.
    pub bound: f64,
}

/// `1 − (1−γ)^p (1 + pγ/(1−γ))`: tail weight on total occupation `p`.
pub fn cly_p_formula(gamma: f64, p: usize) -> f64 {
    1.0 - (1.0 - gamma).powi(p as i32) * (1.0 + p as f64 * gamma / (1.0 - gamma))
}

/// Exact tail, scalar maximum and `49γ²` per `γ`, asserting the first two
/// agree and neither exceeds the third.
pub fn cly_error_curve(gammas: &[f64]) -> Result<Vec<ClyCurvePoint>> {
    gammas
        .iter()
        .map(|&gamma| {
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(Error::OutOfRange {
                    name: "gamma",
                    value: gamma,
                    expected: "(0, 1)",
                });
            }
            let noise = cly_noise(gamma, 4)?;
            let exact_norm = tail_error_bound(noise.kraus(), 3)?;
            let p_formula_max = (0..=8).map(|p| cly_p_formula(gamma, p)).fold(f64::MIN, f64::max);
            let bound = 49.0 * gamma * gamma;
            if (exact_norm - p_formula_max).abs() > 1e-10 {
                return Err(Error::Inconsistent(format!(
                    "CLY tail {exact_norm} differs from scalar maximum {p_formula_max} at gamma = {gamma}"
                )));
            }
            if p_formula_max > bound {
                return Err(Error::Inconsistent(format!(
                    "CLY tail {p_formula_max} exceeds 49 gamma^2 = {bound}"
                )));
            }
            Ok(ClyCurvePoint {
                gamma,
                exact_norm,
                p_formula_max,
                bound,
            })
        })
        .collect()
}

/// Pauli `X` acting on qubit `q` of an `n`-qubit register (qubit 0 leftmost).
pub fn pauli_x_on<T: Real>(n: usize, q: usize) -> Matrix<T> {
    let d = 1usize << n;
    let bit = 1usize << (n - 1 - q);
    Matrix::from_fn(d, d, |r, c| re(if r == c ^ bit { T::one() } else { T::zero() }))
}

/// `|0_L⟩ = |000⟩`, `|1_L⟩ = |111⟩`.
pub fn repetition_code<T: Real>() -> Code<T> {
    let mut zero = vec![re(T::zero()); 8];
    zero[0] = re(T::one());
    let mut one = vec![re(T::zero()); 8];
    one[7] = re(T::one());
    Code::new(8, vec![zero, one]).expect("basis words")
}

/// Independent bit flips on three qubits, Kraus operators ordered by weight.
pub fn bit_flip_product<T: Real>(p: T) -> Result<Channel<T>> {
    check_unit_interval("p", p.as_f64())?;
    let mut masks: Vec<usize> = (0..8).collect();
    masks.sort_by_key(|m: &usize| (m.count_ones(), *m));
    let kraus = masks
        .into_iter()
        .map(|mask| {
            let w = mask.count_ones() as i32;
            let amp = (p.powi(w) * (T::one() - p).powi(3 - w)).sqrt();
            let mut op = Matrix::identity(8);
            for q in 0..3 {
                if mask & (1 << (2 - q)) != 0 {
                    op = &pauli_x_on(3, q) * &op;
                }
            }
            op.scale_real(amp)
        })
        .collect();
    Channel::new(kraus)
}
