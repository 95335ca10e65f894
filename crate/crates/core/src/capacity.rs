//! Entropies, coherent information, the continuity bound on one-shot
//! capacity along `Ξⁿ`, and diamond-distance intervals.
//!
//! Logarithms are base 2 throughout this module.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{Channel, DensityOperator};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, trace_norm, Matrix};
use crate::optimize::NelderMead;
use crate::random::{ball_point, rng, DEFAULT_SEED};
use crate::scalar::{re, tol, Cx, Real};

/// Parameters of the continuity bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CapacityBoundParams {
    /// Bound on `½‖Ξ − id‖◇`.
    pub epsilon: f64,
    /// Number of composed nodes.
    pub n: usize,
    /// Output dimension.
    pub d_b: usize,
}

impl CapacityBoundParams {
    pub fn new(epsilon: f64, n: usize, d_b: usize) -> Result<Self> {
        let p = Self { epsilon, n, d_b };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value: self.epsilon,
                expected: "[0, 1]",
            });
        }
        if self.d_b < 2 {
            return Err(Error::OutOfRange {
                name: "d_B",
                value: self.d_b as f64,
                expected: ">= 2",
            });
        }
        Ok(())
    }
}

/// `h(x) = −x log x − (1−x) log(1−x)`, with `0 log 0 = 0`.
pub fn binary_entropy<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x.as_f64(),
            expected: "[0, 1]",
        });
    }
    Ok(xlog2x_neg(x) + xlog2x_neg(T::one() - x))
}

#[inline]
fn xlog2x_neg<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        -x * x.log2()
    }
}

/// `g(ε) = (1+ε) h(ε/(1+ε))`.
pub fn g_func<T: Real>(eps: T) -> Result<T> {
    if !(eps >= T::zero()) || !eps.is_finite() {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: eps.as_f64(),
            expected: ">= 0",
        });
    }
    let one_plus = T::one() + eps;
    Ok(one_plus * binary_entropy(eps / one_plus)?)
}

/// `log₂(d_B)(1 − 2nε) − g(nε)`; for `d_B = 2` this is `1 − 2nε − (1+nε) h(nε/(1+nε))`.
///
/// May be negative; callers clamp for display only.
pub fn continuity_capacity_bound(p: &CapacityBoundParams) -> Result<f64> {
    p.check()?;
    let x = p.n as f64 * p.epsilon;
    Ok((p.d_b as f64).log2() * (1.0 - 2.0 * x) - g_func(x)?)
}

/// Telescoping bound `½‖Ξⁿ − id‖◇ ≤ nε`.
pub fn sequential_distance_bound(epsilon: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            expected: "[0, 1]",
        });
    }
    Ok(n as f64 * epsilon)
}

/// `S(ρ) = −Tr ρ log ρ`.
pub fn von_neumann_entropy<T: Real>(rho: &DensityOperator<T>) -> Result<T> {
    matrix_entropy(rho.matrix())
}

fn matrix_entropy<T: Real>(m: &Matrix<T>) -> Result<T> {
    let eig = hermitian_eig(m)?;
    let floor = -tol::<T>().state;
    let mut s = T::zero();
    for &l in &eig.eigenvalues {
        if l < floor {
            return Err(Error::InvalidState(format!("negative eigenvalue {l}")));
        }
        s += xlog2x_neg(l.max(T::zero()));
    }
    Ok(s)
}

/// `I_c(Φ, ρ) = S(Φ(ρ)) − S(Φᶜ(ρ))`.
pub fn coherent_information<T: Real>(c: &Channel<T>, rho: &DensityOperator<T>) -> Result<T> {
    coherent_information_with(c, &c.complementary(), rho)
}

fn coherent_information_with<T: Real>(
    c: &Channel<T>,
    comp: &Channel<T>,
    rho: &DensityOperator<T>,
) -> Result<T> {
    let out = c.apply(rho)?;
    let env = comp.apply(rho)?;
    Ok(von_neumann_entropy(&out)? - von_neumann_entropy(&env)?)
}

/// Maximizer of the coherent information over qubit inputs.
#[derive(Clone, Debug)]
pub struct Q1Estimate<T> {
    pub value: T,
    pub argmax: DensityOperator<T>,
    pub bloch: [T; 3],
}

/// Grid step per Bloch axis for the coarse search.
pub const Q1_GRID_STEP: f64 = 0.05;
/// Random restarts of the local refinement.
pub const Q1_RESTARTS: usize = 3;

/// `Q⁽¹⁾(Φ) = max_ρ I_c(Φ, ρ)` for a qubit-input channel, default seed.
pub fn q1_maximize<T: Real>(c: &Channel<T>) -> Result<Q1Estimate<T>> {
    q1_maximize_seeded(c, DEFAULT_SEED)
}

/// Coarse Bloch-ball grid followed by Nelder-Mead refinement from the best
/// grid point and from seeded random restarts. Points outside the ball are
/// projected radially onto it.
pub fn q1_maximize_seeded<T: Real>(c: &Channel<T>, seed: u64) -> Result<Q1Estimate<T>> {
    if c.dim_in() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: c.dim_in(),
        });
    }
    let comp = c.complementary();
    let objective = |r: &[T; 3]| -> Result<T> {
        let rho = DensityOperator::from_bloch(project_to_ball(*r))?;
        coherent_information_with(c, &comp, &rho)
    };

    let steps = (2.0 / Q1_GRID_STEP).round() as usize;
    let coord = |i: usize| T::lit(-1.0 + Q1_GRID_STEP * i as f64);
    // Per-x-slice maxima, reduced in lexicographic order (first maximum wins).
    let slices: Vec<Result<Option<([T; 3], T)>>> = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<([T; 3], T)> = None;
            for j in 0..=steps {
                for k in 0..=steps {
                    let r = [coord(i), coord(j), coord(k)];
                    let len2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
                    if len2 > T::one() + T::lit(1e-12) {
                        continue;
                    }
                    let v = objective(&r)?;
                    if best.map_or(true, |(_, b)| v > b) {
                        best = Some((r, v));
                    }
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<([T; 3], T)> = None;
    for s in slices {
        if let Some((r, v)) = s? {
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((r, v));
            }
        }
    }
    let (mut best_r, mut best_v) = best.expect("grid contains the origin");

    let nm = NelderMead::<T>::default();
    let mut generator = rng(seed);
    let mut starts = vec![best_r];
    for _ in 0..Q1_RESTARTS {
        starts.push(ball_point(&mut generator));
    }
    for start in starts {
        let m = nm.minimize(
            |r: &[T; 3]| objective(r).map(|v| -v).unwrap_or(T::infinity()),
            start,
        );
        let r = project_to_ball(m.x);
        let v = objective(&r)?;
        if v > best_v {
            best_v = v;
            best_r = r;
        }
    }
    let argmax = DensityOperator::from_bloch(best_r)?;
    Ok(Q1Estimate {
        value: best_v,
        argmax,
        bloch: best_r,
    })
}

fn project_to_ball<T: Real>(r: [T; 3]) -> [T; 3] {
    let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if len > T::one() {
        [r[0] / len, r[1] / len, r[2] / len]
    } else {
        r
    }
}

/// Certified interval around `½‖Φ − Ψ‖◇`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiamondInterval<T> {
    pub lower: T,
    pub upper: T,
}

/// Interval from the maximally entangled input (lower) and the Choi trace
/// norm (upper).
pub fn diamond_distance_interval<T: Real>(a: &Channel<T>, b: &Channel<T>) -> Result<DiamondInterval<T>> {
    if (a.dim_in(), a.dim_out()) != (b.dim_in(), b.dim_out()) {
        return Err(Error::DimensionMismatch {
            expected: a.dim_in() * a.dim_out(),
            got: b.dim_in() * b.dim_out(),
        });
    }
    let d = a.dim_in();
    let half = T::lit(0.5);
    let choi_gap = trace_norm(&(&a.choi() - &b.choi()))?;
    let upper = half * choi_gap;

    // (Φ ⊗ id)(Ω) on the maximally entangled state as a second route
    let w = T::one() / T::from_count(d).sqrt();
    let omega: Vec<Cx<T>> = (0..d * d)
        .map(|idx| if idx / d == idx % d { re(w) } else { re(T::zero()) })
        .collect();
    let omega = Matrix::outer(&omega, &omega);
    let id = Channel::identity(d);
    let ea = a.tensor(&id).apply_matrix(&omega)?;
    let eb = b.tensor(&id).apply_matrix(&omega)?;
    let entangled = half * trace_norm(&(&ea - &eb))?;
    let lower = entangled.max(upper / T::from_count(d)).min(upper);
    Ok(DiamondInterval { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::amplitude_damping;
    use crate::random::{random_channel, random_density};

    // High-precision reference values computed independently with mpmath.
    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0f64).unwrap(), 0.0);
        assert!((binary_entropy(0.5f64).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.0215264f64).unwrap() - 0.14993).abs() < 1e-5);
        assert!((binary_entropy(0.3f64).unwrap() - binary_entropy(0.7f64).unwrap()).abs() < 1e-15);
        assert!(binary_entropy(1.2f64).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_func(0.0f64).unwrap(), 0.0);
        assert!((g_func(1.0f64).unwrap() - 2.0).abs() < 1e-15);
        assert!((g_func(0.022f64).unwrap() - 0.15323).abs() < 1e-4);
        assert!(g_func(-0.1f64).is_err());
    }

    #[test]
    fn continuity_examples() {
        let v = continuity_capacity_bound(&CapacityBoundParams::new(0.0005, 44, 2).unwrap()).unwrap();
        assert!((v - 0.8028).abs() < 5e-4);
        for d in [2usize, 3, 5] {
            let v = continuity_capacity_bound(&CapacityBoundParams::new(0.37, 0, d).unwrap()).unwrap();
            assert!((v - (d as f64).log2()).abs() < 1e-15);
        }
        assert!(CapacityBoundParams::new(1.5, 1, 2).is_err());
        assert!(CapacityBoundParams::new(0.1, 1, 1).is_err());
    }

    #[test]
    fn continuity_monotone() {
        let mut prev = f64::INFINITY;
        for n in 0..400 {
            let v = continuity_capacity_bound(&CapacityBoundParams::new(0.0005, n, 2).unwrap()).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let e = i as f64 / 100.0;
            let v = continuity_capacity_bound(&CapacityBoundParams::new(e, 3, 2).unwrap()).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(sequential_distance_bound(0.3, 1).unwrap(), 0.3);
        assert_eq!(sequential_distance_bound(0.3, 0).unwrap(), 0.0);
        assert!((sequential_distance_bound(0.0005, 44).unwrap() - 0.022).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityOperator::<f64>::pure(&[re(0.6), re(0.8)]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed = DensityOperator::<f64>::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-15);
        let d = DensityOperator::new(Matrix::diag_real(&[0.75f64, 0.25])).unwrap();
        assert!((von_neumann_entropy(&d).unwrap() - 0.81128).abs() < 1e-5);
    }

    #[test]
    fn entropy_bounds_random() {
        let mut g = rng(5);
        for d in 2..6 {
            for _ in 0..20 {
                let rho = random_density::<f64>(&mut g, d);
                let s = von_neumann_entropy(&rho).unwrap();
                assert!(s >= 0.0 && s <= (d as f64).log2() + 1e-12);
            }
        }
    }

    #[test]
    fn coherent_information_examples() {
        let mut g = rng(9);
        let id = Channel::<f64>::identity(2);
        let ad_half = amplitude_damping(0.5).unwrap();
        let dep = Channel::<f64>::completely_depolarizing(2);
        for _ in 0..20 {
            let rho = random_density::<f64>(&mut g, 2);
            let ic = coherent_information(&id, &rho).unwrap();
            assert!((ic - von_neumann_entropy(&rho).unwrap()).abs() < 1e-12);
            assert!(coherent_information(&ad_half, &rho).unwrap().abs() < 1e-12);
            // direct two-entropy oracle for the depolarizing channel
            let env = dep.complementary().apply(&rho).unwrap();
            let direct = 1.0 - von_neumann_entropy(&env).unwrap();
            assert!((coherent_information(&dep, &rho).unwrap() - direct).abs() < 1e-12);
        }
    }

    fn ad_oracle(gamma: f64) -> (f64, f64) {
        // 1-D search over diagonal inputs diag(1 − p, p)
        let h = |x: f64| binary_entropy(x).unwrap();
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=10_000 {
            let p = i as f64 * 1e-4;
            let v = h((1.0 - gamma) * p) - h(gamma * p);
            if v > best.0 {
                best = (v, p);
            }
        }
        best
    }

    #[test]
    fn q1_identity() {
        let est = q1_maximize(&Channel::<f64>::identity(2)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9);
        let m = est.argmax.matrix();
        assert!((m - &Matrix::identity(2).scale_real(0.5)).max_abs() < 1e-4);
    }

    #[test]
    fn q1_amplitude_damping() {
        let (oracle, p) = ad_oracle(0.2);
        assert!((oracle - 0.5062).abs() < 1e-3);
        let est = q1_maximize(&amplitude_damping(0.2).unwrap()).unwrap();
        assert!((est.value - oracle).abs() < 1e-3, "{} vs {oracle}", est.value);
        let pop = est.argmax.matrix()[(1, 1)].re;
        assert!((pop - p).abs() < 0.01, "excited population {pop}, oracle {p}");
        assert!((pop - 0.45).abs() < 0.01);

        let est = q1_maximize(&amplitude_damping(0.5f64).unwrap()).unwrap();
        assert!(est.value.abs() < 1e-6);
    }

    #[test]
    fn q1_dominates_random_inputs() {
        let mut g = rng(17);
        let c = random_channel::<f64>(&mut g, 2, 2, 2).unwrap();
        let est = q1_maximize(&c).unwrap();
        for _ in 0..1000 {
            let rho = random_density::<f64>(&mut g, 2);
            assert!(est.value >= coherent_information(&c, &rho).unwrap() - 1e-12);
        }
    }

    #[test]
    fn diamond_examples() {
        let ad = amplitude_damping(0.3).unwrap();
        let same = diamond_distance_interval(&ad, &ad).unwrap();
        assert_eq!(same.upper, 0.0);
        assert_eq!(same.lower, 0.0);

        let iv = diamond_distance_interval(&Channel::<f64>::identity(2), &Channel::completely_depolarizing(2))
            .unwrap();
        assert!((iv.lower - 0.75).abs() < 1e-12);
        assert!((iv.upper - 1.5).abs() < 1e-12);

        for i in 0..=20 {
            let g = i as f64 / 20.0;
            let iv = diamond_distance_interval(&Channel::identity(2), &amplitude_damping(g).unwrap()).unwrap();
            assert!(iv.lower >= 0.0 && iv.lower <= iv.upper);
        }
    }
}
