//! Nodes `Ξ = D ∘ N ∘ E`, per-`n` analysis of `Ξⁿ` and grid sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{
    binary_entropy, continuity_capacity_bound, diamond_distance_interval, CapacityBoundParams,
};
use crate::channels::{compose, Channel};
use crate::error::{Error, Result};
use crate::noise::amplitude_damping;
use crate::numerics::{operator_norm, Matrix};
use crate::qec::{cly_code, cly_errors, cly_noise, decoder, encoder, pure_loss_exact_tail, Code};
use crate::scalar::Real;
use crate::transfer::{canonicalize, radius_of_convergence, spectral_radius_mu, transfer_matrix};

/// Default upper end of the `n` range.
pub const DEFAULT_N_MAX: usize = 512;

/// How `ε` for a node is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EpsilonChoice {
    /// Diamond upper bound, falling back to the tail bound.
    Auto,
    Given(f64),
    DiamondUpper,
    TailBound,
}

/// Where the `ε` in a report came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonSource {
    Given,
    DiamondUpper,
    TailBound,
}

/// A single node: noise on the physical space, a code and the errors it corrects.
#[derive(Clone, Debug)]
pub struct NodeSpec<T> {
    pub noise: Channel<T>,
    pub code: Code<T>,
    pub corrected: Vec<Matrix<T>>,
    pub epsilon: EpsilonChoice,
}

impl<T: Real> NodeSpec<T> {
    pub fn new(noise: Channel<T>, code: Code<T>, corrected: Vec<Matrix<T>>) -> Self {
        Self {
            noise,
            code,
            corrected,
            epsilon: EpsilonChoice::Auto,
        }
    }

    /// Node that corrects only the trivial error `I`.
    pub fn uncorrected(noise: Channel<T>, code: Code<T>) -> Self {
        let d = code.physical_dim();
        Self::new(noise, code, vec![Matrix::identity(d)])
    }

    pub fn with_epsilon(mut self, epsilon: EpsilonChoice) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// `D ∘ N ∘ E` as a channel on the logical space.
pub fn build_node<T: Real>(spec: &NodeSpec<T>) -> Result<Channel<T>> {
    let d = spec.code.physical_dim();
    if spec.noise.dim_in() != d || spec.noise.dim_out() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: spec.noise.dim_in(),
        });
    }
    let dec = decoder(&spec.code, &spec.corrected)?;
    compose(&dec, &compose(&spec.noise, &encoder(&spec.code))?)
}

/// `ε` for a built node, with its source.
pub fn node_epsilon<T: Real>(spec: &NodeSpec<T>, node: &Channel<T>) -> Result<(f64, EpsilonSource)> {
    let diamond = || -> Result<f64> {
        let iv = diamond_distance_interval(node, &Channel::identity(node.dim_in()))?;
        Ok(iv.upper.as_f64().min(1.0))
    };
    let tail = || -> Result<f64> {
        let d = spec.code.physical_dim();
        let mut sum = Matrix::zeros(d, d);
        for f in &spec.corrected {
            sum += &(&f.adjoint() * f);
        }
        Ok(operator_norm(&(&Matrix::identity(d) - &sum))?.as_f64().min(1.0))
    };
    match spec.epsilon {
        EpsilonChoice::Given(e) => {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::OutOfRange {
                    name: "epsilon",
                    value: e,
                    expected: "[0, 1]",
                });
            }
            Ok((e, EpsilonSource::Given))
        }
        EpsilonChoice::DiamondUpper => Ok((diamond()?, EpsilonSource::DiamondUpper)),
        EpsilonChoice::TailBound => Ok((tail()?, EpsilonSource::TailBound)),
        EpsilonChoice::Auto => match diamond() {
            Ok(e) => Ok((e, EpsilonSource::DiamondUpper)),
            Err(_) => Ok((tail()?, EpsilonSource::TailBound)),
        },
    }
}

/// `μ` of a qubit node, absent when the T-matrix has no canonical form or a unit eigenvalue.
pub fn node_mu<T: Real>(node: &Channel<T>) -> Option<f64> {
    let tm = transfer_matrix(node).ok()?;
    let ct = canonicalize(&tm).ok()?;
    spectral_radius_mu(&ct).ok().map(|m| m.as_f64())
}

/// One `n` of a sequence analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SequenceRow {
    pub n: usize,
    pub capacity_lower: f64,
    /// `nε`.
    pub distance_upper: f64,
    #[serde(rename = "R_n")]
    pub r_n: Option<f64>,
    pub feasible: bool,
}

/// Diamond interval of `Ξⁿ` against the identity at a sampled `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiamondSample {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub distance_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceReport {
    pub epsilon: f64,
    pub epsilon_source: EpsilonSource,
    pub d_b: usize,
    pub mu: Option<f64>,
    pub rows: Vec<SequenceRow>,
    pub diamond_samples: Vec<DiamondSample>,
}

/// Streams rows for `n = 0..=n_max` without storing them.
#[derive(Clone, Debug)]
pub struct SequenceRows {
    epsilon: f64,
    d_b: usize,
    mu: Option<f64>,
    next: usize,
    n_max: usize,
}

impl SequenceRows {
    pub fn new(epsilon: f64, d_b: usize, mu: Option<f64>, n_max: usize) -> Result<Self> {
        CapacityBoundParams::new(epsilon, 0, d_b)?;
        Ok(Self {
            epsilon,
            d_b,
            mu,
            next: 0,
            n_max,
        })
    }
}

impl Iterator for SequenceRows {
    type Item = Result<SequenceRow>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next > self.n_max {
            return None;
        }
        let n = self.next;
        self.next += 1;
        Some(sequence_row(self.epsilon, self.d_b, self.mu, n))
    }
}

fn sequence_row(epsilon: f64, d_b: usize, mu: Option<f64>, n: usize) -> Result<SequenceRow> {
    let capacity_lower = continuity_capacity_bound(&CapacityBoundParams::new(epsilon, n, d_b)?)?;
    let r_n = match (mu, n) {
        (Some(m), n) if n > 0 => Some(radius_of_convergence(m, n)?),
        _ => None,
    };
    Ok(SequenceRow {
        n,
        capacity_lower,
        distance_upper: n as f64 * epsilon,
        r_n,
        feasible: capacity_lower > 0.0,
    })
}

/// Bound columns for `n = 0..=n_max`, plus diamond intervals of `Ξⁿ` at
/// powers of two, each checked against `nε`.
pub fn analyze_sequence<T: Real>(spec: &NodeSpec<T>, n_max: usize) -> Result<SequenceReport> {
    let node = build_node(spec)?;
    let (epsilon, epsilon_source) = node_epsilon(spec, &node)?;
    let mu = node_mu(&node);
    let d_b = node.dim_out();
    let rows = SequenceRows::new(epsilon, d_b, mu, n_max)?.collect::<Result<Vec<_>>>()?;

    let id = Channel::identity(node.dim_in());
    let mut diamond_samples = Vec::new();
    let mut n = 1;
    let mut power = node.clone();
    while n <= n_max {
        let iv = diamond_distance_interval(&power, &id)?;
        let sample = DiamondSample {
            n,
            lower: iv.lower.as_f64(),
            upper: iv.upper.as_f64(),
            distance_upper: n as f64 * epsilon,
        };
        if sample.lower > sample.distance_upper + 1e-9 {
            return Err(Error::Inconsistent(format!(
                "diamond lower bound {} at n = {n} exceeds n·eps = {}",
                sample.lower, sample.distance_upper
            )));
        }
        diamond_samples.push(sample);
        power = compose(&power, &power)?;
        n *= 2;
    }
    Ok(SequenceReport {
        epsilon,
        epsilon_source,
        d_b,
        mu,
        rows,
        diamond_samples,
    })
}

/// Largest `n` with a positive continuity bound.
pub fn entanglement_horizon(epsilon: f64, d_b: usize) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            expected: "(0, 1]",
        });
    }
    let positive = |n: usize| -> Result<bool> {
        Ok(continuity_capacity_bound(&CapacityBoundParams::new(epsilon, n, d_b)?)? > 0.0)
    };
    let mut hi = 1usize;
    while positive(hi)? {
        hi *= 2;
    }
    // positive(lo) holds (n = 0 gives log₂ d_B), positive(hi) fails
    let mut lo = hi / 2;
    if hi == 1 {
        return Ok(0);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `1 − 98nγ² − (1 + 49nγ²) h(49nγ²/(1 + 49nγ²))`.
pub fn bosonic_ad_capacity_bound(gamma: f64, n: usize) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            expected: "(0, 1)",
        });
    }
    let x = 49.0 * n as f64 * gamma * gamma;
    Ok(1.0 - 2.0 * x - (1.0 + x) * binary_entropy(x / (1.0 + x))?)
}

/// Noise model swept by [`sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepModel {
    /// Qubit amplitude damping, no code; `ε` is the diamond upper bound.
    Ad,
    /// CLY code under two-mode bosonic damping; `ε = 49γ²`.
    BosonicAd,
    /// Pure loss correcting `k` losses; `ε` is the exact tail.
    PureLoss,
}

impl SweepModel {
    pub fn name(&self) -> &'static str {
        match self {
            SweepModel::Ad => "ad",
            SweepModel::BosonicAd => "bosonic-ad",
            SweepModel::PureLoss => "pure-loss",
        }
    }
}

impl std::str::FromStr for SweepModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ad" => Ok(SweepModel::Ad),
            "bosonic-ad" => Ok(SweepModel::BosonicAd),
            "pure-loss" => Ok(SweepModel::PureLoss),
            other => Err(Error::InvalidGrid(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub model: SweepModel,
    /// `γ` values (or `η` for pure loss).
    pub params: Vec<f64>,
    pub ns: Vec<usize>,
    /// Fock cutoff for the bosonic models.
    pub cutoff: usize,
    /// Corrected loss count for the pure-loss model.
    pub k: usize,
}

impl SweepConfig {
    pub fn new(model: SweepModel, params: Vec<f64>, ns: Vec<usize>) -> Self {
        Self {
            model,
            params,
            ns,
            cutoff: 4,
            k: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub model: &'static str,
    pub param: f64,
    pub n: usize,
    pub epsilon: f64,
    pub capacity_lower: f64,
    pub distance_upper: f64,
    pub mu: Option<f64>,
    #[serde(rename = "R_n")]
    pub r_n: Option<f64>,
    pub feasible: bool,
}

pub const SWEEP_CSV_HEADER: &str = "model,param,n,epsilon,capacity_lower,distance_upper,mu,R_n,feasible";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_g12).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.model,
            format_g12(self.param),
            self.n,
            format_g12(self.epsilon),
            format_g12(self.capacity_lower),
            format_g12(self.distance_upper),
            opt(self.mu),
            opt(self.r_n),
            self.feasible
        )
    }
}

/// Evaluate every `(param, n)` pair, params outer and `n` inner.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.params.is_empty() || config.ns.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if let Some(p) = config.params.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite parameter {p}")));
    }
    let per_param: Vec<Result<Vec<SweepRow>>> = config
        .params
        .par_iter()
        .map(|&param| {
            let (epsilon, mu) = model_point(config, param)?;
            config
                .ns
                .iter()
                .map(|&n| {
                    let row = sequence_row(epsilon, 2, mu, n)?;
                    Ok(SweepRow {
                        model: config.model.name(),
                        param,
                        n,
                        epsilon,
                        capacity_lower: row.capacity_lower,
                        distance_upper: row.distance_upper,
                        mu,
                        r_n: row.r_n,
                        feasible: row.feasible,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(config.params.len() * config.ns.len());
    for chunk in per_param {
        rows.extend(chunk?);
    }
    Ok(rows)
}

fn model_point(config: &SweepConfig, param: f64) -> Result<(f64, Option<f64>)> {
    let grid_err = |msg: String| Error::InvalidGrid(msg);
    match config.model {
        SweepModel::Ad => {
            if !(0.0..=1.0).contains(&param) {
                return Err(grid_err(format!("gamma = {param} outside [0, 1]")));
            }
            let node = amplitude_damping(param)?;
            let iv = diamond_distance_interval(&node, &Channel::identity(2))?;
            Ok((iv.upper.min(1.0), node_mu(&node)))
        }
        SweepModel::BosonicAd => {
            if !(param > 0.0 && param < 1.0) {
                return Err(grid_err(format!("gamma = {param} outside (0, 1)")));
            }
            let epsilon = 49.0 * param * param;
            if epsilon > 1.0 {
                return Err(grid_err(format!("49 gamma^2 = {epsilon} exceeds 1 at gamma = {param}")));
            }
            let spec = NodeSpec::new(
                cly_noise(param, config.cutoff)?,
                cly_code(config.cutoff)?,
                cly_errors(param, config.cutoff)?,
            );
            Ok((epsilon, node_mu(&build_node(&spec)?)))
        }
        SweepModel::PureLoss => {
            if !(0.0..=1.0).contains(&param) {
                return Err(grid_err(format!("eta = {param} outside [0, 1]")));
            }
            Ok((pure_loss_exact_tail(param, config.k, config.cutoff)?, None))
        }
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (11 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::DensityOperator;
    use crate::random::{random_near_identity, rng};

    #[test]
    fn node_examples() {
        let spec = NodeSpec::uncorrected(Channel::<f64>::identity(2), Code::trivial(2));
        assert!(build_node(&spec).unwrap().equals(&Channel::identity(2)).unwrap());

        let ad = amplitude_damping(0.3f64).unwrap();
        let spec = NodeSpec::uncorrected(ad.clone(), Code::trivial(2));
        assert!(build_node(&spec).unwrap().equals(&ad).unwrap());

        let g = 0.05;
        let spec = NodeSpec::new(cly_noise(g, 4).unwrap(), cly_code(4).unwrap(), cly_errors(g, 4).unwrap());
        let node = build_node(&spec).unwrap();
        assert_eq!((node.dim_in(), node.dim_out()), (2, 2));
        assert!(node.validate().unwrap().passed);
    }

    #[test]
    fn cly_node_is_perfect_on_identity_noise() {
        let spec = NodeSpec::new(
            Channel::<f64>::identity(25),
            cly_code(4).unwrap(),
            cly_errors(0.1, 4).unwrap(),
        );
        let node = build_node(&spec).unwrap();
        assert!(node.equals(&Channel::identity(2)).unwrap());
    }

    #[test]
    fn sequence_examples() {
        let spec = NodeSpec::uncorrected(Channel::<f64>::identity(2), Code::trivial(2))
            .with_epsilon(EpsilonChoice::Given(0.0005));
        let rep = analyze_sequence(&spec, 64).unwrap();
        assert_eq!(rep.epsilon_source, EpsilonSource::Given);
        assert_eq!(rep.rows[0].capacity_lower, 1.0);
        assert_eq!(rep.rows[0].distance_upper, 0.0);
        assert_eq!(rep.rows[0].r_n, None);
        assert!((rep.rows[44].capacity_lower - 0.8028).abs() < 5e-4);
        for w in rep.rows.windows(2) {
            assert!(w[1].capacity_lower <= w[0].capacity_lower);
        }

        let spec = NodeSpec::uncorrected(amplitude_damping(0.36f64).unwrap(), Code::trivial(2));
        let rep = analyze_sequence(&spec, 16).unwrap();
        assert!((rep.mu.unwrap() - 0.8).abs() < 1e-12);
        assert!((rep.rows[3].r_n.unwrap() - 0.9f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn understated_epsilon_is_caught() {
        let spec = NodeSpec::uncorrected(amplitude_damping(0.36f64).unwrap(), Code::trivial(2))
            .with_epsilon(EpsilonChoice::Given(0.0005));
        assert!(matches!(analyze_sequence(&spec, 4), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn epsilon_sources() {
        let spec = NodeSpec::uncorrected(amplitude_damping(0.2f64).unwrap(), Code::trivial(2));
        let rep = analyze_sequence(&spec, 8).unwrap();
        assert_eq!(rep.epsilon_source, EpsilonSource::DiamondUpper);

        let g = 0.01;
        let spec = NodeSpec::new(cly_noise(g, 4).unwrap(), cly_code(4).unwrap(), cly_errors(g, 4).unwrap())
            .with_epsilon(EpsilonChoice::TailBound);
        let rep = analyze_sequence(&spec, 16).unwrap();
        assert_eq!(rep.epsilon_source, EpsilonSource::TailBound);
        assert!(rep.epsilon <= 49.0 * g * g);
    }

    #[test]
    fn telescoping_on_random_nodes() {
        let mut g = rng(21);
        for _ in 0..5 {
            let noise = random_near_identity::<f64>(&mut g, 2, 0.02).unwrap();
            let spec = NodeSpec::uncorrected(noise, Code::trivial(2));
            let rep = analyze_sequence(&spec, 8).unwrap();
            assert_eq!(rep.diamond_samples.len(), 4);
        }
    }

    #[test]
    fn horizon_examples() {
        // root of the closed form at nε = 0.161772422 (mpmath), so n = 323
        let h = entanglement_horizon(0.0005, 2).unwrap();
        assert_eq!(h, 323);
        assert_eq!(entanglement_horizon(1.0, 2).unwrap(), 0);
        let h2 = entanglement_horizon(0.001, 2).unwrap();
        assert!((h2 as i64 - (h / 2) as i64).abs() <= 2);
        assert!(entanglement_horizon(0.0, 2).is_err());

        // closed-form oracle: the bound is positive at h and not at h + 1
        let b = |n| continuity_capacity_bound(&CapacityBoundParams::new(0.0005, n, 2).unwrap()).unwrap();
        assert!(b(h) > 0.0 && b(h + 1) <= 0.0);
    }

    #[test]
    fn bosonic_bound_examples() {
        assert_eq!(bosonic_ad_capacity_bound(0.01, 0).unwrap(), 1.0);
        assert!((bosonic_ad_capacity_bound(0.01, 10).unwrap() - 0.6164).abs() < 1e-3);
        for &g in &[0.001, 0.01, 0.03] {
            for n in 0..20 {
                let direct = continuity_capacity_bound(&CapacityBoundParams::new(49.0 * g * g, n, 2).unwrap())
                    .unwrap();
                assert!((bosonic_ad_capacity_bound(g, n).unwrap() - direct).abs() < 1e-12);
            }
        }
        assert!(bosonic_ad_capacity_bound(0.0, 1).is_err());
    }

    #[test]
    fn sweep_examples() {
        let cfg = SweepConfig::new(SweepModel::Ad, vec![0.36], vec![5]);
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let spec = NodeSpec::uncorrected(amplitude_damping(0.36f64).unwrap(), Code::trivial(2));
        let rep = analyze_sequence(&spec, 5).unwrap();
        assert_eq!(rows[0].capacity_lower, rep.rows[5].capacity_lower);
        assert_eq!(rows[0].r_n, rep.rows[5].r_n);

        let params: Vec<f64> = (1..=5).map(|i| i as f64 / 10.0).collect();
        let rows = sweep(&SweepConfig::new(SweepModel::Ad, params.clone(), (1..=50).collect())).unwrap();
        assert_eq!(rows.len(), 250);
        for (i, chunk) in rows.chunks(50).enumerate() {
            assert_eq!(chunk[0].param, params[i]);
            for w in chunk.windows(2) {
                assert!(w[1].capacity_lower <= w[0].capacity_lower);
            }
        }

        let rows = sweep(&SweepConfig::new(SweepModel::BosonicAd, vec![0.01], (1..=100).collect())).unwrap();
        assert!((rows[9].capacity_lower - bosonic_ad_capacity_bound(0.01, 10).unwrap()).abs() < 1e-12);

        let rows = sweep(&SweepConfig::new(SweepModel::PureLoss, vec![0.9], vec![1])).unwrap();
        assert!((rows[0].epsilon - 0.0523).abs() < 1e-4);

        assert!(sweep(&SweepConfig::new(SweepModel::Ad, vec![], vec![1])).is_err());
        assert!(sweep(&SweepConfig::new(SweepModel::Ad, vec![1.5], vec![1])).is_err());
    }

    #[test]
    fn semigroup_consistency_of_powers() {
        let spec = NodeSpec::uncorrected(amplitude_damping(0.2f64).unwrap(), Code::trivial(2));
        let node = build_node(&spec).unwrap();
        let a = node.power(7).unwrap();
        let b = compose(&node.power(3).unwrap(), &node.power(4).unwrap()).unwrap();
        assert!(a.equals(&b).unwrap());
        let out = a.apply(&DensityOperator::basis(2, 1)).unwrap();
        assert!((out.matrix()[(1, 1)].re - 0.8f64.powi(7)).abs() < 1e-12);
    }

    #[test]
    fn g12_formatting() {
        assert_eq!(format_g12(0.0), "0");
        assert_eq!(format_g12(1.0), "1");
        assert_eq!(format_g12(0.1), "0.1");
        assert_eq!(format_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g12(-2.5e-7), "-2.5e-07");
        assert_eq!(format_g12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_g12(0.80284), "0.80284");
    }
}
