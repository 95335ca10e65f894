//! End-to-end worked example for amplitude damping: bound numbers, spectral
//! radius, CLY code certification, error curve and the bosonic capacity bound.

use serde_json::{json, Value};
use seqcap::capacity::{continuity_capacity_bound, CapacityBoundParams};
use seqcap::network::{bosonic_ad_capacity_bound, entanglement_horizon};
use seqcap::noise::amplitude_damping;
use seqcap::qec::{cly_code, cly_error_curve, cly_errors, cly_noise, kl_check, recovery_residual_seeded};
use seqcap::transfer::{canonicalize, preservation_horizon, radius_of_convergence, spectral_radius_mu, transfer_matrix};

pub struct Check {
    pub name: String,
    pub outcome: Result<String, String>,
    /// Depends on the sampling seed.
    pub sampled: bool,
}

fn check(name: impl Into<String>, f: impl FnOnce() -> Result<String, String>) -> Check {
    Check {
        name: name.into(),
        outcome: f(),
        sampled: false,
    }
}

fn e2s<V>(r: seqcap::Result<V>) -> Result<V, String> {
    r.map_err(|e| e.to_string())
}

pub fn run(gamma: f64, seed: u64) -> Vec<Check> {
    let mut checks = vec![
        check("capacity bound eps=0.0005 n=44 >= 0.803 (rounded)", || {
            let v = e2s(continuity_capacity_bound(&e2s(CapacityBoundParams::new(0.0005, 44, 2))?))?;
            if (0.8023..=0.8033).contains(&v) {
                Ok(format!("{v:.6}"))
            } else {
                Err(format!("{v}"))
            }
        }),
        check("horizon 44 with R_n >= 0.989", || {
            let n = e2s(preservation_horizon(0.0005, 0.011))?;
            let r = e2s(radius_of_convergence(1.0 - 0.0005, n))?;
            if n == 44 && r >= 0.989 {
                Ok(format!("n = {n}, R = {r:.6}"))
            } else {
                Err(format!("n = {n}, R = {r}"))
            }
        }),
        check("entanglement horizon at eps=0.0005", || {
            let h = e2s(entanglement_horizon(0.0005, 2))?;
            Ok(format!("{h}"))
        }),
        check("amplitude damping mu = sqrt(1 - gamma) on 0.1..0.9", || {
            let mut worst = 0.0f64;
            for i in 1..=9 {
                let g = i as f64 / 10.0;
                let tm = e2s(transfer_matrix(&e2s(amplitude_damping(g))?))?;
                let mu = e2s(spectral_radius_mu(&e2s(canonicalize(&tm))?))?;
                worst = worst.max((mu - (1.0 - g).sqrt()).abs());
            }
            if worst <= 1e-12 {
                Ok(format!("max error {worst:.1e}"))
            } else {
                Err(format!("max error {worst:e}"))
            }
        }),
        check(format!("CLY code corrects B0B0, B0B1, B1B0 at gamma={gamma}"), || {
            let r = e2s(kl_check(&e2s(cly_code(4))?, &e2s(cly_errors(gamma, 4))?))?;
            if r.satisfied {
                Ok(format!("violation {:.1e}", r.max_violation))
            } else {
                Err(format!("violation {:e}", r.max_violation))
            }
        }),
        check(format!("CLY tail equals scalar maximum and stays below 49 gamma^2 at gamma={gamma}"), || {
            let grid = [gamma, 0.001, 0.005, 0.01, 0.05, 0.1];
            let pts = e2s(cly_error_curve(&grid))?;
            let p = pts[0];
            Ok(format!("exact {:.6e} <= {:.6e}", p.exact_norm, p.bound))
        }),
        check(format!("bosonic capacity bound closed form at gamma={gamma}"), || {
            let eps = 49.0 * gamma * gamma;
            let mut worst = 0.0f64;
            for n in 0..=20 {
                let a = e2s(bosonic_ad_capacity_bound(gamma, n))?;
                let b = e2s(continuity_capacity_bound(&e2s(CapacityBoundParams::new(eps, n, 2))?))?;
                worst = worst.max((a - b).abs());
            }
            let v10 = e2s(bosonic_ad_capacity_bound(gamma, 10))?;
            if worst <= 1e-12 {
                Ok(format!("n=10: {v10:.6}; identity gap {worst:.1e}"))
            } else {
                Err(format!("identity gap {worst:e}"))
            }
        }),
        check("bosonic capacity bound at gamma=0.01, n=10", || {
            let v = e2s(bosonic_ad_capacity_bound(0.01, 10))?;
            if (v - 0.616).abs() <= 2e-3 {
                Ok(format!("{v:.6}"))
            } else {
                Err(format!("{v}"))
            }
        }),
    ];
    let mut residual = check(format!("recovery residual within tail bound at gamma={gamma}"), || {
        let rep = e2s(recovery_residual_seeded(
            &e2s(cly_code(4))?,
            &e2s(cly_noise(gamma, 4))?,
            &e2s(cly_errors(gamma, 4))?,
            seed,
        ))?;
        Ok(format!("{:.6e} <= {:.6e} over {} states", rep.residual, rep.tail_bound, rep.samples))
    });
    residual.sampled = true;
    checks.push(residual);
    checks
}

pub fn to_json(checks: &[Check], gamma: f64, seed: u64) -> Value {
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| {
            let (pass, detail) = match &c.outcome {
                Ok(d) => (true, d.clone()),
                Err(d) => (false, d.clone()),
            };
            json!({"check": c.name, "pass": pass, "detail": detail, "sampled": c.sampled})
        })
        .collect();
    json!({
        "gamma": gamma,
        "seed": seed,
        "all_passed": checks.iter().all(|c| c.outcome.is_ok()),
        "checks": rows,
    })
}

pub fn to_text(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        match &c.outcome {
            Ok(d) => s.push_str(&format!("PASS  {}: {d}\n", c.name)),
            Err(d) => s.push_str(&format!("FAIL  {}: {d}\n", c.name)),
        }
    }
    s
}
