//! Small derivative-free minimizer used by the coherent-information search.

use crate::scalar::Real;

/// Nelder-Mead settings.
#[derive(Clone, Copy, Debug)]
pub struct NelderMead<T> {
    /// Stop when every vertex is within this distance of the best one.
    pub x_tol: T,
    pub max_iter: usize,
    /// Initial simplex edge length.
    pub step: T,
}

impl<T: Real> Default for NelderMead<T> {
    fn default() -> Self {
        Self {
            x_tol: T::lit(1e-6),
            max_iter: 5000,
            step: T::lit(0.05),
        }
    }
}

/// Result of a minimization.
#[derive(Clone, Debug)]
pub struct Minimum<T, const N: usize> {
    pub x: [T; N],
    pub value: T,
    pub iterations: usize,
}

impl<T: Real> NelderMead<T> {
    /// Minimize `f` from `start` with the standard reflection/expansion/
    /// contraction/shrink coefficients (1, 2, ½, ½).
    pub fn minimize<const N: usize>(&self, f: impl Fn(&[T; N]) -> T, start: [T; N]) -> Minimum<T, N> {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let mut simplex: Vec<([T; N], T)> = Vec::with_capacity(N + 1);
        simplex.push((start, f(&start)));
        for i in 0..N {
            let mut p = start;
            p[i] += self.step;
            simplex.push((p, f(&p)));
        }

        let mut iterations = 0;
        while iterations < self.max_iter {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let best = simplex[0].0;
            let spread = simplex[1..]
                .iter()
                .map(|(p, _)| {
                    p.iter()
                        .zip(&best)
                        .map(|(a, b)| (*a - *b).abs())
                        .fold(T::zero(), |m, d| m.max(d))
                })
                .fold(T::zero(), |m, d| m.max(d));
            if spread <= self.x_tol {
                break;
            }
            iterations += 1;

            let mut centroid = [T::zero(); N];
            for (p, _) in &simplex[..N] {
                for k in 0..N {
                    centroid[k] += p[k];
                }
            }
            for c in centroid.iter_mut() {
                *c /= T::from_count(N);
            }
            let along = |coef: T| -> [T; N] {
                let worst = simplex[N].0;
                let mut out = [T::zero(); N];
                for k in 0..N {
                    out[k] = centroid[k] + coef * (worst[k] - centroid[k]);
                }
                out
            };

            let reflected = along(-T::one());
            let fr = f(&reflected);
            if fr < simplex[0].1 {
                let expanded = along(-two);
                let fe = f(&expanded);
                simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                continue;
            }
            if fr < simplex[N - 1].1 {
                simplex[N] = (reflected, fr);
                continue;
            }
            let (contracted, fc) = if fr < simplex[N].1 {
                let p = along(-half);
                (p, f(&p))
            } else {
                let p = along(half);
                (p, f(&p))
            };
            if fc < simplex[N].1.min(fr) {
                simplex[N] = (contracted, fc);
                continue;
            }
            // shrink toward the best vertex
            let best = simplex[0].0;
            for v in simplex.iter_mut().skip(1) {
                for k in 0..N {
                    v.0[k] = best[k] + half * (v.0[k] - best[k]);
                }
                v.1 = f(&v.0);
            }
        }
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        Minimum {
            x: simplex[0].0,
            value: simplex[0].1,
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            x_tol: 1e-10,
            max_iter: 20000,
            step: 0.1,
        };
        let m = nm.minimize(
            |p: &[f64; 2]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            [-1.2, 1.0],
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6, "{:?}", m.x);
        assert!((m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_3d() {
        let m = NelderMead::<f64>::default().minimize(
            |p: &[f64; 3]| (p[0] - 0.2).powi(2) + 2.0 * (p[1] + 0.1).powi(2) + (p[2] - 0.3).powi(2),
            [0.0, 0.0, 0.0],
        );
        assert!((m.x[0] - 0.2).abs() < 1e-5);
        assert!((m.x[1] + 0.1).abs() < 1e-5);
        assert!((m.x[2] - 0.3).abs() < 1e-5);
    }
}
