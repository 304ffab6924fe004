//! Harmonic product wave function at zeroth order and the energy through
//! first order.

use serde::{Deserialize, Serialize};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::spectral::{Mu, SpectralSolution};
use crate::system::SystemSpec;

/// Normalized one-dimensional oscillator eigenfunction in the scaled
/// argument: `(2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2)`.
///
/// Evaluated by upward recurrence on the normalized functions, which stays
/// stable for the quantum numbers of interest.
pub fn hermite_function(n: u32, x: f64) -> f64 {
    let h0 = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    if n == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * x * h0;
    for k in 2..=n as u64 {
        let next = x * (2.0 / k as f64).sqrt() * cur - ((k - 1) as f64 / k as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// One mode's factor of the product wave function, normalized in the
/// normal coordinate: `omega^{1/4} h_n(sqrt(omega) q)`.
pub fn mode_factor(omega: f64, n: u32, q: f64) -> f64 {
    omega.powf(0.25) * hermite_function(n, omega.sqrt() * q)
}

/// Occupancy of one root manifold: `count` of its modes carry `n` quanta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldOccupancy {
    pub mu: String,
    pub n: u32,
    pub count: usize,
}

/// Excitation bookkeeping. Manifold entries list excited modes; every mode
/// not covered by an entry sits in its ground state, so the per-manifold
/// occupancies always sum to the multiplicity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupancy {
    pub entries: Vec<ManifoldOccupancy>,
}

impl Occupancy {
    pub fn ground() -> Occupancy {
        Occupancy::default()
    }

    /// Per-mode quantum numbers in the flattened mode ordering. Within a
    /// manifold, listed excitations fill the lowest mode indices first.
    pub fn per_mode(&self, solution: &SpectralSolution) -> Result<Vec<u32>> {
        let roots = solution.roots();
        let modes = solution.modes();
        let mut quanta = vec![0u32; modes.len()];

        for (mu, _, multiplicity) in &roots {
            let mut assigned = 0usize;
            let slots: Vec<usize> = modes
                .iter()
                .enumerate()
                .filter(|(_, m)| m.mu == *mu)
                .map(|(i, _)| i)
                .collect();
            for entry in &self.entries {
                let entry_mu: Mu = entry.mu.parse().map_err(|e| Error::Occupancy {
                    mu: entry.mu.clone(),
                    detail: e,
                })?;
                if entry_mu != *mu {
                    continue;
                }
                if assigned + entry.count > *multiplicity {
                    return Err(Error::Occupancy {
                        mu: entry.mu.clone(),
                        detail: format!(
                            "occupancies sum past the multiplicity {multiplicity}"
                        ),
                    });
                }
                for k in 0..entry.count {
                    quanta[slots[assigned + k]] = entry.n;
                }
                assigned += entry.count;
            }
        }
        // Entries naming roots that do not exist at this N are errors.
        for entry in &self.entries {
            let entry_mu: Mu = entry.mu.parse().map_err(|e| Error::Occupancy {
                mu: entry.mu.clone(),
                detail: e,
            })?;
            if !roots.iter().any(|(mu, _, _)| *mu == entry_mu) {
                return Err(Error::Occupancy {
                    mu: entry.mu.clone(),
                    detail: format!("root absent for N = {}", solution.n),
                });
            }
        }
        Ok(quanta)
    }
}

/// Natural logarithm of `|Phi_0|` together with its sign, for overflow-free
/// products over thousands of modes.
pub fn ln_phi0(
    q: &DVector<f64>,
    solution: &SpectralSolution,
    occupancy: &Occupancy,
) -> Result<(f64, f64)> {
    let modes = solution.modes();
    if q.len() != modes.len() {
        return Err(Error::DimensionMismatch {
            what: "normal coordinate vector",
            expected: modes.len(),
            got: q.len(),
        });
    }
    let quanta = occupancy.per_mode(solution)?;
    let mut ln_abs = 0.0f64;
    let mut sign = 1.0f64;
    for (slot, mode) in modes.iter().enumerate() {
        let omega = match mode.omega {
            Some(w) if w > 0.0 => w,
            _ => {
                return Err(Error::UnstableMode {
                    label: format!("{}:{}", mode.mu, mode.xi),
                    lambda: mode.lambda,
                })
            }
        };
        let factor = mode_factor(omega, quanta[slot], q[slot]);
        if factor == 0.0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        ln_abs += factor.abs().ln();
        sign *= factor.signum();
    }
    Ok((ln_abs, sign))
}

/// Zeroth-order wave function value at a normal-coordinate point.
pub fn phi0(q: &DVector<f64>, solution: &SpectralSolution, occupancy: &Occupancy) -> Result<f64> {
    let (ln_abs, sign) = ln_phi0(q, solution, occupancy)?;
    if sign == 0.0 {
        return Ok(0.0);
    }
    Ok(sign * ln_abs.exp())
}

/// Energy through first order:
/// `E = E_inf + delta (sum over roots of (n + 1/2) d_{mu,n} omega_mu + v0)`.
pub fn energy_first_order(
    spec: &SystemSpec,
    solution: &SpectralSolution,
    occupancy: &Occupancy,
) -> Result<f64> {
    let mut harmonic = 0.0f64;
    for (mu, lambda, multiplicity) in solution.roots() {
        if lambda < 0.0 {
            return Err(Error::UnstableMode {
                label: mu.to_string(),
                lambda,
            });
        }
        let omega = lambda.sqrt();
        let mut excited = 0usize;
        for entry in &occupancy.entries {
            let entry_mu: Mu = entry.mu.parse().map_err(|e| Error::Occupancy {
                mu: entry.mu.clone(),
                detail: e,
            })?;
            if entry_mu != mu {
                continue;
            }
            if excited + entry.count > multiplicity {
                return Err(Error::Occupancy {
                    mu: entry.mu.clone(),
                    detail: format!("occupancies sum past the multiplicity {multiplicity}"),
                });
            }
            harmonic += (entry.n as f64 + 0.5) * entry.count as f64 * omega;
            excited += entry.count;
        }
        harmonic += 0.5 * (multiplicity - excited) as f64 * omega;
    }
    // Reject occupancy entries for absent roots.
    for entry in &occupancy.entries {
        let entry_mu: Mu = entry.mu.parse().map_err(|e| Error::Occupancy {
            mu: entry.mu.clone(),
            detail: e,
        })?;
        if !solution.roots().iter().any(|(mu, _, _)| *mu == entry_mu) {
            return Err(Error::Occupancy {
                mu: entry.mu.clone(),
                detail: format!("root absent for N = {}", solution.n),
            });
        }
    }
    Ok(spec.e_inf + spec.delta * (harmonic + spec.v0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{FCoefficients, GCoefficients};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn spec(n: usize) -> SystemSpec {
        SystemSpec {
            n,
            f: FCoefficients {
                a: 1.2,
                b: 0.1,
                c: 0.3,
                d: 0.05,
                e: 0.3,
                f: 0.05,
                g: 0.9,
                h: 0.1,
                iota: 0.02,
            },
            g: GCoefficients {
                a: 1.0,
                g: 1.1,
                h: 0.15,
            },
            delta: 0.25,
            v0: 0.5,
            e_inf: 3.2,
            r_inf: 1.05,
            gamma_inf: -0.2,
            a_ho: 1.0,
        }
    }

    /// Gauss-Hermite nodes and weights by the Golub-Welsch eigenvalue
    /// method; the Jacobi matrix has off-diagonals sqrt(k/2).
    fn gauss_hermite(points: usize) -> Vec<(f64, f64)> {
        let mut jac = DMatrix::zeros(points, points);
        for k in 1..points {
            let off = (k as f64 / 2.0).sqrt();
            jac[(k - 1, k)] = off;
            jac[(k, k - 1)] = off;
        }
        let eig = nalgebra::SymmetricEigen::new(jac);
        let mut out: Vec<(f64, f64)> = (0..points)
            .map(|i| {
                let node = eig.eigenvalues[i];
                let first = eig.eigenvectors[(0, i)];
                (node, std::f64::consts::PI.sqrt() * first * first)
            })
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    #[test]
    fn hermite_functions_normalized_by_quadrature() {
        // Integrate h_n(x)^2 with 64-point Gauss-Hermite quadrature; the
        // weight e^{-x^2} is exactly the function's Gaussian envelope.
        let quad = gauss_hermite(64);
        for n in 0..6u32 {
            let integral: f64 = quad
                .iter()
                .map(|&(x, w)| {
                    let bare = hermite_function(n, x) * (x * x / 2.0).exp();
                    w * bare * bare
                })
                .sum();
            assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn mode_factor_normalized_in_coordinate() {
        // integral of |omega^{1/4} h_n(sqrt(omega) q)|^2 dq = 1.
        let quad = gauss_hermite(64);
        let omega = 2.7;
        for n in 0..4u32 {
            let integral: f64 = quad
                .iter()
                .map(|&(x, w)| {
                    // substitute x = sqrt(omega) q
                    let bare = mode_factor(omega, n, x / omega.sqrt()) * (x * x / 2.0).exp();
                    w * bare * bare / omega.sqrt()
                })
                .sum();
            assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn ground_state_peak_value() {
        let s = spec(4);
        let sol = SpectralSolution::solve(&s).unwrap();
        let q = DVector::zeros(s.p());
        let value = phi0(&q, &sol, &Occupancy::ground()).unwrap();
        let expected: f64 = sol
            .modes()
            .iter()
            .map(|m| (m.omega.unwrap() / std::f64::consts::PI).powf(0.25))
            .product();
        assert_abs_diff_eq!(value, expected, epsilon = 1e-12 * expected.abs());
    }

    #[test]
    fn single_quantum_vanishes_at_origin() {
        let s = spec(4);
        let sol = SpectralSolution::solve(&s).unwrap();
        let occ = Occupancy {
            entries: vec![ManifoldOccupancy {
                mu: "1+".into(),
                n: 1,
                count: 1,
            }],
        };
        let q = DVector::zeros(s.p());
        assert_eq!(phi0(&q, &sol, &occ).unwrap(), 0.0);
    }

    #[test]
    fn phi0_factorizes_in_log() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = spec(5);
        let sol = SpectralSolution::solve(&s).unwrap();
        let q = DVector::from_fn(s.p(), |_, _| rng.random_range(-0.5..0.5));
        let (ln_abs, sign) = ln_phi0(&q, &sol, &Occupancy::ground()).unwrap();
        assert_eq!(sign, 1.0);
        let per_mode_sum: f64 = sol
            .modes()
            .iter()
            .enumerate()
            .map(|(i, m)| mode_factor(m.omega.unwrap(), 0, q[i]).abs().ln())
            .sum();
        assert_abs_diff_eq!(ln_abs, per_mode_sum, epsilon = 1e-10);
    }

    #[test]
    fn ground_state_energy_matches_half_sum() {
        let s = spec(6);
        let sol = SpectralSolution::solve(&s).unwrap();
        let e = energy_first_order(&s, &sol, &Occupancy::ground()).unwrap();
        let half_sum: f64 = sol
            .roots()
            .iter()
            .map(|(_, l, d)| 0.5 * (*d as f64) * l.sqrt())
            .sum();
        assert_abs_diff_eq!(e, s.e_inf + s.delta * (half_sum + s.v0), epsilon = 1e-12);
        // delta -> 0 recovers E_inf.
        let mut s0 = s.clone();
        s0.delta = 1e-300;
        let sol0 = SpectralSolution::solve(&s0).unwrap();
        let e0 = energy_first_order(&s0, &sol0, &Occupancy::ground()).unwrap();
        assert_abs_diff_eq!(e0, s0.e_inf, epsilon = 1e-12);
    }

    #[test]
    fn one_quantum_raises_energy_by_delta_omega() {
        let s = spec(6);
        let sol = SpectralSolution::solve(&s).unwrap();
        let ground = energy_first_order(&s, &sol, &Occupancy::ground()).unwrap();
        for mu in ["0+", "0-", "1+", "1-", "2"] {
            let occ = Occupancy {
                entries: vec![ManifoldOccupancy {
                    mu: mu.into(),
                    n: 1,
                    count: 1,
                }],
            };
            let excited = energy_first_order(&s, &sol, &occ).unwrap();
            let mu_parsed: Mu = mu.parse().unwrap();
            let omega = sol.root_value(mu_parsed).unwrap().sqrt();
            assert_abs_diff_eq!(excited - ground, s.delta * omega, epsilon = 1e-12);
        }
    }

    #[test]
    fn energy_ignores_which_degenerate_mode_is_excited() {
        // Equivalent manifold occupancies must give identical energies no
        // matter how they are split across entries.
        let s = spec(7);
        let sol = SpectralSolution::solve(&s).unwrap();
        let one = Occupancy {
            entries: vec![ManifoldOccupancy {
                mu: "1-".into(),
                n: 2,
                count: 3,
            }],
        };
        let split = Occupancy {
            entries: vec![
                ManifoldOccupancy {
                    mu: "1-".into(),
                    n: 2,
                    count: 1,
                },
                ManifoldOccupancy {
                    mu: "1-".into(),
                    n: 2,
                    count: 2,
                },
            ],
        };
        let e1 = energy_first_order(&s, &sol, &one).unwrap();
        let e2 = energy_first_order(&s, &sol, &split).unwrap();
        assert_abs_diff_eq!(e1, e2, epsilon = 1e-13);
    }

    #[test]
    fn occupancy_validation() {
        let s = spec(4);
        let sol = SpectralSolution::solve(&s).unwrap();
        // Overflowing a manifold is rejected.
        let too_many = Occupancy {
            entries: vec![ManifoldOccupancy {
                mu: "2".into(),
                n: 1,
                count: 3,
            }],
        };
        assert!(matches!(
            energy_first_order(&s, &sol, &too_many),
            Err(Error::Occupancy { .. })
        ));
        // Roots absent at this N are rejected.
        let s3 = spec(3);
        let sol3 = SpectralSolution::solve(&s3).unwrap();
        let absent = Occupancy {
            entries: vec![ManifoldOccupancy {
                mu: "2".into(),
                n: 1,
                count: 1,
            }],
        };
        assert!(matches!(
            energy_first_order(&s3, &sol3, &absent),
            Err(Error::Occupancy { .. })
        ));
    }

    #[test]
    fn negative_lambda_refused() {
        let mut s = spec(5);
        // Strongly negative radial curvature drives lambda- below zero.
        s.f.a = -40.0;
        let sol = SpectralSolution::solve(&s).unwrap();
        assert!(sol.lambda_min() < 0.0);
        let err = energy_first_order(&s, &sol, &Occupancy::ground()).unwrap_err();
        assert!(matches!(err, Error::UnstableMode { .. }));
        let q = DVector::zeros(s.p());
        assert!(matches!(
            phi0(&q, &sol, &Occupancy::ground()),
            Err(Error::UnstableMode { .. })
        ));
    }
}
