//! Particle motions in internal coordinates: the equilibrium configuration,
//! the displacement field of a single symmetry coordinate, and the
//! displacement field of a single normal mode.
//!
//! Displacements come in two unit systems. `Scaled` values are the primed
//! displacement coordinates themselves; `Unscaled` values carry the
//! oscillator length and the dimension factors (`a_ho D^{3/2}` on radii,
//! `D^{-1/2}` on angle cosines), with the equilibrium radii at
//! `D^2 a_ho r_inf`.

use nalgebra::DVector;

use crate::basis::SymmetryBasis;
use crate::error::{Error, Result};
use crate::spectral::{Branch, Mu, SpeciesEigen, SpectralSolution};
use crate::system::{Sector, Species, SystemSpec};

/// Displacement field over the internal coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMotion {
    /// Radii part, length `N`.
    pub r: DVector<f64>,
    /// Angle-cosine part, length `M`.
    pub gamma: DVector<f64>,
}

impl ModeMotion {
    pub fn zeros(n: usize) -> ModeMotion {
        ModeMotion {
            r: DVector::zeros(n),
            gamma: DVector::zeros(n * (n - 1) / 2),
        }
    }

    /// Stacks the two parts into a single length-`P` vector.
    pub fn stacked(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.r.len() + self.gamma.len());
        out.rows_mut(0, self.r.len()).copy_from(&self.r);
        out.rows_mut(self.r.len(), self.gamma.len())
            .copy_from(&self.gamma);
        out
    }

    pub fn add_assign(&mut self, other: &ModeMotion) {
        self.r += &other.r;
        self.gamma += &other.gamma;
    }
}

/// Output unit system for displacement fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// Primed (barred) displacement coordinates.
    Scaled,
    /// Physical internal coordinates about the equilibrium configuration.
    Unscaled,
}

fn radial_prefactor(spec: &SystemSpec, scaling: Scaling) -> f64 {
    match scaling {
        Scaling::Scaled => 1.0,
        Scaling::Unscaled => spec.a_ho * spec.dimension().powf(1.5),
    }
}

fn angular_prefactor(spec: &SystemSpec, scaling: Scaling) -> f64 {
    match scaling {
        Scaling::Scaled => 1.0,
        Scaling::Unscaled => 1.0 / spec.dimension().sqrt(),
    }
}

/// Equilibrium configuration: all radii equal, all angle cosines equal.
pub fn lewis_structure(spec: &SystemSpec) -> ModeMotion {
    let d = spec.dimension();
    ModeMotion {
        r: DVector::from_element(spec.n, d * d * spec.a_ho * spec.r_inf),
        gamma: DVector::from_element(spec.m(), spec.gamma_inf),
    }
}

/// Displacement field of one symmetry coordinate set to the value
/// `s_value`, all others zero.
pub fn symmetry_motion(
    spec: &SystemSpec,
    basis: &SymmetryBasis,
    species: Species,
    sector: Sector,
    xi: usize,
    s_value: f64,
    scaling: Scaling,
) -> Result<ModeMotion> {
    let block = basis
        .sector_block(species, sector)
        .ok_or(Error::SpeciesAbsent { species, n: spec.n })?;
    if xi == 0 || xi > block.nrows() {
        return Err(Error::IndexDomain {
            what: "symmetry coordinate row xi",
            got: xi,
            expected: format!("1..={}", block.nrows()),
        });
    }
    let mut motion = ModeMotion::zeros(spec.n);
    let row = block.row(xi - 1);
    match sector {
        Sector::Radial => {
            let pre = radial_prefactor(spec, scaling) * s_value;
            motion.r.copy_from(&row.transpose().map(|v| pre * v));
        }
        Sector::Angular => {
            let pre = angular_prefactor(spec, scaling) * s_value;
            motion.gamma.copy_from(&row.transpose().map(|v| pre * v));
        }
    }
    Ok(motion)
}

/// Per-branch factors of the inverse 2x2 mixing. `s = sin(theta+ - theta-)`
/// is the determinant that makes the mode-to-internal map the exact inverse
/// of the normal-coordinate projection.
fn inverse_mixing_factors(pair: &crate::spectral::BranchPair, branch: Branch) -> Result<(f64, f64)> {
    let s = (pair.theta_plus - pair.theta_minus).sin();
    if s.abs() < 1e-12 {
        return Err(Error::DegenerateBasis {
            species: Species::Standard,
            s_abs: s.abs(),
        });
    }
    Ok(match branch {
        Branch::Plus => (
            -pair.theta_minus.sin() / (s * pair.c_plus),
            pair.theta_minus.cos() / (s * pair.c_plus),
        ),
        Branch::Minus => (
            pair.theta_plus.sin() / (s * pair.c_minus),
            -pair.theta_plus.cos() / (s * pair.c_minus),
        ),
    })
}

/// Displacement field of one normal mode excited to coordinate value
/// `q_value`, all other modes zero.
pub fn normal_mode_motion(
    spec: &SystemSpec,
    basis: &SymmetryBasis,
    solution: &SpectralSolution,
    mu: Mu,
    xi: usize,
    q_value: f64,
    scaling: Scaling,
) -> Result<ModeMotion> {
    let sol = solution
        .species(mu.species)
        .ok_or(Error::SpeciesAbsent {
            species: mu.species,
            n: spec.n,
        })?;
    if xi == 0 || xi > sol.multiplicity {
        return Err(Error::IndexDomain {
            what: "mode index xi",
            got: xi,
            expected: format!("1..={}", sol.multiplicity),
        });
    }
    let mut motion = ModeMotion::zeros(spec.n);
    match (&sol.eigen, mu.branch) {
        (SpeciesEigen::Coupled(pair), Some(branch)) => {
            let (fr, fg) = inverse_mixing_factors(pair, branch)
                .map_err(|e| match e {
                    Error::DegenerateBasis { s_abs, .. } => Error::DegenerateBasis {
                        species: mu.species,
                        s_abs,
                    },
                    other => other,
                })?;
            let r_block = basis
                .sector_block(mu.species, Sector::Radial)
                .expect("coupled species has a radial block");
            let g_block = basis
                .sector_block(mu.species, Sector::Angular)
                .expect("coupled species has an angular block");
            let pre_r = radial_prefactor(spec, scaling) * fr * q_value;
            let pre_g = angular_prefactor(spec, scaling) * fg * q_value;
            motion
                .r
                .copy_from(&r_block.row(xi - 1).transpose().map(|v| pre_r * v));
            motion
                .gamma
                .copy_from(&g_block.row(xi - 1).transpose().map(|v| pre_g * v));
        }
        (SpeciesEigen::Scalar { c, sector, .. }, None) => {
            let block = basis
                .sector_block(mu.species, *sector)
                .expect("scalar species sector exists");
            let pre = match sector {
                Sector::Radial => radial_prefactor(spec, scaling),
                Sector::Angular => angular_prefactor(spec, scaling),
            } * q_value
                / c;
            let values = block.row(xi - 1).transpose().map(|v| pre * v);
            match sector {
                Sector::Radial => motion.r.copy_from(&values),
                Sector::Angular => motion.gamma.copy_from(&values),
            }
        }
        (SpeciesEigen::Coupled(_), None) => {
            return Err(Error::Occupancy {
                mu: mu.to_string(),
                detail: "coupled species requires a branch tag".into(),
            })
        }
        (SpeciesEigen::Scalar { .. }, Some(_)) => {
            return Err(Error::Occupancy {
                mu: mu.to_string(),
                detail: "scalar species carries no branch tag".into(),
            })
        }
    }
    Ok(motion)
}

/// Sums every mode's displacement field for a full normal-coordinate
/// vector `q` (flattened mode ordering); the inverse of projection.
pub fn reconstruct_internal(
    spec: &SystemSpec,
    basis: &SymmetryBasis,
    solution: &SpectralSolution,
    q: &DVector<f64>,
    scaling: Scaling,
) -> Result<ModeMotion> {
    let p = spec.p();
    if q.len() != p {
        return Err(Error::DimensionMismatch {
            what: "normal coordinate vector",
            expected: p,
            got: q.len(),
        });
    }
    let mut total = ModeMotion::zeros(spec.n);
    for (slot, mode) in solution.modes().iter().enumerate() {
        if q[slot] == 0.0 {
            continue;
        }
        let part = normal_mode_motion(spec, basis, solution, mode.mu, mode.xi, q[slot], scaling)?;
        total.add_assign(&part);
    }
    Ok(total)
}

/// Physical internal coordinates for a normal-coordinate vector:
/// equilibrium plus the unscaled displacement sum.
pub fn total_configuration(
    spec: &SystemSpec,
    basis: &SymmetryBasis,
    solution: &SpectralSolution,
    q: &DVector<f64>,
) -> Result<ModeMotion> {
    let mut total = lewis_structure(spec);
    let displacement = reconstruct_internal(spec, basis, solution, q, Scaling::Unscaled)?;
    total.add_assign(&displacement);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{pair_index, FCoefficients, GCoefficients};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;

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
            a_ho: 1.3,
        }
    }

    #[test]
    fn lewis_structure_is_uniform() {
        let s = spec(5);
        let lewis = lewis_structure(&s);
        let d = 4.0;
        for i in 0..5 {
            assert_abs_diff_eq!(lewis.r[i], d * d * 1.3 * 1.05, epsilon = 1e-12);
        }
        for p in 0..10 {
            assert_eq!(lewis.gamma[p], -0.2);
        }
        // gamma_inf = 0 zeroes the angular part.
        let mut s0 = s.clone();
        s0.gamma_inf = 0.0;
        assert_eq!(lewis_structure(&s0).gamma.amax(), 0.0);
    }

    #[test]
    fn first_radial_symmetry_motion_moves_two_particles() {
        let s = spec(6);
        let basis = SymmetryBasis::new(6).unwrap();
        let m = symmetry_motion(&s, &basis, Species::Standard, Sector::Radial, 1, 1.0, Scaling::Scaled)
            .unwrap();
        assert_abs_diff_eq!(m.r[0], -m.r[1], epsilon = 1e-15);
        assert!(m.r.rows(2, 4).amax() == 0.0);
        assert_eq!(m.gamma.amax(), 0.0);
    }

    #[test]
    fn radial_symmetry_motion_weights_last_particle_by_xi() {
        let s = spec(6);
        let basis = SymmetryBasis::new(6).unwrap();
        for xi in 1..=5usize {
            let m = symmetry_motion(
                &s,
                &basis,
                Species::Standard,
                Sector::Radial,
                xi,
                1.0,
                Scaling::Scaled,
            )
            .unwrap();
            assert_abs_diff_eq!(m.r[xi], -(xi as f64) * m.r[0], epsilon = 1e-13);
            // Only the first xi+1 particles move.
            for i in xi + 1..6 {
                assert_eq!(m.r[i], 0.0);
            }
        }
    }

    #[test]
    fn angular_standard_motion_n4_untouched_pairs() {
        let s = spec(4);
        let basis = SymmetryBasis::new(4).unwrap();
        let m = symmetry_motion(
            &s,
            &basis,
            Species::Standard,
            Sector::Angular,
            1,
            1.0,
            Scaling::Scaled,
        )
        .unwrap();
        let p12 = pair_index(1, 2, 4).unwrap() - 1;
        let p34 = pair_index(3, 4, 4).unwrap() - 1;
        assert_eq!(m.gamma[p12], 0.0);
        assert_eq!(m.gamma[p34], 0.0);
        assert_eq!(m.r.amax(), 0.0);
    }

    #[test]
    fn unscaled_prefactors() {
        let s = spec(4); // D = 4
        let basis = SymmetryBasis::new(4).unwrap();
        let scaled = symmetry_motion(&s, &basis, Species::Standard, Sector::Radial, 1, 2.0, Scaling::Scaled)
            .unwrap();
        let unscaled =
            symmetry_motion(&s, &basis, Species::Standard, Sector::Radial, 1, 2.0, Scaling::Unscaled)
                .unwrap();
        let d: f64 = 4.0;
        assert_abs_diff_eq!(unscaled.r[0], s.a_ho * d.powf(1.5) * scaled.r[0], epsilon = 1e-12);
        let scaled_g =
            symmetry_motion(&s, &basis, Species::Trivial, Sector::Angular, 1, 2.0, Scaling::Scaled)
                .unwrap();
        let unscaled_g =
            symmetry_motion(&s, &basis, Species::Trivial, Sector::Angular, 1, 2.0, Scaling::Unscaled)
                .unwrap();
        assert_abs_diff_eq!(
            unscaled_g.gamma[0],
            scaled_g.gamma[0] / d.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn two_row_mode_has_zero_radial_part() {
        let s = spec(5);
        let basis = SymmetryBasis::new(5).unwrap();
        let sol = crate::spectral::SpectralSolution::solve(&s).unwrap();
        let m = normal_mode_motion(&s, &basis, &sol, Mu::TWO, 3, 1.7, Scaling::Unscaled).unwrap();
        assert_eq!(m.r.amax(), 0.0);
        assert!(m.gamma.amax() > 0.0);
    }

    #[test]
    fn mode_round_trip_through_projection() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 3, 4, 6, 9] {
            let s = spec(n);
            let basis = SymmetryBasis::new(n).unwrap();
            let sol = crate::spectral::SpectralSolution::solve(&s).unwrap();
            let q = nalgebra::DVector::from_fn(s.p(), |_, _| rng.random_range(-1.0..1.0));
            let y = reconstruct_internal(&s, &basis, &sol, &q, Scaling::Scaled).unwrap();
            let back = sol.project_internal(&y.stacked(), &basis).unwrap();
            assert!(
                (&back - &q).amax() < 1e-10,
                "N={n}: round-trip residual {}",
                (&back - &q).amax()
            );
        }
    }

    #[test]
    fn pure_radial_decoupling_moves_only_radii() {
        // Zero radial-angular coupling: theta+ = 0 or pi/2 exactly; the
        // branch whose angle is 0 moves only radii.
        let mut s = spec(5);
        s.f.e = 0.0;
        s.f.f = 0.0;
        s.f.c = 0.0;
        s.f.d = 0.0;
        let basis = SymmetryBasis::new(5).unwrap();
        let sol = crate::spectral::SpectralSolution::solve(&s).unwrap();
        let pair = match &sol.standard.eigen {
            crate::spectral::SpeciesEigen::Coupled(p) => *p,
            _ => panic!(),
        };
        let radial_branch = if pair.theta_plus.abs() < 1e-14 {
            Mu::ONE_PLUS
        } else {
            assert!(pair.theta_minus.abs() < 1e-14);
            Mu::ONE_MINUS
        };
        let m = normal_mode_motion(&s, &basis, &sol, radial_branch, 2, 1.0, Scaling::Scaled).unwrap();
        assert!(m.r.amax() > 0.0);
        assert!(m.gamma.amax() < 1e-13);
    }

    #[test]
    fn gamma_rows_sum_to_zero_for_nontrivial_species() {
        let basis = SymmetryBasis::new(7).unwrap();
        for (species, block) in [
            (Species::Standard, basis.w_g_standard.as_ref().unwrap()),
            (Species::TwoRow, &basis.w_g_two_row),
        ] {
            for row in 0..block.nrows() {
                let sum: f64 = block.row(row).iter().sum();
                assert!(
                    sum.abs() < 1e-13,
                    "{species} angular row {row} sums to {sum}"
                );
            }
        }
    }

    #[test]
    fn invalid_xi_rejected() {
        let s = spec(4);
        let basis = SymmetryBasis::new(4).unwrap();
        let sol = crate::spectral::SpectralSolution::solve(&s).unwrap();
        assert!(matches!(
            normal_mode_motion(&s, &basis, &sol, Mu::TWO, 3, 1.0, Scaling::Scaled),
            Err(Error::IndexDomain { .. })
        ));
        assert!(matches!(
            symmetry_motion(&s, &basis, Species::Standard, Sector::Radial, 4, 1.0, Scaling::Scaled),
            Err(Error::IndexDomain { .. })
        ));
    }
}
