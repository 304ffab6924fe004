//! Reduction of the full eigenproblem to two 2x2 problems and a scalar,
//! and everything derived from the reduced solutions: frequencies, mixing
//! angles, normalization constants, multiplicities, and the normal-mode
//! coefficient functionals.
//!
//! The closed forms here never materialize a `P x P` matrix; the dense
//! congruence route (`sigma_congruence`) exists so the two can be compared
//! row by row.

use nalgebra::{DVector, Matrix2, RowDVector};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::assembly::{tilde_coefficients, BlockMatrix, TildeCoefficients};
use crate::basis::SymmetryBasis;
use crate::error::{Error, Result};
use crate::system::{Sector, Species, SystemSpec};

/// Reduced matrices of one species: either the coupled radial/angular 2x2
/// pair or a single scalar sector.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaPair {
    Coupled {
        species: Species,
        g: Matrix2<f64>,
        fg: Matrix2<f64>,
    },
    Scalar {
        species: Species,
        sector: Sector,
        g: f64,
        fg: f64,
    },
}

impl SigmaPair {
    pub fn species(&self) -> Species {
        match self {
            SigmaPair::Coupled { species, .. } | SigmaPair::Scalar { species, .. } => *species,
        }
    }
}

/// One reduced matrix from the dense congruence route.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaQ {
    Two(Matrix2<f64>),
    One(f64),
}

/// Closed-form reduced matrices for one species.
///
/// The `[N-1,1]` and `[N-2,2]` entries follow the derived reductions; the
/// `[N]` entries are the uniform-row congruence evaluated in closed form.
pub fn sigma_closed(species: Species, spec: &SystemSpec) -> Result<SigmaPair> {
    let t = tilde_coefficients(spec);
    sigma_closed_from_tilde(species, spec.n, &t)
}

pub fn sigma_closed_from_tilde(
    species: Species,
    n: usize,
    t: &TildeCoefficients,
) -> Result<SigmaPair> {
    let nf = n as f64;
    let m = (n * (n - 1) / 2) as f64;
    match species {
        Species::Trivial => Ok(SigmaPair::Coupled {
            species,
            g: Matrix2::new(
                t.a_prime,
                0.0,
                0.0,
                t.g_prime + 2.0 * (nf - 1.0) * t.h_prime,
            ),
            fg: Matrix2::new(
                t.a + nf * t.b,
                (m / nf).sqrt() * (2.0 * t.e + nf * t.f),
                (m / nf).sqrt() * (2.0 * t.c + nf * t.d),
                t.g + 2.0 * (nf - 1.0) * t.h + m * t.iota,
            ),
        }),
        Species::Standard => {
            if n >= 3 {
                Ok(SigmaPair::Coupled {
                    species,
                    g: Matrix2::new(t.a_prime, 0.0, 0.0, t.g_prime + (nf - 2.0) * t.h_prime),
                    fg: Matrix2::new(
                        t.a,
                        (nf - 2.0).sqrt() * t.e,
                        (nf - 2.0).sqrt() * t.c,
                        t.g + (nf - 2.0) * t.h,
                    ),
                })
            } else {
                // Two particles: the angular sector is pure [N], leaving a
                // single antisymmetric radial coordinate.
                Ok(SigmaPair::Scalar {
                    species,
                    sector: Sector::Radial,
                    g: t.a_prime,
                    fg: t.a,
                })
            }
        }
        Species::TwoRow => {
            if n >= 4 {
                Ok(SigmaPair::Scalar {
                    species,
                    sector: Sector::Angular,
                    g: t.g_prime,
                    fg: t.g,
                })
            } else {
                Err(Error::SpeciesAbsent { species, n })
            }
        }
    }
}

/// Reduced matrix of `q` for one species computed densely from row `xi`
/// (1-based) of the symmetry-coordinate blocks. Independent of `xi` when
/// the basis is correct; verification exploits exactly that.
pub fn sigma_congruence(
    species: Species,
    q: &BlockMatrix,
    basis: &SymmetryBasis,
    xi: usize,
) -> Result<SigmaQ> {
    let n = basis.n();
    let dim = species.dimension(n);
    if dim == 0 {
        return Err(Error::SpeciesAbsent { species, n });
    }
    if xi == 0 || xi > dim {
        return Err(Error::IndexDomain {
            what: "row label xi",
            got: xi,
            expected: format!("1..={dim}"),
        });
    }
    let radial = basis
        .sector_block(species, Sector::Radial)
        .map(|b| b.row(xi - 1).clone_owned());
    let angular = basis
        .sector_block(species, Sector::Angular)
        .map(|b| b.row(xi - 1).clone_owned());

    let quad = |left: &RowDVector<f64>, mid: &nalgebra::DMatrix<f64>, right: &RowDVector<f64>| {
        (left * mid * right.transpose())[(0, 0)]
    };

    match (radial, angular) {
        (Some(r), Some(g)) => Ok(SigmaQ::Two(Matrix2::new(
            quad(&r, &q.rr, &r),
            quad(&r, &q.rg, &g),
            quad(&g, &q.gr, &r),
            quad(&g, &q.gg, &g),
        ))),
        (Some(r), None) => Ok(SigmaQ::One(quad(&r, &q.rr, &r))),
        (None, Some(g)) => Ok(SigmaQ::One(quad(&g, &q.gg, &g))),
        (None, None) => Err(Error::SpeciesAbsent { species, n }),
    }
}

/// Eigen data of one coupled species: the `+` branch carries the plus sign
/// of the discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPair {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl BranchPair {
    pub fn lambda(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.lambda_plus,
            Branch::Minus => self.lambda_minus,
        }
    }

    pub fn theta(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.theta_plus,
            Branch::Minus => self.theta_minus,
        }
    }

    pub fn c(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.c_plus,
            Branch::Minus => self.c_minus,
        }
    }
}

/// Eigen data of one species.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SpeciesEigen {
    Coupled(BranchPair),
    Scalar { lambda: f64, c: f64, sector: Sector },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeciesSolution {
    pub species: Species,
    pub multiplicity: usize,
    pub eigen: SpeciesEigen,
}

/// Unit eigenvector angle of a 2x2 matrix for a known eigenvalue, chosen
/// with non-negative radial component (angle in (-pi/2, pi/2]).
fn eigenvector_angle(fg: &Matrix2<f64>, lambda: f64) -> Option<f64> {
    let v1 = (fg[(0, 1)], lambda - fg[(0, 0)]);
    let v2 = (lambda - fg[(1, 1)], fg[(1, 0)]);
    let n1 = v1.0.hypot(v1.1);
    let n2 = v2.0.hypot(v2.1);
    let (mut c, mut s) = if n1 >= n2 { v1 } else { v2 };
    let norm = c.hypot(s);
    if norm == 0.0 {
        return None;
    }
    c /= norm;
    s /= norm;
    if c < 0.0 || (c == 0.0 && s < 0.0) {
        c = -c;
        s = -s;
    }
    Some(s.atan2(c))
}

fn fold_angle(theta: f64) -> f64 {
    // Map into (-pi/2, pi/2].
    let mut t = theta;
    while t > std::f64::consts::FRAC_PI_2 {
        t -= std::f64::consts::PI;
    }
    while t <= -std::f64::consts::FRAC_PI_2 {
        t += std::f64::consts::PI;
    }
    t
}

fn normalization(g: &Matrix2<f64>, theta: f64) -> Result<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    let quad = g[(0, 0)] * c * c + (g[(0, 1)] + g[(1, 0)]) * c * s + g[(1, 1)] * s * s;
    if quad <= 0.0 {
        return Err(Error::SpdViolation {
            detail: format!("reduced kinetic form is {quad} at theta = {theta}"),
        });
    }
    Ok(1.0 / quad.sqrt())
}

/// Solves the reduced eigenproblem of one species.
pub fn solve_species(sigma: &SigmaPair) -> Result<SpeciesSolution> {
    match sigma {
        SigmaPair::Scalar {
            species,
            sector,
            g,
            fg,
        } => {
            if *g <= 0.0 {
                return Err(Error::SpdViolation {
                    detail: format!("sigma^G for {species} is {g} <= 0"),
                });
            }
            Ok(SpeciesSolution {
                species: *species,
                multiplicity: 0, // filled by caller with the carrier dimension
                eigen: SpeciesEigen::Scalar {
                    lambda: *fg,
                    c: 1.0 / g.sqrt(),
                    sector: *sector,
                },
            })
        }
        SigmaPair::Coupled { species, g, fg } => {
            let trace = fg[(0, 0)] + fg[(1, 1)];
            let diff = fg[(0, 0)] - fg[(1, 1)];
            let disc = diff * diff + 4.0 * fg[(0, 1)] * fg[(1, 0)];
            if disc < 0.0 {
                return Err(Error::UnstableStructure {
                    species: *species,
                    re: trace / 2.0,
                    im: (-disc).sqrt() / 2.0,
                });
            }
            let root = disc.sqrt();
            let lambda_plus = (trace + root) / 2.0;
            let lambda_minus = (trace - root) / 2.0;

            let (theta_plus, theta_minus) = if disc == 0.0 {
                // Degenerate pair: keep the + angle and take the - angle
                // orthogonal.
                let tp = eigenvector_angle(fg, lambda_plus).unwrap_or(0.0);
                (tp, fold_angle(tp + std::f64::consts::FRAC_PI_2))
            } else {
                let tp = eigenvector_angle(fg, lambda_plus).expect("split roots have eigenvectors");
                let tm =
                    eigenvector_angle(fg, lambda_minus).expect("split roots have eigenvectors");
                (tp, tm)
            };

            Ok(SpeciesSolution {
                species: *species,
                multiplicity: 0,
                eigen: SpeciesEigen::Coupled(BranchPair {
                    lambda_plus,
                    lambda_minus,
                    theta_plus,
                    theta_minus,
                    c_plus: normalization(g, theta_plus)?,
                    c_minus: normalization(g, theta_minus)?,
                }),
            })
        }
    }
}

/// Root branch within a coupled species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// Root label: a species together with its branch tag. Displayed as
/// `0+`, `0-`, `1+`, `1-`, `2`, or bare `1` when the `[N-1,1]` problem is
/// scalar (two particles).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mu {
    pub species: Species,
    pub branch: Option<Branch>,
}

impl Mu {
    pub const ZERO_PLUS: Mu = Mu {
        species: Species::Trivial,
        branch: Some(Branch::Plus),
    };
    pub const ZERO_MINUS: Mu = Mu {
        species: Species::Trivial,
        branch: Some(Branch::Minus),
    };
    pub const ONE_PLUS: Mu = Mu {
        species: Species::Standard,
        branch: Some(Branch::Plus),
    };
    pub const ONE_MINUS: Mu = Mu {
        species: Species::Standard,
        branch: Some(Branch::Minus),
    };
    pub const TWO: Mu = Mu {
        species: Species::TwoRow,
        branch: None,
    };
}

impl fmt::Display for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digit = match self.species {
            Species::Trivial => "0",
            Species::Standard => "1",
            Species::TwoRow => "2",
        };
        let sign = match self.branch {
            Some(Branch::Plus) => "+",
            Some(Branch::Minus) => "-",
            None => "",
        };
        write!(f, "{digit}{sign}")
    }
}

impl Serialize for Mu {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl FromStr for Mu {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Mu, String> {
        match s {
            "0+" => Ok(Mu::ZERO_PLUS),
            "0-" => Ok(Mu::ZERO_MINUS),
            "1+" => Ok(Mu::ONE_PLUS),
            "1-" => Ok(Mu::ONE_MINUS),
            "1" => Ok(Mu {
                species: Species::Standard,
                branch: None,
            }),
            "2" => Ok(Mu::TWO),
            other => Err(format!(
                "unknown root label '{other}' (expected 0+, 0-, 1+, 1-, 1, or 2)"
            )),
        }
    }
}

/// One normal mode in the flattened ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDescriptor {
    /// 1-based position in the stacked normal-coordinate vector.
    pub b: usize,
    pub mu: Mu,
    /// 1-based index within the root manifold.
    pub xi: usize,
    pub lambda: f64,
    /// `sqrt(lambda)` when the mode is stable.
    pub omega: Option<f64>,
}

/// Complete reduced solution for one system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSolution {
    pub n: usize,
    pub trivial: SpeciesSolution,
    pub standard: SpeciesSolution,
    pub two_row: Option<SpeciesSolution>,
}

impl SpectralSolution {
    /// Solves every present species from the closed-form reduced matrices.
    pub fn solve(spec: &SystemSpec) -> Result<SpectralSolution> {
        spec.validate()?;
        let n = spec.n;
        let mut trivial = solve_species(&sigma_closed(Species::Trivial, spec)?)?;
        trivial.multiplicity = Species::Trivial.dimension(n);
        let mut standard = solve_species(&sigma_closed(Species::Standard, spec)?)?;
        standard.multiplicity = Species::Standard.dimension(n);
        let two_row = if Species::TwoRow.present(n) {
            let mut s = solve_species(&sigma_closed(Species::TwoRow, spec)?)?;
            s.multiplicity = Species::TwoRow.dimension(n);
            Some(s)
        } else {
            None
        };
        Ok(SpectralSolution {
            n,
            trivial,
            standard,
            two_row,
        })
    }

    pub fn species(&self, species: Species) -> Option<&SpeciesSolution> {
        match species {
            Species::Trivial => Some(&self.trivial),
            Species::Standard => Some(&self.standard),
            Species::TwoRow => self.two_row.as_ref(),
        }
    }

    /// Number of internal coordinates.
    pub fn p(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// Distinct root labels in output order, with their values and
    /// multiplicities.
    pub fn roots(&self) -> Vec<(Mu, f64, usize)> {
        let mut out = Vec::with_capacity(5);
        for sol in [Some(&self.trivial), Some(&self.standard), self.two_row.as_ref()]
            .into_iter()
            .flatten()
        {
            match &sol.eigen {
                SpeciesEigen::Coupled(pair) => {
                    for branch in [Branch::Plus, Branch::Minus] {
                        out.push((
                            Mu {
                                species: sol.species,
                                branch: Some(branch),
                            },
                            pair.lambda(branch),
                            sol.multiplicity,
                        ));
                    }
                }
                SpeciesEigen::Scalar { lambda, .. } => {
                    out.push((
                        Mu {
                            species: sol.species,
                            branch: None,
                        },
                        *lambda,
                        sol.multiplicity,
                    ));
                }
            }
        }
        out
    }

    /// The full flattened mode list; its length is `P`.
    pub fn modes(&self) -> Vec<ModeDescriptor> {
        let mut out = Vec::with_capacity(self.p());
        let mut b = 1;
        for (mu, lambda, mult) in self.roots() {
            for xi in 1..=mult {
                out.push(ModeDescriptor {
                    b,
                    mu,
                    xi,
                    lambda,
                    omega: (lambda >= 0.0).then(|| lambda.sqrt()),
                });
                b += 1;
            }
        }
        out
    }

    /// Smallest root; negative means the structure is not a minimum.
    pub fn lambda_min(&self) -> f64 {
        self.roots()
            .into_iter()
            .map(|(_, l, _)| l)
            .fold(f64::INFINITY, f64::min)
    }

    /// Eigen data for a root label, if that root exists at this `n`.
    pub fn root_value(&self, mu: Mu) -> Option<f64> {
        self.roots()
            .into_iter()
            .find(|(label, _, _)| *label == mu)
            .map(|(_, l, _)| l)
    }

    /// Normal-coordinate functional applied to a symmetry-coordinate
    /// vector: `q_b = c (cos theta S_r + sin theta S_gamma)` per mode.
    pub fn project_symmetry(
        &self,
        s: &DVector<f64>,
        basis: &SymmetryBasis,
    ) -> Result<DVector<f64>> {
        let p = self.p();
        if s.len() != p {
            return Err(Error::DimensionMismatch {
                what: "symmetry coordinate vector",
                expected: p,
                got: s.len(),
            });
        }
        let mut q = DVector::zeros(p);
        for (slot, mode) in self.modes().iter().enumerate() {
            let sol = self
                .species(mode.mu.species)
                .expect("modes() only lists present species");
            q[slot] = match (&sol.eigen, mode.mu.branch) {
                (SpeciesEigen::Coupled(pair), Some(branch)) => {
                    let r_row = basis
                        .row_range(mode.mu.species, Sector::Radial)
                        .expect("coupled species has a radial sector");
                    let g_row = basis
                        .row_range(mode.mu.species, Sector::Angular)
                        .expect("coupled species has an angular sector");
                    let theta = pair.theta(branch);
                    pair.c(branch)
                        * (theta.cos() * s[r_row.start + mode.xi - 1]
                            + theta.sin() * s[g_row.start + mode.xi - 1])
                }
                (SpeciesEigen::Scalar { c, sector, .. }, None) => {
                    let row = basis
                        .row_range(mode.mu.species, *sector)
                        .expect("scalar species sector exists");
                    c * s[row.start + mode.xi - 1]
                }
                _ => unreachable!("branch tags always match the eigen shape"),
            };
        }
        Ok(q)
    }

    /// Normal coordinates of an internal displacement vector.
    pub fn project_internal(
        &self,
        y: &DVector<f64>,
        basis: &SymmetryBasis,
    ) -> Result<DVector<f64>> {
        let s = basis.to_symmetry(y)?;
        self.project_symmetry(&s, basis)
    }

    /// Full-space coefficient vectors expressed over symmetry coordinates;
    /// `b`-th vector `c` satisfies `q_b = c . S`. Support of each vector is
    /// confined to its species block.
    pub fn coefficient_vectors(&self, basis: &SymmetryBasis) -> Vec<DVector<f64>> {
        let p = self.p();
        let mut out = Vec::with_capacity(p);
        for mode in self.modes() {
            let sol = self.species(mode.mu.species).expect("species present");
            let mut c_vec = DVector::zeros(p);
            match (&sol.eigen, mode.mu.branch) {
                (SpeciesEigen::Coupled(pair), Some(branch)) => {
                    let r_row = basis.row_range(mode.mu.species, Sector::Radial).unwrap();
                    let g_row = basis.row_range(mode.mu.species, Sector::Angular).unwrap();
                    let theta = pair.theta(branch);
                    let c = pair.c(branch);
                    c_vec[r_row.start + mode.xi - 1] = c * theta.cos();
                    c_vec[g_row.start + mode.xi - 1] = c * theta.sin();
                }
                (SpeciesEigen::Scalar { c, sector, .. }, None) => {
                    let row = basis.row_range(mode.mu.species, *sector).unwrap();
                    c_vec[row.start + mode.xi - 1] = *c;
                }
                _ => unreachable!(),
            }
            out.push(c_vec);
        }
        out
    }
}
