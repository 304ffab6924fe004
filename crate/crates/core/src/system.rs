//! Input data model, validation, and the canonical index maps shared by the
//! rest of the crate.
//!
//! Internal coordinates are the `N` radii followed by the `M = N(N-1)/2`
//! angle cosines, ordered `(1,2), (1,3), (2,3), (1,4), ...` (sorted by the
//! larger particle index, then the smaller). All public indices are 1-based;
//! storage is 0-based.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Hessian block coefficients `F_a ... F_iota` (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub iota: f64,
}

/// Kinetic block coefficients `G_a`, `G_g`, `G_h` (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GCoefficients {
    pub a: f64,
    pub g: f64,
    pub h: f64,
}

/// Scalar inputs of one confined `N`-body problem.
///
/// The JSON form mirrors the fields exactly:
/// `{"N": 6, "F": {"a": ..., "iota": ...}, "G": {...}, "delta": ...,
///   "v0": ..., "E_inf": ..., "r_inf": ..., "gamma_inf": ..., "a_ho": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    /// Particle count.
    #[serde(rename = "N")]
    pub n: usize,
    /// Hessian block coefficients.
    #[serde(rename = "F")]
    pub f: FCoefficients,
    /// Kinetic block coefficients.
    #[serde(rename = "G")]
    pub g: GCoefficients,
    /// Perturbation parameter, the inverse dimension; in (0, 1].
    pub delta: f64,
    /// Constant first-order energy shift.
    pub v0: f64,
    /// Infinite-dimension energy.
    #[serde(rename = "E_inf")]
    pub e_inf: f64,
    /// Scaled equilibrium radius.
    pub r_inf: f64,
    /// Equilibrium angle cosine, in (-1, 1).
    pub gamma_inf: f64,
    /// Oscillator length used when unscaling displacements; > 0.
    pub a_ho: f64,
}

impl SystemSpec {
    /// Checks every field constraint, returning the spec unchanged on success.
    pub fn validated(self) -> Result<SystemSpec> {
        self.validate()?;
        Ok(self)
    }

    /// Checks every field constraint.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Validation {
                field: "N",
                constraint: "N >= 2",
                value: self.n.to_string(),
            });
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Validation {
                field: "delta",
                constraint: "delta in (0, 1]",
                value: self.delta.to_string(),
            });
        }
        if !(self.a_ho > 0.0) {
            return Err(Error::Validation {
                field: "a_ho",
                constraint: "a_ho > 0",
                value: self.a_ho.to_string(),
            });
        }
        if !(self.gamma_inf > -1.0 && self.gamma_inf < 1.0) {
            return Err(Error::Validation {
                field: "gamma_inf",
                constraint: "gamma_inf in (-1, 1)",
                value: self.gamma_inf.to_string(),
            });
        }
        let fields: [(&'static str, f64); 18] = [
            ("F.a", self.f.a),
            ("F.b", self.f.b),
            ("F.c", self.f.c),
            ("F.d", self.f.d),
            ("F.e", self.f.e),
            ("F.f", self.f.f),
            ("F.g", self.f.g),
            ("F.h", self.f.h),
            ("F.iota", self.f.iota),
            ("G.a", self.g.a),
            ("G.g", self.g.g),
            ("G.h", self.g.h),
            ("delta", self.delta),
            ("v0", self.v0),
            ("E_inf", self.e_inf),
            ("r_inf", self.r_inf),
            ("gamma_inf", self.gamma_inf),
            ("a_ho", self.a_ho),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Validation {
                    field: name,
                    constraint: "finite",
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Inverse dimension written as a dimension: `D = 1/delta`.
    ///
    /// Non-integer D is accepted; the expansion treats delta continuously.
    pub fn dimension(&self) -> f64 {
        1.0 / self.delta
    }

    /// Number of internal coordinates `P = N(N+1)/2`.
    pub fn p(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// Number of angle-cosine coordinates `M = N(N-1)/2`.
    pub fn m(&self) -> usize {
        self.n * (self.n - 1) / 2
    }
}

/// Irreducible-representation label under which a set of coordinates
/// transforms: the partitions `[N]`, `[N-1,1]`, `[N-2,2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Species {
    /// Partition `[N]`: the 1-dimensional symmetric carrier.
    Trivial,
    /// Partition `[N-1,1]`: the (N-1)-dimensional carrier.
    Standard,
    /// Partition `[N-2,2]`: the N(N-3)/2-dimensional, purely angular carrier.
    TwoRow,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::Trivial, Species::Standard, Species::TwoRow];

    /// Dimension (multiplicity) of the carrier at particle count `n`.
    pub fn dimension(self, n: usize) -> usize {
        match self {
            Species::Trivial => 1,
            Species::Standard => n - 1,
            Species::TwoRow => {
                if n < 4 {
                    0
                } else {
                    n * (n - 3) / 2
                }
            }
        }
    }

    /// Whether the species carries any coordinates at all for this `n`.
    pub fn present(self, n: usize) -> bool {
        self.dimension(n) > 0
    }

    /// Whether the species has a radial sector.
    pub fn has_radial(self) -> bool {
        !matches!(self, Species::TwoRow)
    }

    /// Whether the species has an angular sector at this `n`.
    ///
    /// The `[N-1,1]` angular carrier needs at least three particles: with
    /// N=2 the single angle cosine is purely symmetric.
    pub fn has_angular(self, n: usize) -> bool {
        match self {
            Species::Trivial => true,
            Species::Standard => n >= 3,
            Species::TwoRow => n >= 4,
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Species::Trivial => write!(f, "[N]"),
            Species::Standard => write!(f, "[N-1,1]"),
            Species::TwoRow => write!(f, "[N-2,2]"),
        }
    }
}

/// Coordinate sector within a species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    Radial,
    Angular,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Radial => write!(f, "r"),
            Sector::Angular => write!(f, "gamma"),
        }
    }
}

/// Dimensions of the three species at a given particle count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpeciesDimensions {
    pub trivial: usize,
    pub standard: usize,
    pub two_row: usize,
}

/// Carrier dimensions `(1, N-1, N(N-3)/2)`.
///
/// The `[N-2,2]` entry is zero for N = 3 and the species is absent below
/// N = 4; absence is a state, not an error.
pub fn species_dimensions(n: usize) -> Result<SpeciesDimensions> {
    if n < 2 {
        return Err(Error::Validation {
            field: "N",
            constraint: "N >= 2",
            value: n.to_string(),
        });
    }
    Ok(SpeciesDimensions {
        trivial: 1,
        standard: n - 1,
        two_row: Species::TwoRow.dimension(n),
    })
}

/// Linear index of the angle cosine for particles `i < j`, 1-based,
/// following the column ordering (1,2), (1,3), (2,3), (1,4), ...
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i == 0 || i >= j || j > n {
        return Err(Error::PairIndexDomain { i, j, n });
    }
    Ok((j - 1) * (j - 2) / 2 + i)
}

/// Inverse of [`pair_index`]: the 1-based particle pair at linear index `p`.
pub fn pair_label(p: usize, n: usize) -> Result<(usize, usize)> {
    let m = n * (n - 1) / 2;
    if p == 0 || p > m {
        return Err(Error::IndexDomain {
            what: "pair linear index",
            got: p,
            expected: format!("1..={m}"),
        });
    }
    // Smallest j with (j-1)(j-2)/2 >= p determines the block.
    let mut j = 2;
    while j * (j - 1) / 2 < p {
        j += 1;
    }
    let i = p - (j - 1) * (j - 2) / 2;
    Ok((i, j))
}

/// Iterator over all pairs `(i, j)`, `1 <= i < j <= n`, in linear order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (2..=n).flat_map(move |j| (1..j).map(move |i| (i, j)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_spec(n: usize) -> SystemSpec {
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

    #[test]
    fn pair_index_matches_displayed_ordering() {
        assert_eq!(pair_index(1, 2, 4).unwrap(), 1);
        assert_eq!(pair_index(2, 3, 4).unwrap(), 3);
        assert_eq!(pair_index(1, 4, 4).unwrap(), 4);
    }

    #[test]
    fn pair_index_enumeration_oracle() {
        // Enumerate the ordering (sorted by j, then i) and compare.
        for n in 2..=12 {
            let mut expected = 0;
            for j in 2..=n {
                for i in 1..j {
                    expected += 1;
                    assert_eq!(pair_index(i, j, n).unwrap(), expected);
                    assert_eq!(pair_label(expected, n).unwrap(), (i, j));
                }
            }
            assert_eq!(expected, n * (n - 1) / 2);
        }
    }

    #[test]
    fn pair_index_bijective_up_to_64() {
        for n in 2..=64 {
            let m = n * (n - 1) / 2;
            let mut seen = vec![false; m + 1];
            for (i, j) in pairs(n) {
                let p = pair_index(i, j, n).unwrap();
                assert!(p >= 1 && p <= m);
                assert!(!seen[p], "duplicate index {p} for N={n}");
                seen[p] = true;
            }
            assert!(seen[1..].iter().all(|&s| s));
        }
    }

    #[test]
    fn pair_index_domain_errors() {
        assert!(pair_index(2, 2, 4).is_err());
        assert!(pair_index(3, 2, 4).is_err());
        assert!(pair_index(1, 5, 4).is_err());
        assert!(pair_index(0, 1, 4).is_err());
    }

    #[test]
    fn species_dimensions_match_multiplicity_formulas() {
        let d = species_dimensions(10).unwrap();
        assert_eq!((d.trivial, d.standard, d.two_row), (1, 9, 35));
        let d = species_dimensions(3).unwrap();
        assert_eq!((d.trivial, d.standard, d.two_row), (1, 2, 0));
        let d = species_dimensions(4).unwrap();
        assert_eq!((d.trivial, d.standard, d.two_row), (1, 3, 2));
        assert!(species_dimensions(1).is_err());
    }

    #[test]
    fn dimension_counting_identities() {
        // The second identity needs the raw signed formula: at N=2 the
        // [N-2,2] dimension formula evaluates to -1 while the species is
        // reported absent.
        for n in 2i64..=40 {
            let d = species_dimensions(n as usize).unwrap();
            assert_eq!(d.trivial + d.standard, n as usize);
            let two_row_formula = n * (n - 3) / 2;
            assert_eq!(
                1 + (n - 1) + two_row_formula,
                n * (n - 1) / 2,
                "gamma-sector counting identity at N={n}"
            );
            if n >= 3 {
                assert_eq!(d.two_row as i64, two_row_formula);
            }
        }
    }

    #[test]
    fn validate_accepts_and_reports_counts() {
        let spec = sample_spec(6).validated().unwrap();
        assert_eq!(spec.p(), 21);
        assert_eq!(spec.m(), 15);
    }

    #[test]
    fn validate_rejects_small_n() {
        let err = sample_spec(1).validated().unwrap_err();
        assert!(matches!(err, Error::Validation { field: "N", .. }));
    }

    #[test]
    fn validate_rejects_zero_delta() {
        let mut spec = sample_spec(6);
        spec.delta = 0.0;
        let err = spec.validated().unwrap_err();
        assert!(matches!(err, Error::Validation { field: "delta", .. }));
    }

    #[test]
    fn json_round_trip_uses_paper_field_names() {
        let spec = sample_spec(4);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"N\":4"));
        assert!(text.contains("\"E_inf\""));
        assert!(text.contains("\"iota\""));
        let back: SystemSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
