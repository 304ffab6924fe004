//! Serialization of results into the stable JSON and CSV shapes emitted by
//! the command-line interface. Every JSON document echoes the resolved
//! input record under `"spec"` for provenance.

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::assembly::tilde_coefficients;
use crate::basis::SymmetryBasis;
use crate::error::Result;
use crate::motion::ModeMotion;
use crate::spectral::{SpeciesEigen, SpectralSolution};
use crate::system::{pair_label, Sector, Species, SystemSpec};
use crate::verify::VerifyReport;

fn spec_value(spec: &SystemSpec) -> Value {
    serde_json::to_value(spec).expect("spec serializes")
}

/// Frequencies, angles, normalization constants, and multiplicities keyed
/// by root label, plus the flattened per-mode table.
pub fn modes_json(spec: &SystemSpec, solution: &SpectralSolution) -> Value {
    let mut roots = Map::new();
    for (mu, lambda, multiplicity) in solution.roots() {
        let sol = solution.species(mu.species).expect("root species present");
        let (theta, c) = match (&sol.eigen, mu.branch) {
            (SpeciesEigen::Coupled(pair), Some(branch)) => {
                (Some(pair.theta(branch)), pair.c(branch))
            }
            (SpeciesEigen::Scalar { c, .. }, None) => (None, *c),
            _ => unreachable!("branch tags match the eigen shape"),
        };
        roots.insert(
            mu.to_string(),
            json!({
                "lambda": lambda,
                "omega": (lambda >= 0.0).then(|| lambda.sqrt()),
                "stable": lambda >= 0.0,
                "theta": theta,
                "c": c,
                "multiplicity": multiplicity,
            }),
        );
    }
    if !Species::TwoRow.present(spec.n) {
        roots.insert(
            "2".into(),
            json!({ "absent": true, "multiplicity": 0 }),
        );
    }
    let modes: Vec<Value> = solution
        .modes()
        .iter()
        .map(|m| {
            json!({
                "b": m.b,
                "mu": m.mu.to_string(),
                "xi": m.xi,
                "lambda": m.lambda,
                "omega": m.omega,
            })
        })
        .collect();
    json!({
        "spec": spec_value(spec),
        "P": spec.p(),
        "M": spec.m(),
        "roots": Value::Object(roots),
        "modes": modes,
    })
}

/// Verification report; timings are deliberately excluded so identical
/// seeds produce byte-identical documents.
pub fn verify_json(spec: &SystemSpec, report: &VerifyReport) -> Value {
    json!({
        "spec": spec_value(spec),
        "report": report,
    })
}

/// Twelve invariant scalars of the product matrix.
pub fn blocks_json(spec: &SystemSpec) -> Value {
    let t = tilde_coefficients(spec);
    json!({
        "N": spec.n,
        "blocks": {
            "a": t.a, "b": t.b, "c": t.c, "d": t.d, "e": t.e, "f": t.f,
            "g": t.g, "h": t.h, "iota": t.iota,
            "a_prime": t.a_prime, "g_prime": t.g_prime, "h_prime": t.h_prime,
        },
    })
}

/// Row-major CSV of a dense matrix.
pub fn matrix_csv(matrix: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in 0..matrix.nrows() {
        for col in 0..matrix.ncols() {
            if col > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.17e}", matrix[(row, col)]));
        }
        out.push('\n');
    }
    out
}

/// CSV of one symmetry-coordinate block with labeled columns.
pub fn w_block_csv(basis: &SymmetryBasis, species: Species, sector: Sector) -> Result<String> {
    let block = basis
        .sector_block(species, sector)
        .ok_or(crate::error::Error::SpeciesAbsent {
            species,
            n: basis.n(),
        })?;
    let mut out = format!("# W {species} {sector}\n");
    out.push_str("xi");
    match sector {
        Sector::Radial => {
            for i in 1..=basis.n() {
                out.push_str(&format!(",r{i}"));
            }
        }
        Sector::Angular => {
            for p in 1..=basis.m() {
                let (i, j) = pair_label(p, basis.n())?;
                out.push_str(&format!(",g{i}_{j}"));
            }
        }
    }
    out.push('\n');
    for row in 0..block.nrows() {
        out.push_str(&row_label(basis, species, row));
        for col in 0..block.ncols() {
            out.push_str(&format!(",{:.17e}", block[(row, col)]));
        }
        out.push('\n');
    }
    Ok(out)
}

fn row_label(basis: &SymmetryBasis, species: Species, row: usize) -> String {
    if species == Species::TwoRow {
        let (i, j) = basis.two_row_labels[row];
        format!("{i}_{j}")
    } else {
        format!("{}", row + 1)
    }
}

/// Displacement table: one line per internal coordinate.
pub fn motion_csv(spec: &SystemSpec, motion: &ModeMotion) -> Result<String> {
    let mut out = format!(
        "# spec {}\nkind,i,j,displacement\n",
        serde_json::to_string(spec).expect("spec serializes")
    );
    for i in 0..spec.n {
        out.push_str(&format!("r,{},,{:.17e}\n", i + 1, motion.r[i]));
    }
    for p in 0..spec.m() {
        let (i, j) = pair_label(p + 1, spec.n)?;
        out.push_str(&format!("gamma,{i},{j},{:.17e}\n", motion.gamma[p]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{FCoefficients, GCoefficients};

    fn spec() -> SystemSpec {
        SystemSpec {
            n: 4,
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
    fn modes_json_has_five_roots_and_p_modes() {
        let s = spec();
        let sol = SpectralSolution::solve(&s).unwrap();
        let doc = modes_json(&s, &sol);
        assert_eq!(doc["roots"].as_object().unwrap().len(), 5);
        assert_eq!(doc["modes"].as_array().unwrap().len(), 10);
        assert_eq!(doc["spec"]["N"], 4);
    }

    #[test]
    fn absent_species_marked() {
        let mut s = spec();
        s.n = 3;
        let sol = SpectralSolution::solve(&s).unwrap();
        let doc = modes_json(&s, &sol);
        assert_eq!(doc["roots"]["2"]["absent"], true);
    }

    #[test]
    fn motion_csv_covers_every_coordinate() {
        let s = spec();
        let motion = crate::motion::lewis_structure(&s);
        let text = motion_csv(&s, &motion).unwrap();
        // Header comment + column row + N + M lines.
        assert_eq!(text.lines().count(), 2 + 4 + 6);
        assert!(text.lines().nth(2).unwrap().starts_with("r,1,,"));
        assert!(text.contains("gamma,3,4,"));
    }

    #[test]
    fn w_block_csv_labels() {
        let basis = SymmetryBasis::new(4).unwrap();
        let text = w_block_csv(&basis, Species::TwoRow, Sector::Angular).unwrap();
        assert!(text.starts_with("# W [N-2,2] gamma\n"));
        assert!(text.contains("g1_2"));
        assert!(text.lines().nth(2).unwrap().starts_with("1_4,"));
    }
}
