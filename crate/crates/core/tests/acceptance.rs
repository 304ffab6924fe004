//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snmodes::assembly::{assemble_fg, assemble_g};
use snmodes::basis::SymmetryBasis;
use snmodes::motion::{reconstruct_internal, Scaling};
use snmodes::spectral::{sigma_closed, sigma_congruence, SigmaPair, SigmaQ, SpectralSolution};
use snmodes::system::{FCoefficients, GCoefficients, Species, SystemSpec};
use snmodes::verify::{
    cluster_eigenvalues, dense_eigenvalues, random_spec, spectrum_vs_analytic,
};
use snmodes::wavefunction::{energy_first_order, ManifoldOccupancy, Occupancy};

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
fn criterion_1_five_root_reduction() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xF1FE);
    for &n in &[4usize, 6, 10, 16, 32] {
        let mut expected: Vec<usize> = vec![1, 1, n - 1, n - 1, n * (n - 3) / 2];
        expected.sort_unstable();
        for draw in 0..25 {
            let spec = random_spec(n, &mut rng);
            let solution = SpectralSolution::solve(&spec).unwrap();
            let dense = dense_eigenvalues(&spec).unwrap();

            let values: Vec<f64> = dense.iter().copied().collect();
            let clusters = cluster_eigenvalues(&values, 1e-7);
            assert_eq!(
                clusters.len(),
                5,
                "N={n} draw {draw}: expected 5 clusters, got {}",
                clusters.len()
            );
            let mut counts: Vec<usize> = clusters.iter().map(|c| c.count).collect();
            counts.sort_unstable();
            assert_eq!(counts, expected, "N={n} draw {draw}: multiplicities");

            let (max_rel, counts_ok) = spectrum_vs_analytic(&spec, &dense, &solution);
            assert!(
                max_rel <= 1e-9,
                "N={n} draw {draw}: dense-vs-analytic relative deviation {max_rel:.3e}"
            );
            assert!(counts_ok, "N={n} draw {draw}: per-root counts");
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 60.0, "five-root sweep took {elapsed:.1}s > 60s");
    println!("criterion 1 (five-root reduction, 125 draws in {elapsed:.1}s): PASS");
}

#[test]
fn criterion_2_sigma_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51CA);
    for n in 2..=12usize {
        let mut specs = vec![sample_spec(n)];
        for _ in 0..3 {
            specs.push(random_spec(n, &mut rng));
        }
        for spec in &specs {
            let basis = SymmetryBasis::new(n).unwrap();
            let g_blocks = assemble_g(spec);
            let fg_blocks = assemble_fg(spec);
            for species in Species::ALL {
                if !species.present(n) {
                    continue;
                }
                let closed = sigma_closed(species, spec).unwrap();
                for xi in 1..=species.dimension(n) {
                    for (blocks, use_fg) in [(&g_blocks, false), (&fg_blocks, true)] {
                        let got = sigma_congruence(species, blocks, &basis, xi).unwrap();
                        let resid = match (&closed, got) {
                            (SigmaPair::Coupled { g, fg, .. }, SigmaQ::Two(m)) => {
                                let want = if use_fg { fg } else { g };
                                (m - want).amax() / (1.0 + want.amax())
                            }
                            (SigmaPair::Scalar { g, fg, .. }, SigmaQ::One(v)) => {
                                let want = if use_fg { *fg } else { *g };
                                (v - want).abs() / (1.0 + want.abs())
                            }
                            _ => panic!("shape mismatch"),
                        };
                        assert!(
                            resid <= 1e-12,
                            "N={n} {species} xi={xi}: sigma residual {resid:.3e}"
                        );
                    }
                }
            }
        }
    }
    println!("criterion 2 (closed-form sigma equals congruence for every row): PASS");
}

#[test]
fn criterion_3_reduction_zero_identities() {
    for n in 3..=10usize {
        let basis = SymmetryBasis::new(n).unwrap();
        // The all-ones angular term contributes nothing to the standard
        // species: each row sums to zero.
        let standard = basis.w_g_standard.as_ref().unwrap();
        for row in 0..standard.nrows() {
            let s: f64 = standard.row(row).iter().sum();
            assert!(s * s <= 1e-12, "N={n} standard row {row}: {s:.3e}");
        }
        if n >= 4 {
            let r = snmodes::assembly::build_r(n);
            for row in 0..basis.w_g_two_row.nrows() {
                let s: f64 = basis.w_g_two_row.row(row).iter().sum();
                assert!(s * s <= 1e-12, "N={n} two-row row {row} ones term: {s:.3e}");
                // The pair-overlap term also vanishes: R w^T = 0.
                let overlap = (&r * basis.w_g_two_row.row(row).transpose()).norm_squared();
                assert!(
                    overlap <= 1e-12,
                    "N={n} two-row row {row} overlap term: {overlap:.3e}"
                );
            }
        }
    }
    println!("criterion 3 (ones and overlap terms vanish in the reductions): PASS");
}

#[test]
fn criterion_4_orthogonality_and_round_trips() {
    let mut worst_ortho = 0.0f64;
    for n in 2..=64usize {
        let basis = SymmetryBasis::new(n).unwrap();
        let w = basis.full_w();
        let p = n * (n + 1) / 2;
        let resid = (&w * w.transpose() - DMatrix::identity(p, p)).amax();
        assert!(resid < 1e-12, "N={n}: ||WW^T - I|| = {resid:.3e}");
        worst_ortho = worst_ortho.max(resid);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x0041);
    let mut worst_s = 0.0f64;
    let mut worst_q = 0.0f64;
    for n in 2..=16usize {
        let spec = random_spec(n, &mut rng);
        let basis = SymmetryBasis::new(n).unwrap();
        let solution = SpectralSolution::solve(&spec).unwrap();
        let y = DVector::from_fn(spec.p(), |_, _| rng.random_range(-1.0..1.0));

        let s = basis.to_symmetry(&y).unwrap();
        let back = basis.from_symmetry(&s).unwrap();
        worst_s = worst_s.max((&back - &y).amax());

        let q = solution.project_internal(&y, &basis).unwrap();
        let again = reconstruct_internal(&spec, &basis, &solution, &q, Scaling::Scaled).unwrap();
        worst_q = worst_q.max((&again.stacked() - &y).amax());
    }
    assert!(worst_s < 1e-10, "symmetry round trip {worst_s:.3e}");
    assert!(worst_q < 1e-10, "normal-coordinate round trip {worst_q:.3e}");
    println!(
        "criterion 4 (orthogonality to N=64, worst {worst_ortho:.2e}; round trips {worst_s:.2e} / {worst_q:.2e}): PASS"
    );
}

#[test]
fn criterion_5_hand_checkable_rows() {
    // N=3 radial standard rows.
    let basis3 = SymmetryBasis::new(3).unwrap();
    let s2 = 1.0 / 2.0f64.sqrt();
    let s6 = 1.0 / 6.0f64.sqrt();
    let expected = DMatrix::from_row_slice(2, 3, &[s2, -s2, 0.0, s6, s6, -2.0 * s6]);
    let diff = (&basis3.w_r_standard - &expected).amax();
    assert!(diff < 1e-15, "N=3 radial rows deviate by {diff:.3e}");

    // N=4 first two-row row over pairs (12),(13),(23),(14),(24),(34).
    let basis4 = SymmetryBasis::new(4).unwrap();
    let expected_two_row = [0.0, 0.5, -0.5, -0.5, 0.5, 0.0];
    for (col, want) in expected_two_row.iter().enumerate() {
        let got = basis4.w_g_two_row[(0, col)];
        assert!(
            (got - want).abs() < 1e-15,
            "two-row entry {col}: {got} vs {want}"
        );
    }

    // N=4 first standard angular row.
    let expected_standard = [0.0, 0.5, -0.5, 0.5, -0.5, 0.0];
    let standard = basis4.w_g_standard.as_ref().unwrap();
    for (col, want) in expected_standard.iter().enumerate() {
        let got = standard[(0, col)];
        assert!(
            (got - want).abs() < 1e-15,
            "standard angular entry {col}: {got} vs {want}"
        );
    }
    println!("criterion 5 (hand-checkable rows at N=3 and N=4): PASS");
}

#[test]
fn criterion_6_energy_linearity() {
    for n in [4usize, 7] {
        let spec = sample_spec(n);
        let solution = SpectralSolution::solve(&spec).unwrap();
        let ground = energy_first_order(&spec, &solution, &Occupancy::ground()).unwrap();

        // Ground state is the explicit half-sum over multiplicities.
        let half_sum: f64 = solution
            .roots()
            .iter()
            .map(|(_, lambda, d)| 0.5 * (*d as f64) * lambda.sqrt())
            .sum();
        let explicit = spec.e_inf + spec.delta * (half_sum + spec.v0);
        assert!(
            (ground - explicit).abs() <= 1e-12 * (1.0 + explicit.abs()),
            "N={n}: ground {ground} vs explicit {explicit}"
        );

        // One quantum in any manifold moves the energy by exactly
        // delta * omega_mu.
        for (mu, lambda, _) in solution.roots() {
            let occ = Occupancy {
                entries: vec![ManifoldOccupancy {
                    mu: mu.to_string(),
                    n: 1,
                    count: 1,
                }],
            };
            let excited = energy_first_order(&spec, &solution, &occ).unwrap();
            let shift = excited - ground;
            let want = spec.delta * lambda.sqrt();
            assert!(
                (shift - want).abs() <= 1e-12 * (1.0 + want.abs()),
                "N={n} {mu}: shift {shift} vs {want}"
            );
        }
    }
    println!("criterion 6 (first-order energy linearity): PASS");
}

#[test]
fn criterion_7_performance() {
    let points = snmodes::bench::run(&[32, 64, 100], 0xBE7C, false).unwrap();
    let big = points.iter().find(|b| b.n == 100).unwrap();
    assert_eq!(big.p, 5050);
    assert!(
        big.speedup >= 100.0,
        "analytic speedup at N=100 is only {:.1}x",
        big.speedup
    );
    let slope = snmodes::bench::dense_slope(&points).unwrap();
    assert!(
        (2.5..=3.5).contains(&slope),
        "dense log-log slope {slope:.2} outside 3 +/- 0.5"
    );
    println!(
        "criterion 7 (N=100 speedup {:.1e}x, dense slope {slope:.2}): PASS",
        big.speedup
    );
}
