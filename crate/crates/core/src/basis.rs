//! Symmetry-coordinate bases: the primitive irreducible coordinate rows,
//! the transformation factors that orthonormalize them, and the resulting
//! orthonormal row blocks for every species and sector.
//!
//! Construction keeps entries as integer numerators and divides by the
//! square-root prefactor last, so orthogonality holds to ~1e-15 without any
//! re-orthogonalization pass.
//!
//! Row blocks stack into the full orthogonal matrix in the order
//! `[N]`-radial, `[N]`-angular, `[N-1,1]`-radial, `[N-1,1]`-angular,
//! `[N-2,2]`-angular. With two particles the `[N-1,1]` angular sector and
//! the whole `[N-2,2]` species are absent and the pipeline degrades to the
//! 2x2 symmetric problem plus a single antisymmetric radial coordinate.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::system::{pairs, Sector, Species};

/// Unit step: 1 for positive arguments, 0 otherwise.
pub fn theta_step(x: i64) -> i64 {
    if x > 0 {
        1
    } else {
        0
    }
}

#[inline]
fn kron(a: usize, b: usize) -> i64 {
    if a == b {
        1
    } else {
        0
    }
}

/// Primitive irreducible rows of the `[N-1,1]` radial sector:
/// row `i` maps radii to the difference of neighbours `i` and `i+1`.
pub fn wbar_r_standard(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n - 1, n, |i0, j0| {
        let (i, j) = (i0 + 1, j0 + 1);
        (kron(i, j) - kron(i + 1, j)) as f64
    })
}

/// Lower-triangular factor taking the primitive `[N-1,1]` radial rows to
/// the orthonormal ones; entry `(i,j)` is `j / sqrt(i(i+1))` for `j <= i`.
pub fn u_r_standard(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n - 1, n - 1, |i0, j0| {
        let (i, j) = (i0 + 1, j0 + 1);
        if j <= i {
            j as f64 / ((i * (i + 1)) as f64).sqrt()
        } else {
            0.0
        }
    })
}

/// Orthonormal `[N-1,1]` radial rows: row `i` is
/// `(1, ..., 1, -i, 0, ...) / sqrt(i(i+1))` with `i` leading ones.
pub fn w_r_standard(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n - 1, n, |i0, j0| {
        let (i, j) = (i0 + 1, j0 + 1);
        let num = theta_step(i as i64 - j as i64 + 1) - (i as i64) * kron(i + 1, j);
        num as f64 / ((i * (i + 1)) as f64).sqrt()
    })
}

/// Primitive irreducible rows of the `[N-1,1]` angular sector.
pub fn wbar_g_standard(n: usize) -> DMatrix<f64> {
    let m = n * (n - 1) / 2;
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    DMatrix::from_fn(n - 1, m, |i0, p| {
        let i = i0 + 1;
        let (k, l) = pair_list[p];
        let num = kron(i, k) + kron(i, l) - kron(i + 1, k) - kron(i + 1, l);
        num as f64
    })
}

/// Orthonormal `[N-1,1]` angular rows. Requires `n >= 3`: with two
/// particles the single angle cosine carries no `[N-1,1]` content and the
/// `1/sqrt(N-2)` scaling is singular.
pub fn w_g_standard(n: usize) -> Result<DMatrix<f64>> {
    if n < 3 {
        return Err(Error::SpeciesAbsent {
            species: Species::Standard,
            n,
        });
    }
    let m = n * (n - 1) / 2;
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    Ok(DMatrix::from_fn(n - 1, m, |i0, p| {
        let i = i0 + 1;
        let (k, l) = pair_list[p];
        let num = theta_step(i as i64 - k as i64 + 1) + theta_step(i as i64 - l as i64 + 1)
            - (i as i64) * (kron(i + 1, k) + kron(i + 1, l));
        num as f64 / ((i * (i + 1) * (n - 2)) as f64).sqrt()
    }))
}

/// Row labels `(i, j)` of the `[N-2,2]` sector in display order: for each
/// `j` from 4 to `N`, `i` runs over `1..=j-2`. The label family with
/// `j >= i+3` pairs neighbour difference `(i,i+1)` against `(j-1,j)`;
/// the family with `j = i+2` pairs it against `(j-3,j)`.
pub fn two_row_labels(n: usize) -> Vec<(usize, usize)> {
    let mut labels = Vec::new();
    if n >= 4 {
        for j in 4..=n {
            for i in 1..=(j - 2) {
                labels.push((i, j));
            }
        }
    }
    labels
}

/// Second pair partner `k` for a `[N-2,2]` row label.
#[inline]
fn two_row_partner(i: usize, j: usize) -> usize {
    if j >= i + 3 {
        j - 1
    } else {
        // j == i + 2
        j - 3
    }
}

/// Primitive irreducible rows of the `[N-2,2]` sector: row `(i,j)` holds
/// the pair-space coefficients of
/// `(r_i - r_{i+1}) . (r_k - r_j)` with `k` from [`two_row_partner`].
pub fn wbar_g_two_row(n: usize) -> DMatrix<f64> {
    let labels = two_row_labels(n);
    let m = n * (n - 1) / 2;
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    DMatrix::from_fn(labels.len(), m, |row, p| {
        let (i, j) = labels[row];
        let k = two_row_partner(i, j);
        let (pm, pn) = pair_list[p];
        let num = (kron(i, pm) - kron(i + 1, pm)) * (kron(k, pn) - kron(j, pn))
            + (kron(i, pn) - kron(i + 1, pn)) * (kron(k, pm) - kron(j, pm));
        num as f64
    })
}

/// First transformation factor for the `[N-2,2]` sector; block-diagonalizes
/// the primitive Gram matrix in the `j` index.
pub fn j_factor_two_row(n: usize) -> DMatrix<f64> {
    let labels = two_row_labels(n);
    DMatrix::from_fn(labels.len(), labels.len(), |row, col| {
        let (i, j) = labels[row];
        let (ip, jp) = labels[col];
        let first = if jp == i + 1 && ip + 1 != i {
            ip as i64
        } else {
            0
        };
        let second = if ip == i
            && theta_step(j as i64 - jp as i64 + 1) == 1
            && theta_step(jp as i64 - i as i64 - 1) == 1
        {
            jp as i64 - 3
        } else {
            0
        };
        (first + second) as f64
    })
}

/// Second transformation factor: tridiagonal-solving scaler in the `i`
/// index within each `j` block.
pub fn i_factor_two_row(n: usize) -> DMatrix<f64> {
    let labels = two_row_labels(n);
    DMatrix::from_fn(labels.len(), labels.len(), |row, col| {
        let (i, j) = labels[row];
        let (ip, jp) = labels[col];
        if jp == j && ip <= i {
            ip as f64 / ((i * (i + 1) * (j - 3) * (j - 2)) as f64).sqrt()
        } else {
            0.0
        }
    })
}

/// Combined factor taking the primitive `[N-2,2]` rows to orthonormal ones.
pub fn u_g_two_row(n: usize) -> DMatrix<f64> {
    i_factor_two_row(n) * j_factor_two_row(n)
}

/// Orthonormal `[N-2,2]` angular rows, directly from the closed form.
pub fn w_g_two_row(n: usize) -> DMatrix<f64> {
    let labels = two_row_labels(n);
    let m = n * (n - 1) / 2;
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    DMatrix::from_fn(labels.len(), m, |row, p| {
        let (i, j) = labels[row];
        let (pm, pn) = pair_list[p];
        let a = |x: usize| theta_step(i as i64 - x as i64 + 1) - (i as i64) * kron(i + 1, x);
        let b = |x: usize| theta_step(j as i64 - x as i64) - (j as i64 - 3) * kron(j, x);
        let num = a(pm) * b(pn) + a(pn) * b(pm);
        num as f64 / ((i * (i + 1) * (j - 3) * (j - 2)) as f64).sqrt()
    })
}

/// `[N]`-sector rows: normalized uniform vectors over radii and pairs.
///
/// Forced (up to sign) by permutation invariance of the one-dimensional
/// carrier together with orthonormality; the sign is fixed positive.
pub fn w_trivial(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = n * (n - 1) / 2;
    let r = DMatrix::from_element(1, n, 1.0 / (n as f64).sqrt());
    let g = DMatrix::from_element(1, m, 1.0 / (m as f64).sqrt());
    (r, g)
}

/// All species/sector row blocks for one particle count, plus the
/// primitive-row and factor matrices they were built from.
#[derive(Debug, Clone)]
pub struct SymmetryBasis {
    n: usize,
    pub w_r_trivial: DMatrix<f64>,
    pub w_g_trivial: DMatrix<f64>,
    pub w_r_standard: DMatrix<f64>,
    pub w_g_standard: Option<DMatrix<f64>>,
    pub w_g_two_row: DMatrix<f64>,
    pub wbar_r_standard: DMatrix<f64>,
    pub wbar_g_standard: DMatrix<f64>,
    pub wbar_g_two_row: DMatrix<f64>,
    pub u_r_standard: DMatrix<f64>,
    pub u_g_two_row: DMatrix<f64>,
    pub two_row_labels: Vec<(usize, usize)>,
}

impl SymmetryBasis {
    pub fn new(n: usize) -> Result<SymmetryBasis> {
        if n < 2 {
            return Err(Error::Validation {
                field: "N",
                constraint: "N >= 2",
                value: n.to_string(),
            });
        }
        let (w_r_trivial, w_g_trivial) = w_trivial(n);
        Ok(SymmetryBasis {
            n,
            w_r_trivial,
            w_g_trivial,
            w_r_standard: w_r_standard(n),
            w_g_standard: if n >= 3 { Some(w_g_standard(n)?) } else { None },
            w_g_two_row: w_g_two_row(n),
            wbar_r_standard: wbar_r_standard(n),
            wbar_g_standard: wbar_g_standard(n),
            wbar_g_two_row: wbar_g_two_row(n),
            u_r_standard: u_r_standard(n),
            u_g_two_row: u_g_two_row(n),
            two_row_labels: two_row_labels(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn m(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// The orthonormal block for one species/sector, if it exists.
    pub fn sector_block(&self, species: Species, sector: Sector) -> Option<&DMatrix<f64>> {
        match (species, sector) {
            (Species::Trivial, Sector::Radial) => Some(&self.w_r_trivial),
            (Species::Trivial, Sector::Angular) => Some(&self.w_g_trivial),
            (Species::Standard, Sector::Radial) => Some(&self.w_r_standard),
            (Species::Standard, Sector::Angular) => self.w_g_standard.as_ref(),
            (Species::TwoRow, Sector::Radial) => None,
            (Species::TwoRow, Sector::Angular) => {
                if self.n >= 4 {
                    Some(&self.w_g_two_row)
                } else {
                    None
                }
            }
        }
    }

    /// Row ranges of each species/sector inside the stacked matrix.
    pub fn row_range(&self, species: Species, sector: Sector) -> Option<std::ops::Range<usize>> {
        let n = self.n;
        let std_g = if n >= 3 { n - 1 } else { 0 };
        let d2 = Species::TwoRow.dimension(n);
        match (species, sector) {
            (Species::Trivial, Sector::Radial) => Some(0..1),
            (Species::Trivial, Sector::Angular) => Some(1..2),
            (Species::Standard, Sector::Radial) => Some(2..2 + (n - 1)),
            (Species::Standard, Sector::Angular) => {
                (std_g > 0).then(|| 2 + (n - 1)..2 + (n - 1) + std_g)
            }
            (Species::TwoRow, Sector::Radial) => None,
            (Species::TwoRow, Sector::Angular) => {
                (d2 > 0).then(|| 2 + (n - 1) + std_g..2 + (n - 1) + std_g + d2)
            }
        }
    }

    /// All rows belonging to a species, across its sectors.
    pub fn species_rows(&self, species: Species) -> Vec<usize> {
        let mut rows = Vec::new();
        for sector in [Sector::Radial, Sector::Angular] {
            if let Some(range) = self.row_range(species, sector) {
                rows.extend(range);
            }
        }
        rows
    }

    /// The full orthogonal `P x P` matrix, radial columns first.
    pub fn full_w(&self) -> DMatrix<f64> {
        let n = self.n;
        let m = self.m();
        let p = self.p();
        let mut w = DMatrix::zeros(p, p);

        let mut put = |range: std::ops::Range<usize>, cols: std::ops::Range<usize>, block: &DMatrix<f64>| {
            w.view_mut((range.start, cols.start), (block.nrows(), block.ncols()))
                .copy_from(block);
        };

        put(
            self.row_range(Species::Trivial, Sector::Radial).unwrap(),
            0..n,
            &self.w_r_trivial,
        );
        put(
            self.row_range(Species::Trivial, Sector::Angular).unwrap(),
            n..n + m,
            &self.w_g_trivial,
        );
        put(
            self.row_range(Species::Standard, Sector::Radial).unwrap(),
            0..n,
            &self.w_r_standard,
        );
        if let (Some(range), Some(block)) = (
            self.row_range(Species::Standard, Sector::Angular),
            self.w_g_standard.as_ref(),
        ) {
            put(range, n..n + m, block);
        }
        if let Some(range) = self.row_range(Species::TwoRow, Sector::Angular) {
            put(range, n..n + m, &self.w_g_two_row);
        }
        w
    }

    /// Symmetry coordinates of an internal displacement vector, without
    /// materializing the full matrix.
    pub fn to_symmetry(&self, y: &nalgebra::DVector<f64>) -> Result<nalgebra::DVector<f64>> {
        let (n, m, p) = (self.n, self.m(), self.p());
        if y.len() != p {
            return Err(Error::DimensionMismatch {
                what: "internal displacement vector",
                expected: p,
                got: y.len(),
            });
        }
        let r_part = y.rows(0, n);
        let g_part = y.rows(n, m);
        let mut s = nalgebra::DVector::zeros(p);
        s[0] = (&self.w_r_trivial * r_part)[0];
        s[1] = (&self.w_g_trivial * g_part)[0];
        let std_r = self.row_range(Species::Standard, Sector::Radial).unwrap();
        s.rows_mut(std_r.start, n - 1)
            .copy_from(&(&self.w_r_standard * r_part));
        if let (Some(range), Some(block)) = (
            self.row_range(Species::Standard, Sector::Angular),
            self.w_g_standard.as_ref(),
        ) {
            s.rows_mut(range.start, n - 1).copy_from(&(block * g_part));
        }
        if let Some(range) = self.row_range(Species::TwoRow, Sector::Angular) {
            s.rows_mut(range.start, range.len())
                .copy_from(&(&self.w_g_two_row * g_part));
        }
        Ok(s)
    }

    /// Inverse of [`SymmetryBasis::to_symmetry`] (transpose action).
    pub fn from_symmetry(&self, s: &nalgebra::DVector<f64>) -> Result<nalgebra::DVector<f64>> {
        let (n, m, p) = (self.n, self.m(), self.p());
        if s.len() != p {
            return Err(Error::DimensionMismatch {
                what: "symmetry coordinate vector",
                expected: p,
                got: s.len(),
            });
        }
        let mut y = nalgebra::DVector::zeros(p);
        {
            let mut r = y.rows_mut(0, n);
            r += self.w_r_trivial.transpose() * s[0];
            let std_r = self.row_range(Species::Standard, Sector::Radial).unwrap();
            r += self.w_r_standard.transpose() * s.rows(std_r.start, n - 1);
        }
        {
            let mut g = y.rows_mut(n, m);
            g += self.w_g_trivial.transpose() * s[1];
            if let (Some(range), Some(block)) = (
                self.row_range(Species::Standard, Sector::Angular),
                self.w_g_standard.as_ref(),
            ) {
                g += block.transpose() * s.rows(range.start, n - 1);
            }
            if let Some(range) = self.row_range(Species::TwoRow, Sector::Angular) {
                g += self.w_g_two_row.transpose() * s.rows(range.start, range.len());
            }
        }
        Ok(y)
    }
}
