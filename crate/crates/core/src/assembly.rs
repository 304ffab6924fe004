//! Assembly of the `F`, `G`, and `FG` matrices over the full internal
//! coordinate space from the twelve invariant scalars.
//!
//! Every matrix in play is a 2x2 block arrangement of six submatrices that
//! are each invariant under particle interchange: identities, all-ones
//! blocks, the pair-membership matrix `R` (`R[i,(k,l)] = 1` iff `i` is `k`
//! or `l`), and `R^T R`, whose entry at a pair of pairs is the number of
//! shared particles (2, 1, or 0). The twelve scalars multiplying these
//! pieces are the authoritative representation; dense storage is derived
//! from them on demand.

use nalgebra::DMatrix;

use crate::system::{pair_index, pairs, SystemSpec};

/// The nine product abbreviations plus the three kinetic abbreviations.
///
/// `a..iota` parameterize `FG`; `a_prime`, `g_prime`, `h_prime`
/// parameterize `G`. Note `e` and `f` depend on the particle count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TildeCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub iota: f64,
    pub a_prime: f64,
    pub g_prime: f64,
    pub h_prime: f64,
}

/// Computes the twelve abbreviations from the raw block coefficients.
///
/// `FG = F G` holds entrywise for these products exactly when the Hessian
/// is symmetric (`F_c = F_e`, `F_d = F_f`); the product formulas use the
/// `F_e`, `F_f` values for the lower-left block accordingly.
pub fn tilde_coefficients(spec: &SystemSpec) -> TildeCoefficients {
    let n = spec.n as f64;
    let f = &spec.f;
    let g = &spec.g;
    TildeCoefficients {
        a: (f.a - f.b) * g.a,
        b: f.b * g.a,
        c: (f.e - f.f) * g.a,
        d: f.f * g.a,
        e: (f.e - f.f) * (g.g + (n - 4.0) * g.h),
        f: 2.0 * f.e * g.h + f.f * (g.g + 2.0 * (n - 3.0) * g.h),
        g: (f.g - 2.0 * f.h + f.iota) * (g.g - 2.0 * g.h),
        h: f.g * g.h + f.h * (g.g + (n - 6.0) * g.h) - f.iota * (g.g + (n - 5.0) * g.h),
        iota: 4.0 * f.h * g.h + f.iota * (g.g + 2.0 * (n - 4.0) * g.h),
        a_prime: g.a,
        g_prime: g.g - 2.0 * g.h,
        h_prime: g.h,
    }
}

/// Scalars multiplying the invariant submatrices of one full-space matrix:
///
/// ```text
/// rr = rr_i I_N  + rr_j J_N
/// rg = rg_r R    + rg_j J_{NM}
/// gr = gr_r R^T  + gr_j J_{MN}
/// gg = gg_i I_M  + gg_rtr R^T R + gg_j J_M
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantForm {
    pub rr_i: f64,
    pub rr_j: f64,
    pub rg_r: f64,
    pub rg_j: f64,
    pub gr_r: f64,
    pub gr_j: f64,
    pub gg_i: f64,
    pub gg_rtr: f64,
    pub gg_j: f64,
}

impl InvariantForm {
    /// Form of a generic `Q` matrix given its nine block coefficients
    /// `(Q_a, Q_b, Q_c, Q_d, Q_e, Q_f, Q_g, Q_h, Q_iota)`.
    pub fn from_block_coefficients(q: [f64; 9]) -> Self {
        let [a, b, c, d, e, f, g, h, iota] = q;
        InvariantForm {
            rr_i: a - b,
            rr_j: b,
            rg_r: e - f,
            rg_j: f,
            gr_r: c - d,
            gr_j: d,
            gg_i: g - 2.0 * h + iota,
            gg_rtr: h - iota,
            gg_j: iota,
        }
    }

    /// Form of the Hessian matrix `F`.
    pub fn hessian(spec: &SystemSpec) -> Self {
        let f = &spec.f;
        Self::from_block_coefficients([f.a, f.b, f.c, f.d, f.e, f.f, f.g, f.h, f.iota])
    }

    /// Form of the kinetic matrix `G` (off-diagonal blocks vanish).
    pub fn kinetic(t: &TildeCoefficients) -> Self {
        InvariantForm {
            rr_i: t.a_prime,
            rr_j: 0.0,
            rg_r: 0.0,
            rg_j: 0.0,
            gr_r: 0.0,
            gr_j: 0.0,
            gg_i: t.g_prime,
            gg_rtr: t.h_prime,
            gg_j: 0.0,
        }
    }

    /// Form of the product matrix `FG`.
    pub fn product(t: &TildeCoefficients) -> Self {
        InvariantForm {
            rr_i: t.a,
            rr_j: t.b,
            rg_r: t.e,
            rg_j: t.f,
            gr_r: t.c,
            gr_j: t.d,
            gg_i: t.g,
            gg_rtr: t.h,
            gg_j: t.iota,
        }
    }

    /// Entry of the radial-radial block (0-based).
    #[inline]
    pub fn rr_entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.rr_i + self.rr_j
        } else {
            self.rr_j
        }
    }

    /// Entry of the radial-angular block, with the pair given 1-based.
    #[inline]
    pub fn rg_entry(&self, i1: usize, k: usize, l: usize) -> f64 {
        let member = (i1 == k) || (i1 == l);
        if member {
            self.rg_r + self.rg_j
        } else {
            self.rg_j
        }
    }

    /// Entry of the angular-radial block, with the pair given 1-based.
    #[inline]
    pub fn gr_entry(&self, k: usize, l: usize, i1: usize) -> f64 {
        let member = (i1 == k) || (i1 == l);
        if member {
            self.gr_r + self.gr_j
        } else {
            self.gr_j
        }
    }

    /// Entry of the angular-angular block; `shared` counts common particles.
    #[inline]
    pub fn gg_entry(&self, shared: usize) -> f64 {
        let base = self.gg_j + self.gg_rtr * shared as f64;
        if shared == 2 {
            base + self.gg_i
        } else {
            base
        }
    }
}

/// One full-space matrix stored as its four blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub rr: DMatrix<f64>,
    pub rg: DMatrix<f64>,
    pub gr: DMatrix<f64>,
    pub gg: DMatrix<f64>,
    pub form: InvariantForm,
}

impl BlockMatrix {
    /// The full `P x P` matrix in `(r, gamma)` block order.
    pub fn assembled(&self) -> DMatrix<f64> {
        let n = self.rr.nrows();
        let m = self.gg.nrows();
        let p = n + m;
        let mut out = DMatrix::zeros(p, p);
        out.view_mut((0, 0), (n, n)).copy_from(&self.rr);
        out.view_mut((0, n), (n, m)).copy_from(&self.rg);
        out.view_mut((n, 0), (m, n)).copy_from(&self.gr);
        out.view_mut((n, n), (m, m)).copy_from(&self.gg);
        out
    }
}

/// Pair-membership matrix `R` (`N x M`): entry `(i, (k,l))` is 1 iff
/// particle `i` belongs to the pair.
pub fn build_r(n: usize) -> DMatrix<f64> {
    let m = n * (n - 1) / 2;
    let mut r = DMatrix::zeros(n, m);
    for (k, l) in pairs(n) {
        let p = pair_index(k, l, n).expect("pairs() yields valid indices") - 1;
        r[(k - 1, p)] = 1.0;
        r[(l - 1, p)] = 1.0;
    }
    r
}

/// Number of particles shared by two pairs.
#[inline]
fn shared_count(a: (usize, usize), b: (usize, usize)) -> usize {
    usize::from(a.0 == b.0 || a.0 == b.1)
        + usize::from(a.1 == b.0 || a.1 == b.1)
}

/// Densifies an invariant form over the `n`-particle coordinate space.
pub fn assemble(n: usize, form: InvariantForm) -> BlockMatrix {
    let m = n * (n - 1) / 2;
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();

    let rr = DMatrix::from_fn(n, n, |i, j| form.rr_entry(i, j));
    let rg = DMatrix::from_fn(n, m, |i, p| {
        let (k, l) = pair_list[p];
        form.rg_entry(i + 1, k, l)
    });
    let gr = DMatrix::from_fn(m, n, |p, i| {
        let (k, l) = pair_list[p];
        form.gr_entry(k, l, i + 1)
    });
    let gg = DMatrix::from_fn(m, m, |p, q| {
        form.gg_entry(shared_count(pair_list[p], pair_list[q]))
    });

    BlockMatrix {
        rr,
        rg,
        gr,
        gg,
        form,
    }
}

/// The Hessian matrix `F`.
pub fn assemble_f(spec: &SystemSpec) -> BlockMatrix {
    assemble(spec.n, InvariantForm::hessian(spec))
}

/// The kinetic matrix `G`.
pub fn assemble_g(spec: &SystemSpec) -> BlockMatrix {
    assemble(spec.n, InvariantForm::kinetic(&tilde_coefficients(spec)))
}

/// The product matrix `FG` built directly from the tilde abbreviations.
pub fn assemble_fg(spec: &SystemSpec) -> BlockMatrix {
    assemble(spec.n, InvariantForm::product(&tilde_coefficients(spec)))
}

/// Applies a particle permutation (0-based image table) to a full-space
/// matrix: rows and columns of the radial block move with the particles,
/// pair coordinates move with their member particles.
pub fn permute_full(matrix: &DMatrix<f64>, n: usize, perm: &[usize]) -> DMatrix<f64> {
    let m = n * (n - 1) / 2;
    assert_eq!(matrix.nrows(), n + m);
    assert_eq!(perm.len(), n);
    // Index image over the whole coordinate list.
    let mut image = Vec::with_capacity(n + m);
    image.extend(perm.iter().copied());
    for (i, j) in pairs(n) {
        let (pi, pj) = (perm[i - 1] + 1, perm[j - 1] + 1);
        let (lo, hi) = if pi < pj { (pi, pj) } else { (pj, pi) };
        image.push(n + pair_index(lo, hi, n).expect("permuted pair is valid") - 1);
    }
    let p = n + m;
    let mut out = DMatrix::zeros(p, p);
    for r in 0..p {
        for c in 0..p {
            out[(image[r], image[c])] = matrix[(r, c)];
        }
    }
    out
}
