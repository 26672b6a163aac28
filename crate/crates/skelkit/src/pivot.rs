//! Greedy pivoting kernels: column-wise/row-wise LU with partial pivoting
//! and column-pivoted QR, plus the growth-factor diagnostic.
//!
//! Both kernels view the input as wide (`l x n`, `l <= n`) and produce
//! `X Pi = F [R1 | R2]` where `F` is `l x l` (lower triangular for LUPP,
//! orthogonal for CPQR), `R1` is `l x l` upper triangular and `R2` holds the
//! remaining `n - l` columns. The first `l` entries of the permutation are
//! the pivots, i.e. the skeleton candidates.
//!
//! Column-wise LUPP is realized as row-partially-pivoted LU of the transpose:
//! at step `t+1` the pivot maximizes `|X^(t)(t+1, j)|` over the active
//! columns, so every entry of `[R1 R2]` off the unit diagonal has magnitude
//! at most one. CPQR instead maximizes the active-submatrix column norm,
//! tracked by the classical downdating recurrence with a recomputation guard
//! for cancellation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative threshold below which a pivot counts as rank deficiency.
const PIVOT_TOL: f64 = 1e-14;

/// Default panel width for the blocked LUPP kernel.
pub const DEFAULT_PANEL: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotKind {
    Lupp,
    Cpqr,
}

impl std::fmt::Display for PivotKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PivotKind::Lupp => "lupp",
            PivotKind::Cpqr => "cpqr",
        })
    }
}

/// Result of a pivoted decomposition of a wide `l x n` matrix.
#[derive(Debug, Clone)]
pub struct PivotFactorization {
    pub kind: PivotKind,
    /// The first `l` pivot indices, in pivot order (original indices).
    pub pivots: Vec<usize>,
    /// Full permutation of the pivoted dimension: position -> original index.
    pub perm: Vec<usize>,
    /// `l x l` factor: unit-free lower triangular `L_l` (LUPP) or orthogonal
    /// `Q_l` (CPQR).
    pub f: DMatrix<f64>,
    /// `l x l` upper triangular head of the residual factor.
    pub r1: DMatrix<f64>,
    /// `l x (n - l)` tail of the residual factor.
    pub r2: DMatrix<f64>,
}

impl PivotFactorization {
    pub fn l(&self) -> usize {
        self.r1.nrows()
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// `F [R1 R2]`, which must reproduce the column-permuted input.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let l = self.l();
        let n = self.n();
        let mut r = DMatrix::<f64>::zeros(l, n);
        r.view_mut((0, 0), (l, l)).copy_from(&self.r1);
        r.view_mut((0, l), (l, n - l)).copy_from(&self.r2);
        &self.f * r
    }

    /// Max-magnitude entry of `R1^{-1} R2`, the growth diagnostic; 0 when
    /// there is no trailing block.
    pub fn growth_certificate(&self) -> Result<f64> {
        growth_certificate(self)
    }
}

/// Column-wise LU with partial pivoting of a wide full-row-rank `X` with the
/// default panel width.
pub fn lupp_columns(x: &DMatrix<f64>) -> Result<PivotFactorization> {
    lupp_columns_with_panel(x, DEFAULT_PANEL)
}

/// Same as [`lupp_columns`] with an explicit panel width; `panel = 1` is the
/// unblocked reference kernel. Pivots and factors are bitwise identical for
/// every panel width (the blocked update replays the rank-one updates in the
/// same order).
pub fn lupp_columns_with_panel(x: &DMatrix<f64>, panel: usize) -> Result<PivotFactorization> {
    let (l, n) = x.shape();
    if l > n {
        return Err(Error::DimensionMismatch(format!(
            "lupp_columns expects a wide matrix, got {l}x{n}"
        )));
    }
    if panel == 0 {
        return Err(Error::InvalidParameter("panel width must be >= 1".into()));
    }
    let mut b = x.transpose(); // n x l, column-major: getrf orientation
    let perm = getrf_partial_pivot(&mut b, panel, true)?;
    Ok(extract_lupp(&b, perm, l, n))
}

/// LUPP with pivoting disabled: factors the columns in their given order.
/// Used to check permutation consistency of the pivoted kernel.
pub fn lupp_columns_in_order(x: &DMatrix<f64>) -> Result<PivotFactorization> {
    let (l, n) = x.shape();
    if l > n {
        return Err(Error::DimensionMismatch(format!(
            "lupp_columns expects a wide matrix, got {l}x{n}"
        )));
    }
    let mut b = x.transpose();
    let perm = getrf_partial_pivot(&mut b, DEFAULT_PANEL, false)?;
    Ok(extract_lupp(&b, perm, l, n))
}

/// Row-wise LUPP of a tall full-column-rank `C`: the transpose analog of
/// [`lupp_columns`]. The returned factorization is that of `C^T`, so the
/// pivoted dimension is the rows of `C`.
pub fn lupp_rows(c: &DMatrix<f64>) -> Result<PivotFactorization> {
    lupp_columns(&c.transpose())
}

/// In-place right-looking LU with row partial pivoting on a tall `d x l`
/// matrix. Returns the row permutation (position -> original row).
///
/// The trailing block is updated panel-by-panel, but entry updates are
/// applied in the same order as the unblocked algorithm, so results do not
/// depend on the panel width.
fn getrf_partial_pivot(b: &mut DMatrix<f64>, panel: usize, pivot: bool) -> Result<Vec<usize>> {
    let (d, l) = b.shape();
    debug_assert!(d >= l);
    let scale = b.amax().max(f64::MIN_POSITIVE);
    let mut perm: Vec<usize> = (0..d).collect();

    let mut k = 0;
    while k < l {
        let kb = panel.min(l - k);
        // panel factorization over columns k .. k+kb
        for t in k..k + kb {
            let mut p = t;
            if pivot {
                let mut best = b[(t, t)].abs();
                for i in t + 1..d {
                    let v = b[(i, t)].abs();
                    if v > best {
                        best = v;
                        p = i;
                    }
                }
            }
            if b[(p, t)].abs() <= PIVOT_TOL * scale {
                return Err(Error::rank_deficient(
                    "lupp",
                    format!("no usable pivot at step {t} (l = {l})"),
                ));
            }
            if p != t {
                b.swap_rows(t, p);
                perm.swap(t, p);
            }
            let piv = b[(t, t)];
            for i in t + 1..d {
                b[(i, t)] /= piv;
            }
            // update the remaining panel columns
            for c in t + 1..k + kb {
                let btc = b[(t, c)];
                if btc != 0.0 {
                    for i in t + 1..d {
                        b[(i, c)] -= b[(i, t)] * btc;
                    }
                }
            }
        }
        // deferred update of the trailing columns, replaying the panel steps
        for c in k + kb..l {
            for t in k..k + kb {
                let btc = b[(t, c)];
                if btc != 0.0 {
                    for i in t + 1..d {
                        b[(i, c)] -= b[(i, t)] * btc;
                    }
                }
            }
        }
        k += kb;
    }
    Ok(perm)
}

/// Unpack the in-place getrf result of `X^T` into the wide-format factors.
fn extract_lupp(b: &DMatrix<f64>, perm: Vec<usize>, l: usize, n: usize) -> PivotFactorization {
    // B = P X^T = L_B U_B with L_B unit lower (multipliers) and U_B upper.
    // Transposing: X Pi = U_B^T L_B^T, so F = U_B^T, [R1 R2] = L_B^T.
    let mut f = DMatrix::<f64>::zeros(l, l);
    let mut r1 = DMatrix::<f64>::identity(l, l);
    for i in 0..l {
        for j in 0..=i {
            f[(i, j)] = b[(j, i)];
        }
        for j in i + 1..l {
            r1[(i, j)] = b[(j, i)];
        }
    }
    let mut r2 = DMatrix::<f64>::zeros(l, n - l);
    for j in 0..n - l {
        for i in 0..l {
            r2[(i, j)] = b[(l + j, i)];
        }
    }
    let pivots = perm[..l].to_vec();
    PivotFactorization {
        kind: PivotKind::Lupp,
        pivots,
        perm,
        f,
        r1,
        r2,
    }
}

/// Column-pivoted Householder QR of a wide `l x n` matrix.
pub fn cpqr_columns(x: &DMatrix<f64>) -> Result<PivotFactorization> {
    cpqr_impl(x, true)
}

/// CPQR with pivoting disabled (plain Householder QR in the given column
/// order); the permutation-consistency counterpart of [`cpqr_columns`].
pub fn cpqr_columns_in_order(x: &DMatrix<f64>) -> Result<PivotFactorization> {
    cpqr_impl(x, false)
}

/// Row-wise CPQR of a tall matrix, as the factorization of its transpose.
pub fn cpqr_rows(c: &DMatrix<f64>) -> Result<PivotFactorization> {
    cpqr_columns(&c.transpose())
}

#[allow(clippy::needless_range_loop)]
fn cpqr_impl(x: &DMatrix<f64>, pivot: bool) -> Result<PivotFactorization> {
    let (l, n) = x.shape();
    if l > n {
        return Err(Error::DimensionMismatch(format!(
            "cpqr_columns expects a wide matrix, got {l}x{n}"
        )));
    }
    let mut w = x.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = x.norm().max(f64::MIN_POSITIVE);

    // partial column norms and their value at the last exact evaluation
    let mut norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut ref_norms = norms.clone();

    // Householder vectors (length l - t each) and their beta = 2 / v^T v
    let mut reflectors: Vec<(usize, Vec<f64>, f64)> = Vec::with_capacity(l);

    for t in 0..l {
        if pivot {
            let mut p = t;
            let mut best = norms[t];
            for j in t + 1..n {
                if norms[j] > best {
                    best = norms[j];
                    p = j;
                }
            }
            if p != t {
                w.swap_columns(t, p);
                norms.swap(t, p);
                ref_norms.swap(t, p);
                perm.swap(t, p);
            }
        }
        if norms[t] <= PIVOT_TOL * scale {
            return Err(Error::rank_deficient(
                "cpqr",
                format!("remaining column norms vanish at step {t} (l = {l})"),
            ));
        }

        // Householder reflector for w(t.., t)
        let len = l - t;
        let mut v: Vec<f64> = (0..len).map(|i| w[(t + i, t)]).collect();
        let alpha = {
            let nrm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if v[0] >= 0.0 {
                -nrm
            } else {
                nrm
            }
        };
        if alpha == 0.0 {
            return Err(Error::rank_deficient(
                "cpqr",
                format!("zero pivot column at step {t}"),
            ));
        }
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|a| a * a).sum();
        let beta = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };

        // apply H = I - beta v v^T to the active block
        for c in t..n {
            let mut s = 0.0;
            for i in 0..len {
                s += v[i] * w[(t + i, c)];
            }
            s *= beta;
            if s != 0.0 {
                for i in 0..len {
                    w[(t + i, c)] -= s * v[i];
                }
            }
        }
        w[(t, t)] = alpha;
        for i in t + 1..l {
            w[(i, t)] = 0.0;
        }
        reflectors.push((t, v, beta));

        // downdate the remaining column norms; recompute a norm exactly once
        // the downdating has lost about half the digits
        for j in t + 1..n {
            let r = w[(t, j)];
            let g2 = norms[j] * norms[j] - r * r;
            let guard = f64::EPSILON.sqrt() * ref_norms[j];
            if g2 <= guard * guard {
                let exact = w.view((t + 1, j), (l - t - 1, 1)).norm();
                norms[j] = exact;
                ref_norms[j] = exact;
            } else {
                norms[j] = g2.sqrt();
            }
        }
    }

    // accumulate Q by applying the reflectors to the identity
    let mut q = DMatrix::<f64>::identity(l, l);
    for (t, v, beta) in reflectors.iter().rev() {
        let len = v.len();
        for c in 0..l {
            let mut s = 0.0;
            for i in 0..len {
                s += v[i] * q[(t + i, c)];
            }
            s *= beta;
            if s != 0.0 {
                for i in 0..len {
                    q[(t + i, c)] -= s * v[i];
                }
            }
        }
    }

    let r1 = w.view((0, 0), (l, l)).upper_triangle();
    let r2 = w.view((0, l), (l, n - l)).into();
    let pivots = perm[..l].to_vec();
    Ok(PivotFactorization {
        kind: PivotKind::Cpqr,
        pivots,
        perm,
        f: q,
        r1,
        r2,
    })
}

/// Dispatch on the pivot kind.
pub fn pivot_columns(kind: PivotKind, x: &DMatrix<f64>) -> Result<PivotFactorization> {
    match kind {
        PivotKind::Lupp => lupp_columns(x),
        PivotKind::Cpqr => cpqr_columns(x),
    }
}

/// `max_{ij} |(R1^{-1} R2)_{ij}|` by triangular solves, `O(l^2 (n-l))`.
pub fn growth_certificate(pf: &PivotFactorization) -> Result<f64> {
    if pf.r2.ncols() == 0 {
        return Ok(0.0);
    }
    let solved = pf
        .r1
        .solve_upper_triangular(&pf.r2)
        .ok_or_else(|| Error::Singular("growth_certificate: R1 is singular".into()))?;
    Ok(solved.amax())
}

/// The adversarial triangular input on which greedy pivoting exhibits
/// `2^{l-1}` growth: `R1` has unit diagonal and -1 above it, `R2` is all
/// ones. LUPP accepts the columns in order, reproducing exactly these
/// factors.
pub fn kahan_witness(l: usize, n: usize) -> DMatrix<f64> {
    assert!(n >= l && l >= 1);
    DMatrix::from_fn(l, n, |i, j| {
        if j < l {
            if i == j {
                1.0
            } else if i < j {
                -1.0
            } else {
                0.0
            }
        } else {
            1.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn random_wide(l: usize, n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        DMatrix::from_fn(l, n, |_, _| normal.sample(&mut rng))
    }

    fn permuted(x: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
        let mut out = DMatrix::<f64>::zeros(x.nrows(), x.ncols());
        for (t, &j) in perm.iter().enumerate() {
            out.set_column(t, &x.column(j));
        }
        out
    }

    #[test]
    fn lupp_identity_picks_leading_columns() {
        let x = DMatrix::<f64>::identity(4, 4);
        let pf = lupp_columns(&x).unwrap();
        assert_eq!(pf.pivots, vec![0, 1, 2, 3]);
        assert_eq!(pf.r1, DMatrix::identity(4, 4));
    }

    #[test]
    fn lupp_two_by_two_matches_hand_elimination() {
        let x = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 1.0, 3.0]);
        let pf = lupp_columns(&x).unwrap();
        assert_eq!(pf.pivots, vec![0, 1]);
        let f = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 1.0, 2.5]);
        let r = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!((pf.f - f).amax() < 1e-15);
        assert!((pf.r1 - r).amax() < 1e-15);
    }

    #[test]
    fn lupp_matches_schur_complement_oracle() {
        // brute-force reference: explicit Schur-complement elimination on the
        // wide matrix with argmax row scans
        let x = random_wide(5, 9, 3);
        let pf = lupp_columns(&x).unwrap();

        let mut w = x.clone();
        let mut perm: Vec<usize> = (0..9).collect();
        for t in 0..5 {
            let (mut p, mut best) = (t, w[(t, t)].abs());
            for j in t + 1..9 {
                if w[(t, j)].abs() > best {
                    best = w[(t, j)].abs();
                    p = j;
                }
            }
            w.swap_columns(t, p);
            perm.swap(t, p);
            for j in t + 1..9 {
                let ratio = w[(t, j)] / w[(t, t)];
                for i in t + 1..5 {
                    let delta = ratio * w[(i, t)];
                    w[(i, j)] -= delta;
                }
            }
        }
        assert_eq!(pf.pivots, perm[..5].to_vec());
    }

    #[test]
    fn lupp_reconstructs_and_bounds_entries() {
        for seed in 0..5 {
            let x = random_wide(8, 20, seed);
            let pf = lupp_columns(&x).unwrap();
            let xp = permuted(&x, &pf.perm);
            assert!((pf.reconstruct() - &xp).norm() <= 1e-12 * x.norm());
            for i in 0..8 {
                assert!((pf.r1[(i, i)] - 1.0).abs() == 0.0);
                for j in 0..8 {
                    assert!(pf.r1[(i, j)].abs() <= 1.0 + 1e-12);
                }
                for j in 0..12 {
                    assert!(pf.r2[(i, j)].abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn blocked_and_unblocked_lupp_agree_bitwise() {
        let x = random_wide(37, 120, 7);
        let blocked = lupp_columns_with_panel(&x, 16).unwrap();
        let unblocked = lupp_columns_with_panel(&x, 1).unwrap();
        assert_eq!(blocked.pivots, unblocked.pivots);
        assert_eq!(blocked.f, unblocked.f);
        assert_eq!(blocked.r1, unblocked.r1);
        assert_eq!(blocked.r2, unblocked.r2);
    }

    #[test]
    fn lupp_rows_is_the_transpose_dual() {
        let c = random_wide(8, 3, 11); // 8x3 tall
        let rows = lupp_rows(&c).unwrap();
        let cols = lupp_columns(&c.transpose()).unwrap();
        assert_eq!(rows.pivots, cols.pivots);
        assert_eq!(rows.r1, cols.r1);
        // identity case
        let id = DMatrix::<f64>::identity(5, 5);
        assert_eq!(lupp_rows(&id).unwrap().pivots, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn lupp_detects_rank_deficiency() {
        // rank-3 tall matrix with duplicated rows beyond rank 3
        let base = random_wide(3, 6, 2); // 3x6
        let mut c = DMatrix::<f64>::zeros(8, 3);
        for i in 0..8 {
            c.set_row(i, &base.column(i % 3).transpose());
        }
        // l = 3 succeeds
        assert!(lupp_rows(&c).is_ok());
        // a 4-column version built from the rank-3 row space must fail
        let mut c4 = DMatrix::<f64>::zeros(8, 4);
        let mix = random_wide(3, 4, 5);
        for i in 0..8 {
            let row = base.column(i % 3).transpose() * &mix;
            c4.set_row(i, &row.row(0));
        }
        match lupp_rows(&c4) {
            Err(Error::RankDeficient { stage, detail }) => {
                assert_eq!(stage, "lupp");
                assert!(detail.contains("step 3"), "detail: {detail}");
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn lupp_permutation_consistency() {
        let x = random_wide(6, 14, 23);
        let pf = lupp_columns(&x).unwrap();
        let xp = permuted(&x, &pf.perm);
        let replay = lupp_columns_in_order(&xp).unwrap();
        assert_eq!(replay.pivots, (0..6).collect::<Vec<_>>());
        assert_eq!(replay.f, pf.f);
        assert_eq!(replay.r1, pf.r1);
        assert_eq!(replay.r2, pf.r2);
    }

    #[test]
    fn cpqr_pivots_by_column_norm() {
        // diag(3, 4) padded with a zero third column
        let x = DMatrix::from_row_slice(2, 3, &[3.0, 0.0, 0.0, 0.0, 4.0, 0.0]);
        let pf = cpqr_columns(&x).unwrap();
        assert_eq!(pf.pivots, vec![1, 0]);
        assert_eq!(pf.perm, vec![1, 0, 2]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn cpqr_matches_gram_schmidt_rescan_oracle() {
        let x = random_wide(5, 12, 17);
        let pf = cpqr_columns(&x).unwrap();

        // oracle: explicitly orthogonalize and rescan the active norms
        let mut cols: Vec<DVector<f64>> = (0..12).map(|j| x.column(j).into()).collect();
        let mut perm: Vec<usize> = (0..12).collect();
        let mut picked: Vec<usize> = Vec::new();
        for t in 0..5 {
            let (mut p, mut best) = (t, cols[t].norm());
            for j in t + 1..12 {
                if cols[j].norm() > best {
                    best = cols[j].norm();
                    p = j;
                }
            }
            cols.swap(t, p);
            perm.swap(t, p);
            picked.push(perm[t]);
            let q = cols[t].normalize();
            for j in t + 1..12 {
                let proj = q.dot(&cols[j]);
                cols[j] -= &q * proj;
            }
        }
        assert_eq!(pf.pivots, picked);
    }

    #[test]
    fn cpqr_reconstructs_with_orthogonal_factor() {
        for seed in 0..5 {
            let x = random_wide(7, 15, 100 + seed);
            let pf = cpqr_columns(&x).unwrap();
            let xp = permuted(&x, &pf.perm);
            assert!((pf.reconstruct() - &xp).norm() <= 1e-12 * x.norm());
            let gram = pf.f.transpose() * &pf.f;
            assert!((gram - DMatrix::identity(7, 7)).amax() < 1e-12);
            for i in 1..7 {
                assert!(pf.r1[(i, i)].abs() <= pf.r1[(i - 1, i - 1)].abs());
            }
        }
    }

    #[test]
    fn cpqr_permutation_consistency() {
        let x = random_wide(6, 10, 37);
        let pf = cpqr_columns(&x).unwrap();
        let xp = permuted(&x, &pf.perm);
        let replay = cpqr_columns_in_order(&xp).unwrap();
        assert_eq!(replay.pivots, (0..6).collect::<Vec<_>>());
        assert_eq!(replay.r1, pf.r1);
        assert_eq!(replay.r2, pf.r2);
    }

    #[test]
    fn cpqr_rejects_rank_deficiency() {
        let mut x = DMatrix::<f64>::zeros(3, 5);
        x[(0, 0)] = 1.0;
        x[(1, 1)] = 1.0; // rank 2 < l = 3
        assert!(matches!(cpqr_columns(&x), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn growth_certificate_matches_dense_inverse() {
        let x = random_wide(20, 100, 9);
        let pf = lupp_columns(&x).unwrap();
        let g = pf.growth_certificate().unwrap();
        let dense = pf.r1.clone().try_inverse().unwrap() * &pf.r2;
        assert!((g - dense.amax()).abs() <= 1e-10 * dense.amax());
    }

    #[test]
    fn growth_certificate_empty_tail_is_zero() {
        let x = random_wide(4, 4, 1);
        let pf = lupp_columns(&x).unwrap();
        assert_eq!(pf.growth_certificate().unwrap(), 0.0);
    }

    #[test]
    fn kahan_witness_growth_is_exactly_two_to_l_minus_one() {
        for l in [3usize, 5, 10] {
            let n = l + 4;
            let x = kahan_witness(l, n);
            let pf = lupp_columns(&x).unwrap();
            assert_eq!(pf.pivots, (0..l).collect::<Vec<_>>());
            // R1^{-1} R2 rows are exactly 2^{l-i} (1-based i)
            let solved = pf.r1.solve_upper_triangular(&pf.r2).unwrap();
            for i in 0..l {
                let expect = 2f64.powi((l - i - 1) as i32);
                for j in 0..n - l {
                    assert_eq!(solved[(i, j)], expect);
                }
            }
            assert_eq!(pf.growth_certificate().unwrap(), 2f64.powi(l as i32 - 1));
        }
    }

    #[test]
    fn growth_stays_under_the_worst_case_bound() {
        for seed in 0..10 {
            let x = random_wide(10, 40, 200 + seed);
            for pf in [lupp_columns(&x).unwrap(), cpqr_columns(&x).unwrap()] {
                let g = pf.growth_certificate().unwrap();
                assert!(g <= 2f64.powi(9) * (1.0 + 1e-9));
            }
        }
    }
}
