//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest dimension for which dense SVDs are taken without complaint.
pub(crate) const DENSE_SVD_LIMIT: usize = 5000;

/// Orthonormal basis for the column space of `m` via unpivoted QR.
///
/// The basis is sign-fixed so that the triangular factor has a nonnegative
/// diagonal, which makes downstream results deterministic. Fails when a
/// diagonal entry of R collapses (rank-deficient input).
pub(crate) fn ortho(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::DimensionMismatch(format!(
            "ortho expects a tall matrix, got {rows}x{cols}"
        )));
    }
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    let scale = m.amax();
    for j in 0..cols {
        let d = r[(j, j)];
        if d.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::rank_deficient(
                "ortho",
                format!("column {j} of the QR factor collapsed"),
            ));
        }
        if d < 0.0 {
            for i in 0..rows {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// Economy SVD returning `(U, sigma, V)` with singular values nonincreasing.
pub(crate) fn svd_econ(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    (u, svd.singular_values, vt.transpose())
}

pub(crate) fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().singular_values()
}

/// Spectral norm; dense SVD when feasible, power iteration on G^T G above
/// the dense budget (relative tolerance 1e-4, 200 iterations).
pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows().max(m.ncols()) <= DENSE_SVD_LIMIT {
        if m.nrows() == 0 || m.ncols() == 0 {
            return 0.0;
        }
        singular_values(m)[0]
    } else {
        spectral_norm_power(m, 1e-4, 200)
    }
}

pub(crate) fn spectral_norm_power(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    // Deterministic start: ones vector is fine since m^T m is PSD.
    let mut v = DVector::<f64>::from_element(n, 1.0 / (n as f64).sqrt());
    let mut est = 0.0f64;
    for _ in 0..max_iter {
        let w = m * &v;
        let next = m.transpose() * w;
        let norm = next.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let new_est = norm.sqrt();
        v = next / norm;
        if (new_est - est).abs() <= tol * new_est {
            return new_est;
        }
        est = new_est;
    }
    est
}

/// Least-squares solve of `min ||C Z - B||_F` through an unpivoted QR of C.
/// Errors when the columns of C are (numerically) dependent.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn least_squares(c: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (m, l) = c.shape();
    if b.nrows() != m {
        return Err(Error::DimensionMismatch(format!(
            "least_squares: lhs has {m} rows, rhs has {}",
            b.nrows()
        )));
    }
    if m < l {
        return Err(Error::DimensionMismatch(format!(
            "least_squares expects a tall lhs, got {m}x{l}"
        )));
    }
    let qr = c.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let scale = c.amax();
    for j in 0..l {
        if r[(j, j)].abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::rank_deficient(
                "least_squares",
                format!("dependent columns detected at column {j}"),
            ));
        }
    }
    let qtb = q.transpose() * b;
    r.solve_upper_triangular(&qtb).ok_or_else(|| {
        Error::rank_deficient("least_squares", "triangular solve failed".to_string())
    })
}

/// Gather columns `js` of `m` into a new matrix, in the given order.
pub(crate) fn gather_columns(m: &DMatrix<f64>, js: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::zeros(m.nrows(), js.len());
    for (t, &j) in js.iter().enumerate() {
        out.set_column(t, &m.column(j));
    }
    out
}

/// Gather rows `is` of `m` into a new matrix, in the given order.
pub(crate) fn gather_rows(m: &DMatrix<f64>, is: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::zeros(is.len(), m.ncols());
    for (t, &i) in is.iter().enumerate() {
        out.set_row(t, &m.row(i));
    }
    out
}

/// Indices in `0..n` that do not occur in `chosen`, ascending.
pub(crate) fn complement(n: usize, chosen: &[usize]) -> Vec<usize> {
    let mut in_set = vec![false; n];
    for &j in chosen {
        in_set[j] = true;
    }
    (0..n).filter(|&j| !in_set[j]).collect()
}

pub(crate) fn check_indices(n: usize, idx: &[usize], what: &str) -> Result<()> {
    let mut seen = vec![false; n];
    for &j in idx {
        if j >= n {
            return Err(Error::InvalidParameter(format!(
                "{what} index {j} out of range 0..{n}"
            )));
        }
        if seen[j] {
            return Err(Error::InvalidParameter(format!(
                "{what} index {j} repeated"
            )));
        }
        seen[j] = true;
    }
    Ok(())
}

/// SplitMix64 step, used to derive independent sub-seeds.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministically fold `parts` into one seed.
pub(crate) fn mix_seed(parts: &[u64]) -> u64 {
    let mut s = 0x8f1b_bcdc_bfa5_3e0bu64;
    for &p in parts {
        s = splitmix64(s ^ p);
    }
    s
}
