//! Construction and evaluation of interpolative and CUR decompositions.
//!
//! Every pseudoinverse application goes through QR-based least squares or an
//! LU solve; the only explicit inverse lives in the skeleton-inverse CUR
//! `C S^{-1} R`, which trades stability for streaming friendliness.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ortho, DENSE_SVD_LIMIT};
use crate::matsource::market::{load_matrix_market, write_dense_matrix_market};
use crate::matsource::MatrixSource;

/// Which norm an error evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Fro,
    Spec,
}

impl std::str::FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fro" | "frobenius" => Ok(Norm::Fro),
            "spec" | "spectral" | "2" => Ok(Norm::Spec),
            other => Err(Error::InvalidParameter(format!("unknown norm '{other}'"))),
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Norm::Fro => "fro",
            Norm::Spec => "spec",
        })
    }
}

/// A constructed low-rank decomposition.
#[derive(Debug, Clone)]
pub enum Factors {
    /// `A ~ C Z` with `C = A(:, J_s)` and `Z = C^+ A`.
    ColumnId {
        c: DMatrix<f64>,
        z: DMatrix<f64>,
        cols: Vec<usize>,
    },
    /// `A ~ W R` with `R = A(I_s, :)` and `W = A R^+`.
    RowId {
        w: DMatrix<f64>,
        r: DMatrix<f64>,
        rows: Vec<usize>,
    },
    /// `A ~ (C S^{-1}) S (C^+ A)`, all three factors formed by solves.
    TwoSidedId {
        c_sinv: DMatrix<f64>,
        s: DMatrix<f64>,
        cdag_a: DMatrix<f64>,
        rows: Vec<usize>,
        cols: Vec<usize>,
    },
    /// `A ~ Q_C (Q_C^T A Q_R) Q_R^T`, the numerically stable CUR form.
    CurStable {
        qc: DMatrix<f64>,
        core: DMatrix<f64>,
        qr: DMatrix<f64>,
        rows: Vec<usize>,
        cols: Vec<usize>,
    },
    /// `A ~ C S^{-1} R`, the one-extra-pass streaming CUR.
    CurSkeletonInverse {
        c: DMatrix<f64>,
        s_inv: DMatrix<f64>,
        r: DMatrix<f64>,
        rows: Vec<usize>,
        cols: Vec<usize>,
    },
    /// Interpolation coefficients estimated from streaming sketches alone:
    /// `col_coeffs ~ C^+ A` and `row_coeffs ~ A R^+`. Attach the retrieved
    /// skeletons to obtain an applicable ID.
    IdStreaming {
        col_coeffs: DMatrix<f64>,
        row_coeffs: DMatrix<f64>,
        rows: Vec<usize>,
        cols: Vec<usize>,
    },
}

impl Factors {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Factors::ColumnId { .. } => "column-id",
            Factors::RowId { .. } => "row-id",
            Factors::TwoSidedId { .. } => "two-sided-id",
            Factors::CurStable { .. } => "cur-stable",
            Factors::CurSkeletonInverse { .. } => "cur-skeleton-inverse",
            Factors::IdStreaming { .. } => "id-streaming",
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Factors::ColumnId { c, .. } => c.ncols(),
            Factors::RowId { r, .. } => r.nrows(),
            Factors::TwoSidedId { s, .. } => s.nrows(),
            Factors::CurStable { core, .. } => core.nrows(),
            Factors::CurSkeletonInverse { s_inv, .. } => s_inv.nrows(),
            Factors::IdStreaming { col_coeffs, .. } => col_coeffs.nrows(),
        }
    }

    /// Condition number of the two-sided skeleton block `S = A(I_s, J_s)`,
    /// for the kinds that carry it. A diagnostic: well-selected skeletons
    /// keep `S` as well conditioned as the corresponding dense-pivoted block.
    pub fn skeleton_condition(&self) -> Option<f64> {
        let block = match self {
            Factors::TwoSidedId { s, .. } => s,
            // cond(S^{-1}) = cond(S)
            Factors::CurSkeletonInverse { s_inv, .. } => s_inv,
            _ => return None,
        };
        let sv = linalg::singular_values(block);
        let smin = sv[sv.len() - 1];
        Some(if smin > 0.0 {
            sv[0] / smin
        } else {
            f64::INFINITY
        })
    }

    /// `(m, n)` of the approximated matrix.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Factors::ColumnId { c, z, .. } => (c.nrows(), z.ncols()),
            Factors::RowId { w, r, .. } => (w.nrows(), r.ncols()),
            Factors::TwoSidedId { c_sinv, cdag_a, .. } => (c_sinv.nrows(), cdag_a.ncols()),
            Factors::CurStable { qc, qr, .. } => (qc.nrows(), qr.nrows()),
            Factors::CurSkeletonInverse { c, r, .. } => (c.nrows(), r.ncols()),
            Factors::IdStreaming {
                col_coeffs,
                row_coeffs,
                ..
            } => (row_coeffs.nrows(), col_coeffs.ncols()),
        }
    }

    /// Dense reconstruction of the approximation.
    pub fn reconstruct(&self) -> Result<DMatrix<f64>> {
        match self {
            Factors::ColumnId { c, z, .. } => Ok(c * z),
            Factors::RowId { w, r, .. } => Ok(w * r),
            Factors::TwoSidedId {
                c_sinv, s, cdag_a, ..
            } => Ok(c_sinv * s * cdag_a),
            Factors::CurStable { qc, core, qr, .. } => Ok(qc * core * qr.transpose()),
            Factors::CurSkeletonInverse { c, s_inv, r, .. } => Ok(c * s_inv * r),
            Factors::IdStreaming { .. } => Err(Error::InvalidParameter(
                "streaming coefficients need the retrieved skeletons; \
                 use into_column_id / into_row_id"
                    .into(),
            )),
        }
    }

    /// Apply the approximation to a vector without forming it densely.
    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        let (_, n) = self.shape();
        if v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "factors apply: vector length {} != n = {n}",
                v.len()
            )));
        }
        match self {
            Factors::ColumnId { c, z, .. } => Ok(c * (z * v)),
            Factors::RowId { w, r, .. } => Ok(w * (r * v)),
            Factors::TwoSidedId {
                c_sinv, s, cdag_a, ..
            } => Ok(c_sinv * (s * (cdag_a * v))),
            Factors::CurStable { qc, core, qr, .. } => Ok(qc * (core * (qr.transpose() * v))),
            Factors::CurSkeletonInverse { c, s_inv, r, .. } => Ok(c * (s_inv * (r * v))),
            Factors::IdStreaming { .. } => Err(Error::InvalidParameter(
                "streaming coefficients need the retrieved skeletons; \
                 use into_column_id / into_row_id"
                    .into(),
            )),
        }
    }

    /// Promote streaming column coefficients to a column ID, given the
    /// retrieved skeleton columns `C = A(:, J_s)`.
    pub fn into_column_id(self, c: DMatrix<f64>) -> Result<Factors> {
        match self {
            Factors::IdStreaming {
                col_coeffs, cols, ..
            } => {
                if c.ncols() != cols.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "expected {} skeleton columns, got {}",
                        cols.len(),
                        c.ncols()
                    )));
                }
                Ok(Factors::ColumnId {
                    c,
                    z: col_coeffs,
                    cols,
                })
            }
            _ => Err(Error::InvalidParameter(
                "into_column_id applies to streaming coefficients only".into(),
            )),
        }
    }

    /// Promote streaming row coefficients to a row ID, given the retrieved
    /// skeleton rows `R = A(I_s, :)`.
    pub fn into_row_id(self, r: DMatrix<f64>) -> Result<Factors> {
        match self {
            Factors::IdStreaming {
                row_coeffs, rows, ..
            } => {
                if r.nrows() != rows.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "expected {} skeleton rows, got {}",
                        rows.len(),
                        r.nrows()
                    )));
                }
                Ok(Factors::RowId {
                    w: row_coeffs,
                    r,
                    rows,
                })
            }
            _ => Err(Error::InvalidParameter(
                "into_row_id applies to streaming coefficients only".into(),
            )),
        }
    }

    fn components(&self) -> Vec<(&'static str, &DMatrix<f64>)> {
        match self {
            Factors::ColumnId { c, z, .. } => vec![("c", c), ("z", z)],
            Factors::RowId { w, r, .. } => vec![("w", w), ("r", r)],
            Factors::TwoSidedId {
                c_sinv, s, cdag_a, ..
            } => vec![("c_sinv", c_sinv), ("s", s), ("cdag_a", cdag_a)],
            Factors::CurStable { qc, core, qr, .. } => {
                vec![("qc", qc), ("core", core), ("qr", qr)]
            }
            Factors::CurSkeletonInverse { c, s_inv, r, .. } => {
                vec![("c", c), ("s_inv", s_inv), ("r", r)]
            }
            Factors::IdStreaming {
                col_coeffs,
                row_coeffs,
                ..
            } => vec![("col_coeffs", col_coeffs), ("row_coeffs", row_coeffs)],
        }
    }

    fn skeleton_indices(&self) -> (Option<&[usize]>, Option<&[usize]>) {
        match self {
            Factors::ColumnId { cols, .. } => (None, Some(cols)),
            Factors::RowId { rows, .. } => (Some(rows), None),
            Factors::TwoSidedId { rows, cols, .. }
            | Factors::CurStable { rows, cols, .. }
            | Factors::CurSkeletonInverse { rows, cols, .. }
            | Factors::IdStreaming { rows, cols, .. } => (Some(rows), Some(cols)),
        }
    }

    /// Export as a directory of Matrix Market files plus a manifest.
    pub fn export_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let comps = self.components();
        let (rows, cols) = self.skeleton_indices();
        let (m, n) = self.shape();
        let manifest = Manifest {
            kind: self.kind_name().to_string(),
            m,
            n,
            rank: self.rank(),
            rows: rows.map(|r| r.to_vec()),
            cols: cols.map(|c| c.to_vec()),
            components: comps.iter().map(|(name, _)| name.to_string()).collect(),
        };
        std::fs::write(
            dir.join("manifest.toml"),
            toml::to_string(&manifest).expect("manifest serialization"),
        )?;
        for (name, mat) in comps {
            write_dense_matrix_market(mat, dir.join(format!("{name}.mtx")))?;
        }
        Ok(())
    }

    /// Load a directory written by [`Factors::export_dir`].
    pub fn import_dir(dir: impl AsRef<Path>) -> Result<Factors> {
        let dir = dir.as_ref();
        let text = std::fs::read_to_string(dir.join("manifest.toml"))?;
        let manifest: Manifest =
            toml::from_str(&text).map_err(|e| Error::Config(format!("manifest: {e}")))?;
        let load = |name: &str| -> Result<DMatrix<f64>> {
            Ok(load_matrix_market(dir.join(format!("{name}.mtx")))?.to_dense())
        };
        let missing = |what: &str| Error::Config(format!("manifest missing '{what}' indices"));
        match manifest.kind.as_str() {
            "column-id" => Ok(Factors::ColumnId {
                c: load("c")?,
                z: load("z")?,
                cols: manifest.cols.ok_or_else(|| missing("cols"))?,
            }),
            "row-id" => Ok(Factors::RowId {
                w: load("w")?,
                r: load("r")?,
                rows: manifest.rows.ok_or_else(|| missing("rows"))?,
            }),
            "two-sided-id" => Ok(Factors::TwoSidedId {
                c_sinv: load("c_sinv")?,
                s: load("s")?,
                cdag_a: load("cdag_a")?,
                rows: manifest.rows.ok_or_else(|| missing("rows"))?,
                cols: manifest.cols.ok_or_else(|| missing("cols"))?,
            }),
            "cur-stable" => Ok(Factors::CurStable {
                qc: load("qc")?,
                core: load("core")?,
                qr: load("qr")?,
                rows: manifest.rows.ok_or_else(|| missing("rows"))?,
                cols: manifest.cols.ok_or_else(|| missing("cols"))?,
            }),
            "cur-skeleton-inverse" => Ok(Factors::CurSkeletonInverse {
                c: load("c")?,
                s_inv: load("s_inv")?,
                r: load("r")?,
                rows: manifest.rows.ok_or_else(|| missing("rows"))?,
                cols: manifest.cols.ok_or_else(|| missing("cols"))?,
            }),
            "id-streaming" => Ok(Factors::IdStreaming {
                col_coeffs: load("col_coeffs")?,
                row_coeffs: load("row_coeffs")?,
                rows: manifest.rows.ok_or_else(|| missing("rows"))?,
                cols: manifest.cols.ok_or_else(|| missing("cols"))?,
            }),
            other => Err(Error::Config(format!("unknown factors kind '{other}'"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    kind: String,
    m: usize,
    n: usize,
    rank: usize,
    rows: Option<Vec<usize>>,
    cols: Option<Vec<usize>>,
    components: Vec<String>,
}

/// Interpolation coefficients `Z = C^+ A` through QR least squares;
/// one block application of `A^T`.
fn interpolation_coefficients(a: &MatrixSource, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = c.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let scale = c.amax().max(f64::MIN_POSITIVE);
    for j in 0..r.ncols() {
        if r[(j, j)].abs() <= 1e-14 * scale {
            return Err(Error::rank_deficient(
                "column interpolation",
                format!("skeleton columns are dependent (column {j})"),
            ));
        }
    }
    let qta = a.apply_transpose_mat(&q)?.transpose(); // l x n
    r.solve_upper_triangular(&qta)
        .ok_or_else(|| Error::Singular("column interpolation solve failed".into()))
}

/// Column ID `A ~ C (C^+ A)` for the given skeleton columns.
pub fn build_column_id(a: &MatrixSource, js: &[usize]) -> Result<Factors> {
    let c = a.gather_columns(js)?;
    let z = interpolation_coefficients(a, &c)?;
    Ok(Factors::ColumnId {
        c,
        z,
        cols: js.to_vec(),
    })
}

/// Row ID `A ~ (A R^+) R` for the given skeleton rows.
pub fn build_row_id(a: &MatrixSource, is: &[usize]) -> Result<Factors> {
    let r = a.gather_rows(is)?;
    let qr = r.transpose().qr();
    let q = qr.q(); // n x l
    let rr = qr.r(); // l x l
    let scale = r.amax().max(f64::MIN_POSITIVE);
    for j in 0..rr.ncols() {
        if rr[(j, j)].abs() <= 1e-14 * scale {
            return Err(Error::rank_deficient(
                "row interpolation",
                format!("skeleton rows are dependent (row {j})"),
            ));
        }
    }
    let b = a.apply_mat(&q)?; // m x l
                              // W R_r^T = B  <=>  R_r W^T = B^T
    let wt = rr
        .solve_upper_triangular(&b.transpose())
        .ok_or_else(|| Error::Singular("row interpolation solve failed".into()))?;
    Ok(Factors::RowId {
        w: wt.transpose(),
        r,
        rows: is.to_vec(),
    })
}

/// Two-sided ID `A ~ (C S^{-1}) S (C^+ A)`; every factor is produced by a
/// solve, never an explicit inverse.
pub fn build_two_sided_id(a: &MatrixSource, is: &[usize], js: &[usize]) -> Result<Factors> {
    if is.len() != js.len() {
        return Err(Error::InvalidParameter(format!(
            "two-sided ID needs |I_s| = |J_s|, got {} and {}",
            is.len(),
            js.len()
        )));
    }
    let c = a.gather_columns(js)?;
    let s = linalg::gather_rows(&c, is);
    // T S = C  =>  S^T T^T = C^T
    let lu = s.transpose().lu();
    let c_sinv = lu
        .solve(&c.transpose())
        .ok_or_else(|| Error::Singular("two-sided ID: skeleton block S is singular".into()))?
        .transpose();
    let cdag_a = interpolation_coefficients(a, &c)?;
    Ok(Factors::TwoSidedId {
        c_sinv,
        s,
        cdag_a,
        rows: is.to_vec(),
        cols: js.to_vec(),
    })
}

/// Stable CUR `A ~ Q_C (Q_C^T A Q_R) Q_R^T` from unpivoted QRs of the
/// skeletons.
pub fn build_cur_stable(a: &MatrixSource, is: &[usize], js: &[usize]) -> Result<Factors> {
    if is.len() != js.len() {
        return Err(Error::InvalidParameter(format!(
            "CUR needs |I_s| = |J_s|, got {} and {}",
            is.len(),
            js.len()
        )));
    }
    let c = a.gather_columns(js)?;
    let r = a.gather_rows(is)?;
    let qc = ortho(&c).map_err(|e| match e {
        Error::RankDeficient { detail, .. } => Error::RankDeficient {
            stage: "cur: column skeletons".into(),
            detail,
        },
        other => other,
    })?;
    let qr_basis = ortho(&r.transpose()).map_err(|e| match e {
        Error::RankDeficient { detail, .. } => Error::RankDeficient {
            stage: "cur: row skeletons".into(),
            detail,
        },
        other => other,
    })?;
    let aqr = a.apply_mat(&qr_basis)?; // m x l
    let core = qc.transpose() * aqr; // l x l
    Ok(Factors::CurStable {
        qc,
        core,
        qr: qr_basis,
        rows: is.to_vec(),
        cols: js.to_vec(),
    })
}

/// Skeleton-inverse CUR `A ~ C S^{-1} R` from already-retrieved skeletons.
/// This is the streaming-friendly form: it needs one retrieval pass and no
/// second pass over `A`, at a known cost in accuracy and stability.
pub fn build_cur_skeleton_inverse(
    c: DMatrix<f64>,
    s: DMatrix<f64>,
    r: DMatrix<f64>,
    is: &[usize],
    js: &[usize],
) -> Result<Factors> {
    let l = s.nrows();
    if s.ncols() != l || c.ncols() != l || r.nrows() != l {
        return Err(Error::DimensionMismatch(format!(
            "skeleton shapes disagree: C is {}x{}, S is {}x{}, R is {}x{}",
            c.nrows(),
            c.ncols(),
            s.nrows(),
            s.ncols(),
            r.nrows(),
            r.ncols()
        )));
    }
    let s_inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("skeleton block S is singular".into()))?;
    Ok(Factors::CurSkeletonInverse {
        c,
        s_inv,
        r,
        rows: is.to_vec(),
        cols: js.to_vec(),
    })
}

/// Estimate the interpolation coefficients from the streaming sketches
/// alone: `C^+ A ~ X1^+ X` and `A R^+ ~ Y Y1^+`. No access to `A`.
pub fn estimate_id_from_sketches(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    js: &[usize],
    is: &[usize],
) -> Result<Factors> {
    let l = x.nrows();
    if js.len() != l || is.len() != l || y.ncols() != l {
        return Err(Error::DimensionMismatch(format!(
            "sketch shapes disagree with skeleton sizes: X is {}x{}, Y is {}x{}, \
             |J_s| = {}, |I_s| = {}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols(),
            js.len(),
            is.len()
        )));
    }
    let x1 = linalg::gather_columns(x, js);
    let col_coeffs = x1
        .lu()
        .solve(x)
        .ok_or_else(|| Error::Singular("sketch pivot block X1 is singular".into()))?;
    let y1 = linalg::gather_rows(y, is);
    // T Y1 = Y  =>  Y1^T T^T = Y^T
    let row_coeffs = y1
        .transpose()
        .lu()
        .solve(&y.transpose())
        .ok_or_else(|| Error::Singular("sketch pivot block Y1 is singular".into()))?
        .transpose();
    Ok(Factors::IdStreaming {
        col_coeffs,
        row_coeffs,
        rows: is.to_vec(),
        cols: js.to_vec(),
    })
}

/// Error report of [`evaluate_error`].
#[derive(Debug, Clone, Copy)]
pub struct ErrorReport {
    /// `||A - reconstruct(F)||` in the requested norm.
    pub err: f64,
    /// `||A - A_k||`, the optimal rank-`k` error.
    pub opt_err: f64,
    /// `err / opt_err`, with the 0/0 case pinned to 1.
    pub ratio: f64,
}

fn opt_err_from_sigma(sigma: &[f64], k: usize, norm: Norm) -> f64 {
    if k >= sigma.len() {
        return 0.0;
    }
    match norm {
        Norm::Spec => sigma[k],
        Norm::Fro => sigma[k..].iter().map(|s| s * s).sum::<f64>().sqrt(),
    }
}

fn finish_report(
    a_dense: &DMatrix<f64>,
    f: &Factors,
    opt_err: f64,
    norm: Norm,
) -> Result<ErrorReport> {
    let recon = f.reconstruct()?;
    if recon.shape() != a_dense.shape() {
        return Err(Error::DimensionMismatch(format!(
            "factors reconstruct to {:?}, matrix is {:?}",
            recon.shape(),
            a_dense.shape()
        )));
    }
    let res = a_dense - recon;
    let err = match norm {
        Norm::Fro => res.norm(),
        Norm::Spec => linalg::spectral_norm(&res),
    };
    // an opt_err at the floating-point dust level counts as exact rank
    let tiny = 1e-12 * a_dense.norm();
    let ratio = if opt_err > tiny {
        err / opt_err
    } else if err <= tiny {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(ErrorReport {
        err,
        opt_err,
        ratio,
    })
}

/// Measure the factorization error against the truncated-SVD optimum at
/// rank `k`. Requires the matrix to fit the dense-SVD budget; otherwise use
/// [`evaluate_error_with_spectrum`].
pub fn evaluate_error(a: &MatrixSource, f: &Factors, k: usize, norm: Norm) -> Result<ErrorReport> {
    if a.nrows().max(a.ncols()) > DENSE_SVD_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "{}x{} exceeds the dense-SVD budget ({DENSE_SVD_LIMIT}); supply the spectrum",
            a.nrows(),
            a.ncols()
        )));
    }
    let dense = a.to_dense();
    let sv = linalg::singular_values(&dense);
    let opt = opt_err_from_sigma(sv.as_slice(), k, norm);
    finish_report(&dense, f, opt, norm)
}

/// Same as [`evaluate_error`], taking the singular values of `A` as given.
pub fn evaluate_error_with_spectrum(
    a: &MatrixSource,
    f: &Factors,
    k: usize,
    norm: Norm,
    sigma: &[f64],
) -> Result<ErrorReport> {
    let dense = a.to_dense();
    let opt = opt_err_from_sigma(sigma, k, norm);
    finish_report(&dense, f, opt, norm)
}
