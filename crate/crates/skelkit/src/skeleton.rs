//! Skeleton selection: the sketch-then-pivot framework, its named
//! instantiations (Rand-LUPP, Rand-CPQR, RSVD-DEIM, leverage-score
//! sampling), the one-pass streaming variant, and the a-posteriori
//! certificate bounding the skeleton error relative to the rangefinder
//! error.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{Embedding, EmbeddingSpec, Side};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matsource::MatrixSource;
use crate::pivot::{pivot_columns, PivotKind};
use crate::rangefinder::{
    self, leverage_scores, randomized_svd, row_leverage_scores, RowSpaceApproximator,
};

/// How the row-space approximator for the framework is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowspaceKind {
    /// Plain row sketch `X = Gamma A`.
    Sketch,
    /// Plain power iteration `X = Omega (A^T A)^q`.
    PlainPower(usize),
    /// Orthogonalized power iteration.
    OrthoPower(usize),
    /// Right singular vector estimates of the randomized SVD, transposed.
    RsvdVectors,
}

/// Selected column and/or row skeletons with their certificates.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SkeletonSet {
    /// Column skeleton indices `J_s` (0-based, distinct, selection order).
    pub col_indices: Vec<usize>,
    /// Row skeleton indices `I_s`, when a two-sided selection was made.
    pub row_indices: Option<Vec<usize>>,
    pub algorithm: String,
    pub seed: u64,
    pub eta_col: Option<f64>,
    pub eta_row: Option<f64>,
}

impl SkeletonSet {
    pub fn rank(&self) -> usize {
        self.col_indices.len()
    }

    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        linalg::check_indices(n, &self.col_indices, "column skeleton")?;
        if let Some(rows) = &self.row_indices {
            linalg::check_indices(m, rows, "row skeleton")?;
            if rows.len() != self.col_indices.len() {
                return Err(Error::InvalidParameter(format!(
                    "skeleton sides disagree: {} rows vs {} columns",
                    rows.len(),
                    self.col_indices.len()
                )));
            }
        }
        Ok(())
    }

    /// Serialize as the small TOML document used by the CLI.
    pub fn to_document(&self) -> String {
        toml::to_string(self).expect("skeleton document serialization")
    }

    pub fn from_document(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("skeleton document: {e}")))
    }
}

/// A-posteriori certificate of Theorem-style pivoting quality:
/// `eta = sqrt(1 + ||X1^+ X2||_2^2)` for the pivot block `X1 = X(:, J_s)`.
#[derive(Debug, Clone)]
pub struct EtaCertificate {
    pub eta_bound: f64,
    /// `l x l` pivot block.
    pub x1: DMatrix<f64>,
    /// `l x (n-l)` non-pivot block, ascending original column order.
    pub x2: DMatrix<f64>,
    /// `||A - A X^+ X||_F` when the caller evaluated it.
    pub residual_norm: Option<f64>,
}

impl EtaCertificate {
    /// Record the rangefinder residual this certificate multiplies, turning
    /// the bound into an absolute error estimate.
    pub fn with_residual(mut self, norm: f64) -> Self {
        self.residual_norm = Some(norm);
        self
    }

    /// `eta * residual`, the certified error bound, once the residual is
    /// attached.
    pub fn certified_error(&self) -> Option<f64> {
        self.residual_norm.map(|r| r * self.eta_bound)
    }
}

/// Compute the eta certificate for column pivots of a wide `l x n` matrix.
/// Cost: one `l x l` LU, one triangular backsubstitution against `n - l`
/// columns (`O(l^2 (n-l))`), and the spectral norm of the small result.
pub fn eta_certificate(x: &DMatrix<f64>, pivots: &[usize]) -> Result<EtaCertificate> {
    let (l, n) = x.shape();
    if pivots.len() != l {
        return Err(Error::InvalidParameter(format!(
            "eta_certificate: expected {l} pivots, got {}",
            pivots.len()
        )));
    }
    linalg::check_indices(n, pivots, "pivot")?;
    let x1 = linalg::gather_columns(x, pivots);
    let rest = linalg::complement(n, pivots);
    let x2 = linalg::gather_columns(x, &rest);
    if x2.ncols() == 0 {
        return Ok(EtaCertificate {
            eta_bound: 1.0,
            x1,
            x2,
            residual_norm: None,
        });
    }
    let lu = x1.clone().lu();
    let solved = lu
        .solve(&x2)
        .ok_or_else(|| Error::Singular("eta_certificate: pivot block X1 is singular".into()))?;
    let s = linalg::spectral_norm(&solved);
    Ok(EtaCertificate {
        eta_bound: (1.0 + s * s).sqrt(),
        x1,
        x2,
        residual_norm: None,
    })
}

/// Row-side analog: certificate for row pivots of a tall `m x l` matrix,
/// obtained by applying [`eta_certificate`] to its transpose.
pub fn eta_certificate_rows(y: &DMatrix<f64>, pivots: &[usize]) -> Result<EtaCertificate> {
    eta_certificate(&y.transpose(), pivots)
}

fn restage(err: Error, stage: &str) -> Error {
    match err {
        Error::RankDeficient { detail, .. } => Error::RankDeficient {
            stage: stage.to_string(),
            detail,
        },
        other => other,
    }
}

/// Build the row-space approximator used by [`select_framework`].
pub fn build_rowspace(
    a: &MatrixSource,
    l: usize,
    kind: RowspaceKind,
    spec: &EmbeddingSpec,
) -> Result<RowSpaceApproximator> {
    let row_spec = spec.with_dims(l, a.nrows());
    let pow_spec = spec.with_dims(l, a.ncols());
    match kind {
        RowspaceKind::Sketch => rangefinder::row_sketch_rangefinder(a, &row_spec),
        RowspaceKind::PlainPower(q) => rangefinder::plain_power_iteration(a, &pow_spec, q),
        RowspaceKind::OrthoPower(q) => rangefinder::orthogonalized_power_iteration(a, &pow_spec, q),
        RowspaceKind::RsvdVectors => {
            let x = rangefinder::row_sketch_rangefinder(a, &row_spec)?;
            let sd = randomized_svd(a, &x)?;
            Ok(RowSpaceApproximator {
                x: sd.v_hat.transpose(),
                provenance: rangefinder::Provenance::RsvdRightVectors,
                seed: spec.seed,
            })
        }
    }
    .map_err(|e| restage(e, "rowspace approximation"))
}

fn label(kind: RowspaceKind, pivot: PivotKind) -> String {
    let base = match pivot {
        PivotKind::Lupp => "rand-lupp",
        PivotKind::Cpqr => "rand-cpqr",
    };
    match (kind, pivot) {
        (RowspaceKind::Sketch, _) => base.to_string(),
        (RowspaceKind::PlainPower(1), _) => format!("{base}-1piter"),
        (RowspaceKind::PlainPower(q), _) => format!("{base}-{q}piter"),
        (RowspaceKind::OrthoPower(q), _) => format!("{base}-ortho{q}"),
        (RowspaceKind::RsvdVectors, PivotKind::Lupp) => "rsvd-deim".to_string(),
        (RowspaceKind::RsvdVectors, PivotKind::Cpqr) => "rsvd-cpqr".to_string(),
    }
}

/// The general randomized pivoting framework: build a row-space
/// approximator, column-pivot it for `J_s`, then row-pivot the selected
/// columns `C = A(:, J_s)` for `I_s`. Since `X` has full row rank the
/// selected columns are linearly independent and the row stage is exact.
pub fn select_framework(
    a: &MatrixSource,
    l: usize,
    rowspace: RowspaceKind,
    pivot_kind: PivotKind,
    spec: &EmbeddingSpec,
) -> Result<SkeletonSet> {
    if l == 0 || l > a.nrows().min(a.ncols()) {
        return Err(Error::InvalidParameter(format!(
            "selection rank l = {l} must satisfy 1 <= l <= min(m, n) = {}",
            a.nrows().min(a.ncols())
        )));
    }
    let x = build_rowspace(a, l, rowspace, spec)?;
    let pf_col = pivot_columns(pivot_kind, &x.x).map_err(|e| restage(e, "column pivoting"))?;
    let eta_col = eta_certificate(&x.x, &pf_col.pivots)?.eta_bound;

    let c = a.gather_columns(&pf_col.pivots)?;
    let pf_row = pivot_columns(pivot_kind, &c.transpose())
        .map_err(|e| restage(e, "row pivoting of the selected columns"))?;
    let eta_row = eta_certificate_rows(&c, &pf_row.pivots)?.eta_bound;

    Ok(SkeletonSet {
        col_indices: pf_col.pivots,
        row_indices: Some(pf_row.pivots),
        algorithm: label(rowspace, pivot_kind),
        seed: spec.seed,
        eta_col: Some(eta_col),
        eta_row: Some(eta_row),
    })
}

/// Rand-LUPP: LUPP pivoting on a row sketch (`q = 0`) or on a plain
/// power-iterated sketch (`q >= 1`).
pub fn rand_lupp(
    a: &MatrixSource,
    l: usize,
    spec: &EmbeddingSpec,
    q: usize,
) -> Result<SkeletonSet> {
    let rowspace = if q == 0 {
        RowspaceKind::Sketch
    } else {
        RowspaceKind::PlainPower(q)
    };
    select_framework(a, l, rowspace, PivotKind::Lupp, spec)
}

/// Rand-CPQR: CPQR pivoting on the same row-space approximators.
pub fn rand_cpqr(
    a: &MatrixSource,
    l: usize,
    spec: &EmbeddingSpec,
    q: usize,
) -> Result<SkeletonSet> {
    let rowspace = if q == 0 {
        RowspaceKind::Sketch
    } else {
        RowspaceKind::PlainPower(q)
    };
    select_framework(a, l, rowspace, PivotKind::Cpqr, spec)
}

/// RSVD-DEIM: LUPP pivoting on the randomized-SVD right singular vectors
/// (one extra orthogonalized pass over `A` compared to Rand-LUPP).
pub fn rsvd_deim(a: &MatrixSource, l: usize, spec: &EmbeddingSpec) -> Result<SkeletonSet> {
    select_framework(a, l, RowspaceKind::RsvdVectors, PivotKind::Lupp, spec)
}

/// Draw `k` distinct indices with probability proportional to `weights`,
/// renormalizing after each draw.
fn sample_without_replacement(
    weights: &[f64],
    k: usize,
    rng: &mut ChaCha8Rng,
    what: &str,
) -> Result<Vec<usize>> {
    let mut w: Vec<f64> = weights.to_vec();
    if w.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{what}: scores must be finite and nonnegative"
        )));
    }
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Err(Error::rank_deficient(
                "leverage sampling",
                format!("fewer than {k} nonzero {what}"),
            ));
        }
        let mut u = rng.random::<f64>() * total;
        let mut chosen = None;
        for (j, &wj) in w.iter().enumerate() {
            if wj <= 0.0 {
                continue;
            }
            u -= wj;
            if u <= 0.0 {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.unwrap_or_else(|| {
            // fp underflow of the remaining mass: take the last positive
            w.iter().rposition(|&v| v > 0.0).unwrap()
        });
        picked.push(j);
        w[j] = 0.0;
    }
    Ok(picked)
}

/// RSVD-LS: sample `k` distinct columns (and rows) without replacement with
/// probability proportional to the rank-`k` leverage scores of the
/// randomized SVD.
pub fn rsvd_leverage_sampling(
    a: &MatrixSource,
    k: usize,
    l: usize,
    spec: &EmbeddingSpec,
    seed: u64,
) -> Result<SkeletonSet> {
    if k == 0 || k > l {
        return Err(Error::InvalidParameter(format!(
            "leverage sampling requires 1 <= k <= l, got k = {k}, l = {l}"
        )));
    }
    let x = build_rowspace(a, l, RowspaceKind::Sketch, spec)?;
    let sd = randomized_svd(a, &x)?;
    let col_scores = leverage_scores(&sd, k)?;
    let row_scores = row_leverage_scores(&sd, k)?;
    let mut rng_cols = ChaCha8Rng::seed_from_u64(linalg::mix_seed(&[seed, 2]));
    let mut rng_rows = ChaCha8Rng::seed_from_u64(linalg::mix_seed(&[seed, 3]));
    let cols = sample_without_replacement(&col_scores, k, &mut rng_cols, "column scores")?;
    let rows = sample_without_replacement(&row_scores, k, &mut rng_rows, "row scores")?;
    Ok(SkeletonSet {
        col_indices: cols,
        row_indices: Some(rows),
        algorithm: "rsvd-ls".to_string(),
        seed,
        eta_col: None,
        eta_row: None,
    })
}

/// One-pass streaming selection: accumulate the row sketch `X = Gamma A`
/// and the column sketch `Y = A Omega^T` from a single traversal of the
/// column stream, then pivot `X` for columns and `Y` for rows. The selected
/// columns of `A` are never revisited during selection, and the result does
/// not depend on the block width (per-column accumulation order is fixed).
pub fn streaming_select(
    a: &MatrixSource,
    l: usize,
    spec_gamma: &EmbeddingSpec,
    spec_omega: &EmbeddingSpec,
    pivot_kind: PivotKind,
    block_width: usize,
) -> Result<SkeletonSet> {
    let (m, n) = (a.nrows(), a.ncols());
    if l == 0 || l > m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "selection rank l = {l} must satisfy 1 <= l <= min(m, n) = {}",
            m.min(n)
        )));
    }
    let StreamingSketches { x, y } = streaming_sketches(a, l, spec_gamma, spec_omega, block_width)?;

    let pf_col = pivot_columns(pivot_kind, &x).map_err(|e| restage(e, "column pivoting"))?;
    let eta_col = eta_certificate(&x, &pf_col.pivots)?.eta_bound;
    let yt = y.transpose();
    let pf_row = pivot_columns(pivot_kind, &yt)
        .map_err(|e| restage(e, "row pivoting of the column sketch"))?;
    let eta_row = eta_certificate(&yt, &pf_row.pivots)?.eta_bound;

    Ok(SkeletonSet {
        col_indices: pf_col.pivots,
        row_indices: Some(pf_row.pivots),
        algorithm: match pivot_kind {
            PivotKind::Lupp => "streaming-lupp".to_string(),
            PivotKind::Cpqr => "streaming-cpqr".to_string(),
        },
        seed: spec_gamma.seed,
        eta_col: Some(eta_col),
        eta_row: Some(eta_row),
    })
}

/// The two sketches accumulated by a streaming pass, for callers that also
/// need the coefficient estimation step.
pub struct StreamingSketches {
    /// `l x n` row sketch `Gamma A`.
    pub x: DMatrix<f64>,
    /// `m x l` column sketch `A Omega^T`.
    pub y: DMatrix<f64>,
}

/// Accumulate both streaming sketches in one pass without selecting.
pub fn streaming_sketches(
    a: &MatrixSource,
    l: usize,
    spec_gamma: &EmbeddingSpec,
    spec_omega: &EmbeddingSpec,
    block_width: usize,
) -> Result<StreamingSketches> {
    let (m, n) = (a.nrows(), a.ncols());
    let gamma = Embedding::new(&spec_gamma.with_dims(l, m), Side::Row)?;
    let omega = Embedding::new(&spec_omega.with_dims(l, n), Side::Col)?;
    let mut x = DMatrix::<f64>::zeros(l, n);
    let mut y = DMatrix::<f64>::zeros(m, l);
    for block in a.stream_columns(block_width)? {
        let panel = block.cols();
        for (t, j) in block.range().enumerate() {
            let col = panel.column(t);
            x.set_column(j, &gamma.apply_col(col.as_slice()));
            let w = omega.column(j);
            for r in 0..l {
                let wr = w[r];
                if wr != 0.0 {
                    for i in 0..m {
                        y[(i, r)] += col[i] * wr;
                    }
                }
            }
        }
    }
    Ok(StreamingSketches { x, y })
}
