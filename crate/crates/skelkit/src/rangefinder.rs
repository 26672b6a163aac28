//! Row-space approximators: plain row sketches, plain and orthogonalized
//! power iteration, the randomized low-rank SVD built on top of them, and
//! approximate leverage scores.

use nalgebra::{DMatrix, DVector};

use crate::embed::{Embedding, EmbeddingSpec, Side};
use crate::error::{Error, Result};
use crate::linalg::{ortho, svd_econ};
use crate::matsource::MatrixSource;

/// How a row-space approximator was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Plain row sketch `X = Gamma A`.
    Sketch,
    /// `X = Omega (A^T A)^q` without re-orthogonalization.
    PlainPower(usize),
    /// Power iteration with orthogonalization at every step.
    OrthoPower(usize),
    /// Right singular vector estimates from the randomized SVD.
    RsvdRightVectors,
}

/// An `l x n` matrix whose row space approximates the leading right singular
/// subspace of the source.
#[derive(Debug, Clone)]
pub struct RowSpaceApproximator {
    pub x: DMatrix<f64>,
    pub provenance: Provenance,
    pub seed: u64,
}

/// Estimated economy SVD `A ~ U_hat diag(sigma_hat) V_hat^T`.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub u_hat: DMatrix<f64>,
    pub sigma_hat: DVector<f64>,
    pub v_hat: DMatrix<f64>,
}

impl SpectralData {
    /// Wrap an exact economy SVD (reference/testing path).
    pub fn from_exact_svd(a: &DMatrix<f64>) -> Self {
        let (u, s, v) = svd_econ(a);
        SpectralData {
            u_hat: u,
            sigma_hat: s,
            v_hat: v,
        }
    }

    pub fn rank(&self) -> usize {
        self.sigma_hat.len()
    }
}

fn check_full_row_rank(x: &DMatrix<f64>, stage: &str) -> Result<()> {
    let sv = crate::linalg::singular_values(x);
    let smax = sv[0];
    let smin = sv[sv.len() - 1];
    let full_rank = smin > 1e-12 * smax; // NaN fails too
    if !full_rank {
        return Err(Error::rank_deficient(
            stage,
            format!(
                "sketch is numerically rank deficient (smin/smax = {:.3e}); try a smaller l",
                if smax > 0.0 { smin / smax } else { 0.0 }
            ),
        ));
    }
    Ok(())
}

fn check_finite(x: &DMatrix<f64>, what: &str) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Instability(format!(
            "{what} produced non-finite entries; use the orthogonalized power iteration"
        )));
    }
    Ok(())
}

/// `X = Gamma A` with the full-row-rank postcondition verified.
pub fn row_sketch_rangefinder(
    a: &MatrixSource,
    spec: &EmbeddingSpec,
) -> Result<RowSpaceApproximator> {
    if spec.l > a.nrows().min(a.ncols()) {
        return Err(Error::InvalidParameter(format!(
            "sketch dimension l = {} exceeds min(m, n) = {}",
            spec.l,
            a.nrows().min(a.ncols())
        )));
    }
    let emb = Embedding::new(spec, Side::Row)?;
    let x = emb.sketch_rows(a)?;
    check_full_row_rank(&x, "row_sketch_rangefinder")?;
    Ok(RowSpaceApproximator {
        x,
        provenance: Provenance::Sketch,
        seed: spec.seed,
    })
}

/// `X = Omega (A^T A)^q`, `q >= 1`, by alternating transposed and plain
/// block applications (2q of them). Numerically unstable for ill-conditioned
/// inputs; non-finite intermediates abort with an instability error.
pub fn plain_power_iteration(
    a: &MatrixSource,
    spec: &EmbeddingSpec,
    q: usize,
) -> Result<RowSpaceApproximator> {
    if q == 0 {
        return Err(Error::InvalidParameter(
            "plain_power_iteration requires q >= 1".into(),
        ));
    }
    if spec.m != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "power iteration embedding must have ambient n = {}, got {}",
            a.ncols(),
            spec.m
        )));
    }
    let emb = Embedding::new(spec, Side::Col)?;
    let mut w = emb.materialize(); // l x n
    for _ in 0..q {
        // W <- W A^T A, two block applications
        let z = a.apply_mat(&w.transpose())?.transpose(); // l x m
        check_finite(&z, "plain power iteration")?;
        w = a.apply_transpose_mat(&z.transpose())?.transpose(); // l x n
        check_finite(&w, "plain power iteration")?;
    }
    Ok(RowSpaceApproximator {
        x: w,
        provenance: Provenance::PlainPower(q),
        seed: spec.seed,
    })
}

/// Stabilized power iteration: `Y <- ortho(A ortho(A^T Y))` per step,
/// finishing with `X = ortho(Y)^T A`.
pub fn orthogonalized_power_iteration(
    a: &MatrixSource,
    spec: &EmbeddingSpec,
    q: usize,
) -> Result<RowSpaceApproximator> {
    if q == 0 {
        return Err(Error::InvalidParameter(
            "orthogonalized_power_iteration requires q >= 1".into(),
        ));
    }
    if spec.m != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "power iteration embedding must have ambient n = {}, got {}",
            a.ncols(),
            spec.m
        )));
    }
    let emb = Embedding::new(spec, Side::Col)?;
    let omega_t = emb.materialize().transpose(); // n x l
    let mut y = a.apply_mat(&omega_t)?; // m x l
    for _ in 1..q {
        let t = ortho(&a.apply_transpose_mat(&y)?)?; // n x l
        y = ortho(&a.apply_mat(&t)?)?;
    }
    let qy = ortho(&y)?; // m x l
    let x = a.apply_transpose_mat(&qy)?.transpose(); // l x n
    Ok(RowSpaceApproximator {
        x,
        provenance: Provenance::OrthoPower(q),
        seed: spec.seed,
    })
}

/// Randomized SVD from an existing row-space approximator: economy SVD of
/// the compressed `A Q_X`, then `V_hat = Q_X V~`. The reconstruction equals
/// the orthogonal projection `A X^dagger X`.
pub fn randomized_svd(a: &MatrixSource, x: &RowSpaceApproximator) -> Result<SpectralData> {
    check_full_row_rank(&x.x, "randomized_svd")?;
    let qx = ortho(&x.x.transpose())?; // n x l
    let b = a.apply_mat(&qx)?; // m x l
    let (u, s, v_small) = svd_econ(&b);
    let v_hat = qx * v_small;
    Ok(SpectralData {
        u_hat: u,
        sigma_hat: s,
        v_hat,
    })
}

/// Randomized SVD straight from an embedding spec (sketch, then
/// [`randomized_svd`]).
pub fn randomized_svd_from_spec(a: &MatrixSource, spec: &EmbeddingSpec) -> Result<SpectralData> {
    let x = row_sketch_rangefinder(a, spec)?;
    randomized_svd(a, &x)
}

/// Column leverage scores of the rank-`k` truncation: squared row norms of
/// `V_hat(:, 1..k)`. They sum to `k`.
pub fn leverage_scores(sd: &SpectralData, k: usize) -> Result<Vec<f64>> {
    if k > sd.rank() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the approximator rank {}",
            sd.rank()
        )));
    }
    Ok((0..sd.v_hat.nrows())
        .map(|j| sd.v_hat.view((j, 0), (1, k)).norm_squared())
        .collect())
}

/// Row leverage scores, from `U_hat(:, 1..k)`.
pub fn row_leverage_scores(sd: &SpectralData, k: usize) -> Result<Vec<f64>> {
    if k > sd.rank() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the approximator rank {}",
            sd.rank()
        )));
    }
    Ok((0..sd.u_hat.nrows())
        .map(|i| sd.u_hat.view((i, 0), (1, k)).norm_squared())
        .collect())
}

/// Frobenius rangefinder residual `||A - A X^dagger X||_F`, evaluated
/// through an SVD-based projector so that numerically rank-deficient `X`
/// still yields a meaningful value.
pub fn projection_residual_fro(a: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    let (_, sv, v) = svd_econ(x);
    let smax = sv[0];
    if smax == 0.0 {
        return a.norm();
    }
    let cutoff = smax * 1e-13;
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let vr = v.columns(0, rank);
    let res = a - (a * vr) * vr.transpose();
    res.norm()
}
