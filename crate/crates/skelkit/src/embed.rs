//! Oblivious l2 randomized embeddings: Gaussian, subsampled randomized
//! trigonometric transform (SRTT), and sparse sign matrices.
//!
//! An [`Embedding`] is the materialized random map `Gamma: R^m -> R^l` drawn
//! from an [`EmbeddingSpec`]. Row sketches (`Gamma A`) and column sketches
//! (`A Omega^T`) are derived from independent seed streams so the same seed
//! can safely parameterize both sides.
//!
//! Scaling conventions: Gaussian entries are i.i.d. `N(0, 1/l)`;
//! sparse-sign columns carry exactly `zeta` entries of `±1/sqrt(zeta)`; the
//! SRTT composes a random permutation, a Rademacher sign flip, a unitary
//! discrete Hartley transform, a uniform row subsample, and the `sqrt(m/l)`
//! rescale. All three preserve `E ||Gamma x||^2 = ||x||^2`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::mix_seed;
use crate::matsource::{MatrixSource, StorageView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedKind {
    Gaussian,
    Srtt,
    SparseSign,
}

impl std::fmt::Display for EmbedKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EmbedKind::Gaussian => "gaussian",
            EmbedKind::Srtt => "srtt",
            EmbedKind::SparseSign => "sparse-sign",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for EmbedKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(EmbedKind::Gaussian),
            "srtt" => Ok(EmbedKind::Srtt),
            "sparse-sign" | "sparse_sign" => Ok(EmbedKind::SparseSign),
            other => Err(Error::InvalidParameter(format!(
                "unknown embedding kind '{other}'"
            ))),
        }
    }
}

/// Which side of the matrix a sketch compresses. Determines the seed stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `X = Gamma A`, compressing the row dimension (`Gamma` is `l x m`).
    Row,
    /// `Y = A Omega^T`, compressing the column dimension (`Omega` is `l x n`).
    Col,
}

/// Description of one oblivious embedding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub kind: EmbedKind,
    /// Embedding (sketch) dimension.
    pub l: usize,
    /// Ambient dimension being compressed.
    pub m: usize,
    /// Nonzeros per column for sparse-sign embeddings; defaults to `min(l, 8)`.
    #[serde(default)]
    pub zeta: Option<usize>,
    pub seed: u64,
}

impl EmbeddingSpec {
    pub fn new(kind: EmbedKind, l: usize, m: usize, seed: u64) -> Self {
        EmbeddingSpec {
            kind,
            l,
            m,
            zeta: None,
            seed,
        }
    }

    /// Default oversampled embedding dimension for a target rank `k`:
    /// `k + 10` for Gaussian maps, `ceil(1.5 k) + 10` for the structured ones.
    pub fn for_rank(kind: EmbedKind, k: usize, m: usize, seed: u64) -> Self {
        let l = match kind {
            EmbedKind::Gaussian => k + 10,
            EmbedKind::Srtt | EmbedKind::SparseSign => (3 * k).div_ceil(2) + 10,
        };
        EmbeddingSpec::new(kind, l.min(m), m, seed)
    }

    pub fn zeta_or_default(&self) -> usize {
        self.zeta.unwrap_or_else(|| self.l.min(8))
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.l > self.m {
            return Err(Error::InvalidParameter(format!(
                "embedding dimension l = {} must satisfy 1 <= l <= m = {}",
                self.l, self.m
            )));
        }
        if self.kind == EmbedKind::SparseSign {
            let z = self.zeta_or_default();
            if z < 2 || z > self.l {
                return Err(Error::InvalidParameter(format!(
                    "sparse-sign zeta = {z} must satisfy 2 <= zeta <= l = {}",
                    self.l
                )));
            }
        }
        Ok(())
    }

    /// Same spec with the dimensions replaced (used when a caller supplies
    /// kind/seed and the algorithm decides the shape).
    pub fn with_dims(&self, l: usize, m: usize) -> Self {
        let mut s = self.clone();
        s.l = l;
        s.m = m;
        s
    }
}

enum Map {
    Gaussian(DMatrix<f64>),
    SparseSign {
        zeta: usize,
        /// Row indices, `zeta` per ambient column, flattened.
        rows: Vec<usize>,
        /// Matching values `±1/sqrt(zeta)`.
        vals: Vec<f64>,
    },
    Srtt {
        /// `(Pi x)_i = x[perm[i]]`.
        perm: Vec<usize>,
        signs: Vec<f64>,
        /// Retained transform rows (the uniform `m -> l` subsample).
        sample: Vec<usize>,
        /// `sqrt(m/l)`.
        scale: f64,
        fft: Arc<dyn Fft<f64>>,
    },
}

/// A drawn embedding `Gamma in R^{l x m}`.
pub struct Embedding {
    spec: EmbeddingSpec,
    map: Map,
}

impl Embedding {
    pub fn new(spec: &EmbeddingSpec, side: Side) -> Result<Self> {
        spec.validate()?;
        let tag = match side {
            Side::Row => 0u64,
            Side::Col => 1u64,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[spec.seed, tag]));
        let (l, m) = (spec.l, spec.m);
        let map = match spec.kind {
            EmbedKind::Gaussian => {
                let normal = Normal::new(0.0, (1.0 / l as f64).sqrt()).unwrap();
                let mut g = DMatrix::<f64>::zeros(l, m);
                for j in 0..m {
                    for i in 0..l {
                        g[(i, j)] = normal.sample(&mut rng);
                    }
                }
                Map::Gaussian(g)
            }
            EmbedKind::SparseSign => {
                let zeta = spec.zeta_or_default();
                let inv = 1.0 / (zeta as f64).sqrt();
                let mut rows = Vec::with_capacity(m * zeta);
                let mut vals = Vec::with_capacity(m * zeta);
                for _ in 0..m {
                    let idx = rand::seq::index::sample(&mut rng, l, zeta);
                    for r in idx {
                        rows.push(r);
                        vals.push(if rng.random::<bool>() { inv } else { -inv });
                    }
                }
                Map::SparseSign { zeta, rows, vals }
            }
            EmbedKind::Srtt => {
                let mut perm: Vec<usize> = (0..m).collect();
                perm.shuffle(&mut rng);
                let signs: Vec<f64> = (0..m)
                    .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                    .collect();
                let sample: Vec<usize> = rand::seq::index::sample(&mut rng, m, l).into_vec();
                let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
                Map::Srtt {
                    perm,
                    signs,
                    sample,
                    scale: (m as f64 / l as f64).sqrt(),
                    fft,
                }
            }
        };
        Ok(Embedding {
            spec: spec.clone(),
            map,
        })
    }

    pub fn spec(&self) -> &EmbeddingSpec {
        &self.spec
    }

    pub fn sketch_dim(&self) -> usize {
        self.spec.l
    }

    pub fn ambient_dim(&self) -> usize {
        self.spec.m
    }

    /// `Gamma x` for one dense ambient vector. The accumulation order is a
    /// fixed function of the ambient index only, so block partitioning of a
    /// wider application cannot change the result bit-wise.
    pub fn apply_col(&self, x: &[f64]) -> DVector<f64> {
        debug_assert_eq!(x.len(), self.spec.m);
        let l = self.spec.l;
        match &self.map {
            Map::Gaussian(g) => {
                let mut out = DVector::<f64>::zeros(l);
                for (i, &v) in x.iter().enumerate() {
                    if v != 0.0 {
                        let col = g.column(i);
                        for r in 0..l {
                            out[r] += col[r] * v;
                        }
                    }
                }
                out
            }
            Map::SparseSign { zeta, rows, vals } => {
                let mut out = DVector::<f64>::zeros(l);
                for (i, &v) in x.iter().enumerate() {
                    if v != 0.0 {
                        for k in i * zeta..(i + 1) * zeta {
                            out[rows[k]] += vals[k] * v;
                        }
                    }
                }
                out
            }
            Map::Srtt {
                perm,
                signs,
                sample,
                scale,
                fft,
            } => {
                let m = self.spec.m;
                let mut buf: Vec<Complex<f64>> = (0..m)
                    .map(|i| Complex::new(signs[i] * x[perm[i]], 0.0))
                    .collect();
                fft.process(&mut buf);
                let unit = 1.0 / (m as f64).sqrt();
                DVector::from_fn(l, |r, _| {
                    let c = buf[sample[r]];
                    scale * unit * (c.re - c.im)
                })
            }
        }
    }

    /// `Gamma B` for a dense `m x w` block, column by column.
    pub fn apply_block(&self, block: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if block.nrows() != self.spec.m {
            return Err(Error::DimensionMismatch(format!(
                "embedding expects ambient dimension {}, block has {} rows",
                self.spec.m,
                block.nrows()
            )));
        }
        let mut out = DMatrix::<f64>::zeros(self.spec.l, block.ncols());
        for c in 0..block.ncols() {
            out.set_column(c, &self.apply_col(block.column(c).as_slice()));
        }
        Ok(out)
    }

    /// Column `j` of `Gamma` as a dense vector.
    pub fn column(&self, j: usize) -> DVector<f64> {
        let l = self.spec.l;
        match &self.map {
            Map::Gaussian(g) => g.column(j).into(),
            Map::SparseSign { zeta, rows, vals } => {
                let mut out = DVector::<f64>::zeros(l);
                for k in j * zeta..(j + 1) * zeta {
                    out[rows[k]] = vals[k];
                }
                out
            }
            Map::Srtt { .. } => {
                let mut e = vec![0.0; self.spec.m];
                e[j] = 1.0;
                self.apply_col(&e)
            }
        }
    }

    /// Explicit `l x m` matrix (tests and oracle paths).
    pub fn materialize(&self) -> DMatrix<f64> {
        let mut out = DMatrix::<f64>::zeros(self.spec.l, self.spec.m);
        for j in 0..self.spec.m {
            out.set_column(j, &self.column(j));
        }
        out
    }

    /// Row sketch `X = Gamma A` (`l x n`). The ambient dimension must equal
    /// the row count of `A`. Counts one block application of `A`.
    pub fn sketch_rows(&self, a: &MatrixSource) -> Result<DMatrix<f64>> {
        if self.spec.m != a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "row sketch: embedding ambient {} != matrix rows {}",
                self.spec.m,
                a.nrows()
            )));
        }
        match a.storage_view() {
            StorageView::Dense(d) => {
                a.note_apply();
                match &self.map {
                    Map::Gaussian(g) => Ok(g * d),
                    _ => self.apply_block(d),
                }
            }
            StorageView::Sparse(c) => {
                a.note_apply();
                let l = self.spec.l;
                let n = a.ncols();
                let mut out = DMatrix::<f64>::zeros(l, n);
                match &self.map {
                    Map::Gaussian(g) => {
                        for j in 0..n {
                            for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                                let (i, v) = (c.row_idx[k], c.values[k]);
                                let col = g.column(i);
                                for r in 0..l {
                                    out[(r, j)] += col[r] * v;
                                }
                            }
                        }
                    }
                    Map::SparseSign { zeta, rows, vals } => {
                        for j in 0..n {
                            for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                                let (i, v) = (c.row_idx[k], c.values[k]);
                                for t in i * zeta..(i + 1) * zeta {
                                    out[(rows[t], j)] += vals[t] * v;
                                }
                            }
                        }
                    }
                    Map::Srtt { .. } => {
                        // densify one column at a time through the fast chain
                        let m = a.nrows();
                        let mut scratch = vec![0.0; m];
                        for j in 0..n {
                            scratch.iter_mut().for_each(|v| *v = 0.0);
                            for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                                scratch[c.row_idx[k]] = c.values[k];
                            }
                            out.set_column(j, &self.apply_col(&scratch));
                        }
                    }
                }
                Ok(out)
            }
            StorageView::Oracle => {
                let gt = self.materialize().transpose();
                Ok(a.apply_transpose_mat(&gt)?.transpose())
            }
        }
    }

    /// Column sketch `Y = A Gamma^T` (`m x l`) where this embedding plays the
    /// role of `Omega in R^{l x n}`. Counts one block application of `A`.
    pub fn sketch_cols(&self, a: &MatrixSource) -> Result<DMatrix<f64>> {
        if self.spec.m != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "column sketch: embedding ambient {} != matrix columns {}",
                self.spec.m,
                a.ncols()
            )));
        }
        match a.storage_view() {
            StorageView::Dense(d) => {
                a.note_apply();
                match &self.map {
                    Map::Gaussian(g) => Ok(d * g.transpose()),
                    _ => {
                        // Y^T = Gamma A^T, one row of A at a time
                        let at = d.transpose();
                        Ok(self.apply_block(&at)?.transpose())
                    }
                }
            }
            StorageView::Sparse(c) => {
                a.note_apply();
                let l = self.spec.l;
                let m = a.nrows();
                let mut out = DMatrix::<f64>::zeros(m, l);
                // Y(i, :) += v * Gamma(:, j)^T over stored entries
                for j in 0..a.ncols() {
                    let g = self.column(j);
                    for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                        let (i, v) = (c.row_idx[k], c.values[k]);
                        for r in 0..l {
                            out[(i, r)] += v * g[r];
                        }
                    }
                }
                Ok(out)
            }
            StorageView::Oracle => {
                let gt = self.materialize().transpose();
                a.apply_mat(&gt)
            }
        }
    }
}

/// Row or column Gaussian sketch of `A`; see [`Embedding::sketch_rows`].
pub fn gaussian_sketch(spec: &EmbeddingSpec, a: &MatrixSource, side: Side) -> Result<DMatrix<f64>> {
    if spec.kind != EmbedKind::Gaussian {
        return Err(Error::InvalidParameter(
            "gaussian_sketch requires a gaussian spec".into(),
        ));
    }
    sketch(spec, a, side)
}

/// Row-side SRTT sketch `X = Gamma A`.
pub fn srtt_sketch(spec: &EmbeddingSpec, a: &MatrixSource) -> Result<DMatrix<f64>> {
    if spec.kind != EmbedKind::Srtt {
        return Err(Error::InvalidParameter(
            "srtt_sketch requires an srtt spec".into(),
        ));
    }
    sketch(spec, a, Side::Row)
}

/// Row-side sparse-sign sketch `X = Gamma A`.
pub fn sparse_sign_sketch(spec: &EmbeddingSpec, a: &MatrixSource) -> Result<DMatrix<f64>> {
    if spec.kind != EmbedKind::SparseSign {
        return Err(Error::InvalidParameter(
            "sparse_sign_sketch requires a sparse-sign spec".into(),
        ));
    }
    sketch(spec, a, Side::Row)
}

/// Kind-agnostic sketch entry point.
pub fn sketch(spec: &EmbeddingSpec, a: &MatrixSource, side: Side) -> Result<DMatrix<f64>> {
    let emb = Embedding::new(spec, side)?;
    match side {
        Side::Row => emb.sketch_rows(a),
        Side::Col => emb.sketch_cols(a),
    }
}
