//! Uniform access to test and user matrices.
//!
//! A [`MatrixSource`] wraps one of three storage schemes (dense column-major,
//! compressed sparse columns, or a black-box apply/apply-transpose oracle)
//! behind a single interface, and instruments two counters:
//!
//! * `passes`: completed streamed traversals of the data (the single-pass
//!   contract of the streaming selector is asserted against this), and
//! * `applies`: block applications of the operator or its transpose
//!   (used to compare the data movement of the selection algorithms).

pub mod market;

use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Specification of a synthetic sparse non-negative test matrix
/// `A = sum_i s_i x_i y_i^T` with decaying positive weights and sparse
/// non-negative factor vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnnSpec {
    /// Number of rank-one terms.
    pub r: usize,
    /// Weights `s_1 >= ... >= s_r > 0`.
    pub s: Vec<f64>,
    pub m: usize,
    pub n: usize,
    /// Expected fraction of nonzeros per factor vector.
    pub density: f64,
    pub seed: u64,
}

impl SnnSpec {
    /// The weight profile used by the synthetic benchmarks: `s_i = 2/i` for
    /// `i <= head` and `s_i = 1/i` afterwards (1-based).
    pub fn decaying(m: usize, n: usize, r: usize, head: usize, seed: u64) -> Self {
        let s = (1..=r)
            .map(|i| {
                if i <= head {
                    2.0 / i as f64
                } else {
                    1.0 / i as f64
                }
            })
            .collect();
        SnnSpec {
            r,
            s,
            m,
            n,
            density: 0.025,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("snn: m and n must be >= 1".into()));
        }
        if self.r == 0 || self.s.is_empty() {
            return Err(Error::InvalidParameter(
                "snn: need at least one weight".into(),
            ));
        }
        if self.s.len() != self.r {
            return Err(Error::InvalidParameter(format!(
                "snn: r = {} but {} weights given",
                self.r,
                self.s.len()
            )));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "snn: density must lie in (0, 1], got {}",
                self.density
            )));
        }
        let mut prev = f64::INFINITY;
        for (i, &w) in self.s.iter().enumerate() {
            let positive = w > 0.0; // NaN fails too
            if !positive {
                return Err(Error::InvalidParameter(format!(
                    "snn: weight s[{i}] = {w} is not positive"
                )));
            }
            if w > prev {
                return Err(Error::InvalidParameter(format!(
                    "snn: weights must be nonincreasing, s[{i}] = {w} > {prev}"
                )));
            }
            prev = w;
        }
        Ok(())
    }
}

/// Compressed sparse column storage.
#[derive(Debug, Clone)]
pub struct Csc {
    /// Length `n + 1`.
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

/// Matrix-vector product closure of a black-box operator.
pub type ApplyFn = Box<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// Black-box operator: `apply` is `x -> A x`, `apply_t` is `y -> A^T y`.
pub struct Oracle {
    pub nnz: usize,
    pub apply: ApplyFn,
    pub apply_t: ApplyFn,
}

enum Storage {
    Dense(DMatrix<f64>),
    Sparse(Csc),
    Oracle(Oracle),
}

/// Read-only view of the storage scheme, for format-aware fast paths.
pub enum StorageView<'a> {
    Dense(&'a DMatrix<f64>),
    Sparse(&'a Csc),
    Oracle,
}

impl std::fmt::Debug for MatrixSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixSource")
            .field("m", &self.m)
            .field("n", &self.n)
            .field(
                "storage",
                &match self.storage {
                    Storage::Dense(_) => "dense",
                    Storage::Sparse(_) => "sparse",
                    Storage::Oracle(_) => "oracle",
                },
            )
            .field("nnz", &self.nnz())
            .finish()
    }
}

/// A real `m x n` matrix behind a uniform interface with pass accounting.
pub struct MatrixSource {
    m: usize,
    n: usize,
    storage: Storage,
    passes: AtomicU64,
    applies: AtomicU64,
}

impl MatrixSource {
    pub fn from_dense(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidParameter(
                "matrix must have at least one row and column".into(),
            ));
        }
        Ok(MatrixSource {
            m: a.nrows(),
            n: a.ncols(),
            storage: Storage::Dense(a),
            passes: AtomicU64::new(0),
            applies: AtomicU64::new(0),
        })
    }

    /// Build compressed-column storage from (row, col, value) triplets.
    /// Duplicate coordinates are summed; explicit zeros are dropped.
    pub fn from_triplets(m: usize, n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(
                "matrix must have at least one row and column".into(),
            ));
        }
        for &(i, j, _) in triplets {
            if i >= m || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "triplet ({i}, {j}) outside a {m}x{n} matrix"
                )));
            }
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&t| (triplets[t].1, triplets[t].0));

        // merge duplicate coordinates (column-major order)
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &t in &order {
            let (i, j, v) = triplets[t];
            if let Some(last) = merged.last_mut() {
                if last.0 == i && last.1 == j {
                    last.2 += v;
                    continue;
                }
            }
            merged.push((i, j, v));
        }
        merged.retain(|&(_, _, v)| v != 0.0);

        let mut col_ptr = vec![0usize; n + 1];
        for &(_, j, _) in &merged {
            col_ptr[j + 1] += 1;
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        let row_idx = merged.iter().map(|&(i, _, _)| i).collect();
        let values = merged.iter().map(|&(_, _, v)| v).collect();
        Ok(MatrixSource {
            m,
            n,
            storage: Storage::Sparse(Csc {
                col_ptr,
                row_idx,
                values,
            }),
            passes: AtomicU64::new(0),
            applies: AtomicU64::new(0),
        })
    }

    pub fn from_oracle(
        m: usize,
        n: usize,
        nnz: usize,
        apply: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        apply_t: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(
                "matrix must have at least one row and column".into(),
            ));
        }
        Ok(MatrixSource {
            m,
            n,
            storage: Storage::Oracle(Oracle {
                nnz,
                apply: Box::new(apply),
                apply_t: Box::new(apply_t),
            }),
            passes: AtomicU64::new(0),
            applies: AtomicU64::new(0),
        })
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(_) => self.m * self.n,
            Storage::Sparse(c) => c.values.len(),
            Storage::Oracle(o) => o.nnz,
        }
    }

    /// Completed streamed traversals.
    pub fn passes(&self) -> u64 {
        self.passes.load(Ordering::Relaxed)
    }

    /// Block applications of `A` or `A^T`.
    pub fn applies(&self) -> u64 {
        self.applies.load(Ordering::Relaxed)
    }

    pub fn storage_view(&self) -> StorageView<'_> {
        match &self.storage {
            Storage::Dense(d) => StorageView::Dense(d),
            Storage::Sparse(c) => StorageView::Sparse(c),
            Storage::Oracle(_) => StorageView::Oracle,
        }
    }

    pub fn is_explicit(&self) -> bool {
        !matches!(self.storage, Storage::Oracle(_))
    }

    pub(crate) fn note_apply(&self) {
        self.applies.fetch_add(1, Ordering::Relaxed);
    }

    fn note_pass(&self) {
        self.passes.fetch_add(1, Ordering::Relaxed);
    }

    /// `A x`; counts one block application.
    pub fn apply_vec(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "apply: vector length {} does not match n = {}",
                x.len(),
                self.n
            )));
        }
        self.note_apply();
        Ok(self.apply_vec_raw(x))
    }

    /// `A^T y`; counts one block application.
    pub fn apply_transpose_vec(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        if y.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "apply_transpose: vector length {} does not match m = {}",
                y.len(),
                self.m
            )));
        }
        self.note_apply();
        Ok(self.apply_transpose_vec_raw(y))
    }

    fn apply_vec_raw(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.storage {
            Storage::Dense(a) => a * x,
            Storage::Sparse(c) => {
                let mut y = DVector::<f64>::zeros(self.m);
                for j in 0..self.n {
                    let xj = x[j];
                    if xj == 0.0 {
                        continue;
                    }
                    for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                        y[c.row_idx[k]] += c.values[k] * xj;
                    }
                }
                y
            }
            Storage::Oracle(o) => (o.apply)(x),
        }
    }

    fn apply_transpose_vec_raw(&self, y: &DVector<f64>) -> DVector<f64> {
        match &self.storage {
            Storage::Dense(a) => a.transpose() * y,
            Storage::Sparse(c) => {
                let mut z = DVector::<f64>::zeros(self.n);
                for j in 0..self.n {
                    let mut acc = 0.0;
                    for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                        acc += c.values[k] * y[c.row_idx[k]];
                    }
                    z[j] = acc;
                }
                z
            }
            Storage::Oracle(o) => (o.apply_t)(y),
        }
    }

    /// `A W` for an `n x k` block; counts one block application.
    pub fn apply_mat(&self, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if w.nrows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "apply: block has {} rows, expected n = {}",
                w.nrows(),
                self.n
            )));
        }
        self.note_apply();
        match &self.storage {
            Storage::Dense(a) => Ok(a * w),
            Storage::Sparse(_) | Storage::Oracle(_) => {
                let mut out = DMatrix::<f64>::zeros(self.m, w.ncols());
                for c in 0..w.ncols() {
                    let col = DVector::from_column_slice(w.column(c).as_slice());
                    out.set_column(c, &self.apply_vec_raw(&col));
                }
                Ok(out)
            }
        }
    }

    /// `A^T V` for an `m x k` block; counts one block application.
    pub fn apply_transpose_mat(&self, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if v.nrows() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "apply_transpose: block has {} rows, expected m = {}",
                v.nrows(),
                self.m
            )));
        }
        self.note_apply();
        match &self.storage {
            Storage::Dense(a) => Ok(a.transpose() * v),
            Storage::Sparse(_) | Storage::Oracle(_) => {
                let mut out = DMatrix::<f64>::zeros(self.n, v.ncols());
                for c in 0..v.ncols() {
                    let col = DVector::from_column_slice(v.column(c).as_slice());
                    out.set_column(c, &self.apply_transpose_vec_raw(&col));
                }
                Ok(out)
            }
        }
    }

    /// Columns `js` of `A` as a dense `m x |js|` block. Counts one block
    /// application for oracle storage (which has to multiply by indicators).
    pub fn gather_columns(&self, js: &[usize]) -> Result<DMatrix<f64>> {
        crate::linalg::check_indices(self.n, js, "column")?;
        match &self.storage {
            Storage::Dense(a) => Ok(crate::linalg::gather_columns(a, js)),
            Storage::Sparse(c) => {
                let mut out = DMatrix::<f64>::zeros(self.m, js.len());
                for (t, &j) in js.iter().enumerate() {
                    for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                        out[(c.row_idx[k], t)] = c.values[k];
                    }
                }
                Ok(out)
            }
            Storage::Oracle(_) => {
                self.note_apply();
                let mut out = DMatrix::<f64>::zeros(self.m, js.len());
                for (t, &j) in js.iter().enumerate() {
                    let mut e = DVector::<f64>::zeros(self.n);
                    e[j] = 1.0;
                    out.set_column(t, &self.apply_vec_raw(&e));
                }
                Ok(out)
            }
        }
    }

    /// Rows `is` of `A` as a dense `|is| x n` block.
    pub fn gather_rows(&self, is: &[usize]) -> Result<DMatrix<f64>> {
        crate::linalg::check_indices(self.m, is, "row")?;
        match &self.storage {
            Storage::Dense(a) => Ok(crate::linalg::gather_rows(a, is)),
            Storage::Sparse(c) => {
                let mut pos = vec![usize::MAX; self.m];
                for (t, &i) in is.iter().enumerate() {
                    pos[i] = t;
                }
                let mut out = DMatrix::<f64>::zeros(is.len(), self.n);
                for j in 0..self.n {
                    for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                        let t = pos[c.row_idx[k]];
                        if t != usize::MAX {
                            out[(t, j)] = c.values[k];
                        }
                    }
                }
                Ok(out)
            }
            Storage::Oracle(_) => {
                self.note_apply();
                let mut out = DMatrix::<f64>::zeros(is.len(), self.n);
                for (t, &i) in is.iter().enumerate() {
                    let mut e = DVector::<f64>::zeros(self.m);
                    e[i] = 1.0;
                    out.set_row(t, &self.apply_transpose_vec_raw(&e).transpose());
                }
                Ok(out)
            }
        }
    }

    /// Densify. For oracle storage this applies the operator to the identity
    /// (one block application).
    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.storage {
            Storage::Dense(a) => a.clone(),
            Storage::Sparse(c) => {
                let mut out = DMatrix::<f64>::zeros(self.m, self.n);
                for j in 0..self.n {
                    for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                        out[(c.row_idx[k], j)] = c.values[k];
                    }
                }
                out
            }
            Storage::Oracle(_) => {
                self.note_apply();
                let mut out = DMatrix::<f64>::zeros(self.m, self.n);
                for j in 0..self.n {
                    let mut e = DVector::<f64>::zeros(self.n);
                    e[j] = 1.0;
                    out.set_column(j, &self.apply_vec_raw(&e));
                }
                out
            }
        }
    }

    /// Stream the columns as dense panels of at most `block_width` columns.
    /// The pass counter goes up by one when the last block is handed out.
    pub fn stream_columns(&self, block_width: usize) -> Result<ColumnStream<'_>> {
        if block_width == 0 {
            return Err(Error::InvalidParameter(
                "stream_columns: block width must be >= 1".into(),
            ));
        }
        Ok(ColumnStream {
            src: self,
            width: block_width,
            next_col: 0,
            counted: false,
        })
    }

    /// Stream the stored entries of a sparse source as (row, col, value)
    /// triplets in column-major order; the alternative to column panels for
    /// linear accumulation. Counts one pass on exhaustion.
    pub fn stream_triplets(&self) -> Result<TripletStream<'_>> {
        match &self.storage {
            Storage::Sparse(_) => Ok(TripletStream {
                src: self,
                col: 0,
                k: 0,
                counted: false,
            }),
            _ => Err(Error::InvalidParameter(
                "triplet streaming requires sparse storage".into(),
            )),
        }
    }
}

/// One panel of consecutive columns delivered by a stream.
pub struct StreamBlock {
    range: Range<usize>,
    cols: DMatrix<f64>,
}

impl StreamBlock {
    /// Global column range covered by this panel.
    pub fn range(&self) -> Range<usize> {
        self.range.clone()
    }

    /// Dense `m x width` panel of the covered columns.
    pub fn cols(&self) -> &DMatrix<f64> {
        &self.cols
    }
}

/// Single-consumer column-panel iterator; see [`MatrixSource::stream_columns`].
pub struct ColumnStream<'a> {
    src: &'a MatrixSource,
    width: usize,
    next_col: usize,
    counted: bool,
}

impl Iterator for ColumnStream<'_> {
    type Item = StreamBlock;

    fn next(&mut self) -> Option<StreamBlock> {
        if self.next_col >= self.src.ncols() {
            return None;
        }
        let start = self.next_col;
        let end = (start + self.width).min(self.src.ncols());
        self.next_col = end;
        let js: Vec<usize> = (start..end).collect();
        let cols = self
            .src
            .gather_columns(&js)
            .expect("in-range block indices");
        if self.next_col >= self.src.ncols() && !self.counted {
            self.counted = true;
            self.src.note_pass();
        }
        Some(StreamBlock {
            range: start..end,
            cols,
        })
    }
}

/// Single-consumer triplet iterator over sparse storage; see
/// [`MatrixSource::stream_triplets`].
pub struct TripletStream<'a> {
    src: &'a MatrixSource,
    col: usize,
    k: usize,
    counted: bool,
}

impl Iterator for TripletStream<'_> {
    type Item = (usize, usize, f64);

    fn next(&mut self) -> Option<(usize, usize, f64)> {
        let c = match &self.src.storage {
            Storage::Sparse(c) => c,
            _ => return None,
        };
        while self.col < self.src.n && self.k >= c.col_ptr[self.col + 1] {
            self.col += 1;
        }
        if self.col >= self.src.n || self.k >= c.values.len() {
            if !self.counted {
                self.counted = true;
                self.src.note_pass();
            }
            return None;
        }
        let item = (c.row_idx[self.k], self.col, c.values[self.k]);
        self.k += 1;
        if self.k >= c.values.len() && !self.counted {
            self.counted = true;
            self.src.note_pass();
        }
        Some(item)
    }
}

/// Generate a sparse non-negative synthetic matrix `sum_i s_i x_i y_i^T`.
///
/// Each factor vector has `ceil(density * dim)` nonzeros at uniformly random
/// distinct coordinates with values drawn uniformly from (0, 1]. The result
/// is a deterministic function of the given spec, seed included.
pub fn snn_generate(spec: &SnnSpec) -> Result<MatrixSource> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let nnz_x = ((spec.density * spec.m as f64).ceil() as usize).clamp(1, spec.m);
    let nnz_y = ((spec.density * spec.n as f64).ceil() as usize).clamp(1, spec.n);

    let mut triplets = Vec::with_capacity(spec.r * nnz_x * nnz_y);
    let draw = |rng: &mut ChaCha8Rng, dim: usize, count: usize| -> Vec<(usize, f64)> {
        let idx = rand::seq::index::sample(rng, dim, count);
        idx.into_iter()
            .map(|i| (i, 1.0 - rng.random::<f64>()))
            .collect()
    };
    for &w in &spec.s {
        let x = draw(&mut rng, spec.m, nnz_x);
        let y = draw(&mut rng, spec.n, nnz_y);
        for &(i, vx) in &x {
            for &(j, vy) in &y {
                triplets.push((i, j, w * vx * vy));
            }
        }
    }
    MatrixSource::from_triplets(spec.m, spec.n, &triplets)
}

pub use market::{load_matrix_market, write_matrix_market};
