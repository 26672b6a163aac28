//! Config-driven experiment harness behind the `skelkit` binary: error
//! versus rank curves, embedding and pivoting benchmarks, and one-shot
//! skeleton/CUR runs with file outputs.
//!
//! Every command is reproducible from (config, master seed): per-trial seeds
//! are derived as `mix(master, algorithm, k, trial)`, so reruns produce
//! identical CSV except for the wall-clock columns.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::embed::{EmbedKind, Embedding, EmbeddingSpec, Side};
use crate::error::{Error, Result};
use crate::factors::{self, Factors, Norm};
use crate::linalg::{self, mix_seed};
use crate::matsource::{self, MatrixSource, SnnSpec};
use crate::pivot::{self, PivotKind};
use crate::rangefinder::SpectralData;
use crate::skeleton::{self, SkeletonSet};

/// Matrix source description in a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MatrixConfig {
    /// Synthetic sparse non-negative matrix. Weights are either given
    /// explicitly (`s = [...]`) or by the head/tail rule
    /// `s_i = s_head / i` for `i <= s_head_count`, `s_tail / i` after.
    Snn {
        m: usize,
        n: usize,
        r: usize,
        #[serde(default)]
        density: Option<f64>,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        s: Option<Vec<f64>>,
        #[serde(default)]
        s_head: Option<f64>,
        #[serde(default)]
        s_head_count: Option<usize>,
        #[serde(default)]
        s_tail: Option<f64>,
    },
    /// Load a Matrix Market file.
    MatrixMarket { path: String },
    /// A named test matrix; see [`builtin_matrix`].
    Builtin { id: String },
}

/// One algorithm in the benchmark list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgorithmId {
    #[serde(rename = "rand-lupp")]
    RandLupp,
    #[serde(rename = "rand-lupp-1piter")]
    RandLupp1piter,
    #[serde(rename = "rand-cpqr")]
    RandCpqr,
    #[serde(rename = "rand-cpqr-1piter")]
    RandCpqr1piter,
    #[serde(rename = "rsvd-deim")]
    RsvdDeim,
    #[serde(rename = "rsvd-ls")]
    RsvdLs,
    #[serde(rename = "streaming-lupp")]
    StreamingLupp,
    #[serde(rename = "streaming-cpqr")]
    StreamingCpqr,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 8] = [
        AlgorithmId::RandLupp,
        AlgorithmId::RandLupp1piter,
        AlgorithmId::RandCpqr,
        AlgorithmId::RandCpqr1piter,
        AlgorithmId::RsvdDeim,
        AlgorithmId::RsvdLs,
        AlgorithmId::StreamingLupp,
        AlgorithmId::StreamingCpqr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::RandLupp => "rand-lupp",
            AlgorithmId::RandLupp1piter => "rand-lupp-1piter",
            AlgorithmId::RandCpqr => "rand-cpqr",
            AlgorithmId::RandCpqr1piter => "rand-cpqr-1piter",
            AlgorithmId::RsvdDeim => "rsvd-deim",
            AlgorithmId::RsvdLs => "rsvd-ls",
            AlgorithmId::StreamingLupp => "streaming-lupp",
            AlgorithmId::StreamingCpqr => "streaming-cpqr",
        }
    }

    fn tag(&self) -> u64 {
        Self::ALL.iter().position(|a| a == self).unwrap() as u64 + 1
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|a| a.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("algorithms: unknown algorithm '{s}'")))
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn default_trials() -> usize {
    1
}

fn default_embedding() -> EmbedKind {
    EmbedKind::Gaussian
}

fn default_norm() -> Norm {
    Norm::Fro
}

/// A full experiment description, loadable from TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub matrix: MatrixConfig,
    pub algorithms: Vec<AlgorithmId>,
    pub ranks: Vec<usize>,
    #[serde(default = "default_norm")]
    pub norm: Norm,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<String>,
    /// Extra sketch dimension beyond the rank: `l = k + oversample`.
    #[serde(default)]
    pub oversample: usize,
    #[serde(default = "default_embedding")]
    pub embedding: EmbedKind,
    #[serde(default)]
    pub zeta: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("algorithms: list must not be empty".into()));
        }
        if self.ranks.is_empty() {
            return Err(Error::Config("ranks: list must not be empty".into()));
        }
        for w in self.ranks.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config(format!(
                    "ranks: grid must be strictly increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        if self.ranks[0] == 0 {
            return Err(Error::Config("ranks: ranks must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials: must be >= 1".into()));
        }
        Ok(())
    }
}

/// Parse a TOML config file.
pub fn load_config(path: impl AsRef<std::path::Path>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let cfg: ExperimentConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Named test matrices for quick CLI runs.
pub fn builtin_matrix(id: &str) -> Result<MatrixSource> {
    match id {
        // desk-scale synthetic benchmark instances
        "snn-200" => matsource::snn_generate(&SnnSpec::decaying(200, 200, 200, 100, 0x5e_200)),
        "snn-300" => matsource::snn_generate(&SnnSpec::decaying(300, 300, 300, 100, 0x5e_300)),
        "rank10-100x80" => {
            let sigma: Vec<f64> = (0..10).map(|i| 10.0 - i as f64).collect();
            MatrixSource::from_dense(dense_with_spectrum(100, 80, &sigma, 0xa110))
        }
        "decay09-200" => {
            let sigma: Vec<f64> = (1..=200).map(|i| 0.9f64.powi(i)).collect();
            MatrixSource::from_dense(dense_with_spectrum(200, 200, &sigma, 0xdeca))
        }
        other => Err(Error::Config(format!(
            "matrix.id: unknown builtin '{other}' \
             (expected snn-200, snn-300, rank10-100x80, decay09-200)"
        ))),
    }
}

/// Dense `U diag(sigma) V^T` with Haar-ish factors from seeded Gaussians.
pub fn dense_with_spectrum(m: usize, n: usize, sigma: &[f64], seed: u64) -> DMatrix<f64> {
    let r = sigma.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let gu = DMatrix::<f64>::from_fn(m, r, |_, _| normal.sample(&mut rng));
    let gv = DMatrix::<f64>::from_fn(n, r, |_, _| normal.sample(&mut rng));
    let qu = gu.qr().q();
    let qv = gv.qr().q();
    let mut s = DMatrix::<f64>::zeros(r, r);
    for i in 0..r {
        s[(i, i)] = sigma[i];
    }
    qu * s * qv.transpose()
}

/// Instantiate the matrix described by a config.
pub fn build_matrix(cfg: &MatrixConfig) -> Result<MatrixSource> {
    match cfg {
        MatrixConfig::Snn {
            m,
            n,
            r,
            density,
            seed,
            s,
            s_head,
            s_head_count,
            s_tail,
        } => {
            let weights = if let Some(s) = s {
                s.clone()
            } else {
                let head = s_head.unwrap_or(2.0);
                let tail = s_tail.unwrap_or(1.0);
                let head_count = s_head_count.unwrap_or(100);
                (1..=*r)
                    .map(|i| {
                        if i <= head_count {
                            head / i as f64
                        } else {
                            tail / i as f64
                        }
                    })
                    .collect()
            };
            let spec = SnnSpec {
                r: *r,
                s: weights,
                m: *m,
                n: *n,
                density: density.unwrap_or(0.025),
                seed: seed.unwrap_or(0),
            };
            matsource::snn_generate(&spec)
        }
        MatrixConfig::MatrixMarket { path } => matsource::load_matrix_market(path),
        MatrixConfig::Builtin { id } => builtin_matrix(id),
    }
}

/// Run one selector at rank `k` with sketch dimension `l` and the given
/// seed. The second embedding of the streaming selectors and the sampling
/// stream of RSVD-LS get derived sub-seeds.
pub fn select_with_algorithm(
    a: &MatrixSource,
    alg: AlgorithmId,
    k: usize,
    l: usize,
    kind: EmbedKind,
    zeta: Option<usize>,
    seed: u64,
) -> Result<SkeletonSet> {
    let mut spec = EmbeddingSpec::new(kind, l, a.nrows(), seed);
    spec.zeta = zeta;
    let spec2 = {
        let mut s = spec.clone();
        s.seed = mix_seed(&[seed, 0x0317]);
        s
    };
    match alg {
        AlgorithmId::RandLupp => skeleton::rand_lupp(a, l, &spec, 0),
        AlgorithmId::RandLupp1piter => skeleton::rand_lupp(a, l, &spec, 1),
        AlgorithmId::RandCpqr => skeleton::rand_cpqr(a, l, &spec, 0),
        AlgorithmId::RandCpqr1piter => skeleton::rand_cpqr(a, l, &spec, 1),
        AlgorithmId::RsvdDeim => skeleton::rsvd_deim(a, l, &spec),
        AlgorithmId::RsvdLs => {
            skeleton::rsvd_leverage_sampling(a, k, l, &spec, mix_seed(&[seed, 0x15]))
        }
        AlgorithmId::StreamingLupp => {
            skeleton::streaming_select(a, l, &spec, &spec2, PivotKind::Lupp, 64)
        }
        AlgorithmId::StreamingCpqr => {
            skeleton::streaming_select(a, l, &spec, &spec2, PivotKind::Cpqr, 64)
        }
    }
}

/// [`select_with_algorithm`] plus the stable CUR built from the selection.
pub fn run_selection(
    a: &MatrixSource,
    alg: AlgorithmId,
    k: usize,
    l: usize,
    kind: EmbedKind,
    zeta: Option<usize>,
    trial_seed: u64,
) -> Result<(SkeletonSet, Factors)> {
    let skel = select_with_algorithm(a, alg, k, l, kind, zeta, trial_seed)?;
    let rows = skel
        .row_indices
        .clone()
        .expect("every selector returns both sides");
    let f = factors::build_cur_stable(a, &rows, &skel.col_indices)?;
    Ok((skel, f))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

/// Error-versus-rank experiment. Returns the CSV text
/// (`algorithm,k,trial,err,opt_err,ratio,wall_seconds,eta_col,eta_row`).
pub fn cmd_err_vs_rank(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let a = build_matrix(&cfg.matrix)?;
    if a.nrows().max(a.ncols()) > 5000 {
        return Err(Error::BudgetExceeded(format!(
            "{}x{} matrix exceeds the dense evaluation budget of this command",
            a.nrows(),
            a.ncols()
        )));
    }
    let dense = a.to_dense();
    let sigma = linalg::singular_values(&dense);

    let mut csv =
        String::from("algorithm,k,trial,err,opt_err,ratio,wall_seconds,eta_col,eta_row\n");
    for alg in &cfg.algorithms {
        for &k in &cfg.ranks {
            let l = k + cfg.oversample;
            if l > a.nrows().min(a.ncols()) {
                return Err(Error::Config(format!(
                    "ranks: l = k + oversample = {l} exceeds min(m, n) = {}",
                    a.nrows().min(a.ncols())
                )));
            }
            for trial in 0..cfg.trials {
                let trial_seed = mix_seed(&[cfg.seed, alg.tag(), k as u64, trial as u64]);
                let started = Instant::now();
                let (skel, f) = run_selection(&a, *alg, k, l, cfg.embedding, cfg.zeta, trial_seed)?;
                let wall = started.elapsed().as_secs_f64();
                let rep =
                    factors::evaluate_error_with_spectrum(&a, &f, k, cfg.norm, sigma.as_slice())?;
                csv.push_str(&format!(
                    "{},{},{},{:.10e},{:.10e},{:.6},{:.6},{},{}\n",
                    alg.name(),
                    k,
                    trial,
                    rep.err,
                    rep.opt_err,
                    rep.ratio,
                    wall,
                    fmt_opt(skel.eta_col),
                    fmt_opt(skel.eta_row),
                ));
            }
        }
    }
    Ok(csv)
}

/// Embedding application timings (`kind,m,n,l,seconds`), median of trials.
pub fn cmd_bench_embed(
    kinds: &[EmbedKind],
    m_grid: &[usize],
    l_grid: &[usize],
    n: usize,
    trials: usize,
) -> Result<String> {
    if kinds.is_empty() || m_grid.is_empty() || l_grid.is_empty() {
        return Err(Error::Config("bench-embed: empty grid".into()));
    }
    if n == 0 || trials == 0 || m_grid.contains(&0) || l_grid.contains(&0) {
        return Err(Error::Config(
            "bench-embed: sizes and trials must be >= 1".into(),
        ));
    }
    let mut csv = String::from("kind,m,n,l,seconds\n");
    for &m in m_grid {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[0xbe, m as u64]));
        let normal = Normal::new(0.0, 1.0).unwrap();
        let a = DMatrix::<f64>::from_fn(m, n, |_, _| normal.sample(&mut rng));
        let src = MatrixSource::from_dense(a)?;
        for &l in l_grid {
            if l > m {
                continue;
            }
            for kind in kinds {
                let spec = EmbeddingSpec::new(*kind, l, m, 7);
                let emb = Embedding::new(&spec, Side::Row)?;
                let mut times: Vec<f64> = (0..trials)
                    .map(|_| {
                        let t = Instant::now();
                        let x = emb.sketch_rows(&src).expect("bench sketch");
                        let dt = t.elapsed().as_secs_f64();
                        std::hint::black_box(x[(0, 0)]);
                        dt
                    })
                    .collect();
                times.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let median = times[times.len() / 2];
                csv.push_str(&format!("{kind},{m},{n},{l},{median:.6}\n"));
            }
        }
    }
    Ok(csv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotBenchKind {
    Lupp,
    Cpqr,
    Deim,
}

impl std::str::FromStr for PivotBenchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lupp" => Ok(PivotBenchKind::Lupp),
            "cpqr" => Ok(PivotBenchKind::Cpqr),
            "deim" => Ok(PivotBenchKind::Deim),
            other => Err(Error::Config(format!("unknown pivot kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for PivotBenchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PivotBenchKind::Lupp => "lupp",
            PivotBenchKind::Cpqr => "cpqr",
            PivotBenchKind::Deim => "deim",
        })
    }
}

/// Pivoting timings on pre-generated sketches (`kind,l,n,seconds`).
///
/// The `deim` path reproduces its extra work: orthonormalize a column
/// sketch, compress `A`, take the small SVD, and pivot the right singular
/// vectors (the matrix is square `n x n` here).
pub fn cmd_bench_pivot(
    kinds: &[PivotBenchKind],
    l_grid: &[usize],
    n_grid: &[usize],
    trials: usize,
) -> Result<String> {
    if kinds.is_empty() || l_grid.is_empty() || n_grid.is_empty() || trials == 0 {
        return Err(Error::Config("bench-pivot: empty grid".into()));
    }
    let mut csv = String::from("kind,l,n,seconds\n");
    for &n in n_grid {
        for &l in l_grid {
            if l > n {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[0xb1, l as u64, n as u64]));
            let normal = Normal::new(0.0, 1.0).unwrap();
            let x = DMatrix::<f64>::from_fn(l, n, |_, _| normal.sample(&mut rng));
            for kind in kinds {
                let mut times: Vec<f64> = Vec::with_capacity(trials);
                match kind {
                    PivotBenchKind::Lupp | PivotBenchKind::Cpqr => {
                        let mut last_pivots: Option<Vec<usize>> = None;
                        for _ in 0..trials {
                            let t = Instant::now();
                            let pf = match kind {
                                PivotBenchKind::Lupp => pivot::lupp_columns(&x),
                                PivotBenchKind::Cpqr => pivot::cpqr_columns(&x),
                                PivotBenchKind::Deim => unreachable!(),
                            }?;
                            times.push(t.elapsed().as_secs_f64());
                            if let Some(prev) = &last_pivots {
                                debug_assert_eq!(prev, &pf.pivots);
                            }
                            last_pivots = Some(pf.pivots);
                        }
                    }
                    PivotBenchKind::Deim => {
                        // square A and its column sketch, generated outside
                        // the timed region
                        let mut rng2 =
                            ChaCha8Rng::seed_from_u64(mix_seed(&[0xd3, l as u64, n as u64]));
                        let a = DMatrix::<f64>::from_fn(n, n, |_, _| normal.sample(&mut rng2));
                        let y = DMatrix::<f64>::from_fn(n, l, |_, _| normal.sample(&mut rng2));
                        for _ in 0..trials {
                            let t = Instant::now();
                            let qy = linalg::ortho(&y)?;
                            let b = qy.transpose() * &a; // l x n
                            let sd = SpectralData::from_exact_svd(&b);
                            let vt = sd.v_hat.transpose();
                            let pf = pivot::lupp_columns(&vt)?;
                            times.push(t.elapsed().as_secs_f64());
                            std::hint::black_box(pf.pivots.len());
                        }
                    }
                }
                times.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let median = times[times.len() / 2];
                csv.push_str(&format!("{kind},{l},{n},{median:.6}\n"));
            }
        }
    }
    Ok(csv)
}

/// One-shot skeleton selection; returns the skeleton set and its document.
pub fn cmd_skeleton(cfg: &ExperimentConfig) -> Result<(SkeletonSet, String)> {
    cfg.validate()?;
    if cfg.algorithms.len() != 1 {
        return Err(Error::Config(
            "algorithms: the skeleton command takes exactly one algorithm".into(),
        ));
    }
    if cfg.ranks.len() != 1 {
        return Err(Error::Config(
            "ranks: the skeleton command takes exactly one rank".into(),
        ));
    }
    let a = build_matrix(&cfg.matrix)?;
    let k = cfg.ranks[0];
    let l = k + cfg.oversample;
    let trial_seed = mix_seed(&[cfg.seed, cfg.algorithms[0].tag(), k as u64, 0]);
    let (skel, _) = run_selection(
        &a,
        cfg.algorithms[0],
        k,
        l,
        cfg.embedding,
        cfg.zeta,
        trial_seed,
    )?;
    let doc = skel.to_document();
    Ok((skel, doc))
}

/// Outcome of [`cmd_cur`].
pub struct CurOutcome {
    pub skeleton: SkeletonSet,
    pub document: String,
    pub factors: Factors,
    /// Error report when the matrix fits the dense evaluation budget.
    pub report: Option<factors::ErrorReport>,
}

/// One-shot CUR construction with optional factor export.
pub fn cmd_cur(cfg: &ExperimentConfig, export_dir: Option<&std::path::Path>) -> Result<CurOutcome> {
    cfg.validate()?;
    if cfg.algorithms.len() != 1 || cfg.ranks.len() != 1 {
        return Err(Error::Config(
            "the cur command takes exactly one algorithm and one rank".into(),
        ));
    }
    let a = build_matrix(&cfg.matrix)?;
    let k = cfg.ranks[0];
    let l = k + cfg.oversample;
    let trial_seed = mix_seed(&[cfg.seed, cfg.algorithms[0].tag(), k as u64, 0]);
    let (skel, f) = run_selection(
        &a,
        cfg.algorithms[0],
        k,
        l,
        cfg.embedding,
        cfg.zeta,
        trial_seed,
    )?;
    let report = if a.nrows().max(a.ncols()) <= 2000 {
        Some(factors::evaluate_error(&a, &f, k, cfg.norm)?)
    } else {
        None
    };
    if let Some(dir) = export_dir {
        f.export_dir(dir)?;
    }
    let doc = skel.to_document();
    Ok(CurOutcome {
        skeleton: skel,
        document: doc,
        factors: f,
        report,
    })
}
