//! Command-line front end.
//!
//! Exit codes: 0 when a command completes (whatever the verdict), 2 for
//! input errors, 3 for size or enumeration limits, 4 for internal
//! inconsistencies.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::catalog::{self, derive_seed, random_product_mixture, RandomKind, RandomSpec, WernerSpec};
use crate::criteria::{
    self, check_partition_of, default_depth, parse_index_list, verdict_from_lattice, Partition, RankLattice,
    DEFAULT_MAX_SUBSETS,
};
use crate::error::{Error, Result};
use crate::factorize::{factorize_pure_with, FactorizationResult, FactorizeOptions, DEFAULT_RESIDUAL_THRESHOLD};
use crate::io::{
    self, AnalysisReport, FactorizationReport, LatticeEntry, PairReport, PartitionCheckReport, PptEntry, PptReport,
    StateFile, StateKind, TestedSubset, ToleranceReport, TraceStepReport, ViolationReport, DEFAULT_LOAD_TOL,
    FORMAT_VERSION,
};
use crate::linalg::{RankTolerance, DEFAULT_MAX_DIM};
use crate::state::{ppt_min_eigenvalue, subsets_of_size, DensityMatrix, DimVector, State, SubsystemSet};

/// Default threshold below which a partial-transpose eigenvalue counts as negative.
pub const DEFAULT_PPT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "entrank",
    version,
    about = "Rank-based entanglement detection and pure-state factorization"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Relative rank tolerance.
    #[arg(long, global = true, default_value_t = RankTolerance::DEFAULT_RTOL)]
    pub rtol: f64,
    /// Absolute rank tolerance.
    #[arg(long, global = true, default_value_t = RankTolerance::DEFAULT_ATOL)]
    pub atol: f64,
    /// Largest traced-out set size examined (default ⌊N/2⌋).
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for generators and ensembles.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest admissible joint dimension.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,
    /// Tolerance on norms, traces and positivity when loading files.
    #[arg(long, global = true, default_value_t = DEFAULT_LOAD_TOL)]
    pub load_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank lattice, violations and verdict for a state file.
    Analyze {
        file: PathBuf,
        /// Also report partial-transpose minimum eigenvalues.
        #[arg(long)]
        ppt: bool,
    },
    /// Split a pure state into its finest tensor-product partition.
    Factorize {
        file: PathBuf,
        /// Write one state file per factor into this directory.
        #[arg(long)]
        factors_out: Option<PathBuf>,
        /// Largest accepted reconstruction error (Frobenius norm).
        #[arg(long, default_value_t = DEFAULT_RESIDUAL_THRESHOLD)]
        residual_threshold: f64,
    },
    /// Pairwise rank checks for a partition such as "1,2|3".
    CheckPartition { file: PathBuf, partition: String },
    /// Minimum eigenvalue of the partial transpose on a part such as "1" or "1,3".
    Ppt {
        file: PathBuf,
        part: String,
        /// Eigenvalues below minus this value count as negative.
        #[arg(long, default_value_t = DEFAULT_PPT_TOL)]
        ppt_tol: f64,
    },
    /// Write a catalog state to a file (or stdout).
    Gen(GenArgs),
    /// Compare rank and partial-transpose detection over a seeded ensemble.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenName {
    Ghz,
    W,
    Bell,
    Werner,
    Paper6,
    QutritMix,
    RandomHaar,
    RandomProduct,
    RandomMixed,
    RandomSeparable,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub name: GenName,
    /// Number of particles (ghz, w).
    #[arg(long)]
    pub n: Option<usize>,
    /// Local dimension (ghz).
    #[arg(long)]
    pub d: Option<usize>,
    /// Werner mixing parameter.
    #[arg(long)]
    pub p: Option<f64>,
    /// Local dimensions such as 2x2x3 (random states).
    #[arg(long)]
    pub dims: Option<String>,
    /// Rank of a random mixed state.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Number of product terms in a random separable mixture.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchKind {
    ProductMixture,
    Werner,
    HaarPure,
    MixedRank,
}

impl BenchKind {
    fn name(self) -> &'static str {
        match self {
            BenchKind::ProductMixture => "product-mixture",
            BenchKind::Werner => "werner",
            BenchKind::HaarPure => "haar-pure",
            BenchKind::MixedRank => "mixed-rank",
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Ensemble to draw from.
    #[arg(long, value_enum)]
    pub kind: BenchKind,
    /// Local dimensions of every member.
    #[arg(long, default_value = "2x2")]
    pub dims: String,
    /// Number of members.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Largest number of product terms (product-mixture).
    #[arg(long, default_value_t = 4)]
    pub terms: usize,
    /// State rank (mixed-rank).
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    /// Smallest Werner parameter; members are evenly spaced up to --p-max.
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    /// Largest Werner parameter.
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    /// Eigenvalues below minus this value count as negative.
    #[arg(long, default_value_t = DEFAULT_PPT_TOL)]
    pub ppt_tol: f64,
}

/// Parses `2x2x3` (commas also accepted).
pub fn parse_dims(text: &str, max_dim: usize) -> Result<DimVector> {
    let dims = text
        .split(['x', ','])
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid dimension {t:?} in {text:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    DimVector::with_limit(dims, max_dim)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match run(&cli) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: writing output: {e}");
                4
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.class().exit_code()
        }
    }
}

/// Executes a parsed command and returns what it prints.
pub fn run(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze { file, ppt } => cmd_analyze(g, file, *ppt),
        Command::Factorize {
            file,
            factors_out,
            residual_threshold,
        } => cmd_factorize(g, file, factors_out.as_deref(), *residual_threshold),
        Command::CheckPartition { file, partition } => cmd_check_partition(g, file, partition),
        Command::Ppt { file, part, ppt_tol } => cmd_ppt(g, file, part, *ppt_tol),
        Command::Gen(args) => cmd_gen(g, args),
        Command::Bench(args) => cmd_bench(g, args),
    }
}

fn tolerance(g: &GlobalOpts) -> Result<RankTolerance> {
    RankTolerance::new(g.rtol, g.atol)
}

fn tolerance_report(tol: RankTolerance) -> ToleranceReport {
    ToleranceReport {
        rtol: tol.rtol(),
        atol: tol.atol(),
    }
}

struct Loaded {
    digest: String,
    kind: StateKind,
    state: State,
}

fn load(g: &GlobalOpts, path: &Path) -> Result<Loaded> {
    if !(g.load_tol.is_finite() && g.load_tol >= 0.0) {
        return Err(Error::InvalidValue(format!(
            "load tolerance must be finite and ≥ 0, got {}",
            g.load_tol
        )));
    }
    let text = io::read_text(path)?;
    let file: StateFile = serde_json::from_str(&text).map_err(io::map_json_error)?;
    let state = file.to_state(g.max_dim, g.load_tol)?;
    Ok(Loaded {
        digest: io::digest(text.as_bytes()),
        kind: file.kind,
        state,
    })
}

fn kind_name(kind: StateKind) -> &'static str {
    match kind {
        StateKind::Pure => "pure",
        StateKind::Mixture => "mixture",
        StateKind::Dense => "dense",
    }
}

fn json_text<T: serde::Serialize>(value: &T) -> Result<String> {
    io::to_pretty_json(value)
}

/// Parts of size 1..=⌊N/2⌋, keeping one side of each balanced bipartition.
fn ppt_parts(n: usize) -> Vec<SubsystemSet> {
    let all: Vec<usize> = (0..n).collect();
    (1..=n / 2)
        .flat_map(|k| subsets_of_size(&all, k))
        .filter(|s| 2 * s.len() < n || s.contains(0))
        .collect()
}

fn ppt_scan(rho: &DensityMatrix) -> Result<Vec<(SubsystemSet, f64)>> {
    ppt_parts(rho.num_particles())
        .into_par_iter()
        .map(|part| Ok((part.clone(), ppt_min_eigenvalue(rho, &part)?)))
        .collect()
}

fn lattice_entries(lattice: &RankLattice) -> Vec<LatticeEntry> {
    let mut entries: Vec<LatticeEntry> = lattice
        .entries
        .iter()
        .map(|(s, &rank)| LatticeEntry {
            traced: s.one_based(),
            rank,
        })
        .collect();
    entries.sort_by(|a, b| (a.traced.len(), &a.traced).cmp(&(b.traced.len(), &b.traced)));
    entries
}

fn cmd_analyze(g: &GlobalOpts, path: &Path, with_ppt: bool) -> Result<String> {
    let tol = tolerance(g)?;
    let loaded = load(g, path)?;
    let start = Instant::now();
    let n = loaded.state.num_particles();
    let depth = g.depth.unwrap_or_else(|| default_depth(n));
    let factor = loaded.state.spectral_factor(tol);
    let lattice = criteria::rank_lattice_of(&factor, depth, tol, DEFAULT_MAX_SUBSETS)?;
    let verdict = verdict_from_lattice(&lattice);
    let ppt = if with_ppt {
        Some(ppt_scan(&loaded.state.to_density())?)
    } else {
        None
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let report = AnalysisReport {
        format_version: FORMAT_VERSION.into(),
        input_digest: loaded.digest,
        dims: loaded.state.dims().as_slice().to_vec(),
        input_kind: kind_name(loaded.kind).into(),
        tolerance: tolerance_report(tol),
        depth,
        state_rank: lattice.state_rank,
        lattice: lattice_entries(&lattice),
        violations: verdict
            .witnesses
            .iter()
            .map(|v| ViolationReport {
                child: v.child.one_based(),
                parent: v.parent.one_based(),
                child_rank: v.child_rank,
                parent_rank: v.parent_rank,
            })
            .collect(),
        verdict: verdict.tag,
        ppt: ppt.as_ref().map(|rows| {
            rows.iter()
                .map(|(part, min_eigenvalue)| PptEntry {
                    part: part.one_based(),
                    min_eigenvalue: *min_eigenvalue,
                })
                .collect()
        }),
        elapsed_ms: Some(elapsed_ms),
    };
    if g.json {
        return json_text(&report);
    }

    let mut s = String::new();
    let _ = writeln!(s, "input       {} ({})", report.input_digest, report.input_kind);
    let _ = writeln!(s, "dims        {}", loaded.state.dims());
    let _ = writeln!(s, "tolerance   rtol={:e} atol={:e}", tol.rtol(), tol.atol());
    let _ = writeln!(s, "state rank  {}", lattice.state_rank);
    for (k, row) in lattice.by_depth() {
        let _ = writeln!(s, "traced-out sets of size {k}:");
        for (set, rank) in row {
            let _ = writeln!(s, "  R{:<12} {rank}", set.to_string());
        }
    }
    if verdict.witnesses.is_empty() {
        let _ = writeln!(s, "violations  none");
    } else {
        let _ = writeln!(s, "violations  {}", verdict.witnesses.len());
        for v in &verdict.witnesses {
            let _ = writeln!(s, "  {v}");
        }
    }
    if let Some(rows) = &ppt {
        let _ = writeln!(s, "partial transpose minimum eigenvalues:");
        for (part, min) in rows {
            let _ = writeln!(s, "  T{:<12} {min:.6e}", part.to_string());
        }
    }
    let _ = writeln!(s, "verdict     {}", verdict.tag);
    let _ = writeln!(s, "elapsed     {elapsed_ms:.3} ms");
    Ok(s)
}

pub fn factorization_report(
    digest: String,
    dims: &DimVector,
    tol: RankTolerance,
    result: &FactorizationResult,
    elapsed_ms: Option<f64>,
) -> FactorizationReport {
    FactorizationReport {
        format_version: FORMAT_VERSION.into(),
        input_digest: digest,
        dims: dims.as_slice().to_vec(),
        tolerance: tolerance_report(tol),
        partition: result.partition.iter().map(SubsystemSet::one_based).collect(),
        fully_entangled_parts: result
            .fully_entangled_parts
            .iter()
            .map(SubsystemSet::one_based)
            .collect(),
        residual: result.residual,
        trace_log: result
            .trace_log
            .iter()
            .map(|step| TraceStepReport {
                k: step.k,
                remainder: step.remainder.one_based(),
                tested: step
                    .tested
                    .iter()
                    .map(|(set, rank)| TestedSubset {
                        subset: set.one_based(),
                        rank: *rank,
                    })
                    .collect(),
                accepted: step.accepted.iter().map(SubsystemSet::one_based).collect(),
            })
            .collect(),
        elapsed_ms,
    }
}

fn cmd_factorize(g: &GlobalOpts, path: &Path, factors_out: Option<&Path>, residual_threshold: f64) -> Result<String> {
    let tol = tolerance(g)?;
    let loaded = load(g, path)?;
    let psi = loaded.state.to_pure(tol)?;
    let start = Instant::now();
    let opts = FactorizeOptions {
        tol,
        residual_threshold,
        max_subsets: DEFAULT_MAX_SUBSETS,
    };
    let result = factorize_pure_with(&psi, &opts)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut written = Vec::new();
    if let Some(dir) = factors_out {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (i, (part, factor)) in result.partition.iter().zip(&result.factors).enumerate() {
            let file = StateFile::from_pure(factor)
                .with_metadata("generator", "factorize")
                .with_metadata("source_digest", loaded.digest.clone())
                .with_metadata("particles", part.one_based());
            let target = dir.join(format!("factor_{}.json", i + 1));
            io::write_state_file(&target, &file)?;
            written.push(target);
        }
    }

    let report = factorization_report(loaded.digest, psi.dims(), tol, &result, Some(elapsed_ms));
    if g.json {
        return json_text(&report);
    }
    let mut s = String::new();
    let _ = writeln!(s, "partition   {}", result.partition_string());
    for part in &result.partition {
        let flag = if part.len() == 1 {
            "single particle"
        } else if result.fully_entangled_parts.contains(part) {
            "fully entangled"
        } else {
            "not fully entangled"
        };
        let _ = writeln!(s, "  {:<14} {flag}", part.to_string());
    }
    let _ = writeln!(s, "residual    {:.3e}", result.residual);
    let _ = writeln!(s, "steps:");
    for step in &result.trace_log {
        let accepted: Vec<String> = step.accepted.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(
            s,
            "  level k={} remainder {} tested {} accepted [{}]",
            step.k,
            step.remainder,
            step.tested.len(),
            accepted.join(", ")
        );
    }
    for path in written {
        let _ = writeln!(s, "wrote       {}", path.display());
    }
    let _ = writeln!(s, "elapsed     {elapsed_ms:.3} ms");
    Ok(s)
}

fn cmd_check_partition(g: &GlobalOpts, path: &Path, expr: &str) -> Result<String> {
    let tol = tolerance(g)?;
    let loaded = load(g, path)?;
    let partition = Partition::parse(expr, loaded.state.num_particles())?;
    let factor = loaded.state.spectral_factor(tol);
    let report = check_partition_of(&factor, &partition, tol)?;
    if g.json {
        return json_text(&PartitionCheckReport {
            format_version: FORMAT_VERSION.into(),
            input_digest: loaded.digest,
            tolerance: tolerance_report(tol),
            partition: partition.parts().iter().map(SubsystemSet::one_based).collect(),
            pairs: report
                .pairs
                .iter()
                .map(|p| PairReport {
                    u: p.u.one_based(),
                    v: p.v.one_based(),
                    rank_u: p.rank_u,
                    rank_v: p.rank_v,
                    rank_uv: p.rank_uv,
                    verdict: p.tag,
                })
                .collect(),
            overall: report.overall,
        });
    }
    let mut s = String::new();
    let _ = writeln!(s, "partition   {partition}");
    let _ = writeln!(
        s,
        "{:<10} {:<10} {:>6} {:>6} {:>7}  verdict",
        "U", "V", "rk(U)", "rk(V)", "rk(UV)"
    );
    for p in &report.pairs {
        let _ = writeln!(
            s,
            "{:<10} {:<10} {:>6} {:>6} {:>7}  {}",
            p.u.to_string(),
            p.v.to_string(),
            p.rank_u,
            p.rank_v,
            p.rank_uv,
            p.tag
        );
    }
    let _ = writeln!(s, "overall     {}", report.overall);
    Ok(s)
}

fn cmd_ppt(g: &GlobalOpts, path: &Path, part_expr: &str, ppt_tol: f64) -> Result<String> {
    if !(ppt_tol.is_finite() && ppt_tol >= 0.0) {
        return Err(Error::InvalidValue(format!(
            "ppt tolerance must be finite and ≥ 0, got {ppt_tol}"
        )));
    }
    let loaded = load(g, path)?;
    let part = parse_index_list(part_expr, loaded.state.num_particles())?;
    let min = ppt_min_eigenvalue(&loaded.state.to_density(), &part)?;
    let verdict = if min < -ppt_tol { "ENTANGLED" } else { "NOT_DETECTED" };
    if g.json {
        return json_text(&PptReport {
            format_version: FORMAT_VERSION.into(),
            input_digest: loaded.digest,
            part: part.one_based(),
            min_eigenvalue: min,
            tolerance: ppt_tol,
            verdict: verdict.into(),
        });
    }
    Ok(format!(
        "part        {part}\nmin eigenvalue of partial transpose  {min:.12e}\nverdict     {verdict}\n"
    ))
}

fn require<T>(value: Option<T>, flag: &str, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidValue(format!("{name} needs --{flag}")))
}

fn cmd_gen(g: &GlobalOpts, args: &GenArgs) -> Result<String> {
    let seed = g.seed;
    let name = args
        .name
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let mut params = serde_json::Map::new();
    let mut seeded = false;
    let file = match args.name {
        GenName::Ghz => {
            let n = args.n.unwrap_or(3);
            let d = args.d.unwrap_or(2);
            params.insert("n".into(), json!(n));
            params.insert("d".into(), json!(d));
            StateFile::from_pure(&catalog::ghz_with_limit(n, d, g.max_dim)?)
        }
        GenName::W => {
            let n = args.n.unwrap_or(3);
            params.insert("n".into(), json!(n));
            StateFile::from_pure(&catalog::w_with_limit(n, g.max_dim)?)
        }
        GenName::Bell => StateFile::from_pure(&catalog::bell()),
        GenName::Werner => {
            let p = require(args.p, "p", "werner")?;
            params.insert("p".into(), json!(p));
            StateFile::from_density(&catalog::werner(WernerSpec::new(p)?))
        }
        GenName::Paper6 => StateFile::from_pure(&catalog::six_qubit_example()),
        GenName::QutritMix => StateFile::from_mixture(&catalog::qutrit_phase_mixture_spec()),
        GenName::RandomHaar | GenName::RandomProduct | GenName::RandomMixed => {
            let dims = parse_dims(&require(args.dims.clone(), "dims", &name)?, g.max_dim)?;
            params.insert("dims".into(), json!(dims.as_slice()));
            let kind = match args.name {
                GenName::RandomHaar => RandomKind::HaarPure,
                GenName::RandomProduct => RandomKind::ProductPure,
                _ => {
                    let r = args.rank.unwrap_or(2);
                    params.insert("rank".into(), json!(r));
                    RandomKind::MixedOfRank(r)
                }
            };
            seeded = true;
            StateFile::from_state(&catalog::random_state(&RandomSpec::new(dims, seed, kind)?))
        }
        GenName::RandomSeparable => {
            let dims = parse_dims(&require(args.dims.clone(), "dims", &name)?, g.max_dim)?;
            let terms = args.terms.unwrap_or(4);
            params.insert("dims".into(), json!(dims.as_slice()));
            params.insert("terms".into(), json!(terms));
            seeded = true;
            StateFile::from_density(&random_product_mixture(&dims, terms, seed)?)
        }
    };
    let mut file = file.with_metadata("generator", name).with_metadata("params", params);
    if seeded {
        file = file.with_metadata("seed", seed);
    }
    let text = io::to_pretty_json(&file)?;
    match &args.output {
        Some(path) => {
            io::write_state_file(path, &file)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Detection {
    rank: bool,
    ppt: bool,
}

fn detect(state: &State, tol: RankTolerance, ppt_tol: f64) -> Result<Detection> {
    let n = state.num_particles();
    let lattice = criteria::rank_lattice_of(&state.spectral_factor(tol), n - 1, tol, DEFAULT_MAX_SUBSETS)?;
    let rank = !criteria::find_violations(&lattice).is_empty();
    let ppt = ppt_scan(&state.to_density())?.iter().any(|(_, min)| *min < -ppt_tol);
    Ok(Detection { rank, ppt })
}

fn cmd_bench(g: &GlobalOpts, args: &BenchArgs) -> Result<String> {
    let tol = tolerance(g)?;
    let dims = parse_dims(&args.dims, g.max_dim)?;
    if dims.len() < 2 {
        return Err(Error::InvalidValue("bench needs at least two particles".into()));
    }
    if !(args.ppt_tol.is_finite() && args.ppt_tol >= 0.0) {
        return Err(Error::InvalidValue(format!(
            "ppt tolerance must be finite and ≥ 0, got {}",
            args.ppt_tol
        )));
    }
    let seed = g.seed;
    let member = |i: usize| -> Result<State> {
        let s = derive_seed(seed, i as u64);
        match args.kind {
            BenchKind::ProductMixture => {
                if args.terms == 0 {
                    return Err(Error::InvalidValue("--terms must be ≥ 1".into()));
                }
                Ok(State::Mixed(random_product_mixture(&dims, 1 + i % args.terms, s)?))
            }
            BenchKind::Werner => {
                if dims.as_slice() != [2, 2] {
                    return Err(Error::InvalidValue(
                        "werner ensembles are two-qubit only (--dims 2x2)".into(),
                    ));
                }
                let p = if args.count == 1 {
                    args.p_min
                } else {
                    args.p_min + (args.p_max - args.p_min) * i as f64 / (args.count - 1) as f64
                };
                Ok(State::Mixed(catalog::werner(WernerSpec::new(p)?)))
            }
            BenchKind::HaarPure => Ok(catalog::random_state(&RandomSpec::new(
                dims.clone(),
                s,
                RandomKind::HaarPure,
            )?)),
            BenchKind::MixedRank => Ok(catalog::random_state(&RandomSpec::new(
                dims.clone(),
                s,
                RandomKind::MixedOfRank(args.rank),
            )?)),
        }
    };
    let detections = (0..args.count)
        .into_par_iter()
        .map(|i| detect(&member(i)?, tol, args.ppt_tol))
        .collect::<Result<Vec<_>>>()?;

    let count = |f: fn(&Detection) -> bool| detections.iter().filter(|d| f(d)).count();
    let rank_detect = count(|d| d.rank);
    let ppt_detect = count(|d| d.ppt);
    let both = count(|d| d.rank && d.ppt);
    let neither = count(|d| !d.rank && !d.ppt);
    Ok(format!(
        "kind,dims,seed,rank_detect,ppt_detect,both,neither\n{},{},{},{},{},{},{}\n",
        args.kind.name(),
        dims,
        seed,
        rank_detect,
        ppt_detect,
        both,
        neither
    ))
}
