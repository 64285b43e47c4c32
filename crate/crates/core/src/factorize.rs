//! Splitting a pure state into its finest tensor-product partition.
//!
//! The search runs in levels k = 1, 2, …: at level k every size-k subset S of
//! the still-unfactored remainder is tested, and S is split off whenever its
//! reduced state is pure, which for a pure global state is exactly the
//! condition that S factors out. Sets found at one level are minimal, so they
//! never overlap. A size-j subset of an m-particle remainder with j > ⌊m/2⌋
//! is the complement of a smaller one, which bounds how far the levels go
//! (see [`continue_after_level`]).

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::criteria::{pure_fully_entangled_limited, DEFAULT_MAX_SUBSETS};
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, RankTolerance};
use crate::state::{binomial, canonicalize_phase, row_gram, subsets_of_size, PureState, SpectralFactor, SubsystemSet};

/// Default bound on the reconstruction error of an accepted factorization.
pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct FactorizeOptions {
    pub tol: RankTolerance,
    pub residual_threshold: f64,
    pub max_subsets: usize,
}

impl Default for FactorizeOptions {
    fn default() -> Self {
        Self {
            tol: RankTolerance::default(),
            residual_threshold: DEFAULT_RESIDUAL_THRESHOLD,
            max_subsets: DEFAULT_MAX_SUBSETS,
        }
    }
}

/// One level of the search.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// Subset size tested at this level.
    pub k: usize,
    /// Unfactored particles when the level started.
    pub remainder: SubsystemSet,
    /// Every tested subset with the rank of its reduced matrix.
    pub tested: Vec<(SubsystemSet, usize)>,
    /// Subsets split off at this level.
    pub accepted: Vec<SubsystemSet>,
}

#[derive(Debug, Clone)]
pub struct FactorizationResult {
    /// Parts ordered by their smallest particle.
    pub partition: Vec<SubsystemSet>,
    /// One normalized pure state per part, in partition order.
    pub factors: Vec<PureState>,
    pub fully_entangled_parts: Vec<SubsystemSet>,
    pub residual: f64,
    pub trace_log: Vec<TraceStep>,
}

impl FactorizationResult {
    /// Parts as sorted 0-based index lists, for order-insensitive comparison.
    pub fn partition_sets(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self.partition.iter().map(|p| p.indices().to_vec()).collect();
        v.sort();
        v
    }

    pub fn partition_string(&self) -> String {
        self.partition
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// Sum over levels of the number of accepted parts.
    pub fn accepted_at(&self, k: usize) -> usize {
        self.trace_log
            .iter()
            .filter(|s| s.k == k)
            .map(|s| s.accepted.len())
            .sum()
    }
}

impl fmt::Display for FactorizationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.partition_string())
    }
}

/// Whether another level runs after finishing level `k` with `m` particles left.
///
/// Level k + 1 is worthwhile only when m ≥ 2(k + 1); otherwise every split of
/// the remainder is the complement of a subset already tested. This gives the
/// thresholds m ≥ 4 after level 1 and m ≥ 6 after level 2.
pub fn continue_after_level(m: usize, k: usize) -> bool {
    m >= 2 * k + 2
}

struct Search<'a> {
    factor: SpectralFactor,
    opts: &'a FactorizeOptions,
    remainder: Vec<usize>,
    parts: Vec<SubsystemSet>,
    log: Vec<TraceStep>,
    enumerated: usize,
}

impl Search<'_> {
    fn level(&mut self, k: usize) -> Result<()> {
        let count = binomial(self.remainder.len(), k);
        self.enumerated = self.enumerated.saturating_add(count);
        if self.enumerated > self.opts.max_subsets {
            return Err(Error::EnumerationLimit {
                count: self.enumerated,
                max: self.opts.max_subsets,
            });
        }
        let start = SubsystemSet::from_sorted_unchecked(self.remainder.clone());
        let candidates = subsets_of_size(&self.remainder, k);
        let tol = self.opts.tol;
        let factor = &self.factor;
        let ranks: Vec<usize> = candidates
            .par_iter()
            .map(|s| factor.reduced_rank(s.indices(), tol))
            .collect();

        let mut accepted: Vec<SubsystemSet> = Vec::new();
        for (s, &rank) in candidates.iter().zip(&ranks) {
            if rank != 1 {
                continue;
            }
            if let Some(prev) = accepted.iter().find(|a| a.intersects(s)) {
                return Err(Error::Internal(format!(
                    "separable sets {prev} and {s} overlap at level {k}"
                )));
            }
            accepted.push(s.clone());
        }
        self.remainder.retain(|p| !accepted.iter().any(|a| a.contains(*p)));
        self.parts.extend(accepted.iter().cloned());
        self.log.push(TraceStep {
            k,
            remainder: start,
            tested: candidates.into_iter().zip(ranks).collect(),
            accepted,
        });
        Ok(())
    }
}

/// Finest tensor-product partition of a pure state.
pub fn factorize_pure(psi: &PureState, tol: RankTolerance) -> Result<FactorizationResult> {
    factorize_pure_with(
        psi,
        &FactorizeOptions {
            tol,
            ..FactorizeOptions::default()
        },
    )
}

pub fn factorize_pure_with(psi: &PureState, opts: &FactorizeOptions) -> Result<FactorizationResult> {
    let n = psi.num_particles();
    let mut search = Search {
        factor: SpectralFactor::from_pure(psi),
        opts,
        remainder: (0..n).collect(),
        parts: Vec::new(),
        log: Vec::new(),
        enumerated: 0,
    };

    if n >= 2 {
        let mut k = 1;
        loop {
            search.level(k)?;
            if !continue_after_level(search.remainder.len(), k) {
                break;
            }
            k += 1;
        }
    }

    let Search {
        remainder,
        mut parts,
        log,
        ..
    } = search;
    if !remainder.is_empty() {
        parts.push(SubsystemSet::from_sorted_unchecked(remainder));
    }
    parts.sort_by_key(|p| p.indices()[0]);

    let factors = parts
        .iter()
        .map(|p| extract_factor(psi, p, opts.tol, true))
        .collect::<Result<Vec<_>>>()?;

    let mut fully_entangled_parts = Vec::new();
    for (part, factor) in parts.iter().zip(&factors) {
        if part.len() > 1 {
            if !pure_fully_entangled_limited(factor, opts.tol, opts.max_subsets)? {
                return Err(Error::Internal(format!("part {part} is not minimal")));
            }
            fully_entangled_parts.push(part.clone());
        }
    }

    let mut result = FactorizationResult {
        partition: parts,
        factors,
        fully_entangled_parts,
        residual: 0.0,
        trace_log: log,
    };
    result.residual = verify_factorization(psi, &result)?;
    // Negated form so that a NaN residual is rejected.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(result.residual <= opts.residual_threshold) {
        return Err(Error::Internal(format!(
            "reconstruction residual {:.3e} exceeds {:.3e}",
            result.residual, opts.residual_threshold
        )));
    }
    Ok(result)
}

/// Dominant eigenvector of the reduced matrix of `part`, phase-fixed.
///
/// With `require_pure` the reduced matrix must have numerical rank 1.
pub fn extract_factor(
    psi: &PureState,
    part: &SubsystemSet,
    tol: RankTolerance,
    require_pure: bool,
) -> Result<PureState> {
    let m = psi.coefficient_matrix(part.indices());
    let (rows, cols) = (m.rows(), m.cols());
    let mut v: Vec<Complex64> = if rows <= cols {
        let pairs = sym_eigen(&row_gram(&m));
        check_rank(&pairs, part, tol, require_pure)?;
        pairs.into_iter().next().map(|p| p.1).unwrap_or_default()
    } else {
        let adj = m.adjoint();
        let pairs = sym_eigen(&row_gram(&adj));
        check_rank(&pairs, part, tol, require_pure)?;
        let u = pairs.into_iter().next().map(|p| p.1).unwrap_or_default();
        (0..rows)
            .map(|i| m.row(i).iter().zip(&u).map(|(a, b)| a * b).sum())
            .collect()
    };
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Internal(format!("vanishing factor for part {part}")));
    }
    v.iter_mut().for_each(|z| *z /= norm);
    canonicalize_phase(&mut v);
    PureState::new(psi.dims().select(part.indices()), v)
}

fn check_rank(
    pairs: &[(f64, Vec<Complex64>)],
    part: &SubsystemSet,
    tol: RankTolerance,
    require_pure: bool,
) -> Result<()> {
    if require_pure {
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let rank = tol.count_above(&values);
        if rank != 1 {
            return Err(Error::Internal(format!(
                "reduced state of part {part} has rank {rank}, expected a pure factor"
            )));
        }
    }
    Ok(())
}

/// Frobenius distance between |ψ⟩⟨ψ| and the tensor product of the factor
/// projectors, with particles restored to their original order.
pub fn verify_factorization(psi: &PureState, result: &FactorizationResult) -> Result<f64> {
    let n = psi.num_particles();
    let dims = psi.dims();
    let mut seen = vec![false; n];
    for part in &result.partition {
        for &p in part.indices() {
            if p >= n {
                return Err(Error::Index { index: p + 1, n });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::Overlap(format!("particle {} appears twice", p + 1)));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Cover(format!("particle {} is not in any part", missing + 1)));
    }
    if result.factors.len() != result.partition.len() {
        return Err(Error::Cover(format!(
            "{} factors for {} parts",
            result.factors.len(),
            result.partition.len()
        )));
    }
    for (part, f) in result.partition.iter().zip(&result.factors) {
        if f.dims() != &dims.select(part.indices()) {
            return Err(Error::DimensionMismatch(format!(
                "factor for part {part} has dims {}",
                f.dims()
            )));
        }
    }

    let d = dims.total();
    let mut phi = vec![Complex64::new(1.0, 0.0); d];
    for (x, slot) in phi.iter_mut().enumerate() {
        let digits = dims.digits(x);
        for (part, f) in result.partition.iter().zip(&result.factors) {
            let local = part
                .indices()
                .iter()
                .fold(0, |acc, &p| acc * dims.as_slice()[p] + digits[p]);
            *slot *= f.amplitudes()[local];
        }
    }

    let a = psi.amplitudes();
    let acc: f64 = (0..d)
        .into_par_iter()
        .map(|i| {
            let (ai, pi) = (a[i], phi[i]);
            (0..d)
                .map(|j| (ai * a[j].conj() - pi * phi[j].conj()).norm_sqr())
                .sum::<f64>()
        })
        .sum();
    Ok(acc.sqrt())
}
