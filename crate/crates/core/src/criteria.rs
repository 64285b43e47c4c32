//! Rank-based separability criteria.
//!
//! A [`RankLattice`] records the numerical rank of every reduced density
//! matrix obtained by tracing out up to `max_depth` particles. For a
//! separable state each reduced matrix has rank no larger than any matrix one
//! level up (one fewer particle traced out); [`find_violations`] lists every
//! place where that fails, and any such [`Violation`] certifies entanglement.
//! The converse does not hold, so mixed states without violations are only
//! ever reported as [`VerdictTag::Inconclusive`].

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RankTolerance;
use crate::state::{binomial, subsets_of_size, DensityMatrix, PureState, SpectralFactor, State, SubsystemSet};

/// Default cap on the number of subsets a single analysis may enumerate.
pub const DEFAULT_MAX_SUBSETS: usize = 1 << 20;

/// Ranks of the full state and of its reduced matrices, keyed by the
/// traced-out set.
#[derive(Debug, Clone, PartialEq)]
pub struct RankLattice {
    pub num_particles: usize,
    pub state_rank: usize,
    pub entries: BTreeMap<SubsystemSet, usize>,
    pub max_depth: usize,
}

impl RankLattice {
    /// Rank for a traced-out set; the empty set maps to the state rank.
    pub fn rank_of(&self, traced: &SubsystemSet) -> Option<usize> {
        if traced.is_empty() {
            Some(self.state_rank)
        } else {
            self.entries.get(traced).copied()
        }
    }

    /// Entries grouped by traced-out set size, smallest first.
    pub fn by_depth(&self) -> Vec<(usize, Vec<(&SubsystemSet, usize)>)> {
        (1..=self.max_depth)
            .map(|k| {
                let row = self
                    .entries
                    .iter()
                    .filter(|(s, _)| s.len() == k)
                    .map(|(s, r)| (s, *r))
                    .collect();
                (k, row)
            })
            .collect()
    }
}

/// A reduced matrix whose rank exceeds that of a matrix one level up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Larger traced-out set.
    pub child: SubsystemSet,
    /// `child` minus one particle; empty means the full state.
    pub parent: SubsystemSet,
    pub child_rank: usize,
    pub parent_rank: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parent = if self.parent.is_empty() {
            "ρ".to_string()
        } else {
            format!("ρ_R{}", self.parent)
        };
        write!(
            f,
            "rank(ρ_R{}) = {} > rank({}) = {}",
            self.child, self.child_rank, parent, self.parent_rank
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictTag {
    Entangled,
    Inconclusive,
    SeparablePureProduct,
}

impl fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictTag::Entangled => "ENTANGLED",
            VerdictTag::Inconclusive => "INCONCLUSIVE",
            VerdictTag::SeparablePureProduct => "SEPARABLE_PURE_PRODUCT",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub tag: VerdictTag,
    pub witnesses: Vec<Violation>,
}

/// Outcome of comparing two parts against their composite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairVerdict {
    pub u: SubsystemSet,
    pub v: SubsystemSet,
    pub rank_u: usize,
    pub rank_v: usize,
    pub rank_uv: usize,
    pub tag: VerdictTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    pub pairs: Vec<PairVerdict>,
    pub overall: VerdictTag,
}

/// Disjoint parts covering every particle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<SubsystemSet>,
}

impl Partition {
    pub fn new(parts: Vec<SubsystemSet>, n: usize) -> Result<Self> {
        if parts.iter().any(SubsystemSet::is_empty) {
            return Err(Error::InvalidValue("partition parts must be nonempty".into()));
        }
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i + 1..] {
                if a.intersects(b) {
                    return Err(Error::Overlap(format!("{a} and {b}")));
                }
            }
        }
        let covered: usize = parts.iter().map(SubsystemSet::len).sum();
        if covered != n {
            let missing: Vec<String> = (0..n)
                .filter(|i| !parts.iter().any(|p| p.contains(*i)))
                .map(|i| (i + 1).to_string())
                .collect();
            return Err(Error::Cover(format!("missing particles {}", missing.join(","))));
        }
        Ok(Self { parts })
    }

    /// Parses `"1,2|3|4,5"`: 1-based indices, commas within a part, bars between parts.
    pub fn parse(expr: &str, n: usize) -> Result<Self> {
        let parts = expr
            .split('|')
            .map(|part| parse_index_list(part, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts, n)
    }

    pub fn parts(&self) -> &[SubsystemSet] {
        &self.parts
    }

    /// Parts as sorted sets, for order-insensitive comparison.
    pub fn as_sorted_sets(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self.parts.iter().map(|p| p.indices().to_vec()).collect();
        v.sort();
        v
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// Parses `"1,3"` into a set of 1-based particle indices.
pub fn parse_index_list(text: &str, n: usize) -> Result<SubsystemSet> {
    let indices = text
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid particle index {tok:?} in {text:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    SubsystemSet::from_one_based(&indices, n)
}

fn check_depth(n: usize, max_depth: usize) -> Result<()> {
    let ok = if n == 1 {
        max_depth == 0
    } else {
        (1..n).contains(&max_depth)
    };
    if !ok {
        return Err(Error::InvalidValue(format!(
            "depth must lie in 1..={} for {n} particles, got {max_depth}",
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Default depth ⌊N/2⌋ (at least 1 when N ≥ 2).
pub fn default_depth(n: usize) -> usize {
    if n < 2 {
        0
    } else {
        (n / 2).max(1)
    }
}

fn check_enumeration(count: usize, max_subsets: usize) -> Result<()> {
    if count > max_subsets {
        return Err(Error::EnumerationLimit {
            count,
            max: max_subsets,
        });
    }
    Ok(())
}

/// Rank lattice of a density matrix.
pub fn rank_lattice(rho: &DensityMatrix, max_depth: usize, tol: RankTolerance) -> Result<RankLattice> {
    rank_lattice_of(
        &SpectralFactor::from_density(rho, tol),
        max_depth,
        tol,
        DEFAULT_MAX_SUBSETS,
    )
}

/// Rank lattice from a spectral factor; subsets are evaluated in parallel.
pub fn rank_lattice_of(
    factor: &SpectralFactor,
    max_depth: usize,
    tol: RankTolerance,
    max_subsets: usize,
) -> Result<RankLattice> {
    let n = factor.dims().len();
    check_depth(n, max_depth)?;
    let count = (1..=max_depth).fold(0usize, |acc, k| acc.saturating_add(binomial(n, k)));
    check_enumeration(count, max_subsets)?;

    let all: Vec<usize> = (0..n).collect();
    let subsets: Vec<SubsystemSet> = (1..=max_depth).flat_map(|k| subsets_of_size(&all, k)).collect();
    let ranks: Vec<usize> = subsets
        .par_iter()
        .map(|traced| factor.reduced_rank(traced.complement(n).indices(), tol))
        .collect();
    Ok(RankLattice {
        num_particles: n,
        state_rank: factor.state_rank(),
        entries: subsets.into_iter().zip(ranks).collect(),
        max_depth,
    })
}

/// Every (child, parent) pair where the child's rank exceeds the parent's.
pub fn find_violations(lattice: &RankLattice) -> Vec<Violation> {
    let mut out = Vec::new();
    for (child, &child_rank) in &lattice.entries {
        for &x in child.indices() {
            let parent = child.without(x);
            let Some(parent_rank) = lattice.rank_of(&parent) else {
                continue;
            };
            if child_rank > parent_rank {
                out.push(Violation {
                    child: child.clone(),
                    parent,
                    child_rank,
                    parent_rank,
                });
            }
        }
    }
    out
}

/// Verdict for an already computed lattice.
///
/// Without violations a rank-1 state is reported as a pure product: the
/// lattice always contains every single-particle trace, and a pure state whose
/// one-particle-traced matrices are all pure is a product.
pub fn verdict_from_lattice(lattice: &RankLattice) -> Verdict {
    let witnesses = find_violations(lattice);
    let tag = if !witnesses.is_empty() {
        VerdictTag::Entangled
    } else if lattice.state_rank == 1 {
        VerdictTag::SeparablePureProduct
    } else {
        VerdictTag::Inconclusive
    };
    Verdict { tag, witnesses }
}

pub fn entanglement_verdict(rho: &DensityMatrix, max_depth: usize, tol: RankTolerance) -> Result<Verdict> {
    Ok(verdict_from_lattice(&rank_lattice(rho, max_depth, tol)?))
}

fn pair_from_factor(
    factor: &SpectralFactor,
    u: &SubsystemSet,
    v: &SubsystemSet,
    tol: RankTolerance,
) -> Result<PairVerdict> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::InvalidValue("partition parts must be nonempty".into()));
    }
    if u.intersects(v) {
        return Err(Error::Overlap(format!("{u} and {v}")));
    }
    let uv = u.union(v);
    let rank_u = factor.reduced_rank(u.indices(), tol);
    let rank_v = factor.reduced_rank(v.indices(), tol);
    let rank_uv = factor.reduced_rank(uv.indices(), tol);
    let tag = if rank_u > rank_uv || rank_v > rank_uv {
        VerdictTag::Entangled
    } else {
        VerdictTag::Inconclusive
    };
    Ok(PairVerdict {
        u: u.clone(),
        v: v.clone(),
        rank_u,
        rank_v,
        rank_uv,
        tag,
    })
}

/// Compares rank(ρ_U) and rank(ρ_V) with rank(ρ_{U+V}).
pub fn check_partition_pair(
    rho: &DensityMatrix,
    u: &SubsystemSet,
    v: &SubsystemSet,
    tol: RankTolerance,
) -> Result<PairVerdict> {
    let n = rho.num_particles();
    for s in [u, v] {
        if let Some(&last) = s.indices().last() {
            if last >= n {
                return Err(Error::Index { index: last + 1, n });
            }
        }
    }
    pair_from_factor(&SpectralFactor::from_density(rho, tol), u, v, tol)
}

pub fn check_partition(rho: &DensityMatrix, parts: &[SubsystemSet], tol: RankTolerance) -> Result<PartitionReport> {
    let partition = Partition::new(parts.to_vec(), rho.num_particles())?;
    check_partition_of(&SpectralFactor::from_density(rho, tol), &partition, tol)
}

/// Pairwise checks over every unordered pair of parts.
pub fn check_partition_of(
    factor: &SpectralFactor,
    partition: &Partition,
    tol: RankTolerance,
) -> Result<PartitionReport> {
    let parts = partition.parts();
    if parts.len() < 2 {
        return Err(Error::InvalidValue("a partition check needs at least two parts".into()));
    }
    let mut pairs = Vec::new();
    for (i, u) in parts.iter().enumerate() {
        for v in &parts[i + 1..] {
            pairs.push(pair_from_factor(factor, u, v, tol)?);
        }
    }
    let overall = if pairs.iter().any(|p| p.tag == VerdictTag::Entangled) {
        VerdictTag::Entangled
    } else {
        VerdictTag::Inconclusive
    };
    Ok(PartitionReport { pairs, overall })
}

/// Analysis entry point for either kind of state.
pub fn analyze(
    state: &State,
    max_depth: usize,
    tol: RankTolerance,
    max_subsets: usize,
) -> Result<(RankLattice, Verdict)> {
    let lattice = rank_lattice_of(&state.spectral_factor(tol), max_depth, tol, max_subsets)?;
    let verdict = verdict_from_lattice(&lattice);
    Ok((lattice, verdict))
}

/// A pure state is entangled iff some single-particle reduced matrix is mixed.
pub fn pure_entangled(psi: &PureState, tol: RankTolerance) -> bool {
    let n = psi.num_particles();
    if n < 2 {
        return false;
    }
    let factor = SpectralFactor::from_pure(psi);
    (0..n).any(|p| factor.reduced_rank(&[p], tol) > 1)
}

/// Same predicate evaluated over every nonempty proper subset.
pub fn pure_entangled_full_scan(psi: &PureState, tol: RankTolerance, max_subsets: usize) -> Result<bool> {
    let n = psi.num_particles();
    let factor = SpectralFactor::from_pure(psi);
    let all: Vec<usize> = (0..n).collect();
    let count = (1..n).fold(0usize, |acc, k| acc.saturating_add(binomial(n, k)));
    check_enumeration(count, max_subsets)?;
    Ok((1..n).any(|k| {
        subsets_of_size(&all, k)
            .par_iter()
            .any(|s| factor.reduced_rank(s.indices(), tol) > 1)
    }))
}

/// Fully entangled: every subset of size ≤ ⌊N/2⌋ has a mixed reduced state.
///
/// Larger subsets are complements of smaller ones and have equal rank. A
/// single particle is not considered fully entangled.
pub fn pure_fully_entangled(psi: &PureState, tol: RankTolerance) -> Result<bool> {
    pure_fully_entangled_limited(psi, tol, DEFAULT_MAX_SUBSETS)
}

pub fn pure_fully_entangled_limited(psi: &PureState, tol: RankTolerance, max_subsets: usize) -> Result<bool> {
    let n = psi.num_particles();
    if n < 2 {
        return Ok(false);
    }
    let count = (1..=n / 2).fold(0usize, |acc, k| acc.saturating_add(binomial(n, k)));
    check_enumeration(count, max_subsets)?;
    let factor = SpectralFactor::from_pure(psi);
    let all: Vec<usize> = (0..n).collect();
    Ok((1..=n / 2).all(|k| {
        subsets_of_size(&all, k)
            .par_iter()
            .all(|s| factor.reduced_rank(s.indices(), tol) > 1)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bell, ghz, qutrit_phase_mixture, six_qubit_example, w, werner, WernerSpec};
    use crate::state::{density_from_pure, DimVector};

    fn set(idx: &[usize], n: usize) -> SubsystemSet {
        SubsystemSet::from_one_based(idx, n).unwrap()
    }

    fn tol() -> RankTolerance {
        RankTolerance::default()
    }

    #[test]
    fn product_state_lattice_is_all_ones() {
        let psi = PureState::basis(DimVector::new(vec![2, 2, 2]).unwrap(), &[0, 1, 0]).unwrap();
        let lattice = rank_lattice(&density_from_pure(&psi).unwrap(), 2, tol()).unwrap();
        assert_eq!(lattice.state_rank, 1);
        assert_eq!(lattice.entries.len(), 6);
        assert!(lattice.entries.values().all(|&r| r == 1));
        assert!(find_violations(&lattice).is_empty());
        assert_eq!(verdict_from_lattice(&lattice).tag, VerdictTag::SeparablePureProduct);
    }

    #[test]
    fn ghz3_lattice_and_violation() {
        let rho = density_from_pure(&ghz(3, 2).unwrap()).unwrap();
        let lattice = rank_lattice(&rho, 2, tol()).unwrap();
        assert_eq!(lattice.state_rank, 1);
        assert_eq!(lattice.entries.len(), 6);
        assert!(lattice.entries.values().all(|&r| r == 2));
        let v = find_violations(&lattice);
        assert!(v.contains(&Violation {
            child: set(&[1], 3),
            parent: SubsystemSet::all(0),
            child_rank: 2,
            parent_rank: 1,
        }));
    }

    #[test]
    fn werner_satisfies_rank_conditions() {
        let rho = werner(WernerSpec::new(0.6).unwrap());
        let lattice = rank_lattice(&rho, 1, tol()).unwrap();
        assert_eq!(lattice.state_rank, 4);
        assert_eq!(lattice.entries.values().copied().collect::<Vec<_>>(), vec![2, 2]);
        assert!(find_violations(&lattice).is_empty());
        assert_eq!(
            entanglement_verdict(&rho, 1, tol()).unwrap().tag,
            VerdictTag::Inconclusive
        );
    }

    #[test]
    fn qutrit_mixture_is_detected() {
        let rho = qutrit_phase_mixture();
        let verdict = entanglement_verdict(&rho, 1, tol()).unwrap();
        assert_eq!(verdict.tag, VerdictTag::Entangled);
        assert!(verdict
            .witnesses
            .iter()
            .all(|w| w.child_rank == 3 && w.parent_rank == 2));

        let pair = check_partition_pair(&rho, &set(&[1], 2), &set(&[2], 2), tol()).unwrap();
        assert_eq!((pair.rank_u, pair.rank_v, pair.rank_uv), (3, 3, 2));
        assert_eq!(pair.tag, VerdictTag::Entangled);
    }

    #[test]
    fn maximally_mixed_is_inconclusive() {
        let rho = DensityMatrix::maximally_mixed(DimVector::new(vec![2, 2]).unwrap());
        assert_eq!(
            entanglement_verdict(&rho, 1, tol()).unwrap().tag,
            VerdictTag::Inconclusive
        );
    }

    #[test]
    fn pairwise_check_is_weaker_on_ghz() {
        let rho = density_from_pure(&ghz(3, 2).unwrap()).unwrap();
        let pair = check_partition_pair(&rho, &set(&[1], 3), &set(&[2], 3), tol()).unwrap();
        assert_eq!((pair.rank_u, pair.rank_v, pair.rank_uv), (2, 2, 2));
        assert_eq!(pair.tag, VerdictTag::Inconclusive);
        let report = check_partition(&rho, &[set(&[1], 3), set(&[2], 3), set(&[3], 3)], tol()).unwrap();
        assert_eq!(report.pairs.len(), 3);
        assert_eq!(report.overall, VerdictTag::Inconclusive);
    }

    #[test]
    fn six_qubit_partition_passes_pairwise_checks() {
        let rho = density_from_pure(&six_qubit_example()).unwrap();
        let parts = Partition::parse("1|2,3|4,5,6", 6).unwrap();
        let report = check_partition(&rho, parts.parts(), tol()).unwrap();
        assert_eq!(report.overall, VerdictTag::Inconclusive);
        assert!(report.pairs.iter().all(|p| p.tag == VerdictTag::Inconclusive));
    }

    #[test]
    fn partition_validation() {
        assert!(matches!(Partition::parse("1,2|2", 2), Err(Error::Overlap(_))));
        assert!(matches!(Partition::parse("1|2", 3), Err(Error::Cover(_))));
        assert!(matches!(Partition::parse("1|x", 2), Err(Error::Parse(_))));
        assert!(matches!(Partition::parse("1|4", 3), Err(Error::Index { .. })));
        let rho = density_from_pure(&bell()).unwrap();
        assert!(matches!(
            check_partition_pair(&rho, &set(&[1], 2), &set(&[1, 2], 2), tol()),
            Err(Error::Overlap(_))
        ));
        assert!(check_partition(&rho, &[set(&[1, 2], 2)], tol()).is_err());
    }

    #[test]
    fn depth_bounds() {
        let rho = density_from_pure(&bell()).unwrap();
        assert!(rank_lattice(&rho, 0, tol()).is_err());
        assert!(rank_lattice(&rho, 2, tol()).is_err());
        let f = SpectralFactor::from_density(&rho, tol());
        assert!(matches!(
            rank_lattice_of(&f, 1, tol(), 1),
            Err(Error::EnumerationLimit { .. })
        ));
    }

    #[test]
    fn pure_predicates_on_named_states() {
        let product = PureState::basis(DimVector::new(vec![2, 2]).unwrap(), &[0, 0]).unwrap();
        assert!(!pure_entangled(&product, tol()));
        assert!(pure_entangled(&bell(), tol()));
        assert!(pure_entangled(&ghz(4, 2).unwrap(), tol()));

        assert!(pure_fully_entangled(&ghz(3, 2).unwrap(), tol()).unwrap());
        assert!(pure_fully_entangled(&w(4).unwrap(), tol()).unwrap());
        let zero = PureState::basis(DimVector::new(vec![2]).unwrap(), &[0]).unwrap();
        let bell_zero = bell().tensor(&zero, 4096).unwrap();
        assert!(!pure_fully_entangled(&bell_zero, tol()).unwrap());
        assert!(pure_entangled(&bell_zero, tol()));
        assert!(pure_entangled_full_scan(&bell_zero, tol(), 100).unwrap());
        assert!(!pure_entangled_full_scan(&product, tol(), 100).unwrap());
    }

    #[test]
    fn single_particle_edge_case() {
        let psi = PureState::basis(DimVector::new(vec![3]).unwrap(), &[1]).unwrap();
        assert!(!pure_entangled(&psi, tol()));
        assert!(!pure_fully_entangled(&psi, tol()).unwrap());
        let (lattice, verdict) = analyze(&State::Pure(psi), 0, tol(), 10).unwrap();
        assert!(lattice.entries.is_empty());
        assert_eq!(verdict.tag, VerdictTag::SeparablePureProduct);
    }
}
