//! Pure and mixed states over arbitrary local dimensions.
//!
//! The joint basis index of a product ket |i₁ i₂ … i_N⟩ is
//! Σₖ iₖ·∏_{l>k} d_l, so particle 1 is the most significant digit and a ket
//! string such as |000111⟩ reads left to right. Particle indices are 0-based
//! inside the crate; [`SubsystemSet`] converts at the 1-based user boundary.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, kron_limited, sym_eigen, sym_eigenvalues, ComplexMatrix, RankTolerance, DEFAULT_MAX_DIM, ONE, ZERO,
};

/// Tolerance for the structural invariants of states (norm, trace, PSD).
pub const STATE_TOL: f64 = 1e-9;

/// Local Hilbert-space dimensions of the particles, in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimVector(Vec<usize>);

impl DimVector {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_limit(dims, DEFAULT_MAX_DIM)
    }

    pub fn with_limit(dims: Vec<usize>, max_dim: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidValue("at least one particle is required".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidValue(format!("local dimension must be ≥ 2, got {d}")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.checked_mul(d).filter(|&t| t <= max_dim).ok_or(Error::SizeLimit {
                what: "joint dimension",
                size: dims.iter().fold(1usize, |a, &d| a.saturating_mul(d)),
                max: max_dim,
            })?;
        }
        Ok(Self(dims))
    }

    /// Number of particles N.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Joint dimension ∏ dᵢ.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Joint dimension of the given particles.
    pub fn subsystem_dim(&self, particles: &[usize]) -> usize {
        particles.iter().map(|&p| self.0[p]).product()
    }

    pub fn select(&self, particles: &[usize]) -> DimVector {
        DimVector(particles.iter().map(|&p| self.0[p]).collect())
    }

    pub fn concat(&self, other: &DimVector, max_dim: usize) -> Result<DimVector> {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        DimVector::with_limit(dims, max_dim)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.0[k + 1];
        }
        strides
    }

    /// Global-index offsets of every basis state of `particles`, enumerated
    /// with the first listed particle as the most significant digit.
    pub(crate) fn offsets(&self, particles: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &p in particles {
            let mut next = Vec::with_capacity(out.len() * self.0[p]);
            for &o in &out {
                for digit in 0..self.0[p] {
                    next.push(o + digit * strides[p]);
                }
            }
            out = next;
        }
        out
    }

    /// Decomposes a joint index into per-particle digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.0.len()];
        for k in (0..self.0.len()).rev() {
            digits[k] = index % self.0[k];
            index /= self.0[k];
        }
        digits
    }

    /// Joint index of per-particle digits, or `None` if any digit is out of range.
    pub fn index_of(&self, digits: &[usize]) -> Option<usize> {
        if digits.len() != self.0.len() {
            return None;
        }
        let mut index = 0;
        for (&digit, &d) in digits.iter().zip(&self.0) {
            if digit >= d {
                return None;
            }
            index = index * d + digit;
        }
        Some(index)
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A set of particles, stored sorted and 0-based.
///
/// Sets order by size first, then lexicographically, which is the order the
/// rank lattice and the factorization enumerate them in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemSet(Vec<usize>);

impl SubsystemSet {
    /// From 0-based indices; `n` is the particle count.
    pub fn from_zero_based(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::Index { index: bad + 1, n });
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidValue("repeated particle index".into()));
        }
        Ok(Self(indices))
    }

    /// From user-facing 1-based indices.
    pub fn from_one_based(indices: &[usize], n: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::Index { index: bad, n });
        }
        Self::from_zero_based(indices.iter().map(|i| i - 1).collect(), n)
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self(indices)
    }

    pub fn all(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn complement(&self, n: usize) -> Self {
        Self((0..n).filter(|i| !self.contains(*i)).collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut v: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.0.iter().any(|i| other.contains(*i))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.0.iter().all(|i| other.contains(*i))
    }

    /// The set with one element removed.
    pub fn without(&self, i: usize) -> Self {
        Self(self.0.iter().copied().filter(|&j| j != i).collect())
    }
}

impl Ord for SubsystemSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for SubsystemSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsystemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All size-`k` subsets of `pool` in lexicographic order.
pub fn subsets_of_size(pool: &[usize], k: usize) -> Vec<SubsystemSet> {
    let mut out = Vec::new();
    if k > pool.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(SubsystemSet(idx.iter().map(|&i| pool[i]).collect()));
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < pool.len() - k + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Binomial coefficient, saturating on overflow.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn check_nonempty_proper(set: &SubsystemSet, n: usize, what: &str) -> Result<()> {
    if set.is_empty() {
        return Err(Error::DegenerateSubsystem(format!("{what} must be nonempty")));
    }
    if set.len() >= n {
        return Err(Error::DegenerateSubsystem(format!(
            "{what} {set} must leave at least one particle"
        )));
    }
    Ok(())
}

/// Normalized state vector over the joint basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: DimVector,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Requires ‖ψ‖ = 1 within [`STATE_TOL`].
    pub fn new(dims: DimVector, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_amplitudes(&dims, &amplitudes)?;
        let norm = linalg::vec_norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::Normalization(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(dims: DimVector, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_amplitudes(&dims, &amplitudes)?;
        let norm = linalg::vec_norm(&amplitudes);
        if norm == 0.0 {
            return Err(Error::Normalization("zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { dims, amplitudes })
    }

    pub(crate) fn from_parts(dims: DimVector, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(dims.total(), amplitudes.len());
        Self { dims, amplitudes }
    }

    /// The product basis state with the given digits.
    pub fn basis(dims: DimVector, digits: &[usize]) -> Result<Self> {
        let index = dims
            .index_of(digits)
            .ok_or_else(|| Error::InvalidValue(format!("basis digits {digits:?} invalid for dims {dims}")))?;
        let mut amplitudes = vec![ZERO; dims.total()];
        amplitudes[index] = ONE;
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> &DimVector {
        &self.dims
    }

    pub fn num_particles(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.amplitudes)
    }

    /// |self⟩ ⊗ |other⟩ with particles concatenated.
    pub fn tensor(&self, other: &PureState, max_dim: usize) -> Result<PureState> {
        let dims = self.dims.concat(&other.dims, max_dim)?;
        let mut amplitudes = Vec::with_capacity(dims.total());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(PureState { dims, amplitudes })
    }

    /// Coefficient matrix with rows indexed by `rows` and columns by the rest.
    pub(crate) fn coefficient_matrix(&self, rows: &[usize]) -> ComplexMatrix {
        let rest: Vec<usize> = (0..self.dims.len()).filter(|p| !rows.contains(p)).collect();
        let row_off = self.dims.offsets(rows);
        let col_off = self.dims.offsets(&rest);
        let mut data = Vec::with_capacity(row_off.len() * col_off.len());
        for &r in &row_off {
            data.extend(col_off.iter().map(|&c| self.amplitudes[r + c]));
        }
        ComplexMatrix::from_vec_unchecked(row_off.len(), col_off.len(), data)
    }

    /// Reduced density matrix of the kept particles.
    pub fn reduced(&self, keep: &SubsystemSet) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::DegenerateSubsystem("cannot trace out every particle".into()));
        }
        check_in_range(keep, self.dims.len())?;
        let m = self.coefficient_matrix(keep.indices());
        Ok(DensityMatrix::from_parts(
            self.dims.select(keep.indices()),
            row_gram(&m),
        ))
    }

    /// Applies one unitary per particle, U₁ ⊗ … ⊗ U_N.
    pub fn apply_local_unitaries(&self, unitaries: &[ComplexMatrix]) -> Result<PureState> {
        check_local_unitaries(&self.dims, unitaries)?;
        let mut amplitudes = self.amplitudes.clone();
        for (p, u) in unitaries.iter().enumerate() {
            transform_axis(&self.dims, &mut amplitudes, 0, 1, p, u, false);
        }
        Ok(PureState {
            dims: self.dims.clone(),
            amplitudes,
        })
    }

    /// Multiplies by a global phase so the largest-magnitude amplitude
    /// (first one on ties) is real and positive.
    pub fn canonical_phase(mut self) -> Self {
        canonicalize_phase(&mut self.amplitudes);
        self
    }
}

pub(crate) fn canonicalize_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        // ties within rounding go to the earlier index
        let mag = z.norm();
        if mag > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best].conj() / best_mag;
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[best] = Complex64::new(v[best].norm(), 0.0);
    }
}

fn check_amplitudes(dims: &DimVector, amplitudes: &[Complex64]) -> Result<()> {
    if amplitudes.len() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims} need {} amplitudes, got {}",
            dims.total(),
            amplitudes.len()
        )));
    }
    if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidValue("non-finite amplitude".into()));
    }
    Ok(())
}

fn check_in_range(set: &SubsystemSet, n: usize) -> Result<()> {
    match set.indices().last() {
        Some(&last) if last >= n => Err(Error::Index { index: last + 1, n }),
        _ => Ok(()),
    }
}

fn check_local_unitaries(dims: &DimVector, unitaries: &[ComplexMatrix]) -> Result<()> {
    if unitaries.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} unitaries for {} particles",
            unitaries.len(),
            dims.len()
        )));
    }
    for (u, &d) in unitaries.iter().zip(dims.as_slice()) {
        if u.rows() != d || u.cols() != d {
            return Err(Error::Shape(format!(
                "local unitary must be {d}×{d}, got {}×{}",
                u.rows(),
                u.cols()
            )));
        }
    }
    Ok(())
}

/// Applies `u` (or its conjugate) along particle `p` of every length-D
/// vector found at `base + j·step` inside `data`, for each vector start.
fn transform_axis(
    dims: &DimVector,
    data: &mut [Complex64],
    base: usize,
    step: usize,
    p: usize,
    u: &ComplexMatrix,
    conjugate: bool,
) {
    let axis = dims.offsets(&[p]);
    let rest: Vec<usize> = (0..dims.len()).filter(|&q| q != p).collect();
    let d = axis.len();
    let mut buf = vec![ZERO; d];
    for r in dims.offsets(&rest) {
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = data[base + (r + axis[i]) * step];
        }
        for i in 0..d {
            let mut acc = ZERO;
            for (j, &v) in buf.iter().enumerate() {
                let uij = if conjugate { u[(i, j)].conj() } else { u[(i, j)] };
                acc += uij * v;
            }
            data[base + (r + axis[i]) * step] = acc;
        }
    }
}

/// G = M·M†.
pub(crate) fn row_gram(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut g = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        let ra = m.row(a);
        for b in a..n {
            let rb = m.row(b);
            let s: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
            g[(a, b)] = s;
            g[(b, a)] = s.conj();
        }
    }
    g
}

/// Eigenvalues of M·M† or M†·M, whichever is smaller; the nonzero spectra agree.
pub(crate) fn gram_spectrum(m: &ComplexMatrix) -> Vec<f64> {
    let g = if m.rows() <= m.cols() {
        row_gram(m)
    } else {
        row_gram(&m.adjoint())
    };
    sym_eigenvalues(&g)
}

/// Hermitian, positive-semidefinite, unit-trace matrix over a [`DimVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: DimVector,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants at [`STATE_TOL`].
    pub fn new(dims: DimVector, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(dims, matrix, STATE_TOL)
    }

    /// Validates Hermiticity (Frobenius-relative), unit trace and PSD within
    /// `tol`, then stores the symmetrized matrix.
    pub fn with_tolerance(dims: DimVector, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let d = dims.total();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims} need a {d}×{d} matrix, got {}×{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermitian_deviation();
        let allowed = tol * matrix.frobenius_norm();
        if deviation > allowed {
            return Err(Error::Symmetry { deviation, allowed });
        }
        let matrix = matrix.symmetrized();
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Normalization(format!("trace is {tr}, expected 1")));
        }
        let min = sym_eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                allowed: -tol,
            });
        }
        Ok(Self { dims, matrix })
    }

    /// Stores the Hermitian part so that every held matrix is exactly Hermitian.
    pub(crate) fn from_parts(dims: DimVector, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.total(), matrix.rows());
        Self {
            dims,
            matrix: matrix.symmetrized(),
        }
    }

    /// I/D.
    pub fn maximally_mixed(dims: DimVector) -> Self {
        let d = dims.total();
        let matrix = ComplexMatrix::from_real_diagonal(&vec![1.0 / d as f64; d]);
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &DimVector {
        &self.dims
    }

    pub fn num_particles(&self) -> usize {
        self.dims.len()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues in descending order with tiny negatives clipped to zero.
    pub fn spectrum(&self) -> Vec<f64> {
        sym_eigenvalues(&self.matrix).into_iter().map(|v| v.max(0.0)).collect()
    }

    /// U₁ ⊗ … ⊗ U_N · ρ · (U₁ ⊗ … ⊗ U_N)†.
    pub fn apply_local_unitaries(&self, unitaries: &[ComplexMatrix]) -> Result<DensityMatrix> {
        check_local_unitaries(&self.dims, unitaries)?;
        let d = self.dims.total();
        let mut data = self.matrix.clone().into_vec();
        for (p, u) in unitaries.iter().enumerate() {
            // columns: act on the row index
            for col in 0..d {
                transform_axis(&self.dims, &mut data, col, d, p, u, false);
            }
            // rows: act on the column index with the conjugate
            for row in 0..d {
                transform_axis(&self.dims, &mut data, row * d, 1, p, u, true);
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: ComplexMatrix::from_vec_unchecked(d, d, data).symmetrized(),
        })
    }
}

/// Either kind of state, as read from a file or produced by a generator.
#[derive(Debug, Clone)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &DimVector {
        match self {
            State::Pure(psi) => psi.dims(),
            State::Mixed(rho) => rho.dims(),
        }
    }

    pub fn num_particles(&self) -> usize {
        self.dims().len()
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(psi) => {
                DensityMatrix::from_parts(psi.dims.clone(), ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes))
            }
            State::Mixed(rho) => rho.clone(),
        }
    }

    pub fn spectral_factor(&self, tol: RankTolerance) -> SpectralFactor {
        match self {
            State::Pure(psi) => SpectralFactor::from_pure(psi),
            State::Mixed(rho) => SpectralFactor::from_density(rho, tol),
        }
    }

    /// The pure state, recovering it from a rank-1 density matrix if needed.
    pub fn to_pure(&self, tol: RankTolerance) -> Result<PureState> {
        match self {
            State::Pure(psi) => Ok(psi.clone()),
            State::Mixed(rho) => {
                let pairs = sym_eigen(rho.matrix());
                let largest = pairs.first().map_or(0.0, |p| p.0.max(0.0));
                let rank = tol.count_above(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
                if rank != 1 {
                    return Err(Error::UnsupportedInput(format!(
                        "state has rank {rank}; only pure states (rank 1) can be factorized"
                    )));
                }
                debug_assert!(largest > 0.0);
                let (_, v) = pairs.into_iter().next().expect("rank 1 implies an eigenpair");
                PureState::normalized(rho.dims.clone(), v).map(PureState::canonical_phase)
            }
        }
    }
}

/// Weighted pure-state ensemble Σⱼ pⱼ |ψⱼ⟩⟨ψⱼ|.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    terms: Vec<(f64, PureState)>,
}

impl MixtureSpec {
    pub fn new(terms: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidValue("mixture needs at least one term".into()));
        };
        let dims = first.dims().clone();
        for (w, psi) in &terms {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidValue(format!("mixture weight must be positive, got {w}")));
            }
            if psi.dims() != &dims {
                return Err(Error::Shape(format!(
                    "mixture term dims {} differ from {dims}",
                    psi.dims()
                )));
            }
        }
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Normalization(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, PureState)] {
        &self.terms
    }
}

/// Schmidt coefficients (eigenvalues of either reduced matrix) and their count.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtData {
    pub coefficients: Vec<f64>,
    pub schmidt_rank: usize,
}

/// |ψ⟩⟨ψ|.
pub fn density_from_pure(psi: &PureState) -> Result<DensityMatrix> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > STATE_TOL {
        return Err(Error::Normalization(format!("state norm is {norm}, expected 1")));
    }
    Ok(DensityMatrix::from_parts(
        psi.dims.clone(),
        ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes),
    ))
}

/// Convex combination of the mixture's projectors.
pub fn mix(spec: &MixtureSpec) -> DensityMatrix {
    let dims = spec.terms[0].1.dims.clone();
    let d = dims.total();
    let mut data = vec![ZERO; d * d];
    for (w, psi) in &spec.terms {
        for (i, a) in psi.amplitudes.iter().enumerate() {
            let wa = a * *w;
            if wa == ZERO {
                continue;
            }
            for (j, b) in psi.amplitudes.iter().enumerate() {
                data[i * d + j] += wa * b.conj();
            }
        }
    }
    DensityMatrix::from_parts(dims, ComplexMatrix::from_vec_unchecked(d, d, data))
}

/// ρ_a ⊗ ρ_b with particles concatenated.
pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix, max_dim: usize) -> Result<DensityMatrix> {
    let dims = a.dims.concat(&b.dims, max_dim)?;
    let matrix = kron_limited(&a.matrix, &b.matrix, max_dim)?;
    Ok(DensityMatrix::from_parts(dims, matrix))
}

/// Traces out `traced`; survivors keep their original order.
pub fn partial_trace(rho: &DensityMatrix, traced: &SubsystemSet) -> Result<DensityMatrix> {
    let n = rho.num_particles();
    check_in_range(traced, n)?;
    if traced.len() >= n {
        return Err(Error::DegenerateSubsystem("cannot trace out every particle".into()));
    }
    let keep = traced.complement(n);
    let keep_off = rho.dims.offsets(keep.indices());
    let trace_off = rho.dims.offsets(traced.indices());
    let dk = keep_off.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (a, &ka) in keep_off.iter().enumerate() {
        for (b, &kb) in keep_off.iter().enumerate().skip(a) {
            let s: Complex64 = trace_off.iter().map(|&t| rho.matrix[(ka + t, kb + t)]).sum();
            out[(a, b)] = s;
            out[(b, a)] = s.conj();
        }
    }
    Ok(DensityMatrix::from_parts(rho.dims.select(keep.indices()), out))
}

/// Transposes the indices of `part`, leaving the rest alone.
pub fn partial_transpose(rho: &DensityMatrix, part: &SubsystemSet) -> Result<ComplexMatrix> {
    let n = rho.num_particles();
    check_in_range(part, n)?;
    check_nonempty_proper(part, n, "transposed part")?;
    let d = rho.dims.total();
    // split each joint index into its part and rest offsets
    let mut part_of = vec![0usize; d];
    let rest = part.complement(n);
    for &po in &rho.dims.offsets(part.indices()) {
        for &ro in &rho.dims.offsets(rest.indices()) {
            part_of[po + ro] = po;
        }
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        let (ip, ir) = (part_of[i], i - part_of[i]);
        for j in 0..d {
            let (jp, jr) = (part_of[j], j - part_of[j]);
            out[(i, j)] = rho.matrix[(jp + ir, ip + jr)];
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of the partial transpose over `part`.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, part: &SubsystemSet) -> Result<f64> {
    let pt = partial_transpose(rho, part)?;
    Ok(sym_eigenvalues(&pt.symmetrized()).last().copied().unwrap_or(0.0))
}

/// True iff the numerical rank of ρ is 1.
pub fn purity_check(rho: &DensityMatrix, tol: RankTolerance) -> bool {
    tol.count_above(&sym_eigenvalues(&rho.matrix)) == 1
}

/// Schmidt coefficients of ψ across `part` | rest, computed on the smaller side.
pub fn schmidt_rank(psi: &PureState, part: &SubsystemSet, tol: RankTolerance) -> Result<SchmidtData> {
    let n = psi.num_particles();
    check_in_range(part, n)?;
    check_nonempty_proper(part, n, "Schmidt part")?;
    let spectrum = gram_spectrum(&psi.coefficient_matrix(part.indices()));
    let largest = spectrum.first().copied().unwrap_or(0.0).max(0.0);
    let cut = tol.threshold(largest);
    let coefficients: Vec<f64> = spectrum.into_iter().filter(|&v| v > cut).collect();
    Ok(SchmidtData {
        schmidt_rank: coefficients.len(),
        coefficients,
    })
}

/// ρ written as W·W† with one column per retained eigenvector, so reduced
/// ranks can be read off a Gram matrix of the smaller side.
#[derive(Debug, Clone)]
pub struct SpectralFactor {
    dims: DimVector,
    columns: Vec<Vec<Complex64>>,
}

impl SpectralFactor {
    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            dims: psi.dims.clone(),
            columns: vec![psi.amplitudes.clone()],
        }
    }

    /// Keeps eigenvectors whose eigenvalues clear the tolerance, scaled by √λ.
    pub fn from_density(rho: &DensityMatrix, tol: RankTolerance) -> Self {
        let pairs = sym_eigen(&rho.matrix);
        let largest = pairs.first().map_or(0.0, |p| p.0.max(0.0));
        let cut = tol.threshold(largest);
        let columns = pairs
            .into_iter()
            .filter(|(v, _)| *v > cut)
            .map(|(v, vec)| {
                let s = v.sqrt();
                vec.into_iter().map(|z| z * s).collect()
            })
            .collect();
        Self {
            dims: rho.dims.clone(),
            columns,
        }
    }

    pub fn dims(&self) -> &DimVector {
        &self.dims
    }

    /// Numerical rank of the full state.
    pub fn state_rank(&self) -> usize {
        self.columns.len()
    }

    /// Spectrum of the reduced matrix of `keep` (nonzero part only when the
    /// complementary Gram matrix is the smaller one).
    pub fn reduced_spectrum(&self, keep: &[usize]) -> Vec<f64> {
        if self.columns.is_empty() {
            return Vec::new();
        }
        let n = self.dims.len();
        let traced: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
        let keep_off = self.dims.offsets(keep);
        let trace_off = self.dims.offsets(&traced);
        let width = trace_off.len() * self.columns.len();
        let mut data = Vec::with_capacity(keep_off.len() * width);
        for &k in &keep_off {
            for col in &self.columns {
                data.extend(trace_off.iter().map(|&t| col[k + t]));
            }
        }
        gram_spectrum(&ComplexMatrix::from_vec_unchecked(keep_off.len(), width, data))
    }

    /// Numerical rank of the reduced matrix of `keep`.
    pub fn reduced_rank(&self, keep: &[usize], tol: RankTolerance) -> usize {
        if keep.len() == self.dims.len() {
            return self.state_rank();
        }
        tol.count_above(&self.reduced_spectrum(keep))
    }
}
