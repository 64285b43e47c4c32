//! Named benchmark states and seeded random states.
//!
//! # Random streams
//!
//! Every random constructor draws from `ChaCha20Rng::seed_from_u64(seed)`
//! with an explicit stream number, so results are reproducible bit for bit:
//!
//! * `haar_pure` uses stream 0;
//! * `product_pure` draws particle k (0-based) from stream k + 1;
//! * `mixed_of_rank_r` draws mixing weights from stream 0 and the Haar vector
//!   of term j (0-based) from stream j + 1;
//! * local unitaries for particle k come from stream k + 1.
//!
//! Ensembles derive one seed per member with [`derive_seed`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DEFAULT_MAX_DIM, ONE, ZERO};
use crate::state::{mix, DensityMatrix, DimVector, MixtureSpec, PureState, State};

/// Werner state parameterised by the weight of |Φ⁺⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerSpec {
    p: f64,
}

impl WernerSpec {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidValue(format!(
                "Werner weight must lie in [0, 1], got {p}"
            )));
        }
        Ok(Self { p })
    }

    /// Builds the spec from a fidelity F ∈ [1/4, 1].
    pub fn from_fidelity(f: f64) -> Result<Self> {
        if !(0.25..=1.0).contains(&f) {
            return Err(Error::InvalidValue(format!(
                "Werner fidelity must lie in [1/4, 1], got {f}"
            )));
        }
        Self::new(((4.0 * f - 1.0) / 3.0).clamp(0.0, 1.0))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Overlap with |Φ⁺⟩: F = (3p + 1)/4.
    pub fn fidelity(&self) -> f64 {
        (3.0 * self.p + 1.0) / 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    HaarPure,
    ProductPure,
    MixedOfRank(usize),
}

#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub dims: DimVector,
    pub seed: u64,
    pub kind: RandomKind,
}

impl RandomSpec {
    pub fn new(dims: DimVector, seed: u64, kind: RandomKind) -> Result<Self> {
        if let RandomKind::MixedOfRank(r) = kind {
            if r == 0 || r > dims.total() {
                return Err(Error::InvalidValue(format!(
                    "mixture rank must lie in 1..={}, got {r}",
                    dims.total()
                )));
            }
        }
        Ok(Self { dims, seed, kind })
    }
}

/// Generator for `seed` positioned on `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 of `seed + index`; used to give ensemble members their own seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_vector<R: Rng>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn haar_vector<R: Rng>(rng: &mut R, len: usize) -> Vec<Complex64> {
    loop {
        let mut v = gaussian_vector(rng, len);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|z| *z /= norm);
            return v;
        }
    }
}

/// (1/√d) Σ_k |k…k⟩ on `n` particles of dimension `d`.
pub fn ghz(n: usize, d: usize) -> Result<PureState> {
    ghz_with_limit(n, d, DEFAULT_MAX_DIM)
}

pub fn ghz_with_limit(n: usize, d: usize, max_dim: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidValue(format!("GHZ needs n ≥ 2, got {n}")));
    }
    let dims = DimVector::with_limit(vec![d; n], max_dim)?;
    let mut amplitudes = vec![ZERO; dims.total()];
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for k in 0..d {
        let idx = dims.index_of(&vec![k; n]).expect("digits in range");
        amplitudes[idx] = a;
    }
    Ok(PureState::from_parts(dims, amplitudes))
}

/// (|00⟩ + |11⟩)/√2.
pub fn bell() -> PureState {
    let dims = DimVector::new(vec![2, 2]).expect("valid dims");
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    PureState::from_parts(dims, vec![h, ZERO, ZERO, h])
}

/// Equal superposition of the `n` single-excitation qubit kets.
pub fn w(n: usize) -> Result<PureState> {
    w_with_limit(n, DEFAULT_MAX_DIM)
}

pub fn w_with_limit(n: usize, max_dim: usize) -> Result<PureState> {
    if n < 3 {
        return Err(Error::InvalidValue(format!("W state needs n ≥ 3, got {n}")));
    }
    let dims = DimVector::with_limit(vec![2; n], max_dim)?;
    let mut amplitudes = vec![ZERO; dims.total()];
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amplitudes[1 << (n - 1 - k)] = a;
    }
    Ok(PureState::from_parts(dims, amplitudes))
}

/// p·|Φ⁺⟩⟨Φ⁺| + (1 − p)·I/4.
pub fn werner(spec: WernerSpec) -> DensityMatrix {
    let p = spec.p;
    let mut m = ComplexMatrix::from_real_diagonal(&[(1.0 - p) / 4.0; 4]);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] += Complex64::new(p / 2.0, 0.0);
    }
    DensityMatrix::from_parts(DimVector::new(vec![2, 2]).expect("valid dims"), m)
}

/// ½(|000000⟩ + |000111⟩ + |011000⟩ + |011111⟩).
pub fn six_qubit_example() -> PureState {
    let dims = DimVector::new(vec![2; 6]).expect("valid dims");
    let mut amplitudes = vec![ZERO; 64];
    for ket in [0b000000, 0b000111, 0b011000, 0b011111] {
        amplitudes[ket] = Complex64::new(0.5, 0.0);
    }
    PureState::from_parts(dims, amplitudes)
}

/// ½(|Φ₃⟩⟨Φ₃| + |Φ₃′⟩⟨Φ₃′|) on two qutrits, where |Φ₃⟩ = (|00⟩+|11⟩+|22⟩)/√3
/// and |Φ₃′⟩ carries phases 1, ω, ω² with ω = e^{2πi/3}.
pub fn qutrit_phase_mixture() -> DensityMatrix {
    mix(&qutrit_phase_mixture_spec())
}

/// The ensemble behind [`qutrit_phase_mixture`].
pub fn qutrit_phase_mixture_spec() -> MixtureSpec {
    let dims = DimVector::new(vec![3, 3]).expect("valid dims");
    let s = 1.0 / 3f64.sqrt();
    let mut phi = vec![ZERO; 9];
    let mut phi_w = vec![ZERO; 9];
    for k in 0..3 {
        phi[4 * k] = Complex64::new(s, 0.0);
        phi_w[4 * k] = Complex64::from_polar(s, 2.0 * PI * k as f64 / 3.0);
    }
    MixtureSpec::new(vec![
        (0.5, PureState::from_parts(dims.clone(), phi)),
        (0.5, PureState::from_parts(dims, phi_w)),
    ])
    .expect("valid mixture")
}

/// Seeded random state; see the module docs for the stream layout.
pub fn random_state(spec: &RandomSpec) -> State {
    let dims = spec.dims.clone();
    match spec.kind {
        RandomKind::HaarPure => {
            let mut rng = stream_rng(spec.seed, 0);
            State::Pure(PureState::from_parts(dims.clone(), haar_vector(&mut rng, dims.total())))
        }
        RandomKind::ProductPure => State::Pure(random_product_pure(&dims, spec.seed)),
        RandomKind::MixedOfRank(r) => {
            let mut weight_rng = stream_rng(spec.seed, 0);
            let raw: Vec<f64> = (0..r).map(|_| 1.0 - weight_rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let terms = raw
                .iter()
                .enumerate()
                .map(|(j, w)| {
                    let mut rng = stream_rng(spec.seed, j as u64 + 1);
                    (
                        w / total,
                        PureState::from_parts(dims.clone(), haar_vector(&mut rng, dims.total())),
                    )
                })
                .collect();
            State::Mixed(mix_unchecked(terms))
        }
    }
}

fn mix_unchecked(terms: Vec<(f64, PureState)>) -> DensityMatrix {
    // weights are normalized by construction but may miss 1 by an ulp or two
    let total: f64 = terms.iter().map(|t| t.0).sum();
    let terms = terms.into_iter().map(|(w, psi)| (w / total, psi)).collect();
    mix(&MixtureSpec::new(terms).expect("weights normalized"))
}

/// Tensor product of independent Haar single-particle states.
pub fn random_product_pure(dims: &DimVector, seed: u64) -> PureState {
    let mut amplitudes = vec![ONE];
    for (k, &d) in dims.as_slice().iter().enumerate() {
        let mut rng = stream_rng(seed, k as u64 + 1);
        let local = haar_vector(&mut rng, d);
        amplitudes = amplitudes
            .iter()
            .flat_map(|a| local.iter().map(move |b| a * b))
            .collect();
    }
    PureState::from_parts(dims.clone(), amplitudes)
}

/// Mixture of `terms` random product pure states with random weights.
///
/// Weights come from stream 0 of `seed`; term j is
/// `random_product_pure(dims, derive_seed(seed, j))`.
pub fn random_product_mixture(dims: &DimVector, terms: usize, seed: u64) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::InvalidValue("a mixture needs at least one term".into()));
    }
    let mut weight_rng = stream_rng(seed, 0);
    let raw: Vec<f64> = (0..terms).map(|_| 1.0 - weight_rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let terms = raw
        .iter()
        .enumerate()
        .map(|(j, w)| (w / total, random_product_pure(dims, derive_seed(seed, j as u64))))
        .collect();
    Ok(mix_unchecked(terms))
}

/// Haar-random d×d unitary (QR of a complex Ginibre matrix, R with positive diagonal).
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = gaussian_vector(rng, d);
        for q in &cols {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(q) {
                *x -= proj * a;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|z| *z /= norm);
            cols.push(v);
        }
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// One Haar unitary per particle; particle k uses stream k + 1.
pub fn random_local_unitaries(dims: &DimVector, seed: u64) -> Vec<ComplexMatrix> {
    dims.as_slice()
        .iter()
        .enumerate()
        .map(|(k, &d)| random_unitary(&mut stream_rng(seed, k as u64 + 1), d))
        .collect()
}

/// Haar-random pure state on `dims`, drawn from `rng`.
pub fn haar_pure_from<R: Rng>(rng: &mut R, dims: DimVector) -> PureState {
    let v = haar_vector(rng, dims.total());
    PureState::from_parts(dims, v)
}
