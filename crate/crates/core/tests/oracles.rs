//! Library results checked against independent reference computations.

mod common;

use approx::assert_abs_diff_eq;
use common::*;
use entrank::catalog::{
    bell, ghz, haar_pure_from, random_state, stream_rng, werner, RandomKind, RandomSpec, WernerSpec,
};
use entrank::linalg::{hermitian_eigenvalues, kron, numerical_rank, singular_values};
use entrank::state::{density_from_pure, partial_trace, partial_transpose, ppt_min_eigenvalue, SpectralFactor};
use entrank::{Complex64, ComplexMatrix, DimVector, RankTolerance, State, SubsystemSet};
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
    let mut rng = stream_rng(seed, 0);
    let data = (0..rows * cols)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::new(rows, cols, data).unwrap()
}

fn random_hermitian(seed: u64, n: usize) -> ComplexMatrix {
    let a = random_matrix(seed, n, n);
    a.add(&a.adjoint()).unwrap().scale(c(0.5, 0.0))
}

fn max_abs_diff(a: &[Vec<Complex64>], b: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            worst = worst.max((z - b[(i, j)]).norm());
        }
    }
    worst
}

fn assert_spectra_close(a: &[f64], b: &[f64], eps: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert_abs_diff_eq!(x, y, epsilon = eps);
    }
}

#[test]
fn kron_matches_four_loop_definition() {
    for (seed, (p, q, r, s)) in [(1, (2, 3, 2, 2)), (2, (1, 3, 4, 2)), (3, (3, 3, 3, 1))] {
        let a = random_matrix(seed, p, q);
        let b = random_matrix(seed + 100, r, s);
        let k = kron(&a, &b).unwrap();
        assert_eq!((k.rows(), k.cols()), (p * r, q * s));
        assert_eq!(max_abs_diff(&kron_by_loops(&a, &b), &k), 0.0);
    }
}

#[test]
fn eigenvalues_match_jacobi_on_real_embedding() {
    for (seed, n) in [(11, 1), (12, 2), (13, 4), (14, 7), (15, 16)] {
        let h = random_hermitian(seed, n);
        let lib = hermitian_eigenvalues(&h).unwrap();
        let oracle = hermitian_eigenvalues_oracle(&rows_of(&h));
        assert_spectra_close(&lib, &oracle, 1e-9);
        let trace: f64 = (0..n).map(|i| h[(i, i)].re).sum();
        assert_abs_diff_eq!(lib.iter().sum::<f64>(), trace, epsilon = 1e-10);
    }
}

#[test]
fn singular_values_are_roots_of_gram_eigenvalues() {
    for (seed, rows, cols) in [(21, 3, 5), (22, 6, 2), (23, 4, 4)] {
        let a = random_matrix(seed, rows, cols);
        let sv = singular_values(&a);
        let gram = a.adjoint().matmul(&a).unwrap();
        let mut oracle: Vec<f64> = hermitian_eigenvalues_oracle(&rows_of(&gram))
            .into_iter()
            .map(|x| x.max(0.0).sqrt())
            .collect();
        oracle.truncate(rows.min(cols));
        assert_spectra_close(&sv, &oracle, 1e-9);
    }
}

#[test]
fn numerical_rank_matches_exact_integer_rank() {
    // rows r, 2r, r + s, s and an independent row: rank 3
    let r = [c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0), c(1.0, 1.0)];
    let s = [c(0.0, 1.0), c(2.0, 0.0), c(-1.0, 1.0), c(0.0, 0.0)];
    let t = [c(5.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(-2.0, 3.0)];
    let rows: Vec<Vec<Complex64>> = vec![
        r.to_vec(),
        r.iter().map(|z| z * 2.0).collect(),
        r.iter().zip(&s).map(|(a, b)| a + b).collect(),
        s.to_vec(),
        t.to_vec(),
    ];
    let m = ComplexMatrix::from_rows(&rows).unwrap();

    // a complex matrix of rank k has a real embedding of rank 2k
    let n = rows.len();
    let cols = r.len();
    let mut embed = vec![vec![0i128; 2 * cols]; 2 * n];
    for i in 0..n {
        for j in 0..cols {
            let (re, im) = (rows[i][j].re as i128, rows[i][j].im as i128);
            embed[i][j] = re;
            embed[i + n][j + cols] = re;
            embed[i][j + cols] = -im;
            embed[i + n][j] = im;
        }
    }
    let exact = exact_rank(embed) / 2;
    assert_eq!(exact, 3);
    assert_eq!(numerical_rank(&m, RankTolerance::default()), exact);
}

#[test]
fn frobenius_norm_is_direct_sum() {
    let a = random_matrix(31, 3, 4);
    let direct: f64 = a
        .as_slice()
        .iter()
        .map(|z| z.re * z.re + z.im * z.im)
        .sum::<f64>()
        .sqrt();
    assert_abs_diff_eq!(a.frobenius_norm(), direct, epsilon = 1e-15);
}

#[test]
fn partial_trace_matches_index_sum() {
    let cases: Vec<State> = vec![
        State::Pure(bell()),
        State::Pure(ghz(3, 2).unwrap()),
        random_state(&RandomSpec::new(DimVector::new(vec![2, 3, 2]).unwrap(), 41, RandomKind::MixedOfRank(3)).unwrap()),
        random_state(&RandomSpec::new(DimVector::new(vec![3, 2, 2, 2]).unwrap(), 42, RandomKind::HaarPure).unwrap()),
    ];
    for state in cases {
        let rho = state.to_density();
        let dims = rho.dims().as_slice().to_vec();
        let n = dims.len();
        let full = rows_of(rho.matrix());
        for keep in proper_subsets(n) {
            let traced = SubsystemSet::from_zero_based(keep.clone(), n).unwrap().complement(n);
            let lib = partial_trace(&rho, &traced).unwrap();
            let oracle = reduced_by_sum(&full, &dims, &keep);
            assert!(max_abs_diff(&oracle, lib.matrix()) < 1e-14, "keep {keep:?}");
        }
    }
}

#[test]
fn bell_and_ghz_marginals_are_maximally_mixed() {
    let bell_rho = density_from_pure(&bell()).unwrap();
    let a = reduced_by_sum(&rows_of(bell_rho.matrix()), &[2, 2], &[0]);
    assert_abs_diff_eq!(a[0][0].re, 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(a[0][1].norm(), 0.0, epsilon = 1e-15);

    let g = density_from_pure(&ghz(3, 2).unwrap()).unwrap();
    let ab = reduced_by_sum(&rows_of(g.matrix()), &[2, 2, 2], &[0, 1]);
    for (i, expected) in [0.5, 0.0, 0.0, 0.5].into_iter().enumerate() {
        assert_abs_diff_eq!(ab[i][i].re, expected, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(ab[0][3].norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn reduced_ranks_from_spectral_factor_match_oracle() {
    for (seed, dims, kind) in [
        (51, vec![2, 2, 2], RandomKind::MixedOfRank(2)),
        (52, vec![3, 3], RandomKind::MixedOfRank(2)),
        (53, vec![2, 3, 2], RandomKind::HaarPure),
        (54, vec![2, 2, 2, 2], RandomKind::ProductPure),
    ] {
        let state = random_state(&RandomSpec::new(DimVector::new(dims.clone()).unwrap(), seed, kind).unwrap());
        let tol = RankTolerance::default();
        let factor = state.spectral_factor(tol);
        let full = rows_of(state.to_density().matrix());
        assert_eq!(factor.state_rank(), count_rank(&hermitian_eigenvalues_oracle(&full)));
        for keep in proper_subsets(dims.len()) {
            let oracle = count_rank(&hermitian_eigenvalues_oracle(&reduced_by_sum(&full, &dims, &keep)));
            assert_eq!(factor.reduced_rank(&keep, tol), oracle, "seed {seed} keep {keep:?}");
        }
    }
}

#[test]
fn partial_transpose_matches_digit_swap() {
    let state =
        random_state(&RandomSpec::new(DimVector::new(vec![2, 3, 2]).unwrap(), 61, RandomKind::MixedOfRank(4)).unwrap());
    let rho = state.to_density();
    let dims = [2, 3, 2];
    let full = rows_of(rho.matrix());
    for part in proper_subsets(3) {
        let set = SubsystemSet::from_zero_based(part.clone(), 3).unwrap();
        let oracle = partial_transpose_by_digits(&full, &dims, &part);
        assert!(max_abs_diff(&oracle, &partial_transpose(&rho, &set).unwrap()) < 1e-15);
        let min = hermitian_eigenvalues_oracle(&oracle).last().copied().unwrap();
        assert_abs_diff_eq!(ppt_min_eigenvalue(&rho, &set).unwrap(), min, epsilon = 1e-9);
    }
}

#[test]
fn werner_spectrum_and_partial_transpose_oracle() {
    for p in [0.0, 0.2, 1.0 / 3.0, 0.6, 1.0] {
        let rho = werner(WernerSpec::new(p).unwrap());
        let full = rows_of(rho.matrix());
        let ev = hermitian_eigenvalues_oracle(&full);
        assert_spectra_close(
            &ev,
            &[(1.0 + 3.0 * p) / 4.0, (1.0 - p) / 4.0, (1.0 - p) / 4.0, (1.0 - p) / 4.0],
            1e-12,
        );
        let pt = hermitian_eigenvalues_oracle(&partial_transpose_by_digits(&full, &[2, 2], &[0]));
        assert_abs_diff_eq!(*pt.last().unwrap(), (1.0 - 3.0 * p) / 4.0, epsilon = 1e-12);
    }
}

#[test]
fn haar_states_are_normalized_and_spread() {
    let dims = DimVector::new(vec![2, 2, 2]).unwrap();
    let psi = haar_pure_from(&mut stream_rng(71, 0), dims.clone());
    assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
    let factor = SpectralFactor::from_pure(&psi);
    for p in 0..3 {
        assert_eq!(factor.reduced_rank(&[p], RankTolerance::default()), 2);
    }
}
