//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the library's linear algebra: eigenvalues come from
//! cyclic Jacobi rotations on the real embedding, ranks of integer matrices
//! from fraction-free elimination, and reduced matrices from explicit index
//! sums.

#![allow(dead_code)]

use entrank::catalog::{haar_pure_from, stream_rng};
use entrank::{Complex64, ComplexMatrix, DimVector, PureState};
use rand::seq::SliceRandom;
use rand::Rng;

pub const RTOL: f64 = 1e-10;
pub const ATOL: f64 = 1e-12;

/// Eigenvalues of a real symmetric matrix, descending.
pub fn jacobi_symmetric(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Eigenvalues of a Hermitian matrix given as dense rows, descending.
///
/// H = A + iB embeds as the real symmetric [[A, -B], [B, A]], whose spectrum is
/// that of H with every eigenvalue doubled.
pub fn hermitian_eigenvalues_oracle(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[i][j];
            m[i][j] = z.re;
            m[i + n][j + n] = z.re;
            m[i][j + n] = -z.im;
            m[i + n][j] = z.im;
        }
    }
    jacobi_symmetric(m).into_iter().step_by(2).collect()
}

pub fn rows_of(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn count_rank(eigenvalues: &[f64]) -> usize {
    let largest = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cut = ATOL.max(RTOL * largest);
    eigenvalues.iter().filter(|x| x.abs() > cut).count()
}

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn exact_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                m[r][k] = (m[r][k] * m[rank][c] - m[r][c] * m[rank][k]) / prev;
            }
            m[r][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
    }
    rank
}

/// Mixed-radix digits with the first particle most significant.
pub fn digits_of(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub fn index_from(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&g, &d)| acc * d + g)
}

/// Reduced matrix on `keep` (0-based, sorted) by explicit summation over the
/// traced digits.
pub fn reduced_by_sum(rho: &[Vec<Complex64>], dims: &[usize], keep: &[usize]) -> Vec<Vec<Complex64>> {
    let total = rho.len();
    let dk: usize = keep.iter().map(|&p| dims[p]).product();
    let kept_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dk]; dk];
    for i in 0..total {
        let di = digits_of(i, dims);
        for j in 0..total {
            let dj = digits_of(j, dims);
            let traced_equal = (0..dims.len()).filter(|p| !keep.contains(p)).all(|p| di[p] == dj[p]);
            if !traced_equal {
                continue;
            }
            let a = index_from(&keep.iter().map(|&p| di[p]).collect::<Vec<_>>(), &kept_dims);
            let b = index_from(&keep.iter().map(|&p| dj[p]).collect::<Vec<_>>(), &kept_dims);
            out[a][b] += rho[i][j];
        }
    }
    out
}

/// Partial transpose on `part` by swapping the part's row and column digits.
pub fn partial_transpose_by_digits(rho: &[Vec<Complex64>], dims: &[usize], part: &[usize]) -> Vec<Vec<Complex64>> {
    let total = rho.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); total]; total];
    for i in 0..total {
        for j in 0..total {
            let mut di = digits_of(i, dims);
            let mut dj = digits_of(j, dims);
            for &p in part {
                std::mem::swap(&mut di[p], &mut dj[p]);
            }
            out[i][j] = rho[index_from(&di, dims)][index_from(&dj, dims)];
        }
    }
    out
}

pub fn projector(amplitudes: &[Complex64]) -> Vec<Vec<Complex64>> {
    amplitudes
        .iter()
        .map(|a| amplitudes.iter().map(|b| a * b.conj()).collect())
        .collect()
}

/// Kronecker product by four nested loops.
pub fn kron_by_loops(a: &ComplexMatrix, b: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let (p, q, r, s) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); q * s]; p * r];
    for i in 0..p {
        for j in 0..q {
            for k in 0..r {
                for l in 0..s {
                    out[i * r + k][j * s + l] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// A pure state built as a product of Haar blocks placed on shuffled particles.
pub struct BlockProduct {
    pub state: PureState,
    /// Particle sets of the blocks, 0-based and sorted, ordered by smallest member.
    pub blocks: Vec<Vec<usize>>,
}

/// Splits `n` local dimensions into `sizes.len()` blocks on a random particle
/// assignment and fills each block with a Haar state.
pub fn block_product(dims: &[usize], sizes: &[usize], seed: u64) -> BlockProduct {
    let n = dims.len();
    assert_eq!(sizes.iter().sum::<usize>(), n);
    let mut rng = stream_rng(seed, 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut blocks = Vec::new();
    let mut start = 0;
    for &size in sizes {
        let mut members = order[start..start + size].to_vec();
        members.sort_unstable();
        start += size;
        blocks.push(members);
    }
    let states: Vec<PureState> = blocks
        .iter()
        .enumerate()
        .map(|(b, members)| {
            let block_dims = DimVector::new(members.iter().map(|&p| dims[p]).collect()).unwrap();
            haar_pure_from(&mut stream_rng(seed, b as u64 + 1), block_dims)
        })
        .collect();

    let total: usize = dims.iter().product();
    let amplitudes: Vec<Complex64> = (0..total)
        .map(|g| {
            let digits = digits_of(g, dims);
            blocks
                .iter()
                .zip(&states)
                .fold(Complex64::new(1.0, 0.0), |acc, (members, st)| {
                    let local: Vec<usize> = members.iter().map(|&p| digits[p]).collect();
                    let local_dims: Vec<usize> = members.iter().map(|&p| dims[p]).collect();
                    acc * st.amplitudes()[index_from(&local, &local_dims)]
                })
        })
        .collect();
    blocks.sort();
    BlockProduct {
        state: PureState::normalized(DimVector::new(dims.to_vec()).unwrap(), amplitudes).unwrap(),
        blocks,
    }
}

/// Random composition of `n` into between 1 and `max_blocks` positive parts.
pub fn random_sizes<R: Rng>(rng: &mut R, n: usize, max_blocks: usize) -> Vec<usize> {
    let blocks = rng.random_range(1..=max_blocks.min(n));
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(blocks - 1).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::new();
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        sizes.push(c - prev);
        prev = c;
    }
    sizes
}

/// Every nonempty proper subset of `0..n`, as sorted index lists.
pub fn proper_subsets(n: usize) -> Vec<Vec<usize>> {
    (1..(1usize << n) - 1)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}
