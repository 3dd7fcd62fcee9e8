//! Small dense kernels: exact integer rank and a rank-revealing Cholesky
//! factorization for (possibly singular) normal equations.

/// Rank over the rationals of an integer matrix given as `(row, col, value)` triplets.
///
/// Fraction-free elimination; each reduced row is divided by the gcd of its
/// entries, which keeps boundary-matrix entries small. If an intermediate ever
/// overflows `i128` the rank is recomputed modulo the prime `2^61 - 1`.
pub fn integer_rank(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut dense = vec![vec![0i128; cols]; rows];
    for &(r, c, v) in entries {
        dense[r][c] += v as i128;
    }
    match fraction_free_rank(dense) {
        Some(rank) => rank,
        None => modular_rank(rows, cols, entries),
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn fraction_free_rank(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank];
        let a = prow[col];
        for row in tail.iter_mut() {
            let b = row[col];
            if b == 0 {
                continue;
            }
            let mut g = 0i128;
            for c in col..cols {
                let lhs = row[c].checked_mul(a)?;
                let rhs = prow[c].checked_mul(b)?;
                row[c] = lhs.checked_sub(rhs)?;
                g = gcd(g, row[c]);
            }
            if g > 1 {
                for x in row[col..].iter_mut() {
                    *x /= g;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

fn modular_rank(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> usize {
    const P: u128 = (1 << 61) - 1;
    let reduce = |v: i64| -> u128 { (v as i128).rem_euclid(P as i128) as u128 };
    let pow = |mut b: u128, mut e: u128| -> u128 {
        let mut acc = 1u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        acc
    };
    let mut m = vec![vec![0u128; cols]; rows];
    for &(r, c, v) in entries {
        m[r][c] = (m[r][c] + reduce(v)) % P;
    }
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = pow(m[rank][col], P - 2);
        let prow = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[col] == 0 {
                continue;
            }
            let f = row[col] * inv % P;
            for c in col..cols {
                row[c] = (row[c] + P - f * prow[c] % P) % P;
            }
        }
        rank += 1;
    }
    rank
}

/// Symmetric positive semidefinite factorization `P^T A P = L L^T` with
/// diagonal pivoting, truncated at the numerical rank.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    n: usize,
    rank: usize,
    perm: Vec<usize>,
    // Row-major n x n; the factor lives in the lower triangle of the leading rank columns.
    lower: Vec<f64>,
}

impl PivotedCholesky {
    /// Factors the symmetric matrix `a` (row-major, `n x n`). Pivots whose
    /// remaining diagonal falls below `rel_tol * max(diag(a))` end the factorization.
    pub fn factor(mut a: Vec<f64>, n: usize, rel_tol: f64) -> Self {
        assert_eq!(a.len(), n * n);
        let max_diag = (0..n).map(|i| a[i * n + i]).fold(0.0f64, f64::max);
        let threshold = rel_tol * max_diag;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut column = vec![0.0; n];
        let mut rank = 0;
        for k in 0..n {
            let (j, best) =
                (k..n)
                    .map(|i| (i, a[i * n + i]))
                    .fold((k, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best.is_nan() || best <= threshold {
                break;
            }
            if j != k {
                swap_symmetric(&mut a, n, k, j);
                perm.swap(k, j);
            }
            let pivot = a[k * n + k].sqrt();
            a[k * n + k] = pivot;
            for i in (k + 1)..n {
                a[i * n + k] /= pivot;
                column[i] = a[i * n + k];
            }
            for i in (k + 1)..n {
                let lik = column[i];
                if lik == 0.0 {
                    continue;
                }
                let row = &mut a[i * n..i * n + i + 1];
                for (l, x) in row.iter_mut().enumerate().skip(k + 1) {
                    *x -= lik * column[l];
                }
            }
            rank += 1;
        }
        Self { n, rank, perm, lower: a }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Basic solution of `A x = b`: unknowns beyond the numerical rank are set to zero.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let r = self.rank;
        let mut y: Vec<f64> = (0..r).map(|i| b[self.perm[i]]).collect();
        for i in 0..r {
            let s: f64 = (0..i).map(|j| self.lower[i * n + j] * y[j]).sum();
            y[i] = (y[i] - s) / self.lower[i * n + i];
        }
        for i in (0..r).rev() {
            let s: f64 = ((i + 1)..r).map(|j| self.lower[j * n + i] * y[j]).sum();
            y[i] = (y[i] - s) / self.lower[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in 0..r {
            x[self.perm[i]] = y[i];
        }
        x
    }
}

// Swaps rows/columns k < j of a symmetric matrix, touching only the lower triangle
// and the not-yet-factored trailing block.
fn swap_symmetric(a: &mut [f64], n: usize, k: usize, j: usize) {
    for c in 0..k {
        a.swap(k * n + c, j * n + c);
    }
    a.swap(k * n + k, j * n + j);
    for i in (k + 1)..j {
        a.swap(i * n + k, j * n + i);
    }
    for i in (j + 1)..n {
        a.swap(i * n + k, i * n + j);
    }
}
