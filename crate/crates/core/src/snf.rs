//! Integer matrix utilities: Smith normal form with transforms, ranks and
//! exact rational solves. Matrices are row-major `Vec<Vec<i64>>`.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type IMat = Vec<Vec<i64>>;

/// `u * a * v = diag`, with `u`, `v` unimodular and `uinv = u^-1`.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonzero elementary divisors, each dividing the next.
    pub divisors: Vec<i64>,
    pub u: IMat,
    pub uinv: IMat,
    pub v: IMat,
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn transpose(m: &IMat, rows: usize, cols: usize) -> IMat {
    (0..cols).map(|j| (0..rows).map(|i| m[i][j]).collect()).collect()
}

pub fn mat_mul(a: &IMat, b: &IMat, inner: usize, cols: usize) -> IMat {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IMat, v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Smith normal form of an `rows x cols` matrix.
pub fn smith(a: &IMat, rows: usize, cols: usize) -> Smith {
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = to128(&identity(rows));
    let mut uinv: Vec<Vec<i128>> = to128(&identity(rows));
    let mut v: Vec<Vec<i128>> = to128(&identity(cols));
    let mut divisors = Vec::new();

    // Row op: row[i] += k * row[j]; uinv gets the inverse column op.
    let row_add = |m: &mut Vec<Vec<i128>>,
                   u: &mut Vec<Vec<i128>>,
                   uinv: &mut Vec<Vec<i128>>,
                   i: usize,
                   j: usize,
                   k: i128| {
        for c in 0..m[0].len() {
            let t = m[j][c];
            m[i][c] += k * t;
        }
        for c in 0..u[0].len() {
            let t = u[j][c];
            u[i][c] += k * t;
        }
        for r in 0..uinv.len() {
            let t = uinv[r][i];
            uinv[r][j] -= k * t;
        }
    };
    let col_add = |m: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, i: usize, j: usize, k: i128| {
        for row in m.iter_mut() {
            let t = row[j];
            row[i] += k * t;
        }
        for row in v.iter_mut() {
            let t = row[j];
            row[i] += k * t;
        }
    };

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        if pi != t {
            m.swap(pi, t);
            u.swap(pi, t);
            for row in uinv.iter_mut() {
                row.swap(pi, t);
            }
        }
        if pj != t {
            for row in m.iter_mut() {
                row.swap(pj, t);
            }
            for row in v.iter_mut() {
                row.swap(pj, t);
            }
        }
        let mut done = true;
        for i in t + 1..rows {
            let k = m[i][t].div_euclid(m[t][t]);
            if k != 0 {
                row_add(&mut m, &mut u, &mut uinv, i, t, -k);
            }
            if m[i][t] != 0 {
                done = false;
            }
        }
        for j in t + 1..cols {
            let k = m[t][j].div_euclid(m[t][t]);
            if k != 0 {
                col_add(&mut m, &mut v, j, t, -k);
            }
            if m[t][j] != 0 {
                done = false;
            }
        }
        if !done {
            continue;
        }
        // divisibility of the remaining block
        let p = m[t][t];
        let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0));
        if let Some(i) = bad {
            row_add(&mut m, &mut u, &mut uinv, t, i, 1);
            continue;
        }
        if p < 0 {
            for c in 0..cols {
                m[t][c] = -m[t][c];
            }
            for c in 0..rows {
                u[t][c] = -u[t][c];
            }
            for row in uinv.iter_mut() {
                row[t] = -row[t];
            }
        }
        divisors.push(m[t][t] as i64);
        t += 1;
    }
    Smith {
        divisors,
        u: from128(&u),
        uinv: from128(&uinv),
        v: from128(&v),
    }
}

fn to128(m: &IMat) -> Vec<Vec<i128>> {
    m.iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect()
}

fn from128(m: &[Vec<i128>]) -> IMat {
    m.iter()
        .map(|r| r.iter().map(|&x| i64::try_from(x).expect("integer overflow")).collect())
        .collect()
}

pub fn rank(a: &IMat, rows: usize, cols: usize) -> usize {
    smith(a, rows, cols).divisors.len()
}

/// The columns of `a` (an `n x k` matrix) span a rank-`k` saturated
/// sublattice of `Z^n`, i.e. an injective map with free cokernel.
pub fn is_saturated_injection(a: &IMat, n: usize, k: usize) -> bool {
    let s = smith(a, n, k);
    s.divisors.len() == k && s.divisors.iter().all(|&d| d == 1)
}

/// For a saturated injection `a: Z^k -> Z^n`, returns `n - k` column vectors
/// completing the image to a basis of `Z^n`.
pub fn saturated_complement(a: &IMat, n: usize, k: usize) -> Option<Vec<Vec<i64>>> {
    let s = smith(a, n, k);
    if s.divisors.len() != k || s.divisors.iter().any(|&d| d != 1) {
        return None;
    }
    Some((k..n).map(|j| (0..n).map(|i| s.uinv[i][j]).collect()).collect())
}

/// Absolute value of the determinant of a square matrix.
pub fn abs_det(a: &IMat, n: usize) -> i64 {
    let s = smith(a, n, n);
    if s.divisors.len() < n {
        0
    } else {
        s.divisors.iter().product()
    }
}

/// Solves `a x = b` over the rationals for square invertible `a`.
pub fn solve_rational(a: &IMat, b: &[i64]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            row.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .chain(std::iter::once(BigRational::from_integer(bi.into())))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for c in col..=n {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = &m[col][c] * &f;
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Solves `a x = b` for square unimodular-ish `a`, requiring an integral answer.
pub fn solve_integral(a: &IMat, b: &[i64]) -> Option<Vec<i64>> {
    solve_rational(a, b)?
        .into_iter()
        .map(|x| {
            if x.denom().is_one() {
                x.numer().to_i64()
            } else {
                None
            }
        })
        .collect()
}

/// Rank over Q of the given row vectors.
pub fn rank_of_rows(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    rank(&rows.to_vec(), rows.len(), cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_of_diagonal_and_doubled() {
        let a = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(smith(&a, 2, 2).divisors, vec![1, 6]);
        let b = vec![vec![2, 0], vec![0, 2], vec![0, 0]];
        assert_eq!(smith(&b, 3, 2).divisors, vec![2, 2]);
        assert!(!is_saturated_injection(&b, 3, 2));
        let c = vec![vec![1, 0], vec![0, 1], vec![0, 0]];
        assert!(is_saturated_injection(&c, 3, 2));
    }

    #[test]
    fn transforms_are_consistent() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&a, 3, 3);
        assert_eq!(s.divisors, vec![2, 6, 12]);
        let d = mat_mul(&mat_mul(&s.u, &a, 3, 3), &s.v, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { s.divisors[i] } else { 0 };
                assert_eq!(d[i][j], expect);
            }
        }
        assert_eq!(mat_mul(&s.u, &s.uinv, 3, 3), identity(3));
    }

    #[test]
    fn complement_completes_basis() {
        // columns (2,-1,0) and (-1,2,-1)
        let a = vec![vec![2, -1], vec![-1, 2], vec![0, -1]];
        let comp = saturated_complement(&a, 3, 2).unwrap();
        let mut full = a.clone();
        for (i, row) in full.iter_mut().enumerate() {
            row.push(comp[0][i]);
        }
        assert_eq!(abs_det(&full, 3), 1);
    }

    #[test]
    fn rational_solve() {
        let a = vec![vec![2, 1], vec![1, 1]];
        assert_eq!(solve_integral(&a, &[3, 2]).unwrap(), vec![1, 1]);
        let b = vec![vec![2, 0], vec![0, 1]];
        assert!(solve_integral(&b, &[1, 0]).is_none());
    }
}
