//! Small exact linear algebra helpers over the integers and rationals:
//! rank, inverse, and the column-style Hermite normal form used for
//! fundamental parallelepiped enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Euclid, One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

pub fn rat_is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Rank of an integer matrix via fraction-free Gaussian elimination.
pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < nrows && col < ncols {
        let pivot = (rank..nrows).find(|&i| !m[i][col].is_zero());
        let Some(p) = pivot else {
            col += 1;
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..nrows {
            if m[i][col].is_zero() {
                continue;
            }
            let a = m[rank][col].clone();
            let b = m[i][col].clone();
            for j in col..ncols {
                let v = &m[i][j] * &a - &m[rank][j] * &b;
                m[i][j] = v;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Inverse of a square rational matrix; `None` when singular.
pub fn invert(matrix: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<Rat>> = matrix.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..n {
                let av = &a[col][j] * &f;
                a[i][j] -= av;
                let iv = &inv[col][j] * &f;
                inv[i][j] -= iv;
            }
        }
    }
    Some(inv)
}

/// Matrix-vector product over the rationals.
pub fn mat_vec(m: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn to_rat_matrix(rows: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| rat(x)).collect())
        .collect()
}

/// Integer dot product.
pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divides out the gcd of the entries, keeping the direction.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let mut g: i64 = 0;
    for &x in v {
        g = gcd_i64(g, x.abs());
    }
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|&x| x / g).collect()
}

pub fn gcd_i64(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Column-style Hermite normal form: returns a lower-triangular matrix `H`
/// with positive diagonal whose column lattice equals that of `m` (columns
/// as generators). Requires `m` square and nonsingular.
pub fn column_hnf(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    // Work with columns; h[j] is the j-th column.
    let mut cols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| BigInt::from(m[i][j])).collect())
        .collect();
    for row in 0..n {
        // Clear row entries to the right of the pivot column by gcd steps.
        for j in row + 1..n {
            while !cols[j][row].is_zero() {
                if cols[row][row].is_zero() {
                    cols.swap(row, j);
                    continue;
                }
                let q = &cols[j][row] / &cols[row][row];
                if q.is_zero() {
                    cols.swap(row, j);
                    continue;
                }
                for i in 0..n {
                    let sub = &cols[row][i] * &q;
                    cols[j][i] -= sub;
                }
            }
        }
        if cols[row][row].is_negative() {
            for i in 0..n {
                let v = -cols[row][i].clone();
                cols[row][i] = v;
            }
        }
        assert!(
            !cols[row][row].is_zero(),
            "column_hnf requires a nonsingular matrix"
        );
        // Reduce earlier columns against the pivot so entries stay small.
        for j in 0..row {
            let q = cols[j][row].div_euclid(&cols[row][row]);
            if !q.is_zero() {
                for i in 0..n {
                    let sub = &cols[row][i] * &q;
                    cols[j][i] -= sub;
                }
            }
        }
    }
    // Transpose back into row-major H with column j = cols[j].
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect()
}
