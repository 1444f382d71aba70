//! Exact integer and rational matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntegerMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn from_columns(cols: Vec<Vec<BigInt>>) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        self.require_square()?;
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Coefficients of `det(xI - M)`, constant term first, computed without
    /// division (Berkowitz).
    pub fn charpoly(&self) -> Result<Vec<BigInt>> {
        self.require_square()?;
        let n = self.rows;
        // Coefficients from the leading term down.
        let mut p: Vec<BigInt> = vec![BigInt::one()];
        for k in 0..n {
            // Leading (k+1)x(k+1) block: A = top-left k x k, R = row k, C = column k.
            let akk = self.get(k, k).clone();
            let mut col: Vec<BigInt> = (0..k).map(|i| self.get(i, k).clone()).collect();
            let mut toeplitz = Vec::with_capacity(k + 2);
            toeplitz.push(BigInt::one());
            toeplitz.push(-akk);
            for _ in 0..k {
                let rc: BigInt = (0..k).map(|j| self.get(k, j) * &col[j]).sum();
                toeplitz.push(-rc);
                col = (0..k)
                    .map(|i| (0..k).map(|j| self.get(i, j) * &col[j]).sum())
                    .collect();
            }
            let mut next = vec![BigInt::zero(); k + 2];
            for (i, t) in toeplitz.iter().enumerate() {
                for (j, c) in p.iter().enumerate() {
                    if i + j < k + 2 {
                        next[i + j] += t * c;
                    }
                }
            }
            p = next;
        }
        p.reverse();
        Ok(p)
    }

    /// Nonzero elementary divisors (Smith normal form diagonal), ascending.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        let mut a = self.to_rows();
        let (m, n) = (self.rows, self.cols);
        let mut divisors = Vec::new();
        let mut t = 0;
        while t < m.min(n) {
            // Smallest nonzero entry of the remaining block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..n {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = &q * &row[t];
                    row[j] -= v;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // The pivot must divide the rest of the block.
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            if let Some(i) = bad {
                for j in t..n {
                    let v = a[i][j].clone();
                    a[t][j] += v;
                }
                continue;
            }
            divisors.push(a[t][t].abs());
            t += 1;
        }
        divisors.sort();
        divisors
    }

    pub fn rank(&self) -> usize {
        self.elementary_divisors().len()
    }

    /// Second exterior power on the basis `e_i ^ e_j`, `i < j`, in
    /// lexicographic order.
    pub fn exterior_square(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut out = Self::zeros(pairs.len(), pairs.len());
        for (r, &(i, j)) in pairs.iter().enumerate() {
            for (c, &(k, l)) in pairs.iter().enumerate() {
                let v = self.get(i, k) * self.get(j, l) - self.get(i, l) * self.get(j, k);
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// Symmetric square on monomials `e_i e_j`, `i <= j`; its eigenvalues are
    /// the products `lambda_i lambda_j`.
    pub fn symmetric_square(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let index = |a: usize, b: usize| {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            pairs.iter().position(|&p| p == (a, b)).unwrap()
        };
        let mut out = Self::zeros(pairs.len(), pairs.len());
        // Column (k,l) is the image of e_k e_l = M e_k * M e_l.
        for (c, &(k, l)) in pairs.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let v = self.get(i, k) * self.get(j, l);
                    if v.is_zero() {
                        continue;
                    }
                    let r = index(i, j);
                    out.data[r * pairs.len() + c] += v;
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Integer row echelon form (Hermite style, positive pivots); zero rows dropped.
pub fn integer_echelon(rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return rows;
    };
    let mut a: Vec<Vec<BigInt>> = rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let mut out = Vec::new();
    for col in 0..width {
        loop {
            let nz: Vec<usize> = (0..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][col].abs()).unwrap();
            let mut done = true;
            for &i in &nz {
                if i == p {
                    continue;
                }
                let q = a[i][col].div_floor(&a[p][col]);
                let (src, dst) = if i < p {
                    let (l, r) = a.split_at_mut(p);
                    (&r[0], &mut l[i])
                } else {
                    let (l, r) = a.split_at_mut(i);
                    (&l[p], &mut r[0])
                };
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= &q * s;
                }
                if !dst[col].is_zero() {
                    done = false;
                }
            }
            if done {
                let mut row = a.swap_remove(p);
                if row[col].is_negative() {
                    row.iter_mut().for_each(|x| *x = -x.clone());
                }
                out.push(row);
                a.retain(|r| r.iter().any(|x| !x.is_zero()));
                break;
            }
        }
    }
    out
}

pub fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Reduced row echelon form over Q; returns the nonzero rows and pivot columns.
pub fn rational_rref(mut rows: Vec<Vec<BigRational>>) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        rows[r].iter_mut().for_each(|x| *x *= &inv);
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Basis of `{x : A x = 0}` for `A` given by its rows over `width` columns.
pub fn rational_kernel(rows: Vec<Vec<BigRational>>, width: usize) -> Vec<Vec<BigRational>> {
    let (rref, pivots) = rational_rref(rows);
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); width];
            v[f] = BigRational::one();
            for (row, &p) in rref.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(IntegerMatrix::from_i64(&[&[1, 1], &[1, 0]]).det().unwrap(), BigInt::from(-1));
        assert_eq!(IntegerMatrix::from_i64(&[&[2, 0], &[0, 1]]).det().unwrap(), BigInt::from(2));
        let m = IntegerMatrix::from_i64(&[&[0, 2, 1], &[3, 1, 4], &[1, 5, 9]]);
        // Cofactor expansion: 0*(9-20) - 2*(27-4) + 1*(15-1) = -32.
        assert_eq!(m.det().unwrap(), BigInt::from(-32));
        assert!(IntegerMatrix::from_i64(&[&[1, 2, 3]]).det().is_err());
    }

    #[test]
    fn characteristic_polynomials() {
        let fib = IntegerMatrix::from_i64(&[&[1, 1], &[1, 0]]);
        assert_eq!(fib.charpoly().unwrap(), big(&[-1, -1, 1]));
        let rot = IntegerMatrix::from_i64(&[&[0, -1], &[1, -1]]);
        assert_eq!(rot.charpoly().unwrap(), big(&[1, 1, 1]));
        let m = IntegerMatrix::from_i64(&[&[0, 2, 1], &[3, 1, 4], &[1, 5, 9]]);
        let p = m.charpoly().unwrap();
        // Constant term is (-1)^n det, x^{n-1} coefficient is -trace.
        assert_eq!(p[0], BigInt::from(32));
        assert_eq!(p[2], BigInt::from(-10));
        assert_eq!(p[3], BigInt::one());
    }

    #[test]
    fn smith_divisors() {
        let m = IntegerMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(m.elementary_divisors(), big(&[2, 6, 12]));
        let z = IntegerMatrix::from_i64(&[&[0, 0], &[0, 0]]);
        assert!(z.elementary_divisors().is_empty());
        assert_eq!(IntegerMatrix::from_i64(&[&[1, 1], &[1, 1]]).rank(), 1);
    }

    #[test]
    fn echelon_and_kernel() {
        let e = integer_echelon(vec![big(&[4, 6]), big(&[6, 9]), big(&[2, 5])]);
        // Row lattice has determinant gcd(8, 12) = 4.
        assert_eq!(e, vec![big(&[2, 5]), big(&[0, 2])]);
        let k = rational_kernel(vec![to_rational(&big(&[1, 1, 0]))], 3);
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn exterior_square_of_fib_is_its_determinant() {
        let fib = IntegerMatrix::from_i64(&[&[1, 1], &[1, 0]]);
        assert_eq!(fib.exterior_square().unwrap(), IntegerMatrix::from_i64(&[&[-1]]));
    }
}
