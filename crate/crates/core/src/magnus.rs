//! Truncated free associative algebra and the Magnus embedding.
//!
//! `x_i -> 1 + X_i` embeds `F_m / gamma_{c+1}` faithfully into the units of
//! `Z<X_1..X_m> / (degree > c)`. This gives an arithmetic for the free
//! nilpotent group that is independent of any collection procedure; it is
//! used to derive the collection polynomials and as a reference model.

use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::hall::{HallBasis, Structure};
use crate::scalar::{self, Coord};

/// Dense truncated series; index 0 is the empty word.
#[derive(Debug, Clone)]
pub struct MagnusAlgebra {
    letters: usize,
    degree: usize,
    offsets: Vec<usize>,
    powers: Vec<usize>,
    dim: usize,
}

impl MagnusAlgebra {
    pub fn new(letters: usize, degree: usize) -> Self {
        let mut offsets = Vec::with_capacity(degree + 2);
        let mut powers = Vec::with_capacity(degree + 1);
        let mut total = 0;
        let mut p = 1;
        for _ in 0..=degree {
            offsets.push(total);
            powers.push(p);
            total += p;
            p *= letters;
        }
        offsets.push(total);
        MagnusAlgebra {
            letters,
            degree,
            offsets,
            powers,
            dim: total,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree_range(&self, d: usize) -> Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn one<T: Coord>(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim];
        v[0] = T::one();
        v
    }

    /// `1 + X_i`, or its inverse `1 - X_i + X_i^2 - ...` when `inverse` is set.
    pub fn letter<T: Coord>(&self, i: usize, inverse: bool) -> Vec<T> {
        let mut v = self.one();
        let mut idx = 0;
        for d in 1..=self.degree {
            idx = idx * self.letters + i;
            let sign = if inverse && d % 2 == 1 { -T::one() } else { T::one() };
            v[self.offsets[d] + idx] = sign;
            if !inverse {
                break;
            }
        }
        v
    }

    pub fn mul<T: Coord>(&self, a: &[T], b: &[T]) -> Option<Vec<T>> {
        let mut out = vec![T::zero(); self.dim];
        for da in 0..=self.degree {
            for ia in 0..self.powers[da] {
                let x = &a[self.offsets[da] + ia];
                if x.is_zero() {
                    continue;
                }
                for db in 0..=self.degree - da {
                    let base = self.offsets[da + db] + ia * self.powers[db];
                    let bs = &b[self.offsets[db]..self.offsets[db + 1]];
                    for (ib, y) in bs.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let slot = &mut out[base + ib];
                        *slot = scalar::add(slot, &scalar::mul(x, y)?)?;
                    }
                }
            }
        }
        Some(out)
    }

    fn lowest_degree<T: Coord>(&self, y: &[T]) -> usize {
        (1..=self.degree)
            .find(|&d| y[self.degree_range(d)].iter().any(|c| !c.is_zero()))
            .unwrap_or(self.degree + 1)
    }

    /// `u^e` for a unit `u = 1 + Y` with `Y` nilpotent, via the binomial series.
    pub fn pow<T: Coord>(&self, u: &[T], e: &T) -> Option<Vec<T>> {
        let mut y = u.to_vec();
        y[0] = scalar::sub(&y[0], &T::one())?;
        let low = self.lowest_degree(&y);
        let mut out = self.one();
        if low > self.degree || e.is_zero() {
            return Some(out);
        }
        let mut y_pow = y.clone();
        for k in 1..=(self.degree / low) {
            if k > 1 {
                y_pow = self.mul(&y_pow, &y)?;
            }
            let coeff = scalar::binom(e, k as u32)?;
            if coeff.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(&y_pow) {
                if !t.is_zero() {
                    *o = scalar::add(o, &scalar::mul(&coeff, t)?)?;
                }
            }
        }
        Some(out)
    }

    pub fn inverse<T: Coord>(&self, u: &[T]) -> Option<Vec<T>> {
        self.pow(u, &-T::one())
    }

    /// Group commutator `u^-1 v^-1 u v`.
    pub fn commutator<T: Coord>(&self, u: &[T], v: &[T]) -> Option<Vec<T>> {
        let ui = self.inverse(u)?;
        let vi = self.inverse(v)?;
        let left = self.mul(&ui, &vi)?;
        let right = self.mul(u, v)?;
        self.mul(&left, &right)
    }
}

/// Linear solve for the exponents of one weight level from degree-`w` coefficients.
#[derive(Debug)]
struct LevelSolver {
    entries: Range<usize>,
    degree: usize,
    columns: Vec<usize>,
    adjugate: Vec<Vec<BigInt>>,
    denominator: BigInt,
}

/// The Magnus image of a Hall basis, with conversions to and from Mal'cev coordinates.
#[derive(Debug)]
pub struct MagnusModel {
    algebra: MagnusAlgebra,
    basis_images: Vec<Vec<BigInt>>,
    levels: Vec<LevelSolver>,
}

impl MagnusModel {
    pub fn new(basis: &HallBasis) -> Self {
        let algebra = MagnusAlgebra::new(basis.rank(), basis.class());
        let mut images: Vec<Vec<BigInt>> = Vec::with_capacity(basis.len());
        for e in basis.entries() {
            let img = match e.structure {
                Structure::Generator(g) => algebra.letter::<BigInt>(g, false),
                Structure::Bracket(u, v) => algebra
                    .commutator(&images[u], &images[v])
                    .expect("BigInt arithmetic does not overflow"),
            };
            images.push(img);
        }
        let levels = (1..=basis.class())
            .map(|w| Self::level_solver(&algebra, &images, basis.weight_range(w), w))
            .collect();
        MagnusModel {
            algebra,
            basis_images: images,
            levels,
        }
    }

    fn level_solver(
        algebra: &MagnusAlgebra,
        images: &[Vec<BigInt>],
        entries: Range<usize>,
        degree: usize,
    ) -> LevelSolver {
        let n = entries.len();
        let words = algebra.degree_range(degree);
        // Pick n columns (words) on which the Lie polynomials are independent.
        let mut columns = Vec::new();
        let mut reduced: Vec<(usize, Vec<BigRational>)> = Vec::new();
        for col in 0..words.len() {
            if columns.len() == n {
                break;
            }
            let mut v: Vec<BigRational> = entries
                .clone()
                .map(|j| BigRational::from_integer(images[j][words.start + col].clone()))
                .collect();
            for (p, row) in &reduced {
                if !v[*p].is_zero() {
                    let f = v[*p].clone() / row[*p].clone();
                    for (a, b) in v.iter_mut().zip(row) {
                        *a -= f.clone() * b;
                    }
                }
            }
            if let Some(p) = v.iter().position(|x| !x.is_zero()) {
                reduced.push((p, v));
                columns.push(col);
            }
        }
        assert_eq!(columns.len(), n, "Lie polynomials of one weight must be independent");

        // S[i][j] = coefficient of column i in entry j; exponents solve d = S e.
        let s: Vec<Vec<BigRational>> = columns
            .iter()
            .map(|&c| {
                entries
                    .clone()
                    .map(|j| BigRational::from_integer(images[j][words.start + c].clone()))
                    .collect()
            })
            .collect();
        let inv = rational_inverse(s);
        let mut denominator = BigInt::one();
        for row in &inv {
            for x in row {
                denominator = num_integer::lcm(denominator, x.denom().clone());
            }
        }
        let adjugate = inv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| (x * BigRational::from_integer(denominator.clone())).to_integer())
                    .collect()
            })
            .collect();
        LevelSolver {
            entries,
            degree,
            columns,
            adjugate,
            denominator,
        }
    }

    pub fn algebra(&self) -> &MagnusAlgebra {
        &self.algebra
    }

    pub fn basis_image(&self, i: usize) -> &[BigInt] {
        &self.basis_images[i]
    }

    /// Magnus image of the normal form `prod_k b_k^{x_k}`.
    pub fn to_magnus<T: Coord>(&self, x: &[T]) -> Option<Vec<T>> {
        let mut acc = self.algebra.one();
        for (k, e) in x.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let b = scalar::convert::<T>(&self.basis_images[k])?;
            let p = self.algebra.pow(&b, e)?;
            acc = self.algebra.mul(&acc, &p)?;
        }
        Some(acc)
    }

    /// Mal'cev coordinates of a group element given by its Magnus image.
    pub fn from_magnus<T: Coord>(&self, g: &[T]) -> Option<Vec<T>> {
        let n = self.basis_images.len();
        let mut out = vec![T::zero(); n];
        let mut cur = g.to_vec();
        for level in &self.levels {
            let words = self.algebra.degree_range(level.degree);
            let mut chunk_inv: Vec<Vec<T>> = Vec::new();
            for (jj, j) in level.entries.clone().enumerate() {
                let mut acc = T::zero();
                for (ii, &c) in level.columns.iter().enumerate() {
                    let d = &cur[words.start + c];
                    if d.is_zero() {
                        continue;
                    }
                    let a = T::from_big(&level.adjugate[jj][ii])?;
                    acc = scalar::add(&acc, &scalar::mul(d, &a)?)?;
                }
                let den = T::from_big(&level.denominator)?;
                let (q, r) = acc.div_rem(&den);
                debug_assert!(r.is_zero(), "non-integral Mal'cev coordinate");
                if !q.is_zero() {
                    let b = scalar::convert::<T>(&self.basis_images[j])?;
                    chunk_inv.push(self.algebra.pow(&b, &-q.clone())?);
                }
                out[j] = q;
            }
            // cur <- (b_j1^e1 ... b_jr^er)^-1 cur
            for f in chunk_inv {
                cur = self.algebra.mul(&f, &cur)?;
            }
        }
        Some(out)
    }

    pub fn multiply<T: Coord>(&self, x: &[T], y: &[T]) -> Option<Vec<T>> {
        let a = self.to_magnus(x)?;
        let b = self.to_magnus(y)?;
        self.from_magnus(&self.algebra.mul(&a, &b)?)
    }
}

fn rational_inverse(mut m: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .expect("singular level matrix");
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= p.clone();
        }
        for x in inv[col].iter_mut() {
            *x /= p.clone();
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..n {
                    let a = m[col][c].clone() * &f;
                    m[r][c] -= a;
                    let b = inv[col][c].clone() * &f;
                    inv[r][c] -= b;
                }
            }
        }
    }
    inv
}

/// Magnus image of a free-group word given as `(letter, ±1)` pairs.
pub fn word_image<T: Coord>(algebra: &MagnusAlgebra, word: &[(usize, i8)]) -> Option<Vec<T>> {
    let mut acc = algebra.one();
    for &(g, s) in word {
        let letter = algebra.letter::<T>(g, s < 0);
        acc = algebra.mul(&acc, &letter)?;
    }
    Some(acc)
}
