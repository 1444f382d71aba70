//! Collection polynomials for free nilpotent groups.
//!
//! In Mal'cev coordinates along a Hall basis, the product of two normal
//! forms is `(x*y)_k = x_k + y_k + q_k(x, y)` where `q_k` involves only
//! coordinates of weight below `w_k` and has weighted degree at most `w_k`.
//! Each `q_k` is integer valued, so it is an integer combination of products
//! of binomial coefficients `C(x_j, a_j) C(y_j, b_j)`. The coefficients are
//! recovered once per basis by Newton interpolation on the lattice points
//! of weighted degree `<= w_k`, evaluated through the Magnus embedding.
//! After that, collecting a product costs one polynomial evaluation per
//! coordinate regardless of how large the exponents are.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::hall::HallBasis;
use crate::magnus::MagnusModel;
use crate::scalar::{self, Coord};

#[derive(Debug, Clone)]
struct Term {
    coeff: BigInt,
    small: Option<i64>,
    /// (variable, binomial order); variables `0..n` are `x`, `n..2n` are `y`.
    factors: Vec<(u16, u8)>,
}

#[derive(Debug)]
pub struct CollectionTable {
    weights: Vec<usize>,
    polys: Vec<Vec<Term>>,
    /// Highest binomial order used per variable.
    max_order: Vec<u8>,
}

impl CollectionTable {
    pub fn build(basis: &HallBasis, model: &MagnusModel) -> Self {
        let n = basis.len();
        let weights = basis.weights();
        let mut polys: Vec<Vec<Term>> = vec![Vec::new(); n];
        for w in 2..=basis.class() {
            let targets = basis.weight_range(w);
            let vars: Vec<(usize, usize)> = (0..2 * n)
                .filter(|&v| weights[v % n] < w)
                .map(|v| (v, weights[v % n]))
                .collect();
            let points = lower_set(&vars, w);
            let mut values: HashMap<Vec<u8>, Vec<BigInt>> = HashMap::with_capacity(points.len());
            for p in &points {
                if !two_sided(p, &vars, n) {
                    continue;
                }
                let (x, y) = split_point(p, &vars, n);
                let prod = model
                    .multiply::<i64>(&x, &y)
                    .map(|v| scalar::widen(&v))
                    .unwrap_or_else(|| {
                        let xb = scalar::widen(&x);
                        let yb = scalar::widen(&y);
                        model.multiply::<BigInt>(&xb, &yb).expect("BigInt")
                    });
                let q: Vec<BigInt> = targets
                    .clone()
                    .map(|k| &prod[k] - x[k] - y[k])
                    .collect();
                values.insert(p.clone(), q);
            }
            for alpha in &points {
                if !two_sided(alpha, &vars, n) {
                    continue;
                }
                let coeffs = newton_coefficient(alpha, &values, targets.len());
                for (t, c) in targets.clone().zip(coeffs) {
                    if c.is_zero() {
                        continue;
                    }
                    let factors = alpha
                        .iter()
                        .enumerate()
                        .filter(|(_, &a)| a > 0)
                        .map(|(i, &a)| (vars[i].0 as u16, a))
                        .collect();
                    polys[t].push(Term {
                        small: c.to_i64(),
                        coeff: c,
                        factors,
                    });
                }
            }
        }
        let mut max_order = vec![0u8; 2 * n];
        for terms in &polys {
            for t in terms {
                for &(v, a) in &t.factors {
                    max_order[v as usize] = max_order[v as usize].max(a);
                }
            }
        }
        CollectionTable {
            weights,
            polys,
            max_order,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.polys.iter().map(Vec::len).sum()
    }

    fn binomial_table<T: Coord>(&self, x: &[T], y: &[T]) -> Option<Vec<Vec<T>>> {
        let n = self.len();
        let mut table = Vec::with_capacity(2 * n);
        for v in 0..2 * n {
            let val = if v < n { &x[v] } else { &y[v - n] };
            let order = self.max_order[v] as u32;
            let mut row = Vec::with_capacity(order as usize + 1);
            row.push(T::one());
            if !val.is_zero() {
                for a in 1..=order {
                    row.push(scalar::binom(val, a)?);
                }
            }
            table.push(row);
        }
        Some(table)
    }

    fn eval_term<T: Coord>(term: &Term, binoms: &[Vec<T>]) -> Option<T> {
        let mut acc = match term.small {
            Some(s) => T::from_i64(s),
            None => T::from_big(&term.coeff)?,
        };
        for &(v, a) in &term.factors {
            // Zero variables have only the order-0 entry.
            let b = binoms[v as usize].get(a as usize)?;
            acc = scalar::mul(&acc, b)?;
        }
        Some(acc)
    }

    /// Normal form of the product of two normal forms. `None` on overflow.
    pub fn product<T: Coord>(&self, x: &[T], y: &[T]) -> Option<Vec<T>> {
        let binoms = self.binomial_table(x, y)?;
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            let mut acc = scalar::add(&x[k], &y[k])?;
            for term in &self.polys[k] {
                if term
                    .factors
                    .iter()
                    .any(|&(v, _)| binoms[v as usize].len() == 1)
                {
                    continue;
                }
                let t = Self::eval_term(term, &binoms)?;
                acc = scalar::add(&acc, &t)?;
            }
            out.push(acc);
        }
        Some(out)
    }

    /// Inverse of a normal form, solving `x * y = 1` coordinate by coordinate.
    pub fn inverse<T: Coord>(&self, x: &[T]) -> Option<Vec<T>> {
        let n = self.len();
        let mut y = vec![T::zero(); n];
        // q_k only reads coordinates of lower weight, which are already solved.
        let mut k = 0;
        while k < n {
            let w = self.weights[k];
            let end = (k..n).find(|&j| self.weights[j] != w).unwrap_or(n);
            let binoms = self.binomial_table(x, &y)?;
            for j in k..end {
                let mut acc = -x[j].clone();
                for term in &self.polys[j] {
                    if term
                        .factors
                        .iter()
                        .any(|&(v, _)| binoms[v as usize].len() == 1)
                    {
                        continue;
                    }
                    let t = Self::eval_term(term, &binoms)?;
                    acc = scalar::sub(&acc, &t)?;
                }
                y[j] = acc;
            }
            k = end;
        }
        Some(y)
    }
}

/// All multi-indices over `vars` with weighted degree at most `bound`.
fn lower_set(vars: &[(usize, usize)], bound: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; vars.len()];
    fn rec(i: usize, left: usize, vars: &[(usize, usize)], cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == vars.len() {
            out.push(cur.clone());
            return;
        }
        let w = vars[i].1;
        let mut a = 0;
        while a * w <= left {
            cur[i] = a as u8;
            rec(i + 1, left - a * w, vars, cur, out);
            a += 1;
        }
        cur[i] = 0;
    }
    rec(0, bound, vars, &mut cur, &mut out);
    out
}

fn two_sided(p: &[u8], vars: &[(usize, usize)], n: usize) -> bool {
    let mut has_x = false;
    let mut has_y = false;
    for (i, &a) in p.iter().enumerate() {
        if a > 0 {
            if vars[i].0 < n {
                has_x = true;
            } else {
                has_y = true;
            }
        }
    }
    has_x && has_y
}

fn split_point(p: &[u8], vars: &[(usize, usize)], n: usize) -> (Vec<i64>, Vec<i64>) {
    let mut x = vec![0i64; n];
    let mut y = vec![0i64; n];
    for (i, &a) in p.iter().enumerate() {
        let v = vars[i].0;
        if v < n {
            x[v] = a as i64;
        } else {
            y[v - n] = a as i64;
        }
    }
    (x, y)
}

/// Forward difference `sum_{beta <= alpha} (-1)^{|alpha-beta|} prod C(alpha_i, beta_i) q(beta)`.
fn newton_coefficient(alpha: &[u8], values: &HashMap<Vec<u8>, Vec<BigInt>>, width: usize) -> Vec<BigInt> {
    let support: Vec<usize> = (0..alpha.len()).filter(|&i| alpha[i] > 0).collect();
    let mut acc = vec![BigInt::zero(); width];
    let mut beta = alpha.to_vec();
    for &i in &support {
        beta[i] = 0;
    }
    loop {
        if let Some(q) = values.get(&beta) {
            let mut weight = BigInt::from(1);
            let mut parity = 0u32;
            for &i in &support {
                weight *= small_binomial(alpha[i], beta[i]);
                parity += (alpha[i] - beta[i]) as u32;
            }
            if parity % 2 == 1 {
                weight = -weight;
            }
            for (a, v) in acc.iter_mut().zip(q) {
                *a += &weight * v;
            }
        }
        // Odometer over the box below alpha on its support.
        let mut advanced = false;
        for &i in &support {
            if beta[i] < alpha[i] {
                beta[i] += 1;
                advanced = true;
                break;
            }
            beta[i] = 0;
        }
        if !advanced {
            break;
        }
    }
    acc
}

fn small_binomial(n: u8, k: u8) -> i64 {
    let mut r = 1i64;
    for i in 0..k as i64 {
        r = r * (n as i64 - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(m: usize, c: usize) -> (HallBasis, MagnusModel, CollectionTable) {
        let basis = HallBasis::generate(m, c).unwrap();
        let model = MagnusModel::new(&basis);
        let t = CollectionTable::build(&basis, &model);
        (basis, model, t)
    }

    #[test]
    fn heisenberg_law() {
        let (_, _, t) = table(2, 2);
        // (a1,b1,e1)(a2,b2,e2) = (a1+a2, b1+b2, e1+e2+b1*a2)
        assert_eq!(t.term_count(), 1);
        assert_eq!(t.product(&[0i64, 1, 0], &[1, 0, 0]).unwrap(), vec![1, 1, 1]);
        assert_eq!(t.product(&[1i64, 1, 0], &[1, 1, 0]).unwrap(), vec![2, 2, 1]);
        assert_eq!(t.product(&[5i64, -3, 2], &[-7, 4, 1]).unwrap(), vec![-2, 1, 3 + 21]);
        assert_eq!(t.inverse(&[1i64, 1, 0]).unwrap(), vec![-1, -1, 1]);
    }

    #[test]
    fn agrees_with_magnus_beyond_the_interpolation_points() {
        let (basis, model, t) = table(2, 4);
        let n = basis.len();
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 41) as i64 - 20
        };
        for _ in 0..50 {
            let x: Vec<i64> = (0..n).map(|_| next()).collect();
            let y: Vec<i64> = (0..n).map(|_| next()).collect();
            assert_eq!(t.product(&x, &y), model.multiply(&x, &y));
            assert_eq!(t.inverse(&x), model.from_magnus(&model.algebra().inverse(&model.to_magnus(&x).unwrap()).unwrap()));
        }
    }

    #[test]
    fn overflow_falls_out_as_none() {
        let (_, _, t) = table(2, 2);
        assert!(t.product(&[0i64, i64::MAX, 0], &[2, 0, 0]).is_none());
        let big = BigInt::from(i64::MAX);
        let r = t
            .product(&[BigInt::zero(), big.clone(), BigInt::zero()], &[BigInt::from(2), BigInt::zero(), BigInt::zero()])
            .unwrap();
        assert_eq!(r[2], big * 2);
    }
}
