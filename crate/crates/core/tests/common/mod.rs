//! Reference implementations shared by the integration tests. None of these
//! go through the collection tables.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nilentropy::hall::{HallBasis, Structure};
use nilentropy::Malcev;
use num_traits::ToPrimitive;
use rand::Rng;

/// Element of the free associative ring on `m` letters, truncated above
/// degree `c`. Keys are words in the letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub c: usize,
    pub terms: BTreeMap<Vec<u8>, i128>,
}

impl Series {
    pub fn one(c: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), 1);
        Series { c, terms }
    }

    /// `1 + X_i`.
    pub fn letter(c: usize, i: usize) -> Self {
        let mut s = Series::one(c);
        if c >= 1 {
            s.terms.insert(vec![i as u8], 1);
        }
        s
    }

    pub fn mul(&self, other: &Series) -> Series {
        let mut terms: BTreeMap<Vec<u8>, i128> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a.len() + b.len() > self.c {
                    continue;
                }
                let mut w = a.clone();
                w.extend_from_slice(b);
                *terms.entry(w).or_default() += x * y;
            }
        }
        terms.retain(|_, v| *v != 0);
        Series { c: self.c, terms }
    }

    fn scale_add(&mut self, other: &Series, k: i128) {
        for (w, v) in &other.terms {
            *self.terms.entry(w.clone()).or_default() += k * v;
        }
        self.terms.retain(|_, v| *v != 0);
    }

    /// `self^e = sum_j binom(e, j) N^j` with `N = self - 1`, valid for every
    /// integer `e` because `N` is nilpotent.
    pub fn pow(&self, e: i128) -> Series {
        let mut n = self.clone();
        n.scale_add(&Series::one(self.c), -1);
        let mut out = Series::one(self.c);
        let mut power = Series::one(self.c);
        let mut binom: i128 = 1;
        for j in 1..=self.c as i128 {
            power = power.mul(&n);
            binom = binom * (e - j + 1) / j;
            out.scale_add(&power, binom);
        }
        out
    }

    pub fn inverse(&self) -> Series {
        self.pow(-1)
    }
}

pub fn word_series(c: usize, word: &[(usize, i8)]) -> Series {
    word.iter().fold(Series::one(c), |acc, &(g, s)| {
        let l = Series::letter(c, g);
        acc.mul(&if s < 0 { l.inverse() } else { l })
    })
}

/// Series of every basis entry, built as iterated group commutators
/// `[u, v] = u^-1 v^-1 u v`.
pub fn basis_series(basis: &HallBasis) -> Vec<Series> {
    let c = basis.class();
    let mut out: Vec<Series> = Vec::with_capacity(basis.len());
    for e in basis.entries() {
        let s = match e.structure {
            Structure::Generator(i) => Series::letter(c, i),
            Structure::Bracket(l, r) => {
                let (u, v) = (&out[l], &out[r]);
                u.inverse().mul(&v.inverse()).mul(u).mul(v)
            }
        };
        out.push(s);
    }
    out
}

/// Series of the normal form `prod_k b_k^(e_k)`.
pub fn normal_form_series(basis_series: &[Series], g: &Malcev) -> Series {
    let c = basis_series[0].c;
    g.0.iter().zip(basis_series).fold(Series::one(c), |acc, (e, b)| {
        let e = e.to_i128().expect("exponent fits in 128 bits");
        if e == 0 {
            acc
        } else {
            acc.mul(&b.pow(e))
        }
    })
}

pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Vec<(usize, i8)> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| (rng.gen_range(0..rank), if rng.gen_bool(0.5) { 1 } else { -1 }))
        .collect()
}

/// Free reduction of a word.
pub fn free_reduce(word: &[(usize, i8)]) -> Vec<(usize, i8)> {
    let mut out: Vec<(usize, i8)> = Vec::new();
    for &(g, s) in word {
        if out.last() == Some(&(g, -s)) {
            out.pop();
        } else {
            out.push((g, s));
        }
    }
    out
}

fn mobius(n: usize) -> i64 {
    let (mut n, mut k, mut sign) = (n, 2, 1);
    while k * k <= n {
        if n % k == 0 {
            n /= k;
            if n % k == 0 {
                return 0;
            }
            sign = -sign;
        }
        k += 1;
    }
    if n > 1 {
        -sign
    } else {
        sign
    }
}

/// Rank of the degree-`d` piece of the free Lie ring on `m` generators.
pub fn witt(m: usize, d: usize) -> usize {
    let s: i64 = (1..=d)
        .filter(|k| d % k == 0)
        .map(|k| mobius(k) * (m as i64).pow((d / k) as u32))
        .sum();
    (s / d as i64) as usize
}

/// The golden ratio as the positive root of `x^2 - x - 1`.
pub fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}
