//! Integer polynomials: real root isolation and cyclotomic factors.
//!
//! Polynomials are coefficient vectors, constant term first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn degree(p: &[BigInt]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// Exact division by a monic polynomial; `None` if it leaves a remainder.
pub fn div_monic(p: &[BigInt], d: &[BigInt]) -> Option<Vec<BigInt>> {
    let p = trim(p.to_vec());
    let d = trim(d.to_vec());
    let dd = d.len() - 1;
    if p.len() < d.len() {
        return if p.iter().all(Zero::is_zero) { Some(vec![BigInt::zero()]) } else { None };
    }
    let mut rem = p;
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    rem.iter().all(Zero::is_zero).then_some(quot)
}

fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn euler_phi(n: usize) -> usize {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: usize) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = -BigInt::one();
    p[n] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = div_monic(&p, &cyclotomic(d)).expect("cyclotomic divides x^n - 1");
        }
    }
    p
}

/// Indices `n` of every cyclotomic polynomial of degree at most `max_degree`.
pub fn cyclotomic_indices(max_degree: usize) -> Vec<usize> {
    // phi(n) >= sqrt(n / 2), so n <= 2 d^2 covers every candidate.
    (1..=2 * max_degree * max_degree + 2)
        .filter(|&n| euler_phi(n) <= max_degree)
        .collect()
}

/// True if `p` (monic) is a product of cyclotomic polynomials.
pub fn is_cyclotomic_product(p: &[BigInt]) -> bool {
    let mut rest = trim(p.to_vec());
    if rest.last().is_none_or(|c| !c.abs().is_one()) {
        return false;
    }
    for n in cyclotomic_indices(degree(&rest)) {
        let phi = cyclotomic(n);
        while degree(&rest) >= degree(&phi) {
            match div_monic(&rest, &phi) {
                Some(q) => rest = trim(q),
                None => break,
            }
        }
    }
    degree(&rest) == 0 && rest[0].abs().is_one()
}

fn eval_q(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

/// Quotient and remainder of polynomial division.
fn divmod_q(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(db)];
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let f = r[top].clone() / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[top - db + j] -= &f * bj;
        }
        q[top - db] = f;
        r.pop();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    (q, r)
}

fn rem_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    divmod_q(a, b).1
}

/// Sturm sequence `p, p', -rem(p, p'), ...`.
pub struct Sturm {
    seq: Vec<Vec<BigRational>>,
}

impl Sturm {
    pub fn new(p: &[BigInt]) -> Self {
        let p: Vec<BigRational> = trim(p.to_vec())
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let mut seq = vec![p.clone()];
        let dp = derivative(&p);
        if dp.iter().any(|c| !c.is_zero()) {
            seq.push(dp);
            loop {
                let n = seq.len();
                let r = rem_q(&seq[n - 2], &seq[n - 1]);
                if r.is_empty() {
                    break;
                }
                seq.push(r.into_iter().map(|c| -c).collect());
            }
        }
        // Divide out gcd(p, p') so that repeated roots, which make every
        // term vanish, cannot sit at an evaluation point.
        let g = seq.last().unwrap().clone();
        if g.len() > 1 {
            seq = seq.iter().map(|f| divmod_q(f, &g).0).collect();
        }
        Sturm { seq }
    }

    fn sign_changes(&self, x: &BigRational) -> usize {
        let mut changes = 0;
        let mut last = 0i8;
        for p in &self.seq {
            let v = eval_q(p, x);
            let s = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }
}

/// Cauchy bound: every root has modulus below the returned value.
pub fn root_bound(p: &[BigInt]) -> BigRational {
    let p = trim(p.to_vec());
    let lead = p.last().unwrap().abs();
    let max = p[..p.len() - 1].iter().map(|c| c.abs()).max().unwrap_or_default();
    BigRational::one() + BigRational::new(max, lead)
}

/// Encloses the largest positive real root of `p` in `[lo, hi]` with
/// `hi - lo <= width`; `None` if `p` has no positive root.
pub fn largest_positive_root(p: &[BigInt], width: &BigRational) -> Option<(BigRational, BigRational)> {
    if degree(p) == 0 {
        return None;
    }
    let sturm = Sturm::new(p);
    let zero = BigRational::zero();
    let mut hi = root_bound(p);
    if sturm.count(&zero, &hi) == 0 {
        return None;
    }
    let mut lo = zero;
    let two = BigRational::from_integer(BigInt::from(2));
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        if sturm.count(&mid, &hi) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

pub fn to_f64(x: &BigRational) -> f64 {
    let (n, d) = (x.numer(), x.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(60);
    let n = (n >> shift).to_f64().unwrap_or(0.0);
    let d = (d >> shift).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        return f64::INFINITY;
    }
    n / d
}

/// Product of polynomials, for building test cases.
pub fn product(factors: &[Vec<BigInt>]) -> Vec<BigInt> {
    factors.iter().fold(vec![BigInt::one()], |acc, f| mul(&acc, f))
}

/// `gcd` of the coefficients.
pub fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}
