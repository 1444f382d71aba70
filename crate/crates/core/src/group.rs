//! Torsion-free nilpotent groups in Mal'cev coordinates.
//!
//! Elements are exponent vectors along the Hall basis: `(e_1, .., e_N)`
//! stands for `b_1^{e_1} ... b_N^{e_N}` with `b_k = [b_u, b_v] = b_u^-1 b_v^-1 b_u b_v`
//! for the Hall pair `(u, v)`. Quotients of a free nilpotent group by a
//! normal subgroup are represented by canonical coset representatives.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::collect::CollectionTable;
use crate::error::{Error, Result};
use crate::hall::HallBasis;
use crate::lattice::SubgroupLattice;
use crate::linalg::IntegerMatrix;
use crate::magnus::MagnusModel;
use crate::scalar::{self, Coord};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MalcevVector<T: Coord = BigInt>(pub Vec<T>);

impl<T: Coord> MalcevVector<T> {
    pub fn identity(n: usize) -> Self {
        MalcevVector(vec![T::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![T::zero(); n];
        v[i] = T::one();
        MalcevVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

impl MalcevVector<BigInt> {
    pub fn from_i64s(v: &[i64]) -> Self {
        MalcevVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }
}

impl<T: Coord + fmt::Display> fmt::Display for MalcevVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for MalcevVector<BigInt> {
    type Err = Error;

    /// Accepts `(1,2,3)`, `[1, 2, 3]` or a bare comma list.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .trim_start_matches(['(', '['])
            .trim_end_matches([')', ']'])
            .trim();
        if body.is_empty() {
            return Ok(MalcevVector(Vec::new()));
        }
        body.split(',')
            .map(|t| {
                let t = t.trim().trim_matches('"');
                t.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("not an integer: `{t}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MalcevVector)
    }
}

pub type Malcev = MalcevVector<BigInt>;

/// A word in the letters of a generating set; exponents are `±1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordExpr {
    pub letters: Vec<(usize, i8)>,
}

impl WordExpr {
    pub fn new(letters: Vec<(usize, i8)>) -> Self {
        WordExpr { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &WordExpr) -> WordExpr {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        WordExpr { letters }
    }

    pub fn inverse(&self) -> WordExpr {
        WordExpr {
            letters: self.letters.iter().rev().map(|&(g, s)| (g, -s)).collect(),
        }
    }

    /// Cancels adjacent inverse pairs.
    pub fn free_reduce(&self) -> WordExpr {
        let mut out: Vec<(usize, i8)> = Vec::with_capacity(self.letters.len());
        for &(g, s) in &self.letters {
            if let Some(&(h, t)) = out.last() {
                if h == g && t == -s {
                    out.pop();
                    continue;
                }
            }
            out.push((g, s));
        }
        WordExpr { letters: out }
    }
}

impl FromStr for WordExpr {
    type Err = Error;

    /// Letters `x1 .. xm`, optionally raised to an integer power:
    /// `x2 x1^-1`, `x1⁻¹`, `x2^3`, `x1^{-2}`. Separators are whitespace or `*`.
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            let tok = tok.replace('⁻', "^-").replace('¹', "1").replace(['{', '}'], "");
            let rest = tok
                .strip_prefix('x')
                .ok_or_else(|| Error::Parse(format!("expected a letter like x1, got `{tok}`")))?;
            let (idx, exp) = match rest.split_once('^') {
                Some((i, e)) => (i, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?),
                None => (rest, 1),
            };
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad generator index in `{tok}`")))?;
            if idx == 0 {
                return Err(Error::Parse("generators are numbered from 1".into()));
            }
            let sign = if exp < 0 { -1 } else { 1 };
            for _ in 0..exp.unsigned_abs() {
                letters.push((idx - 1, sign));
            }
        }
        Ok(WordExpr { letters })
    }
}

/// Karidi box length `max_i |e_i|^(1/w_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KaridiEstimate {
    pub value: f64,
    /// Two-sided box constant, when one has been fitted for the group.
    pub box_constant: Option<f64>,
}

pub fn karidi_value(coords: &[BigInt], weights: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (e, &w) in coords.iter().zip(weights) {
        if e.is_zero() {
            continue;
        }
        let v = match (e.abs().to_f64(), w) {
            (Some(a), 1) if a.is_finite() => a,
            (Some(a), 2) if a.is_finite() => a.sqrt(),
            (Some(a), _) if a.is_finite() => a.powf(1.0 / w as f64),
            _ => (scalar::ln_abs(e) / w as f64).exp(),
        };
        best = best.max(v);
    }
    best
}

/// A group with a polycyclic normal form on integer exponent vectors.
///
/// For every coordinate `p`, reading coordinate `p` must be a homomorphism
/// on the subgroup of elements whose earlier coordinates vanish.
pub trait Polycyclic: Send + Sync {
    fn dim(&self) -> usize;

    /// Weight attached to each coordinate (lower-central-series layer).
    fn weight(&self, coord: usize) -> usize;

    fn mul_in<T: Coord>(&self, a: &[T], b: &[T]) -> Option<Vec<T>>;

    fn inv_in<T: Coord>(&self, a: &[T]) -> Option<Vec<T>>;

    /// Generating set defining the word metric.
    fn word_generators(&self) -> Vec<Malcev>;

    fn hirsch_length(&self) -> usize {
        self.dim()
    }

    fn identity(&self) -> Malcev {
        Malcev::identity(self.dim())
    }

    fn multiply(&self, a: &Malcev, b: &Malcev) -> Malcev {
        MalcevVector(self.mul_in(&a.0, &b.0).expect("BigInt arithmetic is unbounded"))
    }

    fn inverse(&self, a: &Malcev) -> Malcev {
        MalcevVector(self.inv_in(&a.0).expect("BigInt arithmetic is unbounded"))
    }

    /// Square-and-multiply power; negative exponents invert first.
    fn power_in<T: Coord>(&self, g: &[T], n: &BigInt) -> Option<Vec<T>> {
        let mut result = vec![T::zero(); self.dim()];
        if n.is_zero() {
            return Some(result);
        }
        let mut base = if n.is_negative() { self.inv_in(g)? } else { g.to_vec() };
        let mut e = n.abs();
        let two = BigInt::from(2);
        loop {
            if e.is_odd() {
                result = self.mul_in(&result, &base)?;
            }
            e /= &two;
            if e.is_zero() {
                break;
            }
            base = self.mul_in(&base, &base)?;
        }
        Some(result)
    }

    fn power(&self, g: &Malcev, n: &BigInt) -> Malcev {
        MalcevVector(self.power_in(&g.0, n).expect("BigInt arithmetic is unbounded"))
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    fn commutator(&self, a: &Malcev, b: &Malcev) -> Malcev {
        let ai = self.inverse(a);
        let bi = self.inverse(b);
        let ab = self.multiply(a, b);
        self.multiply(&self.multiply(&ai, &bi), &ab)
    }

    fn karidi_length(&self, g: &Malcev) -> KaridiEstimate {
        let weights: Vec<usize> = (0..self.dim()).map(|i| self.weight(i)).collect();
        KaridiEstimate {
            value: karidi_value(&g.0, &weights),
            box_constant: None,
        }
    }
}

#[derive(Debug)]
pub(crate) struct FreeData {
    pub basis: HallBasis,
    pub model: MagnusModel,
    pub table: CollectionTable,
}

fn free_data(rank: usize, class: usize) -> Result<Arc<FreeData>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<FreeData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().unwrap().get(&(rank, class)) {
        return Ok(d.clone());
    }
    let basis = HallBasis::generate(rank, class)?;
    let model = MagnusModel::new(&basis);
    let table = CollectionTable::build(&basis, &model);
    let data = Arc::new(FreeData { basis, model, table });
    cache.lock().unwrap().insert((rank, class), data.clone());
    Ok(data)
}

/// Echelon generators of the normal subgroup cut out of the free group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relations {
    rows: Vec<Malcev>,
    pivots: Vec<usize>,
}

impl Relations {
    pub fn rows(&self) -> &[Malcev] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
}

/// A finitely generated torsion-free nilpotent group: `F_m / gamma_{c+1}`,
/// optionally modulo a normal subgroup.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    free: Arc<FreeData>,
    relations: Option<Arc<Relations>>,
    generating_set: Vec<Malcev>,
}

impl GroupSpec {
    /// The free nilpotent group of the given rank and class.
    pub fn free(rank: usize, class: usize) -> Result<Self> {
        let free = free_data(rank, class)?;
        let n = free.basis.len();
        let generating_set = (0..rank).map(|i| Malcev::unit(n, i)).collect();
        Ok(GroupSpec {
            free,
            relations: None,
            generating_set,
        })
    }

    /// Quotient of this spec's free cover by the normal closure of `relators`.
    ///
    /// Every graded piece of the quotient must be torsion free; relation
    /// pivots must be units so that the remaining coordinates stay free.
    pub fn with_relators(&self, relators: &[Malcev]) -> Result<Self> {
        let free = GroupSpec::free(self.rank(), self.class())?;
        for r in relators {
            free.check_len(r)?;
        }
        let mut gens: Vec<Malcev> = relators.to_vec();
        if let Some(rel) = &self.relations {
            gens.extend(rel.rows.iter().cloned());
        }
        let closure = SubgroupLattice::normal_closure(&free, &gens, 64)?;
        let rows: Vec<Malcev> = closure.rows().to_vec();
        let pivots: Vec<usize> = closure.leading_positions();

        // Graded torsion check on the leading parts of each weight.
        let weights = free.weights();
        for w in 1..=self.class() {
            let range = free.basis().weight_range(w);
            let block: Vec<Vec<BigInt>> = rows
                .iter()
                .zip(&pivots)
                .filter(|(_, &p)| weights[p] == w)
                .map(|(r, _)| r.0[range.clone()].to_vec())
                .collect();
            if block.is_empty() {
                continue;
            }
            let m = IntegerMatrix::from_rows(block);
            let divisors = m.elementary_divisors();
            if divisors.iter().any(|d| !d.is_one()) {
                return Err(Error::Torsion {
                    weight: w,
                    divisors: divisors.iter().map(ToString::to_string).collect(),
                });
            }
        }
        for (r, &p) in rows.iter().zip(&pivots) {
            if !r.0[p].is_one() {
                return Err(Error::NonUnitPivot {
                    coord: p,
                    pivot: r.0[p].to_string(),
                });
            }
        }
        let rel = Relations { rows, pivots };
        let n = free.len();
        let mut spec = GroupSpec {
            free: free.free.clone(),
            relations: if rel.rows.is_empty() { None } else { Some(Arc::new(rel)) },
            generating_set: (0..self.rank()).map(|i| Malcev::unit(n, i)).collect(),
        };
        spec.generating_set = self
            .generating_set
            .iter()
            .map(|g| spec.reduce(g))
            .collect();
        Ok(spec)
    }

    pub fn with_generating_set(mut self, gens: Vec<Malcev>) -> Result<Self> {
        for g in &gens {
            self.check_len(g)?;
        }
        if gens.is_empty() {
            return Err(Error::InvalidParameter("generating set is empty".into()));
        }
        self.generating_set = gens.iter().map(|g| self.reduce(g)).collect();
        Ok(self)
    }

    pub fn basis(&self) -> &HallBasis {
        &self.free.basis
    }

    pub fn magnus(&self) -> &MagnusModel {
        &self.free.model
    }

    pub fn collection_table(&self) -> &CollectionTable {
        &self.free.table
    }

    pub fn rank(&self) -> usize {
        self.free.basis.rank()
    }

    pub fn class(&self) -> usize {
        self.free.basis.class()
    }

    pub fn len(&self) -> usize {
        self.free.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.basis.is_empty()
    }

    pub fn weights(&self) -> Vec<usize> {
        self.free.basis.weights()
    }

    pub fn relations(&self) -> Option<&Relations> {
        self.relations.as_deref()
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_none()
    }

    pub fn generating_set(&self) -> &[Malcev] {
        &self.generating_set
    }

    pub fn has_default_generators(&self) -> bool {
        let n = self.len();
        self.generating_set.len() == self.rank()
            && self
                .generating_set
                .iter()
                .enumerate()
                .all(|(i, g)| *g == Malcev::unit(n, i))
    }

    /// The basis generator `x_{i+1}` in normal form.
    pub fn generator(&self, i: usize) -> Malcev {
        self.reduce(&Malcev::unit(self.len(), i))
    }

    pub fn check_len(&self, g: &Malcev) -> Result<()> {
        if g.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: g.len(),
            });
        }
        Ok(())
    }

    fn is_pivot(&self, coord: usize) -> bool {
        self.relations
            .as_ref()
            .is_some_and(|r| r.pivots.contains(&coord))
    }

    /// Coordinates of weight `w` that carry the graded piece `gamma_w / gamma_{w+1}`.
    pub fn graded_coords(&self, w: usize) -> Vec<usize> {
        self.basis()
            .weight_range(w)
            .filter(|&i| !self.is_pivot(i))
            .collect()
    }

    /// Ranks of the graded pieces, weight 1 first.
    pub fn graded_ranks(&self) -> Vec<usize> {
        (1..=self.class()).map(|w| self.graded_coords(w).len()).collect()
    }

    fn free_power<T: Coord>(&self, g: &[T], n: &BigInt) -> Option<Vec<T>> {
        let table = &self.free.table;
        let mut result = vec![T::zero(); g.len()];
        if n.is_zero() {
            return Some(result);
        }
        let mut base = if n.is_negative() { table.inverse(g)? } else { g.to_vec() };
        let mut e = n.abs();
        let two = BigInt::from(2);
        loop {
            if e.is_odd() {
                result = table.product(&result, &base)?;
            }
            e /= &two;
            if e.is_zero() {
                break;
            }
            base = table.product(&base, &base)?;
        }
        Some(result)
    }

    /// Canonical representative of the coset `g K`.
    pub(crate) fn reduce_in<T: Coord>(&self, mut g: Vec<T>) -> Option<Vec<T>> {
        let Some(rel) = &self.relations else {
            return Some(g);
        };
        for (row, &p) in rel.rows.iter().zip(&rel.pivots) {
            if g[p].is_zero() {
                continue;
            }
            let lead = T::from_big(&row.0[p])?;
            let q = g[p].div_floor(&lead);
            if q.is_zero() {
                continue;
            }
            let r = scalar::convert::<T>(&row.0)?;
            let pw = self.free_power(&r, &(-q.to_big()))?;
            g = self.free.table.product(&g, &pw)?;
        }
        Some(g)
    }

    pub fn reduce(&self, g: &Malcev) -> Malcev {
        MalcevVector(self.reduce_in(g.0.clone()).expect("BigInt"))
    }

    /// Evaluates a word in the generating set.
    pub fn eval_word(&self, w: &WordExpr) -> Result<Malcev> {
        let size = self.generating_set.len();
        let inverses: Vec<Malcev> = self.generating_set.iter().map(|g| self.inverse(g)).collect();
        let mut acc = self.identity();
        for &(g, s) in &w.letters {
            if g >= size {
                return Err(Error::InvalidGenerator { index: g + 1, size });
            }
            let letter = if s > 0 { &self.generating_set[g] } else { &inverses[g] };
            acc = self.multiply(&acc, letter);
        }
        Ok(acc)
    }

    /// Evaluates a word in the basis generators `x_1 .. x_m`, ignoring any
    /// custom generating set.
    pub fn eval_basis_word(&self, w: &WordExpr) -> Result<Malcev> {
        let size = self.rank();
        let mut acc = self.identity();
        for &(g, s) in &w.letters {
            if g >= size {
                return Err(Error::InvalidGenerator { index: g + 1, size });
            }
            let mut letter = self.generator(g);
            if s < 0 {
                letter = self.inverse(&letter);
            }
            acc = self.multiply(&acc, &letter);
        }
        Ok(acc)
    }

    /// The class-`(k-1)` quotient `N / gamma_k(N)`, for `2 <= k <= class + 1`.
    pub fn truncate(&self, k: usize) -> Result<GroupSpec> {
        if k < 2 || k > self.class() + 1 {
            return Err(Error::OutOfRange {
                what: "k",
                value: k as i64,
                range: format!("[2, {}]", self.class() + 1),
            });
        }
        if k == self.class() + 1 {
            return Ok(self.clone());
        }
        let base = GroupSpec::free(self.rank(), k - 1)?;
        let m = base.len();
        let mut spec = match &self.relations {
            None => base,
            Some(rel) => {
                let projected: Vec<Malcev> = rel
                    .rows
                    .iter()
                    .map(|r| MalcevVector(r.0[..m].to_vec()))
                    .filter(|r| !r.is_identity())
                    .collect();
                base.with_relators(&projected)?
            }
        };
        if !self.has_default_generators() {
            let gens = self
                .generating_set
                .iter()
                .map(|g| MalcevVector(g.0[..m].to_vec()))
                .collect();
            spec = spec.with_generating_set(gens)?;
        }
        Ok(spec)
    }

    /// Image of `g` in `N / gamma_k(N)`.
    pub fn project(&self, g: &Malcev, k: usize) -> Result<Malcev> {
        if k == 0 || k > self.class() + 1 {
            return Err(Error::OutOfRange {
                what: "k",
                value: k as i64,
                range: format!("[1, {}]", self.class() + 1),
            });
        }
        if k == 1 {
            return Ok(MalcevVector(Vec::new()));
        }
        let target = self.truncate(k)?;
        Ok(target.reduce(&MalcevVector(g.0[..target.len()].to_vec())))
    }

    /// Splits `g = g' z` with `z` supported on the top weight and `g'` having
    /// zero top-weight coordinates.
    pub fn rewrite_mod_last_term(&self, g: &Malcev) -> Result<(Malcev, Malcev)> {
        let c = self.class();
        if c < 2 {
            return Err(Error::InvalidParameter(
                "class 1 has no last term to split off".into(),
            ));
        }
        let top = self.basis().weight_range(c);
        let mut head = g.clone();
        for i in top {
            head.0[i] = BigInt::zero();
        }
        let head = self.reduce(&head);
        let z = self.multiply(&self.inverse(&head), g);
        Ok((head, z))
    }

    /// Word length of the normal form spelled with commutator words; an
    /// upper bound on the geodesic length for the standard generators.
    pub fn normal_form_length(&self, g: &Malcev) -> BigInt {
        g.0.iter()
            .enumerate()
            .map(|(i, e)| e.abs() * BigInt::from(self.basis().letter_length(i)))
            .sum()
    }
}

impl Polycyclic for GroupSpec {
    fn dim(&self) -> usize {
        self.len()
    }

    fn weight(&self, coord: usize) -> usize {
        self.basis().weight(coord)
    }

    fn mul_in<T: Coord>(&self, a: &[T], b: &[T]) -> Option<Vec<T>> {
        let p = self.free.table.product(a, b)?;
        self.reduce_in(p)
    }

    fn inv_in<T: Coord>(&self, a: &[T]) -> Option<Vec<T>> {
        let p = self.free.table.inverse(a)?;
        self.reduce_in(p)
    }

    fn word_generators(&self) -> Vec<Malcev> {
        self.generating_set.clone()
    }

    fn hirsch_length(&self) -> usize {
        self.len() - self.relations.as_ref().map_or(0, |r| r.rows.len())
    }
}
