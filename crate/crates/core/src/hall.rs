//! Hall bases of free nilpotent Lie rings and the straightened bracket.
//!
//! Entries are sorted by weight and, within a weight, by the indices of
//! their (left, right) factors. A bracket `[u, v]` is a basis entry when
//! `u > v` and, if `u = [p, q]`, also `q <= v`. Non-Hall brackets are
//! rewritten with antisymmetry and the Jacobi identity; the products of all
//! basis pairs of total weight at most the class are tabulated on
//! construction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    Generator(usize),
    /// Indices of the left and right factors in the basis.
    Bracket(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicCommutator {
    pub structure: Structure,
    pub weight: usize,
}

/// Element of the free Lie ring, as integer coefficients on Hall basis entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElement {
    coeffs: BTreeMap<usize, BigInt>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(index: usize) -> Self {
        Self::term(index, BigInt::one())
    }

    pub fn term(index: usize, coeff: BigInt) -> Self {
        let mut e = Self::zero();
        e.add_term(index, coeff);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, index: usize) -> BigInt {
        self.coeffs.get(&index).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn add_term(&mut self, index: usize, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(index).or_default();
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn add_scaled(&mut self, other: &LieElement, scale: &BigInt) {
        for (i, c) in other.terms() {
            self.add_term(i, c * scale);
        }
    }

    pub fn neg(&self) -> LieElement {
        LieElement {
            coeffs: self.coeffs.iter().map(|(&i, c)| (i, -c)).collect(),
        }
    }

    pub fn plus(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::one());
        out
    }
}

#[derive(Debug)]
pub struct HallBasis {
    rank: usize,
    class: usize,
    entries: Vec<BasicCommutator>,
    pair_index: HashMap<(usize, usize), usize>,
    weight_ranges: Vec<Range<usize>>,
    table: HashMap<(usize, usize), LieElement>,
}

impl HallBasis {
    /// All basic commutators of weight at most `class` on `rank` generators.
    pub fn generate(rank: usize, class: usize) -> Result<Self> {
        if rank == 0 || class == 0 {
            return Err(Error::InvalidParameter(format!(
                "Hall basis needs rank >= 1 and class >= 1, got ({rank}, {class})"
            )));
        }
        let mut entries: Vec<BasicCommutator> = (0..rank)
            .map(|i| BasicCommutator {
                structure: Structure::Generator(i),
                weight: 1,
            })
            .collect();
        let mut weight_ranges = vec![0..rank];
        let mut pair_index = HashMap::new();

        for w in 2..=class {
            let start = entries.len();
            let mut level = Vec::new();
            // u > v, so the weight of u is at least the weight of v.
            for wv in 1..w {
                let wu = w - wv;
                if wu < wv {
                    continue;
                }
                for u in weight_ranges[wu - 1].clone() {
                    for v in weight_ranges[wv - 1].clone() {
                        if u <= v {
                            continue;
                        }
                        if let Structure::Bracket(_, q) = entries[u].structure {
                            if q > v {
                                continue;
                            }
                        }
                        level.push((u, v));
                    }
                }
            }
            level.sort_unstable();
            for (u, v) in level {
                pair_index.insert((u, v), entries.len());
                entries.push(BasicCommutator {
                    structure: Structure::Bracket(u, v),
                    weight: w,
                });
            }
            weight_ranges.push(start..entries.len());
        }

        let mut basis = HallBasis {
            rank,
            class,
            entries,
            pair_index,
            weight_ranges,
            table: HashMap::new(),
        };
        basis.build_table();
        Ok(basis)
    }

    fn build_table(&mut self) {
        let mut memo = HashMap::new();
        let n = self.entries.len();
        for i in 0..n {
            for j in 0..n {
                if self.entries[i].weight + self.entries[j].weight <= self.class {
                    self.straighten(i, j, &mut memo);
                }
            }
        }
        memo.retain(|_, v: &mut LieElement| !v.is_zero());
        self.table = memo;
    }

    fn straighten(&self, i: usize, j: usize, memo: &mut HashMap<(usize, usize), LieElement>) -> LieElement {
        if i == j || self.entries[i].weight + self.entries[j].weight > self.class {
            return LieElement::zero();
        }
        if let Some(v) = memo.get(&(i, j)) {
            return v.clone();
        }
        let result = if i < j {
            self.straighten(j, i, memo).neg()
        } else {
            match self.entries[i].structure {
                Structure::Bracket(p, q) if q > j => {
                    // [[p,q],j] = [[p,j],q] + [p,[q,j]]
                    let pj = self.straighten(p, j, memo);
                    let mut out = self.bracket_with(&pj, &LieElement::basis(q), memo);
                    let qj = self.straighten(q, j, memo);
                    let second = self.bracket_with(&LieElement::basis(p), &qj, memo);
                    out.add_scaled(&second, &BigInt::one());
                    out
                }
                _ => LieElement::basis(self.pair_index[&(i, j)]),
            }
        };
        memo.insert((i, j), result.clone());
        result
    }

    fn bracket_with(
        &self,
        u: &LieElement,
        v: &LieElement,
        memo: &mut HashMap<(usize, usize), LieElement>,
    ) -> LieElement {
        let mut out = LieElement::zero();
        for (i, a) in u.terms() {
            for (j, b) in v.terms() {
                let prod = self.straighten(i, j, memo);
                out.add_scaled(&prod, &(a * b));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BasicCommutator] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &BasicCommutator {
        &self.entries[i]
    }

    pub fn weight(&self, i: usize) -> usize {
        self.entries[i].weight
    }

    pub fn weights(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.weight).collect()
    }

    /// Index range of the entries of weight `d`.
    pub fn weight_range(&self, d: usize) -> Range<usize> {
        if d == 0 || d > self.class {
            return 0..0;
        }
        self.weight_ranges[d - 1].clone()
    }

    pub fn graded_dimension(&self, d: usize) -> Result<usize> {
        if d == 0 || d > self.class {
            return Err(Error::OutOfRange {
                what: "weight",
                value: d as i64,
                range: format!("[1, {}]", self.class),
            });
        }
        Ok(self.weight_ranges[d - 1].len())
    }

    /// Index of the basis entry `[u, v]` if that pair is a Hall pair.
    pub fn pair(&self, u: usize, v: usize) -> Option<usize> {
        self.pair_index.get(&(u, v)).copied()
    }

    /// Bracket of two basis entries, already straightened and truncated.
    pub fn bracket_entries(&self, i: usize, j: usize) -> LieElement {
        if i == j {
            return LieElement::zero();
        }
        self.table.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Bilinear bracket; terms beyond the class are dropped.
    pub fn bracket(&self, u: &LieElement, v: &LieElement) -> LieElement {
        let mut out = LieElement::zero();
        for (i, a) in u.terms() {
            for (j, b) in v.terms() {
                if let Some(prod) = self.table.get(&(i, j)) {
                    out.add_scaled(prod, &(a * b));
                }
            }
        }
        out
    }

    /// Word length of the commutator word spelling entry `i` in the generators.
    pub fn letter_length(&self, i: usize) -> u64 {
        match self.entries[i].structure {
            Structure::Generator(_) => 1,
            Structure::Bracket(u, v) => 2 * (self.letter_length(u) + self.letter_length(v)),
        }
    }

    pub fn display_entry(&self, i: usize) -> String {
        match self.entries[i].structure {
            Structure::Generator(g) => format!("x{}", g + 1),
            Structure::Bracket(u, v) => format!("[{},{}]", self.display_entry(u), self.display_entry(v)),
        }
    }
}

impl fmt::Display for HallBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            writeln!(f, "{}\t{}\t{}", i + 1, self.weight(i), self.display_entry(i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_two_class_one_is_the_generators() {
        let b = HallBasis::generate(2, 1).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.display_entry(0), "x1");
        assert_eq!(b.display_entry(1), "x2");
    }

    #[test]
    fn heisenberg_basis() {
        let b = HallBasis::generate(2, 2).unwrap();
        assert_eq!(b.weights(), vec![1, 1, 2]);
        assert_eq!(b.display_entry(2), "[x2,x1]");
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(HallBasis::generate(0, 3).is_err());
        assert!(HallBasis::generate(2, 0).is_err());
    }

    #[test]
    fn graded_dimension_range() {
        let b = HallBasis::generate(2, 3).unwrap();
        assert_eq!(b.graded_dimension(1).unwrap(), 2);
        assert_eq!(b.graded_dimension(3).unwrap(), 2);
        assert!(b.graded_dimension(0).is_err());
        assert!(b.graded_dimension(4).is_err());
    }

    #[test]
    fn bracket_examples() {
        let b = HallBasis::generate(2, 2).unwrap();
        let x1 = LieElement::basis(0);
        let x2 = LieElement::basis(1);
        assert!(b.bracket(&x1, &x1).is_zero());
        assert_eq!(b.bracket(&x2, &x1), LieElement::basis(2));
        assert_eq!(b.bracket(&x1, &x2), LieElement::basis(2).neg());
    }

    #[test]
    fn brackets_beyond_the_class_vanish() {
        let b = HallBasis::generate(2, 2).unwrap();
        assert!(b.bracket(&LieElement::basis(2), &LieElement::basis(0)).is_zero());
    }

    #[test]
    fn non_hall_pair_is_straightened() {
        // [[x2,x1],x2] is Hall; [[[x2,x1],x2],x1] is not, since x2 > x1.
        let b = HallBasis::generate(2, 4).unwrap();
        let c = b.pair(1, 0).unwrap();
        let cx2 = b.pair(c, 1).unwrap();
        let cx1 = b.pair(c, 0).unwrap();
        assert!(b.pair(cx2, 0).is_none());
        let got = b.bracket_entries(cx2, 0);
        // Jacobi: [[c,x2],x1] = [[c,x1],x2] + [c,[x2,x1]] = [[c,x1],x2] + 0
        assert_eq!(got, LieElement::basis(b.pair(cx1, 1).unwrap()));
    }

    #[test]
    fn letter_lengths_double_per_bracket() {
        let b = HallBasis::generate(2, 3).unwrap();
        assert_eq!(b.letter_length(0), 1);
        assert_eq!(b.letter_length(2), 4);
        assert_eq!(b.letter_length(3), 10);
    }
}
