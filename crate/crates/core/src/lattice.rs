//! Subgroups of polycyclic groups as echelon generating sequences.
//!
//! Rows are kept with strictly increasing leading coordinates and positive
//! leading exponents. An element lies in the subgroup iff sifting it through
//! the rows (cancelling one leading coordinate at a time) reaches the identity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{Malcev, Polycyclic};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubgroupLattice {
    rows: Vec<Malcev>,
}

fn leading(g: &Malcev) -> Option<usize> {
    g.0.iter().position(|e| !e.is_zero())
}

impl SubgroupLattice {
    pub fn trivial() -> Self {
        SubgroupLattice::default()
    }

    pub fn rows(&self) -> &[Malcev] {
        &self.rows
    }

    pub fn leading_positions(&self) -> Vec<usize> {
        self.rows.iter().map(|r| leading(r).expect("rows are nontrivial")).collect()
    }

    pub fn hirsch_length(&self) -> usize {
        self.rows.len()
    }

    fn row_at(&self, p: usize) -> Option<usize> {
        self.rows.iter().position(|r| leading(r) == Some(p))
    }

    /// Sifts `g` through the rows. Returns the exponents `q` with
    /// `g = r_1^{q_1} ... r_k^{q_k} * rest` and the remainder `rest`.
    pub fn sift<P: Polycyclic>(&self, group: &P, g: &Malcev) -> (Vec<BigInt>, Malcev) {
        let mut g = g.clone();
        let mut exps = vec![BigInt::zero(); self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let p = leading(row).unwrap();
            match leading(&g) {
                None => break,
                Some(lg) if lg < p => break,
                Some(lg) if lg > p => continue,
                _ => {}
            }
            let (q, r) = g.0[p].div_rem(&row.0[p]);
            if !r.is_zero() {
                break;
            }
            g = group.multiply(&group.power(row, &-q.clone()), &g);
            exps[i] = q;
        }
        (exps, g)
    }

    pub fn contains<P: Polycyclic>(&self, group: &P, g: &Malcev) -> bool {
        self.sift(group, g).1.is_identity()
    }

    /// Coordinates of a member along the rows; `None` for non-members.
    pub fn coordinates<P: Polycyclic>(&self, group: &P, g: &Malcev) -> Option<Vec<BigInt>> {
        let (e, rest) = self.sift(group, g);
        rest.is_identity().then_some(e)
    }

    /// Inserts `g` into the echelon rows; returns whether the rows changed.
    fn insert<P: Polycyclic>(&mut self, group: &P, g: Malcev) -> bool {
        let mut pending = vec![g];
        let mut changed = false;
        while let Some(mut g) = pending.pop() {
            loop {
                let Some(p) = leading(&g) else { break };
                let Some(i) = self.row_at(p) else {
                    if g.0[p].is_negative() {
                        g = group.inverse(&g);
                    }
                    let pos = self
                        .rows
                        .iter()
                        .position(|r| leading(r).unwrap() > p)
                        .unwrap_or(self.rows.len());
                    self.rows.insert(pos, g);
                    changed = true;
                    break;
                };
                let a = self.rows[i].0[p].clone();
                let b = g.0[p].clone();
                if b.is_multiple_of(&a) {
                    g = group.multiply(&g, &group.power(&self.rows[i], &-(b / &a)));
                    continue;
                }
                // New leading exponent gcd(a, b) = s a + t b.
                let ext = a.extended_gcd(&b);
                let row = self.rows[i].clone();
                let mut new = group.multiply(&group.power(&row, &ext.x), &group.power(&g, &ext.y));
                if new.0[p].is_negative() {
                    new = group.inverse(&new);
                }
                let d = new.0[p].clone();
                let old_rest = group.multiply(&row, &group.power(&new, &-(&a / &d)));
                let g_rest = group.multiply(&g, &group.power(&new, &-(&b / &d)));
                self.rows[i] = new;
                changed = true;
                pending.push(old_rest);
                g = g_rest;
            }
        }
        changed
    }

    fn close<P: Polycyclic>(&mut self, group: &P, conjugators: &[Malcev], max_rounds: usize) -> Result<()> {
        for _ in 0..max_rounds {
            let mut changed = false;
            let rows = self.rows.clone();
            let mut candidates = Vec::new();
            for (i, ri) in rows.iter().enumerate() {
                for rj in &rows[i + 1..] {
                    candidates.push(group.commutator(rj, ri));
                    candidates.push(group.commutator(rj, &group.inverse(ri)));
                }
                for s in conjugators {
                    candidates.push(group.commutator(ri, s));
                    candidates.push(group.commutator(ri, &group.inverse(s)));
                }
            }
            for c in candidates {
                if !self.contains(group, &c) {
                    changed |= self.insert(group, c);
                }
            }
            if !changed {
                return Ok(());
            }
        }
        Err(Error::ClosureBudget(max_rounds))
    }

    /// The subgroup generated by `gens`.
    pub fn closure<P: Polycyclic>(group: &P, gens: &[Malcev], max_rounds: usize) -> Result<Self> {
        let mut lat = SubgroupLattice::trivial();
        for g in gens {
            if g.len() != group.dim() {
                return Err(Error::DimensionMismatch {
                    expected: group.dim(),
                    got: g.len(),
                });
            }
            lat.insert(group, g.clone());
        }
        lat.close(group, &[], max_rounds)?;
        Ok(lat)
    }

    /// The normal subgroup generated by `gens`.
    pub fn normal_closure<P: Polycyclic>(group: &P, gens: &[Malcev], max_rounds: usize) -> Result<Self> {
        let mut lat = Self::closure(group, gens, max_rounds)?;
        lat.close(group, &group.word_generators(), max_rounds)?;
        Ok(lat)
    }

    /// Index in the ambient group, which must have Hirsch length `hirsch`.
    pub fn index(&self, hirsch: usize) -> Result<BigInt> {
        if self.rows.len() < hirsch {
            return Err(Error::InfiniteIndex);
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.0[leading(r).unwrap()].clone())
            .fold(BigInt::one(), |a, b| a * b))
    }

    pub fn is_subgroup_of<P: Polycyclic>(&self, group: &P, other: &SubgroupLattice) -> bool {
        self.rows.iter().all(|r| other.contains(group, r))
    }
}
