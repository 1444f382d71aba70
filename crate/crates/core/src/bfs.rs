//! Breadth-first enumeration of word-metric balls.
//!
//! Elements are deduplicated by normal form. Each sphere is expanded in
//! parallel, then merged sequentially in frontier order, so element order
//! and distances do not depend on the number of worker threads.

use indexmap::IndexSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{Malcev, MalcevVector, Polycyclic};
use crate::scalar;

pub const DEFAULT_RADIUS_CAP: u32 = 10;
pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct CayleyBall {
    elements: IndexSet<Box<[i64]>>,
    /// `offsets[r]..offsets[r + 1]` is the sphere of radius `r`.
    offsets: Vec<usize>,
    letters: Vec<Vec<i64>>,
}

fn letters<P: Polycyclic>(group: &P) -> Result<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for g in group.word_generators() {
        for s in [g.clone(), group.inverse(&g)] {
            let v = scalar::convert::<i64>(&s.0).ok_or_else(|| {
                Error::InvalidParameter("generator coordinates exceed 64 bits".into())
            })?;
            if v.iter().any(|&x| x != 0) && !out.contains(&v) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

impl CayleyBall {
    /// The ball of radius 0.
    pub fn new<P: Polycyclic>(group: &P) -> Result<Self> {
        let mut elements = IndexSet::new();
        elements.insert(vec![0i64; group.dim()].into_boxed_slice());
        Ok(CayleyBall {
            elements,
            offsets: vec![0, 1],
            letters: letters(group)?,
        })
    }

    /// The complete ball of the given radius.
    pub fn build<P: Polycyclic>(group: &P, radius: u32, budget: usize) -> Result<Self> {
        let mut ball = Self::new(group)?;
        while ball.radius() < radius {
            ball.grow(group, budget)?;
        }
        Ok(ball)
    }

    pub fn radius(&self) -> u32 {
        (self.offsets.len() - 2) as u32
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Adds the next sphere.
    pub fn grow<P: Polycyclic>(&mut self, group: &P, budget: usize) -> Result<()> {
        let r = self.radius();
        let start = self.offsets[r as usize];
        let end = self.offsets[r as usize + 1];
        let frontier: Vec<&Box<[i64]>> = (start..end).map(|i| &self.elements[i]).collect();
        let known = &self.elements;
        let candidates: Vec<Option<Vec<Box<[i64]>>>> = frontier
            .par_iter()
            .map(|f| {
                let mut out = Vec::with_capacity(self.letters.len());
                for s in &self.letters {
                    let p = group.mul_in::<i64>(f, s)?;
                    if !known.contains(p.as_slice()) {
                        out.push(p.into_boxed_slice());
                    }
                }
                Some(out)
            })
            .collect();
        for c in candidates {
            let c = c.ok_or_else(|| {
                Error::InvalidParameter("ball coordinates exceed 64 bits".into())
            })?;
            for e in c {
                self.elements.insert(e);
            }
            if self.elements.len() > budget {
                return Err(Error::BudgetExceeded {
                    budget,
                    radius: r + 1,
                });
            }
        }
        self.offsets.push(self.elements.len());
        Ok(())
    }

    pub fn sphere(&self, r: u32) -> impl Iterator<Item = &[i64]> {
        let r = r as usize;
        let range = if r + 1 < self.offsets.len() {
            self.offsets[r]..self.offsets[r + 1]
        } else {
            0..0
        };
        range.map(move |i| &*self.elements[i])
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Elements with their distances from the identity, in BFS order.
    pub fn iter(&self) -> impl Iterator<Item = (&[i64], u32)> {
        let mut r = 0u32;
        self.elements.iter().enumerate().map(move |(i, e)| {
            while self.offsets[r as usize + 1] <= i {
                r += 1;
            }
            (&**e, r)
        })
    }

    pub fn distance(&self, g: &[i64]) -> Option<u32> {
        let i = self.elements.get_index_of(g)?;
        Some(self.offsets.partition_point(|&o| o <= i) as u32 - 1)
    }

    pub fn distance_of(&self, g: &Malcev) -> Option<u32> {
        let v = scalar::convert::<i64>(&g.0)?;
        self.distance(&v)
    }

    pub fn element(&self, i: usize) -> Malcev {
        MalcevVector(scalar::widen(&self.elements[i]))
    }
}

/// Exact word length of `g`, or `None` if it exceeds `radius_cap`.
pub fn geodesic_length<P: Polycyclic>(group: &P, g: &Malcev, radius_cap: u32, budget: usize) -> Result<Option<u32>> {
    if g.len() != group.dim() {
        return Err(Error::DimensionMismatch {
            expected: group.dim(),
            got: g.len(),
        });
    }
    let Some(target) = scalar::convert::<i64>(&g.0) else {
        return Ok(None);
    };
    let mut ball = CayleyBall::new(group)?;
    loop {
        if let Some(d) = ball.distance(&target) {
            return Ok(Some(d));
        }
        if ball.radius() >= radius_cap {
            return Ok(None);
        }
        ball.grow(group, budget)?;
    }
}
