//! Group constructions: free nilpotent groups and their quotients, subgroup
//! closures, central series, semidirect products with `Z`, and nilpotent
//! quotients of surface groups.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::autom::{spectral_report, Endomorphism};
use crate::bfs::CayleyBall;
use crate::error::{Error, Result};
use crate::group::{GroupSpec, Malcev, MalcevVector, Polycyclic};
use crate::hall::LieElement;
use crate::lattice::SubgroupLattice;
use crate::linalg::{integer_echelon, rational_kernel, IntegerMatrix};
use crate::scalar::{self, Coord};

/// Rounds of commutator closure allowed before giving up.
pub const CLOSURE_ROUNDS: usize = 64;

/// `F_m / gamma_{c+1}(F_m)`.
pub fn free_nilpotent(rank: usize, class: usize) -> Result<GroupSpec> {
    GroupSpec::free(rank, class)
}

/// `N / gamma_k(N)` for `2 <= k <= class + 1`.
pub fn truncate(spec: &GroupSpec, k: usize) -> Result<GroupSpec> {
    spec.truncate(k)
}

pub fn subgroup_closure<P: Polycyclic>(generators: &[Malcev], group: &P) -> Result<SubgroupLattice> {
    SubgroupLattice::closure(group, generators, CLOSURE_ROUNDS)
}

/// `gamma_1 > gamma_2 > ...`, nontrivial terms only. Fails if more than
/// `max_class` terms are nontrivial.
pub fn lower_central_series_bounded<P: Polycyclic>(group: &P, max_class: usize) -> Result<Vec<SubgroupLattice>> {
    let gens = group.word_generators();
    let mut series = vec![SubgroupLattice::closure(group, &gens, CLOSURE_ROUNDS)?];
    loop {
        let last = series.last().unwrap();
        let comms: Vec<Malcev> = last
            .rows()
            .iter()
            .flat_map(|a| gens.iter().map(move |s| (a, s)))
            .map(|(a, s)| group.commutator(a, s))
            .filter(|c| !c.is_identity())
            .collect();
        if comms.is_empty() {
            return Ok(series);
        }
        if series.len() >= max_class {
            return Err(Error::ClassBoundExceeded { bound: max_class });
        }
        let next = SubgroupLattice::normal_closure(group, &comms, CLOSURE_ROUNDS)?;
        series.push(next);
    }
}

pub fn lower_central_series(spec: &GroupSpec) -> Result<Vec<SubgroupLattice>> {
    lower_central_series_bounded(spec, spec.class())
}

/// Hirsch lengths of the successive quotients `gamma_i / gamma_{i+1}`.
pub fn lcs_ranks(series: &[SubgroupLattice]) -> Vec<usize> {
    (0..series.len())
        .map(|i| series[i].hirsch_length() - series.get(i + 1).map_or(0, SubgroupLattice::hirsch_length))
        .collect()
}

/// `N x_phi Z` in split coordinates `(k, n)` standing for `t^k n`, with
/// `t n t^-1 = phi(n)`.
#[derive(Clone, Debug)]
pub struct SemidirectSpec {
    base: GroupSpec,
    monodromy: Endomorphism,
    inverse: Endomorphism,
    class: usize,
}

impl SemidirectSpec {
    pub fn base(&self) -> &GroupSpec {
        &self.base
    }

    pub fn monodromy(&self) -> &Endomorphism {
        &self.monodromy
    }

    /// Nilpotency class found by commutator closure.
    pub fn class(&self) -> usize {
        self.class
    }

    pub fn element(&self, k: i64, n: &Malcev) -> Malcev {
        let mut v = Vec::with_capacity(n.len() + 1);
        v.push(BigInt::from(k));
        v.extend(n.0.iter().cloned());
        MalcevVector(v)
    }

    pub fn split(&self, g: &Malcev) -> (BigInt, Malcev) {
        (g.0[0].clone(), MalcevVector(g.0[1..].to_vec()))
    }

    /// `phi^k(n)` for any integer `k`.
    pub fn twist(&self, n: &Malcev, k: &BigInt) -> Malcev {
        if k.is_zero() || n.is_identity() {
            return n.clone();
        }
        let map = if k.is_positive() { &self.monodromy } else { &self.inverse };
        let steps = k.abs().to_u64().expect("twist exponent fits in 64 bits");
        if steps <= 16 {
            let mut out = n.clone();
            for _ in 0..steps {
                out = map.apply(&out);
            }
            out
        } else {
            map.iterate(steps as u32).apply(n)
        }
    }

    fn mul_big(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n1 = MalcevVector(a[1..].to_vec());
        let n2 = MalcevVector(b[1..].to_vec());
        let tw = self.twist(&n1, &-b[0].clone());
        let prod = self.base.multiply(&tw, &n2);
        let mut out = Vec::with_capacity(a.len());
        out.push(&a[0] + &b[0]);
        out.extend(prod.0);
        out
    }

    fn inv_big(&self, a: &[BigInt]) -> Vec<BigInt> {
        let n = MalcevVector(a[1..].to_vec());
        let m = self.twist(&self.base.inverse(&n), &a[0]);
        let mut out = Vec::with_capacity(a.len());
        out.push(-a[0].clone());
        out.extend(m.0);
        out
    }
}

impl Polycyclic for SemidirectSpec {
    fn dim(&self) -> usize {
        self.base.len() + 1
    }

    fn weight(&self, coord: usize) -> usize {
        if coord == 0 {
            1
        } else {
            self.base.basis().weight(coord - 1)
        }
    }

    fn mul_in<T: Coord>(&self, a: &[T], b: &[T]) -> Option<Vec<T>> {
        scalar::convert(&self.mul_big(&scalar::widen(a), &scalar::widen(b)))
    }

    fn inv_in<T: Coord>(&self, a: &[T]) -> Option<Vec<T>> {
        scalar::convert(&self.inv_big(&scalar::widen(a)))
    }

    fn word_generators(&self) -> Vec<Malcev> {
        let mut gens = vec![self.element(1, &self.base.identity())];
        gens.extend(self.base.generating_set().iter().map(|g| self.element(0, g)));
        gens
    }

    fn hirsch_length(&self) -> usize {
        self.base.hirsch_length() + 1
    }
}

/// `N x_phi Z` for an automorphism acting unipotently on `H_1(N)`. Its class
/// is at most `Hirsch(N) + 1`; exceeding that bound is reported as an error.
pub fn semidirect_unipotent(base: &GroupSpec, phi: &Endomorphism) -> Result<SemidirectSpec> {
    if phi.spec().len() != base.len() || phi.spec().rank() != base.rank() {
        return Err(Error::DimensionMismatch {
            expected: base.len(),
            got: phi.spec().len(),
        });
    }
    if !phi.is_automorphism() {
        return Err(Error::NotAutomorphism("monodromy has a graded determinant other than +-1".into()));
    }
    if !spectral_report(&phi.abelianization_matrix())?.unipotent {
        return Err(Error::NotUnipotent);
    }
    let mut spec = SemidirectSpec {
        base: base.clone(),
        monodromy: phi.clone(),
        inverse: phi.inverse()?,
        class: 0,
    };
    let bound = base.hirsch_length() + 1;
    spec.class = lower_central_series_bounded(&spec, bound)?.len();
    Ok(spec)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperCentral {
    /// Length of the upper central series of the associated graded Lie algebra.
    pub length: usize,
    /// Number of nontrivial lower central series terms of the group.
    pub lower_central_length: usize,
    /// Dimensions of the centre series `Z_1 < Z_2 < ...` of the Lie algebra.
    pub center_dimensions: Vec<usize>,
}

impl UpperCentral {
    pub fn agrees(&self) -> bool {
        self.length == self.lower_central_length
    }
}

type QVec = Vec<BigRational>;

/// Linear coordinates on `gamma_i / gamma_{i+1} (x) Q`.
struct Layer {
    lattice: SubgroupLattice,
    /// Coordinates of each lattice row.
    row_coords: Vec<QVec>,
    /// Lattice rows whose classes form a basis.
    basis: Vec<Malcev>,
}

impl Layer {
    fn new<P: Polycyclic>(group: &P, this: &SubgroupLattice, next: Option<&SubgroupLattice>) -> Self {
        let rows = this.rows();
        let positions = this.leading_positions();
        let next_positions = next.map(SubgroupLattice::leading_positions).unwrap_or_default();
        let mut basis_index = vec![None; rows.len()];
        let mut basis = Vec::new();
        for (j, p) in positions.iter().enumerate() {
            if !next_positions.contains(p) {
                basis_index[j] = Some(basis.len());
                basis.push(rows[j].clone());
            }
        }
        let dim = basis.len();
        let mut row_coords: Vec<QVec> = vec![Vec::new(); rows.len()];
        for j in (0..rows.len()).rev() {
            let p = positions[j];
            row_coords[j] = match basis_index[j] {
                Some(b) => {
                    let mut v = vec![BigRational::zero(); dim];
                    v[b] = BigRational::one();
                    v
                }
                None => {
                    // r^(b/a) s^-1 has a later leading coordinate and the
                    // same class as r^(b/a), since s lies in the next term.
                    let next = next.unwrap();
                    let s = &next.rows()[next_positions.iter().position(|q| *q == p).unwrap()];
                    let (a, b) = (&rows[j].0[p], &s.0[p]);
                    let u = group.multiply(&group.power(&rows[j], &(b / a)), &group.inverse(s));
                    let q = this.coordinates(group, &u).expect("lies in the subgroup");
                    let mut v = vec![BigRational::zero(); dim];
                    for (l, ql) in q.iter().enumerate().skip(j + 1) {
                        if ql.is_zero() {
                            continue;
                        }
                        for (x, y) in v.iter_mut().zip(&row_coords[l]) {
                            *x += BigRational::from_integer(ql.clone()) * y;
                        }
                    }
                    let scale = BigRational::new(a.clone(), b.clone());
                    v.iter().map(|x| x * &scale).collect()
                }
            };
        }
        Layer {
            lattice: this.clone(),
            row_coords,
            basis,
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn coords<P: Polycyclic>(&self, group: &P, x: &Malcev) -> QVec {
        let q = self.lattice.coordinates(group, x).expect("element lies in this term");
        let mut v = vec![BigRational::zero(); self.dim()];
        for (qj, rc) in q.iter().zip(&self.row_coords) {
            if qj.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(rc) {
                *x += BigRational::from_integer(qj.clone()) * y;
            }
        }
        v
    }
}

/// Upper central series length of the rational graded Lie algebra
/// `sum_i gamma_i / gamma_{i+1} (x) Q`, with the bracket read off from group
/// commutators against the generators.
pub fn upper_central_lengths<P: Polycyclic>(group: &P, max_class: usize) -> Result<UpperCentral> {
    let series = lower_central_series_bounded(group, max_class)?;
    let c = series.len();
    let gens = group.word_generators();
    let layers: Vec<Layer> = (0..c)
        .map(|i| Layer::new(group, &series[i], series.get(i + 1)))
        .collect();
    let dims: Vec<usize> = layers.iter().map(Layer::dim).collect();
    // ad[i][s][b] = coordinates of [basis_b, s] in layer i + 1.
    let ad: Vec<Vec<Vec<QVec>>> = (0..c.saturating_sub(1))
        .map(|i| {
            gens.iter()
                .map(|s| {
                    layers[i]
                        .basis
                        .iter()
                        .map(|b| layers[i + 1].coords(group, &group.commutator(b, s)))
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut center: Vec<Vec<QVec>> = vec![Vec::new(); c];
    let mut center_dimensions = Vec::new();
    let total: usize = dims.iter().sum();
    let mut length = 0;
    while center.iter().map(Vec::len).sum::<usize>() < total {
        length += 1;
        if length > c + 1 {
            return Err(Error::ClassBoundExceeded { bound: c });
        }
        let mut next: Vec<Vec<QVec>> = Vec::with_capacity(c);
        for i in 0..c {
            if i + 1 == c {
                next.push(rational_kernel(Vec::new(), dims[i]));
                continue;
            }
            // x is in the next centre iff every [x, s] vanishes modulo the current one.
            let annihilator = rational_kernel(center[i + 1].clone(), dims[i + 1]);
            let mut constraints = Vec::new();
            for cols in &ad[i] {
                for y in &annihilator {
                    let row: QVec = cols
                        .iter()
                        .map(|col| col.iter().zip(y).map(|(a, b)| a * b).sum())
                        .collect();
                    constraints.push(row);
                }
            }
            next.push(rational_kernel(constraints, dims[i]));
        }
        center = next;
        center_dimensions.push(center.iter().map(Vec::len).sum());
    }
    Ok(UpperCentral {
        length,
        lower_central_length: c,
        center_dimensions,
    })
}

/// `prod_i [a_i, b_i]` with `a_i = x_{2i-1}`, `b_i = x_{2i}`.
pub fn surface_relator(free: &GroupSpec, genus: usize) -> Malcev {
    let mut r = free.identity();
    for i in 0..genus {
        let c = free.commutator(&free.generator(2 * i), &free.generator(2 * i + 1));
        r = free.multiply(&r, &c);
    }
    r
}

/// Ranks of the graded pieces of the free Lie ring on `2g` generators modulo
/// the ideal generated by `sum_i [a_i, b_i]`. Torsion in any degree is an error.
pub fn surface_lie_ranks(genus: usize, class: usize) -> Result<Vec<usize>> {
    if genus == 0 {
        return Err(Error::InvalidParameter("genus 0 is not supported".into()));
    }
    let free = GroupSpec::free(2 * genus, class)?;
    let basis = free.basis();
    let mut ranks = vec![2 * genus];
    let mut omega = LieElement::zero();
    for i in 0..genus {
        omega = omega.plus(&basis.bracket(&LieElement::basis(2 * i), &LieElement::basis(2 * i + 1)));
    }
    let mut ideal = vec![omega];
    for d in 2..=class {
        let range = basis.weight_range(d);
        let rows: Vec<Vec<BigInt>> = ideal
            .iter()
            .map(|e| range.clone().map(|k| e.coeff(k)).collect())
            .collect();
        let echelon = integer_echelon(rows);
        if !echelon.is_empty() {
            let divisors = IntegerMatrix::from_rows(echelon.clone()).elementary_divisors();
            if divisors.iter().any(|x| !x.is_one()) {
                return Err(Error::Torsion {
                    weight: d,
                    divisors: divisors.iter().map(ToString::to_string).collect(),
                });
            }
        }
        ranks.push(range.len() - echelon.len());
        ideal = echelon
            .iter()
            .flat_map(|row| {
                let e = row
                    .iter()
                    .zip(range.clone())
                    .fold(LieElement::zero(), |mut acc, (c, k)| {
                        acc.add_term(k, c.clone());
                        acc
                    });
                (0..2 * genus)
                    .map(move |j| (e.clone(), j))
                    .collect::<Vec<_>>()
            })
            .map(|(e, j)| basis.bracket(&e, &LieElement::basis(j)))
            .collect();
    }
    Ok(ranks)
}

/// `pi_1(Sigma_g) / gamma_{c+1}` as a quotient of `F_{2g} / gamma_{c+1}`.
pub fn surface_quotient(genus: usize, class: usize) -> Result<GroupSpec> {
    let lie = surface_lie_ranks(genus, class)?;
    let free = GroupSpec::free(2 * genus, class)?;
    let relator = surface_relator(&free, genus);
    let spec = free.with_relators(&[relator])?;
    let ranks = spec.graded_ranks();
    if ranks != lie {
        return Err(Error::InvalidParameter(format!(
            "group-level graded ranks {ranks:?} disagree with the Lie ideal ranks {lie:?}"
        )));
    }
    Ok(spec)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatorCheck {
    pub holds: bool,
    /// Radius of the conjugator ball that was searched.
    pub radius: u32,
    pub conjugator: Option<Malcev>,
    pub exponent: i8,
}

/// Whether the images of the surface generators send `prod [a_i, b_i]` to a
/// conjugate of itself or its inverse, searching conjugators in a ball.
pub fn relator_check(free: &GroupSpec, images: &[Malcev], genus: usize, radius: u32) -> Result<RelatorCheck> {
    if free.rank() != 2 * genus || !free.is_free() {
        return Err(Error::InvalidParameter(format!(
            "expected the free nilpotent group of rank {}",
            2 * genus
        )));
    }
    if images.len() != 2 * genus {
        return Err(Error::DimensionMismatch {
            expected: 2 * genus,
            got: images.len(),
        });
    }
    for g in images {
        free.check_len(g)?;
    }
    let relator = surface_relator(free, genus);
    let mut image = free.identity();
    for i in 0..genus {
        let c = free.commutator(&images[2 * i], &images[2 * i + 1]);
        image = free.multiply(&image, &c);
    }
    let targets = [(1i8, relator.clone()), (-1i8, free.inverse(&relator))];
    let ball = CayleyBall::build(free, radius, crate::bfs::DEFAULT_BUDGET)?;
    for i in 0..ball.len() {
        let h = ball.element(i);
        let hi = free.inverse(&h);
        for (e, t) in &targets {
            if free.multiply(&free.multiply(&h, t), &hi) == image {
                return Ok(RelatorCheck {
                    holds: true,
                    radius,
                    conjugator: Some(h),
                    exponent: *e,
                });
            }
        }
    }
    Ok(RelatorCheck {
        holds: false,
        radius,
        conjugator: None,
        exponent: 0,
    })
}
