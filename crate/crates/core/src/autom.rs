//! Endomorphisms given by generator images, their induced graded maps, and
//! spectral data of integer matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupSpec, Malcev, Polycyclic, WordExpr};
#[cfg(test)]
use crate::group::MalcevVector;
use crate::hall::Structure;
use crate::linalg::{rational_rref, to_rational, IntegerMatrix};
use crate::poly;

#[derive(Clone, Debug)]
pub struct Endomorphism {
    spec: GroupSpec,
    images: Vec<Malcev>,
    /// Image of every Hall basis entry, built from group commutators.
    basis_images: Vec<Malcev>,
}

impl Endomorphism {
    /// The endomorphism sending `x_i` to `images[i]`. On a quotient spec the
    /// images must respect the relations.
    pub fn new(spec: &GroupSpec, images: Vec<Malcev>) -> Result<Self> {
        if images.len() != spec.rank() {
            return Err(Error::DimensionMismatch {
                expected: spec.rank(),
                got: images.len(),
            });
        }
        for g in &images {
            spec.check_len(g)?;
        }
        let images: Vec<Malcev> = images.iter().map(|g| spec.reduce(g)).collect();
        let mut basis_images: Vec<Malcev> = Vec::with_capacity(spec.len());
        for e in spec.basis().entries() {
            let img = match e.structure {
                Structure::Generator(i) => images[i].clone(),
                Structure::Bracket(u, v) => spec.commutator(&basis_images[u], &basis_images[v]),
            };
            basis_images.push(img);
        }
        let phi = Endomorphism {
            spec: spec.clone(),
            images,
            basis_images,
        };
        if let Some(rel) = spec.relations() {
            for r in rel.rows() {
                if !phi.apply(r).is_identity() {
                    return Err(Error::NotAutomorphism(format!(
                        "images do not respect the relation {r}"
                    )));
                }
            }
        }
        Ok(phi)
    }

    /// Images given as words in the basis generators.
    pub fn from_words(spec: &GroupSpec, words: &[WordExpr]) -> Result<Self> {
        let images = words
            .iter()
            .map(|w| spec.eval_basis_word(w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, images)
    }

    pub fn identity(spec: &GroupSpec) -> Self {
        let images = (0..spec.rank()).map(|i| spec.generator(i)).collect();
        Self::new(spec, images).expect("identity respects every relation")
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn images(&self) -> &[Malcev] {
        &self.images
    }

    pub fn basis_images(&self) -> &[Malcev] {
        &self.basis_images
    }

    /// `phi(g) = prod_k phi(b_k)^{g_k}`.
    pub fn apply(&self, g: &Malcev) -> Malcev {
        let mut acc = self.spec.identity();
        for (b, e) in self.basis_images.iter().zip(&g.0) {
            if e.is_zero() {
                continue;
            }
            acc = self.spec.multiply(&acc, &self.spec.power(b, e));
        }
        acc
    }

    /// `self o other`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism> {
        if self.spec.len() != other.spec.len() || self.spec.rank() != other.spec.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.spec.len(),
                got: other.spec.len(),
            });
        }
        let images = other.images.iter().map(|g| self.apply(g)).collect();
        Endomorphism::new(&self.spec, images)
    }

    /// `phi^n`, by repeated squaring.
    pub fn iterate(&self, n: u32) -> Endomorphism {
        let mut result = Endomorphism::identity(&self.spec);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = base.compose(&result).expect("same spec");
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base).expect("same spec");
            }
        }
        result
    }

    /// `g, phi(g), phi^2(g), .., phi^n(g)`.
    pub fn orbit(&self, g: &Malcev, n: u32) -> Vec<Malcev> {
        let mut out = Vec::with_capacity(n as usize + 1);
        out.push(g.clone());
        for i in 0..n as usize {
            let next = self.apply(&out[i]);
            out.push(next);
        }
        out
    }

    /// Induced map on `gamma_i / gamma_{i+1}`; column `j` holds the image of
    /// the `j`-th graded basis element.
    pub fn graded_matrix(&self, i: usize) -> Result<IntegerMatrix> {
        if i == 0 || i > self.spec.class() {
            return Err(Error::OutOfRange {
                what: "weight",
                value: i as i64,
                range: format!("[1, {}]", self.spec.class()),
            });
        }
        let coords = self.spec.graded_coords(i);
        let cols: Vec<Vec<BigInt>> = coords
            .iter()
            .map(|&j| coords.iter().map(|&k| self.basis_images[j].0[k].clone()).collect())
            .collect();
        if cols.is_empty() {
            return Ok(IntegerMatrix::zeros(0, 0));
        }
        Ok(IntegerMatrix::from_columns(cols))
    }

    /// Induced map on `H_1(N, Z)`.
    pub fn abelianization_matrix(&self) -> IntegerMatrix {
        self.graded_matrix(1).expect("weight 1 always exists")
    }

    pub fn is_automorphism(&self) -> bool {
        (1..=self.spec.class()).all(|i| {
            self.graded_matrix(i)
                .and_then(|m| m.det())
                .is_ok_and(|d| d.abs().is_one())
        })
    }

    pub fn is_homologically_trivial(&self) -> bool {
        self.abelianization_matrix().is_identity()
    }

    /// Some `h` with `phi(h) = y`, solved one graded layer at a time.
    pub fn preimage(&self, y: &Malcev) -> Result<Malcev> {
        let spec = &self.spec;
        let mut h = spec.identity();
        for w in 1..=spec.class() {
            let coords = spec.graded_coords(w);
            if coords.is_empty() {
                continue;
            }
            let inv = unimodular_inverse(&self.graded_matrix(w)?)?;
            let delta = spec.multiply(&spec.inverse(&self.apply(&h)), y);
            let d: Vec<BigInt> = coords.iter().map(|&k| delta.0[k].clone()).collect();
            let mut eps = spec.identity();
            for (r, &k) in coords.iter().enumerate() {
                eps.0[k] = (0..d.len()).map(|c| inv.get(r, c) * &d[c]).sum();
            }
            h = spec.multiply(&h, &eps);
        }
        debug_assert_eq!(&self.apply(&h), y);
        Ok(h)
    }

    pub fn inverse(&self) -> Result<Endomorphism> {
        let images = (0..self.spec.rank())
            .map(|i| self.preimage(&self.spec.generator(i)))
            .collect::<Result<Vec<_>>>()?;
        Endomorphism::new(&self.spec, images)
    }

    /// The induced endomorphism of `N / gamma_k(N)`.
    pub fn truncate(&self, k: usize) -> Result<Endomorphism> {
        let target = self.spec.truncate(k)?;
        let images = self
            .images
            .iter()
            .map(|g| self.spec.project(g, k))
            .collect::<Result<Vec<_>>>()?;
        Endomorphism::new(&target, images)
    }
}

fn unimodular_inverse(m: &IntegerMatrix) -> Result<IntegerMatrix> {
    let n = m.rows();
    if !m.det()?.abs().is_one() {
        return Err(Error::NotAutomorphism(format!(
            "graded matrix {m} is not invertible over the integers"
        )));
    }
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut r = to_rational(m.row(i));
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let (rref, _) = rational_rref(rows);
    let inv = rref
        .iter()
        .map(|r| r[n..].iter().map(|x| x.to_integer()).collect())
        .collect();
    Ok(IntegerMatrix::from_rows(inv))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    /// Coefficients of `det(xI - M)`, constant term first.
    #[serde(serialize_with = "crate::json::serialize_bigints")]
    pub charpoly: Vec<BigInt>,
    pub radius: f64,
    /// Certified enclosure of the spectral radius.
    pub radius_lower: f64,
    pub radius_upper: f64,
    pub unipotent: bool,
    pub quasi_unipotent: bool,
}

impl SpectralReport {
    pub fn radius_error(&self) -> f64 {
        (self.radius_upper - self.radius_lower) / 2.0
    }
}

/// Characteristic polynomial, certified spectral radius and unipotence flags.
///
/// The squared radius is the largest positive root of the characteristic
/// polynomial of the symmetric square, whose eigenvalues are the products
/// `lambda_i lambda_j`; it is enclosed by Sturm bisection.
pub fn spectral_report(m: &IntegerMatrix) -> Result<SpectralReport> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let charpoly = m.charpoly()?;
    let unipotent = m.sub(&IntegerMatrix::identity(n))?.pow(n as u32)?.is_zero();
    let quasi_unipotent = poly::is_cyclotomic_product(&charpoly);
    let (lo, hi) = if quasi_unipotent {
        (1.0, 1.0)
    } else {
        let sym = m.symmetric_square()?.charpoly()?;
        let width = BigRational::new(BigInt::one(), BigInt::one() << 100u32);
        match poly::largest_positive_root(&sym, &width) {
            Some((lo, hi)) => (poly::to_f64(&lo).sqrt(), poly::to_f64(&hi).sqrt()),
            None => (0.0, 0.0),
        }
    };
    // Widen by one ulp each way for the final float rounding.
    let radius = (lo + hi) / 2.0;
    Ok(SpectralReport {
        charpoly,
        radius,
        radius_lower: if lo == hi { lo } else { lo.next_down() },
        radius_upper: if lo == hi { hi } else { hi.next_up() },
        unipotent,
        quasi_unipotent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn malcev(v: &[i64]) -> Malcev {
        MalcevVector::from_i64s(v)
    }

    fn heis() -> GroupSpec {
        GroupSpec::free(2, 2).unwrap()
    }

    fn fib(spec: &GroupSpec) -> Endomorphism {
        Endomorphism::from_words(spec, &["x1 x2".parse().unwrap(), "x1".parse().unwrap()]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let h = heis();
        let phi = fib(&h);
        assert_eq!(phi.apply(&malcev(&[0, 0, 1])), malcev(&[0, 0, -1]));
        let z = Endomorphism::new(&h, vec![malcev(&[1, 0, 1]), malcev(&[0, 1, 0])]).unwrap();
        assert_eq!(z.apply(&malcev(&[1, 0, 0])), malcev(&[1, 0, 1]));
        let id = Endomorphism::identity(&h);
        assert_eq!(id.apply(&malcev(&[3, -2, 7])), malcev(&[3, -2, 7]));
    }

    #[test]
    fn iterate_examples() {
        let h = heis();
        let phi = fib(&h);
        assert_eq!(phi.iterate(0).images(), Endomorphism::identity(&h).images());
        assert_eq!(phi.iterate(2).apply(&malcev(&[1, 0, 0])), malcev(&[2, 1, 1]));
        let u = Endomorphism::new(&h, vec![malcev(&[1, 0, 0]), malcev(&[1, 1, 0])]).unwrap();
        assert_eq!(u.iterate(3).apply(&malcev(&[0, 1, 0])), malcev(&[3, 1, 0]));
    }

    #[test]
    fn graded_matrices() {
        let h = heis();
        let phi = fib(&h);
        assert_eq!(phi.abelianization_matrix(), IntegerMatrix::from_i64(&[&[1, 1], &[1, 0]]));
        assert_eq!(phi.graded_matrix(2).unwrap(), IntegerMatrix::from_i64(&[&[-1]]));
        let u = Endomorphism::new(&h, vec![malcev(&[1, 0, 0]), malcev(&[1, 1, 0])]).unwrap();
        assert_eq!(u.graded_matrix(2).unwrap(), IntegerMatrix::from_i64(&[&[1]]));
        assert!(phi.graded_matrix(3).is_err());
        let z = Endomorphism::new(&h, vec![malcev(&[1, 0, 1]), malcev(&[0, 1, 0])]).unwrap();
        assert!(z.abelianization_matrix().is_identity());
        assert!(z.is_homologically_trivial());
        assert!(!phi.is_homologically_trivial());
    }

    #[test]
    fn automorphism_check() {
        let h = heis();
        assert!(fib(&h).is_automorphism());
        assert!(Endomorphism::identity(&h).is_automorphism());
        let sq = Endomorphism::new(&h, vec![malcev(&[2, 0, 0]), malcev(&[0, 1, 0])]).unwrap();
        assert!(!sq.is_automorphism());
    }

    #[test]
    fn inverse_round_trip() {
        let f = GroupSpec::free(2, 4).unwrap();
        let phi = fib(&f);
        let inv = phi.inverse().unwrap();
        let g = malcev(&[3, -1, 2, 0, 5, -4, 1, 2]);
        assert_eq!(phi.apply(&inv.apply(&g)), g);
        assert_eq!(inv.apply(&phi.apply(&g)), g);
    }

    #[test]
    fn spectral_examples() {
        let r = spectral_report(&IntegerMatrix::from_i64(&[&[1, 1], &[1, 0]])).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r.radius - golden).abs() < 1e-9);
        assert!(r.radius_lower <= golden && golden <= r.radius_upper);
        assert!(r.radius_error() < 1e-9);
        assert!(!r.quasi_unipotent && !r.unipotent);

        let id = spectral_report(&IntegerMatrix::identity(2)).unwrap();
        assert_eq!(id.radius, 1.0);
        assert!(id.unipotent && id.quasi_unipotent);

        let rot = spectral_report(&IntegerMatrix::from_i64(&[&[0, -1], &[1, -1]])).unwrap();
        assert_eq!(rot.radius, 1.0);
        assert!(rot.quasi_unipotent && !rot.unipotent);

        assert!(spectral_report(&IntegerMatrix::from_i64(&[&[1, 2, 3]])).is_err());
    }

    #[test]
    fn complex_dominant_pair() {
        // Eigenvalues 1 +- 2i have modulus sqrt(5).
        let r = spectral_report(&IntegerMatrix::from_i64(&[&[1, -2], &[2, 1]])).unwrap();
        assert!((r.radius - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn nilpotent_matrix_has_radius_zero() {
        let r = spectral_report(&IntegerMatrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap();
        assert_eq!(r.radius, 0.0);
        assert!(!r.quasi_unipotent);
    }
}
