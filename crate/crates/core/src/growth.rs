//! Word-length growth of automorphism orbits and the experiments built on it.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::autom::{spectral_report, Endomorphism};
use crate::bfs::{CayleyBall, DEFAULT_BUDGET, DEFAULT_RADIUS_CAP};
use crate::builtins::builtin;
use crate::error::{Error, Result};
use crate::fit::{fit_entropy, fit_poly_degree, log_log_slope, EntropyEstimate, FitConfig, PolyFit};
use crate::group::{karidi_value, GroupSpec, Malcev, Polycyclic};
use crate::lattice::SubgroupLattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LengthMode {
    #[serde(rename = "exact-bfs")]
    ExactBfs,
    #[serde(rename = "karidi")]
    Karidi,
    #[serde(rename = "normalform-upper")]
    NormalFormUpper,
    #[serde(rename = "abelian-lower")]
    AbelianLower,
}

impl LengthMode {
    pub const ALL: [LengthMode; 4] = [
        LengthMode::ExactBfs,
        LengthMode::Karidi,
        LengthMode::NormalFormUpper,
        LengthMode::AbelianLower,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            LengthMode::ExactBfs => "exact-bfs",
            LengthMode::Karidi => "karidi",
            LengthMode::NormalFormUpper => "normalform-upper",
            LengthMode::AbelianLower => "abelian-lower",
        }
    }
}

impl fmt::Display for LengthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for LengthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LengthMode::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::UnknownMode(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthEntry {
    pub n: u32,
    pub length: f64,
    pub mode: LengthMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthSeries {
    pub entries: Vec<GrowthEntry>,
    #[serde(skip)]
    pub subject: Malcev,
    /// Generator images of the automorphism.
    #[serde(skip)]
    pub automorphism: Vec<Malcev>,
}

impl GrowthSeries {
    pub fn modes(&self) -> Vec<LengthMode> {
        let mut m: Vec<LengthMode> = self.entries.iter().map(|e| e.mode).collect();
        m.sort();
        m.dedup();
        m
    }

    pub fn points(&self, mode: LengthMode) -> Vec<(u64, f64)> {
        self.entries
            .iter()
            .filter(|e| e.mode == mode)
            .map(|e| (e.n as u64, e.length))
            .collect()
    }

    /// Entries of both series, ordered by `n` then mode.
    pub fn merge(&self, other: &GrowthSeries) -> GrowthSeries {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().copied());
        entries.sort_by(|a, b| a.n.cmp(&b.n).then(a.mode.cmp(&b.mode)));
        entries.dedup_by(|a, b| a.n == b.n && a.mode == b.mode);
        GrowthSeries {
            entries,
            subject: self.subject.clone(),
            automorphism: self.automorphism.clone(),
        }
    }

    /// `abelian-lower <= exact-bfs <= normalform-upper` wherever the modes
    /// coexist; returns the first `n` where this fails.
    pub fn sandwich_violation(&self) -> Option<u32> {
        let mut by_n: HashMap<u32, HashMap<LengthMode, f64>> = HashMap::new();
        for e in &self.entries {
            by_n.entry(e.n).or_default().insert(e.mode, e.length);
        }
        let mut ns: Vec<u32> = by_n.keys().copied().collect();
        ns.sort_unstable();
        ns.into_iter().find(|n| {
            let m = &by_n[n];
            let get = |k| m.get(&k).copied();
            let lower = get(LengthMode::AbelianLower);
            let exact = get(LengthMode::ExactBfs);
            let upper = get(LengthMode::NormalFormUpper);
            let le = |a: Option<f64>, b: Option<f64>| match (a, b) {
                (Some(a), Some(b)) => a <= b,
                _ => true,
            };
            !(le(lower, exact) && le(exact, upper) && le(lower, upper))
        })
    }

    fn single_mode(&self) -> Result<LengthMode> {
        match self.modes().as_slice() {
            [m] => Ok(*m),
            [] => Err(Error::InsufficientData("empty series".into())),
            _ => Err(Error::InvalidParameter("series mixes several length modes".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthOptions {
    /// Largest BFS radius used by `exact-bfs`.
    pub radius_cap: u32,
    pub budget: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            radius_cap: DEFAULT_RADIUS_CAP,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Measures word lengths in one mode against the generating set of `spec`.
pub struct LengthOracle<'a> {
    spec: &'a GroupSpec,
    mode: LengthMode,
    options: GrowthOptions,
    ball: Option<CayleyBall>,
    abelian_step: BigInt,
}

impl<'a> LengthOracle<'a> {
    pub fn new(spec: &'a GroupSpec, mode: LengthMode, options: GrowthOptions) -> Result<Self> {
        let ball = match mode {
            LengthMode::ExactBfs => Some(CayleyBall::new(spec)?),
            _ => None,
        };
        let abelian_step = spec
            .generating_set()
            .iter()
            .map(|g| abelian_norm(spec, g))
            .max()
            .unwrap_or_default();
        Ok(LengthOracle {
            spec,
            mode,
            options,
            ball,
            abelian_step,
        })
    }

    /// `None` when an exact length lies beyond the radius cap.
    pub fn length(&mut self, g: &Malcev) -> Result<Option<f64>> {
        let spec = self.spec;
        Ok(match self.mode {
            LengthMode::Karidi => Some(spec.karidi_length(g).value),
            LengthMode::NormalFormUpper => Some(big_to_f64(&spec.normal_form_length(g))),
            LengthMode::AbelianLower => {
                let norm = abelian_norm(spec, g);
                if norm == BigInt::from(0) {
                    Some(0.0)
                } else {
                    let q = (&norm + &self.abelian_step - 1) / &self.abelian_step;
                    Some(big_to_f64(&q))
                }
            }
            LengthMode::ExactBfs => {
                let ball = self.ball.as_mut().unwrap();
                let Some(target) = crate::scalar::convert::<i64>(&g.0) else {
                    return Ok(None);
                };
                loop {
                    if let Some(d) = ball.distance(&target) {
                        break Some(d as f64);
                    }
                    if ball.radius() >= self.options.radius_cap {
                        break None;
                    }
                    ball.grow(spec, self.options.budget)?;
                }
            }
        })
    }
}

fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// l1 norm of the weight-1 coordinates.
fn abelian_norm(spec: &GroupSpec, g: &Malcev) -> BigInt {
    spec.graded_coords(1).iter().map(|&k| g.0[k].abs()).sum()
}

pub fn growth_series(phi: &Endomorphism, g: &Malcev, n_max: u32, mode: LengthMode) -> Result<GrowthSeries> {
    growth_series_with(phi, g, n_max, mode, GrowthOptions::default())
}

/// `l(phi^n(g))` for `n = 1..=n_max`. Exact lengths past the radius cap are
/// omitted with a warning.
pub fn growth_series_with(
    phi: &Endomorphism,
    g: &Malcev,
    n_max: u32,
    mode: LengthMode,
    options: GrowthOptions,
) -> Result<GrowthSeries> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let spec = phi.spec();
    spec.check_len(g)?;
    if !phi.is_automorphism() {
        return Err(Error::NotAutomorphism("growth series need an automorphism".into()));
    }
    let mut oracle = LengthOracle::new(spec, mode, options)?;
    let mut entries = Vec::with_capacity(n_max as usize);
    let mut x = g.clone();
    let mut omitted = 0;
    for n in 1..=n_max {
        x = phi.apply(&x);
        match oracle.length(&x)? {
            Some(length) => entries.push(GrowthEntry { n, length, mode }),
            None => omitted += 1,
        }
    }
    if omitted > 0 {
        log::warn!(
            "{omitted} of {n_max} exact lengths exceed the BFS radius cap {} and were omitted",
            options.radius_cap
        );
    }
    Ok(GrowthSeries {
        entries,
        subject: g.clone(),
        automorphism: phi.images().to_vec(),
    })
}

pub fn entropy_estimate(series: &GrowthSeries) -> Result<EntropyEstimate<f64>> {
    entropy_estimate_with(series, &FitConfig::default())
}

pub fn entropy_estimate_with(series: &GrowthSeries, cfg: &FitConfig<f64>) -> Result<EntropyEstimate<f64>> {
    let mode = series.single_mode()?;
    fit_entropy(&series.points(mode), cfg)
}

pub fn poly_degree_fit(series: &GrowthSeries) -> Result<PolyFit<f64>> {
    let mode = series.single_mode()?;
    fit_poly_degree(&series.points(mode), &FitConfig::default())
}

/// Largest entropy estimate over several subjects, karidi mode.
fn max_entropy(phi: &Endomorphism, subjects: &[Malcev], n_max: u32) -> Result<EntropyEstimate<f64>> {
    if subjects.is_empty() {
        return Err(Error::InvalidParameter("no subjects given".into()));
    }
    let estimates: Vec<Result<EntropyEstimate<f64>>> = subjects
        .par_iter()
        .map(|g| entropy_estimate(&growth_series(phi, g, n_max, LengthMode::Karidi)?))
        .collect();
    let mut best: Option<EntropyEstimate<f64>> = None;
    for e in estimates {
        let e = e?;
        if best.is_none_or(|b| e.value > b.value) {
            best = Some(e);
        }
    }
    Ok(best.unwrap())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbelianComparison {
    pub spectral_radius: f64,
    pub entropy_estimate: f64,
    pub ratio: f64,
    pub window: (u64, u64),
    pub residual: f64,
}

/// Spectral radius of the induced map on `H_1` against the measured entropy.
pub fn abelian_comparison(phi: &Endomorphism, generators: &[Malcev], n_max: u32) -> Result<AbelianComparison> {
    if !phi.is_automorphism() {
        return Err(Error::NotAutomorphism("abelian comparison needs an automorphism".into()));
    }
    let radius = spectral_report(&phi.abelianization_matrix())?.radius;
    let est = max_entropy(phi, generators, n_max)?;
    Ok(AbelianComparison {
        spectral_radius: radius,
        entropy_estimate: est.value,
        ratio: est.value / radius,
        window: est.window,
        residual: est.residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerLevel {
    /// `k` in `N / gamma_k(N)`.
    pub level: usize,
    pub hirsch_length: usize,
    pub estimate: EntropyEstimate<f64>,
}

/// Entropy of the induced automorphism of `N / gamma_k(N)` for each level
/// `k` in `[2, class + 1]`, maximized over the projected subjects.
pub fn quotient_tower(phi: &Endomorphism, subjects: &[Malcev], levels: &[usize], n_max: u32) -> Result<Vec<TowerLevel>> {
    let spec = phi.spec();
    levels
        .iter()
        .map(|&k| {
            let induced = phi.truncate(k)?;
            let projected = subjects
                .iter()
                .map(|g| spec.project(g, k))
                .collect::<Result<Vec<_>>>()?;
            Ok(TowerLevel {
                level: k,
                hirsch_length: induced.spec().hirsch_length(),
                estimate: max_entropy(&induced, &projected, n_max)?,
            })
        })
        .collect()
}

/// Whether estimates do not decrease (beyond `tolerance`) as the level grows.
pub fn tower_is_monotone(levels: &[TowerLevel], tolerance: f64) -> bool {
    let mut sorted: Vec<&TowerLevel> = levels.iter().collect();
    sorted.sort_by_key(|l| l.level);
    sorted
        .windows(2)
        .all(|w| w[0].estimate.value <= w[1].estimate.value + tolerance)
}

/// Karidi box length of an element of a subgroup, computed in the Mal'cev
/// basis given by the subgroup's echelon rows.
pub fn subgroup_karidi(spec: &GroupSpec, lattice: &SubgroupLattice, g: &Malcev) -> Option<f64> {
    let coords = lattice.coordinates(spec, g)?;
    let weights: Vec<usize> = lattice
        .leading_positions()
        .iter()
        .map(|&p| spec.weight(p))
        .collect();
    Some(karidi_value(&coords, &weights))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteIndexReport {
    #[serde(serialize_with = "crate::json::serialize_bigint")]
    pub index: BigInt,
    pub ambient: EntropyEstimate<f64>,
    pub subgroup: EntropyEstimate<f64>,
    pub ratio: f64,
}

/// Entropy of `phi` restricted to a finite-index invariant subgroup, measured
/// in the subgroup's own Mal'cev coordinates, against the ambient estimate.
pub fn finite_index_experiment(phi: &Endomorphism, subgroup_generators: &[Malcev], n_max: u32) -> Result<FiniteIndexReport> {
    let spec = phi.spec();
    for g in subgroup_generators {
        spec.check_len(g)?;
    }
    let lattice = SubgroupLattice::closure(spec, subgroup_generators, crate::constructions::CLOSURE_ROUNDS)?;
    let index = lattice.index(spec.hirsch_length())?;
    if !lattice.rows().iter().all(|r| lattice.contains(spec, &phi.apply(r))) {
        return Err(Error::NotInvariant);
    }
    let ambient = max_entropy(phi, spec.generating_set(), n_max)?;
    let subjects: Vec<&Malcev> = subgroup_generators.iter().filter(|g| !g.is_identity()).collect();
    let estimates: Vec<Result<EntropyEstimate<f64>>> = subjects
        .par_iter()
        .map(|g| {
            let orbit = phi.orbit(g, n_max);
            let points: Vec<(u64, f64)> = orbit
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, x)| (n as u64, subgroup_karidi(spec, &lattice, x).expect("subgroup is invariant")))
                .collect();
            fit_entropy(&points, &FitConfig::default())
        })
        .collect();
    let mut best: Option<EntropyEstimate<f64>> = None;
    for e in estimates {
        let e = e?;
        if best.is_none_or(|b| e.value > b.value) {
            best = Some(e);
        }
    }
    let subgroup = best.ok_or_else(|| Error::InvalidParameter("no nontrivial subgroup generators".into()))?;
    Ok(FiniteIndexReport {
        index,
        ratio: subgroup.value / ambient.value,
        ambient,
        subgroup,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistortionConfig {
    /// The ball stops growing at this radius...
    pub max_radius: u32,
    /// ...or once it holds at least this many elements.
    pub max_ball: usize,
    pub budget: usize,
    /// Fewest elements of `gamma_i` the ball must contain.
    pub min_elements: usize,
}

impl Default for DistortionConfig {
    fn default() -> Self {
        DistortionConfig {
            max_radius: 16,
            max_ball: 400_000,
            budget: DEFAULT_BUDGET,
            min_elements: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionProfile {
    pub weight: usize,
    /// Radius `R` of the enumerated ball; the envelope is exact up to `2R`.
    pub radius: u32,
    pub ball_size: usize,
    /// Elements of `gamma_i` inside the ball.
    pub layer_elements: usize,
    /// `(r, D(r))`: largest intrinsic length among layer elements of ambient
    /// length at most `r`.
    pub envelope: Vec<(u32, u64)>,
    pub fit: PolyFit<f64>,
}

/// Distortion of `gamma_i` in `N`: the largest l1 norm of the weight-`i`
/// coordinates among elements of `gamma_i` within distance `r`, fitted
/// against `r` on a log-log scale.
///
/// For `i >= 2` every element of `gamma_i` at distance at most `2R` is a
/// product `u v` of two elements of the radius-`R` ball with `v` in the coset
/// of `u^-1` modulo `gamma_i`, which extends the exact envelope to `2R`.
pub fn distortion_profile(spec: &GroupSpec, i: usize, cfg: DistortionConfig) -> Result<DistortionProfile> {
    if i == 0 || i > spec.class() {
        return Err(Error::OutOfRange {
            what: "weight",
            value: i as i64,
            range: format!("[1, {}]", spec.class()),
        });
    }
    let mut ball = CayleyBall::new(spec)?;
    while ball.radius() < cfg.max_radius && ball.len() < cfg.max_ball {
        ball.grow(spec, cfg.budget)?;
    }
    let radius = ball.radius();
    let elems: Vec<(&[i64], u32)> = ball.iter().collect();
    let layer = spec.basis().weight_range(i);
    let prefix = layer.start;
    let in_layer = |e: &[i64]| e[..prefix].iter().all(|&x| x == 0);
    let layer_elements = elems.iter().filter(|(e, _)| in_layer(e)).count();
    if layer_elements < cfg.min_elements {
        return Err(Error::InsufficientData(format!(
            "the radius-{radius} ball holds {layer_elements} elements of gamma_{i}, need {}",
            cfg.min_elements
        )));
    }
    // best[s] = largest intrinsic length realized at ambient length <= s.
    let (reach, best) = if i == 1 {
        (radius, (0..=radius).map(|r| r as u64).collect::<Vec<_>>())
    } else {
        let mut fibers: HashMap<&[i64], Vec<usize>> = HashMap::new();
        for (k, (e, _)) in elems.iter().enumerate() {
            fibers.entry(&e[..prefix]).or_default().push(k);
        }
        let width = 2 * radius as usize + 1;
        let best = elems
            .par_iter()
            .map(|(u, du)| {
                let mut local = vec![0u64; width];
                let inv = spec.inv_in::<i64>(u)?;
                if let Some(fiber) = fibers.get(&inv[..prefix]) {
                    for &k in fiber {
                        let (v, dv) = elems[k];
                        let z = spec.mul_in::<i64>(u, v)?;
                        debug_assert!(in_layer(&z));
                        let norm: u64 = z[layer.clone()].iter().map(|x| x.unsigned_abs()).sum();
                        let s = (du + dv) as usize;
                        local[s] = local[s].max(norm);
                    }
                }
                Some(local)
            })
            .try_reduce(
                || vec![0u64; width],
                |a, b| Some(a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect()),
            )
            .ok_or_else(|| Error::InvalidParameter("ball coordinates exceed 64 bits".into()))?;
        (2 * radius, best)
    };
    let mut envelope = Vec::with_capacity(best.len());
    let mut running = 0;
    for (r, &b) in best.iter().enumerate() {
        running = running.max(b);
        envelope.push((r as u32, running));
    }
    // Fit on the record points of the upper half, where the envelope jumps.
    let lo = reach / 2;
    let records: Vec<(f64, f64)> = envelope
        .iter()
        .enumerate()
        .filter(|&(r, &(_, d))| r as u32 >= lo.max(1) && d > 0 && (r == 0 || d > envelope[r - 1].1))
        .map(|(_, &(r, d))| ((r as f64).ln(), (d as f64).ln()))
        .collect();
    if records.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "the envelope has {} records in [{lo}, {reach}]",
            records.len()
        )));
    }
    let (degree, correlation) = log_log_slope(&records);
    Ok(DistortionProfile {
        weight: i,
        radius,
        ball_size: ball.len(),
        layer_elements,
        envelope,
        fit: PolyFit {
            degree: degree.max(0.0),
            correlation,
            window: (lo as u64, reach as u64),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KaridiBand {
    pub radius: u32,
    pub elements: usize,
    /// Bounds of `geodesic / max(karidi, 1)` over the nontrivial ball elements.
    pub lower: f64,
    pub upper: f64,
}

impl KaridiBand {
    pub fn width(&self) -> f64 {
        self.upper / self.lower
    }
}

/// Two-sided constants comparing exact word length with the Karidi box length
/// over a complete ball.
pub fn karidi_band<P: Polycyclic>(group: &P, radius: u32, budget: usize) -> Result<KaridiBand> {
    let ball = CayleyBall::build(group, radius, budget)?;
    let weights: Vec<usize> = (0..group.dim()).map(|k| group.weight(k)).collect();
    let (lower, upper) = ball
        .iter()
        .skip(1)
        .par_bridge()
        .map(|(e, d)| {
            let k = karidi_value(&crate::scalar::widen(e), &weights).max(1.0);
            let q = d as f64 / k;
            (q, q)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    Ok(KaridiBand {
        radius,
        elements: ball.len(),
        lower,
        upper,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub rank: usize,
    pub class: usize,
    /// Largest fitted degree over the generators.
    pub degree: f64,
}

/// Fitted polynomial degree of the Jordan-block shear `x_1 -> x_1`,
/// `x_j -> x_{j-1} x_j` on free nilpotent groups of the given ranks. Only
/// records the numbers; no bound is asserted.
pub fn unipotent_degree_sweep(ranks: &[usize], class: usize, n_max: u32) -> Result<Vec<SweepRow>> {
    ranks
        .iter()
        .map(|&m| {
            let spec = GroupSpec::free(m, class)?;
            let images = (0..m)
                .map(|j| {
                    if j == 0 {
                        spec.generator(0)
                    } else {
                        spec.multiply(&spec.generator(j - 1), &spec.generator(j))
                    }
                })
                .collect();
            let phi = Endomorphism::new(&spec, images)?;
            let fits = (0..m)
                .into_par_iter()
                .map(|j| poly_degree_fit(&growth_series(&phi, &spec.generator(j), n_max, LengthMode::Karidi)?))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow {
                rank: m,
                class,
                degree: fits.iter().map(|f| f.degree).fold(0.0, f64::max),
            })
        })
        .collect()
}

/// A builtin automorphism together with its growth series, for quick runs.
pub fn builtin_series(name: &str, spec: &GroupSpec, g: &Malcev, n_max: u32, mode: LengthMode) -> Result<GrowthSeries> {
    growth_series(&builtin(name, spec)?, g, n_max, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis() -> GroupSpec {
        GroupSpec::free(2, 2).unwrap()
    }

    fn lengths(s: &GrowthSeries) -> Vec<f64> {
        s.entries.iter().map(|e| e.length).collect()
    }

    #[test]
    fn karidi_series_examples() {
        let h = heis();
        let x1 = h.generator(0);
        let x2 = h.generator(1);
        let fib = builtin_series("fib", &h, &x1, 3, LengthMode::Karidi).unwrap();
        assert_eq!(lengths(&fib), vec![1.0, 2.0, 3.0]);
        let u = builtin_series("unipotent-shear", &h, &x2, 5, LengthMode::Karidi).unwrap();
        assert_eq!(lengths(&u), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let z = builtin_series("central-shear", &h, &x1, 9, LengthMode::Karidi).unwrap();
        let expect: Vec<f64> = (1..=9).map(|n| (n as f64).sqrt().max(1.0)).collect();
        assert_eq!(lengths(&z), expect);
    }

    #[test]
    fn mode_tags() {
        for m in LengthMode::ALL {
            assert_eq!(m.tag().parse::<LengthMode>().unwrap(), m);
        }
        assert!(matches!("bogus".parse::<LengthMode>(), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn modes_sandwich() {
        let h = heis();
        let phi = builtin("fib", &h).unwrap();
        let g = h.generator(1);
        let mut all = growth_series(&phi, &g, 6, LengthMode::ExactBfs).unwrap();
        for m in [LengthMode::AbelianLower, LengthMode::NormalFormUpper] {
            all = all.merge(&growth_series(&phi, &g, 6, m).unwrap());
        }
        assert_eq!(all.sandwich_violation(), None);
        assert_eq!(all.modes().len(), 3);
        assert!(entropy_estimate(&all).is_err());
    }

    #[test]
    fn exact_lengths_past_cap_are_omitted() {
        let h = heis();
        let phi = builtin("fib", &h).unwrap();
        let opts = GrowthOptions { radius_cap: 4, budget: DEFAULT_BUDGET };
        let s = growth_series_with(&phi, &h.generator(0), 8, LengthMode::ExactBfs, opts).unwrap();
        assert!(s.entries.len() < 8);
        assert!(s.entries.iter().all(|e| e.length <= 4.0));
    }

    #[test]
    fn identity_comparison_is_exact() {
        let h = heis();
        let id = builtin("identity", &h).unwrap();
        let r = abelian_comparison(&id, h.generating_set(), 20).unwrap();
        assert_eq!((r.spectral_radius, r.entropy_estimate, r.ratio), (1.0, 1.0, 1.0));
    }

    #[test]
    fn heisenberg_center_distortion() {
        let p = distortion_profile(&heis(), 2, DistortionConfig::default()).unwrap();
        assert_eq!(p.envelope[8].1, 4);
        assert_eq!(p.envelope[16].1, 16);
        assert!((p.fit.degree - 2.0).abs() < 0.2, "{:?}", p.fit);
        let whole = distortion_profile(&heis(), 1, DistortionConfig::default()).unwrap();
        assert!((whole.fit.degree - 1.0).abs() < 1e-9);
        assert!(distortion_profile(&heis(), 3, DistortionConfig::default()).is_err());
    }

    #[test]
    fn karidi_band_is_finite() {
        let b = karidi_band(&heis(), 5, DEFAULT_BUDGET).unwrap();
        assert!(b.lower > 0.0 && b.upper.is_finite() && b.lower <= b.upper);
    }
}
