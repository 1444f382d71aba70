mod common;

use nalgebra::DMatrix;
use nilentropy::builtins::builtin;
use nilentropy::constructions::{
    lower_central_series, relator_check, semidirect_unipotent, subgroup_closure, surface_lie_ranks,
    surface_quotient, surface_relator, upper_central_lengths,
};
use nilentropy::growth::{
    entropy_estimate, finite_index_experiment, growth_series, poly_degree_fit, quotient_tower, tower_is_monotone,
    unipotent_degree_sweep, LengthMode,
};
use nilentropy::{spectral_report, Endomorphism, Error, GroupSpec, IntegerMatrix, Malcev, Polycyclic, WordExpr};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{basis_series, free_reduce, normal_form_series, random_word, word_series};

fn v(x: &[i64]) -> Malcev {
    Malcev::from_i64s(x)
}

fn random_element(spec: &GroupSpec, rng: &mut ChaCha8Rng, len: usize) -> Malcev {
    let w = random_word(rng, spec.rank(), len);
    spec.eval_word(&WordExpr { letters: w }).unwrap()
}

#[test]
fn words_match_the_magnus_oracle_in_several_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (m, c, count) in [(3, 3, 500), (2, 5, 300), (3, 4, 100)] {
        let spec = GroupSpec::free(m, c).unwrap();
        let series = basis_series(spec.basis());
        for _ in 0..count {
            let word = random_word(&mut rng, m, 20);
            let g = spec.eval_word(&WordExpr { letters: word.clone() }).unwrap();
            assert_eq!(
                normal_form_series(&series, &g),
                word_series(c, &free_reduce(&word)),
                "F_{m}/gamma_{} word {word:?}",
                c + 1
            );
        }
    }
}

#[test]
fn products_match_the_magnus_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let spec = GroupSpec::free(2, 4).unwrap();
    let series = basis_series(spec.basis());
    for _ in 0..300 {
        let a = random_element(&spec, &mut rng, 25);
        let b = random_element(&spec, &mut rng, 25);
        let ab = spec.multiply(&a, &b);
        assert_eq!(
            normal_form_series(&series, &ab),
            normal_form_series(&series, &a).mul(&normal_form_series(&series, &b))
        );
        let e = rng.gen_range(-40i64..=40);
        assert_eq!(
            normal_form_series(&series, &spec.power(&a, &BigInt::from(e))),
            normal_form_series(&series, &a).pow(e as i128)
        );
    }
}

#[test]
fn heisenberg_closed_formula() {
    // x1^a x2^b c^z with c = [x2, x1]: moving x2^b past x1^a' yields c^(a' b).
    let h = GroupSpec::free(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let x: Vec<i64> = (0..6).map(|_| rng.gen_range(-1000..=1000)).collect();
        let got = h.multiply(&v(&x[..3]), &v(&x[3..]));
        let expect = v(&[x[0] + x[3], x[1] + x[4], x[2] + x[5] + x[3] * x[1]]);
        assert_eq!(got, expect);
    }
}

#[test]
fn spectral_radius_matches_floating_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (n, count) in [(2usize, 40), (3, 30), (4, 10)] {
        for _ in 0..count {
            let entries: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-4..=4)).collect();
            let rows: Vec<&[i64]> = entries.chunks(n).collect();
            let report = spectral_report(&IntegerMatrix::from_i64(&rows)).unwrap();
            let m = DMatrix::from_row_slice(n, n, &entries.iter().map(|&x| x as f64).collect::<Vec<_>>());
            let oracle = m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(
                (report.radius - oracle).abs() <= 1e-6 * oracle.max(1.0),
                "{entries:?}: {} vs {oracle}",
                report.radius
            );
        }
    }
}

/// Coefficients of `prod_n (1 - t^n)^(r_n)` up to degree `c`.
fn euler_product(ranks: &[usize], c: usize) -> Vec<i64> {
    let mut p = vec![0i64; c + 1];
    p[0] = 1;
    for (i, &r) in ranks.iter().enumerate() {
        let n = i + 1;
        for _ in 0..r {
            for d in (n..=c).rev() {
                p[d] -= p[d - n];
            }
        }
    }
    p
}

#[test]
fn surface_ranks_satisfy_the_generating_function() {
    for g in 1..=3 {
        for c in 1..=4 {
            if g == 3 && c == 4 {
                continue;
            }
            let ranks = surface_lie_ranks(g, c).unwrap();
            let mut expect = vec![0i64; c + 1];
            expect[0] = 1;
            expect[1] = -2 * g as i64;
            if c >= 2 {
                expect[2] = 1;
            }
            assert_eq!(euler_product(&ranks, c), expect, "genus {g} class {c}: {ranks:?}");
        }
    }
    assert_eq!(surface_quotient(2, 2).unwrap().graded_ranks(), vec![4, 5]);
    assert_eq!(surface_quotient(1, 4).unwrap().graded_ranks(), vec![2, 0, 0, 0]);
}

#[test]
fn surface_relator_dies_in_the_quotient() {
    let s = surface_quotient(2, 3).unwrap();
    let free = GroupSpec::free(4, 3).unwrap();
    let r = surface_relator(&free, 2);
    assert!(!r.is_identity());
    assert!(s.reduce(&r).is_identity());
}

#[test]
fn relator_check_for_genus_two() {
    let f = GroupSpec::free(4, 2).unwrap();
    let mut swap: Vec<Malcev> = (0..4).map(|i| f.generator(i)).collect();
    swap[0] = f.inverse(&f.generator(1));
    swap[1] = f.generator(0);
    assert!(relator_check(&f, &swap, 2, 1).unwrap().holds);
    let mut square: Vec<Malcev> = (0..4).map(|i| f.generator(i)).collect();
    square[0] = f.power(&f.generator(0), &BigInt::from(2));
    assert!(!relator_check(&f, &square, 2, 1).unwrap().holds);

    // At class 3 the swapped relator is [a1,b1]^-1 [a2,b2], and no conjugate
    // of the relator or its inverse equals it.
    let f3 = GroupSpec::free(4, 3).unwrap();
    let mut swap3: Vec<Malcev> = (0..4).map(|i| f3.generator(i)).collect();
    swap3[0] = f3.inverse(&f3.generator(1));
    swap3[1] = f3.generator(0);
    let r = relator_check(&f3, &swap3, 2, 2).unwrap();
    assert!(!r.holds);
    assert_eq!(r.radius, 2);
}

#[test]
fn semidirect_product_is_associative() {
    let h = GroupSpec::free(2, 2).unwrap();
    let s = semidirect_unipotent(&h, &builtin("unipotent-shear", &h).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let random = |rng: &mut ChaCha8Rng| {
        let n: Vec<i64> = (0..3).map(|_| rng.gen_range(-20..=20)).collect();
        s.element(rng.gen_range(-6..=6), &v(&n))
    };
    for _ in 0..10_000 {
        let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
        assert_eq!(s.multiply(&s.multiply(&a, &b), &c), s.multiply(&a, &s.multiply(&b, &c)));
    }
}

#[test]
fn semidirect_rejects_non_unipotent_monodromy() {
    let f = GroupSpec::free(2, 3).unwrap();
    let fib = builtin("fib", &f).unwrap();
    assert!(matches!(semidirect_unipotent(&f, &fib), Err(Error::NotUnipotent)));
    let u = builtin("unipotent-shear", &f).unwrap();
    let s = semidirect_unipotent(&f, &u).unwrap();
    assert!(s.class() <= f.hirsch_length() + 1);
}

#[test]
fn free_lower_central_series_is_the_weight_filtration() {
    for (m, c) in [(2, 4), (3, 3)] {
        let spec = GroupSpec::free(m, c).unwrap();
        let series = lower_central_series(&spec).unwrap();
        assert_eq!(series.len(), c);
        for (i, term) in series.iter().enumerate() {
            let start = spec.basis().weight_range(i + 1).start;
            assert_eq!(term.leading_positions(), (start..spec.len()).collect::<Vec<_>>());
            let gens: Vec<Malcev> = (start..spec.len()).map(|k| Malcev::unit(spec.len(), k)).collect();
            assert_eq!(subgroup_closure(&gens, &spec).unwrap().hirsch_length(), spec.len() - start);
        }
    }
}

fn random_trivial_automorphism(spec: &GroupSpec, rng: &mut ChaCha8Rng) -> Endomorphism {
    let images = (0..spec.rank())
        .map(|i| {
            let mut d = spec.identity();
            for k in spec.basis().weight_range(2).start..spec.len() {
                d.0[k] = BigInt::from(rng.gen_range(-3i64..=3));
            }
            spec.multiply(&spec.generator(i), &d)
        })
        .collect();
    Endomorphism::new(spec, images).unwrap()
}

#[test]
fn upper_central_length_survives_trivial_semidirect_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (m, c) in [(2, 2), (2, 3)] {
        let spec = GroupSpec::free(m, c).unwrap();
        let base = upper_central_lengths(&spec, c).unwrap();
        assert!(base.agrees());
        for _ in 0..4 {
            let phi = random_trivial_automorphism(&spec, &mut rng);
            let s = semidirect_unipotent(&spec, &phi).unwrap();
            let uc = upper_central_lengths(&s, spec.hirsch_length() + 1).unwrap();
            assert_eq!(uc.length, base.length);
            assert!(uc.agrees());
        }
    }
}

#[test]
fn trivial_automorphisms_grow_polynomially() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spec = GroupSpec::free(2, 3).unwrap();
    for _ in 0..5 {
        let phi = random_trivial_automorphism(&spec, &mut rng);
        for g in spec.generating_set() {
            let s = growth_series(&phi, g, 30, LengthMode::Karidi).unwrap();
            assert!((entropy_estimate(&s).unwrap().value - 1.0).abs() < 0.05);
            assert!(poly_degree_fit(&s).unwrap().degree.is_finite());
        }
    }
}

#[test]
fn fibonacci_karidi_coordinates() {
    let h = GroupSpec::free(2, 2).unwrap();
    let fib = builtin("fib", &h).unwrap();
    let orbit = fib.orbit(&h.generator(0), 3);
    assert_eq!(orbit[1..], [v(&[1, 1, 0]), v(&[2, 1, 1]), v(&[3, 2, 2])]);
}

#[test]
fn towers_are_monotone() {
    let base = GroupSpec::free(2, 4).unwrap();
    for name in ["fib", "unipotent-shear", "identity", "central-shear"] {
        let phi = builtin(name, &base).unwrap();
        let tower = quotient_tower(&phi, base.generating_set(), &[2, 3, 4, 5], 24).unwrap();
        assert!(tower_is_monotone(&tower, 0.02), "{name}: {tower:?}");
        if name != "fib" {
            assert!(tower.iter().all(|l| (l.estimate.value - 1.0).abs() < 0.05), "{name}");
        }
    }
}

#[test]
fn finite_index_variants() {
    let h = GroupSpec::free(2, 2).unwrap();
    let kernel = [v(&[2, 0, 0]), v(&[0, 2, 0]), v(&[0, 0, 1])];
    for name in ["identity", "central-shear"] {
        let r = finite_index_experiment(&builtin(name, &h).unwrap(), &kernel, 30).unwrap();
        assert!((r.subgroup.value - 1.0).abs() < 0.05, "{name}: {r:?}");
    }
    let fib = builtin("fib", &h).unwrap();
    // <x1^2, x2, c> is not fib-invariant: x2 -> x1.
    let lopsided = [v(&[2, 0, 0]), v(&[0, 1, 0])];
    assert!(matches!(finite_index_experiment(&fib, &lopsided, 30), Err(Error::NotInvariant)));
    assert!(matches!(
        finite_index_experiment(&fib, &[v(&[0, 0, 1])], 30),
        Err(Error::InfiniteIndex)
    ));
}

#[test]
fn karidi_estimates_ignore_extra_generators() {
    // The box length only sees coordinates, so adding c to the generating set
    // leaves the estimate unchanged; exact lengths shrink by a bounded factor.
    let h = GroupSpec::free(2, 2).unwrap();
    let h3 = h.clone().with_generating_set(vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
    let a = entropy_estimate(&growth_series(&builtin("fib", &h).unwrap(), &h.generator(0), 30, LengthMode::Karidi).unwrap()).unwrap();
    let b = entropy_estimate(&growth_series(&builtin("fib", &h3).unwrap(), &h3.generator(0), 30, LengthMode::Karidi).unwrap()).unwrap();
    assert!((a.value - b.value).abs() < 1e-9);
    let ea = growth_series(&builtin("fib", &h).unwrap(), &h.generator(1), 5, LengthMode::ExactBfs).unwrap();
    let eb = growth_series(&builtin("fib", &h3).unwrap(), &h3.generator(1), 5, LengthMode::ExactBfs).unwrap();
    for (x, y) in ea.entries.iter().zip(&eb.entries) {
        assert!(y.length <= x.length && x.length <= 4.0 * y.length.max(1.0));
    }
}

#[test]
fn centre_fixing_automorphism_with_positive_entropy() {
    // x1 -> x1^2 x2, x2 -> x1 x2 has determinant 1, so it fixes the centre.
    let h = GroupSpec::free(2, 2).unwrap();
    let words: Vec<WordExpr> = ["x1 x1 x2", "x1 x2"].iter().map(|w| w.parse().unwrap()).collect();
    let phi = Endomorphism::from_words(&h, &words).unwrap();
    assert_eq!(phi.graded_matrix(2).unwrap(), IntegerMatrix::from_i64(&[&[1]]));
    assert!(phi.is_automorphism());
    let c = h.commutator(&h.generator(1), &h.generator(0));
    assert_eq!(phi.apply(&c), c);
    let expected = (3.0 + 5f64.sqrt()) / 2.0;
    let radius = spectral_report(&phi.abelianization_matrix()).unwrap().radius;
    assert!((radius - expected).abs() < 1e-9);
    let est = entropy_estimate(&growth_series(&phi, &h.generator(0), 24, LengthMode::Karidi).unwrap()).unwrap();
    assert!((est.value / expected - 1.0).abs() < 0.05, "{est:?}");
}

#[test]
fn unipotent_sweep_degrees_grow_with_rank() {
    let rows = unipotent_degree_sweep(&[2, 3], 2, 30).unwrap();
    assert_eq!(rows.len(), 2);
    // A Jordan block of size m moves x_m at degree m - 1 in the abelianization.
    for r in &rows {
        assert!(r.degree >= (r.rank - 1) as f64 - 0.15, "{r:?}");
    }
    assert!(rows[1].degree > rows[0].degree);
}
