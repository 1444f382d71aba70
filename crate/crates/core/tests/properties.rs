use std::sync::OnceLock;

use nilentropy::builtins::builtin;
use nilentropy::fit::{fit_entropy, FitConfig};
use nilentropy::growth::{growth_series, LengthMode};
use nilentropy::json::{bigint_from_json, bigint_to_json, malcev_from_json, malcev_to_json};
use nilentropy::{Endomorphism, GroupSpec, Malcev, MalcevVector, Polycyclic, SubgroupLattice};
use num_bigint::BigInt;
use proptest::prelude::*;

fn f4() -> &'static GroupSpec {
    static SPEC: OnceLock<GroupSpec> = OnceLock::new();
    SPEC.get_or_init(|| GroupSpec::free(2, 3).unwrap())
}

/// `F_3 / gamma_3` modulo the commutator `[x1, x3]`.
fn quotient() -> &'static GroupSpec {
    static SPEC: OnceLock<GroupSpec> = OnceLock::new();
    SPEC.get_or_init(|| {
        let f = GroupSpec::free(3, 2).unwrap();
        let r = f.commutator(&f.generator(0), &f.generator(2));
        f.with_relators(&[r]).unwrap()
    })
}

fn element(spec: &'static GroupSpec, bound: i64) -> impl Strategy<Value = Malcev> {
    prop::collection::vec(-bound..=bound, spec.len()).prop_map(move |v| spec.reduce(&Malcev::from_i64s(&v)))
}

fn automorphism(spec: &'static GroupSpec) -> impl Strategy<Value = Endomorphism> {
    // A product of builtins, then a homologically trivial twist.
    let names = prop::sample::select(vec!["fib", "unipotent-shear", "central-shear", "identity"]);
    (prop::collection::vec(names, 1..4), prop::collection::vec(-3i64..=3, 2 * spec.len())).prop_map(
        move |(names, twist)| {
            let mut phi = Endomorphism::identity(spec);
            for n in names {
                phi = builtin(n, spec).unwrap().compose(&phi).unwrap();
            }
            let start = spec.basis().weight_range(2).start;
            let images = (0..2)
                .map(|i| {
                    let mut d = spec.identity();
                    for k in start..spec.len() {
                        d.0[k] = BigInt::from(twist[i * spec.len() + k]);
                    }
                    spec.multiply(&phi.images()[i], &d)
                })
                .collect();
            Endomorphism::new(spec, images).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_axioms(a in element(f4(), 50), b in element(f4(), 50), c in element(f4(), 50)) {
        let g = f4();
        prop_assert_eq!(g.multiply(&g.multiply(&a, &b), &c), g.multiply(&a, &g.multiply(&b, &c)));
        prop_assert_eq!(g.multiply(&a, &g.identity()), a.clone());
        prop_assert!(g.multiply(&a, &g.inverse(&a)).is_identity());
        prop_assert!(g.multiply(&g.inverse(&a), &a).is_identity());
    }

    #[test]
    fn quotient_axioms(a in element(quotient(), 20), b in element(quotient(), 20), c in element(quotient(), 20)) {
        let g = quotient();
        let ab_c = g.multiply(&g.multiply(&a, &b), &c);
        prop_assert_eq!(ab_c.clone(), g.multiply(&a, &g.multiply(&b, &c)));
        prop_assert_eq!(g.reduce(&ab_c), ab_c);
        prop_assert!(g.multiply(&a, &g.inverse(&a)).is_identity());
    }

    #[test]
    fn fixed_width_agrees_with_bigint(a in element(f4(), 1000), b in element(f4(), 1000)) {
        let g = f4();
        let small = |m: &Malcev| m.0.iter().map(|x| i64::try_from(x).unwrap()).collect::<Vec<_>>();
        let fast = g.mul_in::<i64>(&small(&a), &small(&b)).unwrap();
        prop_assert_eq!(Malcev::from_i64s(&fast), g.multiply(&a, &b));
    }

    #[test]
    fn powers_add(a in element(f4(), 10), x in -30i64..30, y in -30i64..30) {
        let g = f4();
        let p = |n: i64| g.power(&a, &BigInt::from(n));
        prop_assert_eq!(p(x + y), g.multiply(&p(x), &p(y)));
    }

    #[test]
    fn endomorphisms_are_homomorphisms(phi in automorphism(f4()), a in element(f4(), 20), b in element(f4(), 20)) {
        let g = f4();
        prop_assert_eq!(phi.apply(&g.multiply(&a, &b)), g.multiply(&phi.apply(&a), &phi.apply(&b)));
        prop_assert!(phi.is_automorphism());
        let inv = phi.inverse().unwrap();
        prop_assert_eq!(inv.apply(&phi.apply(&a)), a.clone());
        prop_assert_eq!(phi.iterate(3).apply(&a), phi.apply(&phi.apply(&phi.apply(&a))));
    }

    #[test]
    fn closure_contains_its_generators(gens in prop::collection::vec(element(f4(), 4), 1..4), a in element(f4(), 4)) {
        let g = f4();
        let lattice = SubgroupLattice::closure(g, &gens, 64).unwrap();
        for x in &gens {
            prop_assert!(lattice.contains(g, x));
        }
        let prod = gens.iter().fold(g.identity(), |acc, x| g.multiply(&acc, x));
        prop_assert!(lattice.contains(g, &prod));
        let conj = g.multiply(&g.multiply(&a, &gens[0]), &g.inverse(&a));
        let normal = SubgroupLattice::normal_closure(g, &gens, 64).unwrap();
        prop_assert!(normal.contains(g, &conj));
        prop_assert!(lattice.is_subgroup_of(g, &normal));
    }

    #[test]
    fn json_integers_round_trip(v in prop::collection::vec(any::<i64>(), 1..6), shift in 0u32..80) {
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x) << shift).collect();
        for x in &big {
            prop_assert_eq!(&bigint_from_json(&bigint_to_json(x)).unwrap(), x);
        }
        let m = MalcevVector(big);
        prop_assert_eq!(malcev_from_json(&malcev_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn malcev_text_round_trip(v in prop::collection::vec(-10_000i64..10_000, 1..8)) {
        let m = Malcev::from_i64s(&v);
        prop_assert_eq!(m.to_string().parse::<Malcev>().unwrap(), m);
    }

    #[test]
    fn synthetic_rates_are_recovered(k in 1.0f64..2.5, r in 0.0f64..3.0, c in 0.1f64..100.0) {
        let points: Vec<(u64, f64)> = (1..=30u64)
            .map(|n| (n, c * (n as f64).powf(r) * k.powi(n as i32)))
            .collect();
        let est = fit_entropy(&points, &FitConfig::default()).unwrap();
        prop_assert!((est.value / k - 1.0).abs() < 0.01);
        prop_assert!((est.poly_exponent - r).abs() < 0.05);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn length_modes_are_ordered(phi in automorphism(f4()), i in 0usize..2) {
        let g = f4().generator(i);
        let mut s = growth_series(&phi, &g, 3, LengthMode::ExactBfs).unwrap();
        for m in [LengthMode::AbelianLower, LengthMode::NormalFormUpper] {
            s = s.merge(&growth_series(&phi, &g, 3, m).unwrap());
        }
        prop_assert_eq!(s.sandwich_violation(), None);
    }
}
