use num_traits::{Signed, Zero};
use proptest::prelude::*;

use multiquad::cdk::{parse_ladder, sample_ladder};
use multiquad::dd::DoubleDouble;
use multiquad::measures::{BackendTag, MeasureSystem, MomentProvider};
use multiquad::mop::{recurrence_table, type1_initials, type2_polynomial};
use multiquad::quadrature::{a_from_c, c_from_a, CConstants, RuleBuilder, RuleOptions};
use multiquad::scalar::{parse_rational, ratio};
use multiquad::spectral::build_hessenberg;
use multiquad::{Polynomial, Rational, Scalar};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |q| !q.is_zero())
}

fn lower_triangular(r: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    let rows: Vec<_> = (1..=r)
        .map(|j| (prop::collection::vec(small_rational(), j - 1), nonzero_rational()))
        .collect();
    rows.prop_map(|rows| {
        rows.into_iter()
            .map(|(mut row, diag)| {
                row.push(diag);
                row
            })
            .collect()
    })
}

/// Exponents with pairwise non-integer differences, so that `x^α dx` on
/// `[0, 1]` form an AT system.
fn jp_alphas(r: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::btree_set(0i64..60, r).prop_map(|set| set.into_iter().map(|k| ratio(k, 61)).collect())
}

/// Exponents at least 8/61 apart, like the shipped `j/r` family. Closer
/// exponents make the moment matrices too ill-conditioned for a floating
/// rank test.
fn jp_spread(r: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0i64..12, r)
        .prop_map(|offsets| offsets.into_iter().enumerate().map(|(j, o)| ratio(20 * j as i64 + o, 61)).collect())
}

fn jp_system(alphas: &[Rational]) -> MeasureSystem {
    MeasureSystem::new(alphas.iter().cloned().map(MomentProvider::jacobi_pineiro).collect()).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn c_and_a_maps_are_inverse(c in (1usize..=4).prop_flat_map(lower_triangular)) {
        let c = CConstants { values: c };
        let a = a_from_c(&c).unwrap();
        prop_assert_eq!(c_from_a(&a).unwrap(), c.clone());
        prop_assert_eq!(a_from_c(&c_from_a(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn parse_rational_round_trips(q in small_rational()) {
        prop_assert_eq!(parse_rational(&q.to_string()).unwrap(), q.clone());
        // and through a ten-digit decimal
        let scaled = &q / ratio(200, 1);
        let text = format!("{:.10}", multiquad::scalar::rational_to_f64(&scaled));
        let back = parse_rational(&text).unwrap();
        prop_assert!((back - scaled).abs() < ratio(1, 10_000_000_000));
    }

    #[test]
    fn sample_ladder_is_distinct(count in 1usize..300) {
        let ladder = sample_ladder(count);
        prop_assert_eq!(ladder.len(), count);
        let text = ladder.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_ladder(&text).unwrap(), ladder);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn double_double_table_tracks_the_exact_one(alphas in (2usize..=3).prop_flat_map(jp_spread)) {
        let system = jp_system(&alphas);
        let exact = recurrence_table::<Rational>(&system, 6).unwrap();
        let dd = recurrence_table::<DoubleDouble>(&system, 6).unwrap();
        let scale = exact.max_magnitude(6);
        for (row_q, row_d) in exact.rows().iter().zip(dd.rows()) {
            for (q, d) in row_q.iter().zip(row_d) {
                let err = (DoubleDouble::from_rational(q) - *d).to_f64_lossy().abs();
                prop_assert!(err <= 1e-20 * scale, "{q} vs {d}");
            }
        }
    }

    #[test]
    fn mixing_leaves_type_two_data_unchanged(alpha in lower_triangular(2), jp in jp_alphas(2)) {
        let system = jp_system(&jp);
        let mixed = system.mixed(&alpha).unwrap();
        prop_assert_eq!(recurrence_table::<Rational>(&system, 5).unwrap(), recurrence_table::<Rational>(&mixed, 5).unwrap());
        for n in 0..=5 {
            prop_assert_eq!(type2_polynomial::<Rational>(&system, n).unwrap(), type2_polynomial::<Rational>(&mixed, n).unwrap());
        }
        // the initials change, but still satisfy the C-A system of the new measures
        let a = type1_initials::<Rational>(&mixed).unwrap();
        let c = c_from_a(&a).unwrap();
        prop_assert_eq!(a_from_c(&c).unwrap(), a);
    }

    #[test]
    fn characteristic_polynomial_is_the_type_two_polynomial(alphas in (1usize..=3).prop_flat_map(jp_alphas), n in 1usize..=6) {
        let system = jp_system(&alphas);
        let table = recurrence_table::<Rational>(&system, n).unwrap();
        let l = build_hessenberg(&table, n).unwrap();
        prop_assert_eq!(l.characteristic_polynomial().unwrap(), type2_polynomial::<Rational>(&system, n).unwrap());
    }

    #[test]
    fn random_jacobi_pineiro_rules_hold(alphas in (2usize..=3).prop_flat_map(jp_alphas), n in 1usize..=10) {
        let system = jp_system(&alphas);
        let builder = RuleBuilder::new(&system, n).unwrap();
        let rule = builder.rule(n, BackendTag::Float64, RuleOptions::default()).unwrap();
        prop_assert!(rule.real);
        prop_assert!(rule.route_gap <= 1e-9, "{}", rule.route_gap);
        prop_assert!(rule.certificate.holds, "{:?}", rule.certificate);
        // zeros of an AT system lie in the support
        prop_assert!(rule.nodes.iter().all(|z| z.re > 0.0 && z.re < 1.0));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn discrete_measure_is_recovered(
        points in prop::collection::btree_set(-20i64..=20, 1..=4),
        masses in prop::collection::vec(1i64..=9, 4),
    ) {
        let points: Vec<Rational> = points.into_iter().map(|p| ratio(p, 4)).collect();
        let masses: Vec<Rational> = masses[..points.len()].iter().map(|&m| ratio(m, 3)).collect();
        let system = MeasureSystem::new(vec![MomentProvider::discrete(points.clone(), masses.clone()).unwrap()]).unwrap();
        let n = points.len();
        let rule = RuleBuilder::new(&system, n).unwrap().rule(n, BackendTag::Rational, RuleOptions::default()).unwrap();
        let exact = rule.exact.as_ref().unwrap();
        let support = points.iter().fold(Polynomial::one(), |acc, x| &acc * &Polynomial::linear(x.clone()));
        prop_assert_eq!(&exact.node_polynomial, &support);
        // nodes come sorted, as do the points
        for (l, (x, m)) in points.iter().zip(&masses).enumerate() {
            let x = multiquad::scalar::rational_to_f64(x);
            let m = multiquad::scalar::rational_to_f64(m);
            prop_assert!((rule.nodes[l].re - x).abs() < 1e-14);
            prop_assert!((rule.weights[0][l].re - m).abs() < 1e-14 * m.max(1.0));
        }
    }
}
