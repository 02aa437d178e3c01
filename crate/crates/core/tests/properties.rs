mod common;

use common::*;
use gaugeforms::config::{ConfigDocument, Manifold};
use gaugeforms::equivalence::{apply_gauge, classify_form, construct_phase, Group, Lattice};
use gaugeforms::framing::{lift_pointwise, spin_hom};
use gaugeforms::geometry::{charge_values_at, metric_at, potential_at};
use gaugeforms::{parse_expression, Chart, FullSymbol, Point, SymbolJet};
use nalgebra::{DMatrix, Rotation3, Unit, Vector3};
use proptest::prelude::*;
use rand::Rng;

fn chart_for(group: Group, n: usize) -> Chart {
    if group.dim() == 3 {
        Chart::new(3, n, None).unwrap()
    } else {
        Chart::new(4, n, Some([0.0, 0.0, 0.0, 1.0])).unwrap()
    }
}

fn group_strategy() -> impl Strategy<Value = Group> {
    prop_oneof![
        Just(Group::SU),
        Just(Group::U),
        Just(Group::SL),
        Just(Group::GL)
    ]
}

fn point(rng: &mut rand_chacha::ChaCha8Rng, dim: usize) -> Point {
    let x: Vec<f64> = (0..dim)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    Point::new(&x)
}

fn jet_gap(a: &SymbolJet, b: &SymbolJet, dim: usize) -> f64 {
    (0..dim)
        .map(|k| {
            let de = (0..dim)
                .map(|g| (a.de[k][g] - b.de[k][g]).max_abs())
                .fold(0.0, f64::max);
            (a.e[k] - b.e[k]).max_abs().max(de)
        })
        .fold((a.f - b.f).max_abs(), f64::max)
}

fn expr_strategy() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0.0f64..10.0).prop_map(|x| format!("{x}")),
        Just("i".to_string()),
        Just("pi".to_string()),
        (1usize..=3).prop_map(|k| format!("x{k}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (
                inner.clone(),
                inner.clone(),
                prop_oneof![Just("+"), Just("-"), Just("*")]
            )
                .prop_map(|(a, b, op)| format!("({a}){op}({b})")),
            (inner.clone(), 0i32..4).prop_map(|(a, n)| format!("({a})^{n}")),
            (
                inner.clone(),
                prop_oneof![Just("sin"), Just("cos"), Just("exp")]
            )
                .prop_map(|(a, f)| format!("{f}(({a})/10)")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_print_parse(text in expr_strategy(), x in prop::array::uniform3(0.0f64..6.3)) {
        let e = parse_expression(&text).unwrap();
        let printed = e.to_string();
        let again = parse_expression(&printed).unwrap();
        prop_assert_eq!(again.to_string(), printed);
        let (a, b) = (e.value_at(&x).unwrap(), again.value_at(&x).unwrap());
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn spin_hom_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_sl2c(&mut r), random_sl2c(&mut r));
        let lhs = spin_hom(&(a * b), 4);
        let rhs = spin_hom(&a, 4) * spin_hom(&b, 4);
        prop_assert!((&lhs - &rhs).amax() <= 1e-10 * rhs.amax().max(1.0));
        prop_assert_eq!(spin_hom(&(-a), 4), spin_hom(&a, 4));
        prop_assert!((spin_hom(&gaugeforms::Mat2::IDENTITY, 4) - DMatrix::<f64>::identity(4, 4)).amax() == 0.0);
    }

    #[test]
    fn rotation_lift_round_trip(ax in prop::array::uniform3(-1.0f64..1.0), angle in -3.1f64..3.1) {
        prop_assume!(ax.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let axis = Unit::new_normalize(Vector3::from(ax));
        let rot = Rotation3::from_axis_angle(&axis, angle).into_inner();
        let o = DMatrix::from_fn(3, 3, |i, j| rot[(i, j)]);
        let r = lift_pointwise(&o).unwrap();
        prop_assert!((spin_hom(&r, 3) - &o).amax() <= 1e-8);
        prop_assert!((r.det() - num_complex::Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_composition(seed in any::<u64>(), group in group_strategy()) {
        let c = chart_for(group, 8);
        let mut r = rng(seed);
        let s = random_symbol(&mut r, &c, 0.1);
        let r1 = random_gauge(&mut r, &c, group, 0.3, true);
        let r2 = random_gauge(&mut r, &c, group, 0.3, true);
        let twice = apply_gauge(&apply_gauge(&s, &r1, &c).unwrap(), &r2, &c).unwrap();
        let once = apply_gauge(&s, &r1.compose(&r2, &c).unwrap(), &c).unwrap();
        let back = apply_gauge(&apply_gauge(&s, &r1, &c).unwrap(), &r1.inverse(&c).unwrap(), &c).unwrap();
        for _ in 0..8 {
            let x = point(&mut r, c.dim());
            prop_assert!(jet_gap(&twice.jet(&x).unwrap(), &once.jet(&x).unwrap(), c.dim()) <= 1e-9);
            prop_assert!(jet_gap(&back.jet(&x).unwrap(), &s.jet(&x).unwrap(), c.dim()) <= 1e-9);
        }
    }

    #[test]
    fn gauged_symbols_stay_valid(seed in any::<u64>(), group in group_strategy()) {
        let c = chart_for(group, 8);
        let mut r = rng(seed);
        let s = random_symbol(&mut r, &c, 0.1);
        let g = random_gauge(&mut r, &c, group, 0.3, true);
        let report = apply_gauge(&s, &g, &c).unwrap().validate(&c).unwrap();
        prop_assert!(report.valid, "{:?}", report);
    }

    #[test]
    fn transformation_laws(seed in any::<u64>(), group in group_strategy()) {
        let c = chart_for(group, 8);
        let dim = c.dim();
        let mut r = rng(seed);
        let s = random_symbol(&mut r, &c, 0.1);
        let g = random_gauge(&mut r, &c, group, 0.3, true);
        let st = apply_gauge(&s, &g, &c).unwrap();
        for _ in 0..4 {
            let x = point(&mut r, dim);
            let (j, jt, rj) = (s.jet(&x).unwrap(), st.jet(&x).unwrap(), g.jet(&x).unwrap());
            let (pm, pmt) = (metric_at(&j, dim).unwrap(), metric_at(&jt, dim).unwrap());
            let det = rj.v.det();
            let factor = if group == Group::GL { det.norm().powf(-2.0 / 3.0) } else { 1.0 };
            prop_assert!((&pmt.g_up - &pm.g_up * factor).amax() <= 1e-9);
            let (p, pt) = (potential_at(&j, &pm, dim), potential_at(&jt, &pmt, dim));
            for a in 0..dim {
                let shift = 0.5 * ((rj.v.adj() * rj.d[a]).trace() / det).im;
                prop_assert!((pt.a[a] - p.a[a] - shift).abs() <= 1e-8);
            }
            if dim == 3 {
                prop_assert!((pt.a4 - p.a4).abs() <= 1e-9);
            }
            let (ct, _, _) = charge_values_at(&j, &pm, dim, c.q_ref());
            let (ctt, _, _) = charge_values_at(&jt, &pmt, dim, c.q_ref());
            prop_assert_eq!(ct.re.round(), ctt.re.round());
        }
    }

    #[test]
    fn config_round_trip(seed in any::<u64>()) {
        let c = Chart::new(3, 8, None).unwrap();
        let mut r = rng(seed);
        let s = random_symbol(&mut r, &c, 0.1);
        let mut doc = ConfigDocument::new(Manifold { dim: 3, grid: 8, q_ref: None });
        doc.push_symbol("s", &s).unwrap();
        let parsed = ConfigDocument::parse(&doc.render()).unwrap();
        prop_assert_eq!(&parsed, &doc);
        let back: FullSymbol = parsed.symbol("s", &c).unwrap();
        for _ in 0..4 {
            let x = point(&mut r, 3);
            prop_assert!(jet_gap(&back.jet(&x).unwrap(), &s.jet(&x).unwrap(), 3) <= 1e-12);
        }
    }

    #[test]
    fn exact_forms_are_trivial(seed in any::<u64>()) {
        let c = Chart::new(3, 16, None).unwrap();
        let mut r = rng(seed);
        let phi = parse_expression(&trig_sum(&mut r, 3, 1.0, 3)).unwrap();
        let n: Vec<i64> = (0..3).map(|_| r.gen_range(-2..=2)).collect();
        let omega: Vec<Vec<f64>> = (0..3)
            .map(|a| {
                let d = phi.diff(a);
                c.points().map(|p| d.value_at(p.as_slice()).unwrap().re + n[a] as f64).collect()
            })
            .collect();
        let half = classify_form(&omega, &c, Lattice::HalfPeriod).unwrap();
        prop_assert!(half.same_class);
        let phase = construct_phase(&omega, &c).unwrap();
        prop_assert_eq!(&phase.winding, &n);
        let offset = phase.value(&c, 0) - phi.value_at(c.point(0).as_slice()).unwrap().re;
        for k in 0..c.num_points() {
            let p = c.point(k);
            let expected = phi.value_at(p.as_slice()).unwrap().re
                + (0..3).map(|a| n[a] as f64 * p.coords[a]).sum::<f64>();
            prop_assert!((phase.value(&c, k) - expected - offset).abs() <= 1e-9);
        }
    }
}
