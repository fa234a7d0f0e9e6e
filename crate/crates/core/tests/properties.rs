//! Property tests over the Einstein solver and the parsers.

use std::sync::OnceLock;

use num_traits::Zero;
use proptest::prelude::*;

use super_einstein::curvature::{parse_metric, ricci, DiagonalMetric, Route};
use super_einstein::einstein::{classify_osp, classify_su, residual, ClassificationReport, SolutionKind};
use super_einstein::flag::{analyze, closed_forms, parse_circle, CircledDiagram, FlagContext, FlagInvariants};
use super_einstein::scalars::{int, parse_rational, rat, Rational, Scalar};

/// Two-node su diagrams with m, n ≤ 4 together with their classifications.
fn grid() -> &'static Vec<(FlagInvariants, ClassificationReport)> {
    static GRID: OnceLock<Vec<(FlagInvariants, ClassificationReport)>> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut out = Vec::new();
        for m in 1..=4usize {
            for n in 1..=4usize {
                if m + n < 4 || (m == n && m < 3) {
                    continue;
                }
                let ctx = FlagContext::new(super_einstein::flag::DiagramFamily::Su, m, n).unwrap();
                let r = m + n - 1;
                for p in 1..=r {
                    for q in p + 1..=r {
                        let d = CircledDiagram::su(m, n, &[p, q]).unwrap();
                        let inv = ctx.decompose(&d).and_then(|x| x.invariants_light()).unwrap();
                        let rep = super_einstein::einstein::classify_su_in(&ctx, p, Some(q)).unwrap();
                        out.push((inv, rep));
                    }
                }
            }
        }
        out
    })
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (prop_oneof![-12i64..=-1, 1i64..=12], 1i64..=7).prop_map(|(a, b)| rat(a, b))
}

fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rays_are_scaling_covariant(idx in any::<prop::sample::Index>(), lam in nonzero_rational()) {
        let (inv, rep) = idx.get(grid());
        for s in rep.solutions.iter().filter(|s| s.kind == SolutionKind::Ray) {
            let x: Vec<Rational> = s.x.iter().map(|v| v * &lam).collect();
            prop_assert!(is_zero_vec(&residual(inv, &x, &(&s.c / &lam)).unwrap()), "{} at λ = {lam}", s.render());
        }
    }

    #[test]
    fn sign_flip_when_b_vanishes(idx in any::<prop::sample::Index>(), flip in 0usize..3) {
        let balanced: Vec<_> = grid().iter().filter(|(inv, _)| inv.b().iter().all(|b| b.is_zero())).collect();
        prop_assume!(!balanced.is_empty());
        let (inv, rep) = idx.get(&balanced);
        for s in rep.solutions.iter().filter(|s| s.kind == SolutionKind::Ray) {
            let mut x = s.x.clone();
            x[flip] = -x[flip].clone();
            prop_assert!(is_zero_vec(&residual(inv, &x, &-s.c.clone()).unwrap()), "{} flipped at {flip}", s.render());
        }
    }

    #[test]
    fn s4_constant_formula(idx in any::<prop::sample::Index>()) {
        let (inv, _) = idx.get(grid());
        let cf = closed_forms(&inv.diagram);
        let c = &cf.c;
        prop_assume!(c.iter().all(|v| !v.is_zero()));
        let prod = c.iter().map(|ci| &cf.b - int(2) * ci).fold(int(1), |a, v| a * v);
        let constant = int(1) + prod / (int(4) * &c[0] * &c[1] * &c[2]);
        prop_assert!(is_zero_vec(&residual(inv, c, &constant).unwrap()));
    }

    #[test]
    fn family_members_are_ricci_flat(idx in any::<prop::sample::Index>(), t in proptest::collection::vec(nonzero_rational(), 3)) {
        let with_family: Vec<_> = grid().iter().filter(|(_, r)| r.families().next().is_some()).collect();
        let (inv, rep) = idx.get(&with_family);
        for s in rep.families() {
            let f = s.family.as_ref().unwrap();
            let x = f.member(&t[..f.params.len()]);
            // side conditions: every coordinate nonzero
            prop_assume!(x.iter().all(|v| !v.is_zero()));
            prop_assert!(s.ricci_flat);
            prop_assert!(is_zero_vec(&residual(inv, &x, &Rational::zero()).unwrap()), "{} at {:?}", s.render(), x);
        }
    }

    #[test]
    fn formula_route_matches_definition_route(x in proptest::collection::vec(nonzero_rational(), 3)) {
        let d = CircledDiagram::su(3, 1, &[1, 3]).unwrap();
        let ctx = FlagContext::for_diagram(&d).unwrap();
        let dec = ctx.decompose(&d).unwrap();
        let inv = dec.invariants().unwrap();
        let metric = DiagonalMetric::new(x).unwrap();
        prop_assert!(ricci(&dec, &inv, &metric, &[Route::Definition, Route::Coefficients]).is_ok());
    }

    #[test]
    fn parsers_never_panic(s in "\\PC{0,24}") {
        let _ = parse_rational(&s);
        let _ = parse_metric(&s);
        let _ = parse_circle(&s);
        let _ = s.parse::<Scalar>();
    }

    #[test]
    fn rational_text_round_trips(a in -1000i64..1000, b in 1i64..1000) {
        let r = rat(a, b);
        prop_assert_eq!(parse_rational(&super_einstein::scalars::fmt_rational(&r)).unwrap(), r);
    }

    #[test]
    fn metric_text_round_trips(x in proptest::collection::vec(nonzero_rational(), 1..5)) {
        let text = x.iter().map(super_einstein::scalars::fmt_rational).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_metric(&text).unwrap().x, x);
    }
}

#[test]
fn reports_round_trip_through_json() {
    for (inv, rep) in grid().iter().take(40) {
        let js = serde_json::to_string(rep).unwrap();
        assert_eq!(&serde_json::from_str::<ClassificationReport>(&js).unwrap(), rep);
        let js = serde_json::to_string(inv).unwrap();
        assert_eq!(&serde_json::from_str::<FlagInvariants>(&js).unwrap(), inv);
    }
    let osp = classify_osp(3, 2).unwrap();
    let js = serde_json::to_string(&osp).unwrap();
    assert_eq!(serde_json::from_str::<ClassificationReport>(&js).unwrap(), osp);
    let one = classify_su(3, 3, 2, None).unwrap();
    let js = serde_json::to_string(&one).unwrap();
    assert_eq!(serde_json::from_str::<ClassificationReport>(&js).unwrap(), one);
}

#[test]
fn analysis_is_deterministic() {
    let d = CircledDiagram::su(3, 2, &[2, 4]).unwrap();
    assert_eq!(analyze(&d).unwrap(), analyze(&d).unwrap());
}
