mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use widthlab::ballwidths::distance::lq_distance;
use widthlab::ballwidths::{exact_width, lp_norm, BallSpec, Body, EstimateKind};
use widthlab::cli::format_sig;
use widthlab::exponents::{predicted_width_exponent, LpExponent, SobolevProblem, SpaceParams, WidthPrediction};
use widthlab::fit::{fit_rate, RateFit, WindowPolicy};
use widthlab::lowerbounds::{build_bump_family, lower_bound_curve, BumpProfile, FamilyOptions, LowerBoundCurve};
use widthlab::multiscale::{
    critical_scales, l2_project, problem_weights, weighted_norm, DomainSpec, EnsembleSpec, Geometry, LocalPoly,
};
use widthlab::quadrature::{GaussLegendre, QuadratureSpec};

fn interval(t_max: u32) -> DomainSpec {
    DomainSpec::new(Geometry::IntervalSingularOrigin, t_max).unwrap()
}

fn line(t_max: u32) -> DomainSpec {
    DomainSpec::new(Geometry::RealLine, t_max).unwrap()
}

fn lp() -> impl Strategy<Value = LpExponent> {
    prop_oneof![1 => Just(LpExponent::INFINITY), 7 => (1.0..8.0f64).prop_map(LpExponent::finite)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_reproduces_polynomials(
        coeffs in prop::collection::vec(-3.0..3.0f64, 1..6),
        a in -4.0..4.0f64,
        h in 0.01..3.0f64,
    ) {
        let p = LocalPoly { a, b: a + h, coeffs: coeffs.clone() };
        let rule = GaussLegendre::new(12);
        let back = l2_project(&|x| p.eval(x), a, a + h, coeffs.len() - 1, &rule, &[]).unwrap();
        for (u, v) in back.coeffs.iter().zip(&coeffs) {
            prop_assert!((u - v).abs() < 1e-9 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn projection_residual_is_orthogonal(degree in 0usize..5, freq in 0.5..6.0f64, a in 0.0..2.0f64, h in 0.05..2.0f64) {
        let f = |x: f64| (freq * x).sin() + x.exp();
        let rule = GaussLegendre::new(24);
        let pf = l2_project(&f, a, a + h, degree, &rule, &[]).unwrap();
        for k in 0..=degree {
            let mut basis = vec![0.0; k + 1];
            let inner: f64 = rule
                .mapped(a, a + h)
                .map(|(x, w)| {
                    widthlab::multiscale::basis_values(a, a + h, x, &mut basis);
                    w * (f(x) - pf.eval(x)) * basis[k]
                })
                .sum();
            prop_assert!(inner.abs() < 1e-10, "k = {k}: {inner}");
        }
        // projecting twice changes nothing
        let again = l2_project(&|x| pf.eval(x), a, a + h, degree, &rule, &[]).unwrap();
        for (u, v) in again.coeffs.iter().zip(&pf.coeffs) {
            prop_assert!((u - v).abs() < 1e-10 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn ring_cells_tile_the_ring(real in any::<bool>(), t in 0u32..10, m in 0u32..6) {
        let dom = if real { line(10) } else { interval(10) };
        let cells = dom.cells(t, m).unwrap();
        let pieces = dom.ring_pieces(t);
        let total: f64 = pieces.iter().map(|(a, b)| b - a).sum();
        let covered: f64 = cells.iter().map(|c| c.width()).sum();
        prop_assert!((covered - total).abs() <= 1e-12 * total);
        for w in cells.windows(2) {
            prop_assert!(w[0].b <= w[1].a + 1e-15 * w[1].a.abs().max(1.0));
        }
        for (i, c) in cells.iter().enumerate() {
            prop_assert_eq!(c.index, i);
            prop_assert!(pieces.iter().any(|&(a, b)| a <= c.a && c.b <= b));
            let mid = 0.5 * (c.a + c.b);
            prop_assert_eq!(dom.ring_of(mid), Some(t));
        }
        // children of depth m are exactly the cells of depth m + 1
        let finer = dom.cells(t, m + 1).unwrap();
        let kids: Vec<_> = cells.iter().flat_map(|c| c.children()).collect();
        prop_assert_eq!(kids.len(), finer.len());
        for (k, f) in kids.iter().zip(&finer) {
            prop_assert!((k.a - f.a).abs() <= 1e-12 * f.a.abs().max(1.0));
            prop_assert!((k.b - f.b).abs() <= 1e-12 * f.b.abs().max(1.0));
        }
    }

    #[test]
    fn critical_scales_balance(seed in any::<u64>(), log2n in 2.0..30.0f64, t in 0.0..20.0f64) {
        let mut rng = common::rng(seed);
        let s = common::space(&mut rng);
        let a = common::abstract_params(&mut rng, &s);
        let cs = critical_scales(&a, &s, log2n.exp2()).unwrap();
        let kt = a.k_star as f64 * t;
        prop_assert!((cs.m_hat(t) + a.gamma_star * kt - log2n).abs() < 1e-10);
        if let Some(mb) = cs.m_bar(t) {
            prop_assert!((mb + a.gamma_star * kt - 0.5 * s.q * log2n).abs() < 1e-9);
        }
        // the two radii of the discretized body meet at m_flat
        let flat = a.s_star + s.inv_p0() - s.inv_p1();
        prop_assert!((flat * cs.m_flat(t) - (a.mu_star + a.alpha_star) * kt).abs() < 1e-9 * (1.0 + kt.abs()));
        prop_assert!((a.s_star * cs.m_tilde(t)
            - (a.mu_star + a.alpha_star + a.gamma_star * (s.inv_p0() - s.inv_p1())) * kt).abs() < 1e-9 * (1.0 + kt.abs()));
    }

    #[test]
    fn subspace_distance_ignores_subspace_shifts(
        x in prop::collection::vec(-2.0..2.0f64, 4),
        u in prop::collection::vec(-1.0..1.0f64, 4),
        c in -3.0..3.0f64,
        q in 1.0..6.0f64,
    ) {
        let x = DVector::from_vec(x);
        let u = DVector::from_vec(u);
        prop_assume!(u.norm() > 0.1);
        let frame = DMatrix::from_column_slice(4, 1, (u.clone() / u.norm()).as_slice());
        let d0 = lq_distance(&x, &frame, q, 1e-12);
        let d1 = lq_distance(&(&x + &u * c), &frame, q, 1e-12);
        prop_assert!((d0 - d1).abs() < 1e-6 * (1.0 + d0));
        prop_assert!(d0 <= lp_norm(x.as_slice(), q) + 1e-12);
    }

    #[test]
    fn exact_widths_decrease_in_n(dim in 2usize..40, p in lp(), q in 1.0..8.0f64) {
        prop_assume!(p.value() >= q);
        let q = LpExponent::finite(q);
        let mut last = f64::INFINITY;
        for n in 0..dim {
            let w = exact_width(dim, n, p, q).unwrap();
            prop_assert_eq!(w.kind, EstimateKind::Exact);
            prop_assert!(w.value <= last + 1e-12);
            last = w.value;
        }
    }

    #[test]
    fn lower_curve_max_dominates(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let p = common::power_hset(&mut rng);
        let Ok(curve) = lower_bound_curve(&p, &[4, 16, 64, 256]) else { return Ok(()) };
        for row in &curve.rows {
            let top = row.components().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(row.max, top);
            prop_assert!(row.components().all(|c| c > 0.0 && c <= row.max));
        }
        let json = serde_json::to_string(&curve).unwrap();
        prop_assert_eq!(serde_json::from_str::<LowerBoundCurve>(&json).unwrap(), curve);
    }

    #[test]
    fn fit_recovers_exact_powers(slope in -3.0..1.0f64, c in 0.01..100.0f64, k in 4usize..12) {
        let pairs: Vec<(f64, f64)> = (0..k).map(|i| {
            let n = (8u64 << i) as f64;
            (n, c * n.powf(slope))
        }).collect();
        let fit = fit_rate(&pairs, WindowPolicy::All).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.intercept - c.log2()).abs() < 1e-8);
        prop_assert!(fit.residual < 1e-10);
        let json = serde_json::to_string(&fit).unwrap();
        prop_assert_eq!(serde_json::from_str::<RateFit>(&json).unwrap(), fit);
    }

    #[test]
    fn significant_digit_format_round_trips(mantissa in -1.0e3..1.0e3f64, exp in -30i32..30) {
        let x = mantissa * 10f64.powi(exp);
        prop_assume!(x != 0.0);
        let back: f64 = format_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs(), "{x} -> {}", format_sig(x));
    }

    #[test]
    fn problems_round_trip_through_json(seed in any::<u64>(), kind in 0u8..3) {
        let mut rng = common::rng(seed);
        let p = match kind {
            0 => common::power_hset(&mut rng),
            1 => common::log_hset(&mut rng),
            _ => common::power_rd(&mut rng),
        };
        prop_assert_eq!(SobolevProblem::from_json(&p.to_json()).unwrap(), p);
        let pred = predicted_width_exponent(&p);
        let json = serde_json::to_string(&pred).unwrap();
        prop_assert_eq!(serde_json::from_str::<WidthPrediction>(&json).unwrap(), pred);
    }

    #[test]
    fn ball_scaling_is_linear(dim in 2usize..6, p in lp(), c in 0.1..10.0f64) {
        let body = Body::Ball(BallSpec::unit(dim, p).unwrap());
        let x: Vec<f64> = (0..dim).map(|i| (i as f64 + 1.0).sin()).collect();
        let g1 = body.gauge(&x);
        let g2 = body.scaled(c).gauge(&x);
        prop_assert!((g1 - c * g2).abs() <= 1e-12 * g1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn disjoint_bumps_add_in_norm(
        j in 2u32..6,
        m in 0u32..4,
        raw in prop::collection::vec(-2.0..2.0f64, 8),
        q in prop_oneof![Just(2.0), Just(3.0), Just(1.5)],
    ) {
        let p = SobolevProblem::power_hset(1, 1, SpaceParams::new(2.0, 2.0, q).unwrap(), 0.0, 1.0, 1.0, 0.25);
        let dom = interval(8);
        let opts = FamilyOptions { profile: BumpProfile::Polynomial, ..FamilyOptions::default() };
        let fam = build_bump_family(&p, &dom, j, m, &opts).unwrap();
        let coefs = &raw[..fam.count()];
        let v = problem_weights(&p, &dom).unwrap().v;
        let norm = weighted_norm(&fam.combination(coefs), v, q, &dom, &QuadratureSpec::default()).unwrap();
        let expected: f64 = coefs.iter().map(|c| c.abs().powf(q)).sum();
        prop_assert!((norm.powf(q) - expected).abs() <= 1e-8 * expected.max(1.0), "{} vs {expected}", norm.powf(q));
    }
}

#[test]
fn ensemble_spec_round_trips() {
    let spec = EnsembleSpec::bump_grid(6, 4, BumpProfile::Polynomial);
    let json = serde_json::to_string(&spec).unwrap();
    assert_eq!(serde_json::from_str::<EnsembleSpec>(&json).unwrap(), spec);
}
