//! Closed-form, order-level and searched widths of small balls and intersections.

use widthlab::ballwidths::{
    brute_force_width_oracle, exact_width, gluskin_order, intersection_width_upper, numeric_width_upper, BallSpec, Body,
    IntersectionSpec, SearchConfig,
};
use widthlab::exponents::LpExponent;

fn main() -> widthlab::Result<()> {
    let inf = LpExponent::INFINITY;
    let f = LpExponent::finite;
    let cfg = SearchConfig::default();

    println!("d_n(B_p^N, l_q^N), q <= p");
    for (dim, n, p, q) in [(4, 1, inf, f(1.0)), (4, 2, inf, f(2.0)), (3, 1, f(4.0), f(2.0))] {
        let body = Body::Ball(BallSpec::unit(dim, p)?);
        let exact = exact_width(dim, n, p, q)?.value;
        let numeric = numeric_width_upper(&body, n, q, &cfg)?.value;
        let oracle = brute_force_width_oracle(&body, n, q, &cfg)?.value;
        println!("  N={dim} n={n} p={p} q={q}: exact {exact:.6} numeric {numeric:.6} oracle {oracle:.6}");
    }

    println!("order-level widths for p < q");
    for (dim, n) in [(256, 16), (256, 64), (1024, 64)] {
        let g = gluskin_order(dim, n, f(1.0), f(4.0))?;
        println!("  N={dim} n={n} p=1 q=4: {:.6} ({:?})", g.value, g.kind);
    }

    println!("intersection 1.5 B_1 ∩ 0.6 B_inf in R^4, q=2");
    let spec = IntersectionSpec::new(4, f(1.0), 1.5, inf, 0.6)?;
    let body = Body::Intersection(spec);
    for n in 0..=2 {
        let routes = intersection_width_upper(&spec, n, f(2.0))?;
        let numeric = numeric_width_upper(&body, n, f(2.0), &cfg)?;
        println!(
            "  n={n}: routes {:.6} via {}, numeric {:.6}",
            routes.value, routes.method, numeric.value
        );
    }
    Ok(())
}
