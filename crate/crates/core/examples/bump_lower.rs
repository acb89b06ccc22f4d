//! Unit-norm bump families and the lower-bound curve they produce.

use widthlab::exponents::{SobolevProblem, SpaceParams};
use widthlab::lowerbounds::{build_bump_family, bump_norms, lower_bound_curve, FamilyOptions};
use widthlab::multiscale::{DomainSpec, Geometry};
use widthlab::quadrature::QuadratureSpec;

fn main() -> widthlab::Result<()> {
    let problem = SobolevProblem::power_hset(1, 1, SpaceParams::new(2.0, 2.0, 2.0)?, 0.0, 1.0, 1.0, 0.25);
    let dom = DomainSpec::new(Geometry::IntervalSingularOrigin, 12)?;
    let opts = FamilyOptions::default();

    println!("{:>3} {:>3} {:>10} {:>12} {:>12}", "j", "m", "rho", "sobolev", "p0 norm");
    for j in [2, 4, 6] {
        for m in [0, 2, 4] {
            let fam = build_bump_family(&problem, &dom, j, m, &opts)?;
            let norms = bump_norms(&fam, &problem, &dom, &QuadratureSpec::default())?;
            let (s, z) = norms[0];
            println!("{j:>3} {m:>3} {:>10.3e} {s:>12.4e} {z:>12.4e}", fam.rho);
        }
    }

    let budgets: Vec<usize> = (2..=12).map(|k| 1 << k).collect();
    let curve = lower_bound_curve(&problem, &budgets)?;
    println!("dominant term b{}, exponents {:?}", curve.dominant, curve.exponents);
    for r in &curve.rows {
        println!("n={:>5}  max {:.6e}", r.n, r.max);
    }
    Ok(())
}
