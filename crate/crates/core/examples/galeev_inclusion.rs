//! Samples an intersection of two balls and checks it sits inside the interpolated ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use widthlab::ballwidths::{interpolation_ball, lp_norm, Body, IntersectionSpec};
use widthlab::exponents::LpExponent;

fn main() -> widthlab::Result<()> {
    let spec = IntersectionSpec::new(32, LpExponent::finite(1.0), 4.0, LpExponent::INFINITY, 0.25)?;
    let body = Body::Intersection(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for q_tilde in [1.5, 2.0, 4.0] {
        let (ball, lambda) = interpolation_ball(&spec, LpExponent::finite(q_tilde))?;
        let mut worst: f64 = 0.0;
        for _ in 0..20_000 {
            // random direction, pushed to the boundary of the body
            let x: Vec<f64> = (0..spec.dim).map(|_| rng.random::<f64>() - 0.5).collect();
            let g = body.gauge(&x);
            let y: Vec<f64> = x.iter().map(|v| v / g).collect();
            worst = worst.max(lp_norm(&y, q_tilde) / ball.radius);
        }
        println!("q~ = {q_tilde}: lambda {lambda:.4}, radius {:.4}, max ||x||/radius {worst:.4}", ball.radius);
    }
    Ok(())
}
