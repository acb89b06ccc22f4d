//! Exponents, regime and hypothesis report for a few weighted problems.

use widthlab::exponents::{predicted_width_exponent, SobolevProblem, SpaceParams};

fn main() -> widthlab::Result<()> {
    let problems = [
        ("line, p=q=2", SobolevProblem::power_rd(1, 1, SpaceParams::new(2.0, 2.0, 2.0)?, 1.0, 1.0, 0.0)),
        (
            "interval, p=q=2",
            SobolevProblem::power_hset(1, 1, SpaceParams::new(2.0, 2.0, 2.0)?, 0.0, 1.0, 1.0, 0.25),
        ),
        (
            "fractal set, q=3",
            SobolevProblem::power_hset(2, 1, SpaceParams::new(4.0, 1.5, 3.0)?, 0.5, 2.0, 1.0, 0.5),
        ),
        (
            "log weights",
            SobolevProblem::log_hset(2, 2, SpaceParams::new(3.0, 2.5, 2.0)?, 1.0, 0.5, 1.0, 1.5, 0.25),
        ),
    ];
    for (label, p) in &problems {
        let pred = predicted_width_exponent(p);
        println!("{label}");
        if let Some(e) = pred.exponents {
            println!("  theta~ {:.6}  theta^ {:.6}", e.theta_tilde, e.theta_hat);
        }
        if let Some(prof) = &pred.profile {
            let thetas: Vec<String> = prof.thetas.iter().map(|t| format!("{t:.4}")).collect();
            println!("  case {} thetas [{}] j* {:?}", prof.case_id, thetas.join(", "), prof.j_star);
        }
        for c in pred.report.failures() {
            println!("  fails {} ({:.4})", c.name, c.value);
        }
        match pred.theta_star {
            Some(t) => println!("  d_n ~ n^-{t:.6}"),
            None => println!("  no prediction"),
        }
    }
    Ok(())
}
