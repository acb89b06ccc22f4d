//! Runs the multi-scale scheme on a bump ensemble and fits the error decay.

use widthlab::exponents::{predicted_width_exponent, SobolevProblem, SpaceParams};
use widthlab::multiscale::{run_experiment, DomainSpec, EnsembleSpec, ExperimentConfig, Geometry};

fn main() -> widthlab::Result<()> {
    let space = SpaceParams::new(2.0, 2.0, 2.0)?;
    let problem = SobolevProblem::power_hset(1, 1, space, 0.0, 1.0, 1.0, 0.25);
    let predicted = predicted_width_exponent(&problem).theta_star;
    println!("predicted exponent: {predicted:?}");

    let dom = DomainSpec::new(Geometry::IntervalSingularOrigin, 24)?;
    let budgets: Vec<usize> = (4..=10).map(|k| 1 << k).collect();
    let ensemble = EnsembleSpec::default_for(&problem, &dom, *budgets.last().unwrap())?;
    let rows = run_experiment(&problem, &dom, &budgets, &ensemble, &ExperimentConfig::default())?;
    println!("{:>6} {:>14} {:>7} {:>6} {:>8}  worst", "n", "error", "rank", "C", "secs");
    for r in &rows {
        println!(
            "{:>6} {:>14.6e} {:>7} {:>6.2} {:>8.3}  {}",
            r.n, r.error, r.rank, r.rank_constant, r.seconds, r.worst
        );
    }
    for w in rows.windows(2) {
        println!("local slope {:>5}->{:<5} {:.4}", w[0].n, w[1].n, (w[1].error / w[0].error).log2());
    }
    Ok(())
}
