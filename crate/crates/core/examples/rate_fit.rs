//! Fits a decay rate to noisy synthetic errors under the three window policies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use widthlab::fit::{fit_rate, WindowPolicy};

fn main() -> widthlab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // 2 n^{-3/4} with a pre-asymptotic bump at small n and 3% multiplicative noise
    let pairs: Vec<(f64, f64)> = (3..=12)
        .map(|k| {
            let n = (1u64 << k) as f64;
            let noise = 1.0 + 0.03 * (rng.random::<f64>() - 0.5);
            (n, 2.0 * n.powf(-0.75) * (1.0 + 8.0 / n) * noise)
        })
        .collect();
    for policy in [
        WindowPolicy::All,
        WindowPolicy::default(),
        WindowPolicy::Range { n_min: 256.0, n_max: 4096.0 },
    ] {
        let fit = fit_rate(&pairs, policy)?;
        println!(
            "{policy:?}: slope {:.4} over [{}, {}] ({} points, rms {:.2e})",
            fit.slope, fit.window.0, fit.window.1, fit.points, fit.residual
        );
    }
    Ok(())
}
