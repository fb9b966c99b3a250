//! Measuring an effect the state almost certainly has barely moves the state:
//! the trace distance scales like `sqrt(eps)` and the probability never drops.

use unsharp::channels::epr_robustness_sweep;

fn main() -> unsharp::Result<()> {
    let eps = [1e-6, 1e-4, 1e-2, 1e-1, 0.2];
    println!("{:>8} {:>8} {:>12} {:>10} {:>10}", "eps", "trials", "min margin", "max d/rt", "mean d/rt");
    for dim in [2, 4] {
        println!("dimension {dim}");
        for r in epr_robustness_sweep(dim, &eps, 2000, 2024)? {
            println!(
                "{:>8.0e} {:>8} {:>12.3e} {:>10.4} {:>10.4}",
                r.epsilon, r.trials, r.min_probability_margin, r.max_ratio, r.mean_ratio
            );
        }
    }
    Ok(())
}
