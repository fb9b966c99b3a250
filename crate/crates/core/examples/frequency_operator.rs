use unsharp::experiments::frequency::{frequency_operator_stats, FrequencyMode};

/// Relative frequency of "+" in N copies: mean fixed at p, spread shrinking like 1/N.
fn main() -> unsharp::Result<()> {
    let p = 0.3;
    println!("{:>4} {:>10} {:>12} {:>12}", "N", "mean", "var tensor", "var formula");
    for n in [1, 2, 4, 8, 12] {
        let t = frequency_operator_stats(p, n, FrequencyMode::Tensor)?;
        let c = frequency_operator_stats(p, n, FrequencyMode::ClosedForm)?;
        println!("{n:>4} {:>10.6} {:>12.3e} {:>12.3e}", t.mean, t.variance, c.variance);
    }
    for n in [100, 10_000, 1_000_000] {
        let c = frequency_operator_stats(p, n, FrequencyMode::ClosedForm)?;
        println!("{n:>8} sd {:.2e}", c.variance.sqrt());
    }
    Ok(())
}
