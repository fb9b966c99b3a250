//! Bell violation against detector sharpness on the singlet.

use unsharp::experiments::chsh::{chsh_optimize, chsh_unsharpness_scan, chsh_violation_threshold, singlet};

fn main() -> unsharp::Result<()> {
    let best = chsh_optimize(&singlet(), 1.0, 1.0)?;
    println!("sharp optimum S = {:.6}", best.s_max);
    for (name, v) in [("a0", best.a[0]), ("a1", best.a[1]), ("b0", best.b[0]), ("b1", best.b[1])] {
        println!("  {name} = {:.3?}", v.components());
    }

    let grid: Vec<f64> = (0..=10).map(|i| 0.5 + 0.05 * i as f64).collect();
    for row in chsh_unsharpness_scan(&grid)? {
        let bar = "#".repeat((row.s_max * 20.0) as usize);
        println!("eta {:.2}  S {:.4}  {bar}{}", row.eta, row.s_max, if row.s_max > 2.0 { " violates" } else { "" });
    }
    println!("violation disappears below eta = {:.6}", chsh_violation_threshold(1e-8)?);
    Ok(())
}
