//! Two different classical mixtures of rays that reduce to the same density
//! operator: no effect can tell them apart, exactly or by sampling.

use unsharp::classical::{mb_consistency_mc, mb_reduce, ClassicalMeasure, RayPoint};
use unsharp::linalg::C64;
use unsharp::sampling::{random_effect, rng_from_seed};

fn main() -> unsharp::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ray = |v: [C64; 2]| RayPoint::from_vector(&v);
    let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let z_basis = ClassicalMeasure::uniform(vec![ray([one, zero])?, ray([zero, one])?])?;
    let x_basis = ClassicalMeasure::uniform(vec![
        ray([one * h, one * h])?,
        ray([one * h, -one * h])?,
    ])?;

    let gap = mb_reduce(&z_basis)?.operator().max_abs_diff(mb_reduce(&x_basis)?.operator());
    println!("reduced density operators differ by {gap:.1e}");

    let mut rng = rng_from_seed(1);
    for i in 0..5 {
        let e = random_effect(2, &mut rng);
        let a = mb_consistency_mc(&z_basis, &e, 50_000, &mut rng)?;
        let b = mb_consistency_mc(&x_basis, &e, 50_000, &mut rng)?;
        println!(
            "effect {i}: exact {:.5} / {:.5}, sampled {:.5} +- {:.5} / {:.5} +- {:.5}",
            a.exact, b.exact, a.mc_estimate, a.std_error, b.mc_estimate, b.std_error
        );
    }
    Ok(())
}
