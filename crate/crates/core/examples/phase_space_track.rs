//! Repeated unsharp joint position-momentum readouts of an oscillator: the
//! readouts follow the classical circle while wandering by about one vacuum
//! width per step.

use unsharp::experiments::phase_space::{
    classical_rotation, husimi_pom, track_simulate, Dynamics, FockSpace, HusimiGrid, TrackParams,
    UpdateRule,
};
use unsharp::linalg::C64;
use unsharp::sampling::rng_from_seed;

fn main() -> unsharp::Result<()> {
    let fock = FockSpace::new(40)?;
    let pom = husimi_pom(&fock, HusimiGrid::default())?;
    println!("remainder norm {:.4} (Fock levels beyond the grid)", pom.remainder_norm());

    let (vac, _) = fock.coherent_state(C64::new(0.0, 0.0));
    let m = pom.readout_moments(&vac);
    println!("vacuum readouts: var q {:.4}, var p {:.4}, product {:.4}", m.var_q, m.var_p, m.var_q * m.var_p);

    let params = TrackParams {
        alpha0: C64::new(2.0, 0.0),
        dynamics: Dynamics::Harmonic { omega: 1.0 },
        n_steps: 12,
        dt: std::f64::consts::FRAC_PI_4,
        rule: UpdateRule::CoherentCollapse,
    };
    let track = track_simulate(&pom, &params, &mut rng_from_seed(3))?;
    let q0 = std::f64::consts::SQRT_2 * 2.0;
    for s in &track.steps {
        let (cq, cp) = classical_rotation(q0, 0.0, 1.0, s.time);
        println!(
            "t {:5.2}  readout ({:+.2}, {:+.2})  classical ({:+.2}, {:+.2})  disturbance {:.3}",
            s.time, s.q, s.p, cq, cp, s.disturbance
        );
    }
    if let Some(k) = track.halted_at {
        println!("left the grid at step {k}");
    }
    Ok(())
}
