//! Orthogonal spin directions with sharpness `eta`: jointly measurable exactly
//! up to `eta = 1/sqrt 2`.

use unsharp::linalg::pauli;
use unsharp::observables::{construct_joint_qubit, marginals, BlochVector, JointMeasurability};

fn main() -> unsharp::Result<()> {
    for eta in [0.5, 0.7, 0.705, 0.709, 0.8, 1.0] {
        let a = BlochVector::new([0.0, 0.0, eta])?;
        let b = BlochVector::new([eta, 0.0, 0.0])?;
        match construct_joint_qubit(a, b)? {
            JointMeasurability::Feasible { pom, gamma, criterion } => {
                let (ma, _) = marginals(&pom)?;
                let (c0, v) = pauli::coordinates(ma.effects()[0].operator());
                println!("eta {eta:.4}: joint POM exists (criterion {criterion:.4}, gamma {gamma:.3}), marginal A+ = {c0:.2} I + {v:.3?}.sigma");
            }
            JointMeasurability::Infeasible { criterion } => {
                println!("eta {eta:.4}: incompatible (criterion {criterion:.4} > 2)");
            }
        }
    }
    Ok(())
}
