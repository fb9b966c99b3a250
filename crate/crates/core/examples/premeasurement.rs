//! Coupling a qubit to a pointer. Eigenstates leave a product state; superpositions
//! leave the pair entangled with Born weights on the pointer.

use unsharp::experiments::premeasure::premeasurement_demo;
use unsharp::linalg::{basis_vector, C64};
use unsharp::states::State;

fn main() -> unsharp::Result<()> {
    let basis = vec![basis_vector(2, 0), basis_vector(2, 1)];
    for (a, b) in [(1.0, 0.0), (0.8f64.sqrt(), 0.2f64.sqrt()), (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)] {
        let object = State::pure(&[C64::new(a, 0.0), C64::new(0.0, b)])?;
        let r = premeasurement_demo(&object, &basis)?;
        println!(
            "amplitudes ({a:.3}, {b:.3}i): pointer {:.3?}, Schmidt {:.4?}, rank {}",
            r.pointer_probabilities, r.schmidt_coefficients, r.schmidt_rank
        );
    }
    Ok(())
}
