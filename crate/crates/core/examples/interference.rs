//! Two-slit bookkeeping: which-slit properties are indeterminate in the
//! superposition, while the superposition's own projection is actual.

use std::f64::consts::FRAC_1_SQRT_2;

use unsharp::linalg::{basis_vector, C64};
use unsharp::states::{classify_property, Projection, State};

fn main() -> unsharp::Result<()> {
    let (a, b) = (basis_vector(2, 0), basis_vector(2, 1));
    let psi: Vec<C64> = a.iter().zip(&b).map(|(x, y)| (x + y) * FRAC_1_SQRT_2).collect();
    let psi_minus: Vec<C64> = a.iter().zip(&b).map(|(x, y)| (x - y) * FRAC_1_SQRT_2).collect();

    let properties = [
        ("P_A", Projection::rank_one(&a)?),
        ("P_B", Projection::rank_one(&b)?),
        ("P_psi+", Projection::rank_one(&psi)?),
        ("P_psi-", Projection::rank_one(&psi_minus)?),
    ];
    for (state_name, state) in [("psi", State::pure(&psi)?), ("phi_A", State::pure(&a)?)] {
        for (name, p) in &properties {
            let status = classify_property(&state, p.effect(), 0.0)?;
            println!("{state_name:>6}  {name:<7} degree {:.3}  {:?}", status.degree, status.kind);
        }
    }
    Ok(())
}
