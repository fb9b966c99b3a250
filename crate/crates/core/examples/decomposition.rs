//! A trace-one qubit effect split into two non-orthogonal rank-1 projections,
//! `E = beta R + (1 - beta) R'`, for a few choices of `R`.

use unsharp::linalg::pauli;
use unsharp::states::{qubit_nonorthogonal_decomposition, spectral_decompose_effect, Effect, Projection};

fn main() -> unsharp::Result<()> {
    let e = Effect::new(pauli::combination(0.5, [0.15, 0.0, 0.2]))?;

    println!("spectral form:");
    for (w, p) in spectral_decompose_effect(&e) {
        let (_, n) = pauli::coordinates(&p.operator().scale(2.0));
        println!("  weight {w:.4} on direction {n:.4?}");
    }

    println!("non-orthogonal forms:");
    for r_dir in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.6, 0.0, 0.8], [0.0, 0.0, -1.0]] {
        let r = Projection::qubit(r_dir)?;
        let d = qubit_nonorthogonal_decomposition(&e, &r)?;
        let (_, n) = pauli::coordinates(&d.rprime.operator().scale(2.0));
        let overlap = r.operator().trace_product(d.rprime.operator()).re;
        println!("  R {r_dir:?}: beta {:.4}, R' {n:.4?}, tr[R R'] {overlap:.4}", d.beta);
    }
    Ok(())
}
