//! Unsharp position: a sharp grid observable blurred by a confidence kernel,
//! plus a discrete smearing of a three-outcome observable.

use unsharp::linalg::basis_vector;
use unsharp::observables::{
    smear_discrete, smeared_position_pom, DiscretePom, GridPositionMeasure, Kernel, SmearingMatrix,
};
use unsharp::states::{sharpness_report, State};

fn main() -> unsharp::Result<()> {
    let qm = GridPositionMeasure::new(-2.0, 0.5, 9)?;
    let kernel = Kernel::centered(vec![0.1, 0.2, 0.4, 0.2, 0.1])?;
    let pom = smeared_position_pom(&qm, &kernel, &[3, 6])?;

    println!("response of each bin along the grid:");
    for (label, e) in pom.outcomes().iter().zip(pom.effects()) {
        let row: Vec<String> = (0..qm.len())
            .map(|k| format!("{:.2}", e.operator().get(k, k).re))
            .collect();
        let r = sharpness_report(e);
        println!("  {label}: [{}]  |E - E^2| = {:.3}", row.join(" "), r.overlap_norm);
    }

    let centre = State::pure(&basis_vector(qm.len(), 4))?;
    println!("particle at x = {}: {:?}", qm.point(4), pom.probabilities(&centre)?);

    // 3-outcome detector that confuses neighbours 10% of the time
    let sharp = DiscretePom::computational_basis(3);
    let m = SmearingMatrix::new(3, 3, vec![0.9, 0.1, 0.0, 0.1, 0.8, 0.1, 0.0, 0.1, 0.9])?;
    let smeared = smear_discrete(&sharp, &m)?;
    println!("confusion-smeared observable is sharp: {}", smeared.is_sharp());
    Ok(())
}
