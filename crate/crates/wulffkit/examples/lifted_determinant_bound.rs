//! The weighted determinant inequality det(Σ c t u uᵀ) ≥ Π t^{c·u_last²}·Π..,
//! evaluated on the lift of an f-centered measure to the sphere one dimension
//! up, plus the closed-form hand check on the planar simplex directions.

use wulffkit::ballbarthe::{bb_report, bb_report_lifted, lifted_trace_logcheck};
use wulffkit::measures::{
    gen_random_isotropic_fcentered, gen_simplex_measure, lift, LiftSign,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // hand-checkable instance: planar simplex directions, weights 2/3,
    // t = (1, 2, 3) gives lhs 11/3 and rhs 6^(2/3)
    let (sm, _) = gen_simplex_measure(2);
    let r = bb_report(sm.points(), sm.weights(), &[1.0, 2.0, 3.0], 1e-9, 1e-7)?;
    println!(
        "{}: lhs {:.12} (11/3 = {:.12}), rhs {:.12} (6^(2/3) = {:.12})",
        r.name,
        r.lhs,
        11.0 / 3.0,
        r.rhs,
        6f64.powf(2.0 / 3.0)
    );

    // lift a random f-centered instance to S^n: points (u√(1-f²), f),
    // weights c/(1-f²); the lifted measure is isotropic in R^{n+1}
    let (m, f) = gen_random_isotropic_fcentered(3, 19, (0.6, 1.4), 11)?;
    let norm = f.l2_norm(&m)?;
    let lm = lift(&m, &f.scaled(1.0 / norm), LiftSign::Plus, 1e-7)?;
    println!(
        "lifted measure: {} atoms in R^{}, isotropy defect {:.3e}",
        lm.points().len(),
        lm.dim(),
        lm.isotropy_defect()
    );

    let t: Vec<f64> = (0..lm.points().len())
        .map(|i| 0.5 + 0.1 * i as f64)
        .collect();
    let r = bb_report_lifted(&lm, &t, 1e-7, 1e-7)?;
    println!("{}: lhs {:.6} vs rhs {:.6} (gap {:.3e})", r.name, r.lhs, r.rhs, r.gap);

    // the last coordinate weights sum to 1, so the log-domain check is tight
    // exactly when the support is ± orthonormal
    let r = lifted_trace_logcheck(&lm, 1e-7)?;
    println!("{}: lhs {:.6} vs rhs {:.6}", r.name, r.lhs, r.rhs);
    Ok(())
}
