//! Builds a Wulff shape from a random f-centered isotropic measure and
//! evaluates the primal and polar volume bounds on it.

use wulffkit::measures::gen_random_isotropic_fcentered;
use wulffkit::wulff::{
    build_wulff, polar_paths_agree, polar_wulff_volume_report, wulff_volume_refined_report,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    // 19 directions on S^{n-1} with weights solved so the measure is
    // isotropic (Σ c u uᵀ = I) and f-centered (Σ c f(u) u = 0)
    let (m, f) = gen_random_isotropic_fcentered(n, 19, (0.6, 1.4), 42)?;
    println!("support size: {}", m.len());
    println!("isotropy defect: {:.3e}", m.isotropy_defect());
    println!("f-centering defect: {:.3e}", m.f_center_defect(&f)?);

    let w = build_wulff(&m, &f)?;
    println!("wulff shape: {} vertices", w.vbody().vertices().len());
    println!("volume: {:.6}", w.volume()?);
    println!("displacement (shape volume vs. moment body): {:.3e}", w.displacement()?);

    // polar computed from the H-description and from conv{u_i/f_i} agree
    println!("polar paths agree: {}", polar_paths_agree(&m, &f, 1e-9)?);

    for report in [
        wulff_volume_refined_report(&m, &f, 1e-7)?,
        polar_wulff_volume_report(&m, &f, 1e-7)?,
    ] {
        println!(
            "{}: lhs {:.6} vs rhs {:.6} (gap {:.3e}, equality: {})",
            report.name, report.lhs, report.rhs, report.gap, report.equality
        );
    }
    Ok(())
}
