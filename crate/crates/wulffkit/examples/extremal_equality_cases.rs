//! The two extremal configurations: the regular simplex directions attain
//! equality in the asymmetric volume bounds, and the ± orthonormal (cube)
//! directions attain equality in the even-case bounds.

use wulffkit::measures::{gen_cube_measure, gen_simplex_measure};
use wulffkit::wulff::{
    equality_case_detect, even_polar_wulff_volume_report, even_wulff_volume_report,
    polar_wulff_volume_report, wulff_volume_refined_report, wulff_volume_report,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 2..=4 {
        println!("--- dimension {n} ---");
        let (sm, sf) = gen_simplex_measure(n);
        let flags = equality_case_detect(&sm, &sf);
        println!(
            "simplex directions: extremal detected = {}",
            flags.is_simplex_extremal
        );
        for r in [
            wulff_volume_report(&sm, &sf, 1e-7)?,
            wulff_volume_refined_report(&sm, &sf, 1e-7)?,
            polar_wulff_volume_report(&sm, &sf, 1e-7)?,
        ] {
            println!("  {}: {:.9} = {:.9}? equality {}", r.name, r.lhs, r.rhs, r.equality);
        }

        let (cm, cf) = gen_cube_measure(n);
        let cflags = equality_case_detect(&cm, &cf);
        println!("cube directions: extremal detected = {}", cflags.is_cube_extremal);
        for r in [
            even_wulff_volume_report(&cm, &cf, 1e-7)?,
            even_polar_wulff_volume_report(&cm, &cf, 1e-7)?,
        ] {
            println!("  {}: {:.9} = {:.9}? equality {}", r.name, r.lhs, r.rhs, r.equality);
        }
    }
    Ok(())
}
