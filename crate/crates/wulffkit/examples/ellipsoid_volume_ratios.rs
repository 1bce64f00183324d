//! Extremal ellipsoids of a random convex body — maximal inscribed (John),
//! minimal enclosing (Loewner), and the L₂ analogue — plus the sharp
//! volume-ratio bounds they satisfy.

use wulffkit::bodies::{
    e2_ellipsoid, gen_random_body, john_contact_certificate, john_ellipsoid,
    loewner_ellipsoid, volume_ratio_reports,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = gen_random_body(3, 15, 5)?.centered()?;
    println!(
        "body: {} vertices, {} facets, volume {:.6}",
        k.vbody().vertices().len(),
        k.facets().len(),
        k.volume()?
    );

    let john = john_ellipsoid(&k)?;
    let loewner = loewner_ellipsoid(&k)?;
    let e2 = e2_ellipsoid(&k)?;
    println!("john volume:    {:.6}", john.volume());
    println!("loewner volume: {:.6}", loewner.volume());
    println!("l2 volume:      {:.6}", e2.volume());

    // move the body into John position (inscribed ellipsoid = unit ball),
    // where the contact points must form an isotropic configuration
    let eig = nalgebra::SymmetricEigen::new(john.shape().clone());
    let inv_sqrt = &eig.eigenvectors
        * nalgebra::DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    let kj = k.translate(&-john.center().clone())?.linear_image(&inv_sqrt)?;
    println!("john contact certificate: {}", john_contact_certificate(&kj)?);

    println!("volume-ratio bounds (all simplex-extremal):");
    for r in volume_ratio_reports(&k, 1e-7)? {
        println!(
            "  {}: {:.6} {} {:.6} (gap {:.3e})",
            r.name,
            r.lhs,
            if r.gap >= 0.0 { "within" } else { "VIOLATES" },
            r.rhs,
            r.gap
        );
    }
    Ok(())
}
