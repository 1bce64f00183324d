//! The structural toolbox: convex hulls with exact facet data, polarity as an
//! involution, L_p surface area measures, mixed volumes, and reconstructing a
//! polytope from its own surface data.

use nalgebra::dvector;
use wulffkit::bodies::{sp_measure, vp_mixed_volume, wulff_reconstruction_check, ConvexBody};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // an octahedron
    let pts = vec![
        dvector![1.0, 0.0, 0.0],
        dvector![-1.0, 0.0, 0.0],
        dvector![0.0, 1.0, 0.0],
        dvector![0.0, -1.0, 0.0],
        dvector![0.0, 0.0, 1.0],
        dvector![0.0, 0.0, -1.0],
    ];
    let k = ConvexBody::from_points(3, pts)?;
    println!(
        "octahedron: {} vertices, {} facets, volume {:.6} (exact 4/3)",
        k.vbody().vertices().len(),
        k.facets().len(),
        k.volume()?
    );

    // polarity: the polar of the octahedron is the cube, and the polar of
    // the polar is the original body
    let polar = k.polar()?;
    println!("polar volume: {:.6} (cube of side 2: 8)", polar.volume()?);
    let back = polar.polar()?;
    println!(
        "polar is an involution: {}",
        k.vbody().approx_eq(back.vbody(), 1e-9)
    );

    // the L_p surface measure reweights facet areas by h^{1-p}; the p-mixed
    // volume of a body with itself is the plain volume for every p
    for p in [1.0, 2.0, 3.5] {
        let sp = sp_measure(&k, p);
        let total: f64 = sp.entries.iter().map(|(_, w)| w).sum();
        println!(
            "p = {p}: total S_p mass {:.6}, V_p(K,K) = {:.9} (volume {:.9})",
            total,
            vp_mixed_volume(&k, &k, p),
            k.volume()?
        );
    }

    // a polytope is the Wulff shape of its own surface data
    println!(
        "reconstruction from own surface data: {}",
        wulff_reconstruction_check(&k, 2.0)?
    );
    Ok(())
}
