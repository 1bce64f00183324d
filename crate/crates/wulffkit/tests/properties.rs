//! Property-based tests for the structural invariants: randomized inputs are
//! drawn by proptest, the assertions are the exact identities the geometry
//! must satisfy.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use wulffkit::bodies::{gen_random_body, vp_mixed_volume};
use wulffkit::measures::gen_random_isotropic_fcentered;
use wulffkit::wulff::{build_wulff, polar_paths_agree};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// A well-conditioned linear map: diagonal in (0.5, 2) plus a small random
/// off-diagonal perturbation, so |det| stays bounded away from zero.
fn linear_map(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (
        prop::collection::vec(0.5..2.0f64, n),
        prop::collection::vec(-0.2..0.2f64, n * n),
    )
        .prop_map(move |(diag, off)| {
            let mut t = DMatrix::from_fn(n, n, |i, j| off[i * n + j]);
            for i in 0..n {
                t[(i, i)] = diag[i];
            }
            t
        })
}

/// A rotation: the Q factor of a random matrix, sign-fixed to det +1.
fn rotation(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_filter_map("degenerate", move |v| {
        let m = DMatrix::from_fn(n, n, |i, j| v[i * n + j]);
        let qr = m.qr();
        let mut q = qr.q();
        if q.determinant() < 0.0 {
            let col = q.column(0) * -1.0;
            q.set_column(0, &col);
        }
        (q.determinant() - 1.0).abs().le(&1e-9).then_some(q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// The facet normals weighted by area sum to zero for every polytope.
    #[test]
    fn minkowski_relation(seed in 0u64..10_000, n in 2usize..=3) {
        let k = gen_random_body(n, 5 * n, seed).unwrap();
        let mut sum = DVector::zeros(n);
        for f in k.facets() {
            sum += &f.normal * f.area;
        }
        prop_assert!(sum.norm() <= 1e-9, "defect {}", sum.norm());
    }

    /// Polarity is an involution on bodies with the origin interior.
    #[test]
    fn polar_involution(seed in 0u64..10_000, n in 2usize..=3) {
        let k = gen_random_body(n, 5 * n, seed).unwrap();
        let back = k.polar().unwrap().polar().unwrap();
        prop_assert!(k.vbody().approx_eq(back.vbody(), 1e-7));
    }

    /// Volume is covariant under linear maps: V(TK) = |det T|·V(K).
    #[test]
    fn volume_covariance(seed in 0u64..10_000, n in 2usize..=3, t in linear_map(3)) {
        let t = t.view((0, 0), (n, n)).into_owned();
        let k = gen_random_body(n, 5 * n, seed).unwrap();
        let tk = k.linear_image(&t).unwrap();
        let expect = t.determinant().abs() * k.volume().unwrap();
        prop_assert!(
            rel_close(tk.volume().unwrap(), expect, 1e-9),
            "V(TK) = {} vs |det T|·V(K) = {}", tk.volume().unwrap(), expect
        );
    }

    /// Volume, surface area and displacement are rotation invariant.
    #[test]
    fn rotation_invariance(seed in 0u64..10_000, n in 2usize..=3, q in rotation(3)) {
        let q = {
            // re-orthonormalize the leading n×n block of the 3×3 rotation
            let block = q.view((0, 0), (n, n)).into_owned();
            let qr = block.qr();
            qr.q()
        };
        let k = gen_random_body(n, 5 * n, seed).unwrap();
        let rk = k.linear_image(&q).unwrap();
        prop_assert!(rel_close(rk.volume().unwrap(), k.volume().unwrap(), 1e-9));
        let area = |b: &wulffkit::bodies::ConvexBody| -> f64 {
            b.facets().iter().map(|f| f.area).sum()
        };
        prop_assert!(rel_close(area(&rk), area(&k), 1e-9));
    }

    /// The p-mixed volume of a body with itself is its volume for every p.
    #[test]
    fn self_mixed_volume(seed in 0u64..10_000, n in 2usize..=3, p in 1.0..4.0f64) {
        let k = gen_random_body(n, 5 * n, seed).unwrap();
        let v = k.volume().unwrap();
        prop_assert!(rel_close(vp_mixed_volume(&k, &k, p), v, 1e-9));
    }

    /// Both polar constructions agree, and the displacement never exceeds
    /// the dimension bound.
    #[test]
    fn wulff_invariants(seed in 0u64..10_000, n in 2usize..=3) {
        let m_size = n * (n + 3) / 2 + 3 * n;
        let (m, f) = gen_random_isotropic_fcentered(n, m_size, (0.6, 1.4), seed).unwrap();
        prop_assert!(polar_paths_agree(&m, &f, 1e-7).unwrap());
        let shape = build_wulff(&m, &f).unwrap();
        let disp = shape.displacement().unwrap();
        prop_assert!(disp <= n as f64 + 1e-9, "displacement {disp}");
    }
}
