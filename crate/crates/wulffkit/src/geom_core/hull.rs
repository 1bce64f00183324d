//! Incremental (beneath-beyond) convex hull for dimensions 2..=6.
//!
//! Facets are kept simplicial during construction and merged by hyperplane
//! afterwards, so coplanar triangulation artifacts never leak into the facet
//! description. Visibility uses a fixed tolerance relative to the coordinate
//! scale of the input.

use super::polytope::{FacetData, VPolytope};
use super::{GeomError, FACET_TOL};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub(crate) struct SimplicialFacet {
    /// Exactly `dim` point indices.
    pub verts: Vec<usize>,
    /// Outward unit normal.
    pub normal: DVector<f64>,
    pub offset: f64,
    /// (dim-1)-volume of this simplicial piece.
    pub area: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct MergedFacet {
    pub normal: DVector<f64>,
    pub offset: f64,
    pub area: f64,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct HullData {
    pub points: Vec<DVector<f64>>,
    /// Indices of the extreme points.
    pub vertex_ids: Vec<usize>,
    /// Simplicial boundary complex (triangulation of the merged facets).
    pub simplices: Vec<SimplicialFacet>,
    /// Facets merged by hyperplane.
    pub facets: Vec<MergedFacet>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Unnormalized outward-agnostic facet normal via cofactor expansion of the
/// edge matrix. Its norm is (dim-1)!·area of the vertex simplex.
fn cofactor_normal(points: &[DVector<f64>], verts: &[usize], dim: usize) -> DVector<f64> {
    let v0 = &points[verts[0]];
    let edges: Vec<DVector<f64>> = verts[1..].iter().map(|&i| &points[i] - v0).collect();
    let mut normal = DVector::zeros(dim);
    for k in 0..dim {
        let minor = DMatrix::from_fn(dim - 1, dim - 1, |r, c| {
            let col = if c < k { c } else { c + 1 };
            edges[r][col]
        });
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        normal[k] = sign * minor.determinant();
    }
    normal
}

/// Builds a facet from `verts`, oriented away from `interior`.
fn make_facet(
    points: &[DVector<f64>],
    verts: Vec<usize>,
    interior: &DVector<f64>,
    dim: usize,
) -> Option<SimplicialFacet> {
    let raw = cofactor_normal(points, &verts, dim);
    let norm = raw.norm();
    if norm <= f64::MIN_POSITIVE.sqrt() {
        return None;
    }
    let area = norm / factorial(dim - 1);
    let mut normal = raw / norm;
    let mut offset = normal.dot(&points[verts[0]]);
    if normal.dot(interior) > offset {
        normal = -normal;
        offset = -offset;
    }
    Some(SimplicialFacet {
        verts,
        normal,
        offset,
        area,
    })
}

/// Greedy affinely independent subset of size dim+1, or None if the input is
/// degenerate. Returns the chosen indices.
fn initial_simplex(points: &[DVector<f64>], dim: usize, tol: f64) -> Option<Vec<usize>> {
    let mut chosen = vec![0usize];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    while chosen.len() < dim + 1 {
        let p0 = &points[chosen[0]];
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = p - p0;
            for b in &basis {
                let c = r.dot(b);
                r -= b * c;
            }
            let n = r.norm();
            if best.as_ref().map_or(true, |(_, bn, _)| n > *bn) {
                best = Some((i, n, r));
            }
        }
        match best {
            Some((i, n, r)) if n > tol => {
                chosen.push(i);
                basis.push(r / n);
            }
            _ => return None,
        }
    }
    Some(chosen)
}

/// Distinguishes input degeneracy (permanent) from construction trouble
/// (retryable with a perturbed copy of the input).
enum HullFailure {
    Degenerate(GeomError),
    Construction,
}

/// Incremental hull of `points` in `R^dim`.
///
/// Heavily degenerate inputs (many points on shared hyperplanes) can pinch
/// the visibility horizon into a configuration the simplicial complex cannot
/// represent; when that happens the hull is recomputed from a
/// deterministically joggled copy of the input at increasing magnitudes. The
/// returned data is then the hull of the joggled points, which bounds the
/// geometric error by the joggle size (at most `3e-5 * scale`).
pub(crate) fn hull(points: &[DVector<f64>], dim: usize) -> Result<HullData, GeomError> {
    assert!((2..=6).contains(&dim), "dimension must be in 2..=6");
    if points.len() < dim + 1 {
        return Err(GeomError::DegenerateInput(dim));
    }
    for p in points {
        if p.len() != dim {
            return Err(GeomError::Invalid("point dimension mismatch".into()));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::Invalid("non-finite coordinate".into()));
        }
    }
    match hull_attempt(points, dim) {
        Ok(h) => return Ok(h),
        Err(HullFailure::Degenerate(e)) => return Err(e),
        Err(HullFailure::Construction) => {}
    }
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, &x| m.max(x.abs()));
    for (k, mag) in [3e-7, 3e-6, 3e-5].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a4f_4747 + k as u64);
        let jog: Vec<DVector<f64>> = points
            .iter()
            .map(|p| p.map(|x| x + scale * mag * (rng.gen::<f64>() - 0.5)))
            .collect();
        match hull_attempt(&jog, dim) {
            Ok(h) => return Ok(h),
            Err(HullFailure::Degenerate(e)) => return Err(e),
            Err(HullFailure::Construction) => continue,
        }
    }
    Err(GeomError::Invalid(
        "hull construction failed even after perturbation".into(),
    ))
}

fn hull_attempt(points: &[DVector<f64>], dim: usize) -> Result<HullData, HullFailure> {
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, &x| m.max(x.abs()));
    let tol = FACET_TOL * scale;

    let simplex = initial_simplex(points, dim, tol)
        .ok_or(HullFailure::Degenerate(GeomError::DegenerateInput(dim)))?;
    let interior: DVector<f64> =
        simplex.iter().map(|&i| &points[i]).sum::<DVector<f64>>() / (dim + 1) as f64;

    let mut facets: Vec<SimplicialFacet> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut outside: Vec<Vec<usize>> = Vec::new();
    for omit in 0..=dim {
        let verts: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != omit)
            .map(|(_, &i)| i)
            .collect();
        let f = make_facet(points, verts, &interior, dim)
            .ok_or(HullFailure::Degenerate(GeomError::DegenerateInput(dim)))?;
        facets.push(f);
        alive.push(true);
        outside.push(Vec::new());
    }

    // Assign every remaining point to the facet it lies farthest beyond.
    let mut pending: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if simplex.contains(&i) {
            continue;
        }
        assign_point(i, p, &facets, &alive, &mut outside, tol);
    }
    for (fi, out) in outside.iter().enumerate() {
        if !out.is_empty() {
            pending.push(fi);
        }
    }

    while let Some(fi) = pending.pop() {
        if !alive[fi] || outside[fi].is_empty() {
            continue;
        }
        // Farthest outside point of this facet becomes the next apex.
        let apex = *outside[fi]
            .iter()
            .max_by(|&&a, &&b| {
                let da = facets[fi].normal.dot(&points[a]) - facets[fi].offset;
                let db = facets[fi].normal.dot(&points[b]) - facets[fi].offset;
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let p = &points[apex];

        let mut visible: Vec<usize> = (0..facets.len())
            .filter(|&j| alive[j] && facets[j].normal.dot(p) - facets[j].offset > tol)
            .collect();
        if visible.is_empty() {
            // Numerically interior after all; drop it.
            outside[fi].retain(|&x| x != apex);
            if !outside[fi].is_empty() {
                pending.push(fi);
            }
            continue;
        }

        // Horizon ridges appear exactly once among the visible facets. A
        // horizon ridge whose affine hull (nearly) contains the apex would
        // produce a facet with a meaningless normal, so the neighbor facet
        // across such a ridge is absorbed into the visible set and the
        // horizon recomputed; each pass strictly grows the visible set.
        let ridge_count = loop {
            let mut ridge_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for &j in &visible {
                for omit in 0..dim {
                    let mut ridge: Vec<usize> = facets[j]
                        .verts
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != omit)
                        .map(|(_, &v)| v)
                        .collect();
                    ridge.sort_unstable();
                    *ridge_count.entry(ridge).or_insert(0) += 1;
                }
            }
            // clearance well above the visibility tolerance: a ridge passed
            // at distance d contributes O(noise/d) normal error downstream
            let clearance = 1e-7 * scale;
            let mut absorb: Vec<usize> = Vec::new();
            for (ridge, &count) in &ridge_count {
                if count != 1 || apex_clear_of_ridge(points, ridge, apex, clearance) {
                    continue;
                }
                let neighbor = (0..facets.len()).find(|&j| {
                    alive[j]
                        && !visible.contains(&j)
                        && ridge.iter().all(|v| facets[j].verts.contains(v))
                });
                match neighbor {
                    Some(j) => absorb.push(j),
                    None => {
                        return Err(HullFailure::Construction)
                    }
                }
            }
            if absorb.is_empty() {
                break ridge_count;
            }
            absorb.sort_unstable();
            absorb.dedup();
            visible.extend(absorb);
        };

        let mut orphans: Vec<usize> = Vec::new();
        for &j in &visible {
            alive[j] = false;
            orphans.extend(outside[j].drain(..));
        }
        orphans.retain(|&x| x != apex);
        orphans.sort_unstable();
        orphans.dedup();

        let mut new_ids: Vec<usize> = Vec::new();
        for (ridge, count) in ridge_count {
            if count != 1 {
                continue;
            }
            let mut verts = ridge;
            verts.push(apex);
            let f = make_facet(points, verts, &interior, dim).ok_or_else(|| {
                HullFailure::Construction
            })?;
            facets.push(f);
            alive.push(true);
            outside.push(Vec::new());
            new_ids.push(facets.len() - 1);
        }
        for &i in &orphans {
            // the receiving facet may be an old one that already left the
            // queue, so requeue whichever facet the point lands on
            if let Some(j) = assign_point(i, &points[i], &facets, &alive, &mut outside, tol) {
                pending.push(j);
            }
        }
        for &j in &new_ids {
            if !outside[j].is_empty() {
                pending.push(j);
            }
        }
    }

    let simplices: Vec<SimplicialFacet> = facets
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(f, _)| f)
        .collect();

    // Merge coplanar simplicial facets into geometric facets.
    let merge_tol = 1e-8 * scale;
    let mut merged: Vec<MergedFacet> = Vec::new();
    for f in &simplices {
        let hit = merged.iter_mut().find(|m| {
            (&m.normal - &f.normal).amax() <= 1e-8 && (m.offset - f.offset).abs() <= merge_tol
        });
        match hit {
            Some(m) => {
                m.area += f.area;
                m.vertices.extend_from_slice(&f.verts);
            }
            None => merged.push(MergedFacet {
                normal: f.normal.clone(),
                offset: f.offset,
                area: f.area,
                vertices: f.verts.clone(),
            }),
        }
    }
    for m in &mut merged {
        m.vertices.sort_unstable();
        m.vertices.dedup();
    }

    // Extreme points lie on at least dim facet hyperplanes; points that ended
    // up mid-facet through coplanar insertions do not.
    let mut candidates: Vec<usize> = simplices.iter().flat_map(|f| f.verts.clone()).collect();
    candidates.sort_unstable();
    candidates.dedup();
    let on_tol = 1e-7 * scale;
    let vertex_ids: Vec<usize> = candidates
        .into_iter()
        .filter(|&i| {
            merged
                .iter()
                .filter(|m| (m.normal.dot(&points[i]) - m.offset).abs() <= on_tol)
                .count()
                >= dim
        })
        .collect();

    // A silently corrupted complex shows up as input points escaping the
    // facet description; report it as a construction failure so the caller
    // can retry on a perturbed copy.
    let slack_tol = 1e-6 * scale;
    for p in points {
        for m in &merged {
            if m.normal.dot(p) - m.offset > slack_tol {
                return Err(HullFailure::Construction);
            }
        }
    }

    Ok(HullData {
        points: points.to_vec(),
        vertex_ids,
        simplices,
        facets: merged,
    })
}

/// Distance from the apex to the affine hull of the ridge, compared against
/// `tol`; a ridge failing this would yield a facet with a garbage normal.
fn apex_clear_of_ridge(
    points: &[DVector<f64>],
    ridge: &[usize],
    apex: usize,
    tol: f64,
) -> bool {
    let p0 = &points[ridge[0]];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for &i in &ridge[1..] {
        let mut r = &points[i] - p0;
        for b in &basis {
            let c = r.dot(b);
            r -= b * c;
        }
        let n = r.norm();
        if n > f64::MIN_POSITIVE.sqrt() {
            basis.push(r / n);
        }
    }
    let mut r = &points[apex] - p0;
    for b in &basis {
        let c = r.dot(b);
        r -= b * c;
    }
    r.norm() > tol
}

fn assign_point(
    i: usize,
    p: &DVector<f64>,
    facets: &[SimplicialFacet],
    alive: &[bool],
    outside: &mut [Vec<usize>],
    tol: f64,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, f) in facets.iter().enumerate() {
        if !alive[j] {
            continue;
        }
        let d = f.normal.dot(p) - f.offset;
        if d > tol && best.map_or(true, |(_, bd)| d > bd) {
            best = Some((j, d));
        }
    }
    best.map(|(j, _)| {
        outside[j].push(i);
        j
    })
}

/// Convex hull of a point set: extreme points plus the facet description.
///
/// Fails with `DegenerateInput` when the points span a proper affine
/// subspace. The facet support values are the hyperplane offsets, which equal
/// `h(P, normal)` whenever the origin is interior.
pub fn convex_hull(
    points: &[DVector<f64>],
    dim: usize,
) -> Result<(VPolytope, Vec<FacetData>), GeomError> {
    let h = hull(points, dim)?;
    let verts: Vec<DVector<f64>> = h.vertex_ids.iter().map(|&i| h.points[i].clone()).collect();
    let facets = h
        .facets
        .iter()
        .map(|m| FacetData {
            normal: m.normal.clone(),
            area: m.area,
            support: m.offset,
        })
        .collect();
    Ok((VPolytope::from_extreme(dim, verts), facets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn cross_polytope_2d() {
        let pts = vec![
            dvector![1.0, 0.0],
            dvector![-1.0, 0.0],
            dvector![0.0, 1.0],
            dvector![0.0, -1.0],
        ];
        let (v, facets) = convex_hull(&pts, 2).unwrap();
        assert_eq!(v.vertices().len(), 4);
        assert_eq!(facets.len(), 4);
        for f in &facets {
            assert!((f.support - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
            assert!((f.area - 2.0f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_3d() {
        let mut pts = Vec::new();
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for sz in [-1.0, 1.0] {
                    pts.push(dvector![sx, sy, sz]);
                }
            }
        }
        let (v, facets) = convex_hull(&pts, 3).unwrap();
        assert_eq!(v.vertices().len(), 8);
        assert_eq!(facets.len(), 6);
        for f in &facets {
            assert!((f.area - 4.0).abs() < 1e-9);
            assert!((f.support - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_and_coplanar_points_are_not_vertices() {
        let mut pts = vec![
            dvector![1.0, 1.0],
            dvector![-1.0, 1.0],
            dvector![-1.0, -1.0],
            dvector![1.0, -1.0],
        ];
        pts.push(dvector![0.0, 0.0]); // interior
        pts.push(dvector![0.0, 1.0]); // mid-edge
        pts.push(dvector![0.5, -1.0]); // mid-edge
        let (v, facets) = convex_hull(&pts, 2).unwrap();
        assert_eq!(v.vertices().len(), 4);
        assert_eq!(facets.len(), 4);
    }

    #[test]
    fn degenerate_input_rejected() {
        let pts = vec![
            dvector![0.0, 0.0, 0.0],
            dvector![1.0, 0.0, 0.0],
            dvector![0.0, 1.0, 0.0],
            dvector![1.0, 1.0, 0.0],
        ];
        assert!(matches!(
            convex_hull(&pts, 3),
            Err(GeomError::DegenerateInput(_))
        ));
    }

    /// Regression: a point reassigned to a facet that had already left the
    /// work queue used to be silently dropped, leaving hull vertices outside
    /// the facet description. Random 4D antipodal clouds hit that path; the
    /// hull must contain all inputs and its volume must be translation
    /// invariant.
    #[test]
    fn random_4d_hulls_are_consistent() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let mut pts: Vec<DVector<f64>> = Vec::new();
            for _ in 0..11 {
                let v = DVector::from_fn(4, |_, _| {
                    rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
                });
                pts.push(-&v);
                pts.push(v);
            }
            let h = hull(&pts, 4).unwrap();
            for p in &pts {
                for f in &h.facets {
                    assert!(
                        f.normal.dot(p) - f.offset <= 1e-9,
                        "input point escapes the hull"
                    );
                }
            }
            let vol = |ps: &[DVector<f64>]| {
                let h = hull(ps, 4).unwrap();
                let apex: DVector<f64> = ps.iter().sum::<DVector<f64>>() / ps.len() as f64;
                let mut v = 0.0;
                for f in &h.simplices {
                    let m =
                        DMatrix::from_fn(4, 4, |r, c| h.points[f.verts[c]][r] - apex[r]);
                    v += m.determinant().abs() / 24.0;
                }
                v
            };
            let shift = DVector::from_fn(4, |_, _| {
                rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
            });
            let shifted: Vec<DVector<f64>> = pts.iter().map(|p| p + &shift).collect();
            let v0 = vol(&pts);
            let v1 = vol(&shifted);
            assert!(
                ((v0 - v1) / v0).abs() < 1e-9,
                "volume not translation invariant: {v0} vs {v1}"
            );
        }
    }

    /// Brute-force extremality oracle: v is extreme iff it maximizes some
    /// linear functional strictly, which for points on the unit sphere is
    /// witnessed by the direction v itself.
    #[test]
    fn sphere_points_all_extreme() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut pts: Vec<DVector<f64>> = Vec::new();
        for _ in 0..100 {
            let v = DVector::from_fn(3, |_, _| {
                rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
            });
            let v = v.normalize();
            pts.push(-&v);
            pts.push(v);
        }
        // oracle: every unit vector strictly maximizes x·v over the others
        for (i, p) in pts.iter().enumerate() {
            for (j, q) in pts.iter().enumerate() {
                if i != j {
                    assert!(p.dot(q) < 1.0 - 1e-9);
                }
            }
        }
        let (v, _) = convex_hull(&pts, 3).unwrap();
        assert_eq!(v.vertices().len(), 200);
    }
}
