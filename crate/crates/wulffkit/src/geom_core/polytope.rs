//! H- and V-representations of convex polytopes with origin-interior bodies.

use super::hull::{hull, HullData};
use super::{GeomError, FACET_TOL, SNAP};
use nalgebra::DVector;

/// A closed half-space `{x : x·normal <= offset}` with unit normal.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

/// Bounded intersection of half-spaces with the origin strictly interior.
#[derive(Debug, Clone)]
pub struct HPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

/// Convex polytope given by its extreme points (canonical: snapped to 1e-12
/// and sorted lexicographically).
#[derive(Debug, Clone)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<DVector<f64>>,
}

/// One facet of a polytope: outward unit normal, (n-1)-volume, and the
/// support value `h(P, normal)`.
#[derive(Debug, Clone)]
pub struct FacetData {
    pub normal: DVector<f64>,
    pub area: f64,
    pub support: f64,
}

fn snap(x: f64) -> f64 {
    (x / SNAP).round() * SNAP
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

impl HPolytope {
    /// Validates unit normals, positive offsets (origin interior), and
    /// boundedness (the normals must positively span `R^dim`).
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self, GeomError> {
        if halfspaces.len() < dim + 1 {
            return Err(GeomError::UnboundedBody);
        }
        let mut hs = Vec::with_capacity(halfspaces.len());
        for h in halfspaces {
            if h.normal.len() != dim {
                return Err(GeomError::Invalid("normal dimension mismatch".into()));
            }
            let norm = h.normal.norm();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(GeomError::Invalid("zero or non-finite normal".into()));
            }
            if (norm - 1.0).abs() > 1e-12 {
                return Err(GeomError::Invalid("normal is not unit length".into()));
            }
            if !(h.offset > 0.0) {
                return Err(GeomError::OriginNotInterior);
            }
            hs.push(Halfspace {
                normal: h.normal / norm,
                offset: h.offset / norm,
            });
        }
        let p = HPolytope {
            dim,
            halfspaces: hs,
        };
        p.dual_hull()?; // boundedness check
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| h.normal.dot(x) <= h.offset + tol)
    }

    /// Hull of the dual points `a_i/b_i`; the body is bounded iff the origin
    /// is strictly interior to this hull.
    fn dual_hull(&self) -> Result<HullData, GeomError> {
        let duals: Vec<DVector<f64>> = self
            .halfspaces
            .iter()
            .map(|h| &h.normal / h.offset)
            .collect();
        let data = hull(&duals, self.dim).map_err(|e| match e {
            GeomError::DegenerateInput(_) => GeomError::UnboundedBody,
            other => other,
        })?;
        let scale = duals.iter().map(|d| d.norm()).fold(1.0, f64::max);
        if data.facets.iter().any(|f| f.offset <= FACET_TOL * scale) {
            return Err(GeomError::UnboundedBody);
        }
        Ok(data)
    }
}

impl VPolytope {
    /// Canonicalizes an arbitrary point set down to its extreme points.
    pub fn new(dim: usize, points: Vec<DVector<f64>>) -> Result<Self, GeomError> {
        let data = hull(&points, dim)?;
        let verts = data
            .vertex_ids
            .iter()
            .map(|&i| data.points[i].clone())
            .collect();
        Ok(Self::from_extreme(dim, verts))
    }

    /// Internal constructor for points already known to be extreme.
    pub(crate) fn from_extreme(dim: usize, mut vertices: Vec<DVector<f64>>) -> Self {
        for v in &mut vertices {
            for x in v.iter_mut() {
                *x = snap(*x);
            }
        }
        vertices.sort_by(lex_cmp);
        VPolytope { dim, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub(crate) fn hull_data(&self) -> Result<HullData, GeomError> {
        hull(&self.vertices, self.dim)
    }

    /// Max of `u·v` over the vertices.
    pub fn support(&self, u: &DVector<f64>) -> f64 {
        self.vertices
            .iter()
            .map(|v| u.dot(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// n-dimensional volume by triangulation fanned from the vertex
    /// barycenter. Deterministic and exact for polytopes.
    pub fn volume(&self) -> Result<f64, GeomError> {
        Ok(self.volume_centroid()?.0)
    }

    /// Volume-weighted barycenter, via the same triangulation as `volume`.
    pub fn centroid(&self) -> Result<DVector<f64>, GeomError> {
        Ok(self.volume_centroid()?.1)
    }

    pub fn volume_centroid(&self) -> Result<(f64, DVector<f64>), GeomError> {
        let data = self.hull_data()?;
        let n = self.dim;
        let apex: DVector<f64> =
            self.vertices.iter().sum::<DVector<f64>>() / self.vertices.len() as f64;
        let nfact: f64 = (1..=n).map(|i| i as f64).product();
        let mut vol = 0.0;
        let mut moment = DVector::zeros(n);
        for f in &data.simplices {
            // simplex (apex, v_1..v_n): volume = |det[v_i - apex]|/n!
            let m = nalgebra::DMatrix::from_fn(n, n, |r, c| data.points[f.verts[c]][r] - apex[r]);
            let v = m.determinant().abs() / nfact;
            let mut cen = apex.clone();
            for &id in &f.verts {
                cen += &data.points[id];
            }
            cen /= (n + 1) as f64;
            vol += v;
            moment += cen * v;
        }
        if vol <= 0.0 {
            return Err(GeomError::DegenerateInput(n));
        }
        Ok((vol, moment / vol))
    }

    /// Vertex-set equality within `tol` (both sides canonical).
    pub fn approx_eq(&self, other: &VPolytope, tol: f64) -> bool {
        self.dim == other.dim
            && self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(other.vertices.iter())
                .all(|(a, b)| (a - b).amax() <= tol)
    }
}

/// Vertex representation of a bounded H-polytope, via polar duality: the
/// vertices of P are `m/d` over the facets `(m, d)` of `conv{a_i/b_i}`.
pub fn halfspace_to_vertices(p: &HPolytope) -> Result<VPolytope, GeomError> {
    let duals: Vec<DVector<f64>> = p
        .halfspaces()
        .iter()
        .map(|h| &h.normal / h.offset)
        .collect();
    let data = hull(&duals, p.dim())?;
    let scale = duals.iter().map(|d| d.norm()).fold(1.0, f64::max);
    let mut verts = Vec::with_capacity(data.facets.len());
    for f in &data.facets {
        if f.offset <= FACET_TOL * scale {
            return Err(GeomError::UnboundedBody);
        }
        verts.push(&f.normal / f.offset);
    }
    Ok(VPolytope::from_extreme(p.dim(), verts))
}

/// Facet description of a V-polytope; requires the origin strictly interior.
pub fn vertices_to_halfspaces(p: &VPolytope) -> Result<HPolytope, GeomError> {
    let data = p.hull_data()?;
    let mut hs = Vec::with_capacity(data.facets.len());
    for f in &data.facets {
        if f.offset <= 0.0 {
            return Err(GeomError::OriginNotInterior);
        }
        hs.push(Halfspace {
            normal: f.normal.clone(),
            offset: f.offset,
        });
    }
    HPolytope::new(p.dim(), hs)
}

/// Polar of an H-representation: `conv{a_i/b_i}` with redundancy dropped.
pub fn polar_h_to_v(p: &HPolytope) -> Result<VPolytope, GeomError> {
    let duals: Vec<DVector<f64>> = p
        .halfspaces()
        .iter()
        .map(|h| &h.normal / h.offset)
        .collect();
    VPolytope::new(p.dim(), duals)
}

/// Polar of a V-representation: `{x : x·v_j <= 1}` over the extreme points.
pub fn polar_v_to_h(p: &VPolytope) -> Result<HPolytope, GeomError> {
    let mut hs = Vec::with_capacity(p.vertices().len());
    for v in p.vertices() {
        let norm = v.norm();
        if norm <= FACET_TOL {
            return Err(GeomError::OriginNotInterior);
        }
        hs.push(Halfspace {
            normal: v / norm,
            offset: 1.0 / norm,
        });
    }
    HPolytope::new(p.dim(), hs)
}

/// Surface area measure of a polytope: one entry per facet with outward unit
/// normal, (n-1)-volume and support value. Satisfies `Σ area_j·normal_j = 0`.
pub fn surface_area_measure(p: &VPolytope) -> Result<Vec<FacetData>, GeomError> {
    let data = p.hull_data()?;
    Ok(data
        .facets
        .iter()
        .map(|m| FacetData {
            normal: m.normal.clone(),
            area: m.area,
            support: m.offset,
        })
        .collect())
}
