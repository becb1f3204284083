use crate::error::{Error, Result};

/// Arcsine arguments may exceed [-1, 1] by rounding noise near branch points;
/// excursions beyond this slack are treated as genuine domain errors.
pub const ASIN_SLACK: f64 = 1e-9;
/// Radical arguments in [-RADICAL_SLACK, 0) clamp to zero.
pub const RADICAL_SLACK: f64 = 1e-9;
/// Slack on range boundaries for r that arrives with rounding error (e.g. r = sqrt2*edge/edge).
const RANGE_SLACK: f64 = 1e-12;

/// Fixed angles and unit-edge breakpoints shared by all closed forms.
pub mod consts {
    pub fn sqrt_2() -> f64 {
        std::f64::consts::SQRT_2
    }

    pub fn sqrt_3() -> f64 {
        3f64.sqrt()
    }

    pub fn sqrt_6() -> f64 {
        6f64.sqrt()
    }

    /// arccos(-1/3): angle between outward normals of edge-sharing facets.
    pub fn alpha() -> f64 {
        (-1f64 / 3.0).acos()
    }

    /// Unit-edge distances where gamma'' changes branch: parallel-facet gap
    /// sqrt(2/3), facet height sqrt(3)/2, edge 1, diameter sqrt(2).
    pub fn minimax() -> [f64; 4] {
        [(2f64 / 3.0).sqrt(), 3f64.sqrt() / 2.0, 1.0, sqrt_2()]
    }

    /// Arcsine branch flip of lambda_c, inside range C.
    pub fn lambda_c_flip() -> f64 {
        (5f64 / 6.0).sqrt()
    }

    /// Arcsine branch flip of lambda_d, inside range D.
    pub fn lambda_d_flip() -> f64 {
        10f64.sqrt() / 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub vertices: [[f64; 3]; 3],
    /// Indices into the solid's vertex list, ordered (+x, -x, +y, -y, +z, -z).
    pub vertex_ids: [usize; 3],
    /// Outward unit normal, one of (+-1, +-1, +-1)/sqrt3.
    pub normal: [f64; 3],
    pub area: f64,
}

#[derive(Debug, Clone)]
pub struct OctahedronGeometry {
    pub edge: f64,
    pub volume: f64,
    pub surface: f64,
    /// Center-to-vertex distance a = edge/sqrt2.
    pub circumradius: f64,
    /// Facet height H = sqrt3*edge/2.
    pub facet_height: f64,
    /// Distance h between parallel facets; gamma'' jumps there.
    pub parallel_distance: f64,
    /// arccos(-1/3).
    pub alpha: f64,
    pub alpha_c: f64,
    /// Branch-change distances (h, H, edge, sqrt2*edge).
    pub minimax: [f64; 4],
    pub facets: [Facet; 8],
}

pub fn make_octahedron(edge: f64) -> Result<OctahedronGeometry> {
    if !edge.is_finite() || edge <= 0.0 {
        return Err(Error::InvalidEdge(edge));
    }
    let a = edge / consts::sqrt_2();
    // Vertex list (+x, -x, +y, -y, +z, -z); facet k takes its sign triple from the bits of k.
    let verts = [
        [a, 0.0, 0.0],
        [-a, 0.0, 0.0],
        [0.0, a, 0.0],
        [0.0, -a, 0.0],
        [0.0, 0.0, a],
        [0.0, 0.0, -a],
    ];
    let inv_s3 = 1.0 / consts::sqrt_3();
    let facets = std::array::from_fn(|k| {
        let sx = if k & 1 == 0 { 1.0 } else { -1.0 };
        let sy = if k & 2 == 0 { 1.0 } else { -1.0 };
        let sz = if k & 4 == 0 { 1.0 } else { -1.0 };
        let ids = [k & 1, 2 + ((k >> 1) & 1), 4 + ((k >> 2) & 1)];
        let vertices = [verts[ids[0]], verts[ids[1]], verts[ids[2]]];
        let e1 = sub(vertices[1], vertices[0]);
        let e2 = sub(vertices[2], vertices[0]);
        Facet {
            vertices,
            vertex_ids: ids,
            // (sx,sy,sz)/sqrt3 points away from the centroid for this vertex ordering.
            normal: [sx * inv_s3, sy * inv_s3, sz * inv_s3],
            area: 0.5 * norm(cross(e1, e2)),
        }
    });
    let alpha = consts::alpha();
    let mm = consts::minimax();
    Ok(OctahedronGeometry {
        edge,
        volume: consts::sqrt_2() * edge.powi(3) / 3.0,
        surface: 2.0 * consts::sqrt_3() * edge * edge,
        circumradius: a,
        facet_height: mm[1] * edge,
        parallel_distance: mm[0] * edge,
        alpha,
        alpha_c: std::f64::consts::PI - alpha,
        minimax: [mm[0] * edge, mm[1] * edge, edge, mm[3] * edge],
        facets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RangeTag {
    A,
    B,
    C,
    D,
}

/// One of the four distance ranges; half-open on the right except D, so a
/// breakpoint belongs to the range on its right (gamma'' is right-continuous).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeId {
    pub tag: RangeTag,
    pub lower: f64,
    pub upper: f64,
}

pub fn classify_range(r: f64, geom: &OctahedronGeometry) -> Result<RangeId> {
    classify_against(r, &geom.minimax)
}

/// Range dispatch for the unit-edge closed forms.
pub(crate) fn classify_unit(r: f64) -> Result<RangeId> {
    classify_against(r, &consts::minimax())
}

fn classify_against(r: f64, mm: &[f64; 4]) -> Result<RangeId> {
    let [h, hh, edge, diam] = *mm;
    if !r.is_finite() || r < 0.0 || r > diam * (1.0 + RANGE_SLACK) {
        return Err(Error::OutOfRange { r, lo: 0.0, hi: diam });
    }
    let (tag, lower, upper) = if r < h {
        (RangeTag::A, 0.0, h)
    } else if r < hh {
        (RangeTag::B, h, hh)
    } else if r < edge {
        (RangeTag::C, hh, edge)
    } else {
        (RangeTag::D, edge, diam)
    };
    Ok(RangeId { tag, lower, upper })
}

fn radical(name: &'static str, r: f64, arg: f64) -> Result<f64> {
    if arg >= 0.0 {
        Ok(arg.sqrt())
    } else if arg >= -RADICAL_SLACK {
        Ok(0.0)
    } else {
        Err(Error::RadicalDomain { name, r, arg })
    }
}

pub fn radical_r11(r: f64) -> Result<f64> {
    radical("R11", r, r * r - 1.0)
}

pub fn radical_r23(r: f64) -> Result<f64> {
    radical("R23", r, 3.0 * r * r - 2.0)
}

pub fn radical_r34(r: f64) -> Result<f64> {
    radical("R34", r, 4.0 * r * r - 3.0)
}

/// All three radicals at once; only valid where every argument is nonnegative
/// (r >= 1 up to slack), i.e. range D.
pub fn radicals(r: f64) -> Result<(f64, f64, f64)> {
    Ok((radical_r11(r)?, radical_r23(r)?, radical_r34(r)?))
}

pub(crate) fn asin_clamped(arg: f64, term: &'static str) -> Result<f64> {
    if arg.abs() <= 1.0 {
        Ok(arg.asin())
    } else if arg.abs() <= 1.0 + ASIN_SLACK {
        Ok(std::f64::consts::FRAC_PI_2.copysign(arg))
    } else {
        Err(Error::ArcsineDomain { term, arg })
    }
}

/// Arcsine branch used by the vertex-pair density in range C.  The flip at
/// sqrt(5/6) is an analytic continuation: the argument touches -1 there and
/// the function passes through -pi/2 smoothly.
pub fn lambda_c(r: f64) -> Result<f64> {
    let lo = consts::minimax()[1];
    if !(lo - RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&r) {
        return Err(Error::OutOfRange { r, lo, hi: 1.0 });
    }
    let r23 = radical_r23(r)?;
    let arg = (17.0 + 18.0 * r * r * (r * r - 2.0)) / (2.0 * r23.powi(4));
    let asin = asin_clamped(arg, "lambda_c")?;
    Ok(if r <= consts::lambda_c_flip() {
        asin
    } else {
        -std::f64::consts::PI - asin
    })
}

/// Arcsine branch used by the vertex-pair density in range D; flips at
/// sqrt(10)/3 where the argument touches +1 and the value passes pi/2.
pub fn lambda_d(r: f64) -> Result<f64> {
    let hi = consts::sqrt_2();
    if !(1.0 - RANGE_SLACK..=hi * (1.0 + RANGE_SLACK)).contains(&r) {
        return Err(Error::OutOfRange { r, lo: 1.0, hi });
    }
    let arg = consts::sqrt_3() * (radical_r11(r)? + 1.0) / (2.0 * radical_r23(r)?);
    let asin = asin_clamped(arg, "lambda_d")?;
    Ok(if r <= consts::lambda_d_flip() {
        asin
    } else {
        std::f64::consts::PI - asin
    })
}

/// The solid is the L1 ball {|x|+|y|+|z| <= circumradius}; boundary counts as inside.
pub fn contains(point: [f64; 3], geom: &OctahedronGeometry) -> bool {
    point[0].abs() + point[1].abs() + point[2].abs() <= geom.circumradius
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairTag {
    Edge,
    Vertex,
    Parallel,
}

impl PairTag {
    /// Ordered facet pairs of this kind among the 56 distinct pairs.
    pub fn multiplicity(self) -> u32 {
        match self {
            PairTag::Edge | PairTag::Vertex => 24,
            PairTag::Parallel => 8,
        }
    }
}

impl std::fmt::Display for PairTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PairTag::Edge => "edge",
            PairTag::Vertex => "vertex",
            PairTag::Parallel => "parallel",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairClass {
    pub tag: PairTag,
    pub multiplicity: u32,
}

/// Classifies an ordered pair of distinct facets by shared vertex count:
/// 2 shared = edge-sharing, 1 = vertex-sharing, 0 = parallel (antipodal).
pub fn classify_pair(f1: usize, f2: usize, geom: &OctahedronGeometry) -> Result<PairClass> {
    for f in [f1, f2] {
        if f >= geom.facets.len() {
            return Err(Error::FacetIndex(f));
        }
    }
    if f1 == f2 {
        return Err(Error::SelfPair(f1));
    }
    let ids1 = geom.facets[f1].vertex_ids;
    let shared = geom.facets[f2]
        .vertex_ids
        .iter()
        .filter(|id| ids1.contains(id))
        .count();
    let tag = match shared {
        2 => PairTag::Edge,
        1 => PairTag::Vertex,
        _ => PairTag::Parallel,
    };
    Ok(PairClass { tag, multiplicity: tag.multiplicity() })
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
