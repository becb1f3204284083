//! Per-facet-pair chord densities gamma''_E, gamma''_V, gamma''_P for the
//! unit-edge solid.  Each (class, range) branch is a separate public function
//! so tests can pin branches directly; the dispatchers select by range and
//! never evaluate a branch outside it (branches b-d carry 1/r^3 poles that
//! are harmless on their own ranges only).

use crate::error::Result;
use crate::geometry::{
    asin_clamped, classify_unit, consts, lambda_c, lambda_d, radical_r11, radical_r23,
    radical_r34, RangeTag,
};
use std::f64::consts::PI;

/// Edge-sharing pairs on [0, h): linear in r.
pub fn edge_a(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let alpha = consts::alpha();
    Ok((2.0 * s2 - PI + alpha) / (8.0 * PI)
        - (18.0 + (7.0 * s3 - 9.0) * PI) * r / (96.0 * s2 * PI))
}

/// Edge-sharing pairs on [h, sqrt3/2).
pub fn edge_b(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let s6 = consts::sqrt_6();
    let alpha = consts::alpha();
    Ok(1.0 / (12.0 * s6 * r.powi(3)) - 1.0 / (2.0 * s6 * r)
        + (4.0 + s2 * (PI + alpha)) / (8.0 * s2 * PI)
        - (18.0 - (9.0 - 13.0 * s3) * PI) * r / (96.0 * s2 * PI))
}

/// Edge-sharing pairs on [sqrt3/2, 1).
pub fn edge_c(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let alpha = consts::alpha();
    let r2 = r * r;
    let r23 = radical_r23(r)?;
    let r34 = radical_r34(r)?;
    // Argument of the last arcsine: degree-8 polynomial over 2 r^7 R23.
    let poly = 27.0 + r2 * (-90.0 + r2 * (96.0 + r2 * (-34.0 + 2.0 * r2)));
    let bracket = -4.0 * s3 * PI - 36.0 * (4.0 + s2 * alpha) * r.powi(3)
        + 3.0 * (18.0 - 9.0 * PI + 10.0 * s3 * PI) * r.powi(4)
        + 6.0 * (25.0 * r2 - 6.0) * r34
        + 8.0 * s3 * asin_clamped((9.0 * r2 - 7.0) / (2.0 * r23.powi(3)), "edge_c asin#1")?
        + 96.0 * s3 * r2 * asin_clamped(1.0 / (2.0 * r23), "edge_c asin#2")?
        - 72.0 * s2 * r.powi(3) * asin_clamped(r / (s3 * r23), "edge_c asin#3")?
        - 18.0 * s3 * r.powi(4)
            * asin_clamped(s3 * poly / (2.0 * r.powi(7) * r23), "edge_c asin#4")?;
    Ok(-bracket / (288.0 * s2 * PI * r.powi(3)))
}

/// Edge-sharing pairs on [1, sqrt2].
pub fn edge_d(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let s6 = consts::sqrt_6();
    let r2 = r * r;
    let r11 = radical_r11(r)?;
    let r23 = radical_r23(r)?;
    let bracket = -16.0 * s2 + 8.0 * s2 * (3.0 + s3 * PI) * r2 - 12.0 * PI * r.powi(3)
        + 3.0 * s2 * (4.0 * s3 - 3.0) * PI * r.powi(4)
        - 4.0 * s2 * (5.0 * r2 - 2.0) * r11
        - 24.0 * r.powi(3)
            * asin_clamped((4.0 + 4.0 * r2 - 7.0 * r2 * r2) / r23.powi(4), "edge_d asin#1")?
        + 36.0 * s2 * r.powi(4) * asin_clamped(r11 / r, "edge_d asin#2")?
        - 8.0 * s6 * r2 * (2.0 + 3.0 * r2)
            * asin_clamped((1.0 + 3.0 * r11) / (2.0 * r23), "edge_d asin#3")?;
    Ok(-bracket / (192.0 * PI * r.powi(3)))
}

/// Vertex-sharing pairs on [0, h): linear through the origin.
pub fn vertex_a(r: f64) -> Result<f64> {
    Ok((9.0 + consts::sqrt_3()) * r / (96.0 * consts::sqrt_2()))
}

/// Vertex-sharing pairs on [h, sqrt3/2).
pub fn vertex_b(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let s6 = consts::sqrt_6();
    Ok(-1.0 / (4.0 * s6 * r.powi(3)) + 1.0 / (s6 * r) + (9.0 - 29.0 * s3) * r / (96.0 * s2))
}

/// Vertex-sharing pairs on [sqrt3/2, 1); uses the lambda_c branch.
pub fn vertex_c(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let r2 = r * r;
    let r23 = radical_r23(r)?;
    let r34 = radical_r34(r)?;
    let lc = lambda_c(r)?;
    // asin((7-9r^2)/(2 R23^3)) appears twice with different weights.
    let shared = asin_clamped((7.0 - 9.0 * r2) / (2.0 * r23.powi(3)), "vertex_c asin#1")?;
    let inner = 18.0 * asin_clamped(s3 / (2.0 * r), "vertex_c asin#2")?
        + 8.0 * asin_clamped((2.0 * r2 - 3.0) / (2.0 * r2), "vertex_c asin#3")?
        + asin_clamped((9.0 + r2 * (-12.0 + 2.0 * r2)) / (2.0 * r2 * r2), "vertex_c asin#4")?
        - 30.0 * shared
        - 24.0 * asin_clamped((6.0 * r2 - 5.0) / (2.0 * r23 * r23), "vertex_c asin#5")?;
    let bracket = -8.0 * s3 * PI
        + 4.0 * r2 * (10.0 * s3 * PI + 3.0 * r34 - 4.0 * s3 * lc)
        - 9.0 * (7.0 * s3 - 2.0) * PI * r2 * r2
        + 16.0 * s3 * (4.0 * r2 - 1.0) * shared
        + 2.0 * s3 * r2 * r2 * inner;
    Ok(bracket / (192.0 * s2 * PI * r.powi(3)))
}

/// Vertex-sharing pairs on [1, sqrt2]; uses the lambda_d branch.
pub fn vertex_d(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let r2 = r * r;
    let r11 = radical_r11(r)?;
    let r23 = radical_r23(r)?;
    let ld = lambda_d(r)?;
    let poly_a = 3.0
        * (-16.0
            + r2 * (8.0 * (12.0 + s3 * PI)
                + r2 * (-16.0 * (5.0 + s3 * PI)
                    + r2 * (-2.0 * (18.0 + 5.0 * s3 * PI) + r2 * 9.0 * (3.0 + 2.0 * s3 * PI)))));
    let poly_b = 6.0
        * (8.0
            + r2 * (12.0 + r2 * (-2.0 * (31.0 + 6.0 * s3 * PI) + r2 * 3.0 * (9.0 + 4.0 * s3 * PI))));
    let angle = -2.0 * s3 * asin_clamped((4.0 - 3.0 * r2) / (r23 * r23), "vertex_d asin#1")?
        + 3.0 * r2
            * (3.0 * asin_clamped((r11 - 1.0) / (s2 * r), "vertex_d asin#2")?
                + 2.0 * s3 * asin_clamped(1.0 / r23, "vertex_d asin#3")?)
        - 2.0 * s3 * r23 * r23 * ld;
    let bracket = poly_a - poly_b * r11
        + 2.0 * r2 * (-4.0 + 9.0 * r2 * r2 + r2 * (4.0 - 12.0 * r11)) * angle;
    let denom = 3.0 * r2 - 2.0 * r11;
    Ok(-bracket / (48.0 * s2 * PI * r.powi(3) * denom * denom))
}

/// Parallel pairs are out of reach below the slab distance h.
pub fn parallel_a(_r: f64) -> Result<f64> {
    Ok(0.0)
}

/// Parallel pairs on [h, sqrt3/2); value 3/8 at h gives the jump.
pub fn parallel_b(r: f64) -> Result<f64> {
    Ok(consts::sqrt_3() * (1.0 - r * r) / (2.0 * consts::sqrt_2() * r.powi(3)))
}

/// Parallel pairs on [sqrt3/2, 1).
pub fn parallel_c(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let r23 = radical_r23(r)?;
    let r34 = radical_r34(r)?;
    let bracket = s3 * PI - 3.0 * r34
        - 2.0 * s3 * (2.0 * r * r - 1.0) * asin_clamped(1.0 / (2.0 * r23), "parallel_c asin")?;
    Ok(bracket / (4.0 * s2 * PI * r.powi(3)))
}

/// Parallel pairs on [1, sqrt2].
pub fn parallel_d(r: f64) -> Result<f64> {
    let s2 = consts::sqrt_2();
    let s3 = consts::sqrt_3();
    let r2 = r * r;
    let r11 = radical_r11(r)?;
    let r23 = radical_r23(r)?;
    let bracket = 6.0 * s3 * PI + (27.0 - 11.0 * s3 * PI) * r2 - 54.0 * r11
        + 6.0 * s3 * (5.0 * r2 - 6.0) * asin_clamped(1.0 / r23, "parallel_d asin#1")?
        + 12.0 * s3 * r2 * asin_clamped((1.0 + 3.0 * r11) / (2.0 * r23), "parallel_d asin#2")?;
    Ok(-bracket / (36.0 * s2 * PI * r.powi(3)))
}

/// Edge-pair density on a forced branch; left-limit values at breakpoints.
pub fn edge_in(r: f64, tag: RangeTag) -> Result<f64> {
    match tag {
        RangeTag::A => edge_a(r),
        RangeTag::B => edge_b(r),
        RangeTag::C => edge_c(r),
        RangeTag::D => edge_d(r),
    }
}

pub fn vertex_in(r: f64, tag: RangeTag) -> Result<f64> {
    match tag {
        RangeTag::A => vertex_a(r),
        RangeTag::B => vertex_b(r),
        RangeTag::C => vertex_c(r),
        RangeTag::D => vertex_d(r),
    }
}

pub fn parallel_in(r: f64, tag: RangeTag) -> Result<f64> {
    match tag {
        RangeTag::A => parallel_a(r),
        RangeTag::B => parallel_b(r),
        RangeTag::C => parallel_c(r),
        RangeTag::D => parallel_d(r),
    }
}

pub fn gamma2_edge(r: f64) -> Result<f64> {
    edge_in(r, classify_unit(r)?.tag)
}

pub fn gamma2_vertex(r: f64) -> Result<f64> {
    vertex_in(r, classify_unit(r)?.tag)
}

pub fn gamma2_parallel(r: f64) -> Result<f64> {
    parallel_in(r, classify_unit(r)?.tag)
}
