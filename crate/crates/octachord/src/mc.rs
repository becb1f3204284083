//! Monte Carlo ground truth, independent of every closed form: stick-tossing
//! gamma(r), isotropic uniform random chords (whose length density is eta),
//! direct per-facet-pair simulation of gamma''_class, and interior moments.
//!
//! Determinism: work is cut into fixed 65536-sample blocks; block b uses
//! ChaCha8 stream b of the configured seed, blocks are reduced in index
//! order, so results are bit-identical for any thread count.

use crate::error::{Error, Result};
use crate::geometry::{contains, cross, dot, norm, sub, OctahedronGeometry, PairTag};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const BLOCK_SAMPLES: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
    pub bins: usize,
    /// Histogram support [0, r_max]; use the diameter sqrt2 * edge.
    pub r_max: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { seed: 0, samples: 1_000_000, bins: 200, r_max: 2f64.sqrt() }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::BadMcConfig("samples must be >= 1".into()));
        }
        if self.bins < 1 {
            return Err(Error::BadMcConfig("bins must be >= 1".into()));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::BadMcConfig(format!("r_max {} must be positive", self.r_max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct McHistogram {
    /// bins+1 edges, uniform except one extra edge splitting the bin that
    /// contains the jump location h (so the jump is never smeared).
    pub bin_edges: Vec<f64>,
    pub density: Vec<f64>,
    pub std_err: Vec<f64>,
    /// Raw deposited weight; hits for unit-weight estimators.
    pub total_weight: f64,
    /// Weighted mean abscissa of deposits (the mean chord for iur_chords).
    pub mean: f64,
    pub mean_std_err: f64,
    /// Samples discarded by numeric guards (near-parallel ray/plane).
    pub discarded: u64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_err: f64,
}

/// Fixed representative ordered facet pair per class; within a class all
/// pairs are congruent under the symmetry group.  Facet k carries the sign
/// triple from the bits of k, so 0=(+,+,+), 1=(-,+,+), 3=(-,-,+), 7=(-,-,-).
pub fn representative_pair(tag: PairTag) -> (usize, usize) {
    match tag {
        PairTag::Edge => (0, 1),
        PairTag::Vertex => (0, 3),
        PairTag::Parallel => (0, 7),
    }
}

/// Cuts `samples` into fixed-size blocks, runs `body` on each with its own
/// deterministic RNG stream, and returns per-block results in block order.
fn run_blocks<T, FInit, FBody>(seed: u64, samples: u64, init: FInit, body: FBody) -> Vec<T>
where
    T: Send,
    FInit: Fn() -> T + Sync,
    FBody: Fn(&mut T, &mut ChaCha8Rng, u64) + Sync,
{
    let nblocks = samples.div_ceil(BLOCK_SAMPLES).max(1);
    (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let n = BLOCK_SAMPLES.min(samples - b * BLOCK_SAMPLES);
            let mut acc = init();
            body(&mut acc, &mut rng, n);
            acc
        })
        .collect()
}

fn sphere_dir(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.gen::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Histogram edges: `bins` uniform cells on [0, r_max] plus a split at the
/// jump location if it falls strictly inside a cell.
fn build_edges(bins: usize, r_max: f64, split_at: Option<f64>) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=bins).map(|i| r_max * i as f64 / bins as f64).collect();
    if let Some(h) = split_at {
        if h > 0.0 && h < r_max && edges.iter().all(|e| (e - h).abs() > 1e-12 * r_max) {
            let pos = edges.partition_point(|e| *e < h);
            edges.insert(pos, h);
        }
    }
    edges
}

fn bin_index(edges: &[f64], t: f64) -> Option<usize> {
    if !(0.0..=edges[edges.len() - 1]).contains(&t) {
        return None;
    }
    Some((edges.partition_point(|e| *e <= t).saturating_sub(1)).min(edges.len() - 2))
}

struct HistAccum {
    w: Vec<f64>,
    w2: Vec<f64>,
    deposits: u64,
    discarded: u64,
    sum_wt: f64,
    sum_wt2: f64,
}

impl HistAccum {
    fn new(nbins: usize) -> Self {
        HistAccum {
            w: vec![0.0; nbins],
            w2: vec![0.0; nbins],
            deposits: 0,
            discarded: 0,
            sum_wt: 0.0,
            sum_wt2: 0.0,
        }
    }

    fn deposit(&mut self, edges: &[f64], t: f64, weight: f64) {
        if let Some(i) = bin_index(edges, t) {
            self.w[i] += weight;
            self.w2[i] += weight * weight;
            self.deposits += 1;
            self.sum_wt += weight * t;
            self.sum_wt2 += weight * t * t;
        }
    }

    fn merge(mut self, other: HistAccum) -> HistAccum {
        for (a, b) in self.w.iter_mut().zip(&other.w) {
            *a += b;
        }
        for (a, b) in self.w2.iter_mut().zip(&other.w2) {
            *a += b;
        }
        self.deposits += other.deposits;
        self.discarded += other.discarded;
        self.sum_wt += other.sum_wt;
        self.sum_wt2 += other.sum_wt2;
        self
    }

    /// Density and per-bin standard error with `n` as the effective sample
    /// count: all samples for weighted estimators, hits for conditional ones.
    fn finalize(self, edges: Vec<f64>, n: u64) -> McHistogram {
        let nf = n.max(1) as f64;
        let mut density = Vec::with_capacity(self.w.len());
        let mut std_err = Vec::with_capacity(self.w.len());
        for (i, (&w, &w2)) in self.w.iter().zip(&self.w2).enumerate() {
            let width = edges[i + 1] - edges[i];
            let mean = w / nf;
            let var = (w2 / nf - mean * mean).max(0.0) / nf;
            density.push(mean / width);
            std_err.push(var.sqrt() / width);
        }
        let total_weight: f64 = self.w.iter().sum();
        let (mean, mean_std_err) = if total_weight > 0.0 {
            let m = self.sum_wt / total_weight;
            let var = (self.sum_wt2 / total_weight - m * m).max(0.0);
            (m, (var / self.deposits.max(1) as f64).sqrt())
        } else {
            (0.0, 0.0)
        };
        McHistogram {
            bin_edges: edges,
            density,
            std_err,
            total_weight,
            mean,
            mean_std_err,
            discarded: self.discarded,
        }
    }
}

/// Fraction of sticks of length r with both ends inside, conditioned on the
/// first end being inside; estimates gamma(r).  Returns (estimate, std_err).
pub fn stick_gamma(r: f64, cfg: &McConfig, geom: &OctahedronGeometry) -> Result<(f64, f64)> {
    cfg.validate()?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::OutOfRange { r, lo: 0.0, hi: f64::INFINITY });
    }
    let a = geom.circumradius;
    let parts = run_blocks(
        cfg.seed,
        cfg.samples,
        || (0u64, 0u64),
        |acc, rng, n| {
            for _ in 0..n {
                let p = [
                    a * (2.0 * rng.gen::<f64>() - 1.0),
                    a * (2.0 * rng.gen::<f64>() - 1.0),
                    a * (2.0 * rng.gen::<f64>() - 1.0),
                ];
                if !contains(p, geom) {
                    continue;
                }
                acc.0 += 1;
                let w = sphere_dir(rng);
                let q = [p[0] + r * w[0], p[1] + r * w[1], p[2] + r * w[2]];
                if contains(q, geom) {
                    acc.1 += 1;
                }
            }
        },
    );
    let (inside, hits) = parts
        .into_iter()
        .fold((0u64, 0u64), |(i, h), (bi, bh)| (i + bi, h + bh));
    if inside == 0 {
        return Err(Error::DegenerateSampling);
    }
    let p = hits as f64 / inside as f64;
    Ok((p, (p * (1.0 - p) / inside as f64).sqrt()))
}

/// Chord-length histogram under isotropic uniform random lines: uniform
/// direction, uniform point on the disk of radius `circumradius` normal to
/// it, chord from clipping against the 8 facet half-spaces.  Conditioned on
/// hitting, the length density is eta; the histogram integrates to 1.
pub fn iur_chords(cfg: &McConfig, geom: &OctahedronGeometry) -> Result<McHistogram> {
    cfg.validate()?;
    let a = geom.circumradius;
    let plane_d = a / 3f64.sqrt();
    let edges = build_edges(cfg.bins, cfg.r_max, Some(geom.parallel_distance));
    let nbins = edges.len() - 1;
    let parts = run_blocks(
        cfg.seed,
        cfg.samples,
        || HistAccum::new(nbins),
        |acc, rng, n| {
            for _ in 0..n {
                let w = sphere_dir(rng);
                let (e1, e2) = perp_basis(w);
                let rho = a * rng.gen::<f64>().sqrt();
                let phi = 2.0 * PI * rng.gen::<f64>();
                let (c, s) = (rho * phi.cos(), rho * phi.sin());
                let p = [
                    c * e1[0] + s * e2[0],
                    c * e1[1] + s * e2[1],
                    c * e1[2] + s * e2[2],
                ];
                let mut smin = f64::NEG_INFINITY;
                let mut smax = f64::INFINITY;
                let mut miss = false;
                for facet in &geom.facets {
                    let nw = dot(facet.normal, w);
                    let np = dot(facet.normal, p);
                    if nw.abs() < 1e-15 {
                        if np > plane_d {
                            miss = true;
                            break;
                        }
                    } else if nw > 0.0 {
                        smax = smax.min((plane_d - np) / nw);
                    } else {
                        smin = smin.max((plane_d - np) / nw);
                    }
                }
                if !miss && smax > smin {
                    acc.deposit(&edges, smax - smin, 1.0);
                }
            }
        },
    );
    let merged = parts.into_iter().reduce(HistAccum::merge).unwrap();
    let hits = merged.deposits;
    Ok(merged.finalize(edges, hits))
}

/// Direct simulation of one facet pair's chord density: a point uniform on
/// facet 1, a direction uniform on the sphere, deposit at the distance t
/// where the ray meets facet 2 with weight (A1/V) |nu1.omega| (the sign
/// cancellation is exact: forward hits on a convex body have
/// nu1.omega <= 0 <= nu2.omega).  Estimates gamma''_class of the pair.
pub fn mc_pair_density(
    class: PairTag,
    cfg: &McConfig,
    geom: &OctahedronGeometry,
) -> Result<McHistogram> {
    cfg.validate()?;
    let (i1, i2) = representative_pair(class);
    let f1 = &geom.facets[i1];
    let f2 = &geom.facets[i2];
    let plane_d2 = dot(f2.normal, f2.vertices[0]);
    let t1 = [
        sub(f1.vertices[1], f1.vertices[0]),
        sub(f1.vertices[2], f1.vertices[0]),
    ];
    let t2 = [
        sub(f2.vertices[1], f2.vertices[0]),
        sub(f2.vertices[2], f2.vertices[0]),
    ];
    // Barycentric solve on facet 2, precomputed Gram terms.
    let d11 = dot(t2[0], t2[0]);
    let d12 = dot(t2[0], t2[1]);
    let d22 = dot(t2[1], t2[1]);
    let inv_den = 1.0 / (d11 * d22 - d12 * d12);
    let weight_scale = f1.area / geom.volume;
    let edges = build_edges(cfg.bins, cfg.r_max, Some(geom.parallel_distance));
    let nbins = edges.len() - 1;
    let parts = run_blocks(
        cfg.seed,
        cfg.samples,
        || HistAccum::new(nbins),
        |acc, rng, n| {
            for _ in 0..n {
                let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
                if u + v > 1.0 {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                let p = [
                    f1.vertices[0][0] + u * t1[0][0] + v * t1[1][0],
                    f1.vertices[0][1] + u * t1[0][1] + v * t1[1][1],
                    f1.vertices[0][2] + u * t1[0][2] + v * t1[1][2],
                ];
                let w = sphere_dir(rng);
                let nw2 = dot(f2.normal, w);
                if nw2.abs() < 1e-12 {
                    acc.discarded += 1;
                    continue;
                }
                let t = (plane_d2 - dot(f2.normal, p)) / nw2;
                if t <= 0.0 {
                    continue;
                }
                let x = [p[0] + t * w[0], p[1] + t * w[1], p[2] + t * w[2]];
                let dp = sub(x, f2.vertices[0]);
                let dp1 = dot(dp, t2[0]);
                let dp2 = dot(dp, t2[1]);
                let b1 = (d22 * dp1 - d12 * dp2) * inv_den;
                let b2 = (d11 * dp2 - d12 * dp1) * inv_den;
                if b1 < 0.0 || b2 < 0.0 || b1 + b2 > 1.0 {
                    continue;
                }
                let weight = -weight_scale * dot(f1.normal, w) * nw2.signum();
                debug_assert!(weight >= 0.0);
                acc.deposit(&edges, t, weight);
            }
        },
    );
    let merged = parts.into_iter().reduce(HistAccum::merge).unwrap();
    Ok(merged.finalize(edges, cfg.samples))
}

/// Uniform rejection sampling in the bounding cube: volume estimate and mean
/// squared distance from the centroid (= R_G^2) with standard errors.
pub fn interior_moments(
    cfg: &McConfig,
    geom: &OctahedronGeometry,
) -> Result<(MomentEstimate, MomentEstimate)> {
    cfg.validate()?;
    let a = geom.circumradius;
    let parts = run_blocks(
        cfg.seed,
        cfg.samples,
        || (0u64, 0.0f64, 0.0f64),
        |acc, rng, n| {
            for _ in 0..n {
                let p = [
                    a * (2.0 * rng.gen::<f64>() - 1.0),
                    a * (2.0 * rng.gen::<f64>() - 1.0),
                    a * (2.0 * rng.gen::<f64>() - 1.0),
                ];
                if contains(p, geom) {
                    let rho2 = dot(p, p);
                    acc.0 += 1;
                    acc.1 += rho2;
                    acc.2 += rho2 * rho2;
                }
            }
        },
    );
    let (acc, s1, s2) = parts
        .into_iter()
        .fold((0u64, 0.0, 0.0), |(n, x, y), (bn, bx, by)| (n + bn, x + bx, y + by));
    if acc == 0 {
        return Err(Error::DegenerateSampling);
    }
    let n = cfg.samples as f64;
    let cube = 8.0 * a * a * a;
    let p_acc = acc as f64 / n;
    let volume = MomentEstimate {
        value: cube * p_acc,
        std_err: cube * (p_acc * (1.0 - p_acc) / n).sqrt(),
    };
    let m2 = s1 / acc as f64;
    let second = MomentEstimate {
        value: m2,
        std_err: ((s2 / acc as f64 - m2 * m2).max(0.0) / acc as f64).sqrt(),
    };
    Ok((volume, second))
}

fn perp_basis(w: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if w[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let c = cross(w, pick);
    let len = norm(c);
    let e1 = [c[0] / len, c[1] / len, c[2] / len];
    let e2 = cross(w, e1);
    (e1, e2)
}
