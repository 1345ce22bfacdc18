//! Solution segments of the two-sentence entailment patterns, their centroids
//! and maximum-entropy points, and eccentricity.
//!
//! Component orders: modus ponens over P, Q uses
//! `(p(P&Q), p(P&¬Q), p(¬P&Q), p(¬P&¬Q))`; conjunction uses
//! `(p(A&B), p(A&¬B), p(¬A&B), p(¬A&¬B))`.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{enumerate_vertices, is_probability, to_f64, LinearSystem, Rational};

pub type Point = [Rational; 4];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSet {
    pub v1: Point,
    pub v2: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EccentricityReport {
    pub point: Point,
    pub centroid: Point,
    /// Exact squared eccentricity.
    pub ecc_squared: Rational,
    pub ecc: f64,
}

fn check_probability(name: &str, value: &Rational) -> Result<()> {
    if is_probability(value) {
        Ok(())
    } else {
        Err(Error::InconsistentInputs(format!("{name} = {value} is not in [0, 1]")))
    }
}

impl SegmentSet {
    pub fn new(v1: Point, v2: Point) -> Result<Self> {
        for v in [&v1, &v2] {
            let total: Rational = v.iter().sum();
            if !total.is_one() || v.iter().any(Signed::is_negative) {
                return Err(Error::InconsistentInputs("segment vertex is not a distribution".into()));
            }
        }
        Ok(SegmentSet { v1, v2 })
    }

    pub fn is_degenerate(&self) -> bool {
        self.v1 == self.v2
    }

    pub fn direction(&self) -> Point {
        std::array::from_fn(|i| &self.v2[i] - &self.v1[i])
    }

    pub fn at(&self, t: &Rational) -> Point {
        std::array::from_fn(|i| &self.v1[i] + t * (&self.v2[i] - &self.v1[i]))
    }

    /// The parameter `t ∈ [0, 1]` with `at(t) == p`, if any.
    pub fn parameter_of(&self, p: &Point) -> Option<Rational> {
        let d = self.direction();
        let k = d.iter().position(|c| !c.is_zero())?;
        let t = (&p[k] - &self.v1[k]) / &d[k];
        let inside = !t.is_negative() && t <= Rational::one();
        (inside && self.at(&t) == *p).then_some(t)
    }
}

/// Solution set of `p(P) = x`, `p(P → Q) = y`: vertices
/// `(y−(1−x), 1−y, 1−x, 0)` and `(y−(1−x), 1−y, 0, 1−x)`.
pub fn modus_ponens_segment(x: &Rational, y: &Rational) -> Result<SegmentSet> {
    check_probability("x", x)?;
    check_probability("y", y)?;
    let not_x = Rational::one() - x;
    if *y < not_x {
        return Err(Error::InconsistentInputs(format!("p(P -> Q) = {y} is below 1 - p(P) = {not_x}")));
    }
    let first = y - &not_x;
    let second = Rational::one() - y;
    let zero = Rational::zero();
    SegmentSet::new([first.clone(), second.clone(), not_x.clone(), zero.clone()], [first, second, zero, not_x])
}

/// Solution set of `p(A) = a`, `p(B) = b`, from the lower to the upper bound
/// of `p(A&B)`.
pub fn conjunction_segment(a: &Rational, b: &Rational) -> Result<SegmentSet> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    let vertex = |both: Rational| -> Point { [both.clone(), a - &both, b - &both, Rational::one() - a - b + &both] };
    let low = (a + b - Rational::one()).max(Rational::zero());
    let high = a.min(b).clone();
    SegmentSet::new(vertex(low), vertex(high))
}

pub fn centroid(seg: &SegmentSet) -> Point {
    let half = Rational::new(1.into(), 2.into());
    seg.at(&half)
}

/// Independence point `(ab, a(1−b), (1−a)b, (1−a)(1−b))`.
pub fn maxent_conjunction(a: &Rational, b: &Rational) -> Point {
    let na = Rational::one() - a;
    let nb = Rational::one() - b;
    [a * b, a * &nb, &na * b, na * nb]
}

/// Shannon entropy in nats with `0 ln 0 = 0`.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Entropy-maximizing point of a non-degenerate segment.
///
/// Entropy is concave along the segment, so its derivative
/// `−Σ d_i ln p_i(t)` changes sign once; bisection on that sign reaches the
/// parameter tolerance where comparing entropy values would stall near the
/// flat top.
pub fn maxent_on_segment(seg: &SegmentSet) -> Result<[f64; 4]> {
    if seg.is_degenerate() {
        return Err(Error::DegenerateSegment);
    }
    let v1: [f64; 4] = std::array::from_fn(|i| to_f64(&seg.v1[i]));
    let d: [f64; 4] = std::array::from_fn(|i| to_f64(&seg.v2[i]) - v1[i]);
    let slope = |t: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            if d[i] != 0.0 {
                let p = v1[i] + t * d[i];
                if p <= 0.0 {
                    // Moving away from a zero coordinate increases entropy
                    // without bound.
                    return if d[i] > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
                }
                s -= d[i] * p.ln();
            }
        }
        s
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let s = slope(mid);
        if s > 0.0 {
            lo = mid;
        } else if s < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok(std::array::from_fn(|i| v1[i] + t * d[i]))
}

fn squared_distance(p: &Point, q: &Point) -> Rational {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `d(p, ce) / max_{q ∈ seg} d(q, ce)`; the maximum is attained at either
/// vertex.
pub fn eccentricity(p: &Point, seg: &SegmentSet) -> Result<EccentricityReport> {
    if seg.is_degenerate() {
        return Err(Error::DegenerateSegment);
    }
    if seg.parameter_of(p).is_none() {
        return Err(Error::PointNotInSet);
    }
    let ce = centroid(seg);
    let ecc_squared = squared_distance(p, &ce) / squared_distance(&seg.v1, &ce);
    let ecc = to_f64(&ecc_squared).sqrt();
    Ok(EccentricityReport { point: p.clone(), centroid: ce, ecc_squared, ecc })
}

/// Vertices of a bounded 4-unknown solution set spanning at most a line.
pub fn solution_segment(system: &LinearSystem) -> Result<SegmentSet> {
    if system.variable_count != 4 {
        return Err(Error::MalformedSystem(format!("expected 4 unknowns, got {}", system.variable_count)));
    }
    let vertices = enumerate_vertices(system)?;
    let to_point = |v: &Vec<Rational>| -> Point { std::array::from_fn(|i| v[i].clone()) };
    match vertices.len() {
        0 => Err(Error::Infeasible),
        1 => SegmentSet::new(to_point(&vertices[0]), to_point(&vertices[0])),
        2 => SegmentSet::new(to_point(&vertices[0]), to_point(&vertices[1])),
        _ => Err(Error::UnsupportedDimension(affine_dimension(&vertices))),
    }
}

fn affine_dimension(points: &[Vec<Rational>]) -> usize {
    let mut rows: Vec<Vec<Rational>> =
        points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    let width = points[0].len();
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = &row[col] / &pivot_row[col];
                for (x, pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= &factor * pv;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EccMode {
    /// Eccentricity of the independence point.
    MaxentPoint,
    /// Eccentricity of a point drawn uniformly on the segment.
    UniformPoint,
}

fn ecc_f64(p: &[f64; 4], v1: &[f64; 4], v2: &[f64; 4]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..4 {
        let c = 0.5 * (v1[i] + v2[i]);
        num += (p[i] - c) * (p[i] - c);
        den += (v1[i] - c) * (v1[i] - c);
    }
    (num / den).sqrt()
}

fn conjunction_vertices(a: f64, b: f64) -> ([f64; 4], [f64; 4]) {
    let vertex = |ab: f64| [ab, a - ab, b - ab, 1.0 - a - b + ab];
    (vertex((a + b - 1.0).max(0.0)), vertex(a.min(b)))
}

const MC_CHUNK: usize = 1 << 16;

/// Monte Carlo mean eccentricity over conjunction segments with `(a, b)`
/// uniform on the unit square. Chunk `k` draws from stream `k` of the seeded
/// generator, so the estimate does not depend on the thread count.
pub fn expected_ecc_mc(mode: EccMode, samples: usize, seed: u64) -> f64 {
    assert!(samples >= 1, "at least one sample");
    let chunks = samples.div_ceil(MC_CHUNK);
    let total: f64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = MC_CHUNK.min(samples - k * MC_CHUNK);
            let mut sum = 0.0;
            let mut done = 0;
            while done < count {
                let a: f64 = rng.random();
                let b: f64 = rng.random();
                let (v1, v2) = conjunction_vertices(a, b);
                if (v2[0] - v1[0]).abs() < 1e-12 {
                    continue;
                }
                let p = match mode {
                    EccMode::MaxentPoint => [a * b, a * (1.0 - b), (1.0 - a) * b, (1.0 - a) * (1.0 - b)],
                    EccMode::UniformPoint => {
                        let t: f64 = rng.random();
                        std::array::from_fn(|i| v1[i] + t * (v2[i] - v1[i]))
                    }
                };
                sum += ecc_f64(&p, &v1, &v2);
                done += 1;
            }
            sum
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    total / samples as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub a: Rational,
    pub b: Rational,
    pub ecc: f64,
}

/// Eccentricity of the independence point at `a, b = k/steps`,
/// `k = 1..steps`.
pub fn ecc_sweep(steps: usize) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    let den = Rational::from_integer((steps as i64).into());
    for i in 1..steps {
        for j in 1..steps {
            let a = Rational::from_integer((i as i64).into()) / &den;
            let b = Rational::from_integer((j as i64).into()) / &den;
            let seg = conjunction_segment(&a, &b)?;
            let ecc = eccentricity(&maxent_conjunction(&a, &b), &seg)?.ecc;
            rows.push(SweepRow { a, b, ecc });
        }
    }
    Ok(rows)
}
