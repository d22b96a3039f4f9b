//! Numerical checks behind the envelopes:
//!
//! * the quadratic form `ξ = (uᵀx)² − 1` and its variance `(η−2)Σu_i⁴ + 2`,
//! * ε-nets of the unit sphere and the bound
//!   `‖A‖ ≤ sup_{v∈N} |vᵀAv| / (1 − √(ε²(4−ε²)))`,
//! * Monte Carlo estimates of the moderate-deviation rate
//!   `a_n⁻² log P(S_n/(√n a_n) ≥ μ) → −μ²/2` for centered chi-square steps.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::distributions::{EntryDistribution, SeedSpec};
use crate::eigen_small::spectral_norm;
use crate::error::{Error, Result};

const UNIT_TOLERANCE: f64 = 1e-12;

/// Upper limit `√(2 − √3)` on ε for the net bound.
pub fn epsilon_limit() -> f64 {
    (2.0 - 3f64.sqrt()).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Accepts `components` if their Euclidean norm is 1 within 1e-12.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let norm = norm(&components);
        if components.is_empty() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::param(format!("vector norm {norm} is not 1")));
        }
        Ok(UnitVector(components))
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalize(mut components: Vec<f64>) -> Result<Self> {
        let norm = norm(&components);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::param("cannot normalize a zero or non-finite vector"));
        }
        components.iter_mut().for_each(|c| *c /= norm);
        Ok(UnitVector(components))
    }

    /// The `i`-th standard basis vector of `R^m`.
    pub fn basis(m: usize, i: usize) -> Self {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        UnitVector(v)
    }

    /// `(1/√m, …, 1/√m)`.
    pub fn uniform(m: usize) -> Self {
        UnitVector(vec![1.0 / (m as f64).sqrt(); m])
    }

    fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
            if let Ok(u) = UnitVector::normalize(v) {
                return u;
            }
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `ξ = (Σ u_i x_i)² − 1`.
pub fn quadform_xi(u: &UnitVector, x: &[f64]) -> Result<f64> {
    if x.len() != u.dim() {
        return Err(Error::Shape {
            expected: u.dim(),
            got: x.len(),
        });
    }
    let s = u.dot(x);
    Ok(s * s - 1.0)
}

/// `Var ξ = (η − 2) Σ u_i⁴ + 2` for i.i.d. unit-variance entries.
pub fn xi_variance(u: &UnitVector, eta: f64) -> f64 {
    (eta - 2.0) * u.0.iter().map(|c| c.powi(4)).sum::<f64>() + 2.0
}

/// Sample mean and variance of `ξ` over `draws` rows, with the standard error
/// of the variance estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiMoments {
    pub mean: f64,
    pub variance: f64,
    pub variance_se: f64,
}

pub fn xi_moments(u: &UnitVector, dist: EntryDistribution, draws: usize, seed: SeedSpec) -> XiMoments {
    let mut rng = seed.rng();
    let mut row = vec![0.0; u.dim()];
    let xi: Vec<f64> = (0..draws)
        .map(|_| {
            row.iter_mut().for_each(|x| *x = dist.sample(&mut rng));
            let s = u.dot(&row);
            s * s - 1.0
        })
        .collect();
    let n = draws as f64;
    let mean = xi.iter().sum::<f64>() / n;
    let m2 = xi.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = xi.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    XiMoments {
        mean,
        variance: m2 * n / (n - 1.0),
        variance_se: ((m4 - m2 * m2) / n).sqrt(),
    }
}

/// A finite ε-net of `S^{m−1}`.
#[derive(Debug, Clone)]
pub struct EpsNet {
    pub m: usize,
    pub epsilon: f64,
    pub points: Vec<UnitVector>,
}

impl EpsNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(1 + 2/ε)^m`, the packing bound on the size of a minimal net.
    pub fn size_bound(&self) -> f64 {
        (1.0 + 2.0 / self.epsilon).powi(self.m as i32)
    }

    /// Largest `u·v` over the net, i.e. the nearest net point in angle.
    fn best_dot(&self, u: &[f64]) -> f64 {
        self.points.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Distance from `u` to the net.
    pub fn distance(&self, u: &UnitVector) -> f64 {
        chord(self.best_dot(&u.0))
    }
}

fn chord(dot: f64) -> f64 {
    (2.0 - 2.0 * dot).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct NetOptions {
    /// Candidate directions the greedy construction covers.
    pub pool: usize,
    /// Fresh directions used to verify coverage.
    pub verify: usize,
    /// The pool is covered at radius `construction_fraction · ε`.
    pub construction_fraction: f64,
    /// Verification rounds; uncovered directions found in one round are added
    /// to the net and a fresh batch is drawn.
    pub repair_rounds: usize,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions {
            pool: 100_000,
            verify: 100_000,
            construction_fraction: 0.8,
            repair_rounds: 4,
        }
    }
}

/// Builds an ε-net of `S^{m−1}` for `m ∈ 1..=4` by greedy farthest-point
/// insertion over a seeded pool of random directions, then checks that fresh
/// random directions are all within ε of it.
pub fn build_eps_net(m: usize, epsilon: f64, seed: SeedSpec) -> Result<EpsNet> {
    build_eps_net_with(m, epsilon, seed, &NetOptions::default())
}

pub fn build_eps_net_with(m: usize, epsilon: f64, seed: SeedSpec, opts: &NetOptions) -> Result<EpsNet> {
    if !(1..=4).contains(&m) {
        return Err(Error::param(format!("net dimension m = {m} not in 1..=4")));
    }
    if !(epsilon > 0.0 && epsilon < epsilon_limit()) {
        return Err(Error::param(format!(
            "epsilon = {epsilon} outside (0, sqrt(2 - sqrt(3))) = (0, {:.7})",
            epsilon_limit()
        )));
    }
    if opts.pool == 0 || opts.verify == 0 {
        return Err(Error::param("net pool and verification sizes must be positive"));
    }

    let mut rng = seed.rng();
    let pool: Vec<UnitVector> = (0..opts.pool).map(|_| UnitVector::random(m, &mut rng)).collect();
    // Work in dot products: distance ≤ r  ⟺  u·v ≥ 1 − r²/2.
    let radius = opts.construction_fraction * epsilon;
    let target_dot = 1.0 - radius * radius / 2.0;
    let mut best = vec![f64::NEG_INFINITY; pool.len()];
    let mut points: Vec<UnitVector> = Vec::new();
    let mut next = 0usize;
    loop {
        let v = pool[next].clone();
        best.par_iter_mut().zip(pool.par_iter()).for_each(|(b, u)| {
            *b = b.max(v.dot(&u.0));
        });
        points.push(v);
        let (idx, &worst) = best
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("pool is non-empty");
        if worst >= target_dot {
            break;
        }
        next = idx;
    }
    let mut net = EpsNet { m, epsilon, points };

    let verify_dot = 1.0 - epsilon * epsilon / 2.0;
    let mut verify_seed = SeedSpec::new(seed.master_seed ^ 0xA5A5_5A5A_C3C3_3C3C, seed.stream_id);
    for _ in 0..=opts.repair_rounds {
        let mut rng = verify_seed.rng();
        let probes: Vec<UnitVector> = (0..opts.verify).map(|_| UnitVector::random(m, &mut rng)).collect();
        let uncovered: Vec<UnitVector> = probes
            .into_par_iter()
            .filter(|u| net.best_dot(&u.0) < verify_dot)
            .collect();
        if uncovered.is_empty() {
            return Ok(net);
        }
        for u in uncovered {
            if net.best_dot(&u.0) < verify_dot {
                net.points.push(u);
            }
        }
        verify_seed.stream_id = verify_seed.stream_id.wrapping_add(1 << 32);
    }
    Err(Error::NetConstruction(format!(
        "coverage at radius {epsilon} still failing after {} repair rounds (m = {m}, net size {})",
        opts.repair_rounds,
        net.len()
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetCheckReport {
    pub m: usize,
    pub epsilon: f64,
    pub net_size: usize,
    pub size_bound: f64,
    /// `1 / (1 − √(ε²(4 − ε²)))`.
    pub factor: f64,
    pub sup_quadform: f64,
    pub bound: f64,
    pub true_norm: f64,
    pub holds: bool,
}

impl NetCheckReport {
    pub fn within_size_bound(&self) -> bool {
        self.net_size as f64 <= self.size_bound.ceil()
    }
}

/// `1 / (1 − √(ε²(4 − ε²)))`.
pub fn net_factor(epsilon: f64) -> f64 {
    1.0 / (1.0 - (epsilon * epsilon * (4.0 - epsilon * epsilon)).sqrt())
}

/// Compares `‖M‖` with `factor · sup_{v∈net} |vᵀMv|`.
pub fn net_check(matrix: &[f64], dim: usize, net: &EpsNet) -> Result<NetCheckReport> {
    if dim != net.m {
        return Err(Error::Shape {
            expected: net.m,
            got: dim,
        });
    }
    let true_norm = spectral_norm(matrix, dim)?;
    let mut mv = vec![0.0; dim];
    let sup_quadform = net
        .points
        .iter()
        .map(|v| {
            for (i, out) in mv.iter_mut().enumerate() {
                *out = v.dot(&matrix[i * dim..(i + 1) * dim]);
            }
            v.dot(&mv).abs()
        })
        .fold(0.0, f64::max);
    let factor = net_factor(net.epsilon);
    let bound = factor * sup_quadform;
    Ok(NetCheckReport {
        m: dim,
        epsilon: net.epsilon,
        net_size: net.len(),
        size_bound: net.size_bound(),
        factor,
        sup_quadform,
        bound,
        true_norm,
        holds: true_norm <= bound + 1e-9,
    })
}

/// How the partial sums `S_n` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XiSampling {
    /// Sum `n` terms `(ζ² − 1)/√2` explicitly.
    Direct,
    /// Draw `Σζ² ~ χ²_n` once; `S_n = (χ²_n − n)/√2` has the same law.
    #[default]
    ChiSquare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModDevReport {
    pub n: usize,
    pub a_n: f64,
    pub mu: f64,
    pub reps: u64,
    pub tail_hits: u64,
    /// `log(tail_hits / reps) / a_n²`.
    pub rate_hat: f64,
    /// `−μ²/2`.
    pub rate_target: f64,
}

pub fn rate_target(mu: f64) -> f64 {
    -mu * mu / 2.0
}

const MODDEV_CHUNK: u64 = 1 << 16;

/// Estimates `P(S_n/(√n a_n) ≥ μ)` with `a_n = n^exponent` for
/// `ξ = (ζ² − 1)/√2`, `ζ ~ N(0, 1)`.
pub fn moddev_check(n: usize, exponent: f64, mu: f64, reps: u64, seed: u64) -> Result<ModDevReport> {
    moddev_check_with(n, exponent, mu, reps, seed, XiSampling::default())
}

pub fn moddev_check_with(
    n: usize,
    exponent: f64,
    mu: f64,
    reps: u64,
    seed: u64,
    sampling: XiSampling,
) -> Result<ModDevReport> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    if !(exponent > 0.0 && exponent < 0.5) {
        return Err(Error::param(format!("a_n exponent {exponent} not in (0, 0.5)")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::param(format!("mu must be positive, got {mu}")));
    }
    if reps == 0 {
        return Err(Error::param("reps must be at least 1"));
    }
    let nf = n as f64;
    let a_n = nf.powf(exponent);
    let threshold = mu * nf.sqrt() * a_n;
    let chi = ChiSquared::new(nf).map_err(|e| Error::param(e.to_string()))?;
    let chunks = reps.div_ceil(MODDEV_CHUNK);
    let tail_hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = SeedSpec::new(seed, c).rng();
            let count = MODDEV_CHUNK.min(reps - c * MODDEV_CHUNK);
            let mut hits = 0u64;
            for _ in 0..count {
                let s = match sampling {
                    XiSampling::Direct => (0..n)
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            (z * z - 1.0) * std::f64::consts::FRAC_1_SQRT_2
                        })
                        .sum::<f64>(),
                    XiSampling::ChiSquare => (chi.sample(&mut rng) - nf) * std::f64::consts::FRAC_1_SQRT_2,
                };
                if s >= threshold {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    if tail_hits == 0 {
        return Err(Error::DegenerateEstimate { reps });
    }
    Ok(ModDevReport {
        n,
        a_n,
        mu,
        reps,
        tail_hits,
        rate_hat: (tail_hits as f64 / reps as f64).ln() / (a_n * a_n),
        rate_target: rate_target(mu),
    })
}
