//! Sample matrices `X`, Gram matrices `W = XᵀX`, centered matrices
//! `A = (W − nI)/√n` and Wigner matrices.
//!
//! Symmetric matrices are always built by computing the upper triangle and
//! mirroring it, so `values[i][j] == values[j][i]` holds bit for bit.

pub mod io;

use rand_distr::{Distribution, StandardNormal};

use crate::distributions::{EntryDistribution, SeedSpec};
use crate::error::{Error, Result};

/// An `n × p` sample matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::Size(format!("matrix dimensions must be positive, got {n}x{p}")));
        }
        let len = checked_len(n, p)?;
        if values.len() != len {
            return Err(Error::Shape {
                expected: len,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite entry at ({}, {})", pos / p, pos % p)));
        }
        Ok(DataMatrix { n, p, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.p..(t + 1) * self.p]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn is_square(&self) -> bool {
        self.n == self.p
    }

    /// Largest `|a_ij − a_ji|`, or `None` for a non-square matrix.
    pub fn asymmetry(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let d = self.n;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        Some(worst)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// What a [`SymMatrix`] was built as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymTag {
    Gram,
    Centered,
    Wigner,
    /// Loaded from a file or built directly by the caller.
    General,
}

/// A dense symmetric matrix, full storage, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    values: Vec<f64>,
    tag: SymTag,
}

impl SymMatrix {
    /// Wraps full row-major storage; the input must already be exactly
    /// symmetric.
    pub fn from_full(dim: usize, values: Vec<f64>, tag: SymTag) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Size("symmetric matrix dimension must be positive".into()));
        }
        let len = checked_len(dim, dim)?;
        if values.len() != len {
            return Err(Error::Shape {
                expected: len,
                got: values.len(),
            });
        }
        for i in 0..dim {
            for j in i..dim {
                let a = values[i * dim + j];
                if !a.is_finite() {
                    return Err(Error::param(format!("non-finite entry at ({i}, {j})")));
                }
                if a != values[j * dim + i] {
                    return Err(Error::param(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SymMatrix { dim, values, tag })
    }

    /// Builds a symmetric matrix from a square one by mirroring its upper
    /// triangle. Fails if the two triangles differ by more than `tol`.
    pub fn from_upper(square: &DataMatrix, tol: f64, tag: SymTag) -> Result<Self> {
        match square.asymmetry() {
            None => Err(Error::param(format!(
                "expected a square matrix, got {}x{}",
                square.n(),
                square.p()
            ))),
            Some(a) if a > tol => Err(Error::param(format!(
                "matrix is not symmetric (max asymmetry {a:e} > {tol:e})"
            ))),
            Some(_) => {
                let d = square.n();
                let mut values = vec![0.0; d * d];
                for i in 0..d {
                    for j in i..d {
                        let v = square.get(i, j);
                        values[i * d + j] = v;
                        values[j * d + i] = v;
                    }
                }
                Ok(SymMatrix { dim: d, values, tag })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> SymTag {
        self.tag
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn checked_len(rows: usize, cols: usize) -> Result<usize> {
    rows.checked_mul(cols)
        .filter(|&len| len <= isize::MAX as usize / std::mem::size_of::<f64>())
        .ok_or_else(|| Error::Size(format!("{rows}x{cols} matrix exceeds addressable memory")))
}

/// Draws an `n × p` data matrix, entry `(i, j)` taken from the stream in
/// row-major order.
pub fn gen_data(dist: EntryDistribution, n: usize, p: usize, seed: SeedSpec) -> Result<DataMatrix> {
    if n == 0 || p == 0 {
        return Err(Error::Size(format!("matrix dimensions must be positive, got {n}x{p}")));
    }
    let len = checked_len(n, p)?;
    let mut rng = seed.rng();
    let values = (0..len).map(|_| dist.sample(&mut rng)).collect();
    Ok(DataMatrix { n, p, values })
}

/// `W = XᵀX`.
///
/// Each cell accumulates `x_ti x_tj` in increasing `t`; only the upper
/// triangle is computed.
pub fn gram(x: &DataMatrix) -> SymMatrix {
    let p = x.p;
    let mut values = vec![0.0; p * p];
    for t in 0..x.n {
        let row = x.row(t);
        for i in 0..p {
            let xi = row[i];
            let out = &mut values[i * p..(i + 1) * p];
            for j in i..p {
                out[j] += xi * row[j];
            }
        }
    }
    for i in 0..p {
        for j in (i + 1)..p {
            values[j * p + i] = values[i * p + j];
        }
    }
    SymMatrix {
        dim: p,
        values,
        tag: SymTag::Gram,
    }
}

/// `A = (W − nI)/√n`.
pub fn center_scale(w: &SymMatrix, n: usize) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let nf = n as f64;
    let root = nf.sqrt();
    let d = w.dim;
    let mut values = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let shifted = if i == j { w.get(i, j) - nf } else { w.get(i, j) };
            let v = shifted / root;
            values[i * d + j] = v;
            values[j * d + i] = v;
        }
    }
    Ok(SymMatrix {
        dim: d,
        values,
        tag: SymTag::Centered,
    })
}

/// Wigner matrix: diagonal `N(0, η)`, strict upper triangle `N(0, 1)`,
/// lower triangle mirrored. Draws are taken row by row over `j ≥ i`.
pub fn gen_wigner(p: usize, eta: f64, seed: SeedSpec) -> Result<SymMatrix> {
    if p == 0 {
        return Err(Error::Size("Wigner dimension must be positive".into()));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("eta must be positive, got {eta}")));
    }
    let len = checked_len(p, p)?;
    let sd_diag = eta.sqrt();
    let mut rng = seed.rng();
    let mut values = vec![0.0; len];
    for i in 0..p {
        for j in i..p {
            let z: f64 = StandardNormal.sample(&mut rng);
            let v = if i == j { sd_diag * z } else { z };
            values[i * p + j] = v;
            values[j * p + i] = v;
        }
    }
    Ok(SymMatrix {
        dim: p,
        values,
        tag: SymTag::Wigner,
    })
}
