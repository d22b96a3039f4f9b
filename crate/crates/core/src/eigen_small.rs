//! Eigenvalues of small dense symmetric matrices.
//!
//! [`sym_eigs`] runs cyclic Jacobi rotations; [`eigs_closed_form`] evaluates
//! the characteristic polynomial directly for sizes 1 to 3 and serves as an
//! independent check on the iteration.

use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius norm at which the iteration stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
/// Cyclic sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Jacobi sweeps performed (0 for closed forms).
    pub iterations: usize,
    pub converged: bool,
}

impl SpectralSummary {
    pub fn largest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn smallest(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

fn check_shape(values: &[f64], dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Size("matrix dimension must be positive".into()));
    }
    let expected = dim * dim;
    if values.len() != expected {
        return Err(Error::Shape {
            expected,
            got: values.len(),
        });
    }
    Ok(())
}

fn off_diagonal_norm(a: &[f64], dim: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..dim {
        for q in (p + 1)..dim {
            let v = a[p * dim + q];
            s += v * v;
        }
    }
    (2.0 * s).sqrt()
}

/// Diagonalizes `a` (full symmetric storage, `dim × dim`) in place by cyclic
/// Jacobi rotations. On success the eigenvalues sit on the diagonal, unsorted,
/// and the number of sweeps is returned.
///
/// This is the scan's inner kernel: no allocation on the success path.
pub fn jacobi_in_place(a: &mut [f64], dim: usize) -> Result<usize> {
    check_shape(a, dim)?;
    // Squared norms under/overflow outside this range; rescale by a power of
    // two (exact) and undo it on the diagonal afterwards.
    let max_abs = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs != 0.0 && !(1e-100..=1e100).contains(&max_abs) {
        let scale = 2f64.powi(-(max_abs.log2().round() as i32));
        a.iter_mut().for_each(|v| *v *= scale);
        let result = jacobi_in_place(a, dim);
        for i in 0..dim {
            a[i * dim + i] /= scale;
        }
        return result.map_err(|e| match e {
            Error::NonConvergence { sweeps, best } => Error::NonConvergence {
                sweeps,
                best: best.into_iter().map(|v| v / scale).collect(),
            },
            other => other,
        });
    }
    let fro = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = JACOBI_TOLERANCE * fro;
    for sweep in 0..=JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(a, dim) <= threshold {
            return Ok(sweep);
        }
        if sweep == JACOBI_MAX_SWEEPS {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                rotate(a, dim, p, q);
            }
        }
    }
    Err(Error::NonConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
        best: (0..dim).map(|i| a[i * dim + i]).collect(),
    })
}

/// Annihilates `a[p][q]` with one plane rotation.
#[inline]
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    // Smaller root of t² + 2θt − 1 = 0; hypot keeps it finite for huge θ.
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp;
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq;
    }
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Eigenvalues of the symmetric `dim × dim` matrix stored row-major in
/// `values`.
pub fn sym_eigs(values: &[f64], dim: usize) -> Result<SpectralSummary> {
    check_shape(values, dim)?;
    let mut a = values.to_vec();
    let sweeps = jacobi_in_place(&mut a, dim)?;
    let diag = (0..dim).map(|i| a[i * dim + i]).collect();
    Ok(SpectralSummary {
        eigenvalues: sorted_desc(diag),
        iterations: sweeps,
        converged: true,
    })
}

/// Closed-form eigenvalues for `dim ∈ {1, 2, 3}`.
pub fn eigs_closed_form(values: &[f64], dim: usize) -> Result<SpectralSummary> {
    if dim > 3 {
        return Err(Error::UnsupportedSize(dim));
    }
    check_shape(values, dim)?;
    let eig = match dim {
        1 => vec![values[0]],
        2 => {
            let (a, b, d) = (values[0], values[1], values[3]);
            let half_tr = 0.5 * (a + d);
            let r = (0.5 * (a - d)).hypot(b);
            vec![half_tr + r, half_tr - r]
        }
        _ => cubic_symmetric(values),
    };
    Ok(SpectralSummary {
        eigenvalues: sorted_desc(eig),
        iterations: 0,
        converged: true,
    })
}

// Trigonometric solution of the characteristic cubic of a symmetric 3×3.
fn cubic_symmetric(m: &[f64]) -> Vec<f64> {
    let (a11, a12, a13) = (m[0], m[1], m[2]);
    let (a22, a23, a33) = (m[4], m[5], m[8]);
    let p1 = a12 * a12 + a13 * a13 + a23 * a23;
    if p1 == 0.0 {
        return vec![a11, a22, a33];
    }
    let q = (a11 + a22 + a33) / 3.0;
    let (b11, b22, b33) = (a11 - q, a22 - q, a33 - q);
    let p2 = b11 * b11 + b22 * b22 + b33 * b33 + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let det_b = b11 * (b22 * b33 - a23 * a23) - a12 * (a12 * b33 - a23 * a13) + a13 * (a12 * a23 - b22 * a13);
    let r = (det_b / (2.0 * p * p * p)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let e2 = 3.0 * q - e1 - e3;
    vec![e1, e2, e3]
}

/// `max(|λ_1|, |λ_min|)`.
pub fn spectral_norm(values: &[f64], dim: usize) -> Result<f64> {
    let s = sym_eigs(values, dim)?;
    Ok(s.largest().abs().max(s.smallest().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::SeedSpec;
    use crate::matgen::gen_wigner;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn diagonal_and_swap() {
        assert_eq!(sym_eigs(&[2.0, 0.0, 0.0, 1.0], 2).unwrap().eigenvalues, vec![2.0, 1.0]);
        let e = sym_eigs(&[0.0, 1.0, 1.0, 0.0], 2).unwrap().eigenvalues;
        assert!(close(e[0], 1.0, 1e-15) && close(e[1], -1.0, 1e-15));
    }

    #[test]
    fn two_by_two_closed_form_value() {
        let m = [10.0, 14.0, 14.0, 20.0];
        let disc = (100.0f64 + 784.0).sqrt();
        let expected = [(30.0 + disc) / 2.0, (30.0 - disc) / 2.0];
        assert!(close(expected[0], 29.866_068_747_318_506, 1e-12));
        let e = sym_eigs(&m, 2).unwrap().eigenvalues;
        for k in 0..2 {
            assert!(close(e[k], expected[k], 1e-10 * (1.0 + 34.4)), "{e:?}");
        }
    }

    #[test]
    fn closed_form_small_cases() {
        assert_eq!(eigs_closed_form(&[5.0], 1).unwrap().eigenvalues, vec![5.0]);
        assert_eq!(
            eigs_closed_form(&[1.0, 0.0, 0.0, 1.0], 2).unwrap().eigenvalues,
            vec![1.0, 1.0]
        );
        assert!(matches!(
            eigs_closed_form(&[0.0; 16], 4),
            Err(Error::UnsupportedSize(4))
        ));
    }

    #[test]
    fn closed_form_agrees_with_jacobi_on_three_by_three() {
        for r in 0..2000 {
            let w = gen_wigner(3, 2.0, SeedSpec::new(100, r)).unwrap();
            let a = sym_eigs(w.values(), 3).unwrap().eigenvalues;
            let b = eigs_closed_form(w.values(), 3).unwrap().eigenvalues;
            for k in 0..3 {
                assert!(close(a[k], b[k], 1e-9), "rep {r}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        // 3×3 with spectrum {2, 2, -1}: J - I scaled; closed form must not lose accuracy.
        let m = [0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let a = eigs_closed_form(&m, 3).unwrap().eigenvalues;
        let b = sym_eigs(&m, 3).unwrap().eigenvalues;
        let expected = [2.0, -1.0, -1.0];
        for k in 0..3 {
            assert!(close(a[k], expected[k], 1e-12), "{a:?}");
            assert!(close(b[k], expected[k], 1e-12), "{b:?}");
        }
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(spectral_norm(&[3.0, 0.0, 0.0, -4.0], 2).unwrap(), 4.0);
        assert_eq!(spectral_norm(&[0.0; 9], 3).unwrap(), 0.0);
        assert!(close(spectral_norm(&[0.0, 1.0, 1.0, 0.0], 2).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        let s = sym_eigs(&[0.0; 16], 4).unwrap();
        assert_eq!(s.iterations, 0);
        assert!(s.converged);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(sym_eigs(&[1.0, 2.0, 3.0], 2), Err(Error::Shape { .. })));
        assert!(matches!(sym_eigs(&[], 0), Err(Error::Size(_))));
    }

    #[test]
    fn extreme_scales() {
        let big = [1e150, 1e-150, 1e-150, -1e150];
        let e = sym_eigs(&big, 2).unwrap().eigenvalues;
        assert!(close(e[0] / 1e150, 1.0, 1e-12));
        let tiny = [1e-300, 2e-300, 2e-300, 1e-300];
        let e = sym_eigs(&tiny, 2).unwrap().eigenvalues;
        assert!(close(e[0] / 1e-300, 3.0, 1e-12));
    }
}
