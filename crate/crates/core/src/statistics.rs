//! Envelopes for `T` and `V`, normalized deviations, and the sparse Riesz
//! certificate of a design matrix. `log` is the natural logarithm throughout.

use crate::error::{Error, Result};
use crate::matgen::{gram, DataMatrix};
use crate::minor_scan::{scan_le_m, ScanOptions};

/// Which envelope a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Gaussian entries: `2√(m log p / n)`.
    Gaussian,
    /// General entries with `η ≤ 2`: `√([4(m−1)+2η] log p / n)`.
    GeneralEtaLe2,
    /// General entries with `η > 2`: `√(2ηm log p / n)`.
    GeneralEtaGt2,
    /// Wigner, `η ≤ 2`: `√([4(m−1)+2η] log p)`.
    WignerEtaLe2,
    /// Wigner, `η > 2`: `√(2ηm log p)`.
    WignerEtaGt2,
}

/// Whether the envelope bounds `T/n − 1` or the raw statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    RatioOfN,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSpec {
    pub theorem: Theorem,
    pub value: f64,
    pub scale: Scale,
}

fn log_p(p: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::param(format!("envelopes need p >= 2 (log p > 0), got p = {p}")));
    }
    Ok((p as f64).ln())
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::param("m must be at least 1"));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("eta must be positive, got {eta}")));
    }
    Ok(())
}

/// The coefficient `c` in `√(c log p)` and the branch it came from. `η = 2`
/// belongs to the `η ≤ 2` branch, where `4(m−1) + 2η = 4m`.
fn general_coefficient(m: usize, eta: f64) -> (f64, bool) {
    let m = m as f64;
    if eta <= 2.0 {
        (4.0 * (m - 1.0) + 2.0 * eta, true)
    } else {
        (2.0 * eta * m, false)
    }
}

fn ratio_value(coefficient: f64, n: usize, log_p: f64) -> f64 {
    (coefficient * log_p / n as f64).sqrt()
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    Ok(())
}

/// `2√(m log p / n)`, bounding `|T/n − 1|` and `|V/n − 1|` for Gaussian data.
pub fn envelope_gaussian(n: usize, p: usize, m: usize) -> Result<EnvelopeSpec> {
    check_n(n)?;
    check_m(m)?;
    let lp = log_p(p)?;
    // 2√x is evaluated as √(4x) so that it matches the general envelope at
    // η = 2 bit for bit.
    let (coefficient, _) = general_coefficient(m, 2.0);
    Ok(EnvelopeSpec {
        theorem: Theorem::Gaussian,
        value: ratio_value(coefficient, n, lp),
        scale: Scale::RatioOfN,
    })
}

pub fn envelope_general(n: usize, p: usize, m: usize, eta: f64) -> Result<EnvelopeSpec> {
    check_n(n)?;
    check_m(m)?;
    check_eta(eta)?;
    let lp = log_p(p)?;
    let (coefficient, low) = general_coefficient(m, eta);
    Ok(EnvelopeSpec {
        theorem: if low {
            Theorem::GeneralEtaLe2
        } else {
            Theorem::GeneralEtaGt2
        },
        value: ratio_value(coefficient, n, lp),
        scale: Scale::RatioOfN,
    })
}

/// Envelope for the unnormalized Wigner statistics `T̃`, `Ṽ`.
pub fn envelope_wigner(p: usize, m: usize, eta: f64) -> Result<EnvelopeSpec> {
    check_m(m)?;
    check_eta(eta)?;
    let lp = log_p(p)?;
    let (coefficient, low) = general_coefficient(m, eta);
    Ok(EnvelopeSpec {
        theorem: if low {
            Theorem::WignerEtaLe2
        } else {
            Theorem::WignerEtaGt2
        },
        value: (coefficient * lp).sqrt(),
        scale: Scale::Absolute,
    })
}

/// `((T/n − 1)/env, (V/n − 1)/env)`. The envelope event is `zT ≤ 1` and
/// `zV ≥ −1`.
pub fn normalized_deviations(t: f64, v: f64, n: usize, env: &EnvelopeSpec) -> Result<(f64, f64)> {
    check_n(n)?;
    if env.scale != Scale::RatioOfN {
        return Err(Error::param("normalized_deviations needs a ratio-scale envelope"));
    }
    let nf = n as f64;
    Ok(((t / nf - 1.0) / env.value, (v / nf - 1.0) / env.value))
}

/// `(T/env, V/env)` for absolute-scale (Wigner) envelopes.
pub fn absolute_deviations(t: f64, v: f64, env: &EnvelopeSpec) -> Result<(f64, f64)> {
    if env.scale != Scale::Absolute {
        return Err(Error::param("absolute_deviations needs an absolute-scale envelope"));
    }
    Ok((t / env.value, v / env.value))
}

/// Two-sided sparse Riesz bounds `c1 ≤ λ_min(Σ_S) ≤ λ_max(Σ_S) ≤ c2` over all
/// `|S| ≤ m`, with `Σ_S = X_SᵀX_S / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrcCertificate {
    pub m: usize,
    pub c1: f64,
    pub c2: f64,
}

/// Exact SRC constants of `x` for sparsity `m`, normalizing by `x.n()`.
pub fn src_certificate(x: &DataMatrix, m: usize, opts: &ScanOptions) -> Result<SrcCertificate> {
    src_certificate_with_n(x, m, x.n(), opts)
}

/// As [`src_certificate`] but dividing by `n` instead of the row count.
pub fn src_certificate_with_n(x: &DataMatrix, m: usize, n: usize, opts: &ScanOptions) -> Result<SrcCertificate> {
    check_n(n)?;
    let w = gram(x);
    let scan = scan_le_m(&w, m, opts)?;
    let nf = n as f64;
    // W is PSD; tiny negative rounding in λ_min is clipped.
    Ok(SrcCertificate {
        m,
        c1: (scan.v / nf).max(0.0),
        c2: scan.t / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{EntryDistribution, SeedSpec};
    use crate::eigen_small::sym_eigs;
    use crate::matgen::gen_data;
    use crate::minor_scan::{extract_minor, unrank_combination, IndexSet};

    const LN_100: f64 = 4.605_170_185_988_091;

    #[test]
    fn gaussian_envelope_value() {
        let e = envelope_gaussian(1000, 100, 3).unwrap();
        let oracle = 2.0 * (3.0 * LN_100 / 1000.0f64).sqrt();
        assert!((e.value - oracle).abs() < 1e-15);
        assert!((e.value - 0.235_078_800_047_680).abs() < 1e-13);
        assert_eq!(e.scale, Scale::RatioOfN);
        let four = envelope_gaussian(1000, 100, 4).unwrap().value;
        let one = envelope_gaussian(1000, 100, 1).unwrap().value;
        assert_eq!(four / one, 2.0);
    }

    #[test]
    fn general_envelope_values() {
        let low = envelope_general(1000, 100, 3, 0.8).unwrap();
        assert_eq!(low.theorem, Theorem::GeneralEtaLe2);
        assert!((low.value - 0.210_260_870_790_277).abs() < 1e-13, "{}", low.value);
        let high = envelope_general(1000, 100, 3, 5.0).unwrap();
        assert_eq!(high.theorem, Theorem::GeneralEtaGt2);
        assert!((high.value - 0.371_692_218_884_984).abs() < 1e-13, "{}", high.value);
    }

    #[test]
    fn general_at_eta_two_matches_gaussian_exactly() {
        for n in [1usize, 7, 1000, 4096, 123_457] {
            for p in [2usize, 3, 40, 100, 10_000] {
                for m in 1..=12 {
                    let g = envelope_gaussian(n, p, m).unwrap().value;
                    let e = envelope_general(n, p, m, 2.0).unwrap().value;
                    assert_eq!(g.to_bits(), e.to_bits(), "n={n} p={p} m={m}");
                    // The other branch formula agrees to rounding.
                    let other = (2.0 * 2.0 * m as f64 * (p as f64).ln() / n as f64).sqrt();
                    assert!((other - e).abs() <= 1e-15 * e);
                }
            }
        }
    }

    #[test]
    fn wigner_envelope_values() {
        let a = envelope_wigner(100, 2, 1.0).unwrap();
        assert!((a.value - (6.0 * LN_100).sqrt()).abs() < 1e-12);
        assert!((a.value - 5.256_521_769_756_932).abs() < 1e-12);
        assert_eq!(a.scale, Scale::Absolute);
        let b = envelope_wigner(100, 2, 4.0).unwrap();
        assert!((b.value - 8.583_864_105_157_389).abs() < 1e-12);
        for m in 1..6 {
            for p in [2usize, 10, 1000] {
                let lo = envelope_wigner(p, m, 2.0).unwrap().value;
                let hi = (2.0 * 2.0 * m as f64 * (p as f64).ln()).sqrt();
                assert!((lo - hi).abs() <= 1e-15 * hi);
            }
        }
    }

    #[test]
    fn envelope_errors() {
        assert!(matches!(envelope_gaussian(100, 1, 1), Err(Error::Parameter(_))));
        assert!(matches!(envelope_general(100, 10, 1, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(envelope_wigner(10, 1, -1.0), Err(Error::Parameter(_))));
        assert!(envelope_wigner(1, 1, 1.0).is_err());
        assert!(envelope_gaussian(100, 10, 0).is_err());
    }

    #[test]
    fn deviation_examples() {
        let env = envelope_gaussian(400, 20, 2).unwrap();
        let n = 400usize;
        let t = n as f64 * (1.0 + env.value);
        let (zt, zv) = normalized_deviations(t, n as f64, n, &env).unwrap();
        assert!((zt - 1.0).abs() < 1e-12);
        assert_eq!(zv, 0.0);
        assert_eq!(normalized_deviations(400.0, 400.0, n, &env).unwrap().0, 0.0);
        // Depends on T and n only through T/n.
        let a = normalized_deviations(410.0, 390.0, 400, &env).unwrap();
        let b = normalized_deviations(820.0, 780.0, 800, &env).unwrap();
        assert_eq!(a, b);
        let w = envelope_wigner(20, 2, 1.0).unwrap();
        assert!(normalized_deviations(1.0, 1.0, 1, &w).is_err());
        assert_eq!(absolute_deviations(w.value, -w.value, &w).unwrap(), (1.0, -1.0));
    }

    #[test]
    fn src_orthonormal_design() {
        // Scaled Hadamard columns: XᵀX = 4I.
        let x = DataMatrix::new(
            4,
            4,
            vec![
                1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0,
            ],
        )
        .unwrap();
        let c = src_certificate(&x, 3, &ScanOptions::default()).unwrap();
        assert_eq!((c.c1, c.c2), (1.0, 1.0));
    }

    #[test]
    fn src_brute_force() {
        let x = gen_data(EntryDistribution::Gaussian, 500, 10, SeedSpec::new(12, 0)).unwrap();
        let w = gram(&x);
        let cert = src_certificate(&x, 3, &ScanOptions::default()).unwrap();
        let (mut lo, mut hi, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0);
        for k in 1..=3 {
            for r in 0..crate::minor_scan::binomial(10, k).unwrap() {
                let s: IndexSet = unrank_combination(r, 10, k).unwrap();
                let minor = extract_minor(&w, &s).unwrap();
                let sigma: Vec<f64> = minor.values().iter().map(|v| v / 500.0).collect();
                let e = sym_eigs(&sigma, k).unwrap();
                lo = lo.min(e.smallest());
                hi = hi.max(e.largest());
                count += 1;
            }
        }
        assert_eq!(count, 175);
        assert!((cert.c1 - lo).abs() <= 1e-12 * (1.0 + lo.abs()), "{} vs {lo}", cert.c1);
        assert!((cert.c2 - hi).abs() <= 1e-12 * hi, "{} vs {hi}", cert.c2);
        let diag: Vec<f64> = w.diagonal().iter().map(|d| d / 500.0).collect();
        assert!(cert.c1 <= diag.iter().cloned().fold(f64::INFINITY, f64::min));
        assert!(cert.c2 >= diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        assert!(0.0 <= cert.c1 && cert.c1 <= cert.c2);
    }
}
