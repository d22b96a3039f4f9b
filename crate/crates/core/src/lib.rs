//! Extreme eigenvalues of principal minors of random Gram (Wishart-type) and
//! Wigner matrices.
//!
//! The library computes, exactly and by exhaustive enumeration, the statistics
//!
//! * `T = max_{|S| = m} λ_1(W_S)` and `V = min_{|S| = m} λ_min(W_S)`,
//! * their `|S| ≤ m` counterparts,
//!
//! for `W = XᵀX` (or any symmetric matrix), together with the envelopes that
//! bound them with probability tending to one, a sparse Riesz certificate for
//! design matrices, and numerical checks of the two auxiliary inequalities the
//! envelopes rest on (an ε-net spectral-norm bound and a moderate-deviation
//! rate).
//!
//! Module map:
//!
//! | module | contents |
//! |---|---|
//! | [`distributions`] | entry laws with their fourth-moment parameter η, seeded sampling |
//! | [`matgen`] | data, Gram, centered and Wigner matrices; MINX / text matrix files |
//! | [`eigen_small`] | cyclic Jacobi eigensolver for small minors, closed forms for m ≤ 3 |
//! | [`minor_scan`] | colex enumeration of minors, pruned and parallel scans |
//! | [`statistics`] | envelopes, normalized deviations, SRC certificate |
//! | [`theory_checks`] | quadratic-form reduction, ε-nets, moderate deviations |
//! | [`harness`] | Monte Carlo runner, CSV output, coverage aggregation |

pub mod distributions;
pub mod eigen_small;
mod error;
pub mod harness;
pub mod matgen;
pub mod minor_scan;
pub mod statistics;
pub mod theory_checks;

pub use distributions::{eta_of, sample_entries, EntryDistribution, SeedSpec};
pub use eigen_small::{eigs_closed_form, spectral_norm, sym_eigs, SpectralSummary};
pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentConfig, ReplicationRecord};
pub use matgen::{center_scale, gen_data, gen_wigner, gram, DataMatrix, SymMatrix, SymTag};
pub use minor_scan::{
    scan_exact_m, scan_le_m, unrank_combination, IndexSet, ScanMode, ScanOptions, ScanResult, SizeMode,
};
pub use statistics::{
    envelope_gaussian, envelope_general, envelope_wigner, normalized_deviations, src_certificate, EnvelopeSpec,
    SrcCertificate,
};
