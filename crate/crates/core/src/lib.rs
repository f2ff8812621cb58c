//! Almost Mathieu operators `H = U + U* + (λ/2)(V + V*)` at rational
//! frequency: operator norms, closed-form norm bounds, trial-vector lower
//! bounds, eigenvector identity checks, band spectra and certification sweeps.
//!
//! ```
//! use amo_core::{norm_rational, Fraction};
//!
//! let n = norm_rational(Fraction::new(1, 3).unwrap(), 2.0).unwrap();
//! assert!((n - (1.0 + 3f64.sqrt())).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod butterfly;
pub mod certify;
pub mod cli;
pub mod eigensolve;
pub mod format;
pub mod fractions;
pub mod identities;
pub mod operator;
pub mod trial_vectors;

pub use bounds::{bound_table, BoundSet};
pub use butterfly::{bands, butterfly_export, sample_phases, Band, BandSpectrum};
pub use certify::{certify_sweep, verify_constants, CertificateRecord, CertificateReport};
pub use eigensolve::{eigen_sym, EigenPair, SymMatrix};
pub use fractions::{convergents, farey_sequence, Fraction};
pub use operator::{build_harper, norm_rational, norm_real, CornerSign, HarperMatrix, Twist};
pub use trial_vectors::{optimize_lower, LowerEstimate, TrialParams};
