//! The `q × q` Harper matrix at rational frequency `θ = p/q`, with an
//! optional real boundary twist, and the operator norm it carries.
//!
//! Indices are cyclic in `Z_q`. Row `n` of the untwisted matrix reads
//! `h εₙ = εₙ₊₁ + εₙ₋₁ + λ cos(2πnθ) εₙ`, so for `q = 2` both neighbours are
//! the same site (off-diagonal `1 + ω`) and for `q = 1` the single entry is
//! `2ω + λ cos φ`.

use std::f64::consts::PI;

use crate::eigensolve::{self, eigen_sym, eigenvalues_sym, EigenError, EigenPair, SymMatrix};
use crate::fractions::{convergents, Fraction};

/// Corner sign of the periodic Jacobi matrix (Bloch phase `e^{iqk} = ±1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CornerSign {
    Periodic,
    Antiperiodic,
}

impl CornerSign {
    pub fn value(self) -> f64 {
        match self {
            CornerSign::Periodic => 1.0,
            CornerSign::Antiperiodic => -1.0,
        }
    }

    /// `+1`/`−1` in, anything else rejected.
    pub fn from_sign(s: i32) -> Option<Self> {
        match s {
            1 => Some(CornerSign::Periodic),
            -1 => Some(CornerSign::Antiperiodic),
            _ => None,
        }
    }
}

/// Real boundary twist: diagonal phase offset `phi` and corner sign `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub phi: f64,
    pub omega: CornerSign,
}

impl Twist {
    pub const TRIVIAL: Twist = Twist {
        phi: 0.0,
        omega: CornerSign::Periodic,
    };

    /// The four twists whose eigenvalues sit at band edges:
    /// `phi ∈ {0, π/q}` × `omega ∈ {+1, −1}`.
    pub fn extremes(q: u64) -> [Twist; 4] {
        let half = PI / q as f64;
        [
            Twist {
                phi: 0.0,
                omega: CornerSign::Periodic,
            },
            Twist {
                phi: 0.0,
                omega: CornerSign::Antiperiodic,
            },
            Twist {
                phi: half,
                omega: CornerSign::Periodic,
            },
            Twist {
                phi: half,
                omega: CornerSign::Antiperiodic,
            },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarperMatrix {
    fraction: Fraction,
    lambda: f64,
    twist: Twist,
    entries: SymMatrix,
}

/// Ascending eigenvalues of one Harper matrix and their largest modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub norm: f64,
}

/// Diagonal generator `λ cos(2πnθ + φ)`; `np` is reduced mod `q` first so large
/// `n` keeps full precision.
pub fn diagonal_entry(fraction: Fraction, lambda: f64, phi: f64, n: u64) -> f64 {
    let (p, q) = (fraction.p(), fraction.q());
    let k = ((n as u128 * p as u128) % q as u128) as f64;
    lambda * (2.0 * PI * k / q as f64 + phi).cos()
}

pub fn build_harper(fraction: Fraction, lambda: f64, twist: Twist) -> HarperMatrix {
    let q = fraction.q() as usize;
    let omega = twist.omega.value();
    let mut m = SymMatrix::zeros(q);
    for n in 0..q {
        m[(n, n)] = diagonal_entry(fraction, lambda, twist.phi, n as u64);
    }
    // sum the shift and its adjoint so that q = 1, 2 come out right
    for n in 0..q {
        let next = (n + 1) % q;
        let w = if n + 1 == q { omega } else { 1.0 };
        m[(n, next)] += w;
        m[(next, n)] += w;
    }
    HarperMatrix {
        fraction,
        lambda,
        twist,
        entries: m,
    }
}

impl HarperMatrix {
    pub fn fraction(&self) -> Fraction {
        self.fraction
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }

    pub fn entries(&self) -> &SymMatrix {
        &self.entries
    }

    pub fn spectrum(&self) -> Result<Spectrum, EigenError> {
        let eigenvalues = eigenvalues_sym(&self.entries)?;
        let norm = eigensolve::norm_of_sorted(&eigenvalues);
        Ok(Spectrum { eigenvalues, norm })
    }

    pub fn eigenpairs(&self) -> Result<Vec<EigenPair>, EigenError> {
        eigen_sym(&self.entries)
    }
}

/// `‖H_{θ,λ}‖` at rational `θ`: the norm of the untwisted `q × q` matrix at
/// coupling `|λ|`. The operator norm is even in `λ`, but the untwisted matrix
/// only attains it for `λ ≥ 0` (at `θ = 0`, `λ = −2` it is the zero matrix).
pub fn norm_rational(fraction: Fraction, lambda: f64) -> Result<f64, EigenError> {
    Ok(build_harper(fraction, lambda.abs(), Twist::TRIVIAL).spectrum()?.norm)
}

/// Norm at a real frequency, approximated at the last continued-fraction
/// convergent with denominator `≤ q_max`. No error bar is attached.
pub fn norm_real(theta: f64, lambda: f64, q_max: u64) -> Result<(f64, Fraction), EigenError> {
    let theta = theta.clamp(0.0, 1.0);
    let reduced = if theta > 0.5 { 1.0 - theta } else { theta };
    let approx = *convergents(reduced, q_max.max(1))
        .last()
        .expect("0/1 is always a convergent");
    Ok((norm_rational(approx, lambda)?, approx))
}
