//! Band spectra at rational frequency (the Hofstadter butterfly).
//!
//! The `j`-th band is the range of the `j`-th eigenvalue of the twisted
//! `q × q` matrix as the twist varies. Its endpoints are read off the four
//! extreme twists (`φ ∈ {0, π/q}`, `ω = ±1`). That characterisation is used as
//! a numerical method: every result is checked against a phase sweep, and a
//! dense 256-point envelope replaces it if the check ever fails.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use crate::eigensolve::EigenError;
use crate::format::g17;
use crate::fractions::{farey_sequence, Fraction};
use crate::operator::{build_harper, CornerSign, Twist};

/// Containment slack between sampled eigenvalues and computed bands.
pub const CONTAINMENT_TOL: f64 = 1e-7;
/// Phase grid used by the built-in containment guard.
pub const GUARD_GRID: usize = 8;
/// Phase grid of the fallback envelope.
pub const FALLBACK_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn contains(&self, e: f64, tol: f64) -> bool {
        e >= self.lo - tol && e <= self.hi + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSpectrum {
    pub fraction: Fraction,
    pub lambda: f64,
    /// One interval per eigenvalue index (`q` of them), possibly touching.
    pub edges: Vec<Band>,
    /// `edges` with touching neighbours merged; ascending and disjoint.
    pub bands: Vec<Band>,
    /// Whether the dense phase envelope replaced the extreme-twist edges.
    pub fallback: bool,
}

impl BandSpectrum {
    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Largest `|endpoint|`, which is the operator norm.
    pub fn max_abs(&self) -> f64 {
        self.bands.iter().fold(0.0, |m, b| m.max(b.lo.abs()).max(b.hi.abs()))
    }

    pub fn contains(&self, e: f64, tol: f64) -> bool {
        self.bands.iter().any(|b| b.contains(e, tol))
    }
}

/// Gap below which two adjacent index intervals count as touching: a few ulps
/// of the matrix scale `2 + |λ|`, times `q`. Genuine gaps at small `q` can be
/// as narrow as `1e−13`, so a fixed `1e−10` would merge real bands.
pub fn touching_tol(q: u64, lambda: f64) -> f64 {
    2.0 * q as f64 * f64::EPSILON * (2.0 + lambda.abs())
}

fn spectrum_at(fraction: Fraction, lambda: f64, twist: Twist) -> Result<Vec<f64>, EigenError> {
    Ok(build_harper(fraction, lambda, twist).spectrum()?.eigenvalues)
}

fn envelope(per_twist: &[Vec<f64>]) -> Vec<Band> {
    let q = per_twist[0].len();
    (0..q)
        .map(|j| {
            let (lo, hi) = per_twist
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                    (lo.min(s[j]), hi.max(s[j]))
                });
            Band { lo, hi }
        })
        .collect()
}

fn merge(edges: &[Band], tol: f64) -> Vec<Band> {
    let mut out: Vec<Band> = Vec::with_capacity(edges.len());
    for &b in edges {
        match out.last_mut() {
            Some(last) if b.lo - last.hi <= tol => last.hi = last.hi.max(b.hi),
            _ => out.push(b),
        }
    }
    out
}

fn phase_grid(q: u64, grid_n: usize) -> impl Iterator<Item = Twist> {
    let period = 2.0 * PI / q as f64;
    (0..grid_n).flat_map(move |i| {
        let phi = period * i as f64 / grid_n as f64;
        [CornerSign::Periodic, CornerSign::Antiperiodic]
            .into_iter()
            .map(move |omega| Twist { phi, omega })
    })
}

/// All eigenvalues over a `grid_n × 2` grid of twists: `φ` uniform on one
/// period `[0, 2π/q)` and `ω = ±1`. Returns `2·grid_n·q` values.
pub fn sample_phases(fraction: Fraction, lambda: f64, grid_n: usize) -> Result<Vec<f64>, EigenError> {
    let mut out = Vec::with_capacity(2 * grid_n * fraction.q() as usize);
    for t in phase_grid(fraction.q(), grid_n.max(1)) {
        out.extend(spectrum_at(fraction, lambda, t)?);
    }
    Ok(out)
}

/// Band spectrum of `H_{p/q, λ}`.
pub fn bands(fraction: Fraction, lambda: f64) -> Result<BandSpectrum, EigenError> {
    let q = fraction.q();
    let extremes = Twist::extremes(q)
        .iter()
        .map(|&t| spectrum_at(fraction, lambda, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut edges = envelope(&extremes);

    let samples = phase_grid(q, GUARD_GRID)
        .map(|t| spectrum_at(fraction, lambda, t))
        .collect::<Result<Vec<_>, _>>()?;
    let contained = samples
        .iter()
        .all(|s| s.iter().zip(&edges).all(|(e, b)| b.contains(*e, CONTAINMENT_TOL)));
    let fallback = !contained;
    if fallback {
        let mut dense = phase_grid(q, FALLBACK_GRID)
            .map(|t| spectrum_at(fraction, lambda, t))
            .collect::<Result<Vec<_>, _>>()?;
        dense.extend(extremes);
        edges = envelope(&dense);
    }
    let bands = merge(&edges, touching_tol(q, lambda));
    Ok(BandSpectrum {
        fraction,
        lambda,
        edges,
        bands,
        fallback,
    })
}

/// Expected band count for `λ ≠ 0`: `q` for odd `q`, `q − 1` for even `q`.
pub fn expected_band_count(q: u64) -> usize {
    if q % 2 == 1 {
        q as usize
    } else {
        (q - 1) as usize
    }
}

/// One exported band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRecord {
    pub fraction: Fraction,
    pub lambda: f64,
    pub band_index: usize,
    pub band: Band,
}

/// Merged bands for every reduced `p/q ∈ [0, 1]` with `q ≤ q_max`, ordered by
/// `(q, p, band index)`.
pub fn butterfly_export(q_max: u64, lambda: f64) -> Result<Vec<BandRecord>, EigenError> {
    let mut fractions = farey_sequence(q_max.max(1), Fraction::ZERO, Fraction::ONE).expect("valid interval");
    fractions.sort_by_key(|f| (f.q(), f.p()));
    let per = fractions
        .par_iter()
        .map(|&f| bands(f, lambda))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per
        .into_iter()
        .flat_map(|s| {
            let (fraction, lambda) = (s.fraction, s.lambda);
            s.bands
                .into_iter()
                .enumerate()
                .map(move |(band_index, band)| BandRecord {
                    fraction,
                    lambda,
                    band_index,
                    band,
                })
        })
        .collect())
}

pub const BUTTERFLY_HEADER: [&str; 7] = ["p", "q", "theta", "lambda", "band_index", "lo", "hi"];

/// Writes records as CSV with a header row.
pub fn write_butterfly_csv<W: Write>(records: &[BandRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BUTTERFLY_HEADER)?;
    for r in records {
        w.write_record([
            r.fraction.p().to_string(),
            r.fraction.q().to_string(),
            g17(r.fraction.value()),
            g17(r.lambda),
            r.band_index.to_string(),
            g17(r.band.lo),
            g17(r.band.hi),
        ])?;
    }
    w.flush()?;
    Ok(())
}
