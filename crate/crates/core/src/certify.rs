//! Sweeps that compare computed norms with every valid closed-form bound, and
//! numerical reproduction of the named constants.
//!
//! Nothing here is rigorous: norms come from a floating-point eigensolver and
//! the comparisons carry a fixed slack of [`MARGIN_TOL`].

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{bound_table, lower_f1, lower_m, minimize_scalar, BoundError, BoundSet, SEARCH_GRID_STEP};
use crate::eigensolve::EigenError;
use crate::format::{ser_g17, ser_opt_g17};
use crate::fractions::{farey_sequence, Fraction, FractionError};
use crate::operator::norm_rational;

/// A record passes iff both margins are at least `−MARGIN_TOL`. Bounds touch
/// the norm exactly at their equality points, so strict positivity is wrong.
pub const MARGIN_TOL: f64 = 1e-9;

/// Targets for the named constants and their tolerances.
pub const MIN_F1_TARGET: f64 = 2.56769;
pub const MIN_F1_TOL: f64 = 1e-4;
pub const MIN_F1_SQ_TARGET: f64 = 6.59303;
pub const MIN_F1_SQ_TOL: f64 = 1e-3;
pub const MIN_M_SQ_TARGET: f64 = 7.82387;
pub const MIN_M_SQ_TOL: f64 = 1e-3;
pub const THETA_STAR_TARGET: f64 = 0.23441;
pub const THETA_STAR_TOL: f64 = 1e-5;
/// Bracket for the minimum of the norm over `[1/4, 1/2]`.
pub const MIN_NORM_BRACKET: (f64, f64) = (2.56, 2.62);
/// Denominator cap for the norm minimum in [`verify_constants`].
pub const MIN_NORM_Q_MAX: u64 = 120;
/// Default constant of the Hölder-½ check; empirical, not a proven value.
pub const HOLDER_C: f64 = 10.0;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Fraction(#[from] FractionError),
    #[error("q_max must be at least 1")]
    ZeroQMax,
}

fn ser_fraction<S: serde::Serializer>(f: &Fraction, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValues {
    #[serde(serialize_with = "ser_opt_g17")]
    pub upper_bvz: Option<f64>,
    #[serde(serialize_with = "ser_opt_g17")]
    pub upper_sqrt: Option<f64>,
    #[serde(serialize_with = "ser_opt_g17", rename = "upper_M0")]
    pub upper_m0: Option<f64>,
    #[serde(serialize_with = "ser_opt_g17", rename = "upper_M1")]
    pub upper_m1: Option<f64>,
    #[serde(serialize_with = "ser_opt_g17")]
    pub upper_sz: Option<f64>,
    #[serde(serialize_with = "ser_opt_g17")]
    pub lower_f1: Option<f64>,
    #[serde(serialize_with = "ser_opt_g17")]
    pub lower_f2: Option<f64>,
    #[serde(serialize_with = "ser_opt_g17")]
    pub lower_f3: Option<f64>,
    #[serde(serialize_with = "ser_opt_g17")]
    pub lower_m: Option<f64>,
}

impl From<&BoundSet> for BoundValues {
    fn from(b: &BoundSet) -> Self {
        BoundValues {
            upper_bvz: b.upper_bvz,
            upper_sqrt: b.upper_sqrt,
            upper_m0: b.upper_m0,
            upper_m1: b.upper_m1,
            upper_sz: b.upper_sz,
            lower_f1: b.lower_f1,
            lower_f2: b.lower_f2,
            lower_f3: b.lower_f3,
            lower_m: b.lower_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateRecord {
    #[serde(serialize_with = "ser_fraction")]
    pub fraction: Fraction,
    #[serde(serialize_with = "ser_g17")]
    pub lambda: f64,
    #[serde(serialize_with = "ser_g17")]
    pub norm: f64,
    #[serde(rename = "bounds")]
    pub bound_set: BoundValues,
    /// `min(upper − norm)` over valid upper bounds; `None` if there are none.
    #[serde(serialize_with = "ser_opt_g17")]
    pub worst_upper_margin: Option<f64>,
    /// `min(norm − lower)` over valid lower bounds; `None` if there are none.
    #[serde(serialize_with = "ser_opt_g17")]
    pub worst_lower_margin: Option<f64>,
    /// Name of the bound attaining `worst_upper_margin`.
    pub tightest_upper: Option<&'static str>,
    pub tightest_lower: Option<&'static str>,
    pub pass: bool,
}

/// Compares one norm with the bound table at `θ = fraction ∈ [0, 1/2]`.
pub fn certify_point(fraction: Fraction, lambda: f64) -> Result<CertificateRecord, CertifyError> {
    let norm = norm_rational(fraction, lambda)?;
    let set = bound_table(fraction.value(), lambda)?;
    let fold = |it: &mut dyn Iterator<Item = (&'static str, f64)>| {
        it.fold(None, |acc: Option<(&'static str, f64)>, (n, m)| match acc {
            Some((_, best)) if best <= m => acc,
            _ => Some((n, m)),
        })
    };
    let up = fold(&mut set.uppers().map(|(n, u)| (n, u - norm)));
    let low = fold(&mut set.lowers().map(|(n, l)| (n, norm - l)));
    let ok = |m: Option<(&str, f64)>| m.is_none_or(|(_, v)| v >= -MARGIN_TOL);
    Ok(CertificateRecord {
        fraction,
        lambda,
        norm,
        bound_set: BoundValues::from(&set),
        worst_upper_margin: up.map(|x| x.1),
        worst_lower_margin: low.map(|x| x.1),
        tightest_upper: up.map(|x| x.0),
        tightest_lower: low.map(|x| x.0),
        pass: ok(up) && ok(low),
    })
}

/// A reproduced constant with its target and verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    #[serde(serialize_with = "ser_g17")]
    pub value: f64,
    /// Where the value is attained (a `θ`), when meaningful.
    #[serde(serialize_with = "ser_opt_g17")]
    pub argmin: Option<f64>,
    pub check: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub min_f1: NamedValue,
    pub min_f1_sq: NamedValue,
    pub min_m_sq_left: NamedValue,
    pub theta_star_8: NamedValue,
    pub min_norm_quarter_half: NamedValue,
    #[serde(serialize_with = "ser_fraction")]
    pub min_norm_quarter_half_at: Fraction,
}

impl Constants {
    pub fn all(&self) -> [(&'static str, &NamedValue); 5] {
        [
            ("min_f1", &self.min_f1),
            ("min_f1_sq", &self.min_f1_sq),
            ("min_m_sq_left", &self.min_m_sq_left),
            ("theta_star_8", &self.theta_star_8),
            ("min_norm_quarter_half", &self.min_norm_quarter_half),
        ]
    }

    pub fn passed(&self) -> bool {
        self.all().iter().all(|(_, v)| v.pass)
    }
}

/// `min f1` on `(1/4, 1/2)`.
pub fn min_f1() -> (f64, f64) {
    minimize_scalar(|t| lower_f1(t).unwrap_or(f64::INFINITY), 0.25, 0.5)
}

/// `min m(θ)²` on `[0, 1/4]`.
pub fn min_m_sq_left() -> (f64, f64) {
    minimize_scalar(|t| lower_m(t).map(|v| v * v).unwrap_or(f64::INFINITY), 0.0, 0.25)
}

fn m_sq(theta: f64) -> f64 {
    lower_m(theta).map(|v| v * v).unwrap_or(f64::NEG_INFINITY)
}

/// Largest `θ̂ ≤ 1/4` such that `m(θ)² ≥ 8` at every grid point of
/// `[0, θ̂]` (step [`SEARCH_GRID_STEP`]); the crossing is then refined by
/// bisection between the last good and first bad grid points.
pub fn theta_star_8() -> f64 {
    let steps = (0.25 / SEARCH_GRID_STEP).round() as usize;
    let at = |i: usize| i as f64 * SEARCH_GRID_STEP;
    let Some(bad) = (0..=steps).find(|&i| m_sq(at(i)) < 8.0) else {
        return 0.25;
    };
    if bad == 0 {
        return 0.0;
    }
    let (mut a, mut b) = (at(bad - 1), at(bad));
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if m_sq(mid) >= 8.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// Minimum of `norm_rational` over Farey fractions in `[lo, hi]` with
/// denominator `≤ q_max`. Ties go to the first fraction in Farey order.
pub fn min_norm_interval(lo: Fraction, hi: Fraction, q_max: u64, lambda: f64) -> Result<(f64, Fraction), CertifyError> {
    let fr = farey_sequence(q_max, lo, hi)?;
    let norms = fr
        .par_iter()
        .map(|&f| norm_rational(f, lambda).map(|n| (n, f)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(norms.into_iter().fold(
        (f64::INFINITY, Fraction::ZERO),
        |acc, x| if x.0 < acc.0 { x } else { acc },
    ))
}

fn named(value: f64, argmin: Option<f64>, check: String, pass: bool) -> NamedValue {
    NamedValue {
        value,
        argmin,
        check,
        pass,
    }
}

/// Reproduces the named constants and checks them against their targets.
pub fn verify_constants() -> Result<Constants, CertifyError> {
    let (f1, f1_at) = min_f1();
    let (msq, msq_at) = min_m_sq_left();
    let star = theta_star_8();
    let (nmin, nmin_at) = min_norm_interval(Fraction::QUARTER, Fraction::HALF, MIN_NORM_Q_MAX, 2.0)?;
    Ok(Constants {
        min_f1: named(
            f1,
            Some(f1_at),
            format!("|value - {MIN_F1_TARGET}| <= {MIN_F1_TOL}"),
            (f1 - MIN_F1_TARGET).abs() <= MIN_F1_TOL,
        ),
        min_f1_sq: named(
            f1 * f1,
            Some(f1_at),
            format!("|value - {MIN_F1_SQ_TARGET}| <= {MIN_F1_SQ_TOL}"),
            (f1 * f1 - MIN_F1_SQ_TARGET).abs() <= MIN_F1_SQ_TOL,
        ),
        min_m_sq_left: named(
            msq,
            Some(msq_at),
            format!("value >= {MIN_M_SQ_TARGET} - {MIN_M_SQ_TOL}"),
            msq >= MIN_M_SQ_TARGET - MIN_M_SQ_TOL,
        ),
        theta_star_8: named(
            star,
            None,
            format!("value >= {THETA_STAR_TARGET} - {THETA_STAR_TOL}"),
            star >= THETA_STAR_TARGET - THETA_STAR_TOL,
        ),
        min_norm_quarter_half: named(
            nmin,
            Some(nmin_at.value()),
            format!("value in [{}, {}]", MIN_NORM_BRACKET.0, MIN_NORM_BRACKET.1),
            nmin >= MIN_NORM_BRACKET.0 && nmin <= MIN_NORM_BRACKET.1,
        ),
        min_norm_quarter_half_at: nmin_at,
    })
}

/// `|‖H_a‖ − ‖H_b‖| / √|a − b|`.
pub fn holder_ratio(a: Fraction, b: Fraction, lambda: f64) -> Result<f64, CertifyError> {
    let d = (a.value() - b.value()).abs();
    if d == 0.0 {
        return Ok(0.0);
    }
    let na = norm_rational(a, lambda)?;
    let nb = norm_rational(b, lambda)?;
    Ok((na - nb).abs() / d.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderReport {
    #[serde(serialize_with = "ser_g17")]
    pub worst_ratio: f64,
    #[serde(serialize_with = "ser_fraction")]
    pub left: Fraction,
    #[serde(serialize_with = "ser_fraction")]
    pub right: Fraction,
    #[serde(serialize_with = "ser_g17")]
    pub constant: f64,
    pub pass: bool,
}

/// Worst Hölder-½ ratio over consecutive Farey neighbours in `[0, 1]`.
pub fn holder_check(q_max: u64, lambda: f64, constant: f64) -> Result<HolderReport, CertifyError> {
    let fr = farey_sequence(q_max, Fraction::ZERO, Fraction::ONE)?;
    let norms = fr
        .par_iter()
        .map(|&f| norm_rational(f, lambda))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst = (0.0, fr[0], fr[0]);
    for i in 1..fr.len() {
        let r = (norms[i] - norms[i - 1]).abs() / (fr[i].value() - fr[i - 1].value()).sqrt();
        if r > worst.0 {
            worst = (r, fr[i - 1], fr[i]);
        }
    }
    Ok(HolderReport {
        worst_ratio: worst.0,
        left: worst.1,
        right: worst.2,
        constant,
        pass: worst.0 <= constant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub q_max: u64,
    #[serde(serialize_with = "crate::format::ser_vec_g17")]
    pub lambdas: Vec<f64>,
    pub seed: u64,
    #[serde(serialize_with = "ser_g17")]
    pub margin_tol: f64,
    #[serde(serialize_with = "ser_g17")]
    pub search_grid_step: f64,
    #[serde(serialize_with = "ser_g17")]
    pub search_tol: f64,
    pub record_count: usize,
    pub failure_count: usize,
}

/// Empirical probe of whether `‖H_θ‖² ≥ 8` on all of `[0, 1/4]`; reported,
/// never asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exploration {
    pub q_max: u64,
    #[serde(serialize_with = "ser_g17")]
    pub min_norm_sq_left: f64,
    #[serde(serialize_with = "ser_fraction")]
    pub at: Fraction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub metadata: Metadata,
    pub constants: Option<Constants>,
    pub records: Vec<CertificateRecord>,
    pub failures: Vec<CertificateRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holder: Option<HolderReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploration: Option<Exploration>,
}

impl CertificateReport {
    /// No failed records, and every constant and Hölder check that was run
    /// passed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.constants.as_ref().is_none_or(Constants::passed)
            && self.holder.as_ref().is_none_or(|h| h.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// One record per reduced fraction in `[0, 1/2]` with `q ≤ q_max`, times each
/// `λ`. Ordered by fraction, then by the position of `λ` in `lambdas`.
pub fn certify_sweep(q_max: u64, lambdas: &[f64]) -> Result<CertificateReport, CertifyError> {
    if q_max == 0 {
        return Err(CertifyError::ZeroQMax);
    }
    let fr = farey_sequence(q_max, Fraction::ZERO, Fraction::HALF)?;
    let cells: Vec<(Fraction, f64)> = fr.iter().flat_map(|&f| lambdas.iter().map(move |&l| (f, l))).collect();
    let records = cells
        .par_iter()
        .map(|&(f, l)| certify_point(f, l))
        .collect::<Result<Vec<_>, _>>()?;
    let failures: Vec<_> = records.iter().filter(|r| !r.pass).cloned().collect();
    Ok(CertificateReport {
        metadata: Metadata {
            q_max,
            lambdas: lambdas.to_vec(),
            seed: 0,
            margin_tol: MARGIN_TOL,
            search_grid_step: SEARCH_GRID_STEP,
            search_tol: crate::bounds::SEARCH_TOL,
            record_count: records.len(),
            failure_count: failures.len(),
        },
        constants: None,
        records,
        failures,
        holder: None,
        exploration: None,
    })
}

/// Options for [`certify`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyConfig {
    pub q_max: u64,
    pub lambdas: Vec<f64>,
    pub constants: bool,
    /// Run [`holder_check`] at `λ = 2` with this constant.
    pub holder: Option<f64>,
    /// Report `min ‖H_θ‖²` on `[0, 1/4]` for `q ≤` this bound.
    pub explore: Option<u64>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            q_max: 60,
            lambdas: vec![0.5, 1.0, 2.0, 3.0],
            constants: true,
            holder: Some(HOLDER_C),
            explore: None,
        }
    }
}

/// Sweep plus the optional extras in `config`.
pub fn certify(config: &CertifyConfig) -> Result<CertificateReport, CertifyError> {
    let mut report = certify_sweep(config.q_max, &config.lambdas)?;
    if config.constants {
        report.constants = Some(verify_constants()?);
    }
    if let Some(c) = config.holder {
        report.holder = Some(holder_check(config.q_max, 2.0, c)?);
    }
    if let Some(q) = config.explore {
        let (v, at) = min_norm_interval(Fraction::ZERO, Fraction::QUARTER, q, 2.0)?;
        report.exploration = Some(Exploration {
            q_max: q,
            min_norm_sq_left: v * v,
            at,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, q: u64) -> Fraction {
        Fraction::new(p, q).unwrap()
    }

    #[test]
    fn small_sweep() {
        let r = certify_sweep(2, &[2.0]).unwrap();
        assert_eq!(r.records.len(), 2);
        assert!((r.records[0].norm - 4.0).abs() < 1e-12);
        assert!((r.records[1].norm - 8f64.sqrt()).abs() < 1e-12);
        assert!(r.records.iter().all(|x| x.worst_upper_margin.unwrap() >= -MARGIN_TOL));
        assert!(r.records.iter().all(|x| x.worst_lower_margin.unwrap() >= -MARGIN_TOL));
        assert!(r.failures.is_empty());
    }

    #[test]
    fn sqrt_bound_is_tight_at_quarter() {
        let r = certify_sweep(5, &[2.0]).unwrap();
        let q = r.records.iter().find(|x| x.fraction == f(1, 4)).unwrap();
        let m = q.bound_set.upper_sqrt.unwrap() - q.norm;
        assert!(m.abs() < 1e-9);
    }

    #[test]
    fn failures_are_exactly_the_failing_records() {
        let r = certify_sweep(12, &[0.5, 2.0, 3.0]).unwrap();
        let want: Vec<_> = r.records.iter().filter(|x| !x.pass).cloned().collect();
        assert_eq!(r.failures, want);
        assert_eq!(r.metadata.failure_count, r.failures.len());
    }

    #[test]
    fn coverage_is_monotone() {
        let a = certify_sweep(7, &[1.0, 2.0]).unwrap();
        let b = certify_sweep(9, &[1.0, 2.0]).unwrap();
        for x in &a.records {
            let y = b
                .records
                .iter()
                .find(|y| y.fraction == x.fraction && y.lambda == x.lambda)
                .unwrap();
            assert_eq!(x.norm.to_bits(), y.norm.to_bits());
        }
        assert_eq!(a.to_json(), certify_sweep(7, &[1.0, 2.0]).unwrap().to_json());
    }

    #[test]
    fn norm_interval_examples() {
        let (v, at) = min_norm_interval(Fraction::HALF, Fraction::HALF, 2, 2.0).unwrap();
        assert_eq!(at, Fraction::HALF);
        assert!((v - 8f64.sqrt()).abs() < 1e-12);
        assert!(min_norm_interval(Fraction::HALF, Fraction::QUARTER, 5, 2.0).is_err());
    }

    #[test]
    fn holder_examples() {
        assert!(holder_ratio(f(1, 4), f(1, 2), 2.0).unwrap() < 1e-9);
        assert!(holder_ratio(f(3, 5), f(5, 8), 2.0).unwrap() <= 10.0);
        assert!(holder_ratio(f(5, 8), f(8, 13), 2.0).unwrap() <= 10.0);
    }

    #[test]
    fn json_shape() {
        let r = certify_sweep(2, &[2.0]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["metadata", "constants", "records", "failures"] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
        assert!(r.to_json().contains("\"norm\": 2.8284271247461903"));
    }
}
