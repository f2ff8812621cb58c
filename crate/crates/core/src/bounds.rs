//! Closed-form upper and lower bounds on `‖H_{θ,λ}‖`.
//!
//! Each function checks the `θ` range its formula is stated for and returns
//! [`BoundError::OutOfRange`] otherwise. [`bound_table`] assembles the bounds
//! that are *valid* at a given `(θ, λ)`; validity can be narrower than the
//! range a formula can be evaluated on.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("{bound}: theta = {theta} outside [{lo}, {hi}]")]
    OutOfRange {
        bound: &'static str,
        theta: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{bound}: theta = 0 is excluded (1/sin πθ is singular)")]
    Singular { bound: &'static str },
}

fn check_range(bound: &'static str, theta: f64, lo: f64, hi: f64) -> Result<(), BoundError> {
    if theta >= lo && theta <= hi {
        Ok(())
    } else {
        Err(BoundError::OutOfRange { bound, theta, lo, hi })
    }
}

/// `(√5 − 1)/2`, the switch point of [`upper_sz`] in `sin² πθ`.
pub const GOLDEN_SWITCH: f64 = 0.618_033_988_749_894_9;

/// `2(1 + √2 + cos 2πθ)`, Harper case, `θ ∈ [0, 1]`.
pub fn upper_bvz(theta: f64) -> Result<f64, BoundError> {
    check_range("upper_bvz", theta, 0.0, 1.0)?;
    Ok(2.0 * (1.0 + std::f64::consts::SQRT_2 + (2.0 * PI * theta).cos()))
}

/// `√(4 + λ²)`; valid for `θ ∈ [1/4, 1/2]`.
pub fn upper_sqrt(lambda: f64) -> f64 {
    (4.0 + lambda * lambda).sqrt()
}

/// `√(4 + λ² + 4|λ|(cos πθ − sin πθ) cos πθ)`, evaluated on `[0, 1/2]`.
///
/// Only a proven bound on `[0, 1/4]`; past 1/4 the cross term turns negative
/// and the value drops below the true norm (e.g. `θ = 1/3`).
pub fn upper_m0(theta: f64, lambda: f64) -> Result<f64, BoundError> {
    check_range("upper_M0", theta, 0.0, 0.5)?;
    let (s, c) = (PI * theta).sin_cos();
    Ok((4.0 + lambda * lambda + 4.0 * lambda.abs() * (c - s) * c).sqrt())
}

/// Improved bound on `[1/4, 1/2]`:
/// `√(4 + λ² − (1 − cot πθ)(1 − √((1 + cos² 4πθ)/2))·min(4, λ²))`.
pub fn upper_m1(theta: f64, lambda: f64) -> Result<f64, BoundError> {
    check_range("upper_M1", theta, 0.25, 0.5)?;
    let cot = if theta == 0.5 { 0.0 } else { 1.0 / (PI * theta).tan() };
    let c4 = (4.0 * PI * theta).cos();
    let shrink = (1.0 - cot) * (1.0 - ((1.0 + c4 * c4) / 2.0).sqrt());
    Ok((4.0 + lambda * lambda - shrink * (lambda * lambda).min(4.0)).sqrt())
}

/// Harper-case piecewise bound: `2 + 2cos πθ` while `sin² πθ ≤ (√5 − 1)/2`,
/// else `2√(1 + 1/sin² πθ)`.
pub fn upper_sz(theta: f64) -> Result<f64, BoundError> {
    check_range("upper_sz", theta, 0.0, 0.5)?;
    let (s, c) = (PI * theta).sin_cos();
    if s * s <= GOLDEN_SWITCH {
        Ok(2.0 + 2.0 * c)
    } else {
        Ok(2.0 * (1.0 + 1.0 / (s * s)).sqrt())
    }
}

/// Lower bound from the decaying trial vector `rⁿ`, on `(0, 1/2]`.
pub fn lower_f1(theta: f64) -> Result<f64, BoundError> {
    if theta == 0.0 {
        return Err(BoundError::Singular { bound: "lower_f1" });
    }
    check_range("lower_f1", theta, 0.0, 0.5)?;
    let (s, c) = (PI * theta).sin_cos();
    let inv = 1.0 + 1.0 / s;
    let sq = 6.0 - 4.0 / (inv + inv.sqrt()) + 2.0 / (1.0 + 4.0 * s * c * c) + 8.0 * c * c / (1.0 + s).powf(1.5);
    Ok(sq.sqrt())
}

/// Lower bound from the two-amplitude trial vector, on `[0, 1/2]`.
///
/// The term `16cos⁴πθ/(2 + |tan 2πθ|)²` is evaluated as
/// `16cos⁴πθ·cos²2πθ/(2|cos 2πθ| + |sin 2πθ|)²`, which is the same quantity
/// with its `θ = 1/4` limit (zero) built in.
pub fn lower_f2(theta: f64) -> Result<f64, BoundError> {
    check_range("lower_f2", theta, 0.0, 0.5)?;
    let c1 = (PI * theta).cos();
    let (s2, c2) = (2.0 * PI * theta).sin_cos();
    let w = 1.0 + (4.0 * PI * theta).sin().abs();
    let tan_term = {
        let den = 2.0 * c2.abs() + s2.abs();
        16.0 * c1.powi(4) * c2 * c2 / (den * den)
    };
    let a = s2 * s2 / w;
    let b = 1.0 + c2 / w.sqrt();
    let sq = 4.0 + 2.0 / w.sqrt() + 2.0 * c2 * c2 / w + 2.0 * (a * a + tan_term * b * b).sqrt();
    Ok(sq.sqrt())
}

/// Lower bound from the five-site trial vector, on `[0, 1/2]`.
pub fn lower_f3(theta: f64) -> Result<f64, BoundError> {
    check_range("lower_f3", theta, 0.0, 0.5)?;
    let c = (2.0 * PI * theta).cos();
    let poly = c + 2.0 * c * c + 2.0 * c.powi(4);
    let s10 = 10f64.sqrt();
    let off = s10 + 8.0 * c / s10;
    let sq = 4.0 + 0.8 * poly + ((2.0 - 0.8 * poly).powi(2) + off * off).sqrt();
    Ok(sq.sqrt())
}

/// `max(f1, f2, f3)`; `f1` is left out at `θ = 0`.
pub fn lower_m(theta: f64) -> Result<f64, BoundError> {
    check_range("lower_m", theta, 0.0, 0.5)?;
    let f23 = lower_f2(theta)?.max(lower_f3(theta)?);
    if theta == 0.0 {
        Ok(f23)
    } else {
        Ok(f23.max(lower_f1(theta)?))
    }
}

/// Every bound valid at one `(θ, λ)`; absent entries are outside their
/// validity range.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    pub theta: f64,
    pub lambda: f64,
    pub upper_bvz: Option<f64>,
    pub upper_sqrt: Option<f64>,
    pub upper_m0: Option<f64>,
    pub upper_m1: Option<f64>,
    pub upper_sz: Option<f64>,
    pub lower_f1: Option<f64>,
    pub lower_f2: Option<f64>,
    pub lower_f3: Option<f64>,
    pub lower_m: Option<f64>,
}

/// Column names in the order used by tables and CSV output.
pub const BOUND_NAMES: [&str; 9] = [
    "upper_bvz",
    "upper_sqrt",
    "upper_M0",
    "upper_M1",
    "upper_sz",
    "lower_f1",
    "lower_f2",
    "lower_f3",
    "lower_m",
];

impl BoundSet {
    /// `(name, value)` for all nine slots, in [`BOUND_NAMES`] order.
    pub fn entries(&self) -> [(&'static str, Option<f64>); 9] {
        [
            ("upper_bvz", self.upper_bvz),
            ("upper_sqrt", self.upper_sqrt),
            ("upper_M0", self.upper_m0),
            ("upper_M1", self.upper_m1),
            ("upper_sz", self.upper_sz),
            ("lower_f1", self.lower_f1),
            ("lower_f2", self.lower_f2),
            ("lower_f3", self.lower_f3),
            ("lower_m", self.lower_m),
        ]
    }

    pub fn uppers(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.entries()
            .into_iter()
            .filter(|(n, _)| n.starts_with("upper"))
            .filter_map(|(n, v)| v.map(|v| (n, v)))
    }

    pub fn lowers(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.entries()
            .into_iter()
            .filter(|(n, _)| n.starts_with("lower"))
            .filter_map(|(n, v)| v.map(|v| (n, v)))
    }

    pub fn present_count(&self) -> usize {
        self.entries().iter().filter(|(_, v)| v.is_some()).count()
    }
}

/// Harper-case bounds apply at `|λ| = 2` (the spectrum is even in `λ`).
pub fn is_harper(lambda: f64) -> bool {
    (lambda.abs() - 2.0).abs() <= 1e-12
}

/// Assembles the valid bounds at `θ ∈ [0, 1/2]` (reflect first).
pub fn bound_table(theta: f64, lambda: f64) -> Result<BoundSet, BoundError> {
    check_range("bound_table", theta, 0.0, 0.5)?;
    let harper = is_harper(lambda);
    let right = theta >= 0.25;
    let left = theta <= 0.25;
    Ok(BoundSet {
        theta,
        lambda,
        upper_bvz: harper.then(|| upper_bvz(theta)).transpose()?,
        upper_sqrt: right.then(|| upper_sqrt(lambda)),
        upper_m0: left.then(|| upper_m0(theta, lambda)).transpose()?,
        upper_m1: right.then(|| upper_m1(theta, lambda)).transpose()?,
        upper_sz: harper.then(|| upper_sz(theta)).transpose()?,
        lower_f1: (harper && theta > 0.0).then(|| lower_f1(theta)).transpose()?,
        lower_f2: harper.then(|| lower_f2(theta)).transpose()?,
        lower_f3: harper.then(|| lower_f3(theta)).transpose()?,
        lower_m: harper.then(|| lower_m(theta)).transpose()?,
    })
}

/// Grid step for one-dimensional bound searches.
pub const SEARCH_GRID_STEP: f64 = 1e-5;
/// Final bracket width of the golden-section refinement.
pub const SEARCH_TOL: f64 = 1e-10;

/// Minimises `f` on `[lo, hi]`: uniform grid of step [`SEARCH_GRID_STEP`]
/// (endpoints included), then golden-section refinement around the best grid
/// point down to [`SEARCH_TOL`]. Returns `(min value, argmin)`.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let steps = (((hi - lo) / SEARCH_GRID_STEP).ceil() as usize).max(1);
    let at = |i: usize| {
        if i == steps {
            hi
        } else {
            lo + (hi - lo) * i as f64 / steps as f64
        }
    };
    let (best_i, best_v) = (0..=steps)
        .map(|i| (i, f(at(i))))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(steps));
    let (x, v) = golden_section_min(&f, a, b, SEARCH_TOL, 200);
    if v < best_v {
        (v, x)
    } else {
        (best_v, at(best_i))
    }
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
