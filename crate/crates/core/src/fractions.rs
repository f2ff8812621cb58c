//! Reduced rationals in `[0, 1]`: Farey enumeration, continued-fraction
//! convergents and the `θ ↔ 1 − θ` reflection.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FractionError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("fraction {p}/{q} lies outside [0, 1]")]
    OutOfRange { p: u64, q: u64 },
    #[error("malformed fraction {0:?}: expected `p/q`")]
    Malformed(String),
    #[error("invalid Farey interval: lower end {lo} exceeds upper end {hi}")]
    EmptyInterval { lo: Fraction, hi: Fraction },
    #[error("q_max must be at least 1")]
    ZeroQMax,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A reduced fraction `p/q` with `0 ≤ p ≤ q`, `q ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    p: u64,
    q: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { p: 0, q: 1 };
    pub const ONE: Fraction = Fraction { p: 1, q: 1 };
    pub const HALF: Fraction = Fraction { p: 1, q: 2 };
    pub const QUARTER: Fraction = Fraction { p: 1, q: 4 };

    /// Builds `p/q` in lowest terms. Unreduced input is reduced.
    pub fn new(p: u64, q: u64) -> Result<Self, FractionError> {
        if q == 0 {
            return Err(FractionError::ZeroDenominator);
        }
        if p > q {
            return Err(FractionError::OutOfRange { p, q });
        }
        let g = gcd(p, q);
        Ok(Fraction { p: p / g, q: q / g })
    }

    /// Caller guarantees `gcd(p, q) = 1` and `p ≤ q`.
    pub(crate) const fn new_unchecked(p: u64, q: u64) -> Self {
        Fraction { p, q }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `1 − p/q`.
    pub fn reflect(&self) -> Fraction {
        Fraction {
            p: self.q - self.p,
            q: self.q,
        }
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p as u128 * other.q as u128).cmp(&(other.p as u128 * self.q as u128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Fraction {
    type Err = FractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || FractionError::Malformed(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(malformed)?;
        let p: u64 = p.trim().parse().map_err(|_| malformed())?;
        let q: u64 = q.trim().parse().map_err(|_| malformed())?;
        Fraction::new(p, q)
    }
}

/// Maps `θ` to `[0, 1/2]`; the flag is set when `1 − θ` was taken.
pub fn reduce_symmetry(theta: Fraction) -> (Fraction, bool) {
    if 2 * theta.p > theta.q {
        (theta.reflect(), true)
    } else {
        (theta, false)
    }
}

/// Consecutive members `left ≤ x < right` of the Farey sequence of order `n`,
/// found by a batched descent of the Stern–Brocot tree. `right` may exceed 1
/// when `x = 1`.
fn farey_bracket(x: Fraction, n: u64) -> ((u64, u64), (u64, u64)) {
    let (xp, xq) = (x.p as i128, x.q as i128);
    let n = n as i128;
    let (mut l, mut r): ((i128, i128), (i128, i128)) = ((0, 1), (1, 0));
    loop {
        let mut moved = false;

        // advance the left end towards x: l + k·r ≤ x
        let coef = r.0 * xq - xp * r.1;
        let room = xp * l.1 - l.0 * xq;
        let mut k = if coef > 0 { room / coef } else { 0 };
        if r.1 > 0 {
            k = k.min((n - l.1) / r.1);
        }
        if k > 0 {
            l = (l.0 + k * r.0, l.1 + k * r.1);
            moved = true;
        }

        // pull the right end down: k·l + r > x
        let a = xp * l.1 - l.0 * xq;
        let b = r.0 * xq - xp * r.1;
        let mut k = (n - r.1) / l.1;
        if a > 0 {
            k = k.min((b - 1) / a);
        }
        if k > 0 {
            r = (r.0 + k * l.0, r.1 + k * l.1);
            moved = true;
        }

        if !moved {
            return ((l.0 as u64, l.1 as u64), (r.0 as u64, r.1 as u64));
        }
    }
}

/// All reduced fractions with denominator `≤ q_max` in `[lo, hi]`, ascending.
///
/// Generated by the Farey neighbour recurrence: from consecutive terms
/// `a/b < c/d` the next one is `(k·c − a)/(k·d − b)` with `k = ⌊(n + b)/d⌋`.
pub fn farey_sequence(q_max: u64, lo: Fraction, hi: Fraction) -> Result<Vec<Fraction>, FractionError> {
    if q_max == 0 {
        return Err(FractionError::ZeroQMax);
    }
    if lo > hi {
        return Err(FractionError::EmptyInterval { lo, hi });
    }
    let (left, right) = farey_bracket(lo, q_max);
    let (mut a, mut b, mut c, mut d) = if left == (lo.p, lo.q) {
        let (_, next) = farey_bracket(lo, q_max);
        (lo.p, lo.q, next.0, next.1)
    } else {
        let (_, next) = farey_bracket(Fraction::new_unchecked(right.0, right.1), q_max);
        (right.0, right.1, next.0, next.1)
    };

    let mut out = Vec::new();
    loop {
        let cur = Fraction::new_unchecked(a, b);
        if a > b || cur > hi {
            break;
        }
        out.push(cur);
        if d == 0 {
            break;
        }
        let k = (q_max + b) / d;
        let (e, f) = (k * c - a, k * d - b);
        (a, b, c, d) = (c, d, e, f);
    }
    Ok(out)
}

/// Continued-fraction convergents of `x ∈ [0, 1]` with denominator `≤ q_max`,
/// in order of increasing denominator. Stops as soon as a convergent
/// reproduces `x` to working precision, so rational inputs end exactly.
pub fn convergents(x: f64, q_max: u64) -> Vec<Fraction> {
    let x = x.clamp(0.0, 1.0);
    let mut out = Vec::new();
    // h/k recurrences seeded with h₋₁/k₋₁ = 1/0, h₋₂/k₋₂ = 0/1
    let (mut h_prev, mut k_prev) = (1u64, 0u64);
    let (mut h_prev2, mut k_prev2) = (0u64, 1u64);
    let mut rem = x;
    loop {
        let a = rem.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let h = match a.checked_mul(h_prev).and_then(|v| v.checked_add(h_prev2)) {
            Some(v) => v,
            None => break,
        };
        let k = match a.checked_mul(k_prev).and_then(|v| v.checked_add(k_prev2)) {
            Some(v) => v,
            None => break,
        };
        if k > q_max || h > k {
            break;
        }
        out.push(Fraction::new_unchecked(h, k));
        let approx = h as f64 / k as f64;
        let frac = rem - a as f64;
        if (approx - x).abs() <= 4.0 * f64::EPSILON * x.max(f64::MIN_POSITIVE) || frac <= 0.0 {
            break;
        }
        rem = 1.0 / frac;
        (h_prev2, k_prev2, h_prev, k_prev) = (h_prev, k_prev, h, k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, q: u64) -> Fraction {
        Fraction::new(p, q).unwrap()
    }

    /// gcd-filter oracle: every reduced p/q with q ≤ n inside [lo, hi].
    fn farey_by_filter(n: u64, lo: Fraction, hi: Fraction) -> Vec<Fraction> {
        let mut v: Vec<Fraction> = (1..=n)
            .flat_map(|q| (0..=q).map(move |p| (p, q)))
            .filter(|&(p, q)| gcd(p, q) == 1)
            .map(|(p, q)| f(p, q))
            .filter(|x| *x >= lo && *x <= hi)
            .collect();
        v.sort();
        v
    }

    #[test]
    fn farey_examples() {
        let got = farey_sequence(5, Fraction::ZERO, Fraction::HALF).unwrap();
        let want = vec![f(0, 1), f(1, 5), f(1, 4), f(1, 3), f(2, 5), f(1, 2)];
        assert_eq!(got, want);
        assert_eq!(
            farey_sequence(1, Fraction::ZERO, Fraction::ONE).unwrap(),
            vec![f(0, 1), f(1, 1)]
        );
        assert_eq!(
            farey_sequence(2, Fraction::ZERO, Fraction::HALF).unwrap(),
            vec![f(0, 1), f(1, 2)]
        );
    }

    #[test]
    fn farey_matches_gcd_filter() {
        let ends = [
            (f(0, 1), f(1, 1)),
            (f(1, 4), f(1, 2)),
            (f(2, 7), f(5, 9)),
            (f(13, 37), f(13, 37)),
            (f(1, 2), f(1, 1)),
        ];
        for n in 1..=40 {
            for &(lo, hi) in &ends {
                assert_eq!(
                    farey_sequence(n, lo, hi).unwrap(),
                    farey_by_filter(n, lo, hi),
                    "n={n} [{lo}, {hi}]"
                );
            }
        }
    }

    #[test]
    fn farey_neighbours_have_unit_determinant() {
        for n in 1..=50 {
            let s = farey_sequence(n, Fraction::ZERO, Fraction::ONE).unwrap();
            for w in s.windows(2) {
                let (a, b, c, d) = (w[0].p, w[0].q, w[1].p, w[1].q);
                assert_eq!(b * c - a * d, 1);
            }
        }
    }

    #[test]
    fn farey_rejects_bad_input() {
        assert_eq!(
            farey_sequence(0, Fraction::ZERO, Fraction::ONE),
            Err(FractionError::ZeroQMax)
        );
        assert!(matches!(
            farey_sequence(5, Fraction::HALF, Fraction::QUARTER),
            Err(FractionError::EmptyInterval { .. })
        ));
    }

    #[test]
    fn reflection_covers_full_sequence() {
        let n = 23;
        let left = farey_sequence(n, Fraction::ZERO, Fraction::HALF).unwrap();
        let mut all: Vec<Fraction> = left.iter().copied().chain(left.iter().map(|x| x.reflect())).collect();
        all.sort();
        all.dedup();
        assert_eq!(all, farey_by_filter(n, Fraction::ZERO, Fraction::ONE));
    }

    #[test]
    fn symmetry_reduction() {
        assert_eq!(reduce_symmetry(f(3, 5)), (f(2, 5), true));
        assert_eq!(reduce_symmetry(f(1, 4)), (f(1, 4), false));
        assert_eq!(reduce_symmetry(f(1, 2)), (f(1, 2), false));
        assert_eq!(reduce_symmetry(f(1, 1)), (f(0, 1), true));
    }

    #[test]
    fn convergent_examples() {
        assert_eq!(convergents(0.5, 10), vec![f(0, 1), f(1, 2)]);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(
            convergents(golden, 15),
            vec![f(0, 1), f(1, 1), f(1, 2), f(2, 3), f(3, 5), f(5, 8), f(8, 13)]
        );
        assert_eq!(*convergents(1.0 / 3.0, 100).last().unwrap(), f(1, 3));
        assert_eq!(convergents(0.0, 5), vec![f(0, 1)]);
        assert_eq!(convergents(1.0, 5), vec![f(1, 1)]);
    }

    #[test]
    fn parsing() {
        assert_eq!("3/5".parse::<Fraction>().unwrap(), f(3, 5));
        assert_eq!("2/4".parse::<Fraction>().unwrap(), f(1, 2));
        assert!(matches!("3".parse::<Fraction>(), Err(FractionError::Malformed(_))));
        assert!(matches!("a/b".parse::<Fraction>(), Err(FractionError::Malformed(_))));
        assert_eq!("1/0".parse::<Fraction>(), Err(FractionError::ZeroDenominator));
        assert_eq!("5/3".parse::<Fraction>(), Err(FractionError::OutOfRange { p: 5, q: 3 }));
    }

    proptest::proptest! {
        #[test]
        fn convergents_are_reduced_and_increasing(x in 0.0f64..=1.0, q_max in 1u64..5000) {
            let c = convergents(x, q_max);
            proptest::prop_assert!(!c.is_empty());
            for w in c.windows(2) {
                proptest::prop_assert!(w[0].q() < w[1].q() || (w[0].q() == 1 && w[1].q() == 1));
            }
            for fr in &c {
                proptest::prop_assert_eq!(gcd(fr.p(), fr.q()), 1);
                proptest::prop_assert!(fr.q() <= q_max && fr.p() <= fr.q());
            }
        }

        #[test]
        fn farey_output_is_reduced_and_strictly_increasing(n in 1u64..200, a in 0u64..100, b in 0u64..100) {
            let lo = Fraction::new(a.min(b), 100).unwrap();
            let hi = Fraction::new(a.max(b), 100).unwrap();
            let s = farey_sequence(n, lo, hi).unwrap();
            for w in s.windows(2) {
                proptest::prop_assert!(w[0] < w[1]);
            }
            for fr in &s {
                proptest::prop_assert_eq!(gcd(fr.p(), fr.q()), 1);
                proptest::prop_assert!(fr.q() <= n && *fr >= lo && *fr <= hi);
            }
        }
    }
}
