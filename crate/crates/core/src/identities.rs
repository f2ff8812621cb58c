//! Eigenvector identities and inequalities for the `q × q` Harper matrix,
//! evaluated on real eigenpairs and on arbitrary unit vectors.
//!
//! All sums run over `m ∈ Z_N` with wrap-around: `X₋₁ = X_{N−1}` and
//! `X_N = X₀`. `N` is the vector length and must be a multiple of `q`, so the
//! coefficients `C_m = cos 2πmθ` are periodic on the index ring. Dropping the
//! wrap terms (`X₀X_{N−1}` and friends) is the usual way to break these checks.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::eigensolve::{EigenError, EigenPair};
use crate::fractions::{farey_sequence, Fraction};
use crate::operator::{build_harper, Twist};

/// Residual tolerance for identities on computed eigenpairs.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Slack for the inequality checks.
pub const INEQUALITY_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error("vector is not a unit vector (norm {0})")]
    NotUnit(f64),
    #[error("vector length {len} is not a positive multiple of q = {q}")]
    Length { len: usize, q: u64 },
    #[error("lambda = {0} outside (0, 2]")]
    LambdaRange(f64),
    #[error("spectral sums are undefined at lambda = 0")]
    UndefinedSums,
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

fn check_len(x: &[f64], theta: Fraction) -> Result<usize, IdentityError> {
    let n = x.len();
    if n == 0 || !(n as u64).is_multiple_of(theta.q()) {
        return Err(IdentityError::Length { len: n, q: theta.q() });
    }
    Ok(n)
}

fn check_unit(x: &[f64]) -> Result<(), IdentityError> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(IdentityError::NotUnit(norm));
    }
    Ok(())
}

/// `cos(kπθ)` / `sin(kπθ)` with `kp` reduced mod `2q` first.
fn trig_pi(theta: Fraction, k: i64) -> (f64, f64) {
    let q2 = 2 * theta.q() as i64;
    let r = (k * theta.p() as i64).rem_euclid(q2) as f64;
    let a = PI * r / theta.q() as f64;
    (a.cos(), a.sin())
}

fn c(theta: Fraction, m: usize) -> f64 {
    trig_pi(theta, 2 * m as i64).0
}

/// `Σ X_m X_{m−1} w(m)`, cyclic.
fn adjacent_sum(x: &[f64], w: impl Fn(usize) -> f64) -> f64 {
    let n = x.len();
    (0..n).map(|m| x[m] * x[(m + n - 1) % n] * w(m)).sum()
}

/// `Σ X_{m+1} X_{m−1}`, cyclic.
fn second_neighbour_sum(x: &[f64]) -> f64 {
    let n = x.len();
    (0..n).map(|m| x[(m + 1) % n] * x[(m + n - 1) % n]).sum()
}

fn weighted_square_sum(x: &[f64], w: impl Fn(usize) -> f64) -> f64 {
    x.iter().enumerate().map(|(m, v)| w(m) * v * v).sum()
}

/// `S` and `T` built from one eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSums {
    pub s: f64,
    pub t: f64,
    pub e: f64,
    pub theta: Fraction,
    pub lambda: f64,
}

impl SpectralSums {
    /// `S = E Σ C_m X_m² + (2/λ) Σ X_{m+1}X_{m−1}`,
    /// `T = λ Σ C_m² X_m² + (2/λ) Σ X_{m+1}X_{m−1}`.
    pub fn new(pair: &EigenPair, theta: Fraction, lambda: f64) -> Result<Self, IdentityError> {
        if lambda == 0.0 {
            return Err(IdentityError::UndefinedSums);
        }
        let x = &pair.vector;
        check_len(x, theta)?;
        let nn = second_neighbour_sum(x);
        let s = pair.value * weighted_square_sum(x, |m| c(theta, m)) + 2.0 / lambda * nn;
        let t = lambda * weighted_square_sum(x, |m| c(theta, m).powi(2)) + 2.0 / lambda * nn;
        Ok(SpectralSums {
            s,
            t,
            e: pair.value,
            theta,
            lambda,
        })
    }
}

/// `|Σ X_m X_{m−1} sin((2m − 1)πθ)|`; zero on real eigenvectors.
pub fn residual_sine(pair: &EigenPair, theta: Fraction) -> Result<f64, IdentityError> {
    check_len(&pair.vector, theta)?;
    Ok(adjacent_sum(&pair.vector, |m| trig_pi(theta, 2 * m as i64 - 1).1).abs())
}

/// `|Σ X_m X_{m−1} − (E/2 − (λ/2) Σ C_m X_m²)|`.
pub fn residual_adjacent(pair: &EigenPair, theta: Fraction, lambda: f64) -> Result<f64, IdentityError> {
    let x = &pair.vector;
    check_len(x, theta)?;
    let lhs = adjacent_sum(x, |_| 1.0);
    let rhs = pair.value / 2.0 - lambda / 2.0 * weighted_square_sum(x, |m| c(theta, m));
    Ok((lhs - rhs).abs())
}

/// `|2λ Σ X_m X_{m−1} C_m − (E² − λS − 2)|`.
pub fn residual_weighted(pair: &EigenPair, sums: &SpectralSums) -> Result<f64, IdentityError> {
    if sums.lambda == 0.0 {
        return Err(IdentityError::UndefinedSums);
    }
    let x = &pair.vector;
    check_len(x, sums.theta)?;
    let lhs = 2.0 * sums.lambda * adjacent_sum(x, |m| c(sums.theta, m));
    let rhs = sums.e * sums.e - sums.lambda * sums.s - 2.0;
    Ok((lhs - rhs).abs())
}

/// Residual of
/// `E² = 4 + λ² − Σ(X_{m+1} − X_{m−1} + λX_m sin 2mπθ)²
///       + 4λ(cos πθ − sin πθ) Σ X_m X_{m−1} cos((2m − 1)πθ)`.
pub fn residual_energy(pair: &EigenPair, theta: Fraction, lambda: f64) -> Result<f64, IdentityError> {
    let x = &pair.vector;
    let n = check_len(x, theta)?;
    let squares: f64 = (0..n)
        .map(|m| {
            let v = x[(m + 1) % n] - x[(m + n - 1) % n] + lambda * x[m] * trig_pi(theta, 2 * m as i64).1;
            v * v
        })
        .sum();
    let (cp, sp) = trig_pi(theta, 1);
    let cross = adjacent_sum(x, |m| trig_pi(theta, 2 * m as i64 - 1).0);
    let rhs = 4.0 + lambda * lambda - squares + 4.0 * lambda * (cp - sp) * cross;
    Ok((pair.value * pair.value - rhs).abs())
}

/// `(lhs, rhs)` with `lhs = |Σ X_m X_{m−1} cos((2m − 1)πθ)|` and
/// `rhs = ½√(2(1 + |cos 2πθ|))`.
pub fn check_cosine_sum(x: &[f64], theta: Fraction) -> Result<(f64, f64), IdentityError> {
    check_len(x, theta)?;
    check_unit(x)?;
    let lhs = adjacent_sum(x, |m| trig_pi(theta, 2 * m as i64 - 1).0).abs();
    let rhs = 0.5 * (2.0 * (1.0 + trig_pi(theta, 2).0.abs())).sqrt();
    Ok((lhs, rhs))
}

/// `(lhs, rhs)` with `lhs = 2Σ C_m² Y_m² + Σ Y_{m+1}Y_{m−1}` and
/// `rhs = 1 + √(2(1 + cos² 4πθ))`.
pub fn check_second_moment(y: &[f64], theta: Fraction) -> Result<(f64, f64), IdentityError> {
    check_len(y, theta)?;
    check_unit(y)?;
    let lhs = 2.0 * weighted_square_sum(y, |m| c(theta, m).powi(2)) + second_neighbour_sum(y);
    let c4 = trig_pi(theta, 4).0;
    Ok((lhs, 1.0 + (2.0 * (1.0 + c4 * c4)).sqrt()))
}

/// `(lhs, rhs)` with `lhs = λΣ C_m² Y_m² + (2/λ) Σ Y_{m+1}Y_{m−1}` and
/// `rhs = 2/λ + λ√((1 + cos² 4πθ)/2)`, for `0 < λ ≤ 2`.
pub fn check_scaled_moment(y: &[f64], theta: Fraction, lambda: f64) -> Result<(f64, f64), IdentityError> {
    if !(lambda > 0.0 && lambda <= 2.0) {
        return Err(IdentityError::LambdaRange(lambda));
    }
    check_len(y, theta)?;
    check_unit(y)?;
    let lhs = lambda * weighted_square_sum(y, |m| c(theta, m).powi(2)) + 2.0 / lambda * second_neighbour_sum(y);
    let c4 = trig_pi(theta, 4).0;
    Ok((lhs, 2.0 / lambda + lambda * ((1.0 + c4 * c4) / 2.0).sqrt()))
}

/// Gaussian direction normalised to the unit sphere.
pub fn random_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Parameters of [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Residuals cover every reduced `p/q ∈ [0, 1]` with `q ≤ residual_q_max`.
    pub residual_q_max: u64,
    pub lambdas: Vec<f64>,
    /// Number of Farey points in `[0, 1/2]` used for the inequality cells.
    pub inequality_points: usize,
    pub vectors_per_cell: usize,
    /// `λ` values for the scaled-moment check; each must lie in `(0, 2]`.
    pub cor_lambdas: Vec<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            residual_q_max: 40,
            lambdas: vec![0.5, 1.0, 2.0, 3.0],
            inequality_points: 50,
            vectors_per_cell: 10_000,
            cor_lambdas: vec![0.01, 0.5, 1.0, 2.0],
        }
    }
}

/// Worst values seen by [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub eigenpairs: usize,
    /// Extra vectors drawn at random inside degenerate eigenspaces.
    pub mixed_pairs: usize,
    pub max_residual_sine: f64,
    pub max_residual_adjacent: f64,
    pub max_residual_weighted: f64,
    pub max_residual_energy: f64,
    pub inequality_cells: usize,
    pub vectors_checked: usize,
    /// Largest `lhs − rhs` per inequality (negative means slack).
    pub worst_cosine_sum: f64,
    pub worst_second_moment: f64,
    pub worst_scaled_moment: f64,
    pub violations: usize,
}

impl SuiteReport {
    pub fn max_residual(&self) -> f64 {
        self.max_residual_sine
            .max(self.max_residual_adjacent)
            .max(self.max_residual_weighted)
            .max(self.max_residual_energy)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= RESIDUAL_TOL && self.violations == 0
    }
}

/// Fixed per-cell seed so results do not depend on scheduling.
fn cell_seed(seed: u64, cell: u64) -> u64 {
    seed ^ cell.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Eigenvalues closer than this are treated as one eigenspace when mixing.
/// Mixing across a real gap `δ` leaves an eigen-residual of order `δ`, which
/// the identities amplify by up to `1/(λ sin πθ)`; genuine gaps at `q ≤ 40`
/// go down to about `2e−14`.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Eigenvalue clusters (`|ΔE| ≤ DEGENERACY_TOL`) of size ≥ 2 get one random
/// combination of their eigenvectors added.
fn mix_degenerate<R: rand::Rng>(pairs: &[EigenPair], rng: &mut R) -> Vec<EigenPair> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].value - pairs[end - 1].value <= DEGENERACY_TOL {
            end += 1;
        }
        if end - start >= 2 {
            let coef = random_unit_vector(rng, end - start);
            let n = pairs[start].vector.len();
            let mut v = vec![0.0; n];
            for (k, p) in pairs[start..end].iter().enumerate() {
                for (vi, xi) in v.iter_mut().zip(&p.vector) {
                    *vi += coef[k] * xi;
                }
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            let value = pairs[start..end].iter().map(|p| p.value).sum::<f64>() / (end - start) as f64;
            out.push(EigenPair {
                value,
                vector: v,
                residual: f64::NAN,
            });
        }
        start = end;
    }
    out
}

fn residuals(pair: &EigenPair, theta: Fraction, lambda: f64) -> Result<[f64; 4], IdentityError> {
    let rw = if lambda == 0.0 {
        0.0
    } else {
        residual_weighted(pair, &SpectralSums::new(pair, theta, lambda)?)?
    };
    Ok([
        residual_sine(pair, theta)?,
        residual_adjacent(pair, theta, lambda)?,
        rw,
        residual_energy(pair, theta, lambda)?,
    ])
}

/// First `count` reduced fractions of `[0, 1/2]` in Farey order, taking the
/// smallest order that has enough of them.
pub fn farey_points(count: usize) -> Vec<Fraction> {
    let mut n = 1;
    loop {
        let f = farey_sequence(n, Fraction::ZERO, Fraction::HALF).expect("valid interval");
        if f.len() >= count {
            return f.into_iter().take(count).collect();
        }
        n += 1;
    }
}

/// Runs every identity on every eigenpair and every inequality on seeded
/// random unit vectors.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, IdentityError> {
    for &l in &config.cor_lambdas {
        if !(l > 0.0 && l <= 2.0) {
            return Err(IdentityError::LambdaRange(l));
        }
    }
    let fractions =
        farey_sequence(config.residual_q_max.max(1), Fraction::ZERO, Fraction::ONE).expect("valid interval");
    let cells: Vec<(u64, Fraction, f64)> = fractions
        .iter()
        .flat_map(|&f| config.lambdas.iter().map(move |&l| (f, l)))
        .enumerate()
        .map(|(i, (f, l))| (i as u64, f, l))
        .collect();

    let per_matrix = cells
        .par_iter()
        .map(
            |&(i, theta, lambda)| -> Result<(usize, usize, [f64; 4]), IdentityError> {
                let pairs = build_harper(theta, lambda, Twist::TRIVIAL).eigenpairs()?;
                let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(config.seed, i));
                let mixed = mix_degenerate(&pairs, &mut rng);
                let mut worst = [0.0f64; 4];
                for p in pairs.iter().chain(&mixed) {
                    for (w, r) in worst.iter_mut().zip(residuals(p, theta, lambda)?) {
                        *w = w.max(r);
                    }
                }
                Ok((pairs.len(), mixed.len(), worst))
            },
        )
        .collect::<Result<Vec<_>, _>>()?;

    let points = farey_points(config.inequality_points);
    let per_cell = points
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| -> Result<(usize, [f64; 3], usize), IdentityError> {
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(!config.seed, i as u64));
            let q = theta.q() as usize;
            let mut worst = [f64::NEG_INFINITY; 3];
            let mut bad = 0;
            for _ in 0..config.vectors_per_cell {
                let v = random_unit_vector(&mut rng, q);
                let mut gaps = vec![
                    {
                        let (l, r) = check_cosine_sum(&v, theta)?;
                        (0, l - r)
                    },
                    {
                        let (l, r) = check_second_moment(&v, theta)?;
                        (1, l - r)
                    },
                ];
                for &lam in &config.cor_lambdas {
                    let (l, r) = check_scaled_moment(&v, theta, lam)?;
                    gaps.push((2, l - r));
                }
                for (k, g) in gaps {
                    worst[k] = worst[k].max(g);
                    if g > INEQUALITY_TOL {
                        bad += 1;
                    }
                }
            }
            Ok((config.vectors_per_cell, worst, bad))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut report = SuiteReport {
        config: config.clone(),
        eigenpairs: 0,
        mixed_pairs: 0,
        max_residual_sine: 0.0,
        max_residual_adjacent: 0.0,
        max_residual_weighted: 0.0,
        max_residual_energy: 0.0,
        inequality_cells: points.len(),
        vectors_checked: 0,
        worst_cosine_sum: f64::NEG_INFINITY,
        worst_second_moment: f64::NEG_INFINITY,
        worst_scaled_moment: f64::NEG_INFINITY,
        violations: 0,
    };
    for (n, mixed, w) in per_matrix {
        report.eigenpairs += n;
        report.mixed_pairs += mixed;
        report.max_residual_sine = report.max_residual_sine.max(w[0]);
        report.max_residual_adjacent = report.max_residual_adjacent.max(w[1]);
        report.max_residual_weighted = report.max_residual_weighted.max(w[2]);
        report.max_residual_energy = report.max_residual_energy.max(w[3]);
    }
    for (n, w, bad) in per_cell {
        report.vectors_checked += n;
        report.worst_cosine_sum = report.worst_cosine_sum.max(w[0]);
        report.worst_second_moment = report.worst_second_moment.max(w[1]);
        report.worst_scaled_moment = report.worst_scaled_moment.max(w[2]);
        report.violations += bad;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, q: u64) -> Fraction {
        Fraction::new(p, q).unwrap()
    }

    fn pairs(theta: Fraction, lambda: f64) -> Vec<EigenPair> {
        build_harper(theta, lambda, Twist::TRIVIAL).eigenpairs().unwrap()
    }

    #[test]
    fn residual_examples() {
        for (t, l) in [(f(1, 3), 2.0), (f(2, 5), 1.0)] {
            for p in pairs(t, l) {
                assert!(residual_sine(&p, t).unwrap() <= 1e-8);
            }
        }
        for (t, l) in [(f(1, 3), 2.0), (f(1, 2), 3.0), (f(3, 7), 0.5)] {
            for p in pairs(t, l) {
                assert!(residual_adjacent(&p, t, l).unwrap() <= 1e-8);
            }
        }
        for (t, l) in [(f(1, 3), 2.0), (f(2, 5), 2.0), (f(1, 4), 1.0)] {
            for p in pairs(t, l) {
                let s = SpectralSums::new(&p, t, l).unwrap();
                assert!(residual_weighted(&p, &s).unwrap() <= 1e-8);
            }
        }
        for (t, l) in [(f(1, 3), 2.0), (f(1, 5), 2.0), (f(2, 5), 3.0)] {
            for p in pairs(t, l) {
                assert!(residual_energy(&p, t, l).unwrap() <= 1e-8);
            }
        }
    }

    #[test]
    fn negative_control_has_power() {
        let t = f(1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut hits = 0;
        for _ in 0..100 {
            let v = random_unit_vector(&mut rng, 3);
            let p = EigenPair {
                value: 0.0,
                vector: v,
                residual: 0.0,
            };
            if residual_sine(&p, t).unwrap() > 1e-3 {
                hits += 1;
            }
        }
        assert!(hits > 90);
    }

    #[test]
    fn sums_need_nonzero_lambda() {
        let p = &pairs(f(1, 3), 2.0)[0];
        assert_eq!(SpectralSums::new(p, f(1, 3), 0.0), Err(IdentityError::UndefinedSums));
        let a = SpectralSums::new(p, f(1, 3), 2.0).unwrap();
        let b = SpectralSums::new(p, f(1, 3), 2.0).unwrap();
        assert_eq!(a.s.to_bits(), b.s.to_bits());
        assert_eq!(a.t.to_bits(), b.t.to_bits());
    }

    #[test]
    fn cosine_sum_examples() {
        let v = [0.5, 0.5, 0.5, 0.5];
        let (_, rhs) = check_cosine_sum(&v, f(1, 4)).unwrap();
        assert!((rhs - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let e = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        assert_eq!(check_cosine_sum(&e, f(1, 3)).unwrap().0, 0.0);
        assert!(matches!(
            check_cosine_sum(&[1.0, 1.0, 0.0], f(1, 3)),
            Err(IdentityError::NotUnit(_))
        ));
        assert!(matches!(
            check_cosine_sum(&[1.0, 0.0], f(1, 3)),
            Err(IdentityError::Length { .. })
        ));
    }

    #[test]
    fn second_moment_examples() {
        let mut e = vec![0.0; 4];
        e[0] = 1.0;
        let (l, r) = check_second_moment(&e, f(1, 4)).unwrap();
        assert!((l - 2.0).abs() < 1e-15 && (r - 3.0).abs() < 1e-15);
        let u = vec![1.0 / 3f64.sqrt(); 3];
        let (l, r) = check_second_moment(&u, f(1, 3)).unwrap();
        // 2·(1 + ¼ + ¼)/3 + 1
        assert!((l - 2.0).abs() < 1e-14);
        assert!(l <= r);
    }

    #[test]
    fn scaled_moment_range_and_reduction() {
        let u = vec![0.5; 4];
        assert_eq!(
            check_scaled_moment(&u, f(1, 4), 0.0),
            Err(IdentityError::LambdaRange(0.0))
        );
        assert_eq!(
            check_scaled_moment(&u, f(1, 4), 2.5),
            Err(IdentityError::LambdaRange(2.5))
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = f(2, 5);
        for _ in 0..100 {
            let v = random_unit_vector(&mut rng, 10);
            let (l2, r2) = check_scaled_moment(&v, t, 2.0).unwrap();
            let (l, r) = check_second_moment(&v, t).unwrap();
            // at λ = 2 the scaled check equals the unscaled one
            assert!((l2 - l).abs() < 1e-14 && (r2 - r).abs() < 1e-14);
        }
        let (l, r) = check_scaled_moment(&u, f(1, 4), 0.01).unwrap();
        assert!(l <= r);
    }

    #[test]
    fn wraparound_terms_matter() {
        // θ = 1/3 eigenvector: dropping X₀X₂ from Σ X_m X_{m−1} breaks the adjacent-sum identity
        let t = f(1, 3);
        let p = &pairs(t, 2.0)[2];
        let x = &p.vector;
        let open: f64 = (1..3).map(|m| x[m] * x[m - 1]).sum();
        let rhs = p.value / 2.0 - weighted_square_sum(x, |m| c(t, m));
        assert!((open - rhs).abs() > 1e-3);
        assert!(residual_adjacent(p, t, 2.0).unwrap() < 1e-12);
    }

    #[test]
    fn small_suite_passes() {
        let cfg = SuiteConfig {
            residual_q_max: 12,
            inequality_points: 10,
            vectors_per_cell: 200,
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.mixed_pairs > 0);
        assert_eq!(r, run_suite(&cfg).unwrap());
    }
}
