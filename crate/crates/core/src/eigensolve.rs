//! Dense real symmetric eigensolver (cyclic Jacobi rotations).
//!
//! Sized for the `q × q` matrices of this crate (`q` up to a few thousand at
//! most); every sweep costs `O(q³)`.

use thiserror::Error;

/// Target for the off-diagonal Frobenius norm.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Hard cap on cyclic sweeps.
pub const MAX_SWEEPS: usize = 40;
/// Entrywise symmetry tolerance accepted on input.
pub const SYMMETRY_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps \
         (n = {n}, off-diagonal norm {off_norm:e}, matrix fingerprint {fingerprint:016x})"
    )]
    NoConvergence {
        sweeps: usize,
        n: usize,
        off_norm: f64,
        fingerprint: u64,
    },
}

/// Dense square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        SymMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// FNV-1a over the entry bit patterns; identifies a matrix in error reports.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in (self.n as u64)
            .to_le_bytes()
            .into_iter()
            .chain(self.data.iter().flat_map(|v| v.to_bits().to_le_bytes()))
        {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h
    }

    fn check(&self) -> Result<(), EigenError> {
        for i in 0..self.n {
            for j in 0..self.n {
                if !self[(i, j)].is_finite() {
                    return Err(EigenError::NonFinite { row: i, col: j });
                }
            }
            for j in i + 1..self.n {
                let diff = (self[(i, j)] - self[(j, i)]).abs();
                if diff > SYMMETRY_TOL {
                    return Err(EigenError::NotSymmetric { row: i, col: j, diff });
                }
            }
        }
        Ok(())
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                s += self[(i, j)] * self[(i, j)];
            }
        }
        (2.0 * s).sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SymMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalue `value` with unit eigenvector `vector`; `residual` is `‖A·x − value·x‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Runs cyclic Jacobi on a symmetrised copy of `a`. Returns the diagonal and,
/// when requested, the accumulated rotations (columns are eigenvectors).
fn jacobi(a: &SymMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<SymMatrix>), EigenError> {
    a.check()?;
    let n = a.n;
    let mut m = a.clone();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut v = want_vectors.then(|| SymMatrix::identity(n));

    let mut polished = false;
    for sweep in 0..=MAX_SWEEPS {
        let off = m.off_diagonal_norm();
        if off == 0.0 || (off <= OFF_DIAGONAL_TOL && polished) {
            let diag = (0..n).map(|i| m[(i, i)]).collect();
            return Ok((diag, v));
        }
        if sweep == MAX_SWEEPS {
            return Err(EigenError::NoConvergence {
                sweeps: MAX_SWEEPS,
                n,
                off_norm: off,
                fingerprint: a.fingerprint(),
            });
        }
        if off <= OFF_DIAGONAL_TOL {
            polished = true;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (m[(p, p)], m[(q, q)]);
                // entries far below both diagonal ulps are flushed
                if sweep > 3 && app.abs() + 1e3 * apq.abs() == app.abs() && aqq.abs() + 1e3 * apq.abs() == aqq.abs() {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, p, q, c, s);
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    unreachable!("loop returns on the final sweep")
}

/// Applies `Jᵀ·M·J` for the rotation in plane `(p, q)` to every entry outside
/// the `(p, q)` 2×2 block.
fn rotate(m: &mut SymMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.n;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
        let new_kp = c * mkp - s * mkq;
        let new_kq = s * mkp + c * mkq;
        m[(k, p)] = new_kp;
        m[(p, k)] = new_kp;
        m[(k, q)] = new_kq;
        m[(q, k)] = new_kq;
    }
}

/// All eigenpairs of a symmetric matrix, ascending by value.
///
/// Each eigenvector is normalised and its first nonzero component made
/// positive, so results are reproducible.
pub fn eigen_sym(a: &SymMatrix) -> Result<Vec<EigenPair>, EigenError> {
    let n = a.n;
    let (diag, v) = jacobi(a, true)?;
    let v = v.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let pairs = order
        .into_iter()
        .map(|j| {
            let mut x: Vec<f64> = (0..n).map(|k| v[(k, j)]).collect();
            let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            let lead = x.iter().copied().find(|c| c.abs() > 1e-14).unwrap_or(1.0);
            let scale = lead.signum() / norm;
            x.iter_mut().for_each(|c| *c *= scale);
            let value = diag[j];
            let ax = a.mul_vec(&x);
            let residual = ax
                .iter()
                .zip(&x)
                .map(|(l, r)| (l - value * r).powi(2))
                .sum::<f64>()
                .sqrt();
            EigenPair {
                value,
                vector: x,
                residual,
            }
        })
        .collect();
    Ok(pairs)
}

/// Eigenvalues only, ascending. Skips eigenvector accumulation.
pub fn eigenvalues_sym(a: &SymMatrix) -> Result<Vec<f64>, EigenError> {
    let (mut diag, _) = jacobi(a, false)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// `max |λ|` over the spectrum.
pub fn spectral_norm(a: &SymMatrix) -> Result<f64, EigenError> {
    let vals = eigenvalues_sym(a)?;
    Ok(norm_of_sorted(&vals))
}

pub(crate) fn norm_of_sorted(vals: &[f64]) -> f64 {
    match (vals.first(), vals.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}
