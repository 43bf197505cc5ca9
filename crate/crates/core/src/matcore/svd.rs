//! Singular value and polar decompositions.
//!
//! The SVD uses one-sided (Hestenes) Jacobi orthogonalization of the columns,
//! which never forms `S*S` and so keeps small singular values accurate.

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::ToleranceProfile;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `S = left · diag(singulars) · right*` with `r = min(rows, cols)`
/// columns in each factor and singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left: CMatrix,
    pub singulars: Vec<f64>,
    pub right: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let mut ls = self.left.clone();
        for j in 0..self.singulars.len() {
            for i in 0..ls.rows() {
                ls[(i, j)] *= self.singulars[j];
            }
        }
        ls.mul_adjoint(&self.right)
    }

    /// `Σ_{f(σ_i) != 0} f(σ_i) · l_i r_i*`.
    pub fn map_singulars(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut out = CMatrix::zeros(self.left.rows(), self.right.rows());
        for (k, &s) in self.singulars.iter().enumerate() {
            let w = f(s);
            if w == 0.0 {
                continue;
            }
            for i in 0..out.rows() {
                let l = self.left[(i, k)] * w;
                if l == ZERO {
                    continue;
                }
                for j in 0..out.cols() {
                    out[(i, j)] += l * self.right[(j, k)].conj();
                }
            }
        }
        out
    }
}

pub fn svd(s: &CMatrix) -> Result<Svd> {
    let (m, n) = (s.rows(), s.cols());
    if m < n {
        // work on the adjoint so the column count is the small side
        let t = svd(&s.adjoint())?;
        return Ok(Svd {
            left: t.right,
            singulars: t.singulars,
            right: t.left,
        });
    }
    let mut work = s.clone();
    let mut v = CMatrix::identity(n);
    let stop = 4.0 * f64::EPSILON;
    // columns this small end up below `negligible` and are replaced anyway
    let floor = (f64::EPSILON * s.frobenius_norm()).powi(2);

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for i in 0..m {
                    let a = work[(i, p)];
                    let b = work[(i, q)];
                    alpha += a.norm_sqr();
                    beta += b.norm_sqr();
                    gamma += a.conj() * b;
                }
                let g = gamma.norm();
                let scale = alpha.sqrt() * beta.sqrt();
                if g == 0.0 || g <= stop * scale || alpha.min(beta) <= floor {
                    continue;
                }
                worst = worst.max(g / scale);
                rotated = true;
                let phase = gamma / g;
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                let e = phase.conj();
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(sn, 0.0);
                let jqp = e * (-sn);
                let jqq = e * c;
                for i in 0..m {
                    let a = work[(i, p)];
                    let b = work[(i, q)];
                    work[(i, p)] = a * jpp + b * jqp;
                    work[(i, q)] = a * jpq + b * jqq;
                }
                for i in 0..n {
                    let a = v[(i, p)];
                    let b = v[(i, q)];
                    v[(i, p)] = a * jpp + b * jqp;
                    v[(i, q)] = a * jpq + b * jqq;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: worst,
            });
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| work[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let sigma_max = norms.iter().cloned().fold(0.0, f64::max);
    let negligible = sigma_max * f64::EPSILON * (m.max(n) as f64);
    let mut left_cols: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(n);
    let mut singulars = Vec::with_capacity(n);
    let mut right = CMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        singulars.push(sigma);
        right.set_column(k, &v.column(j));
        if sigma > negligible && sigma > 0.0 {
            left_cols.push(Some((0..m).map(|i| work[(i, j)] / sigma).collect()));
        } else {
            left_cols.push(None);
        }
    }
    let left = complete_orthonormal(m, left_cols);
    Ok(Svd {
        left,
        singulars,
        right,
    })
}

/// Fills missing columns with standard basis vectors orthogonalized against
/// everything already present.
fn complete_orthonormal(m: usize, cols: Vec<Option<Vec<Complex64>>>) -> CMatrix {
    let mut have: Vec<Vec<Complex64>> = cols.iter().flatten().cloned().collect();
    let mut out = CMatrix::zeros(m, cols.len());
    let mut basis = 0;
    for (k, c) in cols.into_iter().enumerate() {
        let col = match c {
            Some(c) => c,
            None => loop {
                let mut e = vec![ZERO; m];
                e[basis % m] = Complex64::new(1.0, 0.0);
                basis += 1;
                for _ in 0..2 {
                    for q in &have {
                        let proj: Complex64 = q.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
                        for (x, y) in e.iter_mut().zip(q) {
                            *x -= proj * y;
                        }
                    }
                }
                let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm > 1e-6 {
                    let e: Vec<Complex64> = e.into_iter().map(|z| z / norm).collect();
                    have.push(e.clone());
                    break e;
                }
            },
        };
        out.set_column(k, &col);
    }
    out
}

pub fn singular_values(s: &CMatrix) -> Result<Vec<f64>> {
    Ok(svd(s)?.singulars)
}

/// Largest singular value. Falls back to the Frobenius norm if the SVD
/// fails to converge, which only happens on non-finite input.
pub fn operator_norm(s: &CMatrix) -> f64 {
    match svd(s) {
        Ok(d) => d.singulars.first().copied().unwrap_or(0.0),
        Err(_) => s.frobenius_norm(),
    }
}

/// Polar decomposition `S = W |S|` of a square matrix.
#[derive(Debug, Clone)]
pub struct PolarParts {
    /// Partial isometry with `W*W` the support projection of `|S|`.
    pub isometry_part: CMatrix,
    /// Positive semidefinite `|S| = (S*S)^{1/2}`.
    pub modulus: CMatrix,
}

pub fn polar(s: &CMatrix, tol: &ToleranceProfile) -> Result<PolarParts> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "polar decomposition of a {}x{} matrix",
            s.rows(),
            s.cols()
        )));
    }
    let d = svd(s)?;
    let cut = tol.rank_tol * d.singulars.first().copied().unwrap_or(0.0);
    let isometry_part = d.map_singulars(|x| if x > cut { 1.0 } else { 0.0 });
    let modulus = CMatrix::from_fn(s.cols(), s.cols(), |i, j| {
        (0..d.singulars.len())
            .map(|k| d.right[(i, k)] * d.singulars[k] * d.right[(j, k)].conj())
            .sum()
    });
    Ok(PolarParts {
        isometry_part,
        modulus,
    })
}

/// Replaces the singular values of `s` by `1` where they lie in
/// `[1/2 - tie_tol, ∞)` and by `0` elsewhere. Equal to `W·χ_{[1/2,1]}(|S|)`
/// for `W|S|` the polar decomposition (and to `χ_{[1/2,1]}(|S*|)·W`).
pub fn round_partial_isometry(s: &CMatrix, tol: &ToleranceProfile) -> Result<CMatrix> {
    let d = svd(s)?;
    Ok(d.map_singulars(|x| if x >= 0.5 - tol.tie_tol { 1.0 } else { 0.0 }))
}
