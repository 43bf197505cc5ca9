//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::ToleranceProfile;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(self.vectors.rows(), self.vectors.rows());
        for k in 0..n {
            if fv[k] == 0.0 {
                continue;
            }
            let col = self.vectors.column(k);
            for i in 0..col.len() {
                let a = col[i] * fv[k];
                for j in 0..col.len() {
                    out[(i, j)] += a * col[j].conj();
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must satisfy `max|A - A*| <= herm_tol * (1 + max|A|)`; its
/// Hermitian part is what gets diagonalized.
pub fn herm_eig(a: &CMatrix, tol: &ToleranceProfile) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let defect = a.hermitian_defect();
    let allowed = tol.herm_tol * (1.0 + a.max_abs());
    if defect > allowed {
        return Err(Error::NonHermitian {
            defect,
            tol: allowed,
        });
    }
    jacobi(a.hermitian_part())
}

fn off_diagonal_sqr(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi(mut a: CMatrix) -> Result<EigenDecomposition> {
    let n = a.rows();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm_sqr();
    // relative stopping criterion on the squared off-diagonal mass
    let stop = (4.0 * f64::EPSILON).powi(2) * scale.max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    let mut previous = f64::INFINITY;
    loop {
        let off = off_diagonal_sqr(&a);
        if off <= stop || off == 0.0 {
            break;
        }
        // rounding floor reached
        if off >= previous && off <= 1e-24 * scale {
            break;
        }
        previous = off;
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off.sqrt(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Zeroes `a[p][q]` with the unitary `J = diag(1, e^{-iφ}) · R(θ)` acting on
/// coordinates `p, q`, updating `a <- J* a J` and `v <- v J`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = a.rows();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip rotations that cannot change the diagonal in floating point
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = phase.conj();
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = e * (-s);
    let jqq = e * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, SplitMix64};

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = herm_eig(&CMatrix::identity(3), &tol()).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted_with_permutation_vectors() {
        let e = herm_eig(&CMatrix::from_real_diag(&[3.0, 1.0, 2.0]), &tol()).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        // eigenvector for 1 is e_1, for 2 is e_2, for 3 is e_0
        assert_eq!(e.vectors[(1, 0)].norm(), 1.0);
        assert_eq!(e.vectors[(2, 1)].norm(), 1.0);
        assert_eq!(e.vectors[(0, 2)].norm(), 1.0);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = SplitMix64::new(11);
        for n in [1, 2, 5, 6, 13] {
            let a = random_hermitian(&mut rng, n);
            let e = herm_eig(&a, &tol()).unwrap();
            let resid = (&a - &e.reconstruct()).frobenius_norm();
            assert!(resid < 1e-10 * (1.0 + a.frobenius_norm()), "n={n} resid={resid}");
            let gram = e.vectors.adjoint_mul(&e.vectors);
            assert!((&gram - &CMatrix::identity(n)).max_abs() < 1e-12);
            let av = a.matmul(&e.vectors);
            let vl = e.vectors.matmul(&CMatrix::from_real_diag(&e.values));
            assert!((&av - &vl).frobenius_norm() <= 1e-9 * a.frobenius_norm());
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn deterministic_for_fixed_input() {
        let mut rng = SplitMix64::new(3);
        let a = random_hermitian(&mut rng, 7);
        let e1 = herm_eig(&a, &tol()).unwrap();
        let e2 = herm_eig(&a, &tol()).unwrap();
        assert_eq!(e1.values, e2.values);
        assert_eq!(e1.vectors, e2.vectors);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut a = CMatrix::identity(2);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(herm_eig(&a, &tol()), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn degenerate_spectrum() {
        // projection of rank 2 in a random basis
        let mut rng = SplitMix64::new(5);
        let u = crate::random::random_unitary(&mut rng, 4);
        let d = CMatrix::from_real_diag(&[1.0, 1.0, 0.0, 0.0]);
        let p = u.matmul(&d).mul_adjoint(&u);
        let e = herm_eig(&p, &tol()).unwrap();
        for (got, want) in e.values.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }
}
