//! Positive definite maps on finite groups and their dilations to genuine
//! unitary representations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupMap};
use crate::matcore::{herm_eig, operator_norm, polar, CMatrix, Complex64, ONE};
use crate::tolerance::ToleranceProfile;

/// `x -> E_y phi(xy) phi(y)*`.
pub fn tilde(phi: &GroupMap) -> GroupMap {
    let g = phi.group();
    let k = g.order();
    let n = phi.dim();
    let values = (0..k)
        .map(|x| {
            let mut acc = CMatrix::zeros(n, n);
            for y in 0..k {
                acc.add_assign_scaled(&phi.at(g.mul(x, y)).mul_adjoint(phi.at(y)), ONE);
            }
            acc.scale_real(1.0 / k as f64)
        })
        .collect();
    GroupMap::new(phi.group_arc().clone(), values).expect("same shape as phi")
}

/// Block matrix with block `(a, b) = psi(a b^-1)`.
pub fn gram_left(psi: &GroupMap) -> CMatrix {
    let g = psi.group();
    block_matrix(psi, |a, b| g.mul(a, g.inv(b)))
}

/// Block matrix with block `(a, b) = psi(a^-1 b)`; this is the form of the
/// inner product `<f, h> = sum_{x,y} <psi(y^-1 x) f(x), h(y)>`.
pub fn gram_right(psi: &GroupMap) -> CMatrix {
    let g = psi.group();
    block_matrix(psi, |a, b| g.mul(g.inv(a), b))
}

fn block_matrix(psi: &GroupMap, index: impl Fn(usize, usize) -> usize) -> CMatrix {
    let k = psi.group().order();
    let n = psi.dim();
    CMatrix::from_fn(k * n, k * n, |i, j| psi.at(index(i / n, j / n))[(i % n, j % n)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub positive: bool,
    /// Smallest eigenvalue of the `psi(x y^-1)` Gram matrix.
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue of the `psi(y^-1 x)` Gram matrix.
    pub min_eigenvalue_right: f64,
}

/// Checks both Gram conventions and requires them to agree.
///
/// The two block matrices are conjugate under the permutation `x -> x^-1`,
/// so they disagree only through rounding; a non-Hermitian Gram matrix means
/// `psi(g^-1) != psi(g)*` and is reported as a convention mismatch.
pub fn is_positive_definite(psi: &GroupMap, tol: &ToleranceProfile) -> Result<PositivityReport> {
    let left = gram_left(psi);
    let right = gram_right(psi);
    let mut mins = [0.0; 2];
    for (slot, gram) in mins.iter_mut().zip([&left, &right]) {
        let defect = gram.hermitian_defect();
        if defect > tol.herm_tol * (1.0 + gram.max_abs()) {
            return Err(Error::ConventionMismatch(format!(
                "Gram matrix is not Hermitian (defect {defect:e}); psi(g^-1) != psi(g)*"
            )));
        }
        *slot = if gram.rows() == 0 {
            0.0
        } else {
            herm_eig(gram, tol)?.min_value()
        };
    }
    let verdict = |m: f64| m >= -tol.pd_tol;
    if verdict(mins[0]) != verdict(mins[1]) {
        return Err(Error::ConventionMismatch(format!(
            "min eigenvalues {:e} and {:e} straddle -pd_tol",
            mins[0], mins[1]
        )));
    }
    Ok(PositivityReport {
        positive: verdict(mins[0]),
        min_eigenvalue: mins[0],
        min_eigenvalue_right: mins[1],
    })
}

/// `max_g ||L_g* K L_g - K||_F` for the right Gram matrix `K`.
pub fn gram_translation_defect(psi: &GroupMap) -> f64 {
    let g = psi.group();
    let n = psi.dim();
    let k = gram_right(psi);
    let dim = k.rows();
    let mut worst: f64 = 0.0;
    for h in g.elements() {
        // (L_h* K L_h) at block (a, b) is K at block (h a, h b)
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let ti = g.mul(h, i / n) * n + i % n;
                let tj = g.mul(h, j / n) * n + j % n;
                acc += (k[(ti, tj)] - k[(i, j)]).norm_sqr();
            }
        }
        worst = worst.max(acc.sqrt());
    }
    worst
}

/// A unitary representation `pi` on `C^m` and `U: C^n -> C^m` with
/// `psi(g) = U* pi(g) U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationResult {
    pub pi: GroupMap,
    pub u: CMatrix,
    pub m: usize,
    /// Retained Gram eigenvalues, ascending.
    pub gram_spectrum: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationCheck {
    /// `max_g ||psi(g) - U* pi(g) U||_F`
    pub reconstruction: f64,
    /// `max_g ||pi(g)* pi(g) - 1||_op`
    pub unitarity: f64,
    /// `max_{g,h} ||pi(gh) - pi(g) pi(h)||_op`
    pub multiplicativity: f64,
    /// `| ||U||_op^2 - ||psi(e)||_op |`
    pub norm_identity: f64,
}

impl DilationCheck {
    pub fn worst(&self) -> f64 {
        self.reconstruction
            .max(self.unitarity)
            .max(self.multiplicativity)
            .max(self.norm_identity)
    }
}

impl DilationResult {
    pub fn verify(&self, psi: &GroupMap) -> DilationCheck {
        let g = psi.group();
        let reconstruction = g
            .elements()
            .map(|x| {
                let back = self.u.adjoint_mul(&self.pi.at(x).matmul(&self.u));
                back.frobenius_distance(psi.at(x))
            })
            .fold(0.0, f64::max);
        let (unitarity, multiplicativity) = if self.m == 0 {
            (0.0, 0.0)
        } else {
            (self.pi.unitarity_defect(), self.pi.multiplicativity_residual())
        };
        let u_norm = if self.m == 0 { 0.0 } else { operator_norm(&self.u) };
        let norm_identity = (u_norm * u_norm - operator_norm(psi.at(g.identity()))).abs();
        DilationCheck {
            reconstruction,
            unitarity,
            multiplicativity,
            norm_identity,
        }
    }
}

/// Dilation built from the eigendecomposition of the right Gram matrix.
pub fn stinespring(psi: &GroupMap, tol: &ToleranceProfile) -> Result<DilationResult> {
    let pd = is_positive_definite(psi, tol)?;
    if !pd.positive {
        return Err(Error::NotPositiveDefinite {
            min_eig: pd.min_eigenvalue,
        });
    }
    let group: Arc<FiniteGroup> = psi.group_arc().clone();
    let g = &*group;
    let k = g.order();
    let n = psi.dim();
    let gram = gram_right(psi);
    let eig = herm_eig(&gram, tol)?;
    let top = eig.max_value();
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&i| top > 0.0 && eig.values[i] > tol.dilation_rank_tol * top)
        .collect();
    let m = keep.len();
    let dim = k * n;

    // B = L^{1/2} W*  (m x kn) with W the retained eigenvectors
    let b = CMatrix::from_fn(m, dim, |r, c| {
        let i = keep[r];
        eig.vectors[(c, i)].conj() * eig.values[i].sqrt()
    });
    let w = CMatrix::from_fn(dim, m, |r, c| eig.vectors[(r, keep[c])]);

    // pi(h) = B L_h B+ with B+ = W L^{-1/2}. L_h commutes with the Gram
    // matrix, so this equals W* L_h W, which avoids dividing by small
    // eigenvalues. Column block c of W* L_h is column block h c of W*.
    let w_star = w.adjoint();
    let pi_values = g
        .elements()
        .map(|h| {
            let wl = CMatrix::from_fn(m, dim, |r, c| w_star[(r, g.mul(h, c / n) * n + c % n)]);
            wl.matmul(&w)
        })
        .collect();
    let pi = GroupMap::new(group.clone(), pi_values)?;
    let e = g.identity();
    let u = CMatrix::from_fn(m, n, |r, c| b[(r, e * n + c)]);
    let gram_spectrum = keep.iter().map(|&i| eig.values[i]).collect();
    Ok(DilationResult {
        pi,
        u,
        m,
        gram_spectrum,
    })
}

/// Writes a contraction `S` in the `(P, Q)` corner as the average of two
/// partial isometries `W V+` and `W V-`, where `S = W|S|` and
/// `V+- = |S| +- i sqrt(Q - |S|^2)`.
pub fn split_partial_isometries(
    s: &CMatrix,
    p: &CMatrix,
    q: &CMatrix,
    tol: &ToleranceProfile,
) -> Result<(CMatrix, CMatrix)> {
    let residual = p.matmul(s).matmul(q).frobenius_distance(s);
    if residual > 1e-8 * (1.0 + s.frobenius_norm()) {
        return Err(Error::CornerViolation { residual });
    }
    let norm = operator_norm(s);
    if norm > 1.0 + 1e-9 {
        return Err(Error::NotContraction { norm });
    }
    let parts = polar(s, tol)?;
    let w = parts.isometry_part;
    let modulus = parts.modulus;
    // eigenvalues at rounding level are zero; their square roots would not be
    let defect = herm_eig(&(q - &s.adjoint_mul(s)).hermitian_part(), tol)?;
    let floor = 64.0 * f64::EPSILON;
    let rest = defect.apply(|l| if l > floor { l.sqrt() } else { 0.0 });
    let i = Complex64::new(0.0, 1.0);
    let v_plus = &modulus + &rest.scale(i);
    let v_minus = &modulus - &rest.scale(i);
    Ok((w.matmul(&v_plus), w.matmul(&v_minus)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::ZERO;
    use crate::random::{random_contraction, random_unitary, SplitMix64};

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn group(spec: &str) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::parse(spec).unwrap())
    }

    fn delta(g: Arc<FiniteGroup>) -> GroupMap {
        let e = g.identity();
        GroupMap::from_fn(g, |x| CMatrix::scalar(if x == e { ONE } else { ZERO })).unwrap()
    }

    fn regular(g: Arc<FiniteGroup>) -> GroupMap {
        let k = g.order();
        let gg = g.clone();
        GroupMap::from_fn(g, |a| {
            CMatrix::from_fn(k, k, |x, y| if x == gg.mul(a, y) { ONE } else { ZERO })
        })
        .unwrap()
    }

    fn random_map(g: Arc<FiniteGroup>, n: usize, seed: u64) -> GroupMap {
        let mut rng = SplitMix64::new(seed);
        GroupMap::from_fn(g, |_| random_contraction(&mut rng, n, n, 1.0)).unwrap()
    }

    #[test]
    fn tilde_of_representation_is_itself() {
        let phi = regular(group("symmetric:3"));
        let t = tilde(&phi);
        for x in 0..6 {
            assert!(t.at(x).max_abs_diff(phi.at(x)) < 1e-15);
        }
        let z = tilde(&GroupMap::zero(group("cyclic:3"), 2).unwrap());
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn tilde_matches_double_loop() {
        let g = group("symmetric:3");
        let phi = random_map(g.clone(), 2, 60);
        let t = tilde(&phi);
        for x in g.elements() {
            let mut acc = CMatrix::zeros(2, 2);
            for y in g.elements() {
                let term = phi.at(g.mul(x, y)).matmul(&phi.at(y).adjoint());
                acc = &acc + &term;
            }
            assert!(t.at(x).max_abs_diff(&acc.scale_real(1.0 / 6.0)) < 1e-12);
        }
    }

    #[test]
    fn delta_is_positive_and_dilates_to_regular() {
        let g = group("cyclic:2");
        let psi = delta(g.clone());
        let pd = is_positive_definite(&psi, &tol()).unwrap();
        assert!(pd.positive);
        assert!((pd.min_eigenvalue - 1.0).abs() < 1e-15);
        let d = stinespring(&psi, &tol()).unwrap();
        assert_eq!(d.m, 2);
        assert!(d.verify(&psi).worst() < 1e-12);
        // the swap has eigenvalues +-1, so pi(1) is conjugate to the regular swap
        assert!((d.pi.at(1).trace().re).abs() < 1e-12);
    }

    #[test]
    fn character_dilates_to_itself() {
        let g = group("cyclic:3");
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let chi = GroupMap::from_fn(g, |x| CMatrix::scalar(w.powu(x as u32))).unwrap();
        let d = stinespring(&chi, &tol()).unwrap();
        assert_eq!(d.m, 1);
        for x in 0..3 {
            assert!(d.pi.at(x).max_abs_diff(chi.at(x)) < 1e-12);
        }
        assert!((d.u[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_tilde_dilation_is_sound() {
        let g = group("dihedral:3");
        for seed in 0..4 {
            let psi = tilde(&random_map(g.clone(), 2, 70 + seed));
            let pd = is_positive_definite(&psi, &tol()).unwrap();
            assert!(pd.positive && pd.min_eigenvalue >= -1e-9);
            assert!((pd.min_eigenvalue - pd.min_eigenvalue_right).abs() < 1e-10);
            assert!(gram_translation_defect(&psi) < 1e-12);
            let d = stinespring(&psi, &tol()).unwrap();
            assert!(d.m <= 12);
            let c = d.verify(&psi);
            assert!(c.worst() < 1e-8, "{c:?}");
        }
    }

    #[test]
    fn non_hermitian_map_is_a_convention_mismatch() {
        let g = group("cyclic:3");
        let mut rng = SplitMix64::new(80);
        let u = random_unitary(&mut rng, 2);
        let psi = GroupMap::constant(g, u).unwrap();
        assert!(matches!(
            is_positive_definite(&psi, &tol()),
            Err(Error::ConventionMismatch(_))
        ));
    }

    #[test]
    fn negative_map_is_rejected() {
        let g = group("cyclic:2");
        let psi = GroupMap::constant(g, CMatrix::identity(1).scale_real(-1.0)).unwrap();
        assert!(!is_positive_definite(&psi, &tol()).unwrap().positive);
        assert!(matches!(stinespring(&psi, &tol()), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn split_scalar_half() {
        let s = CMatrix::scalar(Complex64::new(0.5, 0.0));
        let one = CMatrix::identity(1);
        let (v1, v2) = split_partial_isometries(&s, &one, &one, &tol()).unwrap();
        let r3 = 3f64.sqrt() / 2.0;
        assert!((v1[(0, 0)] - Complex64::new(0.5, r3)).norm() < 1e-12);
        assert!((v2[(0, 0)] - Complex64::new(0.5, -r3)).norm() < 1e-12);
    }

    #[test]
    fn split_of_partial_isometry_is_trivial() {
        let mut rng = SplitMix64::new(81);
        let u = random_unitary(&mut rng, 3);
        let q = CMatrix::corner_projection(3, 2);
        let s = u.matmul(&q);
        let (v1, v2) = split_partial_isometries(&s, &CMatrix::identity(3), &q, &tol()).unwrap();
        assert!(v1.max_abs_diff(&s) < 1e-9 && v2.max_abs_diff(&s) < 1e-9);
    }

    #[test]
    fn split_random_corner_contraction() {
        let mut rng = SplitMix64::new(82);
        let p = CMatrix::corner_projection(4, 3);
        let q = CMatrix::from_real_diag(&[0.0, 1.0, 1.0, 1.0]);
        let s0 = random_contraction(&mut rng, 4, 4, 0.8);
        let s = p.matmul(&s0).matmul(&q);
        let (v1, v2) = split_partial_isometries(&s, &p, &q, &tol()).unwrap();
        for v in [&v1, &v2] {
            let vv = v.adjoint_mul(v);
            assert!((&vv.matmul(&vv) - &vv).frobenius_norm() < 1e-8);
            assert!(p.matmul(v).matmul(&q).max_abs_diff(v) < 1e-9);
        }
        let avg = (&v1 + &v2).scale_real(0.5);
        assert!(avg.max_abs_diff(&s) < 1e-9);
        let bad = split_partial_isometries(&s0, &p, &q, &tol());
        assert!(matches!(bad, Err(Error::CornerViolation { .. })));
        let big = CMatrix::identity(1).scale_real(2.0);
        let one = CMatrix::identity(1);
        assert!(matches!(
            split_partial_isometries(&big, &one, &one, &tol()),
            Err(Error::NotContraction { .. })
        ));
    }
}
