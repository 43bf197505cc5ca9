use super::eigen::{herm_eig, EigenDecomposition};
use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::tolerance::ToleranceProfile;

/// Result of cutting a Hermitian spectrum with an interval indicator.
#[derive(Debug, Clone)]
pub struct SpectralCut {
    pub projection: CMatrix,
    pub rank: usize,
    /// Some eigenvalue fell within `tie_tol` of an endpoint.
    pub tie_fired: bool,
}

/// `χ_{[lo,hi]}(A)`; eigenvalue `λ` is kept iff `lo - tie_tol <= λ <= hi + tie_tol`.
pub fn spectral_cut(a: &CMatrix, lo: f64, hi: f64, tol: &ToleranceProfile) -> Result<SpectralCut> {
    let e = herm_eig(a, tol)?;
    Ok(cut_decomposition(&e, lo, hi, tol))
}

pub fn cut_decomposition(e: &EigenDecomposition, lo: f64, hi: f64, tol: &ToleranceProfile) -> SpectralCut {
    let keep = |l: f64| l >= lo - tol.tie_tol && l <= hi + tol.tie_tol;
    let tie_fired = e
        .values
        .iter()
        .any(|&l| (l - lo).abs() <= tol.tie_tol || (l - hi).abs() <= tol.tie_tol);
    let rank = e.values.iter().filter(|&&l| keep(l)).count();
    let projection = e.apply(|l| if keep(l) { 1.0 } else { 0.0 });
    SpectralCut {
        projection,
        rank,
        tie_fired,
    }
}

pub fn spectral_indicator(a: &CMatrix, lo: f64, hi: f64, tol: &ToleranceProfile) -> Result<CMatrix> {
    Ok(spectral_cut(a, lo, hi, tol)?.projection)
}

/// Square root of a positive semidefinite matrix; negative rounding noise is clamped.
pub fn sqrt_psd(a: &CMatrix, tol: &ToleranceProfile) -> Result<CMatrix> {
    let e = herm_eig(a, tol)?;
    Ok(e.apply(|l| l.max(0.0).sqrt()))
}

/// Moore-Penrose pseudo-inverse of a Hermitian matrix, discarding eigenvalues
/// with `|λ| <= rank_tol * max|λ|`.
pub fn pinv_hermitian(a: &CMatrix, tol: &ToleranceProfile) -> Result<CMatrix> {
    let e = herm_eig(a, tol)?;
    let top = e.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let cut = tol.rank_tol * top;
    Ok(e.apply(|l| if l.abs() > cut { 1.0 / l } else { 0.0 }))
}

pub fn min_eigenvalue(a: &CMatrix, tol: &ToleranceProfile) -> Result<f64> {
    Ok(herm_eig(a, tol)?.min_value())
}

/// Given `0 <= R <= S`, returns `T` with `‖T‖_op <= 1` and `S^{1/2} T S^{1/2} = R`.
///
/// Built as `T = A*A` with `A = R^{1/2} · pinv(S^{1/2})`, which is supported on
/// the range of `S`.
pub fn contraction_factor(r: &CMatrix, s: &CMatrix, tol: &ToleranceProfile) -> Result<CMatrix> {
    if r.rows() != s.rows() || !r.is_square() || !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "contraction factor of {}x{} and {}x{}",
            r.rows(),
            r.cols(),
            s.rows(),
            s.cols()
        )));
    }
    let scale = 1.0 + s.max_abs();
    let gap = min_eigenvalue(&(s - r), tol)?;
    if gap < -tol.psd_tol * scale {
        return Err(Error::OrderViolation { min_eig: gap });
    }
    let r_min = min_eigenvalue(r, tol)?;
    if r_min < -tol.psd_tol * scale {
        return Err(Error::OrderViolation { min_eig: r_min });
    }
    let s_half = sqrt_psd(s, tol)?;
    let r_half = sqrt_psd(r, tol)?;
    let a = r_half.matmul(&pinv_hermitian(&s_half, tol)?);
    Ok(a.adjoint_mul(&a).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::operator_norm;
    use crate::random::{random_contraction, random_psd, SplitMix64};

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn indicator_on_diagonal() {
        let a = CMatrix::from_real_diag(&[0.1, 0.6, 0.9]);
        let p = spectral_indicator(&a, 0.5, 1.0, &tol()).unwrap();
        assert!((&p - &CMatrix::from_real_diag(&[0.0, 1.0, 1.0])).max_abs() < 1e-15);
    }

    #[test]
    fn indicator_of_zero_is_zero() {
        let p = spectral_indicator(&CMatrix::zeros(3, 3), 0.2, 1.0, &tol()).unwrap();
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn tie_goes_to_upper_side() {
        let a = CMatrix::from_real_diag(&[0.5 - 1e-12, 0.2]);
        let cut = spectral_cut(&a, 0.5, 1.0, &tol()).unwrap();
        assert!(cut.tie_fired);
        assert_eq!(cut.rank, 1);
    }

    #[test]
    fn random_psd_contraction_cut_is_projection() {
        let mut rng = SplitMix64::new(21);
        let a = random_psd(&mut rng, 6);
        let a = a.scale_real(1.0 / operator_norm(&a));
        let p = spectral_indicator(&a, 0.5, 1.0, &tol()).unwrap();
        assert!((&p.matmul(&p) - &p).max_abs() < 1e-9);
        assert!(p.hermitian_defect() < 1e-9);
        assert!((&p.matmul(&a) - &a.matmul(&p)).max_abs() < 1e-9);
    }

    #[test]
    fn contraction_factor_identity_and_zero() {
        let mut rng = SplitMix64::new(22);
        let s = &random_psd(&mut rng, 4) + &CMatrix::identity(4).scale_real(0.5);
        let t = contraction_factor(&s, &s, &tol()).unwrap();
        assert!((&t - &CMatrix::identity(4)).max_abs() < 1e-9);
        let z = contraction_factor(&CMatrix::zeros(4, 4), &s, &tol()).unwrap();
        assert!(z.max_abs() < 1e-12);
    }

    #[test]
    fn contraction_factor_recovers_known_contraction() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..5 {
            let s = random_psd(&mut rng, 5);
            let c0 = random_contraction(&mut rng, 5, 5, 0.9);
            let c = c0.adjoint_mul(&c0); // PSD contraction
            let s_half = sqrt_psd(&s, &tol()).unwrap();
            let r = s_half.matmul(&c).matmul(&s_half).hermitian_part();
            let t = contraction_factor(&r, &s, &tol()).unwrap();
            assert!(operator_norm(&t) <= 1.0 + 1e-9);
            let back = s_half.matmul(&t).matmul(&s_half);
            assert!((&back - &r).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn contraction_factor_rejects_order_violation() {
        let r = CMatrix::from_real_diag(&[2.0, 0.0]);
        let s = CMatrix::identity(2);
        assert!(matches!(
            contraction_factor(&r, &s, &tol()),
            Err(Error::OrderViolation { .. })
        ));
    }

    #[test]
    fn kadison_inequality_for_normalized_trace() {
        let mut rng = SplitMix64::new(24);
        for n in 1..7 {
            let a = random_psd(&mut rng, n);
            let tau = |m: &CMatrix| m.trace().re / n as f64;
            let h = sqrt_psd(&a, &tol()).unwrap();
            assert!(tau(&h).powi(2) <= tau(&a) + 1e-12);
        }
    }
}
