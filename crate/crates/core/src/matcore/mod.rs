//! Dense complex linear algebra: Hermitian eigendecomposition, SVD, polar
//! decomposition and spectral functions.

mod eigen;
mod matrix;
mod spectral;
mod svd;

pub use eigen::{herm_eig, EigenDecomposition};
pub use matrix::{CMatrix, ONE, ZERO};
pub use spectral::{
    contraction_factor, cut_decomposition, min_eigenvalue, pinv_hermitian, spectral_cut,
    spectral_indicator, sqrt_psd, SpectralCut,
};
pub use svd::{operator_norm, polar, round_partial_isometry, singular_values, svd, PolarParts, Svd};

pub use num_complex::Complex64;
