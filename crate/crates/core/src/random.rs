//! Seeded randomness with a fixed, documented generator.
//!
//! The generator is SplitMix64 (Steele, Lea and Flood): a 64-bit Weyl
//! sequence with increment `0x9E3779B97F4A7C15` followed by the
//! `mix64` finalizer. Uniform doubles take the top 53 bits; normals use
//! the Box-Muller transform. Identical seeds give bit-identical streams.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::matcore::{CMatrix, ZERO};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream derived from `seed` and a stream label.
    pub fn derived(seed: u64, stream: u64) -> Self {
        let mut base = Self::new(seed ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
        Self::new(base.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize % n.max(1)
    }

    pub fn gaussian(&mut self) -> f64 {
        // 1 - u lies in (0, 1], so the logarithm is finite
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re = self.gaussian();
        let im = self.gaussian();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

pub fn random_complex(rng: &mut SplitMix64, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.complex_gaussian())
}

pub fn random_hermitian(rng: &mut SplitMix64, n: usize) -> CMatrix {
    random_complex(rng, n, n).hermitian_part()
}

/// Haar-like unitary: Gram-Schmidt (applied twice) on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut SplitMix64, n: usize) -> CMatrix {
    let g = random_complex(rng, n, n);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    let mut u = CMatrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        u.set_column(j, c);
    }
    u
}

/// Random positive semidefinite matrix `G G* / n`.
pub fn random_psd(rng: &mut SplitMix64, n: usize) -> CMatrix {
    let g = random_complex(rng, n, n);
    g.mul_adjoint(&g).scale_real(1.0 / n.max(1) as f64).hermitian_part()
}

/// Random matrix scaled so that its operator norm equals `norm`.
pub fn random_contraction(rng: &mut SplitMix64, rows: usize, cols: usize, norm: f64) -> CMatrix {
    let g = random_complex(rng, rows, cols);
    let op = crate::matcore::operator_norm(&g);
    if op == 0.0 {
        return CMatrix::zeros(rows, cols);
    }
    g.scale_real(norm / op)
}

pub fn zero_vector(n: usize) -> Vec<Complex64> {
    vec![ZERO; n]
}
