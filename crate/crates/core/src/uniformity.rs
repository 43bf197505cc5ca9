//! Correlation and defect functionals of group maps.
//!
//! All triple averages parallelize over the outermost index. Each task sums
//! its inner loops sequentially, task results are collected in index order
//! and then added left to right, so the value does not depend on the number
//! of worker threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::groups::GroupMap;
use crate::matcore::{CMatrix, Complex64, ONE, ZERO};
use crate::seminorms::Seminorm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    DefectA,
    DefectB,
    TraceCorrA,
    TraceCorrB,
    U2Norm,
    MeanHomDefect,
    UniformHomDefect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Optimized,
    Bruteforce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub functional: Functional,
    pub value: f64,
    pub imag_residue: f64,
    pub kernel: Kernel,
    pub group_order: usize,
    pub dim: usize,
    /// Wall time, only filled in when timing was requested.
    pub elapsed_ms: Option<f64>,
}

/// Execution knobs for the optimized kernels.
#[derive(Default, Clone, Copy)]
pub struct KernelOptions<'a> {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Called with `(finished, total)` outer indices as tasks complete.
    pub progress: Option<&'a (dyn Fn(usize, usize) + Sync)>,
    pub timing: bool,
}

impl<'a> KernelOptions<'a> {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers: Some(workers),
            ..Self::default()
        }
    }
}

fn run_in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

/// `sum_{i < n} f(i)` with the deterministic reduction described above.
fn ordered_sum(n: usize, opts: &KernelOptions, f: impl Fn(usize) -> Complex64 + Sync) -> Complex64 {
    let done = AtomicUsize::new(0);
    let parts: Vec<Complex64> = run_in_pool(opts.workers, || {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let v = f(i);
                if let Some(cb) = opts.progress {
                    cb(done.fetch_add(1, Ordering::Relaxed) + 1, n);
                }
                v
            })
            .collect()
    });
    parts.into_iter().fold(ZERO, |a, b| a + b)
}

/// All products `phi(a) phi(b)*`, indexed `a * |G| + b`.
fn pair_products(phi: &GroupMap, opts: &KernelOptions) -> Vec<CMatrix> {
    let k = phi.group().order();
    run_in_pool(opts.workers, || {
        (0..k * k)
            .into_par_iter()
            .map(|i| phi.at(i / k).mul_adjoint(phi.at(i % k)))
            .collect()
    })
}

/// `||1 - A B||` for the given seminorm; Schatten-2 avoids any allocation.
fn one_minus_product_norm(a: &CMatrix, b: &CMatrix, s: &Seminorm) -> f64 {
    if s.is_schatten2() {
        let n = a.rows();
        let mut acc = 0.0;
        for i in 0..n {
            let arow = a.row(i);
            for j in 0..n {
                let mut z = ZERO;
                for (k, &x) in arow.iter().enumerate() {
                    z += x * b[(k, j)];
                }
                if i == j {
                    z -= ONE;
                }
                acc += z.norm_sqr();
            }
        }
        (acc / s.ref_dim as f64).sqrt()
    } else {
        s.eval_one_minus(&a.matmul(b))
    }
}

fn report(
    functional: Functional,
    kernel: Kernel,
    phi: &GroupMap,
    value: Complex64,
    start: Option<Instant>,
) -> DefectReport {
    DefectReport {
        functional,
        value: value.re,
        imag_residue: value.im.abs(),
        kernel,
        group_order: phi.group().order(),
        dim: phi.dim(),
        elapsed_ms: start.map(|t| t.elapsed().as_secs_f64() * 1e3),
    }
}

#[derive(Clone, Copy)]
enum Shape {
    /// `phi(x) phi(y)* phi(yz) phi(xz)*`
    A,
    /// `phi(xy) phi(y)* phi(z) phi(xz)*`
    B,
}

/// Index pairs of the two precomputed factors for triple `(x, y, z)`.
#[inline]
fn factor_indices(phi: &GroupMap, shape: Shape, x: usize, y: usize, z: usize) -> (usize, usize) {
    let g = phi.group();
    let k = g.order();
    let xz = g.mul(x, z);
    match shape {
        Shape::A => (x * k + y, g.mul(y, z) * k + xz),
        Shape::B => (g.mul(x, y) * k + y, z * k + xz),
    }
}

fn seminorm_defect(phi: &GroupMap, s: &Seminorm, shape: Shape, opts: &KernelOptions) -> Complex64 {
    let k = phi.group().order();
    let q = pair_products(phi, opts);
    let total = ordered_sum(k, opts, |x| {
        let mut acc = 0.0;
        for y in 0..k {
            for z in 0..k {
                let (i, j) = factor_indices(phi, shape, x, y, z);
                acc += one_minus_product_norm(&q[i], &q[j], s);
            }
        }
        Complex64::new(acc, 0.0)
    });
    total / (k * k * k) as f64
}

fn trace_correlation(phi: &GroupMap, shape: Shape, opts: &KernelOptions) -> Complex64 {
    let k = phi.group().order();
    let q = pair_products(phi, opts);
    let total = ordered_sum(k, opts, |x| {
        let mut acc = ZERO;
        for y in 0..k {
            for z in 0..k {
                let (i, j) = factor_indices(phi, shape, x, y, z);
                acc += q[i].trace_of_product(&q[j]);
            }
        }
        acc
    });
    total / ((k * k * k) as f64 * phi.dim() as f64)
}

fn timed<T>(opts: &KernelOptions, f: impl FnOnce() -> T) -> (T, Option<Instant>) {
    let start = opts.timing.then(Instant::now);
    (f(), start)
}

/// `E_x E_y E_z ||1 - phi(x) phi(y)* phi(yz) phi(xz)*||`.
pub fn defect_a(phi: &GroupMap, s: &Seminorm) -> DefectReport {
    defect_a_with(phi, s, &KernelOptions::default())
}

pub fn defect_a_with(phi: &GroupMap, s: &Seminorm, opts: &KernelOptions) -> DefectReport {
    let (v, t) = timed(opts, || seminorm_defect(phi, s, Shape::A, opts));
    report(Functional::DefectA, Kernel::Optimized, phi, v, t)
}

/// `E_x E_y E_z ||1 - phi(xy) phi(y)* phi(z) phi(xz)*||`.
pub fn defect_b(phi: &GroupMap, s: &Seminorm) -> DefectReport {
    defect_b_with(phi, s, &KernelOptions::default())
}

pub fn defect_b_with(phi: &GroupMap, s: &Seminorm, opts: &KernelOptions) -> DefectReport {
    let (v, t) = timed(opts, || seminorm_defect(phi, s, Shape::B, opts));
    report(Functional::DefectB, Kernel::Optimized, phi, v, t)
}

/// `E_x E_y E_z tau(phi(x) phi(y)* phi(yz) phi(xz)*)` with `tau = Tr / n`.
pub fn trace_corr_a(phi: &GroupMap) -> DefectReport {
    trace_corr_a_with(phi, &KernelOptions::default())
}

pub fn trace_corr_a_with(phi: &GroupMap, opts: &KernelOptions) -> DefectReport {
    let (v, t) = timed(opts, || trace_correlation(phi, Shape::A, opts));
    report(Functional::TraceCorrA, Kernel::Optimized, phi, v, t)
}

/// `E_x E_y E_z tau(phi(xy) phi(y)* phi(z) phi(xz)*)`.
pub fn trace_corr_b(phi: &GroupMap) -> DefectReport {
    trace_corr_b_with(phi, &KernelOptions::default())
}

pub fn trace_corr_b_with(phi: &GroupMap, opts: &KernelOptions) -> DefectReport {
    let (v, t) = timed(opts, || trace_correlation(phi, Shape::B, opts));
    report(Functional::TraceCorrB, Kernel::Optimized, phi, v, t)
}

/// `|G|^-3 sum_{x,y,z} Tr(phi(x) phi(y)* phi(z) phi(w)*)` with `w = x y^-1 z`.
///
/// Grouping the pairs by `g = x y^-1` gives `|G|^-3 sum_g Tr(S(g) S(g^-1))`
/// with `S(g) = sum_{x y^-1 = g} phi(x) phi(y)*`.
pub fn u2_norm(phi: &GroupMap) -> DefectReport {
    u2_norm_with(phi, &KernelOptions::default())
}

pub fn u2_norm_with(phi: &GroupMap, opts: &KernelOptions) -> DefectReport {
    let (v, t) = timed(opts, || {
        let g = phi.group();
        let k = g.order();
        let n = phi.dim();
        let sums: Vec<CMatrix> = run_in_pool(opts.workers, || {
            (0..k)
                .into_par_iter()
                .map(|h| {
                    // x y^-1 = h  <=>  x = h y
                    let mut acc = CMatrix::zeros(n, n);
                    for y in 0..k {
                        acc.add_assign_scaled(&phi.at(g.mul(h, y)).mul_adjoint(phi.at(y)), ONE);
                    }
                    acc
                })
                .collect()
        });
        let total = ordered_sum(k, opts, |h| sums[h].trace_of_product(&sums[g.inv(h)]));
        total / (k * k * k) as f64
    });
    report(Functional::U2Norm, Kernel::Optimized, phi, v, t)
}

/// Average and worst multiplicativity defects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomDefect {
    /// `max_g E_h ||phi(gh) - phi(g) phi(h)||`
    pub mean: f64,
    /// `max_{g,h} ||phi(gh) - phi(g) phi(h)||`
    pub uniform: f64,
}

pub fn mean_hom_defect(phi: &GroupMap, s: &Seminorm) -> HomDefect {
    mean_hom_defect_with(phi, s, &KernelOptions::default())
}

pub fn mean_hom_defect_with(phi: &GroupMap, s: &Seminorm, opts: &KernelOptions) -> HomDefect {
    let g = phi.group();
    let k = g.order();
    let rows: Vec<(f64, f64)> = run_in_pool(opts.workers, || {
        (0..k)
            .into_par_iter()
            .map(|a| {
                let mut sum = 0.0;
                let mut worst: f64 = 0.0;
                for b in 0..k {
                    let d = s.eval(&(phi.at(g.mul(a, b)) - &phi.at(a).matmul(phi.at(b))));
                    sum += d;
                    worst = worst.max(d);
                }
                (sum / k as f64, worst)
            })
            .collect()
    });
    rows.into_iter().fold(HomDefect { mean: 0.0, uniform: 0.0 }, |acc, (m, u)| HomDefect {
        mean: acc.mean.max(m),
        uniform: acc.uniform.max(u),
    })
}

/// Reference implementations: plain sequential loops with explicit matrix
/// products and no precomputation.
pub mod naive {
    use super::*;

    fn word_a(phi: &GroupMap, x: usize, y: usize, z: usize) -> CMatrix {
        let g = phi.group();
        phi.at(x)
            .matmul(&phi.at(y).adjoint())
            .matmul(phi.at(g.mul(y, z)))
            .matmul(&phi.at(g.mul(x, z)).adjoint())
    }

    fn word_b(phi: &GroupMap, x: usize, y: usize, z: usize) -> CMatrix {
        let g = phi.group();
        phi.at(g.mul(x, y))
            .matmul(&phi.at(y).adjoint())
            .matmul(phi.at(z))
            .matmul(&phi.at(g.mul(x, z)).adjoint())
    }

    fn triple_mean(phi: &GroupMap, f: impl Fn(usize, usize, usize) -> Complex64) -> Complex64 {
        let k = phi.group().order();
        let mut acc = ZERO;
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    acc += f(x, y, z);
                }
            }
        }
        acc / (k * k * k) as f64
    }

    fn bf(functional: Functional, phi: &GroupMap, v: Complex64) -> DefectReport {
        report(functional, Kernel::Bruteforce, phi, v, None)
    }

    pub fn defect_a(phi: &GroupMap, s: &Seminorm) -> DefectReport {
        let v = triple_mean(phi, |x, y, z| s.eval_one_minus(&word_a(phi, x, y, z)).into());
        bf(Functional::DefectA, phi, v)
    }

    pub fn defect_b(phi: &GroupMap, s: &Seminorm) -> DefectReport {
        let v = triple_mean(phi, |x, y, z| s.eval_one_minus(&word_b(phi, x, y, z)).into());
        bf(Functional::DefectB, phi, v)
    }

    pub fn trace_corr_a(phi: &GroupMap) -> DefectReport {
        let n = phi.dim() as f64;
        let v = triple_mean(phi, |x, y, z| word_a(phi, x, y, z).trace() / n);
        bf(Functional::TraceCorrA, phi, v)
    }

    pub fn trace_corr_b(phi: &GroupMap) -> DefectReport {
        let n = phi.dim() as f64;
        let v = triple_mean(phi, |x, y, z| word_b(phi, x, y, z).trace() / n);
        bf(Functional::TraceCorrB, phi, v)
    }

    pub fn u2_norm(phi: &GroupMap) -> DefectReport {
        let g = phi.group();
        let v = triple_mean(phi, |x, y, z| {
            let w = g.mul(g.mul(x, g.inv(y)), z);
            debug_assert_eq!(g.mul(g.mul(g.mul(x, g.inv(y)), z), g.inv(w)), g.identity());
            phi.at(x)
                .matmul(&phi.at(y).adjoint())
                .matmul(phi.at(z))
                .matmul(&phi.at(w).adjoint())
                .trace()
        });
        bf(Functional::U2Norm, phi, v)
    }

    pub fn mean_hom_defect(phi: &GroupMap, s: &Seminorm) -> HomDefect {
        let g = phi.group();
        let mut out = HomDefect { mean: 0.0, uniform: 0.0 };
        for a in g.elements() {
            let mut sum = 0.0;
            for b in g.elements() {
                let prod = phi.at(a).matmul(phi.at(b));
                let d = s.eval(&(phi.at(g.mul(a, b)) - &prod));
                sum += d;
                out.uniform = out.uniform.max(d);
            }
            out.mean = out.mean.max(sum / g.order() as f64);
        }
        out
    }
}
