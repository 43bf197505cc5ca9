//! Stability of almost-homomorphisms of unitary maps.

use serde::{Deserialize, Serialize};

use super::{correlation_words, range_basis, recover_u2_at, BoundLedger, RecoveryResult, Variant, SOUND_TOL};
use crate::error::{Error, Result};
use crate::groups::GroupMap;
use crate::matcore::{operator_norm, svd, CMatrix, Complex64, ZERO};
use crate::seminorms::Seminorm;
use crate::tolerance::ToleranceProfile;
use crate::uniformity::mean_hom_defect;

/// Largest `epsilon` for which the snap is attempted.
pub const SNAP_EPSILON_LIMIT: f64 = 1.0 / 40.0;

/// Recovers a representation close to a unitary almost-homomorphism with
/// mean defect `epsilon`, using the early variant at level `2 epsilon`.
pub fn stabilize(phi: &GroupMap, s: &Seminorm, tol: &ToleranceProfile) -> Result<RecoveryResult> {
    phi.require_unitary(tol.map_tol)?;
    let h = mean_hom_defect(phi, s);
    let eps = h.mean;
    let mut r = recover_u2_at(phi, s, Variant::Early, Some(2.0 * eps), tol)?;
    let mut ledger = std::mem::take(&mut r.ledger);
    ledger.info("mean_hom_defect", h.mean);
    ledger.info("uniform_hom_defect", h.uniform);
    let da = ledger.info_value("defect_a").unwrap_or(f64::NAN);
    let db = ledger.info_value("defect_b").unwrap_or(f64::NAN);
    ledger.step("defect_a_from_hom", da, 2.0 * eps);
    ledger.step("defect_b_from_hom", db, 2.0 * eps);

    let phis: Vec<CMatrix> = phi.values().iter().map(|x| r.embed(x)).collect();
    let words = correlation_words(&phis, &r.v, r.rho.values(), &r.u);
    let k = words.len();
    let mut avg = words[0].clone();
    for w in &words[1..] {
        avg = &avg + w;
    }
    let avg = avg.scale_real(1.0 / k as f64);
    ledger.step("mean_correlation", s.eval(&(&r.unit() - &avg)), 20.0 * eps);
    ledger.bound("uniform_distance", uniform_distance(s, &phis, &r.rho, &r.u), 71.0 * eps);

    r.pipeline = "stabilize".into();
    r.epsilon = eps;
    r.level = 2.0 * eps;
    r.ledger = ledger;
    Ok(r)
}

/// `max_g ||phi(g) - U* r(g) U||` with `phi` already in ambient coordinates.
fn uniform_distance(s: &Seminorm, phis: &[CMatrix], rho: &GroupMap, u: &CMatrix) -> f64 {
    phis.iter()
        .zip(rho.values())
        .map(|(p, r)| s.eval(&(p - &u.adjoint_mul(r).matmul(u))))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapResult {
    /// Genuine `n`-dimensional unitary representation.
    pub rho: GroupMap,
    /// Isometry from the corner onto the range of `P`.
    pub isometry: CMatrix,
    pub epsilon: f64,
    pub ledger: BoundLedger,
}

/// Turns an operator-norm stabilization into a representation of the same
/// dimension as `phi`.
pub fn kazhdan_snap(r: &RecoveryResult, phi: &GroupMap, tol: &ToleranceProfile) -> Result<SnapResult> {
    if !r.seminorm.is_operator() {
        return Err(Error::HypothesisViolation(format!(
            "snapping needs the operator norm, got {}",
            r.seminorm
        )));
    }
    let eps = r.epsilon;
    if eps >= SNAP_EPSILON_LIMIT {
        return Err(Error::HypothesisViolation(format!(
            "epsilon = {eps} is not below 1/40"
        )));
    }
    let n = phi.dim();
    let big = r.ambient.ambient_dim;
    let left = operator_norm(&(&r.unit() - &r.u.adjoint_mul(&r.u)));
    let range = operator_norm(&(&r.p - &r.u.mul_adjoint(&r.u)));
    // both differences are projections up to rounding, so norm 1 means a lost dimension
    for (name, d) in [("1 - U*U", left), ("P - UU*", range)] {
        if d >= 1.0 - 1e-6 {
            return Err(Error::SnapFailure(format!("||{name}|| = {d}")));
        }
    }
    let dec = svd(&r.u)?;
    let mut iso = CMatrix::zeros(big, n);
    for k in 0..n {
        for i in 0..big {
            for j in 0..n {
                iso[(i, j)] += dec.left[(i, k)] * dec.right[(j, k)].conj();
            }
        }
    }
    let rho = GroupMap::from_fn(phi.group_arc().clone(), |g| iso.adjoint_mul(r.rho.at(g)).matmul(&iso))?;

    let mut ledger = BoundLedger::new(tol);
    ledger.info("epsilon", eps);
    ledger.info("u_defect_left_op", left);
    ledger.info("u_defect_range_op", range);
    ledger.sound(
        "isometry",
        iso.adjoint_mul(&iso).frobenius_distance(&CMatrix::identity(n)),
        SOUND_TOL,
    );
    ledger.sound("range_is_p", iso.mul_adjoint(&iso).frobenius_distance(&r.p), SOUND_TOL);
    ledger.sound("unitarity", rho.unitarity_defect(), SOUND_TOL);
    ledger.sound("multiplicativity", rho.multiplicativity_residual(), SOUND_TOL);
    let dist = phi.max_distance(&rho, operator_norm);
    ledger.bound("uniform_distance", dist, 71.0 * eps);
    ledger.info("uniform_distance_over_2eps", if eps > 0.0 { dist / (2.0 * eps) } else { 0.0 });
    Ok(SnapResult {
        rho,
        isometry: iso,
        epsilon: eps,
        ledger,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjustCase {
    /// `rank P >= n`: `U` is extended inside `P`.
    Surplus,
    /// `rank P < n`: the representation is enlarged by a trivial summand.
    Deficit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustResult {
    pub case: AdjustCase,
    /// Projection the adjusted representation lives on.
    pub q: CMatrix,
    pub rho: GroupMap,
    /// Unitary from the corner onto `q`, or an isometry into `P`.
    pub u: CMatrix,
    pub epsilon: f64,
    pub rank_p: usize,
    pub ledger: BoundLedger,
}

fn outer_sum(pairs: &[(Vec<Complex64>, Vec<Complex64>)], dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim, dim);
    for (q, r) in pairs {
        for i in 0..dim {
            if q[i] == ZERO {
                continue;
            }
            for j in 0..dim {
                out[(i, j)] += q[i] * r[j].conj();
            }
        }
    }
    out
}

fn projector(basis: &[Vec<Complex64>], dim: usize) -> CMatrix {
    let pairs: Vec<_> = basis.iter().map(|b| (b.clone(), b.clone())).collect();
    outer_sum(&pairs, dim)
}

/// Extends `basis` by Gram-Schmidt on standard basis vectors up to `target` vectors.
fn extend_basis(mut basis: Vec<Vec<Complex64>>, dim: usize, target: usize) -> Vec<Vec<Complex64>> {
    for e in 0..dim {
        if basis.len() >= target {
            break;
        }
        let mut v = vec![ZERO; dim];
        v[e] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let c: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for i in 0..dim {
                    v[i] -= c * b[i];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    basis
}

/// Corrects a Hilbert-Schmidt stabilization to a representation whose
/// projection has rank exactly `n`.
pub fn dimension_adjust(r: &RecoveryResult, phi: &GroupMap, tol: &ToleranceProfile) -> Result<AdjustResult> {
    let n = phi.dim();
    let s = r.seminorm;
    if !s.is_schatten2() || s.ref_dim != n {
        return Err(Error::HypothesisViolation(format!(
            "dimension adjustment needs S2:ref={n}, got {s}"
        )));
    }
    let eps = r.epsilon;
    let big = r.ambient.ambient_dim;
    let phis: Vec<CMatrix> = phi.values().iter().map(|x| r.embed(x)).collect();
    let one_m = r.unit();
    let uu = r.u.mul_adjoint(&r.u);
    let q0 = &r.p - &uu;
    let r0 = &one_m - &r.u.adjoint_mul(&r.u);
    let d = uniform_distance(&s, &phis, &r.rho, &r.u);

    let mut ledger = BoundLedger::new(tol);
    ledger.info("epsilon", eps);
    ledger.info("rank_p", r.rank_p as f64);
    ledger.info("start_distance", d);
    let gap = (r.rank_p as f64 - n as f64).abs();
    ledger.bound("rank_gap", gap, 2500.0 * eps * eps * n as f64);
    ledger.step(
        "rank_gap_chain",
        gap,
        n as f64 * (s.eval(&r0).powi(2) + s.eval(&q0).powi(2)),
    );

    let r_basis = range_basis(&r0, tol)?;
    let (case, q, rho, u) = if r.rank_p >= n {
        let q_basis = range_basis(&q0, tol)?;
        if q_basis.len() < r_basis.len() {
            return Err(Error::RankObstruction(format!(
                "{} missing directions but only {} spare in P",
                r_basis.len(),
                q_basis.len()
            )));
        }
        let pairs: Vec<_> = q_basis.into_iter().zip(r_basis).collect();
        let u = &r.u + &outer_sum(&pairs, big);
        let value = uniform_distance(&s, &phis, &r.rho, &u);
        ledger.step("adjusted_chain", value, d + 3.0 * s.eval(&q0));
        ledger.bound("adjusted_distance", value, 161.0 * eps);
        ledger.sound("isometry", u.adjoint_mul(&u).frobenius_distance(&one_m), SOUND_TOL);
        ledger.sound("range_in_p", r.p.matmul(&u).frobenius_distance(&u), SOUND_TOL);
        (AdjustCase::Surplus, r.p.clone(), r.rho.clone(), u)
    } else {
        let p_basis = range_basis(&r.p, tol)?;
        let basis = extend_basis(p_basis, big, n);
        if basis.len() != n {
            return Err(Error::RankObstruction(format!(
                "could only reach rank {} of {n}",
                basis.len()
            )));
        }
        let q = projector(&basis, big);
        let extra = &q - &r.p;
        let rho = r.rho.map(|x| x + &extra)?;
        let t_basis = range_basis(&(&q - &uu), tol)?;
        if t_basis.len() != r_basis.len() {
            return Err(Error::RankObstruction(format!(
                "{} missing directions against {} free in Q",
                r_basis.len(),
                t_basis.len()
            )));
        }
        let pairs: Vec<_> = t_basis.into_iter().zip(r_basis).collect();
        let u = &r.u + &outer_sum(&pairs, big);
        let value = uniform_distance(&s, &phis, &rho, &u);
        let stated = d + s.eval(&extra);
        ledger.info("stated_chain", stated);
        ledger.step("adjusted_chain", value, stated + 3.0 * s.eval(&(&r.p - &uu)));
        ledger.bound("adjusted_distance", value, 131.0 * eps);
        ledger.sound("isometry", u.adjoint_mul(&u).frobenius_distance(&one_m), SOUND_TOL);
        ledger.sound("onto_q", u.mul_adjoint(&u).frobenius_distance(&q), SOUND_TOL);
        (AdjustCase::Deficit, q, rho, u)
    };
    let k = phi.group().order();
    let mut unit: f64 = 0.0;
    let mut mult: f64 = 0.0;
    let g = phi.group();
    for a in 0..k {
        unit = unit.max(rho.at(a).adjoint_mul(rho.at(a)).frobenius_distance(&q));
        for b in 0..k {
            mult = mult.max(rho.at(g.mul(a, b)).frobenius_distance(&rho.at(a).matmul(rho.at(b))));
        }
    }
    ledger.sound("rho_unitary_on_q", unit, SOUND_TOL);
    ledger.sound("rho_multiplicative", mult, SOUND_TOL);
    ledger.info("rank_q", q.trace().re.round());
    Ok(AdjustResult {
        case,
        q,
        rho,
        u,
        epsilon: eps,
        rank_p: r.rank_p,
        ledger,
    })
}
