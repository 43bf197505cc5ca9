//! Constructive recovery of genuine representations from approximate ones.
//!
//! Every pipeline returns the witnesses it builds (a projection `P`, partial
//! isometries `U`, `V` and a representation `rho` on the `P` corner) together
//! with a [`BoundLedger`] recording each guaranteed estimate next to its
//! measured value. A failing ledger entry is an observation, not an error.

mod ledger;
mod stability;

use serde::{Deserialize, Serialize};

pub use ledger::{BoundLedger, EntryKind, InfoEntry, LedgerEntry, Relation};
pub use stability::{dimension_adjust, kazhdan_snap, stabilize, AdjustCase, AdjustResult, SnapResult, SNAP_EPSILON_LIMIT};

use crate::dilation::{split_partial_isometries, stinespring, tilde, DilationResult};
use crate::error::{Error, Result};
use crate::groups::GroupMap;
use crate::matcore::{
    herm_eig, operator_norm, round_partial_isometry, spectral_cut, sqrt_psd, CMatrix, Complex64,
};
use crate::seminorms::{AmbientSpace, Seminorm};
use crate::tolerance::ToleranceProfile;
use crate::uniformity::{defect_a, defect_b, trace_corr_a, trace_corr_b};

/// Absolute threshold for structural identities.
pub const SOUND_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Both `U` and `V` are rounded to partial isometries.
    Full,
    /// Only `U` is rounded; `V` stays a contraction.
    Early,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub pipeline: String,
    pub ambient: AmbientSpace,
    pub seminorm: Seminorm,
    pub variant: Variant,
    /// The `epsilon` the stated bounds are expressed in.
    pub epsilon: f64,
    /// Defect level fed to the construction.
    pub level: f64,
    pub dilation_rank: usize,
    pub rank_p: usize,
    pub tie_fired: bool,
    pub u_partial_isometry: bool,
    pub v_partial_isometry: bool,
    /// Unimodular factor applied to `U`, if any.
    pub phase: Option<Complex64>,
    pub phase_degenerate: bool,
    pub p: CMatrix,
    pub u: CMatrix,
    pub v: CMatrix,
    pub rho: GroupMap,
    #[serde(skip)]
    pub pi: Option<GroupMap>,
    pub ledger: BoundLedger,
}

impl RecoveryResult {
    /// `phi(g)` placed in the `1_M` corner of the ambient space.
    pub fn embed(&self, t: &CMatrix) -> CMatrix {
        self.ambient.embed(t)
    }

    pub fn unit(&self) -> CMatrix {
        self.ambient.unit()
    }
}

/// Everything up to and including the dilation, in ambient coordinates.
struct Setup {
    n: usize,
    ambient: AmbientSpace,
    one_m: CMatrix,
    phi: Vec<CMatrix>,
    pi: Vec<CMatrix>,
    u: CMatrix,
    dilation: DilationResult,
    dilation_soundness: f64,
}

fn setup(phi: &GroupMap, tol: &ToleranceProfile) -> Result<Setup> {
    phi.require_contractive(tol.map_tol)?;
    let psi = tilde(phi);
    let dilation = stinespring(&psi, tol).map_err(|e| Error::DilationFailure(Box::new(e)))?;
    let dilation_soundness = dilation.verify(&psi).worst();
    let n = phi.dim();
    let big = dilation.m.max(n);
    let ambient = AmbientSpace::new(n, big);
    let pi = dilation.pi.values().iter().map(|p| p.embed_unital(big)).collect();
    let u = dilation.u.embed(big, big);
    Ok(Setup {
        n,
        ambient,
        one_m: ambient.unit(),
        phi: phi.values().iter().map(|v| v.embed(big, big)).collect(),
        pi,
        u,
        dilation,
        dilation_soundness,
    })
}

fn mean_matrix(k: usize, f: impl Fn(usize) -> CMatrix) -> CMatrix {
    let mut acc = f(0);
    for x in 1..k {
        acc = &acc + &f(x);
    }
    acc.scale_real(1.0 / k as f64)
}

fn mean_scalar(k: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..k).map(f).sum::<f64>() / k as f64
}

/// `phi(x) V* r(x)* U` for every `x`.
fn correlation_words(phi: &[CMatrix], v: &CMatrix, r: &[CMatrix], u: &CMatrix) -> Vec<CMatrix> {
    let vs = v.adjoint();
    phi.iter()
        .zip(r)
        .map(|(p, rx)| p.matmul(&vs).mul_adjoint(rx).matmul(u))
        .collect()
}

/// `E_x ||1_M - phi(x) V* r(x)* U||`.
fn correlation_defect(s: &Seminorm, one_m: &CMatrix, words: &[CMatrix]) -> f64 {
    mean_scalar(words.len(), |x| s.eval(&(one_m - &words[x])))
}

/// `tau(E_x phi(x) V* r(x)* U)` with `tau = Tr / n`.
fn trace_correlation(words: &[CMatrix], n: usize) -> Complex64 {
    mean_matrix(words.len(), |x| words[x].clone()).trace() / n as f64
}

fn tau(t: &CMatrix, n: usize) -> f64 {
    t.trace().re / n as f64
}

fn compress(p: &CMatrix, pi: &[CMatrix]) -> Vec<CMatrix> {
    pi.iter().map(|x| p.matmul(x).matmul(p)).collect()
}

/// Structural checks shared by every pipeline.
fn soundness(
    ledger: &mut BoundLedger,
    setup: &Setup,
    p: &CMatrix,
    rho: &[CMatrix],
    u: &CMatrix,
    v: &CMatrix,
    avg: Option<&CMatrix>,
    phi: &GroupMap,
) {
    let g = phi.group();
    ledger.sound("dilation", setup.dilation_soundness, SOUND_TOL);
    ledger.sound(
        "p_projection",
        p.matmul(p).frobenius_distance(p).max(p.hermitian_defect()),
        SOUND_TOL,
    );
    let unitary = rho
        .iter()
        .map(|r| r.adjoint_mul(r).frobenius_distance(p))
        .fold(0.0, f64::max);
    ledger.sound("rho_unitary_on_p", unitary, SOUND_TOL);
    let mut mult: f64 = 0.0;
    for a in g.elements() {
        for b in g.elements() {
            let d = rho[g.mul(a, b)].frobenius_distance(&rho[a].matmul(&rho[b]));
            mult = mult.max(d);
        }
    }
    ledger.sound("rho_multiplicative", mult, SOUND_TOL);
    let corner = |t: &CMatrix| p.matmul(t).matmul(&setup.one_m).frobenius_distance(t);
    ledger.sound("u_in_corner", corner(u), SOUND_TOL);
    ledger.sound("v_in_corner", corner(v), SOUND_TOL);
    if let Some(a) = avg {
        let inv = setup
            .pi
            .iter()
            .map(|x| x.matmul(a).mul_adjoint(x).frobenius_distance(a))
            .fold(0.0, f64::max);
        ledger.sound("a_invariance", inv, 1e-9);
    }
}

fn partial_isometry_defect(t: &CMatrix) -> f64 {
    let tt = t.adjoint_mul(t);
    tt.matmul(&tt).frobenius_distance(&tt)
}

/// Recovery from small seminorm defects.
pub fn recover_u2(phi: &GroupMap, s: &Seminorm, variant: Variant, tol: &ToleranceProfile) -> Result<RecoveryResult> {
    recover_u2_at(phi, s, variant, None, tol)
}

/// As [`recover_u2`], with the bounds evaluated at `level` instead of the
/// measured defect; the ledger then also certifies `measured <= level`.
pub fn recover_u2_at(
    phi: &GroupMap,
    s: &Seminorm,
    variant: Variant,
    level: Option<f64>,
    tol: &ToleranceProfile,
) -> Result<RecoveryResult> {
    let mut ledger = BoundLedger::new(tol);
    phi.require_contractive(tol.map_tol)?;
    let da = defect_a(phi, s).value;
    let db = defect_b(phi, s).value;
    let measured = da.max(db);
    ledger.info("defect_a", da);
    ledger.info("defect_b", db);
    ledger.info("measured_epsilon", measured);
    let eps = match level {
        Some(l) => {
            ledger.bound("measured_level", measured, l);
            l
        }
        None => measured,
    };
    ledger.info("epsilon", eps);

    let st = setup(phi, tol)?;
    let k = phi.group().order();
    let big = st.ambient.ambient_dim;
    let id = CMatrix::identity(big);
    ledger.info("dilation_rank", st.dilation.m as f64);

    // V = E_x pi(x)* U phi(x),  A = E_x pi(x) U U* pi(x)*
    let v = mean_matrix(k, |x| st.pi[x].adjoint_mul(&st.u).matmul(&st.phi[x]));
    let uu = st.u.mul_adjoint(&st.u);
    let a = mean_matrix(k, |x| st.pi[x].matmul(&uu).mul_adjoint(&st.pi[x])).hermitian_part();

    let raw_words = correlation_words(&st.phi, &v, &st.pi, &st.u);
    ledger.step("correlation_uncut", correlation_defect(s, &st.one_m, &raw_words), eps);
    ledger.step("a_norm", operator_norm(&a), 1.0);
    let one_minus_a = &id - &a;
    ledger.step(
        "u_star_one_minus_a_u",
        s.eval(&st.u.adjoint_mul(&one_minus_a).matmul(&st.u)),
        eps,
    );
    ledger.step("a_minus_a_squared", s.eval(&(&a - &a.matmul(&a))), eps);

    let cut = spectral_cut(&a, 0.5, 1.0, tol)?;
    let p = cut.projection;
    ledger.info("tie_fired", cut.tie_fired as u8 as f64);
    ledger.info("rank_p", cut.rank as f64);
    ledger.step("p_minus_a", s.eval(&(&p - &a)), 2.0 * eps);
    let rho = compress(&p, &st.pi);

    let u0 = p.matmul(&st.u);
    let v0 = p.matmul(&v);
    let w0 = correlation_words(&st.phi, &v0, &rho, &u0);
    ledger.step("correlation_cut", correlation_defect(s, &st.one_m, &w0), 4.0 * eps);

    let u1 = round_partial_isometry(&u0, tol)?;
    ledger.step("u_rounding", s.eval(&(&u1 - &u0)), 6.0 * eps);
    ledger.step("p_minus_u0u0", s.eval(&(&p - &u0.mul_adjoint(&u0))), 3.0 * eps);
    let w_early = correlation_words(&st.phi, &v0, &rho, &u1);
    let early_corr = correlation_defect(s, &st.one_m, &w_early);
    ledger.bound("u_defect_left", s.eval(&(&st.one_m - &u1.adjoint_mul(&u1))), 20.0 * eps);
    ledger.bound("u_defect_range", s.eval(&(&p - &u1.mul_adjoint(&u1))), 15.0 * eps);

    let v_final = match variant {
        Variant::Early => {
            ledger.bound("correlation_defect", early_corr, 10.0 * eps);
            v0
        }
        Variant::Full => {
            ledger.step("correlation_early", early_corr, 10.0 * eps);
            ledger.step("p_minus_v0v0", s.eval(&(&p - &v0.mul_adjoint(&v0))), 17.0 * eps);
            let v1 = round_partial_isometry(&v0, tol)?;
            ledger.step("v_rounding", s.eval(&(&v1 - &v0)), 34.0 * eps);
            ledger.bound("v_defect_range", s.eval(&(&p - &v1.mul_adjoint(&v1))), 85.0 * eps);
            let w1 = correlation_words(&st.phi, &v1, &rho, &u1);
            ledger.bound("correlation_defect", correlation_defect(s, &st.one_m, &w1), 44.0 * eps);
            let v1s = v1.adjoint();
            let inflated = mean_scalar(k, |x| s.eval(&(&rho[x] - &u1.matmul(&st.phi[x]).matmul(&v1s))));
            ledger.bound("inflated_distance", inflated, 74.0 * eps);
            v1
        }
    };

    soundness(&mut ledger, &st, &p, &rho, &u1, &v_final, Some(&a), phi);
    ledger.sound("u_partial_isometry", partial_isometry_defect(&u1), SOUND_TOL);
    if variant == Variant::Full {
        ledger.sound("v_partial_isometry", partial_isometry_defect(&v_final), SOUND_TOL);
    }

    Ok(RecoveryResult {
        pipeline: match variant {
            Variant::Full => "recover".into(),
            Variant::Early => "recover_early".into(),
        },
        ambient: st.ambient,
        seminorm: *s,
        variant,
        epsilon: eps,
        level: eps,
        dilation_rank: st.dilation.m,
        rank_p: cut.rank,
        tie_fired: cut.tie_fired,
        u_partial_isometry: true,
        v_partial_isometry: variant == Variant::Full,
        phase: None,
        phase_degenerate: false,
        p,
        u: u1,
        v: v_final,
        rho: GroupMap::new(phi.group_arc().clone(), rho)?,
        pi: Some(GroupMap::new(phi.group_arc().clone(), st.pi)?),
        ledger,
    })
}

/// Unimodular `w` with `w * c >= 0`; `None` when `|c|` is too small to define it.
fn phase_of(c: Complex64) -> Option<Complex64> {
    if c.norm() < 1e-12 {
        None
    } else {
        Some(c.conj() / c.norm())
    }
}

/// High-correlation trace pipeline. With `epsilon = None` the level is
/// `1 - min(trace_corr_a, trace_corr_b)`.
pub fn recover_trace99(phi: &GroupMap, epsilon: Option<f64>, tol: &ToleranceProfile) -> Result<RecoveryResult> {
    phi.require_contractive(tol.map_tol)?;
    let n = phi.dim();
    let ca = trace_corr_a(phi).value;
    let cb = trace_corr_b(phi).value;
    let measured = (1.0 - ca.min(cb)).max(0.0);
    let eps = match epsilon {
        Some(e) => {
            if ca.min(cb) < 1.0 - e - 1e-12 {
                return Err(Error::HypothesisViolation(format!(
                    "trace correlations {ca} and {cb} are below 1 - {e}"
                )));
            }
            e
        }
        None => measured,
    };
    let s2 = Seminorm::hilbert_schmidt(n);
    let level = (2.0 * eps).sqrt();
    let mut inner = recover_u2_at(phi, &s2, Variant::Full, Some(level), tol)?;

    let mut ledger = BoundLedger::new(tol);
    ledger.info("trace_corr_a", ca);
    ledger.info("trace_corr_b", cb);
    ledger.info("epsilon", eps);
    ledger.info("level", level);
    let root = eps.sqrt();

    let words = correlation_words(
        &phi.values().iter().map(|v| inner.embed(v)).collect::<Vec<_>>(),
        &inner.v,
        inner.rho.values(),
        &inner.u,
    );
    let c = trace_correlation(&words, n);
    let phase = phase_of(c);
    if let Some(w) = phase {
        inner.u = inner.u.scale(w);
    }
    let corr = match phase {
        Some(w) => (c * w).re,
        None => c.re,
    };
    ledger.info("correlation_before_phase_re", c.re);
    ledger.info("correlation_before_phase_im", c.im);
    ledger.lower_bound("trace_correlation", corr, 1.0 - 63.0 * root);
    ledger.lower_step("trace_correlation_chain", corr, 1.0 - 44.0 * level);
    let u = &inner.u;
    let one_m = inner.unit();
    let p = &inner.p;
    let dl = s2.eval(&(&one_m - &u.adjoint_mul(u)));
    let dr = s2.eval(&(p - &u.mul_adjoint(u)));
    let dv = s2.eval(&(p - &inner.v.mul_adjoint(&inner.v)));
    ledger.bound("u_defect_left", dl, 29.0 * root);
    ledger.bound("u_defect_range", dr, 22.0 * root);
    ledger.bound("v_defect_range", dv, 121.0 * root);
    ledger.step("v_defect_range_chain", dv, 85.0 * level);
    ledger.info("v_defect_range_raw_constant_bound", 95.0 * level);
    ledger.absorb("seminorm", std::mem::take(&mut inner.ledger));

    inner.pipeline = "trace99".into();
    inner.epsilon = eps;
    inner.level = level;
    inner.phase_degenerate = phase.is_none();
    inner.phase = phase;
    inner.ledger = ledger;
    Ok(inner)
}

/// Low-correlation trace pipeline for `trace_corr_a(phi) >= c`.
pub fn recover_trace_c(phi: &GroupMap, c: f64, tol: &ToleranceProfile) -> Result<RecoveryResult> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::HypothesisViolation(format!("c = {c} is outside (0, 1]")));
    }
    phi.require_contractive(tol.map_tol)?;
    let corr_a = trace_corr_a(phi).value;
    if corr_a < c - 1e-12 {
        return Err(Error::HypothesisViolation(format!(
            "trace correlation {corr_a} is below c = {c}"
        )));
    }
    let mut ledger = BoundLedger::new(tol);
    ledger.info("c", c);
    ledger.info("trace_corr_a", corr_a);

    let st = setup(phi, tol)?;
    let n = st.n;
    let k = phi.group().order();
    let big = st.ambient.ambient_dim;
    let id = CMatrix::identity(big);

    let v = mean_matrix(k, |x| st.pi[x].adjoint_mul(&st.u).matmul(&st.phi[x]));
    let vv = v.mul_adjoint(&v);
    let a = mean_matrix(k, |x| st.pi[x].matmul(&vv).mul_adjoint(&st.pi[x])).hermitian_part();
    let a_half = sqrt_psd(&a, tol)?;
    let raw = trace_correlation(&correlation_words(&st.phi, &v, &st.pi, &st.u), n);
    ledger.lower_step("correlation_uncut", raw.re, c);
    ledger.step("a_norm", operator_norm(&a), 1.0);
    let tau_a = tau(&a, n);
    // with tau(1) = N / n this is only the Cauchy-Schwarz form on supp(A)
    let support = spectral_cut(&a, tol.rank_tol, f64::INFINITY, tol)?.rank as f64 / n as f64;
    ledger.info("kadison_lhs", tau(&a_half, n).powi(2));
    ledger.info("kadison_rhs", tau_a);
    ledger.step("kadison_support", tau(&a_half, n).powi(2), support * tau_a);
    ledger.step("trace_a", tau_a, 1.0);

    let cut = spectral_cut(&a_half, c / 2.0, 1.0, tol)?;
    let p = cut.projection;
    let p_perp = &id - &p;
    ledger.step("trace_a_p_perp", tau(&a.matmul(&p_perp), n), c / 2.0);
    let tau_p = tau(&p, n);
    let rho = compress(&p, &st.pi);
    let u0 = p.matmul(&st.u);
    let v0 = p.matmul(&v);
    let cut_corr = trace_correlation(&correlation_words(&st.phi, &v0, &rho, &u0), n);
    ledger.lower_step("correlation_cut", cut_corr.re, c / 2.0);

    let (u1, u2) = split_partial_isometries(&u0, &p, &st.one_m, tol)?;
    let (v1, v2) = split_partial_isometries(&v0, &p, &st.one_m, tol)?;
    let us = [u1, u2];
    let vs = [v1, v2];
    let mut values = [0.0; 4];
    let mut best = (0, 0, Complex64::new(0.0, 0.0));
    for i in 0..2 {
        for j in 0..2 {
            let z = trace_correlation(&correlation_words(&st.phi, &vs[j], &rho, &us[i]), n);
            values[2 * i + j] = z.norm();
            ledger.info(&format!("pair_{}{}", i + 1, j + 1), z.norm());
            if z.norm() > best.2.norm() {
                best = (i, j, z);
            }
        }
    }
    let threshold = c / 2.0;
    if best.2.norm() < threshold - tol.slack_for(threshold) {
        return Err(Error::SelectionFailure { values, threshold });
    }
    let (bi, bj, z) = best;
    ledger.info("selected_pair", (2 * bi + bj) as f64);
    let phase = phase_of(z);
    let u = match phase {
        Some(w) => us[bi].scale(w),
        None => us[bi].clone(),
    };
    let v_sel = vs[bj].clone();
    let corr = trace_correlation(&correlation_words(&st.phi, &v_sel, &rho, &u), n);
    ledger.info("correlation_imag", corr.im);

    let tau_uu = tau(&u.mul_adjoint(&u), n);
    let tau_vv = tau(&v_sel.mul_adjoint(&v_sel), n);
    ledger.lower_bound("trace_uu_lower", tau_uu, c / 2.0);
    ledger.bound("trace_uu_below_p", tau_uu - tau_p, 0.0);
    ledger.bound("trace_p_upper", tau_p, 2.0 / c);
    ledger.lower_bound("trace_vv_lower", tau_vv, c / 2.0);
    ledger.bound("trace_vv_below_p", tau_vv - tau_p, 0.0);
    ledger.lower_bound("correlation", corr.re, c / 2.0);
    ledger.info("trace_p", tau_p);

    soundness(&mut ledger, &st, &p, &rho, &u, &v_sel, Some(&a), phi);
    ledger.sound("u_partial_isometry", partial_isometry_defect(&u), SOUND_TOL);
    ledger.sound("v_partial_isometry", partial_isometry_defect(&v_sel), SOUND_TOL);

    Ok(RecoveryResult {
        pipeline: "trace_c".into(),
        ambient: st.ambient,
        seminorm: Seminorm::hilbert_schmidt(n),
        variant: Variant::Full,
        epsilon: c,
        level: c,
        dilation_rank: st.dilation.m,
        rank_p: cut.rank,
        tie_fired: cut.tie_fired,
        u_partial_isometry: true,
        v_partial_isometry: true,
        phase_degenerate: phase.is_none(),
        phase,
        p,
        u,
        v: v_sel,
        rho: GroupMap::new(phi.group_arc().clone(), rho)?,
        pi: Some(GroupMap::new(phi.group_arc().clone(), st.pi)?),
        ledger,
    })
}

/// Orthonormal basis of the range of a projection (eigenvalues above 1/2).
pub(crate) fn range_basis(p: &CMatrix, tol: &ToleranceProfile) -> Result<Vec<Vec<Complex64>>> {
    let e = herm_eig(&p.hermitian_part(), tol)?;
    Ok((0..e.values.len())
        .rev()
        .filter(|&i| e.values[i] > 0.5)
        .map(|i| e.vectors.column(i))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::matcore::{ONE, ZERO};
    use crate::random::{random_contraction, SplitMix64};
    use std::sync::Arc;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn regular(spec: &str) -> GroupMap {
        let g = Arc::new(FiniteGroup::parse(spec).unwrap());
        let k = g.order();
        let gg = g.clone();
        GroupMap::from_fn(g, |a| {
            CMatrix::from_fn(k, k, |x, y| if x == gg.mul(a, y) { ONE } else { ZERO })
        })
        .unwrap()
    }

    fn assert_ledger(r: &RecoveryResult) {
        for e in &r.ledger.entries {
            assert!(e.pass, "{} failed: {e:?}", r.pipeline);
        }
    }

    #[test]
    fn representation_recovers_exactly() {
        let phi = regular("cyclic:3");
        let s = Seminorm::hilbert_schmidt(3);
        let r = recover_u2(&phi, &s, Variant::Full, &tol()).unwrap();
        assert_ledger(&r);
        assert_eq!(r.epsilon, 0.0);
        assert_eq!(r.rank_p, 3);
        for e in r.ledger.entries.iter().filter(|e| e.kind != EntryKind::Soundness) {
            if e.relation == Relation::Le && e.bound == 0.0 {
                assert!(e.value < 1e-7, "{e:?}");
            }
        }
        let cols = r.u.adjoint_mul(&r.u);
        assert!(cols.max_abs_diff(&r.unit()) < 1e-9);
    }

    #[test]
    fn early_variant_uses_raw_v() {
        let phi = regular("cyclic:2");
        let r = recover_u2(&phi, &Seminorm::operator(), Variant::Early, &tol()).unwrap();
        assert_ledger(&r);
        assert!(!r.v_partial_isometry);
        assert_eq!(r.ledger.get("correlation_defect").unwrap().bound, 0.0);
    }

    #[test]
    fn random_map_pipelines_run() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let mut rng = SplitMix64::new(90);
        let phi = GroupMap::from_fn(g, |_| random_contraction(&mut rng, 2, 2, 1.0)).unwrap();
        let s = Seminorm::hilbert_schmidt(2);
        let r = recover_u2(&phi, &s, Variant::Full, &tol()).unwrap();
        for e in r.ledger.entries.iter().filter(|e| e.kind == EntryKind::Soundness) {
            assert!(e.pass, "{e:?}");
        }
        let c = trace_corr_a(&phi).value;
        let t = recover_trace_c(&phi, c, &tol()).unwrap();
        assert_ledger(&t);
    }

    #[test]
    fn trace99_on_representation() {
        let phi = regular("dihedral:2");
        let r = recover_trace99(&phi, None, &tol()).unwrap();
        assert_ledger(&r);
        let corr = r.ledger.get("trace_correlation").unwrap().value;
        assert!((corr - 1.0).abs() < 1e-9);
        let w = r.phase.unwrap();
        assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn trace_c_hypothesis_is_checked() {
        let phi = GroupMap::zero(Arc::new(FiniteGroup::cyclic(2).unwrap()), 1).unwrap();
        assert!(matches!(
            recover_trace_c(&phi, 0.5, &tol()),
            Err(Error::HypothesisViolation(_))
        ));
        let big = GroupMap::constant(Arc::new(FiniteGroup::cyclic(2).unwrap()), CMatrix::identity(1).scale_real(2.0)).unwrap();
        assert!(matches!(
            recover_u2(&big, &Seminorm::operator(), Variant::Full, &tol()),
            Err(Error::NotContractive { .. })
        ));
    }
}
