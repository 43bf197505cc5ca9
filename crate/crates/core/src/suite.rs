//! The acceptance matrix: one check per criterion, shared by the `suite`
//! pipeline and the acceptance test target.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dilation::{is_positive_definite, stinespring, tilde};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupMap};
use crate::instances::{character, InstanceSpec};
use crate::matcore::CMatrix;
use crate::random::{random_contraction, random_unitary, SplitMix64};
use crate::recovery::{
    dimension_adjust, kazhdan_snap, recover_trace99, recover_trace_c, recover_u2, stabilize, AdjustCase,
    BoundLedger, EntryKind, Variant, SNAP_EPSILON_LIMIT,
};
use crate::seminorms::{run_catalogue, Seminorm};
use crate::tolerance::ToleranceProfile;
use crate::uniformity::{self, naive, KernelOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub pass: bool,
    /// False when the host cannot meet the criterion (e.g. too few cores).
    pub attainable: bool,
    pub detail: String,
    pub metrics: Vec<Metric>,
    pub elapsed_s: f64,
}

struct Acc {
    metrics: Vec<Metric>,
    notes: Vec<String>,
    pass: bool,
}

impl Acc {
    fn new() -> Self {
        Self {
            metrics: Vec::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push(Metric {
            name: name.to_string(),
            value,
        });
    }

    fn fail(&mut self, note: String) {
        self.pass = false;
        if self.notes.len() < 12 {
            self.notes.push(note);
        }
    }

    fn require(&mut self, ok: bool, note: impl FnOnce() -> String) {
        if !ok {
            self.fail(note());
        }
    }

    fn finish(self, id: usize, title: &str, start: Instant, attainable: bool) -> CriterionReport {
        CriterionReport {
            id,
            title: title.to_string(),
            pass: self.pass,
            attainable,
            detail: if self.notes.is_empty() {
                "ok".into()
            } else {
                self.notes.join("; ")
            },
            metrics: self.metrics,
            elapsed_s: start.elapsed().as_secs_f64(),
        }
    }
}

/// One representative of every isomorphism class of groups of order at most `max`
/// (up to 12).
pub fn small_groups(max: usize) -> Vec<&'static str> {
    const ALL: [(usize, &str); 24] = [
        (1, "cyclic:1"),
        (2, "cyclic:2"),
        (3, "cyclic:3"),
        (4, "cyclic:4"),
        (4, "product:cyclic:2,cyclic:2"),
        (5, "cyclic:5"),
        (6, "cyclic:6"),
        (6, "symmetric:3"),
        (7, "cyclic:7"),
        (8, "cyclic:8"),
        (8, "product:cyclic:2,cyclic:4"),
        (8, "product:cyclic:2,cyclic:2,cyclic:2"),
        (8, "dihedral:4"),
        (8, "dicyclic:2"),
        (9, "cyclic:9"),
        (9, "product:cyclic:3,cyclic:3"),
        (10, "cyclic:10"),
        (10, "dihedral:5"),
        (11, "cyclic:11"),
        (12, "cyclic:12"),
        (12, "product:cyclic:2,cyclic:6"),
        (12, "dihedral:6"),
        (12, "alternating:4"),
        (12, "dicyclic:3"),
    ];
    ALL.iter().filter(|(o, _)| *o <= max).map(|(_, s)| *s).collect()
}

fn group(spec: &str) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::parse(spec).expect("built-in group spec"))
}

/// Contractive map with operator norms in `[1/2, 1]`.
pub fn random_contractive_map(rng: &mut SplitMix64, g: &Arc<FiniteGroup>, n: usize) -> GroupMap {
    GroupMap::from_fn(g.clone(), |_| {
        let norm = rng.uniform(0.5, 1.0);
        random_contraction(rng, n, n, norm)
    })
    .expect("square values")
}

fn ledger_kind_failures(l: &BoundLedger, kind: EntryKind) -> Vec<String> {
    l.failures()
        .filter(|e| e.kind == kind)
        .map(|e| format!("{}={:.3e}>{:.3e}", e.name, e.value, e.bound))
        .collect()
}

pub fn criterion_1(seed: u64, tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    for s in [Seminorm::operator(), Seminorm::schatten(1.0, 4), Seminorm::schatten(2.0, 4)] {
        match run_catalogue(&s, 1000, 8, seed, tol) {
            Ok(rows) => {
                for row in rows {
                    acc.metric(&format!("{}:{}", s, row.tag.name()), row.worst_slack);
                    acc.require(row.failures == 0 && row.worst_slack >= -1e-8, || {
                        format!("{} {} failures={} worst={:.3e}", s, row.tag.name(), row.failures, row.worst_slack)
                    });
                }
            }
            Err(e) => acc.fail(format!("{s}: {e}")),
        }
    }
    let t = start.elapsed().as_secs_f64();
    acc.require(t <= 30.0, || format!("runtime {t:.1}s > 30s"));
    acc.finish(1, "seminorm catalogue", start, true)
}

/// The positivity / dilation corpus: 200 maps over groups of order <= 12, dims <= 4.
fn dilation_corpus(seed: u64) -> Vec<GroupMap> {
    let groups = small_groups(12);
    let mut rng = SplitMix64::derived(seed, 2);
    (0..200)
        .map(|t| {
            let g = group(groups[t % groups.len()]);
            let n = 1 + rng.below(4);
            random_contractive_map(&mut rng, &g, n)
        })
        .collect()
}

pub fn criterion_2(seed: u64, tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let mut worst = f64::INFINITY;
    for (t, phi) in dilation_corpus(seed).iter().enumerate() {
        match is_positive_definite(&tilde(phi), tol) {
            Ok(rep) => {
                worst = worst.min(rep.min_eigenvalue.min(rep.min_eigenvalue_right));
                acc.require(rep.min_eigenvalue >= -1e-9, || {
                    format!("map {t}: min eigenvalue {:.3e}", rep.min_eigenvalue)
                });
            }
            Err(e) => acc.fail(format!("map {t}: {e}")),
        }
    }
    acc.metric("min_gram_eigenvalue", worst);
    let t = start.elapsed().as_secs_f64();
    acc.require(t <= 120.0, || format!("runtime {t:.1}s > 120s"));
    acc.finish(2, "positivity of the averaged map", start, true)
}

pub fn criterion_3(seed: u64, tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let (mut rec, mut mult, mut norm): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (t, phi) in dilation_corpus(seed).iter().enumerate() {
        let psi = tilde(phi);
        match stinespring(&psi, tol) {
            Ok(d) => {
                let c = d.verify(&psi);
                rec = rec.max(c.reconstruction);
                mult = mult.max(c.multiplicativity);
                norm = norm.max(c.norm_identity);
                acc.require(c.reconstruction <= 1e-8 && c.multiplicativity <= 1e-8 && c.norm_identity <= 1e-8, || {
                    format!("map {t}: {c:?}")
                });
            }
            Err(e) => acc.fail(format!("map {t}: {e}")),
        }
    }
    acc.metric("reconstruction", rec);
    acc.metric("multiplicativity", mult);
    acc.metric("norm_identity", norm);
    acc.finish(3, "dilation soundness", start, true)
}

pub fn criterion_4(seed: u64, _tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let groups = small_groups(12);
    let mut rng = SplitMix64::derived(seed, 4);
    let mut worst = f64::INFINITY;
    for t in 0..500 {
        let g = group(groups[t % groups.len()]);
        let n = 1 + rng.below(4);
        let phi = random_contractive_map(&mut rng, &g, n);
        let a = uniformity::trace_corr_a(&phi).value;
        let b = uniformity::trace_corr_b(&phi).value;
        worst = worst.min(a).min(b);
        acc.require(a >= -1e-9 && b >= -1e-9, || format!("map {t}: {a:.3e}, {b:.3e}"));
    }
    acc.metric("min_trace_correlation", worst);
    acc.finish(4, "non-negative trace correlations", start, true)
}

/// Cutdowns of rank `n-1`, `n-2` and perturbations `1e-4, 1e-3, 1e-2` of
/// regular representations.
pub fn certification_matrix() -> Vec<String> {
    let mut out = Vec::new();
    for (g, n) in [("cyclic:8", 8), ("dihedral:4", 8), ("symmetric:3", 6)] {
        for r in [n - 1, n - 2] {
            out.push(format!("cutdown:r={r}@regular@{g}?seed=11"));
        }
        for d in ["0.0001", "0.001", "0.01"] {
            out.push(format!("perturb:d={d}@regular@{g}?seed=11"));
        }
    }
    out
}

fn build(spec: &str) -> Result<GroupMap> {
    spec.parse::<InstanceSpec>()?.build()
}

pub fn criterion_5(_seed: u64, tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let mut bounds = 0;
    let mut step_failures = 0;
    for spec in certification_matrix() {
        let phi = match build(&spec) {
            Ok(p) => p,
            Err(e) => {
                acc.fail(format!("{spec}: {e}"));
                continue;
            }
        };
        let s = Seminorm::hilbert_schmidt(phi.dim());
        for variant in [Variant::Full, Variant::Early] {
            match recover_u2(&phi, &s, variant, tol) {
                Ok(r) => {
                    bounds += r.ledger.entries.iter().filter(|e| e.kind == EntryKind::Bound).count();
                    step_failures += ledger_kind_failures(&r.ledger, EntryKind::Step).len();
                    let mut bad = ledger_kind_failures(&r.ledger, EntryKind::Bound);
                    bad.extend(ledger_kind_failures(&r.ledger, EntryKind::Soundness));
                    acc.require(bad.is_empty(), || format!("{spec} {variant:?}: {}", bad.join(",")));
                }
                Err(e) => acc.fail(format!("{spec} {variant:?}: {e}")),
            }
        }
    }
    acc.metric("bounds_checked", bounds as f64);
    acc.metric("step_failures", step_failures as f64);
    let t = start.elapsed().as_secs_f64();
    acc.require(t <= 300.0, || format!("runtime {t:.1}s > 300s"));
    acc.finish(5, "seminorm recovery bounds", start, true)
}

pub fn criterion_6(_seed: u64, tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let mut worst_ratio: f64 = 0.0;
    let mut step_failures = 0;
    for spec in certification_matrix() {
        let phi = match build(&spec) {
            Ok(p) => p,
            Err(e) => {
                acc.fail(format!("{spec}: {e}"));
                continue;
            }
        };
        match recover_trace99(&phi, None, tol) {
            Ok(r) => {
                step_failures += ledger_kind_failures(&r.ledger, EntryKind::Step).len();
                let mut bad = ledger_kind_failures(&r.ledger, EntryKind::Bound);
                bad.extend(ledger_kind_failures(&r.ledger, EntryKind::Soundness));
                acc.require(bad.is_empty(), || format!("{spec}: {}", bad.join(",")));
                if let (Some(v), Some(raw)) = (
                    r.ledger.get("v_defect_range"),
                    r.ledger.info_value("v_defect_range_raw_constant_bound"),
                ) {
                    if raw > 0.0 {
                        worst_ratio = worst_ratio.max(v.value / raw);
                    }
                }
            }
            Err(e) => acc.fail(format!("{spec}: {e}")),
        }
    }
    acc.metric("worst_v_defect_over_95_root_2eps", worst_ratio);
    acc.metric("step_failures", step_failures as f64);
    acc.finish(6, "high-correlation trace bounds", start, true)
}

pub fn criterion_7(seed: u64, tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let groups = small_groups(8);
    let mut rng = SplitMix64::derived(seed, 7);
    let mut selection_failures = 0;
    let mut min_c = f64::INFINITY;
    for t in 0..50 {
        let g = group(groups[t % groups.len()]);
        let n = 1 + rng.below(3);
        let phi = random_contractive_map(&mut rng, &g, n);
        let c = uniformity::trace_corr_a(&phi).value;
        min_c = min_c.min(c);
        match recover_trace_c(&phi, c, tol) {
            Ok(r) => {
                let mut bad = ledger_kind_failures(&r.ledger, EntryKind::Bound);
                bad.extend(ledger_kind_failures(&r.ledger, EntryKind::Soundness));
                acc.require(bad.is_empty(), || format!("map {t} (c={c:.3}): {}", bad.join(",")));
            }
            Err(Error::SelectionFailure { values, threshold }) => {
                selection_failures += 1;
                acc.fail(format!("map {t}: selection failure {values:?} < {threshold}"));
            }
            Err(e) => acc.fail(format!("map {t}: {e}")),
        }
    }
    acc.metric("selection_failures", selection_failures as f64);
    acc.metric("min_c", min_c);
    acc.finish(7, "low-correlation trace bounds", start, true)
}

/// Unitary operator-norm perturbations used for the snap.
pub fn snap_instances() -> Vec<String> {
    let mut out = Vec::new();
    for base in [
        "regular@cyclic:4",
        "regular@dihedral:3",
        "irrep2@symmetric:3",
        "character:1@cyclic:5",
        "sum(irrep2@symmetric:3;regular@symmetric:3)",
    ] {
        for d in ["0.0001", "0.001", "0.003"] {
            out.push(format!("perturb:d={d}@{base}?seed=3"));
        }
    }
    out
}

/// Unitary maps for the dimension adjustment.
pub fn adjust_instances() -> Vec<String> {
    let mut out = Vec::new();
    for g in ["cyclic:4", "cyclic:6", "symmetric:3", "dihedral:4"] {
        out.push(format!("perturb:d=0.001@regular@{g}?seed=5"));
    }
    for (base, n) in [("regular@symmetric:3", 6), ("regular@cyclic:8", 8), ("regular@dihedral:4", 8)] {
        out.push(format!("unitarize@cutdown:r={}@{base}?seed=5", n - 1));
    }
    out.push("perturb:d=0.002@sum(trivial:1@cyclic:2;regular@cyclic:2)?seed=5".into());
    // rank deficits only show up far from any representation
    out.push("unitarize@random:3@cyclic:3?seed=2".into());
    out.push("unitarize@random:2@cyclic:3?seed=4".into());
    out
}

pub fn criterion_8(_seed: u64, tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let op = Seminorm::operator();
    let mut worst_ratio: f64 = 0.0;
    let mut snaps = 0;
    for spec in snap_instances() {
        let run = || -> Result<(f64, BoundLedger, BoundLedger)> {
            let phi = build(&spec)?;
            let r = stabilize(&phi, &op, tol)?;
            let eps = r.epsilon;
            if eps >= SNAP_EPSILON_LIMIT {
                return Err(Error::HypothesisViolation(format!("measured epsilon {eps}")));
            }
            let s = kazhdan_snap(&r, &phi, tol)?;
            Ok((eps, r.ledger, s.ledger))
        };
        match run() {
            Ok((eps, stab, snap)) => {
                snaps += 1;
                let mut bad = ledger_kind_failures(&stab, EntryKind::Bound);
                bad.extend(ledger_kind_failures(&snap, EntryKind::Bound));
                bad.extend(ledger_kind_failures(&snap, EntryKind::Soundness));
                acc.require(bad.is_empty(), || format!("{spec} (eps={eps:.2e}): {}", bad.join(",")));
                if let Some(v) = snap.info_value("uniform_distance_over_2eps") {
                    worst_ratio = worst_ratio.max(v);
                }
            }
            Err(e) => acc.fail(format!("{spec}: {e}")),
        }
    }
    acc.metric("snapped", snaps as f64);
    acc.metric("worst_distance_over_2eps", worst_ratio);

    let mut cases = [0usize; 2];
    for spec in adjust_instances() {
        let run = || -> Result<(f64, AdjustCase, BoundLedger)> {
            let phi = build(&spec)?;
            let r = stabilize(&phi, &Seminorm::hilbert_schmidt(phi.dim()), tol)?;
            let a = dimension_adjust(&r, &phi, tol)?;
            Ok((r.epsilon, a.case, a.ledger))
        };
        match run() {
            Ok((eps, case, ledger)) => {
                cases[(case == AdjustCase::Deficit) as usize] += 1;
                let mut bad = ledger_kind_failures(&ledger, EntryKind::Bound);
                bad.extend(ledger_kind_failures(&ledger, EntryKind::Soundness));
                acc.require(bad.is_empty(), || format!("{spec} (eps={eps:.2e}, {case:?}): {}", bad.join(",")));
            }
            Err(e) => acc.fail(format!("{spec}: {e}")),
        }
    }
    acc.metric("surplus_cases", cases[0] as f64);
    acc.metric("deficit_cases", cases[1] as f64);
    acc.finish(8, "stability, snapping and dimension adjustment", start, true)
}

pub fn criterion_9(seed: u64, _tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let groups = small_groups(12);
    let mut rng = SplitMix64::derived(seed, 9);
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let spec = groups[t % groups.len()];
        let g = group(spec);
        let n = 1 + rng.below(3);
        let phi = random_contractive_map(&mut rng, &g, n);
        let mut cmp = |what: &str, a: f64, b: f64| {
            let d = (a - b).abs();
            worst = worst.max(d);
            acc.require(d <= 1e-9, || format!("{spec} n={n} {what}: {a} vs {b}"));
        };
        for s in [Seminorm::operator(), Seminorm::schatten(1.0, n), Seminorm::hilbert_schmidt(n)] {
            cmp("defect_a", uniformity::defect_a(&phi, &s).value, naive::defect_a(&phi, &s).value);
            cmp("defect_b", uniformity::defect_b(&phi, &s).value, naive::defect_b(&phi, &s).value);
            let (h, hn) = (uniformity::mean_hom_defect(&phi, &s), naive::mean_hom_defect(&phi, &s));
            cmp("mean_hom", h.mean, hn.mean);
            cmp("uniform_hom", h.uniform, hn.uniform);
        }
        cmp("trace_corr_a", uniformity::trace_corr_a(&phi).value, naive::trace_corr_a(&phi).value);
        cmp("trace_corr_b", uniformity::trace_corr_b(&phi).value, naive::trace_corr_b(&phi).value);
        cmp("u2", uniformity::u2_norm(&phi).value, naive::u2_norm(&phi).value);
    }
    acc.metric("worst_kernel_difference", worst);

    let mut worst_char: f64 = 0.0;
    for spec in groups.iter().filter(|s| s.starts_with("cyclic") || s.starts_with("product")) {
        let g = group(spec);
        for k in 0..g.order() {
            match character(&g, spec, k) {
                Ok(chi) => {
                    let u = uniformity::u2_norm(&chi).value;
                    worst_char = worst_char.max((u - 1.0).abs());
                    acc.require((u - 1.0).abs() <= 1e-12, || format!("character {k} of {spec}: u2 = {u}"));
                }
                Err(e) => acc.fail(format!("character {k} of {spec}: {e}")),
            }
        }
    }
    acc.metric("worst_character_u2_error", worst_char);
    for n in 1..=4 {
        for spec in ["cyclic:5", "symmetric:3", "dicyclic:3"] {
            let triv = GroupMap::constant(group(spec), CMatrix::identity(n)).expect("square");
            let u = uniformity::u2_norm(&triv).value;
            acc.require((u - n as f64).abs() <= 1e-9, || format!("trivial {n} on {spec}: u2 = {u}"));
        }
    }
    acc.finish(9, "kernel oracle equivalence", start, true)
}

pub fn criterion_10(seed: u64, _tol: &ToleranceProfile) -> CriterionReport {
    let start = Instant::now();
    let mut acc = Acc::new();
    let g = group("symmetric:4");
    let mut rng = SplitMix64::derived(seed, 10);
    let phi = GroupMap::from_fn(g, |_| random_unitary(&mut rng, 12)).expect("square");
    let s = Seminorm::hilbert_schmidt(12);
    let timed = |w: usize| {
        let t = Instant::now();
        let v = uniformity::defect_a_with(&phi, &s, &KernelOptions::with_workers(w)).value;
        (v, t.elapsed().as_secs_f64())
    };
    let (v1, t1) = timed(1);
    let (v2, _) = timed(2);
    let (v4, t4) = timed(4);
    let speedup = t1 / t4.max(1e-12);
    let cores = std::thread::available_parallelism().map(|c| c.get()).unwrap_or(1);
    acc.metric("defect_a", v1);
    acc.metric("single_thread_s", t1);
    acc.metric("four_workers_s", t4);
    acc.metric("speedup", speedup);
    acc.metric("available_cores", cores as f64);
    acc.require(v1.to_bits() == v2.to_bits() && v1.to_bits() == v4.to_bits(), || {
        format!("outputs differ: {v1:e} {v2:e} {v4:e}")
    });
    acc.require(t1 <= 10.0, || format!("single-threaded {t1:.2}s > 10s"));
    acc.require(speedup >= 3.0, || format!("speedup {speedup:.2} < 3 on {cores} core(s)"));
    acc.finish(10, "kernel performance envelope", start, cores >= 4)
}

type Check = fn(u64, &ToleranceProfile) -> CriterionReport;

pub const CRITERIA: [Check; 10] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
];

pub fn run_suite(seed: u64, tol: &ToleranceProfile) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| c(seed, tol)).collect()
}

impl CriterionReport {
    /// `PASS [n] title` or `FAIL [n] title: detail`.
    pub fn line(&self) -> String {
        if self.pass {
            format!("PASS [{}] {}", self.id, self.title)
        } else if !self.attainable {
            format!("FAIL [{}] {} (not attainable on this host): {}", self.id, self.title, self.detail)
        } else {
            format!("FAIL [{}] {}: {}", self.id, self.title, self.detail)
        }
    }
}
