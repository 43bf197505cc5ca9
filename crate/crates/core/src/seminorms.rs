//! Unitarily invariant seminorms on matrix algebras and a randomized check
//! surface for the standard inequalities they satisfy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupMap};
use crate::matcore::{min_eigenvalue, operator_norm, polar, singular_values, sqrt_psd, CMatrix};
use crate::random::{random_complex, random_contraction, random_psd, SplitMix64};
use crate::tolerance::ToleranceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeminormKind {
    OperatorNorm,
    SchattenP,
}

/// Operator norm, or a Schatten-p norm against the trace `Tr / ref_dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seminorm {
    pub kind: SeminormKind,
    pub p: f64,
    pub ref_dim: usize,
}

impl Seminorm {
    pub fn operator() -> Self {
        Self {
            kind: SeminormKind::OperatorNorm,
            p: f64::INFINITY,
            ref_dim: 1,
        }
    }

    pub fn schatten(p: f64, ref_dim: usize) -> Self {
        assert!(p >= 1.0 && ref_dim >= 1);
        Self {
            kind: SeminormKind::SchattenP,
            p,
            ref_dim,
        }
    }

    /// Normalized Hilbert-Schmidt norm with `||1_n||_2 = 1`.
    pub fn hilbert_schmidt(n: usize) -> Self {
        Self::schatten(2.0, n)
    }

    pub fn is_operator(&self) -> bool {
        self.kind == SeminormKind::OperatorNorm
    }

    pub fn is_schatten2(&self) -> bool {
        self.kind == SeminormKind::SchattenP && self.p == 2.0
    }

    pub fn with_ref_dim(self, ref_dim: usize) -> Self {
        match self.kind {
            SeminormKind::OperatorNorm => self,
            SeminormKind::SchattenP => Self::schatten(self.p, ref_dim),
        }
    }

    pub fn eval(&self, t: &CMatrix) -> f64 {
        match self.kind {
            SeminormKind::OperatorNorm => operator_norm(t),
            SeminormKind::SchattenP if self.p == 2.0 => {
                (t.frobenius_norm_sqr() / self.ref_dim as f64).sqrt()
            }
            SeminormKind::SchattenP => {
                let s = singular_values(t).unwrap_or_else(|_| vec![t.frobenius_norm()]);
                let sum: f64 = if self.p == 1.0 {
                    s.iter().sum()
                } else {
                    s.iter().map(|x| x.powf(self.p)).sum()
                };
                (sum / self.ref_dim as f64).powf(1.0 / self.p)
            }
        }
    }

    /// `||1 - T||`; the identity has the dimension of `t`.
    pub fn eval_one_minus(&self, t: &CMatrix) -> f64 {
        self.eval(&(&CMatrix::identity(t.rows()) - t))
    }
}

impl fmt::Display for Seminorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SeminormKind::OperatorNorm => write!(f, "op"),
            SeminormKind::SchattenP => write!(f, "S{}:ref={}", self.p, self.ref_dim),
        }
    }
}

impl FromStr for Seminorm {
    type Err = Error;

    /// `op`, `S<p>` or `S<p>:ref=<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "op" || s == "operator" {
            return Ok(Self::operator());
        }
        let bad = || Error::Parse(format!("bad seminorm spec `{s}`"));
        let rest = s.strip_prefix('S').ok_or_else(bad)?;
        let (p, ref_dim) = match rest.split_once(':') {
            None => (rest, 1),
            Some((p, opt)) => {
                let n = opt.strip_prefix("ref=").ok_or_else(bad)?;
                (p, n.parse::<usize>().map_err(|_| bad())?)
            }
        };
        let p: f64 = p.parse().map_err(|_| bad())?;
        if !(p >= 1.0) || !p.is_finite() || ref_dim == 0 {
            return Err(bad());
        }
        Ok(Self::schatten(p, ref_dim))
    }
}

impl Serialize for Seminorm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Seminorm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `M_n` viewed as the top-left corner of `M_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSpace {
    pub corner_dim: usize,
    pub ambient_dim: usize,
}

impl AmbientSpace {
    pub fn new(corner_dim: usize, ambient_dim: usize) -> Self {
        assert!(ambient_dim >= corner_dim);
        Self {
            corner_dim,
            ambient_dim,
        }
    }

    /// The diagonal projection `1_M` onto the first `corner_dim` coordinates.
    pub fn unit(&self) -> CMatrix {
        CMatrix::corner_projection(self.ambient_dim, self.corner_dim)
    }

    pub fn embed(&self, t: &CMatrix) -> CMatrix {
        t.embed(self.ambient_dim, self.ambient_dim)
    }
}

/// Labels of the inequality catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InequalityTag {
    /// `||RTS|| <= ||R||_op ||T|| ||S||_op`
    Spade,
    /// `||T|| = ||T*|| = |||T|||`
    Diamond,
    /// `||T*T|| = ||TT*||`
    Club,
    /// `0 <= R <= S` implies `||R|| <= ||S||`
    Heart,
    /// `||P - S*S||, ||P - T*T|| <= 2 ||P - S*T||` for contractions with `P >= S*S, T*T`
    Sharp,
    /// `||S*T|| <= (||S*S|| + ||T*T||)/2 = (||SS*|| + ||TT*||)/2`
    Flat,
    /// `||E phi|| <= E ||phi||`
    Mean,
}

impl InequalityTag {
    pub const ALL: [InequalityTag; 7] = [
        Self::Spade,
        Self::Diamond,
        Self::Club,
        Self::Heart,
        Self::Sharp,
        Self::Flat,
        Self::Mean,
    ];

    pub fn symbol(&self) -> &'static str {
        match self {
            Self::Spade => "♠",
            Self::Diamond => "♦",
            Self::Club => "♣",
            Self::Heart => "♥",
            Self::Sharp => "♯",
            Self::Flat => "♭",
            Self::Mean => "‡",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Spade => "spade",
            Self::Diamond => "diamond",
            Self::Club => "club",
            Self::Heart => "heart",
            Self::Sharp => "sharp",
            Self::Flat => "flat",
            Self::Mean => "mean",
        }
    }
}

/// Inputs for one inequality check.
#[derive(Debug, Clone)]
pub enum CheckInput {
    Spade { r: CMatrix, t: CMatrix, s: CMatrix },
    Diamond { t: CMatrix },
    Club { t: CMatrix },
    Heart { r: CMatrix, s: CMatrix },
    Sharp { s: CMatrix, t: CMatrix, p: CMatrix },
    Flat { s: CMatrix, t: CMatrix },
    Mean { phi: GroupMap },
}

impl CheckInput {
    pub fn tag(&self) -> InequalityTag {
        match self {
            Self::Spade { .. } => InequalityTag::Spade,
            Self::Diamond { .. } => InequalityTag::Diamond,
            Self::Club { .. } => InequalityTag::Club,
            Self::Heart { .. } => InequalityTag::Heart,
            Self::Sharp { .. } => InequalityTag::Sharp,
            Self::Flat { .. } => InequalityTag::Flat,
            Self::Mean { .. } => InequalityTag::Mean,
        }
    }
}

/// Outcome of one check; `slack = rhs - lhs` is negative exactly when the
/// inequality is violated. For equalities both directions are checked and the
/// tighter one is reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckReport {
    pub tag: InequalityTag,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

const CHECK_TOL: f64 = 1e-9;

fn tightest(tag: InequalityTag, parts: &[(f64, f64)]) -> CheckReport {
    let (lhs, rhs) = parts
        .iter()
        .copied()
        .min_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
        .expect("at least one comparison");
    let pass = parts.iter().all(|&(l, r)| l <= r + CHECK_TOL * (1.0 + r.abs()));
    CheckReport {
        tag,
        lhs,
        rhs,
        slack: rhs - lhs,
        pass,
    }
}

fn square_same(dims: &[&CMatrix]) -> Result<()> {
    let n = dims[0].rows();
    if dims.iter().all(|m| m.rows() == n && m.cols() == n) {
        Ok(())
    } else {
        Err(Error::PreconditionViolation("inputs must be square of equal size".into()))
    }
}

fn require_order(lo: &CMatrix, hi: &CMatrix, what: &str, tol: &ToleranceProfile) -> Result<()> {
    let gap = min_eigenvalue(&(hi - lo), tol)?;
    if gap < -tol.psd_tol * (1.0 + hi.max_abs()) {
        return Err(Error::PreconditionViolation(format!(
            "{what} fails: min eigenvalue {gap:e}"
        )));
    }
    Ok(())
}

pub fn check_inequality(s: &Seminorm, input: &CheckInput, tol: &ToleranceProfile) -> Result<CheckReport> {
    let tag = input.tag();
    let n = |m: &CMatrix| s.eval(m);
    let report = match input {
        CheckInput::Spade { r, t, s: sm } => {
            square_same(&[r, t, sm])?;
            let lhs = n(&r.matmul(t).matmul(sm));
            tightest(tag, &[(lhs, operator_norm(r) * n(t) * operator_norm(sm))])
        }
        CheckInput::Diamond { t } => {
            square_same(&[t])?;
            let a = n(t);
            let b = n(&t.adjoint());
            let c = n(&polar(t, tol)?.modulus);
            tightest(tag, &[(a, b), (b, a), (a, c), (c, a)])
        }
        CheckInput::Club { t } => {
            square_same(&[t])?;
            let a = n(&t.adjoint_mul(t));
            let b = n(&t.mul_adjoint(t));
            tightest(tag, &[(a, b), (b, a)])
        }
        CheckInput::Heart { r, s: sm } => {
            square_same(&[r, sm])?;
            require_order(&CMatrix::zeros(r.rows(), r.rows()), r, "0 <= R", tol)?;
            require_order(r, sm, "R <= S", tol)?;
            tightest(tag, &[(n(r), n(sm))])
        }
        CheckInput::Sharp { s: sm, t, p } => {
            square_same(&[sm, t, p])?;
            for (m, name) in [(sm, "S"), (t, "T")] {
                let op = operator_norm(m);
                if op > 1.0 + tol.psd_tol {
                    return Err(Error::PreconditionViolation(format!(
                        "||{name}||_op = {op} exceeds 1"
                    )));
                }
            }
            let ss = sm.adjoint_mul(sm);
            let tt = t.adjoint_mul(t);
            require_order(&ss, p, "P >= S*S", tol)?;
            require_order(&tt, p, "P >= T*T", tol)?;
            let rhs = 2.0 * n(&(p - &sm.adjoint_mul(t)));
            tightest(tag, &[(n(&(p - &ss)), rhs), (n(&(p - &tt)), rhs)])
        }
        CheckInput::Flat { s: sm, t } => {
            square_same(&[sm, t])?;
            let lhs = n(&sm.adjoint_mul(t));
            let mid = 0.5 * (n(&sm.adjoint_mul(sm)) + n(&t.adjoint_mul(t)));
            let right = 0.5 * (n(&sm.mul_adjoint(sm)) + n(&t.mul_adjoint(t)));
            tightest(tag, &[(lhs, mid), (mid, right), (right, mid)])
        }
        CheckInput::Mean { phi } => {
            let g = phi.group();
            let lhs = n(&phi.mean());
            let rhs = g.mean_scalar(|x| n(phi.at(x)));
            tightest(tag, &[(lhs, rhs)])
        }
    };
    Ok(report)
}

/// Draws admissible inputs for `tag` in dimension `dim`. Constrained inputs
/// are built to satisfy their hypotheses rather than rejection-sampled.
pub fn random_input(tag: InequalityTag, rng: &mut SplitMix64, dim: usize) -> CheckInput {
    let tol = ToleranceProfile::default();
    match tag {
        InequalityTag::Spade => CheckInput::Spade {
            r: random_complex(rng, dim, dim),
            t: random_complex(rng, dim, dim),
            s: random_complex(rng, dim, dim),
        },
        InequalityTag::Diamond => CheckInput::Diamond {
            t: random_complex(rng, dim, dim),
        },
        InequalityTag::Club => CheckInput::Club {
            t: random_complex(rng, dim, dim),
        },
        InequalityTag::Heart => {
            let s = random_psd(rng, dim);
            let norm = rng_unit(rng);
            let c0 = random_contraction(rng, dim, dim, norm);
            let c = c0.adjoint_mul(&c0);
            let h = sqrt_psd(&s, &tol).expect("PSD input");
            let r = h.matmul(&c).matmul(&h).hermitian_part();
            CheckInput::Heart { r, s }
        }
        InequalityTag::Sharp => {
            let (ns, nt) = (rng_unit(rng), rng_unit(rng));
            let s = random_contraction(rng, dim, dim, ns);
            let t = random_contraction(rng, dim, dim, nt);
            let extra = random_psd(rng, dim).scale_real(0.1 * rng.next_f64());
            let p = (&(&s.adjoint_mul(&s) + &t.adjoint_mul(&t)) + &extra).hermitian_part();
            CheckInput::Sharp { s, t, p }
        }
        InequalityTag::Flat => CheckInput::Flat {
            s: random_complex(rng, dim, dim),
            t: random_complex(rng, dim, dim),
        },
        InequalityTag::Mean => {
            let order = 1 + rng.below(12);
            let group = std::sync::Arc::new(FiniteGroup::cyclic(order).expect("small order"));
            let phi = GroupMap::from_fn(group, |_| random_complex(rng, dim, dim))
                .expect("uniform dimension");
            CheckInput::Mean { phi }
        }
    }
}

fn rng_unit(rng: &mut SplitMix64) -> f64 {
    // norms in (0, 1], occasionally exactly 1
    if rng.below(4) == 0 {
        1.0
    } else {
        1.0 - rng.next_f64()
    }
}

/// Worst outcome of a randomized run for one tag.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogueRow {
    pub tag: InequalityTag,
    pub seminorm: Seminorm,
    pub trials: usize,
    pub failures: usize,
    /// Smallest `rhs - lhs` seen, relative to `1 + rhs`.
    pub worst_slack: f64,
}

/// Runs every tag `trials` times on random inputs of dimension `1..=max_dim`.
pub fn run_catalogue(
    s: &Seminorm,
    trials: usize,
    max_dim: usize,
    seed: u64,
    tol: &ToleranceProfile,
) -> Result<Vec<CatalogueRow>> {
    let mut rows = Vec::new();
    for (k, tag) in InequalityTag::ALL.iter().enumerate() {
        let mut rng = SplitMix64::derived(seed, k as u64);
        let mut failures = 0;
        let mut worst = f64::INFINITY;
        for _ in 0..trials {
            let dim = 1 + rng.below(max_dim.max(1));
            let input = random_input(*tag, &mut rng, dim);
            let rep = check_inequality(s, &input, tol)?;
            if !rep.pass {
                failures += 1;
            }
            worst = worst.min(rep.slack / (1.0 + rep.rhs.abs()));
        }
        rows.push(CatalogueRow {
            tag: *tag,
            seminorm: *s,
            trials,
            failures,
            worst_slack: worst,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{svd, Complex64};
    use crate::random::random_unitary;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn normalized_identity() {
        let s: Seminorm = "S2:ref=2".parse().unwrap();
        assert!((s.eval(&CMatrix::identity(2)) - 1.0).abs() < 1e-15);
        assert_eq!(Seminorm::operator().eval(&CMatrix::from_real_diag(&[3.0, -1.0])), 3.0);
    }

    #[test]
    fn schatten_one_matches_svd() {
        let mut rng = SplitMix64::new(50);
        let t = random_complex(&mut rng, 4, 4);
        let oracle: f64 = svd(&t).unwrap().singulars.iter().sum::<f64>() / 4.0;
        let got = Seminorm::schatten(1.0, 4).eval(&t);
        assert!((got - oracle).abs() < 1e-12);
        // p = 2 shortcut agrees with the generic formula
        let s2 = Seminorm::schatten(2.0, 3).eval(&t);
        let generic = (svd(&t).unwrap().singulars.iter().map(|x| x * x).sum::<f64>() / 3.0).sqrt();
        assert!((s2 - generic).abs() < 1e-12);
    }

    #[test]
    fn parse_and_display() {
        for spec in ["op", "S2:ref=4", "S1:ref=6", "S1.5:ref=2"] {
            let s: Seminorm = spec.parse().unwrap();
            assert_eq!(s.to_string(), spec);
        }
        assert_eq!("S2".parse::<Seminorm>().unwrap().ref_dim, 1);
        for bad in ["S0.5", "S2:ref=0", "L2", "S2:dim=3", "Sinf"] {
            assert!(bad.parse::<Seminorm>().is_err(), "{bad}");
        }
        let json = serde_json::to_string(&Seminorm::schatten(2.0, 4)).unwrap();
        assert_eq!(json, "\"S2:ref=4\"");
    }

    #[test]
    fn unitary_invariance() {
        let mut rng = SplitMix64::new(51);
        for s in [Seminorm::operator(), Seminorm::schatten(1.0, 5), Seminorm::schatten(2.0, 5)] {
            let t = random_complex(&mut rng, 5, 5);
            let u = random_unitary(&mut rng, 5);
            let v = random_unitary(&mut rng, 5);
            let a = s.eval(&t);
            let b = s.eval(&u.matmul(&t).matmul(&v));
            assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        }
    }

    #[test]
    fn diamond_on_diagonal() {
        let mut t = CMatrix::zeros(2, 2);
        t[(0, 0)] = Complex64::new(1.0, 1.0);
        let r = check_inequality(&Seminorm::schatten(2.0, 2), &CheckInput::Diamond { t }, &tol()).unwrap();
        assert!(r.pass);
        assert!((r.lhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn heart_equality_and_violation() {
        let mut rng = SplitMix64::new(52);
        let s = random_psd(&mut rng, 3);
        let r = check_inequality(
            &Seminorm::operator(),
            &CheckInput::Heart { r: s.clone(), s: s.clone() },
            &tol(),
        )
        .unwrap();
        assert!(r.pass);
        assert!(r.slack.abs() < 1e-12);
        let bad = CheckInput::Heart {
            r: s.scale_real(2.0),
            s,
        };
        assert!(matches!(
            check_inequality(&Seminorm::operator(), &bad, &tol()),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn sharp_on_random_admissible_inputs() {
        let mut rng = SplitMix64::new(53);
        let s2 = Seminorm::schatten(2.0, 5);
        for _ in 0..20 {
            let input = random_input(InequalityTag::Sharp, &mut rng, 5);
            let r = check_inequality(&s2, &input, &tol()).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn sharp_rejects_big_contraction() {
        let input = CheckInput::Sharp {
            s: CMatrix::identity(2).scale_real(2.0),
            t: CMatrix::zeros(2, 2),
            p: CMatrix::identity(2).scale_real(4.0),
        };
        assert!(check_inequality(&Seminorm::operator(), &input, &tol()).is_err());
    }

    #[test]
    fn small_catalogue_passes() {
        for s in [Seminorm::operator(), Seminorm::schatten(1.0, 3), Seminorm::schatten(2.0, 3)] {
            for row in run_catalogue(&s, 30, 5, 7, &tol()).unwrap() {
                assert_eq!(row.failures, 0, "{row:?}");
                assert!(row.worst_slack >= -1e-9);
            }
        }
    }

    #[test]
    fn ambient_unit() {
        let a = AmbientSpace::new(2, 4);
        let u = a.unit();
        assert_eq!(u.trace().re, 2.0);
        assert_eq!(a.embed(&CMatrix::identity(2)), u);
    }
}
