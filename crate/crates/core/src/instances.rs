//! Seeded generators of group maps.
//!
//! Grammar (a trailing `?seed=N` applies to the whole spec):
//!
//! ```text
//! spec    := node ["?seed=" u64]
//! node    := "regular@" GROUP
//!          | "character:" k "@" GROUP
//!          | "trivial:" n "@" GROUP | "zero:" n "@" GROUP
//!          | "random:" n "@" GROUP          random contractions
//!          | "irrep2@symmetric:3"
//!          | "sum(" node (";" node)+ ")"
//!          | "cutdown:r=" r "@" node
//!          | "perturb:d=" delta "@" node
//!          | "unitarize@" node              unitary polar part
//! ```
//!
//! All randomness comes from [`SplitMix64`]; every node draws from its own
//! stream derived from the seed and its position in the tree.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupMap};
use crate::matcore::{herm_eig, operator_norm, polar, CMatrix, Complex64, ONE, ZERO};
use crate::random::{random_contraction, random_hermitian, random_unitary, SplitMix64};
use crate::tolerance::ToleranceProfile;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceKind {
    Regular { group: String },
    Character { k: usize, group: String },
    Trivial { n: usize, group: String },
    Zero { n: usize, group: String },
    Random { n: usize, group: String },
    Irrep2,
    DirectSum(Vec<InstanceKind>),
    Cutdown { rank: usize, base: Box<InstanceKind> },
    Perturb { delta: f64, base: Box<InstanceKind> },
    Unitarize { base: Box<InstanceKind> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn build(&self) -> Result<GroupMap> {
        build(&self.kind, self.seed, 1)
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Splits on `sep` at parenthesis depth zero.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(bad(format!("unbalanced `)` in `{s}`")));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(bad(format!("unbalanced `(` in `{s}`")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(format!("bad {what} `{s}`")))
}

fn check_group(g: &str) -> Result<String> {
    FiniteGroup::parse(g)?;
    Ok(g.trim().to_string())
}

fn parse_node(s: &str) -> Result<InstanceKind> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("sum(") {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| bad(format!("`{s}` lacks a closing `)`")))?;
        let parts = split_top(inner, ';')?;
        if parts.len() < 2 {
            return Err(bad("a direct sum needs at least two summands"));
        }
        return Ok(InstanceKind::DirectSum(
            parts.into_iter().map(parse_node).collect::<Result<_>>()?,
        ));
    }
    let (head, rest) = s
        .split_once('@')
        .ok_or_else(|| bad(format!("instance `{s}` has no `@`")))?;
    let (name, arg) = match head.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (head, None),
    };
    let need = |what: &str| arg.ok_or_else(|| bad(format!("`{name}` needs {what}")));
    let boxed = || parse_node(rest).map(Box::new);
    Ok(match name {
        "regular" => InstanceKind::Regular { group: check_group(rest)? },
        "character" => InstanceKind::Character {
            k: parse_num(need("an index")?, "character index")?,
            group: check_group(rest)?,
        },
        "trivial" => InstanceKind::Trivial {
            n: parse_num(need("a dimension")?, "dimension")?,
            group: check_group(rest)?,
        },
        "zero" => InstanceKind::Zero {
            n: parse_num(need("a dimension")?, "dimension")?,
            group: check_group(rest)?,
        },
        "random" => InstanceKind::Random {
            n: parse_num(need("a dimension")?, "dimension")?,
            group: check_group(rest)?,
        },
        "irrep2" => {
            if rest.trim() != "symmetric:3" {
                return Err(bad("irrep2 is only defined on symmetric:3"));
            }
            InstanceKind::Irrep2
        }
        "cutdown" => {
            let r = need("`r=`")?
                .strip_prefix("r=")
                .ok_or_else(|| bad("cutdown takes `r=N`"))?;
            InstanceKind::Cutdown {
                rank: parse_num(r, "rank")?,
                base: boxed()?,
            }
        }
        "perturb" => {
            let d = need("`d=`")?
                .strip_prefix("d=")
                .ok_or_else(|| bad("perturb takes `d=X`"))?;
            let delta: f64 = parse_num(d, "noise level")?;
            if !(delta >= 0.0 && delta.is_finite()) {
                return Err(bad(format!("noise level {delta} must be finite and non-negative")));
            }
            InstanceKind::Perturb { delta, base: boxed()? }
        }
        "unitarize" => InstanceKind::Unitarize { base: boxed()? },
        _ => return Err(bad(format!("unknown instance kind `{name}`"))),
    })
}

impl FromStr for InstanceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, seed) = match s.rsplit_once('?') {
            Some((b, q)) => {
                let v = q
                    .trim()
                    .strip_prefix("seed=")
                    .ok_or_else(|| bad(format!("unknown query `{q}`")))?;
                (b, parse_num(v, "seed")?)
            }
            None => (s, DEFAULT_SEED),
        };
        Ok(Self {
            kind: parse_node(body)?,
            seed,
        })
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Regular { group } => write!(f, "regular@{group}"),
            Self::Character { k, group } => write!(f, "character:{k}@{group}"),
            Self::Trivial { n, group } => write!(f, "trivial:{n}@{group}"),
            Self::Zero { n, group } => write!(f, "zero:{n}@{group}"),
            Self::Random { n, group } => write!(f, "random:{n}@{group}"),
            Self::Irrep2 => write!(f, "irrep2@symmetric:3"),
            Self::DirectSum(parts) => {
                write!(f, "sum(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            Self::Cutdown { rank, base } => write!(f, "cutdown:r={rank}@{base}"),
            Self::Perturb { delta, base } => write!(f, "perturb:d={delta}@{base}"),
            Self::Unitarize { base } => write!(f, "unitarize@{base}"),
        }
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}?seed={}", self.kind, self.seed)
    }
}

impl Serialize for InstanceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InstanceSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn group(spec: &str) -> Result<Arc<FiniteGroup>> {
    Ok(Arc::new(FiniteGroup::parse(spec)?))
}

/// `node` is the position of this node in a binary numbering of the tree.
fn build(kind: &InstanceKind, seed: u64, node: u64) -> Result<GroupMap> {
    let child = node.wrapping_mul(2);
    match kind {
        InstanceKind::Regular { group: g } => Ok(regular_representation(&group(g)?)),
        InstanceKind::Character { k, group: g } => character(&group(g)?, g, *k),
        InstanceKind::Trivial { n, group: g } => GroupMap::constant(group(g)?, CMatrix::identity(*n)),
        InstanceKind::Zero { n, group: g } => GroupMap::zero(group(g)?, *n),
        InstanceKind::Random { n, group: g } => {
            let mut rng = SplitMix64::derived(seed, node);
            let norm = 1.0;
            GroupMap::from_fn(group(g)?, |_| random_contraction(&mut rng, *n, *n, norm))
        }
        InstanceKind::Irrep2 => Ok(s3_standard(&group("symmetric:3")?)),
        InstanceKind::DirectSum(parts) => {
            let mut acc = build(&parts[0], seed, child)?;
            for (i, p) in parts.iter().enumerate().skip(1) {
                acc = acc.direct_sum(&build(p, seed, child + i as u64)?)?;
            }
            Ok(acc)
        }
        InstanceKind::Cutdown { rank, base } => cutdown(&build(base, seed, child)?, *rank, seed ^ node),
        InstanceKind::Perturb { delta, base } => perturb(&build(base, seed, child)?, *delta, seed ^ node),
        InstanceKind::Unitarize { base } => unitarize(&build(base, seed, child)?),
    }
}

/// Left regular representation: `[rho(g)]_{x,y} = 1` iff `x = g y`.
pub fn regular_representation(g: &Arc<FiniteGroup>) -> GroupMap {
    let k = g.order();
    let values = g
        .elements()
        .map(|a| CMatrix::from_fn(k, k, |x, y| if x == g.mul(a, y) { ONE } else { ZERO }))
        .collect();
    GroupMap::new(g.clone(), values).expect("square values of equal size")
}

/// Orders of the cyclic factors of `spec`, most significant first.
fn cyclic_factors(spec: &str) -> Option<Vec<usize>> {
    let spec = spec.trim();
    let list: Vec<&str> = match spec.strip_prefix("product:") {
        Some(rest) => rest.split(',').collect(),
        None => vec![spec],
    };
    list.iter()
        .map(|f| f.trim().strip_prefix("cyclic:").and_then(|n| n.parse().ok()))
        .collect()
}

/// The `k`-th character of a product of cyclic groups, with `k` read in
/// mixed radix over the factor orders.
pub fn character(g: &Arc<FiniteGroup>, spec: &str, k: usize) -> Result<GroupMap> {
    if !g.is_abelian() {
        return Err(Error::NotAbelian(spec.to_string()));
    }
    let radices = cyclic_factors(spec).ok_or_else(|| {
        Error::NotAbelian(format!("{spec} is not written as a product of cyclic groups"))
    })?;
    if k >= g.order() {
        return Err(bad(format!("character index {k} is not below |G| = {}", g.order())));
    }
    let digits = |mut v: usize| {
        let mut d = vec![0; radices.len()];
        for i in (0..radices.len()).rev() {
            d[i] = v % radices[i];
            v /= radices[i];
        }
        d
    };
    let kd = digits(k);
    GroupMap::from_fn(g.clone(), |x| {
        let xd = digits(x);
        let turns: f64 = (0..radices.len())
            .map(|i| ((kd[i] * xd[i]) % radices[i]) as f64 / radices[i] as f64)
            .sum();
        CMatrix::scalar(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * turns))
    })
}

/// The 2-dimensional irreducible representation of `symmetric:3` on the
/// sum-zero plane, in the basis `(1,-1,0)/sqrt 2`, `(1,1,-2)/sqrt 6`.
pub fn s3_standard(g: &Arc<FiniteGroup>) -> GroupMap {
    const H: f64 = 0.866_025_403_784_438_6;
    const TABLE: [[f64; 4]; 6] = [
        [1.0, 0.0, 0.0, 1.0],
        [0.5, H, H, -0.5],
        [-1.0, 0.0, 0.0, 1.0],
        [-0.5, -H, H, -0.5],
        [-0.5, H, -H, -0.5],
        [0.5, -H, -H, -0.5],
    ];
    let values = TABLE
        .iter()
        .map(|t| CMatrix::from_fn(2, 2, |i, j| Complex64::new(t[2 * i + j], 0.0)))
        .collect();
    GroupMap::new(g.clone(), values).expect("six 2x2 matrices")
}

/// Compression of a seeded conjugate of `base` to its top-left `rank` corner.
pub fn cutdown(base: &GroupMap, rank: usize, seed: u64) -> Result<GroupMap> {
    let n = base.dim();
    if rank == 0 || rank > n {
        return Err(Error::RankRange { rank, dim: n });
    }
    let mut rng = SplitMix64::derived(seed, 0xC0);
    let w = random_unitary(&mut rng, n);
    base.map(|b| w.matmul(b).mul_adjoint(&w).top_left(rank))
}

/// `exp(i delta H_g) base(g)` with seeded Hermitian `H_g` of operator norm 1.
pub fn perturb(base: &GroupMap, delta: f64, seed: u64) -> Result<GroupMap> {
    if delta == 0.0 {
        return Ok(base.clone());
    }
    let n = base.dim();
    let mut rng = SplitMix64::derived(seed, 0x7E);
    let tol = ToleranceProfile::default();
    let values = base
        .values()
        .iter()
        .map(|b| {
            let h = random_hermitian(&mut rng, n);
            let h = h.scale_real(1.0 / operator_norm(&h).max(f64::MIN_POSITIVE));
            Ok(exp_i_hermitian(&h, delta, &tol)?.matmul(b))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupMap::new(base.group_arc().clone(), values)
}

/// `exp(i t H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix, t: f64, tol: &ToleranceProfile) -> Result<CMatrix> {
    let e = herm_eig(h, tol)?;
    let n = h.rows();
    let mut scaled = e.vectors.clone();
    for (j, &l) in e.values.iter().enumerate() {
        let z = Complex64::from_polar(1.0, t * l);
        for i in 0..n {
            scaled[(i, j)] *= z;
        }
    }
    Ok(scaled.mul_adjoint(&e.vectors))
}

/// Replaces every value by the unitary factor of its polar decomposition.
pub fn unitarize(base: &GroupMap) -> Result<GroupMap> {
    let tol = ToleranceProfile::default();
    let values = base
        .values()
        .iter()
        .map(|b| polar(b, &tol).map(|p| p.isometry_part))
        .collect::<Result<Vec<_>>>()?;
    GroupMap::new(base.group_arc().clone(), values)
}

pub fn parse_instance(s: &str) -> Result<GroupMap> {
    s.parse::<InstanceSpec>()?.build()
}
