//! Finite groups given by Cayley tables, the uniform mean, and maps into
//! matrix algebras.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matcore::{operator_norm, CMatrix, ZERO};

/// Largest order accepted by the builders.
pub const MAX_ORDER: usize = 256;

/// A finite group stored as its multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    label: String,
}

impl FiniteGroup {
    /// Validates a Cayley table (`table[g][h] = g*h`).
    pub fn from_table(table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::MalformedTable("empty table".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::TooLarge(format!("order {order} exceeds {MAX_ORDER}")));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::MalformedTable(format!(
                    "row {g} has {} entries, expected {order}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= order) {
                return Err(Error::MalformedTable(format!("row {g} contains {bad} >= {order}")));
            }
        }
        if identity >= order {
            return Err(Error::NoIdentity { candidate: identity });
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let at = |g: usize, h: usize| flat[g * order + h];

        let mut seen = vec![false; order];
        for g in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for h in 0..order {
                let x = at(g, h);
                if seen[x] {
                    return Err(Error::NotLatinSquare(format!("row {g} repeats element {x}")));
                }
                seen[x] = true;
            }
        }
        for h in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for g in 0..order {
                let x = at(g, h);
                if seen[x] {
                    return Err(Error::NotLatinSquare(format!("column {h} repeats element {x}")));
                }
                seen[x] = true;
            }
        }
        if (0..order).any(|g| at(identity, g) != g || at(g, identity) != g) {
            return Err(Error::NoIdentity { candidate: identity });
        }
        let mut inverses = vec![0; order];
        for g in 0..order {
            match (0..order).find(|&h| at(g, h) == identity && at(h, g) == identity) {
                Some(h) => inverses[g] = h,
                None => return Err(Error::NoInverse { element: g }),
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(Self {
            order,
            table: flat,
            identity,
            inverses,
            label: format!("table:{order}"),
        })
    }

    fn from_op(order: usize, label: String, op: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::TooLarge(format!("{label} has order {order} > {MAX_ORDER}")));
        }
        let table = (0..order).map(|g| (0..order).map(|h| op(g, h)).collect()).collect();
        let mut g = Self::from_table(table, 0)?;
        g.label = label;
        Ok(g)
    }

    /// Integers mod `n` under addition.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("cyclic group needs n >= 1".into()));
        }
        Self::from_op(n, format!("cyclic:{n}"), |a, b| (a + b) % n)
    }

    /// Symmetries of the regular `n`-gon, of order `2n`. Element `f*n + k`
    /// is `r^k s^f` with `s r s = r^{-1}`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("dihedral group needs n >= 1".into()));
        }
        Self::from_op(2 * n, format!("dihedral:{n}"), |a, b| {
            let (fa, ka) = (a / n, a % n);
            let (fb, kb) = (b / n, b % n);
            let k = if fa == 0 { (ka + kb) % n } else { (ka + n - kb) % n };
            ((fa + fb) % 2) * n + k
        })
    }

    /// Permutations of `{0..n}` in lexicographic order, composed as
    /// `(s*t)(i) = s(t(i))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("symmetric group needs n >= 1".into()));
        }
        if n > 5 {
            return Err(Error::TooLarge(format!("symmetric:{n} (at most symmetric:5)")));
        }
        let perms = permutations(n);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
        let op = |a: usize, b: usize| {
            let c: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
            index(&c)
        };
        Self::from_op(perms.len(), format!("symmetric:{n}"), op)
    }

    /// Even permutations of `{0..n}`, ordered and composed as in [`Self::symmetric`].
    pub fn alternating(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("alternating group needs n >= 1".into()));
        }
        if n > 5 {
            return Err(Error::TooLarge(format!("alternating:{n} (at most alternating:5)")));
        }
        let perms: Vec<Vec<usize>> = permutations(n).into_iter().filter(|p| is_even(p)).collect();
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
        let op = |a: usize, b: usize| {
            let c: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
            index(&c)
        };
        Self::from_op(perms.len(), format!("alternating:{n}"), op)
    }

    /// Dicyclic group of order `4n` generated by `a`, `x` with `a^(2n) = 1`,
    /// `x^2 = a^n`, `x a x^-1 = a^-1`. Element `f*2n + k` is `a^k x^f`.
    /// `dicyclic:2` is the quaternion group.
    pub fn dicyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("dicyclic group needs n >= 1".into()));
        }
        let m = 2 * n;
        Self::from_op(2 * m, format!("dicyclic:{n}"), |a, b| {
            let (fa, ka) = (a / m, a % m);
            let (fb, kb) = (b / m, b % m);
            match (fa, fb) {
                (0, _) => fb * m + (ka + kb) % m,
                (_, 0) => m + (ka + m - kb) % m,
                _ => (ka + m - kb + n) % m,
            }
        })
    }

    /// `G x H` with element `g*|H| + h`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self> {
        let order = g.order * h.order;
        let m = h.order;
        let label = format!("product:{},{}", g.label, h.label);
        if order > MAX_ORDER {
            return Err(Error::TooLarge(format!("{label} has order {order} > {MAX_ORDER}")));
        }
        let table = (0..order)
            .map(|a| {
                (0..order)
                    .map(|b| g.mul(a / m, b / m) * m + h.mul(a % m, b % m))
                    .collect()
            })
            .collect();
        let mut out = Self::from_table(table, g.identity * m + h.identity)?;
        out.label = label;
        Ok(out)
    }

    /// Parses `cyclic:N`, `dihedral:N`, `symmetric:N` or
    /// `product:SPEC,SPEC[,...]`, plus `alternating:N` and `dicyclic:N`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(rest) = spec.strip_prefix("product:") {
            let mut factors = rest.split(',').map(Self::parse);
            let first = factors
                .next()
                .ok_or_else(|| Error::Parse(format!("empty product `{spec}`")))??;
            let mut acc = first;
            let mut count = 1;
            for f in factors {
                acc = Self::direct_product(&acc, &f?)?;
                count += 1;
            }
            if count < 2 {
                return Err(Error::Parse(format!("product needs two factors: `{spec}`")));
            }
            acc.label = format!("product:{rest}");
            return Ok(acc);
        }
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("group spec `{spec}` has no `:`")))?;
        let n: usize = arg
            .parse()
            .map_err(|_| Error::Parse(format!("bad group size in `{spec}`")))?;
        match kind {
            "cyclic" => Self::cyclic(n),
            "dihedral" => Self::dihedral(n),
            "symmetric" => Self::symmetric(n),
            "alternating" => Self::alternating(n),
            "dicyclic" => Self::dicyclic(n),
            _ => Err(Error::Parse(format!("unknown group family `{kind}`"))),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|g| (0..g).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    /// `(1/|G|) * sum_g f(g)`, summed in ascending element order.
    pub fn mean(&self, mut f: impl FnMut(usize) -> CMatrix) -> Result<CMatrix> {
        let mut acc = f(0);
        for g in 1..self.order {
            let v = f(g);
            if (v.rows(), v.cols()) != (acc.rows(), acc.cols()) {
                return Err(Error::DimensionMismatch(format!(
                    "mean over {}: element {g} gives {}x{}, expected {}x{}",
                    self.label,
                    v.rows(),
                    v.cols(),
                    acc.rows(),
                    acc.cols()
                )));
            }
            acc.add_assign_scaled(&v, crate::matcore::ONE);
        }
        Ok(acc.scale_real(1.0 / self.order as f64))
    }

    /// Scalar version of [`FiniteGroup::mean`].
    pub fn mean_scalar(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for g in 0..self.order {
            acc += f(g);
        }
        acc / self.order as f64
    }
}

fn is_even(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next permutation in lexicographic order
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.label, self.order)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    identity: usize,
    table: Vec<Vec<usize>>,
}

impl Serialize for FiniteGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GroupJson {
            order: self.order,
            identity: self.identity,
            table: self.table(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = GroupJson::deserialize(deserializer)?;
        if raw.order != raw.table.len() {
            return Err(serde::de::Error::custom(format!(
                "order {} but table has {} rows",
                raw.order,
                raw.table.len()
            )));
        }
        FiniteGroup::from_table(raw.table, raw.identity).map_err(serde::de::Error::custom)
    }
}

/// A map `phi: G -> M_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMap {
    group: Arc<FiniteGroup>,
    dim: usize,
    values: Vec<CMatrix>,
}

impl GroupMap {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<CMatrix>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        let dim = values[0].rows();
        for (g, v) in values.iter().enumerate() {
            if v.rows() != dim || v.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "value at {g} is {}x{}, expected {dim}x{dim}",
                    v.rows(),
                    v.cols()
                )));
            }
        }
        Ok(Self { group, dim, values })
    }

    pub fn from_fn(group: Arc<FiniteGroup>, f: impl FnMut(usize) -> CMatrix) -> Result<Self> {
        let values = group.elements().map(f).collect();
        Self::new(group, values)
    }

    pub fn constant(group: Arc<FiniteGroup>, value: CMatrix) -> Result<Self> {
        Self::from_fn(group, |_| value.clone())
    }

    #[inline]
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, g: usize) -> &CMatrix {
        &self.values[g]
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn map(&self, f: impl FnMut(&CMatrix) -> CMatrix) -> Result<Self> {
        Self::new(self.group.clone(), self.values.iter().map(f).collect())
    }

    /// `max_g ||phi(g)* phi(g) - 1||_op`.
    pub fn unitarity_defect(&self) -> f64 {
        let id = CMatrix::identity(self.dim);
        self.values
            .iter()
            .map(|v| operator_norm(&(&v.adjoint_mul(v) - &id)))
            .fold(0.0, f64::max)
    }

    /// `max_g ||phi(g)||_op`.
    pub fn max_operator_norm(&self) -> f64 {
        self.values.iter().map(operator_norm).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_contractive(&self, tol: f64) -> bool {
        self.max_operator_norm() <= 1.0 + tol
    }

    pub fn require_unitary(&self, tol: f64) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
        Ok(())
    }

    pub fn require_contractive(&self, tol: f64) -> Result<()> {
        let norm = self.max_operator_norm();
        if norm > 1.0 + tol {
            return Err(Error::NotContractive { norm });
        }
        Ok(())
    }

    /// `max_{g,h} ||phi(gh) - phi(g) phi(h)||_op` over the whole table.
    pub fn multiplicativity_residual(&self) -> f64 {
        let g = &self.group;
        let mut worst: f64 = 0.0;
        for a in g.elements() {
            for b in g.elements() {
                let d = &self.values[g.mul(a, b)] - &self.values[a].matmul(&self.values[b]);
                worst = worst.max(operator_norm(&d));
            }
        }
        worst
    }

    /// `(1/|G|) sum_g phi(g)`.
    pub fn mean(&self) -> CMatrix {
        self.group
            .mean(|g| self.values[g].clone())
            .expect("uniform dimension is a GroupMap invariant")
    }

    pub fn max_distance(&self, other: &GroupMap, norm: impl Fn(&CMatrix) -> f64) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| norm(&(a - b)))
            .fold(0.0, f64::max)
    }

    /// Pointwise direct sum `phi(g) + psi(g)` on the same group.
    pub fn direct_sum(&self, other: &GroupMap) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::DimensionMismatch("direct sum over different groups".into()));
        }
        Self::new(
            self.group.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| a.direct_sum(b)).collect(),
        )
    }

    pub fn zero(group: Arc<FiniteGroup>, n: usize) -> Result<Self> {
        Self::constant(group, CMatrix::zeros(n, n))
    }

    /// Largest entry of any value; used to sanity check inputs.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(CMatrix::max_abs)
            .fold(ZERO.re, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complex, SplitMix64};

    #[test]
    fn trivial_table() {
        let g = FiniteGroup::from_table(vec![vec![0]], 0).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.inv(0), 0);
        assert_eq!(FiniteGroup::cyclic(1).unwrap().table(), g.table());
    }

    #[test]
    fn z2_table() {
        let g = FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]], 0).unwrap();
        assert_eq!(g.inv(1), 1);
    }

    #[test]
    fn rejects_bad_tables() {
        let e = FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]], 0).unwrap_err();
        assert!(matches!(e, Error::NotLatinSquare(_)));
        let e = FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]], 0).unwrap_err();
        assert!(matches!(e, Error::NoIdentity { candidate: 0 }));
        let e = FiniteGroup::from_table(vec![vec![0, 2], vec![1, 0]], 0).unwrap_err();
        assert!(matches!(e, Error::MalformedTable(_)));
    }

    #[test]
    fn detects_non_associative_loop() {
        // a Latin square with identity 0 that is not a group: the order-5 loop
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let e = FiniteGroup::from_table(t, 0).unwrap_err();
        assert!(matches!(e, Error::NotAssociative { .. }), "{e:?}");
    }

    #[test]
    fn dihedral_and_symmetric_three_are_isomorphic() {
        let d = FiniteGroup::dihedral(3).unwrap();
        let s = FiniteGroup::symmetric(3).unwrap();
        let perms = permutations(6);
        let iso = perms.iter().any(|f| {
            (0..6).all(|a| (0..6).all(|b| f[d.mul(a, b)] == s.mul(f[a], f[b])))
        });
        assert!(iso);
        assert!(!d.is_abelian());
    }

    #[test]
    fn klein_four() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let k = FiniteGroup::direct_product(&c2, &c2).unwrap();
        assert_eq!(k.order(), 4);
        for g in 1..4 {
            assert_eq!(k.inv(g), g);
        }
        assert!(k.is_abelian());
    }

    #[test]
    fn symmetric_lexicographic_and_limits() {
        let s = FiniteGroup::symmetric(4).unwrap();
        assert_eq!(s.order(), 24);
        assert_eq!(s.identity(), 0);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert!(matches!(FiniteGroup::symmetric(6), Err(Error::TooLarge(_))));
        assert!(matches!(FiniteGroup::cyclic(300), Err(Error::TooLarge(_))));
    }

    fn order_of(g: &FiniteGroup, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != g.identity() {
            x = g.mul(x, a);
            k += 1;
        }
        k
    }

    #[test]
    fn quaternion_and_alternating() {
        let q = FiniteGroup::parse("dicyclic:2").unwrap();
        assert_eq!(q.order(), 8);
        assert!(!q.is_abelian());
        let involutions = |g: &FiniteGroup| g.elements().filter(|&a| order_of(g, a) == 2).count();
        assert_eq!(involutions(&q), 1);
        let d = FiniteGroup::dicyclic(3).unwrap();
        assert_eq!((d.order(), involutions(&d)), (12, 1));
        let a4 = FiniteGroup::parse("alternating:4").unwrap();
        assert_eq!(a4.order(), 12);
        assert!(!a4.is_abelian());
        assert_eq!(involutions(&a4), 3);
        assert_eq!(a4.elements().filter(|&a| order_of(&a4, a) == 3).count(), 8);
    }

    #[test]
    fn parse_specs() {
        assert_eq!(FiniteGroup::parse("cyclic:12").unwrap().order(), 12);
        assert_eq!(FiniteGroup::parse("dihedral:4").unwrap().order(), 8);
        assert_eq!(FiniteGroup::parse("symmetric:4").unwrap().order(), 24);
        let p = FiniteGroup::parse("product:cyclic:2,cyclic:3").unwrap();
        assert_eq!(p.order(), 6);
        assert!(p.is_abelian());
        assert_eq!(p.label(), "product:cyclic:2,cyclic:3");
        assert!(FiniteGroup::parse("torus:3").is_err());
        assert!(FiniteGroup::parse("cyclic").is_err());
    }

    #[test]
    fn json_schema_round_trip() {
        let g = FiniteGroup::dihedral(2).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.starts_with("{\"order\":4,\"identity\":0,\"table\":[[0,1,2,3]"));
        let back: FiniteGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back.table(), g.table());
        let bad = r#"{"order":2,"identity":0,"table":[[0,1],[1,1]]}"#;
        assert!(serde_json::from_str::<FiniteGroup>(bad).is_err());
    }

    #[test]
    fn mean_basics() {
        let g = FiniteGroup::cyclic(5).unwrap();
        let c = CMatrix::from_real_diag(&[2.0, -1.0]);
        assert_eq!(g.mean(|_| c.clone()).unwrap().max_abs_diff(&c), 0.0);
        let m = g
            .mean(|x| if x == 0 { c.clone() } else { CMatrix::zeros(2, 2) })
            .unwrap();
        assert!(m.max_abs_diff(&c.scale_real(0.2)) < 1e-16);
        let bad = g.mean(|x| CMatrix::zeros(1 + x % 2, 1));
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn mean_is_invariant() {
        let g = FiniteGroup::dihedral(4).unwrap();
        let mut rng = SplitMix64::new(40);
        let f: Vec<CMatrix> = g.elements().map(|_| random_complex(&mut rng, 3, 3)).collect();
        let base = g.mean(|x| f[x].clone()).unwrap();
        for h in g.elements() {
            for m in [
                g.mean(|x| f[g.mul(h, x)].clone()).unwrap(),
                g.mean(|x| f[g.mul(x, h)].clone()).unwrap(),
                g.mean(|x| f[g.inv(x)].clone()).unwrap(),
            ] {
                assert!(m.max_abs_diff(&base) < 1e-12);
            }
        }
    }

    #[test]
    fn group_map_checks() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let id = GroupMap::constant(g.clone(), CMatrix::identity(2)).unwrap();
        assert_eq!(id.unitarity_defect(), 0.0);
        assert_eq!(id.multiplicativity_residual(), 0.0);
        let big = GroupMap::constant(g.clone(), CMatrix::identity(2).scale_real(2.0)).unwrap();
        assert!(matches!(big.require_contractive(1e-9), Err(Error::NotContractive { .. })));
        assert!(matches!(big.require_unitary(1e-9), Err(Error::NotUnitary { .. })));
        let mixed = GroupMap::new(
            g,
            vec![CMatrix::identity(2), CMatrix::identity(2), CMatrix::identity(3)],
        );
        assert!(matches!(mixed, Err(Error::DimensionMismatch(_))));
    }
}
