use std::sync::Arc;

use repstab::groups::{FiniteGroup, GroupMap};
use repstab::instances::{character, cutdown, parse_instance, perturb, regular_representation};
use repstab::matcore::{herm_eig, operator_norm, CMatrix, Complex64};
use repstab::random::{random_unitary, SplitMix64};
use repstab::recovery::{recover_u2, Variant};
use repstab::uniformity::{mean_hom_defect, u2_norm};
use repstab::{Seminorm, ToleranceProfile};

fn group(spec: &str) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::parse(spec).unwrap())
}

#[test]
fn characters_are_orthonormal() {
    for spec in ["cyclic:6", "product:cyclic:2,cyclic:4", "product:cyclic:3,cyclic:3"] {
        let g = group(spec);
        let k = g.order();
        let chars: Vec<GroupMap> = (0..k).map(|i| character(&g, spec, i).unwrap()).collect();
        for (a, ca) in chars.iter().enumerate() {
            for (b, cb) in chars.iter().enumerate() {
                let mean: Complex64 = g.elements().map(|x| ca.at(x)[(0, 0)] * cb.at(x)[(0, 0)].conj()).sum::<Complex64>()
                    / k as f64;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((mean - want).norm() < 1e-12, "{spec}: <chi_{a}, chi_{b}> = {mean}");
            }
        }
    }
}

#[test]
fn regular_u2_norm_matches_quadruple_loop() {
    for spec in ["cyclic:3", "symmetric:3", "dicyclic:2"] {
        let g = group(spec);
        let rho = regular_representation(&g);
        let k = g.order();
        let mut total = Complex64::new(0.0, 0.0);
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    for w in 0..k {
                        if g.mul(g.mul(x, g.inv(y)), g.mul(z, g.inv(w))) != g.identity() {
                            continue;
                        }
                        let word = rho.at(x).mul_adjoint(rho.at(y)).matmul(rho.at(z)).mul_adjoint(rho.at(w));
                        total += word.trace();
                    }
                }
            }
        }
        let oracle = total.re / (k * k * k) as f64;
        assert!((oracle - k as f64).abs() < 1e-12);
        assert!((u2_norm(&rho).value - oracle).abs() < 1e-10);
    }
}

#[test]
fn corner_cut_of_symmetric_three() {
    let base = parse_instance("regular@symmetric:3").unwrap();
    let phi = cutdown(&base, 5, 1).unwrap();
    let d = mean_hom_defect(&phi, &Seminorm::hilbert_schmidt(5)).mean;
    let scale = 2.0 * (1.0f64 - 5.0 / 6.0).sqrt();
    assert!(d > 1e-3 && d < scale, "defect {d} vs scale {scale}");
    // value by a direct double loop
    let g = phi.group();
    let mut worst = 0.0f64;
    for x in g.elements() {
        let row: f64 = g
            .elements()
            .map(|y| {
                let mut t = phi.at(g.mul(x, y)).clone();
                t.add_assign_scaled(&phi.at(x).matmul(phi.at(y)), (-1.0).into());
                (t.frobenius_norm_sqr() / 5.0).sqrt()
            })
            .sum::<f64>()
            / 6.0;
        worst = worst.max(row);
    }
    assert!((worst - d).abs() < 1e-12);
}

#[test]
fn full_rank_cutdown_is_a_conjugate() {
    let base = parse_instance("regular@dihedral:4").unwrap();
    let phi = cutdown(&base, 8, 3).unwrap();
    assert!(phi.multiplicativity_residual() < 1e-12);
    assert!(mean_hom_defect(&phi, &Seminorm::operator()).uniform < 1e-12);
}

/// `E_x rho(x) T base(x)*` for the corner representation found by recovery.
#[test]
fn recovered_corner_is_not_an_intertwiner() {
    let tol = ToleranceProfile::default();
    let base = parse_instance("regular@cyclic:6").unwrap();
    let (n, r, seed) = (6, 5, 11);
    let phi = cutdown(&base, r, seed).unwrap();
    // the conjugation cutdown applies before compressing
    let w = random_unitary(&mut SplitMix64::derived(seed, 0xC0), n);
    let conj = base.map(|b| w.matmul(b).mul_adjoint(&w)).unwrap();
    let corner = CMatrix::identity(n).block(0, 0, r, n);
    for x in phi.group().elements() {
        let direct = corner.matmul(conj.at(x)).mul_adjoint(&corner);
        assert!(direct.max_abs_diff(phi.at(x)) < 1e-12);
    }

    let rec = recover_u2(&phi, &Seminorm::hilbert_schmidt(r), Variant::Full, &tol).unwrap();
    let e = herm_eig(&rec.p, &tol).unwrap();
    let keep: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i] > 0.5).collect();
    assert_eq!(keep.len(), rec.rank_p);
    let big = rec.p.rows();
    let q = CMatrix::from_fn(big, keep.len(), |i, j| e.vectors[(i, keep[j])]);
    let rho: Vec<CMatrix> = rec.rho.values().iter().map(|m| q.adjoint().matmul(m).matmul(&q)).collect();
    let link = q.adjoint().matmul(&rec.u.block(0, 0, big, r)).matmul(&corner);
    let g = phi.group();
    let mut t = CMatrix::zeros(keep.len(), n);
    for x in g.elements() {
        t.add_assign_scaled(&rho[x].matmul(&link).mul_adjoint(conj.at(x)), (1.0 / g.order() as f64).into());
    }
    let norm = operator_norm(&t);
    assert!(operator_norm(&link) <= 1.0 + 1e-9);
    assert!(norm < 1.0 - 1e-6, "intertwiner norm {norm}");
    assert!(norm > 0.0);
}

#[test]
fn perturbed_character_defect() {
    let g = group("cyclic:6");
    let chi = character(&g, "cyclic:6", 1).unwrap();
    for seed in 0..8 {
        let phi = perturb(&chi, 0.01, seed).unwrap();
        assert!(phi.is_unitary(1e-9));
        assert!(phi.max_distance(&chi, operator_norm) <= 0.01 + 1e-12);
        let d = mean_hom_defect(&phi, &Seminorm::operator()).mean;
        assert!(d <= 0.02 + 1e-4, "seed {seed}: {d}");
    }
}

#[test]
fn seeds_separate_instances() {
    let a = parse_instance("perturb:d=0.01@regular@cyclic:4?seed=5").unwrap();
    let b = parse_instance("perturb:d=0.01@regular@cyclic:4?seed=5").unwrap();
    let c = parse_instance("perturb:d=0.01@regular@cyclic:4?seed=6").unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
