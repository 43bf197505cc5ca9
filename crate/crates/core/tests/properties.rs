use std::sync::Arc;

use proptest::prelude::*;
use repstab::dilation::{gram_left, gram_right, is_positive_definite, stinespring, tilde};
use repstab::experiment::{ExperimentConfig, Pipeline};
use repstab::groups::{FiniteGroup, GroupMap};
use repstab::instances::{cutdown, perturb, regular_representation, InstanceSpec};
use repstab::matcore::{herm_eig, operator_norm, polar, spectral_indicator, sqrt_psd, CMatrix};
use repstab::random::{random_complex, random_psd, random_unitary, SplitMix64};
use repstab::recovery::{recover_u2, EntryKind, Variant};
use repstab::suite::{random_contractive_map, small_groups};
use repstab::uniformity::{self, naive};
use repstab::{Seminorm, ToleranceProfile};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

fn group_strategy(max_order: usize) -> impl Strategy<Value = Arc<FiniteGroup>> {
    let names = small_groups(max_order);
    (0..names.len()).prop_map(move |i| Arc::new(FiniteGroup::parse(names[i]).unwrap()))
}

fn seminorm_strategy() -> impl Strategy<Value = Seminorm> {
    prop_oneof![
        Just(Seminorm::operator()),
        (1usize..=4, 1usize..=8).prop_map(|(p, r)| Seminorm::schatten(p as f64, r)),
        (1usize..=8).prop_map(Seminorm::hilbert_schmidt),
    ]
}

fn contractive(g: &Arc<FiniteGroup>, n: usize, seed: u64) -> GroupMap {
    random_contractive_map(&mut SplitMix64::new(seed), g, n)
}

/// `Tr(.)/dim` on a square matrix.
fn tau(a: &CMatrix) -> f64 {
    a.trace().re / a.rows() as f64
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed: u64, n in 1usize..=8) {
        let a = random_complex(&mut SplitMix64::new(seed), n, n);
        let mut h = a.clone();
        h.add_assign_scaled(&a.adjoint(), 1.0.into());
        let e = herm_eig(&h, &ToleranceProfile::default()).unwrap();
        prop_assert!(e.values.iter().all(|v| v.is_finite()));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(e.reconstruct().frobenius_distance(&h) <= 1e-10 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn polar_parts_multiply_back(seed: u64, n in 1usize..=8, rank_drop in 0usize..3) {
        let mut rng = SplitMix64::new(seed);
        let r = n.saturating_sub(rank_drop).max(1);
        let s = random_complex(&mut rng, n, r).mul_adjoint(&random_complex(&mut rng, n, r));
        let p = polar(&s, &ToleranceProfile::default()).unwrap();
        let back = p.isometry_part.matmul(&p.modulus);
        prop_assert!(back.frobenius_distance(&s) <= 1e-10 * (1.0 + s.frobenius_norm()));
    }

    #[test]
    fn spectral_indicator_is_a_projection(seed: u64, n in 1usize..=8, lo in -2.0f64..2.0, width in 0.0f64..3.0) {
        let mut rng = SplitMix64::new(seed);
        let a = random_complex(&mut rng, n, n);
        let mut h = a.clone();
        h.add_assign_scaled(&a.adjoint(), 1.0.into());
        let p = spectral_indicator(&h, lo, lo + width, &ToleranceProfile::default()).unwrap();
        prop_assert!(p.matmul(&p).frobenius_distance(&p) <= 1e-9);
        prop_assert!(p.hermitian_defect() <= 1e-9);
    }

    #[test]
    fn kadison_with_normalized_trace(seed: u64, n in 1usize..=8) {
        let a = random_psd(&mut SplitMix64::new(seed), n);
        let root = sqrt_psd(&a, &ToleranceProfile::default()).unwrap();
        prop_assert!(tau(&root).powi(2) <= tau(&a) + 1e-12);
    }

    #[test]
    fn seminorms_are_unitarily_invariant(seed: u64, n in 1usize..=6, s in seminorm_strategy()) {
        let mut rng = SplitMix64::new(seed);
        let t = random_complex(&mut rng, n, n);
        let u = random_unitary(&mut rng, n);
        let v = random_unitary(&mut rng, n);
        let before = s.eval(&t);
        let after = s.eval(&u.matmul(&t).matmul(&v));
        prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before));
    }

    #[test]
    fn seminorm_text_round_trips(s in seminorm_strategy()) {
        let back: Seminorm = s.to_string().parse().unwrap();
        prop_assert_eq!(back, s);
    }
}

proptest! {
    #![proptest_config(cases(32))]

    #[test]
    fn mean_is_translation_and_inversion_invariant(g in group_strategy(12), n in 1usize..=3, seed: u64, which in 0usize..3, pick: usize) {
        let phi = contractive(&g, n, seed);
        let h = pick % g.order();
        let base = g.mean(|x| phi.at(x).clone()).unwrap();
        let moved = g.mean(|x| match which {
            0 => phi.at(g.mul(h, x)).clone(),
            1 => phi.at(g.mul(x, h)).clone(),
            _ => phi.at(g.inv(x)).clone(),
        }).unwrap();
        prop_assert!(moved.frobenius_distance(&base) <= 1e-12 * (1.0 + base.frobenius_norm()));
    }

    #[test]
    fn norm_of_mean_is_at_most_mean_of_norms(g in group_strategy(12), n in 1usize..=4, seed: u64, s in seminorm_strategy()) {
        let phi = contractive(&g, n, seed);
        let s = s.with_ref_dim(n);
        let lhs = s.eval(&phi.mean());
        let rhs = g.mean_scalar(|x| s.eval(phi.at(x)));
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn optimized_kernels_match_naive_loops(g in group_strategy(12), n in 1usize..=4, seed: u64, s in seminorm_strategy()) {
        let phi = contractive(&g, n, seed);
        let s = s.with_ref_dim(n);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * (1.0 + b.abs());
        prop_assert!(close(uniformity::defect_a(&phi, &s).value, naive::defect_a(&phi, &s).value));
        prop_assert!(close(uniformity::defect_b(&phi, &s).value, naive::defect_b(&phi, &s).value));
        prop_assert!(close(uniformity::trace_corr_a(&phi).value, naive::trace_corr_a(&phi).value));
        prop_assert!(close(uniformity::trace_corr_b(&phi).value, naive::trace_corr_b(&phi).value));
        prop_assert!(close(uniformity::u2_norm(&phi).value, naive::u2_norm(&phi).value));
    }

    #[test]
    fn trace_correlations_are_nonnegative(g in group_strategy(12), n in 1usize..=4, seed: u64) {
        let phi = contractive(&g, n, seed);
        prop_assert!(uniformity::trace_corr_a(&phi).value >= -1e-9);
        prop_assert!(uniformity::trace_corr_b(&phi).value >= -1e-9);
    }

    #[test]
    fn hilbert_schmidt_defect_is_controlled_by_correlation(g in group_strategy(12), n in 1usize..=4, seed: u64) {
        let phi = contractive(&g, n, seed);
        let d = uniformity::defect_a(&phi, &Seminorm::hilbert_schmidt(n)).value;
        let c = uniformity::trace_corr_a(&phi).value;
        prop_assert!(d <= (2.0 * (1.0 - c)).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn averaged_maps_are_positive_definite(g in group_strategy(12), n in 1usize..=3, seed: u64) {
        let phi = contractive(&g, n, seed);
        let report = is_positive_definite(&tilde(&phi), &ToleranceProfile::default()).unwrap();
        prop_assert!(report.positive, "min eigenvalue {}", report.min_eigenvalue);
    }

    #[test]
    fn gram_form_is_translation_invariant(g in group_strategy(8), n in 1usize..=2, seed: u64, pick: usize) {
        let psi = tilde(&contractive(&g, n, seed));
        let h = pick % g.order();
        let size = g.order() * n;
        let permuted = |k: &CMatrix, t: &dyn Fn(usize) -> usize| {
            CMatrix::from_fn(size, size, |r, c| k[(t(r / n) * n + r % n, t(c / n) * n + c % n)])
        };
        // psi(a^-1 b) is unchanged by a -> h a, psi(a b^-1) by a -> a h
        let right = gram_right(&psi);
        prop_assert!(permuted(&right, &|a| g.mul(h, a)).frobenius_distance(&right) < 1e-10);
        let left = gram_left(&psi);
        prop_assert!(permuted(&left, &|a| g.mul(a, h)).frobenius_distance(&left) < 1e-10);
    }

    #[test]
    fn dilations_are_sound_and_minimal(g in group_strategy(8), n in 1usize..=3, seed: u64) {
        let psi = tilde(&contractive(&g, n, seed));
        let d = stinespring(&psi, &ToleranceProfile::default()).unwrap();
        prop_assert!(d.m <= g.order() * n);
        prop_assert!(d.pi.unitarity_defect() < 1e-8);
        prop_assert!(d.pi.multiplicativity_residual() < 1e-8);
        prop_assert!(d.verify(&psi).worst() < 1e-8);
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn recovered_rho_is_sound(g in group_strategy(8), n in 1usize..=3, seed: u64, early: bool, s in seminorm_strategy()) {
        let phi = contractive(&g, n, seed);
        let variant = if early { Variant::Early } else { Variant::Full };
        let r = recover_u2(&phi, &s.with_ref_dim(n), variant, &ToleranceProfile::default()).unwrap();
        for e in r.ledger.entries.iter().filter(|e| e.kind == EntryKind::Soundness) {
            prop_assert!(e.pass, "{} = {:e}", e.name, e.value);
        }
        prop_assert!(r.rank_p == 0 || r.rho.multiplicativity_residual() < 1e-8);
    }

    #[test]
    fn regular_representations_are_exact(g in group_strategy(12)) {
        let rho = regular_representation(&g);
        prop_assert!(rho.multiplicativity_residual() <= 1e-12);
        prop_assert!(rho.unitarity_defect() <= 1e-12);
    }

    #[test]
    fn cutdowns_are_contractive(g in group_strategy(8), seed: u64, drop in 1usize..4) {
        let reg = regular_representation(&g);
        let rank = reg.dim().saturating_sub(drop).max(1);
        let phi = cutdown(&reg, rank, seed).unwrap();
        prop_assert_eq!(phi.dim(), rank);
        prop_assert!(phi.is_contractive(1e-9));
        prop_assert!(phi.values().iter().all(|m| operator_norm(m) <= 1.0 + 1e-9));
    }

    #[test]
    fn zero_perturbation_is_identity(g in group_strategy(8), seed: u64) {
        let reg = regular_representation(&g);
        prop_assert_eq!(perturb(&reg, 0.0, seed).unwrap(), reg);
    }

    #[test]
    fn instances_are_deterministic(seed: u64, pick in 0usize..6) {
        let specs = [
            "regular@dihedral:4",
            "cutdown:r=4@regular@symmetric:3",
            "perturb:d=0.01@regular@cyclic:5",
            "random:3@dicyclic:2",
            "unitarize@cutdown:r=5@regular@cyclic:6",
            "sum(character:1@cyclic:4;perturb:d=0.1@trivial:2@cyclic:4)",
        ];
        let spec: InstanceSpec = specs[pick].parse::<InstanceSpec>().unwrap().with_seed(seed);
        let reparsed: InstanceSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(&reparsed, &spec);
        prop_assert_eq!(spec.build().unwrap(), reparsed.build().unwrap());
    }

    #[test]
    fn configs_round_trip(seed in proptest::option::of(any::<u64>()), workers in proptest::option::of(1usize..8),
                          pick in 0usize..4, s in proptest::option::of(seminorm_strategy())) {
        let pipelines = [Pipeline::Recover, Pipeline::TraceC(Some(0.25)), Pipeline::Adjust, Pipeline::Defects];
        let mut c = ExperimentConfig::new(pipelines[pick]);
        c.instance = Some("perturb:d=0.001@regular@cyclic:3".parse().unwrap());
        c.seminorm = s.map(|s| s.to_string());
        c.seed = seed;
        c.workers = workers;
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }
}
