mod common;

use approx::assert_abs_diff_eq;
use common::{config, edited_sequence, null_projection, oracle_rank, recipe, tol};
use frameforge::classify::{
    analyze, analyze_sequence, classify, classify_finite, excess_bruteforce, extend_to_frame,
    reduce_to_riesz, ExcessSearch,
};
use frameforge::duals::{
    check_partner_class, pseudo_codual_construct, pseudo_dual_construct, verify_duality,
    PartnerCheck, Relation,
};
use frameforge::numkernel::{defect_rank, pseudo_inverse, svd, Matrix, Scalar};
use frameforge::perturb::{bari_certificate, kato_certificate, BariVariant};
use frameforge::sampling::{normal_matrix, seeded_rng};
use frameforge::seqfile;
use frameforge::seqmodel::{FiniteSequence, VectorSequence};
use proptest::prelude::*;

fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).max_abs()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn svd_factors_are_consistent(r in recipe(6, 7)) {
        let m = r.build();
        let s = svd(&m).unwrap();
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.singular_values.iter().all(|x| *x >= 0.0));
        for basis in [&s.left_basis, &s.right_basis] {
            prop_assert!((&basis.adjoint() * basis).minus_identity().max_abs() <= 1e-10);
        }
        let scale = s.sigma_max().max(1.0);
        prop_assert!(max_abs_diff(&s.reconstruct(), &m) <= 1e-8 * scale);
    }

    #[test]
    fn rank_agrees_with_eigen_oracle(r in recipe(6, 7)) {
        let m = r.build();
        let expected = oracle_rank(&m);
        prop_assume!(expected.is_some());
        prop_assert_eq!(analyze(&m, &tol()).unwrap().rank, expected.unwrap());
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose_conditions(r in recipe(5, 6)) {
        let a = r.build();
        let p = pseudo_inverse(&a, &tol()).unwrap();
        let scale = svd(&a).unwrap().sigma_max().max(1.0);
        prop_assert!(max_abs_diff(&(&(&a * &p) * &a), &a) <= 1e-8 * scale);
        prop_assert!(max_abs_diff(&(&(&p * &a) * &p), &p) <= 1e-6 * p.max_abs().max(1.0));
        let ap = &a * &p;
        let pa = &p * &a;
        prop_assert!(max_abs_diff(&ap, &ap.adjoint()) <= 1e-8);
        prop_assert!(max_abs_diff(&pa, &pa.adjoint()) <= 1e-8);
    }

    #[test]
    fn bounds_and_gamma_are_related(r in recipe(5, 7)) {
        let a = analyze(&r.build(), &tol()).unwrap();
        let g2 = a.gamma * a.gamma;
        if a.corange_dim == 0 && a.kernel_dim < r.cols {
            assert_abs_diff_eq!(a.frame_lower, g2, epsilon = 1e-12 * a.bessel_bound.max(1.0));
        }
        if a.kernel_dim == 0 && r.cols > 0 {
            assert_abs_diff_eq!(a.riesz_lower, g2, epsilon = 1e-12 * a.bessel_bound.max(1.0));
        }
        prop_assert!(a.frame_lower <= a.bessel_bound + 1e-12);
        prop_assert!(a.riesz_lower <= a.bessel_bound + 1e-12);
        prop_assert_eq!(a.index, r.cols as i64 - r.rows as i64);
    }

    #[test]
    fn finite_taxonomy_is_lattice_consistent(r in recipe(5, 7)) {
        let t = classify_finite(&r.sequence(), &tol()).unwrap();
        prop_assert!(t.lattice_violations().is_empty(), "{:?}", t.lattice_violations());
        prop_assert!(t.pseudo_riesz_basis);
    }

    #[test]
    fn edited_index_counts_inserts_minus_drops((s, expected) in edited_sequence()) {
        let a = analyze_sequence(&s, &tol()).unwrap();
        prop_assert_eq!(a.index, expected);
        let t = classify(&s, &tol()).unwrap();
        prop_assert!(t.lattice_violations().is_empty());
        prop_assert!(t.pseudo_riesz_basis);
        prop_assert_eq!(t.excess, Some(a.kernel_dim));
        prop_assert_eq!(t.deficit, Some(a.corange_dim));
    }

    #[test]
    fn edited_exact_analysis_matches_a_large_section((s, _) in edited_sequence()) {
        let exact = analyze_sequence(&s, &tol()).unwrap();
        let VectorSequence::Edited(e) = &s else { unreachable!() };
        let extra = 5;
        let n = e.horizon() + e.head_reach() + extra;
        let d = s.lossless_dim(n).unwrap();
        let section = analyze(&s.truncate(frameforge::Truncation::new(n, d)).unwrap().matrix, &tol()).unwrap();
        prop_assert_eq!(section.kernel_dim, exact.kernel_dim);
        let tail_gap = d - section.rank - section.corange_dim;
        prop_assert_eq!(tail_gap, 0);
        prop_assert!((section.gamma - exact.gamma).abs() <= 1e-12);
    }

    #[test]
    fn excess_search_matches_kernel(r in recipe(4, 6)) {
        let s = r.sequence();
        let a = analyze(s.synthesis(), &tol()).unwrap();
        prop_assume!(a.kernel_dim <= 4);
        prop_assert_eq!(excess_bruteforce(&s, 4, &tol()).unwrap(), ExcessSearch::Found(a.kernel_dim));
    }

    #[test]
    fn extension_and_reduction_hit_deficit_and_excess(r in recipe(5, 7)) {
        let s = r.sequence();
        let t = classify_finite(&s, &tol()).unwrap();
        let ext = extend_to_frame(&s, &tol()).unwrap();
        prop_assert_eq!(ext.len() - s.len(), t.deficit.unwrap());
        prop_assert_eq!(analyze(ext.synthesis(), &tol()).unwrap().corange_dim, 0);
        let (red, removed) = reduce_to_riesz(&s, &tol()).unwrap();
        prop_assert_eq!(removed.len(), t.excess.unwrap());
        prop_assert_eq!(analyze(red.synthesis(), &tol()).unwrap().kernel_dim, 0);
        prop_assert_eq!(analyze(red.synthesis(), &tol()).unwrap().rank, s.len() - t.excess.unwrap());
    }

    #[test]
    fn constructed_defects_match_corange_and_kernel(r in recipe(5, 7)) {
        let s = r.sequence();
        let a = analyze(s.synthesis(), &tol()).unwrap();
        let (g, dual) = pseudo_dual_construct(&s, &tol()).unwrap();
        prop_assert_eq!(dual.defect_rank, a.corange_dim);
        let product = s.synthesis() * &g.synthesis().adjoint();
        prop_assert_eq!(defect_rank(&product, &tol()).unwrap(), a.corange_dim);
        let (h, codual) = pseudo_codual_construct(&s, &tol()).unwrap();
        prop_assert_eq!(codual.defect_rank, a.kernel_dim);
        let again = verify_duality(
            &VectorSequence::Finite(s.clone()),
            &VectorSequence::Finite(h.clone()),
            Relation::Codual,
            None,
            &tol(),
        ).unwrap();
        prop_assert_eq!(again.defect_rank, a.kernel_dim);
        if let Some(p) = null_projection(s.synthesis()) {
            let expected = Matrix::from_dmatrix(-p);
            prop_assert!(max_abs_diff(&codual.defect_matrix, &expected) <= 1e-8);
        }
        for (partner, cert) in [(g, dual), (h, codual)] {
            let tax = classify_finite(&partner, &tol()).unwrap();
            prop_assert_eq!(check_partner_class(&cert, &tax), PartnerCheck::Pass);
        }
    }

    #[test]
    fn biorthogonal_pairs_are_exact_coduals(n in 1usize..=5, seed: u64, complex: bool) {
        let field = if complex { frameforge::Field::Complex } else { frameforge::Field::Real };
        let mut rng = seeded_rng(seed);
        let t = &normal_matrix(&mut rng, n, n, field) + &Matrix::identity(n).scale(Scalar::new(3.0, 0.0));
        let inv = t.as_dmatrix().clone().try_inverse().unwrap();
        let g = Matrix::from_dmatrix(inv.adjoint());
        prop_assert!(frameforge::duals::is_biorthogonal(&t, &g).unwrap());
        let f = VectorSequence::Finite(FiniteSequence::from_synthesis(t).unwrap());
        let g = VectorSequence::Finite(FiniteSequence::from_synthesis(g).unwrap());
        let cert = verify_duality(&f, &g, Relation::Codual, None, &tol()).unwrap();
        prop_assert_eq!(cert.defect_rank, 0);
    }

    #[test]
    fn kato_never_asserts_without_hypothesis(r in recipe(5, 6), scale in 0.0f64..3.0, seed: u64) {
        let t = r.build();
        let gamma = analyze(&t, &tol()).unwrap().gamma;
        let mut rng = seeded_rng(seed);
        let raw = normal_matrix(&mut rng, r.rows, r.cols, r.field());
        let norm = svd(&raw).unwrap().sigma_max();
        prop_assume!(norm > 0.0);
        let a = raw.scale(Scalar::new(scale * gamma.max(1e-3) / norm, 0.0));
        let c = kato_certificate(&t, &a, &tol()).unwrap();
        if !c.hypothesis_met {
            prop_assert!(c.guaranteed.is_empty());
        } else {
            prop_assert!(c.empirical_agreement);
        }
    }

    #[test]
    fn bari_gamma_is_monotone_in_deviation(r in recipe(4, 5), seed: u64, shrink in 0.0f64..=1.0) {
        let f = r.sequence();
        let gamma = analyze(f.synthesis(), &tol()).unwrap().gamma;
        prop_assume!(gamma > 0.0);
        let mut rng = seeded_rng(seed);
        let raw = normal_matrix(&mut rng, r.rows, r.cols, r.field());
        let fro = raw.frobenius_sq().sqrt();
        prop_assume!(fro > 0.0);
        let dev = raw.scale(Scalar::new(0.9 * gamma / fro, 0.0));
        let fseq = VectorSequence::Finite(f.clone());
        let g = |d: &Matrix| VectorSequence::Finite(FiniteSequence::from_synthesis(f.synthesis() + d).unwrap());
        let big = bari_certificate(&fseq, &g(&dev), BariVariant::Gamma, &tol()).unwrap();
        prop_assert!(big.hypothesis_met);
        let small = bari_certificate(&fseq, &g(&dev.scale(Scalar::new(shrink, 0.0))), BariVariant::Gamma, &tol()).unwrap();
        prop_assert!(small.hypothesis_met);
        prop_assert!(big.empirical_agreement && small.empirical_agreement);
    }

    #[test]
    fn finite_specs_round_trip(r in recipe(4, 5)) {
        let s = VectorSequence::Finite(r.sequence());
        let text = seqfile::to_json(&s);
        let back = seqfile::parse(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(seqfile::to_json(&back), text);
    }

    #[test]
    fn edited_specs_round_trip((s, _) in edited_sequence()) {
        let back = seqfile::parse(&seqfile::to_json(&s)).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(classify(&back, &tol()).unwrap(), classify(&s, &tol()).unwrap());
    }
}
