//! Property tests over randomized inputs: algebraic identities of the
//! operator layer, spectral decomposition invariants, the pinching
//! equivalence, and the agreement between the no-signalling criterion and
//! the constructive factorization.

use proptest::prelude::*;

use spacelike_core::field::{pinching_check, PinchVerdict};
use spacelike_core::nosignal::{
    check_mc_analytic, factorize_unitary, operator_schmidt_rank, FactorizationResult,
    ANALYTIC_TOL,
};
use spacelike_core::op::{
    commutator, hermitian_spectral, partial_trace, tensor_product, Subsystem,
};
use spacelike_core::qm::{random_hermitian, random_unitary};
use spacelike_core::rng::substream;
use spacelike_core::{BipartiteDims, Operator, C64};

fn random_operator(dim: usize, seed: u64) -> Operator {
    let mut rng = substream(seed, 0);
    let entries: Vec<(f64, f64)> = (0..dim * dim)
        .map(|_| {
            let z = spacelike_core::rng::complex_gaussian(&mut rng);
            (z.re, z.im)
        })
        .collect();
    Operator::from_row_major(dim, &entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dagger_is_an_involution(dim in 2usize..=8, seed in 0u64..1000) {
        let a = random_operator(dim, seed);
        prop_assert!((&a.dagger().dagger() - &a).frobenius_norm() < 1e-14);
    }

    #[test]
    fn dagger_reverses_products(dim in 2usize..=6, seed in 0u64..1000) {
        let a = random_operator(dim, seed);
        let b = random_operator(dim, seed.wrapping_add(1));
        let lhs = (&a * &b).dagger();
        let rhs = &b.dagger() * &a.dagger();
        prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-12 * (dim as f64));
    }

    #[test]
    fn tensor_mixed_product(d1 in 2usize..=4, d2 in 2usize..=4, seed in 0u64..1000) {
        let a = random_operator(d1, seed);
        let b = random_operator(d2, seed.wrapping_add(1));
        let c = random_operator(d1, seed.wrapping_add(2));
        let d = random_operator(d2, seed.wrapping_add(3));
        let lhs = &tensor_product(&a, &b) * &tensor_product(&c, &d);
        let rhs = tensor_product(&(&a * &c), &(&b * &d));
        prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-11 * (d1 * d2) as f64);
    }

    #[test]
    fn partial_trace_duality(d1 in 2usize..=4, d2 in 2usize..=4, seed in 0u64..1000) {
        // tr((A tensor I) M) = tr(A tr_2 M), and traces are preserved.
        let dims = BipartiteDims::new(d1, d2).unwrap();
        let m = random_operator(d1 * d2, seed);
        let a = random_operator(d1, seed.wrapping_add(1));
        let lifted = tensor_product(&a, &Operator::identity(d2));
        let lhs = (&lifted * &m).trace();
        let reduced = partial_trace(&m, dims, Subsystem::Second).unwrap();
        let rhs = (&a * &reduced).trace();
        prop_assert!((lhs - rhs).norm() < 1e-11 * (d1 * d2) as f64);
        let full = m.trace();
        prop_assert!((reduced.trace() - full).norm() < 1e-12 * (d1 * d2) as f64);
        let other = partial_trace(&m, dims, Subsystem::First).unwrap();
        prop_assert!((other.trace() - full).norm() < 1e-12 * (d1 * d2) as f64);
    }

    #[test]
    fn spectral_decomposition_invariants(dim in 2usize..=16, seed in 0u64..1000) {
        let h = random_hermitian(dim, seed);
        let sd = h.spectral();
        // The eigensolver is accurate to roughly 1e-9 relative at these
        // dimensions, so the bounds scale with the operator norm.
        let scale = (dim as f64) * h.op().operator_norm().max(1.0);
        prop_assert!((&sd.reconstruct() - h.op()).frobenius_norm() < 1e-8 * scale);
        // Completeness.
        let mut total = Operator::zeros(dim);
        for c in &sd.clusters {
            total = &total + &c.projector;
        }
        prop_assert!((&total - &Operator::identity(dim)).frobenius_norm() < 1e-8 * scale);
        // Orthogonal idempotents.
        for (i, ci) in sd.clusters.iter().enumerate() {
            for (j, cj) in sd.clusters.iter().enumerate() {
                let prod = &ci.projector * &cj.projector;
                let expect = if i == j { ci.projector.clone() } else { Operator::zeros(dim) };
                prop_assert!((&prod - &expect).frobenius_norm() < 1e-8 * scale);
            }
        }
    }

    #[test]
    fn pinching_iff_small_commutator(dim in 2usize..=6, seed in 0u64..1000, commuting: bool) {
        let a = random_hermitian(dim, seed);
        let b = if commuting {
            // A polynomial in A commutes with A and is pinching-invariant.
            let m = a.op();
            let quad = &(m * m) + &m.scale(C64::new(0.7, 0.0));
            &quad + &Operator::identity(dim).scale(C64::new(0.3, 0.0))
        } else {
            random_operator(dim, seed.wrapping_add(7))
        };
        let tol = 1e-8;
        let verdict = pinching_check(&a, &b, tol).unwrap();
        let comm = commutator(a.op(), &b).unwrap().frobenius_norm();
        let scale = tol * b.frobenius_norm().max(1.0);
        match verdict {
            PinchVerdict::Pinched { .. } => prop_assert!(comm <= 1e2 * scale),
            PinchVerdict::NotPinched { .. } => prop_assert!(comm > scale),
        }
        if commuting {
            prop_assert!(verdict.pinched());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn criterion_agrees_with_factorization(
        d1 in 2usize..=4,
        d2 in 2usize..=4,
        seed in 0u64..1000,
        product: bool,
    ) {
        let dims = BipartiteDims::new(d1, d2).unwrap();
        let u = if product {
            tensor_product(&random_unitary(d1, seed), &random_unitary(d2, seed.wrapping_add(1)))
        } else {
            random_unitary(d1 * d2, seed)
        };
        let mc = check_mc_analytic(&u, dims, ANALYTIC_TOL).unwrap().holds();
        let fact = factorize_unitary(&u, dims, 1e-8).unwrap().is_product();
        let (rank, _) = operator_schmidt_rank(&u, dims, 1e-8).unwrap();
        prop_assert_eq!(mc, fact);
        prop_assert_eq!(fact, rank == 1);
        if product {
            prop_assert!(fact);
        }
    }

    #[test]
    fn factorization_round_trip(
        pair in prop::sample::select(vec![(2usize, 2usize), (2, 3), (3, 3), (4, 2), (8, 8)]),
        seed in 0u64..1000,
    ) {
        let (d1, d2) = pair;
        let dims = BipartiteDims::new(d1, d2).unwrap();
        let u1 = random_unitary(d1, seed);
        let u2 = random_unitary(d2, seed.wrapping_add(1));
        let u = tensor_product(&u1, &u2);
        match factorize_unitary(&u, dims, 1e-8).unwrap() {
            FactorizationResult::Product { u1: f1, u2: f2, phase, reconstruction_error } => {
                prop_assert!(reconstruction_error <= 1e-8 * ((d1 * d2) as f64).sqrt());
                let rebuilt = tensor_product(&f1, &f2).scale(C64::from_polar(1.0, phase));
                prop_assert!((&u - &rebuilt).frobenius_norm() <= 1e-8 * ((d1 * d2) as f64).sqrt());
            }
            FactorizationResult::NotProduct { residual, .. } => {
                prop_assert!(false, "product unitary reported NotProduct, residual {residual}");
            }
        }
    }

    #[test]
    fn haar_unitaries_are_unitary(dim in 2usize..=12, seed in 0u64..1000) {
        let u = random_unitary(dim, seed);
        prop_assert!(u.unitarity_deviation() < 1e-11 * (dim as f64));
    }
}

#[test]
fn spectral_rejects_non_hermitian() {
    let a = random_operator(4, 11);
    assert!(hermitian_spectral(&a, 0.0).is_err());
}
