use proptest::prelude::*;

use nlew::decompose::{decompose, reconstruct};
use nlew::linalg::{
    correlation_matrix_canonical, hermitian_spectrum, kron, lambda_max, partial_trace, partial_transpose,
    realignment_trace_norm, ComplexMatrix, DimPair, Subsystem,
};
use nlew::nlew::{evaluate, materialize, NlewKind};
use nlew::sepmax::{closed_form_wlp, product_value, seesaw_max, SeesawSettings};
use nlew::states::{
    battery_sample, ginibre, haar_ket, ppt_classify, random_hermitian, random_state, sample_rng, DensityMatrix,
    PptClass,
};
use nlew::witness::{wl_c, wl_p};
use nlew::Error;

const DIMS: [(usize, usize); 5] = [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)];

fn dims(i: usize) -> DimPair {
    let (a, b) = DIMS[i % DIMS.len()];
    DimPair::new(a, b).unwrap()
}

fn psd(n: usize, seed: u64) -> ComplexMatrix {
    let g = ginibre(n, n, &mut sample_rng(seed, 7));
    let m = &g * &g.adjoint();
    m.scale(1.0 / m.trace().re)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), di in 0usize..5) {
        let d = dims(di);
        let mut rng = sample_rng(seed, 0);
        let a = ginibre(d.d1(), d.d1(), &mut rng);
        let b = ginibre(d.d2(), d.d2(), &mut rng);
        let ab = kron(&a, &b);
        let tb = partial_trace(&ab, d, Subsystem::B).unwrap();
        let ta = partial_trace(&ab, d, Subsystem::A).unwrap();
        prop_assert!(tb.approx_eq(&a.scale_complex(b.trace()), 1e-10));
        prop_assert!(ta.approx_eq(&b.scale_complex(a.trace()), 1e-10));
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), di in 0usize..5) {
        let d = dims(di);
        let m = ginibre(d.total(), d.total(), &mut sample_rng(seed, 1));
        for s in [Subsystem::A, Subsystem::B] {
            let back = partial_transpose(&partial_transpose(&m, d, s).unwrap(), d, s).unwrap();
            prop_assert!(back.approx_eq(&m, 0.0));
        }
        let both = partial_transpose(&partial_transpose(&m, d, Subsystem::A).unwrap(), d, Subsystem::B).unwrap();
        prop_assert!(both.approx_eq(&m.transpose(), 0.0));
    }

    #[test]
    fn partial_transpose_preserves_spectrum_of_products(seed in any::<u64>(), di in 0usize..5) {
        let d = dims(di);
        let rho = DensityMatrix::product(&psd(d.d1(), seed), &psd(d.d2(), seed ^ 1)).unwrap();
        let pt = hermitian_spectrum(&rho.partial_transpose_b()).unwrap();
        prop_assert!(pt.lambda_min() > -1e-12);
    }

    #[test]
    fn decomposition_round_trip(seed in any::<u64>(), di in 0usize..4) {
        let d = dims(di);
        let h = random_hermitian(d.total(), &mut sample_rng(seed, 2));
        let back = reconstruct(&decompose(&h, d).unwrap()).unwrap();
        prop_assert!(back.approx_eq(&h, 1e-10));
    }

    #[test]
    fn separable_samples_are_ppt_states(seed in any::<u64>(), i in 0u64..1000, di in 0usize..5) {
        let rho = battery_sample(dims(di), seed, i);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.spectrum().lambda_min() > -1e-12);
        prop_assert_ne!(ppt_classify(&rho).class, PptClass::Npt);
    }

    #[test]
    fn random_states_pass_validation(seed in any::<u64>(), di in 0usize..5) {
        let d = dims(di);
        let rho = random_state(d, &mut sample_rng(seed, 3));
        prop_assert!(DensityMatrix::new(d, rho.matrix().clone()).is_ok());
        let scaled = rho.matrix().scale(1.5);
        prop_assert!(matches!(DensityMatrix::new(d, scaled), Err(Error::InvalidState(_))));
    }

    #[test]
    fn realignment_matches_correlation_trace_norm(seed in any::<u64>(), di in 0usize..5) {
        let d = dims(di);
        let rho = random_state(d, &mut sample_rng(seed, 4));
        let r = realignment_trace_norm(rho.matrix(), d).unwrap();
        let c = correlation_matrix_canonical(rho.matrix(), d).unwrap().trace_norm();
        prop_assert!((r - c).abs() < 1e-9, "{r} vs {c}");
    }

    #[test]
    fn nlew_values_nonnegative_on_separable_states(seed in any::<u64>(), i in 0u64..1000, p in 0.01f64..1.0) {
        let w = wl_p(p).unwrap();
        let rho = battery_sample(w.dims(), seed, i);
        let sep = closed_form_wlp(p).unwrap();
        for kind in [NlewKind::FBasic, NlewKind::Wnl1, NlewKind::Wnl2, NlewKind::Wnl3] {
            let v = evaluate(kind, Some(&w), &rho, Some(sep)).unwrap().value;
            prop_assert!(v > -1e-10, "{kind} gave {v} at p = {p}");
        }
    }

    #[test]
    fn materialized_operator_reproduces_value(seed in any::<u64>(), p in 0.01f64..1.0) {
        let w = wl_p(p).unwrap();
        let rho = random_state(w.dims(), &mut sample_rng(seed, 5));
        let sep = closed_form_wlp(p).unwrap();
        for kind in [NlewKind::FBasic, NlewKind::Wnl1, NlewKind::Wnl2, NlewKind::Wnl3, NlewKind::Wnl4] {
            let e = evaluate(kind, Some(&w), &rho, Some(sep)).unwrap();
            let op = materialize(kind, Some(&w), &rho, Some(sep)).unwrap();
            let direct = op.trace_product(rho.matrix()).unwrap().re;
            prop_assert!((direct - e.value).abs() < 1e-10, "{kind}: {direct} vs {}", e.value);
            prop_assert!((e.recompute().unwrap() - e.value).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn seesaw_bounded_by_products_and_spectrum(seed in any::<u64>()) {
        let w = wl_c();
        let w2 = w.squared();
        let settings = SeesawSettings { restarts: 8, seed, ..Default::default() };
        let r = seesaw_max(&w2, w.dims(), &settings).unwrap();
        prop_assert!(r.max_value <= lambda_max(&w2).unwrap() + 1e-12);
        prop_assert!(r.monotone);
        let mut rng = sample_rng(seed, 6);
        for _ in 0..20 {
            let a = haar_ket(3, &mut rng);
            let b = haar_ket(3, &mut rng);
            prop_assert!(product_value(&w2, w.dims(), &a, &b) <= r.max_value + 1e-10);
        }
    }
}

#[test]
fn seesaw_matches_closed_form_for_wl_p() {
    for p in [0.1, 0.35, 0.6, 0.9] {
        let w = wl_p(p).unwrap();
        let r = seesaw_max(&w.squared(), w.dims(), &SeesawSettings::default()).unwrap();
        assert!((r.max_value - closed_form_wlp(p).unwrap()).abs() < 1e-9, "p = {p}");
    }
}

#[test]
fn negative_trace_operator_is_rejected() {
    let d = DimPair::new(2, 2).unwrap();
    let m = ComplexMatrix::from_diagonal(&[1.2, -0.2, 0.0, 0.0]);
    assert!(matches!(DensityMatrix::new(d, m), Err(Error::NotPositive { .. })));
}

#[test]
fn wnl4_is_negative_on_the_maximally_mixed_state_at_p_one() {
    let w = wl_p(1.0).unwrap();
    assert!(w.squared().approx_eq(&ComplexMatrix::identity(4).scale(0.25), 1e-15));
    let rho = DensityMatrix::maximally_mixed(w.dims());
    let e = evaluate(NlewKind::Wnl4, Some(&w), &rho, Some(closed_form_wlp(1.0).unwrap())).unwrap();
    assert_eq!(e.intermediates.h1, Some(0.0));
    assert!((e.value + 3.0 / 1024.0).abs() < 1e-15, "{}", e.value);
}
