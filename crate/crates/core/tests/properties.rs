use freestates::algebra::AlgebraElement;
use freestates::gram::{build, psd_check};
use freestates::word::reduce;
use freestates::{Complex64, L2Vector, Letter, ReducedWord, State, StateSpec};
use proptest::prelude::*;

const N: u16 = 3;

fn word(max_len: usize) -> impl Strategy<Value = ReducedWord> {
    prop::collection::vec((1..=N, any::<bool>()), 0..=max_len)
        .prop_map(|ls| reduce(N, ls.into_iter().map(|(g, p)| Letter::new(g, p))).unwrap())
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-2i32..=2, -2i32..=2).prop_map(|(re, im)| Complex64::new(re as f64, im as f64))
}

fn element() -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec((word(4), coeff()), 0..5).prop_map(|t| AlgebraElement::from_terms(N, t).unwrap())
}

fn vector() -> impl Strategy<Value = L2Vector> {
    prop::collection::vec((word(5), coeff()), 0..6).prop_map(|t| L2Vector::from_entries(N, t).unwrap())
}

fn close(x: &AlgebraElement, y: &AlgebraElement) -> bool {
    x.sub(y).unwrap().max_abs() < 1e-12
}

proptest! {
    #[test]
    fn multiplication_is_associative(a in word(8), b in word(8), c in word(8)) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identity_and_inverse(a in word(10)) {
        let e = ReducedWord::identity(N);
        prop_assert_eq!(a.multiply(&e).unwrap(), a.clone());
        prop_assert_eq!(e.multiply(&a).unwrap(), a.clone());
        prop_assert!(a.multiply(&a.inverse()).unwrap().is_identity());
        prop_assert_eq!(a.inverse().inverse(), a);
    }

    #[test]
    fn reduction_is_idempotent(a in word(12)) {
        prop_assert_eq!(reduce(N, a.letters().iter().copied()).unwrap(), a.clone());
        prop_assert_eq!(ReducedWord::parse(N, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn product_length_bound(a in word(8), b in word(8)) {
        let ab = a.multiply(&b).unwrap();
        prop_assert!(ab.len() <= a.len() + b.len());
        prop_assert_eq!((a.len() + b.len() - ab.len()) % 2, 0);
    }

    #[test]
    fn convolution_is_associative(x in element(), y in element(), z in element()) {
        let left = x.convolve(&y).unwrap().convolve(&z).unwrap();
        let right = x.convolve(&y.convolve(&z).unwrap()).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn adjoint_reverses_products(x in element(), y in element()) {
        let left = x.convolve(&y).unwrap().adjoint();
        let right = y.adjoint().convolve(&x.adjoint()).unwrap();
        prop_assert!(close(&left, &right));
        prop_assert!(close(&x.adjoint().adjoint(), &x));
    }

    #[test]
    fn left_action_is_a_module(x in element(), y in element(), v in vector()) {
        let left = x.convolve(&y).unwrap().act(&v).unwrap();
        let right = x.act(&y.act(&v).unwrap()).unwrap();
        prop_assert!(left.sub(&right).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn adjoint_is_the_hilbert_adjoint(x in element(), v in vector(), w in vector()) {
        let left = x.act(&v).unwrap().inner(&w).unwrap();
        let right = v.inner(&x.adjoint().act(&w).unwrap()).unwrap();
        prop_assert!((left - right).norm() < 1e-12);
    }

    #[test]
    fn states_are_hermitian(a in -1.0f64..=1.0, theta in 0.0f64..6.3, s in word(7)) {
        let phi = StateSpec::phi_twisted(N, a, theta).unwrap();
        prop_assert!((phi.value(&s.inverse()) - phi.value(&s).conj()).norm() < 1e-14);
    }

    #[test]
    fn phi_grams_on_random_sets_are_psd(
        a in -1.0f64..=1.0,
        theta in 0.0f64..6.3,
        ws in prop::collection::btree_set(word(4), 1..25),
    ) {
        let phi = StateSpec::phi_twisted(N, a, theta).unwrap();
        let words: Vec<_> = ws.into_iter().collect();
        let cert = psd_check(&build(&phi, &words).unwrap(), 1e-9).unwrap();
        prop_assert!(cert.is_psd, "min eigenvalue {}", cert.min_eigenvalue);
    }
}
