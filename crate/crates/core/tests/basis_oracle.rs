mod common;

use common::OracleSummary;
use proptest::prelude::*;
use wavinv::basis::{BasisSpec, WaveletFamily};

fn assert_clean(s: OracleSummary) {
    assert!(s.checks > 0);
    assert!(
        s.passed(),
        "{} of {} checks failed:\n{}",
        s.failures.len(),
        s.checks,
        s.failures.join("\n")
    );
}

#[test]
fn closed_form_integrals_match_quadrature() {
    let mut s = OracleSummary::default();
    common::integral_equivalence(&mut s, 2024);
    assert!(s.checks >= 20_000);
    assert_clean(s);
}

#[test]
fn taylor_wavelets_are_normalised() {
    let mut s = OracleSummary::default();
    common::taylor_normality(&mut s);
    assert_clean(s);
}

#[test]
fn chebyshev_wavelets_are_weighted_orthonormal() {
    let mut s = OracleSummary::default();
    common::chebyshev_orthonormality(&mut s);
    assert_clean(s);
}

#[test]
fn antiderivatives_are_continuous() {
    let mut s = OracleSummary::default();
    common::continuity(&mut s);
    assert_clean(s);
}

#[test]
fn chebyshev_polynomials_match_cosine_identity() {
    let mut s = OracleSummary::default();
    common::chebyshev_identity(&mut s);
    assert_clean(s);
}

#[test]
fn flat_indices_round_trip() {
    let mut s = OracleSummary::default();
    common::flat_roundtrip(&mut s);
    assert_clean(s);
}

#[test]
fn oracle_rule_is_exact_on_polynomials() {
    let v = common::gl5(|x| x.powi(9), 0.0, 1.0, &[]);
    assert!((v - 0.1).abs() < 1e-14);
    let w = common::gauss_chebyshev(|t| t * t);
    assert!((w - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
}

fn family() -> impl Strategy<Value = WaveletFamily> {
    prop_oneof![
        Just(WaveletFamily::Taylor),
        Just(WaveletFamily::ChebyshevFirstKind)
    ]
}

proptest! {
    #[test]
    fn projection_reconstructs_cell_polynomials(
        fam in family(),
        k in 1u32..4,
        coeffs in prop::collection::vec(-3.0f64..3.0, 4),
        x in 0.0f64..=1.0,
    ) {
        // any cubic lies in the span when M = 4
        let f = |s: f64| coeffs[0] + coeffs[1] * s + coeffs[2] * s * s + coeffs[3] * s.powi(3);
        let spec = BasisSpec::new(fam, k, 4).unwrap();
        let d = spec.project(f).unwrap();
        prop_assert!((spec.reconstruct(&d, x) - f(x)).abs() < 1e-8);
    }

    #[test]
    fn chebyshev_expansion_reconstructs_cell_polynomials(
        k in 1u32..4,
        coeffs in prop::collection::vec(-3.0f64..3.0, 3),
        x in 0.0f64..=1.0,
    ) {
        let f = |s: f64| coeffs[0] + coeffs[1] * s + coeffs[2] * s * s;
        let spec = BasisSpec::new(WaveletFamily::ChebyshevFirstKind, k, 3).unwrap();
        let d = spec.expand(f).unwrap();
        prop_assert!((spec.reconstruct(&d, x) - f(x)).abs() < 1e-8);
    }

    #[test]
    fn basis_vectors_agree_with_pointwise_evaluation(fam in family(), k in 1u32..5, m in 1usize..7, x in 0.0f64..=1.0) {
        let spec = BasisSpec::new(fam, k, m).unwrap();
        let v = spec.basis_vectors(x);
        for idx in spec.indices() {
            prop_assert_eq!(v.values[idx.flat], spec.eval_wavelet(idx, x).unwrap());
            prop_assert_eq!(v.first[idx.flat], spec.eval_first_integral(idx, x).unwrap());
            prop_assert_eq!(v.second[idx.flat], spec.eval_second_integral(idx, x).unwrap());
        }
    }
}
