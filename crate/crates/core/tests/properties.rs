use cpnsurf_core::chain::{HolomorphicCurve, ProjectorChain};
use cpnsurf_core::linalg::{
    hermitian_eigenvalues, inverse, killing_inner, matrix_exp, matrix_poly_residual, rel_residual, CMatrix, SuElement,
    C64,
};
use cpnsurf_core::minkowski::{kappa_star, tangent_ratio_residual, theta_identities, TravelingWaveModel};
use cpnsurf_core::spectral::{st_weierstrass_distance, SpectralParams};
use cpnsurf_core::suite::{reports_json, run_suite, SuiteConfig};
use cpnsurf_core::surface::{killing_closed_form, minimal_poly_roots, weierstrass_jet, weierstrass_surface};
use cpnsurf_core::words::{check_word, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_fn(n, |i, j| v[i * n + j]))
}

fn su(n: usize) -> impl Strategy<Value = SuElement> {
    matrix(n).prop_map(move |a| {
        let anti = (&a - &a.dagger()).scale_re(0.5);
        let t = anti.trace() / n as f64;
        SuElement::new(anti.shift(t)).unwrap()
    })
}

fn point() -> impl Strategy<Value = C64> {
    (0.0..2.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

/// A Veronese curve in general position: translated and with rescaled components.
fn curve() -> impl Strategy<Value = HolomorphicCurve> {
    (2usize..=4).prop_flat_map(|n| {
        (complex(), prop::collection::vec(0.5..2.0f64, n)).prop_map(move |(shift, scales)| {
            let base = HolomorphicCurve::veronese(n).unwrap().translate(shift);
            let comps = base.components().iter().zip(&scales).map(|(c, s)| c.iter().map(|z| z * s).collect()).collect();
            HolomorphicCurve::new(comps).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn killing_is_symmetric_and_positive((a, b) in (2usize..=5).prop_flat_map(|n| (su(n), su(n)))) {
        let ab = killing_inner(&a, &b).unwrap();
        prop_assert!((ab - killing_inner(&b, &a).unwrap()).abs() <= 1e-12);
        prop_assert!(killing_inner(&a, &a).unwrap() >= 0.0);
    }

    #[test]
    fn eigenvalues_reproduce_traces(a in (2usize..=6).prop_flat_map(matrix)) {
        let h = (&a + &a.dagger()).scale_re(0.5);
        let ev = hermitian_eigenvalues(&h).unwrap();
        prop_assert!((ev.iter().sum::<f64>() - h.trace().re).abs() <= 1e-10);
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        prop_assert!((sq - (&h * &h).trace().re).abs() <= 1e-10);
    }

    #[test]
    fn exp_of_su_is_unitary(x in (2usize..=5).prop_flat_map(su)) {
        let u = matrix_exp(x.matrix()).unwrap();
        let id = CMatrix::identity(x.dim());
        prop_assert!(rel_residual(&(&u.dagger() * &u), &id) <= 1e-12);
        prop_assert!(rel_residual(&inverse(&u).unwrap(), &u.dagger()) <= 1e-11);
    }

    #[test]
    fn chain_axioms_and_field_equations(curve in curve(), xi in point()) {
        let chain = ProjectorChain::build(&curve, xi, 3);
        prop_assume!(chain.is_ok());
        let chain = chain.unwrap();
        prop_assert!(chain.axiom_residuals().max() <= 1e-9);
        for k in 0..chain.dim() {
            let scale = chain.projector(k).derivative(1, 1).unwrap().norm_fro().max(1.0);
            prop_assert!(chain.el_residual(k).unwrap() <= 1e-9 * scale);
            prop_assert!(chain.conservation_residual(k).unwrap() <= 1e-9 * scale);
            prop_assert!(chain.lagrangian_density(k).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn surfaces_satisfy_minimal_polynomial_and_killing(curve in curve(), xi in point()) {
        let chain = ProjectorChain::build(&curve, xi, 2);
        prop_assume!(chain.is_ok());
        let chain = chain.unwrap();
        let n = chain.dim();
        let xs: Vec<CMatrix> = (0..n).map(|k| weierstrass_jet(&chain, k).unwrap().value().clone()).collect();
        for k in 0..n {
            let s = weierstrass_surface(&chain, k).unwrap();
            prop_assert!(matrix_poly_residual(&s.x, &minimal_poly_roots(k, n).unwrap()) <= 1e-9);
            for m in 0..n {
                let num = -0.5 * (&xs[k] * &xs[m]).trace().re;
                prop_assert!((num - killing_closed_form(k, m, n).unwrap()).abs() <= 1e-10);
            }
        }
        let total = xs.iter().enumerate().fold(CMatrix::zeros(n), |acc, (k, x)| {
            &acc + &x.scale_re(if k % 2 == 0 { 1.0 } else { -1.0 })
        });
        prop_assert!(total.norm_fro() <= 1e-10 || n % 2 == 1);
    }

    #[test]
    fn random_words_obey_their_class(curve in curve(), xi in point(), seed in any::<u64>()) {
        let chain = ProjectorChain::build(&curve, xi, 1);
        prop_assume!(chain.is_ok());
        let chain = chain.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(chain.dim(), |i, j| C64::new(i as f64 - 0.5, j as f64 * 0.3));
        for k in 0..chain.dim() {
            let p = chain.projector(k);
            let (v, d, db) = (p.value(), p.derivative(1, 0).unwrap(), p.derivative(0, 1).unwrap());
            for _ in 0..10 {
                let w = Word::random(&mut rng, 8);
                for c in check_word(&w, v, &d, &db, &a) {
                    prop_assert!(c.residual <= 1e-9, "{w} {:?} {}", c.identity, c.residual);
                }
            }
        }
    }

    #[test]
    fn sym_tafel_meets_weierstrass_on_the_coincidence_curve(curve in curve(), xi in point(), tau in 0.05..4.0f64, up in any::<bool>()) {
        let chain = ProjectorChain::build(&curve, xi, 1);
        prop_assume!(chain.is_ok());
        let chain = chain.unwrap();
        let params = SpectralParams::coincidence(tau, if up { 1.0 } else { -1.0 });
        prop_assume!(params.is_ok());
        let params = params.unwrap();
        for k in 0..chain.dim() {
            prop_assert!(st_weierstrass_distance(&chain, k, &params).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn kappa_star_is_a_root(lambda in -5.0..5.0f64) {
        prop_assume!((lambda.abs() - 1.0).abs() > 1e-3);
        prop_assert!(tangent_ratio_residual(kappa_star(lambda), lambda).abs() <= 1e-10 * (1.0 + lambda.abs()).powi(2));
    }

    #[test]
    fn theta_identities_hold_up_to_the_product_sign(
        omega in 0.2..3.0f64, kappa in -2.0..2.0f64, xp in -2.0..2.0f64, xm in -2.0..2.0f64,
    ) {
        let model = TravelingWaveModel::rotating_wave(omega, kappa, 0.3).unwrap();
        let r = theta_identities(&model.theta(xp, xm).unwrap()).unwrap();
        prop_assert!(r.max_corrected() <= 1e-10 * omega.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn suite_reports_depend_only_on_seed(seed in any::<u64>()) {
        let cfg = SuiteConfig { seed, samples: 6, ..SuiteConfig::veronese(3).unwrap() };
        let a = reports_json(&run_suite("P2.2.ii", &cfg).unwrap());
        let b = reports_json(&run_suite("P2.2.ii", &cfg).unwrap());
        prop_assert_eq!(a, b);
    }
}
