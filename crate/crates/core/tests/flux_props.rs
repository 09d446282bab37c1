use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use singular_mhd::fields::{ScaledField, ZeroField};
use singular_mhd::flux::{
    flux_integral, phi_identity_integral, stress_t1, vanishing_check, weak_form_residual,
    PolynomialProfile, StressKind, VolumeQuadrature,
};
use singular_mhd::profiles::{ProfileParams, SwirlField};
use singular_mhd::testfields::DivFreeTestField;
use singular_mhd::{FieldTriple, LandauSolution, QuadratureRule, Vec3};
use std::f64::consts::PI;
use std::sync::Arc;

fn direction() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(z, t)| {
        let s = (1.0 - z * z).sqrt();
        Vec3::new(s * t.cos(), s * t.sin(), z)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn t1_is_symmetric(beta in 0.01f64..10.0, dir in direction(), x in direction(), r in 0.1f64..3.0) {
        let sol = LandauSolution::with_direction(beta, &dir).unwrap();
        let b = SwirlField::from_registry("gauss", 0.7, &ProfileParams::default()).unwrap();
        let t = FieldTriple::landau(&sol);
        let t = FieldTriple::new(t.u.clone(), Arc::new(b), t.p.clone());
        let m = stress_t1(&t, &(x * r)).unwrap();
        prop_assert!((m - m.transpose()).amax() <= 1e-13 * m.amax().max(1.0));
    }

    #[test]
    fn landau_flux_is_radius_independent(beta in 0.01f64..10.0, dir in direction(), r1 in 0.1f64..2.0, r2 in 0.1f64..2.0) {
        let sol = LandauSolution::with_direction(beta, &dir).unwrap();
        let t = FieldTriple::landau(&sol);
        let f = |r: f64| flux_integral(&t, StressKind::T1, r, &QuadratureRule::sphere(r, 64, 32).unwrap()).unwrap().value;
        prop_assert!((f(r1) - f(r2)).norm() <= 1e-7 * beta.max(1.0));
    }

    #[test]
    fn catalog_satisfies_the_vanishing_condition(
        which in 0usize..3,
        amp in -3.0f64..3.0,
        width in 0.4f64..1.5,
        shift in -0.5f64..0.5,
        beta in 0.0f64..10.0,
        r in 0.2f64..2.0,
    ) {
        let name = ["gauss", "poly", "bump"][which];
        let b = SwirlField::from_registry(name, amp, &ProfileParams { width: Some(width), shift }).unwrap();
        let u = LandauSolution::axial(beta).unwrap().velocity();
        let t = FieldTriple::new(Arc::new(u), Arc::new(b), None);
        let rep = vanishing_check(&t, r, &QuadratureRule::sphere(r, 64, 32).unwrap()).unwrap();
        prop_assert!(rep.value.amax() < 1e-8, "{name}: {:?}", rep.value);
    }

    #[test]
    fn phi_identity_vanishes(seed in any::<u64>(), degree in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PolynomialProfile::random(&mut rng, degree);
        prop_assert!(phi_identity_integral(&p).abs() < 1e-10);
    }
}

#[test]
fn phi_identity_on_a_hundred_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for k in 0..100 {
        let p = PolynomialProfile::random(&mut rng, 1 + k % 9);
        assert!(phi_identity_integral(&p).abs() < 1e-10);
    }
}

#[test]
fn weak_form_quadratic_term_scales_quadratically() {
    let sol = LandauSolution::axial(1.0).unwrap();
    let u: Arc<dyn singular_mhd::VectorField> = Arc::new(sol.velocity());
    let vol = VolumeQuadrature::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        let zeta = DivFreeTestField::random_annular(&mut rng, 0.2, 1.8);
        let at = |s: f64| {
            let t = FieldTriple::new(
                Arc::new(ScaledField {
                    inner: u.clone(),
                    factor: s,
                }),
                Arc::new(ZeroField),
                None,
            );
            weak_form_residual(&t, &zeta, &vol).unwrap().momentum
        };
        let (one, two) = (at(1.0), at(2.0));
        assert!((two.first - 4.0 * one.first).abs() <= 1e-12 * one.first.abs().max(1e-12));
        assert!((two.linear - 2.0 * one.linear).abs() <= 1e-12 * one.linear.abs().max(1e-12));
    }
}
