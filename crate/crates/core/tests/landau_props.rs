use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;
use singular_mhd::fields::VectorField;
use singular_mhd::landau::{a_of_beta, beta_of_a};
use singular_mhd::{LandauParam, LandauSolution, Vec3};
use std::f64::consts::PI;

fn point() -> impl Strategy<Value = Vec3> {
    (0.05f64..3.0, -1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(r, z, t)| {
        let s = (1.0 - z * z).sqrt();
        Vec3::new(s * t.cos(), s * t.sin(), z) * r
    })
}

fn direction() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(z, t)| {
        let s = (1.0 - z * z).sqrt();
        Vec3::new(s * t.cos(), s * t.sin(), z)
    })
}

#[test]
fn beta_decreases_and_has_the_expected_tail() {
    let mut prev = f64::INFINITY;
    let mut a: f64 = 1.01;
    while a <= 1e3 {
        let b = beta_of_a(LandauParam::Finite(a)).unwrap();
        assert!(b < prev, "not decreasing at a = {a}");
        prev = b;
        a *= 1.002;
    }
    for (a, tol) in [(1e3, 1e-2), (1e4, 1e-3)] {
        let b = beta_of_a(LandauParam::Finite(a)).unwrap();
        assert!((a * b / (16.0 * PI) - 1.0).abs() < tol);
    }
}

#[test]
fn small_force_bound_on_the_unit_sphere() {
    // K = sup |U^b| / |b| over β ≤ 1, measured on a sphere sample
    let sphere: Vec<Vec3> = (0..2000)
        .map(|k| {
            let z = -1.0 + 2.0 * (k as f64 + 0.5) / 2000.0;
            let t = k as f64 * 2.399_963_229_728_653;
            let s = (1.0 - z * z).sqrt();
            Vec3::new(s * t.cos(), s * t.sin(), z)
        })
        .collect();
    let ratio = |beta: f64| {
        let u = LandauSolution::axial(beta).unwrap().velocity();
        sphere
            .iter()
            .map(|x| u.value(x).unwrap().norm())
            .fold(0.0, f64::max)
            / beta
    };
    let k = [1e-3, 1e-2, 0.1, 0.5, 1.0]
        .iter()
        .map(|&b| ratio(b))
        .fold(0.0, f64::max);
    println!("measured small-force constant K = {k:.6}");
    assert!(k.is_finite() && k > 0.0);
    for beta in [2e-3, 0.03, 0.3, 0.9] {
        assert!(ratio(beta) <= k * 1.01);
    }
}

proptest! {
    #[test]
    fn round_trip(log_beta in -3.0f64..3.0) {
        let beta = 10f64.powf(log_beta);
        let back = beta_of_a(a_of_beta(beta).unwrap()).unwrap();
        prop_assert!((back - beta).abs() <= 1e-10 * beta.max(1.0));
    }

    #[test]
    fn homogeneity(beta in 0.01f64..20.0, dir in direction(), x in point(), lambda in 0.1f64..10.0) {
        let sol = LandauSolution::with_direction(beta, &dir).unwrap();
        let (u, p) = sol.eval(&x).unwrap();
        let (ul, pl) = sol.eval(&(x * lambda)).unwrap();
        prop_assert!((ul * lambda - u).norm() <= 1e-12 * u.norm().max(1e-300));
        prop_assert!((pl * lambda * lambda - p).abs() <= 1e-12 * p.abs().max(1e-300) + 1e-14 * u.norm_squared());
    }

    #[test]
    fn rotation_equivariance(beta in 0.01f64..20.0, axis in direction(), angle in 0.0f64..PI, x in point()) {
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        let b = Vec3::new(0.0, 0.0, beta);
        let s = LandauSolution::new(b).unwrap();
        let sr = LandauSolution::new(r * b).unwrap();
        let lhs = sr.eval(&(r * x)).unwrap().0;
        let rhs = r * s.eval(&x).unwrap().0;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0 / x.norm()));
    }

    #[test]
    fn residual_and_divergence_vanish(beta in 0.01f64..50.0, dir in direction(), x in point()) {
        let sol = LandauSolution::with_direction(beta, &dir).unwrap();
        let r = x.norm();
        let scale = beta.max(1.0).powi(2);
        prop_assert!(sol.ns_residual(&x).unwrap().norm() * r.powi(3) <= 1e-9 * scale);
        prop_assert!(sol.gradient(&x).unwrap().0.trace().abs() * r * r <= 1e-10 * scale);
    }
}
