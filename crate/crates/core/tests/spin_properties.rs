use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wickbell_core::spin_geom::*;
use wickbell_core::Complex64;

fn random_unit(rng: &mut ChaCha8Rng) -> UnitVector {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    UnitVector::from_angles(z.acos(), rng.gen_range(0.0..TAU))
}

#[test]
fn overlap_matches_spinor_inner_product_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (ni, nf, n0) = (random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng));
        let area_form = coherent_overlap(&ni, &nf, &n0);
        let direct = coherent_state_with_reference(&nf, &n0).inner(&coherent_state_with_reference(&ni, &n0));
        worst = worst.max((area_form - direct).norm());
    }
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn overlap_in_default_gauge_matches_plain_coherent_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let (ni, nf) = (random_unit(&mut rng), random_unit(&mut rng));
        let direct = coherent_state(&nf).inner(&coherent_state(&ni));
        assert!((coherent_overlap(&ni, &nf, &UnitVector::Z) - direct).norm() < 1e-10);
    }
}

#[test]
fn octant_overlap() {
    let v = coherent_overlap(&UnitVector::Y, &UnitVector::X, &UnitVector::Z);
    let want = Complex64::from_polar(0.5f64.sqrt(), FRAC_PI_4);
    assert!((v - want).norm() < 1e-10);
    let direct = coherent_state(&UnitVector::X).inner(&coherent_state(&UnitVector::Y));
    assert!((v - direct).norm() < 1e-12);
    assert!((spherical_triangle_area(&UnitVector::X, &UnitVector::Y, &UnitVector::Z).unwrap() - PI / 2.0).abs() < 1e-15);
}

#[test]
fn kernels_coincide_and_are_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let (ni, nf, n0) = (random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng));
        let (km, ke) = free_spin_kernel_pair(&ni, &nf, &n0);
        assert_eq!(km, ke);
        assert!(km.norm() <= 1.0 + 1e-15);
    }
    // Zero area leaves a real kernel.
    let a = UnitVector::from_angles(0.3, 1.0);
    let b = UnitVector::from_angles(0.9, 1.0);
    let (k, _) = free_spin_kernel_pair(&a, &b, &UnitVector::Z);
    assert!(k.im.abs() < 1e-15 && k.re > 0.0);
}

#[test]
fn resolution_of_identity_on_fibonacci_sphere() {
    // (1/2π)∫|n⟩⟨n| dΩ with equal weights 4π/N.
    let n = 1_000_000;
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for k in 0..n {
        let z = 1.0 - (2 * k + 1) as f64 / n as f64;
        let v = UnitVector::from_angles(z.acos(), golden * k as f64);
        let s = coherent_state(&v);
        let amp = [s.a(), s.b()];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += amp[i] * amp[j].conj();
            }
        }
    }
    let w = 2.0 / n as f64;
    for i in 0..2 {
        for j in 0..2 {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((m[i][j] * w - expect).norm() < 1e-3, "{i}{j}: {}", m[i][j] * w);
        }
    }
}

fn cap_polygon(rng: &mut ChaCha8Rng, k: usize) -> Vec<UnitVector> {
    // Star-shaped around a random center, so the polygon is simple.
    let center = random_unit(rng);
    let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let rot = SpinRotation::between(&UnitVector::Z, &center);
    angles
        .iter()
        .map(|&a| UnitVector::from_angles(rng.gen_range(0.2..1.2), a).rotated_by(&rot))
        .collect()
}

#[test]
fn phase_is_additive_across_a_shared_chord() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let k = rng.gen_range(5..12);
        let pts = cap_polygon(&mut rng, k);
        let cut = rng.gen_range(2..k - 1);
        let whole = SphericalPath::new(pts.clone(), true).unwrap();
        let left = SphericalPath::new(pts[..=cut].to_vec(), true).unwrap();
        let mut right_pts = pts[cut..].to_vec();
        right_pts.push(pts[0]);
        let right = SphericalPath::new(right_pts, true).unwrap();
        let sum = wz_phase_closed_path(&left).unwrap() + wz_phase_closed_path(&right).unwrap();
        assert!(phase_distance(wz_phase_closed_path(&whole).unwrap(), sum) < 1e-8);
    }
}

#[test]
fn closed_loop_phase_is_gauge_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let pts = cap_polygon(&mut rng, 7);
        let path = SphericalPath::new(pts, true).unwrap();
        let base = loop_overlap_phase(&path, &UnitVector::Z).unwrap();
        assert!(phase_distance(base, wz_phase_closed_path(&path).unwrap()) < 1e-8);
        for _ in 0..5 {
            let n0 = random_unit(&mut rng);
            let v = loop_overlap_phase(&path, &n0).unwrap();
            assert!(phase_distance(base, v) < 1e-10, "{base} {v}");
        }
    }
}

#[test]
fn equator_and_reversal() {
    let eq = SphericalPath::latitude_circle(PI / 2.0, 256).unwrap();
    assert!(phase_distance(wz_phase_closed_path(&eq).unwrap(), PI) < 1e-6);
    let octant = SphericalPath::new(vec![UnitVector::X, UnitVector::Y, UnitVector::Z], true).unwrap();
    let w = wz_phase_closed_path(&octant).unwrap();
    assert!((w - FRAC_PI_4).abs() < 1e-12);
    assert!((wz_phase_closed_path(&octant.reversed()).unwrap() + w).abs() < 1e-12);
}

#[test]
fn latitude_loops_converge_to_cap_phase() {
    // The geodesic polygon approaches the cap area 2π(1 − cos θ) as O(1/N²).
    let theta = 1.0f64;
    let exact = PI * (1.0 - theta.cos());
    let mut prev = f64::INFINITY;
    for segs in [32, 64, 128, 256, 512] {
        let path = SphericalPath::latitude_circle(theta, segs).unwrap();
        let err = phase_distance(wz_phase_closed_path(&path).unwrap(), exact);
        assert!(err < prev);
        prev = err;
    }
    assert!(prev < 1e-4);
}
