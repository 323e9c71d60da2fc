use labelqm::spin::*;
use proptest::prelude::*;

fn q() -> impl Strategy<Value = Quaternion> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
}

fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
    (a - b).norm_sqr().sqrt() <= tol
}

proptest! {
    #[test]
    fn hamilton_product_is_associative(a in q(), b in q(), c in q()) {
        prop_assert!(close((a * b) * c, a * (b * c), 1e-10));
    }

    #[test]
    fn norm_is_multiplicative(a in q(), b in q()) {
        let lhs = (a * b).norm_sqr();
        prop_assert!((lhs - a.norm_sqr() * b.norm_sqr()).abs() <= 1e-10 * (1.0 + lhs));
    }

    #[test]
    fn conjugate_reverses_products(a in q(), b in q()) {
        prop_assert!(close((a * b).conj(), b.conj() * a.conj(), 1e-10));
        let n = a * a.conj();
        prop_assert!(close(n, Quaternion::new(a.norm_sqr(), 0.0, 0.0, 0.0), 1e-10));
    }

    /// Pure quaternions multiply as `-u.v + u x v`.
    #[test]
    fn pure_product_is_dot_and_cross(u in prop::array::uniform3(-2.0f64..2.0), v in prop::array::uniform3(-2.0f64..2.0)) {
        let p = Quaternion::pure(u) * Quaternion::pure(v);
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        prop_assert!(close(p, Quaternion::new(-dot, cross[0], cross[1], cross[2]), 1e-12));
    }

    #[test]
    fn random_hemisphere_sets_are_valid(k in 1usize..12, seed in any::<u64>()) {
        let d = sphere_directions(k, DirectionScheme::RandomHemisphere, seed).unwrap();
        prop_assert_eq!(d.len(), k);
        for n in d.directions() {
            prop_assert!((n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0).abs() < 1e-12);
            prop_assert!(n[2] > 0.0);
        }
    }
}

#[test]
fn exhaustive_structure_up_to_ten() {
    for k in 1..=10 {
        let dirs = sphere_directions(k, DirectionScheme::FibonacciHemisphere, 0).unwrap();
        for bits in 0..1u64 << k {
            let f = SpinLabel::from_bits(k, bits);
            let psi = spin_amplitude(&f, &dirs).unwrap();
            assert_eq!(spin_amplitude(&f.flipped(), &dirs).unwrap(), -psi);
            assert_eq!(psi.w, 0.0);
            // norm of the signed 3-vector sum, accumulated the same way
            let mut v = [0.0f64; 3];
            for ((s, n), w) in f.signs().iter().zip(dirs.directions()).zip(dirs.weights()) {
                for a in 0..3 {
                    let t = n[a] * w;
                    v[a] += if *s < 0 { -t } else { t };
                }
            }
            assert_eq!(psi.norm_sqr(), v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        }
        for n0 in 0..k {
            let ens = conditional_ensemble(n0, &dirs).unwrap();
            assert_eq!(ens.len(), 1 << (k - 1));
            assert!(ens.iter().all(|(f, w)| *w >= 0.0 && f.signs()[n0] == 1));
            assert!((ens.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn three_axes_hand_sum() {
    let dirs = DirectionSet::new(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
    let psi = spin_amplitude(&SpinLabel::new(vec![1, 1, 1]).unwrap(), &dirs).unwrap();
    let third = 1.0 / 3.0;
    assert_eq!(psi, Quaternion::new(0.0, third, third, third));
    assert!((psi.norm_sqr() - third).abs() < 1e-15);
}

#[test]
fn two_orthogonal_directions_split_evenly() {
    let dirs = DirectionSet::new(vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
    let ens = conditional_ensemble(0, &dirs).unwrap();
    assert_eq!(ens.len(), 2);
    assert!((ens[0].1 - 0.5).abs() < 1e-15 && (ens[1].1 - 0.5).abs() < 1e-15);
    let c = direction_conditional(0, DirectionRef { index: 1, antipode: false }, &dirs).unwrap();
    assert!((c.theta_deg - 90.0).abs() < 1e-12);
    assert!((c.label_conditional - 0.5).abs() < 1e-15);
    assert!((c.quantum_conditional - 0.5).abs() < 1e-15);
}

#[test]
fn k8_conditional_against_enumeration() {
    let dirs = sphere_directions(8, DirectionScheme::FibonacciHemisphere, 0).unwrap();
    // every pair of representatives is well separated
    let d = dirs.directions();
    for a in 0..8 {
        for b in a + 1..8 {
            let cos = d[a][0] * d[b][0] + d[a][1] * d[b][1] + d[a][2] * d[b][2];
            assert!(cos.clamp(-1.0, 1.0).acos().to_degrees() > 20.0);
        }
    }
    // brute-force over all 2^8 labels, unnormalized weights
    for m in 1..8 {
        let (mut num, mut den) = (0.0, 0.0);
        for bits in 0..256u64 {
            let f = SpinLabel::from_bits(8, bits);
            if f.signs()[0] != 1 {
                continue;
            }
            let w = spin_amplitude(&f, &dirs).unwrap().norm_sqr();
            den += w;
            if f.signs()[m] == 1 {
                num += w;
            }
        }
        let c = direction_conditional(0, DirectionRef { index: m, antipode: false }, &dirs).unwrap();
        assert!((c.label_conditional - num / den).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&c.label_conditional));
        let anti = direction_conditional(0, DirectionRef { index: m, antipode: true }, &dirs).unwrap();
        assert!((anti.label_conditional + c.label_conditional - 1.0).abs() < 1e-12);
    }
}

#[test]
fn deviation_sweep_shapes() {
    for k in [4, 6, 8, 10, 12] {
        let rows = deviation_sweep(k).unwrap();
        assert_eq!(rows.len(), 2 * k);
        assert_eq!(rows[0].theta_deg, 0.0);
        assert_eq!(rows[0].deviation, 0.0);
        assert!(rows.windows(2).all(|w| w[0].theta_deg <= w[1].theta_deg));
        assert!((rows.last().unwrap().theta_deg - 180.0).abs() < 1e-6);
    }
}

#[test]
fn singlet_estimates() {
    let n = 100_000u64;
    let a = direction_in_xz(0.0);
    let perp = singlet_sample(a, direction_in_xz(90.0), n, 3).unwrap();
    assert!(perp.correlation.abs() < 3.0 / (n as f64).sqrt());
    let sixty = singlet_sample(a, direction_in_xz(60.0), n, 4).unwrap();
    assert!((sixty.correlation + 0.5).abs() < 3.0 * (0.75 / n as f64).sqrt());
    for est in [perp, sixty] {
        assert!(est.mean_a.abs() < 3.0 / (n as f64).sqrt());
        assert!(est.mean_b.abs() < 3.0 / (n as f64).sqrt());
    }
    assert!(singlet_sample(a, [0.0; 3], 10, 1).is_err());
}

#[test]
fn singlet_seeded() {
    let a = direction_in_xz(0.0);
    let b = direction_in_xz(45.0);
    assert_eq!(singlet_sample(a, b, 20_000, 8).unwrap(), singlet_sample(a, b, 20_000, 8).unwrap());
}
