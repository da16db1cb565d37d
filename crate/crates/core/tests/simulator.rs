mod common;

use common::*;
use laws_vqa::ansatz::{build_h2_ansatz, build_random_pqc};
use laws_vqa::{zero_state, CostFunction, PauliSumHamiltonian, StateVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuits_preserve_norm(n in 1usize..=4, p in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = build_random_pqc(n, p, seed).unwrap();
        let input = random_state(n, &mut rng);
        let out = circuit.evaluate_state(&random_theta(p, &mut rng), &input).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evaluate_state_matches_dense_product(n in 1usize..=4, p in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = build_random_pqc(n, p, seed).unwrap();
        let theta = random_theta(p, &mut rng);
        let input = random_state(n, &mut rng);
        let out = circuit.evaluate_state(&theta, &input).unwrap();
        let u = circuit_unitary(n, circuit.gates(), &theta);
        let expect = &u * nalgebra::DVector::from_column_slice(input.amplitudes());
        for (a, b) in out.amplitudes().iter().zip(expect.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        let eye = u.adjoint() * &u;
        prop_assert!((eye - CMat::identity(1 << n, 1 << n)).norm() < 1e-12);
    }

    #[test]
    fn expectation_matches_dense_oracle(n in 1usize..=4, terms in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(n, terms, &mut rng);
        let dense = hamiltonian_dense(&h);
        prop_assert!((&dense - dense.adjoint()).norm() < 1e-14);
        prop_assert!((h.dense_matrix() - &dense).norm() < 1e-12);
        let psi = random_state(n, &mut rng);
        let e = dense_expectation(&dense, psi.amplitudes());
        prop_assert!(e.im.abs() < 1e-12);
        prop_assert!((h.expectation(&psi).unwrap() - e.re).abs() < 1e-12);
    }

    #[test]
    fn cost_respects_variational_bound(seed in any::<u64>()) {
        let (cf, theta) = random_cost(seed);
        let e0 = cf.observable().exact_ground_energy().unwrap();
        prop_assert!(cf.cost(&theta).unwrap() >= e0 - 1e-10);
    }

    #[test]
    fn cost_is_two_pi_periodic(seed in any::<u64>(), k in 0usize..8) {
        let (cf, theta) = random_cost(seed);
        let k = k % theta.len();
        let mut shifted = theta.clone();
        shifted[k] += 2.0 * std::f64::consts::PI;
        prop_assert!((cf.cost(&theta).unwrap() - cf.cost(&shifted).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn big_endian_basis_ordering() {
    let s = StateVector::from_bits("1100").unwrap();
    assert_eq!(s.amplitudes()[12].re, 1.0);
    let z0 = PauliSumHamiltonian::parse("1.0 Z0", Some(4), "inline").unwrap();
    assert_eq!(z0.expectation(&s).unwrap(), -1.0);
    let z3 = PauliSumHamiltonian::parse("1.0 Z3", Some(4), "inline").unwrap();
    assert_eq!(z3.expectation(&s).unwrap(), 1.0);
}

#[test]
fn shipped_h2_hamiltonian_reference_energies() {
    let h = PauliSumHamiltonian::h2_sto3g();
    let e0 = h.exact_ground_energy().unwrap();
    assert!((e0 - (-1.1361894)).abs() < 5e-4, "{e0}");
    // Independent diagonalization of the dense oracle matrix.
    let dense = hamiltonian_dense(&h);
    let eig = dense.map(|z| z.re).symmetric_eigen();
    let oracle = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((e0 - oracle).abs() < 1e-10);
    assert!(dense.map(|z| z.im).norm() < 1e-14);

    let hf = h.expectation(&StateVector::from_bits("1100").unwrap()).unwrap();
    assert!(hf > -1.1361894);
    let cf = CostFunction::new(build_h2_ansatz(), h).unwrap();
    assert!((cf.cost(&[0.0]).unwrap() - hf).abs() < 1e-12);
}

#[test]
fn zero_state_and_dense_limits() {
    let s = zero_state(3).unwrap();
    assert_eq!(s.dim(), 8);
    assert_eq!(s.amplitudes()[0].re, 1.0);
    assert!(zero_state(0).is_err());
    assert!(zero_state(64).is_err());
}
