//! Property tests for the linear-algebra kernels, gates, and schedules.

use num_complex::Complex64;
use proptest::prelude::*;

use mcqite::compiler::{
    build_hedge, build_single_layer, build_tree, to_v_schedule, validate, Schedule,
    ValidationOutcome,
};
use mcqite::gates::{gate_u, gate_v, gate_w, relative_hamiltonian, swap_op};
use mcqite::models::HamiltonianSpec;
use mcqite::numerics::NumericsConfig;
use mcqite::qcore::{
    herm_exp, kron, partial_trace, trace_distance, ComplexMatrix, DensityOp, Purity, StateVector,
};

fn cfg() -> NumericsConfig {
    NumericsConfig::default()
}

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn square_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex_entry(), n * n)
        .prop_map(move |data| ComplexMatrix::new(n, n, data).unwrap())
}

/// Random Hermitian matrix (A + A†)/2.
fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    square_matrix(n).prop_map(|a| (&a + &a.adjoint()).scale(Complex64::new(0.5, 0.0)))
}

/// Random density operator G G† / Tr.
fn density(n: usize) -> impl Strategy<Value = DensityOp> {
    square_matrix(n).prop_map(|g| {
        let gram = &g * &g.adjoint();
        let tr = gram.trace().re.max(1e-9);
        DensityOp::from_matrix(
            gram.scale(Complex64::new(1.0 / tr, 0.0)),
            Purity::Unknown,
            &cfg(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn herm_exp_unitary_inverse(h in hermitian(3), t in -10.0f64..10.0) {
        let fwd = herm_exp(&h, Complex64::new(0.0, t), &cfg()).unwrap();
        let bwd = herm_exp(&h, Complex64::new(0.0, -t), &cfg()).unwrap();
        let residual = (&(&fwd * &bwd) - &ComplexMatrix::identity(3)).max_abs();
        prop_assert!(residual <= 1e-10, "residual {residual}");
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(rho in density(6)) {
        let reduced = partial_trace(&rho, &[2, 3], &[0]).unwrap();
        prop_assert!((reduced.trace() - rho.trace()).abs() <= 1e-10);
        let min = reduced.eigenvalues()[0];
        prop_assert!(min >= -1e-9, "negative eigenvalue {min}");
    }

    #[test]
    fn trace_distance_triangle_inequality(
        a in density(4),
        b in density(4),
        c in density(4),
    ) {
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9, "ac={ac} > ab+bc={}", ab + bc);
    }

    #[test]
    fn kron_mixed_product(
        a in square_matrix(2),
        b in square_matrix(3),
        c in square_matrix(2),
        d in square_matrix(3),
    ) {
        let left = &kron(&a, &b, &cfg()).unwrap() * &kron(&c, &d, &cfg()).unwrap();
        let right = kron(&(&a * &c), &(&b * &d), &cfg()).unwrap();
        prop_assert!((&left - &right).max_abs() <= 1e-10);
    }

    #[test]
    fn u_product_form_equals_closed_form(h in hermitian(3), eps in 0.0f64..0.5) {
        // e^{-eps K S} via the Hermitian generator iKS (SKS = -K makes KS
        // anti-Hermitian).
        let spec = HamiltonianSpec::explicit(h, &cfg()).unwrap();
        let u = gate_u(&spec, eps, 1, &cfg()).unwrap();
        let ks = &relative_hamiltonian(&spec) * &swap_op(3);
        let closed = herm_exp(
            &ks.scale(Complex64::new(0.0, 1.0)),
            Complex64::new(0.0, eps),
            &cfg(),
        )
        .unwrap();
        prop_assert!((u.matrix() - &closed).max_abs() <= 1e-10);
    }

    #[test]
    fn swap_conjugation_inverts_u(h in hermitian(2), eps in 0.0f64..0.5) {
        let spec = HamiltonianSpec::explicit(h, &cfg()).unwrap();
        let u = gate_u(&spec, eps, 1, &cfg()).unwrap();
        let s = swap_op(2);
        let sus = &(&s * u.matrix()) * &s;
        prop_assert!((&sus - &u.matrix().adjoint()).max_abs() <= 1e-10);
    }

    #[test]
    fn gates_unitary_and_identity_at_zero(h in hermitian(2), eps in 0.0f64..1.0) {
        // Construction already checks unitarity to 1e-10; here we only
        // exercise it across random inputs and the eps -> 0 limit.
        let spec = HamiltonianSpec::explicit(h, &cfg()).unwrap();
        gate_u(&spec, eps, 1, &cfg()).unwrap();
        gate_v(&spec, eps, -1, &cfg()).unwrap();
        gate_w(&spec, eps, &cfg()).unwrap();
        let id = ComplexMatrix::identity(4);
        prop_assert!((gate_u(&spec, 0.0, 1, &cfg()).unwrap().matrix() - &id).max_abs() <= 1e-12);
        prop_assert!((gate_v(&spec, 0.0, 1, &cfg()).unwrap().matrix() - &id).max_abs() <= 1e-12);
        prop_assert!((gate_w(&spec, 0.0, &cfg()).unwrap().matrix() - &id).max_abs() <= 1e-12);
    }

    #[test]
    fn built_schedules_validate_and_round_trip(
        family in 0usize..3,
        n in 1u32..7,
        sign in prop::bool::ANY,
        as_v in prop::bool::ANY,
    ) {
        let mut s = match family {
            0 => build_tree(n, &cfg()).unwrap(),
            1 => build_hedge(n, &cfg()).unwrap(),
            _ => build_single_layer(n).unwrap(),
        };
        s.sign = if sign { 1 } else { -1 };
        if as_v {
            s = to_v_schedule(&s).unwrap();
        }
        let cert = match validate(&s) {
            ValidationOutcome::Valid(c) => c,
            ValidationOutcome::Invalid(v) => return Err(TestCaseError::fail(format!("{v:?}"))),
        };
        prop_assert!(cert.optimal_gate_count);
        prop_assert_eq!(cert.final_potential, 2 * cert.gate_count as u64);
        let expected_first = if family == 2 { 1 } else { n as i32 };
        prop_assert_eq!(cert.first_copy_steps, expected_first);
        let back = Schedule::parse(&s.serialize()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn multi_copy_purity_within_bounds(eps in 0.0f64..0.5) {
        use mcqite::engines::{run_statevector, RunOptions};
        use mcqite::models::InitialStateSpec;
        let h = HamiltonianSpec::single_qubit_z();
        let s = build_hedge(2, &cfg()).unwrap();
        let r = run_statevector(&s, &h, &InitialStateSpec::PlusAll, eps, RunOptions::default(), &cfg()).unwrap();
        let p = r.first_copy.purity_value();
        prop_assert!(p >= 0.5 - 1e-10 && p <= 1.0 + 1e-10, "purity {p}");
        let _ = StateVector::basis(2, 0);
    }
}
