//! Property tests over randomized states, metrics, and unitaries.

use num_complex::Complex64;
use proptest::prelude::*;

use metricqm::dynamics::{evolve_ensemble, UnitaryGate};
use metricqm::linalg::{
    hermitian_eigen, matrix_sqrt_psd, partial_trace, trace_distance, ComplexMatrix, ComplexVector,
    Keep,
};
use metricqm::metric::{inner_product_a, normalize_a, MetricOperator};
use metricqm::states::Ensemble;

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn square_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(complex_entry(), dim * dim)
        .prop_map(move |entries| ComplexMatrix::new(dim, entries).unwrap())
}

fn hermitian_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    square_matrix(dim).prop_map(|m| {
        m.add(&m.dagger())
            .unwrap()
            .scale(Complex64::new(0.5, 0.0))
    })
}

fn metric(dim: usize) -> impl Strategy<Value = MetricOperator> {
    square_matrix(dim).prop_map(move |m| {
        let pd = m
            .dagger()
            .matmul(&m)
            .unwrap()
            .add(&ComplexMatrix::identity(dim).scale(Complex64::new(0.3, 0.0)))
            .unwrap();
        MetricOperator::validate(pd).unwrap()
    })
}

fn nonzero_vector(dim: usize) -> impl Strategy<Value = ComplexVector> {
    proptest::collection::vec(complex_entry(), dim)
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6)
        .prop_map(|v| ComplexVector::new(v).unwrap())
}

proptest! {
    #[test]
    fn eigen_reconstructs_and_is_orthonormal(h in hermitian_matrix(4)) {
        let eig = hermitian_eigen(&h).unwrap();
        prop_assert!(eig.reconstruct().sub(&h).unwrap().frobenius_norm() < 1e-10);
        let v = &eig.eigenvectors;
        let gram = v.dagger().matmul(v).unwrap();
        prop_assert!(gram.sub(&ComplexMatrix::identity(4)).unwrap().frobenius_norm() < 1e-10);
        // ascending order
        for w in eig.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn sqrt_squares_back(m in square_matrix(3)) {
        let psd = m.dagger().matmul(&m).unwrap();
        let s = matrix_sqrt_psd(&psd).unwrap();
        prop_assert!(s.matmul(&s).unwrap().sub(&psd).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn trace_distance_is_a_metric(a in hermitian_matrix(3), b in hermitian_matrix(3)) {
        let dab = trace_distance(&a, &b).unwrap();
        prop_assert!(dab >= 0.0);
        prop_assert!((dab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_then_partial_trace_recovers_factor(m1 in square_matrix(2), m2 in square_matrix(2)) {
        let a = m1.dagger().matmul(&m1).unwrap();
        let b = m2.dagger().matmul(&m2).unwrap();
        let joint = a.tensor(&b);
        let got = partial_trace(&joint, (2, 2), Keep::First).unwrap();
        let want = a.scale(b.trace());
        prop_assert!(got.sub(&want).unwrap().frobenius_norm() < 1e-10);
        let got = partial_trace(&joint, (2, 2), Keep::Second).unwrap();
        let want = b.scale(a.trace());
        prop_assert!(got.sub(&want).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn deformed_inner_product_axioms(a in metric(3), u in nonzero_vector(3), v in nonzero_vector(3)) {
        // conjugate symmetry
        let uv = inner_product_a(&u, &v, &a).unwrap();
        let vu = inner_product_a(&v, &u, &a).unwrap();
        prop_assert!((uv - vu.conj()).norm() < 1e-10);
        // positive definiteness on nonzero vectors
        let uu = inner_product_a(&u, &u, &a).unwrap();
        prop_assert!(uu.re > 0.0);
        prop_assert!(uu.im.abs() < 1e-10);
    }

    #[test]
    fn normalize_a_is_idempotent(a in metric(2), v in nonzero_vector(2)) {
        let once = normalize_a(&v, &a).unwrap();
        let twice = normalize_a(once.vector(), &a).unwrap();
        prop_assert!(once.vector().max_abs_diff(twice.vector()) < 1e-12);
    }

    #[test]
    fn evolution_is_phase_covariant(
        a in metric(2),
        v1 in nonzero_vector(2),
        v2 in nonzero_vector(2),
        theta in 0.0..std::f64::consts::TAU,
    ) {
        let s1 = normalize_a(&v1, &a).unwrap();
        let s2 = normalize_a(&v2, &a).unwrap();
        let e = Ensemble::new(vec![(0.5, s1.clone()), (0.5, s2)]).unwrap();
        let u = UnitaryGate::hadamard();
        let rho = evolve_ensemble(&e, &u, &a).unwrap();

        // rotate the first member by a global phase
        let phase = Complex64::from_polar(1.0, theta);
        let s1_rot = normalize_a(&v1.scale(phase), &a).unwrap();
        let s2 = normalize_a(&v2, &a).unwrap();
        let e_rot = Ensemble::new(vec![(0.5, s1_rot), (0.5, s2)]).unwrap();
        let rho_rot = evolve_ensemble(&e_rot, &u, &a).unwrap();
        prop_assert!(rho.matrix().sub(rho_rot.matrix()).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn matrix_json_round_trips(m in square_matrix(3)) {
        let text = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        for (x, y) in m.entries().iter().zip(back.entries()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}
