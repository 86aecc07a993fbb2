//! The metric operator A and the deformed inner product ⟨φ,ψ⟩_A = ⟨φ|A|ψ⟩.
//!
//! A `MetricOperator` is always validated at construction: Hermitian within
//! 1e-12 (max entry) and strictly positive definite (min eigenvalue above
//! 1e-10). The eigendecomposition and A^{1/2} are cached since the
//! signalling module uses them repeatedly.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, ComplexVector, EigenDecomposition, PSD_TOL};
use crate::states::PureState;

/// A validated positive-definite Hermitian metric.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    matrix: ComplexMatrix,
    eigen: EigenDecomposition,
    sqrt: ComplexMatrix,
    min_eigenvalue: f64,
}

/// Worst-case axiom violations observed over a random sample.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub conjugate_symmetry_max_violation: f64,
    pub linearity_max_violation: f64,
    pub positive_definiteness_min_value: f64,
    pub samples_used: usize,
    pub seed: u64,
    pub verdict: bool,
}

impl MetricOperator {
    /// Validate a candidate metric. Fails with the offending quantity if the
    /// candidate is not Hermitian or not strictly positive definite.
    pub fn validate(candidate: ComplexMatrix) -> Result<Self> {
        candidate.check_hermitian()?;
        let eigen = hermitian_eigen(&candidate)?;
        let min_eigenvalue = eigen.eigenvalues[0];
        if min_eigenvalue <= PSD_TOL {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        let sqrt = eigen.map_eigenvalues(f64::sqrt);
        Ok(Self { matrix: candidate, eigen, sqrt, min_eigenvalue })
    }

    /// diag(1, λ), the two-level metric used throughout the worked example.
    pub fn diag_lambda(lambda: f64) -> Result<Self> {
        if lambda <= 0.0 {
            return Err(Error::NonPositiveLambda(lambda));
        }
        Self::validate(ComplexMatrix::diag(&[1.0, lambda]))
    }

    pub fn identity(dim: usize) -> Self {
        Self::validate(ComplexMatrix::identity(dim)).expect("identity is a valid metric")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    /// Cached A^{1/2}.
    pub fn sqrt(&self) -> &ComplexMatrix {
        &self.sqrt
    }

    /// Whether A = cI within the given tolerance, with the scale c.
    pub fn is_scalar_multiple_of_identity(&self, tol: f64) -> (bool, f64) {
        let c = self.matrix.trace().re / self.dim() as f64;
        let dev = self
            .matrix
            .sub(&ComplexMatrix::identity(self.dim()).scale(Complex64::new(c, 0.0)))
            .expect("same dim")
            .frobenius_norm();
        (dev < tol, c)
    }
}

/// ⟨φ|A|ψ⟩, conjugate-linear in φ.
pub fn inner_product_a(phi: &ComplexVector, psi: &ComplexVector, a: &MetricOperator) -> Result<Complex64> {
    let apsi = a.matrix().matvec(psi)?;
    phi.inner(&apsi)
}

/// ‖ψ‖_A² = Re ⟨ψ|A|ψ⟩. The imaginary part is asserted negligible.
pub fn a_norm_squared(psi: &ComplexVector, a: &MetricOperator) -> Result<f64> {
    let val = inner_product_a(psi, psi, a)?;
    debug_assert!(val.im.abs() < 1e-12 * val.re.abs().max(1.0));
    Ok(val.re)
}

/// Rescale ψ to unit A-norm; global phase is preserved.
pub fn normalize_a(psi: &ComplexVector, a: &MetricOperator) -> Result<PureState> {
    let norm_sq = a_norm_squared(psi, a)?;
    if norm_sq <= 1e-24 {
        return Err(Error::ZeroVector { norm_sq });
    }
    let scaled = psi.scale(Complex64::new(1.0 / norm_sq.sqrt(), 0.0));
    PureState::metric(scaled, a)
}

/// Draw a complex standard-Gaussian vector (Box-Muller).
pub fn gaussian_vector(dim: usize, rng: &mut impl Rng) -> ComplexVector {
    let mut entries = Vec::with_capacity(dim);
    for _ in 0..dim {
        entries.push(Complex64::new(gaussian(rng), gaussian(rng)));
    }
    ComplexVector::new(entries).expect("gaussian entries are finite")
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Sample-based check of the three inner-product axioms for ⟨·,·⟩_A:
/// conjugate symmetry, linearity in the second argument, and positive
/// definiteness on nonzero vectors.
pub fn verify_axioms(a: &MetricOperator, sample_count: usize, seed: u64) -> AxiomReport {
    verify_axioms_raw(a.matrix(), sample_count, seed)
}

/// Same check against an arbitrary (possibly invalid) candidate matrix,
/// used to demonstrate axiom failure for non-Hermitian candidates.
pub fn verify_axioms_raw(candidate: &ComplexMatrix, sample_count: usize, seed: u64) -> AxiomReport {
    let dim = candidate.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sym_max: f64 = 0.0;
    let mut lin_max: f64 = 0.0;
    let mut pd_min = f64::INFINITY;

    let ip = |phi: &ComplexVector, psi: &ComplexVector| -> Complex64 {
        let apsi = candidate.matvec(psi).expect("dims match");
        phi.inner(&apsi).expect("dims match")
    };

    for _ in 0..sample_count {
        let phi = gaussian_vector(dim, &mut rng);
        let psi1 = gaussian_vector(dim, &mut rng);
        let psi2 = gaussian_vector(dim, &mut rng);
        let c1 = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
        let c2 = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));

        sym_max = sym_max.max((ip(&psi1, &phi) - ip(&phi, &psi1).conj()).norm());

        let combo = psi1.scale(c1).add(&psi2.scale(c2)).expect("dims match");
        let lhs = ip(&phi, &combo);
        let rhs = c1 * ip(&phi, &psi1) + c2 * ip(&phi, &psi2);
        lin_max = lin_max.max((lhs - rhs).norm() / lhs.norm().max(1.0));

        let self_val = ip(&psi1, &psi1);
        if psi1.norm_squared() > 0.0 {
            pd_min = pd_min.min(self_val.re);
            // an imaginary self-inner-product also breaks Axiom 3
            sym_max = sym_max.max(self_val.im.abs());
        }
    }

    let verdict = sym_max < 1e-10 && lin_max < 1e-10 && pd_min > 0.0;
    AxiomReport {
        conjugate_symmetry_max_violation: sym_max,
        linearity_max_violation: lin_max,
        positive_definiteness_min_value: pd_min,
        samples_used: sample_count,
        seed,
        verdict,
    }
}

/// Expand a qubit metric in the Pauli basis: A = a0·I + a_vec·σ.
///
/// For a pure state with Bloch vector n this gives ⟨ψ|A|ψ⟩ = a0 + a_vec·n,
/// so the unit-A-norm states form an ellipsoidal section of the Bloch ball.
pub fn bloch_decomposition(a: &MetricOperator) -> Result<(f64, [f64; 3])> {
    let m = a.matrix();
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: m.dim() });
    }
    let a0 = 0.5 * (m.get(0, 0) + m.get(1, 1)).re;
    let ax = 0.5 * (m.get(0, 1) + m.get(1, 0)).re;
    let ay = 0.5 * ((m.get(0, 1) - m.get(1, 0)) * Complex64::new(0.0, 1.0)).re;
    let az = 0.5 * (m.get(0, 0) - m.get(1, 1)).re;
    Ok((a0, [ax, ay, az]))
}

/// Parse a metric source: either `diag:a,b,...` or a path to matrix JSON.
pub fn parse_metric_source(source: &str) -> Result<MetricOperator> {
    if let Some(rest) = source.strip_prefix("diag:") {
        let values: Vec<f64> = rest
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad diagonal entry '{s}': {e}"))))
            .collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(Error::Parse("empty diagonal".into()));
        }
        MetricOperator::validate(ComplexMatrix::diag(&values))
    } else {
        let text = std::fs::read_to_string(source)?;
        let matrix: ComplexMatrix = serde_json::from_str(&text)?;
        MetricOperator::validate(matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validate_diag_metric() {
        let a = MetricOperator::validate(ComplexMatrix::diag(&[1.0, 2.0])).unwrap();
        assert!((a.min_eigenvalue() - 1.0).abs() < 1e-12);
        let sqrt_sq = a.sqrt().matmul(a.sqrt()).unwrap();
        assert!(sqrt_sq.sub(a.matrix()).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn validate_identity() {
        let a = MetricOperator::identity(2);
        assert!((a.min_eigenvalue() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let err = MetricOperator::validate(ComplexMatrix::diag(&[1.0, -1.0])).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { min_eigenvalue } if min_eigenvalue < 0.0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(MetricOperator::validate(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn inner_product_paper_values() {
        let lambda = 3.0;
        let a = MetricOperator::diag_lambda(lambda).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexVector::from_real(&[h, h]).unwrap();
        let one = ComplexVector::basis(2, 1);

        // ⟨+|A|+⟩ = (1+λ)/2
        let v = inner_product_a(&plus, &plus, &a).unwrap();
        assert!((v.re - (1.0 + lambda) / 2.0).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);

        // ⟨1|A|1⟩ = λ
        let v = inner_product_a(&one, &one, &a).unwrap();
        assert!((v.re - lambda).abs() < 1e-14);
    }

    #[test]
    fn inner_product_reduces_to_standard_for_identity() {
        let a = MetricOperator::identity(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let u = gaussian_vector(3, &mut rng);
            let v = gaussian_vector(3, &mut rng);
            let deformed = inner_product_a(&u, &v, &a).unwrap();
            let standard = u.inner(&v).unwrap();
            assert!((deformed - standard).norm() < 1e-15);
        }
    }

    #[test]
    fn a_norm_examples() {
        let lambda = 5.0;
        let a = MetricOperator::diag_lambda(lambda).unwrap();
        let zero = ComplexVector::basis(2, 0);
        assert!((a_norm_squared(&zero, &a).unwrap() - 1.0).abs() < 1e-14);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = ComplexVector::from_real(&[h, -h]).unwrap();
        assert!((a_norm_squared(&minus, &a).unwrap() - (1.0 + lambda) / 2.0).abs() < 1e-14);

        let null = ComplexVector::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(a_norm_squared(&null, &a).unwrap().abs() < 1e-300);
    }

    #[test]
    fn normalize_a_examples() {
        let lambda = 2.0;
        let a = MetricOperator::diag_lambda(lambda).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = ComplexVector::from_real(&[h, -h]).unwrap();
        let normed = normalize_a(&minus, &a).unwrap();
        let scale = 1.0 / ((1.0 + lambda) / 2.0).sqrt();
        let expect = minus.scale(c(scale, 0.0));
        assert!(normed.vector().max_abs_diff(&expect) < 1e-14);

        // |0⟩ already has unit A-norm
        let zero = ComplexVector::basis(2, 0);
        let normed = normalize_a(&zero, &a).unwrap();
        assert!(normed.vector().max_abs_diff(&zero) < 1e-15);

        let null = ComplexVector::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(normalize_a(&null, &a), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn normalize_a_idempotent_and_phase_preserving() {
        let a = MetricOperator::diag_lambda(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let v = gaussian_vector(2, &mut rng);
            let once = normalize_a(&v, &a).unwrap();
            let twice = normalize_a(once.vector(), &a).unwrap();
            assert!(once.vector().max_abs_diff(twice.vector()) < 1e-12);
            // phase preserved: normalizing e^{iθ}v gives e^{iθ}·normalized(v)
            let phase = Complex64::from_polar(1.0, 1.234);
            let rotated = normalize_a(&v.scale(phase), &a).unwrap();
            assert!(rotated.vector().max_abs_diff(&once.vector().scale(phase)) < 1e-12);
        }
    }

    #[test]
    fn axioms_pass_for_valid_metrics() {
        for a in [MetricOperator::diag_lambda(2.0).unwrap(), MetricOperator::identity(2)] {
            let report = verify_axioms(&a, 1000, 0);
            assert!(report.verdict, "report: {report:?}");
            assert!(report.conjugate_symmetry_max_violation < 1e-10);
            assert!(report.linearity_max_violation < 1e-10);
            assert!(report.positive_definiteness_min_value > 0.0);
        }
    }

    #[test]
    fn axioms_fail_for_non_hermitian_candidate() {
        // [[1, i],[0, 1]]: ⟨0,1⟩_A = i while conj(⟨1,0⟩_A) = 0
        let m = ComplexMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let report = verify_axioms_raw(&m, 200, 0);
        assert!(!report.verdict);
        assert!(report.conjugate_symmetry_max_violation > 1e-10);
    }

    #[test]
    fn bloch_decomposition_examples() {
        let lambda = 3.0;
        let a = MetricOperator::diag_lambda(lambda).unwrap();
        let (a0, v) = bloch_decomposition(&a).unwrap();
        assert!((a0 - (1.0 + lambda) / 2.0).abs() < 1e-14);
        assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
        assert!((v[2] - (1.0 - lambda) / 2.0).abs() < 1e-14);

        let (a0, v) = bloch_decomposition(&MetricOperator::identity(2)).unwrap();
        assert!((a0 - 1.0).abs() < 1e-14);
        assert!(v.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn bloch_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            // random PD 2x2 metric: G†G + 0.1 I
            let g = gaussian_vector(4, &mut rng);
            let m = ComplexMatrix::new(2, g.entries().to_vec()).unwrap();
            let pd = m
                .dagger()
                .matmul(&m)
                .unwrap()
                .add(&ComplexMatrix::identity(2).scale(c(0.1, 0.0)))
                .unwrap();
            let a = MetricOperator::validate(pd.clone()).unwrap();
            let (a0, v) = bloch_decomposition(&a).unwrap();
            // reassemble a0 I + v·σ
            let mut rec = ComplexMatrix::identity(2).scale(c(a0, 0.0));
            let sx = ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
            let sy = ComplexMatrix::new(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
            let sz = ComplexMatrix::diag(&[1.0, -1.0]);
            for (coef, sigma) in [(v[0], &sx), (v[1], &sy), (v[2], &sz)] {
                rec = rec.add(&sigma.scale(c(coef, 0.0))).unwrap();
            }
            assert!(rec.sub(a.matrix()).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn parse_diag_source() {
        let a = parse_metric_source("diag:1,2").unwrap();
        assert_eq!(a.dim(), 2);
        assert!(parse_metric_source("diag:").is_err());
        assert!(parse_metric_source("diag:1,x").is_err());
    }
}
