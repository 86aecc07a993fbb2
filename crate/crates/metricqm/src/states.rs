//! States, ensembles, density matrices, the deformed trace condition
//! Tr(Aρ) = 1, and both standard and A-weighted measurement statistics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, ComplexVector, PSD_TOL};
use crate::metric::{a_norm_squared, MetricOperator};

const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;

/// Which normalization convention a state (or density matrix) obeys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// ⟨ψ|ψ⟩ = 1, respectively Tr ρ = 1.
    Standard,
    /// ⟨ψ|A|ψ⟩ = 1, respectively Tr(Aρ) = 1, for the metric in use.
    Metric,
}

/// A pure state with a recorded normalization convention.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: ComplexVector,
    normalization: Normalization,
}

impl PureState {
    /// A state with unit standard norm.
    pub fn standard(vector: ComplexVector) -> Result<Self> {
        let n = vector.norm_squared();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { value: n });
        }
        Ok(Self { vector, normalization: Normalization::Standard })
    }

    /// A state with unit A-norm for the given metric.
    pub fn metric(vector: ComplexVector, a: &MetricOperator) -> Result<Self> {
        let n = a_norm_squared(&vector, a)?;
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { value: n });
        }
        Ok(Self { vector, normalization: Normalization::Metric })
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> ComplexMatrix {
        self.vector.outer(&self.vector).expect("same vector")
    }

    /// Check the recorded convention against the given metric; metric states
    /// must have unit A-norm, standard states unit standard norm.
    pub fn check_normalized(&self, a: &MetricOperator) -> Result<()> {
        let n = match self.normalization {
            Normalization::Standard => self.vector.norm_squared(),
            Normalization::Metric => a_norm_squared(&self.vector, a)?,
        };
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { value: n });
        }
        Ok(())
    }
}

/// A finite mixture of pure states: the operational form of a mixed state.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidEnsemble("empty ensemble".into()));
        }
        let dim = members[0].1.dim();
        let tag = members[0].1.normalization();
        let mut total = 0.0;
        for (w, s) in &members {
            if *w < 0.0 {
                return Err(Error::InvalidEnsemble(format!("negative weight {w}")));
            }
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
            }
            if s.normalization() != tag {
                return Err(Error::MixedNormalization);
            }
            total += w;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    pub fn normalization(&self) -> Normalization {
        self.members[0].1.normalization()
    }
}

/// JSON form of an ensemble:
/// `{"normalization": "metric"|"standard", "members": [{"weight": p, "state": {...}}]}`.
#[derive(Serialize, Deserialize)]
pub struct EnsembleWire {
    pub normalization: Normalization,
    pub members: Vec<EnsembleMemberWire>,
}

#[derive(Serialize, Deserialize)]
pub struct EnsembleMemberWire {
    pub weight: f64,
    pub state: ComplexVector,
}

impl From<&Ensemble> for EnsembleWire {
    fn from(e: &Ensemble) -> Self {
        EnsembleWire {
            normalization: e.normalization(),
            members: e
                .members
                .iter()
                .map(|(w, s)| EnsembleMemberWire { weight: *w, state: s.vector().clone() })
                .collect(),
        }
    }
}

impl EnsembleWire {
    /// Rehydrate; metric-normalized ensembles need the metric to re-validate.
    pub fn into_ensemble(self, a: Option<&MetricOperator>) -> Result<Ensemble> {
        let members = self
            .members
            .into_iter()
            .map(|m| {
                let state = match self.normalization {
                    Normalization::Standard => PureState::standard(m.state)?,
                    Normalization::Metric => {
                        let a = a.ok_or_else(|| {
                            Error::InvalidEnsemble("metric-normalized ensemble needs a metric".into())
                        })?;
                        PureState::metric(m.state, a)?
                    }
                };
                Ok((m.weight, state))
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(members)
    }
}

/// A density matrix tagged with its trace convention.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    trace_convention: Normalization,
}

impl DensityOperator {
    fn check_hermitian_psd(matrix: &ComplexMatrix) -> Result<()> {
        matrix.check_hermitian()?;
        let eig = hermitian_eigen(matrix)?;
        if eig.eigenvalues[0] < -PSD_TOL {
            return Err(Error::NegativeEigenvalue { eigenvalue: eig.eigenvalues[0] });
        }
        Ok(())
    }

    /// Standard convention: Tr ρ = 1.
    pub fn standard(matrix: ComplexMatrix) -> Result<Self> {
        Self::check_hermitian_psd(&matrix)?;
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceCondition { value: tr });
        }
        Ok(Self { matrix, trace_convention: Normalization::Standard })
    }

    /// Metric convention: Tr(Aρ) = 1.
    pub fn metric(matrix: ComplexMatrix, a: &MetricOperator) -> Result<Self> {
        Self::check_hermitian_psd(&matrix)?;
        let (value, pass) = weighted_trace(&matrix, a)?;
        if !pass {
            return Err(Error::TraceCondition { value });
        }
        Ok(Self { matrix, trace_convention: Normalization::Metric })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace_convention(&self) -> Normalization {
        self.trace_convention
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// ρ = Σ p_i |ψ_i⟩⟨ψ_i|, inheriting the ensemble's normalization tag.
/// Metric-tagged results need the metric to verify Tr(Aρ) = 1.
pub fn ensemble_to_density(e: &Ensemble, a: Option<&MetricOperator>) -> Result<DensityOperator> {
    let mut rho = ComplexMatrix::zeros(e.dim());
    for (w, s) in e.members() {
        rho = rho.add(&s.projector().scale(Complex64::new(*w, 0.0)))?;
    }
    match e.normalization() {
        Normalization::Standard => DensityOperator::standard(rho),
        Normalization::Metric => {
            let a = a.ok_or_else(|| Error::InvalidEnsemble("metric-normalized ensemble needs a metric".into()))?;
            DensityOperator::metric(rho, a)
        }
    }
}

fn weighted_trace(matrix: &ComplexMatrix, a: &MetricOperator) -> Result<(f64, bool)> {
    if matrix.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: matrix.dim() });
    }
    let value = a.matrix().matmul(matrix)?.trace().re;
    Ok((value, (value - 1.0).abs() < TRACE_TOL))
}

/// The deformed normalization Tr(Aρ) = 1: returns (value, pass).
pub fn check_trace_condition(rho: &DensityOperator, a: &MetricOperator) -> Result<(f64, bool)> {
    weighted_trace(rho.matrix(), a)
}

/// A projective measurement outcome.
#[derive(Debug, Clone)]
pub struct MeasurementProjector {
    matrix: ComplexMatrix,
    label: String,
}

impl MeasurementProjector {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        matrix.check_hermitian()?;
        let m2 = matrix.matmul(&matrix)?;
        let dev = m2.sub(&matrix)?.frobenius_norm();
        if dev > 1e-10 {
            return Err(Error::NotProjector { deviation: dev });
        }
        Ok(Self { matrix, label: label.into() })
    }

    /// Rank-one projector onto a unit vector.
    pub fn onto(state: &ComplexVector, label: impl Into<String>) -> Result<Self> {
        let n = state.norm_squared();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { value: n });
        }
        Self::new(state.outer(state)?, label)
    }

    /// M = |0⟩⟨0|, the measurement used in the worked example.
    pub fn zero_projector() -> Self {
        Self::onto(&ComplexVector::basis(2, 0), "0").expect("|0><0| is a projector")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Outcome of the A-weighted probability rule, with the imaginary part of
/// Tr(AMρ) surfaced as a model-consistency diagnostic. The raw value is
/// never clamped; values outside [0,1] are flagged instead.
#[derive(Debug, Clone, Copy)]
pub struct WeightedProbability {
    pub value: f64,
    pub imaginary_part: f64,
    pub out_of_range: bool,
}

/// Re Tr(A·M·ρ), the paper's probability rule under the deformed metric.
pub fn probability_weighted(
    m: &MeasurementProjector,
    rho: &DensityOperator,
    a: &MetricOperator,
) -> Result<WeightedProbability> {
    if m.matrix().dim() != rho.dim() || a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: m.matrix().dim() });
    }
    let tr = a.matrix().matmul(m.matrix())?.matmul(rho.matrix())?.trace();
    let value = tr.re;
    Ok(WeightedProbability {
        value,
        imaginary_part: tr.im,
        out_of_range: !(-TRACE_TOL..=1.0 + TRACE_TOL).contains(&value),
    })
}

/// Re Tr(M·ρ), the standard Born rule.
pub fn probability_standard(m: &MeasurementProjector, rho: &DensityOperator) -> Result<f64> {
    if m.matrix().dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: m.matrix().dim() });
    }
    Ok(m.matrix().matmul(rho.matrix())?.trace().re)
}

/// Named qubit bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisName {
    /// {|0⟩, |1⟩}
    Computational,
    /// {|+⟩, |−⟩}
    Diagonal,
}

impl BasisName {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "computational" | "z" => Ok(Self::Computational),
            "diagonal" | "x" => Ok(Self::Diagonal),
            other => Err(Error::UnknownBasis(other.into())),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Computational => "computational",
            Self::Diagonal => "diagonal",
        }
    }
}

/// The named orthonormal qubit basis as standard-normalized states.
pub fn basis_states(name: BasisName) -> Vec<PureState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let vectors = match name {
        BasisName::Computational => vec![
            ComplexVector::basis(2, 0),
            ComplexVector::basis(2, 1),
        ],
        BasisName::Diagonal => vec![
            ComplexVector::from_real(&[h, h]).unwrap(),
            ComplexVector::from_real(&[h, -h]).unwrap(),
        ],
    };
    vectors
        .into_iter()
        .map(|v| PureState::standard(v).expect("unit vectors"))
        .collect()
}

/// (|00⟩ + |11⟩)/√2.
pub fn bell_state() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = ComplexVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
    PureState::standard(v).expect("Bell state is unit norm")
}

/// Helper for constructing the paper's Alice-side ensembles E_Z and E_X as
/// metric-normalized mixtures with weight ½ each.
pub fn paper_ensemble(basis: BasisName, a: &MetricOperator) -> Result<Ensemble> {
    let members = basis_states(basis)
        .into_iter()
        .map(|s| {
            let normed = crate::metric::normalize_a(s.vector(), a)?;
            Ok((0.5, normed))
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, Keep};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_states_values() {
        let comp = basis_states(BasisName::Computational);
        assert_eq!(comp[0].vector(), &ComplexVector::basis(2, 0));
        assert_eq!(comp[1].vector(), &ComplexVector::basis(2, 1));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let diag = basis_states(BasisName::Diagonal);
        assert!(diag[0].vector().max_abs_diff(&ComplexVector::from_real(&[h, h]).unwrap()) < 1e-15);
        assert!(diag[1].vector().max_abs_diff(&ComplexVector::from_real(&[h, -h]).unwrap()) < 1e-15);
    }

    #[test]
    fn bases_mutually_unbiased() {
        let comp = basis_states(BasisName::Computational);
        let diag = basis_states(BasisName::Diagonal);
        for b in &comp {
            for d in &diag {
                let overlap = b.vector().inner(d.vector()).unwrap().norm_sqr();
                assert!((overlap - 0.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bell_state_values() {
        let bell = bell_state();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(bell.vector().max_abs_diff(&ComplexVector::from_real(&[h, 0.0, 0.0, h]).unwrap()) < 1e-15);
        assert!((bell.vector().norm_squared() - 1.0).abs() < 1e-15);

        for keep in [Keep::First, Keep::Second] {
            let reduced = partial_trace(&bell.projector(), (2, 2), keep).unwrap();
            let half_i = ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
            assert!(reduced.sub(&half_i).unwrap().frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn ensemble_to_density_paper_cases() {
        // standard-normalized E_Z and E_X both give I/2
        for basis in [BasisName::Computational, BasisName::Diagonal] {
            let members = basis_states(basis).into_iter().map(|s| (0.5, s)).collect();
            let e = Ensemble::new(members).unwrap();
            let rho = ensemble_to_density(&e, None).unwrap();
            let half_i = ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
            assert!(rho.matrix().sub(&half_i).unwrap().frobenius_norm() < 1e-15);
        }

        // single-member ensemble is the pure projector
        let s = basis_states(BasisName::Computational).remove(0);
        let proj = s.projector();
        let e = Ensemble::new(vec![(1.0, s)]).unwrap();
        let rho = ensemble_to_density(&e, None).unwrap();
        assert!(rho.matrix().sub(&proj).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn ensemble_rejects_bad_input() {
        assert!(matches!(Ensemble::new(vec![]), Err(Error::InvalidEnsemble(_))));

        let comp = basis_states(BasisName::Computational);
        let bad = vec![(0.7, comp[0].clone()), (0.7, comp[1].clone())];
        assert!(matches!(Ensemble::new(bad), Err(Error::InvalidEnsemble(_))));

        let a = MetricOperator::diag_lambda(2.0).unwrap();
        let metric_state = crate::metric::normalize_a(&ComplexVector::basis(2, 1), &a).unwrap();
        let mixed = vec![(0.5, comp[0].clone()), (0.5, metric_state)];
        assert!(matches!(Ensemble::new(mixed), Err(Error::MixedNormalization)));
    }

    #[test]
    fn trace_condition_paper_cases() {
        let lambda = 2.0;
        let a = MetricOperator::diag_lambda(lambda).unwrap();

        let rho1 = DensityOperator::metric(
            ComplexMatrix::diag(&[1.0 / (1.0 + lambda), 1.0 / (1.0 + lambda)]),
            &a,
        )
        .unwrap();
        let (v, pass) = check_trace_condition(&rho1, &a).unwrap();
        assert!(pass && (v - 1.0).abs() < 1e-14);

        let rho2 = DensityOperator::metric(ComplexMatrix::diag(&[0.5, 0.5 / lambda]), &a).unwrap();
        let (v, pass) = check_trace_condition(&rho2, &a).unwrap();
        assert!(pass && (v - 1.0).abs() < 1e-14);

        let i = MetricOperator::identity(2);
        let half = DensityOperator::standard(ComplexMatrix::diag(&[0.5, 0.5])).unwrap();
        let (v, pass) = check_trace_condition(&half, &i).unwrap();
        assert!(pass && (v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn probability_weighted_paper_values() {
        let lambda = 2.0;
        let a = MetricOperator::diag_lambda(lambda).unwrap();
        let m = MeasurementProjector::zero_projector();

        let rho1 =
            DensityOperator::metric(ComplexMatrix::diag(&[1.0 / 3.0, 1.0 / 3.0]), &a).unwrap();
        let p = probability_weighted(&m, &rho1, &a).unwrap();
        assert!((p.value - 1.0 / (1.0 + lambda)).abs() < 1e-14);
        assert!(p.imaginary_part.abs() < 1e-15);

        let rho2 = DensityOperator::metric(ComplexMatrix::diag(&[0.5, 0.25]), &a).unwrap();
        let p = probability_weighted(&m, &rho2, &a).unwrap();
        assert!((p.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn probability_weighted_identity_matches_standard() {
        let i = MetricOperator::identity(2);
        let m = MeasurementProjector::zero_projector();
        let rho = DensityOperator::standard(ComplexMatrix::diag(&[0.3, 0.7])).unwrap();
        let weighted = probability_weighted(&m, &rho, &i).unwrap().value;
        let standard = probability_standard(&m, &rho).unwrap();
        assert_eq!(weighted, standard);
    }

    #[test]
    fn probability_standard_cases() {
        let m = MeasurementProjector::zero_projector();
        let rho = DensityOperator::standard(ComplexMatrix::diag(&[0.5, 0.5])).unwrap();
        assert!((probability_standard(&m, &rho).unwrap() - 0.5).abs() < 1e-15);

        let full = MeasurementProjector::new(ComplexMatrix::identity(2), "all").unwrap();
        assert!((probability_standard(&full, &rho).unwrap() - 1.0).abs() < 1e-15);

        // Bell state, M = |0><0| ⊗ I
        let bell = bell_state();
        let rho4 = DensityOperator::standard(bell.projector()).unwrap();
        let m4 = MeasurementProjector::new(
            ComplexVector::basis(2, 0)
                .outer(&ComplexVector::basis(2, 0))
                .unwrap()
                .tensor(&ComplexMatrix::identity(2)),
            "0*",
        )
        .unwrap();
        assert!((probability_standard(&m4, &rho4).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projector_validation() {
        let not_proj = ComplexMatrix::diag(&[2.0, 0.0]);
        assert!(matches!(
            MeasurementProjector::new(not_proj, "bad"),
            Err(Error::NotProjector { .. })
        ));
    }

    #[test]
    fn metric_ensemble_satisfies_trace_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            // random valid metric on a qubit
            let g = crate::metric::gaussian_vector(4, &mut rng);
            let gm = ComplexMatrix::new(2, g.entries().to_vec()).unwrap();
            let pd = gm
                .dagger()
                .matmul(&gm)
                .unwrap()
                .add(&ComplexMatrix::identity(2).scale(Complex64::new(0.2, 0.0)))
                .unwrap();
            let a = MetricOperator::validate(pd).unwrap();

            // random metric-normalized ensemble
            let members = (0..3)
                .map(|_| {
                    let v = crate::metric::gaussian_vector(2, &mut rng);
                    crate::metric::normalize_a(&v, &a).unwrap()
                })
                .map(|s| (1.0 / 3.0, s))
                .collect();
            let e = Ensemble::new(members).unwrap();
            let rho = ensemble_to_density(&e, Some(&a)).unwrap();
            let (v, pass) = check_trace_condition(&rho, &a).unwrap();
            assert!(pass, "Tr(Arho) = {v}");
        }
    }

    #[test]
    fn complete_projectors_sum_to_one_probability() {
        let lambda = 3.0;
        let a = MetricOperator::diag_lambda(lambda).unwrap();
        let e = paper_ensemble(BasisName::Diagonal, &a).unwrap();
        let rho = ensemble_to_density(&e, Some(&a)).unwrap();
        let m0 = MeasurementProjector::zero_projector();
        let m1 = MeasurementProjector::onto(&ComplexVector::basis(2, 1), "1").unwrap();
        let total = probability_weighted(&m0, &rho, &a).unwrap().value
            + probability_weighted(&m1, &rho, &a).unwrap().value;
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ensemble_json_round_trip() {
        let a = MetricOperator::diag_lambda(2.0).unwrap();
        let e = paper_ensemble(BasisName::Computational, &a).unwrap();
        let wire = EnsembleWire::from(&e);
        let text = serde_json::to_string(&wire).unwrap();
        let back: EnsembleWire = serde_json::from_str(&text).unwrap();
        let e2 = back.into_ensemble(Some(&a)).unwrap();
        for ((w1, s1), (w2, s2)) in e.members().iter().zip(e2.members()) {
            assert_eq!(w1, w2);
            assert!(s1.vector().max_abs_diff(s2.vector()) < 1e-15);
        }
    }
}
