//! The state-dependent renormalized evolution: unitary action followed by
//! rescaling back to unit A-norm. The normalization factor depends on the
//! state, which is what makes the map nonlinear and ensemble-dependent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{trace_distance, ComplexMatrix};
use crate::metric::MetricOperator;
use crate::states::{DensityOperator, Ensemble, PureState};

/// A validated unitary with a display label.
#[derive(Debug, Clone)]
pub struct UnitaryGate {
    matrix: ComplexMatrix,
    label: String,
}

impl UnitaryGate {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let gram = matrix.dagger().matmul(&matrix)?;
        let dev = gram.sub(&ComplexMatrix::identity(matrix.dim()))?.frobenius_norm();
        if dev > 1e-10 {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Self { matrix, label: label.into() })
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(ComplexMatrix::from_real(2, &[h, h, h, -h]).unwrap(), "H").unwrap()
    }

    pub fn pauli_x() -> Self {
        Self::new(ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap(), "X").unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::new(ComplexMatrix::diag(&[1.0, -1.0]), "Z").unwrap()
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim), "I").unwrap()
    }

    /// diag(e^{-iθ/2}, e^{iθ/2}).
    pub fn rot_z(theta: f64) -> Self {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 0, Complex64::from_polar(1.0, -theta / 2.0));
        m.set(1, 1, Complex64::from_polar(1.0, theta / 2.0));
        Self::new(m, format!("rot:z:{theta}")).unwrap()
    }

    pub fn rot_y(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::new(ComplexMatrix::from_real(2, &[c, -s, s, c]).unwrap(), format!("rot:y:{theta}")).unwrap()
    }

    /// Resolve a named built-in: `H`, `X`, `Z`, `I`, `rot:z:<theta>`, `rot:y:<theta>`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "H" => Ok(Self::hadamard()),
            "X" => Ok(Self::pauli_x()),
            "Z" => Ok(Self::pauli_z()),
            "I" => Ok(Self::identity(2)),
            other => {
                if let Some(arg) = other.strip_prefix("rot:z:") {
                    let theta: f64 =
                        arg.parse().map_err(|e| Error::Parse(format!("bad angle '{arg}': {e}")))?;
                    Ok(Self::rot_z(theta))
                } else if let Some(arg) = other.strip_prefix("rot:y:") {
                    let theta: f64 =
                        arg.parse().map_err(|e| Error::Parse(format!("bad angle '{arg}': {e}")))?;
                    Ok(Self::rot_y(theta))
                } else {
                    Err(Error::UnknownUnitary(other.into()))
                }
            }
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Frobenius norm of [U, A].
    pub fn commutator_norm(&self, a: &MetricOperator) -> Result<f64> {
        let ua = self.matrix.matmul(a.matrix())?;
        let au = a.matrix().matmul(&self.matrix)?;
        Ok(ua.sub(&au)?.frobenius_norm())
    }
}

/// One application of the renormalized map to a pure state.
#[derive(Debug, Clone)]
pub struct EvolutionRecord {
    pub input_state: PureState,
    pub output_state: PureState,
    /// N(ψ) = ⟨ψ|U†AU|ψ⟩.
    pub normalization_factor: f64,
}

/// A-norm of ψ before and after the bare unitary: (1, ⟨ψ|U†AU|ψ⟩).
/// The two differ whenever [U, A] ≠ 0 and ψ is suitably chosen.
pub fn norm_shift(psi: &PureState, u: &UnitaryGate, a: &MetricOperator) -> Result<(f64, f64)> {
    psi.check_normalized(a)?;
    let before = crate::metric::a_norm_squared(psi.vector(), a)?;
    let evolved = u.matrix().matvec(psi.vector())?;
    let after = crate::metric::a_norm_squared(&evolved, a)?;
    Ok((before, after))
}

/// ψ ↦ Uψ / √(⟨ψ|U†AU|ψ⟩). Inputs must already be metric-normalized;
/// silently renormalizing them would hide exactly the physics under study.
pub fn evolve_pure(psi: &PureState, u: &UnitaryGate, a: &MetricOperator) -> Result<EvolutionRecord> {
    if psi.normalization() != crate::states::Normalization::Metric {
        return Err(Error::PreconditionViolated(
            "evolve_pure requires a metric-normalized input state".into(),
        ));
    }
    psi.check_normalized(a)?;
    let evolved = u.matrix().matvec(psi.vector())?;
    let factor = crate::metric::a_norm_squared(&evolved, a)?;
    assert!(factor > 0.0, "A > 0 and psi != 0 force a positive normalization factor");
    let output = evolved.scale(Complex64::new(1.0 / factor.sqrt(), 0.0));
    Ok(EvolutionRecord {
        input_state: psi.clone(),
        output_state: PureState::metric(output, a)?,
        normalization_factor: factor,
    })
}

/// Σ_i p_i (Uψ_i)(Uψ_i)† / ⟨ψ_i|U†AU|ψ_i⟩, re-averaged in member order.
pub fn evolve_ensemble(e: &Ensemble, u: &UnitaryGate, a: &MetricOperator) -> Result<DensityOperator> {
    let mut rho = ComplexMatrix::zeros(e.dim());
    for (w, psi) in e.members() {
        let rec = evolve_pure(psi, u, a)?;
        rho = rho.add(&rec.output_state.projector().scale(Complex64::new(*w, 0.0)))?;
    }
    DensityOperator::metric(rho, a)
}

/// The density matrix the ensemble presents in standard quantum mechanics:
/// Σ p_i |ψ̂_i⟩⟨ψ̂_i| with each member rescaled to unit standard norm.
/// Metric normalization only changes member scales, so this is the right
/// notion of "same operational mixed state" for ensemble-equivalence checks.
pub fn operational_density(e: &Ensemble) -> Result<ComplexMatrix> {
    let mut rho = ComplexMatrix::zeros(e.dim());
    for (w, psi) in e.members() {
        let n = psi.vector().norm_squared();
        if n <= 1e-24 {
            return Err(Error::ZeroVector { norm_sq: n });
        }
        rho = rho.add(&psi.projector().scale(Complex64::new(*w / n, 0.0)))?;
    }
    Ok(rho)
}

/// Trace distance between the evolutions of two decompositions of the same
/// operational mixed state. Strictly positive values witness the failure of
/// convex linearity of the renormalized map.
pub fn convexity_defect(
    e1: &Ensemble,
    e2: &Ensemble,
    u: &UnitaryGate,
    a: &MetricOperator,
) -> Result<f64> {
    let rho1 = operational_density(e1)?;
    let rho2 = operational_density(e2)?;
    let dev = rho1.sub(&rho2)?.frobenius_norm();
    if dev > 1e-10 {
        return Err(Error::PreconditionViolated(format!(
            "ensembles realize different operational density matrices (Frobenius distance {dev:.3e})"
        )));
    }
    let out1 = evolve_ensemble(e1, u, a)?;
    let out2 = evolve_ensemble(e2, u, a)?;
    trace_distance(out1.matrix(), out2.matrix())
}
