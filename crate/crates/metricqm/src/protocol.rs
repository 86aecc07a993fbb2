//! The end-to-end Alice/Bob protocol: Bob's basis choice steers Alice's
//! ensemble from the shared Bell pair, Alice applies the renormalized
//! evolution and measures, and the certifier searches for a signalling
//! witness.
//!
//! Bob's steering weights use the standard Born rule on the shared state;
//! the metric deforms only Alice's local normalization and measurement.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_ensemble, UnitaryGate};
use crate::error::{Error, Result};
use crate::linalg::{trace_distance, ComplexMatrix, ComplexVector};
use crate::metric::{normalize_a, MetricOperator};
use crate::states::{
    basis_states, bell_state, check_trace_condition, probability_weighted, BasisName,
    DensityOperator, Ensemble, MeasurementProjector, PureState,
};

/// Verdict threshold on the signalling magnitude.
pub const SIGNALLING_TOL: f64 = 1e-8;
/// Default certifier search threshold on the probability gap.
pub const CERTIFY_THRESHOLD: f64 = 1e-6;

/// A measurement basis for Bob's qubit: one of the two named bases from the
/// worked example, or an arbitrary orthonormal pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BobBasis {
    Named(BasisName),
    Custom {
        label: String,
        states: [ComplexVector; 2],
    },
}

impl BobBasis {
    pub fn computational() -> Self {
        Self::Named(BasisName::Computational)
    }

    pub fn diagonal() -> Self {
        Self::Named(BasisName::Diagonal)
    }

    /// Orthonormal basis from the columns of a unitary.
    pub fn from_unitary(u: &ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: u.dim() });
        }
        let basis = Self::Custom {
            label: label.into(),
            states: [u.column(0), u.column(1)],
        };
        basis.check()?;
        Ok(basis)
    }

    fn check(&self) -> Result<()> {
        let vs = self.vectors();
        for v in &vs {
            let n = v.norm_squared();
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized { value: n });
            }
        }
        let overlap = vs[0].inner(&vs[1])?.norm();
        if overlap > 1e-10 {
            return Err(Error::PreconditionViolated(format!(
                "basis vectors not orthogonal: |overlap| = {overlap:.3e}"
            )));
        }
        Ok(())
    }

    pub fn vectors(&self) -> [ComplexVector; 2] {
        match self {
            Self::Named(name) => {
                let states = basis_states(*name);
                [states[0].vector().clone(), states[1].vector().clone()]
            }
            Self::Custom { states, .. } => states.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Named(name) => name.label().to_string(),
            Self::Custom { label, .. } => label.clone(),
        }
    }
}

/// Bob measures his qubit in the given basis; Alice's conditional states are
/// weighted by the standard Born rule and then metric-normalized for the
/// subsequent renormalized evolution. Zero-probability branches are dropped.
pub fn steer(shared: &PureState, basis: &BobBasis, a: &MetricOperator) -> Result<Ensemble> {
    if shared.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: shared.dim() });
    }
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: a.dim() });
    }
    basis.check()?;
    let psi = shared.vector();
    let mut members = Vec::new();
    for b in basis.vectors() {
        // (I ⊗ ⟨b|) |Ψ⟩
        let mut cond = Vec::with_capacity(2);
        for i in 0..2 {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                s += b.get(j).conj() * psi.get(i * 2 + j);
            }
            cond.push(s);
        }
        let cond = ComplexVector::new(cond)?;
        let weight = cond.norm_squared();
        if weight < 1e-12 {
            continue;
        }
        members.push((weight, normalize_a(&cond, a)?));
    }
    Ensemble::new(members)
}

/// Full protocol configuration; the metric and unitary act on Alice's qubit.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub metric: MetricOperator,
    pub alice_unitary: UnitaryGate,
    pub bob_bases: Vec<BobBasis>,
    pub alice_projector: MeasurementProjector,
    pub shared_state: PureState,
}

impl ProtocolConfig {
    /// The worked-example setup: Bell pair, Hadamard, M = |0⟩⟨0|, Bob
    /// choosing between the computational and diagonal bases.
    pub fn paper_example(metric: MetricOperator) -> Self {
        Self {
            metric,
            alice_unitary: UnitaryGate::hadamard(),
            bob_bases: vec![BobBasis::computational(), BobBasis::diagonal()],
            alice_projector: MeasurementProjector::zero_projector(),
            shared_state: bell_state(),
        }
    }
}

/// Per-basis result of one protocol run.
#[derive(Debug, Clone)]
pub struct BasisOutcome {
    pub basis: BobBasis,
    pub alice_ensemble: Ensemble,
    pub final_density: DensityOperator,
    pub probability: f64,
}

/// Result record of one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    pub per_basis: Vec<BasisOutcome>,
    /// Pairwise max trace distance between effective states A^{1/2} ρ A^{1/2}.
    pub signalling_magnitude: f64,
    /// Plain Frobenius distance between raw final densities, for transparency.
    pub raw_frobenius_gap: f64,
    /// Max minus min of the per-basis projector probabilities.
    pub probability_gap: f64,
    pub signalling: bool,
}

/// Distinguishability of two metric-trace-normalized densities: trace
/// distance between the effective states A^{1/2} ρ A^{1/2}, which are
/// unit-trace PSD matrices by the Tr(Aρ) = 1 condition.
pub fn signalling_magnitude(
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    a: &MetricOperator,
) -> Result<f64> {
    for rho in [rho1, rho2] {
        let (value, pass) = check_trace_condition(rho, a)?;
        if !pass {
            return Err(Error::TraceCondition { value });
        }
    }
    let s = a.sqrt();
    let eff1 = s.matmul(rho1.matrix())?.matmul(s)?;
    let eff2 = s.matmul(rho2.matrix())?.matmul(s)?;
    trace_distance(&eff1, &eff2)
}

/// Run the protocol for every configured Bob basis.
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ProtocolOutcome> {
    let mut per_basis = Vec::with_capacity(cfg.bob_bases.len());
    for basis in &cfg.bob_bases {
        let ensemble = steer(&cfg.shared_state, basis, &cfg.metric)?;
        let final_density = evolve_ensemble(&ensemble, &cfg.alice_unitary, &cfg.metric)?;
        let probability =
            probability_weighted(&cfg.alice_projector, &final_density, &cfg.metric)?.value;
        per_basis.push(BasisOutcome {
            basis: basis.clone(),
            alice_ensemble: ensemble,
            final_density,
            probability,
        });
    }

    let mut magnitude: f64 = 0.0;
    let mut raw_gap: f64 = 0.0;
    for i in 0..per_basis.len() {
        for j in (i + 1)..per_basis.len() {
            magnitude = magnitude.max(signalling_magnitude(
                &per_basis[i].final_density,
                &per_basis[j].final_density,
                &cfg.metric,
            )?);
            raw_gap = raw_gap.max(
                per_basis[i]
                    .final_density
                    .matrix()
                    .sub(per_basis[j].final_density.matrix())?
                    .frobenius_norm(),
            );
        }
    }
    let probs: Vec<f64> = per_basis.iter().map(|b| b.probability).collect();
    let probability_gap = probs.iter().cloned().fold(f64::MIN, f64::max)
        - probs.iter().cloned().fold(f64::MAX, f64::min);

    Ok(ProtocolOutcome {
        per_basis,
        signalling_magnitude: magnitude,
        raw_frobenius_gap: raw_gap,
        probability_gap,
        signalling: magnitude > SIGNALLING_TOL,
    })
}

/// A concrete configuration that produced basis-dependent statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub unitary: ComplexMatrix,
    pub unitary_label: String,
    pub basis_pair: (BobBasis, BobBasis),
    pub projector: ComplexMatrix,
    pub probability_gap: f64,
    pub signalling_magnitude: f64,
}

/// Outcome of the randomized witness search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignallingCertificate {
    pub metric: ComplexMatrix,
    pub found: bool,
    pub witness: Option<Witness>,
    pub trials_used: usize,
    pub trials_requested: usize,
    pub seed: u64,
    pub threshold: f64,
    /// Set when the metric is proportional to the identity, the case the
    /// search provably cannot witness; a scale c ≠ 1 is still flagged.
    pub scalar_metric: Option<f64>,
}

/// Haar-random qubit unitary from two phases and a rotation angle.
pub fn haar_random_unitary(rng: &mut impl Rng) -> ComplexMatrix {
    let alpha = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    let beta = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    let xi: f64 = rng.gen_range(0.0..1.0);
    let theta = xi.sqrt().asin();
    let (s, c) = (theta.sin(), theta.cos());
    let mut u = ComplexMatrix::zeros(2);
    u.set(0, 0, Complex64::from_polar(c, alpha));
    u.set(0, 1, Complex64::from_polar(s, beta));
    u.set(1, 0, Complex64::from_polar(-s, -beta));
    u.set(1, 1, Complex64::from_polar(c, -alpha));
    u
}

fn try_candidate(
    a: &MetricOperator,
    unitary: UnitaryGate,
    basis_pair: (BobBasis, BobBasis),
    projector: MeasurementProjector,
    threshold: f64,
) -> Result<Option<Witness>> {
    let cfg = ProtocolConfig {
        metric: a.clone(),
        alice_unitary: unitary.clone(),
        bob_bases: vec![basis_pair.0.clone(), basis_pair.1.clone()],
        alice_projector: projector.clone(),
        shared_state: bell_state(),
    };
    let outcome = run_protocol(&cfg)?;
    if outcome.probability_gap > threshold || outcome.signalling_magnitude > threshold {
        Ok(Some(Witness {
            unitary: unitary.matrix().clone(),
            unitary_label: unitary.label().to_string(),
            basis_pair,
            projector: projector.matrix().clone(),
            probability_gap: outcome.probability_gap,
            signalling_magnitude: outcome.signalling_magnitude,
        }))
    } else {
        Ok(None)
    }
}

/// Search for a signalling witness: deterministic candidates (the Hadamard,
/// and the Hadamard conjugated into A's eigenbasis) first, then seeded
/// random (unitary, basis pair, projector) triples. Absence of a witness is
/// a valid result; for A = cI the search always comes back empty.
pub fn certify(
    a: &MetricOperator,
    trials: usize,
    seed: u64,
    threshold: f64,
) -> Result<SignallingCertificate> {
    let (is_scalar, scale) = a.is_scalar_multiple_of_identity(1e-12);
    let scalar_metric = is_scalar.then_some(scale);

    let base = |found, witness, used| SignallingCertificate {
        metric: a.matrix().clone(),
        found,
        witness,
        trials_used: used,
        trials_requested: trials,
        seed,
        threshold,
        scalar_metric,
    };

    let pair = (BobBasis::computational(), BobBasis::diagonal());
    let m0 = MeasurementProjector::zero_projector();

    // deterministic candidate 1: the worked example's Hadamard
    let mut used = 1;
    if let Some(w) = try_candidate(a, UnitaryGate::hadamard(), pair.clone(), m0.clone(), threshold)? {
        return Ok(base(true, Some(w), used));
    }

    // deterministic candidate 2: Hadamard in A's eigenbasis, which mixes
    // eigenvectors of distinct eigenvalues whenever A is not scalar
    used += 1;
    let v = &a.eigen().eigenvectors;
    let rotated = v
        .matmul(UnitaryGate::hadamard().matrix())?
        .matmul(&v.dagger())?;
    let candidate = UnitaryGate::new(rotated, "H@eigenbasis")?;
    if let Some(w) = try_candidate(a, candidate, pair.clone(), m0.clone(), threshold)? {
        return Ok(base(true, Some(w), used));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while used < trials {
        used += 1;
        let unitary = UnitaryGate::new(haar_random_unitary(&mut rng), format!("random#{used}"))?;
        let b1 = BobBasis::from_unitary(&haar_random_unitary(&mut rng), format!("rand-basis-a#{used}"))?;
        let b2 = BobBasis::from_unitary(&haar_random_unitary(&mut rng), format!("rand-basis-b#{used}"))?;
        let proj = MeasurementProjector::onto(
            &haar_random_unitary(&mut rng).column(0),
            format!("rand-proj#{used}"),
        )?;
        if let Some(w) = try_candidate(a, unitary, (b1, b2), proj, threshold)? {
            return Ok(base(true, Some(w), used));
        }
    }

    Ok(base(false, None, used))
}

/// Re-run a recorded witness through the protocol and return its gap and
/// magnitude, for certificate replay checks.
pub fn replay_witness(a: &MetricOperator, w: &Witness) -> Result<(f64, f64)> {
    let cfg = ProtocolConfig {
        metric: a.clone(),
        alice_unitary: UnitaryGate::new(w.unitary.clone(), w.unitary_label.clone())?,
        bob_bases: vec![w.basis_pair.0.clone(), w.basis_pair.1.clone()],
        alice_projector: MeasurementProjector::new(w.projector.clone(), "replay")?,
        shared_state: bell_state(),
    };
    let outcome = run_protocol(&cfg)?;
    Ok((outcome.probability_gap, outcome.signalling_magnitude))
}

/// One row of a λ sweep with A = diag(1, λ).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub p_z: f64,
    pub p_x: f64,
    pub gap: f64,
    pub magnitude: f64,
}

/// One protocol run per λ with A = diag(1, λ), rows in input order.
pub fn sweep_lambda(
    lambdas: &[f64],
    u: &UnitaryGate,
    m: &MeasurementProjector,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if lambda <= 0.0 {
            return Err(Error::NonPositiveLambda(lambda));
        }
        let cfg = ProtocolConfig {
            metric: MetricOperator::diag_lambda(lambda)?,
            alice_unitary: u.clone(),
            bob_bases: vec![BobBasis::computational(), BobBasis::diagonal()],
            alice_projector: m.clone(),
            shared_state: bell_state(),
        };
        let outcome = run_protocol(&cfg)?;
        rows.push(SweepRow {
            lambda,
            p_z: outcome.per_basis[0].probability,
            p_x: outcome.per_basis[1].probability,
            gap: outcome.probability_gap,
            magnitude: outcome.signalling_magnitude,
        });
    }
    Ok(rows)
}

/// CSV with header `lambda,p_z,p_x,gap,magnitude`, 17-significant-digit
/// floats so every cell round-trips exactly.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("lambda,p_z,p_x,gap,magnitude\n");
    for r in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.lambda, r.p_z, r.p_x, r.gap, r.magnitude
        ));
    }
    out
}
