//! rf-inhomogeneity ensembles and the two propagation regimes.
//!
//! Every ensemble member sees its own field scale `z` multiplying the angle of
//! each carbon pulse. In the incoherent regime a member keeps its `z` for the
//! whole run; in the decoherent regime the ensemble average is taken after
//! every iteration.

use rayon::prelude::*;

use crate::circuit::{
    compile_entangler, compile_to_pulses, realized_unitary, CircuitPlan, Gate, PulseParams,
};
use crate::error::{Error, Result};
use crate::liouville::{
    check_weights, mix_channels, relaxation_superop, unitary_to_superop, RelaxationRates,
    StateVecL, Superoperator,
};
use crate::spincore::{embed, Operator, Pauli, SpinSystem};

/// Discrete distribution of field scale factors.
#[derive(Debug, Clone, PartialEq)]
pub struct RfDistribution {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl RfDistribution {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} points and {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(z) = points.iter().find(|z| !(z.is_finite() && **z > 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "scale factor {z} is not positive"
            )));
        }
        check_weights(&weights).map_err(Error::InvalidDistribution)?;
        Ok(Self { points, weights })
    }

    pub fn single(z: f64) -> Result<Self> {
        Self::new(vec![z], vec![1.0])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(z, p)| z * p)
            .sum()
    }
}

/// Nine points between 0.92 and 1.04, skewed slightly below nominal field.
/// The values approximate a measured rf profile read off a plot; they are
/// not tabulated data.
pub fn default_rf_distribution() -> RfDistribution {
    RfDistribution::new(
        vec![0.92, 0.94, 0.96, 0.975, 0.99, 1.0, 1.01, 1.025, 1.04],
        vec![0.04, 0.08, 0.12, 0.14, 0.15, 0.145, 0.135, 0.11, 0.08],
    )
    .expect("default distribution is valid")
}

/// Deviation of one ensemble member: a pulse of nominal angle `θ` about `σ`
/// becomes `exp(−i η σ/2) · R(θ)` with `η = (z − 1)·θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    scale: f64,
}

impl Perturbation {
    pub fn new(z: f64) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::NonPositiveScale(z));
        }
        Ok(Self { scale: z })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 1.0
    }

    pub fn eta(&self, nominal_angle: f64) -> f64 {
        (self.scale - 1.0) * nominal_angle
    }

    /// `exp(−i η V)` with `V = σ/2` on `qubit`.
    pub fn operator(
        &self,
        qubit: usize,
        axis: Pauli,
        nominal_angle: f64,
        n_qubits: usize,
    ) -> Result<Operator> {
        embed(
            &crate::circuit::rotation(axis, self.eta(nominal_angle)),
            qubit,
            n_qubits,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimulationMode {
    #[default]
    GateLevel,
    PulseLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub rates: RelaxationRates,
    /// Seconds of relaxation per entangler iteration.
    pub duration: f64,
}

/// Everything needed to build the perturbed superoperators of one member.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub plan: CircuitPlan,
    pub sys: SpinSystem,
    pub mode: SimulationMode,
    pub pulse: PulseParams,
    pub relaxation: Option<Relaxation>,
    /// Also scale carbon pulses in preparation and readout.
    pub noisy_prep_readout: bool,
    /// Evaluate ensemble members on the rayon pool.
    pub parallel: bool,
}

impl NoiseModel {
    pub fn new(plan: CircuitPlan, sys: SpinSystem) -> Result<Self> {
        plan.validate(&sys)?;
        Ok(Self {
            plan,
            sys,
            mode: SimulationMode::GateLevel,
            pulse: PulseParams::default(),
            relaxation: None,
            noisy_prep_readout: false,
            parallel: true,
        })
    }

    pub fn with_relaxation(mut self, rates: RelaxationRates, duration: f64) -> Result<Self> {
        if duration.is_nan() || duration < 0.0 {
            return Err(Error::NegativeTime(duration));
        }
        if rates.n_qubits() != self.sys.n_qubits() {
            return Err(Error::DimensionMismatch(
                "relaxation rates and spin system differ in size".into(),
            ));
        }
        self.relaxation = Some(Relaxation { rates, duration });
        Ok(self)
    }

    fn unitary(&self, gates: &[Gate], z: f64, entangler: bool) -> Result<Operator> {
        match self.mode {
            SimulationMode::GateLevel => realized_unitary(gates, &self.sys, &self.plan.channels, z),
            SimulationMode::PulseLevel => {
                let seq = if entangler {
                    compile_entangler(&self.plan, &self.sys, &self.pulse)?
                } else {
                    compile_to_pulses(gates, &self.sys, &self.plan.channels, &self.pulse)?
                };
                seq.unitary(&self.sys, z)
            }
        }
    }

    /// One entangler iteration at scale `z`, followed by relaxation if enabled.
    pub fn iteration_superop(&self, z: f64) -> Result<Superoperator> {
        let s = unitary_to_superop(&self.unitary(&self.plan.entangler, z, true)?)?;
        match &self.relaxation {
            Some(r) => Ok(relaxation_superop(&r.rates, r.duration)?.after(&s)),
            None => Ok(s),
        }
    }

    /// Preparation or readout stage; noiseless unless `noisy_prep_readout`.
    pub fn stage_superop(&self, gates: &[Gate], z: f64) -> Result<Superoperator> {
        let z = if self.noisy_prep_readout { z } else { 1.0 };
        unitary_to_superop(&self.unitary(gates, z, false)?)
    }

    pub(crate) fn map_members<T, F>(&self, dist: &RfDistribution, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(f64) -> Result<T> + Sync + Send,
    {
        if self.parallel {
            dist.points().par_iter().map(|z| f(*z)).collect()
        } else {
            dist.points().iter().map(|z| f(*z)).collect()
        }
    }
}

/// Gate-level iteration superoperator without relaxation.
pub fn perturbed_iteration_superop(
    plan: &CircuitPlan,
    sys: &SpinSystem,
    z: f64,
) -> Result<Superoperator> {
    NoiseModel::new(plan.clone(), sys.clone())?.iteration_superop(z)
}

/// Weighted sum in member order.
pub(crate) fn weighted_sum(states: &[StateVecL], weights: &[f64]) -> StateVecL {
    let mut acc = states[0].scaled(weights[0]);
    for (s, w) in states.iter().zip(weights).skip(1) {
        acc.axpy(*w, s);
    }
    acc
}

/// `(S_k)^n ρ0` for every ensemble member, in distribution order.
pub fn member_states(
    rho0: &StateVecL,
    model: &NoiseModel,
    dist: &RfDistribution,
    n: usize,
) -> Result<Vec<StateVecL>> {
    model.map_members(dist, |z| Ok(model.iteration_superop(z)?.pow(n).apply(rho0)))
}

/// `Σ_k p_k (S_k)^n ρ0`.
pub fn incoherent_evolve(
    rho0: &StateVecL,
    model: &NoiseModel,
    dist: &RfDistribution,
    n: usize,
) -> Result<StateVecL> {
    let states = member_states(rho0, model, dist, n)?;
    Ok(weighted_sum(&states, dist.weights()))
}

/// `(Σ_k p_k S_k)^n ρ0`.
pub fn decoherent_evolve(
    rho0: &StateVecL,
    model: &NoiseModel,
    dist: &RfDistribution,
    n: usize,
) -> Result<StateVecL> {
    Ok(averaged_iteration(model, dist)?.pow(n).apply(rho0))
}

pub(crate) fn averaged_iteration(
    model: &NoiseModel,
    dist: &RfDistribution,
) -> Result<Superoperator> {
    let channels = model.map_members(dist, |z| model.iteration_superop(z))?;
    mix_channels(&channels, dist.weights())
}
