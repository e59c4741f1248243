//! Fidelity-decay runs, observable extraction and spectral analysis.
//!
//! Sample `n` is taken after `4n` entangler iterations, i.e. every half cycle,
//! so one sample spans four entangling operations and the Nyquist frequency
//! is 1/8 per operation.

use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::circuit::circuit_unitary;
use crate::circuit::CircuitPlan;
use crate::error::{Error, Result};
use crate::liouville::unitary_to_superop;
use crate::liouville::{
    fidelity, mix_channels, purity, vectorize, RelaxationRates, StateVecL, Superoperator,
};
use crate::noise::{
    averaged_iteration, decoherent_evolve, default_rf_distribution, incoherent_evolve,
    weighted_sum, NoiseModel, RfDistribution,
};
use crate::spincore::{pauli_product, SpinSystem};

pub const DEFAULT_N_MAX: usize = 30;
pub const DEFAULT_ITERATION_DURATION: f64 = 0.034 / 4.0;
pub const RECURRENCE_THRESHOLD: f64 = 0.02;
pub const MIN_SPECTRUM_SAMPLES: usize = 8;
/// Samples averaged for the saturation estimate.
const SATURATION_WINDOW: usize = 5;
const IDENTICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Incoherent,
    Decoherent,
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "incoherent" => Ok(Model::Incoherent),
            "decoherent" => Ok(Model::Decoherent),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Incoherent => "incoherent",
            Model::Decoherent => "decoherent",
        })
    }
}

/// Measured Pauli products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Z1,
    Z1Z2,
    Z1Z3,
    Z1Z2Z3,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Z1,
        Component::Z1Z2,
        Component::Z1Z3,
        Component::Z1Z2Z3,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Component::Z1 => "ZII",
            Component::Z1Z2 => "ZZI",
            Component::Z1Z3 => "ZIZ",
            Component::Z1Z2Z3 => "ZZZ",
        }
    }

    /// CSV column name.
    pub fn column(self) -> &'static str {
        match self {
            Component::Z1 => "c1",
            Component::Z1Z2 => "c12",
            Component::Z1Z3 => "c13",
            Component::Z1Z2Z3 => "c123",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// `c_i = tr(P_i ρ)/8` for the four measured products.
pub fn component_coefficients(rho: &StateVecL) -> Result<[f64; 4]> {
    if rho.dim() != 8 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 3-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let mut out = [0.0; 4];
    for c in Component::ALL {
        let p = vectorize(&pauli_product(&c.label().parse()?));
        out[c.index()] = fidelity(&p, rho)? / 8.0;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSetup {
    pub noise: NoiseModel,
    pub dist: RfDistribution,
    pub n_max: usize,
}

impl ExperimentSetup {
    /// Default spin system and distribution with additive relaxation.
    pub fn standard() -> Self {
        let sys = SpinSystem::default_three_spin();
        let rates = RelaxationRates::additive(&sys);
        let noise = NoiseModel::new(CircuitPlan::standard(), sys)
            .and_then(|m| m.with_relaxation(rates, DEFAULT_ITERATION_DURATION))
            .expect("standard setup is valid");
        Self {
            noise,
            dist: default_rf_distribution(),
            n_max: DEFAULT_N_MAX,
        }
    }

    /// Nominal field everywhere and no relaxation.
    pub fn noiseless() -> Self {
        let noise = NoiseModel::new(CircuitPlan::standard(), SpinSystem::default_three_spin())
            .expect("valid");
        Self {
            noise,
            dist: RfDistribution::single(1.0).expect("valid"),
            n_max: DEFAULT_N_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub n: usize,
    pub fidelity: f64,
    pub components: [f64; 4],
    pub sum_abs: f64,
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub model: Model,
    pub samples: Vec<DecaySample>,
}

impl DecaySeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.fidelity).collect()
    }

    pub fn component(&self, c: Component) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| s.components[c.index()])
            .collect()
    }

    /// Largest `F_{n+1} − F_n`.
    pub fn max_consecutive_increase(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[1].fidelity - w[0].fidelity)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

struct Stages {
    iteration: Superoperator,
    prep: Superoperator,
    readout_even: Superoperator,
    readout_odd: Superoperator,
}

fn member_stages(model: &NoiseModel, z: f64) -> Result<Stages> {
    Ok(Stages {
        iteration: model.iteration_superop(z)?.pow(4),
        prep: model.stage_superop(&model.plan.prep, z)?,
        readout_even: model.stage_superop(&model.plan.readout_even, z)?,
        readout_odd: model.stage_superop(&model.plan.readout_odd, z)?,
    })
}

fn trajectory(st: &Stages, rho0: &StateVecL, n_max: usize) -> Vec<StateVecL> {
    let mut v = st.prep.apply(rho0);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let r = if n % 2 == 1 {
            &st.readout_odd
        } else {
            &st.readout_even
        };
        out.push(r.apply(&v));
        if n < n_max {
            v = st.iteration.apply(&v);
        }
    }
    out
}

/// Ensemble output state after readout for every `n` in `0..=n_max`.
pub fn output_states(model: Model, setup: &ExperimentSetup) -> Result<Vec<StateVecL>> {
    let noise = &setup.noise;
    let rho0 = StateVecL::basis_state(noise.sys.n_qubits(), 0);
    match model {
        Model::Incoherent => {
            let members = noise.map_members(&setup.dist, |z| {
                Ok(trajectory(&member_stages(noise, z)?, &rho0, setup.n_max))
            })?;
            Ok((0..=setup.n_max)
                .map(|n| {
                    let at_n: Vec<StateVecL> = members.iter().map(|m| m[n].clone()).collect();
                    weighted_sum(&at_n, setup.dist.weights())
                })
                .collect())
        }
        Model::Decoherent => {
            let w = setup.dist.weights();
            let per = noise.map_members(&setup.dist, |z| member_stages(noise, z))?;
            let mix = |f: fn(&Stages) -> &Superoperator| {
                mix_channels(&per.iter().map(|s| f(s).clone()).collect::<Vec<_>>(), w)
            };
            let st = Stages {
                iteration: averaged_iteration(noise, &setup.dist)?.pow(4),
                prep: mix(|s| &s.prep)?,
                readout_even: mix(|s| &s.readout_even)?,
                readout_odd: mix(|s| &s.readout_odd)?,
            };
            Ok(trajectory(&st, &rho0, setup.n_max))
        }
    }
}

/// Fidelity to the ideal state `G^k ρ_GHZ` after `k` single entangler
/// iterations applied to the ideally prepared GHZ state.
pub fn fidelity_after_iterations(model: Model, setup: &ExperimentSetup, k: usize) -> Result<f64> {
    let noise = &setup.noise;
    let sys = &noise.sys;
    let rho0 = StateVecL::basis_state(sys.n_qubits(), 0);
    let ghz = unitary_to_superop(&circuit_unitary(&noise.plan.prep, sys)?)?.apply(&rho0);
    let ideal = unitary_to_superop(&circuit_unitary(&noise.plan.entangler, sys)?)?
        .pow(k)
        .apply(&ghz);
    let actual = match model {
        Model::Incoherent => incoherent_evolve(&ghz, noise, &setup.dist, k)?,
        Model::Decoherent => decoherent_evolve(&ghz, noise, &setup.dist, k)?,
    };
    fidelity(&ideal, &actual)
}

pub fn run_decay(model: Model, setup: &ExperimentSetup) -> Result<DecaySeries> {
    let n_qubits = setup.noise.sys.n_qubits();
    let samples = output_states(model, setup)?
        .iter()
        .enumerate()
        .map(|(n, rho)| {
            let target = StateVecL::basis_state(n_qubits, setup.noise.plan.target_index(n));
            let components = component_coefficients(rho)?;
            Ok(DecaySample {
                n,
                fidelity: fidelity(&target, rho)?,
                components,
                sum_abs: components.iter().map(|c| c.abs()).sum(),
                purity: purity(rho)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecaySeries { model, samples })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub component: Component,
    /// Oscillation periods per entangling operation, from 0 to 1/8.
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    pub fn nyquist_frequency(&self) -> f64 {
        *self.frequencies.last().expect("non-empty spectrum")
    }

    pub fn nyquist_magnitude(&self) -> f64 {
        *self.magnitudes.last().expect("non-empty spectrum")
    }
}

/// One-sided DFT magnitudes `|X_k|/L` of the longest even-length prefix, with
/// bin `k` at frequency `k/(4L)` so the last bin sits exactly at 1/8.
pub fn dft_spectrum(values: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if values.len() < MIN_SPECTRUM_SAMPLES {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            min: MIN_SPECTRUM_SAMPLES,
        });
    }
    let len = values.len() - values.len() % 2;
    let mut buf: Vec<Complex<f64>> = values[..len]
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let half = len / 2;
    let freqs = (0..=half).map(|k| k as f64 / (4.0 * len as f64)).collect();
    let mags = buf[..=half].iter().map(|x| x.norm() / len as f64).collect();
    Ok((freqs, mags))
}

/// Spectrum of the measured signal magnitude `|c_i(n)|`.
pub fn spectrum(series: &DecaySeries, component: Component) -> Result<Spectrum> {
    let signal: Vec<f64> = series
        .component(component)
        .iter()
        .map(|c| c.abs())
        .collect();
    let (frequencies, magnitudes) = dft_spectrum(&signal)?;
    Ok(Spectrum {
        component,
        frequencies,
        magnitudes,
    })
}

/// Local maxima rising at least `threshold` above the preceding trough.
pub fn recurrence_count(fidelities: &[f64], threshold: f64) -> usize {
    let mut count = 0;
    let mut trough = f64::INFINITY;
    for (i, &f) in fidelities.iter().enumerate() {
        trough = trough.min(f);
        let rising = i > 0 && f > fidelities[i - 1];
        let peak = rising && fidelities.get(i + 1).is_none_or(|&next| next <= f);
        if peak && f - trough >= threshold {
            count += 1;
            trough = f;
        }
    }
    count
}

/// Mean fidelity over the last few samples.
pub fn saturation_estimate(fidelities: &[f64]) -> f64 {
    let k = SATURATION_WINDOW.min(fidelities.len()).max(1);
    fidelities[fidelities.len().saturating_sub(k)..]
        .iter()
        .sum::<f64>()
        / k as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub incoherent: DecaySeries,
    pub decoherent: DecaySeries,
    pub incoherent_spectra: Vec<Spectrum>,
    pub decoherent_spectra: Vec<Spectrum>,
    pub incoherent_recurrences: usize,
    pub decoherent_recurrences: usize,
    pub incoherent_saturation: f64,
    pub decoherent_saturation: f64,
    /// Incoherent over decoherent Nyquist magnitude, per component.
    pub nyquist_ratios: [f64; 4],
    /// Fidelity gap between the regimes after a single entangler iteration.
    pub single_iteration_difference: f64,
    /// Fidelity gap at decay sample 1, i.e. after four iterations.
    pub sample1_difference: f64,
    pub models_identical: bool,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

pub fn compare_models(setup: &ExperimentSetup) -> Result<ComparisonReport> {
    let inc = run_decay(Model::Incoherent, setup)?;
    let dec = run_decay(Model::Decoherent, setup)?;
    let spectra = |s: &DecaySeries| {
        Component::ALL
            .iter()
            .map(|c| spectrum(s, *c))
            .collect::<Result<Vec<_>>>()
    };
    let inc_sp = spectra(&inc)?;
    let dec_sp = spectra(&dec)?;
    let mut nyquist_ratios = [0.0; 4];
    for (i, r) in nyquist_ratios.iter_mut().enumerate() {
        *r = ratio(inc_sp[i].nyquist_magnitude(), dec_sp[i].nyquist_magnitude());
    }
    let (fi, fd) = (inc.fidelities(), dec.fidelities());
    let sample1_difference = match (fi.get(1), fd.get(1)) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => 0.0,
    };
    let single_iteration_difference = (fidelity_after_iterations(Model::Incoherent, setup, 1)?
        - fidelity_after_iterations(Model::Decoherent, setup, 1)?)
    .abs();
    let models_identical = inc.samples.iter().zip(&dec.samples).all(|(a, b)| {
        (a.fidelity - b.fidelity).abs() < IDENTICAL_TOL
            && a.components
                .iter()
                .zip(&b.components)
                .all(|(x, y)| (x - y).abs() < IDENTICAL_TOL)
    });
    Ok(ComparisonReport {
        incoherent_recurrences: recurrence_count(&fi, RECURRENCE_THRESHOLD),
        decoherent_recurrences: recurrence_count(&fd, RECURRENCE_THRESHOLD),
        incoherent_saturation: saturation_estimate(&fi),
        decoherent_saturation: saturation_estimate(&fd),
        nyquist_ratios,
        single_iteration_difference,
        sample1_difference,
        models_identical,
        incoherent: inc,
        decoherent: dec,
        incoherent_spectra: inc_sp,
        decoherent_spectra: dec_sp,
    })
}

impl ComparisonReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let line = |s: &mut String, t: String| {
            s.push_str(&t);
            s.push('\n');
        };
        line(
            &mut s,
            format!(
                "models identical: {}",
                if self.models_identical { "yes" } else { "no" }
            ),
        );
        line(
            &mut s,
            format!(
                "fidelity difference after 1 iteration: {:.3e}",
                self.single_iteration_difference
            ),
        );
        line(
            &mut s,
            format!(
                "fidelity difference at sample 1: {:.3e}",
                self.sample1_difference
            ),
        );
        line(
            &mut s,
            format!("recurrence threshold: {RECURRENCE_THRESHOLD}"),
        );
        line(
            &mut s,
            format!("recurrences incoherent: {}", self.incoherent_recurrences),
        );
        line(
            &mut s,
            format!("recurrences decoherent: {}", self.decoherent_recurrences),
        );
        line(
            &mut s,
            format!("saturation incoherent: {:.6}", self.incoherent_saturation),
        );
        line(
            &mut s,
            format!("saturation decoherent: {:.6}", self.decoherent_saturation),
        );
        for (c, r) in Component::ALL.iter().zip(&self.nyquist_ratios) {
            let (a, b) = (
                self.incoherent_spectra[c.index()].nyquist_magnitude(),
                self.decoherent_spectra[c.index()].nyquist_magnitude(),
            );
            line(
                &mut s,
                format!(
                    "nyquist {}: incoherent {a:.6e} decoherent {b:.6e} ratio {r:.6}",
                    c.label()
                ),
            );
        }
        s
    }
}
