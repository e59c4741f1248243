//! Hard-pulse compilation.
//!
//! Pulses are instantaneous rotations about a transverse axis at the given
//! phase. A CNOT becomes target Hadamards around a coupling delay of `1/(2J)`
//! in which the target is flipped at the midpoint and the spectator runs an
//! XY-4 cycle, leaving pure `ZZ` evolution. Zeeman phases and the remaining
//! local `Z` terms of the controlled-Z are removed by virtual frame shifts.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{check_scale, phased_rotation, rotation, Channel, CircuitPlan, Gate};
use crate::error::{Error, Result};
use crate::spincore::{embed, internal_hamiltonian, propagator, Operator, Pauli, SpinSystem};

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Pulse {
        channel: Channel,
        targets: Vec<usize>,
        angle: f64,
        phase: f64,
    },
    Delay {
        duration: f64,
    },
    /// Virtual rotation about z applied by shifting the rotating frame.
    Phase {
        qubit: usize,
        angle: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSequence {
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseParams {
    /// Pad each compiled entangler iteration to this duration in seconds.
    pub iteration_duration: Option<f64>,
}

impl PulseSequence {
    pub fn duration(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Delay { duration } => *duration,
                _ => 0.0,
            })
            .sum()
    }

    pub fn n_pulses(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Pulse { .. }))
            .count()
    }

    /// Unitary with carbon pulse angles multiplied by `z`.
    pub fn unitary(&self, sys: &SpinSystem, z: f64) -> Result<Operator> {
        check_scale(z)?;
        let n = sys.n_qubits();
        let h = internal_hamiltonian(sys);
        let mut u = Operator::identity(sys.dim());
        for seg in &self.segments {
            let step = match seg {
                Segment::Pulse {
                    channel,
                    targets,
                    angle,
                    phase,
                } => {
                    if !angle.is_finite() || !phase.is_finite() {
                        return Err(Error::InvalidGate(format!(
                            "pulse angle {angle} or phase {phase} not finite"
                        )));
                    }
                    let s = if *channel == Channel::Carbon { z } else { 1.0 };
                    let r = phased_rotation(s * angle, *phase);
                    let mut p = Operator::identity(sys.dim());
                    for q in targets {
                        p = &embed(&r, *q, n)? * &p;
                    }
                    p
                }
                Segment::Delay { duration } => propagator(&h, *duration)?,
                Segment::Phase { qubit, angle } => embed(&rotation(Pauli::Z, *angle), *qubit, n)?,
            };
            u = &step * &u;
        }
        Ok(u)
    }
}

/// Delay `1/(2|J|)` that accumulates a quarter-turn of `ZZ` phase.
pub fn coupling_delay(sys: &SpinSystem, control: usize, target: usize) -> Result<f64> {
    Gate::Cnot { control, target }.validate(sys.n_qubits())?;
    let j = sys.coupling(control, target);
    if j == 0.0 {
        return Err(Error::UnsupportedGate(format!(
            "CNOT({control}->{target}) on uncoupled spins"
        )));
    }
    Ok(1.0 / (2.0 * j.abs()))
}

struct Emitter<'a> {
    channels: &'a [Channel],
    out: Vec<Segment>,
}

impl Emitter<'_> {
    fn pulse(&mut self, q: usize, angle: f64, phase: f64) {
        self.out.push(Segment::Pulse {
            channel: self.channels[q - 1],
            targets: vec![q],
            angle,
            phase,
        });
    }

    fn delay(&mut self, duration: f64) {
        self.out.push(Segment::Delay { duration });
    }

    fn phase(&mut self, q: usize, angle: f64) {
        self.out.push(Segment::Phase { qubit: q, angle });
    }

    fn hadamard(&mut self, q: usize) {
        self.phase(q, PI);
        self.pulse(q, FRAC_PI_2, FRAC_PI_2);
    }

    fn target_hadamard(&mut self, q: usize) {
        self.pulse(q, PI, 0.0);
        self.pulse(q, -FRAC_PI_2, FRAC_PI_2);
    }

    /// Four equal delays, each followed by a π pulse about x, y, x, y on `qubits`.
    fn xy4(&mut self, total: f64, qubits: &[usize], flip_at_half: &[usize]) {
        for k in 0..4 {
            self.delay(total / 4.0);
            let phase = if k % 2 == 0 { 0.0 } else { FRAC_PI_2 };
            for &q in qubits {
                self.pulse(q, PI, phase);
            }
            if k % 2 == 1 {
                for &q in flip_at_half {
                    self.pulse(q, PI, 0.0);
                    self.pulse(q, PI, FRAC_PI_2);
                }
            }
        }
    }

    fn cnot(&mut self, sys: &SpinSystem, control: usize, target: usize) -> Result<()> {
        let tau = coupling_delay(sys, control, target)?;
        let spectators: Vec<usize> = (1..=sys.n_qubits())
            .filter(|&q| q != control && q != target)
            .collect();
        self.target_hadamard(target);
        self.xy4(tau, &spectators, &[target]);
        let correction = -sys.coupling(control, target).signum() * FRAC_PI_2;
        for q in [control, target] {
            let zeeman = 2.0 * PI * sys.frequencies()[q - 1] * tau;
            self.phase(q, correction - zeeman);
        }
        self.target_hadamard(target);
        Ok(())
    }
}

pub fn compile_to_pulses(
    gates: &[Gate],
    sys: &SpinSystem,
    channels: &[Channel],
    _params: &PulseParams,
) -> Result<PulseSequence> {
    if channels.len() != sys.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{} channels for {} qubits",
            channels.len(),
            sys.n_qubits()
        )));
    }
    let mut e = Emitter {
        channels,
        out: Vec::new(),
    };
    for g in gates {
        g.validate(sys.n_qubits())?;
        match *g {
            Gate::Hadamard(q) => e.hadamard(q),
            Gate::Cnot { control, target } => e.cnot(sys, control, target)?,
            Gate::RotX(q, a) => e.pulse(q, a, 0.0),
            Gate::RotY(q, a) => e.pulse(q, a, FRAC_PI_2),
            Gate::RotZ(q, a) => e.phase(q, a),
            Gate::Delay(t) => e.delay(t),
        }
    }
    Ok(PulseSequence { segments: e.out })
}

/// One entangler iteration, padded with a refocused idle block on the last
/// CNOT target when `params.iteration_duration` exceeds the compiled length.
pub fn compile_entangler(
    plan: &CircuitPlan,
    sys: &SpinSystem,
    params: &PulseParams,
) -> Result<PulseSequence> {
    let mut seq = compile_to_pulses(&plan.entangler, sys, &plan.channels, params)?;
    if let Some(total) = params.iteration_duration {
        let pad = total - seq.duration();
        if pad < -1e-15 {
            return Err(Error::InvalidGate(format!(
                "iteration duration {total} s is shorter than the compiled entangler ({} s)",
                seq.duration()
            )));
        }
        if pad > 0.0 {
            let refocus: Vec<usize> = plan
                .entangler
                .iter()
                .rev()
                .find_map(|g| match g {
                    Gate::Cnot { target, .. } => Some(*target),
                    _ => None,
                })
                .into_iter()
                .collect();
            let mut e = Emitter {
                channels: &plan.channels,
                out: seq.segments,
            };
            if refocus.is_empty() {
                e.delay(pad);
            } else {
                e.xy4(pad, &refocus, &[]);
            }
            seq.segments = e.out;
        }
    }
    Ok(seq)
}
