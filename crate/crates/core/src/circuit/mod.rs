//! Gate-level description of the fidelity-decay circuit: GHZ preparation, the
//! iterated two-qubit entangler and the disentangling readout.
//!
//! Gates are applied in list order. Each gate also has a fixed realization as
//! rf pulses, virtual Z frame shifts and ideal controlled-Z coupling evolution;
//! only the rf pulses respond to the field scale `z`.

mod pulse;

pub use pulse::{
    compile_entangler, compile_to_pulses, coupling_delay, PulseParams, PulseSequence, Segment,
};

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spincore::{embed, internal_hamiltonian, propagator, Operator, Pauli, SpinSystem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    Cnot { control: usize, target: usize },
    RotX(usize, f64),
    RotY(usize, f64),
    RotZ(usize, f64),
    Delay(f64),
}

impl Gate {
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q == 0 || q > n_qubits {
                Err(Error::QubitOutOfRange { index: q, n_qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::Hadamard(q) => check(q),
            Gate::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::InvalidGate(format!(
                        "CNOT control equals target ({control})"
                    )));
                }
                Ok(())
            }
            Gate::RotX(q, a) | Gate::RotY(q, a) | Gate::RotZ(q, a) => {
                check(q)?;
                if !a.is_finite() {
                    return Err(Error::InvalidGate(format!(
                        "rotation angle {a} is not finite"
                    )));
                }
                Ok(())
            }
            Gate::Delay(t) => {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(Error::NegativeTime(t));
                }
                Ok(())
            }
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Hadamard(q) | Gate::RotX(q, _) | Gate::RotY(q, _) | Gate::RotZ(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Delay(_) => vec![],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Hadamard(q) => write!(f, "H({q})"),
            Gate::Cnot { control, target } => write!(f, "CNOT({control}->{target})"),
            Gate::RotX(q, a) => write!(f, "RotX({q}, {a:.6})"),
            Gate::RotY(q, a) => write!(f, "RotY({q}, {a:.6})"),
            Gate::RotZ(q, a) => write!(f, "RotZ({q}, {a:.6})"),
            Gate::Delay(t) => write!(f, "Delay({t:.6e} s)"),
        }
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `exp(−i θ σ/2)` for a single-qubit Pauli `σ`.
pub(crate) fn rotation(axis: Pauli, angle: f64) -> Array2<C64> {
    let (cs, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Pauli::I.matrix().mapv(|x| x * cs) - axis.matrix().mapv(|x| x * C64::new(0.0, sn))
}

/// Rotation by `angle` about the transverse axis `(cos φ, sin φ, 0)`.
pub(crate) fn phased_rotation(angle: f64, phase: f64) -> Array2<C64> {
    let axis =
        Pauli::X.matrix().mapv(|x| x * phase.cos()) + Pauli::Y.matrix().mapv(|x| x * phase.sin());
    let (cs, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Pauli::I.matrix().mapv(|x| x * cs) - axis.mapv(|x| x * C64::new(0.0, sn))
}

fn projector(bit: usize) -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    m[[bit, bit]] = c(1.0);
    m
}

fn controlled(control: usize, target: usize, target_op: Pauli, n: usize) -> Result<Operator> {
    let p0 = embed(&projector(0), control, n)?;
    let p1 = embed(&projector(1), control, n)?;
    let t = embed(&target_op.matrix(), target, n)?;
    Ok(&p0 + &(&p1 * &t))
}

pub fn gate_unitary(g: &Gate, sys: &SpinSystem) -> Result<Operator> {
    let n = sys.n_qubits();
    g.validate(n)?;
    match *g {
        Gate::Hadamard(q) => {
            let h = (Pauli::Z.matrix() + Pauli::X.matrix()).mapv(|x| x / 2f64.sqrt());
            embed(&h, q, n)
        }
        Gate::Cnot { control, target } => controlled(control, target, Pauli::X, n),
        Gate::RotX(q, a) => embed(&rotation(Pauli::X, a), q, n),
        Gate::RotY(q, a) => embed(&rotation(Pauli::Y, a), q, n),
        Gate::RotZ(q, a) => embed(&rotation(Pauli::Z, a), q, n),
        Gate::Delay(t) => propagator(&internal_hamiltonian(sys), t),
    }
}

/// Unitary of a gate list applied in order.
pub fn circuit_unitary(gates: &[Gate], sys: &SpinSystem) -> Result<Operator> {
    let mut u = Operator::identity(sys.dim());
    for g in gates {
        u = &gate_unitary(g, sys)? * &u;
    }
    Ok(u)
}

pub fn ghz_prep() -> Vec<Gate> {
    vec![
        Gate::Hadamard(1),
        Gate::Cnot {
            control: 1,
            target: 2,
        },
        Gate::Cnot {
            control: 2,
            target: 3,
        },
    ]
}

pub fn entangler_gates() -> Vec<Gate> {
    vec![
        Gate::Hadamard(2),
        Gate::Cnot {
            control: 2,
            target: 3,
        },
    ]
}

/// `G = CNOT(2→3)·H(2)`.
pub fn entangling_map(sys: &SpinSystem) -> Result<Operator> {
    circuit_unitary(&entangler_gates(), sys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Hydrogen,
    Carbon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitPlan {
    pub prep: Vec<Gate>,
    pub entangler: Vec<Gate>,
    pub readout_even: Vec<Gate>,
    pub readout_odd: Vec<Gate>,
    pub n_c: usize,
    /// rf channel addressing each qubit, qubit 1 first.
    pub channels: Vec<Channel>,
}

impl CircuitPlan {
    /// `G^4` maps the GHZ state to `(|001⟩ + |110⟩)/√2`, which the inverse of the
    /// preparation sends to `|001⟩`; the same gates send the GHZ state to `|000⟩`.
    pub fn standard() -> Self {
        let readout = vec![
            Gate::Cnot {
                control: 2,
                target: 3,
            },
            Gate::Cnot {
                control: 1,
                target: 2,
            },
            Gate::Hadamard(1),
        ];
        Self {
            prep: ghz_prep(),
            entangler: entangler_gates(),
            readout_even: readout.clone(),
            readout_odd: readout,
            n_c: 8,
            channels: vec![Channel::Hydrogen, Channel::Carbon, Channel::Carbon],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.channels.len()
    }

    pub fn validate(&self, sys: &SpinSystem) -> Result<()> {
        if self.channels.len() != sys.n_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "{} channels for {} qubits",
                self.channels.len(),
                sys.n_qubits()
            )));
        }
        for g in self
            .prep
            .iter()
            .chain(&self.entangler)
            .chain(&self.readout_even)
            .chain(&self.readout_odd)
        {
            g.validate(sys.n_qubits())?;
        }
        if self
            .entangler
            .iter()
            .flat_map(Gate::qubits)
            .any(|q| q != 2 && q != 3)
        {
            return Err(Error::InvalidGate(
                "entangler must act only on qubits 2 and 3".into(),
            ));
        }
        Ok(())
    }

    pub fn readout(&self, n: usize) -> &[Gate] {
        if n % 2 == 1 {
            &self.readout_odd
        } else {
            &self.readout_even
        }
    }

    /// Computational basis index of the ideal output after `4n` iterations.
    pub fn target_index(&self, n: usize) -> usize {
        n % 2
    }

    /// Preparation, `4n` entangler iterations, then the parity-matched readout.
    pub fn full_circuit(&self, n: usize) -> Vec<Gate> {
        let mut gates = self.prep.clone();
        for _ in 0..4 * n {
            gates.extend_from_slice(&self.entangler);
        }
        gates.extend_from_slice(self.readout(n));
        gates
    }

    pub fn describe(&self) -> String {
        let list = |gs: &[Gate]| {
            gs.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        let chans = self
            .channels
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{}={:?}", i + 1, c))
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "channels: {chans}\nprep: {}\nentangler: {}\nreadout_even: {}\nreadout_odd: {}\ncycle length: {}\n",
            list(&self.prep),
            list(&self.entangler),
            list(&self.readout_even),
            list(&self.readout_odd),
            self.n_c
        )
    }
}

pub fn full_circuit(n: usize) -> Vec<Gate> {
    CircuitPlan::standard().full_circuit(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Physical building blocks of a gate-level realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    /// rf pulse; its angle is multiplied by `z` on carbon qubits.
    Pulse {
        qubit: usize,
        axis: Axis,
        angle: f64,
    },
    /// Frame update; never scaled.
    VirtualZ { qubit: usize, angle: f64 },
    /// Ideal scalar-coupling evolution; never scaled.
    ControlledZ { control: usize, target: usize },
    /// Free evolution under the internal Hamiltonian.
    Free(f64),
}

/// Fixed decomposition of a gate, in time order.
///
/// `H = Ry(π/2)·Rz(π)` up to phase on a standalone Hadamard, and
/// `CNOT = H'_t·CZ·H'_t` with `H' = Ry(−π/2)·Rx(π)` on the target.
pub fn realize(g: &Gate) -> Vec<Primitive> {
    use Primitive::*;
    match *g {
        Gate::Hadamard(q) => vec![
            VirtualZ {
                qubit: q,
                angle: PI,
            },
            Pulse {
                qubit: q,
                axis: Axis::Y,
                angle: FRAC_PI_2,
            },
        ],
        Gate::Cnot { control, target } => {
            let h = [
                Pulse {
                    qubit: target,
                    axis: Axis::X,
                    angle: PI,
                },
                Pulse {
                    qubit: target,
                    axis: Axis::Y,
                    angle: -FRAC_PI_2,
                },
            ];
            let mut v = h.to_vec();
            v.push(ControlledZ { control, target });
            v.extend_from_slice(&h);
            v
        }
        Gate::RotX(q, a) => vec![Pulse {
            qubit: q,
            axis: Axis::X,
            angle: a,
        }],
        Gate::RotY(q, a) => vec![Pulse {
            qubit: q,
            axis: Axis::Y,
            angle: a,
        }],
        Gate::RotZ(q, a) => vec![VirtualZ { qubit: q, angle: a }],
        Gate::Delay(t) => vec![Free(t)],
    }
}

fn check_scale(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::NonPositiveScale(z));
    }
    Ok(())
}

/// Unitary of the realized gate list with carbon pulse angles multiplied by `z`.
pub fn realized_unitary(
    gates: &[Gate],
    sys: &SpinSystem,
    channels: &[Channel],
    z: f64,
) -> Result<Operator> {
    check_scale(z)?;
    let n = sys.n_qubits();
    if channels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} channels for {n} qubits",
            channels.len()
        )));
    }
    let mut u = Operator::identity(sys.dim());
    for g in gates {
        g.validate(n)?;
        for p in realize(g) {
            let step = match p {
                Primitive::Pulse { qubit, axis, angle } => {
                    let s = if channels[qubit - 1] == Channel::Carbon {
                        z
                    } else {
                        1.0
                    };
                    let sigma = match axis {
                        Axis::X => Pauli::X,
                        Axis::Y => Pauli::Y,
                    };
                    embed(&rotation(sigma, s * angle), qubit, n)?
                }
                Primitive::VirtualZ { qubit, angle } => {
                    embed(&rotation(Pauli::Z, angle), qubit, n)?
                }
                Primitive::ControlledZ { control, target } => {
                    controlled(control, target, Pauli::Z, n)?
                }
                Primitive::Free(t) => propagator(&internal_hamiltonian(sys), t)?,
            };
            u = &step * &u;
        }
    }
    Ok(u)
}
