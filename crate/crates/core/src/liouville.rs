//! Liouville-space representation of density matrices and channels.
//!
//! Density matrices are vectorized by stacking columns, `vec(ρ)[i + N·j] = ρ[i, j]`,
//! so that `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)` and a unitary acts as `conj(U) ⊗ U`.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spincore::{pauli_product, Operator, Pauli, PauliLabel, SpinSystem};

const UNITARITY_TOL: f64 = 1e-10;
const WEIGHT_SUM_TOL: f64 = 1e-12;
const FIDELITY_IMAG_TOL: f64 = 1e-10;

/// A vectorized density matrix of Hilbert dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVecL {
    dim: usize,
    data: Array1<C64>,
}

impl StateVecL {
    pub fn from_array(data: Array1<C64>) -> Result<Self> {
        let len = data.len();
        let dim = (len as f64).sqrt().round() as usize;
        if dim * dim != len || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "vector length {len} is not the square of a power of two"
            )));
        }
        Ok(Self { dim, data })
    }

    /// `|b⟩⟨b|` for computational basis index `index`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let dim = 1 << n_qubits;
        let mut data = Array1::zeros(dim * dim);
        data[index + dim * index] = C64::new(1.0, 0.0);
        Self { dim, data }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        vectorize(
            &Operator::identity(1 << n_qubits).scale(C64::new(1.0 / (1 << n_qubits) as f64, 0.0)),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_array(&self) -> &Array1<C64> {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * (self.dim + 1)]).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.mapv(|x| x * c),
        }
    }

    pub fn axpy(&mut self, c: f64, other: &StateVecL) {
        self.data.scaled_add(C64::new(c, 0.0), &other.data);
    }

    pub fn distance(&self, other: &StateVecL) -> f64 {
        (&self.data - &other.data)
            .iter()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn vectorize(rho: &Operator) -> StateVecL {
    let n = rho.dim();
    let a = rho.as_array();
    let data = Array1::from_shape_fn(n * n, |k| a[[k % n, k / n]]);
    StateVecL { dim: n, data }
}

pub fn devectorize(v: &StateVecL) -> Operator {
    let n = v.dim;
    Operator::from_array_unchecked(Array2::from_shape_fn((n, n), |(i, j)| v.data[i + n * j]))
}

/// A linear map on vectorized density matrices of Hilbert dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: Array2<C64>,
}

impl Superoperator {
    pub fn from_array(mat: Array2<C64>) -> Result<Self> {
        let (r, c) = mat.dim();
        let dim = (r as f64).sqrt().round() as usize;
        if r != c || dim * dim != r || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "{r}×{c} is not a valid superoperator shape"
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            mat: linalg::identity(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn apply(&self, v: &StateVecL) -> StateVecL {
        assert_eq!(self.dim, v.dim, "superoperator and state dimensions differ");
        StateVecL {
            dim: self.dim,
            data: self.mat.dot(&v.data),
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, first.dim, "superoperator dimensions differ");
        Superoperator {
            dim: self.dim,
            mat: self.mat.dot(&first.mat),
        }
    }

    pub fn pow(&self, n: usize) -> Superoperator {
        Superoperator {
            dim: self.dim,
            mat: linalg::matrix_power(&self.mat, n),
        }
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Superoperator) -> f64 {
        linalg::frobenius(&(&self.mat - &other.mat))
    }

    pub fn distance_to_identity(&self) -> f64 {
        self.distance(&Superoperator::identity(self.dim))
    }
}

pub fn unitary_to_superop(u: &Operator) -> Result<Superoperator> {
    let defect = u.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok(Superoperator {
        dim: u.dim(),
        mat: u.conj().kron(u).into_array(),
    })
}

pub fn mix_channels(channels: &[Superoperator], weights: &[f64]) -> Result<Superoperator> {
    if channels.is_empty() || channels.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} channels for {} weights",
            channels.len(),
            weights.len()
        )));
    }
    check_weights(weights).map_err(Error::InvalidWeights)?;
    let dim = channels[0].dim;
    if channels.iter().any(|c| c.dim != dim) {
        return Err(Error::DimensionMismatch(
            "channels have different dimensions".into(),
        ));
    }
    let mut mat = Array2::zeros(channels[0].mat.dim());
    for (c, w) in channels.iter().zip(weights) {
        mat.scaled_add(C64::new(*w, 0.0), &c.mat);
    }
    Ok(Superoperator { dim, mat })
}

pub(crate) fn check_weights(weights: &[f64]) -> std::result::Result<(), String> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(format!("weight {w} is negative or not finite"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(format!("weights sum to {sum}, not 1"));
    }
    Ok(())
}

/// Decay rates (1/s) indexed by Pauli label in [`PauliLabel::all`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationRates {
    n_qubits: usize,
    rates: Vec<f64>,
}

impl RelaxationRates {
    pub fn new(n_qubits: usize, rates: Vec<f64>) -> Result<Self> {
        if rates.len() != 4usize.pow(n_qubits as u32) {
            return Err(Error::InvalidRates(format!(
                "{} rates for {n_qubits} qubits; expected {}",
                rates.len(),
                4usize.pow(n_qubits as u32)
            )));
        }
        if rates[0] != 0.0 {
            return Err(Error::InvalidRates(
                "identity rate must be exactly zero".into(),
            ));
        }
        if let Some(r) = rates.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidRates(format!(
                "rate {r} is negative or not finite"
            )));
        }
        Ok(Self { n_qubits, rates })
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            rates: vec![0.0; 4usize.pow(n_qubits as u32)],
        }
    }

    /// Sum of single-spin rates: 1/T2 for X or Y, 1/T1 for Z, 0 for I.
    pub fn additive(sys: &SpinSystem) -> Self {
        let rates = PauliLabel::all(sys.n_qubits())
            .iter()
            .map(|l| {
                l.factors()
                    .iter()
                    .enumerate()
                    .map(|(j, p)| match p {
                        Pauli::I => 0.0,
                        Pauli::X | Pauli::Y => 1.0 / sys.t2()[j],
                        Pauli::Z => 1.0 / sys.t1()[j],
                    })
                    .sum()
            })
            .collect();
        Self {
            n_qubits: sys.n_qubits(),
            rates,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn rate(&self, label: &PauliLabel) -> f64 {
        self.rates[label_index(label)]
    }

    pub fn set_rate(&mut self, label: &PauliLabel, rate: f64) -> Result<()> {
        if label.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "label {label} for {} qubits",
                self.n_qubits
            )));
        }
        if label.is_identity() && rate != 0.0 {
            return Err(Error::InvalidRates(
                "identity rate must be exactly zero".into(),
            ));
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidRates(format!(
                "rate {rate} is negative or not finite"
            )));
        }
        self.rates[label_index(label)] = rate;
        Ok(())
    }
}

fn label_index(label: &PauliLabel) -> usize {
    label.factors().iter().fold(0, |acc, p| {
        acc * 4
            + match p {
                Pauli::I => 0,
                Pauli::X => 1,
                Pauli::Y => 2,
                Pauli::Z => 3,
            }
    })
}

/// `Σ_a exp(−r_a t) |P_a⟩⟩⟨⟨P_a| / N` in the computational vectorized basis.
pub fn relaxation_superop(rates: &RelaxationRates, t: f64) -> Result<Superoperator> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let n = rates.n_qubits;
    let dim = 1usize << n;
    let mut mat = Array2::zeros((dim * dim, dim * dim));
    for (label, r) in PauliLabel::all(n).iter().zip(&rates.rates) {
        let v = vectorize(&pauli_product(label)).data;
        linalg::outer_accumulate(&mut mat, &v, &v, (-r * t).exp() / dim as f64);
    }
    Ok(Superoperator { dim, mat })
}

/// `tr(a† b)` of the devectorized states.
pub fn fidelity(a: &StateVecL, b: &StateVecL) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            a.dim, b.dim
        )));
    }
    let f: C64 = a
        .data
        .iter()
        .zip(b.data.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    if f.im.abs() > FIDELITY_IMAG_TOL {
        return Err(Error::ComplexFidelity(f.im));
    }
    Ok(f.re)
}

pub fn purity(a: &StateVecL) -> Result<f64> {
    fidelity(a, a)
}
