//! Pauli-product algebra, spin-system parameters, the internal Hamiltonian and
//! unitary propagators.
//!
//! Qubit 1 is the most significant bit of the computational basis index, so
//! `|q1 q2 q3⟩` has index `4·q1 + 2·q2 + q3`. Hamiltonians are in rad/s while
//! all public parameters are in Hz and seconds.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

const HERMITIAN_TOL: f64 = 1e-10;

/// A square complex matrix on the Hilbert space of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: Array2<C64>,
}

impl Operator {
    pub fn from_array(mat: Array2<C64>) -> Result<Self> {
        let (r, c) = mat.dim();
        if r != c {
            return Err(Error::DimensionMismatch(format!(
                "operator is {r}×{c}, not square"
            )));
        }
        if !r.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "operator dimension {r} is not a power of two"
            )));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_array_unchecked(mat: Array2<C64>) -> Self {
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: linalg::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: Array2::zeros((dim, dim)),
        }
    }

    /// The projector `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &Array1<C64>) -> Result<Self> {
        let n = psi.len();
        let mut mat = Array2::zeros((n, n));
        linalg::outer_accumulate(&mut mat, psi, psi, 1.0);
        Self::from_array(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_array(self) -> Array2<C64> {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        Self {
            mat: linalg::dagger(&self.mat),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            mat: self.mat.mapv(|x| x.conj()),
        }
    }

    pub fn kron(&self, other: &Operator) -> Self {
        Self {
            mat: linalg::kron(&self.mat, &other.mat),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            mat: self.mat.mapv(|x| x * c),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius(&self.mat)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::frobenius(&(&self.mat - &linalg::dagger(&self.mat)))
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = linalg::dagger(&self.mat).dot(&self.mat);
        linalg::frobenius(&(p - linalg::identity(self.dim())))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn pow(&self, n: usize) -> Self {
        Self {
            mat: linalg::matrix_power(&self.mat, n),
        }
    }

    /// Distance to `other` after removing the best global phase.
    pub fn phase_insensitive_distance(&self, other: &Operator) -> f64 {
        let overlap = linalg::dagger(&other.mat).dot(&self.mat).diag().sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        linalg::frobenius(&(&self.mat - &other.mat.mapv(|x| x * phase)))
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            mat: self.mat.dot(&rhs.mat),
        }
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Array2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let v = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        Array2::from_shape_vec((2, 2), v.to_vec()).expect("2×2")
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis, qubit 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliLabel(Vec<Pauli>);

impl PauliLabel {
    pub fn new(factors: Vec<Pauli>) -> Self {
        Self(factors)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self(vec![Pauli::I; n_qubits])
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|p| *p == Pauli::I)
    }

    /// All `4^n` labels in base-4 order (I, X, Y, Z), qubit 1 most significant.
    pub fn all(n_qubits: usize) -> Vec<PauliLabel> {
        (0..4usize.pow(n_qubits as u32))
            .map(|mut idx| {
                let mut f = vec![Pauli::I; n_qubits];
                for q in (0..n_qubits).rev() {
                    f[q] = Pauli::ALL[idx % 4];
                    idx /= 4;
                }
                PauliLabel(f)
            })
            .collect()
    }
}

impl FromStr for PauliLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidPauliSymbol(c)),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliLabel)
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

pub fn pauli_product(label: &PauliLabel) -> Operator {
    let mut mat = linalg::identity(1);
    for p in label.factors() {
        mat = linalg::kron(&mat, &p.matrix());
    }
    Operator::from_array_unchecked(mat)
}

/// Places a single-qubit matrix on `qubit` (1-based) of an `n`-qubit register.
pub fn embed(single: &Array2<C64>, qubit: usize, n_qubits: usize) -> Result<Operator> {
    if qubit == 0 || qubit > n_qubits {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            n_qubits,
        });
    }
    let mut mat = linalg::identity(1);
    for q in 1..=n_qubits {
        let factor = if q == qubit {
            single.clone()
        } else {
            linalg::identity(2)
        };
        mat = linalg::kron(&mat, &factor);
    }
    Ok(Operator::from_array_unchecked(mat))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    n_qubits: usize,
    frequencies: Vec<f64>,
    couplings: Array2<f64>,
    t1: Vec<f64>,
    t2: Vec<f64>,
}

impl SpinSystem {
    pub fn new(
        frequencies: Vec<f64>,
        couplings: Array2<f64>,
        t1: Vec<f64>,
        t2: Vec<f64>,
    ) -> Result<Self> {
        let n = frequencies.len();
        if n == 0 {
            return Err(Error::InvalidSpinSystem(
                "at least one spin is required".into(),
            ));
        }
        if couplings.dim() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "{n} frequencies but a {:?} coupling matrix",
                couplings.dim()
            )));
        }
        if t1.len() != n || t2.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} frequencies but {} T1 and {} T2 values",
                t1.len(),
                t2.len()
            )));
        }
        if let Some(f) = frequencies.iter().find(|f| !f.is_finite()) {
            return Err(Error::InvalidSpinSystem(format!(
                "frequency {f} is not finite"
            )));
        }
        for j in 0..n {
            if couplings[[j, j]] != 0.0 {
                return Err(Error::InvalidSpinSystem(format!(
                    "J{0}{0} must be zero",
                    j + 1
                )));
            }
            for k in 0..n {
                let v = couplings[[j, k]];
                if !v.is_finite() || v != couplings[[k, j]] {
                    return Err(Error::InvalidSpinSystem(format!(
                        "coupling matrix must be finite and symmetric (J{}{})",
                        j + 1,
                        k + 1
                    )));
                }
            }
            let (a, b) = (t1[j], t2[j]);
            if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidSpinSystem(format!(
                    "T1 and T2 of spin {} must be positive",
                    j + 1
                )));
            }
            if b > 2.0 * a {
                return Err(Error::InvalidSpinSystem(format!(
                    "T2 > 2·T1 for spin {}",
                    j + 1
                )));
            }
        }
        Ok(Self {
            n_qubits: n,
            frequencies,
            couplings,
            t1,
            t2,
        })
    }

    /// Hydrogen on qubit 1, two coupled carbons on qubits 2 and 3.
    pub fn default_three_spin() -> Self {
        let couplings =
            ndarray::arr2(&[[0.0, 235.7, 42.9], [235.7, 0.0, 132.6], [42.9, 132.6, 0.0]]);
        Self::new(
            vec![0.0, 600.5, -600.5],
            couplings,
            vec![10.4, 3.0, 3.0],
            vec![3.0, 1.5, 1.5],
        )
        .expect("default spin system is valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn couplings(&self) -> &Array2<f64> {
        &self.couplings
    }

    /// `J` between 1-based qubits `j` and `k`.
    pub fn coupling(&self, j: usize, k: usize) -> f64 {
        self.couplings[[j - 1, k - 1]]
    }

    pub fn t1(&self) -> &[f64] {
        &self.t1
    }

    pub fn t2(&self) -> &[f64] {
        &self.t2
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }
}

fn two_site(n: usize, j: usize, k: usize, p: Pauli) -> Operator {
    let mut f = vec![Pauli::I; n];
    f[j] = p;
    f[k] = p;
    pauli_product(&PauliLabel(f))
}

pub fn internal_hamiltonian(sys: &SpinSystem) -> Operator {
    use std::f64::consts::PI;
    let n = sys.n_qubits();
    let mut h = Operator::zeros(sys.dim());
    for j in 0..n {
        let mut f = vec![Pauli::I; n];
        f[j] = Pauli::Z;
        let zj = pauli_product(&PauliLabel(f));
        h = &h + &zj.scale(C64::new(PI * sys.frequencies[j], 0.0));
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let jjk = sys.couplings[[j, k]];
            if jjk == 0.0 {
                continue;
            }
            let c = C64::new(PI * jjk / 2.0, 0.0);
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                h = &h + &two_site(n, j, k, p).scale(c);
            }
        }
    }
    h
}

/// `exp(−i·h·t)` for Hermitian `h` and `t ≥ 0`.
pub fn propagator(h: &Operator, t: f64) -> Result<Operator> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL * (1.0 + h.frobenius_norm()) {
        return Err(Error::NotHermitian(defect));
    }
    if t == 0.0 {
        return Ok(Operator::identity(h.dim()));
    }
    let a = h.as_array().mapv(|x| x * C64::new(0.0, -t));
    Ok(Operator::from_array_unchecked(linalg::expm(&a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_parsing_round_trips() {
        let l: PauliLabel = "IXyZ".parse().unwrap();
        assert_eq!(l.to_string(), "IXYZ");
        assert_eq!(
            "IQ".parse::<PauliLabel>(),
            Err(Error::InvalidPauliSymbol('Q'))
        );
    }

    #[test]
    fn qubit_one_is_most_significant() {
        let z1 = pauli_product(&"ZII".parse().unwrap());
        let d: Vec<f64> = z1.as_array().diag().iter().map(|x| x.re).collect();
        assert_eq!(d, vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn label_enumeration_order() {
        let all = PauliLabel::all(2);
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].to_string(), "II");
        assert_eq!(all[1].to_string(), "IX");
        assert_eq!(all[4].to_string(), "XI");
        assert_eq!(all[15].to_string(), "ZZ");
    }

    #[test]
    fn zero_time_gives_identity() {
        let h = internal_hamiltonian(&SpinSystem::default_three_spin());
        assert_eq!(propagator(&h, 0.0).unwrap(), Operator::identity(8));
    }

    #[test]
    fn diagonal_exponential() {
        let h =
            pauli_product(&"Z".parse().unwrap()).scale(C64::new(std::f64::consts::FRAC_PI_2, 0.0));
        let u = propagator(&h, 1.0).unwrap();
        let a = u.as_array();
        assert!((a[[0, 0]] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((a[[1, 1]] - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!(a[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_and_negative_time() {
        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 1]] = C64::new(1.0, 0.0);
        let h = Operator::from_array(m).unwrap();
        assert!(matches!(propagator(&h, 1.0), Err(Error::NotHermitian(_))));
        let z = pauli_product(&"Z".parse().unwrap());
        assert!(matches!(propagator(&z, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn operator_shape_checks() {
        assert!(Operator::from_array(Array2::zeros((3, 3))).is_err());
        assert!(Operator::from_array(Array2::zeros((2, 4))).is_err());
    }

    #[test]
    fn spin_system_validation() {
        let ok = SpinSystem::default_three_spin();
        assert_eq!(ok.coupling(2, 3), 132.6);
        let c = ndarray::arr2(&[[0.0, 1.0], [2.0, 0.0]]);
        assert!(SpinSystem::new(vec![0.0, 0.0], c, vec![1.0; 2], vec![1.0; 2]).is_err());
        let c = Array2::zeros((3, 3));
        assert!(matches!(
            SpinSystem::new(vec![0.0, 0.0], c, vec![1.0; 2], vec![1.0; 2]),
            Err(Error::DimensionMismatch(_))
        ));
        let c = Array2::zeros((1, 1));
        assert!(SpinSystem::new(vec![0.0], c.clone(), vec![1.0], vec![2.5]).is_err());
        assert!(SpinSystem::new(vec![f64::NAN], c, vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn hamiltonian_is_hermitian_and_traceless() {
        let h = internal_hamiltonian(&SpinSystem::default_three_spin());
        assert!(h.is_hermitian(1e-12));
        assert!(h.trace().norm() < 1e-9);
    }

    #[test]
    fn isotropic_coupling_eigenvalues() {
        let c = ndarray::arr2(&[[0.0, 10.0], [10.0, 0.0]]);
        let sys = SpinSystem::new(vec![0.0, 0.0], c, vec![1.0; 2], vec![1.0; 2]).unwrap();
        let h = internal_hamiltonian(&sys);
        // Singlet at −3πJ/2, triplet at +πJ/2.
        let pi = std::f64::consts::PI;
        let singlet = Array1::from(vec![
            C64::new(0.0, 0.0),
            C64::new(1.0 / 2f64.sqrt(), 0.0),
            C64::new(-1.0 / 2f64.sqrt(), 0.0),
            C64::new(0.0, 0.0),
        ]);
        let hs = h.as_array().dot(&singlet);
        for (a, b) in hs.iter().zip(singlet.iter()) {
            assert!((a - b * (-1.5 * pi * 10.0)).norm() < 1e-12);
        }
        assert!((h.as_array()[[0, 0]].re - 0.5 * pi * 10.0).abs() < 1e-12);
    }
}
