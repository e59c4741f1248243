//! Brute-force reference implementations that share no code with the library:
//! density matrices are propagated directly as `U ρ U†` and relaxation is
//! applied by expanding in Pauli coefficients.

#![allow(dead_code)]

use ndarray::{arr2, Array1, Array2};
use num_complex::Complex64 as C64;

pub type Mat = Array2<C64>;

pub fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> Mat {
    Array2::from_shape_fn(
        (n, n),
        |(i, j)| if i == j { cx(1.0, 0.0) } else { cx(0.0, 0.0) },
    )
}

pub fn pauli(c: char) -> Mat {
    let o = cx(0.0, 0.0);
    let l = cx(1.0, 0.0);
    let i = cx(0.0, 1.0);
    match c {
        'I' => arr2(&[[l, o], [o, l]]),
        'X' => arr2(&[[o, l], [l, o]]),
        'Y' => arr2(&[[o, -i], [i, o]]),
        'Z' => arr2(&[[l, o], [o, -l]]),
        _ => panic!("bad symbol"),
    }
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[[i / br, j / bc]] * b[[i % br, j % bc]]
    })
}

pub fn string(label: &str) -> Mat {
    label.chars().fold(eye(1), |acc, c| kron(&acc, &pauli(c)))
}

pub fn on(q: usize, m: &Mat) -> Mat {
    (1..=3).fold(eye(1), |acc, k| {
        kron(&acc, &if k == q { m.clone() } else { eye(2) })
    })
}

pub fn dag(a: &Mat) -> Mat {
    a.t().mapv(|x| x.conj())
}

pub fn rot(axis: char, angle: f64) -> Mat {
    eye(2).mapv(|x| x * (angle / 2.0).cos())
        - pauli(axis).mapv(|x| x * cx(0.0, (angle / 2.0).sin()))
}

pub fn hadamard(q: usize) -> Mat {
    let h = (pauli('Z') + pauli('X')).mapv(|x| x / 2f64.sqrt());
    on(q, &h)
}

/// Computational-basis permutation matrix of CNOT, qubit 1 most significant.
pub fn cnot(c: usize, t: usize) -> Mat {
    let mut m = Array2::zeros((8, 8));
    for b in 0..8usize {
        let cbit = (b >> (3 - c)) & 1;
        let out = if cbit == 1 { b ^ (1 << (3 - t)) } else { b };
        m[[out, b]] = cx(1.0, 0.0);
    }
    m
}

pub fn cz(c: usize, t: usize) -> Mat {
    Array2::from_shape_fn((8, 8), |(i, j)| {
        if i != j {
            cx(0.0, 0.0)
        } else if (i >> (3 - c)) & 1 == 1 && (i >> (3 - t)) & 1 == 1 {
            cx(-1.0, 0.0)
        } else {
            cx(1.0, 0.0)
        }
    })
}

/// Member entangler: control Hadamard as Ry(π/2)·Rz(π), CNOT as H'·CZ·H' with
/// H' = Ry(−π/2)·Rx(π); carbon pulse angles scaled by `z`.
pub fn member_entangler(z: f64) -> Mat {
    use std::f64::consts::{FRAC_PI_2, PI};
    let h2 = on(2, &rot('Y', z * FRAC_PI_2).dot(&rot('Z', PI)));
    let ht = on(3, &rot('Y', -z * FRAC_PI_2).dot(&rot('X', z * PI)));
    ht.dot(&cz(2, 3)).dot(&ht).dot(&h2)
}

pub fn ideal_entangler() -> Mat {
    cnot(2, 3).dot(&hadamard(2))
}

pub fn prep() -> Mat {
    cnot(2, 3).dot(&cnot(1, 2)).dot(&hadamard(1))
}

pub fn readout() -> Mat {
    dag(&prep())
}

pub fn conj(u: &Mat, rho: &Mat) -> Mat {
    u.dot(rho).dot(&dag(u))
}

pub fn basis(index: usize) -> Mat {
    let mut m = Array2::zeros((8, 8));
    m[[index, index]] = cx(1.0, 0.0);
    m
}

pub fn trace(a: &Mat) -> C64 {
    a.diag().sum()
}

/// Additive per-spin rates for a label.
pub fn label_rate(label: &str, t1: &[f64], t2: &[f64]) -> f64 {
    label
        .chars()
        .enumerate()
        .map(|(j, c)| match c {
            'X' | 'Y' => 1.0 / t2[j],
            'Z' => 1.0 / t1[j],
            _ => 0.0,
        })
        .sum()
}

pub fn all_labels(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|p| "IXYZ".chars().map(move |c| format!("{p}{c}")))
            .collect();
    }
    out
}

/// Decays each Pauli coefficient of `rho` by `exp(−r t)`.
pub fn relax(rho: &Mat, t: f64, t1: &[f64], t2: &[f64]) -> Mat {
    let mut out = Array2::zeros((8, 8));
    for l in all_labels(3) {
        let p = string(&l);
        let coeff = trace(&p.dot(rho)) / 8.0;
        out = out + p.mapv(|x| x * coeff * (-label_rate(&l, t1, t2) * t).exp());
    }
    out
}

pub fn fro(a: &Mat) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn components(rho: &Mat) -> [f64; 4] {
    let mut c = [0.0; 4];
    for (i, l) in ["ZII", "ZZI", "ZIZ", "ZZZ"].iter().enumerate() {
        c[i] = trace(&string(l).dot(rho)).re / 8.0;
    }
    c
}

pub struct OracleRun {
    pub fidelity: Vec<f64>,
    pub components: Vec<[f64; 4]>,
}

pub struct Relax<'a> {
    pub t: f64,
    pub t1: &'a [f64],
    pub t2: &'a [f64],
}

fn step(u: &Mat, rho: &Mat, r: &Option<Relax>) -> Mat {
    let s = conj(u, rho);
    match r {
        Some(r) => relax(&s, r.t, r.t1, r.t2),
        None => s,
    }
}

fn record(rho_after: &Mat, n: usize, run: &mut OracleRun) {
    let out = conj(&readout(), rho_after);
    let target = n % 2;
    run.fidelity.push(out[[target, target]].re);
    run.components.push(components(&out));
}

/// Each member keeps its own `z` for the whole run.
pub fn incoherent(points: &[f64], weights: &[f64], n_max: usize, r: Option<Relax>) -> OracleRun {
    let start = conj(&prep(), &basis(0));
    let mut per_member: Vec<Vec<Mat>> = Vec::new();
    for &z in points {
        let u = member_entangler(z);
        let mut rho = start.clone();
        let mut traj = Vec::new();
        for n in 0..=n_max {
            traj.push(rho.clone());
            if n < n_max {
                for _ in 0..4 {
                    rho = step(&u, &rho, &r);
                }
            }
        }
        per_member.push(traj);
    }
    let mut run = OracleRun {
        fidelity: vec![],
        components: vec![],
    };
    for n in 0..=n_max {
        let mut avg: Mat = Array2::zeros((8, 8));
        for (traj, w) in per_member.iter().zip(weights) {
            avg = avg + traj[n].mapv(|x| x * *w);
        }
        record(&avg, n, &mut run);
    }
    run
}

/// The ensemble is re-averaged after every iteration.
pub fn decoherent(points: &[f64], weights: &[f64], n_max: usize, r: Option<Relax>) -> OracleRun {
    let us: Vec<Mat> = points.iter().map(|z| member_entangler(*z)).collect();
    let mut rho = conj(&prep(), &basis(0));
    let mut run = OracleRun {
        fidelity: vec![],
        components: vec![],
    };
    for n in 0..=n_max {
        record(&rho, n, &mut run);
        if n < n_max {
            for _ in 0..4 {
                let mut next: Mat = Array2::zeros((8, 8));
                for (u, w) in us.iter().zip(weights) {
                    next = next + step(u, &rho, &r).mapv(|x| x * *w);
                }
                rho = next;
            }
        }
    }
    run
}

pub fn state_vector(index: usize) -> Array1<C64> {
    Array1::from_shape_fn(8, |i| {
        if i == index {
            cx(1.0, 0.0)
        } else {
            cx(0.0, 0.0)
        }
    })
}
