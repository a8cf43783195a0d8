use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::graph::Graph;
use crate::magic_state::ThetaAssignment;

use super::hamiltonian;
use super::OracleError;

pub type Op1 = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const X: Op1 = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
pub const Y: Op1 = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
pub const Z: Op1 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
/// (X − Y)/√2
pub const P: Op1 = [
    [c(0.0, 0.0), c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)],
    [c(FRAC_1_SQRT_2, -FRAC_1_SQRT_2), c(0.0, 0.0)],
];
/// (X + Y)/√2
pub const Q: Op1 = [
    [c(0.0, 0.0), c(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)],
    [c(FRAC_1_SQRT_2, FRAC_1_SQRT_2), c(0.0, 0.0)],
];

/// Dense `2^n` state; qubit `q` is bit `q` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { qubits, amps }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `exp(iθ P_i P_j) = cos θ · I + i sin θ · P_i P_j`.
    pub fn apply_pp(&mut self, i: usize, j: usize, theta: f64) {
        let (cs, sn) = (theta.cos(), theta.sin());
        let mask = (1usize << i) | (1usize << j);
        let phase = |x: usize| -> Complex64 {
            // Matrix element ⟨x ⊕ mask| P_i P_j |x⟩ = p(x_i) p(x_j) with
            // p(0) = e^{−iπ/4}, p(1) = e^{+iπ/4}.
            let bits = ((x >> i) & 1) + ((x >> j) & 1);
            match bits {
                0 => Complex64::new(0.0, -1.0),
                2 => Complex64::new(0.0, 1.0),
                _ => Complex64::new(1.0, 0.0),
            }
        };
        let isn = Complex64::new(0.0, sn);
        for x in 0..self.amps.len() {
            let y = x ^ mask;
            if x > y {
                continue;
            }
            let (ax, ay) = (self.amps[x], self.amps[y]);
            self.amps[x] = ax * cs + isn * phase(y) * ay;
            self.amps[y] = ay * cs + isn * phase(x) * ax;
        }
    }

    /// `⟨ψ| A_i B_j |ψ⟩`.
    pub fn expect_pair(&self, a: &Op1, i: usize, b: &Op1, j: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let (xi, xj) = ((x >> i) & 1, (x >> j) & 1);
            for (yi, row_a) in a.iter().enumerate() {
                for (yj, row_b) in b.iter().enumerate() {
                    let coeff = row_a[xi] * row_b[xj];
                    if coeff.norm_sqr() == 0.0 {
                        continue;
                    }
                    let y = (x & !(1 << i) & !(1 << j)) | (yi << i) | (yj << j);
                    acc += self.amps[y].conj() * coeff * amp;
                }
            }
        }
        acc
    }

    /// `|⟨ψ|φ⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// `⟨ψ|H^EPR|ψ⟩`.
    pub fn epr_energy(&self, g: &Graph) -> f64 {
        let mut h = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        hamiltonian::apply(g, &self.amps, &mut h);
        self.amps
            .iter()
            .zip(&h)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// Applies every edge gate of `|χ⟩` in the given edge order.
pub fn build_chi_ordered(
    g: &Graph,
    thetas: &ThetaAssignment,
    order: &[usize],
    qubit_cap: usize,
) -> Result<StateVector, OracleError> {
    let n = g.vertex_count();
    if n > qubit_cap {
        return Err(OracleError::TooManyQubits { n, cap: qubit_cap });
    }
    let mut psi = StateVector::zero(n);
    for &e in order {
        let edge = g.edge(e);
        psi.apply_pp(edge.u, edge.v, thetas.theta(e));
    }
    Ok(psi)
}

/// `|χ⟩ = Π_e exp(iθ_e P_u P_v)|0…0⟩`.
pub fn build_chi(
    g: &Graph,
    thetas: &ThetaAssignment,
    qubit_cap: usize,
) -> Result<StateVector, OracleError> {
    let order: Vec<usize> = (0..g.edge_count()).collect();
    build_chi_ordered(g, thetas, &order, qubit_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use std::f64::consts::FRAC_PI_4;

    fn mat_eq(a: &Op1, b: &Op1) -> bool {
        (0..2).all(|r| (0..2).all(|c| (a[r][c] - b[r][c]).norm() < 1e-15))
    }

    #[test]
    fn p_and_q_are_rotated_paulis() {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mut p = [[Complex64::new(0.0, 0.0); 2]; 2];
        let mut q = p;
        for r in 0..2 {
            for col in 0..2 {
                p[r][col] = (X[r][col] - Y[r][col]) * s;
                q[r][col] = (X[r][col] + Y[r][col]) * s;
            }
        }
        assert!(mat_eq(&p, &P));
        assert!(mat_eq(&q, &Q));
    }

    #[test]
    fn gate_matches_explicit_rotation() {
        // cos θ |00⟩ + i sin θ P⊗P|00⟩, with P|0⟩ = e^{−iπ/4}|1⟩.
        let mut psi = StateVector::zero(2);
        let t = 0.3f64;
        psi.apply_pp(0, 1, t);
        let want = Complex64::new(0.0, t.sin()) * Complex64::new(0.0, -1.0);
        assert!((psi.amplitudes()[0] - Complex64::new(t.cos(), 0.0)).norm() < 1e-15);
        assert!((psi.amplitudes()[3] - want).norm() < 1e-15);
        assert!((psi.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_graph_is_all_zeros() {
        let g = Graph::unweighted(3, &[]).unwrap();
        let th = ThetaAssignment::from_angles(&g, vec![]).unwrap();
        assert_eq!(build_chi(&g, &th, 20).unwrap(), StateVector::zero(3));
    }

    #[test]
    fn single_edge_quarter_turn_is_bell_like() {
        let g = generators::path(2);
        let th = ThetaAssignment::from_angles(&g, vec![FRAC_PI_4]).unwrap();
        let psi = build_chi(&g, &th, 20).unwrap();
        assert!((psi.epr_energy(&g) - 2.0).abs() < 1e-14);
        assert!((psi.expect_pair(&Q, 0, &P, 1).re - 1.0).abs() < 1e-14);
        assert!((psi.expect_pair(&Z, 0, &Z, 1).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn qubit_cap_is_enforced() {
        let g = generators::path(5);
        let th = ThetaAssignment::from_angles(&g, vec![0.1; 4]).unwrap();
        assert_eq!(
            build_chi(&g, &th, 4).unwrap_err(),
            OracleError::TooManyQubits { n: 5, cap: 4 }
        );
    }
}
