//! The EPR Hamiltonian `Σ_e w_e ½(II + XX + ZZ − YY)` in the computational
//! basis.
//!
//! Per edge the term is `½(1 + Z_u Z_v) + (|00⟩⟨11| + |11⟩⟨00|)`: weight `w`
//! on the diagonal where the two bits agree, plus a hop flipping both bits.
//! All entries are real and non-negative, and every hop preserves the parity
//! of the Hamming weight, so the matrix splits into two parity sectors.

use std::ops::{AddAssign, Mul};

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::graph::Graph;

/// `out = H v`.
pub fn apply<T>(g: &Graph, v: &[T], out: &mut [T])
where
    T: Copy + Zero + AddAssign + Mul<f64, Output = T>,
{
    out.iter_mut().for_each(|o| *o = T::zero());
    for (id, e) in g.edges().iter().enumerate() {
        let w = g.weight_f64(id);
        let mask = (1usize << e.u) | (1usize << e.v);
        for x in 0..v.len() {
            if ((x >> e.u) ^ (x >> e.v)) & 1 == 0 {
                out[x] += (v[x] + v[x ^ mask]) * w;
            }
        }
    }
}

/// Full `2^n × 2^n` matrix.
pub fn dense(g: &Graph) -> DMatrix<f64> {
    let dim = 1usize << g.vertex_count();
    let mut m = DMatrix::zeros(dim, dim);
    for (id, e) in g.edges().iter().enumerate() {
        let w = g.weight_f64(id);
        let mask = (1usize << e.u) | (1usize << e.v);
        for x in 0..dim {
            if ((x >> e.u) ^ (x >> e.v)) & 1 == 0 {
                m[(x, x)] += w;
                m[(x ^ mask, x)] += w;
            }
        }
    }
    m
}

/// Basis states of one Hamming-weight parity, in ascending order.
pub fn sector_states(qubits: usize, odd: bool) -> Vec<usize> {
    (0..1usize << qubits)
        .filter(|x| (x.count_ones() % 2 == 1) == odd)
        .collect()
}

/// The Hamiltonian restricted to `states` (which must be closed under hops).
pub fn sector(g: &Graph, states: &[usize]) -> DMatrix<f64> {
    let mut index = vec![usize::MAX; 1usize << g.vertex_count()];
    for (k, &x) in states.iter().enumerate() {
        index[x] = k;
    }
    let dim = states.len();
    let mut m = DMatrix::zeros(dim, dim);
    for (id, e) in g.edges().iter().enumerate() {
        let w = g.weight_f64(id);
        let mask = (1usize << e.u) | (1usize << e.v);
        for (k, &x) in states.iter().enumerate() {
            if ((x >> e.u) ^ (x >> e.v)) & 1 == 0 {
                m[(k, k)] += w;
                m[(index[x ^ mask], k)] += w;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn single_edge_spectrum() {
        let g = generators::path(2);
        let m = dense(&g);
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let want = [0.0, 0.0, 0.0, 2.0];
        for (a, b) in eig.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_is_symmetric_and_matches_apply() {
        let g = generators::complete(4);
        let m = dense(&g);
        assert_eq!(m, m.transpose());
        let v: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut out = vec![0.0; 16];
        apply(&g, &v, &mut out);
        let want = &m * nalgebra::DVector::from_vec(v);
        for (a, b) in out.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sectors_partition_the_spectrum() {
        let g = generators::cycle(4);
        let mut full: Vec<f64> = dense(&g).symmetric_eigenvalues().iter().copied().collect();
        let mut parts = Vec::new();
        for odd in [false, true] {
            let s = sector_states(4, odd);
            parts.extend(sector(&g, &s).symmetric_eigenvalues().iter().copied());
        }
        full.sort_by(f64::total_cmp);
        parts.sort_by(f64::total_cmp);
        for (a, b) in full.iter().zip(&parts) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
