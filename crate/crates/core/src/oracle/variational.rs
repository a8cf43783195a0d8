//! Brute-force maximization of the magic-state energy over all edge angles.
//!
//! Each sweep updates one angle at a time exactly: with the other gates
//! fixed the energy is `A + B cos 2θ + C sin 2θ`, so three evaluations pin
//! down the sinusoid and its maximum over `[0, π/4]` is taken in closed form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::Graph;
use crate::magic_state::ThetaAssignment;

use super::spectrum::{epr_lambda_max, SpectrumOptions};
use super::statevector::build_chi;
use super::OracleError;

#[derive(Debug, Clone, Copy)]
pub struct VariationalOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Stop a restart once a sweep gains less than this.
    pub tol: f64,
    pub qubit_cap: usize,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            max_sweeps: 400,
            tol: 1e-13,
            qubit_cap: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartRecord {
    pub energy: f64,
    pub ratio: f64,
    pub sweeps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationalResult {
    pub thetas: Vec<f64>,
    pub energy: f64,
    pub lambda_max: f64,
    pub ratio: f64,
    pub restarts: Vec<RestartRecord>,
}

fn energy_at(g: &Graph, thetas: &[f64], cap: usize) -> Result<f64, OracleError> {
    let th = ThetaAssignment::from_angles(g, thetas.to_vec())?;
    Ok(build_chi(g, &th, cap)?.epr_energy(g))
}

// argmax of B cos φ + C sin φ over φ ∈ [0, π/2]
fn best_phase(b: f64, c: f64) -> f64 {
    let mut candidates = vec![0.0, FRAC_PI_2];
    let phi = c.atan2(b);
    if (0.0..=FRAC_PI_2).contains(&phi) {
        candidates.push(phi);
    }
    candidates
        .into_iter()
        .max_by(|x, y| (b * x.cos() + c * x.sin()).total_cmp(&(b * y.cos() + c * y.sin())))
        .unwrap()
}

pub fn optimize_thetas(
    g: &Graph,
    opts: &VariationalOptions,
) -> Result<VariationalResult, OracleError> {
    let n = g.vertex_count();
    if n > opts.qubit_cap {
        return Err(OracleError::TooManyQubits {
            n,
            cap: opts.qubit_cap,
        });
    }
    let spectrum = epr_lambda_max(
        g,
        &SpectrumOptions {
            qubit_cap: opts.qubit_cap,
            ..Default::default()
        },
    )?;
    let lambda_max = spectrum.lambda_max;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut restarts = Vec::with_capacity(opts.restarts);
    for _ in 0..opts.restarts.max(1) {
        let mut thetas: Vec<f64> = (0..g.edge_count())
            .map(|_| rng.gen_range(0.0..=FRAC_PI_4))
            .collect();
        let mut energy = energy_at(g, &thetas, opts.qubit_cap)?;
        let mut sweeps = 0;
        while sweeps < opts.max_sweeps {
            sweeps += 1;
            let before = energy;
            for e in 0..thetas.len() {
                let mut probe = |t: f64| {
                    thetas[e] = t;
                    energy_at(g, &thetas, opts.qubit_cap)
                };
                let e0 = probe(0.0)?;
                let e1 = probe(FRAC_PI_4)?;
                let e2 = probe(FRAC_PI_4 / 2.0)?;
                let a = (e0 + e1 - SQRT_2 * e2) / (2.0 - SQRT_2);
                let phi = best_phase(e0 - a, e1 - a);
                thetas[e] = (0.5 * phi).clamp(0.0, FRAC_PI_4);
                energy = energy_at(g, &thetas, opts.qubit_cap)?;
            }
            if energy - before < opts.tol {
                break;
            }
        }
        restarts.push(RestartRecord {
            energy,
            ratio: energy / lambda_max,
            sweeps,
        });
        if best.as_ref().is_none_or(|(b, _)| energy > *b) {
            best = Some((energy, thetas));
        }
    }
    let (energy, thetas) = best.unwrap();
    Ok(VariationalResult {
        thetas,
        energy,
        lambda_max,
        ratio: energy / lambda_max,
        restarts,
    })
}
