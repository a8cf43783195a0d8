use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::graph::Graph;

use super::hamiltonian;
use super::OracleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Largest qubit count handled by dense diagonalization.
    pub dense_cap: usize,
    pub qubit_cap: usize,
    /// Required `‖Hv − λv‖`.
    pub tol: f64,
    pub force: Option<Method>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            dense_cap: 12,
            qubit_cap: 20,
            tol: 1e-8,
            force: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub lambda_max: f64,
    pub method: Method,
    pub residual: f64,
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
}

fn residual(g: &Graph, v: &[f64], lambda: f64) -> f64 {
    let mut hv = vec![0.0; v.len()];
    hamiltonian::apply(g, v, &mut hv);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    n
}

/// Largest eigenpair of the EPR Hamiltonian with a residual check.
pub fn epr_lambda_max(g: &Graph, opts: &SpectrumOptions) -> Result<SpectrumResult, OracleError> {
    let n = g.vertex_count();
    if n > opts.qubit_cap {
        return Err(OracleError::TooManyQubits {
            n,
            cap: opts.qubit_cap,
        });
    }
    let method = opts.force.unwrap_or(if n <= opts.dense_cap {
        Method::Dense
    } else {
        Method::Iterative
    });
    let result = match method {
        Method::Dense => dense_top(g),
        Method::Iterative => lanczos_top(g, opts.tol)?,
    };
    if result.residual.is_nan() || result.residual > opts.tol {
        return Err(OracleError::NotConverged {
            residual: result.residual,
            tol: opts.tol,
        });
    }
    Ok(result)
}

fn dense_top(g: &Graph) -> SpectrumResult {
    let n = g.vertex_count();
    let dim = 1usize << n;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let sectors: Vec<Vec<usize>> = if n == 0 {
        vec![vec![0]]
    } else {
        vec![
            hamiltonian::sector_states(n, false),
            hamiltonian::sector_states(n, true),
        ]
    };
    for states in sectors {
        let m: DMatrix<f64> = hamiltonian::sector(g, &states);
        let eig = SymmetricEigen::new(m);
        let (k, &lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty sector");
        if best.as_ref().is_none_or(|(b, _)| lambda > *b) {
            let mut v = vec![0.0; dim];
            for (i, &x) in states.iter().enumerate() {
                v[x] = eig.eigenvectors[(i, k)];
            }
            best = Some((lambda, v));
        }
    }
    let (lambda_max, eigenvector) = best.unwrap();
    SpectrumResult {
        lambda_max,
        method: Method::Dense,
        residual: residual(g, &eigenvector, lambda_max),
        eigenvector,
    }
}

const LANCZOS_STEPS: usize = 60;
const LANCZOS_RESTARTS: usize = 300;

// Runs `steps` Lanczos iterations from unit vector `start` without storing the
// basis; calls `visit(k, v_k)` on each basis vector.
fn lanczos_pass(
    g: &Graph,
    start: &[f64],
    steps: usize,
    mut visit: impl FnMut(usize, &[f64]),
) -> (Vec<f64>, Vec<f64>) {
    let dim = start.len();
    let mut v = start.to_vec();
    let mut prev = vec![0.0; dim];
    let mut w = vec![0.0; dim];
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut beta_prev = 0.0;
    for k in 0..steps {
        visit(k, &v);
        hamiltonian::apply(g, &v, &mut w);
        let alpha = dot(&w, &v);
        for i in 0..dim {
            w[i] -= alpha * v[i] + beta_prev * prev[i];
        }
        // One local reorthogonalization against v keeps alpha accurate.
        let c = dot(&w, &v);
        w.iter_mut().zip(&v).for_each(|(a, b)| *a -= c * b);
        alphas.push(alpha + c);
        let beta = dot(&w, &w).sqrt();
        if beta < 1e-12 || k + 1 == steps {
            break;
        }
        betas.push(beta);
        std::mem::swap(&mut prev, &mut v);
        for i in 0..dim {
            v[i] = w[i] / beta;
        }
        beta_prev = beta;
    }
    (alphas, betas)
}

fn lanczos_top(g: &Graph, tol: f64) -> Result<SpectrumResult, OracleError> {
    let dim = 1usize << g.vertex_count();
    // Off-diagonal entries are non-negative, so the top eigenvector can be
    // taken entrywise non-negative and overlaps the all-ones vector.
    let mut x = vec![1.0; dim];
    normalize(&mut x);
    let steps = LANCZOS_STEPS.min(dim);
    let mut last = f64::INFINITY;
    for _ in 0..LANCZOS_RESTARTS {
        let (alphas, betas) = lanczos_pass(g, &x, steps, |_, _| {});
        let k = alphas.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let top = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        let s: Vec<f64> = (0..k).map(|i| eig.eigenvectors[(i, top)]).collect();
        let mut y = vec![0.0; dim];
        lanczos_pass(g, &x, steps, |i, v| {
            if i < k {
                y.iter_mut().zip(v).for_each(|(a, b)| *a += s[i] * b);
            }
        });
        normalize(&mut y);
        let mut hy = vec![0.0; dim];
        hamiltonian::apply(g, &y, &mut hy);
        let lambda = dot(&y, &hy);
        let r = residual(g, &y, lambda);
        x = y;
        last = r;
        if r <= tol {
            return Ok(SpectrumResult {
                lambda_max: lambda,
                method: Method::Iterative,
                residual: r,
                eigenvector: x,
            });
        }
    }
    Err(OracleError::NotConverged {
        residual: last,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn k2_has_top_eigenvalue_two() {
        let r = epr_lambda_max(&generators::path(2), &SpectrumOptions::default()).unwrap();
        assert!((r.lambda_max - 2.0).abs() < 1e-12);
        assert_eq!(r.method, Method::Dense);
    }

    #[test]
    fn c4_saturates_matching_bound() {
        let r = epr_lambda_max(&generators::cycle(4), &SpectrumOptions::default()).unwrap();
        assert!((r.lambda_max - 6.0).abs() < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        for g in [
            generators::cycle(5),
            generators::complete(5),
            generators::complete_bipartite(2, 3),
            generators::star(6),
        ] {
            let dense = epr_lambda_max(&g, &SpectrumOptions::default()).unwrap();
            let it = epr_lambda_max(
                &g,
                &SpectrumOptions {
                    force: Some(Method::Iterative),
                    ..Default::default()
                },
            )
            .unwrap();
            assert!((dense.lambda_max - it.lambda_max).abs() < 1e-9);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let opts = SpectrumOptions {
            qubit_cap: 3,
            ..Default::default()
        };
        assert_eq!(
            epr_lambda_max(&generators::path(4), &opts).unwrap_err(),
            OracleError::TooManyQubits { n: 4, cap: 3 }
        );
    }
}
