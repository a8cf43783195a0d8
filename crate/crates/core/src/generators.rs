//! Named graph families and seeded random instances.

use rand::Rng;

use crate::graph::Graph;
use crate::rational::{ratio, Rational};

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::unweighted(n, &edges).expect("valid path")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycles need at least three vertices");
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::unweighted(n, &edges).expect("valid cycle")
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::unweighted(n, &edges).expect("valid complete graph")
}

/// K_{l,m} with the `l` side numbered first.
pub fn complete_bipartite(l: usize, m: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..l {
        for b in l..l + m {
            edges.push((a, b));
        }
    }
    Graph::unweighted(l + m, &edges).expect("valid bipartite graph")
}

/// K_{1,k} centred on vertex 0.
pub fn star(k: usize) -> Graph {
    complete_bipartite(1, k)
}

/// Erdős–Rényi G(n, p), resampled until at least one edge is present.
pub fn random_simple<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    assert!(n >= 2);
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        if !edges.is_empty() {
            return Graph::unweighted(n, &edges).expect("valid random graph");
        }
    }
}

/// Simple random graph with weights drawn from {1/4, 1/2, …, 3}.
pub fn random_weighted<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let base = random_simple(rng, n, p);
    let edges: Vec<(usize, usize, Rational)> = base
        .edges()
        .iter()
        .map(|e| (e.u, e.v, ratio(rng.gen_range(1..=12), 4)))
        .collect();
    Graph::new(n, edges).expect("valid weighted graph")
}

/// `m` unit edges between uniformly random distinct endpoints; parallel
/// edges occur naturally.
pub fn random_multigraph<R: Rng>(rng: &mut R, n: usize, m: usize) -> Graph {
    assert!(n >= 2 && m >= 1);
    let edges: Vec<_> = (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect();
    Graph::unweighted(n, &edges).expect("valid multigraph")
}
