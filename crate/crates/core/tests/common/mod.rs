#![allow(dead_code)]

use std::path::PathBuf;

use fed_core::generators;
use fed_core::graph::{load_graph, Graph};
use fed_core::matching::FractionalMatching;
use fed_core::rational::{ratio, Rational};
use num_traits::{One, Zero};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Graph {
    load_graph(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// Simple graph on 2..=max_n vertices with a random density.
pub fn random_graph<R: Rng>(rng: &mut R, max_n: usize, weighted: bool) -> Graph {
    let n = rng.gen_range(2..=max_n);
    let p = rng.gen_range(0.2..=0.9);
    if weighted {
        generators::random_weighted(rng, n, p)
    } else {
        generators::random_simple(rng, n, p)
    }
}

/// Feasible matching: random eighths scaled down by the heavier endpoint load.
pub fn random_matching<R: Rng>(rng: &mut R, g: &Graph) -> FractionalMatching {
    let raw: Vec<Rational> = (0..g.edge_count())
        .map(|_| ratio(rng.gen_range(0..=8), 8))
        .collect();
    let load: Vec<Rational> = (0..g.vertex_count())
        .map(|v| {
            g.incident(v)
                .iter()
                .fold(Rational::zero(), |acc, &e| acc + &raw[e])
        })
        .collect();
    let fractions = g
        .edges()
        .iter()
        .zip(&raw)
        .map(|(e, x)| {
            let scale = load[e.u]
                .clone()
                .max(load[e.v].clone())
                .max(Rational::one());
            x / scale
        })
        .collect();
    FractionalMatching::from_fractions(g, fractions).expect("scaled matching is feasible")
}
