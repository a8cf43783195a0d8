//! Magic graph states `|χ⟩ = Π_e exp(iθ_e P_u P_v)|0…0⟩` and the closed-form
//! expectations that give their EPR energy without building the state.
//!
//! With `P = (X − Y)/√2` and `Q = (X + Y)/√2`, the edge term is
//! `g = ½(II + XX + ZZ − YY) = ½(II + QP + PQ + ZZ)`. For an edge `(i, j)`:
//!
//! * `⟨Q_i P_j⟩ = sin 2θ_ij · Π_{k ∈ K} cos 2θ_ik`, K the other neighbours of i
//! * `⟨P_i Q_j⟩` likewise over the other neighbours L of j
//! * `⟨Z_i Z_j⟩ = Σ_{S ⊆ T, |S| even} Π_S sin 2θ_is sin 2θ_sj · Π_{K∖S} cos 2θ_ik · Π_{L∖S} cos 2θ_lj`
//!   with T the common neighbours.
//!
//! Gates on parallel edges multiply into a single rotation by the summed
//! angle, so the formulas are evaluated on neighbour bundles: every distinct
//! neighbour contributes once, with the total angle of the edges leading to
//! it. On simple graphs this is exactly the per-edge form above.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::graph::{EdgeId, Graph, VertexId};
use crate::matching::{FractionalMatching, MatchingKind};
use crate::ratio;

/// Common-neighbour cap for the even-subset enumeration in `⟨ZZ⟩`.
pub const DEFAULT_ZZ_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnergyError {
    #[error("kappa must be positive and finite, got {0}")]
    InvalidKappa(f64),
    #[error("expected {expected} angles, got {found}")]
    LengthMismatch { found: usize, expected: usize },
    #[error("angle {theta} on edge {edge} is outside [0, π/4]")]
    AngleOutOfRange { edge: EdgeId, theta: f64 },
    #[error("edge {edge} does not exist")]
    NoSuchEdge { edge: EdgeId },
    #[error(
        "edge {edge} has {size} common neighbours (cap {cap}); the even-subset sum has 2^{} terms, \
         use the factored form or the statevector oracle",
        size.saturating_sub(1)
    )]
    CommonNeighbourCap {
        edge: EdgeId,
        size: usize,
        cap: usize,
    },
}

/// Where a set of angles came from when it was derived from a matching.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingOrigin {
    pub kappa: f64,
    pub kind: MatchingKind,
    pub fractions: Vec<f64>,
    pub value: f64,
}

/// Per-edge angles `θ_e ∈ [0, π/4]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaAssignment {
    thetas: Vec<f64>,
    origin: Option<MatchingOrigin>,
}

impl ThetaAssignment {
    pub fn from_angles(g: &Graph, thetas: Vec<f64>) -> Result<Self, EnergyError> {
        if thetas.len() != g.edge_count() {
            return Err(EnergyError::LengthMismatch {
                found: thetas.len(),
                expected: g.edge_count(),
            });
        }
        if let Some((edge, &theta)) = thetas
            .iter()
            .enumerate()
            .find(|(_, t)| !(0.0..=FRAC_PI_4).contains(*t))
        {
            return Err(EnergyError::AngleOutOfRange { edge, theta });
        }
        Ok(Self {
            thetas,
            origin: None,
        })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn theta(&self, e: EdgeId) -> f64 {
        self.thetas[e]
    }

    pub fn origin(&self) -> Option<&MatchingOrigin> {
        self.origin.as_ref()
    }

    pub fn kappa(&self) -> Option<f64> {
        self.origin.as_ref().map(|o| o.kappa)
    }
}

/// `cos 2θ_e = exp(−κ m_e)`.
pub fn assign_thetas(
    g: &Graph,
    fm: &FractionalMatching,
    kappa: f64,
) -> Result<ThetaAssignment, EnergyError> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(EnergyError::InvalidKappa(kappa));
    }
    let fractions = fm.fractions_f64();
    if fractions.len() != g.edge_count() {
        return Err(EnergyError::LengthMismatch {
            found: fractions.len(),
            expected: g.edge_count(),
        });
    }
    let thetas = fractions
        .iter()
        .map(|&m| 0.5 * (-kappa * m).exp().clamp(0.0, 1.0).acos())
        .collect();
    Ok(ThetaAssignment {
        thetas,
        origin: Some(MatchingOrigin {
            kappa,
            kind: fm.kind().clone(),
            fractions,
            value: crate::rational::to_f64(fm.value()),
        }),
    })
}

/// Closed-form evaluator; precomputes the neighbour bundles once.
pub struct ClosedForm<'a> {
    graph: &'a Graph,
    thetas: &'a ThetaAssignment,
    // bundle[v][w] = total angle over all edges between v and w
    bundle: Vec<BTreeMap<VertexId, f64>>,
}

impl<'a> ClosedForm<'a> {
    pub fn new(graph: &'a Graph, thetas: &'a ThetaAssignment) -> Result<Self, EnergyError> {
        if thetas.thetas.len() != graph.edge_count() {
            return Err(EnergyError::LengthMismatch {
                found: thetas.thetas.len(),
                expected: graph.edge_count(),
            });
        }
        let mut bundle = vec![BTreeMap::new(); graph.vertex_count()];
        for (id, e) in graph.edges().iter().enumerate() {
            *bundle[e.u].entry(e.v).or_insert(0.0) += thetas.thetas[id];
            *bundle[e.v].entry(e.u).or_insert(0.0) += thetas.thetas[id];
        }
        Ok(Self {
            graph,
            thetas,
            bundle,
        })
    }

    fn endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId), EnergyError> {
        self.graph
            .edges()
            .get(e)
            .map(|edge| (edge.u, edge.v))
            .ok_or(EnergyError::NoSuchEdge { edge: e })
    }

    fn cos2(&self, a: VertexId, b: VertexId) -> f64 {
        (2.0 * self.bundle[a][&b]).cos()
    }

    fn sin2(&self, a: VertexId, b: VertexId) -> f64 {
        (2.0 * self.bundle[a][&b]).sin()
    }

    fn others_product(&self, v: VertexId, skip: VertexId) -> f64 {
        self.bundle[v]
            .iter()
            .filter(|(&w, _)| w != skip)
            .map(|(_, &t)| (2.0 * t).cos())
            .product()
    }

    fn common(&self, i: VertexId, j: VertexId) -> Vec<VertexId> {
        self.bundle[i]
            .keys()
            .copied()
            .filter(|t| *t != j && self.bundle[j].contains_key(t))
            .collect()
    }

    /// `⟨Q_u P_v⟩` for edge `e = (u, v)`.
    pub fn qp(&self, e: EdgeId) -> Result<f64, EnergyError> {
        let (i, j) = self.endpoints(e)?;
        Ok(self.sin2(i, j) * self.others_product(i, j))
    }

    /// `⟨P_u Q_v⟩` for edge `e = (u, v)`.
    pub fn pq(&self, e: EdgeId) -> Result<f64, EnergyError> {
        let (i, j) = self.endpoints(e)?;
        Ok(self.sin2(i, j) * self.others_product(j, i))
    }

    pub fn common_neighbours(&self, e: EdgeId) -> Result<usize, EnergyError> {
        let (i, j) = self.endpoints(e)?;
        Ok(self.common(i, j).len())
    }

    // Cosines over K∖T and L∖T, and per common neighbour t the pair
    // (sin 2θ_it sin 2θ_tj, cos 2θ_it cos 2θ_tj).
    fn zz_parts(&self, i: VertexId, j: VertexId) -> (f64, Vec<(f64, f64)>) {
        let common = self.common(i, j);
        let outside = |v: VertexId, skip: VertexId| -> f64 {
            self.bundle[v]
                .iter()
                .filter(|(w, _)| **w != skip && common.binary_search(w).is_err())
                .map(|(_, &t)| (2.0 * t).cos())
                .product()
        };
        let base = outside(i, j) * outside(j, i);
        let terms = common
            .iter()
            .map(|&t| {
                (
                    self.sin2(i, t) * self.sin2(t, j),
                    self.cos2(i, t) * self.cos2(t, j),
                )
            })
            .collect();
        (base, terms)
    }

    /// `⟨Z_u Z_v⟩` by explicit enumeration of the even subsets of T.
    pub fn zz(&self, e: EdgeId, cap: usize) -> Result<f64, EnergyError> {
        let (i, j) = self.endpoints(e)?;
        let (base, terms) = self.zz_parts(i, j);
        if terms.len() > cap {
            return Err(EnergyError::CommonNeighbourCap {
                edge: e,
                size: terms.len(),
                cap,
            });
        }
        fn walk(terms: &[(f64, f64)], odd: bool, acc: f64) -> f64 {
            match terms.split_first() {
                None if odd => 0.0,
                None => acc,
                Some((&(s, c), rest)) => walk(rest, !odd, acc * s) + walk(rest, odd, acc * c),
            }
        }
        Ok(base * walk(&terms, false, 1.0))
    }

    /// `⟨Z_u Z_v⟩` through `Σ_{|S| even} Π_S a Π_{T∖S} b = ½[Π(b + a) + Π(b − a)]`;
    /// linear in |T| and uncapped.
    pub fn zz_factored(&self, e: EdgeId) -> Result<f64, EnergyError> {
        let (i, j) = self.endpoints(e)?;
        let (base, terms) = self.zz_parts(i, j);
        let plus: f64 = terms.iter().map(|(a, b)| b + a).product();
        let minus: f64 = terms.iter().map(|(a, b)| b - a).product();
        Ok(base * 0.5 * (plus + minus))
    }

    pub fn edge(&self, e: EdgeId, cap: usize) -> Result<EdgeEnergy, EnergyError> {
        let (u, v) = self.endpoints(e)?;
        let qp = self.qp(e)?;
        let pq = self.pq(e)?;
        let zz = self.zz(e, cap)?;
        let t_bound = self
            .thetas
            .origin
            .as_ref()
            .map(|o| ratio::t_bound_unchecked(o.kappa, o.fractions[e]));
        Ok(EdgeEnergy {
            edge: e,
            u,
            v,
            theta: self.thetas.theta(e),
            qp,
            pq,
            zz,
            g: 0.5 * (1.0 + qp + pq + zz),
            t_bound,
            common_neighbours: self.common_neighbours(e)?,
        })
    }
}

pub fn expect_qp(g: &Graph, th: &ThetaAssignment, e: EdgeId) -> Result<f64, EnergyError> {
    ClosedForm::new(g, th)?.qp(e)
}

pub fn expect_pq(g: &Graph, th: &ThetaAssignment, e: EdgeId) -> Result<f64, EnergyError> {
    ClosedForm::new(g, th)?.pq(e)
}

pub fn expect_zz(
    g: &Graph,
    th: &ThetaAssignment,
    e: EdgeId,
    cap: usize,
) -> Result<f64, EnergyError> {
    ClosedForm::new(g, th)?.zz(e, cap)
}

/// `⟨g_e⟩ = ½(1 + ⟨QP⟩ + ⟨PQ⟩ + ⟨ZZ⟩)`.
pub fn edge_energy(g: &Graph, th: &ThetaAssignment, e: EdgeId) -> Result<f64, EnergyError> {
    Ok(ClosedForm::new(g, th)?.edge(e, DEFAULT_ZZ_CAP)?.g)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeEnergy {
    pub edge: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub theta: f64,
    pub qp: f64,
    pub pq: f64,
    pub zz: f64,
    pub g: f64,
    #[serde(rename = "T_bound")]
    pub t_bound: Option<f64>,
    pub common_neighbours: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTotals {
    pub energy: f64,
    /// Value of the matching the angles were derived from.
    pub fm_value: Option<f64>,
    #[serde(rename = "wG")]
    pub w_g: f64,
    /// Σ_e w_e T(κ, m_e); a lower bound on `energy`.
    pub t_bound_total: Option<f64>,
    /// `energy / (w_G + w(MWFM))` once the bound is attached.
    pub ratio_vs_fm_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub edges: Vec<EdgeEnergy>,
    pub totals: EnergyTotals,
}

impl EnergyReport {
    /// Records the ratio against `w_G + w(MWFM)`.
    pub fn attach_fm_bound(&mut self, mwfm_value: f64) {
        self.totals.ratio_vs_fm_bound = Some(self.totals.energy / (self.totals.w_g + mwfm_value));
    }

    /// Edges whose energy falls below their per-edge lower bound.
    pub fn bound_violations(&self, tol: f64) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.t_bound.is_some_and(|t| e.g < t - tol))
            .map(|e| e.edge)
            .collect()
    }
}

/// Closed-form energy Σ_e w_e ⟨g_e⟩ with the per-edge breakdown. Edges are
/// summed in id order.
pub fn total_energy(
    g: &Graph,
    th: &ThetaAssignment,
    zz_cap: usize,
) -> Result<EnergyReport, EnergyError> {
    let cf = ClosedForm::new(g, th)?;
    let edges = (0..g.edge_count())
        .map(|e| cf.edge(e, zz_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let weights: Vec<f64> = (0..g.edge_count()).map(|e| g.weight_f64(e)).collect();
    let energy = edges.iter().zip(&weights).map(|(e, w)| w * e.g).sum();
    let t_bound_total = th.origin.as_ref().map(|_| {
        edges
            .iter()
            .zip(&weights)
            .map(|(e, w)| w * e.t_bound.unwrap_or(0.0))
            .sum()
    });
    Ok(EnergyReport {
        edges,
        totals: EnergyTotals {
            energy,
            fm_value: th.origin.as_ref().map(|o| o.value),
            w_g: weights.iter().sum(),
            t_bound_total,
            ratio_vs_fm_bound: None,
        },
    })
}
