use serde::{Deserialize, Serialize};

use super::{EdgePartition, Graph, QaoaError, Result};
use crate::sim::{Circuit, DiagonalObservable, GateKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAOAParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QAOAParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<QAOAParams> {
        let p = QAOAParams { gammas, betas };
        p.validate()?;
        Ok(p)
    }

    pub fn zeros(p: usize) -> QAOAParams {
        QAOAParams {
            gammas: vec![0.0; p],
            betas: vec![0.0; p],
        }
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() || self.gammas.len() != self.betas.len() {
            return Err(QaoaError::Params(format!(
                "need equal non-zero lengths, got {} gammas and {} betas",
                self.gammas.len(),
                self.betas.len()
            )));
        }
        Ok(())
    }

    /// `[γ_1, …, γ_p, β_1, …, β_p]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_vec(v: &[f64]) -> QAOAParams {
        let p = v.len() / 2;
        QAOAParams {
            gammas: v[..p].to_vec(),
            betas: v[p..].to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("params serialise")
    }

    pub fn from_json(s: &str) -> Result<QAOAParams> {
        let p: QAOAParams = serde_json::from_str(s).map_err(|e| QaoaError::Format(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}

/// `f(x) = (1/M) Σ_{(i,j)∈E} (−1)^{x_i ⊕ x_j}`.
pub fn maxcut_cost_operator(graph: &Graph) -> Result<DiagonalObservable> {
    let m = graph.num_edges();
    if m == 0 {
        return Err(QaoaError::EmptyEdges);
    }
    let edges = graph.edges().to_vec();
    Ok(DiagonalObservable::new(
        move |x| {
            let agree: i64 = edges
                .iter()
                .map(|&(a, b)| if ((x >> a) ^ (x >> b)) & 1 == 0 { 1 } else { -1 })
                .sum();
            agree as f64 / m as f64
        },
        format!("divided by M = {m}"),
    ))
}

/// Order of the RZZ gates within each layer.
#[derive(Debug, Clone, Copy)]
pub enum EdgeOrder<'a> {
    /// The graph's edge list order.
    Natural,
    /// Subset by subset, each subset contiguous.
    Partition(&'a EdgePartition),
}

impl EdgeOrder<'_> {
    pub(crate) fn edges(&self, graph: &Graph) -> Vec<(usize, usize)> {
        match self {
            EdgeOrder::Natural => graph.edges().to_vec(),
            EdgeOrder::Partition(p) => p.subsets.iter().flatten().copied().collect(),
        }
    }
}

/// `H^{⊗n}`, then per layer `RZZ(2γ_ℓ)` per edge and `RX(2β_ℓ)` per qubit,
/// then a terminal measurement tagged `"terminal"`.
pub fn build_qaoa_circuit(graph: &Graph, params: &QAOAParams, order: EdgeOrder<'_>) -> Result<Circuit> {
    params.validate()?;
    let n = graph.num_vertices();
    let edges = order.edges(graph);
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.gate(GateKind::H, &[q])?;
    }
    for (g, b) in params.gammas.iter().zip(&params.betas) {
        for &(u, v) in &edges {
            c.gate(GateKind::Rzz(2.0 * g), &[u, v])?;
        }
        for q in 0..n {
            c.gate(GateKind::Rx(2.0 * b), &[q])?;
        }
    }
    c.measure_all("terminal")?;
    Ok(c)
}
