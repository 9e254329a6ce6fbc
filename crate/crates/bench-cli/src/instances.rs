//! Standard benchmark instances and the glue from a graph to a cut circuit.

use wirecut::cutting::{CutMethod, CutPlan};
use wirecut::qaoa::{
    build_qaoa_circuit, chain_partition, find_balanced_separator, generate_clustered_graph, grid_search_p1,
    maxcut_cost_operator, plan_qaoa_cuts, separator_partition, ClusteredGraphSpec, EdgeOrder, EdgePartition, Graph,
    QAOAParams, VertexLabel,
};
use wirecut::sim::{exact_expectation_with_cap, Circuit, DiagonalObservable};

use crate::error::{BenchError, Result};

/// Largest instance for which exact reference values are computed.
pub const EXACT_QUBIT_CAP: usize = 13;

/// Seed of the 9-qubit two-layer convergence instance (`r=2, n=3, k=3`).
pub const CONVERGENCE_SEED: u64 = 8;

/// Cluster size of the cut-size suite.
pub const CUTSIZE_CLUSTER: usize = 5;

/// Seeds of the cut-size suite: the first three for which the partition has
/// `κ = k` at every `k ∈ {1, 2, 3}`.
pub const CUTSIZE_SEEDS: [u64; 3] = [2, 7, 15];

/// Grid resolution used to pick depth-one parameters.
pub const GRID_POINTS: usize = 30;

/// A graph with its edge partition and QAOA parameters.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
    pub partition: EdgePartition,
    pub params: QAOAParams,
}

impl Instance {
    pub fn new(name: impl Into<String>, graph: Graph, params: QAOAParams) -> Result<Instance> {
        let partition = default_partition(&graph)?;
        Ok(Instance {
            name: name.into(),
            graph,
            partition,
            params,
        })
    }

    pub fn depth(&self) -> usize {
        self.params.depth()
    }

    pub fn circuit(&self) -> Result<Circuit> {
        Ok(build_qaoa_circuit(&self.graph, &self.params, EdgeOrder::Partition(&self.partition))?)
    }

    pub fn plan(&self, method: CutMethod) -> Result<CutPlan> {
        Ok(plan_qaoa_cuts(&self.graph, &self.partition, self.depth(), method)?)
    }

    pub fn observable(&self) -> Result<DiagonalObservable> {
        Ok(maxcut_cost_operator(&self.graph)?)
    }

    /// Exact cost, or `None` above [`EXACT_QUBIT_CAP`] qubits.
    pub fn exact(&self) -> Result<Option<f64>> {
        if self.graph.num_vertices() > EXACT_QUBIT_CAP {
            return Ok(None);
        }
        let c = self.circuit()?;
        Ok(Some(exact_expectation_with_cap(&c, &self.observable()?, EXACT_QUBIT_CAP)?))
    }
}

/// Chain partition for graphs carrying cluster labels, otherwise the
/// smallest balanced separator (small unlabelled graphs only).
pub fn default_partition(graph: &Graph) -> Result<EdgePartition> {
    let labelled = graph
        .labels()
        .iter()
        .any(|l| matches!(l, Some(VertexLabel::Cluster(_))));
    if labelled {
        return Ok(chain_partition(graph)?);
    }
    let sep = find_balanced_separator(graph, 3)?;
    Ok(separator_partition(graph, &sep)?)
}

pub fn clustered(r: usize, n: usize, k: usize, seed: u64) -> Result<Graph> {
    Ok(generate_clustered_graph(&ClusteredGraphSpec::new(r, n, k, seed))?)
}

/// Depth-one parameters from a grid search with one zoom round.
pub fn grid_params(graph: &Graph) -> Result<QAOAParams> {
    if graph.num_vertices() > EXACT_QUBIT_CAP {
        return Err(BenchError::Validation(format!(
            "grid search needs exact simulation, graph has {} > {EXACT_QUBIT_CAP} vertices",
            graph.num_vertices()
        )));
    }
    Ok(grid_search_p1(graph, GRID_POINTS, 1)?.0)
}

/// Two-layer instance on 9 qubits with three 3-wire cut groups.
pub fn convergence_instance() -> Result<Instance> {
    let graph = clustered(2, 3, 3, CONVERGENCE_SEED)?;
    let params = QAOAParams::new(vec![0.4, 0.7], vec![0.6, 0.3])?;
    Instance::new(format!("conv-r2n3k3-s{CONVERGENCE_SEED}-p2"), graph, params)
}

/// Depth-one instances with one cut group of `k` wires for `k = 1, 2, 3`,
/// `(k, instance)` pairs ordered by seed then `k`.
pub fn cutsize_suite() -> Result<Vec<(usize, Instance)>> {
    let mut out = Vec::new();
    for &seed in &CUTSIZE_SEEDS {
        for k in 1..=3 {
            let graph = clustered(2, CUTSIZE_CLUSTER, k, seed)?;
            let params = grid_params(&graph)?;
            let inst = Instance::new(format!("cutsize-r2n{CUTSIZE_CLUSTER}k{k}-s{seed}"), graph, params)?;
            if inst.partition.kappa() != k {
                return Err(BenchError::Validation(format!(
                    "{}: partition overlap is {}, expected {k}",
                    inst.name,
                    inst.partition.kappa()
                )));
            }
            out.push((k, inst));
        }
    }
    Ok(out)
}

/// Four vertices: a triangle on `{0, 1, 2}` and a pendant edge `(2, 3)`, with
/// vertex 2 as a one-vertex separator.
pub fn sample_graph() -> Result<Graph> {
    let g = Graph::new(4, &[(0, 1), (0, 2), (1, 2), (2, 3)])?;
    Ok(g.with_labels(vec![
        Some(VertexLabel::Cluster(0)),
        Some(VertexLabel::Cluster(0)),
        Some(VertexLabel::Separator(0)),
        Some(VertexLabel::Cluster(1)),
    ])?)
}

pub fn sample_instance() -> Result<Instance> {
    let graph = sample_graph()?;
    let params = grid_params(&graph)?;
    Instance::new("sample-4v-p1", graph, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergence_instance_shape() {
        let inst = convergence_instance().unwrap();
        assert_eq!(inst.graph.num_vertices(), 9);
        let plan = inst.plan(CutMethod::Randomized).unwrap();
        assert_eq!(plan.groups().len(), 3);
        assert!(plan.groups().iter().all(|g| g.wires.len() == 3));
        for seed in 0..CONVERGENCE_SEED {
            let g = clustered(2, 3, 3, seed).unwrap();
            assert_ne!(chain_partition(&g).unwrap().kappa(), 3, "seed {seed} qualifies earlier");
        }
    }

    #[test]
    fn cutsize_seeds_are_the_first_qualifying() {
        let qualifies = |seed| {
            (1..=3).all(|k| {
                let g = clustered(2, CUTSIZE_CLUSTER, k, seed).unwrap();
                chain_partition(&g).unwrap().kappa() == k
            })
        };
        let first: Vec<u64> = (0..100).filter(|&s| qualifies(s)).take(3).collect();
        assert_eq!(first, CUTSIZE_SEEDS);
    }

    #[test]
    fn sample_instance_has_one_cut_wire() {
        let inst = sample_instance().unwrap();
        let plan = inst.plan(CutMethod::Randomized).unwrap();
        assert_eq!(plan.total_wires(), 1);
        assert_eq!(inst.partition.kappa(), 1);
    }
}
