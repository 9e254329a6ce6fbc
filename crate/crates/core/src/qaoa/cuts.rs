use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use super::{build_qaoa_circuit, EdgeOrder, EdgePartition, Graph, QAOAParams, QaoaError, Result};
use crate::cutting::{CutGroup, CutMethod, CutPlan};

/// Summary of a QAOA cut plan against the bounds it must satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutStructure {
    pub groups: usize,
    pub max_group: usize,
    /// Number of subset pairs with overlapping vertex sets.
    pub overlapping_pairs: usize,
    pub kappa: usize,
    pub depth: usize,
}

impl CutStructure {
    pub fn group_bound(&self) -> usize {
        (2 * self.depth - 1) * self.overlapping_pairs
    }
}

/// `(from label, to label, layer of the next op, spans layers)`.
type CutKey = (usize, usize, usize, bool);

/// Cut plan for the depth-`p` circuit built with
/// `EdgeOrder::Partition(partition)`. Every op inherits the subset label of
/// its edge (`H` takes the label of the first `RZZ` on its qubit, `RX` that
/// of the last `RZZ` on its qubit in the layer), fragments are the label
/// classes, and wires are cut wherever the label changes. The plan is valid
/// for any angles since op indices do not depend on them.
pub fn plan_qaoa_cuts(graph: &Graph, partition: &EdgePartition, p: usize, method: CutMethod) -> Result<CutPlan> {
    plan_with_structure(graph, partition, p, method).map(|(plan, _)| plan)
}

pub(crate) fn plan_with_structure(
    graph: &Graph,
    partition: &EdgePartition,
    p: usize,
    method: CutMethod,
) -> Result<(CutPlan, CutStructure)> {
    if p == 0 {
        return Err(QaoaError::Params("depth must be at least 1".into()));
    }
    let circuit = build_qaoa_circuit(graph, &QAOAParams::zeros(p), EdgeOrder::Partition(partition))?;
    let n = graph.num_vertices();
    let edge_label: Vec<usize> = partition
        .subsets
        .iter()
        .enumerate()
        .flat_map(|(i, s)| std::iter::repeat_n(i, s.len()))
        .collect();

    // op layout: n H gates, then per layer M RZZ gates and n RX gates
    let ops = circuit.ops();
    let m = edge_label.len();
    let edges = EdgeOrder::Partition(partition).edges(graph);
    let mut label: Vec<Option<usize>> = vec![None; ops.len()];
    let mut layer = vec![0usize; ops.len()];
    let mut running: Vec<Option<usize>> = vec![None; n];
    for l in 0..p {
        let base = n + l * (m + n);
        let mut last: Vec<Option<usize>> = vec![None; n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            label[base + e] = Some(edge_label[e]);
            layer[base + e] = l + 1;
            for w in [u, v] {
                if l == 0 && running[w].is_none() {
                    running[w] = Some(edge_label[e]);
                }
                last[w] = Some(edge_label[e]);
            }
        }
        if l == 0 {
            for q in 0..n {
                label[q] = running[q].or(Some(0));
                running[q] = label[q];
            }
        }
        for q in 0..n {
            if last[q].is_some() {
                running[q] = last[q];
            }
            label[base + m + q] = running[q];
            layer[base + m + q] = l + 1;
        }
    }

    // cut points, grouped by (from, to, layer of next op, spans layers)
    let mut groups_by_key: BTreeMap<CutKey, Vec<(usize, usize, usize)>> = BTreeMap::new();
    let mut seq = vec![Vec::new(); n];
    for (i, op) in ops.iter().enumerate() {
        if label[i].is_some() && op.as_gate().is_some() {
            for &w in op.wires() {
                seq[w].push(i);
            }
        }
    }
    for (w, s) in seq.iter().enumerate() {
        for pair in s.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (la, lb) = (label[a].unwrap(), label[b].unwrap());
            if la != lb {
                groups_by_key
                    .entry((la, lb, layer[b], layer[a] != layer[b]))
                    .or_default()
                    .push((w, a, b));
            }
        }
    }
    let mut groups = Vec::new();
    for cuts in groups_by_key.values() {
        let position = cuts.iter().map(|c| c.2).min().unwrap();
        let latest = cuts.iter().map(|c| c.1).max().unwrap();
        if latest >= position {
            return Err(QaoaError::Structure(format!(
                "cut wires at position {position} are not parallel (op {latest} follows)"
            )));
        }
        let mut wires: Vec<usize> = cuts.iter().map(|c| c.0).collect();
        wires.sort_unstable();
        groups.push(CutGroup {
            position,
            wires,
            method,
        });
    }
    groups.sort_by(|a, b| a.position.cmp(&b.position).then(a.wires.cmp(&b.wires)));

    let plan = CutPlan::with_assignment(&circuit, groups, &label)?;
    let structure = CutStructure {
        groups: plan.groups().len(),
        max_group: plan.groups().iter().map(|g| g.wires.len()).max().unwrap_or(0),
        overlapping_pairs: partition.overlaps().len(),
        kappa: partition.kappa(),
        depth: p,
    };
    if structure.groups > structure.group_bound() {
        return Err(QaoaError::Structure(format!(
            "{} groups exceed (2p-1)·pairs = {}",
            structure.groups,
            structure.group_bound()
        )));
    }
    if structure.max_group > structure.kappa {
        return Err(QaoaError::Structure(format!(
            "group of {} wires exceeds kappa = {}",
            structure.max_group, structure.kappa
        )));
    }
    let supports: BTreeSet<Vec<usize>> = plan.fragments().iter().map(|f| f.support.clone()).collect();
    let expected: BTreeSet<Vec<usize>> = (0..partition.len())
        .filter(|&i| !partition.subsets[i].is_empty())
        .map(|i| partition.vertices(i))
        .collect();
    if !graph.edges().is_empty() && supports != expected {
        return Err(QaoaError::Structure("fragment supports differ from the subgraph vertex sets".into()));
    }
    Ok((plan, structure))
}

impl CutStructure {
    /// Structural summary of [`plan_qaoa_cuts`] for the given instance.
    pub fn of(graph: &Graph, partition: &EdgePartition, p: usize) -> Result<CutStructure> {
        plan_with_structure(graph, partition, p, CutMethod::Randomized).map(|(_, s)| s)
    }
}

/// `N = 3^{pk} 4^{(p−1)k} + (r−2)·12^{(2p−1)k} + 3^{(p−1)k} 4^{pk}`.
pub fn count_fragment_configs(p: u32, r: u32, k: u32) -> BigUint {
    assert!(p >= 1 && r >= 2 && k >= 1, "count_fragment_configs needs p, k >= 1 and r >= 2");
    let pow = |b: u32, e: u32| BigUint::from(b).pow(e);
    pow(3, p * k) * pow(4, (p - 1) * k)
        + BigUint::from(r - 2) * pow(12, (2 * p - 1) * k)
        + pow(3, (p - 1) * k) * pow(4, p * k)
}

/// `m = n + (3p − 1)k`.
pub fn max_fragment_qubits(n: usize, p: usize, k: usize) -> usize {
    n + (3 * p).saturating_sub(1) * k
}
