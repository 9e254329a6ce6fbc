use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{CutError, Result};
use crate::sim::Circuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutMethod {
    Randomized,
    Pauli,
}

impl CutMethod {
    pub fn name(self) -> &'static str {
        match self {
            CutMethod::Randomized => "randomized",
            CutMethod::Pauli => "pauli",
        }
    }

    /// One-norm of the decomposition used for a group of `k` wires.
    pub fn scale(self, k: usize) -> f64 {
        match self {
            CutMethod::Randomized => ((1u64 << (k + 1)) + 1) as f64,
            CutMethod::Pauli => 4f64.powi(k as i32),
        }
    }
}

impl std::str::FromStr for CutMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "randomized" => Ok(CutMethod::Randomized),
            "pauli" => Ok(CutMethod::Pauli),
            other => Err(format!("unknown cut method {other:?}")),
        }
    }
}

/// Wires cut jointly just before op `position`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutGroup {
    pub position: usize,
    pub wires: Vec<usize>,
    pub method: CutMethod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    /// Op indices in execution order.
    pub ops: Vec<usize>,
    /// Sorted qubits touched by the ops.
    pub support: Vec<usize>,
    /// Groups whose downstream half lands in this fragment.
    pub incoming: Vec<usize>,
    /// Groups whose upstream half lives in this fragment.
    pub outgoing: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutPlan {
    groups: Vec<CutGroup>,
    fragments: Vec<Fragment>,
    op_fragment: Vec<Option<usize>>,
    ends: Vec<(usize, usize)>,
    acyclic: bool,
}

#[derive(Serialize, Deserialize)]
struct PlanRecord {
    groups: Vec<CutGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fragments: Option<Vec<Vec<usize>>>,
}

/// Non-terminal ops per wire, in order.
fn wire_sequences(circuit: &Circuit, active: &[bool]) -> Vec<Vec<usize>> {
    let mut seq = vec![Vec::new(); circuit.num_qubits()];
    for (i, op) in circuit.ops().iter().enumerate() {
        if active[i] {
            for &w in op.wires() {
                seq[w].push(i);
            }
        }
    }
    seq
}

fn active_ops(circuit: &Circuit) -> Result<Vec<bool>> {
    if !circuit.is_unitary_with_readout() {
        return Err(CutError::NotUnitary);
    }
    Ok(circuit.ops().iter().map(|op| op.as_gate().is_some()).collect())
}

/// `(wire, op before the cut, op after the cut)` for every wire of `g`.
fn locate(seq: &[Vec<usize>], g: &CutGroup) -> Result<Vec<(usize, usize, usize)>> {
    let mut out = Vec::with_capacity(g.wires.len());
    for &w in &g.wires {
        let s = seq.get(w).ok_or(CutError::WireNotCuttable {
            wire: w,
            position: g.position,
        })?;
        let split = s.partition_point(|&i| i < g.position);
        if split == 0 || split == s.len() {
            return Err(CutError::WireNotCuttable {
                wire: w,
                position: g.position,
            });
        }
        out.push((w, s[split - 1], s[split]));
    }
    Ok(out)
}

fn cut_segments(seq: &[Vec<usize>], groups: &[CutGroup]) -> Result<HashMap<(usize, usize), usize>> {
    let mut cuts = HashMap::new();
    for (gi, g) in groups.iter().enumerate() {
        if g.wires.is_empty() {
            return Err(CutError::NothingToCut);
        }
        for (w, prev, _) in locate(seq, g)? {
            if cuts.insert((w, prev), gi).is_some() {
                return Err(CutError::DuplicateCut { wire: w });
            }
        }
    }
    Ok(cuts)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl CutPlan {
    /// Plan with an explicit fragment label for each gate. Terminal
    /// measurements carry `None`.
    pub fn with_assignment(
        circuit: &Circuit,
        groups: Vec<CutGroup>,
        assignment: &[Option<usize>],
    ) -> Result<CutPlan> {
        let active = active_ops(circuit)?;
        let seq = wire_sequences(circuit, &active);
        let cuts = cut_segments(&seq, &groups)?;

        // compact labels in order of first appearance
        let mut relabel = HashMap::new();
        let mut op_fragment = vec![None; circuit.len()];
        for (i, &is_active) in active.iter().enumerate() {
            if !is_active {
                continue;
            }
            let label = assignment
                .get(i)
                .copied()
                .flatten()
                .ok_or(CutError::Unassigned { op: i })?;
            let next = relabel.len();
            op_fragment[i] = Some(*relabel.entry(label).or_insert(next));
        }
        let nfrag = relabel.len();

        for (w, s) in seq.iter().enumerate() {
            for pair in s.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                if !cuts.contains_key(&(w, a)) && op_fragment[a] != op_fragment[b] {
                    return Err(CutError::UncutAdjacency { wire: w, a, b });
                }
            }
        }

        let mut fragments: Vec<Fragment> = (0..nfrag)
            .map(|_| Fragment {
                ops: Vec::new(),
                support: Vec::new(),
                incoming: Vec::new(),
                outgoing: Vec::new(),
            })
            .collect();
        for (i, f) in op_fragment.iter().enumerate() {
            if let Some(f) = *f {
                fragments[f].ops.push(i);
                fragments[f].support.extend_from_slice(circuit.ops()[i].wires());
            }
        }
        for f in &mut fragments {
            f.support.sort_unstable();
            f.support.dedup();
        }

        let mut ends = Vec::with_capacity(groups.len());
        for (gi, g) in groups.iter().enumerate() {
            let located = locate(&seq, g)?;
            let ups: Vec<usize> = located.iter().map(|&(_, p, _)| op_fragment[p].unwrap()).collect();
            let downs: Vec<usize> = located.iter().map(|&(_, _, n)| op_fragment[n].unwrap()).collect();
            if ups.iter().any(|&u| u != ups[0]) || downs.iter().any(|&d| d != downs[0]) {
                return Err(CutError::InconsistentGroup { group: gi });
            }
            fragments[ups[0]].outgoing.push(gi);
            fragments[downs[0]].incoming.push(gi);
            ends.push((ups[0], downs[0]));
        }

        let acyclic = is_acyclic(nfrag, &ends);
        Ok(CutPlan {
            groups,
            fragments,
            op_fragment,
            ends,
            acyclic,
        })
    }

    /// Plan whose fragments are the connected pieces left after removing the
    /// cut wires.
    pub fn from_groups(circuit: &Circuit, groups: Vec<CutGroup>) -> Result<CutPlan> {
        let active = active_ops(circuit)?;
        let seq = wire_sequences(circuit, &active);
        let cuts = cut_segments(&seq, &groups)?;
        let mut parent: Vec<usize> = (0..circuit.len()).collect();
        for (w, s) in seq.iter().enumerate() {
            for pair in s.windows(2) {
                if !cuts.contains_key(&(w, pair[0])) {
                    let (ra, rb) = (find(&mut parent, pair[0]), find(&mut parent, pair[1]));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let assignment: Vec<Option<usize>> = (0..circuit.len())
            .map(|i| active[i].then(|| find(&mut parent, i)))
            .collect();
        CutPlan::with_assignment(circuit, groups, &assignment)
    }

    /// The uncut circuit as a plan.
    pub fn uncut(circuit: &Circuit) -> Result<CutPlan> {
        CutPlan::from_groups(circuit, Vec::new())
    }

    pub fn groups(&self) -> &[CutGroup] {
        &self.groups
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    /// Fragment of each op; `None` for terminal measurements.
    pub fn op_fragment(&self) -> &[Option<usize>] {
        &self.op_fragment
    }

    /// `(upstream, downstream)` fragment of each group.
    pub fn group_ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    /// Whether the fragment communication graph has no directed cycle, so the
    /// fragments could run one after another on a single device.
    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }

    pub fn total_wires(&self) -> usize {
        self.groups.iter().map(|g| g.wires.len()).sum()
    }

    /// `∏_j scale_j`, the bound on every shot value for `|f| ≤ 1`.
    pub fn per_shot_bound(&self) -> f64 {
        self.groups.iter().map(|g| g.method.scale(g.wires.len())).product()
    }

    pub fn max_fragment_width(&self) -> usize {
        self.fragments.iter().map(|f| f.support.len()).max().unwrap_or(0)
    }

    /// Same plan with every group switched to `method`.
    pub fn with_method(mut self, method: CutMethod) -> CutPlan {
        for g in &mut self.groups {
            g.method = method;
        }
        self
    }

    pub fn to_json(&self) -> String {
        let rec = PlanRecord {
            groups: self.groups.clone(),
            fragments: Some(self.fragments.iter().map(|f| f.ops.clone()).collect()),
        };
        serde_json::to_string(&rec).expect("plan serialises")
    }

    /// Parses `{groups: [...]}`. An optional `fragments` list of op-index
    /// lists fixes the fragment assignment; otherwise connected pieces are used.
    pub fn from_json(s: &str, circuit: &Circuit) -> Result<CutPlan> {
        let rec: PlanRecord = serde_json::from_str(s).map_err(|e| CutError::Format(e.to_string()))?;
        match rec.fragments {
            None => CutPlan::from_groups(circuit, rec.groups),
            Some(frags) => {
                let mut assignment = vec![None; circuit.len()];
                for (f, ops) in frags.iter().enumerate() {
                    for &i in ops {
                        if i >= circuit.len() {
                            return Err(CutError::Format(format!("op index {i} out of range")));
                        }
                        assignment[i] = Some(f);
                    }
                }
                CutPlan::with_assignment(circuit, rec.groups, &assignment)
            }
        }
    }
}

fn is_acyclic(n: usize, ends: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    for &(u, d) in ends {
        if u != d {
            adj[u].push(d);
            indeg[d] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &d in &adj[v] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                queue.push_back(d);
            }
        }
    }
    seen == n
}

/// Splits a circuit written as a prefix acting on `a` followed by a suffix
/// acting on `b`, cutting the wires of `a ∩ b` that carry gates on both sides.
pub fn plan_bipartition(circuit: &Circuit, a: &[usize], b: &[usize], method: CutMethod) -> Result<CutPlan> {
    let active = active_ops(circuit)?;
    let in_a = |w: &usize| a.contains(w);
    let in_b = |w: &usize| b.contains(w);
    let ops = circuit.ops();
    let boundary = (0..ops.len())
        .find(|&i| active[i] && !ops[i].wires().iter().all(in_a))
        .unwrap_or(ops.len());
    for i in boundary..ops.len() {
        if active[i] && !ops[i].wires().iter().all(in_b) {
            return Err(CutError::NotComposed { op: i });
        }
    }
    let seq = wire_sequences(circuit, &active);
    let wires: Vec<usize> = (0..circuit.num_qubits())
        .filter(|w| in_a(w) && in_b(w))
        .filter(|&w| {
            let s = &seq[w];
            s.first().is_some_and(|&i| i < boundary) && s.last().is_some_and(|&i| i >= boundary)
        })
        .collect();
    if wires.is_empty() {
        return Err(CutError::NothingToCut);
    }
    let assignment: Vec<Option<usize>> = (0..ops.len())
        .map(|i| active[i].then_some(usize::from(i >= boundary)))
        .collect();
    CutPlan::with_assignment(
        circuit,
        vec![CutGroup {
            position: boundary,
            wires,
            method,
        }],
        &assignment,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateKind;

    fn h_cnot() -> Circuit {
        let mut c = Circuit::new(2);
        c.gate(GateKind::H, &[0]).unwrap().gate(GateKind::Cnot, &[0, 1]).unwrap();
        c.measure_all("terminal").unwrap();
        c
    }

    #[test]
    fn bipartition_of_h_cnot() {
        let c = h_cnot();
        let plan = plan_bipartition(&c, &[0], &[0, 1], CutMethod::Randomized).unwrap();
        assert_eq!(plan.groups().len(), 1);
        assert_eq!(plan.groups()[0].wires, vec![0]);
        assert_eq!(plan.groups()[0].position, 1);
        let supports: Vec<_> = plan.fragments().iter().map(|f| f.support.clone()).collect();
        assert_eq!(supports, vec![vec![0], vec![0, 1]]);
        assert_eq!(plan.per_shot_bound(), 5.0);
        assert!(plan.is_acyclic());
    }

    #[test]
    fn disjoint_halves_have_nothing_to_cut() {
        let c = h_cnot();
        assert_eq!(
            plan_bipartition(&c, &[0, 1], &[], CutMethod::Randomized),
            Err(CutError::NothingToCut)
        );
    }

    #[test]
    fn non_composed_circuit_is_rejected() {
        let mut c = Circuit::new(3);
        c.gate(GateKind::H, &[0]).unwrap();
        c.gate(GateKind::Cnot, &[0, 1]).unwrap();
        c.gate(GateKind::Cnot, &[2, 0]).unwrap();
        assert_eq!(
            plan_bipartition(&c, &[0, 2], &[0, 1], CutMethod::Pauli),
            Err(CutError::NotComposed { op: 2 })
        );
    }

    #[test]
    fn union_find_fragments_and_json() {
        let mut c = Circuit::new(3);
        c.gate(GateKind::H, &[0]).unwrap();
        c.gate(GateKind::Cnot, &[0, 1]).unwrap();
        c.gate(GateKind::Cnot, &[1, 2]).unwrap();
        c.measure_all("terminal").unwrap();
        let groups = vec![CutGroup {
            position: 2,
            wires: vec![1],
            method: CutMethod::Pauli,
        }];
        let plan = CutPlan::from_groups(&c, groups).unwrap();
        assert_eq!(plan.fragments().len(), 2);
        assert_eq!(plan.fragments()[1].support, vec![1, 2]);
        assert_eq!(plan.per_shot_bound(), 4.0);
        let back = CutPlan::from_json(&plan.to_json(), &c).unwrap();
        assert_eq!(back, plan);
        let bare = CutPlan::from_json(r#"{"groups":[{"position":2,"wires":[1],"method":"pauli"}]}"#, &c).unwrap();
        assert_eq!(bare, plan);
    }

    #[test]
    fn invalid_groups() {
        let c = h_cnot();
        let g = |position, wires: Vec<usize>| CutGroup {
            position,
            wires,
            method: CutMethod::Randomized,
        };
        assert!(matches!(
            CutPlan::from_groups(&c, vec![g(1, vec![1])]),
            Err(CutError::WireNotCuttable { wire: 1, .. })
        ));
        assert!(matches!(
            CutPlan::from_groups(&c, vec![g(1, vec![0]), g(1, vec![0])]),
            Err(CutError::DuplicateCut { wire: 0 })
        ));
        // both ops forced into different fragments without a cut
        assert!(matches!(
            CutPlan::with_assignment(&c, vec![], &[Some(0), Some(1), None]),
            Err(CutError::UncutAdjacency { wire: 0, .. })
        ));
    }

    #[test]
    fn cyclic_communication_is_detected() {
        // wire 0: A then B, wire 1: B then A
        let mut c = Circuit::new(4);
        c.gate(GateKind::Cnot, &[0, 2]).unwrap();
        c.gate(GateKind::Cnot, &[1, 3]).unwrap();
        c.gate(GateKind::Cnot, &[0, 3]).unwrap();
        c.gate(GateKind::Cnot, &[1, 2]).unwrap();
        let groups = vec![
            CutGroup {
                position: 2,
                wires: vec![0],
                method: CutMethod::Randomized,
            },
            CutGroup {
                position: 2,
                wires: vec![1],
                method: CutMethod::Randomized,
            },
        ];
        let plan = CutPlan::with_assignment(&c, groups, &[Some(0), Some(1), Some(1), Some(0)]).unwrap();
        assert!(!plan.is_acyclic());
    }
}
