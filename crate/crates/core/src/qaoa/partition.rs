use std::collections::BTreeSet;

use super::{Graph, QaoaError, Result, VertexLabel};

/// Disjoint edge subsets covering the edge set, one per subgraph `g_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePartition {
    pub subsets: Vec<Vec<(usize, usize)>>,
}

impl EdgePartition {
    pub fn new(graph: &Graph, subsets: Vec<Vec<(usize, usize)>>) -> Result<EdgePartition> {
        let mut seen = BTreeSet::new();
        for s in &subsets {
            for &e in s {
                if !graph.edges().contains(&e) {
                    return Err(QaoaError::InvalidPartition(format!("{e:?} is not an edge")));
                }
                if !seen.insert(e) {
                    return Err(QaoaError::InvalidPartition(format!("{e:?} appears twice")));
                }
            }
        }
        if seen.len() != graph.num_edges() {
            return Err(QaoaError::InvalidPartition("subsets do not cover every edge".into()));
        }
        Ok(EdgePartition { subsets })
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// `V(g_i)`, the vertices touched by subset `i`, sorted.
    pub fn vertices(&self, i: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.subsets[i].iter().flat_map(|&(a, b)| [a, b]).collect();
        set.into_iter().collect()
    }

    /// `|V(g_i) ∩ V(g_j)|` for every pair `i < j` with a non-empty overlap.
    pub fn overlaps(&self) -> Vec<(usize, usize, usize)> {
        let verts: Vec<BTreeSet<usize>> = (0..self.len())
            .map(|i| self.vertices(i).into_iter().collect())
            .collect();
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let c = verts[i].intersection(&verts[j]).count();
                if c > 0 {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    /// κ, the largest pairwise overlap.
    pub fn kappa(&self) -> usize {
        self.overlaps().iter().map(|o| o.2).max().unwrap_or(0)
    }
}

/// Two-subset partition from a vertex separator `s`. Components of `G − s`
/// are merged greedily into two sides; `E_2` is the edge set induced on the
/// smaller side plus `s`, `E_1` the remaining edges.
pub fn separator_partition(graph: &Graph, s: &[usize]) -> Result<EdgePartition> {
    let mut comps = graph.components_without(s);
    if comps.len() < 2 {
        return Err(QaoaError::NotSeparating);
    }
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let (mut left, mut right): (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
    for c in comps {
        if left.len() <= right.len() {
            left.extend(c);
        } else {
            right.extend(c);
        }
    }
    let nv = graph.num_vertices() as f64;
    if left.len().max(right.len()) as f64 > 2.0 * nv / 3.0 {
        log::warn!(
            "separator leaves sides of {} and {} vertices, above 2n/3",
            left.len(),
            right.len()
        );
    }
    let small: BTreeSet<usize> = if right.len() < left.len() { right } else { left }
        .into_iter()
        .chain(s.iter().copied())
        .collect();
    let (e2, e1): (Vec<_>, Vec<_>) = graph
        .edges()
        .iter()
        .partition(|(a, b)| small.contains(a) && small.contains(b));
    EdgePartition::new(graph, vec![e1, e2])
}

/// `r`-subset partition of a labelled chain instance: subset `i` holds the
/// edges inside cluster `i` and those between cluster `i` and a separator.
pub fn chain_partition(graph: &Graph) -> Result<EdgePartition> {
    let labels = graph.labels();
    let r = labels
        .iter()
        .filter_map(|l| match l {
            Some(VertexLabel::Cluster(i)) => Some(i + 1),
            _ => None,
        })
        .max()
        .ok_or_else(|| QaoaError::InvalidPartition("graph has no cluster labels".into()))?;
    let mut subsets = vec![Vec::new(); r];
    for &(a, b) in graph.edges() {
        let cluster = [labels[a], labels[b]].into_iter().find_map(|l| match l {
            Some(VertexLabel::Cluster(i)) => Some(i),
            _ => None,
        });
        match cluster {
            Some(i) => subsets[i].push((a, b)),
            None => {
                return Err(QaoaError::InvalidPartition(format!(
                    "edge ({a}, {b}) has no cluster endpoint"
                )))
            }
        }
    }
    EdgePartition::new(graph, subsets)
}

/// Smallest vertex set of size at most `max_size` whose removal leaves parts
/// no larger than `2n/3` after greedy two-side merging. Exhaustive; intended
/// for graphs of at most 12 vertices.
pub fn find_balanced_separator(graph: &Graph, max_size: usize) -> Result<Vec<usize>> {
    let n = graph.num_vertices();
    if n > 12 {
        return Err(QaoaError::InvalidGraph(format!(
            "exhaustive separator search is limited to 12 vertices, got {n}"
        )));
    }
    for size in 1..=max_size.min(n) {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize != size {
                continue;
            }
            let s: Vec<usize> = (0..n).filter(|&v| (mask >> v) & 1 == 1).collect();
            let mut comps = graph.components_without(&s);
            if comps.len() < 2 {
                continue;
            }
            comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
            let (mut l, mut r) = (0, 0);
            for c in comps {
                if l <= r {
                    l += c.len();
                } else {
                    r += c.len();
                }
            }
            let larger = l.max(r);
            if 3 * larger <= 2 * n && best.as_ref().is_none_or(|(b, _)| larger < *b) {
                best = Some((larger, s));
            }
        }
        if let Some((_, s)) = best {
            return Ok(s);
        }
    }
    Err(QaoaError::NoSeparator { max_size })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qaoa::{generate_clustered_graph, ClusteredGraphSpec};

    #[test]
    fn chain_separator_overlap_is_k() {
        for seed in 0..5 {
            let spec = ClusteredGraphSpec::new(2, 5, 2, seed);
            let g = generate_clustered_graph(&spec).unwrap();
            let sep = g.vertices_with(VertexLabel::Separator(0));
            let part = separator_partition(&g, &sep).unwrap();
            let v1: BTreeSet<_> = part.vertices(0).into_iter().collect();
            let v2: BTreeSet<_> = part.vertices(1).into_iter().collect();
            let overlap: Vec<_> = v1.intersection(&v2).copied().collect();
            assert!(overlap.iter().all(|v| sep.contains(v)));
            assert!(overlap.len() <= 2);
        }
    }

    #[test]
    fn non_separating_set_is_rejected() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(separator_partition(&g, &[0]), Err(QaoaError::NotSeparating));
    }

    #[test]
    fn path_separator() {
        // 0-1-2-3-4: removing 2 splits evenly
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(find_balanced_separator(&g, 3).unwrap(), vec![2]);
        let part = separator_partition(&g, &[2]).unwrap();
        assert_eq!(part.kappa(), 1);
    }

    #[test]
    fn chain_partition_covers_edges() {
        let g = generate_clustered_graph(&ClusteredGraphSpec::new(3, 4, 1, 3)).unwrap();
        let part = chain_partition(&g).unwrap();
        assert_eq!(part.len(), 3);
        assert!(part.kappa() <= 1);
        assert!(EdgePartition::new(&g, vec![g.edges().to_vec(), vec![g.edges()[0]]]).is_err());
    }
}
