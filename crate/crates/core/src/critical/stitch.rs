//! Euler circuits through the vertex graph of the critical set.

use super::trace::Arc;
use crate::error::{Error, Result};

/// Directed multigraph edges `(from, to)`; returns the arc indices of each
/// connected component, ordered as an Euler circuit (Hierholzer).
pub fn euler_circuits(edges: &[(usize, usize)], vertex_count: usize) -> Result<Vec<Vec<usize>>> {
    let mut inn = vec![0usize; vertex_count];
    let mut out = vec![0usize; vertex_count];
    let mut parent: Vec<usize> = (0..vertex_count).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        out[a] += 1;
        inn[b] += 1;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    for v in 0..vertex_count {
        if inn[v] != out[v] {
            return Err(Error::UnbalancedVertex {
                vertex: v,
                inn: inn[v],
                out: out[v],
            });
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
    for (i, &(a, _)) in edges.iter().enumerate().rev() {
        adj[a].push(i);
    }
    let mut seen_root = vec![false; vertex_count];
    let mut circuits = Vec::new();
    for v in 0..vertex_count {
        let root = find(&mut parent, v);
        if adj[v].is_empty() || seen_root[root] {
            continue;
        }
        seen_root[root] = true;
        let mut stack: Vec<(usize, Option<usize>)> = vec![(v, None)];
        let mut circuit = Vec::new();
        while let Some(&(u, via)) = stack.last() {
            if let Some(e) = adj[u].pop() {
                stack.push((edges[e].1, Some(e)));
            } else {
                stack.pop();
                if let Some(e) = via {
                    circuit.push(e);
                }
            }
        }
        circuit.reverse();
        circuits.push(circuit);
    }
    let total: usize = circuits.iter().map(Vec::len).sum();
    if total != edges.len() {
        return Err(Error::DegenerateMap(format!(
            "euler circuits cover {total} of {} arcs",
            edges.len()
        )));
    }
    Ok(circuits)
}

pub fn arc_edges(arcs: &[Arc]) -> Vec<(usize, usize)> {
    arcs.iter().map(|a| (a.from, a.to)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_circles_through_two_vertices() {
        // vertex 0 and 1, four arcs alternating
        let edges = [(0, 1), (1, 0), (0, 1), (1, 0)];
        let c = euler_circuits(&edges, 2).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len(), 4);
        for w in c[0].windows(2) {
            assert_eq!(edges[w[0]].1, edges[w[1]].0);
        }
        assert_eq!(edges[*c[0].last().unwrap()].1, edges[c[0][0]].0);
    }

    #[test]
    fn self_loops_and_components() {
        let edges = [(0, 0), (0, 0), (1, 2), (2, 1)];
        let c = euler_circuits(&edges, 3).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.iter().map(Vec::len).sum::<usize>(), 4);
    }

    #[test]
    fn unbalanced_vertex_is_reported() {
        let edges = [(0, 1), (1, 0), (0, 1)];
        assert!(matches!(
            euler_circuits(&edges, 2),
            Err(Error::UnbalancedVertex { .. })
        ));
    }
}
