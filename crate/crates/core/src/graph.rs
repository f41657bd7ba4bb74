//! Unweighted networks: threshold construction, components, BFS distances
//! and whole-network topology.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};

/// Marker for an unreachable pair in a [`DistanceMatrix`].
pub const UNREACHABLE: u32 = u32::MAX;

/// Node-labelled simple graph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    tickers: Vec<String>,
    directed: bool,
    // row-major N x N; adj[i*n+j] means an edge i -> j
    adj: Vec<bool>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl Network {
    /// Builds from an edge list. Undirected edges are stored both ways;
    /// duplicates collapse and self-loops are rejected.
    pub fn from_edges(tickers: Vec<String>, directed: bool, edges: &[(usize, usize)]) -> Result<Self> {
        let n = tickers.len();
        let mut adj = vec![false; n * n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::data(format!("edge ({a},{b}) out of range for {n} nodes")));
            }
            if a == b {
                return Err(Error::data(format!("self-loop on node {a}")));
            }
            adj[a * n + b] = true;
            if !directed {
                adj[b * n + a] = true;
            }
        }
        Ok(Network::from_dense(tickers, directed, adj))
    }

    /// Builds from a dense 0/1 matrix; the diagonal must be zero and an
    /// undirected matrix must be symmetric.
    pub fn from_adjacency(tickers: Vec<String>, directed: bool, matrix: &[Vec<bool>]) -> Result<Self> {
        let n = tickers.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::data("adjacency must be N x N"));
        }
        for i in 0..n {
            if matrix[i][i] {
                return Err(Error::data(format!("self-loop on node {i}")));
            }
            if !directed {
                for j in 0..i {
                    if matrix[i][j] != matrix[j][i] {
                        return Err(Error::data(format!("undirected adjacency asymmetric at ({i},{j})")));
                    }
                }
            }
        }
        let adj = matrix.iter().flatten().copied().collect();
        Ok(Network::from_dense(tickers, directed, adj))
    }

    fn from_dense(tickers: Vec<String>, directed: bool, adj: Vec<bool>) -> Self {
        let n = tickers.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if adj[i * n + j] {
                    out[i].push(j);
                    inc[j].push(i);
                }
            }
        }
        Network {
            tickers,
            directed,
            adj,
            out,
            inc,
        }
    }

    /// Unlabelled convenience constructor (`n0`, `n1`, ...).
    pub fn unlabeled(n: usize, directed: bool, edges: &[(usize, usize)]) -> Result<Self> {
        Network::from_edges((0..n).map(|i| format!("n{i}")).collect(), directed, edges)
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n() + j]
    }

    /// Successors; for undirected graphs, all neighbours.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.inc[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        if self.directed {
            self.out[i].len() + self.inc[i].len()
        } else {
            self.out[i].len()
        }
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out[i].len()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.inc[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    /// Undirected edges as `(i, j)` with `i < j`; directed edges as `(source, target)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for i in 0..self.n() {
            for &j in &self.out[i] {
                if self.directed || i < j {
                    e.push((i, j));
                }
            }
        }
        e
    }

    pub fn n_edges(&self) -> usize {
        let arcs: usize = self.out.iter().map(Vec::len).sum();
        if self.directed {
            arcs
        } else {
            arcs / 2
        }
    }

    /// Edge count over the number of possible edges.
    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        if self.n() < 2 {
            return 0.0;
        }
        let possible = if self.directed { n * (n - 1.0) } else { n * (n - 1.0) / 2.0 };
        self.n_edges() as f64 / possible
    }

    /// Induced subgraph on `nodes`, in the given order.
    pub fn subgraph(&self, nodes: &[usize]) -> Network {
        let m = nodes.len();
        let mut adj = vec![false; m * m];
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate() {
                adj[a * m + b] = self.has_edge(i, j);
            }
        }
        Network::from_dense(
            nodes.iter().map(|&i| self.tickers[i].clone()).collect(),
            self.directed,
            adj,
        )
    }

    /// Undirected view: an edge wherever either direction exists.
    pub fn to_undirected(&self) -> Network {
        if !self.directed {
            return self.clone();
        }
        let n = self.n();
        let mut adj = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                adj[i * n + j] = self.has_edge(i, j) || self.has_edge(j, i);
            }
        }
        Network::from_dense(self.tickers.clone(), false, adj)
    }
}

/// Undirected network with an edge wherever `|rho| >= theta`.
pub fn build_network(matrix: &CorrelationMatrix, theta: f64) -> Network {
    let n = matrix.n();
    let mut adj = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            adj[i * n + j] = i != j && matrix.abs_rho(i, j) >= theta;
        }
    }
    Network::from_dense(matrix.tickers().to_vec(), false, adj)
}

/// Connected components (undirected) or strongly connected components
/// (directed). Members are sorted and components are ordered by their
/// smallest member.
pub fn components(net: &Network) -> Vec<Vec<usize>> {
    let mut comps = if net.directed {
        tarjan_scc(net)
    } else {
        undirected_components(net)
    };
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

fn undirected_components(net: &Network) -> Vec<Vec<usize>> {
    let n = net.n();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in net.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Iterative Tarjan; no recursion so deep chains cannot overflow the stack.
fn tarjan_scc(net: &Network) -> Vec<Vec<usize>> {
    let n = net.n();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;
    // (node, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = net.out[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Size of the largest component, or 0 for an empty graph.
pub fn largest_component_size(net: &Network) -> usize {
    components(net).iter().map(Vec::len).max().unwrap_or(0)
}

/// Members of the largest component; ties go to the component with the
/// smallest member.
pub fn largest_component(net: &Network) -> Vec<usize> {
    let comps = components(net);
    let best = comps.iter().map(Vec::len).max().unwrap_or(0);
    comps.into_iter().find(|c| c.len() == best).unwrap_or_default()
}

/// All-pairs hop counts. `d(i, j)` follows edge direction for directed graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        let v = self.d[i * self.n + j];
        (v != UNREACHABLE).then_some(v)
    }

    /// Raw value, [`UNREACHABLE`] for disconnected pairs.
    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.d[i * self.n + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

pub(crate) fn bfs_from(net: &Network, s: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; net.n()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in net.neighbors(v) {
            if dist[w] == UNREACHABLE {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Breadth-first distances from every source.
pub fn shortest_paths(net: &Network) -> DistanceMatrix {
    let rows: Vec<Vec<u32>> = (0..net.n()).into_par_iter().map(|s| bfs_from(net, s)).collect();
    DistanceMatrix {
        n: net.n(),
        d: rows.into_iter().flatten().collect(),
    }
}

/// Local clustering `2 n_i / (k_i (k_i - 1))`, 0 when `k_i < 2`.
/// Directed graphs are measured on their undirected view.
pub fn local_clustering(net: &Network) -> Vec<f64> {
    let und;
    let g = if net.directed {
        und = net.to_undirected();
        &und
    } else {
        net
    };
    (0..g.n())
        .map(|i| {
            let nb = g.neighbors(i);
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (a, &u) in nb.iter().enumerate() {
                for &v in &nb[a + 1..] {
                    if g.has_edge(u, v) {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

/// Whole-network statistics. Path length and diameter are measured inside
/// the largest component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    /// Mean distance over unordered pairs of the largest component; `None`
    /// when that component has a single node.
    pub avg_path_length: Option<f64>,
    pub clustering: f64,
    pub diameter: u32,
    pub density: f64,
    pub n_components: usize,
    pub largest_component: usize,
}

pub fn topology_summary(net: &Network) -> Result<TopologySummary> {
    let n = net.n();
    if n < 2 {
        return Err(Error::data("topology summary needs at least two nodes"));
    }
    let comps = components(net);
    let best = comps.iter().map(Vec::len).max().unwrap_or(0);
    let giant = comps.iter().find(|c| c.len() == best).cloned().unwrap_or_default();

    // BFS restricted to the giant component is the same as BFS on the full
    // graph from a giant-component source.
    let rows: Vec<Vec<u32>> = giant.par_iter().map(|&s| bfs_from(net, s)).collect();
    let mut total: u64 = 0;
    let mut pairs: u64 = 0;
    let mut diameter = 0u32;
    for (a, row) in rows.iter().enumerate() {
        for (b, &j) in giant.iter().enumerate() {
            if a == b {
                continue;
            }
            let d = row[j];
            if d == UNREACHABLE {
                continue;
            }
            diameter = diameter.max(d);
            if net.directed || b > a {
                total += u64::from(d);
                pairs += 1;
            }
        }
    }
    let clustering = local_clustering(net).iter().sum::<f64>() / n as f64;
    Ok(TopologySummary {
        n_nodes: n,
        n_edges: net.n_edges(),
        avg_path_length: (pairs > 0).then(|| total as f64 / pairs as f64),
        clustering,
        diameter,
        density: net.density(),
        n_components: comps.len(),
        largest_component: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Network {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Network::unlabeled(n, false, &e).unwrap()
    }

    fn complete(n: usize) -> Network {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Network::unlabeled(n, false, &e).unwrap()
    }

    #[test]
    fn threshold_extremes() {
        let names: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let m = CorrelationMatrix::constant(names, -0.3).unwrap();
        assert_eq!(build_network(&m, 0.0).n_edges(), 10);
        assert_eq!(build_network(&m, 0.3).n_edges(), 10);
        assert_eq!(build_network(&m, 0.30001).n_edges(), 0);
        assert_eq!(build_network(&m, 1.01).n_edges(), 0);
    }

    #[test]
    fn components_basic() {
        let g = Network::unlabeled(5, false, &[]).unwrap();
        assert_eq!(components(&g), vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
        let tri = Network::unlabeled(6, false, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(components(&tri), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn scc_directed_cycle_and_tail() {
        let g = Network::unlabeled(4, true, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_eq!(components(&g), vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(largest_component_size(&g), 3);
    }

    #[test]
    fn distances() {
        let g = path(3);
        let d = shortest_paths(&g);
        assert_eq!(d.get(0, 2), Some(2));
        assert_eq!(d.get(1, 1), Some(0));
        let pair = Network::unlabeled(2, false, &[]).unwrap();
        assert_eq!(shortest_paths(&pair).get(0, 1), None);
        assert_eq!(shortest_paths(&pair).raw(0, 1), UNREACHABLE);
    }

    #[test]
    fn complete_graph_summary() {
        let s = topology_summary(&complete(4)).unwrap();
        assert_eq!(s.avg_path_length, Some(1.0));
        assert_eq!(s.clustering, 1.0);
        assert_eq!(s.diameter, 1);
        assert_eq!(s.density, 1.0);
    }

    #[test]
    fn path_graph_summary() {
        let s = topology_summary(&path(4)).unwrap();
        assert_eq!(s.avg_path_length, Some(10.0 / 6.0));
        assert_eq!(s.clustering, 0.0);
        assert_eq!(s.diameter, 3);
        assert_eq!(s.density, 0.5);
    }

    #[test]
    fn triangle_with_pendant() {
        // 0-1-2 triangle, 3 hangs off 2: C = (1, 1, 1/3, 0)
        let g = Network::unlabeled(4, false, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let c = local_clustering(&g);
        assert_eq!(c, vec![1.0, 1.0, 1.0 / 3.0, 0.0]);
        let s = topology_summary(&g).unwrap();
        assert!((s.clustering - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn disconnected_summary_uses_giant() {
        // triangle + isolated pair
        let g = Network::unlabeled(5, false, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        let s = topology_summary(&g).unwrap();
        assert_eq!(s.n_components, 2);
        assert_eq!(s.largest_component, 3);
        assert_eq!(s.avg_path_length, Some(1.0));
        let empty = Network::unlabeled(3, false, &[]).unwrap();
        let s = topology_summary(&empty).unwrap();
        assert_eq!(s.avg_path_length, None);
        assert_eq!(s.diameter, 0);
        assert!(topology_summary(&Network::unlabeled(1, false, &[]).unwrap()).is_err());
    }

    #[test]
    fn adjacency_validation() {
        let t: Vec<String> = vec!["a".into(), "b".into()];
        assert!(Network::from_adjacency(t.clone(), false, &[vec![true, false], vec![false, false]]).is_err());
        assert!(Network::from_adjacency(t.clone(), false, &[vec![false, true], vec![false, false]]).is_err());
        assert!(Network::from_adjacency(t, true, &[vec![false, true], vec![false, false]]).is_ok());
        assert!(Network::unlabeled(2, false, &[(0, 0)]).is_err());
    }
}
