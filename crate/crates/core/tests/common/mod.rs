//! Independent reference implementations and fixtures shared by the
//! integration tests. Nothing here calls into the library's algorithms.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Undirected simple graph as an edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; self.n]; self.n];
        for &(u, v) in &self.edges {
            a[u][v] = true;
            a[v][u] = true;
        }
        a
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn star(n: usize) -> Graph {
        Graph {
            n,
            edges: (1..n).map(|i| (0, i)).collect(),
        }
    }

    pub fn path(n: usize) -> Graph {
        Graph {
            n,
            edges: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Graph { n, edges }
    }

    pub fn cycle(n: usize) -> Graph {
        Graph {
            n,
            edges: (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect(),
        }
    }
}

/// Erdos-Renyi G(n, p).
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph { n, edges }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------- exhaustive small-graph corpus ----------

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * n + b
}

/// Canonical code: relabel vertices by descending degree and take the
/// minimum adjacency bit string over all relabellings that permute only
/// within equal-degree classes.
fn canonical(n: usize, adj: &[Vec<bool>]) -> Vec<bool> {
    let deg: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if deg[c[0]] == deg[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best: Option<Vec<bool>> = None;
    let mut perms: Vec<Vec<Vec<usize>>> = classes.iter().map(|c| permutations(c)).collect();
    let mut idx = vec![0usize; classes.len()];
    loop {
        let labelling: Vec<usize> = perms
            .iter()
            .zip(&idx)
            .flat_map(|(ps, &k)| ps[k].iter().copied())
            .collect();
        let mut code = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                code.push(adj[labelling[a]][labelling[b]]);
            }
        }
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
        // odometer over class permutations
        let mut c = 0;
        loop {
            if c == idx.len() {
                perms.clear();
                return best.unwrap_or_default();
            }
            idx[c] += 1;
            if idx[c] < perms[c].len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// All connected simple graphs on `n` nodes up to isomorphism, for
/// `1 <= n <= max_n`. Every connected graph has a non-cut vertex, so each
/// one arises from a connected graph on `n - 1` nodes plus a vertex joined
/// to a non-empty subset.
pub fn connected_graphs(max_n: usize) -> Vec<Graph> {
    let mut all = vec![Graph { n: 1, edges: vec![] }];
    let mut prev = vec![Graph { n: 1, edges: vec![] }];
    for n in 2..=max_n {
        let mut seen = std::collections::HashSet::new();
        let mut next = Vec::new();
        for g in &prev {
            for mask in 1u32..(1 << (n - 1)) {
                let mut edges = g.edges.clone();
                for v in 0..n - 1 {
                    if mask & (1 << v) != 0 {
                        edges.push((v, n - 1));
                    }
                }
                let h = Graph { n, edges };
                if seen.insert(canonical(n, &h.adjacency())) {
                    next.push(h);
                }
            }
        }
        let _ = pair_index;
        all.extend(next.iter().cloned());
        prev = next;
    }
    all
}

// ---------- brute-force metric oracles ----------

/// Floyd-Warshall hop distances; `None` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.n;
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v) in &g.edges {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|r| r.into_iter().map(|x| (x < inf).then_some(x)).collect())
        .collect()
}

/// Explicitly enumerates every shortest path between every unordered pair
/// and counts how many pass through each interior node. Normalized by
/// `(N-1)(N-2)/2`.
pub fn betweenness_by_enumeration(g: &Graph) -> Vec<f64> {
    let n = g.n;
    let adj = g.adjacency();
    let d = floyd_warshall(g);
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let Some(len) = d[s][t] else { continue };
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(p) = stack.pop() {
                let last = *p.last().unwrap();
                if last == t {
                    paths.push(p);
                    continue;
                }
                if p.len() as u32 > len {
                    continue;
                }
                for w in 0..n {
                    if adj[last][w] && d[w][t] == Some(len - p.len() as u32) {
                        let mut q = p.clone();
                        q.push(w);
                        stack.push(q);
                    }
                }
            }
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    score[v] += 1.0 / total;
                }
            }
        }
    }
    if n < 3 {
        return score;
    }
    let norm = ((n - 1) * (n - 2)) as f64 / 2.0;
    score.into_iter().map(|x| x / norm).collect()
}

/// Local clustering by counting triangles through each node.
pub fn clustering_by_triangles(g: &Graph) -> Vec<f64> {
    let adj = g.adjacency();
    let n = g.n;
    (0..n)
        .map(|i| {
            let k = (0..n).filter(|&j| adj[i][j]).count();
            if k < 2 {
                return 0.0;
            }
            let mut tri = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if adj[i][a] && adj[i][b] && adj[a][b] {
                        tri += 1;
                    }
                }
            }
            2.0 * tri as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

/// Connected components as sets of nodes, by repeated reachability.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let d = floyd_warshall(g);
    let mut seen = vec![false; g.n];
    let mut out = Vec::new();
    for i in 0..g.n {
        if seen[i] {
            continue;
        }
        let c: Vec<usize> = (0..g.n).filter(|&j| d[i][j].is_some()).collect();
        for &j in &c {
            seen[j] = true;
        }
        out.push(c);
    }
    out
}

/// `(n_c - 1) / sum of distances` within each node's component; 0 if isolated.
pub fn closeness_oracle(g: &Graph) -> Vec<f64> {
    let d = floyd_warshall(g);
    (0..g.n)
        .map(|i| {
            let reach: Vec<u32> = d[i].iter().flatten().copied().collect();
            let sum: u32 = reach.iter().sum();
            if reach.len() < 2 {
                0.0
            } else {
                (reach.len() - 1) as f64 / sum as f64
            }
        })
        .collect()
}

pub struct GraphOracle {
    pub density: f64,
    pub clustering: f64,
    pub avg_path_length: Option<f64>,
    pub diameter: u32,
    pub degree: Vec<f64>,
    pub betweenness: Vec<f64>,
    pub closeness: Vec<f64>,
    pub centralization: (f64, f64, f64),
}

pub fn oracle(g: &Graph) -> GraphOracle {
    let n = g.n;
    let nf = n as f64;
    let d = floyd_warshall(g);
    let comps = components(g);
    let big = comps.iter().map(Vec::len).max().unwrap();
    // first (lowest-numbered) component of maximum size
    let giant = comps.iter().find(|c| c.len() == big).unwrap();
    let mut total = 0u64;
    let mut pairs = 0u64;
    let mut diameter = 0;
    for (a, &i) in giant.iter().enumerate() {
        for &j in &giant[a + 1..] {
            let x = d[i][j].unwrap();
            total += u64::from(x);
            pairs += 1;
            diameter = diameter.max(x);
        }
    }
    let degree: Vec<f64> = g.degrees().iter().map(|&k| k as f64 / (nf - 1.0)).collect();
    let betweenness = betweenness_by_enumeration(g);
    let closeness = closeness_oracle(g);
    let spread = |v: &[f64]| {
        let m = v.iter().cloned().fold(f64::MIN, f64::max);
        v.iter().map(|x| m - x).sum::<f64>()
    };
    let centralization = (
        spread(&degree) / (nf - 2.0),
        spread(&betweenness) / (nf - 1.0),
        spread(&closeness) * (2.0 * nf - 3.0) / ((nf - 1.0) * (nf - 2.0)),
    );
    GraphOracle {
        density: 2.0 * g.edges.len() as f64 / (nf * (nf - 1.0)),
        clustering: clustering_by_triangles(g).iter().sum::<f64>() / nf,
        avg_path_length: (pairs > 0).then(|| total as f64 / pairs as f64),
        diameter,
        degree,
        betweenness,
        closeness,
        centralization,
    }
}

// ---------- discrete power-law sampler ----------

/// Inverse-CDF sampler for `P(k) = k^-lambda / Z` on `k >= xmin`.
///
/// Probabilities up to `cutoff` are tabulated by direct summation; the
/// remaining tail mass is approximated by `int_{cutoff+1/2}^inf x^-lambda dx`
/// and sampled from the matching continuous law.
pub struct PowerLawSampler {
    xmin: usize,
    lambda: f64,
    cdf: Vec<f64>,
    tail: f64,
    cutoff: usize,
}

impl PowerLawSampler {
    pub fn new(lambda: f64, xmin: usize) -> Self {
        let cutoff = 200_000;
        let weights: Vec<f64> = (xmin..=cutoff).map(|k| (k as f64).powf(-lambda)).collect();
        let tail = (cutoff as f64 + 0.5).powf(1.0 - lambda) / (lambda - 1.0);
        // sum from the smallest terms up for accuracy
        let head: f64 = weights.iter().rev().sum();
        let z = head + tail;
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / z;
                acc
            })
            .collect();
        PowerLawSampler {
            xmin,
            lambda,
            cdf,
            tail: tail / z,
            cutoff,
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        let last = *self.cdf.last().unwrap();
        if u >= last {
            // continuous tail beyond the table
            let v = (u - last) / self.tail;
            let x = (self.cutoff as f64 + 0.5) * (1.0 - v.min(1.0 - 1e-12)).powf(-1.0 / (self.lambda - 1.0));
            return x.round().max((self.cutoff + 1) as f64) as usize;
        }
        self.xmin + self.cdf.partition_point(|&c| c < u)
    }
}

// ---------- fixtures ----------

/// Twelve price rows: tickers A and B over six weekly dates, with B
/// missing 2020-01-24 and one malformed row (line 9).
pub const TWELVE_ROWS: &str = "\
date,ticker,close
2020-01-03,A,10.0
2020-01-03,B,20.0
2020-01-10,A,10.5
2020-01-10,B,19.0
2020-01-17,A,11.0
2020-01-17,B,19.5
2020-01-24,A,10.8
2020-01-24,B,abc
2020-01-31,A,11.2
2020-01-31,B,21.0
2020-02-07,A,11.1
2020-02-07,B,20.5
";

/// Independent Pearson correlation of two slices.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}
