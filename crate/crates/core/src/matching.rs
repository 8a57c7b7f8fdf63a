//! Exact maximum-weight bipartite matching.
//!
//! [`max_weight_matching`] solves a rectangular assignment problem with the
//! shortest-augmenting-path Hungarian method, where every left vertex owns a
//! private zero-cost "stay unmatched" column. The optimal dual potentials are
//! then used to restrict attention to tight edges, and the lexicographically
//! smallest optimal pair list is extracted by alternating-path exchanges.

use crate::error::{invalid, Result, TasError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub weight: f64,
}

/// Bipartite graph with strictly positive edge profits.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBipartiteGraph {
    left_size: usize,
    right_size: usize,
    edges: Vec<Edge>,
}

impl WeightedBipartiteGraph {
    pub fn new(left_size: usize, right_size: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.left >= left_size || e.right >= right_size {
                return Err(invalid(format!(
                    "edge ({}, {}) out of range for a {left_size}x{right_size} graph",
                    e.left, e.right
                )));
            }
            if !e.weight.is_finite() || e.weight <= 0.0 {
                return Err(invalid(format!(
                    "edge ({}, {}) has weight {}; weights must be finite and positive",
                    e.left, e.right, e.weight
                )));
            }
            if !seen.insert((e.left, e.right)) {
                return Err(invalid(format!("duplicate edge ({}, {})", e.left, e.right)));
            }
        }
        Ok(Self { left_size, right_size, edges })
    }

    /// Builds a graph from `(left, right, weight)` triples.
    pub fn from_triples(left_size: usize, right_size: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        let edges = triples.iter().map(|&(left, right, weight)| Edge { left, right, weight }).collect();
        Self::new(left_size, right_size, edges)
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn weight(&self, left: usize, right: usize) -> Option<f64> {
        self.edges.iter().find(|e| e.left == left && e.right == right).map(|e| e.weight)
    }

    fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Matched `(left, right)` pairs sorted ascending.
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: f64,
}

impl Matching {
    fn from_pairs(graph: &WeightedBipartiteGraph, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        let total_weight = pairs.iter().map(|&(l, r)| graph.weight(l, r).expect("matched pair is an edge")).sum();
        Self { pairs, total_weight }
    }

    /// Each side used at most once and every pair an edge of `graph`.
    pub fn is_valid_for(&self, graph: &WeightedBipartiteGraph) -> bool {
        let mut left = vec![false; graph.left_size];
        let mut right = vec![false; graph.right_size];
        for &(l, r) in &self.pairs {
            if l >= graph.left_size || r >= graph.right_size || left[l] || right[r] {
                return false;
            }
            if graph.weight(l, r).is_none() {
                return false;
            }
            left[l] = true;
            right[r] = true;
        }
        true
    }
}

const FILLER: usize = usize::MAX;

/// Maximum total weight matching; among optimal matchings the
/// lexicographically smallest sorted pair list is returned.
pub fn max_weight_matching(graph: &WeightedBipartiteGraph) -> Matching {
    if graph.edges.is_empty() {
        return Matching { pairs: Vec::new(), total_weight: 0.0 };
    }

    // Compress to vertices that carry at least one edge, keeping index order.
    let mut rows: Vec<usize> = graph.edges.iter().map(|e| e.left).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut cols: Vec<usize> = graph.edges.iter().map(|e| e.right).collect();
    cols.sort_unstable();
    cols.dedup();
    let n = rows.len();
    let m = cols.len();
    let width = m + n;

    let mut row_of = vec![usize::MAX; graph.left_size];
    for (i, &l) in rows.iter().enumerate() {
        row_of[l] = i;
    }
    let mut col_of = vec![usize::MAX; graph.right_size];
    for (j, &r) in cols.iter().enumerate() {
        col_of[r] = j;
    }

    // Minimisation costs: -weight on edges, 0 on the row's own dummy column.
    let mut cost = vec![f64::INFINITY; n * width];
    for e in &graph.edges {
        cost[row_of[e.left] * width + col_of[e.right]] = -e.weight;
    }
    for i in 0..n {
        cost[i * width + m + i] = 0.0;
    }

    let (owner, u, v) = hungarian(n, width, &cost);

    let eps = 1e-9 * graph.max_weight().max(1.0);
    let reduced = |i: usize, j: usize| cost[i * width + j] - u[i] - v[j];

    // Tight columns per row, in preference order: real columns ascending,
    // then the dummy.
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..m)
                .chain(std::iter::once(m + i))
                .filter(|&j| cost[i * width + j].is_finite() && reduced(i, j).abs() <= eps)
                .collect()
        })
        .collect();
    // Columns with a strictly negative dual must stay covered.
    let optional: Vec<bool> = (0..width).map(|j| v[j] >= -eps).collect();

    let mut col_owner: Vec<usize> = owner.iter().map(|&o| o.unwrap_or(FILLER)).collect();
    let mut row_col = vec![usize::MAX; n];
    for (j, &o) in col_owner.iter().enumerate() {
        if o != FILLER {
            row_col[o] = j;
        }
    }

    for l in 0..n {
        for &c in &tight[l] {
            if c == row_col[l] {
                break;
            }
            if let Some(path) = exchange_path(l, c, &tight, &optional, &col_owner, &row_col) {
                apply_exchange(l, &path, &mut col_owner, &mut row_col);
                break;
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut total_weight = 0.0;
    for i in (0..n).filter(|&i| row_col[i] < m) {
        pairs.push((rows[i], cols[row_col[i]]));
        total_weight -= cost[i * width + row_col[i]];
    }
    Matching { pairs, total_weight }
}

/// Shortest augmenting path assignment for `n` rows into `width >= n`
/// columns. Returns the column owners and the row/column potentials.
fn hungarian(n: usize, width: usize, cost: &[f64]) -> (Vec<Option<usize>>, Vec<f64>, Vec<f64>) {
    // 1-based internally, index 0 is the virtual source column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; width + 1];
    let mut p = vec![0usize; width + 1];
    let mut way = vec![0usize; width + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; width + 1];
        let mut used = vec![false; width + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            let row = &cost[(i0 - 1) * width..i0 * width];
            for j in 1..=width {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            debug_assert!(delta.is_finite(), "every row owns a finite dummy column");
            for j in 0..=width {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let owner = (1..=width).map(|j| (p[j] != 0).then(|| p[j] - 1)).collect();
    (owner, u[1..].to_vec(), v[1..].to_vec())
}

/// Searches for a chain of column hand-overs that lets row `l` take column
/// `c` while rows `< l` keep their columns. Unused columns are held by
/// interchangeable filler rows that may sit on any optional column.
fn exchange_path(
    l: usize,
    c: usize,
    tight: &[Vec<usize>],
    optional: &[bool],
    col_owner: &[usize],
    row_col: &[usize],
) -> Option<Vec<usize>> {
    let target = row_col[l];
    let movable = |col: usize| {
        let o = col_owner[col];
        o == FILLER || o > l
    };
    if !movable(c) {
        return None;
    }
    let width = col_owner.len();
    let mut parent = vec![usize::MAX; width];
    let mut visited = vec![false; width];
    visited[c] = true;
    let mut queue = std::collections::VecDeque::from([c]);
    let mut fillers_expanded = false;

    while let Some(x) = queue.pop_front() {
        let o = col_owner[x];
        let next: Vec<usize> = if o == FILLER {
            if fillers_expanded {
                continue;
            }
            fillers_expanded = true;
            (0..width).filter(|&y| optional[y]).collect()
        } else {
            tight[o].clone()
        };
        for y in next {
            if y == x {
                continue;
            }
            if y == target {
                parent[y] = x;
                let mut path = vec![target];
                let mut cur = target;
                while cur != c {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            if visited[y] || !movable(y) {
                continue;
            }
            visited[y] = true;
            parent[y] = x;
            queue.push_back(y);
        }
    }
    None
}

/// `path = [c, x1, ..., target]`: row `l` takes `c`, the owner of each
/// column moves to the next one, and the last mover takes `l`'s old column.
fn apply_exchange(l: usize, path: &[usize], col_owner: &mut [usize], row_col: &mut [usize]) {
    let old: Vec<usize> = path.iter().map(|&col| col_owner[col]).collect();
    for k in 0..path.len() - 1 {
        let mover = old[k];
        let dest = path[k + 1];
        col_owner[dest] = mover;
        if mover != FILLER {
            row_col[mover] = dest;
        }
    }
    col_owner[path[0]] = l;
    row_col[l] = path[0];
}

/// Exhaustive enumeration of every matching; both sides at most 8.
///
/// Matchings are visited in lexicographic order of their pair lists, so the
/// first one of maximal weight is returned.
pub fn brute_force_matching(graph: &WeightedBipartiteGraph) -> Result<Matching> {
    const LIMIT: usize = 8;
    if graph.left_size > LIMIT || graph.right_size > LIMIT {
        return Err(TasError::Unsupported(format!(
            "brute force matching supports at most {LIMIT}x{LIMIT}, got {}x{}",
            graph.left_size, graph.right_size
        )));
    }
    let mut adj = vec![Vec::new(); graph.left_size];
    for e in &graph.edges {
        adj[e.left].push((e.right, e.weight));
    }
    for list in &mut adj {
        list.sort_by_key(|&(r, _)| r);
    }

    struct Search<'a> {
        adj: &'a [Vec<(usize, f64)>],
        used: Vec<bool>,
        current: Vec<(usize, usize)>,
        best: Vec<(usize, usize)>,
        best_weight: f64,
    }

    impl Search<'_> {
        fn visit(&mut self, left: usize, weight: f64) {
            if left == self.adj.len() {
                if weight > self.best_weight + 1e-12 * self.best_weight.abs().max(1.0) {
                    self.best_weight = weight;
                    self.best = self.current.clone();
                }
                return;
            }
            for k in 0..self.adj[left].len() {
                let (r, w) = self.adj[left][k];
                if self.used[r] {
                    continue;
                }
                self.used[r] = true;
                self.current.push((left, r));
                self.visit(left + 1, weight + w);
                self.current.pop();
                self.used[r] = false;
            }
            self.visit(left + 1, weight);
        }
    }

    let mut search = Search {
        adj: &adj,
        used: vec![false; graph.right_size],
        current: Vec::new(),
        best: Vec::new(),
        best_weight: 0.0,
    };
    search.visit(0, 0.0);
    Ok(Matching::from_pairs(graph, search.best))
}
