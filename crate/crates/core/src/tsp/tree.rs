//! Classical TSP on trees: the optimal walk traverses every edge of the span
//! twice except those on the start–end path.

use crate::error::{Error, Result};
use crate::space::SpanTree;

/// End node of a tree walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeEnd {
    Fixed(usize),
    Free,
    Closed,
}

/// Undirected adjacency of a span tree, reusable across many walks.
#[derive(Clone, Debug)]
pub struct TreeIndex {
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl TreeIndex {
    pub fn new(t: &SpanTree) -> Self {
        let n = t.node_count();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for v in 0..n {
            if v != t.root {
                adj[v].push((t.parent[v], t.len[v]));
                adj[t.parent[v]].push((v, t.len[v]));
            }
        }
        for a in adj.iter_mut() {
            a.sort_by_key(|&(w, _)| w);
        }
        TreeIndex { adj }
    }

    /// Optimal walk from `s` visiting every node of `targets` (given in
    /// priority order) and ending per `end`. Returns the length and the node
    /// sequence. Branches are explored by the smallest target rank they
    /// contain; the branch holding the end comes last.
    pub fn walk(&self, s: usize, targets: &[usize], end: NodeEnd) -> (f64, Vec<usize>) {
        let n = self.adj.len();
        // Orient the tree away from s.
        let mut par = vec![usize::MAX; n];
        let mut plen = vec![0.0; n];
        let mut order = Vec::with_capacity(n);
        par[s] = s;
        order.push(s);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(w, l) in &self.adj[u] {
                if par[w] == usize::MAX {
                    par[w] = u;
                    plen[w] = l;
                    order.push(w);
                }
            }
        }
        // rank[v]: smallest target rank in the subtree of v; usize::MAX if none.
        let mut rank = vec![usize::MAX; n];
        for (r, &t) in targets.iter().enumerate() {
            if rank[t] > r {
                rank[t] = r;
            }
        }
        let mut dist = vec![0.0; n];
        for &u in &order[1..] {
            dist[u] = dist[par[u]] + plen[u];
        }
        for &u in order.iter().rev() {
            if u != s && rank[u] < rank[par[u]] {
                rank[par[u]] = rank[u];
            }
        }
        let e = match end {
            NodeEnd::Fixed(e) => e,
            NodeEnd::Closed => s,
            NodeEnd::Free => {
                // farthest target; ties to the smaller rank
                let mut best = s;
                let mut best_d = -1.0;
                for &t in targets {
                    if dist[t] > best_d + crate::TOL {
                        best = t;
                        best_d = dist[t];
                    }
                }
                best
            }
        };
        let mut on_path = vec![false; n];
        let mut v = e;
        on_path[v] = true;
        while v != s {
            v = par[v];
            on_path[v] = true;
        }
        let mut total = 0.0;
        let mut walk = vec![s];
        // iterative DFS: (node, child cursor)
        let kids = |u: usize| -> Vec<usize> {
            let mut c: Vec<usize> = self.adj[u]
                .iter()
                .map(|&(w, _)| w)
                .filter(|&w| par[w] == u && w != s && (rank[w] != usize::MAX || on_path[w]))
                .collect();
            c.sort_by_key(|&w| (on_path[w], rank[w], w));
            c
        };
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(s, kids(s), 0)];
        while let Some(top) = stack.last_mut() {
            let (u, ref ch, ref mut i) = *top;
            if *i < ch.len() {
                let w = ch[*i];
                *i += 1;
                total += plen[w];
                walk.push(w);
                let k = kids(w);
                stack.push((w, k, 0));
            } else {
                stack.pop();
                if !on_path[u] {
                    let p = par[u];
                    total += plen[u];
                    walk.push(p);
                }
            }
        }
        (total, walk)
    }
}

/// Orders `targets` by their last appearance in a node walk (ties by
/// position in `targets`).
pub fn last_visit_nodes(walk: &[usize], targets: &[usize], n_nodes: usize) -> Vec<usize> {
    let mut last = vec![usize::MAX; n_nodes];
    for (i, &v) in walk.iter().enumerate() {
        last[v] = i;
    }
    let mut idx: Vec<usize> = (0..targets.len()).collect();
    idx.sort_by_key(|&i| (last[targets[i]], i));
    idx
}

/// The (q, L')-scan: optimal walk from the root visiting the leaves `leaves`
/// and ending at `q`, which must lie on the root path of one of them.
pub fn tree_scan(t: &SpanTree, q: usize, leaves: &[usize]) -> Result<(f64, Vec<usize>)> {
    let on_some_path = leaves.iter().any(|&l| t.root_path(l).contains(&q));
    if !on_some_path {
        return Err(Error::InvalidInstance(format!("node {q} is not on a path to the chosen leaves")));
    }
    Ok(TreeIndex::new(t).walk(t.root, leaves, NodeEnd::Fixed(q)))
}
