//! Rooted weighted trees: the space payload and the trimmed "span" trees built
//! over a finite set of points.

use super::Point;
use crate::error::{Error, Result};
use crate::TOL;

/// A rooted tree with node 0 as the origin. Edge `v` joins `parent[v]` to `v`.
/// Leaf edges may have infinite length.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTree {
    parent: Vec<usize>,
    len: Vec<f64>,
    children: Vec<Vec<usize>>,
    level: Vec<usize>,
    depth: Vec<f64>,
}

impl WeightedTree {
    /// Builds a tree from `(parent, child, length)` triples; `None` length is
    /// an unbounded leaf edge.
    pub fn from_edges(edges: &[(usize, usize, Option<f64>)]) -> Result<Self> {
        let n = edges.len() + 1;
        let mut parent = vec![usize::MAX; n];
        let mut len = vec![0.0; n];
        for &(p, c, l) in edges {
            if p >= n || c >= n || c == 0 {
                return Err(Error::InvalidSpace(format!(
                    "edge ({p},{c}) must use node ids 0..{n} with the root 0 never a child"
                )));
            }
            if parent[c] != usize::MAX {
                return Err(Error::InvalidSpace(format!("node {c} has two parents")));
            }
            parent[c] = p;
            len[c] = l.unwrap_or(f64::INFINITY);
        }
        parent[0] = 0;
        let mut children = vec![Vec::new(); n];
        for v in 1..n {
            children[parent[v]].push(v);
        }
        // BFS from the root to detect cycles / disconnected nodes.
        let mut level = vec![usize::MAX; n];
        let mut depth = vec![0.0; n];
        level[0] = 0;
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &c in &children[u] {
                level[c] = level[u] + 1;
                depth[c] = depth[u] + len[c];
                queue.push(c);
            }
        }
        if queue.len() != n {
            return Err(Error::InvalidSpace("tree edges are not connected to the root".into()));
        }
        Ok(WeightedTree { parent, len, children, level, depth })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn edge_len(&self, v: usize) -> f64 {
        self.len[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn node_depth(&self, v: usize) -> f64 {
        self.depth[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize, Option<f64>)> {
        (1..self.node_count())
            .map(|v| (self.parent[v], v, self.len[v].is_finite().then_some(self.len[v])))
            .collect()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for v in 1..self.node_count() {
            let l = self.len[v];
            if l.is_nan() || l <= 0.0 {
                out.push(format!("edge {v} has nonpositive length {l}"));
            }
            if l.is_infinite() && !self.children[v].is_empty() {
                out.push(format!("edge {v} is unbounded but not a leaf edge"));
            }
        }
        out
    }

    pub fn node_point(&self, v: usize) -> Point {
        if v == 0 {
            Point::Tree { edge: 0, offset: 0.0 }
        } else {
            Point::Tree { edge: v, offset: self.len[v] }
        }
    }

    /// Canonical form: points at offset 0 are moved to the parent node.
    pub fn normalize(&self, edge: usize, offset: f64) -> Result<(usize, f64)> {
        if edge >= self.node_count() {
            return Err(Error::OutOfSpace(format!("tree edge {edge} does not exist")));
        }
        if edge == 0 {
            if offset.abs() > TOL {
                return Err(Error::OutOfSpace("root carries no edge offset".into()));
            }
            return Ok((0, 0.0));
        }
        if !(offset >= -TOL && offset <= self.len[edge] + TOL) {
            return Err(Error::OutOfSpace(format!(
                "offset {offset} outside edge {edge} of length {}",
                self.len[edge]
            )));
        }
        if offset <= TOL {
            let p = self.parent[edge];
            return Ok(if p == 0 { (0, 0.0) } else { (p, self.len[p]) });
        }
        Ok((edge, offset.min(self.len[edge])))
    }

    fn point_depth(&self, edge: usize, offset: f64) -> f64 {
        if edge == 0 {
            0.0
        } else {
            self.depth[self.parent[edge]] + offset
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.level[a] > self.level[b] {
            a = self.parent[a];
        }
        while self.level[b] > self.level[a] {
            b = self.parent[b];
        }
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
        }
        a
    }

    pub fn distance(&self, a: (usize, f64), b: (usize, f64)) -> f64 {
        let (da, db) = (self.point_depth(a.0, a.1), self.point_depth(b.0, b.1));
        if a.0 == b.0 {
            return (a.1 - b.1).abs();
        }
        let w = self.lca(a.0, b.0);
        if w == a.0 || w == b.0 {
            (da - db).abs()
        } else {
            da + db - 2.0 * self.depth[w]
        }
    }

    /// The point `h` above `p` on its root path.
    fn ascend(&self, p: (usize, f64), mut h: f64) -> (usize, f64) {
        let (mut v, mut o) = p;
        loop {
            if v == 0 {
                return (0, 0.0);
            }
            if h <= o + TOL {
                let off = (o - h).max(0.0);
                return self.normalize(v, off).unwrap_or((0, 0.0));
            }
            h -= o;
            v = self.parent[v];
            if v == 0 {
                return (0, 0.0);
            }
            o = self.len[v];
        }
    }

    pub fn move_along(&self, a: (usize, f64), b: (usize, f64), s: f64) -> (usize, f64) {
        let total = self.distance(a, b);
        let (da, db) = (self.point_depth(a.0, a.1), self.point_depth(b.0, b.1));
        if a.0 == b.0 {
            let off = if b.1 >= a.1 { a.1 + s } else { a.1 - s };
            return self.normalize(a.0, off).unwrap_or(a);
        }
        let w = self.lca(a.0, b.0);
        if w == a.0 {
            // a lies above b
            self.ascend(b, total - s)
        } else if w == b.0 {
            self.ascend(a, s)
        } else {
            let up = da - self.depth[w];
            if s <= up {
                self.ascend(a, s)
            } else {
                let _ = db;
                self.ascend(b, total - s)
            }
        }
    }
}

/// A finite rooted tree whose nodes carry the space point they stand for.
/// Built by trimming a space over a point set; used by the tree solvers and
/// the tree oracle.
#[derive(Clone, Debug)]
pub struct SpanTree {
    pub root: usize,
    pub parent: Vec<usize>,
    pub len: Vec<f64>,
    pub children: Vec<Vec<usize>>,
    pub label: Vec<Point>,
    /// Whether the node hosts one of the points the tree was built from.
    pub marked: Vec<bool>,
}

impl SpanTree {
    pub fn single(label: Point) -> Self {
        SpanTree {
            root: 0,
            parent: vec![0],
            len: vec![0.0],
            children: vec![Vec::new()],
            label: vec![label],
            marked: vec![true],
        }
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn add_child(&mut self, parent: usize, len: f64, label: Point, marked: bool) -> usize {
        let id = self.parent.len();
        self.parent.push(parent);
        self.len.push(len);
        self.children.push(Vec::new());
        self.label.push(label);
        self.marked.push(marked);
        self.children[parent].push(id);
        id
    }

    pub fn total_length(&self) -> f64 {
        (0..self.node_count()).filter(|&v| v != self.root).map(|v| self.len[v]).sum()
    }

    /// Nodes in BFS order from the root.
    pub fn bfs(&self) -> Vec<usize> {
        let mut order = vec![self.root];
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            order.extend(self.children[u].iter().copied());
        }
        order
    }

    pub fn depths(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.node_count()];
        for u in self.bfs() {
            for &c in &self.children[u] {
                d[c] = d[u] + self.len[c];
            }
        }
        d
    }

    /// Leaves: non-root nodes without children (the root counts only when it
    /// is the sole node).
    pub fn leaves(&self) -> Vec<usize> {
        if self.node_count() == 1 {
            return vec![self.root];
        }
        (0..self.node_count())
            .filter(|&v| v != self.root && self.children[v].is_empty())
            .collect()
    }

    /// Path from `v` up to the root, inclusive on both ends.
    pub fn root_path(&self, mut v: usize) -> Vec<usize> {
        let mut p = vec![v];
        while v != self.root {
            v = self.parent[v];
            p.push(v);
        }
        p
    }

    /// Re-hangs the tree from `new_root`; same nodes, same labels, same metric.
    pub fn reroot(&self, new_root: usize) -> SpanTree {
        let n = self.node_count();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for v in 0..n {
            if v != self.root {
                adj[v].push((self.parent[v], self.len[v]));
                adj[self.parent[v]].push((v, self.len[v]));
            }
        }
        let mut parent = vec![usize::MAX; n];
        let mut len = vec![0.0; n];
        let mut children = vec![Vec::new(); n];
        parent[new_root] = new_root;
        let mut stack = vec![new_root];
        let mut seen = vec![false; n];
        seen[new_root] = true;
        let mut order = Vec::new();
        while let Some(u) = stack.pop() {
            order.push(u);
            for &(w, l) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = u;
                    len[w] = l;
                    children[u].push(w);
                    stack.push(w);
                }
            }
        }
        for c in children.iter_mut() {
            c.sort_unstable();
        }
        SpanTree {
            root: new_root,
            parent,
            len,
            children,
            label: self.label.clone(),
            marked: self.marked.clone(),
        }
    }

    /// Distances from `src` to every node.
    pub fn distances_from(&self, src: usize) -> Vec<f64> {
        let n = self.node_count();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for v in 0..n {
            if v != self.root {
                adj[v].push((self.parent[v], self.len[v]));
                adj[self.parent[v]].push((v, self.len[v]));
            }
        }
        let mut d = vec![f64::INFINITY; n];
        d[src] = 0.0;
        let mut stack = vec![src];
        while let Some(u) = stack.pop() {
            for &(w, l) in &adj[u] {
                if d[w].is_infinite() {
                    d[w] = d[u] + l;
                    stack.push(w);
                }
            }
        }
        d
    }

    /// Drops subtrees without marked nodes and contracts unmarked non-root
    /// nodes with a single child. Returns the new tree and the old→new map.
    pub fn prune(&self) -> (SpanTree, Vec<Option<usize>>) {
        let n = self.node_count();
        let order = self.bfs();
        let mut keep = self.marked.clone();
        keep[self.root] = true;
        for &u in order.iter().rev() {
            if keep[u] && u != self.root {
                keep[self.parent[u]] = true;
            }
        }
        let mut map = vec![None; n];
        let mut out = SpanTree::single(self.label[self.root].clone());
        out.marked[0] = self.marked[self.root];
        map[self.root] = Some(0);
        // (old node, new attach point, accumulated length)
        let mut stack: Vec<(usize, usize, f64)> = Vec::new();
        for &c in self.children[self.root].iter().rev() {
            stack.push((c, 0, 0.0));
        }
        while let Some((u, attach, acc)) = stack.pop() {
            if !keep[u] {
                continue;
            }
            let kept_children: Vec<usize> =
                self.children[u].iter().copied().filter(|&c| keep[c]).collect();
            let l = acc + self.len[u];
            if !self.marked[u] && kept_children.len() == 1 {
                stack.push((kept_children[0], attach, l));
                continue;
            }
            let id = out.add_child(attach, l, self.label[u].clone(), self.marked[u]);
            map[u] = Some(id);
            for &c in kept_children.iter().rev() {
                stack.push((c, id, 0.0));
            }
        }
        (out, map)
    }
}

/// Trims `tree` to the union of root paths of `points`. Every point maps to a
/// node (coincident points share one). Contracts unmarked degree-2 vertices.
pub fn trim_tree(tree: &WeightedTree, points: &[(usize, f64)]) -> (SpanTree, Vec<usize>) {
    let n = tree.node_count();
    // Distinct offsets per edge (edge 0 = root).
    let mut on_edge: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &(e, o) in points {
        if e != 0 {
            on_edge[e].push(o);
        }
    }
    for offs in on_edge.iter_mut() {
        offs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        offs.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    }
    let mut needed = vec![false; n];
    for v in 1..n {
        if !on_edge[v].is_empty() {
            let mut u = v;
            while u != 0 && !needed[u] {
                needed[u] = true;
                u = tree.parent(u);
            }
        }
    }
    let mut full = SpanTree::single(tree.node_point(0));
    full.marked[0] = points.iter().any(|&(e, _)| e == 0);
    // (edge, offset, node) for point lookup
    let mut index: Vec<(usize, f64, usize)> = vec![(0, 0.0, 0)];
    let mut stack = vec![(0usize, 0usize)];
    while let Some((u, node_u)) = stack.pop() {
        for &v in tree.children(u) {
            if !needed[v] {
                continue;
            }
            let mut prev = node_u;
            let mut prev_off = 0.0;
            let l = tree.edge_len(v);
            let has_below = tree.children(v).iter().any(|&c| needed[c]);
            for &o in &on_edge[v] {
                let at_end = l.is_finite() && o >= l - TOL;
                if at_end {
                    break;
                }
                let id = full.add_child(prev, o - prev_off, Point::Tree { edge: v, offset: o }, true);
                index.push((v, o, id));
                prev = id;
                prev_off = o;
            }
            let end_marked = on_edge[v].last().is_some_and(|&o| l.is_finite() && o >= l - TOL);
            if has_below || end_marked {
                let id = full.add_child(prev, l - prev_off, tree.node_point(v), end_marked);
                index.push((v, l, id));
                stack.push((v, id));
            }
        }
    }
    let (trimmed, map) = full.prune();
    let lookup = |e: usize, o: f64| -> usize {
        index
            .iter()
            .find(|&&(ie, io, _)| ie == e && (io - o).abs() <= TOL)
            .and_then(|&(_, _, id)| map[id])
            .expect("every point was inserted into the span tree")
    };
    let nodes = points.iter().map(|&(e, o)| lookup(e, o)).collect();
    (trimmed, nodes)
}

/// Span tree of points on the line, rooted at the origin 0.
pub fn line_span(points: &[f64]) -> (SpanTree, Vec<usize>) {
    let mut full = SpanTree::single(Point::Line(0.0));
    full.marked[0] = points.iter().any(|x| x.abs() <= TOL);
    let mut index: Vec<(f64, usize)> = vec![(0.0, 0)];
    for sign in [1.0, -1.0] {
        let mut side: Vec<f64> = points.iter().map(|x| x * sign).filter(|&x| x > TOL).collect();
        side.sort_by(|a, b| a.partial_cmp(b).unwrap());
        side.dedup_by(|a, b| (*a - *b).abs() <= TOL);
        let mut prev = 0;
        let mut prev_x = 0.0;
        for x in side {
            let id = full.add_child(prev, x - prev_x, Point::Line(sign * x), true);
            index.push((sign * x, id));
            prev = id;
            prev_x = x;
        }
    }
    let nodes = points
        .iter()
        .map(|&x| {
            if x.abs() <= TOL {
                0
            } else {
                index.iter().find(|&&(p, _)| (p - x).abs() <= TOL).unwrap().1
            }
        })
        .collect();
    (full, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(rays: usize) -> WeightedTree {
        let edges: Vec<_> = (1..=rays).map(|v| (0, v, Some(1.0))).collect();
        WeightedTree::from_edges(&edges).unwrap()
    }

    #[test]
    fn star_trim_keeps_only_used_rays() {
        let t = star(5);
        let (span, nodes) = trim_tree(&t, &[(2, 1.0), (4, 0.5)]);
        assert_eq!(span.leaves().len(), 2);
        assert_eq!(nodes.len(), 2);
        assert!((span.total_length() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn trim_truncates_edge_at_last_point() {
        let t = WeightedTree::from_edges(&[(0, 1, Some(2.0)), (1, 2, Some(3.0))]).unwrap();
        let (span, _) = trim_tree(&t, &[(2, 1.0)]);
        assert!((span.total_length() - 3.0).abs() < 1e-12);
        assert_eq!(span.leaves().len(), 1);
    }

    #[test]
    fn unbounded_leaf_edge_is_trimmed() {
        let t = WeightedTree::from_edges(&[(0, 1, None)]).unwrap();
        let (span, _) = trim_tree(&t, &[(1, 7.0)]);
        assert!((span.total_length() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn reroot_path_at_endpoint_keeps_one_leaf() {
        let (span, nodes) = line_span(&[1.0, 2.0]);
        assert_eq!(span.leaves().len(), 1);
        let r = span.reroot(nodes[1]);
        assert_eq!(r.leaves().len(), 1);
        assert_eq!(r.label[r.leaves()[0]], Point::Line(0.0));
    }

    #[test]
    fn reroot_at_midpoint_gives_two_leaves() {
        let (span, nodes) = line_span(&[1.0, 2.0]);
        let r = span.reroot(nodes[0]);
        assert_eq!(r.leaves().len(), 2);
    }

    #[test]
    fn ancestor_points_on_same_branch() {
        let t = WeightedTree::from_edges(&[(0, 1, Some(1.0)), (1, 2, Some(1.0)), (0, 3, Some(2.0))]).unwrap();
        assert!((t.distance((1, 0.5), (2, 0.5)) - 1.0).abs() < 1e-12);
        assert!((t.distance((2, 0.5), (3, 1.0)) - 2.5).abs() < 1e-12);
        let mid = t.move_along((2, 0.5), (3, 1.0), 2.0);
        assert_eq!(mid, (3, 0.5));
    }
}
